//! Generators for the standard example fibers and the reference values
//! they are audited against.

mod fermat;
mod genus2;
mod realization;
mod x1n;

pub use fermat::{
    corollary_gamma_corrected, corollary_gamma_printed, equal_mod_fiber, fermat_analysis, fermat_closed_forms,
    fermat_fiber, fermat_fiber_unchecked, k_dot_u_printed, lemma_divisor_corrected, lemma_divisor_printed,
    semipositivity_printed, theorem_bound_printed, theorem_value_printed, valid_r, w_squared_printed,
    FermatClosedForms, FermatComponent, FermatLayout,
};
pub use genus2::{genus2_label, genus2_realization, genus2_type, table1_reference, Genus2Type};
pub use realization::{GraphRealization, Primitive};
pub use x1n::{check_n, x1n_data, x1n_fiber, x1n_genus, x1n_model, x1n_prime, X1nData, X1nPrime};

pub(crate) use x1n::euler_phi;

use crate::error::{Error, Result};
use crate::fiber::{Component, HorizontalIncidence, SpecialFiber};
use crate::rational::{int, rat};

/// Two components of genera `p1`, `p2` meeting transversally in `s` points.
pub fn banana(s: u32, p1: u32, p2: u32) -> Result<SpecialFiber> {
    if s == 0 {
        return Err(Error::InvalidParams("banana needs s >= 1".into()));
    }
    let g = p1 as i64 + p2 as i64 + s as i64 - 1;
    if g <= 1 {
        return Err(Error::InvalidGenus(format!("banana({s},{p1},{p2}) has genus {g}")));
    }
    let si = s as i64;
    SpecialFiber::new(
        format!("banana({s},{p1},{p2})"),
        g,
        vec![Component::new("G1", 1, p1, int(-si)), Component::new("G2", 1, p2, int(-si))],
        [("G1", "G2", int(si))],
    )
}

/// A catalog family with its parameter names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub const ENTRIES: [CatalogEntry; 4] = [
    CatalogEntry {
        name: "banana",
        params: "s,p1,p2",
        summary: "two components meeting in s points",
    },
    CatalogEntry {
        name: "genus2",
        params: "type[,a[,b[,c]]]",
        summary: "semistable genus-2 reduction types I..VII",
    },
    CatalogEntry {
        name: "x1n",
        params: "N,p",
        summary: "fiber of X1(N) at a prime above p | N",
    },
    CatalogEntry {
        name: "fermat",
        params: "p,r",
        summary: "non-reduced fiber of the Fermat curve of prime exponent p",
    },
];

fn parse_u<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidParams(format!("{what}: `{s}` is not a nonnegative integer")))
}

fn expect_len(name: &str, params: &[String], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(Error::InvalidParams(format!(
            "{name} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

/// Builds a catalog fiber by name together with its default divisors:
/// `D1` (unit incidence on the first component) for reduced fibers,
/// additionally `Dsym` for banana-shaped fibers, and `Sx` for Fermat fibers.
pub fn emit(name: &str, params: &[String]) -> Result<(SpecialFiber, Vec<HorizontalIncidence>)> {
    let fiber = match name {
        "banana" => {
            expect_len(name, params, 3)?;
            banana(
                parse_u(&params[0], "s")?,
                parse_u(&params[1], "p1")?,
                parse_u(&params[2], "p2")?,
            )?
        }
        "genus2" => {
            let (t, rest) = params
                .split_first()
                .ok_or_else(|| Error::InvalidParams("genus2 needs a type".into()))?;
            let t: Genus2Type = t.trim().parse()?;
            let values = rest.iter().map(|s| parse_u(s, "length")).collect::<Result<Vec<u32>>>()?;
            genus2_type(t, &values)?
        }
        "x1n" => {
            expect_len(name, params, 2)?;
            x1n_fiber(parse_u(&params[0], "N")?, parse_u(&params[1], "p")?)?
        }
        "fermat" => {
            expect_len(name, params, 2)?;
            let f = fermat_fiber(parse_u(&params[0], "p")?, parse_u(&params[1], "r")?)?;
            let sx = HorizontalIncidence::unit(&f, 0);
            let sx = HorizontalIncidence::from_vec(&f, "Sx", sx.degree, sx.incidence)?;
            return Ok((f, vec![sx]));
        }
        other => return Err(Error::InvalidParams(format!("unknown catalog entry `{other}`"))),
    };
    let mut divisors = Vec::new();
    if fiber.is_reduced() {
        let d1 = HorizontalIncidence::unit(&fiber, 0);
        divisors.push(HorizontalIncidence::from_vec(&fiber, "D1", d1.degree, d1.incidence)?);
    }
    if fiber.len() == 2 {
        divisors.push(HorizontalIncidence::from_vec(
            &fiber,
            "Dsym",
            int(1),
            vec![rat(1, 2), rat(1, 2)],
        )?);
    }
    Ok((fiber, divisors))
}
