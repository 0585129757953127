use std::fmt;
use std::str::FromStr;

use super::realization::{GraphRealization, Primitive};
use crate::error::{Error, Result};
use crate::fiber::SpecialFiber;
use crate::rational::{int, Rat};

/// Semistable reduction types of genus-2 curves, by dual graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Genus2Type {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
}

impl Genus2Type {
    pub const ALL: [Genus2Type; 7] = [Self::I, Self::II, Self::III, Self::IV, Self::V, Self::VI, Self::VII];

    pub fn param_count(self) -> usize {
        match self {
            Self::I => 0,
            Self::II | Self::III => 1,
            Self::IV | Self::V => 2,
            Self::VI | Self::VII => 3,
        }
    }

    /// Types whose engine β is expected to agree with the reference table.
    pub fn table_asserted(self) -> bool {
        matches!(self, Self::I | Self::III | Self::V | Self::VII)
    }
}

impl fmt::Display for Genus2Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
            Self::V => "V",
            Self::VI => "VI",
            Self::VII => "VII",
        };
        f.write_str(s)
    }
}

impl FromStr for Genus2Type {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown genus-2 type `{s}`")))
    }
}

fn check_params(t: Genus2Type, params: &[u32]) -> Result<()> {
    if params.len() != t.param_count() {
        return Err(Error::InvalidParams(format!(
            "type {t} takes {} parameter(s), got {}",
            t.param_count(),
            params.len()
        )));
    }
    if params.contains(&0) {
        return Err(Error::InvalidParams(format!("type {t}: parameters must be positive")));
    }
    Ok(())
}

/// Label such as `VII(1,2,3)`.
pub fn genus2_label(t: Genus2Type, params: &[u32]) -> String {
    if params.is_empty() {
        return t.to_string();
    }
    let p: Vec<String> = params.iter().map(u32::to_string).collect();
    format!("{t}({})", p.join(","))
}

/// The realization of a genus-2 type with edge lengths `params`.
pub fn genus2_realization(t: Genus2Type, params: &[u32]) -> Result<GraphRealization> {
    check_params(t, params)?;
    let mut g = GraphRealization::default();
    match t {
        Genus2Type::I => {
            g.vertex("v", 2);
        }
        Genus2Type::II => {
            let u = g.vertex("u", 1);
            let v = g.vertex("v", 1);
            g.push(Primitive::Path(u, v, params[0]));
        }
        Genus2Type::III => {
            let v = g.vertex("v", 1);
            g.push(Primitive::Loop(v, params[0]));
        }
        Genus2Type::IV => {
            let u = g.vertex("u", 1);
            let w = g.vertex("w", 0);
            g.push(Primitive::Path(u, w, params[0])).push(Primitive::Loop(w, params[1]));
        }
        Genus2Type::V => {
            let v = g.vertex("v", 0);
            g.push(Primitive::Loop(v, params[0])).push(Primitive::Loop(v, params[1]));
        }
        Genus2Type::VI => {
            let u = g.vertex("u", 0);
            let w = g.vertex("w", 0);
            g.push(Primitive::Path(u, w, params[0]))
                .push(Primitive::Loop(u, params[1]))
                .push(Primitive::Loop(w, params[2]));
        }
        Genus2Type::VII => {
            let u = g.vertex("u", 0);
            let w = g.vertex("w", 0);
            for &len in params {
                g.push(Primitive::Path(u, w, len));
            }
        }
    }
    Ok(g)
}

pub fn genus2_type(t: Genus2Type, params: &[u32]) -> Result<SpecialFiber> {
    let f = genus2_realization(t, params)?.realize(&genus2_label(t, params))?;
    if f.genus() != 2 {
        return Err(Error::SelfCheckFailed(format!(
            "{} realized with genus {}",
            genus2_label(t, params),
            f.genus()
        )));
    }
    Ok(f)
}

/// Reference closed forms `(β, ε)` for each type, as printed in the
/// published genus-2 table.
pub fn table1_reference(t: Genus2Type, params: &[u32]) -> Result<(Rat, Rat)> {
    check_params(t, params)?;
    let q = |k: usize| int(params[k] as i64);
    let sixth = |x: Rat| x / int(6);
    let inv6 = |x: Rat| int(1) / (int(6) * x);
    Ok(match t {
        Genus2Type::I => (int(0), int(0)),
        Genus2Type::II => (q(0) - int(1), q(0)),
        Genus2Type::III => (sixth(q(0)) - inv6(q(0)), sixth(q(0))),
        Genus2Type::IV => (
            q(0) + sixth(q(1)) - inv6(q(1)),
            q(0) + sixth(q(1)),
        ),
        Genus2Type::V => (
            sixth(q(0) + q(1)) - inv6(q(0)) - inv6(q(1)),
            sixth(q(0) + q(1)),
        ),
        Genus2Type::VI => (
            q(0) + sixth(q(1) + q(2)) - inv6(q(1)) - inv6(q(2)),
            q(0) + sixth(q(1) + q(2)),
        ),
        Genus2Type::VII => {
            let (a, b, c) = (q(0), q(1), q(2));
            let s2 = &a * &b + &a * &c + &b * &c;
            let abc = &a * &b * &c;
            let head = sixth(&a + &b + &c) + &abc / (int(6) * &s2);
            let tail = (&a * &a * &b
                + &a * &a * &c
                + &a * &b * &b
                + int(6) * &abc
                + &a * &c * &c
                + &b * &b * &c
                + &b * &c * &c)
                / (int(6) * &s2 * &s2);
            (&head - tail, head)
        }
    })
}
