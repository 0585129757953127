//! `β_D`, `(K·U_D)` and relative-semipositivity certificates.

use num_traits::{One, Signed, Zero};

use crate::divisor::{FiberAnalysis, VerticalDivisor};
use crate::error::{Error, Result};
use crate::fiber::HorizontalIncidence;
use crate::linalg::effective_resistance;
use crate::rational::{fmt_rat, int, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetaPath {
    /// `((1-g)/g)(2V_D+U_D)² + 2(K·U_D)`.
    Direct,
    /// Four-term expression in `M`, `M⁺` and `a` (reduced fibers only).
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BetaReport {
    pub beta: Rat,
    pub path: BetaPath,
    pub v_d_squared: Option<Rat>,
    /// `(2V_D + U_D)²`.
    pub w_squared: Option<Rat>,
    pub k_dot_u: Option<Rat>,
    pub gamma: Option<Vec<Rat>>,
    pub fiber: String,
    pub divisor: Option<String>,
}

impl BetaReport {
    pub fn render(&self) -> String {
        let mut out = format!(
            "fiber {}\npath {}\nbeta {}\n",
            self.fiber,
            match self.path {
                BetaPath::Direct => "direct",
                BetaPath::ClosedForm => "closed_form",
            },
            fmt_rat(&self.beta)
        );
        if let Some(d) = &self.divisor {
            out.push_str(&format!("divisor {d}\n"));
        }
        for (name, v) in [
            ("V_D^2", &self.v_d_squared),
            ("(2V_D+U_D)^2", &self.w_squared),
            ("K.U_D", &self.k_dot_u),
        ] {
            if let Some(v) = v {
                out.push_str(&format!("{name} {}\n", fmt_rat(v)));
            }
        }
        if let Some(g) = &self.gamma {
            let parts: Vec<String> = g.iter().map(fmt_rat).collect();
            out.push_str(&format!("gamma {}\n", parts.join(" ")));
        }
        out
    }
}

/// Per-component `q_i = a_i + 2(D_X·Γ_i) - (U_D·Γ_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemipositivityCertificate {
    pub q: Vec<Rat>,
    /// All `q_i >= 0`.
    pub verdict: bool,
    /// Reduced fibers: `m_ii + 2p_a - 2 + Σ_j n_jj m_ij + 2/r`.
    pub d_free: Option<Vec<Rat>>,
    /// Reduced fibers: `m_ii + Σ_j r(Γ_i,Γ_j) m_ij`.
    pub resistance_bound: Option<Vec<Rat>>,
}

impl SemipositivityCertificate {
    pub fn resistance_bound_holds(&self) -> Option<bool> {
        self.resistance_bound
            .as_ref()
            .map(|v| v.iter().all(|x| !x.is_negative()))
    }
}

fn require_degree_one(d: &HorizontalIncidence) -> Result<()> {
    if !d.degree.is_one() {
        return Err(Error::DegreeNotOne {
            id: d.id.clone(),
            degree: fmt_rat(&d.degree),
        });
    }
    Ok(())
}

fn require_reduced(an: &FiberAnalysis) -> Result<()> {
    if !an.fiber().is_reduced() {
        return Err(Error::NotReduced(an.fiber().name().to_string()));
    }
    Ok(())
}

/// `(K·V) = Σ y_i a_i`.
pub fn k_dot(an: &FiberAnalysis, v: &VerticalDivisor) -> Result<Rat> {
    if v.fiber != an.fiber().key() {
        return Err(Error::FiberMismatch);
    }
    Ok(v.coeffs
        .iter()
        .zip(an.a())
        .filter(|(y, _)| !y.is_zero())
        .map(|(y, a)| y * a)
        .sum())
}

/// `β_D` from its definition, for a degree-1 `D`.
pub fn beta_direct(an: &FiberAnalysis, d: &HorizontalIncidence) -> Result<BetaReport> {
    require_degree_one(d)?;
    let v = an.solve_vertical(d)?;
    let gamma = an.gamma_u(d)?;
    let u = &gamma.u_divisor;
    let w = u.plus_scaled(&int(2), &v)?;
    let w_sq = an.pair_vertical(&w, &w)?;
    let k_u = k_dot(an, u)?;
    let g = int(an.genus());
    let beta = (int(1) - &g) / &g * &w_sq + int(2) * &k_u;
    Ok(BetaReport {
        beta,
        path: BetaPath::Direct,
        v_d_squared: Some(an.pair_vertical(&v, &v)?),
        w_squared: Some(w_sq),
        k_dot_u: Some(k_u),
        gamma: Some(gamma.gamma),
        fiber: an.fiber().name().to_string(),
        divisor: Some(d.id.clone()),
    })
}

/// `β` of a reduced fiber from `M`, `M⁺` and `a` alone:
///
/// `4(g-1)/(gr) Tr M⁺ + ((g-1)/g) ΣΣ n_ii n_jj m_ij
///  + (2(g-1)/g) Σ a_i n_ii - (1/g) ΣΣ a_i a_j n_ij`.
pub fn beta_closed(an: &FiberAnalysis) -> Result<BetaReport> {
    require_reduced(an)?;
    let p = an.pinv();
    let m = an.laplacian();
    let r = an.len();
    let g = int(an.genus());
    let g1 = &g - int(1);
    let diag = p.mplus.diagonal();
    let a = an.a();

    let t1 = int(4) * &g1 / (&g * int(r as i64)) * &p.trace;
    let m_diag = m.mul_vec(&diag)?;
    let t2: Rat = diag.iter().zip(&m_diag).map(|(x, y)| x * y).sum();
    let t3: Rat = a.iter().zip(&diag).map(|(x, y)| x * y).sum();
    let n_a = p.mplus.mul_vec(a)?;
    let t4: Rat = a.iter().zip(&n_a).map(|(x, y)| x * y).sum();

    let beta = t1 + &g1 / &g * t2 + int(2) * &g1 / &g * t3 - t4 / &g;
    Ok(BetaReport {
        beta,
        path: BetaPath::ClosedForm,
        v_d_squared: None,
        w_squared: None,
        k_dot_u: None,
        gamma: None,
        fiber: an.fiber().name().to_string(),
        divisor: None,
    })
}

/// `(U_D·K) = -Σ V_i² a_i` on reduced fibers (independent of `D`).
pub fn u_dot_k_closed(an: &FiberAnalysis) -> Result<Rat> {
    require_reduced(an)?;
    Ok(-an
        .unit_squares()
        .iter()
        .zip(an.a())
        .map(|(s, a)| s * a)
        .sum::<Rat>())
}

/// `q_i` for a degree-1 `D`; on reduced fibers also the `D`-free form and
/// the effective-resistance bound.
pub fn semipositivity_certificate(an: &FiberAnalysis, d: &HorizontalIncidence) -> Result<SemipositivityCertificate> {
    require_degree_one(d)?;
    let fiber = an.fiber();
    let u = an.gamma_u(d)?.u_divisor;
    let u_dot = fiber.intersect_with_all(&u.coeffs);
    let q: Vec<Rat> = (0..an.len())
        .map(|i| {
            let b = int(fiber.component(i).multiplicity as i64);
            &an.a()[i] + int(2) * &d.incidence[i] / b - &u_dot[i]
        })
        .collect();
    let verdict = q.iter().all(|x| !x.is_negative());

    let (d_free, resistance_bound) = if fiber.is_reduced() {
        let r = an.len();
        let m = an.laplacian();
        let p = an.pinv();
        let two_over_r = Rat::new(2.into(), (r as i64).into());
        let mut free = Vec::with_capacity(r);
        let mut bound = Vec::with_capacity(r);
        for i in 0..r {
            let nbrs: Vec<usize> = (0..r).filter(|&j| !m.get(i, j).is_zero()).collect();
            let s: Rat = nbrs.iter().map(|&j| p.entry(j, j) * m.get(i, j)).sum();
            let pa = int(fiber.component(i).arithmetic_genus as i64);
            free.push(m.get(i, i) + int(2) * pa - int(2) + s + &two_over_r);
            let mut acc = m.get(i, i).clone();
            for &j in &nbrs {
                acc += effective_resistance(p, i, j)? * m.get(i, j);
            }
            bound.push(acc);
        }
        (Some(free), Some(bound))
    } else {
        (None, None)
    };

    Ok(SemipositivityCertificate {
        q,
        verdict,
        d_free,
        resistance_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::{Component, SpecialFiber};
    use crate::rational::rat;

    fn banana(s: i64, p1: u32, p2: u32) -> SpecialFiber {
        let g = p1 as i64 + p2 as i64 + s - 1;
        SpecialFiber::new(
            "banana",
            g,
            vec![Component::new("G1", 1, p1, int(-s)), Component::new("G2", 1, p2, int(-s))],
            [("G1", "G2", int(s))],
        )
        .unwrap()
    }

    fn irreducible() -> FiberAnalysis {
        let f = SpecialFiber::new("irr", 2, vec![Component::new("G", 1, 2, int(0))], Vec::<(&str, &str, Rat)>::new())
            .unwrap();
        FiberAnalysis::new(f).unwrap()
    }

    #[test]
    fn banana_beta_both_paths() {
        let an = FiberAnalysis::new(banana(1, 1, 1)).unwrap();
        let f = an.fiber().clone();
        let sym = HorizontalIncidence::from_vec(&f, "sym", int(1), vec![rat(1, 2), rat(1, 2)]).unwrap();
        let direct = beta_direct(&an, &sym).unwrap();
        assert_eq!(direct.beta, int(1));
        assert_eq!(direct.k_dot_u, Some(rat(1, 2)));
        assert_eq!(beta_closed(&an).unwrap().beta, int(1));
        assert_eq!(u_dot_k_closed(&an).unwrap(), rat(1, 2));
        let full = VerticalDivisor::full_fiber(&f);
        assert_eq!(k_dot(&an, &full).unwrap(), int(2));
        assert_eq!(k_dot(&an, &VerticalDivisor::zero(&f)).unwrap(), int(0));
    }

    #[test]
    fn theta_fiber_beta() {
        let an = FiberAnalysis::new(banana(3, 0, 0)).unwrap();
        let f = an.fiber().clone();
        let sym = HorizontalIncidence::from_vec(&f, "sym", int(1), vec![rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(beta_direct(&an, &sym).unwrap().beta, rat(1, 3));
        assert_eq!(beta_closed(&an).unwrap().beta, rat(1, 3));
    }

    #[test]
    fn cycle_of_length_two_with_elliptic_vertex() {
        let an = FiberAnalysis::new(banana(2, 1, 0)).unwrap();
        assert_eq!(beta_closed(&an).unwrap().beta, rat(1, 4));
        assert_eq!(u_dot_k_closed(&an).unwrap(), int(0));
    }

    #[test]
    fn irreducible_fiber_is_zero() {
        let an = irreducible();
        let d = HorizontalIncidence::unit(an.fiber(), 0);
        assert_eq!(beta_direct(&an, &d).unwrap().beta, int(0));
        assert_eq!(beta_closed(&an).unwrap().beta, int(0));
        assert_eq!(u_dot_k_closed(&an).unwrap(), int(0));
    }

    #[test]
    fn banana_semipositivity() {
        let an = FiberAnalysis::new(banana(1, 1, 1)).unwrap();
        let f = an.fiber().clone();
        let sym = HorizontalIncidence::from_vec(&f, "sym", int(1), vec![rat(1, 2), rat(1, 2)]).unwrap();
        let c = semipositivity_certificate(&an, &sym).unwrap();
        assert_eq!(c.q, vec![int(2), int(2)]);
        assert!(c.verdict);
        assert_eq!(c.d_free, Some(c.q.clone()));
        assert_eq!(c.resistance_bound_holds(), Some(true));
        let d1 = HorizontalIncidence::unit(&f, 0);
        assert_eq!(semipositivity_certificate(&an, &d1).unwrap().q, c.q);
    }

    #[test]
    fn degree_and_reducedness_guards() {
        let an = FiberAnalysis::new(banana(1, 1, 1)).unwrap();
        let f = an.fiber().clone();
        let d2 = HorizontalIncidence::from_vec(&f, "d2", int(2), vec![int(1), int(1)]).unwrap();
        assert!(matches!(beta_direct(&an, &d2), Err(Error::DegreeNotOne { .. })));
        assert!(matches!(semipositivity_certificate(&an, &d2), Err(Error::DegreeNotOne { .. })));

        // Non-reduced: one double component between two reduced ones.
        let nr = SpecialFiber::new(
            "nr",
            2,
            vec![
                Component::new("E1", 1, 1, int(-2)),
                Component::new("C", 2, 0, int(-1)),
                Component::new("E2", 1, 1, int(-2)),
            ],
            [("E1", "C", int(1)), ("C", "E2", int(1))],
        )
        .unwrap();
        let an = FiberAnalysis::new(nr).unwrap();
        assert!(matches!(beta_closed(&an), Err(Error::NotReduced(_))));
        assert!(matches!(u_dot_k_closed(&an), Err(Error::NotReduced(_))));
        let d = HorizontalIncidence::unit(an.fiber(), 0);
        assert!(beta_direct(&an, &d).is_ok());
        assert!(semipositivity_certificate(&an, &d).unwrap().d_free.is_none());
    }
}
