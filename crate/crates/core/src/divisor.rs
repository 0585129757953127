//! Vertical divisors attached to horizontal divisors: `V_D`, `Φ`, the
//! component divisors `V_l`, the coefficients `γ_{D,i}` of `U_D`, and the
//! local Néron pairing.

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fiber::{validate, FiberKey, HorizontalIncidence, SpecialFiber};
use crate::linalg::{build_laplacian, pseudoinverse, PseudoinverseResult, RatMatrix};
use crate::rational::{fmt_rat, int, Rat};

/// A vertical `Q`-divisor `Σ y_i Γ_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerticalDivisor {
    pub fiber: FiberKey,
    pub coeffs: Vec<Rat>,
}

impl VerticalDivisor {
    pub fn zero(fiber: &SpecialFiber) -> Self {
        Self {
            fiber: fiber.key(),
            coeffs: vec![Rat::zero(); fiber.len()],
        }
    }

    /// The full fiber `X_s = Σ b_i Γ_i`.
    pub fn full_fiber(fiber: &SpecialFiber) -> Self {
        Self {
            fiber: fiber.key(),
            coeffs: fiber.components().iter().map(|c| int(c.multiplicity as i64)).collect(),
        }
    }

    /// The single component `Γ_i`.
    pub fn component(fiber: &SpecialFiber, i: usize) -> Self {
        let mut d = Self::zero(fiber);
        d.coeffs[i] = Rat::one();
        d
    }

    pub fn from_coeffs(fiber: &SpecialFiber, coeffs: Vec<Rat>) -> Result<Self> {
        if coeffs.len() != fiber.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} components",
                coeffs.len(),
                fiber.len()
            )));
        }
        Ok(Self {
            fiber: fiber.key(),
            coeffs,
        })
    }

    /// `self + q·other`.
    pub fn plus_scaled(&self, q: &Rat, other: &Self) -> Result<Self> {
        same_fiber(self.fiber, other.fiber)?;
        Ok(Self {
            fiber: self.fiber,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + q * b).collect(),
        })
    }

    pub fn scaled(&self, q: &Rat) -> Self {
        Self {
            fiber: self.fiber,
            coeffs: self.coeffs.iter().map(|y| y * q).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

/// `γ_{D,i}` and `U_D = Σ γ_{D,i} Γ_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaVector {
    pub gamma: Vec<Rat>,
    pub u_divisor: VerticalDivisor,
}

/// Closed form of `(U_D·Γ_i)` next to the value from the pairing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UDotComparison {
    pub index: usize,
    pub closed: Rat,
    pub paired: Rat,
}

impl UDotComparison {
    pub fn agrees(&self) -> bool {
        self.closed == self.paired
    }
}

fn same_fiber(a: FiberKey, b: FiberKey) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FiberMismatch)
    }
}

/// `(V·W) = Σ y_i w_j (Γ_i·Γ_j)`.
pub fn pair_vertical(fiber: &SpecialFiber, v: &VerticalDivisor, w: &VerticalDivisor) -> Result<Rat> {
    same_fiber(v.fiber, fiber.key())?;
    same_fiber(w.fiber, fiber.key())?;
    let t = fiber.intersect_with_all(&w.coeffs);
    Ok(dot(&v.coeffs, &t))
}

/// `(E_X·V) = Σ y_i v_i(E)/b_i`.
pub fn horizontal_dot_vertical(fiber: &SpecialFiber, e: &HorizontalIncidence, v: &VerticalDivisor) -> Result<Rat> {
    same_fiber(e.fiber_key(), fiber.key())?;
    same_fiber(v.fiber, fiber.key())?;
    Ok(fiber
        .components()
        .iter()
        .enumerate()
        .filter(|(i, _)| !v.coeffs[*i].is_zero() && !e.incidence[*i].is_zero())
        .map(|(i, c)| &v.coeffs[i] * &e.incidence[i] / int(c.multiplicity as i64))
        .sum())
}

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// A validated fiber with `M`, `M⁺` and the canonical degrees, plus lazily
/// computed caches of the component divisors `V_l`.
#[derive(Debug)]
pub struct FiberAnalysis {
    fiber: SpecialFiber,
    laplacian: RatMatrix,
    pinv: PseudoinverseResult,
    a: Vec<Rat>,
    a_prime: Vec<Rat>,
    units: OnceLock<Vec<VerticalDivisor>>,
    unit_squares: OnceLock<Vec<Rat>>,
}

impl FiberAnalysis {
    /// Validates the fiber and computes `M⁺`.
    pub fn new(fiber: SpecialFiber) -> Result<Self> {
        let report = validate(&fiber);
        if !report.is_valid() {
            let failures: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.witness)).collect();
            return Err(Error::InvalidFiber {
                name: fiber.name().to_string(),
                failures: failures.join("; "),
            });
        }
        let laplacian = build_laplacian(&fiber);
        let pinv = pseudoinverse(&laplacian)?;
        Self::assemble(fiber, laplacian, pinv)
    }

    /// Reuse a pseudoinverse computed elsewhere; it is checked to be the
    /// pseudoinverse of this fiber's `M` only through its dimension.
    pub fn with_pseudoinverse(fiber: SpecialFiber, pinv: PseudoinverseResult) -> Result<Self> {
        let report = validate(&fiber);
        if !report.is_valid() {
            return Err(Error::InvalidFiber {
                name: fiber.name().to_string(),
                failures: report.failures().map(|c| c.name.clone()).collect::<Vec<_>>().join("; "),
            });
        }
        if pinv.dim() != fiber.len() {
            return Err(Error::DimensionMismatch(format!(
                "pseudoinverse is {0}x{0}, fiber has {1} components",
                pinv.dim(),
                fiber.len()
            )));
        }
        let laplacian = build_laplacian(&fiber);
        Self::assemble(fiber, laplacian, pinv)
    }

    fn assemble(fiber: SpecialFiber, laplacian: RatMatrix, pinv: PseudoinverseResult) -> Result<Self> {
        let a = fiber.canonical_degrees();
        let two_g_minus_2 = int(2 * fiber.genus() - 2);
        let a_prime = a.iter().map(|x| x / &two_g_minus_2).collect();
        Ok(Self {
            fiber,
            laplacian,
            pinv,
            a,
            a_prime,
            units: OnceLock::new(),
            unit_squares: OnceLock::new(),
        })
    }

    pub fn fiber(&self) -> &SpecialFiber {
        &self.fiber
    }

    pub fn laplacian(&self) -> &RatMatrix {
        &self.laplacian
    }

    pub fn pinv(&self) -> &PseudoinverseResult {
        &self.pinv
    }

    pub fn len(&self) -> usize {
        self.fiber.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fiber.is_empty()
    }

    pub fn genus(&self) -> i64 {
        self.fiber.genus()
    }

    /// Canonical degrees `a_i`.
    pub fn a(&self) -> &[Rat] {
        &self.a
    }

    /// `a'_i = a_i/(2g-2)`.
    pub fn a_prime(&self) -> &[Rat] {
        &self.a_prime
    }

    fn b(&self, i: usize) -> Rat {
        int(self.fiber.component(i).multiplicity as i64)
    }

    fn check_incidence(&self, d: &HorizontalIncidence) -> Result<()> {
        same_fiber(d.fiber_key(), self.fiber.key())?;
        if d.incidence.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "incidence has {} entries, fiber has {} components",
                d.incidence.len(),
                self.len()
            )));
        }
        let sum = d.incidence_sum();
        if sum != d.degree {
            return Err(Error::DegreeMismatch {
                id: d.id.clone(),
                sum: fmt_rat(&sum),
                expected: fmt_rat(&d.degree),
            });
        }
        Ok(())
    }

    /// `V_D = Σ b_i c_i Γ_i` with `c = -M⁺w`, `w_i = d b_i a'_i - v_i`.
    ///
    /// Works for any degree, including 0. The defining property
    /// `v_i/b_i + (V_D·Γ_i) = d a'_i` is re-checked before returning.
    pub fn solve_vertical(&self, d: &HorizontalIncidence) -> Result<VerticalDivisor> {
        self.check_incidence(d)?;
        let r = self.len();
        let w: Vec<Rat> = (0..r)
            .map(|i| &d.degree * self.b(i) * &self.a_prime[i] - &d.incidence[i])
            .collect();
        let c = self.pinv.mplus.mul_vec(&w)?;
        let coeffs: Vec<Rat> = c.into_iter().enumerate().map(|(i, ci)| -(ci * self.b(i))).collect();
        let v = VerticalDivisor {
            fiber: self.fiber.key(),
            coeffs,
        };
        self.check_defining_property(d, &v)?;
        Ok(v)
    }

    fn check_defining_property(&self, d: &HorizontalIncidence, v: &VerticalDivisor) -> Result<()> {
        let t = self.fiber.intersect_with_all(&v.coeffs);
        for (i, ti) in t.iter().enumerate() {
            let lhs = &d.incidence[i] / self.b(i) + ti;
            let rhs = &d.degree * &self.a_prime[i];
            if lhs != rhs {
                return Err(Error::SelfCheckFailed(format!(
                    "V_{} at component `{}`: {} != {}",
                    d.id,
                    self.fiber.component(i).id,
                    fmt_rat(&lhs),
                    fmt_rat(&rhs)
                )));
            }
        }
        Ok(())
    }

    /// `Φ(Z)` for a degree-0 incidence: `(Z_X + Φ(Z)·Γ_i) = 0` for all `i`.
    pub fn phi(&self, z: &HorizontalIncidence) -> Result<VerticalDivisor> {
        let sum = z.incidence_sum();
        if !z.degree.is_zero() || !sum.is_zero() {
            return Err(Error::DegreeMismatch {
                id: z.id.clone(),
                sum: fmt_rat(&sum),
                expected: "0".into(),
            });
        }
        self.solve_vertical(z)
    }

    /// `V_l`: the vertical divisor of the unit incidence `v = e_l`.
    ///
    /// All `V_l` are computed together on first use from one column of
    /// `M⁺` each and cached.
    pub fn unit_divisor(&self, l: usize) -> Result<&VerticalDivisor> {
        if l >= self.len() {
            return Err(Error::IndexOutOfRange { index: l, len: self.len() });
        }
        Ok(&self.unit_divisors()[l])
    }

    pub fn unit_divisors(&self) -> &[VerticalDivisor] {
        self.units.get_or_init(|| {
            let r = self.len();
            let w: Vec<Rat> = (0..r).map(|i| self.b(i) * &self.a_prime[i]).collect();
            // c_l = -M⁺(b∘a') + M⁺ e_l.
            let base = self.pinv.mplus.mul_vec(&w).expect("dimensions agree");
            (0..r)
                .map(|l| VerticalDivisor {
                    fiber: self.fiber.key(),
                    coeffs: (0..r)
                        .map(|i| (self.pinv.entry(i, l) - &base[i]) * self.b(i))
                        .collect(),
                })
                .collect()
        })
    }

    /// `V_l²` for every `l`, using `(V_l·Γ_i) = a'_i - δ_il/b_i`.
    pub fn unit_squares(&self) -> &[Rat] {
        self.unit_squares.get_or_init(|| {
            self.unit_divisors()
                .iter()
                .enumerate()
                .map(|(l, v)| dot(&v.coeffs, &self.a_prime) - &v.coeffs[l] / self.b(l))
                .collect()
        })
    }

    /// `γ_{D,i} = (1/d)(V_D² - (V_D - d V_i)²) = 2(V_D·V_i) - d V_i²`.
    pub fn gamma_u(&self, d: &HorizontalIncidence) -> Result<GammaVector> {
        self.check_incidence(d)?;
        if !d.degree.is_positive() {
            return Err(Error::NonpositiveDegree {
                id: d.id.clone(),
                degree: fmt_rat(&d.degree),
            });
        }
        let v_d = self.solve_vertical(d)?;
        Ok(self.gamma_from(&d.degree, &v_d))
    }

    /// `γ` for a given `V_D` (any representative mod the full fiber).
    pub fn gamma_from(&self, degree: &Rat, v_d: &VerticalDivisor) -> GammaVector {
        let t = self.fiber.intersect_with_all(&v_d.coeffs);
        let squares = self.unit_squares();
        let gamma: Vec<Rat> = self
            .unit_divisors()
            .iter()
            .zip(squares)
            .map(|(v_i, sq)| int(2) * dot(&v_i.coeffs, &t) - degree * sq)
            .collect();
        GammaVector {
            u_divisor: VerticalDivisor {
                fiber: self.fiber.key(),
                coeffs: gamma.clone(),
            },
            gamma,
        }
    }

    fn require_degree_one(&self, d: &HorizontalIncidence) -> Result<()> {
        if !d.degree.is_one() {
            return Err(Error::DegreeNotOne {
                id: d.id.clone(),
                degree: fmt_rat(&d.degree),
            });
        }
        Ok(())
    }

    /// `-Σ_j n_jj m_ij + 2v_i(D) - 2/r` for a degree-1 `D`.
    pub fn u_dot_component_closed(&self, d: &HorizontalIncidence, i: usize) -> Result<Rat> {
        self.check_incidence(d)?;
        self.require_degree_one(d)?;
        let r = self.len();
        if i >= r {
            return Err(Error::IndexOutOfRange { index: i, len: r });
        }
        let s: Rat = (0..r)
            .filter(|&j| !self.laplacian.get(i, j).is_zero())
            .map(|j| self.pinv.entry(j, j) * self.laplacian.get(i, j))
            .sum();
        Ok(-s + int(2) * &d.incidence[i] - Rat::new(2.into(), (r as i64).into()))
    }

    /// The closed form of `(U_D·Γ_i)` against the pairing, for every `i`.
    ///
    /// Equal on reduced fibers; on fibers with multiple components the two
    /// may differ and the caller decides what to do with that.
    pub fn u_dot_component_comparison(&self, d: &HorizontalIncidence) -> Result<Vec<UDotComparison>> {
        let u = self.gamma_u(d)?.u_divisor;
        let paired = self.fiber.intersect_with_all(&u.coeffs);
        paired
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                Ok(UDotComparison {
                    index: i,
                    closed: self.u_dot_component_closed(d, i)?,
                    paired: p,
                })
            })
            .collect()
    }

    pub fn pair_vertical(&self, v: &VerticalDivisor, w: &VerticalDivisor) -> Result<Rat> {
        pair_vertical(&self.fiber, v, w)
    }

    pub fn horizontal_dot_vertical(&self, e: &HorizontalIncidence, v: &VerticalDivisor) -> Result<Rat> {
        horizontal_dot_vertical(&self.fiber, e, v)
    }

    /// `[E₁,E₂] = h + (E₁·V_{E₂}) + (V_{E₁}·E₂) + (V_{E₁}·V_{E₂})`, where
    /// `h = (E₁,X·E₂,X)` is supplied by the caller.
    pub fn neron_pairing(&self, e1: &HorizontalIncidence, e2: &HorizontalIncidence, horizontal_part: &Rat) -> Result<Rat> {
        let v1 = self.solve_vertical(e1)?;
        let v2 = self.solve_vertical(e2)?;
        Ok(horizontal_part
            + self.horizontal_dot_vertical(e1, &v2)?
            + self.horizontal_dot_vertical(e2, &v1)?
            + self.pair_vertical(&v1, &v2)?)
    }
}
