use super::x1n::is_prime;
use crate::divisor::{FiberAnalysis, VerticalDivisor};
use crate::error::{Error, Result};
use crate::fiber::{Component, SpecialFiber};
use crate::rational::{fmt_rat, int, rat, Rat};

/// Where each family of components sits in the component order
/// `x, y, z, α_1, α_{1,1..p}, …, α_r, α_{r,1..p}, β_1..β_s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatLayout {
    pub p: u32,
    pub r: u32,
    pub s: u32,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub alpha: Vec<usize>,
    /// `pendants[i][j]` is `α_{i+1, j+1}`.
    pub pendants: Vec<Vec<usize>>,
    pub beta: Vec<usize>,
}

/// A component family, used to address the printed divisor formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FermatComponent {
    X,
    Y,
    Z,
    Beta(usize),
    Alpha(usize),
    Pendant(usize, usize),
}

impl FermatLayout {
    pub fn new(p: u32, r: u32) -> Result<Self> {
        if p <= 3 || !is_prime(p as u64) {
            return Err(Error::InvalidParams(format!("p = {p} must be a prime > 3")));
        }
        let s = p as i64 - 3 - 2 * r as i64;
        if s < 0 {
            return Err(Error::InvalidParams(format!("p = {p}, r = {r} gives s = p - 3 - 2r = {s} < 0")));
        }
        let mut next = 3;
        let mut alpha = Vec::new();
        let mut pendants = Vec::new();
        for _ in 0..r {
            alpha.push(next);
            pendants.push((next + 1..next + 1 + p as usize).collect());
            next += 1 + p as usize;
        }
        let beta = (next..next + s as usize).collect();
        Ok(Self {
            p,
            r,
            s: s as u32,
            x: 0,
            y: 1,
            z: 2,
            alpha,
            pendants,
            beta,
        })
    }

    pub fn len(&self) -> usize {
        3 + self.alpha.len() * (1 + self.p as usize) + self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, c: FermatComponent) -> usize {
        match c {
            FermatComponent::X => self.x,
            FermatComponent::Y => self.y,
            FermatComponent::Z => self.z,
            FermatComponent::Beta(j) => self.beta[j],
            FermatComponent::Alpha(i) => self.alpha[i],
            FermatComponent::Pendant(i, j) => self.pendants[i][j],
        }
    }

    /// The multiplicity-one components meeting every other main component:
    /// `x, y, z, β_j`.
    pub fn simple_main(&self) -> Vec<usize> {
        let mut v = vec![self.x, self.y, self.z];
        v.extend(&self.beta);
        v
    }

    /// Every component with its family, in component order.
    pub fn families(&self) -> Vec<FermatComponent> {
        let mut out = vec![FermatComponent::X, FermatComponent::Y, FermatComponent::Z];
        for i in 0..self.alpha.len() {
            out.push(FermatComponent::Alpha(i));
            out.extend((0..self.p as usize).map(|j| FermatComponent::Pendant(i, j)));
        }
        out.extend((0..self.beta.len()).map(FermatComponent::Beta));
        out
    }
}

/// The non-reduced special fiber of the minimal regular model of the
/// Fermat curve of exponent `p` (with `r` double components), without the
/// self-check.
pub fn fermat_fiber_unchecked(p: u32, r: u32) -> Result<(FermatLayout, SpecialFiber)> {
    let layout = FermatLayout::new(p, r)?;
    let pp = p as i64;
    let mut comps = vec![
        Component::new("x", 1, 0, int(1 - pp)),
        Component::new("y", 1, 0, int(1 - pp)),
        Component::new("z", 1, 0, int(1 - pp)),
    ];
    for i in 1..=r {
        comps.push(Component::new(format!("a{i}"), 2, 0, int(1 - pp)));
        for j in 1..=p {
            comps.push(Component::new(format!("a{i}.{j}"), 1, 0, int(-2)));
        }
    }
    for j in 1..=layout.s {
        comps.push(Component::new(format!("b{j}"), 1, 0, int(1 - pp)));
    }
    let mut main = layout.simple_main();
    main.extend(&layout.alpha);
    main.sort_unstable();
    let mut entries = Vec::new();
    for (k, &i) in main.iter().enumerate() {
        for &j in &main[k + 1..] {
            entries.push(((i, j), int(1)));
        }
    }
    for (a, pend) in layout.alpha.iter().zip(&layout.pendants) {
        for &q in pend {
            entries.push(((*a, q), int(1)));
        }
    }
    let genus = (pp - 1) * (pp - 2) / 2;
    let fiber = SpecialFiber::from_indexed(format!("fermat(p={p},r={r})"), genus, comps, entries)?;
    Ok((layout, fiber))
}

/// `a - b` is a rational multiple of the full fiber.
pub fn equal_mod_fiber(fiber: &SpecialFiber, a: &VerticalDivisor, b: &VerticalDivisor) -> bool {
    let mut ratio: Option<Rat> = None;
    for (i, c) in fiber.components().iter().enumerate() {
        let q = (&a.coeffs[i] - &b.coeffs[i]) / int(c.multiplicity as i64);
        match &ratio {
            None => ratio = Some(q),
            Some(r) if *r != q => return false,
            _ => {}
        }
    }
    true
}

fn combo(fiber: &SpecialFiber, terms: &[(usize, Rat)]) -> VerticalDivisor {
    let mut v = VerticalDivisor::zero(fiber);
    for (i, q) in terms {
        v.coeffs[*i] += q;
    }
    v
}

/// `V_l` as printed in the published lemma.
pub fn lemma_divisor_printed(layout: &FermatLayout, fiber: &SpecialFiber, c: FermatComponent) -> VerticalDivisor {
    let p = layout.p as i64;
    match c {
        FermatComponent::Pendant(i, j) => {
            let mut terms = vec![
                (layout.alpha[i], rat(-1, p)),
                (layout.pendants[i][j], rat(1, 2) - rat(1, 2 * p)),
            ];
            for (k, &q) in layout.pendants[i].iter().enumerate() {
                if k != j {
                    terms.push((q, rat(-1, 2 * p)));
                }
            }
            combo(fiber, &terms)
        }
        _ => lemma_divisor_corrected(layout, fiber, c),
    }
}

/// `V_l` solving the defining equations; differs from the printed lemma
/// only for the pendant components `α_{i,j}`.
pub fn lemma_divisor_corrected(layout: &FermatLayout, fiber: &SpecialFiber, c: FermatComponent) -> VerticalDivisor {
    let p = layout.p as i64;
    match c {
        FermatComponent::X | FermatComponent::Y | FermatComponent::Z | FermatComponent::Beta(_) => {
            combo(fiber, &[(layout.index(c), rat(1, p))])
        }
        FermatComponent::Alpha(i) => {
            let mut terms = vec![(layout.alpha[i], rat(1, p))];
            terms.extend(layout.pendants[i].iter().map(|&q| (q, rat(1, 2 * p))));
            combo(fiber, &terms)
        }
        FermatComponent::Pendant(i, j) => {
            let mut terms = vec![
                (layout.alpha[i], rat(1, p)),
                (layout.pendants[i][j], rat(1, 2) + rat(1, 2 * p)),
            ];
            for (k, &q) in layout.pendants[i].iter().enumerate() {
                if k != j {
                    terms.push((q, rat(1, 2 * p)));
                }
            }
            combo(fiber, &terms)
        }
    }
}

/// Coefficient of `L_c` in `U_D` for `D = S_x`, as printed.
pub fn corollary_gamma_printed(p: u32, c: FermatComponent) -> Rat {
    let p = int(p as i64);
    let p2 = &p * &p;
    match c {
        FermatComponent::X => (int(1) - &p) / &p2,
        FermatComponent::Y | FermatComponent::Z | FermatComponent::Beta(_) => (int(1) + &p) / &p2,
        FermatComponent::Alpha(_) => (int(1) + &p / int(2)) / &p2,
        FermatComponent::Pendant(..) => (&p2 / int(2) + &p / int(2) - int(3)) / &p2,
    }
}

/// Coefficient of `L_c` in `U_D` obtained from the corrected `V_{α_{i,j}}`.
pub fn corollary_gamma_corrected(p: u32, c: FermatComponent) -> Rat {
    match c {
        FermatComponent::Pendant(..) => {
            let p = int(p as i64);
            let p2 = &p * &p;
            (&p2 / int(2) + &p / int(2) + int(1)) / &p2
        }
        _ => corollary_gamma_printed(p, c),
    }
}

/// Builds the fiber, computes `M⁺`, and checks that the engine's `V_l`
/// reproduce the printed lemma divisors for `x, y, z, β_j, α_i` (mod the
/// full fiber) and satisfy `(V_l·Γ_i) = a'_i - δ_il/b_i` for every `l`.
pub fn fermat_analysis(p: u32, r: u32) -> Result<(FermatLayout, FiberAnalysis)> {
    let (layout, fiber) = fermat_fiber_unchecked(p, r)?;
    let an = FiberAnalysis::new(fiber)?;
    let f = an.fiber();
    for c in layout.families() {
        if matches!(c, FermatComponent::Pendant(..)) {
            continue;
        }
        let l = layout.index(c);
        let engine = an.unit_divisor(l)?;
        if !equal_mod_fiber(f, engine, &lemma_divisor_printed(&layout, f, c)) {
            return Err(Error::SelfCheckFailed(format!(
                "V_{} differs from the lemma modulo the fiber",
                f.component(l).id
            )));
        }
    }
    for (l, v) in an.unit_divisors().iter().enumerate() {
        for (i, t) in f.intersect_with_all(&v.coeffs).iter().enumerate() {
            let mut want = an.a_prime()[i].clone();
            if i == l {
                want -= Rat::new(1.into(), (f.component(i).multiplicity as i64).into());
            }
            if *t != want {
                return Err(Error::SelfCheckFailed(format!(
                    "(V_{}·{}) = {} != {}",
                    f.component(l).id,
                    f.component(i).id,
                    fmt_rat(t),
                    fmt_rat(&want)
                )));
            }
        }
    }
    Ok((layout, an))
}

/// Validated Fermat fiber; see [`fermat_analysis`] for the self-check.
pub fn fermat_fiber(p: u32, r: u32) -> Result<SpecialFiber> {
    Ok(fermat_analysis(p, r)?.1.fiber().clone())
}

/// Hand-derived closed forms in `(p, r)` for `D = S_x`, using the corrected
/// pendant coefficient. `W = 2V_D + U_D = A·Σ L_main + B·Σ L_α + C·Σ L_{α_ij}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatClosedForms {
    pub w_dot_main: Rat,
    pub w_dot_alpha: Rat,
    pub w_dot_pendant: Rat,
    pub w_squared: Rat,
    pub k_dot_u: Rat,
    pub beta: Rat,
}

pub fn fermat_closed_forms(p: u32, r: u32) -> FermatClosedForms {
    let pi = p as i64;
    let pr = int(pi);
    let rr = int(r as i64);
    let m = int(pi - 2 * r as i64);
    let p2 = &pr * &pr;
    let a = (int(1) + &pr) / &p2;
    let b = (int(1) + &pr / int(2)) / &p2;
    let c = corollary_gamma_corrected(p, FermatComponent::Pendant(0, 0));
    let w_main = &rr * (&b - int(2) * &a);
    let w_alpha = &a * &m + &b * (&rr - &pr) + &c * &pr;
    let w_pend = &b - int(2) * &c;
    let w_squared = &m * &a * &w_main + &rr * &b * &w_alpha + &rr * &pr * &c * &w_pend;
    let k_dot_u = int(pi - 3) * ((int(1) - &pr) + (&m - int(1)) * (int(1) + &pr) + &rr * (int(1) + &pr / int(2))) / &p2;
    let g = int((pi - 1) * (pi - 2) / 2);
    let beta = (int(1) - &g) / &g * &w_squared + int(2) * &k_dot_u;
    FermatClosedForms {
        w_dot_main: w_main,
        w_dot_alpha: w_alpha,
        w_dot_pendant: w_pend,
        w_squared,
        k_dot_u,
        beta,
    }
}

/// Coefficient of `log p` in the published general lower bound.
pub fn theorem_bound_printed(p: u32, r: u32) -> Rat {
    let p = int(p as i64);
    let r = int(r as i64);
    let pw = |k: u32| (0..k).fold(int(1), |acc, _| acc * &p);
    let poly = (int(4) + int(2) * &r) * pw(6) - (int(32) + int(10) * &r) * pw(5)
        + (int(10) + int(19) * &r) * pw(4)
        + (int(124) - &r - int(25) * &r * &r) * pw(3)
        + (int(-56) + int(52) * &r + int(31) * &r * &r) * pw(2)
        + (int(156) - int(328) * &r + int(112) * &r * &r) * &p
        + int(144)
        - int(24) * &r
        + int(60) * &r * &r;
    poly / (int(4) * pw(3) * (&p - int(1)) * (&p - int(2)))
}

/// The published numerical bounds (coefficient of `log p`).
pub fn theorem_value_printed(p: u32) -> Option<Rat> {
    match p {
        5 => Some(rat(188, 125)),
        7 => Some(rat(37277, 6860)),
        _ => None,
    }
}

/// `(2V_D + U_D)²` as printed.
pub fn w_squared_printed(p: u32, r: u32) -> Rat {
    let p = int(p as i64);
    let r = int(r as i64);
    let inv = |k: u32| (0..k).fold(int(1), |acc, _| acc / &p);
    -(&p * &r) / int(2) - &r / int(2) + int(1)
        + inv(1) * (rat(7, 4) * &r - int(5))
        + inv(2) * (rat(25, 4) * &r * &r - int(5) * &r - int(1))
        + inv(3) * (int(17) - int(30) * &r + int(11) * &r * &r)
        + inv(4) * (int(12) - int(2) * &r + int(5) * &r * &r)
}

/// `(K·U_D)` as printed.
pub fn k_dot_u_printed(p: u32, r: u32) -> Rat {
    let s = int(p as i64 - 3 - 2 * r as i64);
    let p = int(p as i64);
    let r = int(r as i64);
    let p2 = &p * &p;
    (&p - int(3)) * ((int(1) - &p) / &p2 + (s + int(2)) * (int(1) + &p) / &p2 + r * (int(1) + &p / int(2)) / &p2)
}

/// `a_i + 2(S_x·L_i) - (U_D·L_i)` as printed, per family.
pub fn semipositivity_printed(p: u32, r: u32, c: FermatComponent) -> Rat {
    let pi = p as i64;
    let p = int(pi);
    let r = int(r as i64);
    let common = &r / (&p * &p) + int(3) * &r / (int(2) * &p);
    match c {
        FermatComponent::X => int(pi - 3) + int(2) - (int(2) - int(2) / &p - &common),
        FermatComponent::Y | FermatComponent::Z | FermatComponent::Beta(_) => int(pi - 3) + int(2) / &p + &common,
        FermatComponent::Alpha(_) => int(pi - 3) - &p / int(2) + int(1) + int(5) / &p + &common,
        FermatComponent::Pendant(..) => int(1) + int(1) / (int(2) * &p) - int(7) / (&p * &p),
    }
}

/// Valid `r` for a prime `p > 3`: `0 ..= (p - 3)/2`.
pub fn valid_r(p: u32) -> std::ops::RangeInclusive<u32> {
    0..=(p.saturating_sub(3) / 2)
}
