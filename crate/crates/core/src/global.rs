//! Aggregation of local invariants over the bad places of a global model.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::divisor::FiberAnalysis;
use crate::error::{Error, Result};
use crate::fiber::{FiberKey, HorizontalIncidence, SpecialFiber};
use crate::invariants::{beta_closed, beta_direct};
use crate::rational::{fmt_rat, int, Rat};

/// A non-archimedean place with bad reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Place {
    pub id: String,
    pub residue_prime: u64,
    /// `f_v`, so that `log #k(v) = f_v log p`.
    pub residue_degree: u32,
    pub fiber: SpecialFiber,
    /// Required when the fiber is not reduced.
    pub divisor: Option<HorizontalIncidence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalModel {
    pub name: String,
    pub genus: i64,
    pub places: Vec<Place>,
}

impl GlobalModel {
    /// All fibers must share one genus.
    pub fn new(name: impl Into<String>, places: Vec<Place>) -> Result<Self> {
        let name = name.into();
        let genus = places.first().map(|p| p.fiber.genus()).unwrap_or(0);
        if let Some(bad) = places.iter().find(|p| p.fiber.genus() != genus) {
            return Err(Error::InvalidGenus(format!(
                "place `{}` has genus {}, model `{name}` has genus {genus}",
                bad.id,
                bad.fiber.genus()
            )));
        }
        Ok(Self { name, genus, places })
    }

    /// Union of the place sets of two models of the same curve.
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut places = self.places.clone();
        places.extend(other.places.iter().cloned());
        Self::new(format!("{}+{}", self.name, other.name), places)
    }
}

/// `Σ q_p log p` with exact rational coefficients; zero terms are dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FormalLogSum {
    terms: BTreeMap<u64, Rat>,
}

impl FormalLogSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, p: u64, q: Rat) {
        let entry = self.terms.entry(p).or_insert_with(Rat::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, q) in &other.terms {
            out.add_term(*p, q.clone());
        }
        out
    }

    pub fn scaled(&self, q: &Rat) -> Self {
        let mut out = Self::new();
        for (p, c) in &self.terms {
            out.add_term(*p, c * q);
        }
        out
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rat> {
        &self.terms
    }

    pub fn coefficient(&self, p: u64) -> Rat {
        self.terms.get(&p).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl FromIterator<(u64, Rat)> for FormalLogSum {
    fn from_iter<I: IntoIterator<Item = (u64, Rat)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (p, q) in iter {
            out.add_term(p, q);
        }
        out
    }
}

impl fmt::Display for FormalLogSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, q)| format!("{}*log({p})", fmt_rat(q)))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Local `β` at one place: the closed form on reduced fibers, otherwise the
/// definition with the place's chosen divisor.
pub fn local_beta(place: &Place) -> Result<Rat> {
    if place.fiber.len() == 1 {
        return Ok(Rat::zero());
    }
    let an = FiberAnalysis::new(place.fiber.clone())?;
    match &place.divisor {
        Some(d) => Ok(beta_direct(&an, d)?.beta),
        None if place.fiber.is_reduced() => Ok(beta_closed(&an)?.beta),
        None => Err(Error::MissingDivisor(place.id.clone())),
    }
}

fn aggregate(model: &GlobalModel, weighted: bool) -> Result<FormalLogSum> {
    let mut cache: HashMap<(FiberKey, Option<String>), Rat> = HashMap::new();
    let mut sum = FormalLogSum::new();
    for place in &model.places {
        let key = (place.fiber.key(), place.divisor.as_ref().map(|d| format!("{d:?}")));
        let beta = match cache.get(&key) {
            Some(b) => b.clone(),
            None => {
                let b = local_beta(place)?;
                cache.insert(key, b.clone());
                b
            }
        };
        let weight = if weighted { int(place.residue_degree as i64) } else { int(1) };
        sum.add_term(place.residue_prime, beta * weight);
    }
    Ok(sum)
}

/// `Σ_v f_v β_v log p_v`.
pub fn global_beta(model: &GlobalModel) -> Result<FormalLogSum> {
    aggregate(model, true)
}

/// `Σ_v β_v log p_v`, ignoring residue degrees.
pub fn global_beta_unweighted(model: &GlobalModel) -> Result<FormalLogSum> {
    aggregate(model, false)
}

/// Fixed-point number `value / 10^scale` with an absolute error bound of
/// `err` units in the last place.
struct Approx {
    value: BigInt,
    err: BigInt,
}

/// `atanh(a/b)` for `0 <= a/b <= 1/3`, scaled by `unit`.
fn atanh_fixed(a: &BigInt, b: &BigInt, unit: &BigInt) -> Approx {
    let a2 = a * a;
    let b2 = b * b;
    let mut power = unit * a / b;
    let mut sum = power.clone();
    let mut steps = BigInt::one();
    let mut k = 1u64;
    loop {
        power = power * &a2 / &b2;
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * k + 1);
        steps += 2;
        k += 1;
    }
    // Each truncated division loses < 1 unit; the tail is below one unit.
    Approx {
        value: sum,
        err: steps + 1,
    }
}

fn ln2_fixed(unit: &BigInt) -> Approx {
    let t = atanh_fixed(&BigInt::one(), &BigInt::from(3), unit);
    Approx {
        value: t.value * 2,
        err: t.err * 2,
    }
}

/// `ln p = k ln 2 + 2 atanh((p - 2^k)/(p + 2^k))` with `2^k <= p < 2^(k+1)`.
fn ln_fixed(p: u64, unit: &BigInt, ln2: &Approx) -> Approx {
    let k = 63 - p.leading_zeros() as u64;
    let two_k = 1u64 << k;
    let mut value = &ln2.value * k;
    let mut err = &ln2.err * k;
    if p != two_k {
        let t = atanh_fixed(&BigInt::from(p - two_k), &BigInt::from(p + two_k), unit);
        value += t.value * 2;
        err += t.err * 2;
    }
    Approx { value, err }
}

/// Round `x / 10^shift` to the nearest integer, halves away from zero.
fn round_shift(x: &BigInt, shift: &BigInt) -> BigInt {
    let half = shift / 2;
    if x.is_negative() {
        let pos: BigInt = -x + &half;
        -Integer::div_floor(&pos, shift)
    } else {
        let pos: BigInt = x + &half;
        Integer::div_floor(&pos, shift)
    }
}

/// `Σ q_p log p` rendered with `digits` digits after the decimal point,
/// correctly rounded. The empty sum renders as `"0"`.
pub fn evaluate(sum: &FormalLogSum, digits: u32) -> String {
    if sum.is_empty() {
        return "0".into();
    }
    let mut guard = 12u32;
    loop {
        let scale = digits + guard;
        let unit = BigInt::from(10).pow(scale);
        let ln2 = ln2_fixed(&unit);
        let mut total = BigInt::zero();
        let mut err = BigInt::zero();
        for (p, q) in sum.terms() {
            let l = ln_fixed(*p, &unit, &ln2);
            let num = q.numer();
            let den = q.denom();
            total += (num * &l.value).div_floor(den);
            err += Integer::div_ceil(&(num.abs() * &l.err), den) + 1;
        }
        let shift = BigInt::from(10).pow(guard);
        let lo = round_shift(&(&total - &err), &shift);
        let hi = round_shift(&(&total + &err), &shift);
        if lo == hi {
            return render_fixed(&lo, digits);
        }
        guard += 12;
    }
}

fn render_fixed(x: &BigInt, digits: u32) -> String {
    let negative = x.sign() == Sign::Minus;
    let mut s = x.abs().to_string();
    if digits == 0 {
        return if negative { format!("-{s}") } else { s };
    }
    let d = digits as usize;
    if s.len() <= d {
        s = format!("{}{s}", "0".repeat(d + 1 - s.len()));
    }
    let (int_part, frac) = s.split_at(s.len() - d);
    format!("{}{int_part}.{frac}", if negative { "-" } else { "" })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{banana, x1n_model};
    use crate::rational::rat;

    #[test]
    fn evaluate_examples() {
        let s: FormalLogSum = [(5, int(1))].into_iter().collect();
        assert_eq!(evaluate(&s, 6), "1.609438");
        assert_eq!(evaluate(&FormalLogSum::new(), 6), "0");
        let s: FormalLogSum = [(5, rat(188, 125))].into_iter().collect();
        assert_eq!(evaluate(&s, 4), "2.4206");
        let s: FormalLogSum = [(2, int(1))].into_iter().collect();
        assert_eq!(evaluate(&s, 30), "0.693147180559945309417232121458");
        let s: FormalLogSum = [(2, int(-1)), (3, rat(1, 1000))].into_iter().collect();
        assert_eq!(evaluate(&s, 3), "-0.692");
        let s: FormalLogSum = [(7, int(1))].into_iter().collect();
        assert_eq!(evaluate(&s, 20), "1.94591014905531330511");
    }

    #[test]
    fn formal_sum_drops_zero_terms() {
        let mut s = FormalLogSum::new();
        s.add_term(3, int(2));
        s.add_term(3, int(-2));
        assert!(s.is_empty());
        assert_eq!(s.to_string(), "0");
    }

    #[test]
    fn single_place_model() {
        let place = Place {
            id: "v".into(),
            residue_prime: 3,
            residue_degree: 1,
            fiber: banana(1, 1, 1).unwrap(),
            divisor: None,
        };
        let m = GlobalModel::new("m", vec![place]).unwrap();
        let b = global_beta(&m).unwrap();
        assert_eq!(b.terms().len(), 1);
        assert_eq!(b.coefficient(3), int(1));
    }

    #[test]
    fn x1n_35() {
        let m = x1n_model(35).unwrap();
        let b = global_beta(&m).unwrap();
        assert_eq!(b.coefficient(5), int(18));
        assert_eq!(b.coefficient(7), int(16));
        let u = global_beta_unweighted(&m).unwrap();
        assert_eq!(u.coefficient(5), int(3));
        assert_eq!(u.coefficient(7), int(4));
    }

    #[test]
    fn genus_must_agree() {
        let mk = |f: SpecialFiber| Place {
            id: f.name().to_string(),
            residue_prime: 2,
            residue_degree: 1,
            fiber: f,
            divisor: None,
        };
        let r = GlobalModel::new("m", vec![mk(banana(1, 1, 1).unwrap()), mk(banana(1, 2, 1).unwrap())]);
        assert!(matches!(r, Err(Error::InvalidGenus(_))));
    }
}
