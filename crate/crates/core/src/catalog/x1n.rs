use num_integer::Integer;

use super::banana;
use crate::error::{Error, Result};
use crate::fiber::SpecialFiber;
use crate::global::{GlobalModel, Place};
use crate::rational::{is_integer, Rat};

/// Bad-reduction data of `X₁(N)` at one prime `p | N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X1nPrime {
    pub p: u64,
    /// Number of intersection points of the two components.
    pub s: u64,
    /// Genus of each of the two components.
    pub q: u64,
    /// Residue degree of every prime above `p` in `Q(ζ_{N/p})`.
    pub residue_degree: u32,
    pub place_count: u64,
    /// `φ(N/p)`: sum of the residue degrees.
    pub total_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X1nData {
    pub n: u64,
    pub genus: u64,
    pub primes: Vec<X1nPrime>,
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == vec![(n, 1)]
}

pub(crate) fn euler_phi(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, (p, _)| acc / p * (p - 1))
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// `Π_{q | n} (1 + 1/q)`.
fn psi_factor(n: u64) -> Rat {
    prime_factors(n)
        .iter()
        .map(|(q, _)| Rat::new((q + 1).into(), (*q).into()))
        .product()
}

fn multiplicative_order(a: u64, m: u64) -> u32 {
    if m == 1 {
        return 1;
    }
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = x * a % m;
        k += 1;
    }
    k
}

/// `N` squarefree with a factorization `N = QR`, `Q, R >= 4`.
pub fn check_n(n: u64) -> Result<()> {
    if n < 16 {
        return Err(Error::InvalidN {
            n,
            reason: "no factorization N = QR with Q, R >= 4".into(),
        });
    }
    if prime_factors(n).iter().any(|(_, e)| *e > 1) {
        return Err(Error::InvalidN {
            n,
            reason: "not squarefree".into(),
        });
    }
    if !divisors(n).iter().any(|&q| q >= 4 && n / q >= 4) {
        return Err(Error::InvalidN {
            n,
            reason: "no factorization N = QR with Q, R >= 4".into(),
        });
    }
    Ok(())
}

/// `g_N = 1 + φ(N) N Π(1+1/p)/24 - (1/4) Σ_{d|N} φ(d)φ(N/d)`.
pub fn x1n_genus(n: u64) -> Result<u64> {
    let phi = Rat::from_integer(euler_phi(n).into());
    let main = phi * Rat::from_integer(n.into()) * psi_factor(n) / Rat::from_integer(24.into());
    let cusps: u64 = divisors(n).iter().map(|&d| euler_phi(d) * euler_phi(n / d)).sum();
    let g = Rat::from_integer(1.into()) + main - Rat::new(cusps.into(), 4.into());
    to_u64(&g, &format!("g_{n}"))
}

fn to_u64(q: &Rat, what: &str) -> Result<u64> {
    if !is_integer(q) || q < &Rat::from_integer(0.into()) {
        return Err(Error::SelfCheckFailed(format!("{what} = {q} is not a nonnegative integer")));
    }
    u64::try_from(q.to_integer()).map_err(|_| Error::SelfCheckFailed(format!("{what} overflows")))
}

/// `s_p` and `q_p` for `p | N`.
pub fn x1n_prime(n: u64, p: u64) -> Result<X1nPrime> {
    check_n(n)?;
    if p < 2 || !n.is_multiple_of(p) || !is_prime(p) {
        return Err(Error::NotADivisor { p, n });
    }
    let g = x1n_genus(n)?;
    let m = n / p;
    let phi_m = euler_phi(m);
    let s = Rat::new((p - 1).into(), 24.into())
        * Rat::from_integer(phi_m.into())
        * Rat::from_integer(m.into())
        * psi_factor(m);
    let s = to_u64(&s, &format!("s_{p}"))?;
    let twice_q = (g + 1)
        .checked_sub(s)
        .ok_or_else(|| Error::SelfCheckFailed(format!("s_{p} = {s} exceeds g + 1")))?;
    if twice_q.is_odd() {
        return Err(Error::SelfCheckFailed(format!("q_{p} = {twice_q}/2 is not an integer")));
    }
    let q = twice_q / 2;
    if 2 * q + s - 1 != g {
        return Err(Error::SelfCheckFailed(format!("2q + s - 1 = {} != g = {g}", 2 * q + s - 1)));
    }
    let f = multiplicative_order(p, m);
    Ok(X1nPrime {
        p,
        s,
        q,
        residue_degree: f,
        place_count: phi_m / f as u64,
        total_weight: phi_m,
    })
}

pub fn x1n_data(n: u64) -> Result<X1nData> {
    check_n(n)?;
    let genus = x1n_genus(n)?;
    let primes = prime_factors(n)
        .into_iter()
        .map(|(p, _)| x1n_prime(n, p))
        .collect::<Result<_>>()?;
    Ok(X1nData { n, genus, primes })
}

fn to_u32(x: u64, what: &str) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::InvalidParams(format!("{what} = {x} is too large")))
}

/// Special fiber at a prime above `p`: two copies of a genus-`q_p` curve
/// meeting transversally in `s_p` points.
pub fn x1n_fiber(n: u64, p: u64) -> Result<SpecialFiber> {
    let d = x1n_prime(n, p)?;
    let q = to_u32(d.q, "q_p")?;
    let mut f = banana(to_u32(d.s, "s_p")?, q, q)?;
    f.rename(format!("X1({n})@{p}"));
    Ok(f)
}

/// All bad places of `X₁(N)` over `Q(ζ_N)`, one per prime above each `p | N`.
pub fn x1n_model(n: u64) -> Result<GlobalModel> {
    let data = x1n_data(n)?;
    let mut places = Vec::new();
    for d in &data.primes {
        let fiber = x1n_fiber(n, d.p)?;
        for k in 0..d.place_count {
            places.push(Place {
                id: format!("p={}#{}", d.p, k + 1),
                residue_prime: d.p,
                residue_degree: d.residue_degree,
                fiber: fiber.clone(),
                divisor: None,
            });
        }
    }
    GlobalModel::new(format!("X1({n})"), places)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n35() {
        let d = x1n_data(35).unwrap();
        assert_eq!(d.genus, 25);
        let p5 = &d.primes[0];
        assert_eq!((p5.p, p5.s, p5.q), (5, 8, 9));
        assert_eq!((p5.residue_degree, p5.place_count, p5.total_weight), (6, 1, 6));
        let p7 = &d.primes[1];
        assert_eq!((p7.p, p7.s, p7.q), (7, 6, 10));
        assert_eq!(p7.total_weight, 4);
        let f = x1n_fiber(35, 7).unwrap();
        assert_eq!(f.genus(), 25);
    }

    #[test]
    fn n55() {
        let d = x1n_data(55).unwrap();
        assert_eq!(d.genus, 81);
        assert_eq!((d.primes[0].s, d.primes[0].q), (20, 31));
        assert_eq!((d.primes[1].s, d.primes[1].q), (10, 36));
    }

    #[test]
    fn hypotheses() {
        assert!(matches!(check_n(12), Err(Error::InvalidN { .. })));
        assert!(matches!(check_n(45), Err(Error::InvalidN { .. })));
        assert!(matches!(check_n(30), Ok(())));
        assert!(matches!(x1n_fiber(35, 3), Err(Error::NotADivisor { .. })));
    }

    #[test]
    fn arithmetic_helpers() {
        assert_eq!(euler_phi(35), 24);
        assert_eq!(multiplicative_order(5, 7), 6);
        assert_eq!(multiplicative_order(7, 5), 4);
        assert!(is_prime(31) && !is_prime(1) && !is_prime(33));
    }
}
