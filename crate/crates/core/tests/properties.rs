mod common;

use arakelov_core::divisor::pair_vertical;
use arakelov_core::document::FiberDocument;
use arakelov_core::fiber::validate;
use arakelov_core::invariants::{beta_closed, beta_direct};
use arakelov_core::rational::{fmt_rat, int};
use arakelov_core::{Error, FiberAnalysis, HorizontalIncidence, Rat, SpecialFiber, VerticalDivisor};
use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::Rng;
use serde_json::Value;

fn analysis_for(seed: u64) -> (FiberAnalysis, TestRng) {
    let mut rng = rng(seed);
    let fiber = if rng.gen_bool(0.7) {
        random_reduced_fiber(&mut rng, 7)
    } else {
        let cat = catalog_fibers();
        cat[rng.gen_range(0..cat.len())].0.clone()
    };
    (FiberAnalysis::new(fiber).unwrap(), rng)
}

fn random_document(rng: &mut TestRng) -> FiberDocument {
    let mut fiber = if rng.gen_bool(0.8) {
        random_reduced_fiber(rng, 8)
    } else {
        let cat = catalog_fibers();
        cat[rng.gen_range(0..cat.len())].0.clone()
    };
    fiber.rename(format!("doc-{}", rng.gen::<u16>()));
    let horizontals = (0..rng.gen_range(0..=3))
        .map(|k| {
            let d = random_rat(rng);
            random_divisor(rng, &fiber, &format!("H{k}"), d)
        })
        .collect();
    FiberDocument::new(fiber, horizontals)
}

/// The same document written differently: intersections reversed and
/// flipped, integers as numbers, fractions unreduced.
fn scramble(json: &str) -> String {
    fn loosen(v: &mut Value, k: i64) {
        if let Value::String(s) = v {
            if let Ok(n) = s.parse::<i64>() {
                *v = Value::from(n);
            } else if let Some((n, d)) = s.split_once('/') {
                let (n, d): (i64, i64) = (n.parse().unwrap(), d.parse().unwrap());
                *v = Value::from(format!("{}/{}", n * k, d * k));
            }
        }
    }
    let mut doc: Value = serde_json::from_str(json).unwrap();
    if let Some(list) = doc.get_mut("intersections").and_then(Value::as_array_mut) {
        list.reverse();
        for e in list.iter_mut() {
            let a = e["a"].clone();
            e["a"] = e["b"].clone();
            e["b"] = a;
            loosen(&mut e["value"], 3);
        }
    }
    if let Some(list) = doc.get_mut("components").and_then(Value::as_array_mut) {
        for c in list.iter_mut() {
            loosen(&mut c["self_intersection"], 2);
        }
    }
    if let Some(list) = doc.get_mut("horizontal").and_then(Value::as_array_mut) {
        for h in list.iter_mut() {
            loosen(&mut h["degree"], 5);
            if let Some(map) = h["incidence"].as_object_mut() {
                for (_, v) in map.iter_mut() {
                    loosen(v, 7);
                }
            }
        }
    }
    serde_json::to_string(&doc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn documents_round_trip_canonically(seed in any::<u64>()) {
        let doc = random_document(&mut rng(seed));
        let canonical = doc.to_json();
        let parsed = FiberDocument::parse(canonical.as_bytes()).unwrap();
        prop_assert_eq!(&parsed, &doc);
        prop_assert_eq!(parsed.to_json(), canonical.clone());
        let loose = FiberDocument::parse(scramble(&canonical).as_bytes()).unwrap();
        prop_assert_eq!(loose.to_json(), canonical);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn u_is_linear_in_d(seed in any::<u64>()) {
        let (an, mut rng) = analysis_for(seed);
        let f = an.fiber().clone();
        let (d1, d2) = (random_positive_degree(&mut rng), random_positive_degree(&mut rng));
        let e1 = random_divisor(&mut rng, &f, "D1", d1);
        let e2 = random_divisor(&mut rng, &f, "D2", d2);
        let sum = e1.plus_scaled(&Rat::one(), &e2).unwrap();
        let u1 = an.gamma_u(&e1).unwrap().u_divisor;
        let u2 = an.gamma_u(&e2).unwrap().u_divisor;
        let u = an.gamma_u(&sum).unwrap().u_divisor;
        prop_assert_eq!(u, u1.plus_scaled(&Rat::one(), &u2).unwrap());
    }

    #[test]
    fn gamma_is_shift_independent(seed in any::<u64>()) {
        let (an, mut rng) = analysis_for(seed);
        let f = an.fiber().clone();
        let full = VerticalDivisor::full_fiber(&f);
        let d = random_positive_degree(&mut rng);
        let e = random_divisor(&mut rng, &f, "D", d.clone());
        let expected = an.gamma_u(&e).unwrap().gamma;
        let v_d = an.solve_vertical(&e).unwrap().plus_scaled(&random_rat(&mut rng), &full).unwrap();
        prop_assert_eq!(&an.gamma_from(&d, &v_d).gamma, &expected);
        // Recompute from scratch with every V_l shifted independently.
        for (i, want) in expected.iter().enumerate() {
            let v_i = an.unit_divisor(i).unwrap().plus_scaled(&random_rat(&mut rng), &full).unwrap();
            let g = int(2) * pair_vertical(&f, &v_d, &v_i).unwrap() - &d * pair_vertical(&f, &v_i, &v_i).unwrap();
            prop_assert_eq!(&g, want);
        }
    }

    #[test]
    fn pairing_ignores_fiber_multiples(seed in any::<u64>()) {
        let (an, mut rng) = analysis_for(seed);
        let f = an.fiber().clone();
        let v = VerticalDivisor::from_coeffs(&f, (0..f.len()).map(|_| random_rat(&mut rng)).collect()).unwrap();
        let w = VerticalDivisor::from_coeffs(&f, (0..f.len()).map(|_| random_rat(&mut rng)).collect()).unwrap();
        let shifted = v.plus_scaled(&random_rat(&mut rng), &VerticalDivisor::full_fiber(&f)).unwrap();
        prop_assert_eq!(pair_vertical(&f, &v, &w).unwrap(), pair_vertical(&f, &shifted, &w).unwrap());
        prop_assert_eq!(pair_vertical(&f, &v, &w).unwrap(), pair_vertical(&f, &w, &v).unwrap());
    }

    #[test]
    fn neron_pairing_is_symmetric_and_bilinear(seed in any::<u64>()) {
        let (an, mut rng) = analysis_for(seed);
        let f = an.fiber().clone();
        let e1 = random_divisor(&mut rng, &f, "E1", Rat::zero());
        let e2 = random_divisor(&mut rng, &f, "E2", Rat::zero());
        let e3 = random_divisor(&mut rng, &f, "E3", Rat::zero());
        let (h12, h32, q) = (random_rat(&mut rng), random_rat(&mut rng), random_rat(&mut rng));
        let p12 = an.neron_pairing(&e1, &e2, &h12).unwrap();
        prop_assert_eq!(&p12, &an.neron_pairing(&e2, &e1, &h12).unwrap());
        let p32 = an.neron_pairing(&e3, &e2, &h32).unwrap();
        let combined = e1.plus_scaled(&q, &e3).unwrap();
        let lhs = an.neron_pairing(&combined, &e2, &(&h12 + &q * &h32)).unwrap();
        prop_assert_eq!(lhs, p12 + q * p32);
        let zero = HorizontalIncidence::zero(&f);
        prop_assert!(an.neron_pairing(&e1, &zero, &Rat::zero()).unwrap().is_zero());
    }

    #[test]
    fn phi_is_linear(seed in any::<u64>()) {
        let (an, mut rng) = analysis_for(seed);
        let f = an.fiber().clone();
        let z = random_divisor(&mut rng, &f, "Z", Rat::zero());
        let q = random_rat(&mut rng);
        prop_assert_eq!(an.phi(&z.scaled(&q)).unwrap(), an.phi(&z).unwrap().scaled(&q));
    }
}

/// `v_i/b_i + (V_D·Γ_i)` computed directly from the intersection data.
fn defining_lhs(f: &SpecialFiber, d: &HorizontalIncidence, v: &VerticalDivisor, i: usize) -> Rat {
    let b = int(f.component(i).multiplicity as i64);
    let mut t = &v.coeffs[i] * &f.component(i).self_intersection;
    for (j, x) in f.neighbors(i) {
        t += &v.coeffs[*j] * x;
    }
    &d.incidence[i] / b + t
}

#[test]
fn defining_property_on_catalog() {
    let mut rng = rng(11);
    for (f, _) in catalog_fibers() {
        let an = FiberAnalysis::new(f.clone()).unwrap();
        let c = f.canonical_degrees();
        let two_g = int(2 * f.genus() - 2);
        for _ in 0..100 {
            let d = random_divisor(&mut rng, &f, "D", Rat::one());
            let v = an.solve_vertical(&d).unwrap();
            for (i, a) in c.iter().enumerate() {
                assert_eq!(defining_lhs(&f, &d, &v, i), a / &two_g, "{} at {i}", f.name());
            }
        }
    }
}

#[test]
fn degree_mismatch_is_rejected() {
    let (f, _) = catalog_fibers().remove(0);
    let an = FiberAnalysis::new(f.clone()).unwrap();
    let mut d = HorizontalIncidence::unit(&f, 0);
    d.degree = int(2);
    assert!(matches!(an.solve_vertical(&d), Err(Error::DegreeMismatch { .. })));
}

/// `d(E·U_D) = e V_D² - Σ_j Φ(dP_j - D)²` with `P_j` on multiplicity-one
/// components.
#[test]
fn udhor_identity() {
    let mut rng = rng(5);
    for (f, _) in catalog_fibers() {
        let an = FiberAnalysis::new(f.clone()).unwrap();
        let simple: Vec<usize> = (0..f.len()).filter(|&i| f.component(i).multiplicity == 1).collect();
        for _ in 0..100 {
            let d = random_positive_degree(&mut rng);
            let big_d = random_divisor(&mut rng, &f, "D", d.clone());
            let v_d = an.solve_vertical(&big_d).unwrap();
            let v_sq = an.pair_vertical(&v_d, &v_d).unwrap();
            let u = an.gamma_u(&big_d).unwrap().u_divisor;
            let e = rng.gen_range(1..=4usize);
            let mut big_e = HorizontalIncidence::zero(&f);
            let mut rhs = int(e as i64) * &v_sq;
            for _ in 0..e {
                let p = HorizontalIncidence::unit(&f, simple[rng.gen_range(0..simple.len())]);
                big_e = big_e.plus_scaled(&Rat::one(), &p).unwrap();
                let z = p.scaled(&d).plus_scaled(&-Rat::one(), &big_d).unwrap();
                let phi = an.phi(&z).unwrap();
                rhs -= an.pair_vertical(&phi, &phi).unwrap();
            }
            let lhs = &d * an.horizontal_dot_vertical(&big_e, &u).unwrap();
            assert_eq!(fmt_rat(&lhs), fmt_rat(&rhs), "{}", f.name());
        }
    }
}

#[test]
fn beta_independent_of_divisor_on_reduced_fibers() {
    let mut rng = rng(23);
    for (f, _) in catalog_fibers().into_iter().filter(|(f, _)| f.is_reduced()) {
        let an = FiberAnalysis::new(f.clone()).unwrap();
        let closed = beta_closed(&an).unwrap().beta;
        if validate(&f).minimal {
            assert!(closed >= Rat::zero(), "{}", f.name());
        }
        for _ in 0..10 {
            let d = random_divisor(&mut rng, &f, "D", Rat::one());
            assert_eq!(beta_direct(&an, &d).unwrap().beta, closed, "{}", f.name());
        }
    }
}

#[test]
fn random_minimal_reduced_fibers_have_nonnegative_beta() {
    let mut rng = rng(99);
    for _ in 0..200 {
        let f = random_reduced_fiber(&mut rng, 8);
        let minimal = validate(&f).minimal;
        let an = FiberAnalysis::new(f).unwrap();
        let b = beta_closed(&an).unwrap().beta;
        assert!(!minimal || b >= Rat::zero());
        let d = random_divisor(&mut rng, an.fiber(), "D", Rat::one());
        assert_eq!(beta_direct(&an, &d).unwrap().beta, b);
    }
}
