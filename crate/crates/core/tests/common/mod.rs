//! Fiber and divisor generators shared by the integration tests.
#![allow(dead_code)]

use arakelov_core::catalog::emit;
use arakelov_core::rational::{int, rat};
use arakelov_core::{Component, HorizontalIncidence, Rat, SpecialFiber};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

fn strings(params: &[&str]) -> Vec<String> {
    params.iter().map(|s| s.to_string()).collect()
}

/// Catalog fibers used across the suites, with their default divisors.
pub fn catalog_fibers() -> Vec<(SpecialFiber, Vec<HorizontalIncidence>)> {
    let mut calls: Vec<(&str, Vec<String>)> = Vec::new();
    for s in 1..=3 {
        for p1 in 0..=2 {
            for p2 in 0..=2 {
                calls.push(("banana", vec![s.to_string(), p1.to_string(), p2.to_string()]));
            }
        }
    }
    for (t, n) in [("I", 0), ("II", 1), ("III", 1), ("IV", 2), ("V", 2), ("VI", 3), ("VII", 3)] {
        let grid: Vec<Vec<u32>> = match n {
            0 => vec![vec![]],
            1 => (1..=3).map(|a| vec![a]).collect(),
            2 => vec![vec![1, 1], vec![2, 1], vec![1, 3]],
            _ => vec![vec![1, 1, 1], vec![2, 1, 3], vec![1, 2, 2]],
        };
        for values in grid {
            let mut params = vec![t.to_string()];
            params.extend(values.iter().map(u32::to_string));
            calls.push(("genus2", params));
        }
    }
    for (n, p) in [("35", "5"), ("35", "7"), ("55", "5"), ("55", "11")] {
        calls.push(("x1n", strings(&[n, p])));
    }
    for (p, r) in [("5", "0"), ("7", "1"), ("7", "2"), ("11", "0"), ("13", "0")] {
        calls.push(("fermat", strings(&[p, r])));
    }
    calls
        .into_iter()
        .filter_map(|(name, params)| emit(name, &params).ok())
        .collect()
}

pub fn random_rat(rng: &mut TestRng) -> Rat {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=5))
}

/// A connected reduced fiber: random spanning tree plus extra edges, random
/// intersection numbers and component genera, genus forced to be at least 2.
pub fn random_reduced_fiber(rng: &mut TestRng, max_components: usize) -> SpecialFiber {
    let r = rng.gen_range(2..=max_components.max(2));
    let mut edges: Vec<((usize, usize), i64)> = Vec::new();
    let mut order: Vec<usize> = (0..r).collect();
    order.shuffle(rng);
    for k in 1..r {
        let parent = order[rng.gen_range(0..k)];
        edges.push(((parent, order[k]), rng.gen_range(1..=3)));
    }
    for _ in 0..rng.gen_range(0..=r) {
        let i = rng.gen_range(0..r);
        let j = rng.gen_range(0..r);
        if i != j && !edges.iter().any(|((a, b), _)| (*a, *b) == (i, j) || (*a, *b) == (j, i)) {
            edges.push(((i, j), rng.gen_range(1..=3)));
        }
    }
    let mut degree = vec![0i64; r];
    for ((i, j), v) in &edges {
        degree[*i] += v;
        degree[*j] += v;
    }
    let mut genera: Vec<i64> = (0..r).map(|_| rng.gen_range(0..=1)).collect();
    // 2g - 2 = Σ (deg_i + 2p_i - 2).
    let mut genus = 1 + (0..r).map(|i| degree[i] + 2 * genera[i] - 2).sum::<i64>() / 2;
    if genus < 2 {
        genera[0] += 2 - genus;
        genus = 2;
    }
    let components = (0..r)
        .map(|i| Component::new(format!("C{i}"), 1, genera[i] as u32, int(-degree[i])))
        .collect();
    SpecialFiber::from_indexed(
        format!("random{}", rng.gen::<u32>()),
        genus,
        components,
        edges.into_iter().map(|(e, v)| (e, int(v))),
    )
    .expect("generated fiber is well formed")
}

/// Random incidences summing to `degree`.
pub fn random_divisor(rng: &mut TestRng, fiber: &SpecialFiber, id: &str, degree: Rat) -> HorizontalIncidence {
    let r = fiber.len();
    let mut v: Vec<Rat> = (0..r).map(|_| random_rat(rng)).collect();
    let partial: Rat = v[..r - 1].iter().sum();
    v[r - 1] = &degree - partial;
    HorizontalIncidence::from_vec(fiber, id, degree, v).expect("length matches")
}

pub fn random_positive_degree(rng: &mut TestRng) -> Rat {
    rat(rng.gen_range(1..=6), rng.gen_range(1..=3))
}
