mod common;

use arakelov_core::linalg::{build_laplacian, pseudoinverse, pseudoinverse_bordered};
use arakelov_core::rational::to_f64;
use arakelov_core::RatMatrix;
use common::*;
use nalgebra::DMatrix;

const TOL: f64 = 1e-9;

/// Moore-Penrose inverse of a symmetric matrix from its eigendecomposition.
fn spectral_pinv(m: &RatMatrix) -> DMatrix<f64> {
    let n = m.rows();
    let a = DMatrix::from_fn(n, n, |i, j| to_f64(m.get(i, j)));
    let eig = a.symmetric_eigen();
    let cutoff = 1e-10 * eig.eigenvalues.amax().max(1.0);
    let inv = eig.eigenvalues.map(|l| if l.abs() > cutoff { 1.0 / l } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose()
}

fn max_deviation(exact: &RatMatrix, oracle: &DMatrix<f64>) -> f64 {
    let n = exact.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((to_f64(exact.get(i, j)) - oracle[(i, j)]).abs());
        }
    }
    worst
}

#[test]
fn exact_pseudoinverse_matches_spectral_oracle_on_catalog() {
    for (f, _) in catalog_fibers() {
        let m = build_laplacian(&f);
        let p = pseudoinverse(&m).unwrap();
        let dev = max_deviation(&p.mplus, &spectral_pinv(&m));
        assert!(dev < TOL, "{}: deviation {dev:e}", f.name());
    }
}

#[test]
fn exact_pseudoinverse_matches_spectral_oracle_on_random_fibers() {
    let mut rng = rng(3);
    for _ in 0..100 {
        let f = random_reduced_fiber(&mut rng, 12);
        let m = build_laplacian(&f);
        let p = pseudoinverse(&m).unwrap();
        let dev = max_deviation(&p.mplus, &spectral_pinv(&m));
        assert!(dev < TOL, "{}: deviation {dev:e}", f.name());
    }
}

#[test]
fn grounded_and_bordered_routes_agree_exactly() {
    let mut rng = rng(4);
    let mut fibers: Vec<_> = catalog_fibers().into_iter().map(|(f, _)| f).filter(|f| f.len() <= 40).collect();
    fibers.extend((0..40).map(|_| random_reduced_fiber(&mut rng, 10)));
    for f in fibers {
        let m = build_laplacian(&f);
        let a = pseudoinverse(&m).unwrap();
        let b = pseudoinverse_bordered(&m).unwrap();
        assert_eq!(a.mplus, b.mplus, "{}", f.name());
        assert_eq!(a.trace, b.trace, "{}", f.name());
    }
}
