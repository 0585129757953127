use num_traits::{Signed, Zero};

use super::sparse::SparseSym;
use super::RatMatrix;
use crate::rational::Rat;

/// Why a matrix failed the PSD test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsdWitness {
    NotSymmetric,
    /// A negative pivot of the congruence `LDLᵀ`.
    NegativePivot { index: usize, value: Rat },
    /// A zero pivot whose row is still coupled to another index; the
    /// 2×2 minor on `{i, j}` is negative.
    ZeroPivotCoupling { i: usize, j: usize, minor: Rat },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsdCertificate {
    pub is_psd: bool,
    /// Pivots in elimination order, as `(index, pivot)`.
    pub pivots: Vec<(usize, Rat)>,
    pub witness: Option<PsdWitness>,
}

/// Exact PSD test by symmetric elimination (min-degree order).
///
/// Zero pivots with an empty remaining row are kernel directions and are
/// skipped. A zero pivot with a nonzero coupling means the matrix is
/// indefinite.
pub fn psd_certificate(m: &RatMatrix) -> PsdCertificate {
    if !m.is_square() || !m.is_symmetric() {
        return PsdCertificate {
            is_psd: false,
            pivots: Vec::new(),
            witness: Some(PsdWitness::NotSymmetric),
        };
    }
    let mut sym = SparseSym::from_dense(m);
    let mut pivots = Vec::new();
    while let Some(k) = sym.min_degree() {
        let d = sym.diag[k].clone();
        if d.is_negative() {
            return PsdCertificate {
                is_psd: false,
                pivots,
                witness: Some(PsdWitness::NegativePivot { index: k, value: d }),
            };
        }
        if d.is_zero() {
            if let Some((&j, a)) = sym.off[k].iter().next() {
                let minor = &d * &sym.diag[j] - a * a;
                return PsdCertificate {
                    is_psd: false,
                    pivots,
                    witness: Some(PsdWitness::ZeroPivotCoupling { i: k, j, minor }),
                };
            }
            pivots.push((k, d));
            sym.remove(k);
            continue;
        }
        sym.eliminate(k);
        pivots.push((k, d));
    }
    PsdCertificate {
        is_psd: true,
        pivots,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn laplacian_is_psd() {
        let c = psd_certificate(&mat(&[&[1, -1], &[-1, 1]]));
        assert!(c.is_psd);
        assert_eq!(c.pivots.iter().filter(|(_, p)| p.is_zero()).count(), 1);
    }

    #[test]
    fn zero_is_psd() {
        assert!(psd_certificate(&mat(&[&[0]])).is_psd);
    }

    #[test]
    fn negative_scalar_witness() {
        let c = psd_certificate(&mat(&[&[-1]]));
        assert!(!c.is_psd);
        assert_eq!(c.witness, Some(PsdWitness::NegativePivot { index: 0, value: int(-1) }));
    }

    #[test]
    fn indefinite_with_zero_diagonal() {
        let c = psd_certificate(&mat(&[&[0, 1], &[1, 0]]));
        assert!(!c.is_psd);
        assert!(matches!(c.witness, Some(PsdWitness::ZeroPivotCoupling { .. })));
    }

    #[test]
    fn negative_schur_complement_detected() {
        // Positive diagonal, but det < 0.
        let c = psd_certificate(&mat(&[&[1, 2], &[2, 1]]));
        assert!(!c.is_psd);
        assert!(matches!(c.witness, Some(PsdWitness::NegativePivot { .. })));
    }
}
