//! Sparse symmetric elimination shared by the pseudoinverse and the PSD test.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::RatMatrix;
use crate::rational::Rat;

/// Symmetric matrix under Gaussian elimination, stored as a diagonal plus
/// per-row maps of nonzero off-diagonal entries among *active* indices.
pub(crate) struct SparseSym {
    pub diag: Vec<Rat>,
    pub off: Vec<BTreeMap<usize, Rat>>,
    active: Vec<bool>,
}

impl SparseSym {
    /// Caller guarantees `m` is square and symmetric.
    pub fn from_dense(m: &RatMatrix) -> Self {
        let n = m.rows();
        let mut off = vec![BTreeMap::new(); n];
        for (i, row) in off.iter_mut().enumerate() {
            for j in 0..n {
                if i != j && !m.get(i, j).is_zero() {
                    row.insert(j, m.get(i, j).clone());
                }
            }
        }
        Self {
            diag: m.diagonal(),
            off,
            active: vec![true; n],
        }
    }

    /// Drop row and column `k` without eliminating (grounding or a null pivot).
    pub fn remove(&mut self, k: usize) {
        self.active[k] = false;
        let neighbors: Vec<usize> = self.off[k].keys().copied().collect();
        for j in neighbors {
            self.off[j].remove(&k);
        }
        self.off[k].clear();
    }

    /// Active index of least current degree, lowest index on ties.
    pub fn min_degree(&self) -> Option<usize> {
        (0..self.diag.len())
            .filter(|&k| self.active[k])
            .min_by_key(|&k| (self.off[k].len(), k))
    }

    /// Eliminate pivot `k` (`diag[k]` must be nonzero); returns the
    /// multipliers `l_ik = a_ik / a_kk` for the active neighbours `i`.
    pub fn eliminate(&mut self, k: usize) -> Vec<(usize, Rat)> {
        let pivot = self.diag[k].clone();
        debug_assert!(!pivot.is_zero());
        let column: Vec<(usize, Rat)> = std::mem::take(&mut self.off[k]).into_iter().collect();
        self.active[k] = false;
        for (i, _) in &column {
            self.off[*i].remove(&k);
        }
        let multipliers: Vec<(usize, Rat)> = column.iter().map(|(i, a)| (*i, a / &pivot)).collect();
        for (x, (i, l_i)) in multipliers.iter().enumerate() {
            // Schur complement update a_ij -= a_ik a_kj / a_kk, using symmetry.
            let a_ik = &column[x].1;
            self.diag[*i] -= l_i * a_ik;
            for (j, a_jk) in column.iter().skip(x + 1) {
                let delta = l_i * a_jk;
                let entry = self.off[*i].entry(*j).or_insert_with(Rat::zero);
                *entry -= &delta;
                if entry.is_zero() {
                    self.off[*i].remove(j);
                    self.off[*j].remove(i);
                } else {
                    let v = entry.clone();
                    self.off[*j].insert(*i, v);
                }
            }
        }
        multipliers
    }
}
