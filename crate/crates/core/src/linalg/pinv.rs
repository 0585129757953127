use num_traits::{One, Signed, Zero};

use super::bareiss::{bareiss_inverse, rank};
use super::sparse::SparseSym;
use super::RatMatrix;
use crate::error::{Error, Result};
use crate::fiber::SpecialFiber;
use crate::rational::{fmt_rat, int, Rat};

/// `m_ij = -(b_i Γ_i · b_j Γ_j)`.
///
/// For a fiber satisfying the fiber relation this is a weighted graph
/// Laplacian: symmetric, zero row sums, `m_ii = -b_i² Γ_i² >= 0`.
pub fn build_laplacian(fiber: &SpecialFiber) -> RatMatrix {
    let r = fiber.len();
    let b: Vec<Rat> = fiber.components().iter().map(|c| int(c.multiplicity as i64)).collect();
    let mut m = RatMatrix::zeros(r, r);
    for i in 0..r {
        m[(i, i)] = -(&b[i] * &b[i] * &fiber.component(i).self_intersection);
    }
    for (i, j, v) in fiber.edges() {
        let mij = -(&b[i] * &b[j] * v);
        m[(i, j)] = mij.clone();
        m[(j, i)] = mij;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinvMethod {
    /// `M⁺ = P G P` with `G` the inverse of the Laplacian grounded at one
    /// vertex (padded with zeros) and `P = I - J/r`.
    Grounded,
    /// `M⁺ = (M + J/r)⁻¹ - J/r`, inverted by fraction-free elimination.
    Bordered,
}

/// `M⁺` together with its rank and kernel certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoinverseResult {
    /// Entries `n_ij`.
    pub mplus: RatMatrix,
    pub trace: Rat,
    pub rank: usize,
    /// Basis of `ker M`: the all-ones vector.
    pub kernel_certificate: Vec<Vec<Rat>>,
    pub method: PinvMethod,
}

impl PseudoinverseResult {
    pub fn dim(&self) -> usize {
        self.mplus.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rat {
        self.mplus.get(i, j)
    }
}

/// Precondition shared by both routes: square, symmetric, zero row sums.
fn check_shape(m: &RatMatrix) -> Result<()> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::NotLaplacian(format!("{}x{} is not a nonempty square matrix", m.rows(), m.cols())));
    }
    if !m.is_symmetric() {
        return Err(Error::NotLaplacian("matrix is not symmetric".into()));
    }
    if let Some((i, s)) = m.row_sums().iter().enumerate().find(|(_, s)| !s.is_zero()) {
        return Err(Error::NotLaplacian(format!("row {i} sums to {}", fmt_rat(s))));
    }
    Ok(())
}

/// Moore–Penrose pseudoinverse of a symmetric matrix with zero row sums
/// whose kernel is spanned by the all-ones vector.
///
/// Weighted Laplacians (nonpositive off-diagonal entries) go through the
/// sparse grounded route; anything else falls back to
/// [`pseudoinverse_bordered`]. The result is verified against the Penrose
/// conditions before it is returned.
pub fn pseudoinverse(m: &RatMatrix) -> Result<PseudoinverseResult> {
    check_shape(m)?;
    let n = m.rows();
    let laplacian = (0..n).all(|i| (0..n).all(|j| i == j || !m.get(i, j).is_positive()));
    let result = if laplacian {
        grounded(m)?
    } else {
        return pseudoinverse_bordered(m);
    };
    verify_identities(m, &result.mplus)?;
    Ok(result)
}

fn singular(m: &RatMatrix, rank_found: usize) -> Error {
    Error::SingularBeyondKernel {
        rank: rank_found,
        expected: m.rows() - 1,
    }
}

fn grounded(m: &RatMatrix) -> Result<PseudoinverseResult> {
    let n = m.rows();
    let mut sym = SparseSym::from_dense(m);
    let ground = (0..n).max_by_key(|&k| (sym.off[k].len(), std::cmp::Reverse(k))).unwrap_or(0);
    sym.remove(ground);

    // LDLᵀ of the grounded matrix in min-degree order.
    let mut order = Vec::with_capacity(n.saturating_sub(1));
    let mut pivots = Vec::with_capacity(n.saturating_sub(1));
    let mut columns: Vec<Vec<(usize, Rat)>> = Vec::with_capacity(n.saturating_sub(1));
    let mut null_pivots = 0;
    while let Some(k) = sym.min_degree() {
        if sym.diag[k].is_zero() {
            // PSD: a null pivot has an empty row; another piece of the graph.
            null_pivots += 1;
            sym.remove(k);
            continue;
        }
        pivots.push(sym.diag[k].clone());
        columns.push(sym.eliminate(k));
        order.push(k);
    }
    if null_pivots > 0 {
        return Err(singular(m, n - 1 - null_pivots));
    }

    let mut step = vec![usize::MAX; n];
    for (s, &k) in order.iter().enumerate() {
        step[k] = s;
    }
    let columns: Vec<Vec<(usize, Rat)>> = columns
        .into_iter()
        .map(|col| col.into_iter().map(|(i, l)| (step[i], l)).collect())
        .collect();

    let steps = order.len();
    let mut g = RatMatrix::zeros(n, n);
    for (s_col, &k_col) in order.iter().enumerate() {
        let mut y = vec![Rat::zero(); steps];
        y[s_col] = Rat::one();
        for s in s_col..steps {
            if y[s].is_zero() {
                continue;
            }
            let ys = y[s].clone();
            for (t, l) in &columns[s] {
                y[*t] -= l * &ys;
            }
        }
        for (s, ys) in y.iter_mut().enumerate() {
            if !ys.is_zero() {
                *ys /= &pivots[s];
            }
        }
        for s in (0..steps).rev() {
            let mut acc = std::mem::take(&mut y[s]);
            for (t, l) in &columns[s] {
                if !y[*t].is_zero() {
                    acc -= l * &y[*t];
                }
            }
            y[s] = acc;
        }
        for (s, k) in order.iter().enumerate() {
            g[(*k, k_col)] = std::mem::take(&mut y[s]);
        }
    }

    let mplus = project_out_constants(&g);
    Ok(finish(mplus, n, PinvMethod::Grounded))
}

/// `P A P` with `P = I - J/n`, for symmetric `A`.
fn project_out_constants(a: &RatMatrix) -> RatMatrix {
    let n = a.rows();
    let inv_n = Rat::new(1.into(), (n as i64).into());
    let means: Vec<Rat> = a.row_sums().into_iter().map(|s| s * &inv_n).collect();
    let grand: Rat = means.iter().sum::<Rat>() * &inv_n;
    let mut out = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = a.get(i, j) - &means[i] - &means[j] + &grand;
        }
    }
    out
}

fn finish(mplus: RatMatrix, n: usize, method: PinvMethod) -> PseudoinverseResult {
    PseudoinverseResult {
        trace: mplus.trace(),
        mplus,
        rank: n - 1,
        kernel_certificate: vec![vec![Rat::one(); n]],
        method,
    }
}

/// `M⁺ = (M + J/r)⁻¹ - J/r` via fraction-free inversion.
///
/// Valid whenever `M` is symmetric with zero row sums and rank `r - 1`:
/// `M + J/r` acts as `M` on the complement of the constants and as the
/// identity on the constants.
pub fn pseudoinverse_bordered(m: &RatMatrix) -> Result<PseudoinverseResult> {
    check_shape(m)?;
    let n = m.rows();
    let j_over_n = RatMatrix::constant(n, n, Rat::new(1.into(), (n as i64).into()));
    let bordered = m.add(&j_over_n)?;
    let Some(inv) = bareiss_inverse(&bordered)? else {
        return Err(singular(m, rank(m)));
    };
    let mplus = inv.inverse.sub(&j_over_n)?;
    verify_identities(m, &mplus)?;
    Ok(finish(mplus, n, PinvMethod::Bordered))
}

/// Cheap certificate of the Penrose conditions.
///
/// If `N` is symmetric with zero row sums and `N M = I - J/r`, then
/// `M N M = M` and `N M N = N` follow, and `N` is the pseudoinverse.
/// Costs one sparse-by-dense product.
fn verify_identities(m: &RatMatrix, mplus: &RatMatrix) -> Result<()> {
    let n = m.rows();
    let fail = |what: &str| Err(Error::SelfCheckFailed(format!("pseudoinverse: {what}")));
    if !mplus.is_symmetric() {
        return fail("result is not symmetric");
    }
    if mplus.row_sums().iter().any(|s| !s.is_zero()) {
        return fail("result has nonzero row sums");
    }
    let m_cols: Vec<Vec<(usize, &Rat)>> = (0..n)
        .map(|k| (0..n).filter(|&j| !m.get(j, k).is_zero()).map(|j| (j, m.get(j, k))).collect())
        .collect();
    let off = -Rat::new(1.into(), (n as i64).into());
    let diag = &off + Rat::one();
    for i in 0..n {
        let row = mplus.row(i);
        for (k, col) in m_cols.iter().enumerate() {
            let s: Rat = col.iter().map(|(j, v)| &row[*j] * *v).sum();
            let want = if i == k { &diag } else { &off };
            if &s != want {
                return fail(&format!("(M⁺M)[{i}][{k}] = {}", fmt_rat(&s)));
            }
        }
    }
    Ok(())
}

/// Dense, literal check of every identity `M⁺` must satisfy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PenroseReport {
    /// `M M⁺ M = M`.
    pub mpm: bool,
    /// `M⁺ M M⁺ = M⁺`.
    pub pmp: bool,
    pub symmetric: bool,
    /// Row sums of both `M` and `M⁺` vanish.
    pub row_sums_zero: bool,
    /// `Σ_j n_ij m_jk = δ_ik - 1/r`.
    pub product: bool,
    /// `n_ii - Σ_{j,k} n_ij n_kk m_jk = Tr(M⁺)/r` for all `i`.
    pub trace: bool,
}

impl PenroseReport {
    pub fn all_hold(&self) -> bool {
        self.mpm && self.pmp && self.symmetric && self.row_sums_zero && self.product && self.trace
    }
}

/// `O(r³)`; meant for tests and audits on moderate fibers.
pub fn penrose_report(m: &RatMatrix, p: &PseudoinverseResult) -> Result<PenroseReport> {
    let n = m.rows();
    let np = &p.mplus;
    let mn = m.mul(np)?;
    let nm = np.mul(m)?;
    let mpm = mn.mul(m)? == *m;
    let pmp = nm.mul(np)? == *np;
    let inv_n = Rat::new(1.into(), (n as i64).into());
    let projector = RatMatrix::identity(n).sub(&RatMatrix::constant(n, n, inv_n.clone()))?;
    let product = nm == projector;
    let row_sums_zero = m.row_sums().iter().chain(np.row_sums().iter()).all(Zero::is_zero);
    // u_j = Σ_k m_jk n_kk, then Σ_j n_ij u_j.
    let u = m.mul_vec(&np.diagonal())?;
    let nu = np.mul_vec(&u)?;
    let target = &p.trace * &inv_n;
    let trace = (0..n).all(|i| np.get(i, i) - &nu[i] == target);
    Ok(PenroseReport {
        mpm,
        pmp,
        symmetric: np.is_symmetric(),
        row_sums_zero,
        product,
        trace,
    })
}

/// `r(Γ_i, Γ_j) = n_ii + n_jj - 2 n_ij`.
pub fn effective_resistance(p: &PseudoinverseResult, i: usize, j: usize) -> Result<Rat> {
    let n = p.dim();
    for k in [i, j] {
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, len: n });
        }
    }
    Ok(p.entry(i, i) + p.entry(j, j) - int(2) * p.entry(i, j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    fn complete_graph(r: i64) -> RatMatrix {
        let n = r as usize;
        let mut m = RatMatrix::constant(n, n, int(-1));
        for i in 0..n {
            m[(i, i)] = int(r - 1);
        }
        m
    }

    #[test]
    fn one_by_one_zero() {
        for p in [pseudoinverse(&mat(&[&[0]])).unwrap(), pseudoinverse_bordered(&mat(&[&[0]])).unwrap()] {
            assert_eq!(p.mplus, mat(&[&[0]]));
            assert_eq!(p.trace, int(0));
            assert_eq!(p.rank, 0);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = mat(&[&[1, -1], &[-1, 1]]);
        let p = pseudoinverse(&m).unwrap();
        assert_eq!(p.mplus, m.scale(&rat(1, 4)));
        assert_eq!(p.trace, rat(1, 2));
        assert_eq!(effective_resistance(&p, 0, 1).unwrap(), int(1));
        assert_eq!(effective_resistance(&p, 1, 1).unwrap(), int(0));
    }

    #[test]
    fn complete_graph_on_five_vertices() {
        // Spectral form: M = 5I - J, M⁺ = (1/5)(I - J/5).
        let m = complete_graph(5);
        let p = pseudoinverse(&m).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { rat(4, 25) } else { rat(-1, 25) };
                assert_eq!(p.entry(i, j), &want);
            }
        }
        assert_eq!(p.trace, rat(4, 5));
        assert_eq!(effective_resistance(&p, 0, 3).unwrap(), rat(2, 5));
        assert!(penrose_report(&m, &p).unwrap().all_hold());
    }

    #[test]
    fn routes_agree_on_weighted_path() {
        // Path 0 - 1 - 2 - 3 with weights 2, 1/3, 5.
        let w = [rat(2, 1), rat(1, 3), rat(5, 1)];
        let mut m = RatMatrix::zeros(4, 4);
        for (e, we) in w.iter().enumerate() {
            m[(e, e + 1)] = -we.clone();
            m[(e + 1, e)] = -we.clone();
            m[(e, e)] += we;
            m[(e + 1, e + 1)] += we;
        }
        let a = pseudoinverse(&m).unwrap();
        let b = pseudoinverse_bordered(&m).unwrap();
        assert_eq!(a.method, PinvMethod::Grounded);
        assert_eq!(b.method, PinvMethod::Bordered);
        assert_eq!(a.mplus, b.mplus);
        // Series resistances add: 1/2 + 3 + 1/5.
        assert_eq!(effective_resistance(&a, 0, 3).unwrap(), rat(37, 10));
    }

    #[test]
    fn disconnected_is_singular_beyond_kernel() {
        let m = mat(&[&[1, -1, 0, 0], &[-1, 1, 0, 0], &[0, 0, 1, -1], &[0, 0, -1, 1]]);
        assert_eq!(
            pseudoinverse(&m),
            Err(Error::SingularBeyondKernel { rank: 2, expected: 3 })
        );
        assert_eq!(
            pseudoinverse_bordered(&m),
            Err(Error::SingularBeyondKernel { rank: 2, expected: 3 })
        );
    }

    #[test]
    fn rejects_non_laplacian_shapes() {
        assert!(matches!(pseudoinverse(&mat(&[&[1, 0], &[0, 1]])), Err(Error::NotLaplacian(_))));
        assert!(matches!(pseudoinverse(&mat(&[&[1, -1], &[0, 0]])), Err(Error::NotLaplacian(_))));
    }

    #[test]
    fn signed_zero_row_sum_matrix_uses_bordered_route() {
        // Symmetric, zero row sums, a positive off-diagonal entry.
        let m = mat(&[&[-1, 2, -1], &[2, -3, 1], &[-1, 1, 0]]);
        let p = pseudoinverse(&m).unwrap();
        assert_eq!(p.method, PinvMethod::Bordered);
        assert!(penrose_report(&m, &p).unwrap().all_hold());
    }

    #[test]
    fn effective_resistance_index_check() {
        let p = pseudoinverse(&mat(&[&[1, -1], &[-1, 1]])).unwrap();
        assert!(matches!(effective_resistance(&p, 0, 2), Err(Error::IndexOutOfRange { .. })));
    }
}
