//! Small dense linear-algebra helpers shared by the other modules.
//!
//! Everything here works on `nalgebra` dynamic matrices. Orthonormalization
//! follows a fixed sign convention (the diagonal of the implied R factor is
//! nonnegative) so that frames are reproducible bit-for-bit.

use nalgebra::{DMatrix, DVector, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Determinant of a row-major `p x p` block.
///
/// Cofactor expansion up to `p = 4`, Gaussian elimination with partial
/// pivoting above that.
pub fn det(m: &[f64], p: usize) -> f64 {
    debug_assert_eq!(m.len(), p * p);
    match p {
        0 => 1.0,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        4 => {
            let s0 = m[0] * m[5] - m[1] * m[4];
            let s1 = m[0] * m[6] - m[2] * m[4];
            let s2 = m[0] * m[7] - m[3] * m[4];
            let s3 = m[1] * m[6] - m[2] * m[5];
            let s4 = m[1] * m[7] - m[3] * m[5];
            let s5 = m[2] * m[7] - m[3] * m[6];
            let c5 = m[10] * m[15] - m[11] * m[14];
            let c4 = m[9] * m[15] - m[11] * m[13];
            let c3 = m[9] * m[14] - m[10] * m[13];
            let c2 = m[8] * m[15] - m[11] * m[12];
            let c1 = m[8] * m[14] - m[10] * m[12];
            let c0 = m[8] * m[13] - m[9] * m[12];
            s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0
        }
        _ => {
            let mut a = m.to_vec();
            let mut d = 1.0;
            for col in 0..p {
                let mut piv = col;
                for r in col + 1..p {
                    if a[r * p + col].abs() > a[piv * p + col].abs() {
                        piv = r;
                    }
                }
                if a[piv * p + col] == 0.0 {
                    return 0.0;
                }
                if piv != col {
                    for c in 0..p {
                        a.swap(col * p + c, piv * p + c);
                    }
                    d = -d;
                }
                let pv = a[col * p + col];
                d *= pv;
                for r in col + 1..p {
                    let f = a[r * p + col] / pv;
                    if f != 0.0 {
                        for c in col..p {
                            a[r * p + c] -= f * a[col * p + c];
                        }
                    }
                }
            }
            d
        }
    }
}

/// Orthonormalizes the columns of `m` (thin QR with nonnegative R diagonal).
///
/// Uses modified Gram-Schmidt with one reorthogonalization pass.
pub fn orthonormalize(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, p) = m.shape();
    if p > n {
        return Err(Error::PlaneTooLarge { n, p });
    }
    let mut q = DMatrix::<f64>::zeros(n, p);
    for j in 0..p {
        let mut v = m.column(j).clone_owned();
        let orig = v.norm();
        if orig == 0.0 || !orig.is_finite() {
            return Err(Error::RankDeficient);
        }
        for _ in 0..2 {
            for k in 0..j {
                let qk = q.column(k);
                let c = qk.dot(&v);
                v.axpy(-c, &qk, 1.0);
            }
        }
        let nv = v.norm();
        if nv <= 1e-12 * orig {
            return Err(Error::RankDeficient);
        }
        q.set_column(j, &(v / nv));
    }
    Ok(q)
}

/// Extends orthonormal columns `y` (n x p) to an orthonormal basis of R^n.
///
/// The new columns come from the standard basis vectors, picked greedily by
/// largest residual norm (lowest index on ties), orthogonalized, and signed so
/// that their component along the chosen basis vector is positive.
pub fn complete_frame(y: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, p) = y.shape();
    let mut f = DMatrix::<f64>::zeros(n, n);
    f.view_mut((0, 0), (n, p)).copy_from(y);
    let mut used = vec![false; n];
    for j in p..n {
        let mut best: Option<(usize, DVector<f64>, f64)> = None;
        for (k, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
            let mut v = DVector::<f64>::zeros(n);
            v[k] = 1.0;
            for _ in 0..2 {
                for c in 0..j {
                    let col = f.column(c);
                    let d = col.dot(&v);
                    v.axpy(-d, &col, 1.0);
                }
            }
            let nv = v.norm();
            if best.as_ref().is_none_or(|b| nv > b.2 + 1e-12) {
                best = Some((k, v, nv));
            }
        }
        let (k, v, nv) = best.expect("standard basis spans R^n");
        used[k] = true;
        let mut v = v / nv;
        if v[k] < 0.0 {
            v = -v;
        }
        f.set_column(j, &v);
    }
    f
}

/// Largest deviation of `m^T m` from the identity.
pub fn orthonormality_defect(m: &DMatrix<f64>) -> f64 {
    let g = m.transpose() * m;
    let p = g.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..p {
        for j in 0..p {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

fn padded(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = a.shape();
    if r >= c {
        a.clone()
    } else {
        let mut m = DMatrix::<f64>::zeros(c, c);
        m.view_mut((0, 0), (r, c)).copy_from(a);
        m
    }
}

/// Cutoff below which singular values count as zero.
fn cutoff(sv: &DVector<f64>, rel: f64) -> f64 {
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    (rel * smax).max(1e-14)
}

/// Relative reconstruction error accepted from a factorization.
pub const SVD_CHECK: f64 = 1e-11;
const SVD_ATTEMPTS: u64 = 8;

/// `a = u diag(s) v^T` with `u`, `v` having orthonormal columns.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    fn error(&self, a: &DMatrix<f64>) -> f64 {
        let scale = a.amax().max(f64::MIN_POSITIVE);
        ((&self.u * DMatrix::from_diagonal(&self.s)) * self.v.transpose() - a).amax() / scale
    }

    /// Minimum-norm least-squares solution of `a x = b`, dropping singular
    /// values at or below `eps`.
    pub fn solve(&self, b: &DVector<f64>, eps: f64) -> DVector<f64> {
        let mut c = self.u.transpose() * b;
        for (ci, &si) in c.iter_mut().zip(self.s.iter()) {
            *ci = if si > eps { *ci / si } else { 0.0 };
        }
        &self.v * c
    }
}

fn raw_svd(a: &DMatrix<f64>) -> Svd {
    let d = SVD::new(a.clone(), true, true);
    Svd {
        u: d.u.expect("requested U"),
        s: d.singular_values,
        v: d.v_t.expect("requested V^T").transpose(),
    }
}

fn mixing_rotation(c: usize, attempt: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(attempt);
    loop {
        let m = DMatrix::from_fn(c, c, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Ok(q) = orthonormalize(&m) {
            return q;
        }
    }
}

/// Singular value decomposition checked by reconstruction.
///
/// The bidiagonal iteration in `nalgebra` occasionally returns factors that
/// do not reproduce the input for rank-deficient matrices. Failed attempts
/// are retried on the transpose and then on `a q` for fixed orthogonal `q`.
pub fn svd(a: &DMatrix<f64>) -> Svd {
    let mut best: Option<(f64, Svd)> = None;
    for attempt in 0..SVD_ATTEMPTS {
        let cand = match attempt {
            0 => raw_svd(a),
            1 => {
                let t = raw_svd(&a.transpose());
                Svd { u: t.v, s: t.s, v: t.u }
            }
            k => {
                let q = mixing_rotation(a.ncols(), k);
                let t = raw_svd(&(a * &q));
                Svd {
                    u: t.u,
                    s: t.s,
                    v: q * t.v,
                }
            }
        };
        let err = cand.error(a);
        if err <= SVD_CHECK {
            return cand;
        }
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, cand));
        }
    }
    let (err, out) = best.expect("at least one attempt");
    log::warn!(
        "SVD of a {}x{} matrix reconstructs only to {err:.2e}",
        a.nrows(),
        a.ncols()
    );
    out
}

/// Numerical rank with singular values below `rel * sigma_max` discarded.
pub fn rank(a: &DMatrix<f64>, rel: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let d = svd(a);
    let tol = cutoff(&d.s, rel);
    d.s.iter().filter(|s| **s > tol).count()
}

/// Orthonormal basis (as columns) of the column space of `a`.
pub fn column_space(a: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let r = a.nrows();
    if a.ncols() == 0 || r == 0 {
        return DMatrix::zeros(r, 0);
    }
    let d = svd(a);
    let tol = cutoff(&d.s, rel);
    let keep: Vec<usize> = (0..d.s.len()).filter(|&i| d.s[i] > tol).collect();
    let mut out = DMatrix::zeros(r, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &d.u.column(i));
    }
    out
}

/// Orthonormal basis (as columns) of the null space of `a`.
pub fn null_space(a: &DMatrix<f64>, rel: f64) -> DMatrix<f64> {
    let c = a.ncols();
    if c == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return DMatrix::identity(c, c);
    }
    let d = svd(&padded(a));
    let tol = cutoff(&d.s, rel);
    let null: Vec<usize> = (0..d.s.len()).filter(|&i| d.s[i] <= tol).collect();
    let mut out = DMatrix::zeros(c, null.len());
    for (j, &i) in null.iter().enumerate() {
        out.set_column(j, &d.v.column(i));
    }
    out
}

/// Spectral norm of the difference of the orthogonal projectors onto the
/// column spans of two orthonormal bases. Equals the sine of the largest
/// principal angle for equal dimensions and 1 when the dimensions differ.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows(), "ambient dimensions differ");
    if a.ncols() != b.ncols() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    let d = a * a.transpose() - b * b.transpose();
    let svd = SVD::new(d, false, false);
    svd.singular_values.iter().cloned().fold(0.0, f64::max)
}

/// Sign of the permutation that sorts `seq` (0 if it has a repeated entry).
pub fn permutation_sign(seq: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return 0.0;
            }
            if seq[i] > seq[j] {
                s = -s;
            }
        }
    }
    s
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_matches_elimination() {
        let m: Vec<f64> = (0..16).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let small = det(&m, 4);
        let mut five = vec![0.0; 25];
        for r in 0..4 {
            for c in 0..4 {
                five[r * 5 + c] = m[r * 4 + c];
            }
        }
        five[24] = 1.0;
        assert!((det(&five, 5) - small).abs() < 1e-9);
    }

    #[test]
    fn completion_is_orthonormal() {
        let y = orthonormalize(&DMatrix::from_column_slice(
            4,
            2,
            &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0],
        ))
        .unwrap();
        let f = complete_frame(&y);
        assert!(orthonormality_defect(&f) < 1e-12);
        assert_eq!(f.view((0, 0), (4, 2)), y.view((0, 0), (4, 2)));
    }

    #[test]
    fn checked_svd_reconstructs_and_solves() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (r, c, k) in [(9, 5, 2), (4, 7, 3), (6, 6, 6), (12, 8, 0)] {
            let a = DMatrix::from_fn(r, k, |_, _| rng.sample::<f64, _>(StandardNormal))
                * DMatrix::from_fn(k, c, |_, _| rng.sample::<f64, _>(StandardNormal));
            let d = svd(&a);
            assert!(d.error(&a) <= SVD_CHECK);
            assert_eq!(rank(&a, 1e-9), k);
            assert_eq!(column_space(&a, 1e-9).ncols(), k);
            assert_eq!(null_space(&a, 1e-9).ncols(), c - k);
        }
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let x = svd(&a).solve(&DVector::from_vec(vec![4.0, 1.0]), 1e-12);
        assert_eq!(x, DVector::from_vec(vec![2.0, 0.0]));
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&a, 1e-9);
        assert_eq!(ns.ncols(), 2);
        assert!((a * ns).norm() < 1e-12);
    }

    #[test]
    fn rank_deficient_frame_rejected() {
        let m = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert_eq!(orthonormalize(&m), Err(Error::RankDeficient));
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1.0);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1.0);
        assert_eq!(permutation_sign(&[2, 0, 1]), 1.0);
        assert_eq!(permutation_sign(&[1, 1]), 0.0);
    }
}
