//! Exterior algebra on R^n with the standard orthonormal metric.
//!
//! A degree-p form is stored sparsely as a map from strictly increasing
//! multi-indices to coefficients, so `e^{i1} ^ ... ^ e^{ip}` with `i1 < ... < ip`
//! is the only representative kept. Multi-indices are packed into bitmasks;
//! indices are 0-based throughout the Rust API (the text and JSON formats are
//! 1-based). The coefficient of an arbitrary index tuple is recovered by the
//! sign of the sorting permutation, see [`AltForm::coeff`].
//!
//! Orientation is `e^1 ^ ... ^ e^n = +vol`.

mod format;

pub use format::{AltFormJson, TermJson};

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// A vector of R^n in the standard basis.
pub type VectorN = DVector<f64>;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

/// Default absolute tolerance for comparing forms.
pub const FORM_TOL: f64 = 1e-9;

pub(crate) fn mask_of(indices: &[usize]) -> u32 {
    indices.iter().fold(0u32, |m, &i| m | (1 << i))
}

pub(crate) fn indices_of(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

/// Number of set bits of `mask` strictly below bit `i`.
fn below(mask: u32, i: usize) -> u32 {
    (mask & ((1u32 << i) - 1)).count_ones()
}

/// Sign of `e^I ^ e^J` relative to `e^{I u J}` for disjoint masks.
fn shuffle_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0;
    for j in indices_of(b) {
        inversions += (a >> (j + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// All masks with `p` bits out of `n`, in lexicographic order of the index tuples.
pub fn canonical_masks(n: usize, p: usize) -> Vec<u32> {
    fn rec(start: usize, n: usize, left: usize, cur: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        for i in start..=n - left {
            rec(i + 1, n, left - 1, cur | (1 << i), out);
        }
    }
    let mut out = Vec::with_capacity(linalg::binomial(n, p));
    if p <= n {
        rec(0, n, p, 0, &mut out);
    }
    out
}

/// A constant-coefficient alternating p-form on R^n.
#[derive(Clone, Debug, PartialEq)]
pub struct AltForm {
    n: usize,
    p: usize,
    coeffs: BTreeMap<u32, f64>,
}

impl AltForm {
    pub fn zero(n: usize, p: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "ambient dimension {n} unsupported");
        assert!(p <= n, "degree {p} exceeds dimension {n}");
        AltForm {
            n,
            p,
            coeffs: BTreeMap::new(),
        }
    }

    /// The constant 0-form `c`.
    pub fn scalar(n: usize, c: f64) -> Self {
        let mut f = AltForm::zero(n, 0);
        f.insert(0, c);
        f
    }

    /// The basis form `e^{i1} ^ ... ^ e^{ip}` (0-based, strictly increasing).
    pub fn basis(n: usize, indices: &[usize]) -> Result<Self> {
        Self::from_terms(n, indices.len(), [(indices.to_vec(), 1.0)])
    }

    /// `e^1 ^ ... ^ e^n`.
    pub fn volume(n: usize) -> Self {
        let mut f = AltForm::zero(n, n);
        f.insert(((1u64 << n) - 1) as u32, 1.0);
        f
    }

    /// The 1-form metric-dual to `v`.
    pub fn from_vector(v: &VectorN) -> Self {
        let mut f = AltForm::zero(v.len(), 1);
        for (i, &c) in v.iter().enumerate() {
            f.insert(1 << i, c);
        }
        f
    }

    /// Builds a form from 0-based strictly increasing index tuples.
    pub fn from_terms<I>(n: usize, p: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if p > n {
            return Err(Error::DegreeMismatch { expected: n, found: p });
        }
        let mut f = AltForm::zero(n, p);
        for (idx, c) in terms {
            if idx.len() != p {
                return Err(Error::DegreeMismatch {
                    expected: p,
                    found: idx.len(),
                });
            }
            let increasing = idx.windows(2).all(|w| w[0] < w[1]);
            if !increasing || idx.iter().any(|&i| i >= n) {
                return Err(Error::InvalidIndex(idx));
            }
            f.insert(mask_of(&idx), c);
        }
        Ok(f)
    }

    /// Builds a form from coefficients in [`canonical_masks`] order.
    pub fn from_dense(n: usize, p: usize, values: &[f64]) -> Self {
        let masks = canonical_masks(n, p);
        assert_eq!(masks.len(), values.len(), "dense length mismatch");
        let mut f = AltForm::zero(n, p);
        for (m, &v) in masks.iter().zip(values) {
            f.insert(*m, v);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn insert(&mut self, mask: u32, c: f64) {
        if c != 0.0 {
            *self.coeffs.entry(mask).or_insert(0.0) += c;
            if self.coeffs[&mask] == 0.0 {
                self.coeffs.remove(&mask);
            }
        }
    }

    /// Stored terms as (0-based increasing indices, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.coeffs.iter().map(|(m, c)| (indices_of(*m).collect(), *c))
    }

    /// Coefficient `phi_{i1...ip}` for an arbitrary index tuple: the stored
    /// coefficient times the sign of the sorting permutation, zero for
    /// repeated indices.
    pub fn coeff(&self, indices: &[usize]) -> f64 {
        if indices.len() != self.p {
            return 0.0;
        }
        let s = linalg::permutation_sign(indices);
        if s == 0.0 {
            return 0.0;
        }
        s * self.coeffs.get(&mask_of(indices)).copied().unwrap_or(0.0)
    }

    /// Dense coefficient vector in [`canonical_masks`] order.
    pub fn to_dense(&self) -> Vec<f64> {
        canonical_masks(self.n, self.p)
            .iter()
            .map(|m| self.coeffs.get(m).copied().unwrap_or(0.0))
            .collect()
    }

    /// Drops coefficients with magnitude at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        AltForm {
            n: self.n,
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    /// Number of coefficients with magnitude above `tol`.
    pub fn support(&self, tol: f64) -> usize {
        self.coeffs.values().filter(|c| c.abs() > tol).count()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut f = AltForm::zero(self.n, self.p);
        for (&m, &c) in &self.coeffs {
            f.insert(m, s * c);
        }
        f
    }

    fn check_same(&self, other: &AltForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.p != other.p {
            return Err(Error::DegreeMismatch {
                expected: self.p,
                found: other.p,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &AltForm) -> Result<Self> {
        self.check_same(other)?;
        let mut f = self.clone();
        for (&m, &c) in &other.coeffs {
            f.insert(m, c);
        }
        Ok(f)
    }

    /// `<a, b>` with the `e^I` (I increasing) orthonormal.
    pub fn inner(&self, other: &AltForm) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .coeffs
            .iter()
            .map(|(m, c)| c * other.coeffs.get(m).copied().unwrap_or(0.0))
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.values().fold(0.0, |acc, c| acc + c * c).sqrt()
    }

    /// Largest coefficient difference.
    pub fn max_abs_diff(&self, other: &AltForm) -> Result<f64> {
        self.check_same(other)?;
        let mut worst: f64 = 0.0;
        for (m, c) in &self.coeffs {
            worst = worst.max((c - other.coeffs.get(m).copied().unwrap_or(0.0)).abs());
        }
        for (m, c) in &other.coeffs {
            if !self.coeffs.contains_key(m) {
                worst = worst.max(c.abs());
            }
        }
        Ok(worst)
    }

    /// Equality of pruned coefficient maps within `tol`.
    pub fn approx_eq(&self, other: &AltForm, tol: f64) -> bool {
        self.max_abs_diff(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// Exterior product. Returns the zero form when the degrees add past `n`.
    pub fn wedge(&self, other: &AltForm) -> Result<AltForm> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let q = self.p + other.p;
        if q > self.n {
            return Ok(AltForm {
                n: self.n,
                p: q,
                coeffs: BTreeMap::new(),
            });
        }
        let mut f = AltForm::zero(self.n, q);
        for (&a, &ca) in &self.coeffs {
            for (&b, &cb) in &other.coeffs {
                if a & b == 0 {
                    f.insert(a | b, shuffle_sign(a, b) * ca * cb);
                }
            }
        }
        Ok(f)
    }

    /// Hodge star, characterized by `a ^ *b = <a, b> vol`.
    pub fn hodge_star(&self) -> AltForm {
        let full = ((1u64 << self.n) - 1) as u32;
        let mut f = AltForm::zero(self.n, self.n - self.p);
        for (&m, &c) in &self.coeffs {
            let comp = full & !m;
            f.insert(comp, shuffle_sign(m, comp) * c);
        }
        f
    }

    /// Interior product `v _| a`, inserting `v` into the first slot.
    pub fn interior(&self, v: &VectorN) -> Result<AltForm> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        if self.p == 0 {
            return Err(Error::DegreeUnderflow);
        }
        let mut f = AltForm::zero(self.n, self.p - 1);
        for (&m, &c) in &self.coeffs {
            for i in indices_of(m) {
                if v[i] != 0.0 {
                    let sign = if below(m, i).is_multiple_of(2) { 1.0 } else { -1.0 };
                    f.insert(m & !(1 << i), sign * v[i] * c);
                }
            }
        }
        Ok(f)
    }

    /// `a(w_1, ..., w_p)` for the columns of `frame` (n x p).
    pub fn evaluate_frame(&self, frame: &DMatrix<f64>) -> Result<f64> {
        if frame.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: frame.nrows(),
            });
        }
        if frame.ncols() != self.p {
            return Err(Error::DegreeMismatch {
                expected: self.p,
                found: frame.ncols(),
            });
        }
        let p = self.p;
        let mut block = vec![0.0; p * p];
        let mut total = 0.0;
        for (&m, &c) in &self.coeffs {
            for (r, i) in indices_of(m).enumerate() {
                for col in 0..p {
                    block[r * p + col] = frame[(i, col)];
                }
            }
            total += c * linalg::det(&block, p);
        }
        Ok(total)
    }

    /// `a(w_1, ..., w_p)` for explicit vectors.
    pub fn evaluate_vectors(&self, vs: &[&VectorN]) -> Result<f64> {
        if vs.len() != self.p {
            return Err(Error::WrongArgumentCount {
                expected: self.p,
                found: vs.len(),
            });
        }
        let mut frame = DMatrix::zeros(self.n, self.p);
        for (j, v) in vs.iter().enumerate() {
            if v.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: v.len(),
                });
            }
            frame.set_column(j, v);
        }
        self.evaluate_frame(&frame)
    }

    /// Pullback `m^* a` along a linear map `m: R^k -> R^n` given as an n x k
    /// matrix: `(m^* a)(v_1, ..., v_p) = a(m v_1, ..., m v_p)`.
    pub fn pullback(&self, m: &DMatrix<f64>) -> Result<AltForm> {
        if m.nrows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: m.nrows(),
            });
        }
        let k = m.ncols();
        if self.p > k {
            return Ok(AltForm {
                n: k,
                p: self.p,
                coeffs: BTreeMap::new(),
            });
        }
        let p = self.p;
        let mut out = AltForm::zero(k, p);
        let mut block = vec![0.0; p * p];
        let rows: Vec<(Vec<usize>, f64)> = self.terms().collect();
        for target in canonical_masks(k, p) {
            let cols: Vec<usize> = indices_of(target).collect();
            let mut total = 0.0;
            for (ri, c) in &rows {
                for (r, &i) in ri.iter().enumerate() {
                    for (cc, &j) in cols.iter().enumerate() {
                        block[r * p + cc] = m[(i, j)];
                    }
                }
                total += c * linalg::det(&block, p);
            }
            out.insert(target, total);
        }
        Ok(out)
    }

    /// Action of an orthogonal map `g`: `(g.a)(v...) = a(g^T v, ...)`.
    pub fn transform(&self, g: &DMatrix<f64>) -> Result<AltForm> {
        self.pullback(&g.transpose())
    }

    /// Infinitesimal action of a skew map:
    /// `(theta.a)(v_1, ..., v_p) = sum_a a(v_1, ..., theta v_a, ..., v_p)`.
    pub fn so_action(&self, theta: &SkewMap) -> Result<AltForm> {
        if theta.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: theta.dim(),
            });
        }
        let mut f = AltForm::zero(self.n, self.p);
        for (&m, &c) in &self.coeffs {
            for k in indices_of(m) {
                let rest = m & !(1 << k);
                let pos_k = below(m, k);
                for j in 0..self.n {
                    if rest & (1 << j) != 0 || j == k {
                        continue;
                    }
                    let t = theta.get(k, j);
                    if t == 0.0 {
                        continue;
                    }
                    // replace e^k by e^j in place, then sort
                    let parity = pos_k + below(rest, j);
                    let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
                    f.insert(rest | (1 << j), sign * t * c);
                }
            }
        }
        Ok(f)
    }
}

/// Precomputed term table for repeated evaluation of one form on many
/// tuples of vectors.
#[derive(Clone, Debug)]
pub struct FormEvaluator {
    n: usize,
    p: usize,
    rows: Vec<(Vec<usize>, f64)>,
}

impl FormEvaluator {
    pub fn new(form: &AltForm) -> Self {
        FormEvaluator {
            n: form.n,
            p: form.p,
            rows: form.terms().collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `a(c_1, ..., c_p)` where each `c_k` is a slice of length n.
    pub fn eval(&self, cols: &[&[f64]]) -> f64 {
        debug_assert_eq!(cols.len(), self.p);
        let p = self.p;
        let mut block = [0.0f64; MAX_DIM * MAX_DIM];
        let mut total = 0.0;
        for (idx, c) in &self.rows {
            for (r, &i) in idx.iter().enumerate() {
                for (k, col) in cols.iter().enumerate() {
                    block[r * p + k] = col[i];
                }
            }
            total += c * linalg::det(&block[..p * p], p);
        }
        total
    }
}

impl Add for &AltForm {
    type Output = AltForm;
    fn add(self, rhs: &AltForm) -> AltForm {
        self.try_add(rhs).expect("adding forms of different shape")
    }
}

impl Sub for &AltForm {
    type Output = AltForm;
    fn sub(self, rhs: &AltForm) -> AltForm {
        self.try_add(&rhs.scale(-1.0))
            .expect("subtracting forms of different shape")
    }
}

impl Neg for &AltForm {
    type Output = AltForm;
    fn neg(self) -> AltForm {
        self.scale(-1.0)
    }
}

impl Mul<&AltForm> for f64 {
    type Output = AltForm;
    fn mul(self, rhs: &AltForm) -> AltForm {
        rhs.scale(self)
    }
}

impl fmt::Display for AltForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format::to_text(self))
    }
}

/// An element of so(n), stored by its strictly upper-triangular entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMap {
    n: usize,
    upper: Vec<f64>,
}

impl SkewMap {
    pub fn zero(n: usize) -> Self {
        SkewMap {
            n,
            upper: vec![0.0; n * n.saturating_sub(1) / 2],
        }
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// The rotation generator `e_i (x) e^j - e_j (x) e^i`, i.e. the matrix with
    /// `+1` at `(i, j)` and `-1` at `(j, i)`.
    pub fn generator(n: usize, i: usize, j: usize) -> Self {
        assert!(i != j && i < n && j < n);
        let mut s = SkewMap::zero(n);
        s.set(i, j, 1.0);
        s
    }

    /// All generators with `i < j`, in lexicographic order.
    pub fn generators(n: usize) -> Vec<SkewMap> {
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(SkewMap::generator(n, i, j));
            }
        }
        out
    }

    /// Builds from coordinates in the `generators` basis.
    pub fn from_coords(n: usize, coords: &[f64]) -> Self {
        assert_eq!(coords.len(), n * (n - 1) / 2);
        SkewMap {
            n,
            upper: coords.to_vec(),
        }
    }

    /// Takes a matrix that must be skew-symmetric to within `1e-12`.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.ncols(),
            });
        }
        let mut s = SkewMap::zero(n);
        for i in 0..n {
            if m[(i, i)].abs() > 1e-12 {
                return Err(Error::Parse("matrix is not skew-symmetric".into()));
            }
            for j in i + 1..n {
                if (m[(i, j)] + m[(j, i)]).abs() > 1e-12 {
                    return Err(Error::Parse("matrix is not skew-symmetric".into()));
                }
                s.set(i, j, m[(i, j)]);
            }
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[f64] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[self.slot(i, j)],
            std::cmp::Ordering::Greater => -self.upper[self.slot(j, i)],
        }
    }

    /// Sets entry `(i, j)` and implicitly `(j, i)` to its negative.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i != j);
        if i < j {
            let k = self.slot(i, j);
            self.upper[k] = v;
        } else {
            let k = self.slot(j, i);
            self.upper[k] = -v;
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Matrix exponential, an element of SO(n).
    pub fn exp(&self) -> DMatrix<f64> {
        self.to_matrix().exp()
    }

    pub fn scale(&self, s: f64) -> Self {
        SkewMap {
            n: self.n,
            upper: self.upper.iter().map(|x| x * s).collect(),
        }
    }
}

impl Add for &SkewMap {
    type Output = SkewMap;
    fn add(self, rhs: &SkewMap) -> SkewMap {
        assert_eq!(self.n, rhs.n);
        SkewMap {
            n: self.n,
            upper: self.upper.iter().zip(&rhs.upper).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Standard basis vector `e_i` of R^n.
pub fn unit_vector(n: usize, i: usize) -> VectorN {
    let mut v = VectorN::zeros(n);
    v[i] = 1.0;
    v
}
