//! Compact Lie algebras `su(k)` and their Cartan 3-forms
//! `phi(u, v, w) = c <u, [v, w]>`.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::exterior::AltForm;

type CMatrix = DMatrix<Complex<f64>>;

/// Structure constants `c^k_{ij}` in an orthonormal basis, with the basis
/// matrices kept for `su(k)`.
#[derive(Clone, Debug)]
pub struct LieAlgebraData {
    dim: usize,
    structure: Vec<f64>,
    rank_k: Option<usize>,
    basis: Vec<CMatrix>,
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `<X, Y> = -Re tr(XY)`.
fn killing_like(a: &CMatrix, b: &CMatrix) -> f64 {
    -(a * b).trace().re
}

fn su_basis(k: usize) -> Vec<CMatrix> {
    let i = Complex::new(0.0, 1.0);
    let one = Complex::new(1.0, 0.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(k * k - 1);
    for a in 0..k {
        for b in a + 1..k {
            let mut x = CMatrix::zeros(k, k);
            x[(a, b)] = one * r;
            x[(b, a)] = -one * r;
            out.push(x);
            let mut y = CMatrix::zeros(k, k);
            y[(a, b)] = i * r;
            y[(b, a)] = i * r;
            out.push(y);
        }
    }
    for l in 1..k {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let mut h = CMatrix::zeros(k, k);
        for d in 0..l {
            h[(d, d)] = i / norm;
        }
        h[(l, l)] = -i * (l as f64) / norm;
        out.push(h);
    }
    out
}

impl LieAlgebraData {
    /// `su(k)` with `<X, Y> = -tr(XY)`, for `2 <= k <= 4`.
    pub fn su(k: usize) -> Result<Self> {
        if !(2..=4).contains(&k) {
            return Err(Error::InvalidLieAlgebra(format!("su({k}) is not supported")));
        }
        let basis = su_basis(k);
        let dim = basis.len();
        let mut structure = vec![0.0; dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let br = commutator(&basis[i], &basis[j]);
                for (kk, e) in basis.iter().enumerate() {
                    structure[(kk * dim + i) * dim + j] = killing_like(e, &br);
                }
            }
        }
        let g = LieAlgebraData {
            dim,
            structure,
            rank_k: Some(k),
            basis,
        };
        g.validate()?;
        Ok(g)
    }

    /// Wraps raw structure constants `structure[(k * dim + i) * dim + j] = c^k_{ij}`.
    pub fn from_structure(dim: usize, structure: Vec<f64>) -> Result<Self> {
        if structure.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                found: structure.len(),
            });
        }
        let g = LieAlgebraData {
            dim,
            structure,
            rank_k: None,
            basis: Vec::new(),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> f64 {
        self.structure[(k * self.dim + i) * self.dim + j]
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (k, o) in out.iter_mut().enumerate() {
            for (i, &xi) in x.iter().enumerate().take(d) {
                if xi == 0.0 {
                    continue;
                }
                for (j, &yj) in y.iter().enumerate().take(d) {
                    *o += self.structure_constant(k, i, j) * xi * yj;
                }
            }
        }
        out
    }

    /// Largest violation of antisymmetry, the Jacobi identity, and invariance
    /// of the inner product, over basis triples.
    pub fn invariant_defects(&self) -> (f64, f64, f64) {
        let d = self.dim;
        let c = |k, i, j| self.structure_constant(k, i, j);
        let (mut anti, mut jacobi, mut inv) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    anti = anti.max((c(k, i, j) + c(k, j, i)).abs());
                    // <[e_i, e_j], e_k> = <e_i, [e_j, e_k]>
                    inv = inv.max((c(k, i, j) - c(i, j, k)).abs());
                    for m in 0..d {
                        let mut s = 0.0;
                        for l in 0..d {
                            s += c(l, i, j) * c(m, l, k) + c(l, j, k) * c(m, l, i) + c(l, k, i) * c(m, l, j);
                        }
                        jacobi = jacobi.max(s.abs());
                    }
                }
            }
        }
        (anti, jacobi, inv)
    }

    fn validate(&self) -> Result<()> {
        let (anti, jacobi, inv) = self.invariant_defects();
        if anti > 1e-10 || jacobi > 1e-10 || inv > 1e-10 {
            return Err(Error::InvalidLieAlgebra(format!(
                "antisymmetry {anti:.2e}, Jacobi {jacobi:.2e}, invariance {inv:.2e}"
            )));
        }
        Ok(())
    }

    /// Coordinates of a matrix in the orthonormal basis.
    fn coords(&self, x: &CMatrix) -> Vec<f64> {
        self.basis.iter().map(|e| killing_like(e, x)).collect()
    }

    fn su_rank(&self) -> Result<usize> {
        self.rank_k
            .ok_or_else(|| Error::InvalidLieAlgebra("matrix model required".into()))
    }

    /// Orthonormal `(u, v, w)` spanning the `su(2)` of the highest root,
    /// supported on the corner block `(0, k - 1)`.
    pub fn highest_root_triple(&self) -> Result<[Vec<f64>; 3]> {
        let k = self.su_rank()?;
        let i = Complex::new(0.0, 1.0);
        let r = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut u = CMatrix::zeros(k, k);
        u[(0, 0)] = i * r;
        u[(k - 1, k - 1)] = -i * r;
        let mut v = CMatrix::zeros(k, k);
        v[(0, k - 1)] = r;
        v[(k - 1, 0)] = -r;
        let mut w = CMatrix::zeros(k, k);
        w[(0, k - 1)] = i * r;
        w[(k - 1, 0)] = i * r;
        Ok([self.coords(&u), self.coords(&v), self.coords(&w)])
    }

    /// Orthonormal `(u, v, w)` spanning the principal `su(2)`: the real skew
    /// matrices for `k = 3`, the whole algebra for `k = 2`.
    pub fn principal_triple(&self) -> Result<[Vec<f64>; 3]> {
        let k = self.su_rank()?;
        if k == 2 {
            return self.highest_root_triple();
        }
        if k != 3 {
            return Err(Error::OutOfRange(format!(
                "principal triple implemented for k <= 3, got {k}"
            )));
        }
        let r = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let skew = |a: usize, b: usize| {
            let mut x = CMatrix::zeros(3, 3);
            x[(a, b)] = r;
            x[(b, a)] = -r;
            x
        };
        Ok([
            self.coords(&skew(0, 1)),
            self.coords(&skew(0, 2)),
            self.coords(&skew(1, 2)),
        ])
    }

    /// Length of the highest root `e_0 - e_{k-1}` under the dual metric on
    /// the diagonal Cartan subalgebra.
    pub fn highest_root_length(&self) -> Result<f64> {
        let k = self.su_rank()?;
        let sq: f64 = self.basis[self.dim - (k - 1)..]
            .iter()
            .map(|h| {
                let root = (h[(0, 0)] - h[(k - 1, k - 1)]).im;
                root * root
            })
            .sum();
        Ok(sq.sqrt())
    }

    /// `<u, [v, w]>` on coordinate vectors.
    pub fn triple(&self, u: &[f64], v: &[f64], w: &[f64]) -> f64 {
        self.bracket(v, w).iter().zip(u).map(|(a, b)| a * b).sum()
    }
}

/// `phi_{ijk} = c <e_i, [e_j, e_k]>`, with `c` chosen so the highest-root
/// `su(2)` has value 1.
pub fn cartan_three_form(g: &LieAlgebraData) -> Result<AltForm> {
    let [u, v, w] = g.highest_root_triple()?;
    let c = 1.0 / g.triple(&u, &v, &w).abs();
    let d = g.dim();
    let mut terms = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                let val = c * g.structure_constant(i, j, k);
                if val.abs() > 1e-15 {
                    terms.push((vec![i, j, k], val));
                }
            }
        }
    }
    AltForm::from_terms(d, 3, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su_dims_and_invariants() {
        for k in 2..=4 {
            let g = LieAlgebraData::su(k).unwrap();
            assert_eq!(g.dim(), k * k - 1);
            let (a, j, i) = g.invariant_defects();
            assert!(a < 1e-12 && j < 1e-12 && i < 1e-12);
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let g = LieAlgebraData::su(3).unwrap();
        for (a, x) in g.basis.iter().enumerate() {
            for (b, y) in g.basis.iter().enumerate() {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((killing_like(x, y) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn normalization_matches_root_length() {
        for k in 2..=4 {
            let g = LieAlgebraData::su(k).unwrap();
            let [u, v, w] = g.highest_root_triple().unwrap();
            let c = 1.0 / g.triple(&u, &v, &w).abs();
            assert!((1.0 / c - g.highest_root_length().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn su2_form_is_volume() {
        let phi = cartan_three_form(&LieAlgebraData::su(2).unwrap()).unwrap();
        assert!(phi.approx_eq(&AltForm::volume(3), 1e-14));
    }

    #[test]
    fn rejects_non_jacobi() {
        // c^0_{12} = 1 alone, antisymmetrized, breaks invariance
        let mut s = vec![0.0; 27];
        s[5] = 1.0;
        s[7] = -1.0;
        assert!(matches!(
            LieAlgebraData::from_structure(3, s),
            Err(Error::InvalidLieAlgebra(_))
        ));
    }
}
