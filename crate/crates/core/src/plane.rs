//! Oriented p-planes stored as orthonormal n x p frames.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{unit_vector, AltForm, VectorN};
use crate::linalg;

/// Frames must satisfy `F^T F = I` to this accuracy.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// An oriented p-plane in R^n. Column order fixes the orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientedPlane {
    frame: DMatrix<f64>,
}

impl OrientedPlane {
    /// Wraps a frame that is already orthonormal to [`ORTHONORMAL_TOL`].
    pub fn new(frame: DMatrix<f64>) -> Result<Self> {
        let (n, p) = frame.shape();
        if p > n {
            return Err(Error::PlaneTooLarge { n, p });
        }
        let defect = linalg::orthonormality_defect(&frame);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(defect));
        }
        Ok(OrientedPlane { frame })
    }

    /// Orthonormalizes an arbitrary full-rank n x p matrix (Gram-Schmidt,
    /// orientation preserved).
    pub fn from_spanning(m: &DMatrix<f64>) -> Result<Self> {
        Ok(OrientedPlane {
            frame: linalg::orthonormalize(m)?,
        })
    }

    /// `span+(e_{i1}, ..., e_{ip})` for 0-based indices, in the given order.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let mut m = DMatrix::zeros(n, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            if i >= n {
                return Err(Error::InvalidIndex(indices.to_vec()));
            }
            m.set_column(c, &unit_vector(n, i));
        }
        OrientedPlane::new(m)
    }

    pub fn from_vectors(vs: &[VectorN]) -> Result<Self> {
        let n = vs.first().map(|v| v.len()).unwrap_or(0);
        let m = DMatrix::from_columns(vs);
        if m.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows(),
            });
        }
        OrientedPlane::from_spanning(&m)
    }

    pub fn dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn p(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn column(&self, a: usize) -> VectorN {
        self.frame.column(a).clone_owned()
    }

    /// The plane with the opposite orientation (first column negated).
    pub fn reversed(&self) -> Self {
        let mut f = self.frame.clone();
        if f.ncols() > 0 {
            f.column_mut(0).neg_mut();
        }
        OrientedPlane { frame: f }
    }

    /// `g . xi` for an orthogonal matrix `g`.
    pub fn transformed(&self, g: &DMatrix<f64>) -> Result<Self> {
        OrientedPlane::from_spanning(&(g * &self.frame))
    }

    /// Full orthonormal frame `[e_1 .. e_p | v_{p+1} .. v_n]` adapted to the plane.
    pub fn adapted_frame(&self) -> DMatrix<f64> {
        linalg::complete_frame(&self.frame)
    }

    /// Orthonormal basis of the orthogonal complement, as columns.
    pub fn normal_frame(&self) -> DMatrix<f64> {
        let f = self.adapted_frame();
        f.columns(self.p(), self.dim() - self.p()).clone_owned()
    }

    /// The complement `xi^perp` oriented so that `(xi, xi^perp)` is positive.
    pub fn orthogonal_complement(&self) -> Self {
        let mut f = self.adapted_frame();
        if f.determinant() < 0.0 && f.ncols() > self.p() {
            f.column_mut(self.p()).neg_mut();
        }
        let comp = f.columns(self.p(), self.dim() - self.p()).clone_owned();
        OrientedPlane { frame: comp }
    }

    /// First `k` columns, the k-th member of the flag of the frame.
    pub fn prefix(&self, k: usize) -> Self {
        OrientedPlane {
            frame: self.frame.columns(0, k).clone_owned(),
        }
    }

    /// The unit decomposable p-vector, as an element of the p-th exterior power
    /// (coefficients on `e_I`, stored in an [`AltForm`] with the metric
    /// identification).
    pub fn multivector(&self) -> AltForm {
        let cols: Vec<AltForm> = (0..self.p()).map(|a| AltForm::from_vector(&self.column(a))).collect();
        let mut acc = AltForm::scalar(self.dim(), 1.0);
        for c in &cols {
            acc = acc.wedge(c).expect("same dimension");
        }
        acc
    }

    pub(crate) fn to_columns(&self) -> Vec<Vec<f64>> {
        (0..self.p())
            .map(|a| self.frame.column(a).iter().copied().collect())
            .collect()
    }
}

/// JSON form of a plane: `{"n": 7, "p": 3, "frame": [[col1], [col2], ...]}`
/// with frame columns listed in order (column-major).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PlaneJson {
    pub n: usize,
    pub p: usize,
    pub frame: Vec<Vec<f64>>,
}

impl From<&OrientedPlane> for PlaneJson {
    fn from(xi: &OrientedPlane) -> Self {
        PlaneJson {
            n: xi.dim(),
            p: xi.p(),
            frame: xi.to_columns(),
        }
    }
}

impl PlaneJson {
    /// Raw frame matrix, checked for shape only.
    pub fn matrix(&self) -> Result<DMatrix<f64>> {
        if self.frame.len() != self.p {
            return Err(Error::WrongArgumentCount {
                expected: self.p,
                found: self.frame.len(),
            });
        }
        for c in &self.frame {
            if c.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: c.len(),
                });
            }
        }
        Ok(DMatrix::from_fn(self.n, self.p, |i, j| self.frame[j][i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_plane_and_reversal() {
        let xi = OrientedPlane::coordinate(5, &[0, 2]).unwrap();
        let mv = xi.multivector();
        assert_eq!(mv.coeff(&[0, 2]), 1.0);
        assert_eq!(xi.reversed().multivector().coeff(&[0, 2]), -1.0);
    }

    #[test]
    fn rejects_non_orthonormal() {
        let m = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(OrientedPlane::new(m.clone()), Err(Error::NotOrthonormal(_))));
        assert!(OrientedPlane::from_spanning(&m).is_ok());
    }

    #[test]
    fn complement_is_positively_oriented() {
        let xi = OrientedPlane::from_spanning(&DMatrix::from_column_slice(
            4,
            2,
            &[1.0, 2.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0],
        ))
        .unwrap();
        let perp = xi.orthogonal_complement();
        let mut full = DMatrix::zeros(4, 4);
        full.columns_mut(0, 2).copy_from(xi.frame());
        full.columns_mut(2, 2).copy_from(perp.frame());
        assert!((full.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_shape_checked() {
        let j = PlaneJson {
            n: 3,
            p: 1,
            frame: vec![vec![1.0, 0.0]],
        };
        assert!(j.matrix().is_err());
    }
}
