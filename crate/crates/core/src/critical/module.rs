//! The map `P: so(n) -> Lambda^p`, `theta -> theta.phi`, and its image.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{AltForm, AltFormJson, SkewMap};
use crate::linalg;
use crate::plane::OrientedPlane;

/// Relative singular-value cutoff for module ranks and subspace work.
pub const RANK_CUTOFF: f64 = 1e-9;

/// A subspace of degree-p forms held as an orthonormal basis.
#[derive(Clone, Debug)]
pub struct FormModule {
    dim_n: usize,
    degree: usize,
    basis: Vec<AltForm>,
}

impl FormModule {
    /// Orthonormalizes the span of `generators` (relative cutoff
    /// [`RANK_CUTOFF`]).
    pub fn span(dim_n: usize, degree: usize, generators: &[AltForm]) -> Result<Self> {
        for g in generators {
            if g.dim() != dim_n {
                return Err(Error::DimensionMismatch {
                    expected: dim_n,
                    found: g.dim(),
                });
            }
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let rows = linalg::binomial(dim_n, degree);
        let mut m = DMatrix::zeros(rows, generators.len());
        for (j, g) in generators.iter().enumerate() {
            for (i, v) in g.to_dense().into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(Self::from_columns(dim_n, degree, &m))
    }

    fn from_columns(dim_n: usize, degree: usize, m: &DMatrix<f64>) -> Self {
        let q = linalg::column_space(m, RANK_CUTOFF);
        let basis = (0..q.ncols())
            .map(|j| AltForm::from_dense(dim_n, degree, q.column(j).as_slice()))
            .collect();
        FormModule { dim_n, degree, basis }
    }

    pub fn zero(dim_n: usize, degree: usize) -> Self {
        FormModule {
            dim_n,
            degree,
            basis: Vec::new(),
        }
    }

    pub fn dim_n(&self) -> usize {
        self.dim_n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[AltForm] {
        &self.basis
    }

    /// Dense basis matrix, one column per basis form.
    pub fn matrix(&self) -> DMatrix<f64> {
        let rows = linalg::binomial(self.dim_n, self.degree);
        let mut m = DMatrix::zeros(rows, self.rank());
        for (j, g) in self.basis.iter().enumerate() {
            for (i, v) in g.to_dense().into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        linalg::orthonormality_defect(&self.matrix())
    }

    /// Projector distance between two modules (1 if their ranks differ).
    pub fn distance(&self, other: &FormModule) -> Result<f64> {
        if self.dim_n != other.dim_n {
            return Err(Error::DimensionMismatch {
                expected: self.dim_n,
                found: other.dim_n,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(linalg::subspace_distance(&self.matrix(), &other.matrix()))
    }

    /// Direct sum (span of the union of bases).
    pub fn sum(&self, other: &FormModule) -> Result<FormModule> {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        FormModule::span(self.dim_n, self.degree, &gens)
    }

    pub fn hodge_star(&self) -> FormModule {
        let gens: Vec<AltForm> = self.basis.iter().map(|g| g.hodge_star()).collect();
        FormModule::span(self.dim_n, self.dim_n - self.degree, &gens).expect("consistent shapes")
    }

    /// Image under an orthogonal map.
    pub fn transform(&self, g: &DMatrix<f64>) -> Result<FormModule> {
        let gens: Vec<AltForm> = self.basis.iter().map(|b| b.transform(g)).collect::<Result<_>>()?;
        FormModule::span(self.dim_n, self.degree, &gens)
    }

    /// Values `gamma(xi)` over the basis.
    pub fn values_on(&self, xi: &OrientedPlane) -> Result<Vec<f64>> {
        if xi.dim() != self.dim_n {
            return Err(Error::DimensionMismatch {
                expected: self.dim_n,
                found: xi.dim(),
            });
        }
        if xi.p() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: xi.p(),
            });
        }
        self.basis.iter().map(|g| g.evaluate_frame(xi.frame())).collect()
    }

    pub fn to_json(&self) -> FormModuleJson {
        FormModuleJson {
            n: self.dim_n,
            p: self.degree,
            rank: self.rank(),
            basis: self.basis.iter().map(|b| b.pruned(1e-15).to_json()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FormModuleJson {
    pub n: usize,
    pub p: usize,
    pub rank: usize,
    pub basis: Vec<AltFormJson>,
}

/// `P(theta) = theta.phi`.
pub fn p_map(theta: &SkewMap, phi: &AltForm) -> Result<AltForm> {
    phi.so_action(theta)
}

/// Matrix of `P` in the generator basis of so(n): one column per `E_ij - E_ji`,
/// `i < j`, rows in canonical multi-index order.
pub fn p_matrix(phi: &AltForm) -> DMatrix<f64> {
    let n = phi.dim();
    let gens = SkewMap::generators(n);
    let rows = linalg::binomial(n, phi.degree());
    let mut m = DMatrix::zeros(rows, gens.len());
    for (j, g) in gens.iter().enumerate() {
        let img = phi.so_action(g).expect("generator has matching dimension");
        for (i, v) in img.to_dense().into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    m
}

/// `Phi = P(so(n))`, orthonormalized.
pub fn phi_module(phi: &AltForm) -> FormModule {
    if phi.dim() < 2 {
        return FormModule::zero(phi.dim(), phi.degree());
    }
    FormModule::from_columns(phi.dim(), phi.degree(), &p_matrix(phi))
}

/// `dim so(n) - rank P`.
pub fn stabilizer_dim(phi: &AltForm) -> usize {
    let n = phi.dim();
    n * (n - 1) / 2 - phi_module(phi).rank()
}

/// Orthonormal basis (in generator coordinates) of `ker P`, the Lie algebra of
/// the stabilizer of `phi`.
pub fn stabilizer_algebra(phi: &AltForm) -> Vec<SkewMap> {
    let n = phi.dim();
    if n < 2 {
        return Vec::new();
    }
    let ns = linalg::null_space(&p_matrix(phi), RANK_CUTOFF);
    (0..ns.ncols())
        .map(|j| SkewMap::from_coords(n, ns.column(j).as_slice()))
        .collect()
}

/// `max_gamma |gamma(xi)|` over the module basis. Zero iff `xi` lies in the
/// annihilator of the module.
pub fn annihilator_check(xi: &OrientedPlane, module: &FormModule) -> Result<f64> {
    Ok(module.values_on(xi)?.into_iter().fold(0.0, |m, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_form_is_fully_invariant() {
        let vol = AltForm::volume(5);
        assert_eq!(phi_module(&vol).rank(), 0);
        assert_eq!(stabilizer_dim(&vol), 10);
        for g in SkewMap::generators(5) {
            assert!(p_map(&g, &vol).unwrap().is_empty());
        }
    }

    #[test]
    fn simple_two_form_in_r4() {
        let f = AltForm::parse(4, "e12").unwrap();
        let m = phi_module(&f);
        assert_eq!(m.rank(), 4);
        assert_eq!(stabilizer_dim(&f), 2);
        assert!(m.gram_defect() < 1e-12);
    }

    #[test]
    fn zero_form_has_full_stabilizer() {
        let z = AltForm::zero(6, 3);
        assert_eq!(phi_module(&z).rank(), 0);
        assert_eq!(stabilizer_dim(&z), 15);
    }

    #[test]
    fn p_is_linear() {
        let phi = AltForm::parse(5, "e123 - 2*e245 + e135").unwrap();
        let a = SkewMap::generator(5, 0, 3).scale(0.7);
        let b = SkewMap::generator(5, 1, 4).scale(-1.3);
        let lhs = p_map(&(&a + &b), &phi).unwrap();
        let rhs = &p_map(&a, &phi).unwrap() + &p_map(&b, &phi).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-14));
    }

    #[test]
    fn empty_module_annihilates_everything() {
        let xi = OrientedPlane::coordinate(4, &[0, 1]).unwrap();
        assert_eq!(annihilator_check(&xi, &FormModule::zero(4, 2)).unwrap(), 0.0);
    }
}
