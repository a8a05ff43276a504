//! Real 16-dimensional pinor model of `Cl(8)` and squared spinors.
//!
//! Generators are Kronecker products of the 2x2 matrices `I`, `X`, `Z` and
//! `E = [[0, 1], [-1, 0]]`. With the Euclidean pairing on `R^16` the degree-k
//! coefficient of `x o y` is `<y, gamma_I x>`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::critical::{phi_module, FormModule, RANK_CUTOFF};
use crate::error::{Error, Result};
use crate::exterior::{canonical_masks, indices_of, AltForm};
use crate::linalg;

const GENERATOR_WORDS: [&str; 8] = ["IIIX", "IIIZ", "IIEE", "IEXE", "XEZE", "ZEZE", "EIZE", "EXXE"];

/// Tolerance for unit and chirality checks on input spinors.
pub const SPINOR_TOL: f64 = 1e-10;

fn pauli(c: char) -> DMatrix<f64> {
    match c {
        'I' => DMatrix::identity(2, 2),
        'X' => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        'Z' => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        'E' => DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        _ => unreachable!("generator words use I, X, Z, E"),
    }
}

fn word_matrix(word: &str) -> DMatrix<f64> {
    word.chars()
        .fold(DMatrix::identity(1, 1), |acc, c| acc.kronecker(&pauli(c)))
}

#[derive(Clone, Debug)]
pub struct CliffordModel {
    gamma: Vec<DMatrix<f64>>,
    volume: DMatrix<f64>,
    plus: DMatrix<f64>,
    minus: DMatrix<f64>,
}

pub fn build_clifford() -> CliffordModel {
    let gamma: Vec<DMatrix<f64>> = GENERATOR_WORDS.iter().map(|w| word_matrix(w)).collect();
    let volume = gamma.iter().fold(DMatrix::identity(16, 16), |acc, g| acc * g);
    let id = DMatrix::<f64>::identity(16, 16);
    let plus = linalg::column_space(&((&id + &volume) * 0.5), RANK_CUTOFF);
    let minus = linalg::column_space(&((&id - &volume) * 0.5), RANK_CUTOFF);
    CliffordModel {
        gamma,
        volume,
        plus,
        minus,
    }
}

impl CliffordModel {
    pub fn gamma(&self, i: usize) -> &DMatrix<f64> {
        &self.gamma[i]
    }

    /// `gamma_1 ... gamma_8`.
    pub fn volume_element(&self) -> &DMatrix<f64> {
        &self.volume
    }

    /// Orthonormal basis of the +1 eigenspace of the volume element.
    pub fn positive_spinors(&self) -> &DMatrix<f64> {
        &self.plus
    }

    pub fn negative_spinors(&self) -> &DMatrix<f64> {
        &self.minus
    }

    /// `max |gamma_i gamma_j + gamma_j gamma_i - 2 delta_ij|`.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..8 {
            for j in 0..8 {
                let mut m = &self.gamma[i] * &self.gamma[j] + &self.gamma[j] * &self.gamma[i];
                if i == j {
                    m -= DMatrix::identity(16, 16) * 2.0;
                }
                worst = worst.max(m.amax());
            }
        }
        worst
    }

    /// `max |gamma_i^T - gamma_i|`: all generators are symmetric in this model.
    pub fn symmetry_defect(&self) -> f64 {
        self.gamma
            .iter()
            .map(|g| (g.transpose() - g).amax())
            .fold(0.0, f64::max)
    }

    /// `gamma_{i1} ... gamma_{ik}` for a 0-based multi-index.
    pub fn product(&self, indices: &[usize]) -> DMatrix<f64> {
        indices
            .iter()
            .fold(DMatrix::identity(16, 16), |acc, &i| acc * &self.gamma[i])
    }

    fn check_positive(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != 16 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                found: x.len(),
            });
        }
        let norm = x.norm();
        if (norm - 1.0).abs() > SPINOR_TOL {
            return Err(Error::NotUnit(norm));
        }
        let off = (x - &self.volume * x).norm() * 0.5;
        if off > SPINOR_TOL {
            return Err(Error::NotPositiveSpinor(off));
        }
        Ok(())
    }

    /// Degree-k form with coefficients `<y, gamma_I x>`.
    pub fn pairing_form(&self, x: &DVector<f64>, y: &DVector<f64>, k: usize) -> AltForm {
        let values: Vec<f64> = canonical_masks(8, k)
            .into_iter()
            .map(|mask| {
                let idx: Vec<usize> = indices_of(mask).collect();
                y.dot(&(self.product(&idx) * x))
            })
            .collect();
        AltForm::from_dense(8, k, &values)
    }

    /// Degree-k component of the squared spinor of a unit positive spinor.
    pub fn spinor_square(&self, x: &DVector<f64>, k: usize) -> Result<AltForm> {
        self.check_positive(x)?;
        if k > 8 {
            return Err(Error::OutOfRange(format!("degree {k} exceeds 8")));
        }
        Ok(self.pairing_form(x, x, k))
    }

    /// Orthonormal completion `x_1, ..., x_7` of `x` inside the positive spinors.
    pub fn complete_spinor(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_positive(x)?;
        let proj = &self.plus - x * (x.transpose() * &self.plus);
        Ok(linalg::column_space(&proj, RANK_CUTOFF))
    }

    /// Unit positive spinor from coordinates in the positive-spinor basis.
    pub fn positive_spinor(&self, coords: &[f64]) -> Result<DVector<f64>> {
        if coords.len() != 8 {
            return Err(Error::DimensionMismatch {
                expected: 8,
                found: coords.len(),
            });
        }
        let v = &self.plus * DVector::from_column_slice(coords);
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::NotUnit(0.0));
        }
        Ok(v / n)
    }
}

/// The seven 4-forms `Psi_j = <x_j, gamma_I x>` for an orthonormal
/// completion of `x` in the positive spinors, and their span.
pub fn psi_forms(model: &CliffordModel, x: &DVector<f64>) -> Result<(Vec<AltForm>, FormModule)> {
    let rest = model.complete_spinor(x)?;
    let psis: Vec<AltForm> = (0..rest.ncols())
        .map(|j| model.pairing_form(x, &rest.column(j).clone_owned(), 4))
        .collect();
    let span = FormModule::span(8, 4, &psis)?;
    Ok((psis, span))
}

/// Summary of the squared-spinor checks.
#[derive(Clone, Debug, Serialize)]
pub struct SpinorReport {
    pub component_norms: Vec<f64>,
    pub phi0: f64,
    pub top_minus_vol: f64,
    pub n_psi: usize,
    pub span_distance: f64,
    pub gamma_vs_two_psi: f64,
    pub self_dual_defect: f64,
    pub dim_phi: usize,
}

impl SpinorReport {
    /// Runs every check for the unit positive spinor `x`.
    pub fn compute(model: &CliffordModel, x: &DVector<f64>) -> Result<Self> {
        let comps: Vec<AltForm> = (0..=8).map(|k| model.spinor_square(x, k)).collect::<Result<_>>()?;
        let (psis, span) = psi_forms(model, x)?;
        let phi4 = &comps[4];
        let module = phi_module(phi4);
        let rest = model.complete_spinor(x)?;
        let mut gamma_vs_two_psi: f64 = 0.0;
        for (j, psi) in psis.iter().enumerate() {
            let xj = rest.column(j).clone_owned();
            // degree-4 part of x_j o x + x o x_j
            let sym = &model.pairing_form(x, &xj, 4) + &model.pairing_form(&xj, x, 4);
            gamma_vs_two_psi = gamma_vs_two_psi.max(sym.max_abs_diff(&(2.0 * psi))?);
        }
        Ok(SpinorReport {
            component_norms: comps.iter().map(|c| c.norm()).collect(),
            phi0: comps[0].coeff(&[]),
            top_minus_vol: comps[8].max_abs_diff(&AltForm::volume(8))?,
            n_psi: psis.len(),
            span_distance: span.distance(&module)?,
            gamma_vs_two_psi,
            self_dual_defect: phi4.hodge_star().max_abs_diff(phi4)?,
            dim_phi: module.rank(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_relations() {
        let c = build_clifford();
        assert!(c.clifford_defect() < 1e-12);
        assert_eq!(c.symmetry_defect(), 0.0);
        let w = c.volume_element();
        assert!((w * w - DMatrix::<f64>::identity(16, 16)).amax() < 1e-12);
        assert_eq!(c.positive_spinors().ncols(), 8);
        assert_eq!(c.negative_spinors().ncols(), 8);
    }

    #[test]
    fn rejects_bad_spinors() {
        let c = build_clifford();
        let x = c.positive_spinor(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(c.spinor_square(&(&x * 2.0), 4), Err(Error::NotUnit(_))));
        let y = c.negative_spinors().column(0).clone_owned();
        assert!(matches!(c.spinor_square(&y, 4), Err(Error::NotPositiveSpinor(_))));
    }

    #[test]
    fn square_components() {
        let c = build_clifford();
        let x = c.positive_spinor(&[0.3, -0.1, 0.7, 0.2, 0.0, 0.5, -0.4, 0.1]).unwrap();
        let r = SpinorReport::compute(&c, &x).unwrap();
        assert!((r.phi0 - 1.0).abs() < 1e-12);
        assert!(r.top_minus_vol < 1e-12);
        for k in [1, 2, 3, 5, 6, 7] {
            assert!(r.component_norms[k] < 1e-10, "k = {k}");
        }
        assert_eq!(r.n_psi, 7);
        assert_eq!(r.dim_phi, 7);
        assert!(r.span_distance < 1e-9);
        assert!(r.gamma_vs_two_psi < 1e-10);
        assert!(r.self_dual_defect < 1e-12);
    }
}
