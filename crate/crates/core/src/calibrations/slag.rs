//! Special Lagrangian forms on C^m with interleaved real coordinates
//! `(x1, y1, ..., xm, ym)`.

use crate::critical::FormModule;
use crate::error::{Error, Result};
use crate::exterior::AltForm;

/// A complex-valued form as a (real, imaginary) pair.
#[derive(Clone, Debug)]
struct ComplexForm {
    re: AltForm,
    im: AltForm,
}

impl ComplexForm {
    fn one(n: usize) -> Self {
        ComplexForm {
            re: AltForm::scalar(n, 1.0),
            im: AltForm::zero(n, 0),
        }
    }

    /// `dz^j = dx^j + i dy^j`.
    fn dz(n: usize, j: usize) -> Self {
        ComplexForm {
            re: AltForm::basis(n, &[2 * j]).expect("index in range"),
            im: AltForm::basis(n, &[2 * j + 1]).expect("index in range"),
        }
    }

    fn wedge(&self, other: &ComplexForm) -> ComplexForm {
        let w = |a: &AltForm, b: &AltForm| a.wedge(b).expect("same dimension");
        ComplexForm {
            re: &w(&self.re, &other.re) - &w(&self.im, &other.im),
            im: &w(&self.re, &other.im) + &w(&self.im, &other.re),
        }
    }

    fn rotate(&self, theta: f64) -> ComplexForm {
        let (s, c) = theta.sin_cos();
        ComplexForm {
            re: &(c * &self.re) - &(s * &self.im),
            im: &(s * &self.re) + &(c * &self.im),
        }
    }
}

/// The special Lagrangian package at one phase.
#[derive(Clone, Debug)]
pub struct SpecialLagrangian {
    pub m: usize,
    pub phase: f64,
    /// `Re(e^{i theta} Upsilon)`.
    pub calib: AltForm,
    /// Kahler form `sum dx^j ^ dy^j`.
    pub sigma: AltForm,
    /// `Im(e^{i theta} Upsilon)`.
    pub im_upsilon: AltForm,
    /// `span{Re dz^J ^ sigma, Im dz^J ^ sigma : |J| = m - 2}`.
    pub phi_w: FormModule,
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    crate::exterior::canonical_masks(m, k)
        .into_iter()
        .map(|mask| (0..m).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

pub fn special_lagrangian(m: usize, phase: f64) -> Result<SpecialLagrangian> {
    if !(2..=4).contains(&m) {
        return Err(Error::OutOfRange(format!(
            "special Lagrangian needs 2 <= m <= 4, got {m}"
        )));
    }
    let n = 2 * m;
    let dz_product = |js: &[usize]| {
        js.iter()
            .fold(ComplexForm::one(n), |acc, &j| acc.wedge(&ComplexForm::dz(n, j)))
    };
    let upsilon = dz_product(&(0..m).collect::<Vec<_>>()).rotate(phase);
    let sigma = (0..m).fold(AltForm::zero(n, 2), |acc, j| {
        &acc + &AltForm::basis(n, &[2 * j, 2 * j + 1]).expect("index in range")
    });
    let mut gens = Vec::new();
    for js in subsets(m, m - 2) {
        let z = dz_product(&js);
        gens.push(z.re.wedge(&sigma)?);
        gens.push(z.im.wedge(&sigma)?);
    }
    let phi_w = FormModule::span(n, m, &gens)?;
    Ok(SpecialLagrangian {
        m,
        phase,
        calib: upsilon.re,
        sigma,
        im_upsilon: upsilon.im,
        phi_w,
    })
}
