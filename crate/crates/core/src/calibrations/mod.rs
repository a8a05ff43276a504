//! Constructors for the standard calibrations.
//!
//! Index conventions are 0-based here; the text format is 1-based.

mod clifford;
mod lie;
mod slag;

pub use clifford::{build_clifford, psi_forms, CliffordModel, SpinorReport};
pub use lie::{cartan_three_form, LieAlgebraData};
pub use slag::{special_lagrangian, SpecialLagrangian};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{AltForm, AltFormJson};

const ASSOCIATIVE_TERMS: [([usize; 3], f64); 7] = [
    ([0, 1, 2], 1.0),
    ([0, 3, 4], 1.0),
    ([0, 5, 6], 1.0),
    ([1, 3, 5], 1.0),
    ([1, 4, 6], -1.0),
    ([2, 3, 6], -1.0),
    ([2, 4, 5], -1.0),
];

const CAYLEY_TERMS: [([usize; 4], f64); 14] = [
    ([0, 1, 2, 3], 1.0),
    ([0, 1, 4, 5], 1.0),
    ([0, 1, 6, 7], 1.0),
    ([0, 2, 4, 6], 1.0),
    ([0, 2, 5, 7], -1.0),
    ([0, 3, 4, 7], -1.0),
    ([0, 3, 5, 6], -1.0),
    ([1, 2, 4, 7], -1.0),
    ([1, 2, 5, 6], -1.0),
    ([1, 3, 4, 6], -1.0),
    ([1, 3, 5, 7], 1.0),
    ([2, 3, 4, 5], 1.0),
    ([2, 3, 6, 7], 1.0),
    ([4, 5, 6, 7], 1.0),
];

/// `e123 + e145 + e167 + e246 - e257 - e347 - e356` on R^7.
pub fn associative_form() -> AltForm {
    AltForm::from_terms(7, 3, ASSOCIATIVE_TERMS.iter().map(|(i, c)| (i.to_vec(), *c))).expect("static table is valid")
}

/// `*phi` for the associative form.
pub fn coassociative_form() -> AltForm {
    associative_form().hodge_star()
}

/// Self-dual 4-form on R^8, `e^0 ^ phi + *phi` with the associative form on
/// the last seven coordinates.
pub fn cayley_form() -> AltForm {
    AltForm::from_terms(8, 4, CAYLEY_TERMS.iter().map(|(i, c)| (i.to_vec(), *c))).expect("static table is valid")
}

/// Which calibration to build, as read from JSON or the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CalibrationSpec {
    Associative,
    Coassociative,
    Cayley,
    SpecialLagrangian {
        m: usize,
        #[serde(default)]
        phase: f64,
    },
    Cartan {
        algebra: String,
    },
    Custom {
        form: AltFormJson,
    },
}

impl CalibrationSpec {
    pub fn family(&self) -> &'static str {
        match self {
            CalibrationSpec::Associative => "associative",
            CalibrationSpec::Coassociative => "coassociative",
            CalibrationSpec::Cayley => "cayley",
            CalibrationSpec::SpecialLagrangian { .. } => "special_lagrangian",
            CalibrationSpec::Cartan { .. } => "cartan",
            CalibrationSpec::Custom { .. } => "custom",
        }
    }

    /// `(n, p)` fixed by the family.
    pub fn shape(&self) -> Result<(usize, usize)> {
        Ok(match self {
            CalibrationSpec::Associative => (7, 3),
            CalibrationSpec::Coassociative => (7, 4),
            CalibrationSpec::Cayley => (8, 4),
            CalibrationSpec::SpecialLagrangian { m, .. } => (2 * m, *m),
            CalibrationSpec::Cartan { algebra } => {
                let k = su_rank(algebra)?;
                (k * k - 1, 3)
            }
            CalibrationSpec::Custom { form } => (form.n, form.p),
        })
    }

    pub fn build(&self) -> Result<AltForm> {
        match self {
            CalibrationSpec::Associative => Ok(associative_form()),
            CalibrationSpec::Coassociative => Ok(coassociative_form()),
            CalibrationSpec::Cayley => Ok(cayley_form()),
            CalibrationSpec::SpecialLagrangian { m, phase } => Ok(special_lagrangian(*m, *phase)?.calib),
            CalibrationSpec::Cartan { algebra } => cartan_three_form(&LieAlgebraData::su(su_rank(algebra)?)?),
            CalibrationSpec::Custom { form } => AltForm::try_from(form.clone()),
        }
    }
}

/// `"su3"` -> 3.
pub fn su_rank(name: &str) -> Result<usize> {
    let k = name
        .strip_prefix("su")
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| Error::InvalidLieAlgebra(format!("unknown algebra {name:?}; expected su2, su3 or su4")))?;
    if !(2..=4).contains(&k) {
        return Err(Error::InvalidLieAlgebra(format!("su({k}) is not supported")));
    }
    Ok(k)
}
