//! Model presets: the four cubic perturbations of the isotropic oscillator.

use std::fmt;
use std::str::FromStr;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{int, rat, ExactRational};

/// Exponent multi-index; entries beyond the model dimension stay zero.
pub type Exponents = [u16; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelId {
    /// p² + x² + i g x³
    #[serde(rename = "c1d")]
    Cubic1d,
    /// p_x² + p_y² + x² + y² + i g x y²
    #[serde(rename = "xy2")]
    Xy2,
    /// three oscillators coupled by i g x y z
    #[serde(rename = "xyz")]
    Xyz,
    /// x² + y² + i g (x y² − x³/3)
    #[serde(rename = "hh")]
    HenonHeiles,
}

impl ModelId {
    pub const ALL: [ModelId; 4] = [ModelId::Cubic1d, ModelId::Xy2, ModelId::Xyz, ModelId::HenonHeiles];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Cubic1d => "c1d",
            ModelId::Xy2 => "xy2",
            ModelId::Xyz => "xyz",
            ModelId::HenonHeiles => "hh",
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            ModelId::Cubic1d => 1,
            ModelId::Xy2 | ModelId::HenonHeiles => 2,
            ModelId::Xyz => 3,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c1d" | "cubic_1d" | "cubic1d" | "1d" => Ok(ModelId::Cubic1d),
            "xy2" | "xy2_2d" | "2d" => Ok(ModelId::Xy2),
            "xyz" | "xyz_3d" | "3d" => Ok(ModelId::Xyz),
            "hh" | "henon_heiles_2d" | "henon-heiles" => Ok(ModelId::HenonHeiles),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

/// One monomial `coefficient · x^e₀ y^e₁ z^e₂` of the real cubic W.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coefficient: ExactRational,
    pub exponents: Exponents,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().map(|&e| e as u32).sum()
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        let mut value = crate::rational::to_f64(&self.coefficient);
        for (x, &e) in point.iter().zip(self.exponents.iter()) {
            value *= x.powi(e as i32);
        }
        value
    }
}

/// A model: `H = Σ (pᵢ² + xᵢ²) + i g W(x)` with W a real homogeneous cubic.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub id: ModelId,
    pub dimension: usize,
    pub unperturbed_energy: ExactRational,
    pub perturbation: Vec<Monomial>,
}

pub fn build_model(id: ModelId) -> ModelSpec {
    let terms: Vec<(ExactRational, Exponents)> = match id {
        ModelId::Cubic1d => vec![(int(1), [3, 0, 0])],
        ModelId::Xy2 => vec![(int(1), [1, 2, 0])],
        ModelId::Xyz => vec![(int(1), [1, 1, 1])],
        ModelId::HenonHeiles => vec![(int(1), [1, 2, 0]), (rat(-1, 3), [3, 0, 0])],
    };
    let dimension = id.dimension();
    let preset = ModelSpec {
        id,
        dimension,
        unperturbed_energy: int(dimension as i64),
        perturbation: terms.into_iter().map(|(coefficient, exponents)| Monomial { coefficient, exponents }).collect(),
    };
    debug_assert!(preset.validate().is_ok());
    preset
}

/// Parse a model id string and build the preset.
pub fn build_model_named(name: &str) -> Result<ModelSpec> {
    Ok(build_model(name.parse()?))
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::InvalidArgument(format!("dimension {} not in 1..=3", self.dimension)));
        }
        if self.unperturbed_energy != int(self.dimension as i64) {
            return Err(Error::InvalidArgument("unperturbed energy must equal the dimension".into()));
        }
        if self.perturbation.is_empty() {
            return Err(Error::InvalidArgument("empty perturbation".into()));
        }
        for term in &self.perturbation {
            if term.degree() != 3 {
                return Err(Error::InvalidArgument(format!("monomial {:?} is not cubic", term.exponents)));
            }
            if term.exponents[self.dimension..].iter().any(|&e| e != 0) {
                return Err(Error::InvalidArgument(format!(
                    "monomial {:?} uses a coordinate beyond dimension {}",
                    term.exponents, self.dimension
                )));
            }
            if term.coefficient.is_zero() {
                return Err(Error::InvalidArgument("zero coefficient in perturbation".into()));
            }
        }
        if self.parity_signature().is_none() {
            return Err(Error::InvalidArgument("monomials have mixed coordinate parities".into()));
        }
        Ok(())
    }

    /// Per-coordinate parity shared by every monomial of W, if they agree.
    ///
    /// Order-n wavefunction coefficients can be non-zero only on multi-indices
    /// congruent to n·signature mod 2.
    pub fn parity_signature(&self) -> Option<[u16; 3]> {
        let mut iter = self.perturbation.iter().map(|t| t.exponents.map(|e| e % 2));
        let first = iter.next()?;
        iter.all(|p| p == first).then_some(first)
    }

    /// W evaluated at a real point (only the first `dimension` coordinates are read).
    pub fn cubic(&self, point: &[f64]) -> f64 {
        self.perturbation.iter().map(|t| t.eval(point)).sum()
    }

    /// Σxᵢ² − g·W: the real potential obtained by replacing g with i·g.
    pub fn escape_potential(&self, g: f64, point: &[f64]) -> f64 {
        let r2: f64 = point.iter().take(self.dimension).map(|x| x * x).sum();
        r2 - g * self.cubic(point)
    }

    pub fn describe_perturbation(&self) -> String {
        const NAMES: [&str; 3] = ["x", "y", "z"];
        let mut out = String::new();
        for (i, term) in self.perturbation.iter().enumerate() {
            let c = &term.coefficient;
            if i > 0 {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                out.push('-');
            }
            let mag = c.abs();
            if !mag.is_one() {
                out.push_str(&format!("({})", crate::rational::to_fraction_string(&mag)));
            }
            for (name, &e) in NAMES.iter().zip(term.exponents.iter()) {
                match e {
                    0 => {}
                    1 => out.push_str(name),
                    _ => out.push_str(&format!("{name}^{e}")),
                }
            }
        }
        out
    }
}
