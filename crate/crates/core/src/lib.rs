pub mod analysis;
pub mod error;
pub mod io;
pub mod model;
pub mod precise;
pub mod rational;
pub mod series;
pub mod special;
pub mod spectral;
pub mod wkb;

pub use error::{Error, Result};
pub use model::{build_model, ModelId, ModelSpec};
pub use rational::ExactRational;
pub use series::{compute_wavefunction_coefficients, energy_series, CoefficientTensor, EnergySeries};
