//! Summation and asymptotic analysis of the divergent energy series.

pub mod large_order;
pub mod pade;

pub use large_order::{
    closed_form_amplitude, fit_amplitude, law_base, normalized_coefficients, ratio_table, ratio_to_asymptote,
    richardson, richardson_exact, LargeOrderLaw, RatioRow,
};
pub use pade::{energy_curve, once_subtract, pade, CurvePoint, EnergyCurve, PadeApproximant, PadeForm};
