//! Large-order diagnostics: cₙ against K(−1)ⁿ⁺¹Bⁿ⁺¹ᐟ²Γ(n+½).
//!
//! Everything up to the final scaling is done on exact rationals. With
//! Γ(n+½) = √π·∏ₖ₌₁ⁿ(k−½), the ratio splits as
//!
//! ```text
//! cₙ / [K(−1)ⁿ⁺¹Bⁿ⁺¹ᐟ²Γ(n+½)] = qₙ / (K√(πB)),   qₙ = (−1)ⁿ⁺¹cₙ / (Bⁿ ∏ₖ(k−½))
//! ```
//!
//! and Richardson extrapolation, being linear, is applied to qₙ exactly.

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::ModelId;
use crate::rational::{rat, to_f64, ExactRational};
use crate::series::EnergySeries;

#[derive(Debug, Clone, PartialEq)]
pub struct LargeOrderLaw {
    pub model: ModelId,
    pub amplitude: f64,
    pub base: ExactRational,
}

/// B for each model: the inverse of the leading tunneling exponent coefficient.
pub fn law_base(model: ModelId) -> ExactRational {
    match model {
        ModelId::Cubic1d => rat(15, 8),
        ModelId::Xy2 => rat(5, 18),
        ModelId::Xyz => rat(5, 72),
        ModelId::HenonHeiles => rat(5, 24),
    }
}

/// cosh(π√23/2), shared by the 2D and 3D amplitudes.
pub fn cosh_half_pi_sqrt23() -> f64 {
    (std::f64::consts::PI * 23f64.sqrt() / 2.0).cosh()
}

/// Closed-form amplitude where one is known (not for Hénon–Heiles).
pub fn closed_form_amplitude(model: ModelId) -> Option<f64> {
    let pi = std::f64::consts::PI;
    match model {
        ModelId::Cubic1d => Some(4.0 / pi.powf(1.5)),
        ModelId::Xy2 => Some(72.0 * 2f64.sqrt() / (pi * cosh_half_pi_sqrt23().sqrt())),
        ModelId::Xyz => Some(1152.0 * 3f64.sqrt() / (pi.sqrt() * cosh_half_pi_sqrt23())),
        ModelId::HenonHeiles => None,
    }
}

impl LargeOrderLaw {
    pub fn new(model: ModelId, amplitude: f64, base: ExactRational) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::InvalidArgument(format!("amplitude {amplitude} must be positive")));
        }
        if !base.is_positive() {
            return Err(Error::InvalidArgument("base must be positive".into()));
        }
        Ok(LargeOrderLaw { model, amplitude, base })
    }

    /// The closed-form law for 1D, 2D and 3D.
    pub fn closed_form(model: ModelId) -> Result<Self> {
        let amplitude = closed_form_amplitude(model).ok_or_else(|| {
            Error::InvalidArgument(format!("no closed-form amplitude for {model}; fit it from the series"))
        })?;
        Self::new(model, amplitude, law_base(model))
    }

    /// Amplitude fitted from the series by Richardson extrapolation.
    pub fn fitted(series: &EnergySeries, k: usize) -> Result<Self> {
        let base = law_base(series.model);
        let amplitude = fit_amplitude(series, &base, k)?;
        Self::new(series.model, amplitude, base)
    }

    /// ln |K Bⁿ⁺¹ᐟ² Γ(n+½)|
    pub fn ln_magnitude(&self, n: usize) -> f64 {
        let b = to_f64(&self.base);
        self.amplitude.ln() + (n as f64 + 0.5) * b.ln() + ln_gamma_half_integer(n)
    }
}

/// ln Γ(n + ½) = ln √π + Σₖ ln(k − ½)
fn ln_gamma_half_integer(n: usize) -> f64 {
    0.5 * std::f64::consts::PI.ln() + (1..=n).map(|k| (k as f64 - 0.5).ln()).sum::<f64>()
}

/// qₙ = (−1)ⁿ⁺¹cₙ / (Bⁿ ∏ₖ₌₁ⁿ(k−½)) for n = 1..=N, exact.
pub fn normalized_coefficients(series: &EnergySeries, base: &ExactRational) -> Vec<(usize, ExactRational)> {
    let mut scale = BigRational::one();
    let half = rat(1, 2);
    series
        .coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| {
            scale = &scale * base * (BigRational::from_integer(BigInt::from(n)) - &half);
            let signed = if n % 2 == 1 { c.clone() } else { -c.clone() };
            (n, signed / &scale)
        })
        .collect()
}

fn check_model(series: &EnergySeries, law: &LargeOrderLaw) -> Result<()> {
    if series.model != law.model {
        return Err(Error::ModelMismatch { law: law.model.to_string(), series: series.model.to_string() });
    }
    Ok(())
}

/// 1/(K√(πB))
fn ratio_scale(law: &LargeOrderLaw) -> f64 {
    1.0 / (law.amplitude * (std::f64::consts::PI * to_f64(&law.base)).sqrt())
}

/// (n, rₙ) with rₙ = cₙ / [K(−1)ⁿ⁺¹Bⁿ⁺¹ᐟ²Γ(n+½)], n ≥ 1.
pub fn ratio_to_asymptote(series: &EnergySeries, law: &LargeOrderLaw) -> Result<Vec<(usize, f64)>> {
    check_model(series, law)?;
    let scale = ratio_scale(law);
    Ok(normalized_coefficients(series, &law.base).into_iter().map(|(n, q)| (n, to_f64(&q) * scale)).collect())
}

/// Weights of the k-th order extrapolant on the points `ns` (k = ns.len() − 1):
/// Lagrange interpolation in 1/n evaluated at 1/n = 0, wⱼ = ∏_{i≠j} nⱼ/(nⱼ − nᵢ).
fn richardson_weights(ns: &[usize]) -> Result<Vec<ExactRational>> {
    ns.iter()
        .enumerate()
        .map(|(j, &nj)| {
            let mut w = BigRational::one();
            for (i, &ni) in ns.iter().enumerate() {
                if i == j {
                    continue;
                }
                if ni == nj {
                    return Err(Error::InvalidArgument(format!("repeated index n = {ni}")));
                }
                w *= BigRational::new(BigInt::from(nj), BigInt::from(nj as i64 - ni as i64));
            }
            Ok(w)
        })
        .collect()
}

fn tail<T>(seq: &[T], k: usize) -> Result<&[T]> {
    if seq.len() < k + 1 {
        return Err(Error::InsufficientData(format!(
            "Richardson order {k} needs {} points, have {}",
            k + 1,
            seq.len()
        )));
    }
    Ok(&seq[seq.len() - k - 1..])
}

/// k-th order Richardson extrapolant of the last k+1 entries, removing
/// corrections in 1/n, …, 1/nᵏ.
pub fn richardson(seq: &[(usize, f64)], k: usize) -> Result<f64> {
    let points = tail(seq, k)?;
    let ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    let weights = richardson_weights(&ns)?;
    Ok(points.iter().zip(&weights).map(|((_, v), w)| v * to_f64(w)).sum())
}

/// Exact variant of [`richardson`].
pub fn richardson_exact(seq: &[(usize, ExactRational)], k: usize) -> Result<ExactRational> {
    let points = tail(seq, k)?;
    let ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    let weights = richardson_weights(&ns)?;
    Ok(points.iter().zip(&weights).fold(BigRational::zero(), |acc, ((_, v), w)| acc + v * w))
}

/// Richardson-accelerated K = lim (−1)ⁿ⁺¹cₙ B^{−n−½}/Γ(n+½).
pub fn fit_amplitude(series: &EnergySeries, base: &ExactRational, k: usize) -> Result<f64> {
    if let Some(&n) = series.alternation_violations().first() {
        return Err(Error::NonAlternating(format!("c_{n} breaks the (−1)ⁿ⁺¹ sign pattern")));
    }
    let q = normalized_coefficients(series, base);
    let extrapolated = richardson_exact(&q, k)?;
    Ok(to_f64(&extrapolated) / (std::f64::consts::PI * to_f64(base)).sqrt())
}

/// One row of the ratio/Richardson table.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub n: usize,
    pub ratio: f64,
    /// Entry k−1 is the order-k extrapolant of the sequence ending at n.
    pub richardson: Vec<Option<f64>>,
}

pub fn ratio_table(series: &EnergySeries, law: &LargeOrderLaw, max_k: usize) -> Result<Vec<RatioRow>> {
    check_model(series, law)?;
    let scale = ratio_scale(law);
    let q = normalized_coefficients(series, &law.base);
    (0..q.len())
        .map(|end| {
            let prefix = &q[..=end];
            let richardson = (1..=max_k)
                .map(|k| {
                    if prefix.len() > k {
                        richardson_exact(prefix, k).map(|r| Some(to_f64(&r) * scale))
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<_>>()?;
            Ok(RatioRow { n: q[end].0, ratio: to_f64(&q[end].1) * scale, richardson })
        })
        .collect()
}
