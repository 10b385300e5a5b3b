//! Complex Gamma function (Lanczos, g = 7, nine terms).

use num::complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Closest a pole may be approached before the result is rejected.
const POLE_GUARD: f64 = 1e-8;
/// |Im z| beyond which e^{−π|Im z|/2} decay underflows the useful range.
const MAX_ABS: f64 = 140.0;

/// Lanczos sum, valid for Re z ≥ ½.
fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut sum = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * sum
}

/// Γ(z) for complex z away from the poles 0, −1, −2, …
///
/// Arguments with Re z < ½ are shifted up with Γ(z) = Γ(z+m)/∏(z+k) rather
/// than reflected, so the reflection formula stays available as an
/// independent check.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() > MAX_ABS {
        return Err(Error::SpecialFunction(format!("Γ({z}) outside |z| ≤ {MAX_ABS}")));
    }
    if z.im.abs() < POLE_GUARD && z.re <= 0.0 && (z.re - z.re.round()).abs() < POLE_GUARD {
        return Err(Error::SpecialFunction(format!("Γ({z}) too close to a pole")));
    }
    let mut shifted = z;
    let mut product = Complex64::new(1.0, 0.0);
    while shifted.re < 0.5 {
        product *= shifted;
        shifted += 1.0;
    }
    Ok(lanczos(shifted) / product)
}

pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|z| z.re)
}

/// |Γ(z)Γ(1−z) sin(πz) − π| / π
pub fn reflection_residual(z: Complex64) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let lhs = gamma(z)? * gamma(Complex64::new(1.0, 0.0) - z)? * (z * pi).sin();
    Ok((lhs - pi).norm() / pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Stirling series at z + 20, shifted back; independent of the Lanczos fit.
    fn gamma_stirling(z: Complex64) -> Complex64 {
        let shift = 20;
        let w = z + shift as f64;
        let ln2pi = (2.0 * std::f64::consts::PI).ln();
        // B₂ₖ / (2k(2k−1)), k = 1..6
        let terms = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0, -691.0 / 360360.0];
        let mut series = Complex64::new(0.0, 0.0);
        let mut wp = w;
        let w2 = w * w;
        for t in terms {
            series += t / wp;
            wp *= w2;
        }
        let mut ln = (w - 0.5) * w.ln() - w + 0.5 * ln2pi + series;
        for k in 0..shift {
            ln -= (z + k as f64).ln();
        }
        ln.exp()
    }

    fn nu() -> Complex64 {
        Complex64::new(-0.5, 23f64.sqrt() / 2.0)
    }

    #[test]
    fn integers_and_half_integers() {
        assert!((gamma_real(5.0).unwrap() - 24.0).abs() < 1e-12);
        assert!((gamma_real(0.5).unwrap() - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma_real(-0.5).unwrap() + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn poles_rejected() {
        assert!(gamma(Complex64::new(0.0, 0.0)).is_err());
        assert!(gamma(Complex64::new(-3.0, 0.0)).is_err());
        assert!(gamma(Complex64::new(200.0, 0.0)).is_err());
        assert!(gamma(Complex64::new(-3.0, 1e-3)).is_ok());
    }

    #[test]
    fn matches_stirling_at_legendre_arguments() {
        let h = nu() / 2.0;
        for z in [h, h + 2.0, h - 0.5, h + 1.5, -h + 1.5, h.conj(), Complex64::new(0.2, 0.0)] {
            let a = gamma(z).unwrap();
            let b = gamma_stirling(z);
            assert!((a - b).norm() / b.norm() < 1e-13, "{z}: {a} vs {b}");
        }
    }

    #[test]
    fn reflection_at_legendre_arguments() {
        let h = nu() / 2.0;
        for z in [h, h + 2.0, h - 0.5, h + 1.5, -h + 1.5] {
            assert!(reflection_residual(z).unwrap() < 1e-13, "{z}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let z = Complex64::new(-0.25, 1.2);
        let a = gamma(z).unwrap();
        let b = gamma(z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-15 * a.norm());
    }
}
