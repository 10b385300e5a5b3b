//! Arbitrary-precision real evaluation for the handful of transcendental
//! constants that are reported beyond double precision.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, rat, ExactRational};

const RM: RoundingMode = RoundingMode::ToEven;
const GUARD_BITS: usize = 64;

/// Working context at a fixed decimal precision.
pub struct Precise {
    digits: usize,
    bits: usize,
    consts: Consts,
}

impl Precise {
    pub fn with_digits(digits: usize) -> Result<Self> {
        let consts = Consts::new().map_err(|e| Error::SpecialFunction(format!("{e:?}")))?;
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + GUARD_BITS;
        Ok(Precise { digits, bits, consts })
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    fn check(&self, x: BigFloat, what: &str) -> Result<BigFloat> {
        if x.is_nan() || x.is_inf() {
            Err(Error::SpecialFunction(format!("{what} produced {x}")))
        } else {
            Ok(x)
        }
    }

    pub fn integer(&mut self, value: &BigInt) -> BigFloat {
        BigFloat::parse(&value.to_string(), Radix::Dec, self.bits, RM, &mut self.consts)
    }

    pub fn rational(&mut self, value: &ExactRational) -> BigFloat {
        let n = self.integer(value.numer());
        let d = self.integer(value.denom());
        n.div(&d, self.bits, RM)
    }

    pub fn pi(&mut self) -> BigFloat {
        self.consts.pi(self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sqrt(&self, x: &BigFloat) -> Result<BigFloat> {
        self.check(x.sqrt(self.bits, RM), "sqrt")
    }

    pub fn ln(&mut self, x: &BigFloat) -> Result<BigFloat> {
        let v = x.ln(self.bits, RM, &mut self.consts);
        self.check(v, "ln")
    }

    pub fn exp(&mut self, x: &BigFloat) -> Result<BigFloat> {
        let v = x.exp(self.bits, RM, &mut self.consts);
        self.check(v, "exp")
    }

    pub fn sin(&mut self, x: &BigFloat) -> Result<BigFloat> {
        let v = x.sin(self.bits, RM, &mut self.consts);
        self.check(v, "sin")
    }

    /// x^y = exp(y ln x), x > 0
    pub fn pow(&mut self, x: &BigFloat, y: &BigFloat) -> Result<BigFloat> {
        let l = self.ln(x)?;
        let p = self.mul(&l, y);
        self.exp(&p)
    }

    /// Γ(x) for rational x > 0.
    ///
    /// Stirling's series for ln Γ at y = x + N, with N large enough that the
    /// asymptotic terms fall below the working precision before they start to
    /// grow; the shift product ∏(x+k) is formed exactly.
    pub fn gamma(&mut self, x: &ExactRational) -> Result<BigFloat> {
        if !x.is_positive() {
            return Err(Error::SpecialFunction(format!("high-precision Γ needs x > 0, got {x}")));
        }
        let shift = (self.bits as f64 * 0.12).ceil() as i64 + 8;
        let y = x + int(shift);
        let product = (0..shift).fold(BigRational::one(), |acc, k| acc * (x + int(k)));

        let threshold = rat(1, 1) / BigRational::from_integer(num::pow(BigInt::from(2), self.bits + 8));
        let bernoulli = bernoulli_even(4 * shift as usize);
        let mut correction = BigRational::zero();
        let mut y_power = y.clone();
        let y2 = &y * &y;
        let mut converged = false;
        for (k, b) in bernoulli.iter().enumerate().skip(1) {
            let k2 = 2 * k as i64;
            let term = b / (int(k2 * (k2 - 1)) * &y_power);
            correction += &term;
            if term.abs() < threshold {
                converged = true;
                break;
            }
            y_power *= &y2;
        }
        if !converged {
            return Err(Error::SpecialFunction(format!("Stirling series for Γ({x}) did not converge")));
        }

        let yf = self.rational(&y);
        let ln_y = self.ln(&yf)?;
        let two_pi = {
            let pi = self.pi();
            self.mul(&pi, &BigFloat::from_word(2, self.bits))
        };
        let half_ln_2pi = {
            let l = self.ln(&two_pi)?;
            self.div(&l, &BigFloat::from_word(2, self.bits))
        };
        let y_minus_half = self.rational(&(&y - rat(1, 2)));
        let corr = self.rational(&correction);
        let mut ln_gamma = self.mul(&y_minus_half, &ln_y);
        ln_gamma = ln_gamma.sub(&yf, self.bits, RM);
        ln_gamma = self.add(&ln_gamma, &half_ln_2pi);
        ln_gamma = self.add(&ln_gamma, &corr);
        let gamma_y = self.exp(&ln_gamma)?;
        let prod = self.rational(&product);
        Ok(self.div(&gamma_y, &prod))
    }

    /// Decimal text with `digits` significant digits.
    pub fn to_decimal(&mut self, x: &BigFloat, digits: usize) -> Result<String> {
        Ok(crate::rational::to_decimal_string(&self.to_rational(x)?, digits))
    }

    /// Rational equal to the decimal rendering of `x` at the working precision.
    pub fn to_rational(&mut self, x: &BigFloat) -> Result<ExactRational> {
        let text = x.format(Radix::Dec, RM, &mut self.consts).map_err(|e| Error::SpecialFunction(format!("{e:?}")))?;
        parse_scientific(&text)
    }

    pub fn to_f64(&mut self, x: &BigFloat) -> Result<f64> {
        let text = x.format(Radix::Dec, RM, &mut self.consts).map_err(|e| Error::SpecialFunction(format!("{e:?}")))?;
        text.parse::<f64>().map_err(|_| Error::Parse(format!("cannot read `{text}` as f64")))
    }
}

/// Sum of inverse eigenvalues of p² + i x³, in closed form:
/// 4 sin²(π/5) Γ²(1/5) / (5^{6/5} Γ(3/5)).
pub fn zeta_exact_precise(p: &mut Precise) -> Result<BigFloat> {
    let pi = p.pi();
    let fifth = p.rational(&rat(1, 5));
    let angle = p.mul(&pi, &fifth);
    let s = p.sin(&angle)?;
    let g15 = p.gamma(&rat(1, 5))?;
    let g35 = p.gamma(&rat(3, 5))?;
    let five = p.integer(&BigInt::from(5));
    let six_fifths = p.rational(&rat(6, 5));
    let five_pow = p.pow(&five, &six_fifths)?;
    let s2 = p.mul(&s, &s);
    let g2 = p.mul(&g15, &g15);
    let four = p.integer(&BigInt::from(4));
    let num = p.mul(&p.mul(&four, &s2), &g2);
    let den = p.mul(&five_pow, &g35);
    Ok(p.div(&num, &den))
}

/// Z(1) as decimal text with `digits` significant digits.
pub fn zeta_exact_digits(digits: usize) -> Result<String> {
    let mut p = Precise::with_digits(digits + 10)?;
    let z = zeta_exact_precise(&mut p)?;
    p.to_decimal(&z, digits)
}

/// Z(1) rounded to double precision.
pub fn zeta_exact() -> f64 {
    let mut p = Precise::with_digits(30).expect("constant cache");
    let z = zeta_exact_precise(&mut p).expect("closed form is finite");
    p.to_f64(&z).expect("finite decimal")
}

/// Exact value of `[-]d.ddd[e±x]`.
fn parse_scientific(text: &str) -> Result<ExactRational> {
    let err = || Error::Parse(format!("unexpected decimal `{text}`"));
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| err())?),
        None => (text, 0),
    };
    let negative = mantissa.starts_with('-');
    let mantissa = mantissa.trim_start_matches(['-', '+']);
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| err())?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// B₀, B₂, B₄, …, B_{2·(count−1)} (index k holds B₂ₖ).
///
/// Uses integer tangent numbers Tₖ and B₂ₖ = (−1)^{k−1} 2k Tₖ / (4ᵏ(4ᵏ−1)).
pub fn bernoulli_even(count: usize) -> Vec<ExactRational> {
    let n = count.saturating_sub(1);
    let mut t = vec![BigInt::zero(); n + 1];
    if n >= 1 {
        t[1] = BigInt::one();
    }
    for k in 2..=n {
        t[k] = &t[k - 1] * (k - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j - k) + &t[j] * (j - k + 2);
        }
    }
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(int(1));
    }
    for (k, tk) in t.iter().enumerate().skip(1) {
        let four_k = num::pow(BigInt::from(4), k);
        let den = &four_k * (&four_k - 1);
        let mut value = BigRational::new(tk * (2 * k), den);
        if k % 2 == 0 {
            value = -value;
        }
        out.push(value);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_even(7);
        assert_eq!(b[0], int(1));
        assert_eq!(b[1], rat(1, 6));
        assert_eq!(b[2], rat(-1, 30));
        assert_eq!(b[3], rat(1, 42));
        assert_eq!(b[5], rat(5, 66));
        assert_eq!(b[6], rat(-691, 2730));
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let mut p = Precise::with_digits(60).unwrap();
        let g = p.gamma(&rat(1, 2)).unwrap();
        let pi = p.pi();
        let s = p.sqrt(&pi).unwrap();
        assert_eq!(p.to_decimal(&g, 55).unwrap(), p.to_decimal(&s, 55).unwrap());
    }

    #[test]
    fn gamma_integer_is_factorial() {
        let mut p = Precise::with_digits(40).unwrap();
        let g = p.gamma(&int(7)).unwrap();
        assert_eq!(p.to_decimal(&g, 35).unwrap(), crate::rational::to_decimal_string(&int(720), 35));
    }

    #[test]
    fn gamma_fifth_reference() {
        // Γ(1/5) to 40 digits (independent reference)
        let mut p = Precise::with_digits(50).unwrap();
        let g = p.gamma(&rat(1, 5)).unwrap();
        assert_eq!(p.to_decimal(&g, 40).unwrap(), "4.590843711998803053204758275929152003434e0");
    }

    #[test]
    fn zeta_two_precisions_agree() {
        let a = zeta_exact_digits(50).unwrap();
        let b = zeta_exact_digits(100).unwrap();
        assert_eq!(a, crate::rational::to_decimal_string(&parse_scientific(&b).unwrap(), 50));
        // independent 30-digit reference
        assert!(a.starts_with("2.835094933971789667033936985383699040248812924571"), "{a}");
    }

    #[test]
    fn zeta_f64() {
        assert!((zeta_exact() - 2.835_094_933_971_79).abs() < 1e-14);
    }

    #[test]
    fn scientific_parse() {
        assert_eq!(parse_scientific("1.25e+1").unwrap(), rat(25, 2));
        assert_eq!(parse_scientific("-3.0e-2").unwrap(), rat(-3, 100));
        assert!(parse_scientific("x").is_err());
    }

    #[test]
    fn rejects_non_positive() {
        let mut p = Precise::with_digits(20).unwrap();
        assert!(p.gamma(&int(0)).is_err());
    }
}
