//! Exact Padé approximants in u = g² and the energy curves built from them.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::ModelId;
use crate::rational::{from_f64_exact, to_f64, ExactRational};
use crate::series::EnergySeries;

/// `numerator(u) / denominator(u)` with `denominator[0] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PadeApproximant {
    pub numerator: Vec<ExactRational>,
    pub denominator: Vec<ExactRational>,
    /// (L, M) as requested; differs from [`degrees`](Self::degrees) after a degeneracy.
    pub requested: (usize, usize),
}

impl PadeApproximant {
    /// (L, M) actually used.
    pub fn degrees(&self) -> (usize, usize) {
        (self.numerator.len() - 1, self.denominator.len() - 1)
    }

    pub fn is_reduced(&self) -> bool {
        self.degrees() != self.requested
    }

    pub fn numerator_at(&self, u: &ExactRational) -> ExactRational {
        horner(&self.numerator, u)
    }

    pub fn denominator_at(&self, u: &ExactRational) -> ExactRational {
        horner(&self.denominator, u)
    }

    /// Exact value, `None` on a zero of the denominator.
    pub fn eval_exact(&self, u: &ExactRational) -> Option<ExactRational> {
        let q = self.denominator_at(u);
        (!q.is_zero()).then(|| self.numerator_at(u) / q)
    }

    pub fn eval(&self, u: f64) -> f64 {
        let p = self.numerator.iter().rev().fold(0.0, |acc, c| acc * u + to_f64(c));
        let q = self.denominator.iter().rev().fold(0.0, |acc, c| acc * u + to_f64(c));
        p / q
    }

    /// First `len` Taylor coefficients of numerator/denominator.
    pub fn taylor(&self, len: usize) -> Vec<ExactRational> {
        let mut out: Vec<ExactRational> = Vec::with_capacity(len);
        for k in 0..len {
            let mut value = self.numerator.get(k).cloned().unwrap_or_else(BigRational::zero);
            for j in 1..self.denominator.len().min(k + 1) {
                value -= &self.denominator[j] * &out[k - j];
            }
            out.push(value);
        }
        out
    }

    /// Whether the expansion reproduces `coeffs` through order L+M exactly.
    pub fn matches(&self, coeffs: &[ExactRational]) -> bool {
        let (l, m) = self.degrees();
        let n = l + m + 1;
        coeffs.len() >= n && self.taylor(n) == coeffs[..n]
    }
}

fn horner(coeffs: &[ExactRational], u: &ExactRational) -> ExactRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * u + c)
}

/// Coefficients f₀, f₁, … of F(u) = (E(u) − c₀)/u.
pub fn once_subtract(series: &EnergySeries) -> Result<Vec<ExactRational>> {
    if series.coefficients.len() < 2 {
        return Err(Error::InsufficientData("once-subtraction needs at least c₀ and c₁".into()));
    }
    Ok(series.coefficients[1..].to_vec())
}

/// [L/M] Padé approximant from `coeffs` (at least L+M+1 of them).
///
/// The denominator solves the Toeplitz system Σⱼ qⱼ f_{L+i−j} = −f_{L+i}
/// (i = 1..M) exactly. A singular system lowers M by one and retries; M = 0
/// is the truncated Taylor polynomial.
pub fn pade(coeffs: &[ExactRational], l: usize, m: usize) -> Result<PadeApproximant> {
    if coeffs.len() < l + m + 1 {
        return Err(Error::InsufficientData(format!(
            "[{l}/{m}] Padé needs {} coefficients, got {}",
            l + m + 1,
            coeffs.len()
        )));
    }
    let f = |k: isize| -> ExactRational {
        if k < 0 {
            BigRational::zero()
        } else {
            coeffs[k as usize].clone()
        }
    };

    let mut order = m;
    let q = loop {
        if order == 0 {
            break vec![BigRational::one()];
        }
        let matrix: Vec<Vec<ExactRational>> = (1..=order)
            .map(|i| {
                let mut row: Vec<ExactRational> =
                    (1..=order).map(|j| f(l as isize + i as isize - j as isize)).collect();
                row.push(-f((l + i) as isize));
                row
            })
            .collect();
        match solve_fraction_free(matrix) {
            Some(solution) => {
                let mut q = vec![BigRational::one()];
                q.extend(solution);
                break q;
            }
            None => order -= 1,
        }
    };

    let numerator = (0..=l)
        .map(|i| (0..q.len().min(i + 1)).fold(BigRational::zero(), |acc, j| acc + &q[j] * &coeffs[i - j]))
        .collect();
    Ok(PadeApproximant { numerator, denominator: q, requested: (l, m) })
}

/// Solve an augmented n×(n+1) rational system by Bareiss elimination on
/// integer-scaled rows. `None` when the matrix is singular.
fn solve_fraction_free(rows: Vec<Vec<ExactRational>>) -> Option<Vec<ExactRational>> {
    let n = rows.len();
    let mut a: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|row| {
            let scale = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&scale / x.denom())).collect()
        })
        .collect();

    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&r| !a[r][k].is_zero())?;
        a.swap(k, pivot);
        for i in k + 1..n {
            for j in k + 1..=n {
                let value = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = value;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }

    let mut x = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        let mut rhs = BigRational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            rhs -= BigRational::from_integer(a[i][j].clone()) * &x[j];
        }
        x[i] = rhs / BigRational::from_integer(a[i][i].clone());
    }
    Some(x)
}

/// How the energy series is fed to the Padé table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PadeForm {
    /// E = c₀ + u·[L/M]((E − c₀)/u)
    #[default]
    OnceSubtracted,
    /// E = c₀ + [L/M](E − c₀)
    Subtracted,
}

impl PadeForm {
    /// Number of energy-series orders (beyond c₀) the form consumes.
    pub fn series_order_needed(self, l: usize, m: usize) -> usize {
        match self {
            PadeForm::OnceSubtracted => l + m + 1,
            PadeForm::Subtracted => l + m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub g: f64,
    /// Exact value of the approximant at u = g² (g taken as its exact binary value).
    pub energy: Option<ExactRational>,
    pub value: f64,
    /// The denominator vanished or changed sign on [0, g²]: a pole lies on the grid.
    pub pole: bool,
}

/// Padé-summed ground-state energy as a function of g.
#[derive(Debug, Clone)]
pub struct EnergyCurve {
    pub model: ModelId,
    pub form: PadeForm,
    pub unperturbed: ExactRational,
    pub approximant: PadeApproximant,
}

impl EnergyCurve {
    pub fn from_series(series: &EnergySeries, l: usize, m: usize, form: PadeForm) -> Result<Self> {
        let needed = form.series_order_needed(l, m);
        if series.max_order() < needed {
            return Err(Error::InsufficientData(format!(
                "[{l}/{m}] needs the series through g^{}, have g^{}",
                2 * needed,
                2 * series.max_order()
            )));
        }
        let coeffs = match form {
            PadeForm::OnceSubtracted => once_subtract(series)?,
            PadeForm::Subtracted => {
                let mut c = series.coefficients.clone();
                c[0] = BigRational::zero();
                c
            }
        };
        Ok(EnergyCurve {
            model: series.model,
            form,
            unperturbed: series.coefficients[0].clone(),
            approximant: pade(&coeffs, l, m)?,
        })
    }

    pub fn point(&self, g: f64) -> Result<CurvePoint> {
        let g_exact = from_f64_exact(g)?;
        let u = &g_exact * &g_exact;
        let q = self.approximant.denominator_at(&u);
        let pole = !q.is_positive() || self.sign_change_before(&u);
        let energy = (!q.is_zero()).then(|| {
            let ratio = self.approximant.numerator_at(&u) / &q;
            match self.form {
                PadeForm::OnceSubtracted => &self.unperturbed + &u * ratio,
                PadeForm::Subtracted => &self.unperturbed + ratio,
            }
        });
        let value = energy.as_ref().map_or(f64::NAN, to_f64);
        Ok(CurvePoint { g, energy, value, pole })
    }

    /// A positive-axis root of Q below u shows up as a sign change of Q on a
    /// fine probe of [0, u]; Q(0) = 1.
    fn sign_change_before(&self, u: &ExactRational) -> bool {
        const PROBES: i64 = 64;
        (1..PROBES).any(|k| {
            let t = u * BigRational::new(BigInt::from(k), BigInt::from(PROBES));
            !self.approximant.denominator_at(&t).is_positive()
        })
    }

    pub fn evaluate(&self, grid: &[f64]) -> Result<Vec<CurvePoint>> {
        grid.iter().map(|&g| self.point(g)).collect()
    }
}

/// Series to the needed depth, then the once-subtracted [L/M] curve on `grid`.
pub fn energy_curve(model: ModelId, l: usize, m: usize, grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if let Some(bad) = grid.iter().find(|g| !g.is_finite()) {
        return Err(Error::InvalidArgument(format!("grid point {bad} is not finite")));
    }
    let form = PadeForm::OnceSubtracted;
    let series = EnergySeries::compute(model, form.series_order_needed(l, m))?;
    EnergyCurve::from_series(&series, l, m, form)?.evaluate(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn geometric_series_is_simple_pole() {
        let coeffs = vec![int(1); 4];
        let p = pade(&coeffs, 0, 1).unwrap();
        assert_eq!(p.numerator, vec![int(1)]);
        assert_eq!(p.denominator, vec![int(1), int(-1)]);
        assert_eq!(p.eval_exact(&rat(1, 2)), Some(int(2)));
        assert_eq!(p.eval_exact(&int(1)), None);
    }

    #[test]
    fn polynomial_with_no_denominator() {
        let p = pade(&[int(1), int(1)], 1, 0).unwrap();
        assert_eq!(p.numerator, vec![int(1), int(1)]);
        assert_eq!(p.denominator, vec![int(1)]);
    }

    #[test]
    fn degenerate_system_lowers_denominator() {
        // 1 + u²: the [1/1] system has f₁ = 0 on the diagonal and is singular.
        let coeffs = vec![int(1), int(0), int(1)];
        let p = pade(&coeffs, 1, 1).unwrap();
        assert_eq!(p.degrees(), (1, 0));
        assert!(p.is_reduced());
        assert_eq!(p.numerator, vec![int(1), int(0)]);
    }

    #[test]
    fn insufficient_coefficients() {
        assert!(matches!(pade(&[int(1)], 1, 1), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn once_subtraction() {
        let s = EnergySeries::compute(ModelId::Xyz, 2).unwrap();
        assert_eq!(once_subtract(&s).unwrap()[0], rat(1, 48));
        let s = EnergySeries::compute(ModelId::Cubic1d, 2).unwrap();
        assert_eq!(once_subtract(&s).unwrap()[1], rat(-465, 256));
        let flat = EnergySeries { model: ModelId::Xy2, coefficients: vec![int(2), int(0), int(0)] };
        assert!(once_subtract(&flat).unwrap().iter().all(Zero::is_zero));
        let bare = EnergySeries { model: ModelId::Xy2, coefficients: vec![int(2)] };
        assert!(once_subtract(&bare).is_err());
    }

    #[test]
    fn pade_at_origin_is_leading_coefficient() {
        let s = EnergySeries::compute(ModelId::Cubic1d, 19).unwrap();
        let f = once_subtract(&s).unwrap();
        let p = pade(&f, 9, 9).unwrap();
        assert!(p.matches(&f));
        assert_eq!(p.eval_exact(&int(0)), Some(rat(11, 16)));
    }

    #[test]
    fn curve_origin_and_slope() {
        let s = EnergySeries::compute(ModelId::Cubic1d, 19).unwrap();
        let curve = EnergyCurve::from_series(&s, 9, 9, PadeForm::OnceSubtracted).unwrap();
        assert_eq!(curve.point(0.0).unwrap().energy, Some(int(1)));
        let g = 1e-3;
        let slope = (curve.point(g).unwrap().value - 1.0) / (g * g);
        assert!((slope - 11.0 / 16.0).abs() < 1e-5, "{slope}");
    }

    #[test]
    fn both_forms_agree_at_small_coupling() {
        let s = EnergySeries::compute(ModelId::Xy2, 19).unwrap();
        let a = EnergyCurve::from_series(&s, 9, 9, PadeForm::OnceSubtracted).unwrap();
        let b = EnergyCurve::from_series(&s, 9, 9, PadeForm::Subtracted).unwrap();
        for g in [0.1, 0.3, 0.5] {
            assert!((a.point(g).unwrap().value - b.point(g).unwrap().value).abs() < 1e-8);
        }
    }

    #[test]
    fn pole_flagged() {
        // F(u) = 1/(1 − u): pole at u = 1, i.e. g = 1
        let series = EnergySeries { model: ModelId::Cubic1d, coefficients: vec![int(1); 4] };
        let curve = EnergyCurve::from_series(&series, 0, 1, PadeForm::OnceSubtracted).unwrap();
        assert!(!curve.point(0.5).unwrap().pole);
        let at = curve.point(1.0).unwrap();
        assert!(at.pole && at.energy.is_none());
        assert!(curve.point(1.5).unwrap().pole);
    }

    #[test]
    fn grid_must_be_finite() {
        assert!(energy_curve(ModelId::Xyz, 1, 1, &[0.0, f64::NAN]).is_err());
        let pts = energy_curve(ModelId::Xyz, 9, 9, &[0.0]).unwrap();
        assert_eq!(pts[0].energy, Some(int(3)));
    }
}
