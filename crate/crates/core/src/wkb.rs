//! Tunneling analysis behind the large-order laws.
//!
//! With g → ig the models become real potentials V = Σxᵢ² − g W(x) that leak
//! to infinity. Along a unit direction u, V = r² − g c(u) r³ with c(u) = W(u);
//! the escape channels are the maximizers of c.

use num::complex::Complex64;
use ode_solvers::{Dopri5, OutputType, System, Vector2};
use serde::{Deserialize, Serialize};

use crate::analysis::{fit_amplitude, law_base, LargeOrderLaw};
use crate::error::{Error, Result};
use crate::model::{build_model, ModelId, ModelSpec};
use crate::series::EnergySeries;
use crate::special::gamma;

/// Distance within which a numerically optimized channel must hit an analytic one.
pub const DIRECTION_MATCH_TOLERANCE: f64 = 1e-8;
/// Relative agreement demanded between the two 2D amplitude expressions.
pub const AMPLITUDE_CONSISTENCY_TOLERANCE: f64 = 1e-9;
/// Richardson order used when the Hénon–Heiles amplitude is fitted.
pub const HENON_HEILES_FIT_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpepSet {
    pub model: ModelId,
    /// Unit vectors (length = model dimension), analytic values.
    pub directions: Vec<Vec<f64>>,
    /// Polar angles for planar models.
    pub angles: Option<Vec<f64>>,
    /// Numerically optimized maximizers, in the order of `directions`.
    pub optimized: Vec<Vec<f64>>,
    /// λ in V_eff(r) = r² − λ g r³.
    pub effective_radial_cubic_coefficient: f64,
}

impl MpepSet {
    /// Outer turning point of r² − λ g r³.
    pub fn turning_radius(&self, g: f64) -> f64 {
        1.0 / (self.effective_radial_cubic_coefficient * g)
    }
}

/// c(u) = W(u) on the unit sphere.
pub fn angular_factor(model: &ModelSpec, direction: &[f64]) -> f64 {
    model.cubic(direction)
}

fn analytic_directions(id: ModelId) -> (Vec<Vec<f64>>, Option<Vec<f64>>) {
    let s3 = 3f64.sqrt();
    match id {
        ModelId::Cubic1d => (vec![vec![1.0]], None),
        ModelId::Xy2 => {
            let theta = (2f64 / 3.0).sqrt().asin();
            let angles = vec![theta, -theta];
            (angles.iter().map(|t| vec![t.cos(), t.sin()]).collect(), Some(angles))
        }
        ModelId::HenonHeiles => {
            let pi = std::f64::consts::PI;
            let angles = vec![pi / 3.0, -pi / 3.0, pi];
            (angles.iter().map(|t| vec![t.cos(), t.sin()]).collect(), Some(angles))
        }
        ModelId::Xyz => (
            [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
                .iter()
                .map(|v| v.iter().map(|x| x / s3).collect())
                .collect(),
            None,
        ),
    }
}

fn gradient_hessian(model: &ModelSpec, u: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = model.dimension;
    let mut grad = vec![0.0; d];
    let mut hess = vec![vec![0.0; d]; d];
    for term in &model.perturbation {
        let c = crate::rational::to_f64(&term.coefficient);
        let e: Vec<i32> = (0..d).map(|i| term.exponents[i] as i32).collect();
        // ∂ᵢ and ∂ᵢ∂ⱼ of c·∏ u_k^{e_k}
        let monomial = |shift: &[i32]| -> f64 {
            let mut v = c;
            for k in 0..d {
                let mut power = e[k];
                for &s in shift {
                    if s as usize == k {
                        v *= power as f64;
                        power -= 1;
                    }
                }
                if power < 0 {
                    return 0.0;
                }
                v *= u[k].powi(power);
            }
            v
        };
        for (i, row) in hess.iter_mut().enumerate() {
            grad[i] += monomial(&[i as i32]);
            for (j, h) in row.iter_mut().enumerate() {
                *h += monomial(&[i as i32, j as i32]);
            }
        }
    }
    (grad, hess)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Orthonormal basis of the tangent space at unit vector u.
fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for axis in 0..d {
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        for b in std::iter::once(u).chain(basis.iter().map(|b| b.as_slice())) {
            let p = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        if dot(&v, &v) > 1e-6 {
            normalize(&mut v);
            basis.push(v);
        }
        if basis.len() == d - 1 {
            break;
        }
    }
    basis
}

/// Riemannian Newton ascent of c on the sphere from `start`.
fn newton_on_sphere(model: &ModelSpec, start: &[f64]) -> Vec<f64> {
    let mut u = start.to_vec();
    normalize(&mut u);
    for _ in 0..100 {
        let (grad, hess) = gradient_hessian(model, &u);
        let basis = tangent_basis(&u);
        let radial = dot(&grad, &u);
        let m = basis.len();
        let g: Vec<f64> = basis.iter().map(|e| dot(&grad, e)).collect();
        let mut h = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in 0..m {
                let he: Vec<f64> = (0..u.len()).map(|i| dot(&hess[i], &basis[b])).collect();
                h[a][b] = dot(&basis[a], &he) - if a == b { radial } else { 0.0 };
            }
        }
        // Newton step when the Hessian is negative definite, gradient step otherwise.
        let step: Vec<f64> = match m {
            1 if h[0][0] < 0.0 => vec![-g[0] / h[0][0]],
            2 => {
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                if h[0][0] < 0.0 && det > 0.0 {
                    vec![-(h[1][1] * g[0] - h[0][1] * g[1]) / det, -(h[0][0] * g[1] - h[1][0] * g[0]) / det]
                } else {
                    g.iter().map(|x| 0.1 * x).collect()
                }
            }
            _ => g.iter().map(|x| 0.1 * x).collect(),
        };
        let norm = dot(&step, &step).sqrt();
        let scale = if norm > 0.3 { 0.3 / norm } else { 1.0 };
        for (s, e) in step.iter().zip(&basis) {
            u.iter_mut().zip(e).for_each(|(x, y)| *x += scale * s * y);
        }
        normalize(&mut u);
        if norm < 1e-15 {
            break;
        }
    }
    u
}

fn start_points(d: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..72).map(|k| k as f64 * std::f64::consts::PI / 36.0).map(|t| vec![t.cos(), t.sin()]).collect(),
        _ => {
            // Fibonacci sphere
            let n = 400;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Escape channels, analytic and numerically confirmed.
pub fn mpep_directions(id: ModelId) -> Result<MpepSet> {
    let model = build_model(id);
    let (directions, angles) = analytic_directions(id);
    let lambda = directions.iter().map(|u| angular_factor(&model, u)).fold(f64::MIN, f64::max);

    let mut optimized: Vec<Option<Vec<f64>>> = vec![None; directions.len()];
    for start in start_points(model.dimension) {
        let u = newton_on_sphere(&model, &start);
        if angular_factor(&model, &u) < lambda - 1e-9 {
            continue; // a lower local maximum
        }
        let Some((slot, dist)) =
            directions.iter().map(|a| distance(a, &u)).enumerate().min_by(|a, b| a.1.total_cmp(&b.1))
        else {
            unreachable!("at least one analytic direction")
        };
        if dist > DIRECTION_MATCH_TOLERANCE {
            return Err(Error::Consistency(format!(
                "{id}: optimizer found maximizer {u:?} at distance {dist:e} from every analytic channel"
            )));
        }
        optimized[slot].get_or_insert(u);
    }
    let optimized = optimized
        .into_iter()
        .zip(&directions)
        .map(|(o, a)| o.ok_or_else(|| Error::Consistency(format!("{id}: channel {a:?} not reached by the optimizer"))))
        .collect::<Result<Vec<_>>>()?;

    Ok(MpepSet { model: id, directions, angles, optimized, effective_radial_cubic_coefficient: lambda })
}

/// Top of the barrier r² − α r³: (2/(3α), 4/(27α²)).
pub fn critical_point(alpha: f64) -> Result<(f64, f64)> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("no barrier for α = {alpha}")));
    }
    Ok((2.0 / (3.0 * alpha), 4.0 / (27.0 * alpha * alpha)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpticsMode {
    Geometric,
    Physical,
}

/// Relative accuracy requested from the quadratures.
pub const QUADRATURE_RELATIVE_TOLERANCE: f64 = 1e-13;

fn integrate_checked(f: impl Fn(f64) -> f64, a: f64, b: f64, scale: f64) -> Result<f64> {
    let target = QUADRATURE_RELATIVE_TOLERANCE * scale;
    let out = quadrature::integrate(f, a, b, target);
    if !out.integral.is_finite() || out.error_estimate > 1e3 * target {
        return Err(Error::Quadrature(format!(
            "estimated error {:e} on [{a}, {b}] exceeds target {target:e}",
            out.error_estimate
        )));
    }
    Ok(out.integral)
}

/// 2∫₀^R √(r² − λg r³) dr with R = 1/(λg).
///
/// r = R(1 − w²) removes the square-root zero at the turning point.
pub fn geometric_exponent(lambda_g: f64) -> Result<f64> {
    if !(lambda_g > 0.0 && lambda_g.is_finite()) {
        return Err(Error::InvalidArgument(format!("λg must be positive, got {lambda_g}")));
    }
    let r_turn = 1.0 / lambda_g;
    let integrand = |w: f64| {
        let r = r_turn * (1.0 - w * w);
        (r * r - lambda_g * r * r * r).max(0.0).sqrt() * 2.0 * r_turn * w
    };
    Ok(2.0 * integrate_checked(integrand, 0.0, 1.0, r_turn * r_turn)?)
}

/// Real roots of s² − a s³ − 1 bracketing the classically forbidden region.
fn physical_turning_points(a: f64) -> Result<(f64, f64)> {
    let p = |s: f64| s * s - a * s * s * s - 1.0;
    let peak = 2.0 / (3.0 * a);
    if p(peak) <= 0.0 {
        return Err(Error::InvalidArgument(format!("no classically forbidden region for a = {a}")));
    }
    let bisect = |mut lo: f64, mut hi: f64| {
        // p(lo) and p(hi) have opposite signs
        let rising = p(hi) > p(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (p(mid) > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok((bisect(0.0, peak), bisect(peak, 1.0 / a)))
}

/// 2∫√(s² − a s³ − 1) ds between the two turning points, a = 2g/(3√3).
///
/// The substitution s = s₁ + (s₂−s₁)(1 − cos πt)/2 regularizes both ends.
pub fn physical_exponent(a: f64) -> Result<f64> {
    let (s1, s2) = physical_turning_points(a)?;
    let pi = std::f64::consts::PI;
    let integrand = |t: f64| {
        let s = s1 + (s2 - s1) * (1.0 - (pi * t).cos()) / 2.0;
        let ds = (s2 - s1) * pi * (pi * t).sin() / 2.0;
        (s * s - a * s * s * s - 1.0).max(0.0).sqrt() * ds
    };
    let scale = (s2 - s1) * (s2 - s1);
    let left = integrate_checked(integrand, 0.0, 0.5, scale)?;
    let right = integrate_checked(integrand, 0.5, 1.0, scale)?;
    Ok(2.0 * (left + right))
}

/// Tunneling exponent along the planar channel of the xy² model.
pub fn tunneling_integral(g: f64, mode: OpticsMode) -> Result<f64> {
    if !(g > 0.0 && g <= 0.5) {
        return Err(Error::InvalidArgument(format!("coupling must lie in (0, 0.5], got {g}")));
    }
    let a = 2.0 * g / (3.0 * 3f64.sqrt());
    match mode {
        OpticsMode::Geometric => geometric_exponent(a),
        OpticsMode::Physical => physical_exponent(a),
    }
}

/// Leading large-1/g behaviour of the physical-optics exponent.
pub fn physical_expansion(g: f64) -> f64 {
    18.0 / (5.0 * g * g) - (12.0 * 3f64.sqrt()).ln() + g.ln() - 0.5
}

/// Geometric exponent along an arbitrary unit direction.
pub fn barrier_exponent(id: ModelId, direction: &[f64], g: f64) -> Result<f64> {
    let model = build_model(id);
    if direction.len() != model.dimension {
        return Err(Error::InvalidArgument(format!("{id} needs a {}-component direction", model.dimension)));
    }
    let mut u = direction.to_vec();
    normalize(&mut u);
    let c = angular_factor(&model, &u);
    if c <= 0.0 {
        return Err(Error::InvalidArgument(format!("no barrier along {direction:?} (c = {c})")));
    }
    geometric_exponent(c * g)
}

/// Sampled solution of the Riccati and transport equations on [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiProfile {
    /// (v, f(v), A(v)), v decreasing from 1 − ε to 0.
    pub points: Vec<(f64, f64, f64)>,
    pub epsilon: f64,
    pub tolerance: f64,
    pub accepted_steps: u32,
    pub rejected_steps: u32,
}

impl RiccatiProfile {
    pub fn f0(&self) -> f64 {
        self.points.last().expect("non-empty profile").1
    }

    pub fn a0(&self) -> f64 {
        self.points.last().expect("non-empty profile").2
    }
}

/// The Riccati and transport equations in δ = 1 − v, integrated forward.
struct RiccatiTransport;

impl System<f64, Vector2<f64>> for RiccatiTransport {
    // (1−v²) f'(v) = 2f² − 5 + 3v²,  (1−v²) A'(v) = (f − 1) A
    fn system(&self, delta: f64, y: &Vector2<f64>, dy: &mut Vector2<f64>) {
        let v = 1.0 - delta;
        let w = 1.0 - v * v;
        dy[0] = -(2.0 * y[0] * y[0] - 5.0 + 3.0 * v * v) / w;
        dy[1] = -(y[0] - 1.0) * y[1] / w;
    }
}

pub const DEFAULT_RICCATI_EPSILON: f64 = 1e-6;
pub const DEFAULT_RICCATI_TOLERANCE: f64 = 1e-12;

/// Integrates from v = 1 − ε down to 0, starting on the local series
/// f ≈ 1 + δ, A ≈ 1 − δ/2 (δ = 1 − v).
pub fn riccati_solve(epsilon: f64, tolerance: f64) -> Result<RiccatiProfile> {
    if !(epsilon > 0.0 && epsilon <= 1e-3) {
        return Err(Error::InvalidArgument(format!("start offset must lie in (0, 1e-3], got {epsilon}")));
    }
    if !(tolerance > 0.0 && tolerance < 1e-3) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1e-3), got {tolerance}")));
    }
    let y0 = Vector2::new(1.0 + epsilon, 1.0 - epsilon / 2.0);
    // The decaying mode has rate 2/δ, so the problem is mildly stiff near the
    // start; steps still grow geometrically with δ and the stiffness probe is
    // switched off. Controller settings are the integrator's defaults.
    let mut solver = Dopri5::from_param(
        RiccatiTransport,
        epsilon,
        1.0,
        0.0,
        y0,
        tolerance,
        tolerance,
        0.9,
        0.04,
        0.2,
        10.0,
        1.0 - epsilon,
        0.0,
        100_000,
        u32::MAX,
        OutputType::Sparse,
    );
    let stats = solver.integrate().map_err(|e| Error::Ode(e.to_string()))?;
    let points: Vec<(f64, f64, f64)> =
        solver.x_out().iter().zip(solver.y_out()).map(|(&delta, y)| (1.0 - delta, y[0], y[1])).collect();
    if let Some(bad) = points.iter().find(|p| !(p.1.is_finite() && p.2.is_finite())) {
        return Err(Error::Ode(format!("solution diverged near v = {}", bad.0)));
    }
    if let Some(bad) = points.iter().find(|p| p.1 <= 0.0) {
        return Err(Error::Consistency(format!("f crosses zero near v = {}", bad.0)));
    }
    match points.last() {
        Some(&(v, _, _)) if v.abs() < 1e-12 => {}
        _ => return Err(Error::Ode("integration stopped before v = 0".into())),
    }
    Ok(RiccatiProfile {
        points,
        epsilon,
        tolerance,
        accepted_steps: stats.accepted_steps,
        rejected_steps: stats.rejected_steps,
    })
}

/// Upper root of ν(ν+1) = −6.
pub fn legendre_degree() -> Complex64 {
    Complex64::new(-0.5, 23f64.sqrt() / 2.0)
}

/// Largest imaginary part, relative to the real part, tolerated in f(0) and A(0).
pub const CLOSED_FORM_IMAG_TOLERANCE: f64 = 1e-12;

fn real_part_checked(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > CLOSED_FORM_IMAG_TOLERANCE * z.re.abs().max(1.0) {
        return Err(Error::SpecialFunction(format!("{what} = {z} is not real")));
    }
    Ok(z.re)
}

/// f(0) = −tan(πν/2) Γ(ν/2)Γ(2+ν/2) / (Γ(ν/2−½)Γ(ν/2+3/2))
pub fn f0_closed_form_at(nu: Complex64) -> Result<f64> {
    let h = nu / 2.0;
    let value = -(h * std::f64::consts::PI).tan() * gamma(h)? * gamma(h + 2.0)? / (gamma(h - 0.5)? * gamma(h + 1.5)?);
    real_part_checked(value, "f(0)")
}

/// A(0) = π^{−1/4} √(2Γ(2+ν/2)Γ(3/2−ν/2))
pub fn a0_closed_form_at(nu: Complex64) -> Result<f64> {
    let h = nu / 2.0;
    let value = (2.0 * gamma(h + 2.0)? * gamma(-h + 1.5)?).sqrt() * std::f64::consts::PI.powf(-0.25);
    real_part_checked(value, "A(0)")
}

pub fn f0_closed_form() -> Result<f64> {
    f0_closed_form_at(legendre_degree())
}

pub fn a0_closed_form() -> Result<f64> {
    a0_closed_form_at(legendre_degree())
}

/// √(24π / cosh(π√23/2)), the predicted value of A²(0)/√f(0).
pub fn flux_identity_value() -> f64 {
    (24.0 * std::f64::consts::PI / crate::analysis::large_order::cosh_half_pi_sqrt23()).sqrt()
}

/// 12√3 A²(0) / (π √(π f(0)))
pub fn amplitude_from_transport(f0: f64, a0: f64) -> f64 {
    let pi = std::f64::consts::PI;
    12.0 * 3f64.sqrt() * a0 * a0 / (pi * (pi * f0).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WkbConstants {
    pub nu: Complex64,
    pub f0: f64,
    pub a0: f64,
    /// A²(0)/√f(0)
    pub flux_prefactor: f64,
    pub law: LargeOrderLaw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRecord {
    pub model: ModelId,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "B")]
    pub b: crate::rational::RationalRepr,
    pub f0: f64,
    pub a0: f64,
    pub nu_re: f64,
    pub nu_im: f64,
}

impl WkbConstants {
    /// Closed-form transverse constants together with the law for `id`.
    pub fn compute(id: ModelId, series: Option<&EnergySeries>) -> Result<Self> {
        let nu = legendre_degree();
        let f0 = f0_closed_form_at(nu)?;
        let a0 = a0_closed_form_at(nu)?;
        let law = large_order_law(id, f0, a0, series)?;
        Ok(WkbConstants { nu, f0, a0, flux_prefactor: a0 * a0 / f0.sqrt(), law })
    }

    pub fn record(&self) -> ConstantsRecord {
        ConstantsRecord {
            model: self.law.model,
            k: self.law.amplitude,
            b: (&self.law.base).into(),
            f0: self.f0,
            a0: self.a0,
            nu_re: self.nu.re,
            nu_im: self.nu.im,
        }
    }
}

/// (K, B) for each model.
///
/// For xy² the amplitude is assembled from f(0), A(0) and checked against the
/// closed form; Hénon–Heiles needs the series for a fitted amplitude.
pub fn large_order_law(id: ModelId, f0: f64, a0: f64, series: Option<&EnergySeries>) -> Result<LargeOrderLaw> {
    match id {
        ModelId::Cubic1d | ModelId::Xyz => LargeOrderLaw::closed_form(id),
        ModelId::Xy2 => {
            let from_transport = amplitude_from_transport(f0, a0);
            let closed = LargeOrderLaw::closed_form(id)?;
            let rel = (from_transport - closed.amplitude).abs() / closed.amplitude;
            if rel > AMPLITUDE_CONSISTENCY_TOLERANCE {
                return Err(Error::Consistency(format!(
                    "transport amplitude {from_transport} differs from closed form {} (relative {rel:e})",
                    closed.amplitude
                )));
            }
            LargeOrderLaw::new(id, from_transport, law_base(id))
        }
        ModelId::HenonHeiles => {
            let series = series.ok_or_else(|| {
                Error::InsufficientData("the Hénon–Heiles amplitude is fitted from its series".into())
            })?;
            if series.model != id {
                return Err(Error::ModelMismatch { law: id.to_string(), series: series.model.to_string() });
            }
            let base = law_base(id);
            LargeOrderLaw::new(id, fit_amplitude(series, &base, HENON_HEILES_FIT_ORDER)?, base)
        }
    }
}

/// Real escape potential sampled on a square grid, row-major in y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialGrid {
    pub model: ModelId,
    pub g: f64,
    pub nx: usize,
    pub ny: usize,
    pub extent: f64,
    pub values: Vec<f64>,
}

impl PotentialGrid {
    /// Mirror-exact: coordinate(n−1−i) = −coordinate(i).
    pub fn coordinate(&self, index: usize) -> f64 {
        grid_coordinate(self.extent, self.nx, index)
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }
}

fn grid_coordinate(extent: f64, n: usize, index: usize) -> f64 {
    extent * (2.0 * index as f64 - (n - 1) as f64) / (n - 1) as f64
}

/// V(x, y) = x² + y² − g W(x, y) on [−extent, extent]².
pub fn potential_grid(id: ModelId, g: f64, extent: f64, resolution: usize) -> Result<PotentialGrid> {
    if id.dimension() != 2 {
        return Err(Error::InvalidArgument(format!(
            "potential grids are planar; {id} has dimension {}",
            id.dimension()
        )));
    }
    if resolution < 2 || !(extent > 0.0 && extent.is_finite()) || !g.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "need resolution ≥ 2 and a positive extent, got {resolution} and {extent}"
        )));
    }
    let model = build_model(id);
    let coord = |i: usize| grid_coordinate(extent, resolution, i);
    let mut values = Vec::with_capacity(resolution * resolution);
    for iy in 0..resolution {
        for ix in 0..resolution {
            values.push(model.escape_potential(g, &[coord(ix), coord(iy)]));
        }
    }
    Ok(PotentialGrid { model: id, g, nx: resolution, ny: resolution, extent, values })
}
