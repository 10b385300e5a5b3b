//! Diagonalization in truncated oscillator product bases.
//!
//! Operators are assembled sparsely from one-dimensional blocks and split into
//! the connected components of their coupling graph (parity sectors) before
//! each block is handed to a dense non-Hermitian eigensolver.

use std::collections::BTreeMap;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_model, ModelId, ModelSpec};
use crate::rational::to_f64;

pub const DEFAULT_DIMENSION_CAP: usize = 4096;
/// |Im E| below which a level counts as real.
pub const REALITY_TOLERANCE: f64 = 1e-8;
/// Per-level agreement demanded between the two cutoffs.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralProblem {
    pub model: ModelId,
    pub g: f64,
    pub cutoff: usize,
    pub scale: f64,
}

impl SpectralProblem {
    pub fn new(model: ModelId, g: f64, cutoff: usize) -> Result<Self> {
        let p = SpectralProblem { model, g, cutoff, scale: 1.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cutoff < 2 {
            return Err(Error::InvalidArgument(format!("cutoff must be at least 2, got {}", self.cutoff)));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::InvalidArgument(format!("basis scale must be positive, got {}", self.scale)));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidArgument(format!("coupling must be finite, got {}", self.g)));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.cutoff.saturating_pow(self.model.dimension() as u32)
    }

    /// Cutoff used for the convergence re-solve.
    pub fn recheck_cutoff(&self) -> usize {
        if self.model.dimension() >= 3 {
            self.cutoff + 2
        } else {
            self.cutoff + 4
        }
    }

    fn with_cutoff(&self, cutoff: usize) -> Self {
        SpectralProblem { cutoff, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<c64>,
    pub max_abs_imag_low: f64,
    pub cutoff_used: usize,
    pub converged: Vec<bool>,
}

impl SpectrumResult {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Converged levels that are real within [`REALITY_TOLERANCE`].
    pub fn real_converged(&self) -> impl Iterator<Item = &c64> {
        self.eigenvalues
            .iter()
            .zip(&self.converged)
            .filter(|(e, &c)| c && e.im.abs() < REALITY_TOLERANCE)
            .map(|(e, _)| e)
    }
}

type Dense = Vec<Vec<f64>>;

fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn truncate(a: &Dense, n: usize) -> Dense {
    a[..n].iter().map(|row| row[..n].to_vec()).collect()
}

/// ⟨m|x|n⟩ for H₀ = p² + Ω²x², as a dense N×N matrix.
pub fn position_matrix(n: usize, omega: f64) -> Result<Vec<Vec<f64>>> {
    if n < 2 || !(omega.is_finite() && omega > 0.0) {
        return Err(Error::InvalidArgument(format!("position matrix needs N ≥ 2 and Ω > 0, got N={n}, Ω={omega}")));
    }
    let mut x = vec![vec![0.0; n]; n];
    for k in 1..n {
        let v = (k as f64 / (2.0 * omega)).sqrt();
        x[k - 1][k] = v;
        x[k][k - 1] = v;
    }
    Ok(x)
}

/// Exact matrix elements of xᵏ on the first N states (computed in a basis
/// padded by k so that truncation does not leak into the block).
fn position_power(n: usize, omega: f64, k: u16) -> Result<Dense> {
    let padded = n + k as usize;
    let x = position_matrix(padded, omega)?;
    let mut acc: Dense = (0..padded).map(|i| (0..padded).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..k {
        acc = mat_mul(&acc, &x);
    }
    Ok(truncate(&acc, n))
}

/// p² + m x² on the first N states: p² = H₀ − Ω²x² with H₀ diagonal.
fn oscillator_block(n: usize, omega: f64, mass2: f64) -> Result<Dense> {
    let mut block = position_power(n, omega, 2)?;
    for row in block.iter_mut() {
        for v in row.iter_mut() {
            *v *= mass2 - omega * omega;
        }
    }
    for (i, row) in block.iter_mut().enumerate() {
        row[i] += omega * (2 * i + 1) as f64;
    }
    Ok(block)
}

/// Coalesced sparse matrix in row-major (row, col) order.
#[derive(Debug, Clone)]
struct Sparse {
    dim: usize,
    entries: BTreeMap<(usize, usize), c64>,
}

impl Sparse {
    fn add(&mut self, i: usize, j: usize, v: c64) {
        *self.entries.entry((i, j)).or_insert(c64::new(0.0, 0.0)) += v;
    }

    /// Index sets of the connected components of the coupling graph, each sorted.
    fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (&(i, j), v) in &self.entries {
            if *v != c64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.dim {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        groups.into_values().collect()
    }
}

/// Σ over axes of (one-dimensional block on that axis) ⊗ identity elsewhere,
/// or a product of per-axis factors, accumulated into `target`.
fn add_kron(target: &mut Sparse, n: usize, factors: &[Option<&Dense>], scale: c64) {
    // Non-zero lists for each axis; identity when the factor is absent.
    let lists: Vec<Vec<(usize, usize, f64)>> = factors
        .iter()
        .map(|f| match f {
            Some(m) => {
                (0..n).flat_map(|i| (0..n).filter_map(move |j| (m[i][j] != 0.0).then_some((i, j, m[i][j])))).collect()
            }
            None => (0..n).map(|i| (i, i, 1.0)).collect(),
        })
        .collect();
    let mut stack = vec![(0usize, 0usize, 1.0f64)];
    for list in &lists {
        let mut next = Vec::with_capacity(stack.len() * list.len());
        for &(r, c, v) in &stack {
            for &(i, j, w) in list {
                next.push((r * n + i, c * n + j, v * w));
            }
        }
        stack = next;
    }
    for (r, c, v) in stack {
        target.add(r, c, scale * v);
    }
}

/// H = Σᵢ(pᵢ² + m xᵢ²) + i g W in the product basis.
fn assemble(model: &ModelSpec, g: f64, n: usize, omega: f64, mass2: f64, cap: usize) -> Result<Sparse> {
    let d = model.dimension;
    let dim = n.checked_pow(d as u32).unwrap_or(usize::MAX);
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    let mut h = Sparse { dim, entries: BTreeMap::new() };
    let osc = oscillator_block(n, omega, mass2)?;
    for axis in 0..d {
        let mut factors = vec![None; d];
        factors[axis] = Some(&osc);
        add_kron(&mut h, n, &factors, c64::new(1.0, 0.0));
    }
    if g != 0.0 {
        for term in &model.perturbation {
            let powers: Vec<Option<Dense>> = (0..d)
                .map(|axis| match term.exponents[axis] {
                    0 => Ok(None),
                    e => position_power(n, omega, e).map(Some),
                })
                .collect::<Result<_>>()?;
            let refs: Vec<Option<&Dense>> = powers.iter().map(|p| p.as_ref()).collect();
            add_kron(&mut h, n, &refs, c64::new(0.0, g * to_f64(&term.coefficient)));
        }
    }
    h.entries.retain(|_, v| *v != c64::new(0.0, 0.0));
    Ok(h)
}

fn to_dense(h: &Sparse) -> Mat<c64> {
    let mut m = Mat::<c64>::zeros(h.dim, h.dim);
    for (&(i, j), &v) in &h.entries {
        m[(i, j)] = v;
    }
    m
}

pub fn build_hamiltonian(problem: &SpectralProblem) -> Result<Mat<c64>> {
    build_hamiltonian_capped(problem, DEFAULT_DIMENSION_CAP)
}

pub fn build_hamiltonian_capped(problem: &SpectralProblem, cap: usize) -> Result<Mat<c64>> {
    problem.validate()?;
    let model = build_model(problem.model);
    assemble(&model, problem.g, problem.cutoff, problem.scale, 1.0, cap).map(|h| to_dense(&h))
}

/// All eigenvalues, sorted by real part (ties by imaginary part).
fn spectrum(h: &Sparse) -> Result<Vec<c64>> {
    let mut all = Vec::with_capacity(h.dim);
    for block in h.components() {
        let index: BTreeMap<usize, usize> = block.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut m = Mat::<c64>::zeros(block.len(), block.len());
        for &i in &block {
            for (&(_, j), &v) in h.entries.range((i, 0)..(i + 1, 0)) {
                m[(index[&i], index[&j])] = v;
            }
        }
        let values =
            m.eigenvalues().map_err(|e| Error::Eigensolver(format!("block of size {}: {e:?}", block.len())))?;
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Eigensolver("non-finite eigenvalue".into()));
        }
        all.extend(values);
    }
    all.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(all)
}

fn lowest(h: &Sparse, k: usize) -> Result<Vec<c64>> {
    if k > h.dim {
        return Err(Error::InvalidArgument(format!("asked for {k} levels of a {}-dimensional matrix", h.dim)));
    }
    let mut all = spectrum(h)?;
    all.truncate(k);
    Ok(all)
}

/// For each level, whether some eigenvalue at the larger cutoff lies within `tol`.
fn converged_flags(low: &[c64], reference: &[c64], tol: f64) -> Vec<bool> {
    low.iter().map(|e| reference.iter().map(|r| (e - r).norm()).fold(f64::INFINITY, f64::min) < tol).collect()
}

fn result_from(low: Vec<c64>, reference: &[c64], cutoff: usize, tol: f64) -> SpectrumResult {
    let converged = converged_flags(&low, reference, tol);
    let max_abs_imag_low = low.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
    SpectrumResult { eigenvalues: low, max_abs_imag_low, cutoff_used: cutoff, converged }
}

/// The k lowest levels, with convergence judged against a re-solve at
/// [`SpectralProblem::recheck_cutoff`].
pub fn low_levels(problem: &SpectralProblem, k: usize) -> Result<SpectrumResult> {
    low_levels_with(problem, k, CONVERGENCE_TOLERANCE, DEFAULT_DIMENSION_CAP)
}

pub fn low_levels_with(problem: &SpectralProblem, k: usize, tol: f64, cap: usize) -> Result<SpectrumResult> {
    problem.validate()?;
    let model = build_model(problem.model);
    let h = assemble(&model, problem.g, problem.cutoff, problem.scale, 1.0, cap)?;
    let low = lowest(&h, k)?;
    let recheck = problem.with_cutoff(problem.recheck_cutoff());
    let h2 = assemble(&model, recheck.g, recheck.cutoff, recheck.scale, 1.0, cap)?;
    let reference = lowest(&h2, (k + 4).min(h2.dim))?;
    Ok(result_from(low, &reference, problem.cutoff, tol))
}

/// Nearest-value continuation of level curves across a coupling grid.
///
/// `sweeps[i]` holds the levels at the i-th grid point; the output has one
/// curve per level of the first point.
pub fn track_levels(sweeps: &[Vec<c64>]) -> Vec<Vec<c64>> {
    let Some(first) = sweeps.first() else { return Vec::new() };
    let mut curves: Vec<Vec<c64>> = first.iter().map(|&e| vec![e]).collect();
    for levels in &sweeps[1..] {
        let mut taken = vec![false; levels.len()];
        for curve in curves.iter_mut() {
            let last = *curve.last().expect("curves start non-empty");
            let best = levels
                .iter()
                .enumerate()
                .filter(|(i, _)| !taken[*i])
                .min_by(|a, b| (a.1 - last).norm().total_cmp(&(b.1 - last).norm()));
            if let Some((i, &e)) = best {
                taken[i] = true;
                curve.push(e);
            }
        }
    }
    curves
}

/// Massless 1D problem p² + i x³, solved in an oscillator basis of scale Ω.
pub fn massless_cubic_levels(n: usize, omega: f64, k: usize) -> Result<SpectrumResult> {
    massless_cubic_levels_with(n, omega, k, CONVERGENCE_TOLERANCE)
}

pub fn massless_cubic_levels_with(n: usize, omega: f64, k: usize, tol: f64) -> Result<SpectrumResult> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("cutoff must be at least 2, got {n}")));
    }
    let model = build_model(ModelId::Cubic1d);
    let solve = |cutoff: usize| -> Result<Vec<c64>> {
        spectrum(&assemble(&model, 1.0, cutoff, omega, 0.0, DEFAULT_DIMENSION_CAP)?)
    };
    let all = solve(n)?;
    let reference = solve(n + 4)?;
    // Truncation produces complex pairs far from the true spectrum whose
    // position drifts with the cutoff; keep only eigenvalues that persist.
    let stable: Vec<c64> = all
        .into_iter()
        .filter(|e| {
            let nearest = reference.iter().map(|r| (e - r).norm()).fold(f64::INFINITY, f64::min);
            nearest < SPURIOUS_RELATIVE_SHIFT * e.norm()
        })
        .take(k)
        .collect();
    if stable.len() < k {
        return Err(Error::InsufficientData(format!(
            "only {} cutoff-stable levels at N={n}, Ω={omega}; raise the cutoff",
            stable.len()
        )));
    }
    Ok(result_from(stable, &reference, n, tol))
}

/// Relative drift between cutoffs beyond which an eigenvalue is discarded.
const SPURIOUS_RELATIVE_SHIFT: f64 = 1e-4;

pub const DEFAULT_MASSLESS_CUTOFF: usize = 120;

/// Basis scale on `grid` that minimizes the ground level's cutoff sensitivity.
pub fn select_massless_scale(n: usize, grid: &[f64]) -> Result<f64> {
    let model = build_model(ModelId::Cubic1d);
    let mut best: Option<(f64, f64)> = None;
    for &omega in grid {
        let a = lowest(&assemble(&model, 1.0, n, omega, 0.0, DEFAULT_DIMENSION_CAP)?, 1)?[0];
        let b = lowest(&assemble(&model, 1.0, n + 4, omega, 0.0, DEFAULT_DIMENSION_CAP)?, 1)?[0];
        let change = (a - b).norm();
        if best.is_none_or(|(_, c)| change < c) {
            best = Some((omega, change));
        }
    }
    best.map(|(o, _)| o).ok_or_else(|| Error::InvalidArgument("empty scale grid".into()))
}

pub const MASSLESS_SCALE_GRID: [f64; 7] = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0];

/// Σ_{n<k} 1/Eₙ for k = 1..=levels.len() (real parts).
pub fn zeta_partial_sums(levels: &[c64]) -> Vec<f64> {
    levels
        .iter()
        .scan(0.0, |acc, e| {
            *acc += (c64::new(1.0, 0.0) / e).re;
            Some(*acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn position_matrix_entries() {
        let x = position_matrix(2, 1.0).unwrap();
        assert!((x[0][1] - 0.5f64.sqrt()).abs() < 1e-15);
        let x = position_matrix(4, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(x[i][j], x[j][i]);
            }
        }
        assert!((mat_mul(&x, &x)[0][0] - 0.5).abs() < 1e-15);
        assert!(position_matrix(1, 1.0).is_err());
    }

    #[test]
    fn exact_powers_do_not_see_truncation() {
        // ⟨N−1|x²|N−1⟩ = (2N−1)/(2Ω) exactly, unlike the naive squared truncation
        let n = 5;
        let x2 = position_power(n, 2.0, 2).unwrap();
        assert!((x2[n - 1][n - 1] - (2 * n - 1) as f64 / 4.0).abs() < 1e-14);
    }

    #[test]
    fn free_hamiltonian_is_diagonal() {
        let p = SpectralProblem::new(ModelId::Xy2, 0.0, 8).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        assert_eq!(h[(0, 0)], c64::new(2.0, 0.0));
        for i in 0..64 {
            let (a, b) = (i / 8, i % 8);
            assert!((h[(i, i)].re - (2 * (a + b) + 2) as f64).abs() < 1e-12);
            for j in 0..64 {
                if i != j {
                    assert!(h[(i, j)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn complex_symmetric_exactly() {
        let p = SpectralProblem::new(ModelId::Xyz, 0.3, 6).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
    }

    #[test]
    fn dimension_cap() {
        let p = SpectralProblem::new(ModelId::Xyz, 0.1, 20).unwrap();
        assert!(matches!(build_hamiltonian(&p), Err(Error::DimensionOverflow { dim: 8000, .. })));
    }

    #[test]
    fn oscillator_degeneracy_3d() {
        let p = SpectralProblem::new(ModelId::Xyz, 0.0, 6).unwrap();
        let r = low_levels(&p, 4).unwrap();
        let re: Vec<f64> = r.eigenvalues.iter().map(|e| e.re).collect();
        for (got, want) in re.iter().zip([3.0, 5.0, 5.0, 5.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_blocks() {
        let model = build_model(ModelId::Xyz);
        let h = assemble(&model, 0.3, 4, 1.0, 1.0, DEFAULT_DIMENSION_CAP).unwrap();
        assert_eq!(h.components().len(), 4);
        let model = build_model(ModelId::Cubic1d);
        let h = assemble(&model, 0.3, 6, 1.0, 1.0, DEFAULT_DIMENSION_CAP).unwrap();
        assert_eq!(h.components().len(), 1);
    }

    #[test]
    fn block_solve_matches_full_dense() {
        let p = SpectralProblem::new(ModelId::HenonHeiles, 0.3, 8).unwrap();
        let mut full = build_hamiltonian(&p).unwrap().eigenvalues().unwrap();
        full.sort_by(|a, b| a.re.total_cmp(&b.re));
        let r = low_levels(&p, 6).unwrap();
        for (a, b) in r.eigenvalues.iter().zip(&full) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn coupling_sign_symmetry() {
        for model in ModelId::ALL {
            let n = if model.dimension() == 3 {
                6
            } else if model.dimension() == 2 {
                10
            } else {
                30
            };
            let a = low_levels(&SpectralProblem::new(model, 0.3, n).unwrap(), 4).unwrap();
            let b = low_levels(&SpectralProblem::new(model, -0.3, n).unwrap(), 4).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).norm() < 1e-9, "{model}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn ground_state_slope_matches_first_coefficient() {
        // finite-difference [E(g) − d]/g² at two couplings, extrapolated linearly in g²
        for model in ModelId::ALL {
            let series = crate::series::EnergySeries::compute(model, 1).unwrap();
            let c1 = to_f64(series.coefficient(1).unwrap());
            let n = match model.dimension() {
                1 => 30,
                2 => 14,
                _ => 8,
            };
            let slope = |g: f64| {
                let r = low_levels(&SpectralProblem::new(model, g, n).unwrap(), 1).unwrap();
                (r.eigenvalues[0].re - model.dimension() as f64) / (g * g)
            };
            let (s1, s2) = (slope(0.05), slope(0.025));
            let extrapolated = (4.0 * s2 - s1) / 3.0;
            assert!((extrapolated - c1).abs() < 1e-3, "{model}: {extrapolated} vs {c1}");
        }
    }

    #[test]
    fn tracking_follows_crossing_free_curves() {
        let sweeps = vec![
            vec![c64::new(1.0, 0.0), c64::new(2.0, 0.0)],
            vec![c64::new(1.1, 0.0), c64::new(2.1, 0.0)],
            vec![c64::new(1.2, 0.0), c64::new(2.3, 0.0)],
        ];
        let curves = track_levels(&sweeps);
        assert_eq!(curves[1][2], c64::new(2.3, 0.0));
    }

    #[test]
    fn massless_levels_are_real_and_increasing() {
        let r = massless_cubic_levels(100, 2.0, 8).unwrap();
        assert!(r.all_converged());
        assert!(r.max_abs_imag_low < 1e-6);
        // lowest level of p² + i x³ (published reference value)
        assert!((r.eigenvalues[0].re - 1.156_267_071_988_1).abs() < 1e-9);
        assert!(r.eigenvalues.windows(2).all(|w| w[0].re < w[1].re));
    }

    #[test]
    fn massless_ground_is_scale_independent() {
        let a = massless_cubic_levels(100, 1.5, 1).unwrap().eigenvalues[0];
        let b = massless_cubic_levels(100, 2.5, 1).unwrap().eigenvalues[0];
        assert!((a - b).norm() < 1e-6);
    }

    #[test]
    fn partial_sums_accumulate() {
        let s = zeta_partial_sums(&[c64::new(2.0, 0.0), c64::new(4.0, 0.0)]);
        assert_eq!(s, vec![0.5, 0.75]);
    }
}
