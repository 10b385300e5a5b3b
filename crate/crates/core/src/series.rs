//! Exact Rayleigh–Schrödinger coefficients for the ground state.
//!
//! Writing ψ = exp(−|x|²/2)·Σₙ gⁿ Pₙ(x) for the real auxiliary Hamiltonian
//! `Σ(pᵢ² + xᵢ²) + g·W` turns the Schrödinger equation into, order by order,
//!
//! ```text
//! 2(x·∇)Pₙ − ∇²Pₙ + W·Pₙ₋₁ = Σ_{p=1..n} εₚ Pₙ₋ₚ
//! ```
//!
//! With the normalization aₙ,₀ = 0 (n ≥ 1) the constant-term equation yields
//! εₙ = −2 Σᵢ aₙ,₂ₑᵢ, and every other coefficient follows from entries of the
//! same order and higher degree:
//!
//! ```text
//! aₙ,ₘ = [ Σᵢ (mᵢ+1)(mᵢ+2) aₙ,ₘ₊₂ₑᵢ − Σ_w c_w aₙ₋₁,ₘ₋w + Σ_{p<n} εₚ aₙ₋ₚ,ₘ ] / 2|m|
//! ```
//!
//! so each order is filled from degree 3n down to 1. The coupling i·g of the
//! physical Hamiltonian is reinstated at assembly: g²ⁿ → (−1)ⁿ g²ⁿ.

use std::collections::HashMap;

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{build_model, Exponents, ModelId, ModelSpec};
use crate::rational::ExactRational;

/// Tuning knobs for the recursion; the defaults are what production code uses.
#[derive(Debug, Clone, Copy)]
pub struct RecursionOptions {
    /// Skip multi-indices whose parity cannot be reached at a given order.
    pub prune_parity: bool,
    /// Visit same-degree entries in reverse order (results must not change).
    pub reverse_schedule: bool,
    /// Rotate the same-degree visiting order by this many places.
    pub rotate_schedule: usize,
}

impl Default for RecursionOptions {
    fn default() -> Self {
        RecursionOptions { prune_parity: true, reverse_schedule: false, rotate_schedule: 0 }
    }
}

type OrderMap = HashMap<Exponents, ExactRational>;

/// Sparse table of the wavefunction polynomials Pₙ, n = 0..=max_order.
#[derive(Debug, Clone)]
pub struct CoefficientTensor {
    model: ModelSpec,
    max_order: usize,
    orders: Vec<OrderMap>,
    /// εₙ of the real auxiliary problem, εₙ = 0 for odd n.
    auxiliary_energy: Vec<ExactRational>,
}

impl CoefficientTensor {
    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn get(&self, order: usize, exponents: &Exponents) -> Option<&ExactRational> {
        self.orders.get(order)?.get(exponents)
    }

    /// Coefficient aₙ,ₘ, zero when absent.
    pub fn coefficient(&self, order: usize, exponents: &Exponents) -> ExactRational {
        self.get(order, exponents).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn order_len(&self, order: usize) -> usize {
        self.orders.get(order).map_or(0, HashMap::len)
    }

    pub fn len(&self) -> usize {
        self.orders.iter().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// εₙ of the real auxiliary theory `Σ(pᵢ²+xᵢ²) + g·W`.
    pub fn auxiliary_energy(&self, order: usize) -> Option<&ExactRational> {
        self.auxiliary_energy.get(order)
    }

    /// All entries of one order, sorted by multi-index.
    pub fn order_entries(&self, order: usize) -> Vec<(Exponents, &ExactRational)> {
        let mut entries: Vec<_> =
            self.orders.get(order).map(|m| m.iter().map(|(k, v)| (*k, v)).collect()).unwrap_or_default();
        entries.sort_by_key(|e| e.0);
        entries
    }

    /// Every (order, multi-index, value), sorted by order then multi-index.
    pub fn entries(&self) -> impl Iterator<Item = (usize, Exponents, &ExactRational)> + '_ {
        (0..=self.max_order).flat_map(move |n| self.order_entries(n).into_iter().map(move |(m, v)| (n, m, v)))
    }

    /// Rebuild a tensor from raw entries (used by deserialization); the
    /// auxiliary energies are recomputed from the quadratic coefficients.
    pub fn from_entries(
        model: ModelSpec,
        max_order: usize,
        entries: impl IntoIterator<Item = (usize, Exponents, ExactRational)>,
    ) -> Result<Self> {
        let mut orders = vec![OrderMap::new(); max_order + 1];
        for (n, m, v) in entries {
            if n > max_order {
                return Err(Error::Parse(format!("entry order {n} exceeds max_order {max_order}")));
            }
            if m[model.dimension..].iter().any(|&e| e != 0) {
                return Err(Error::Parse(format!("multi-index {m:?} exceeds model dimension")));
            }
            if degree(&m) > 3 * n as u32 {
                return Err(Error::Parse(format!("entry {m:?} above degree 3n at order {n}")));
            }
            if !v.is_zero() {
                orders[n].insert(m, v);
            }
        }
        let auxiliary_energy = (0..=max_order)
            .map(|n| if n == 0 { BigRational::zero() } else { energy_from_order(&orders[n], model.dimension) })
            .collect();
        Ok(CoefficientTensor { model, max_order, orders, auxiliary_energy })
    }
}

fn degree(m: &Exponents) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

fn unit2(axis: usize) -> Exponents {
    let mut m = [0; 3];
    m[axis] = 2;
    m
}

/// εₙ = −2 Σᵢ aₙ,₂ₑᵢ
fn energy_from_order(order: &OrderMap, dimension: usize) -> ExactRational {
    let sum = (0..dimension).filter_map(|axis| order.get(&unit2(axis))).fold(BigRational::zero(), |acc, v| acc + v);
    -(sum * BigInt::from(2))
}

/// Multi-indices of total degree `deg` in `dim` variables, optionally
/// restricted to a per-coordinate parity pattern.
fn monomials_of_degree(dim: usize, deg: u16, parity: Option<[u16; 3]>) -> Vec<Exponents> {
    let ok = |m: &Exponents| parity.is_none_or(|p| (0..dim).all(|i| m[i] % 2 == p[i]));
    let mut out = Vec::new();
    match dim {
        1 => out.push([deg, 0, 0]),
        2 => {
            for j in (0..=deg).rev() {
                out.push([j, deg - j, 0]);
            }
        }
        _ => {
            for j in (0..=deg).rev() {
                for k in (0..=deg - j).rev() {
                    out.push([j, k, deg - j - k]);
                }
            }
        }
    }
    out.retain(ok);
    out
}

pub fn compute_wavefunction_coefficients(model: &ModelSpec, max_order: usize) -> Result<CoefficientTensor> {
    compute_wavefunction_coefficients_with(model, max_order, RecursionOptions::default())
}

pub fn compute_wavefunction_coefficients_with(
    model: &ModelSpec,
    max_order: usize,
    options: RecursionOptions,
) -> Result<CoefficientTensor> {
    if max_order < 1 {
        return Err(Error::InvalidArgument("max_order must be at least 1".into()));
    }
    model.validate()?;
    if 3 * max_order > u16::MAX as usize {
        return Err(Error::InvalidArgument(format!("max_order {max_order} too large")));
    }
    let dim = model.dimension;
    let signature = model.parity_signature().expect("validated model has a parity signature");
    let source: Vec<(ExactRational, Exponents)> =
        model.perturbation.iter().map(|t| (t.coefficient.clone(), t.exponents)).collect();

    let mut orders: Vec<OrderMap> = Vec::with_capacity(max_order + 1);
    let mut ground = OrderMap::new();
    ground.insert([0; 3], BigRational::one());
    orders.push(ground);
    let mut energy = vec![BigRational::zero()];

    let mut scaled = vec![ScaledOrder::from_map(&orders[0])];

    for n in 1..=max_order {
        let parity = options.prune_parity.then(|| signature.map(|s| (s * (n as u16)) % 2));
        let lower = LowerOrderTerms::new(n, &energy, &scaled, &source);
        let mut current = OrderMap::new();

        for deg in (1..=(3 * n) as u16).rev() {
            let mut batch = monomials_of_degree(dim, deg, parity);
            if options.reverse_schedule {
                batch.reverse();
            }
            if !batch.is_empty() {
                let shift = options.rotate_schedule % batch.len();
                batch.rotate_left(shift);
            }
            let ctx = EntryContext { dim, current: &current, lower: &lower, scaled: &scaled };
            let values = compute_batch(&ctx, &batch);
            for (m, v) in batch.into_iter().zip(values) {
                if !v.is_zero() {
                    assert!(degree(&m) <= 3 * n as u32, "non-zero entry above degree 3n");
                    current.insert(m, v);
                }
            }
        }

        let eps = energy_from_order(&current, dim);
        if n % 2 == 1 && !eps.is_zero() {
            return Err(Error::Consistency(format!("odd-order energy correction ε_{n} = {eps} is non-zero")));
        }
        energy.push(eps);
        scaled.push(ScaledOrder::from_map(&current));
        orders.push(current);
    }

    Ok(CoefficientTensor { model: model.clone(), max_order, orders, auxiliary_energy: energy })
}

/// A completed order over its least common denominator.
struct ScaledOrder {
    denominator: BigInt,
    numerators: HashMap<Exponents, BigInt>,
}

impl ScaledOrder {
    fn from_map(map: &OrderMap) -> Self {
        let denominator = map.values().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numerators = map.iter().map(|(m, v)| (*m, v.numer() * (&denominator / v.denom()))).collect();
        ScaledOrder { denominator, numerators }
    }
}

/// The source term and the energy shifts only read completed orders, so for
/// a fixed order they are put over one denominator and each entry reduces to
/// integer multiply-adds plus a single normalization.
struct LowerOrderTerms {
    order: usize,
    denominator: BigInt,
    /// (n − p, εₚ scaled to `denominator`)
    shifts: Vec<(usize, BigInt)>,
    /// (w, −c_w scaled to `denominator`), applied to order n − 1
    source: Vec<(Exponents, BigInt)>,
}

impl LowerOrderTerms {
    fn new(
        order: usize,
        energy: &[ExactRational],
        scaled: &[ScaledOrder],
        source: &[(ExactRational, Exponents)],
    ) -> Self {
        let previous = &scaled[order - 1].denominator;
        let shift_dens: Vec<(usize, &ExactRational, BigInt)> = (1..order)
            .filter(|&p| !energy[p].is_zero())
            .map(|p| (order - p, &energy[p], energy[p].denom() * &scaled[order - p].denominator))
            .collect();
        let source_dens: Vec<(Exponents, &ExactRational, BigInt)> =
            source.iter().map(|(c, w)| (*w, c, c.denom() * previous)).collect();

        let denominator = shift_dens
            .iter()
            .map(|(_, _, d)| d)
            .chain(source_dens.iter().map(|(_, _, d)| d))
            .fold(BigInt::one(), |acc, d| acc.lcm(d));

        let shifts = shift_dens.into_iter().map(|(q, eps, d)| (q, eps.numer() * (&denominator / d))).collect();
        let source = source_dens.into_iter().map(|(w, c, d)| (w, -(c.numer() * (&denominator / d)))).collect();
        LowerOrderTerms { order, denominator, shifts, source }
    }
}

struct EntryContext<'a> {
    dim: usize,
    current: &'a OrderMap,
    lower: &'a LowerOrderTerms,
    scaled: &'a [ScaledOrder],
}

impl EntryContext<'_> {
    fn entry(&self, m: &Exponents) -> ExactRational {
        let lower = self.lower;
        let mut sum = BigInt::zero();
        for (q, factor) in &lower.shifts {
            if let Some(v) = self.scaled[*q].numerators.get(m) {
                sum += factor * v;
            }
        }
        let previous = &self.scaled[lower.order - 1].numerators;
        for (w, factor) in &lower.source {
            if (0..3).all(|i| m[i] >= w[i]) {
                let down = [m[0] - w[0], m[1] - w[1], m[2] - w[2]];
                if let Some(v) = previous.get(&down) {
                    sum += factor * v;
                }
            }
        }
        let mut acc = BigRational::new(sum, lower.denominator.clone());
        for axis in 0..self.dim {
            let mut up = *m;
            up[axis] += 2;
            if let Some(v) = self.current.get(&up) {
                let k = (m[axis] as u64 + 1) * (m[axis] as u64 + 2);
                acc += v * BigInt::from(k);
            }
        }
        if acc.is_zero() {
            return acc;
        }
        acc / BigInt::from(2 * degree(m))
    }
}

#[cfg(feature = "parallel")]
fn compute_batch(ctx: &EntryContext<'_>, batch: &[Exponents]) -> Vec<ExactRational> {
    use rayon::prelude::*;
    if batch.len() < 16 {
        return batch.iter().map(|m| ctx.entry(m)).collect();
    }
    batch.par_iter().map(|m| ctx.entry(m)).collect()
}

#[cfg(not(feature = "parallel"))]
fn compute_batch(ctx: &EntryContext<'_>, batch: &[Exponents]) -> Vec<ExactRational> {
    batch.iter().map(|m| ctx.entry(m)).collect()
}

/// Ground-state energy series E(g) ≍ Σₙ cₙ g²ⁿ of the i·g-coupled Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub model: ModelId,
    pub coefficients: Vec<ExactRational>,
}

impl EnergySeries {
    /// Highest n with a computed cₙ.
    pub fn max_order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn coefficient(&self, n: usize) -> Option<&ExactRational> {
        self.coefficients.get(n)
    }

    /// Tensor to order 2·max_order, then assembled.
    pub fn compute(id: ModelId, max_order: usize) -> Result<Self> {
        let model = build_model(id);
        if max_order == 0 {
            return Ok(EnergySeries { model: id, coefficients: vec![model.unperturbed_energy] });
        }
        let tensor = compute_wavefunction_coefficients(&model, 2 * max_order)?;
        energy_series(&tensor, max_order)
    }

    /// n ≥ 1 with sign(cₙ) ≠ (−1)ⁿ⁺¹.
    pub fn alternation_violations(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(n, c)| {
                let expected_positive = n % 2 == 1;
                c.is_zero() || c.is_positive() != expected_positive
            })
            .map(|(n, _)| n)
            .collect()
    }
}

/// Default depth (in powers of g²) per model.
pub fn default_series_order(id: ModelId) -> usize {
    match id {
        ModelId::Cubic1d => 60,
        ModelId::Xy2 | ModelId::HenonHeiles => 45,
        ModelId::Xyz => 30,
    }
}

/// cₙ = (−1)ⁿ ε₂ₙ = 2(−1)ⁿ⁺¹ Σᵢ a₂ₙ,₂ₑᵢ, c₀ = d.
pub fn energy_series(tensor: &CoefficientTensor, max_order_in_g2: usize) -> Result<EnergySeries> {
    if 2 * max_order_in_g2 > tensor.max_order {
        return Err(Error::InsufficientData(format!(
            "energy order {max_order_in_g2} in g² needs wavefunction order {}, tensor has {}",
            2 * max_order_in_g2,
            tensor.max_order
        )));
    }
    for n in (1..=2 * max_order_in_g2).step_by(2) {
        if !tensor.auxiliary_energy[n].is_zero() {
            return Err(Error::Consistency(format!("odd-order energy correction at order {n}")));
        }
    }
    let mut coefficients = vec![tensor.model.unperturbed_energy.clone()];
    for n in 1..=max_order_in_g2 {
        let eps = tensor.auxiliary_energy[2 * n].clone();
        coefficients.push(if n % 2 == 0 { eps } else { -eps });
    }
    Ok(EnergySeries { model: tensor.model.id, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn series(id: ModelId, n: usize) -> EnergySeries {
        EnergySeries::compute(id, n).unwrap()
    }

    #[test]
    fn zeroth_order_is_ground_state() {
        for id in ModelId::ALL {
            let t = compute_wavefunction_coefficients(&build_model(id), 1).unwrap();
            assert_eq!(t.coefficient(0, &[0, 0, 0]), int(1));
            assert_eq!(t.order_len(0), 1);
            assert!(t.get(1, &[0, 0, 0]).is_none());
        }
    }

    #[test]
    fn first_order_xyz_by_substitution() {
        // P₁ = c·xyz: 2(x∂x+y∂y+z∂z)P₁ = 6c·xyz, ∇²P₁ = 0, so 6c + 1 = 0.
        let t = compute_wavefunction_coefficients(&build_model(ModelId::Xyz), 1).unwrap();
        assert_eq!(t.order_entries(1), vec![([1, 1, 1], &rat(-1, 6))]);
    }

    #[test]
    fn first_order_cubic_by_substitution() {
        // P₁ = a x³ + b x: 6a + 1 = 0 and 2b − 6a = 0.
        let t = compute_wavefunction_coefficients(&build_model(ModelId::Cubic1d), 1).unwrap();
        assert_eq!(t.coefficient(1, &[3, 0, 0]), rat(-1, 6));
        assert_eq!(t.coefficient(1, &[1, 0, 0]), rat(-1, 2));
        assert_eq!(t.order_len(1), 2);
    }

    #[test]
    fn rejects_bad_orders() {
        let m = build_model(ModelId::Xy2);
        assert!(compute_wavefunction_coefficients(&m, 0).is_err());
        let t = compute_wavefunction_coefficients(&m, 4).unwrap();
        assert!(matches!(energy_series(&t, 3), Err(Error::InsufficientData(_))));
        assert_eq!(energy_series(&t, 2).unwrap().coefficients.len(), 3);
    }

    #[test]
    fn cubic_first_coefficient_from_order_two_tensor() {
        let t = compute_wavefunction_coefficients(&build_model(ModelId::Cubic1d), 2).unwrap();
        assert_eq!(energy_series(&t, 1).unwrap().coefficients[1], rat(11, 16));
    }

    #[test]
    fn printed_low_order_coefficients() {
        let golden: [(ModelId, [(i64, i64); 5]); 3] = [
            (ModelId::Cubic1d, [(11, 16), (-465, 256), (39709, 4096), (-19250805, 262144), (2944491879, 4194304)]),
            (
                ModelId::Xy2,
                [(5, 48), (-223, 6912), (114407, 4976640), (-346266143, 14332723200), (2360833242959, 72236924928000)],
            ),
            (
                ModelId::Xyz,
                [(1, 48), (-7, 4608), (5069, 19906560), (-2441189, 38220595200), (8034211571, 385263599616000)],
            ),
        ];
        for (id, values) in golden {
            let s = series(id, 5);
            assert_eq!(s.coefficients[0], int(id.dimension() as i64));
            for (n, (num, den)) in values.iter().enumerate() {
                assert_eq!(s.coefficients[n + 1], rat(*num, *den), "{id} c_{}", n + 1);
            }
        }
    }

    #[test]
    fn xyz_permutation_symmetry() {
        let t = compute_wavefunction_coefficients(&build_model(ModelId::Xyz), 8).unwrap();
        for (n, m, v) in t.entries() {
            for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                let pm = [m[perm[0]], m[perm[1]], m[perm[2]]];
                assert_eq!(t.get(n, &pm), Some(v));
            }
        }
    }

    #[test]
    fn xy2_even_powers_of_y() {
        let t = compute_wavefunction_coefficients(&build_model(ModelId::Xy2), 10).unwrap();
        assert!(t.entries().all(|(_, m, _)| m[1] % 2 == 0));
        let t = compute_wavefunction_coefficients(&build_model(ModelId::HenonHeiles), 10).unwrap();
        assert!(t.entries().all(|(_, m, _)| m[1] % 2 == 0));
    }

    #[test]
    fn schedule_and_pruning_do_not_change_results() {
        for id in ModelId::ALL {
            let model = build_model(id);
            let n = if id == ModelId::Xyz { 6 } else { 9 };
            let base = compute_wavefunction_coefficients(&model, n).unwrap();
            let reversed = compute_wavefunction_coefficients_with(
                &model,
                n,
                RecursionOptions { prune_parity: true, reverse_schedule: true, rotate_schedule: 3 },
            )
            .unwrap();
            let unpruned = compute_wavefunction_coefficients_with(
                &model,
                n,
                RecursionOptions { prune_parity: false, ..Default::default() },
            )
            .unwrap();
            let a: Vec<_> = base.entries().collect();
            assert_eq!(a, reversed.entries().collect::<Vec<_>>());
            assert_eq!(a, unpruned.entries().collect::<Vec<_>>());
        }
    }

    #[test]
    fn degree_bound_holds() {
        let t = compute_wavefunction_coefficients(&build_model(ModelId::HenonHeiles), 12).unwrap();
        assert!(t.entries().all(|(n, m, _)| degree(&m) <= 3 * n as u32));
        assert!(t.entries().all(|(n, m, _)| n == 0 || degree(&m) > 0));
    }

    #[test]
    fn alternation_in_low_orders() {
        for id in ModelId::ALL {
            let s = series(id, 8);
            assert!(s.alternation_violations().is_empty(), "{id}");
        }
    }

    #[test]
    fn zero_order_series() {
        let s = EnergySeries::compute(ModelId::HenonHeiles, 0).unwrap();
        assert_eq!(s.coefficients, vec![int(2)]);
    }
}
