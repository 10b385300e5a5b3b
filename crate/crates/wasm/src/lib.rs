//! Browser bindings: Padé energy curves, escape-potential grids and
//! low-lying levels of the truncated Hamiltonian.

use std::cell::RefCell;
use std::collections::BTreeMap;

use wasm_bindgen::prelude::*;

use ptcubic::analysis::{EnergyCurve, PadeForm};
use ptcubic::spectral::{low_levels as solve_low_levels, SpectralProblem};
use ptcubic::wkb::{mpep_directions, potential_grid as escape_grid};
use ptcubic::{EnergySeries, ModelId};

thread_local! {
    static SERIES: RefCell<BTreeMap<ModelId, EnergySeries>> = const { RefCell::new(BTreeMap::new()) };
}

fn model(id: &str) -> Result<ModelId, JsError> {
    id.parse().map_err(|e: ptcubic::Error| JsError::new(&e.to_string()))
}

fn js(e: ptcubic::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Series through `order`, reusing a deeper cached one.
fn series(id: ModelId, order: usize) -> Result<EnergySeries, JsError> {
    if let Some(s) = SERIES.with_borrow(|c| c.get(&id).filter(|s| s.max_order() >= order).cloned()) {
        return Ok(s);
    }
    let s = EnergySeries::compute(id, order).map_err(js)?;
    SERIES.with_borrow_mut(|c| c.insert(id, s.clone()));
    Ok(s)
}

/// Ground-state energy from the once-subtracted [l/m] Padé approximant on
/// `steps + 1` evenly spaced couplings in [0, g_max]. Poles come back as NaN.
#[wasm_bindgen]
pub fn energy_curve(model_id: &str, l: usize, m: usize, g_max: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    if !(g_max > 0.0 && g_max.is_finite()) || steps == 0 {
        return Err(JsError::new("need g_max > 0 and at least one step"));
    }
    let id = model(model_id)?;
    let form = PadeForm::OnceSubtracted;
    let curve = EnergyCurve::from_series(&series(id, form.series_order_needed(l, m))?, l, m, form).map_err(js)?;
    (0..=steps)
        .map(|i| {
            let p = curve.point(g_max * i as f64 / steps as f64).map_err(js)?;
            Ok(if p.pole { f64::NAN } else { p.value })
        })
        .collect()
}

/// Row-major V(x, y) = x² + y² − gW on [−extent, extent]², planar models only.
#[wasm_bindgen]
pub fn potential_grid(model_id: &str, g: f64, extent: f64, resolution: usize) -> Result<Vec<f64>, JsError> {
    Ok(escape_grid(model(model_id)?, g, extent, resolution).map_err(js)?.values)
}

/// Polar angles of the escape channels of a planar model.
#[wasm_bindgen]
pub fn mpep_angles(model_id: &str) -> Result<Vec<f64>, JsError> {
    let set = mpep_directions(model(model_id)?).map_err(js)?;
    set.angles.ok_or_else(|| JsError::new("escape angles exist only for planar models"))
}

/// Lowest `count` eigenvalues as [re₀, im₀, converged₀, re₁, …] with the flag as 0 or 1.
#[wasm_bindgen]
pub fn low_levels(model_id: &str, g: f64, cutoff: usize, count: usize) -> Result<Vec<f64>, JsError> {
    let problem = SpectralProblem::new(model(model_id)?, g, cutoff).map_err(js)?;
    let r = solve_low_levels(&problem, count).map_err(js)?;
    Ok(r.eigenvalues.iter().zip(&r.converged).flat_map(|(e, &c)| [e.re, e.im, if c { 1.0 } else { 0.0 }]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_starts_at_unperturbed_energy() {
        let e = energy_curve("xy2", 3, 3, 0.4, 4).ok().unwrap();
        assert_eq!(e.len(), 5);
        assert_eq!(e[0], 2.0);
        assert!(e[4] > e[0]);
    }

    #[test]
    fn levels_are_flattened_triples() {
        let v = low_levels("c1d", 0.2, 16, 3).ok().unwrap();
        assert_eq!(v.len(), 9);
        assert!(v[0] > 1.0 && v[2] == 1.0);
    }

    #[test]
    fn grid_and_angles_for_henon_heiles() {
        assert_eq!(potential_grid("hh", 0.3, 2.0, 5).ok().unwrap().len(), 25);
        assert_eq!(mpep_angles("hh").ok().unwrap().len(), 3);
    }
}
