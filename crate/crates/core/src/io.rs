//! Serialization of results: exact JSON for series and tensors, CSV tables,
//! and the raw binary grid format.

use serde::{Deserialize, Serialize};

use crate::analysis::{CurvePoint, RatioRow};
use crate::error::{Error, Result};
use crate::model::{build_model, Exponents, ModelId};
use crate::rational::{to_decimal_string, RationalRepr};
use crate::series::{CoefficientTensor, EnergySeries};
use crate::spectral::SpectrumResult;
use crate::wkb::PotentialGrid;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Top-level JSON wrapper shared by every emitted document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<C, D> {
    pub tool_version: String,
    pub config: C,
    pub data: D,
}

impl<C, D> Envelope<C, D> {
    pub fn new(config: C, data: D) -> Self {
        Envelope { tool_version: TOOL_VERSION.to_string(), config, data }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// f64 in scientific notation with `digits` significant digits (at most 17).
pub fn fmt_f64(x: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    format!("{:.*e}", digits - 1, x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficient {
    pub n: usize,
    #[serde(flatten)]
    pub value: RationalRepr,
    /// Rounded decimal, informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub model: ModelId,
    pub coefficients: Vec<SeriesCoefficient>,
}

impl SeriesRecord {
    /// `digits = None` omits the decimal column.
    pub fn from_series(series: &EnergySeries, digits: Option<usize>) -> Self {
        SeriesRecord {
            model: series.model,
            coefficients: series
                .coefficients
                .iter()
                .enumerate()
                .map(|(n, c)| SeriesCoefficient {
                    n,
                    value: c.into(),
                    decimal: digits.map(|d| to_decimal_string(c, d)),
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<EnergySeries> {
        let mut coefficients = Vec::with_capacity(self.coefficients.len());
        for (expected, c) in self.coefficients.iter().enumerate() {
            if c.n != expected {
                return Err(Error::Parse(format!("coefficient index {} where {expected} was expected", c.n)));
            }
            coefficients.push(c.value.to_rational()?);
        }
        if coefficients.is_empty() {
            return Err(Error::Parse("empty series".into()));
        }
        Ok(EnergySeries { model: self.model, coefficients })
    }
}

pub fn series_to_json(series: &EnergySeries) -> Result<String> {
    Ok(serde_json::to_string(&SeriesRecord::from_series(series, None))?)
}

pub fn series_from_json(text: &str) -> Result<EnergySeries> {
    serde_json::from_str::<SeriesRecord>(text)?.to_series()
}

/// `[n, [j, k, l], num, den]`
pub type TensorEntry = (usize, Exponents, String, String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorRecord {
    pub model: ModelId,
    pub max_order: usize,
    pub entries: Vec<TensorEntry>,
}

impl TensorRecord {
    pub fn from_tensor(tensor: &CoefficientTensor) -> Self {
        TensorRecord {
            model: tensor.model().id,
            max_order: tensor.max_order(),
            entries: tensor.entries().map(|(n, m, v)| (n, m, v.numer().to_string(), v.denom().to_string())).collect(),
        }
    }

    pub fn to_tensor(&self) -> Result<CoefficientTensor> {
        let entries = self
            .entries
            .iter()
            .map(|(n, m, num, den)| {
                RationalRepr { num: num.clone(), den: den.clone() }.to_rational().map(|v| (*n, *m, v))
            })
            .collect::<Result<Vec<_>>>()?;
        CoefficientTensor::from_entries(build_model(self.model), self.max_order, entries)
    }
}

pub fn tensor_to_json(tensor: &CoefficientTensor) -> Result<String> {
    Ok(serde_json::to_string(&TensorRecord::from_tensor(tensor))?)
}

pub fn tensor_from_json(text: &str) -> Result<CoefficientTensor> {
    serde_json::from_str::<TensorRecord>(text)?.to_tensor()
}

fn csv_text(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// `g,E`; points at poles keep the row with an empty E.
pub fn curve_csv(points: &[CurvePoint], digits: usize) -> Result<String> {
    csv_text(
        &header(&["g", "E"]),
        points.iter().map(|p| {
            let e = match (&p.energy, p.pole) {
                (_, true) => String::new(),
                (Some(exact), false) => to_decimal_string(exact, digits),
                (None, false) => fmt_f64(p.value, digits),
            };
            vec![fmt_f64(p.g, digits), e]
        }),
    )
}

/// `n,ratio,richardson_k1,…,richardson_kK`
pub fn ratio_csv(rows: &[RatioRow], max_k: usize, digits: usize) -> Result<String> {
    let mut names = header(&["n", "ratio"]);
    names.extend((1..=max_k).map(|k| format!("richardson_k{k}")));
    csv_text(
        &names,
        rows.iter().map(|r| {
            let mut row = vec![r.n.to_string(), fmt_f64(r.ratio, digits)];
            row.extend(
                (0..max_k)
                    .map(|k| r.richardson.get(k).copied().flatten().map_or(String::new(), |v| fmt_f64(v, digits))),
            );
            row
        }),
    )
}

/// `g,level_index,re,im,converged`
pub fn spectrum_csv(sweep: &[(f64, SpectrumResult)], digits: usize) -> Result<String> {
    csv_text(
        &header(&["g", "level_index", "re", "im", "converged"]),
        sweep.iter().flat_map(|(g, r)| {
            r.eigenvalues.iter().zip(&r.converged).enumerate().map(move |(i, (e, c))| {
                vec![fmt_f64(*g, digits), i.to_string(), fmt_f64(e.re, digits), fmt_f64(e.im, digits), c.to_string()]
            })
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub g: f64,
    pub cutoff_used: usize,
    pub max_abs_imag_low: f64,
    pub levels: Vec<LevelRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level_index: usize,
    pub re: f64,
    pub im: f64,
    pub converged: bool,
}

impl SpectrumRecord {
    pub fn new(g: f64, r: &SpectrumResult) -> Self {
        SpectrumRecord {
            g,
            cutoff_used: r.cutoff_used,
            max_abs_imag_low: r.max_abs_imag_low,
            levels: r
                .eigenvalues
                .iter()
                .zip(&r.converged)
                .enumerate()
                .map(|(level_index, (e, &converged))| LevelRecord { level_index, re: e.re, im: e.im, converged })
                .collect(),
        }
    }
}

/// `x,y,V`
pub fn grid_csv(grid: &PotentialGrid, digits: usize) -> Result<String> {
    csv_text(
        &header(&["x", "y", "V"]),
        (0..grid.ny).flat_map(|iy| {
            (0..grid.nx).map(move |ix| {
                vec![
                    fmt_f64(grid.coordinate(ix), digits),
                    fmt_f64(grid.coordinate(iy), digits),
                    fmt_f64(grid.value(ix, iy), digits),
                ]
            })
        }),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub nx: usize,
    pub ny: usize,
    pub extent: f64,
}

/// Row-major little-endian f64 values.
pub fn grid_binary(grid: &PotentialGrid) -> Vec<u8> {
    grid.values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

pub fn grid_sidecar(grid: &PotentialGrid) -> GridSidecar {
    GridSidecar { nx: grid.nx, ny: grid.ny, extent: grid.extent }
}

pub fn read_grid_binary(bytes: &[u8], sidecar: &GridSidecar) -> Result<Vec<f64>> {
    if bytes.len() != 8 * sidecar.nx * sidecar.ny {
        return Err(Error::Parse(format!(
            "grid payload has {} bytes, expected {}",
            bytes.len(),
            8 * sidecar.nx * sidecar.ny
        )));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn series_round_trip() {
        let s = EnergySeries::compute(ModelId::Xyz, 5).unwrap();
        let back = series_from_json(&series_to_json(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let text = series_to_json(&s).unwrap();
        assert!(text.contains(r#""num":"1","den":"48""#), "{text}");
    }

    #[test]
    fn tensor_round_trip() {
        let t = crate::series::compute_wavefunction_coefficients(&build_model(ModelId::HenonHeiles), 6).unwrap();
        let text = tensor_to_json(&t).unwrap();
        let back = tensor_from_json(&text).unwrap();
        assert_eq!(back.len(), t.len());
        for (n, m, v) in t.entries() {
            assert_eq!(back.get(n, &m), Some(v));
        }
        for n in 0..=6 {
            assert_eq!(back.auxiliary_energy(n), t.auxiliary_energy(n));
        }
        assert!(text.contains("[1,[1,2,0],"), "{}", &text[..200]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(series_from_json(r#"{"model":"c1d","coefficients":[{"n":1,"num":"1","den":"2"}]}"#).is_err());
        assert!(series_from_json(r#"{"model":"c1d","coefficients":[{"n":0,"num":"1","den":"0"}]}"#).is_err());
        assert!(series_from_json(r#"{"model":"zz","coefficients":[]}"#).is_err());
    }

    #[test]
    fn csv_headers() {
        let grid = crate::wkb::potential_grid(ModelId::Xy2, 1.0, 1.0, 3).unwrap();
        let text = grid_csv(&grid, 6).unwrap();
        assert!(text.starts_with("x,y,V\n"));
        assert_eq!(text.lines().count(), 10);
        let bytes = grid_binary(&grid);
        assert_eq!(read_grid_binary(&bytes, &grid_sidecar(&grid)).unwrap(), grid.values);
        assert!(read_grid_binary(&bytes[1..], &grid_sidecar(&grid)).is_err());
    }

    #[test]
    fn float_formatting() {
        assert_eq!(fmt_f64(1.5, 3), "1.50e0");
        assert_eq!(fmt_f64(-0.001, 1), "-1e-3");
    }

    proptest! {
        #[test]
        fn rationals_survive_json(coeffs in prop::collection::vec((-10_000i64..10_000, 1i64..10_000), 1..12)) {
            let series = EnergySeries {
                model: ModelId::Xy2,
                coefficients: coeffs.iter().map(|&(n, d)| rat(n, d)).collect(),
            };
            let back = series_from_json(&series_to_json(&series).unwrap()).unwrap();
            prop_assert_eq!(back, series);
        }
    }
}
