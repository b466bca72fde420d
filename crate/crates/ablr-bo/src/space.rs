//! Search-space declaration and the encoded unit-cube representation.
//!
//! Every dimension maps into `[0, 1]`: continuous ranges min-max scale,
//! integer ranges scale and round on decode, ordinals map to their index
//! scaled to `[0, 1]`. The optimizer works entirely on encoded vectors;
//! black boxes and serialization see natural units.

use ndarray::{Array1, ArrayView1};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::BoError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DimensionKind {
    Continuous { lo: f64, hi: f64 },
    Integer { lo: i64, hi: i64 },
    /// Explicit value set, strictly sorted ascending.
    Ordinal { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dimension {
    pub name: String,
    #[serde(flatten)]
    pub kind: DimensionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub dims: Vec<Dimension>,
}

impl SearchSpace {
    pub fn new(dims: Vec<Dimension>) -> Result<Self, BoError> {
        let space = Self { dims };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<(), BoError> {
        if self.dims.is_empty() {
            return Err(BoError::InvalidSpace("no dimensions declared".into()));
        }
        for d in &self.dims {
            match &d.kind {
                DimensionKind::Continuous { lo, hi } => {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(BoError::InvalidSpace(format!(
                            "dimension '{}': need finite lo < hi, got [{lo}, {hi}]",
                            d.name
                        )));
                    }
                }
                DimensionKind::Integer { lo, hi } => {
                    if lo >= hi {
                        return Err(BoError::InvalidSpace(format!(
                            "dimension '{}': need lo < hi, got [{lo}, {hi}]",
                            d.name
                        )));
                    }
                }
                DimensionKind::Ordinal { values } => {
                    if values.is_empty() {
                        return Err(BoError::InvalidSpace(format!(
                            "dimension '{}': empty ordinal set",
                            d.name
                        )));
                    }
                    if !values.windows(2).all(|w| w[0] < w[1]) {
                        return Err(BoError::InvalidSpace(format!(
                            "dimension '{}': ordinal values must be strictly sorted",
                            d.name
                        )));
                    }
                    if values.iter().any(|v| !v.is_finite()) {
                        return Err(BoError::InvalidSpace(format!(
                            "dimension '{}': non-finite ordinal value",
                            d.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// True when dimension `j` is continuous (participates in local search).
    pub fn is_continuous(&self, j: usize) -> bool {
        matches!(self.dims[j].kind, DimensionKind::Continuous { .. })
    }

    pub fn has_continuous(&self) -> bool {
        (0..self.len()).any(|j| self.is_continuous(j))
    }

    /// Natural units -> unit cube. Errors when a value is outside the
    /// dimension's range or not a member of an ordinal set.
    pub fn encode(&self, point: &[f64]) -> Result<Array1<f64>, BoError> {
        if point.len() != self.len() {
            return Err(BoError::InvalidConfig(format!(
                "point has {} values, space has {} dimensions",
                point.len(),
                self.len()
            )));
        }
        let mut z = Array1::zeros(self.len());
        for (j, (d, &v)) in self.dims.iter().zip(point).enumerate() {
            z[j] = match &d.kind {
                DimensionKind::Continuous { lo, hi } => {
                    if !(v >= *lo && v <= *hi) {
                        return Err(BoError::InvalidConfig(format!(
                            "dimension '{}': {v} outside [{lo}, {hi}]",
                            d.name
                        )));
                    }
                    (v - lo) / (hi - lo)
                }
                DimensionKind::Integer { lo, hi } => {
                    let vi = v.round() as i64;
                    if (v - v.round()).abs() > 1e-9 || vi < *lo || vi > *hi {
                        return Err(BoError::InvalidConfig(format!(
                            "dimension '{}': {v} is not an integer in [{lo}, {hi}]",
                            d.name
                        )));
                    }
                    (vi - lo) as f64 / (hi - lo) as f64
                }
                DimensionKind::Ordinal { values } => {
                    let idx = values
                        .iter()
                        .position(|w| (w - v).abs() <= 1e-12 * w.abs().max(1.0))
                        .ok_or_else(|| {
                            BoError::InvalidConfig(format!(
                                "dimension '{}': {v} is not in the ordinal set",
                                d.name
                            ))
                        })?;
                    if values.len() == 1 {
                        0.0
                    } else {
                        idx as f64 / (values.len() - 1) as f64
                    }
                }
            };
        }
        Ok(z)
    }

    /// Unit cube -> natural units, snapping discrete dimensions to their
    /// nearest representable level.
    pub fn decode(&self, z: &ArrayView1<f64>) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.len());
        self.dims
            .iter()
            .zip(z.iter())
            .map(|(d, &u)| {
                let u = u.clamp(0.0, 1.0);
                match &d.kind {
                    DimensionKind::Continuous { lo, hi } => lo + u * (hi - lo),
                    DimensionKind::Integer { lo, hi } => {
                        (*lo + (u * (hi - lo) as f64).round() as i64) as f64
                    }
                    DimensionKind::Ordinal { values } => {
                        if values.len() == 1 {
                            values[0]
                        } else {
                            let idx = (u * (values.len() - 1) as f64).round() as usize;
                            values[idx.min(values.len() - 1)]
                        }
                    }
                }
            })
            .collect()
    }

    /// Project an arbitrary unit-cube vector onto the representable grid:
    /// clamp everything to `[0, 1]` and move discrete coordinates to the
    /// encoding of their nearest level.
    pub fn snap(&self, z: &mut Array1<f64>) {
        for (j, d) in self.dims.iter().enumerate() {
            let u = z[j].clamp(0.0, 1.0);
            z[j] = match &d.kind {
                DimensionKind::Continuous { .. } => u,
                DimensionKind::Integer { lo, hi } => {
                    let m = (hi - lo) as f64;
                    (u * m).round() / m
                }
                DimensionKind::Ordinal { values } => {
                    if values.len() == 1 {
                        0.0
                    } else {
                        let m = (values.len() - 1) as f64;
                        (u * m).round() / m
                    }
                }
            };
        }
    }

    /// Uniformly random representable point, in encoded coordinates.
    pub fn random_point(&self, rng: &mut impl Rng) -> Array1<f64> {
        let mut z = Array1::from_shape_fn(self.len(), |_| rng.gen::<f64>());
        self.snap(&mut z);
        z
    }

    pub fn names(&self) -> Vec<&str> {
        self.dims.iter().map(|d| d.name.as_str()).collect()
    }
}

/// Convenience constructors used all over the benchmarks.
pub fn continuous(name: &str, lo: f64, hi: f64) -> Dimension {
    Dimension { name: name.into(), kind: DimensionKind::Continuous { lo, hi } }
}

pub fn integer(name: &str, lo: i64, hi: i64) -> Dimension {
    Dimension { name: name.into(), kind: DimensionKind::Integer { lo, hi } }
}

pub fn ordinal(name: &str, values: Vec<f64>) -> Dimension {
    Dimension { name: name.into(), kind: DimensionKind::Ordinal { values } }
}
