//! Differential geometry of the shell mid-surface.
//!
//! A [`Chart`] maps the planar parameter domain onto the surface;
//! [`GeometryPoint`] evaluates the fundamental forms, Christoffel symbols
//! and the covariant derivative of the mixed curvature tensor at a point.

mod chart;
mod elastic;
mod point;

use thiserror::Error;

pub use chart::{
    Chart, Cylinder, FlatPlate, HyperbolicParaboloid, NumericThird, PositionOnly, RigidlyMoved,
    SecondPartials, SpherePatch, Tangents, ThirdPartials,
};
pub use elastic::ElasticTensor;
pub use point::{
    christoffel, curvature, curvature_covariant_derivative, frames, Frames, GeometryPoint,
    Tensor3, IMMERSION_TOL,
};

use crate::scalar::{lit, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate immersion at ({x1}, {x2}): tangents are linearly dependent")]
    DegenerateImmersion { x1: f64, x2: f64 },
    #[error("invalid Lamé coefficients lambda={lambda}, mu={mu} (need mu > 0, lambda >= 0)")]
    InvalidLame { lambda: f64, mu: f64 },
    #[error("unknown chart '{0}' (expected flat, cylinder, sphere or paraboloid)")]
    UnknownChart(String),
    #[error("chart parameter '{key}' not understood for chart '{chart}'")]
    UnknownParameter { chart: String, key: String },
}

/// Built-in charts selectable by name.
#[derive(Clone, Debug, PartialEq)]
pub enum ChartSpec {
    Flat,
    Cylinder { radius: f64 },
    Sphere { radius: f64 },
    Paraboloid { scale: f64 },
}

impl ChartSpec {
    /// Parses a chart name plus `key=value` parameters (`radius`, `scale`).
    pub fn parse(name: &str, params: &[(String, f64)]) -> Result<Self, GeometryError> {
        let mut spec = match name {
            "flat" | "plate" => ChartSpec::Flat,
            "cylinder" => ChartSpec::Cylinder { radius: 1.0 },
            "sphere" => ChartSpec::Sphere { radius: 1.0 },
            "paraboloid" | "hyperbolic-paraboloid" => ChartSpec::Paraboloid { scale: 1.0 },
            other => return Err(GeometryError::UnknownChart(other.to_string())),
        };
        for (key, value) in params {
            match (&mut spec, key.as_str()) {
                (ChartSpec::Cylinder { radius }, "radius") | (ChartSpec::Sphere { radius }, "radius") => {
                    *radius = *value
                }
                (ChartSpec::Paraboloid { scale }, "scale") => *scale = *value,
                _ => {
                    return Err(GeometryError::UnknownParameter {
                        chart: name.to_string(),
                        key: key.clone(),
                    })
                }
            }
        }
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ChartSpec::Flat => "flat",
            ChartSpec::Cylinder { .. } => "cylinder",
            ChartSpec::Sphere { .. } => "sphere",
            ChartSpec::Paraboloid { .. } => "paraboloid",
        }
    }

    pub fn build<T: Real>(&self) -> Box<dyn Chart<T>> {
        match *self {
            ChartSpec::Flat => Box::new(FlatPlate),
            ChartSpec::Cylinder { radius } => Box::new(Cylinder { radius: lit::<T>(radius) }),
            ChartSpec::Sphere { radius } => Box::new(SpherePatch { radius: lit::<T>(radius) }),
            ChartSpec::Paraboloid { scale } => {
                Box::new(HyperbolicParaboloid { scale: lit::<T>(scale) })
            }
        }
    }

    pub fn all_builtin() -> [ChartSpec; 4] {
        [
            ChartSpec::Flat,
            ChartSpec::Cylinder { radius: 1.0 },
            ChartSpec::Sphere { radius: 1.0 },
            ChartSpec::Paraboloid { scale: 1.0 },
        ]
    }
}

#[cfg(test)]
mod tests;
