use std::fmt::Write as _;

use nalgebra::{Matrix2, Vector2};

use crate::geometry::{ChartSpec, GeometryPoint};

use super::report::format_value;
use super::ExperimentError;

/// Fundamental forms and invariant residuals at one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryCheckRow {
    pub x: [f64; 2],
    pub a_lower: [f64; 3],
    pub b_lower: [f64; 3],
    pub c_lower: [f64; 3],
    pub det_a: f64,
    /// `max |a^{αγ}a_{γβ} − δ^α_β|` and `max |a^α·a_β − δ^α_β|`.
    pub metric_inverse: f64,
    /// `max |c_{αβ} − b_{αγ}a^{γδ}b_{δβ}|`.
    pub third_form: f64,
    /// `max |Γ^γ_{αβ} − Γ^γ_{βα}|` and `max |Γ^γ_{αβ} − a^γ·∂_βa_α|`.
    pub christoffel: f64,
    /// `max |b_{αβ} − a₃·∂_βa_α|` and the asymmetry of `b`.
    pub curvature: f64,
}

impl GeometryCheckRow {
    pub fn worst(&self) -> f64 {
        self.metric_inverse.max(self.third_form).max(self.christoffel).max(self.curvature)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryCheck {
    pub chart: String,
    pub rows: Vec<GeometryCheckRow>,
    pub tolerance: f64,
}

impl GeometryCheck {
    pub fn max_violation(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.worst()))
    }

    pub fn passed(&self) -> bool {
        self.max_violation() <= self.tolerance
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "x1,x2,a11,a12,a22,b11,b12,b22,c11,c12,c22,det_a,metric_inverse,third_form,christoffel,curvature\n",
        );
        for r in &self.rows {
            let values: Vec<String> = r
                .x
                .iter()
                .chain(&r.a_lower)
                .chain(&r.b_lower)
                .chain(&r.c_lower)
                .chain([&r.det_a, &r.metric_inverse, &r.third_form, &r.christoffel, &r.curvature])
                .map(|v| format_value(*v))
                .collect();
            let _ = writeln!(out, "{}", values.join(","));
        }
        out
    }
}

fn sym3(m: &Matrix2<f64>) -> [f64; 3] {
    [m[(0, 0)], m[(0, 1)], m[(1, 1)]]
}

fn max_abs(m: &Matrix2<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Relative residual scale: errors are divided by `1 + |reference|`.
fn rel(err: f64, scale: f64) -> f64 {
    err / (1.0 + scale.abs())
}

/// Evaluates the chart on an `n × n` grid of `[0,1]²` (the center for
/// `n = 1`) and measures every invariant relative to `1 + |value|`.
pub fn geometry_check(chart: &ChartSpec, n: usize) -> Result<GeometryCheck, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::Invalid("grid size must be positive".into()));
    }
    let c = chart.build::<f64>();
    let coord = |i: usize| if n == 1 { 0.5 } else { i as f64 / (n - 1) as f64 };
    let mut rows = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let x = Vector2::new(coord(i), coord(j));
            let gp = GeometryPoint::new(&*c, &x)?;
            let second = c.second_partials(&x);

            let mut metric_inverse = rel(max_abs(&(gp.a_upper * gp.a_lower - Matrix2::identity())), 0.0);
            for al in 0..2 {
                for be in 0..2 {
                    let delta = if al == be { 1.0 } else { 0.0 };
                    metric_inverse = metric_inverse.max(rel((gp.a_con[al].dot(&gp.a_cov[be]) - delta).abs(), 0.0));
                }
            }
            let bab = gp.b_lower * gp.a_upper * gp.b_lower;
            let third_form = rel(max_abs(&(gp.c_lower - bab)), max_abs(&bab));

            let mut christoffel = 0.0f64;
            let mut curvature = rel((gp.b_lower[(0, 1)] - gp.b_lower[(1, 0)]).abs(), 0.0);
            for g in 0..2 {
                for al in 0..2 {
                    for be in 0..2 {
                        let direct = gp.a_con[g].dot(&second[al][be]);
                        let value = gp.gamma[g][al][be];
                        christoffel = christoffel
                            .max(rel((value - gp.gamma[g][be][al]).abs(), value))
                            .max(rel((value - direct).abs(), direct));
                    }
                }
            }
            for al in 0..2 {
                for be in 0..2 {
                    let direct = gp.a_cov[2].dot(&second[al][be]);
                    curvature = curvature.max(rel((gp.b_lower[(al, be)] - direct).abs(), direct));
                }
            }
            rows.push(GeometryCheckRow {
                x: [x.x, x.y],
                a_lower: sym3(&gp.a_lower),
                b_lower: sym3(&gp.b_lower),
                c_lower: sym3(&gp.c_lower),
                det_a: gp.det_a,
                metric_inverse,
                third_form,
                christoffel,
                curvature,
            });
        }
    }
    Ok(GeometryCheck {
        chart: chart.name().to_string(),
        rows,
        tolerance: 1e-12,
    })
}
