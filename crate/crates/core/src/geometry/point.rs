use nalgebra::{Matrix2, Vector2, Vector3};

use super::chart::Chart;
use super::GeometryError;
use crate::scalar::{lit, Real};

/// Three-index array indexed `[upper][lower][lower]`.
pub type Tensor3<T> = [[[T; 2]; 2]; 2];

/// Metric frame at a point: covariant and contravariant bases and the
/// first fundamental form.
#[derive(Clone, Debug)]
pub struct Frames<T: Real> {
    /// `a_1, a_2, a_3`.
    pub a_cov: [Vector3<T>; 3],
    /// `a^1, a^2, a^3`.
    pub a_con: [Vector3<T>; 3],
    pub a_lower: Matrix2<T>,
    pub a_upper: Matrix2<T>,
    pub det_a: T,
}

/// Every differential-geometric quantity the strain operators need at one
/// parameter point.
#[derive(Clone, Debug)]
pub struct GeometryPoint<T: Real> {
    pub x: Vector2<T>,
    pub position: Vector3<T>,
    pub a_cov: [Vector3<T>; 3],
    pub a_con: [Vector3<T>; 3],
    pub a_lower: Matrix2<T>,
    pub a_upper: Matrix2<T>,
    pub det_a: T,
    /// `b_{αβ}`.
    pub b_lower: Matrix2<T>,
    /// `b_mixed[(α, β)] = b^α_β`.
    pub b_mixed: Matrix2<T>,
    /// `c_{αβ} = b^γ_α b_{γβ}`.
    pub c_lower: Matrix2<T>,
    /// `gamma[γ][α][β] = Γ^γ_{αβ}`.
    pub gamma: Tensor3<T>,
    /// `db_partial[γ][α][β] = ∂_β b^γ_α`.
    pub db_partial: Tensor3<T>,
    /// `db_mixed[γ][α][β] = b^γ_{α|β}`.
    pub db_mixed: Tensor3<T>,
    /// True when the third partials came from finite differences.
    pub numeric_third: bool,
}

/// Relative threshold on `|a₁ × a₂| / (|a₁||a₂|)` below which the chart is
/// treated as degenerate.
pub const IMMERSION_TOL: f64 = 1e-10;

pub fn frames<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    x: &Vector2<T>,
) -> Result<Frames<T>, GeometryError> {
    let [a1, a2] = chart.tangents(x);
    let cross = a1.cross(&a2);
    let norm = cross.norm();
    let scale = a1.norm() * a2.norm();
    if !(norm > lit::<T>(IMMERSION_TOL) * scale) {
        return Err(GeometryError::DegenerateImmersion {
            x1: crate::scalar::to_f64(x[0]),
            x2: crate::scalar::to_f64(x[1]),
        });
    }
    let a3 = cross / norm;
    let a_lower = Matrix2::new(a1.dot(&a1), a1.dot(&a2), a2.dot(&a1), a2.dot(&a2));
    let det_a = a_lower.determinant();
    let a_upper = Matrix2::new(a_lower[(1, 1)], -a_lower[(0, 1)], -a_lower[(1, 0)], a_lower[(0, 0)])
        / det_a;
    let up1 = a1 * a_upper[(0, 0)] + a2 * a_upper[(0, 1)];
    let up2 = a1 * a_upper[(1, 0)] + a2 * a_upper[(1, 1)];
    Ok(Frames {
        a_cov: [a1, a2, a3],
        a_con: [up1, up2, a3],
        a_lower,
        a_upper,
        det_a,
    })
}

impl<T: Real> GeometryPoint<T> {
    pub fn new<C: Chart<T> + ?Sized>(chart: &C, x: &Vector2<T>) -> Result<Self, GeometryError> {
        let fr = frames(chart, x)?;
        let d2 = chart.second_partials(x);
        let d3 = chart.third_partials(x);
        let [a1, a2, a3] = fr.a_cov;
        let tang = [a1, a2];
        let up = [fr.a_con[0], fr.a_con[1]];

        let mut b_lower = Matrix2::zeros();
        let mut gamma = [[[T::zero(); 2]; 2]; 2];
        // first-kind symbols: gamma_first[ν][α][β] = a_ν · ∂_β a_α
        let mut gamma_first = [[[T::zero(); 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                b_lower[(a, b)] = a3.dot(&d2[a][b]);
                for g in 0..2 {
                    gamma[g][a][b] = up[g].dot(&d2[a][b]);
                    gamma_first[g][a][b] = tang[g].dot(&d2[a][b]);
                }
            }
        }
        let b_mixed = fr.a_upper * b_lower;
        let c_lower = b_mixed.transpose() * b_lower;

        // ∂_λ b_{αβ} = a₃·∂_λ∂_β a_α − b_{λν} Γ^ν_{αβ}  (Weingarten: ∂_λ a₃ = −b^μ_λ a_μ)
        let mut db_lower = [[[T::zero(); 2]; 2]; 2]; // [α][β][λ]
        for a in 0..2 {
            for b in 0..2 {
                for l in 0..2 {
                    let mut v = a3.dot(&d3[a][b][l]);
                    for n in 0..2 {
                        v -= b_lower[(l, n)] * gamma[n][a][b];
                    }
                    db_lower[a][b][l] = v;
                }
            }
        }
        // ∂_λ a^{αγ} = −a^{αμ} (∂_λ a_{μν}) a^{νγ},  ∂_λ a_{μν} = Γ_{ν,μλ} + Γ_{μ,νλ}
        let mut da_upper = [Matrix2::zeros(); 2];
        for (l, slot) in da_upper.iter_mut().enumerate() {
            let mut da_lower = Matrix2::zeros();
            for m in 0..2 {
                for n in 0..2 {
                    da_lower[(m, n)] = gamma_first[n][m][l] + gamma_first[m][n][l];
                }
            }
            *slot = -(fr.a_upper * da_lower * fr.a_upper);
        }
        let mut db_partial = [[[T::zero(); 2]; 2]; 2];
        for g in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut v = T::zero();
                    for m in 0..2 {
                        v += da_upper[b][(g, m)] * b_lower[(m, a)]
                            + fr.a_upper[(g, m)] * db_lower[m][a][b];
                    }
                    db_partial[g][a][b] = v;
                }
            }
        }
        let mut db_mixed = [[[T::zero(); 2]; 2]; 2];
        for g in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut v = db_partial[g][a][b];
                    for l in 0..2 {
                        v += gamma[g][l][b] * b_mixed[(l, a)] - gamma[l][a][b] * b_mixed[(g, l)];
                    }
                    db_mixed[g][a][b] = v;
                }
            }
        }

        Ok(GeometryPoint {
            x: *x,
            position: chart.position(x),
            a_cov: fr.a_cov,
            a_con: fr.a_con,
            a_lower: fr.a_lower,
            a_upper: fr.a_upper,
            det_a: fr.det_a,
            b_lower,
            b_mixed,
            c_lower,
            gamma,
            db_partial,
            db_mixed,
            numeric_third: chart.analytic_order() < 3,
        })
    }

    pub fn sqrt_a(&self) -> T {
        self.det_a.sqrt()
    }

    /// Covariant derivative `v_{α|β} = ∂_β v_α − Γ^γ_{αβ} v_γ` of a
    /// covector field given its values and parameter gradients
    /// (`grad[α][β] = ∂_β v_α`). Returned matrix is indexed `[(α, β)]`.
    pub fn covariant_derivative(&self, v: [T; 2], grad: [[T; 2]; 2]) -> Matrix2<T> {
        let mut out = Matrix2::zeros();
        for a in 0..2 {
            for b in 0..2 {
                out[(a, b)] =
                    grad[a][b] - self.gamma[0][a][b] * v[0] - self.gamma[1][a][b] * v[1];
            }
        }
        out
    }
}

/// `(b_{αβ}, b^α_β, c_{αβ})` at a point.
pub fn curvature<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    x: &Vector2<T>,
) -> Result<(Matrix2<T>, Matrix2<T>, Matrix2<T>), GeometryError> {
    let gp = GeometryPoint::new(chart, x)?;
    Ok((gp.b_lower, gp.b_mixed, gp.c_lower))
}

/// `Γ^γ_{αβ}` at a point, indexed `[γ][α][β]`.
pub fn christoffel<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    x: &Vector2<T>,
) -> Result<Tensor3<T>, GeometryError> {
    Ok(GeometryPoint::new(chart, x)?.gamma)
}

/// `b^γ_{α|β}` at a point, indexed `[γ][α][β]`.
///
/// Charts without analytic third partials go through central differencing
/// (accuracy around `1e-8`); a warning is logged in that case.
pub fn curvature_covariant_derivative<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    x: &Vector2<T>,
) -> Result<Tensor3<T>, GeometryError> {
    let gp = GeometryPoint::new(chart, x)?;
    if gp.numeric_third {
        log::warn!(
            "chart '{}' has no analytic third partials; b^γ_(α|β) from finite differences",
            chart.name()
        );
    }
    Ok(gp.db_mixed)
}
