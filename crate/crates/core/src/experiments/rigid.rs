use nalgebra::{Vector2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dg::{FieldLayout, FieldSample, Jet};
use crate::forms::{zero_shear_rotation, StrainState};
use crate::geometry::{Chart, ChartSpec, GeometryPoint};
use crate::quadrature::LineRule;
use crate::scalar::{lit, Real};

use super::ExperimentError;

fn displacement_jets<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    x: &Vector2<T>,
    c: &Vector3<T>,
    d: &Vector3<T>,
) -> Result<([Jet<T>; 2], Jet<T>), ExperimentError> {
    let gp = GeometryPoint::new(chart, x)?;
    let second = chart.second_partials(x);
    let disp = c + d.cross(&gp.position);
    let a = &gp.a_cov;
    let mut u = [Jet::default(); 2];
    for al in 0..2 {
        u[al].value = disp.dot(&a[al]);
        for be in 0..2 {
            u[al].grad[be] = d.cross(&a[be]).dot(&a[al]) + disp.dot(&second[al][be]);
        }
    }
    // ∂_β(V·a₃) = (d × a_β)·a₃ + V·∂_β a₃ with ∂_β a₃ = −b^γ_β a_γ
    let mut w = Jet {
        value: disp.dot(&a[2]),
        ..Jet::default()
    };
    for be in 0..2 {
        let mut dw = d.cross(&a[be]).dot(&a[2]);
        for g in 0..2 {
            dw -= gp.b_mixed[(g, be)] * u[g].value;
        }
        w.grad[be] = dw;
    }
    Ok((u, w))
}

/// Naghdi fields of the rigid motion `V = c + d × Φ`: `u_α = V·a_α`,
/// `w = V·a₃` and `θ_α = −∂_αw − b^β_α u_β`. First derivatives are exact;
/// the Hessian of `w` uses central differences of the exact gradient.
pub fn rigid_motion_sample<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    x: &Vector2<T>,
    c: &Vector3<T>,
    d: &Vector3<T>,
) -> Result<FieldSample<T>, ExperimentError> {
    let (u, mut w) = displacement_jets(chart, x, c, d)?;
    let h = T::default_epsilon().cbrt() * x.amax().max(T::one());
    let mut hess = [[T::zero(); 2]; 2];
    for be in 0..2 {
        let (mut xp, mut xm) = (*x, *x);
        xp[be] += h;
        xm[be] -= h;
        let (_, wp) = displacement_jets(chart, &xp, c, d)?;
        let (_, wm) = displacement_jets(chart, &xm, c, d)?;
        for al in 0..2 {
            hess[al][be] = (wp.grad[al] - wm.grad[al]) / (h + h);
        }
    }
    w.hess = [hess[0][0], (hess[0][1] + hess[1][0]) * lit::<T>(0.5), hess[1][1]];
    let gp = GeometryPoint::new(chart, x)?;
    let mut koiter = FieldSample::zero(FieldLayout::Koiter);
    koiter.jets[0] = u[0];
    koiter.jets[1] = u[1];
    koiter.jets[2] = w;
    let theta = zero_shear_rotation(&gp, &koiter);
    let mut s = FieldSample::zero(FieldLayout::Naghdi);
    s.jets[0] = theta[0];
    s.jets[1] = theta[1];
    s.jets[2] = u[0];
    s.jets[3] = u[1];
    s.jets[4] = w;
    Ok(s)
}

/// Largest strain entry of one rigid motion over the given points.
pub fn rigid_motion_max_strain<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    c: &Vector3<T>,
    d: &Vector3<T>,
    points: &[Vector2<T>],
) -> Result<T, ExperimentError> {
    let mut worst = T::zero();
    for x in points {
        let gp = GeometryPoint::new(chart, x)?;
        let s = rigid_motion_sample(chart, x, c, d)?;
        worst = worst.max(StrainState::evaluate(&gp, &s).max_abs());
    }
    Ok(worst)
}

/// `f²` of the Naghdi example seminorm with every edge of `∂[0,1]²`
/// clamped: `∫_{∂Ω} |θ|² + |u|² + w²` in parameter arc length.
pub fn rigid_motion_seminorm<T: Real, C: Chart<T> + ?Sized>(
    chart: &C,
    c: &Vector3<T>,
    d: &Vector3<T>,
) -> Result<T, ExperimentError> {
    let rule = LineRule::gauss_legendre(8);
    let corners = [
        Vector2::new(T::zero(), T::zero()),
        Vector2::new(T::one(), T::zero()),
        Vector2::new(T::one(), T::one()),
        Vector2::new(T::zero(), T::one()),
    ];
    let mut total = T::zero();
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        for (&s, &w) in rule.points.iter().zip(&rule.weights) {
            let x = a + (b - a) * lit::<T>(s);
            let sample = rigid_motion_sample(chart, &x, c, d)?;
            let sq = sample.jets.iter().fold(T::zero(), |acc, j| acc + j.value * j.value);
            total += lit::<T>(w) * sq;
        }
    }
    Ok(total)
}

/// Summary of [`rigid_motion_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct RigidMotionReport {
    pub chart: String,
    pub motions: usize,
    pub points_per_motion: usize,
    /// `max |strain| / (1 + |c| + |d|)` over all motions and points.
    pub max_scaled_strain: f64,
    pub max_strain: f64,
    /// Smallest `f² / (|c|² + |d|²)` over the motions.
    pub min_relative_seminorm: f64,
    /// Largest field or strain value of the zero motion.
    pub zero_motion_max: f64,
}

impl RigidMotionReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_scaled_strain <= tol && self.min_relative_seminorm > 0.0 && self.zero_motion_max == 0.0
    }
}

/// Random rigid motions with `c, d ∈ [−1, 1]³`, strains sampled at random
/// points of `[0.05, 0.95]²`.
pub fn rigid_motion_check(
    chart: &ChartSpec,
    motions: usize,
    points: usize,
    seed: u64,
) -> Result<RigidMotionReport, ExperimentError> {
    let chart_impl = chart.build::<f64>();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RigidMotionReport {
        chart: chart.name().to_string(),
        motions,
        points_per_motion: points,
        max_scaled_strain: 0.0,
        max_strain: 0.0,
        min_relative_seminorm: f64::INFINITY,
        zero_motion_max: 0.0,
    };
    let zero = Vector3::zeros();
    let probe = Vector2::new(0.3, 0.6);
    let s = rigid_motion_sample(&*chart_impl, &probe, &zero, &zero)?;
    let gp = GeometryPoint::new(&*chart_impl, &probe)?;
    let fields = s
        .jets
        .iter()
        .flat_map(|j| [j.value, j.grad[0], j.grad[1], j.hess[0], j.hess[1], j.hess[2]])
        .fold(0.0f64, |m, v| m.max(v.abs()));
    report.zero_motion_max = fields.max(StrainState::evaluate(&gp, &s).max_abs());
    for _ in 0..motions {
        let c = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let d = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let xs: Vec<Vector2<f64>> = (0..points)
            .map(|_| Vector2::new(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95)))
            .collect();
        let strain = rigid_motion_max_strain(&*chart_impl, &c, &d, &xs)?;
        report.max_strain = report.max_strain.max(strain);
        report.max_scaled_strain = report.max_scaled_strain.max(strain / (1.0 + c.norm() + d.norm()));
        let f2 = rigid_motion_seminorm(&*chart_impl, &c, &d)?;
        report.min_relative_seminorm = report.min_relative_seminorm.min(f2 / (c.norm_squared() + d.norm_squared()));
    }
    if motions == 0 {
        report.min_relative_seminorm = f64::NAN;
    }
    Ok(report)
}
