use nalgebra::{Matrix2, Vector2};

use crate::dg::{FieldSample, Jet};
use crate::geometry::GeometryPoint;
use crate::scalar::{lit, Real};

/// Pointwise shell strains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrainState<T: Real> {
    /// Naghdi bending strain `ρ_{αβ}`.
    pub rho: Matrix2<T>,
    /// Membrane strain `γ_{αβ}`.
    pub gamma_m: Matrix2<T>,
    /// Transverse shear strain `τ_α`.
    pub tau: Vector2<T>,
    /// Koiter change of curvature `ρ^K_{αβ}`.
    pub rho_k: Matrix2<T>,
}

impl<T: Real> StrainState<T> {
    pub fn evaluate(gp: &GeometryPoint<T>, s: &FieldSample<T>) -> Self {
        let (rho, gamma_m, tau) = naghdi_strains(gp, s);
        StrainState {
            rho,
            gamma_m,
            tau,
            rho_k: koiter_bending(gp, s),
        }
    }

    /// Largest absolute entry over all four strains.
    pub fn max_abs(&self) -> T {
        let m = |a: &Matrix2<T>| a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        m(&self.rho)
            .max(m(&self.gamma_m))
            .max(m(&self.rho_k))
            .max(self.tau.x.abs())
            .max(self.tau.y.abs())
    }
}

fn covariant<T: Real>(gp: &GeometryPoint<T>, v: &[Jet<T>; 2]) -> Matrix2<T> {
    gp.covariant_derivative([v[0].value, v[1].value], [v[0].grad, v[1].grad])
}

fn sym<T: Real>(m: &Matrix2<T>) -> Matrix2<T> {
    (m + m.transpose()) * lit::<T>(0.5)
}

/// `(ρ, γ, τ)` of the Naghdi model.
pub fn naghdi_strains<T: Real>(
    gp: &GeometryPoint<T>,
    s: &FieldSample<T>,
) -> (Matrix2<T>, Matrix2<T>, Vector2<T>) {
    let theta = s.theta();
    let u = s.u();
    let w = s.w();
    let dtheta = covariant(gp, &theta);
    let du = covariant(gp, &u);
    let b = &gp.b_mixed;
    // bu[(α, β)] = b^γ_α u_{γ|β}
    let bu = b.transpose() * du;
    let rho = sym(&dtheta) - sym(&bu) + gp.c_lower * w.value;
    let gamma = sym(&du) - gp.b_lower * w.value;
    let uv = Vector2::new(u[0].value, u[1].value);
    let bu0 = b.transpose() * uv;
    let tau = Vector2::new(
        w.grad[0] + bu0.x + theta[0].value,
        w.grad[1] + bu0.y + theta[1].value,
    );
    (rho, gamma, tau)
}

/// Koiter change of curvature
/// `ρ^K_{αβ} = ∂²_{αβ}w − Γ^γ_{αβ}∂_γw + b^γ_{α|β}u_γ + b^γ_α u_{γ|β} + b^γ_β u_{γ|α} − c_{αβ}w`.
pub fn koiter_bending<T: Real>(gp: &GeometryPoint<T>, s: &FieldSample<T>) -> Matrix2<T> {
    let u = s.u();
    let w = s.w();
    let du = covariant(gp, &u);
    let b = &gp.b_mixed;
    let bu = b.transpose() * du;
    let hess = w.hessian();
    let mut out = Matrix2::zeros();
    for a in 0..2 {
        for be in 0..2 {
            let mut v = hess[a][be];
            for g in 0..2 {
                v -= gp.gamma[g][a][be] * w.grad[g];
                v += gp.db_mixed[g][a][be] * u[g].value;
            }
            v += bu[(a, be)] + bu[(be, a)] - gp.c_lower[(a, be)] * w.value;
            out[(a, be)] = v;
        }
    }
    out
}

/// Zero-shear rotation `θ_α = −∂_αw − b^γ_α u_γ` with its parameter
/// gradient `∂_βθ_α = −∂²_{αβ}w − ∂_β b^γ_α u_γ − b^γ_α ∂_β u_γ`.
/// Hessian entries of the returned jets are left at zero.
pub fn zero_shear_rotation<T: Real>(gp: &GeometryPoint<T>, s: &FieldSample<T>) -> [Jet<T>; 2] {
    let u = s.u();
    let w = s.w();
    let b = &gp.b_mixed;
    let hess = w.hessian();
    let mut out = [Jet::default(); 2];
    for a in 0..2 {
        let mut value = -w.grad[a];
        for g in 0..2 {
            value -= b[(g, a)] * u[g].value;
        }
        out[a].value = value;
        for be in 0..2 {
            let mut d = -hess[a][be];
            for g in 0..2 {
                d -= gp.db_partial[g][a][be] * u[g].value + b[(g, a)] * u[g].grad[be];
            }
            out[a].grad[be] = d;
        }
    }
    out
}
