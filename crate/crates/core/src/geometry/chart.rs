use nalgebra::{Vector2, Vector3};

use crate::scalar::{lit, Real};

/// First partials `[∂₁Φ, ∂₂Φ]`.
pub type Tangents<T> = [Vector3<T>; 2];
/// Second partials, `d[α][β] = ∂_β∂_α Φ`.
pub type SecondPartials<T> = [[Vector3<T>; 2]; 2];
/// Third partials, `d[α][β][λ] = ∂_λ∂_β∂_α Φ`.
pub type ThirdPartials<T> = [[[Vector3<T>; 2]; 2]; 2];

/// Smooth map from the planar parameter domain onto the shell mid-surface.
///
/// Only [`Chart::position`] is mandatory. Missing derivatives fall back to
/// central differences of the next lower order, with step
/// `ε^{1/3}·max(1, |x|)`. A chart that supplies analytic partials up to
/// order three should report it through [`Chart::analytic_order`] so that
/// callers can flag reduced-accuracy curvature derivatives.
pub trait Chart<T: Real>: Send + Sync {
    fn name(&self) -> &str;

    fn position(&self, x: &Vector2<T>) -> Vector3<T>;

    fn tangents(&self, x: &Vector2<T>) -> Tangents<T> {
        let mut out = [Vector3::zeros(); 2];
        for (alpha, slot) in out.iter_mut().enumerate() {
            let h = fd_step(x[alpha]);
            let (xp, xm) = shifted(x, alpha, h);
            *slot = (self.position(&xp) - self.position(&xm)) / (h + h);
        }
        out
    }

    fn second_partials(&self, x: &Vector2<T>) -> SecondPartials<T> {
        let mut out = [[Vector3::zeros(); 2]; 2];
        for beta in 0..2 {
            let h = fd_step(x[beta]);
            let (xp, xm) = shifted(x, beta, h);
            let (tp, tm) = (self.tangents(&xp), self.tangents(&xm));
            for alpha in 0..2 {
                out[alpha][beta] = (tp[alpha] - tm[alpha]) / (h + h);
            }
        }
        symmetrize2(&mut out);
        out
    }

    fn third_partials(&self, x: &Vector2<T>) -> ThirdPartials<T> {
        let mut out = [[[Vector3::zeros(); 2]; 2]; 2];
        for lambda in 0..2 {
            let h = fd_step(x[lambda]);
            let (xp, xm) = shifted(x, lambda, h);
            let (sp, sm) = (self.second_partials(&xp), self.second_partials(&xm));
            for alpha in 0..2 {
                for beta in 0..2 {
                    out[alpha][beta][lambda] = (sp[alpha][beta] - sm[alpha][beta]) / (h + h);
                }
            }
        }
        out
    }

    /// Highest derivative order implemented in closed form (0 = position only).
    fn analytic_order(&self) -> usize {
        0
    }
}

fn fd_step<T: Real>(coord: T) -> T {
    let scale = if coord.abs() > T::one() { coord.abs() } else { T::one() };
    T::default_epsilon().cbrt() * scale
}

fn shifted<T: Real>(x: &Vector2<T>, dir: usize, h: T) -> (Vector2<T>, Vector2<T>) {
    let mut xp = *x;
    let mut xm = *x;
    xp[dir] += h;
    xm[dir] -= h;
    (xp, xm)
}

fn symmetrize2<T: Real>(d: &mut SecondPartials<T>) {
    let mixed = (d[0][1] + d[1][0]) * lit::<T>(0.5);
    d[0][1] = mixed;
    d[1][0] = mixed;
}

/// The plane `Φ = (x₁, x₂, 0)`.
#[derive(Clone, Debug, Default)]
pub struct FlatPlate;

impl<T: Real> Chart<T> for FlatPlate {
    fn name(&self) -> &str {
        "flat"
    }
    fn position(&self, x: &Vector2<T>) -> Vector3<T> {
        Vector3::new(x[0], x[1], T::zero())
    }
    fn tangents(&self, _x: &Vector2<T>) -> Tangents<T> {
        [Vector3::x(), Vector3::y()]
    }
    fn second_partials(&self, _x: &Vector2<T>) -> SecondPartials<T> {
        [[Vector3::zeros(); 2]; 2]
    }
    fn third_partials(&self, _x: &Vector2<T>) -> ThirdPartials<T> {
        [[[Vector3::zeros(); 2]; 2]; 2]
    }
    fn analytic_order(&self) -> usize {
        3
    }
}

/// Circular cylinder `Φ = (R cos x₁, R sin x₁, x₂)`.
#[derive(Clone, Debug)]
pub struct Cylinder<T> {
    pub radius: T,
}

impl<T: Real> Chart<T> for Cylinder<T> {
    fn name(&self) -> &str {
        "cylinder"
    }
    fn position(&self, x: &Vector2<T>) -> Vector3<T> {
        let (s, c) = x[0].sin_cos();
        Vector3::new(self.radius * c, self.radius * s, x[1])
    }
    fn tangents(&self, x: &Vector2<T>) -> Tangents<T> {
        let (s, c) = x[0].sin_cos();
        let r = self.radius;
        [Vector3::new(-r * s, r * c, T::zero()), Vector3::z()]
    }
    fn second_partials(&self, x: &Vector2<T>) -> SecondPartials<T> {
        let (s, c) = x[0].sin_cos();
        let r = self.radius;
        let z = Vector3::zeros();
        [[Vector3::new(-r * c, -r * s, T::zero()), z], [z, z]]
    }
    fn third_partials(&self, x: &Vector2<T>) -> ThirdPartials<T> {
        let (s, c) = x[0].sin_cos();
        let r = self.radius;
        let z = Vector3::zeros();
        let mut d = [[[z; 2]; 2]; 2];
        d[0][0][0] = Vector3::new(r * s, -r * c, T::zero());
        d
    }
    fn analytic_order(&self) -> usize {
        3
    }
}

/// Sphere patch `Φ = R(cos x₁ cos x₂, sin x₁ cos x₂, sin x₂)`, away from the poles.
#[derive(Clone, Debug)]
pub struct SpherePatch<T> {
    pub radius: T,
}

impl<T: Real> Chart<T> for SpherePatch<T> {
    fn name(&self) -> &str {
        "sphere"
    }
    fn position(&self, x: &Vector2<T>) -> Vector3<T> {
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        Vector3::new(c1 * c2, s1 * c2, s2) * self.radius
    }
    fn tangents(&self, x: &Vector2<T>) -> Tangents<T> {
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        let r = self.radius;
        [
            Vector3::new(-s1 * c2, c1 * c2, T::zero()) * r,
            Vector3::new(-c1 * s2, -s1 * s2, c2) * r,
        ]
    }
    fn second_partials(&self, x: &Vector2<T>) -> SecondPartials<T> {
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        let r = self.radius;
        let d11 = Vector3::new(-c1 * c2, -s1 * c2, T::zero()) * r;
        let d12 = Vector3::new(s1 * s2, -c1 * s2, T::zero()) * r;
        let d22 = Vector3::new(-c1 * c2, -s1 * c2, -s2) * r;
        [[d11, d12], [d12, d22]]
    }
    fn third_partials(&self, x: &Vector2<T>) -> ThirdPartials<T> {
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        let r = self.radius;
        let zero = T::zero();
        // Φ₁₁₁, Φ₁₁₂ (= Φ₁₂₁ = Φ₂₁₁), Φ₁₂₂ (= Φ₂₁₂ = Φ₂₂₁), Φ₂₂₂
        let d111 = Vector3::new(s1 * c2, -c1 * c2, zero) * r;
        let d112 = Vector3::new(c1 * s2, s1 * s2, zero) * r;
        let d122 = Vector3::new(s1 * c2, -c1 * c2, zero) * r;
        let d222 = Vector3::new(c1 * s2, s1 * s2, -c2) * r;
        let mut d = [[[Vector3::zeros(); 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for l in 0..2 {
                    d[a][b][l] = match a + b + l {
                        0 => d111,
                        1 => d112,
                        2 => d122,
                        _ => d222,
                    };
                }
            }
        }
        d
    }
    fn analytic_order(&self) -> usize {
        3
    }
}

/// Hyperbolic paraboloid `Φ = (x₁, x₂, c·x₁x₂)`.
#[derive(Clone, Debug)]
pub struct HyperbolicParaboloid<T> {
    pub scale: T,
}

impl<T: Real> Chart<T> for HyperbolicParaboloid<T> {
    fn name(&self) -> &str {
        "paraboloid"
    }
    fn position(&self, x: &Vector2<T>) -> Vector3<T> {
        Vector3::new(x[0], x[1], self.scale * x[0] * x[1])
    }
    fn tangents(&self, x: &Vector2<T>) -> Tangents<T> {
        let (o, z) = (T::one(), T::zero());
        [
            Vector3::new(o, z, self.scale * x[1]),
            Vector3::new(z, o, self.scale * x[0]),
        ]
    }
    fn second_partials(&self, _x: &Vector2<T>) -> SecondPartials<T> {
        let z = Vector3::zeros();
        let mixed = Vector3::new(T::zero(), T::zero(), self.scale);
        [[z, mixed], [mixed, z]]
    }
    fn third_partials(&self, _x: &Vector2<T>) -> ThirdPartials<T> {
        [[[Vector3::zeros(); 2]; 2]; 2]
    }
    fn analytic_order(&self) -> usize {
        3
    }
}

/// Position-only wrapper that forces every derivative through the
/// finite-difference fallback. Used to test the fallback path.
pub struct PositionOnly<C>(pub C);

impl<T: Real, C: Chart<T>> Chart<T> for PositionOnly<C> {
    fn name(&self) -> &str {
        self.0.name()
    }
    fn position(&self, x: &Vector2<T>) -> Vector3<T> {
        self.0.position(x)
    }
}

/// Keeps analytic first and second partials but differences the third.
pub struct NumericThird<C>(pub C);

impl<T: Real, C: Chart<T>> Chart<T> for NumericThird<C> {
    fn name(&self) -> &str {
        self.0.name()
    }
    fn position(&self, x: &Vector2<T>) -> Vector3<T> {
        self.0.position(x)
    }
    fn tangents(&self, x: &Vector2<T>) -> Tangents<T> {
        self.0.tangents(x)
    }
    fn second_partials(&self, x: &Vector2<T>) -> SecondPartials<T> {
        self.0.second_partials(x)
    }
    fn analytic_order(&self) -> usize {
        2
    }
}

/// Rigidly rotated and translated copy of another chart.
pub struct RigidlyMoved<T: Real, C> {
    pub inner: C,
    pub rotation: nalgebra::Rotation3<T>,
    pub translation: Vector3<T>,
}

impl<T: Real, C: Chart<T>> Chart<T> for RigidlyMoved<T, C> {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn position(&self, x: &Vector2<T>) -> Vector3<T> {
        self.rotation * self.inner.position(x) + self.translation
    }
    fn tangents(&self, x: &Vector2<T>) -> Tangents<T> {
        self.inner.tangents(x).map(|v| self.rotation * v)
    }
    fn second_partials(&self, x: &Vector2<T>) -> SecondPartials<T> {
        self.inner.second_partials(x).map(|row| row.map(|v| self.rotation * v))
    }
    fn third_partials(&self, x: &Vector2<T>) -> ThirdPartials<T> {
        self.inner
            .third_partials(x)
            .map(|m| m.map(|row| row.map(|v| self.rotation * v)))
    }
    fn analytic_order(&self) -> usize {
        self.inner.analytic_order()
    }
}

impl<T: Real, C: Chart<T> + ?Sized> Chart<T> for Box<C> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn position(&self, x: &Vector2<T>) -> Vector3<T> {
        (**self).position(x)
    }
    fn tangents(&self, x: &Vector2<T>) -> Tangents<T> {
        (**self).tangents(x)
    }
    fn second_partials(&self, x: &Vector2<T>) -> SecondPartials<T> {
        (**self).second_partials(x)
    }
    fn third_partials(&self, x: &Vector2<T>) -> ThirdPartials<T> {
        (**self).third_partials(x)
    }
    fn analytic_order(&self) -> usize {
        (**self).analytic_order()
    }
}
