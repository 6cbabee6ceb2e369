use nalgebra::{DMatrix, Vector2};

use crate::quadrature::TriangleRule;
use crate::scalar::{from_usize, lit, Real};

/// Value, gradient and Hessian `(∂₁₁, ∂₁₂, ∂₂₂)` of a scalar field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T: Real> {
    pub value: T,
    pub grad: [T; 2],
    pub hess: [T; 3],
}

impl<T: Real> Default for Jet<T> {
    fn default() -> Self {
        Jet {
            value: T::zero(),
            grad: [T::zero(); 2],
            hess: [T::zero(); 3],
        }
    }
}

impl<T: Real> Jet<T> {
    /// Full symmetric Hessian `[α][β] = ∂²_{αβ}`.
    pub fn hessian(&self) -> [[T; 2]; 2] {
        [[self.hess[0], self.hess[1]], [self.hess[1], self.hess[2]]]
    }

    pub fn scaled(&self, s: T) -> Self {
        Jet {
            value: self.value * s,
            grad: [self.grad[0] * s, self.grad[1] * s],
            hess: [self.hess[0] * s, self.hess[1] * s, self.hess[2] * s],
        }
    }

    pub fn add_scaled(&mut self, other: &Jet<T>, s: T) {
        self.value += other.value * s;
        for a in 0..2 {
            self.grad[a] += other.grad[a] * s;
        }
        for a in 0..3 {
            self.hess[a] += other.hess[a] * s;
        }
    }
}

/// Exponents `(a, b)` of the monomials `ξ^a η^b`, `a + b ≤ k`, graded by
/// total degree.
pub fn monomial_exponents(k: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity((k + 1) * (k + 2) / 2);
    for d in 0..=k {
        for b in 0..=d {
            out.push((d - b, b));
        }
    }
    out
}

/// `L²(τ)`-orthonormal polynomial basis of degree `k` on one triangle,
/// built from monomials in `((x - c)/h, (y - c)/h)`.
#[derive(Clone, Debug)]
pub struct ElementBasis<T: Real> {
    pub center: Vector2<T>,
    pub scale: T,
    pub degree: usize,
    exponents: Vec<(usize, usize)>,
    /// Row `i` holds the monomial coefficients of basis function `i`.
    coeffs: DMatrix<T>,
}

impl<T: Real> ElementBasis<T> {
    pub fn new(corners: &[Vector2<T>; 3], degree: usize, rule: &TriangleRule) -> Self {
        let center = (corners[0] + corners[1] + corners[2]) / lit::<T>(3.0);
        let scale = (corners[0] - corners[1])
            .norm()
            .max((corners[1] - corners[2]).norm())
            .max((corners[2] - corners[0]).norm());
        let exponents = monomial_exponents(degree);
        let nb = exponents.len();
        let mut basis = ElementBasis {
            center,
            scale,
            degree,
            exponents,
            coeffs: DMatrix::identity(nb, nb),
        };
        let (points, weights) = map_rule(corners, rule);
        // Two Cholesky passes: the second removes the round-off left by the
        // first on poorly scaled monomial Grams.
        for _ in 0..2 {
            let mut gram = DMatrix::<T>::zeros(nb, nb);
            let mut vals = vec![T::zero(); nb];
            for (x, &w) in points.iter().zip(&weights) {
                basis.values_into(x, &mut vals);
                for i in 0..nb {
                    for j in 0..=i {
                        gram[(i, j)] += w * vals[i] * vals[j];
                    }
                }
            }
            for i in 0..nb {
                for j in 0..i {
                    gram[(j, i)] = gram[(i, j)];
                }
            }
            let chol = gram
                .cholesky()
                .expect("monomial Gram of a nondegenerate triangle is positive definite");
            let l_inv = chol
                .l()
                .solve_lower_triangular(&DMatrix::identity(nb, nb))
                .expect("Cholesky factor is invertible");
            basis.coeffs = l_inv * &basis.coeffs;
        }
        basis
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    fn powers(&self, x: &Vector2<T>) -> (Vec<T>, Vec<T>) {
        let xi = (x.x - self.center.x) / self.scale;
        let eta = (x.y - self.center.y) / self.scale;
        let mut px = vec![T::one(); self.degree + 1];
        let mut py = vec![T::one(); self.degree + 1];
        for p in 1..=self.degree {
            px[p] = px[p - 1] * xi;
            py[p] = py[p - 1] * eta;
        }
        (px, py)
    }

    fn values_into(&self, x: &Vector2<T>, out: &mut [T]) {
        let (px, py) = self.powers(x);
        let nb = self.len();
        for (i, slot) in out.iter_mut().enumerate().take(nb) {
            let mut s = T::zero();
            for (j, &(a, b)) in self.exponents.iter().enumerate() {
                s += self.coeffs[(i, j)] * px[a] * py[b];
            }
            *slot = s;
        }
    }

    /// Jets of every basis function at `x`.
    pub fn eval(&self, x: &Vector2<T>) -> Vec<Jet<T>> {
        let (px, py) = self.powers(x);
        let h = self.scale;
        let h2 = h * h;
        let mono: Vec<Jet<T>> = self
            .exponents
            .iter()
            .map(|&(a, b)| {
                let fa = from_usize::<T>(a);
                let fb = from_usize::<T>(b);
                let p = |v: &[T], e: usize, d: usize| if e >= d { v[e - d] } else { T::zero() };
                Jet {
                    value: px[a] * py[b],
                    grad: [fa * p(&px, a, 1) * py[b] / h, fb * px[a] * p(&py, b, 1) / h],
                    hess: [
                        fa * (fa - T::one()) * p(&px, a, 2) * py[b] / h2,
                        fa * fb * p(&px, a, 1) * p(&py, b, 1) / h2,
                        fb * (fb - T::one()) * px[a] * p(&py, b, 2) / h2,
                    ],
                }
            })
            .collect();
        (0..self.len())
            .map(|i| {
                let mut jet = Jet::default();
                for (j, m) in mono.iter().enumerate() {
                    jet.add_scaled(m, self.coeffs[(i, j)]);
                }
                jet
            })
            .collect()
    }
}

/// Physical quadrature points and area-scaled weights on a triangle.
pub fn map_rule<T: Real>(corners: &[Vector2<T>; 3], rule: &TriangleRule) -> (Vec<Vector2<T>>, Vec<T>) {
    let e1 = corners[1] - corners[0];
    let e2 = corners[2] - corners[0];
    let jac = (e1.x * e2.y - e1.y * e2.x).abs();
    let points = rule
        .points
        .iter()
        .map(|p| corners[0] + e1 * lit::<T>(p[0]) + e2 * lit::<T>(p[1]))
        .collect();
    let weights = rule.weights.iter().map(|&w| lit::<T>(w) * jac).collect();
    (points, weights)
}
