//! Gauss–Legendre rules on the unit interval and collapsed (Duffy) Gauss
//! rules on the reference triangle `(0,0), (1,0), (0,1)`.

use std::f64::consts::PI;

/// Quadrature rule on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct LineRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Quadrature rule on the reference triangle; weights sum to `1/2`.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl LineRule {
    /// `n`-point Gauss–Legendre rule, exact for polynomials of degree `2n − 1`.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Chebyshev-like initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            points[i] = 0.5 * (1.0 - x);
            points[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        LineRule { points, weights }
    }

    /// Smallest Gauss rule exact to `degree`.
    pub fn exact_to(degree: usize) -> Self {
        Self::gauss_legendre(degree / 2 + 1)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

impl TriangleRule {
    /// Collapsed Gauss rule exact for every polynomial of total degree `degree`.
    ///
    /// `(x, y) = (u(1 − v), v)` with Jacobian `1 − v`; the `v` direction
    /// therefore needs one extra degree of exactness.
    pub fn exact_to(degree: usize) -> Self {
        let gu = LineRule::exact_to(degree);
        let gv = LineRule::exact_to(degree + 1);
        let mut points = Vec::with_capacity(gu.points.len() * gv.points.len());
        let mut weights = Vec::with_capacity(points.capacity());
        for (&v, &wv) in gv.points.iter().zip(&gv.weights) {
            for (&u, &wu) in gu.points.iter().zip(&gu.weights) {
                points.push([u * (1.0 - v), v]);
                weights.push(wu * wv * (1.0 - v));
            }
        }
        TriangleRule {
            points,
            weights,
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    #[test]
    fn gauss_legendre_integrates_monomials() {
        for n in 1..=8 {
            let r = LineRule::gauss_legendre(n);
            assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for p in 0..2 * n {
                let q: f64 = r
                    .points
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(p as i32))
                    .sum();
                assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn triangle_rule_exact_on_monomials() {
        // ∫_T x^i y^j = i! j! / (i + j + 2)!
        for degree in [5, 7, 9, 11] {
            let r = TriangleRule::exact_to(degree);
            for i in 0..=degree {
                for j in 0..=degree - i {
                    let q: f64 = r
                        .points
                        .iter()
                        .zip(&r.weights)
                        .map(|(p, w)| w * p[0].powi(i as i32) * p[1].powi(j as i32))
                        .sum();
                    let exact = factorial(i) * factorial(j) / factorial(i + j + 2);
                    assert!((q - exact).abs() < 1e-13, "deg={degree} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn triangle_points_inside_and_weights_positive() {
        let r = TriangleRule::exact_to(9);
        for (p, w) in r.points.iter().zip(&r.weights) {
            assert!(*w > 0.0);
            assert!(p[0] > 0.0 && p[1] > 0.0 && p[0] + p[1] < 1.0);
        }
    }
}
