use nalgebra::Vector2;

use super::{Mesh, MeshError};
use crate::scalar::{lit, Real};

/// Circumradius over inradius, `R/r = abc·s / (4·Area²)`.
///
/// Returns `None` for a zero-area triangle.
pub fn shape_ratio<T: Real>(a: &Vector2<T>, b: &Vector2<T>, c: &Vector2<T>) -> Option<T> {
    let la = (b - c).norm();
    let lb = (c - a).norm();
    let lc = (a - b).norm();
    let u = b - a;
    let v = c - a;
    let area = (u.x * v.y - u.y * v.x).abs() * lit::<T>(0.5);
    if !(area > T::zero()) {
        return None;
    }
    let s = (la + lb + lc) * lit::<T>(0.5);
    Some(la * lb * lc * s / (lit::<T>(4.0) * area * area))
}

fn min_angle<T: Real>(p: [Vector2<T>; 3]) -> T {
    let mut best = T::pi();
    for i in 0..3 {
        let u = p[(i + 1) % 3] - p[i];
        let v = p[(i + 2) % 3] - p[i];
        let cross = (u.x * v.y - u.y * v.x).abs();
        best = best.min(cross.atan2(u.dot(&v)));
    }
    best
}

/// Shape-regularity metrics of a triangulation.
#[derive(Clone, Debug)]
pub struct RegularityReport<T: Real> {
    /// `R/r` per triangle.
    pub ratios: Vec<T>,
    /// Mesh regularity: the largest `R/r`.
    pub kappa: T,
    /// Smallest interior angle over all triangles, in radians.
    pub min_angle: T,
    /// `max h_τ / min h_τ`.
    pub quasi_uniformity: T,
}

impl<T: Real> Mesh<T> {
    pub fn shape_regularity(&self) -> Result<RegularityReport<T>, MeshError> {
        let mut ratios = Vec::with_capacity(self.triangles.len());
        let mut angle = T::pi();
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.corners(t);
            let ratio = shape_ratio(&a, &b, &c).ok_or(MeshError::DegenerateTriangle { index: t })?;
            ratios.push(ratio);
            angle = angle.min(min_angle([a, b, c]));
        }
        let kappa = ratios.iter().fold(T::zero(), |m, &r| m.max(r));
        Ok(RegularityReport {
            ratios,
            kappa,
            min_angle: angle,
            quasi_uniformity: self.max_h() / self.min_h(),
        })
    }
}
