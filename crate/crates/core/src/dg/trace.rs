use nalgebra::Vector2;

use super::FieldSample;
use crate::scalar::{lit, Real};

/// Two-sided traces of a discrete function on an interior edge.
///
/// Side 1 is the lower element index; `normal` points from side 1 into
/// side 2 and signed jumps are `trace₁ − trace₂`.
#[derive(Clone, Debug)]
pub struct EdgeTrace<T: Real> {
    pub edge: usize,
    pub points: Vec<Vector2<T>>,
    pub weights: Vec<T>,
    pub normal: Vector2<T>,
    pub tangent: Vector2<T>,
    pub side1: Vec<FieldSample<T>>,
    pub side2: Vec<FieldSample<T>>,
}

impl<T: Real> EdgeTrace<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn jump(&self, field: usize, q: usize) -> T {
        self.side1[q].jets[field].value - self.side2[q].jets[field].value
    }

    pub fn abs_jump(&self, field: usize, q: usize) -> T {
        self.jump(field, q).abs()
    }

    pub fn average(&self, field: usize, q: usize) -> T {
        (self.side1[q].jets[field].value + self.side2[q].jets[field].value) * lit::<T>(0.5)
    }

    /// `⟦v⟧_{n_α} = v₁n₁_α + v₂n₂_α` with `n₂ = −n₁`.
    pub fn normal_jump(&self, field: usize, q: usize) -> [T; 2] {
        let j = self.jump(field, q);
        [j * self.normal.x, j * self.normal.y]
    }

    /// `⟦∂_α v⟧` for both parameter directions.
    pub fn gradient_jump(&self, field: usize, q: usize) -> [T; 2] {
        let g1 = self.side1[q].jets[field].grad;
        let g2 = self.side2[q].jets[field].grad;
        [g1[0] - g2[0], g1[1] - g2[1]]
    }

    /// Tangential derivative jump `⟦∂_s v⟧`.
    pub fn tangential_jump(&self, field: usize, q: usize) -> T {
        let g = self.gradient_jump(field, q);
        g[0] * self.tangent.x + g[1] * self.tangent.y
    }

    /// Normal derivative jump `⟦∂_n v⟧`.
    pub fn normal_derivative_jump(&self, field: usize, q: usize) -> T {
        let g = self.gradient_jump(field, q);
        g[0] * self.normal.x + g[1] * self.normal.y
    }

    /// `∫_e ⟦v⟧²`.
    pub fn jump_l2_squared(&self, field: usize) -> T {
        (0..self.len()).fold(T::zero(), |s, q| {
            let j = self.jump(field, q);
            s + self.weights[q] * j * j
        })
    }
}
