use nalgebra::{Matrix2, Matrix3};

use super::point::GeometryPoint;
use super::GeometryError;
use crate::scalar::{lit, Real};

/// Contravariant shell elasticity tensor
/// `a^{αβγδ} = μ(a^{αγ}a^{βδ} + a^{βγ}a^{αδ}) + 2μλ/(2μ+λ) a^{αβ}a^{γδ}`.
#[derive(Clone, Debug)]
pub struct ElasticTensor<T: Real> {
    pub components: [[[[T; 2]; 2]; 2]; 2],
    pub lame_lambda: T,
    pub lame_mu: T,
}

/// Index pairs grouped by the symmetric component they address: 11, 22, 12.
const PAIRS: [&[(usize, usize)]; 3] = [&[(0, 0)], &[(1, 1)], &[(0, 1), (1, 0)]];

impl<T: Real> ElasticTensor<T> {
    pub fn new(gp: &GeometryPoint<T>, lambda: T, mu: T) -> Result<Self, GeometryError> {
        if !(mu > T::zero()) || !(lambda >= T::zero()) {
            return Err(GeometryError::InvalidLame {
                lambda: crate::scalar::to_f64(lambda),
                mu: crate::scalar::to_f64(mu),
            });
        }
        let a = &gp.a_upper;
        let two = lit::<T>(2.0);
        let coupling = two * mu * lambda / (two * mu + lambda);
        let mut c = [[[[T::zero(); 2]; 2]; 2]; 2];
        for (al, ca) in c.iter_mut().enumerate() {
            for (be, cb) in ca.iter_mut().enumerate() {
                for (ga, cg) in cb.iter_mut().enumerate() {
                    for (de, cd) in cg.iter_mut().enumerate() {
                        *cd = mu * (a[(al, ga)] * a[(be, de)] + a[(be, ga)] * a[(al, de)])
                            + coupling * a[(al, be)] * a[(ga, de)];
                    }
                }
            }
        }
        Ok(ElasticTensor {
            components: c,
            lame_lambda: lambda,
            lame_mu: mu,
        })
    }

    /// `a^{αβλγ} s_{λγ} t_{αβ}` summed over all indices.
    pub fn bilinear(&self, s: &Matrix2<T>, t: &Matrix2<T>) -> T {
        let mut acc = T::zero();
        for al in 0..2 {
            for be in 0..2 {
                for la in 0..2 {
                    for ga in 0..2 {
                        acc += self.components[al][be][la][ga] * s[(la, ga)] * t[(al, be)];
                    }
                }
            }
        }
        acc
    }

    pub fn quadratic(&self, s: &Matrix2<T>) -> T {
        self.bilinear(s, s)
    }

    /// Matrix `V` such that `bilinear(s, t) = [t₁₁ t₂₂ t₁₂] V [s₁₁ s₂₂ s₁₂]ᵀ`
    /// whenever `s` and `t` are symmetric.
    pub fn voigt(&self) -> Matrix3<T> {
        let mut v = Matrix3::zeros();
        for (p, pp) in PAIRS.iter().enumerate() {
            for (q, qq) in PAIRS.iter().enumerate() {
                let mut acc = T::zero();
                for &(al, be) in pp.iter() {
                    for &(la, ga) in qq.iter() {
                        acc += self.components[al][be][la][ga];
                    }
                }
                v[(p, q)] = acc;
            }
        }
        v
    }
}
