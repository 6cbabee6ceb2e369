//! Discrete Korn-type constants for Naghdi and Koiter shell models on
//! discontinuous piecewise-polynomial spaces.
//!
//! Every numerical type is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix the common double-precision instances.

pub mod dg;
pub mod eigen;
pub mod experiments;
pub mod forms;
pub mod geometry;
pub mod mesh;
pub mod quadrature;
pub mod scalar;

pub type Mesh64 = mesh::Mesh<f64>;
pub type Mesh32 = mesh::Mesh<f32>;
pub type DgSpace64 = dg::DgSpace<f64>;
pub type DgSpace32 = dg::DgSpace<f32>;
pub type NormGram64 = forms::NormGram<f64>;
pub type NormGram32 = forms::NormGram<f32>;
pub type Pencil64 = eigen::Pencil<f64>;
pub type Pencil32 = eigen::Pencil<f32>;
pub type GeometryPoint64 = geometry::GeometryPoint<f64>;
pub type GeometryPoint32 = geometry::GeometryPoint<f32>;
pub type BoundaryPartition64 = mesh::BoundaryPartition<f64>;
