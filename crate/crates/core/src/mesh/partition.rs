use std::fmt;
use std::str::FromStr;

use super::{Mesh, MeshError};
use crate::scalar::Real;

/// Boundary condition type of a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Marker {
    /// Clamped.
    Dirichlet,
    /// Simply or soft-simply supported.
    Simple,
    Free,
}

impl Marker {
    pub fn from_code(code: i64) -> Result<Self, MeshError> {
        match code {
            1 => Ok(Marker::Dirichlet),
            2 => Ok(Marker::Simple),
            3 => Ok(Marker::Free),
            other => Err(MeshError::UnknownMarker(other)),
        }
    }

    pub fn code(self) -> i64 {
        match self {
            Marker::Dirichlet => 1,
            Marker::Simple => 2,
            Marker::Free => 3,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Marker::Dirichlet => 'D',
            Marker::Simple => 'S',
            Marker::Free => 'F',
        }
    }
}

impl FromStr for Marker {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "D" | "d" | "1" => Ok(Marker::Dirichlet),
            "S" | "s" | "2" => Ok(Marker::Simple),
            "F" | "f" | "3" => Ok(Marker::Free),
            other => Err(MeshError::BoundarySpec(other.to_string())),
        }
    }
}

/// Side of an axis-aligned boundary, read off the outward normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    West,
    East,
    South,
    North,
}

impl Side {
    const ALL: [Side; 4] = [Side::West, Side::East, Side::South, Side::North];

    fn index(self) -> usize {
        self as usize
    }

    fn of_normal<T: Real>(n: &nalgebra::Vector2<T>) -> Side {
        if n.x.abs() >= n.y.abs() {
            if n.x < T::zero() {
                Side::West
            } else {
                Side::East
            }
        } else if n.y < T::zero() {
            Side::South
        } else {
            Side::North
        }
    }

    fn name(self) -> &'static str {
        match self {
            Side::West => "west",
            Side::East => "east",
            Side::South => "south",
            Side::North => "north",
        }
    }
}

/// How boundary markers are assigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundarySpec {
    /// Same marker on every boundary edge.
    Uniform(Marker),
    /// Marker per side, chosen by outward normal; missing sides are clamped.
    PerSide([Option<Marker>; 4]),
    /// Markers carried by the mesh (edge file); unmarked edges are clamped.
    FromMesh,
}

impl FromStr for BoundarySpec {
    type Err = MeshError;

    /// Accepts `D`, `S`, `F`, `file`, or `west=D,east=F,...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("file") || s.eq_ignore_ascii_case("mesh") {
            return Ok(BoundarySpec::FromMesh);
        }
        if !s.contains('=') {
            return s.parse().map(BoundarySpec::Uniform);
        }
        let mut sides = [None; 4];
        for item in s.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| MeshError::BoundarySpec(item.to_string()))?;
            let side = Side::ALL
                .into_iter()
                .find(|side| side.name() == key.trim())
                .ok_or_else(|| MeshError::BoundarySpec(key.to_string()))?;
            sides[side.index()] = Some(value.parse()?);
        }
        Ok(BoundarySpec::PerSide(sides))
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundarySpec::Uniform(m) => write!(f, "{}", m.letter()),
            BoundarySpec::FromMesh => f.write_str("file"),
            BoundarySpec::PerSide(sides) => {
                let parts: Vec<String> = Side::ALL
                    .iter()
                    .filter_map(|s| sides[s.index()].map(|m| format!("{}={}", s.name(), m.letter())))
                    .collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// Assignment of every boundary edge to exactly one of D, S, F.
#[derive(Clone, Debug)]
pub struct BoundaryPartition<T: Real> {
    /// Marker per mesh edge; `None` for interior edges.
    pub markers: Vec<Option<Marker>>,
    pub dirichlet: Vec<usize>,
    pub simple: Vec<usize>,
    pub free: Vec<usize>,
    /// Total parameter length of the clamped edges.
    pub dirichlet_measure: T,
}

impl<T: Real> BoundaryPartition<T> {
    pub fn new(mesh: &Mesh<T>, spec: &BoundarySpec) -> Self {
        let mut markers = vec![None; mesh.edges.len()];
        let mut defaulted = 0usize;
        for &e in &mesh.boundary_edges {
            let edge = &mesh.edges[e];
            let marker = match spec {
                BoundarySpec::Uniform(m) => Some(*m),
                BoundarySpec::PerSide(sides) => sides[Side::of_normal(&edge.normal).index()],
                BoundarySpec::FromMesh => edge.tag.and_then(|t| Marker::from_code(t).ok()),
            };
            markers[e] = Some(marker.unwrap_or_else(|| {
                defaulted += 1;
                Marker::Dirichlet
            }));
        }
        if defaulted > 0 {
            log::warn!("{defaulted} boundary edges carry no marker and are treated as clamped");
        }
        Self::from_markers(mesh, markers)
    }

    pub fn uniform(mesh: &Mesh<T>, marker: Marker) -> Self {
        Self::new(mesh, &BoundarySpec::Uniform(marker))
    }

    fn from_markers(mesh: &Mesh<T>, markers: Vec<Option<Marker>>) -> Self {
        let mut dirichlet = Vec::new();
        let mut simple = Vec::new();
        let mut free = Vec::new();
        let mut dirichlet_measure = T::zero();
        for &e in &mesh.boundary_edges {
            match markers[e] {
                Some(Marker::Dirichlet) => {
                    dirichlet.push(e);
                    dirichlet_measure += mesh.edges[e].length;
                }
                Some(Marker::Simple) => simple.push(e),
                Some(Marker::Free) => free.push(e),
                None => unreachable!("boundary edge without marker"),
            }
        }
        if dirichlet.is_empty() {
            log::warn!("no clamped boundary edges: rigid motions may survive the boundary seminorm");
        }
        BoundaryPartition {
            markers,
            dirichlet,
            simple,
            free,
            dirichlet_measure,
        }
    }

    pub fn marker(&self, edge: usize) -> Option<Marker> {
        self.markers[edge]
    }

    pub fn has_dirichlet(&self) -> bool {
        self.dirichlet_measure > T::zero()
    }

    /// Clamped and supported edges, ascending.
    pub fn supported(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.dirichlet.iter().chain(&self.simple).copied().collect();
        all.sort_unstable();
        all
    }
}
