use std::collections::{BTreeMap, HashMap};

use nalgebra::Vector2;

use super::{edge_key, EdgeKey, Mesh};
use crate::scalar::{lit, Real};

struct Splitter<T: Real> {
    vertices: Vec<Vector2<T>>,
    tags: BTreeMap<EdgeKey, i64>,
    midpoints: HashMap<EdgeKey, usize>,
}

impl<T: Real> Splitter<T> {
    fn new(mesh: &Mesh<T>) -> Self {
        Splitter {
            vertices: mesh.vertices.clone(),
            tags: mesh.tag_map(),
            midpoints: HashMap::new(),
        }
    }

    fn midpoint(&mut self, a: usize, b: usize) -> usize {
        let key = edge_key(a, b);
        if let Some(&m) = self.midpoints.get(&key) {
            return m;
        }
        let m = self.vertices.len();
        self.vertices
            .push((self.vertices[a] + self.vertices[b]) * lit::<T>(0.5));
        if let Some(tag) = self.tags.remove(&key) {
            self.tags.insert(edge_key(a, m), tag);
            self.tags.insert(edge_key(m, b), tag);
        }
        self.midpoints.insert(key, m);
        m
    }

    fn finish(self, triangles: Vec<[usize; 3]>) -> Mesh<T> {
        Mesh::from_parts(self.vertices, triangles, &self.tags)
            .expect("refinement of a conforming mesh is conforming")
    }
}

impl<T: Real> Mesh<T> {
    /// Red refinement: every triangle splits into four similar children.
    ///
    /// Child `i < 3` keeps corner `i` of its parent at the same local
    /// position; the middle child is the parent rotated by 180°.
    pub fn refine_red(&self) -> Self {
        let mut s = Splitter::new(self);
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[v0, v1, v2] in &self.triangles {
            let m01 = s.midpoint(v0, v1);
            let m12 = s.midpoint(v1, v2);
            let m20 = s.midpoint(v2, v0);
            triangles.push([v0, m01, m20]);
            triangles.push([m01, v1, m12]);
            triangles.push([m20, m12, v2]);
            triangles.push([m12, m20, m01]);
        }
        s.finish(triangles)
    }

    /// Conforming newest-vertex bisection of the marked triangles.
    ///
    /// A triangle `[v0, v1, v2]` splits along `v1-v2` into `[m, v0, v1]`
    /// and `[m, v2, v0]`. Neighbors that would carry a hanging vertex are
    /// bisected until the mesh is conforming again.
    pub fn bisect(&self, marked: &[bool]) -> Self {
        assert_eq!(marked.len(), self.triangles.len());
        let mut s = Splitter::new(self);
        let mut triangles = self.triangles.clone();
        let mut split = marked.to_vec();
        while split.iter().any(|&b| b) {
            let mut next = Vec::with_capacity(triangles.len() + 8);
            for (tri, &go) in triangles.iter().zip(&split) {
                let [v0, v1, v2] = *tri;
                if go {
                    let m = s.midpoint(v1, v2);
                    next.push([m, v0, v1]);
                    next.push([m, v2, v0]);
                } else {
                    next.push(*tri);
                }
            }
            triangles = next;
            split = triangles
                .iter()
                .map(|tri| {
                    (0..3).any(|i| {
                        s.midpoints
                            .contains_key(&edge_key(tri[(i + 1) % 3], tri[(i + 2) % 3]))
                    })
                })
                .collect();
        }
        s.finish(triangles)
    }
}
