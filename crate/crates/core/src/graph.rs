//! First-ring vertex connectivity derived from a triangle list.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type Face = [u32; 3];

/// Symmetric first-ring neighbor lists, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connectivity {
    neighbors: Vec<Vec<u32>>,
}

impl Connectivity {
    /// Builds from an undirected edge list. Self-loops are dropped and
    /// duplicate edges merged.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if let Some(&index) = [a, b].iter().find(|&&i| i as usize >= n) {
                return Err(Error::IndexOutOfRange {
                    face: e,
                    index: index as usize,
                    n,
                });
            }
            if a != b {
                neighbors[a as usize].push(b);
                neighbors[b as usize].push(a);
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { neighbors })
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.neighbors[i].is_empty()).collect()
    }

    /// Number of connected components of the vertex graph.
    pub fn component_count(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.neighbors[v] {
                    let w = w as usize;
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.component_count() == 1
    }
}

/// Builds first-ring neighbor lists. An edge shared by several triangles is stored once.
pub fn build_connectivity(faces: &[Face], n: usize) -> Result<Connectivity> {
    if faces.is_empty() {
        return Err(Error::NoFaces);
    }
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (fi, face) in faces.iter().enumerate() {
        for &index in face {
            if index as usize >= n {
                return Err(Error::IndexOutOfRange {
                    face: fi,
                    index: index as usize,
                    n,
                });
            }
        }
        let [a, b, c] = *face;
        if a == b || b == c || a == c {
            return Err(Error::DegenerateFace { face: fi });
        }
        for (u, v) in [(a, b), (b, c), (c, a)] {
            neighbors[u as usize].push(v);
            neighbors[v as usize].push(u);
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
        list.dedup();
    }
    Ok(Connectivity { neighbors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_triangle() {
        let c = build_connectivity(&[[0, 1, 2]], 3).unwrap();
        assert_eq!(c.neighbors(0), &[1, 2]);
        assert_eq!(c.neighbors(1), &[0, 2]);
        assert_eq!(c.neighbors(2), &[0, 1]);
        assert_eq!(c.degrees(), vec![2, 2, 2]);
    }

    #[test]
    fn shared_edge_counted_once() {
        let c = build_connectivity(&[[0, 1, 2], [1, 2, 3]], 4).unwrap();
        assert_eq!(c.degrees(), vec![2, 3, 3, 2]);
        assert_eq!(c.edge_count(), 5);
    }

    #[test]
    fn degenerate_face_rejected() {
        assert!(matches!(
            build_connectivity(&[[0, 1, 1]], 2),
            Err(Error::DegenerateFace { face: 0 })
        ));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            build_connectivity(&[[0, 1, 3]], 3),
            Err(Error::IndexOutOfRange { index: 3, .. })
        ));
        assert!(matches!(build_connectivity(&[], 3), Err(Error::NoFaces)));
    }

    #[test]
    fn components() {
        let c = build_connectivity(&[[0, 1, 2], [3, 4, 5]], 6).unwrap();
        assert_eq!(c.component_count(), 2);
        assert!(!c.is_connected());
        let c = build_connectivity(&[[0, 1, 2]], 4).unwrap();
        assert_eq!(c.isolated_vertices(), vec![3]);
    }

    #[test]
    fn invariant_under_face_reordering_and_rotation() {
        let faces = [[0, 1, 2], [1, 3, 2], [2, 3, 4], [0, 2, 4]];
        let a = build_connectivity(&faces, 5).unwrap();
        let shuffled = [[4, 2, 3], [2, 4, 0], [3, 2, 1], [1, 2, 0]];
        let b = build_connectivity(&shuffled, 5).unwrap();
        assert_eq!(a, b);
        for i in 0..5 {
            for &j in a.neighbors(i) {
                assert!(a.neighbors(j as usize).contains(&(i as u32)));
                assert_ne!(j as usize, i);
            }
        }
    }
}
