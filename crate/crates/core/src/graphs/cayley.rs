//! Cayley graphs from breadth-first closure under the generators.

use std::collections::{HashMap, VecDeque};
use std::io::Write;
use std::sync::Arc;

use super::{generators, square_class, ProjMat};
use crate::error::{Error, Result};
use crate::ff::{is_irreducible, FqElem, IndexedRing, Poly};

/// Unreachable marker in distance arrays.
pub const UNREACHED: u32 = u32::MAX;

pub struct CayleyGraph {
    pub ring: Arc<IndexedRing>,
    pub nu: FqElem,
    pub gens: Vec<ProjMat>,
    verts: Vec<ProjMat>,
    index: HashMap<u64, u32>,
    /// `adj[v * k + j]` = index of `verts[v] * gens[j]`.
    adj: Vec<u32>,
}

/// The component of the identity in the Cayley graph of `PGL_2(F_q[t]/(g))`
/// with the Morgenstern generators. Fails with [`Error::Budget`] beyond
/// `max_vertices`.
pub fn build_graph(g: &Poly, nu: FqElem, max_vertices: usize) -> Result<CayleyGraph> {
    let ring = Arc::new(IndexedRing::new(g)?);
    if ring.size() as u64 > u16::MAX as u64 {
        return Err(Error::Budget {
            what: "residue ring size for graph keys".into(),
            needed: ring.size() as u128,
            budget: u16::MAX as u128,
        });
    }
    let gens = generators(&ring, nu)?;
    let k = gens.len();
    let id = ProjMat::identity(&ring);
    let mut verts = vec![id];
    let mut index = HashMap::new();
    index.insert(id.key(&ring), 0u32);
    let mut adj: Vec<u32> = Vec::new();
    let mut head = 0;
    while head < verts.len() {
        let v = verts[head];
        for s in &gens {
            let w = v.mul(s, &ring).canonical(&ring)?;
            let key = w.key(&ring);
            let idx = match index.get(&key) {
                Some(&i) => i,
                None => {
                    if verts.len() >= max_vertices {
                        return Err(Error::Budget {
                            what: "graph vertices".into(),
                            needed: verts.len() as u128 + 1,
                            budget: max_vertices as u128,
                        });
                    }
                    let i = verts.len() as u32;
                    verts.push(w);
                    index.insert(key, i);
                    i
                }
            };
            adj.push(idx);
        }
        head += 1;
    }
    debug_assert_eq!(adj.len(), verts.len() * k);
    Ok(CayleyGraph {
        ring,
        nu,
        gens,
        verts,
        index,
        adj,
    })
}

impl CayleyGraph {
    pub fn q(&self) -> u32 {
        self.ring.field().q()
    }

    pub fn modulus(&self) -> &Poly {
        self.ring.modulus()
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.gens.len()
    }

    pub fn vertex(&self, v: u32) -> &ProjMat {
        &self.verts[v as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let k = self.degree();
        &self.adj[v as usize * k..(v as usize + 1) * k]
    }

    /// Index of a matrix (canonicalized first), if it is in the component.
    pub fn index_of(&self, m: &ProjMat) -> Result<Option<u32>> {
        let c = m.canonical(&self.ring)?;
        Ok(self.index.get(&c.key(&self.ring)).copied())
    }

    /// Index of `[[a, b], [c, d]]` given as polynomials.
    pub fn index_of_polys(&self, e: [&Poly; 4]) -> Result<Option<u32>> {
        self.index_of(&ProjMat::from_polys(&self.ring, e))
    }

    /// BFS distances from `src`.
    pub fn bfs(&self, src: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.len()];
        let mut queue = VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize] + 1;
            for &w in self.neighbors(v) {
                if dist[w as usize] == UNREACHED {
                    dist[w as usize] = d;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// BFS parent pointers from `src` (`parent[src] = src`), with the generator
    /// index used on the last step.
    pub fn bfs_tree(&self, src: u32) -> Vec<(u32, u8)> {
        let mut parent = vec![(UNREACHED, 0u8); self.len()];
        let mut queue = VecDeque::new();
        parent[src as usize] = (src, 0);
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for (j, &w) in self.neighbors(v).iter().enumerate() {
                if parent[w as usize].0 == UNREACHED {
                    parent[w as usize] = (v, j as u8);
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Generator word of a shortest path from `src` to `dst`.
    pub fn shortest_word(&self, src: u32, dst: u32) -> Option<Vec<u8>> {
        let parent = self.bfs_tree(src);
        if parent[dst as usize].0 == UNREACHED {
            return None;
        }
        let mut word = Vec::new();
        let mut v = dst;
        while v != src {
            let (p, j) = parent[v as usize];
            word.push(j);
            v = p;
        }
        word.reverse();
        Some(word)
    }

    pub fn distance(&self, a: u32, b: u32) -> Result<u32> {
        let d = self.bfs(a)[b as usize];
        if d == UNREACHED {
            return Err(Error::NotFound("vertex not in the component".into()));
        }
        Ok(d)
    }

    /// Eccentricity of the identity, which is the diameter because Cayley
    /// graphs are vertex-transitive.
    pub fn diameter(&self) -> u32 {
        self.bfs(0).into_iter().max().unwrap_or(0)
    }

    /// Two-colouring by BFS parity.
    pub fn is_bipartite(&self) -> bool {
        let dist = self.bfs(0);
        (0..self.len() as u32).all(|v| {
            self.neighbors(v)
                .iter()
                .all(|&w| dist[v as usize] % 2 != dist[w as usize] % 2)
        })
    }

    /// Checks every edge: the determinant square class changes by the class
    /// of `t`. Returns the number of edges checked.
    pub fn check_determinant_classes(&self) -> Result<usize> {
        let ring = &self.ring;
        let t_sq = square_class(ring, ring.index(&Poly::t(ring.field())))?;
        let classes: Vec<bool> = self
            .verts
            .iter()
            .map(|m| square_class(ring, m.det(ring)))
            .collect::<Result<_>>()?;
        let mut n = 0;
        for v in 0..self.len() as u32 {
            for &w in self.neighbors(v) {
                let same = classes[v as usize] == classes[w as usize];
                if same != t_sq {
                    return Err(Error::Construction(format!(
                        "edge {v}-{w} breaks the determinant colouring"
                    )));
                }
                n += 1;
            }
        }
        Ok(n)
    }

    /// Whether the adjacency is symmetric and `(q+1)`-regular without loops.
    pub fn check_symmetric(&self) -> bool {
        let k = self.degree();
        (0..self.len() as u32).all(|v| {
            let nb = self.neighbors(v);
            nb.len() == k && nb.iter().all(|&w| w != v && self.neighbors(w).contains(&v))
        })
    }

    /// `|PGL_2(F_Q)| = Q (Q^2 - 1)` for the residue field `F_Q`, `None` when
    /// the modulus is reducible.
    pub fn pgl_order(&self) -> Option<u64> {
        if !is_irreducible(self.modulus()) {
            return None;
        }
        let big_q = self.ring.size() as u64;
        Some(big_q * (big_q * big_q - 1))
    }

    /// Writes `"u v"` per undirected edge (`u < v`).
    pub fn write_edges(&self, out: &mut impl Write) -> Result<()> {
        for v in 0..self.len() as u32 {
            for &w in self.neighbors(v) {
                if v < w {
                    writeln!(out, "{v} {w}")?;
                }
            }
        }
        Ok(())
    }

    /// Symmetric adjacency matrix, row-major.
    pub fn dense_adjacency(&self) -> Vec<f64> {
        let n = self.len();
        let mut a = vec![0.0; n * n];
        for v in 0..n {
            for &w in self.neighbors(v as u32) {
                a[v * n + w as usize] += 1.0;
            }
        }
        a
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (v, yv) in y.iter_mut().enumerate() {
            *yv = self
                .neighbors(v as u32)
                .iter()
                .map(|&w| x[w as usize])
                .sum();
        }
    }
}
