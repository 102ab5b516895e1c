//! Certification of built graphs and the diameter lower-bound experiments.

use serde::Serialize;

use super::cayley::{build_graph, CayleyGraph};
use super::ProjMat;
use crate::error::{Error, Result};
use crate::ff::{is_irreducible, FqElem, Poly};

/// Structural and spectral checks on one graph.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub q: u32,
    pub g: String,
    pub vertices: usize,
    pub degree: usize,
    pub symmetric_regular: bool,
    pub bipartite: bool,
    /// Bipartiteness predicted from the square class of `t`.
    pub t_is_square: bool,
    pub determinant_edges_checked: usize,
    /// `|PGL_2|` or `|PGL_2| / 2` of the residue field, when `g` is irreducible.
    pub expected_vertices: Option<u64>,
    pub second_eigenvalue: Option<f64>,
    pub ramanujan_bound: f64,
    pub ramanujan: Option<bool>,
    pub pairing_defect: Option<f64>,
    pub diameter: u32,
    pub diameter_upper: f64,
    pub diameter_lower: f64,
}

impl Certificate {
    /// All checks that were run passed.
    pub fn ok(&self) -> bool {
        self.symmetric_regular
            && self.bipartite != self.t_is_square
            && self
                .expected_vertices
                .is_none_or(|n| n == self.vertices as u64)
            && self.ramanujan.unwrap_or(true)
            && (!self.bipartite || self.pairing_defect.is_none_or(|d| d < 1e-8))
            && (self.diameter as f64) <= self.diameter_upper
    }
}

/// Runs the structural checks, and the dense spectrum when the graph has at
/// most `max_dense` vertices.
pub fn certify(g: &CayleyGraph, max_dense: usize) -> Result<Certificate> {
    let q = g.q();
    let n = g.len();
    let bipartite = g.is_bipartite();
    let ring = &g.ring;
    let t_is_square = super::square_class(ring, ring.index(&Poly::t(ring.field())))?;
    let edges = g.check_determinant_classes()?;
    let expected = g.pgl_order().map(|o| if t_is_square { o / 2 } else { o });
    let bound = 2.0 * (q as f64).sqrt();
    let spec = if n <= max_dense {
        Some(g.spectrum(max_dense)?)
    } else {
        None
    };
    let logq = (n as f64).ln() / (q as f64).ln();
    Ok(Certificate {
        q,
        g: g.modulus().to_string(),
        vertices: n,
        degree: g.degree(),
        symmetric_regular: g.check_symmetric(),
        bipartite,
        t_is_square,
        determinant_edges_checked: edges,
        expected_vertices: expected,
        second_eigenvalue: spec.as_ref().map(|s| s.second),
        ramanujan_bound: bound,
        ramanujan: spec.as_ref().map(|s| s.is_ramanujan(1e-6)),
        pairing_defect: spec.as_ref().map(|s| s.pairing_defect()),
        diameter: g.diameter(),
        diameter_upper: 2.0 * logq + 6.0,
        diameter_lower: 4.0 / 3.0 * logq,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `dist(I, W)` for `W = diag(1, -1)` on `X^{q,g}`.
    Bipartite,
    /// `max(dist(I, I'), dist(I, W'))` on `X^{q,(t^2 + 1/4) r}`.
    NonBipartite,
}

/// One target of the experiment.
#[derive(Clone, Debug, Serialize)]
pub struct Target {
    pub name: String,
    pub matrix: String,
    /// `None` if the target is outside the component of the identity.
    pub distance: Option<u32>,
    /// Generator indices of one shortest word.
    pub word: Option<Vec<u8>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub variant: Variant,
    pub q: u32,
    pub modulus: String,
    pub vertices: usize,
    pub targets: Vec<Target>,
    /// Max over the targets found.
    pub h: Option<u32>,
    pub h_even: Option<bool>,
    /// `4 deg g` (bipartite variant).
    pub h_floor: Option<u32>,
    pub diameter: u32,
    pub four_thirds_log: f64,
    pub two_log: f64,
}

impl LowerBoundReport {
    /// Bipartite: `h` even and `h >= 4 deg g`. Non-bipartite: some target was
    /// reached.
    pub fn ok(&self) -> bool {
        match self.variant {
            Variant::Bipartite => {
                self.h_even == Some(true) && self.h.zip(self.h_floor).is_some_and(|(h, f)| h >= f)
            }
            Variant::NonBipartite => self.h.is_some(),
        }
    }
}

fn target(g: &CayleyGraph, name: &str, e: [&Poly; 4]) -> Result<Target> {
    let m = ProjMat::from_polys(&g.ring, e);
    let matrix = m.display(&g.ring).to_string();
    let idx = g.index_of(&m)?;
    let (distance, word) = match idx {
        Some(v) => (Some(g.distance(0, v)?), g.shortest_word(0, v)),
        None => (None, None),
    };
    Ok(Target {
        name: name.into(),
        matrix,
        distance,
        word,
    })
}

/// The lower-bound experiment. For [`Variant::Bipartite`], `g` is the
/// irreducible modulus; for [`Variant::NonBipartite`], `g` plays the role of
/// `r` and the graph is built modulo `(t^2 + 1/4) r`.
pub fn lower_bound_experiment(
    g: &Poly,
    nu: FqElem,
    variant: Variant,
    max_vertices: usize,
) -> Result<LowerBoundReport> {
    let field = g.field().clone();
    let one = Poly::one(&field);
    let zero = Poly::zero(&field);
    let minus_one = Poly::constant(&field, field.from_int(-1));
    let (modulus, graph, targets) = match variant {
        Variant::Bipartite => {
            if !is_irreducible(g) {
                return Err(Error::Reducible(g.to_string()));
            }
            let graph = build_graph(g, nu, max_vertices)?;
            let t = target(&graph, "W", [&one, &zero, &zero, &minus_one])?;
            (g.clone(), graph, vec![t])
        }
        Variant::NonBipartite => {
            let quarter = field.inv(field.from_int(4))?;
            let base = &Poly::parse(&field, "t^2")? + &Poly::constant(&field, quarter);
            let modulus = &base * g;
            let graph = build_graph(&modulus, nu, max_vertices)?;
            let ring = &graph.ring;
            let i = super::sqrt_nu(ring, field.from_int(-1))
                .map_err(|_| Error::Construction(format!("-1 is not a square modulo {modulus}")))?;
            let ip = ring.poly(i);
            let t1 = target(&graph, "I'", [&one, g, &zero, &one])?;
            let t2 = target(&graph, "W'", [&ip, &zero, &zero, &-&ip])?;
            (modulus, graph, vec![t1, t2])
        }
    };
    let n = graph.len();
    let q = field.q();
    let logq = (n as f64).ln() / (q as f64).ln();
    let h = targets.iter().filter_map(|t| t.distance).max();
    Ok(LowerBoundReport {
        variant,
        q,
        modulus: modulus.to_string(),
        vertices: n,
        h,
        h_even: h.map(|h| h % 2 == 0),
        h_floor: (variant == Variant::Bipartite).then(|| 4 * g.deg().unwrap() as u32),
        targets,
        diameter: graph.diameter(),
        four_thirds_log: 4.0 / 3.0 * logq,
        two_log: 2.0 * logq,
    })
}
