//! Exact polyhedral primitives: H- and V-representations, vertex and facet
//! enumeration, faces, skeletons and slices.
//!
//! All polytopes here are bounded; unboundedness is rejected when an
//! `HPolytope` is constructed, by checking that the recession cone is `{0}`.
//! The empty polytope is a legal value throughout.

mod dd;

use num_traits::{One, Zero};

use crate::bits::Bits;
use crate::linalg::{affine_dim, QMatrix};
use crate::num::{dot, is_binary, primitive, unit, zeros, QVector, Rational};
use crate::{Error, Result};

/// Inequality-form polytope `{x : a·x <= b, c·x = d}`.
///
/// Lower-dimensional polytopes carry explicit equation rows; opposite
/// inequality pairs are never used for that purpose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    pub dim: usize,
    pub ineqs: Vec<(QVector, Rational)>,
    pub eqs: Vec<(QVector, Rational)>,
}

/// Vertex-form polytope: irredundant vertex list, lexicographically sorted
/// so that equality of canonical forms is plain `==`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    pub dim: usize,
    pub vertices: Vec<QVector>,
}

/// A nonempty face of an `HPolytope`, described by the inequalities tight on
/// it and the polytope vertices it contains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub tight: Vec<usize>,
    pub vertices: Vec<QVector>,
    pub dim: i64,
}

/// Vertex adjacency graph. Nodes follow the canonical vertex order; edges
/// are the 1-dimensional faces, stored as sorted index pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonGraph {
    pub nodes: Vec<QVector>,
    pub edges: Vec<(usize, usize)>,
}

impl HPolytope {
    /// Build and validate: row dimensions must match and the represented set
    /// must be bounded (its recession cone is checked to be `{0}` exactly).
    pub fn new(
        dim: usize,
        ineqs: Vec<(QVector, Rational)>,
        eqs: Vec<(QVector, Rational)>,
    ) -> Result<Self> {
        for (a, _) in ineqs.iter().chain(&eqs) {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
        }
        let ineqs: Vec<(QVector, Rational)> = ineqs
            .into_iter()
            .map(|(a, b)| normalize_row(a, b, false))
            .collect();
        let eqs: Vec<(QVector, Rational)> = eqs
            .into_iter()
            .map(|(a, b)| normalize_row(a, b, true))
            .collect();

        let h = HPolytope { dim, ineqs, eqs };
        if !h.recession_cone_is_trivial() {
            return Err(Error::UnboundedPolyhedron);
        }
        Ok(h)
    }

    fn recession_cone_is_trivial(&self) -> bool {
        // Lineality first: nullspace of all row normals. A nontrivial
        // lineality direction is a recession direction and also means the
        // cone is not pointed, so the double description step below would
        // not be applicable.
        let normals: Vec<QVector> = self
            .ineqs
            .iter()
            .chain(&self.eqs)
            .map(|(a, _)| a.clone())
            .collect();
        if normals.is_empty() || QMatrix::new(normals, self.dim).rank() < self.dim {
            return false;
        }
        let rec_ineqs: Vec<QVector> = self
            .ineqs
            .iter()
            .map(|(a, _)| a.iter().map(|x| -x).collect())
            .collect();
        let rec_eqs: Vec<QVector> = self.eqs.iter().map(|(a, _)| a.clone()).collect();
        dd::extreme_rays_with_eqs(self.dim, &rec_ineqs, &rec_eqs).is_empty()
    }

    /// Exact vertex enumeration via double description on the homogenization
    /// `{(x,t) : a·x <= b t, c·x = d t, t >= 0}`. Empty vertex list iff the
    /// polytope is empty.
    pub fn vertices(&self) -> VPolytope {
        let m = self.dim + 1;
        let mut hom_ineqs: Vec<QVector> = Vec::with_capacity(self.ineqs.len() + 1);
        for (a, b) in &self.ineqs {
            let mut row: QVector = a.iter().map(|x| -x).collect();
            row.push(b.clone());
            hom_ineqs.push(row);
        }
        hom_ineqs.push(unit(m, self.dim));
        let hom_eqs: Vec<QVector> = self
            .eqs
            .iter()
            .map(|(a, b)| {
                let mut row = a.clone();
                row.push(-b.clone());
                row
            })
            .collect();
        let rays = dd::extreme_rays_with_eqs(m, &hom_ineqs, &hom_eqs);
        let vertices = rays
            .into_iter()
            .map(|z| {
                let t = z[self.dim].clone();
                assert!(
                    t > Rational::zero(),
                    "ray at infinity on a polytope that passed the boundedness check"
                );
                z[..self.dim].iter().map(|x| x / &t).collect()
            })
            .collect();
        VPolytope::new(self.dim, vertices)
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        p.len() == self.dim
            && self.ineqs.iter().all(|(a, b)| &dot(a, p) <= b)
            && self.eqs.iter().all(|(a, b)| &dot(a, p) == b)
    }

    pub(crate) fn tight_set(&self, p: &[Rational]) -> Bits {
        let mut bits = Bits::new(self.ineqs.len());
        for (i, (a, b)) in self.ineqs.iter().enumerate() {
            if &dot(a, p) == b {
                bits.set(i);
            }
        }
        bits
    }

    /// Vertex set of the hyperplane section `{x in self : x_var = value}`.
    pub fn slice(&self, var: usize, value: &Rational) -> Result<VPolytope> {
        if var >= self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: var,
            });
        }
        let mut eqs = self.eqs.clone();
        eqs.push((unit(self.dim, var), value.clone()));
        let section = HPolytope::new(self.dim, self.ineqs.clone(), eqs)?;
        Ok(section.vertices())
    }

    /// The smallest face containing `p`: its tight set is the set of all
    /// inequalities tight at `p`.
    pub fn minimal_face(&self, p: &[Rational]) -> Result<Face> {
        if !self.contains(p) {
            return Err(Error::PointNotInPolytope);
        }
        let tight = self.tight_set(p);
        let verts = self.vertices();
        let members: Vec<QVector> = verts
            .vertices
            .into_iter()
            .filter(|v| tight.is_subset_of(&self.tight_set(v)))
            .collect();
        Ok(Face {
            tight: tight.indices(),
            dim: affine_dim(&members),
            vertices: members,
        })
    }

    /// Vertex adjacency by the combinatorial criterion: `u`, `v` are adjacent
    /// iff no third vertex is tight on every inequality tight at both.
    pub fn skeleton(&self) -> SkeletonGraph {
        let verts = self.vertices();
        let tight: Vec<Bits> = verts.vertices.iter().map(|v| self.tight_set(v)).collect();
        let n = verts.vertices.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let t = tight[i].intersection(&tight[j]);
                let on_face = tight.iter().filter(|s| t.is_subset_of(s)).count();
                if on_face == 2 {
                    edges.push((i, j));
                }
            }
        }
        SkeletonGraph {
            nodes: verts.vertices,
            edges,
        }
    }

    /// All nonempty faces of dimension at most `maxdim`, via closure of the
    /// facet/vertex incidence. Includes the vertices (dim 0) and, when its
    /// dimension qualifies, the polytope itself.
    pub fn faces_up_to_dim(&self, maxdim: i64) -> Vec<Face> {
        let verts = self.vertices();
        let n = verts.vertices.len();
        if n == 0 {
            return Vec::new();
        }
        let tight: Vec<Bits> = verts.vertices.iter().map(|v| self.tight_set(v)).collect();
        let mut row_members: Vec<Bits> = vec![Bits::new(n); self.ineqs.len()];
        for (v, t) in tight.iter().enumerate() {
            for r in t.indices() {
                row_members[r].set(v);
            }
        }
        let mut all = Bits::new(n);
        for v in 0..n {
            all.set(v);
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut queue = vec![all.clone()];
        seen.insert(all);
        while let Some(face) = queue.pop() {
            for rm in &row_members {
                let sub = face.intersection(rm);
                if sub.indices().is_empty() || seen.contains(&sub) {
                    continue;
                }
                seen.insert(sub.clone());
                queue.push(sub);
            }
        }
        let mut faces = Vec::new();
        for bits in seen {
            let members: Vec<QVector> = bits
                .indices()
                .into_iter()
                .map(|v| verts.vertices[v].clone())
                .collect();
            let dim = affine_dim(&members);
            if dim > maxdim {
                continue;
            }
            let mut common = tight[bits.indices()[0]].clone();
            for v in bits.indices() {
                common = common.intersection(&tight[v]);
            }
            faces.push(Face {
                tight: common.indices(),
                vertices: members,
                dim,
            });
        }
        faces
    }
}

fn normalize_row(a: QVector, b: Rational, flip_sign: bool) -> (QVector, Rational) {
    let mut row = a;
    row.push(b);
    let mut row = primitive(&row);
    if flip_sign {
        if let Some(first) = row.iter().find(|x| !x.is_zero()) {
            if first < &Rational::zero() {
                row = row.iter().map(|x| -x).collect();
            }
        }
    }
    let b = row.pop().unwrap();
    (row, b)
}

impl VPolytope {
    /// Canonical form: lexicographically sorted, duplicates removed. Convex
    /// position of the points is the producer's responsibility.
    pub fn new(dim: usize, mut vertices: Vec<QVector>) -> Self {
        debug_assert!(vertices.iter().all(|v| v.len() == dim));
        vertices.sort();
        vertices.dedup();
        VPolytope { dim, vertices }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_vertex(&self, p: &[Rational]) -> bool {
        self.vertices
            .binary_search_by(|v| v.as_slice().cmp(p))
            .is_ok()
    }

    /// Keep only the vertices whose coordinate `var` is 0 or 1. This is one
    /// sequential-convexification step at the vertex level: convexifying a
    /// [0,1]-bounded variable discards exactly the strictly fractional
    /// vertices and creates none.
    pub fn convexify_binary(&self, var: usize) -> VPolytope {
        VPolytope {
            dim: self.dim,
            vertices: self
                .vertices
                .iter()
                .filter(|v| is_binary(&v[var]))
                .cloned()
                .collect(),
        }
    }

    /// Projection of every vertex onto the given coordinates (a point set,
    /// not necessarily in convex position).
    pub fn project(&self, cols: &[usize]) -> Vec<QVector> {
        let mut pts: Vec<QVector> = self
            .vertices
            .iter()
            .map(|v| cols.iter().map(|&c| v[c].clone()).collect())
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }
}

/// Facet enumeration: the H-representation of `conv(V)`, with explicit
/// equation rows describing the affine hull when the hull is not
/// full-dimensional. Works through the polar cone of the homogenization
/// `{(a0,a) : a0 + a·p >= 0 for all points p}`: its lineality space yields
/// the affine-hull equations and the extreme rays of its pointed quotient
/// yield the facets.
pub fn facet_hull(v: &VPolytope) -> Result<HPolytope> {
    if v.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let m = v.dim + 1;
    let rows: Vec<QVector> = v
        .vertices
        .iter()
        .map(|p| {
            let mut row = vec![Rational::one()];
            row.extend(p.iter().cloned());
            row
        })
        .collect();
    let matrix = QMatrix::new(rows.clone(), m);

    let eqs: Vec<(QVector, Rational)> = matrix
        .nullspace()
        .into_iter()
        .map(|z| (z[1..].to_vec(), -z[0].clone()))
        .collect();

    let basis: Vec<QVector> = matrix
        .independent_rows()
        .into_iter()
        .map(|i| rows[i].clone())
        .collect();
    let reduced: Vec<QVector> = rows
        .iter()
        .map(|r| basis.iter().map(|w| dot(r, w)).collect())
        .collect();
    // Rows whose normal lies in the span of the equation normals are
    // constant on the affine hull, hence never proper faces: drop them.
    let eq_span_t = if eqs.is_empty() {
        None
    } else {
        Some(QMatrix::new(
            (0..v.dim)
                .map(|i| eqs.iter().map(|(a, _)| a[i].clone()).collect())
                .collect(),
            eqs.len(),
        ))
    };
    let mut ineqs = Vec::new();
    for u in dd::extreme_rays(basis.len(), &reduced) {
        let mut z = zeros(m);
        for (c, w) in u.iter().zip(&basis) {
            z = crate::num::add_scaled(&z, w, c);
        }
        let a: QVector = z[1..].iter().map(|x| -x).collect();
        if crate::num::is_zero_vec(&a) {
            continue;
        }
        if let Some(t) = &eq_span_t {
            if !matches!(t.solve(&a), crate::linalg::Solution::Inconsistent) {
                continue;
            }
        }
        ineqs.push((a, z[0].clone()));
    }
    HPolytope::new(v.dim, ineqs, eqs)
}

/// Dimension of a polytope given as an `HPolytope` (-1 if empty).
pub fn polytope_dim(h: &HPolytope) -> i64 {
    affine_dim(&h.vertices().vertices)
}

impl SkeletonGraph {
    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(i, j)| i == node || j == node)
            .count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(i, j) in &self.edges {
                let other = if i == u {
                    j
                } else if j == u {
                    i
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}
