//! Binary extended formulations: conjoin a base polytope `P` with one
//! binarization per selected variable, enumerate and characterize the
//! vertices of the resulting polytope `Q`, convexify sequentially at the
//! vertex level, and compute the lift-and-project rank as a set covering
//! optimum.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::Signed;

use crate::binarization::Binarization;
use crate::cover::{set_cover_min, SetCoverInstance};
use crate::geom::{Face, HPolytope, VPolytope};
use crate::linalg::{QMatrix, Solution};
use crate::num::{is_binary, is_integer, qint, sub, unit, zeros, QVector, Rational};
use crate::{Error, Result};

/// Default cap on the total dimension accepted by vertex enumeration over
/// `Q`; exact double description cost grows quickly, so refusing loudly
/// beats running silently for hours.
pub const DEFAULT_DIM_LIMIT: usize = 12;

/// A variable fixing `x_i = alpha_i` for `i` in a subset of the binarized
/// variables (indices are positions in the binarization list, 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixing {
    pub vars: Vec<usize>,
    pub values: Vec<u64>,
}

/// Witness for the vertex characterization: a face of `P` together with a
/// fixing whose subspace meets the face in exactly one point.
#[derive(Clone, Debug)]
pub struct Witness {
    pub face: Face,
    pub fixing: Fixing,
}

#[derive(Clone, Debug)]
pub struct LprResult {
    /// Exact set-covering optimum: the lift-and-project rank of `Q` with
    /// respect to its `y`-variables.
    pub value: usize,
    /// One optimal certificate as global `Q`-columns.
    pub cover: Vec<usize>,
    /// Incidence rows of fractional `y`-supports, duplicates included.
    pub instance: SetCoverInstance,
}

#[derive(Clone, Debug)]
pub struct ExtendedFormulation {
    pub p_poly: HPolytope,
    pub n: usize,
    /// Columns of `x` that carry a binarization, aligned with `bins`.
    pub binarized: Vec<usize>,
    pub bins: Vec<Binarization>,
    pub q: HPolytope,
    /// Start column of each `y`-block inside `Q`.
    pub y_offsets: Vec<usize>,
    pub index_map: BTreeMap<String, usize>,
    verts_q: OnceLock<VPolytope>,
}

impl ExtendedFormulation {
    /// Concatenate the inequality systems of `P` and the binarization bodies
    /// over shared `x`-columns. No elimination or presolve of any kind.
    pub fn build(
        p_poly: HPolytope,
        binarized: Vec<usize>,
        bins: Vec<Binarization>,
    ) -> Result<Self> {
        let n = p_poly.dim;
        if binarized.len() != bins.len() {
            return Err(Error::DimensionMismatch {
                expected: binarized.len(),
                got: bins.len(),
            });
        }
        let mut seen = BTreeSet::new();
        for &c in &binarized {
            if c >= n || !seen.insert(c) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c,
                });
            }
        }

        let vp = p_poly.vertices();
        for (i, (&col, bin)) in binarized.iter().zip(&bins).enumerate() {
            for v in &vp.vertices {
                let x = &v[col];
                if x.is_negative() {
                    return Err(Error::RangeMismatch(format!(
                        "variable x{} takes value {x} < 0 over P",
                        col + 1
                    )));
                }
                if x.ceil().to_integer() > BigInt::from(bin.k) {
                    return Err(Error::RangeMismatch(format!(
                        "binarization {} has k={} but x{} reaches {x} over P",
                        i + 1,
                        bin.k,
                        col + 1
                    )));
                }
            }
        }

        let dim = n + bins.iter().map(|b| b.d).sum::<usize>();
        let mut ineqs = Vec::new();
        let mut eqs = Vec::new();
        for (a, b) in &p_poly.ineqs {
            let mut row = a.clone();
            row.resize(dim, Rational::from_integer(0.into()));
            ineqs.push((row, b.clone()));
        }
        for (a, b) in &p_poly.eqs {
            let mut row = a.clone();
            row.resize(dim, Rational::from_integer(0.into()));
            eqs.push((row, b.clone()));
        }
        let mut y_offsets = Vec::with_capacity(bins.len());
        let mut offset = n;
        for (i, bin) in bins.iter().enumerate() {
            y_offsets.push(offset);
            let map_row = |a: &QVector| {
                let mut row = zeros(dim);
                row[binarized[i]] = a[0].clone();
                for (j, c) in a[1..].iter().enumerate() {
                    row[offset + j] = c.clone();
                }
                row
            };
            for (a, b) in &bin.body.ineqs {
                ineqs.push((map_row(a), b.clone()));
            }
            for (a, b) in &bin.body.eqs {
                eqs.push((map_row(a), b.clone()));
            }
            offset += bin.d;
        }
        let q = HPolytope::new(dim, ineqs, eqs)?;

        let mut index_map = BTreeMap::new();
        for j in 0..n {
            index_map.insert(format!("x{}", j + 1), j);
        }
        for (i, bin) in bins.iter().enumerate() {
            for j in 0..bin.d {
                index_map.insert(format!("y{}_{}", i + 1, j + 1), y_offsets[i] + j);
            }
        }

        Ok(ExtendedFormulation {
            p_poly,
            n,
            binarized,
            bins,
            q,
            y_offsets,
            index_map,
            verts_q: OnceLock::new(),
        })
    }

    pub fn p(&self) -> usize {
        self.bins.len()
    }

    pub fn column_name(&self, col: usize) -> String {
        self.index_map
            .iter()
            .find(|(_, &c)| c == col)
            .map(|(name, _)| name.clone())
            .unwrap_or_else(|| format!("col{col}"))
    }

    /// Exact `V(Q)`, guarded by a configurable total-dimension limit and
    /// cached after the first computation.
    pub fn vertices_q(&self, limit: usize) -> Result<&VPolytope> {
        if self.q.dim > limit {
            return Err(Error::SizeLimitExceeded {
                dim: self.q.dim,
                limit,
            });
        }
        Ok(self.verts_q.get_or_init(|| self.q.vertices()))
    }

    /// `pi_x(V(Q))` as a sorted point set.
    pub fn x_projection(&self, limit: usize) -> Result<Vec<QVector>> {
        let cols: Vec<usize> = (0..self.n).collect();
        Ok(self.vertices_q(limit)?.project(&cols))
    }

    /// The x-points picked out by the vertex characterization: all `x` such
    /// that some face `F` of `P` of dimension `|I|` meets the fixing
    /// subspace `G_{I,alpha}` in exactly `{x}`. Defined for any formulation;
    /// equals `pi_x(V(Q))` when every binarization is natural.
    pub fn projection_candidates(&self) -> Vec<QVector> {
        let mut out: BTreeSet<QVector> = BTreeSet::new();
        let p = self.p();
        let maxdim = p.min(self.n) as i64;
        for face in self.p_poly.faces_up_to_dim(maxdim) {
            let q = face.dim;
            debug_assert!(q >= 0);
            let aff = affine_hull_system(&face.vertices, self.n);
            for combo in (0..p).combinations(q as usize) {
                let Some(ranges) = self.alpha_ranges(&face, &combo) else {
                    continue;
                };
                for alpha in cartesian(&ranges) {
                    if let Some(x) = self.singleton_intersection(&aff, &combo, &alpha) {
                        out.insert(x);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Same as `projection_candidates` but rejecting non-natural
    /// binarizations, for which the characterization can miss points.
    pub fn characterize_projection(&self) -> Result<Vec<QVector>> {
        if !self.bins.iter().all(|b| b.is_natural()) {
            return Err(Error::NonNaturalBinarization);
        }
        Ok(self.projection_candidates())
    }

    /// Integer values of `x_{binarized[i]}` available on the face's bounding
    /// box, intersected with `{0,..,k_i}`; `None` when some range is empty.
    fn alpha_ranges(&self, face: &Face, combo: &[usize]) -> Option<Vec<Vec<u64>>> {
        let mut ranges = Vec::with_capacity(combo.len());
        for &i in combo {
            let col = self.binarized[i];
            let lo = face
                .vertices
                .iter()
                .map(|v| &v[col])
                .min()
                .unwrap()
                .ceil()
                .to_integer();
            let hi = face
                .vertices
                .iter()
                .map(|v| &v[col])
                .max()
                .unwrap()
                .floor()
                .to_integer();
            let lo = lo.max(BigInt::from(0));
            let hi = hi.min(BigInt::from(self.bins[i].k));
            if lo > hi {
                return None;
            }
            let lo = u64::try_from(lo).unwrap();
            let hi = u64::try_from(hi).unwrap();
            ranges.push((lo..=hi).collect());
        }
        Some(ranges)
    }

    /// Exact singleton test for `F n G_{I,alpha}`: stack the affine hull of
    /// `F` with the fixing equations, demand a unique solution and membership
    /// in `P`. Transversal witnesses suffice: a boundary-touching singleton
    /// is always certified by a smaller face, which the caller enumerates
    /// too.
    fn singleton_intersection(
        &self,
        aff: &(Vec<QVector>, Vec<Rational>),
        combo: &[usize],
        alpha: &[u64],
    ) -> Option<QVector> {
        let mut rows = aff.0.clone();
        let mut rhs = aff.1.clone();
        for (&i, &a) in combo.iter().zip(alpha) {
            rows.push(unit(self.n, self.binarized[i]));
            rhs.push(qint(a as i64));
        }
        match QMatrix::new(rows, self.n).solve(&rhs) {
            Solution::Unique(x) if self.p_poly.contains(&x) => Some(x),
            _ => None,
        }
    }

    /// Find a witness `(F, I, alpha)` for a vertex of `Q`, per the
    /// characterization: `F` is the minimal face of `P` containing the
    /// x-part, and `I` ranges over the integral coordinates, smallest
    /// lexicographic choice first.
    pub fn verify_vertex_conditions(&self, v: &[Rational], limit: usize) -> Result<Witness> {
        let verts = self.vertices_q(limit)?;
        if !verts.contains_vertex(v) {
            return Err(Error::PointNotInPolytope);
        }
        let xbar = &v[..self.n];
        let face = self.p_poly.minimal_face(xbar)?;
        let q = face.dim as usize;
        let aff = affine_hull_system(&face.vertices, self.n);

        let integral: Vec<usize> = (0..self.p())
            .filter(|&i| {
                let x = &xbar[self.binarized[i]];
                is_integer(x) && !x.is_negative() && x <= &qint(self.bins[i].k as i64)
            })
            .collect();
        if integral.len() < q {
            return Err(Error::NoWitness);
        }

        let mut slice_cache: BTreeMap<(usize, QVector), VPolytope> = BTreeMap::new();
        for combo in integral.into_iter().combinations(q) {
            let alpha: Vec<u64> = combo
                .iter()
                .map(|&i| u64::try_from(xbar[self.binarized[i]].to_integer()).unwrap())
                .collect();
            match self.singleton_intersection(&aff, &combo, &alpha) {
                Some(x) if x.as_slice() == xbar => {}
                _ => continue,
            }
            if !combo.iter().all(|&i| {
                let pt = self.bin_point(v, i);
                self.bins[i].verts.contains_vertex(&pt)
            }) {
                continue;
            }
            let outside_ok = (0..self.p()).filter(|i| !combo.contains(i)).all(|i| {
                let pt = self.bin_point(v, i);
                let key = (i, vec![pt[0].clone()]);
                let slice = slice_cache
                    .entry(key)
                    .or_insert_with(|| self.bins[i].slice_at(&pt[0]));
                slice.contains_vertex(&pt)
            });
            if outside_ok {
                return Ok(Witness {
                    face,
                    fixing: Fixing {
                        vars: combo,
                        values: alpha,
                    },
                });
            }
        }
        Err(Error::NoWitness)
    }

    /// The `(x_i, y_i)` block of a `Q`-point, for binarization `i`.
    pub fn bin_point(&self, v: &[Rational], i: usize) -> QVector {
        let mut pt = vec![v[self.binarized[i]].clone()];
        pt.extend_from_slice(&v[self.y_offsets[i]..self.y_offsets[i] + self.bins[i].d]);
        pt
    }

    /// Repeated vertex-level convexification over the given `y`-columns
    /// (global `Q` column indices). Order-independent.
    pub fn sequential_convexify(&self, yvars: &[usize], limit: usize) -> Result<VPolytope> {
        for &c in yvars {
            if c < self.n || c >= self.q.dim {
                return Err(Error::RangeViolation(format!(
                    "column {c} is not a y-column of Q"
                )));
            }
        }
        let mut v = self.vertices_q(limit)?.clone();
        for &c in yvars {
            v = v.convexify_binary(c);
        }
        Ok(v)
    }

    pub fn all_y_columns(&self) -> Vec<usize> {
        (self.n..self.q.dim).collect()
    }

    /// Lift-and-project rank of `Q` with respect to all `y`-variables, as
    /// the optimum of the set covering instance over fractional supports,
    /// together with a certificate. The certificate is re-verified by
    /// convexifying it.
    pub fn lpr(&self, limit: usize) -> Result<LprResult> {
        let verts = self.vertices_q(limit)?;
        let pd = self.q.dim - self.n;
        assert!(pd <= 64, "more than 64 y-columns is unsupported");
        let mut rows = Vec::new();
        for v in &verts.vertices {
            let mask = (0..pd).fold(0u64, |m, j| {
                if is_binary(&v[self.n + j]) {
                    m
                } else {
                    m | 1 << j
                }
            });
            if mask != 0 {
                rows.push(mask);
            }
        }
        let instance = SetCoverInstance::new(pd, rows);
        let (value, cover_local) = if instance.rows.is_empty() {
            (0, Vec::new())
        } else {
            set_cover_min(&instance)?
        };
        let cover: Vec<usize> = cover_local.iter().map(|j| self.n + j).collect();

        let convexified = self.sequential_convexify(&cover, limit)?;
        for v in &convexified.vertices {
            assert!(
                v[self.n..].iter().all(is_binary),
                "lpr certificate failed re-verification by sequential convexification"
            );
        }
        Ok(LprResult {
            value,
            cover,
            instance,
        })
    }

    /// Open unit intervals `(alpha, alpha+1)` per binarized variable hit by
    /// the x-projection of a vertex set.
    pub fn hit_intervals(&self, verts: &VPolytope) -> BTreeSet<(usize, BigInt)> {
        let mut set = BTreeSet::new();
        for v in &verts.vertices {
            for (i, &col) in self.binarized.iter().enumerate() {
                let x = &v[col];
                if !is_integer(x) {
                    set.insert((i, x.floor().to_integer()));
                }
            }
        }
        set
    }

    /// Persistency of the interval-hitting property under one
    /// convexification: the intervals hit after convexifying `yvar` must be
    /// a subset of those hit before.
    pub fn check_persistency(&self, yvar: usize, limit: usize) -> Result<()> {
        let before = self.hit_intervals(self.vertices_q(limit)?);
        let after_verts = self.sequential_convexify(&[yvar], limit)?;
        let after = self.hit_intervals(&after_verts);
        for (i, alpha) in after {
            if !before.contains(&(i, alpha.clone())) {
                return Err(Error::PersistencyViolation(
                    alpha.to_string(),
                    self.binarized[i] + 1,
                ));
            }
        }
        Ok(())
    }
}

/// Equation system of the affine hull of a nonempty point set: rows `c` with
/// `c·x = c·v0` for a basis `c` of the orthogonal complement of the
/// direction space.
fn affine_hull_system(points: &[QVector], dim: usize) -> (Vec<QVector>, Vec<Rational>) {
    let v0 = &points[0];
    let dirs: Vec<QVector> = points[1..].iter().map(|p| sub(p, v0)).collect();
    let normals = if dirs.is_empty() {
        (0..dim).map(|i| unit(dim, i)).collect()
    } else {
        QMatrix::new(dirs, dim).nullspace()
    };
    let rhs = normals.iter().map(|c| crate::num::dot(c, v0)).collect();
    (normals, rhs)
}

fn cartesian(ranges: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = vec![Vec::new()];
    for r in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                r.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::qvec;

    fn interval(hi: i64) -> HPolytope {
        HPolytope::new(
            1,
            vec![(qvec(&[1]), qint(hi)), (qvec(&[-1]), qint(0))],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn interval_with_log_binarization_is_the_binarization() {
        let ef =
            ExtendedFormulation::build(interval(3), vec![0], vec![Binarization::log(2).unwrap()])
                .unwrap();
        let verts = ef.vertices_q(DEFAULT_DIM_LIMIT).unwrap();
        assert_eq!(verts, &Binarization::log(2).unwrap().verts);
    }

    #[test]
    fn single_integer_point_with_unary_lifts_to_its_binary_vertex() {
        let point = HPolytope::new(1, vec![], vec![(qvec(&[1]), qint(2))]).unwrap();
        let ef = ExtendedFormulation::build(point, vec![0], vec![Binarization::unary(2).unwrap()])
            .unwrap();
        let verts = ef.vertices_q(DEFAULT_DIM_LIMIT).unwrap();
        assert_eq!(verts.vertices, vec![qvec(&[2, 1, 1])]);
        assert_eq!(ef.lpr(DEFAULT_DIM_LIMIT).unwrap().value, 0);
    }

    #[test]
    fn single_integer_point_vertices_are_the_slice_vertices() {
        // with the log binarization the slice B(2) has a fractional vertex
        // besides the binary lift, and both survive into V(Q)
        let point = HPolytope::new(1, vec![], vec![(qvec(&[1]), qint(2))]).unwrap();
        let ef = ExtendedFormulation::build(point, vec![0], vec![Binarization::log(2).unwrap()])
            .unwrap();
        let verts = ef.vertices_q(DEFAULT_DIM_LIMIT).unwrap();
        assert_eq!(
            verts.vertices,
            vec![
                qvec(&[2, 0, 1]),
                vec![qint(2), qint(1), crate::num::q(1, 2)]
            ]
        );
    }

    #[test]
    fn range_mismatch_is_rejected() {
        let err =
            ExtendedFormulation::build(interval(3), vec![0], vec![Binarization::unary(2).unwrap()])
                .unwrap_err();
        assert!(matches!(err, Error::RangeMismatch(_)));
    }

    #[test]
    fn size_limit_guard_fires() {
        let ef =
            ExtendedFormulation::build(interval(3), vec![0], vec![Binarization::unary(3).unwrap()])
                .unwrap();
        assert!(matches!(
            ef.vertices_q(3),
            Err(Error::SizeLimitExceeded { dim: 4, limit: 3 })
        ));
        assert!(ef.vertices_q(4).is_ok());
    }

    #[test]
    fn index_map_points_at_the_right_columns() {
        let ef =
            ExtendedFormulation::build(interval(2), vec![0], vec![Binarization::unary(2).unwrap()])
                .unwrap();
        assert_eq!(ef.index_map["x1"], 0);
        assert_eq!(ef.index_map["y1_1"], 1);
        assert_eq!(ef.index_map["y1_2"], 2);
        assert_eq!(ef.column_name(2), "y1_2");
    }
}
