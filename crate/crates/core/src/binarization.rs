//! Binarizations of a bounded integer variable: a polytope `B` in
//! `(x, y_1..y_d)` with `y` relaxed to `[0,1]^d` such that the `x`-values
//! reachable with binary `y` are exactly `{0,..,k}`. Constructors for the
//! classical families (unary, full, logarithmic, truncated logarithmic,
//! hypercube) plus arbitrary user bodies, and exact classification of their
//! properties.
//!
//! Convention: `x` is always coordinate 0 of the body.

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::geom::{facet_hull, HPolytope, SkeletonGraph, VPolytope};
use crate::linalg::{QMatrix, Solution};
use crate::num::{is_binary, is_integer, qint, unit, QVector, Rational};
use crate::{Error, Result};

/// Bit vector encoding an integer in reversed (least-significant-first)
/// base 2, so that bit `i` carries weight `2^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitString {
    pub bits: Vec<u8>,
}

impl BitString {
    pub fn encode(x: u64, d: usize) -> Self {
        debug_assert!(d >= 64 || x < 1 << d);
        BitString {
            bits: (0..d).map(|i| (x >> i & 1) as u8).collect(),
        }
    }

    pub fn decode(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    pub fn to_qvector(&self) -> QVector {
        self.bits.iter().map(|&b| qint(b as i64)).collect()
    }
}

/// A bijection between the `d`-cube vertices and `{0,..,2^d-1}`, stored as
/// `sigma[y]` indexed by the bit string `y` read as an integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypercubePerm {
    pub d: usize,
    pub sigma: Vec<u64>,
}

impl HypercubePerm {
    pub fn new(d: usize, sigma: Vec<u64>) -> Result<Self> {
        let n = 1usize << d;
        if sigma.len() != n {
            return Err(Error::NotBijective);
        }
        let mut seen = vec![false; n];
        for &x in &sigma {
            if x as usize >= n || seen[x as usize] {
                return Err(Error::NotBijective);
            }
            seen[x as usize] = true;
        }
        Ok(HypercubePerm { d, sigma })
    }

    /// The logarithmic encoding: `sigma(y) = sum 2^(i-1) y_i`.
    pub fn log_encoding(d: usize) -> Self {
        HypercubePerm {
            d,
            sigma: (0..1u64 << d).collect(),
        }
    }

    pub fn x_of(&self, y: u64) -> u64 {
        self.sigma[y as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinKind {
    Unary,
    Full,
    Log,
    TruncLog { v: u64 },
    Hypercube(HypercubePerm),
    Custom,
}

/// Classification flags per the definitions recalled in the module docs;
/// `affine` carries the exact fit `x = a·y + beta` when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub natural: bool,
    pub integral: bool,
    pub exact: bool,
    pub perfect: bool,
    pub affine: Option<(QVector, Rational)>,
    pub linear: bool,
    pub hypercube: bool,
    /// Some vertex has `x` outside `[0,k]`; possible only with fractional
    /// `y`, and accepted rather than rejected.
    pub x_beyond_range: bool,
}

#[derive(Clone, Debug)]
pub struct Binarization {
    pub d: usize,
    pub k: u64,
    pub kind: BinKind,
    pub body: HPolytope,
    pub verts: VPolytope,
    class: OnceLock<Classification>,
    skel: OnceLock<SkeletonGraph>,
}

impl Binarization {
    /// Validate a body against the binarization condition and cache its
    /// vertex set. The condition checked is: the `x`-values of binary-`y`
    /// vertices form exactly the set `{0,..,k}` (points with binary `y` are
    /// always vertices, so scanning vertices is exhaustive).
    fn from_body(body: HPolytope, k: u64, kind: BinKind) -> Result<Self> {
        if body.dim < 2 {
            return Err(Error::NotABinarization(
                "body must have x and at least one y variable".into(),
            ));
        }
        let d = body.dim - 1;
        let verts = body.vertices();
        for v in &verts.vertices {
            for y in &v[1..] {
                if y.is_negative() || y > &Rational::one() {
                    return Err(Error::NotABinarization(format!(
                        "vertex has y-coordinate {y} outside [0,1]"
                    )));
                }
            }
        }
        let mut found = std::collections::BTreeSet::new();
        let mut extra = Vec::new();
        for v in &verts.vertices {
            if v[1..].iter().all(is_binary) {
                let x = &v[0];
                if is_integer(x) && !x.is_negative() && x.numer() <= &k.into() {
                    found.insert(u64::try_from(x.to_integer()).unwrap());
                } else {
                    extra.push(x.clone());
                }
            }
        }
        if !extra.is_empty() {
            return Err(Error::NotABinarization(format!(
                "binary-y points project to x-values outside {{0,..,{k}}}: {extra:?}"
            )));
        }
        let missing: Vec<u64> = (0..=k).filter(|x| !found.contains(x)).collect();
        if !missing.is_empty() {
            return Err(Error::NotABinarization(format!(
                "x-values {missing:?} of {{0,..,{k}}} are not reachable with binary y"
            )));
        }
        Ok(Binarization {
            d,
            k,
            kind,
            body,
            verts,
            class: OnceLock::new(),
            skel: OnceLock::new(),
        })
    }

    /// `B^U(d) = {x = sum y_i, 1 >= y_1 >= ... >= y_d >= 0}`.
    pub fn unary(d: usize) -> Result<Self> {
        require_d(d)?;
        let n = d + 1;
        let mut eq = vec![Rational::one()];
        eq.extend(std::iter::repeat_n(-Rational::one(), d));
        let mut ineqs = vec![(unit(n, 1), qint(1))];
        for i in 1..d {
            let mut a = crate::num::zeros(n);
            a[i + 1] = Rational::one();
            a[i] = -Rational::one();
            ineqs.push((a, qint(0)));
        }
        let mut last = crate::num::zeros(n);
        last[d] = -Rational::one();
        ineqs.push((last, qint(0)));
        let body = HPolytope::new(n, ineqs, vec![(eq, qint(0))])?;
        Self::from_body(body, d as u64, BinKind::Unary)
    }

    /// `B^F(d) = {x = sum i*y_i, sum y_i <= 1, y in [0,1]^d}`.
    pub fn full(d: usize) -> Result<Self> {
        require_d(d)?;
        let n = d + 1;
        let mut eq = vec![Rational::one()];
        eq.extend((1..=d).map(|i| -qint(i as i64)));
        let mut simplex = vec![Rational::zero()];
        simplex.extend(std::iter::repeat_n(Rational::one(), d));
        let mut ineqs = vec![(simplex, qint(1))];
        ineqs.extend(box_rows(n));
        let body = HPolytope::new(n, ineqs, vec![(eq, qint(0))])?;
        Self::from_body(body, d as u64, BinKind::Full)
    }

    /// `B^L(d) = {x = sum 2^(i-1) y_i, y in [0,1]^d}`.
    pub fn log(d: usize) -> Result<Self> {
        require_d(d)?;
        let n = d + 1;
        let mut eq = vec![Rational::one()];
        eq.extend((0..d).map(|i| -qint(1i64 << i)));
        let body = HPolytope::new(n, box_rows(n).collect(), vec![(eq, qint(0))])?;
        Self::from_body(body, (1u64 << d) - 1, BinKind::Log)
    }

    /// `B^L_{<v}(d)`: convex hull of `(x, (x)_2)` for `0 <= x <= v-1`,
    /// requiring `2^(d-1) < v <= 2^d`.
    pub fn trunc_log(v: u64, d: usize) -> Result<Self> {
        require_d(d)?;
        if v <= 1 << (d - 1) || v > 1 << d {
            return Err(Error::RangeViolation(format!(
                "trunc_log requires 2^(d-1) < v <= 2^d, got v={v}, d={d}"
            )));
        }
        let points = (0..v).map(|x| lift(x, x, d)).collect();
        let body = facet_hull(&VPolytope::new(d + 1, points))?;
        Self::from_body(body, v - 1, BinKind::TruncLog { v })
    }

    /// Hypercube binarization: convex hull of `(sigma(y), y)` over all
    /// binary `y`. Always perfect.
    pub fn hypercube(perm: HypercubePerm) -> Result<Self> {
        let d = perm.d;
        require_d(d)?;
        let points = (0..1u64 << d).map(|y| lift(perm.x_of(y), y, d)).collect();
        let body = facet_hull(&VPolytope::new(d + 1, points))?;
        Self::from_body(body, (1u64 << d) - 1, BinKind::Hypercube(perm))
    }

    /// Validate an arbitrary inequality-form body as a binarization of range
    /// `{0,..,k}`.
    pub fn custom_from_h(body: HPolytope, k: u64) -> Result<Self> {
        Self::from_body(body, k, BinKind::Custom)
    }

    /// Validate the convex hull of an arbitrary point set as a binarization.
    pub fn custom_from_v(points: &VPolytope, k: u64) -> Result<Self> {
        let body = facet_hull(points)?;
        Self::from_body(body, k, BinKind::Custom)
    }

    /// Exact classification; computed once and cached.
    pub fn classify(&self) -> &Classification {
        self.class.get_or_init(|| self.classify_uncached())
    }

    fn classify_uncached(&self) -> Classification {
        let vs = &self.verts.vertices;
        let natural = vs.iter().all(|v| is_integer(&v[0]));
        let integral = vs.iter().all(|v| v[1..].iter().all(is_binary));
        let binary_count = vs.iter().filter(|v| v[1..].iter().all(is_binary)).count();
        let exact = binary_count as u64 == self.k + 1;
        let perfect = exact && natural;
        let x_beyond_range = vs
            .iter()
            .any(|v| v[0].is_negative() || v[0] > qint(self.k as i64));

        // exact fit x = a·y + beta over every vertex; free coefficients (if
        // the y's do not affinely span) are pinned to zero by the solver
        let rows: Vec<QVector> = vs
            .iter()
            .map(|v| {
                let mut r = v[1..].to_vec();
                r.push(Rational::one());
                r
            })
            .collect();
        let rhs: Vec<Rational> = vs.iter().map(|v| v[0].clone()).collect();
        let affine = match QMatrix::new(rows.clone(), self.d + 1).solve(&rhs) {
            Solution::Inconsistent => None,
            Solution::Unique(s) | Solution::Many(s) => {
                let beta = s[self.d].clone();
                Some((s[..self.d].to_vec(), beta))
            }
        };
        // linear means some fit with beta = 0 exists, which the particular
        // affine solution need not witness
        let lin_rows: Vec<QVector> = vs.iter().map(|v| v[1..].to_vec()).collect();
        let linear = !matches!(
            QMatrix::new(lin_rows, self.d).solve(&rhs),
            Solution::Inconsistent
        );

        let hypercube = vs.len() == 1 << self.d && integral && {
            let ys: std::collections::BTreeSet<u64> = vs
                .iter()
                .map(|v| {
                    v[1..]
                        .iter()
                        .enumerate()
                        .fold(0u64, |m, (i, y)| if y.is_one() { m | 1 << i } else { m })
                })
                .collect();
            let xs: std::collections::BTreeSet<Rational> =
                vs.iter().map(|v| v[0].clone()).collect();
            ys.len() == 1 << self.d && xs == (0..1u64 << self.d).map(|x| qint(x as i64)).collect()
        };

        Classification {
            natural,
            integral,
            exact,
            perfect,
            affine,
            linear,
            hypercube,
            x_beyond_range,
        }
    }

    pub fn is_natural(&self) -> bool {
        self.classify().natural
    }

    /// Skeleton of the body; computed once and cached.
    pub fn skeleton(&self) -> &SkeletonGraph {
        self.skel.get_or_init(|| self.body.skeleton())
    }

    /// Vertex set of `B(f) = {(x,y) in B : x = f}`.
    pub fn slice_at(&self, f: &Rational) -> VPolytope {
        self.body
            .slice(0, f)
            .expect("x is coordinate 0 of a binarization body")
    }

    /// The binary lift of `x`: each `y` with `(x, y)` a binary-`y` vertex.
    pub fn lifts_of(&self, x: u64) -> Vec<QVector> {
        let x = qint(x as i64);
        self.verts
            .vertices
            .iter()
            .filter(|v| v[0] == x && v[1..].iter().all(is_binary))
            .map(|v| v[1..].to_vec())
            .collect()
    }
}

fn require_d(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::RangeViolation("d must be at least 1".into()));
    }
    if d > 20 {
        return Err(Error::RangeViolation(format!(
            "d={d} is beyond the supported geometric range"
        )));
    }
    Ok(())
}

/// `0 <= y_i <= 1` rows for a body with `x` at coordinate 0.
fn box_rows(n: usize) -> impl Iterator<Item = (QVector, Rational)> {
    (1..n).flat_map(move |i| {
        let lo: QVector = unit(n, i).iter().map(|x| -x).collect();
        [(unit(n, i), qint(1)), (lo, qint(0))]
    })
}

fn lift(x: u64, y: u64, d: usize) -> QVector {
    let mut p = vec![qint(x as i64)];
    p.extend(BitString::encode(y, d).to_qvector());
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qvec};

    #[test]
    fn bitstring_round_trip() {
        for d in 1..8 {
            for x in 0..1u64 << d {
                assert_eq!(BitString::encode(x, d).decode(), x);
            }
        }
        // y_1 is the least significant bit
        assert_eq!(BitString::encode(6, 3).bits, vec![0, 1, 1]);
    }

    #[test]
    fn unary_vertices_are_prefix_patterns() {
        let b = Binarization::unary(2).unwrap();
        assert_eq!(
            b.verts.vertices,
            vec![qvec(&[0, 0, 0]), qvec(&[1, 1, 0]), qvec(&[2, 1, 1])]
        );
        let b1 = Binarization::unary(1).unwrap();
        assert_eq!(b1.verts.vertices, vec![qvec(&[0, 0]), qvec(&[1, 1])]);
        let b4 = Binarization::unary(4).unwrap();
        assert_eq!(b4.verts.vertices.len(), 5);
        for (i, v) in b4.verts.vertices.iter().enumerate() {
            assert_eq!(v[0], qint(i as i64));
            let ones: i64 = (1..=4).map(|j| if v[j].is_one() { 1 } else { 0 }).sum();
            assert_eq!(ones, i as i64);
        }
        // simplex: complete skeleton K5
        assert_eq!(b4.skeleton().edges.len(), 10);
    }

    #[test]
    fn full_vertices_are_origin_and_scaled_units() {
        let b = Binarization::full(3).unwrap();
        assert_eq!(
            b.verts.vertices,
            vec![
                qvec(&[0, 0, 0, 0]),
                qvec(&[1, 1, 0, 0]),
                qvec(&[2, 0, 1, 0]),
                qvec(&[3, 0, 0, 1]),
            ]
        );
        assert_eq!(
            Binarization::full(1).unwrap().verts,
            Binarization::unary(1).unwrap().verts
        );
        // simplices have complete skeletons: K4 here, K5 for d = 4
        assert_eq!(b.skeleton().edges.len(), 6);
        let b4 = Binarization::full(4).unwrap();
        assert_eq!(b4.verts.vertices.len(), 5);
        assert_eq!(b4.skeleton().edges.len(), 10);
    }

    #[test]
    fn log_is_the_labelled_hypercube() {
        let b = Binarization::log(2).unwrap();
        assert_eq!(
            b.verts.vertices,
            vec![
                qvec(&[0, 0, 0]),
                qvec(&[1, 1, 0]),
                qvec(&[2, 0, 1]),
                qvec(&[3, 1, 1]),
            ]
        );
        let b3 = Binarization::log(3).unwrap();
        assert_eq!(b3.verts.vertices.len(), 8);
        assert_eq!(b3.skeleton().edges.len(), 12);
        let c = b3.classify();
        let (a, beta) = c.affine.clone().unwrap();
        assert_eq!(a, qvec(&[1, 2, 4]));
        assert!(beta.is_zero());
        assert!(c.linear);
    }

    #[test]
    fn trunc_log_examples() {
        let t = Binarization::trunc_log(3, 2).unwrap();
        assert_eq!(
            t.verts.vertices,
            vec![qvec(&[0, 0, 0]), qvec(&[1, 1, 0]), qvec(&[2, 0, 1])]
        );
        assert_eq!(t.k, 2);
        // v = 2^d: same polytope as the full logarithmic binarization
        assert_eq!(
            Binarization::trunc_log(4, 2).unwrap().verts,
            Binarization::log(2).unwrap().verts
        );
        let t6 = Binarization::trunc_log(6, 3).unwrap();
        assert_eq!(t6.verts.vertices.len(), 6);
        // surviving cube edges stay edges of the truncation
        let full = Binarization::log(3).unwrap();
        for &(i, j) in &full.skeleton().edges {
            let u = &full.verts.vertices[i];
            let v = &full.verts.vertices[j];
            if t6.verts.contains_vertex(u) && t6.verts.contains_vertex(v) {
                let iu = t6.verts.vertices.iter().position(|w| w == u).unwrap();
                let iv = t6.verts.vertices.iter().position(|w| w == v).unwrap();
                let e = (iu.min(iv), iu.max(iv));
                assert!(t6.skeleton().edges.contains(&e));
            }
        }
        assert!(matches!(
            Binarization::trunc_log(2, 2),
            Err(Error::RangeViolation(_))
        ));
        assert!(matches!(
            Binarization::trunc_log(5, 2),
            Err(Error::RangeViolation(_))
        ));
    }

    #[test]
    fn hypercube_permutation_binarizations() {
        let log = Binarization::hypercube(HypercubePerm::log_encoding(2)).unwrap();
        assert_eq!(log.verts, Binarization::log(2).unwrap().verts);
        let perm = HypercubePerm::new(2, vec![0, 2, 1, 3]).unwrap();
        let b = Binarization::hypercube(perm).unwrap();
        assert_eq!(b.k, 3);
        let c = b.classify();
        assert!(c.perfect && c.natural && c.exact && c.integral && c.hypercube);
        assert!(HypercubePerm::new(2, vec![0, 2, 2, 3]).is_err());
        assert!(HypercubePerm::new(2, vec![0, 1, 2]).is_err());
    }

    #[test]
    fn classic_binarizations_are_perfect_and_affine() {
        for b in [
            Binarization::unary(3).unwrap(),
            Binarization::full(3).unwrap(),
            Binarization::log(3).unwrap(),
        ] {
            let c = b.classify();
            assert!(c.perfect && c.natural && c.integral && c.exact);
            assert!(c.affine.is_some());
            assert!(!c.x_beyond_range);
        }
    }

    #[test]
    fn nonnatural_binarization_from_inequalities() {
        // {x = y1 + y2, y1 <= 2 y2, y in [0,1]^2}: valid with k = 2 but has
        // the fractional vertex (3/2, 1, 1/2)
        let n = 3;
        let mut ineqs: Vec<(QVector, Rational)> = box_rows(n).collect();
        ineqs.push((vec![qint(0), qint(1), qint(-2)], qint(0)));
        let eq = (vec![qint(1), qint(-1), qint(-1)], qint(0));
        let body = HPolytope::new(n, ineqs, vec![eq]).unwrap();
        let b = Binarization::custom_from_h(body, 2).unwrap();
        let c = b.classify();
        assert!(!c.natural);
        assert!(b.verts.contains_vertex(&[q(3, 2), qint(1), q(1, 2)]));
    }

    #[test]
    fn custom_counterexample_binarization_is_affine_not_linear() {
        let pts = VPolytope::new(
            3,
            vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[2, 0, 1])],
        );
        let b = Binarization::custom_from_v(&pts, 2).unwrap();
        let c = b.classify();
        let (a, beta) = c.affine.clone().unwrap();
        assert_eq!(a, qvec(&[-1, 1]));
        assert_eq!(beta, qint(1));
        assert!(!c.linear);
        assert!(c.natural && c.exact && c.perfect);
    }

    #[test]
    fn rejects_non_binarizations() {
        // x = 3 y1 misses x-values 1 and 2
        let body =
            HPolytope::new(2, box_rows(2).collect(), vec![(qvec(&[1, -3]), qint(0))]).unwrap();
        match Binarization::custom_from_h(body, 3) {
            Err(Error::NotABinarization(msg)) => assert!(msg.contains("[1, 2]")),
            other => panic!("expected NotABinarization, got {other:?}"),
        }
    }

    #[test]
    fn every_constructor_output_revalidates() {
        let bins = [
            Binarization::unary(3).unwrap(),
            Binarization::full(2).unwrap(),
            Binarization::log(2).unwrap(),
            Binarization::trunc_log(3, 2).unwrap(),
            Binarization::hypercube(HypercubePerm::new(2, vec![3, 1, 0, 2]).unwrap()).unwrap(),
        ];
        for b in bins {
            assert!(Binarization::custom_from_h(b.body.clone(), b.k).is_ok());
        }
    }
}
