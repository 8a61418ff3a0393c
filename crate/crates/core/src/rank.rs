//! The rank of a natural binarization: how many of its binary variables must
//! be convexified before no vertex is left strictly between `alpha` and
//! `alpha+1`, for a chosen set of thresholds. Computed three independent
//! ways — from alpha-edge indicators of the skeleton, from the
//! lift-and-project rank of fractional slices, and from closed-form
//! formulas for the classical families — plus a purely combinatorial engine
//! for hypercube binarizations.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bef::ExtendedFormulation;
use crate::binarization::{Binarization, HypercubePerm};
use crate::cover::{set_cover_min, SetCoverInstance};
use crate::geom::{facet_hull, VPolytope};
use crate::num::{is_binary, q, qint, QVector, Rational};
use crate::{Error, Result};

/// An alpha-edge of the skeleton along with its indicator vector: `t_j = 0`
/// exactly when the endpoints agree on `y_j` with a common binary value.
#[derive(Clone, Debug)]
pub struct EdgeIndicator {
    pub endpoints: (QVector, QVector),
    pub t: Vec<bool>,
}

impl EdgeIndicator {
    pub fn mask(&self) -> u64 {
        self.t
            .iter()
            .enumerate()
            .fold(0, |m, (j, &b)| if b { m | 1 << j } else { m })
    }
}

fn require_natural(b: &Binarization) -> Result<()> {
    if !b.is_natural() {
        return Err(Error::NonNaturalBinarization);
    }
    Ok(())
}

fn require_alpha(alpha: u64, k: u64, what: &str) -> Result<()> {
    if k == 0 || alpha > k - 1 {
        return Err(Error::RangeViolation(format!(
            "alpha={alpha} outside {{0,..,{}}} for {what}",
            k.saturating_sub(1)
        )));
    }
    Ok(())
}

fn dedup_sorted(alphas: &[u64]) -> Result<Vec<u64>> {
    if alphas.is_empty() {
        return Err(Error::RangeViolation("alphas must be nonempty".into()));
    }
    let mut a = alphas.to_vec();
    a.sort_unstable();
    a.dedup();
    Ok(a)
}

/// All skeleton edges of `B` whose endpoint x-values straddle
/// `alpha / alpha+1`, with indicator vectors.
pub fn alpha_edges(b: &Binarization, alpha: u64) -> Result<Vec<EdgeIndicator>> {
    require_natural(b)?;
    require_alpha(alpha, b.k, "alpha_edges")?;
    let lo = qint(alpha as i64);
    let hi = qint(alpha as i64 + 1);
    let sk = b.skeleton();
    let mut out = Vec::new();
    for &(i, j) in &sk.edges {
        let (u, v) = (&sk.nodes[i], &sk.nodes[j]);
        let straddles = (u[0] <= lo && v[0] >= hi) || (v[0] <= lo && u[0] >= hi);
        if !straddles {
            continue;
        }
        let t: Vec<bool> = (1..=b.d)
            .map(|c| !(u[c] == v[c] && is_binary(&u[c])))
            .collect();
        debug_assert!(
            t.iter().any(|&x| x),
            "alpha-edge of a natural binarization with an all-zero indicator"
        );
        out.push(EdgeIndicator {
            endpoints: (u.clone(), v.clone()),
            t,
        });
    }
    Ok(out)
}

/// Set covering instance whose rows are the indicator vectors of all
/// `alpha_j`-edges.
pub fn indicator_instance(b: &Binarization, alphas: &[u64]) -> Result<SetCoverInstance> {
    let mut rows = Vec::new();
    for &a in &dedup_sorted(alphas)? {
        for e in alpha_edges(b, a)? {
            rows.push(e.mask());
        }
    }
    Ok(SetCoverInstance::new(b.d, rows))
}

/// Rank from the skeleton route: minimum hitting set of the alpha-edge
/// indicators.
pub fn rank_skeleton(b: &Binarization, alphas: &[u64]) -> Result<usize> {
    let inst = indicator_instance(b, alphas)?;
    if inst.rows.is_empty() {
        return Ok(0);
    }
    Ok(set_cover_min(&inst)?.0)
}

/// Set covering instance of the direct route: fractional `y`-supports of the
/// vertices of `conv(union of slices B(alpha_j + offset))`.
pub fn direct_instance(
    b: &Binarization,
    alphas: &[u64],
    offset: &Rational,
) -> Result<SetCoverInstance> {
    require_natural(b)?;
    if !(offset > &qint(0) && offset < &qint(1)) {
        return Err(Error::RangeViolation(format!(
            "slice offset must be strictly between 0 and 1, got {offset}"
        )));
    }
    let mut points = Vec::new();
    for &a in &dedup_sorted(alphas)? {
        require_alpha(a, b.k, "rank_direct")?;
        let f = qint(a as i64) + offset;
        points.extend(b.slice_at(&f).vertices);
    }
    let union = VPolytope::new(b.d + 1, points);
    let hull_vertices = facet_hull(&union)?.vertices();
    let mut rows = Vec::new();
    for v in &hull_vertices.vertices {
        let mask = (0..b.d).fold(
            0u64,
            |m, j| {
                if is_binary(&v[1 + j]) {
                    m
                } else {
                    m | 1 << j
                }
            },
        );
        // a slice point has fractional x, so its y cannot be fully binary
        assert!(mask != 0, "slice vertex with fully binary y");
        rows.push(mask);
    }
    Ok(SetCoverInstance::new(b.d, rows))
}

/// Rank from the definition: lift-and-project rank of the convex hull of
/// fractional slices, taken at `alpha_j + 1/2`. The value does not depend on
/// where inside the unit interval the slices are taken.
pub fn rank_direct(b: &Binarization, alphas: &[u64]) -> Result<usize> {
    rank_direct_at(b, alphas, &q(1, 2))
}

pub fn rank_direct_at(b: &Binarization, alphas: &[u64], offset: &Rational) -> Result<usize> {
    let inst = direct_instance(b, alphas, offset)?;
    if inst.rows.is_empty() {
        return Ok(0);
    }
    Ok(set_cover_min(&inst)?.0)
}

/// Rank of the unary binarization `B^U(d)`: the number of distinct alphas.
pub fn rank_unary_formula(d: usize, alphas: &[u64]) -> Result<usize> {
    let a = dedup_sorted(alphas)?;
    for &x in &a {
        require_alpha(x, d as u64, "rank_unary_formula")?;
    }
    Ok(a.len())
}

/// Rank of the full binarization `B^F(d)`: `d - min(alphas)`.
pub fn rank_full_formula(d: usize, alphas: &[u64]) -> Result<usize> {
    let a = dedup_sorted(alphas)?;
    for &x in &a {
        require_alpha(x, d as u64, "rank_full_formula")?;
    }
    Ok(d - a[0] as usize)
}

/// `f` for the logarithmic binarization at a single alpha: the 2-adic
/// valuation of `alpha+1`, equivalently the run of least-significant 1-bits
/// of `alpha`. Both routes are computed and must agree.
pub fn f_log(alpha: u64) -> u32 {
    let val = (alpha + 1).trailing_zeros();
    let ones = alpha.trailing_ones();
    assert_eq!(val, ones);
    val
}

/// Rank of the logarithmic binarization `B^L(d)`:
/// `d - max{t : 2^t divides alpha_j + 1 for all j}`.
pub fn rank_log_formula(d: usize, alphas: &[u64]) -> Result<usize> {
    let a = dedup_sorted(alphas)?;
    for &x in &a {
        require_alpha(x, (1u64 << d) - 1, "rank_log_formula")?;
    }
    let f = a.iter().map(|&x| f_log(x)).min().unwrap();
    Ok(d - f as usize)
}

fn check_trunc_args(v: u64, d: usize, alpha: u64) -> Result<()> {
    if d == 0 || v <= 1 << (d - 1) || v > 1 << d {
        return Err(Error::RangeViolation(format!(
            "rank_trunc requires 2^(d-1) < v <= 2^d, got v={v}, d={d}"
        )));
    }
    if alpha > v - 2 {
        return Err(Error::RangeViolation(format!(
            "alpha={alpha} outside {{0,..,{}}} for rank_trunc",
            v - 2
        )));
    }
    Ok(())
}

/// Rank of the truncated logarithmic binarization `B^L_{<v}(d)` at a single
/// alpha, by the recursion: below the split it equals the full logarithmic
/// rank, above it recurses into the upper copy with one forced variable.
pub fn rank_trunc(v: u64, d: usize, alpha: u64) -> Result<usize> {
    check_trunc_args(v, d, alpha)?;
    let half = 1u64 << (d - 1);
    if alpha < half {
        rank_log_formula(d, &[alpha])
    } else {
        let v2 = v - half;
        let d2 = ceil_log2(v2);
        Ok(1 + rank_trunc(v2, d2, alpha - half)?)
    }
}

/// Closed-form cross-check for `rank_trunc`, used only for `v < 2^d` (at
/// `v = 2^d` the truncation is the full logarithmic binarization). `d~` is
/// read as `ceil(log2 v~)` with `v~` the truncation of `v`; the recursion
/// stays authoritative and disagreement is surfaced, not reconciled.
pub fn rank_trunc_closed_form(v: u64, d: usize, alpha: u64) -> Result<usize> {
    check_trunc_args(v, d, alpha)?;
    if v == 1 << d {
        return rank_log_formula(d, &[alpha]);
    }
    let bit = |x: u64, j: usize| x >> (j - 1) & 1;
    let j = (1..=d)
        .rev()
        .find(|&j| bit(v, j) == 1 && bit(alpha, j) == 0)
        .expect("alpha <= v-2 guarantees a 1-bit of v over a 0-bit of alpha");
    let s = (j + 1..=d)
        .filter(|&j2| bit(v, j2) == 1 && bit(alpha, j2) == 1)
        .count();
    let alpha_t = alpha & ((1 << j) - 1);
    let v_t = v & ((1 << j) - 1);
    let d_t = ceil_log2(v_t);
    Ok(s + rank_log_formula(d_t, &[alpha_t])?)
}

fn ceil_log2(v: u64) -> usize {
    debug_assert!(v >= 1);
    v.next_power_of_two().trailing_zeros() as usize
}

/// The cut structure of a hypercube binarization on the hypercube graph:
/// per alpha the cut `delta(V_alpha)` and per coordinate the type cut
/// `delta(V_0^i)`. Edges are `(endpoint with bit i = 0, i)`.
#[derive(Clone, Debug)]
pub struct CutFamily {
    pub d: usize,
    pub alpha_cuts: Vec<(u64, Vec<(u64, usize)>)>,
    pub type_cuts: Vec<Vec<(u64, usize)>>,
}

pub fn cut_family(perm: &HypercubePerm, alphas: &[u64]) -> Result<CutFamily> {
    let d = perm.d;
    let alphas = dedup_sorted(alphas)?;
    for &a in &alphas {
        require_alpha(a, (1u64 << d) - 1, "hypercube cuts")?;
    }
    let mut alpha_cuts = Vec::new();
    for &a in &alphas {
        let mut cut = Vec::new();
        for y in 0..1u64 << d {
            for i in 0..d {
                if y >> i & 1 == 1 {
                    continue;
                }
                let inside_lo = perm.x_of(y) <= a;
                let inside_hi = perm.x_of(y | 1 << i) <= a;
                if inside_lo != inside_hi {
                    cut.push((y, i));
                }
            }
        }
        alpha_cuts.push((a, cut));
    }
    let type_cuts = (0..d)
        .map(|i| {
            (0..1u64 << d)
                .filter(|y| y >> i & 1 == 0)
                .map(|y| (y, i))
                .collect()
        })
        .collect();
    Ok(CutFamily {
        d,
        alpha_cuts,
        type_cuts,
    })
}

/// Rank of a hypercube binarization, computed purely combinatorially from
/// its labelling: the number of coordinate cuts met by the union of the
/// alpha cuts. No geometry is materialized.
pub fn hypercube_rank(perm: &HypercubePerm, alphas: &[u64]) -> Result<usize> {
    let cuts = cut_family(perm, alphas)?;
    let mut hit = vec![false; cuts.d];
    for (_, cut) in &cuts.alpha_cuts {
        for &(_, i) in cut {
            hit[i] = true;
        }
    }
    Ok(hit.iter().filter(|&&h| h).count())
}

#[derive(Clone, Copy, Debug)]
pub enum SampleMode {
    /// Every bijection; feasible for d <= 3.
    Exhaustive,
    /// Seeded Fisher-Yates samples, reproducible by construction.
    Sample { n: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct LogbestReport {
    pub d: usize,
    pub alphas: Vec<u64>,
    pub rank_log: usize,
    pub total_checked: usize,
    pub min_rank_seen: usize,
    pub log_attains_min: bool,
    pub rank_histogram: BTreeMap<usize, usize>,
    /// Labellings whose rank fell below the logarithmic rank (expected none).
    pub logbest_violations: Vec<Vec<u64>>,
    /// `(sigma, alpha_j)` pairs where `2^f` fails to divide `alpha_j + 1`
    /// (expected none).
    pub matchings_violations: Vec<(Vec<u64>, u64)>,
}

/// Sweep hypercube labellings and check, for each, that its rank is at least
/// the logarithmic rank and that `2^f` divides every `alpha_j + 1`.
pub fn verify_logbest(d: usize, alphas: &[u64], mode: SampleMode) -> Result<LogbestReport> {
    let alphas = dedup_sorted(alphas)?;
    let rank_log = rank_log_formula(d, &alphas)?;
    let mut report = LogbestReport {
        d,
        alphas: alphas.clone(),
        rank_log,
        total_checked: 0,
        min_rank_seen: usize::MAX,
        log_attains_min: false,
        rank_histogram: BTreeMap::new(),
        logbest_violations: Vec::new(),
        matchings_violations: Vec::new(),
    };

    let check = |sigma: Vec<u64>, report: &mut LogbestReport| -> Result<()> {
        let perm = HypercubePerm { d, sigma };
        let r = hypercube_rank(&perm, &alphas)?;
        report.total_checked += 1;
        *report.rank_histogram.entry(r).or_insert(0) += 1;
        report.min_rank_seen = report.min_rank_seen.min(r);
        if r < rank_log {
            report.logbest_violations.push(perm.sigma.clone());
        }
        let f = (d - r) as u32;
        for &a in &alphas {
            if (a + 1) % (1u64 << f) != 0 {
                report.matchings_violations.push((perm.sigma.clone(), a));
            }
        }
        Ok(())
    };

    match mode {
        SampleMode::Exhaustive => {
            if d > 3 {
                return Err(Error::RangeViolation(
                    "exhaustive labelling sweep is limited to d <= 3".into(),
                ));
            }
            let n = 1usize << d;
            for sigma in (0..n as u64).permutations(n) {
                check(sigma, &mut report)?;
            }
        }
        SampleMode::Sample { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sigma: Vec<u64> = (0..1u64 << d).collect();
            for _ in 0..n {
                sigma.shuffle(&mut rng);
                check(sigma.clone(), &mut report)?;
            }
        }
    }

    let log_rank = hypercube_rank(&HypercubePerm::log_encoding(d), &alphas)?;
    report.log_attains_min = log_rank == rank_log && log_rank <= report.min_rank_seen;
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct PropertyRankResult {
    pub value: usize,
    /// Cover as 0-based positions within binarization `i`'s y-block.
    pub cover: Vec<usize>,
    /// Alphas with no violating vertex; they contribute no rows, and with
    /// any present the skeleton comparison is skipped.
    pub dropped: Vec<u64>,
    pub skeleton_rank: Option<usize>,
    pub agrees_with_skeleton: Option<bool>,
}

/// Rank of the property "no vertex has `x_i` strictly inside
/// `(alpha_j, alpha_j+1)`" over a binary extended formulation, restricted to
/// the y-variables of binarization `i`: the set covering optimum over the
/// fractional `y_i`-supports of violating vertices of `Q`. When every alpha
/// has a violating vertex this must equal the skeleton rank of the
/// binarization alone.
pub fn property_rank(
    ef: &ExtendedFormulation,
    i: usize,
    alphas: &[u64],
    limit: usize,
) -> Result<PropertyRankResult> {
    require_natural(&ef.bins[i])?;
    let alphas = dedup_sorted(alphas)?;
    for &a in &alphas {
        require_alpha(a, ef.bins[i].k, "property_rank")?;
    }
    let verts = ef.vertices_q(limit)?;
    let col = ef.binarized[i];
    let d = ef.bins[i].d;
    let y0 = ef.y_offsets[i];

    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for &a in &alphas {
        let lo = qint(a as i64);
        let hi = qint(a as i64 + 1);
        let mut any = false;
        for v in &verts.vertices {
            if v[col] > lo && v[col] < hi {
                any = true;
                let mask = (0..d).fold(
                    0u64,
                    |m, j| {
                        if is_binary(&v[y0 + j]) {
                            m
                        } else {
                            m | 1 << j
                        }
                    },
                );
                assert!(mask != 0, "violating vertex with binary y-block");
                rows.push(mask);
            }
        }
        if !any {
            dropped.push(a);
        }
    }
    let inst = SetCoverInstance::new(d, rows);
    let (value, cover) = if inst.rows.is_empty() {
        (0, Vec::new())
    } else {
        set_cover_min(&inst)?
    };
    let (skeleton_rank, agrees) = if dropped.is_empty() {
        let r = rank_skeleton(&ef.bins[i], &alphas)?;
        (Some(r), Some(r == value))
    } else {
        (None, None)
    };
    Ok(PropertyRankResult {
        value,
        cover,
        dropped,
        skeleton_rank,
        agrees_with_skeleton: agrees,
    })
}
