//! Shared oracles and instance generators for the integration suites.
//!
//! Every oracle here recomputes its answer by a route independent of the
//! library path it cross-checks: vertex enumeration by brute-force basis
//! enumeration, adjacency by midpoint minimal faces, lift-and-project rank
//! by exhaustive subset convexification, set covering by subset sweep.

#![allow(dead_code)]

use binrank_core::bef::ExtendedFormulation;
use binrank_core::binarization::{Binarization, HypercubePerm};
use binrank_core::geom::HPolytope;
use binrank_core::linalg::{QMatrix, Solution};
use binrank_core::num::{dot, is_binary, q, qint, sub, QVector, Rational};
use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Brute-force vertex oracle: every feasible unique solution of the equation
/// rows plus a subset of tightened inequality rows, over all subsets of size
/// at most `dim`.
pub fn brute_force_vertices(h: &HPolytope) -> Vec<QVector> {
    let n = h.dim;
    let mut found: Vec<QVector> = Vec::new();
    let idx: Vec<usize> = (0..h.ineqs.len()).collect();
    for size in 0..=n {
        for subset in idx.iter().copied().combinations(size) {
            let mut rows: Vec<QVector> = h.eqs.iter().map(|(a, _)| a.clone()).collect();
            let mut rhs: Vec<Rational> = h.eqs.iter().map(|(_, b)| b.clone()).collect();
            for &i in &subset {
                rows.push(h.ineqs[i].0.clone());
                rhs.push(h.ineqs[i].1.clone());
            }
            if rows.is_empty() {
                continue;
            }
            if let Solution::Unique(x) = QMatrix::new(rows, n).solve(&rhs) {
                if h.contains(&x) {
                    found.push(x);
                }
            }
        }
    }
    found.sort();
    found.dedup();
    found
}

/// Midpoint adjacency oracle: two vertices are adjacent iff the minimal face
/// containing their midpoint is 1-dimensional. Tight sets and face members
/// are recomputed here from scratch.
pub fn skeleton_oracle(h: &HPolytope) -> Vec<(usize, usize)> {
    let verts = h.vertices().vertices;
    let tight =
        |p: &[Rational]| -> Vec<bool> { h.ineqs.iter().map(|(a, b)| &dot(a, p) == b).collect() };
    let vertex_tights: Vec<Vec<bool>> = verts.iter().map(|v| tight(v)).collect();
    let mut edges = Vec::new();
    for i in 0..verts.len() {
        for j in i + 1..verts.len() {
            let mid = binrank_core::num::midpoint(&verts[i], &verts[j]);
            let mid_tight = tight(&mid);
            let members: Vec<&QVector> = verts
                .iter()
                .zip(&vertex_tights)
                .filter(|(_, vt)| mid_tight.iter().zip(vt.iter()).all(|(&m, &v)| !m || v))
                .map(|(v, _)| v)
                .collect();
            let dirs: Vec<QVector> = members[1..].iter().map(|p| sub(p, members[0])).collect();
            let dim = if dirs.is_empty() {
                0
            } else {
                QMatrix::new(dirs, h.dim).rank()
            };
            if dim == 1 {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Exhaustive lift-and-project oracle over a formulation: the least number
/// of y-columns whose convexification leaves only fully binary-y vertices.
pub fn lpr_exhaustive(ef: &ExtendedFormulation, limit: usize) -> usize {
    let verts = ef.vertices_q(limit).unwrap();
    let pd = ef.q.dim - ef.n;
    assert!(pd <= 16, "exhaustive lpr oracle is for small instances");
    for size in 0..=pd {
        for subset in (0..pd).combinations(size) {
            let ok = verts
                .vertices
                .iter()
                .filter(|v| subset.iter().all(|&j| is_binary(&v[ef.n + j])))
                .all(|v| v[ef.n..].iter().all(is_binary));
            if ok {
                return size;
            }
        }
    }
    unreachable!("convexifying every y-column always works")
}

/// Random H-polytope: a box `[-3,3]^dim` plus extra random cut rows, so the
/// result is always bounded but may well be empty or degenerate.
pub fn random_hpolytope(rng: &mut ChaCha8Rng, dim: usize, extra: usize) -> HPolytope {
    let mut ineqs = Vec::new();
    for i in 0..dim {
        let mut hi = binrank_core::num::zeros(dim);
        hi[i] = qint(1);
        let lo: QVector = hi.iter().map(|x| -x).collect();
        ineqs.push((hi, qint(3)));
        ineqs.push((lo, qint(3)));
    }
    for _ in 0..extra {
        let mut a = binrank_core::num::zeros(dim);
        while a.iter().all(|x| x == &qint(0)) {
            for c in a.iter_mut() {
                *c = qint(rng.gen_range(-2..=2));
            }
        }
        let b = qint(rng.gen_range(-4..=6));
        ineqs.push((a, b));
    }
    HPolytope::new(dim, ineqs, vec![]).expect("box keeps the polytope bounded")
}

/// A natural binarization of a random kind; total y-dimension stays small.
pub fn random_natural_binarization(rng: &mut ChaCha8Rng, max_d: usize) -> Binarization {
    loop {
        let b = match rng.gen_range(0..5) {
            0 => Binarization::unary(rng.gen_range(1..=max_d.min(3))),
            1 => Binarization::full(rng.gen_range(1..=max_d.min(3))),
            2 => Binarization::log(rng.gen_range(1..=max_d.min(2))),
            3 => {
                if max_d < 2 {
                    continue;
                }
                let d = rng.gen_range(2..=max_d.min(3));
                let v = rng.gen_range((1 << (d - 1)) + 1..=1 << d);
                Binarization::trunc_log(v, d)
            }
            _ => {
                if max_d < 2 {
                    continue;
                }
                let mut sigma: Vec<u64> = (0..4).collect();
                use rand::seq::SliceRandom;
                sigma.shuffle(rng);
                Binarization::hypercube(HypercubePerm::new(2, sigma).unwrap())
            }
        };
        return b.expect("constructor arguments are in range");
    }
}

/// Random binary extended formulation: `P` is a box over the binarized
/// ranges (and `[-2,2]` on free variables) cut by a couple of random
/// inequalities through a feasible point, so `P` is never empty and always
/// within range.
pub fn random_bef(rng: &mut ChaCha8Rng, max_total_dim: usize) -> ExtendedFormulation {
    loop {
        let n = rng.gen_range(1..=3usize);
        let p = rng.gen_range(1..=n.min(2));
        let mut bins = Vec::new();
        let mut total = n;
        let mut ok = true;
        for _ in 0..p {
            let b = random_natural_binarization(rng, 3);
            total += b.d;
            if total > max_total_dim {
                ok = false;
                break;
            }
            bins.push(b);
        }
        if !ok {
            continue;
        }

        let mut ineqs: Vec<(QVector, Rational)> = Vec::new();
        let mut x0: QVector = Vec::new();
        for j in 0..n {
            let (lo, hi): (i64, i64) = if j < p {
                (0, bins[j].k as i64)
            } else {
                (-2, 2)
            };
            let mut row = binrank_core::num::zeros(n);
            row[j] = qint(1);
            let neg: QVector = row.iter().map(|x| -x).collect();
            ineqs.push((row, qint(hi)));
            ineqs.push((neg, qint(-lo)));
            // a feasible anchor point with occasional fractional coordinates
            let denom = [1i64, 1, 2][rng.gen_range(0..3)];
            x0.push(q(rng.gen_range(lo * denom..=hi * denom), denom));
        }
        for _ in 0..rng.gen_range(0..=2) {
            let mut a = binrank_core::num::zeros(n);
            for c in a.iter_mut() {
                *c = qint(rng.gen_range(-2..=2));
            }
            if a.iter().all(|x| x == &qint(0)) {
                continue;
            }
            let slack = qint(rng.gen_range(0..=2));
            let b = dot(&a, &x0) + slack;
            ineqs.push((a, b));
        }
        let p_poly = HPolytope::new(n, ineqs, vec![]).expect("boxed");
        let binarized: Vec<usize> = (0..p).collect();
        match ExtendedFormulation::build(p_poly, binarized, bins) {
            Ok(ef) => return ef,
            Err(_) => continue,
        }
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
