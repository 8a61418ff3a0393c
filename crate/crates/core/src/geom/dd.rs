//! Double description method over exact rationals, for pointed cones.
//!
//! The cone is `{w : a·w >= 0 for each row a}` with `rank(rows) == dim`
//! (callers eliminate equations and lineality beforehand). Rays are kept as
//! primitive integer vectors together with their tight-row sets; a new
//! constraint is inserted by keeping the nonnegative side and combining
//! adjacent ray pairs across the hyperplane. Adjacency is decided
//! combinatorially: `u` and `v` are adjacent iff no third ray is tight on
//! every processed row tight at both.

use num_traits::Zero;
use std::cmp::Ordering;

use crate::bits::Bits;
use crate::linalg::QMatrix;
use crate::num::{dot, primitive, QVector, Rational};

struct Ray {
    v: QVector,
    tight: Bits,
}

fn make_ray(v: QVector, rows: &[QVector], processed: &[usize], capacity: usize) -> Ray {
    let v = primitive(&v);
    let mut tight = Bits::new(capacity);
    for &i in processed {
        if dot(&rows[i], &v).is_zero() {
            tight.set(i);
        }
    }
    Ray { v, tight }
}

/// Extreme rays of the pointed cone `{w in R^dim : rows·w >= 0}`.
pub(crate) fn extreme_rays(dim: usize, rows: &[QVector]) -> Vec<QVector> {
    if dim == 0 {
        return Vec::new();
    }
    let matrix = QMatrix::new(rows.to_vec(), dim);
    let basis = matrix.independent_rows();
    assert_eq!(
        basis.len(),
        dim,
        "cone handed to double description is not pointed"
    );

    let b = QMatrix::new(basis.iter().map(|&i| rows[i].clone()).collect(), dim);
    let binv = b.inverse().expect("basis rows are independent");

    let mut processed: Vec<usize> = basis.clone();
    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: QVector = (0..dim).map(|i| binv.rows[i][j].clone()).collect();
            make_ray(col, rows, &processed, rows.len())
        })
        .collect();

    for i in 0..rows.len() {
        if basis.contains(&i) {
            continue;
        }
        let row = &rows[i];
        let vals: Vec<Rational> = rays.iter().map(|r| dot(row, &r.v)).collect();
        let plus: Vec<usize> = (0..rays.len())
            .filter(|&k| vals[k] > Rational::zero())
            .collect();
        let minus: Vec<usize> = (0..rays.len())
            .filter(|&k| vals[k] < Rational::zero())
            .collect();

        let mut combos: Vec<QVector> = Vec::new();
        for &u in &plus {
            for &v in &minus {
                if !adjacent(&rays, u, v) {
                    continue;
                }
                // vals[u] * ray_v - vals[v] * ray_u is tight on the new row
                // and a positive combination of the pair.
                let combo: QVector = rays[v]
                    .v
                    .iter()
                    .zip(&rays[u].v)
                    .map(|(rv, ru)| &(&vals[u] * rv) - &(&vals[v] * ru))
                    .collect();
                combos.push(combo);
            }
        }

        processed.push(i);
        let mut next: Vec<Ray> = Vec::new();
        for (k, ray) in rays.into_iter().enumerate() {
            match vals[k].cmp(&Rational::zero()) {
                Ordering::Less => {}
                Ordering::Equal => {
                    let mut ray = ray;
                    ray.tight.set(i);
                    next.push(ray);
                }
                Ordering::Greater => next.push(ray),
            }
        }
        for combo in combos {
            next.push(make_ray(combo, rows, &processed, rows.len()));
        }
        rays = next;
    }

    rays.into_iter().map(|r| r.v).collect()
}

fn adjacent(rays: &[Ray], u: usize, v: usize) -> bool {
    let t = rays[u].tight.intersection(&rays[v].tight);
    let mut on_face = 0usize;
    for ray in rays {
        if t.is_subset_of(&ray.tight) {
            on_face += 1;
            if on_face > 2 {
                return false;
            }
        }
    }
    on_face == 2
}

/// Extreme rays of `{z in R^m : ineq·z >= 0, eq·z = 0}` in the original
/// coordinates. The cone must be pointed (no lineality), which callers
/// establish by checking `nullspace([ineqs; eqs]) = {0}` first.
pub(crate) fn extreme_rays_with_eqs(m: usize, ineqs: &[QVector], eqs: &[QVector]) -> Vec<QVector> {
    let null = if eqs.is_empty() {
        (0..m).map(|i| crate::num::unit(m, i)).collect::<Vec<_>>()
    } else {
        QMatrix::new(eqs.to_vec(), m).nullspace()
    };
    let r = null.len();
    if r == 0 {
        return Vec::new();
    }
    let reduced: Vec<QVector> = ineqs
        .iter()
        .map(|a| null.iter().map(|n| dot(a, n)).collect())
        .collect();
    extreme_rays(r, &reduced)
        .into_iter()
        .map(|u| {
            let mut z = crate::num::zeros(m);
            for (c, n) in u.iter().zip(&null) {
                z = crate::num::add_scaled(&z, n, c);
            }
            primitive(&z)
        })
        .collect()
}
