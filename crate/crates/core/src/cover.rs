//! Exact minimum set covering (hitting set) over tiny 0/1 matrices.
//!
//! Rows are bitmasks over a ground set of at most 64 columns; the optimum is
//! found by branch and bound with unit propagation on singleton rows and
//! column-dominance pruning. Instances here come from fractional-vertex
//! incidence and alpha-edge indicators, so they have a handful of columns.

use crate::{Error, Result};

/// A list of 0/1 rows over the ground set `{0,..,d-1}`. Duplicate rows are
/// permitted; all-zero rows make the instance infeasible and are rejected by
/// the solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverInstance {
    pub d: usize,
    pub rows: Vec<u64>,
}

impl SetCoverInstance {
    pub fn new(d: usize, rows: Vec<u64>) -> Self {
        assert!(d <= 64, "ground set larger than 64 is not supported");
        SetCoverInstance { d, rows }
    }

    pub fn from_bool_rows(d: usize, rows: &[Vec<bool>]) -> Self {
        let rows = rows
            .iter()
            .map(|r| {
                debug_assert_eq!(r.len(), d);
                r.iter()
                    .enumerate()
                    .fold(0u64, |m, (i, &b)| if b { m | 1 << i } else { m })
            })
            .collect();
        SetCoverInstance::new(d, rows)
    }

    pub fn row_as_bools(&self, r: usize) -> Vec<bool> {
        (0..self.d).map(|i| self.rows[r] >> i & 1 == 1).collect()
    }
}

/// Exact optimum and one optimal cover (as a sorted column list).
pub fn set_cover_min(inst: &SetCoverInstance) -> Result<(usize, Vec<usize>)> {
    if inst.rows.contains(&0) {
        return Err(Error::InfeasibleRow);
    }
    let mut rows: Vec<u64> = inst.rows.clone();
    rows.sort_unstable();
    rows.dedup();
    // drop rows that are supersets of another row; they are covered for free
    let mut reduced: Vec<u64> = Vec::new();
    for &r in &rows {
        if !rows.iter().any(|&s| s != r && s & r == s) {
            reduced.push(r);
        }
    }

    let mut best: Option<u64> = None;
    let mut chosen: u64 = 0;
    branch(&reduced, inst.d, &mut chosen, &mut best);
    let best = best.expect("feasible instance always has a cover");
    let cols: Vec<usize> = (0..inst.d).filter(|&i| best >> i & 1 == 1).collect();
    Ok((cols.len(), cols))
}

fn branch(rows: &[u64], d: usize, chosen: &mut u64, best: &mut Option<u64>) {
    if let Some(b) = best {
        if chosen.count_ones() >= b.count_ones() {
            return;
        }
    }
    let mut uncovered: Vec<u64> = rows.iter().copied().filter(|r| r & *chosen == 0).collect();
    if uncovered.is_empty() {
        *best = Some(*chosen);
        return;
    }
    // unit propagation: singleton rows force their column
    if let Some(forced) = uncovered.iter().find(|r| r.count_ones() == 1) {
        let col = forced.trailing_zeros();
        *chosen |= 1 << col;
        branch(rows, d, chosen, best);
        *chosen &= !(1 << col);
        return;
    }
    // lower bound: rows with pairwise disjoint support each need a column
    let mut lb = 0u32;
    let mut used = 0u64;
    uncovered.sort_unstable_by_key(|r| r.count_ones());
    for &r in &uncovered {
        if r & used == 0 {
            lb += 1;
            used |= r;
        }
    }
    if let Some(b) = best {
        if chosen.count_ones() + lb >= b.count_ones() {
            return;
        }
    }
    // branch on the columns of a smallest uncovered row; skip dominated
    // columns (covering a subset of another candidate's uncovered rows)
    let pivot = uncovered[0];
    let covers = |col: usize| -> u64 {
        uncovered.iter().enumerate().fold(
            0u64,
            |m, (i, r)| if r >> col & 1 == 1 { m | 1 << i } else { m },
        )
    };
    let all: Vec<(usize, u64)> = (0..d)
        .filter(|&c| pivot >> c & 1 == 1)
        .map(|c| (c, covers(c)))
        .collect();
    let mut candidates: Vec<(usize, u64)> = all
        .iter()
        .filter(|&&(c, cov)| {
            !all.iter()
                .any(|&(c2, cov2)| c2 != c && cov & cov2 == cov && (cov2 != cov || c2 < c))
        })
        .copied()
        .collect();
    candidates.sort_by_key(|&(_, cov)| std::cmp::Reverse(cov.count_ones()));
    for (c, _) in candidates {
        *chosen |= 1 << c;
        branch(rows, d, chosen, best);
        *chosen &= !(1 << c);
    }
}

/// Brute-force optimum by enumerating all column subsets in increasing size;
/// a cross-check path for small ground sets.
pub fn set_cover_min_exhaustive(inst: &SetCoverInstance) -> Result<(usize, Vec<usize>)> {
    if inst.rows.contains(&0) {
        return Err(Error::InfeasibleRow);
    }
    if inst.d > 20 {
        return Err(Error::RangeViolation(format!(
            "exhaustive set cover limited to d <= 20, got {}",
            inst.d
        )));
    }
    if inst.rows.is_empty() {
        return Ok((0, vec![]));
    }
    let mut subsets: Vec<u64> = (0..1u64 << inst.d).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for s in subsets {
        if inst.rows.iter().all(|r| r & s != 0) {
            let cols = (0..inst.d).filter(|&i| s >> i & 1 == 1).collect();
            return Ok((s.count_ones() as usize, cols));
        }
    }
    unreachable!("the full column set always covers")
}
