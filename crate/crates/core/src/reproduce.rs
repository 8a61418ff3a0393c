//! Reproduction of the worked pyramid example: the polytope with apex
//! `(1/2, 1/2, h)` over `[0,2]^2`, binarized with two copies of the unary
//! binarization of range `{0,1,2}`. Every computed artifact is compared
//! against embedded expected values parameterized by `h`.

use num_traits::Zero;

use crate::bef::ExtendedFormulation;
use crate::binarization::Binarization;
use crate::geom::{HPolytope, VPolytope};
use crate::num::{q, qint, qvec, QVector, Rational};
use crate::{Error, Result};

/// `P = {x in [0,2]^2 x R : h x1 + h x2 + x3 <= 2h, x3 <= 2h x1,
/// x3 <= 2h x2, x3 >= 0}` for `h > 0`.
pub fn pyramid_polytope(h: &Rational) -> Result<HPolytope> {
    if h <= &Rational::zero() {
        return Err(Error::RangeViolation(format!(
            "h must be positive, got {h}"
        )));
    }
    let two_h = h + h;
    let ineqs = vec![
        (qvec(&[1, 0, 0]), qint(2)),
        (qvec(&[-1, 0, 0]), qint(0)),
        (qvec(&[0, 1, 0]), qint(2)),
        (qvec(&[0, -1, 0]), qint(0)),
        (vec![h.clone(), h.clone(), qint(1)], two_h.clone()),
        (vec![-two_h.clone(), qint(0), qint(1)], qint(0)),
        (vec![qint(0), -two_h.clone(), qint(1)], qint(0)),
        (qvec(&[0, 0, -1]), qint(0)),
    ];
    HPolytope::new(3, ineqs, vec![])
}

/// The pyramid with both integer variables binarized by `B^U(2)`.
pub fn pyramid_bef(h: &Rational) -> Result<ExtendedFormulation> {
    ExtendedFormulation::build(
        pyramid_polytope(h)?,
        vec![0, 1],
        vec![Binarization::unary(2)?, Binarization::unary(2)?],
    )
}

pub fn expected_v_p(h: &Rational) -> Vec<QVector> {
    let mut v = vec![
        qvec(&[0, 0, 0]),
        qvec(&[2, 0, 0]),
        qvec(&[0, 2, 0]),
        vec![q(1, 2), q(1, 2), h.clone()],
    ];
    v.sort();
    v
}

pub fn expected_v_q(h: &Rational) -> Vec<QVector> {
    let h23 = h * q(2, 3);
    let rows: Vec<Vec<Rational>> = vec![
        qvec(&[0, 0, 0, 0, 0, 0, 0]),
        qvec(&[2, 0, 0, 1, 1, 0, 0]),
        qvec(&[0, 2, 0, 0, 0, 1, 1]),
        vec![
            q(1, 2),
            q(1, 2),
            h.clone(),
            q(1, 2),
            qint(0),
            q(1, 2),
            qint(0),
        ],
        vec![
            q(1, 2),
            q(1, 2),
            h.clone(),
            q(1, 2),
            qint(0),
            q(1, 4),
            q(1, 4),
        ],
        vec![
            q(1, 2),
            q(1, 2),
            h.clone(),
            q(1, 4),
            q(1, 4),
            q(1, 2),
            qint(0),
        ],
        vec![
            q(1, 2),
            q(1, 2),
            h.clone(),
            q(1, 4),
            q(1, 4),
            q(1, 4),
            q(1, 4),
        ],
        qvec(&[1, 0, 0, 1, 0, 0, 0]),
        qvec(&[0, 1, 0, 0, 0, 1, 0]),
        qvec(&[1, 1, 0, 1, 0, 1, 0]),
        vec![
            qint(1),
            qint(1),
            qint(0),
            q(1, 2),
            q(1, 2),
            qint(1),
            qint(0),
        ],
        vec![
            qint(1),
            qint(1),
            qint(0),
            qint(1),
            qint(0),
            q(1, 2),
            q(1, 2),
        ],
        vec![
            qint(1),
            q(1, 3),
            h23.clone(),
            qint(1),
            qint(0),
            q(1, 3),
            qint(0),
        ],
        vec![
            qint(1),
            q(1, 3),
            h23.clone(),
            qint(1),
            qint(0),
            q(1, 6),
            q(1, 6),
        ],
        vec![
            q(1, 3),
            qint(1),
            h23.clone(),
            q(1, 3),
            qint(0),
            qint(1),
            qint(0),
        ],
        vec![
            q(1, 3),
            qint(1),
            h23.clone(),
            q(1, 6),
            q(1, 6),
            qint(1),
            qint(0),
        ],
    ];
    let mut rows = rows;
    rows.sort();
    rows
}

pub fn expected_projection(h: &Rational) -> Vec<QVector> {
    let h23 = h * q(2, 3);
    let mut pts = vec![
        qvec(&[0, 0, 0]),
        qvec(&[2, 0, 0]),
        qvec(&[0, 2, 0]),
        vec![q(1, 2), q(1, 2), h.clone()],
        qvec(&[1, 0, 0]),
        qvec(&[0, 1, 0]),
        qvec(&[1, 1, 0]),
        vec![qint(1), q(1, 3), h23.clone()],
        vec![q(1, 3), qint(1), h23],
    ];
    pts.sort();
    pts
}

/// Fractional-support rows of the expected `V(Q)` table over the columns
/// `(y11, y12, y21, y22)`, as a sorted multiset of bitmasks.
pub fn expected_a_rows() -> Vec<u64> {
    let mut rows: Vec<u64> = vec![
        0b0101, // y11, y21
        0b1101, // y11, y21, y22
        0b0111, // y11, y12, y21
        0b1111, // all four
        0b0011, // y11, y12
        0b1100, // y21, y22
        0b0100, // y21
        0b1100, // y21, y22
        0b0001, // y11
        0b0011, // y11, y12
    ];
    rows.sort_unstable();
    rows
}

/// The six points of `P` with integer `x1, x2`; the surviving vertices
/// after convexifying the optimal cover project exactly onto them.
pub fn expected_convexified_projection() -> Vec<QVector> {
    let mut pts = vec![
        qvec(&[0, 0, 0]),
        qvec(&[2, 0, 0]),
        qvec(&[0, 2, 0]),
        qvec(&[1, 0, 0]),
        qvec(&[0, 1, 0]),
        qvec(&[1, 1, 0]),
    ];
    pts.sort();
    pts
}

#[derive(Clone, Debug)]
pub struct ArtifactCheck {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct PyramidReport {
    pub h: Rational,
    pub v_p: VPolytope,
    pub v_q: VPolytope,
    pub projection: Vec<QVector>,
    pub a_rows: Vec<u64>,
    pub lpr_value: usize,
    pub cover: Vec<String>,
    pub convexified_projection: Vec<QVector>,
    pub checks: Vec<ArtifactCheck>,
}

impl PyramidReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Build the pyramid formulation for `h`, compute all artifacts, and compare
/// each with its expected value.
pub fn reproduce_pyramid(h: &Rational, limit: usize) -> Result<PyramidReport> {
    let ef = pyramid_bef(h)?;
    let v_p = ef.p_poly.vertices();
    let v_q = ef.vertices_q(limit)?.clone();
    let projection = ef.x_projection(limit)?;
    let lpr = ef.lpr(limit)?;
    let mut a_rows = lpr.instance.rows.clone();
    a_rows.sort_unstable();
    let cover: Vec<String> = lpr.cover.iter().map(|&c| ef.column_name(c)).collect();
    let convexified = ef.sequential_convexify(&lpr.cover, limit)?;
    let convexified_projection = convexified.project(&[0, 1, 2]);

    let cover_mask = lpr.cover.iter().fold(0u64, |m, &c| m | 1 << (c - ef.n));
    let cover_valid = lpr.instance.rows.iter().all(|r| r & cover_mask != 0);
    let survivors_integral = convexified
        .vertices
        .iter()
        .all(|v| crate::num::is_integer(&v[0]) && crate::num::is_integer(&v[1]));

    let checks = vec![
        ArtifactCheck {
            name: "V(P)",
            passed: v_p.vertices == expected_v_p(h),
        },
        ArtifactCheck {
            name: "V(Q)",
            passed: v_q.vertices == expected_v_q(h),
        },
        ArtifactCheck {
            name: "projection of V(Q)",
            passed: projection == expected_projection(h),
        },
        ArtifactCheck {
            name: "A matrix rows",
            passed: a_rows == expected_a_rows(),
        },
        ArtifactCheck {
            name: "lpr value and cover",
            passed: lpr.value == 2 && cover.len() == 2 && cover_valid,
        },
        ArtifactCheck {
            name: "convexified projection",
            passed: convexified_projection == expected_convexified_projection()
                && survivors_integral,
        },
    ];

    Ok(PyramidReport {
        h: h.clone(),
        v_p,
        v_q,
        projection,
        a_rows,
        lpr_value: lpr.value,
        cover,
        convexified_projection,
        checks,
    })
}
