//! Binary extended formulations end to end: the worked pyramid instance,
//! the vertex characterization and its failure for non-natural
//! binarizations, sequential convexification, persistency and
//! lift-and-project ranks against the exhaustive oracle.

mod common;

use binrank_core::bef::{ExtendedFormulation, DEFAULT_DIM_LIMIT as LIMIT};
use binrank_core::binarization::Binarization;
use binrank_core::geom::HPolytope;
use binrank_core::num::{is_binary, is_integer, q, qint, qvec, QVector};
use binrank_core::rank::{property_rank, rank_skeleton};
use binrank_core::reproduce::{expected_projection, expected_v_q, pyramid_bef, pyramid_polytope};
use common::{lpr_exhaustive, random_bef, seeded_rng};
use rand::seq::SliceRandom;

#[test]
fn pyramid_v_q_matches_the_table() {
    let h = qint(3);
    let ef = pyramid_bef(&h).unwrap();
    assert_eq!(ef.q.dim, 7);
    let verts = ef.vertices_q(LIMIT).unwrap();
    assert_eq!(verts.vertices.len(), 16);
    assert_eq!(verts.vertices, expected_v_q(&h));
}

#[test]
fn pyramid_projection_and_characterization_agree() {
    let h = qint(3);
    let ef = pyramid_bef(&h).unwrap();
    let proj = ef.x_projection(LIMIT).unwrap();
    assert_eq!(proj, expected_projection(&h));
    assert_eq!(ef.characterize_projection().unwrap(), proj);
}

#[test]
fn projection_is_independent_of_the_natural_binarization() {
    // same pyramid, logarithmic binarizations instead of unary: V(Q) differs
    // but the projected vertex set is identical
    let h = qint(3);
    let ef = ExtendedFormulation::build(
        pyramid_polytope(&h).unwrap(),
        vec![0, 1],
        vec![Binarization::log(2).unwrap(), Binarization::log(2).unwrap()],
    )
    .unwrap();
    assert_eq!(ef.x_projection(LIMIT).unwrap(), expected_projection(&h));
    assert_eq!(
        ef.characterize_projection().unwrap(),
        expected_projection(&h)
    );
}

fn nonnatural_bin() -> Binarization {
    // {x = y1 + y2, y1 <= 2 y2, y in [0,1]^2}
    let mut ineqs: Vec<(QVector, _)> = vec![(vec![qint(0), qint(1), qint(-2)], qint(0))];
    for i in 1..=2 {
        let mut hi = binrank_core::num::zeros(3);
        hi[i] = qint(1);
        let lo: QVector = hi.iter().map(|x| -x).collect();
        ineqs.push((hi, qint(1)));
        ineqs.push((lo, qint(0)));
    }
    let eq = (vec![qint(1), qint(-1), qint(-1)], qint(0));
    let body = HPolytope::new(3, ineqs, vec![eq]).unwrap();
    Binarization::custom_from_h(body, 2).unwrap()
}

#[test]
fn nonnatural_binarizations_break_the_characterization() {
    let h = qint(3);
    let ef = ExtendedFormulation::build(
        pyramid_polytope(&h).unwrap(),
        vec![0, 1],
        vec![nonnatural_bin(), nonnatural_bin()],
    )
    .unwrap();
    assert!(matches!(
        ef.characterize_projection(),
        Err(binrank_core::Error::NonNaturalBinarization)
    ));
    let direct = ef.x_projection(LIMIT).unwrap();
    let f = |v: &[i64; 3]| -> QVector { qvec(v) };
    assert!(direct.contains(&vec![qint(0), q(3, 2), qint(0)]));
    assert!(direct.contains(&vec![q(3, 2), qint(0), qint(0)]));
    let candidates = ef.projection_candidates();
    assert!(!candidates.contains(&vec![qint(0), q(3, 2), qint(0)]));
    assert_ne!(direct, candidates);
    // the integral vertices of P are still found by both routes
    assert!(candidates.contains(&f(&[0, 0, 0])));
    assert!(direct.contains(&f(&[0, 0, 0])));
}

#[test]
fn pyramid_vertex_witnesses() {
    let h = qint(3);
    let ef = pyramid_bef(&h).unwrap();

    // apex lift: I is empty, F is the apex vertex of P
    let v4 = vec![
        q(1, 2),
        q(1, 2),
        h.clone(),
        q(1, 2),
        qint(0),
        q(1, 2),
        qint(0),
    ];
    let w = ef.verify_vertex_conditions(&v4, LIMIT).unwrap();
    assert!(w.fixing.vars.is_empty());
    assert_eq!(w.face.dim, 0);
    assert_eq!(w.face.vertices, vec![vec![q(1, 2), q(1, 2), h.clone()]]);

    // edge point (1, 1/3, 2h/3): I = {x1} fixed at 1, F the slanted edge
    let v13 = vec![
        qint(1),
        q(1, 3),
        qint(2),
        qint(1),
        qint(0),
        q(1, 3),
        qint(0),
    ];
    let w = ef.verify_vertex_conditions(&v13, LIMIT).unwrap();
    assert_eq!(w.fixing.vars, vec![0]);
    assert_eq!(w.fixing.values, vec![1]);
    assert_eq!(w.face.dim, 1);
    let mut edge = vec![qvec(&[2, 0, 0]), vec![q(1, 2), q(1, 2), h.clone()]];
    edge.sort();
    assert_eq!(w.face.vertices, edge);

    // every vertex of the table has some witness
    for v in &ef.vertices_q(LIMIT).unwrap().vertices.clone() {
        ef.verify_vertex_conditions(v, LIMIT).unwrap();
    }

    // non-vertices are rejected
    let center = vec![
        q(1, 2),
        q(1, 2),
        qint(0),
        q(1, 4),
        q(1, 4),
        q(1, 4),
        q(1, 4),
    ];
    assert!(ef.verify_vertex_conditions(&center, LIMIT).is_err());
}

#[test]
fn every_vertex_of_random_natural_formulations_has_a_witness() {
    let mut rng = seeded_rng(2024);
    for case in 0..6 {
        let ef = random_bef(&mut rng, 9);
        for v in &ef.vertices_q(LIMIT).unwrap().vertices.clone() {
            ef.verify_vertex_conditions(v, LIMIT)
                .unwrap_or_else(|e| panic!("case {case}: no witness ({e}) for {v:?}"));
        }
        assert_eq!(
            ef.x_projection(LIMIT).unwrap(),
            ef.characterize_projection().unwrap(),
            "case {case}"
        );
    }
}

#[test]
fn pyramid_lpr_is_two_with_the_forced_cover() {
    let h = qint(3);
    let ef = pyramid_bef(&h).unwrap();
    let lpr = ef.lpr(LIMIT).unwrap();
    assert_eq!(lpr.value, 2);
    let names: Vec<String> = lpr.cover.iter().map(|&c| ef.column_name(c)).collect();
    assert_eq!(names, vec!["y1_1", "y2_1"]);
    assert_eq!(lpr.instance.rows.len(), 10);
    assert_eq!(lpr_exhaustive(&ef, LIMIT), 2);
}

#[test]
fn full_convexification_keeps_exactly_binary_vertices() {
    let h = qint(3);
    let ef = pyramid_bef(&h).unwrap();
    let full = ef.sequential_convexify(&ef.all_y_columns(), LIMIT).unwrap();
    let verts = ef.vertices_q(LIMIT).unwrap();
    let expected: Vec<QVector> = verts
        .vertices
        .iter()
        .filter(|v| v[ef.n..].iter().all(is_binary))
        .cloned()
        .collect();
    assert_eq!(full.vertices, expected);
    assert_eq!(full.vertices.len(), 6);

    // order independence over shuffles
    let mut rng = seeded_rng(5);
    let mut order = ef.all_y_columns();
    for _ in 0..5 {
        order.shuffle(&mut rng);
        assert_eq!(ef.sequential_convexify(&order, LIMIT).unwrap(), full);
    }
}

#[test]
fn convexifying_the_cover_projects_to_the_integral_hull() {
    let h = qint(3);
    let ef = pyramid_bef(&h).unwrap();
    let cover = ef.lpr(LIMIT).unwrap().cover;
    let after = ef.sequential_convexify(&cover, LIMIT).unwrap();
    for v in &after.vertices {
        assert!(is_integer(&v[0]) && is_integer(&v[1]));
    }
    let projected = after.project(&[0, 1, 2]);
    let mut expect = vec![
        qvec(&[0, 0, 0]),
        qvec(&[1, 0, 0]),
        qvec(&[2, 0, 0]),
        qvec(&[0, 1, 0]),
        qvec(&[1, 1, 0]),
        qvec(&[0, 2, 0]),
    ];
    expect.sort();
    assert_eq!(projected, expect);
}

#[test]
fn persistency_holds_on_the_pyramid_and_transitively() {
    let h = qint(3);
    let ef = pyramid_bef(&h).unwrap();
    for y in ef.all_y_columns() {
        ef.check_persistency(y, LIMIT).unwrap();
    }
    // after two convexifications the interval set keeps shrinking
    let before = ef.hit_intervals(ef.vertices_q(LIMIT).unwrap());
    let after2 = ef.hit_intervals(&ef.sequential_convexify(&[3, 5], LIMIT).unwrap());
    assert!(after2.is_subset(&before));
}

#[test]
fn lpr_matches_exhaustive_oracle_on_random_instances() {
    let mut rng = seeded_rng(777);
    for case in 0..8 {
        let ef = random_bef(&mut rng, 8);
        let lpr = ef.lpr(LIMIT).unwrap();
        assert_eq!(lpr.value, lpr_exhaustive(&ef, LIMIT), "case {case}");
    }
}

#[test]
fn pyramid_property_ranks() {
    let h = qint(3);
    let ef = pyramid_bef(&h).unwrap();
    // alpha = 0 on x1: covered by y1_1 alone
    let r = property_rank(&ef, 0, &[0], LIMIT).unwrap();
    assert_eq!(r.value, 1);
    assert_eq!(r.cover, vec![0]);
    assert!(r.dropped.is_empty());
    assert_eq!(r.agrees_with_skeleton, Some(true));
    assert_eq!(rank_skeleton(&ef.bins[0], &[0]).unwrap(), 1);

    // alpha = 1 has no violating vertex (no x1 strictly in (1,2)), so it
    // contributes nothing and the skeleton comparison is skipped
    let r = property_rank(&ef, 0, &[0, 1], LIMIT).unwrap();
    assert_eq!(r.value, 1);
    assert_eq!(r.dropped, vec![1]);
    assert_eq!(r.agrees_with_skeleton, None);

    // an instance satisfying the property outright has rank 0
    let point = HPolytope::new(1, vec![], vec![(qvec(&[1]), qint(1))]).unwrap();
    let ef =
        ExtendedFormulation::build(point, vec![0], vec![Binarization::unary(2).unwrap()]).unwrap();
    let r = property_rank(&ef, 0, &[0], LIMIT).unwrap();
    assert_eq!(r.value, 0);
    assert_eq!(r.dropped, vec![0]);
}

#[test]
fn property_rank_matches_skeleton_rank_when_hypothesis_holds() {
    let mut rng = seeded_rng(31);
    let mut checked = 0;
    for _ in 0..10 {
        let ef = random_bef(&mut rng, 8);
        for i in 0..ef.p() {
            if ef.bins[i].k == 0 {
                continue;
            }
            for alpha in 0..ef.bins[i].k {
                let r = property_rank(&ef, i, &[alpha], LIMIT).unwrap();
                if r.dropped.is_empty() {
                    assert_eq!(r.agrees_with_skeleton, Some(true));
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 0, "no case exercised the equality hypothesis");
}

#[test]
fn projection_contains_p_vertices_and_integral_points() {
    let mut rng = seeded_rng(88);
    for _ in 0..5 {
        let ef = random_bef(&mut rng, 8);
        let proj = ef.x_projection(LIMIT).unwrap();
        for v in &ef.p_poly.vertices().vertices {
            assert!(proj.contains(v), "projection must contain V(P)");
        }
        if ef.p() == ef.n {
            // fully binarized: every integral point of P appears as well
            let ranges: Vec<Vec<i64>> = (0..ef.n)
                .map(|i| (0..=ef.bins[i].k as i64).collect())
                .collect();
            let mut grid = vec![Vec::new()];
            for range in &ranges {
                grid = grid
                    .into_iter()
                    .flat_map(|prefix: Vec<i64>| {
                        range.iter().map(move |&v| {
                            let mut next = prefix.clone();
                            next.push(v);
                            next
                        })
                    })
                    .collect();
            }
            for point in grid {
                let p = qvec(&point);
                if ef.p_poly.contains(&p) {
                    assert!(proj.contains(&p), "integral point {point:?} missing");
                }
            }
        }
    }
}
