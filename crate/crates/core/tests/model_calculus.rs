mod common;

use cmh_core::graph::{self, DiGraph};
use cmh_core::model::{self, Coordinate, Generator, Homogeneity, MapModel, DEFAULT_COMPOSE_CAP};
use cmh_core::scalar::{Rational, Scalar};
use cmh_core::{critical, vector, Error};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exa1_rows() -> Vec<Vec<Vec<Rational>>> {
    let r = |xs: [(i64, i64); 3]| xs.iter().map(|&(a, b)| q(a, b)).collect::<Vec<_>>();
    vec![
        vec![r([(1, 1), (0, 1), (0, 1)]), r([(1, 2), (1, 2), (0, 1)]), r([(1, 2), (0, 1), (1, 2)])],
        vec![r([(0, 1), (1, 1), (0, 1)]), r([(2, 3), (1, 3), (0, 1)])],
        vec![r([(0, 1), (0, 1), (1, 1)])],
    ]
}

#[test]
fn fixtures_validate() {
    assert_eq!(f1().homogeneity(), Homogeneity::Homogeneous);
    assert_eq!(f2().homogeneity(), Homogeneity::Homogeneous);
    let bad = MapModel::max_affine(vec![vec![gen(&[(1, 2), (1, 2), (1, 2)], z(0))]; 3]);
    match bad {
        Err(Error::RowSum { coordinate, generator, sum }) => {
            assert_eq!((coordinate, generator, sum.as_str()), (1, 1, "3/2"));
        }
        other => panic!("expected a row-sum violation, got {other:?}"),
    }
    let empty = MapModel::<f64>::new(vec![Coordinate::LogSumExp(vec![0.0, 0.0, 0.0]); 3]);
    assert_eq!(empty, Err(Error::EmptySupport { coordinate: 1 }));
}

#[test]
fn eval_examples() {
    assert_eq!(f1().eval(&qv(&[0, 0, 0])), qv(&[0, 0, 0]));
    let v = f2_eigenvector();
    let fv = f2().eval(&v);
    let l = std::f64::consts::LN_2;
    for (a, b) in fv.iter().zip(&v) {
        assert!((a - (b + l)).abs() < 1e-12);
    }
    let m = f4();
    let x = qv(&[3, -1, 2]);
    let shifted: Vec<Rational> = x.iter().map(|v| v + z(5)).collect();
    assert_eq!(m.eval(&shifted), vector::add_scalar(&m.eval(&x), &z(5)));
}

#[test]
fn iterate_examples() {
    assert_eq!(f4().eval(&qv(&[1, 0, 0])), qv(&[0, 1, 0]));
    assert_eq!(f4().iterate(&qv(&[1, 0, 0]), 2), qv(&[1, 0, 0]));
    assert_eq!(f1().iterate(&qv(&[0, 0, 0]), 17), qv(&[0, 0, 0]));
    assert_eq!(f1().iterate(&qv(&[4, 5, 6]), 0), qv(&[4, 5, 6]));
    let x = f2().iterate(&[0.0; 3], 50);
    let v = f2_eigenvector();
    let shift: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - b - 50.0 * std::f64::consts::LN_2).collect();
    let spread = shift.iter().cloned().fold(f64::MIN, f64::max) - shift.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread < 1e-6, "spread {spread}");
}

#[test]
fn subdifferential_examples() {
    let zero = z(0);
    assert_eq!(f1().subdiff_generators(&qv(&[0, 0, 0]), &zero).unwrap().rows, exa1_rows());
    let at_v = f1().subdiff_generators(&qv(&[0, 0, -2]), &zero).unwrap().rows;
    let rows = exa1_rows();
    assert_eq!(at_v[0], rows[0][..2].to_vec());
    assert_eq!(at_v[1], rows[1]);
    assert_eq!(at_v[2], vec![qv(&[0, 0, 1]), qv(&[1, 0, 0])]);

    let jac = f2().subdiff_generators(&f2_eigenvector(), &1e-9).unwrap();
    let expected = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [1.0, 0.0, 0.0]];
    for (row, e) in jac.rows.iter().zip(expected) {
        assert_eq!(row.len(), 1);
        for (a, b) in row[0].iter().zip(e) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn derivative_examples() {
    let zero = z(0);
    let d = f1().directional_derivative(&qv(&[0, 0, 0]), &zero).unwrap();
    let expected = MapModel::max_affine(
        exa1_rows()
            .into_iter()
            .map(|row| row.into_iter().map(|p| Generator::new(p, z(0))).collect())
            .collect(),
    )
    .unwrap();
    assert_eq!(d, expected);

    let p = vec![vec![q(1, 2), q(1, 2)], vec![q(1, 3), q(2, 3)]];
    let lin = MapModel::linear(&p).unwrap();
    for x in [qv(&[0, 0]), qv(&[3, -7])] {
        assert_eq!(lin.directional_derivative(&x, &zero).unwrap(), lin);
    }

    let perm = MapModel::linear(&[qv(&[0, 1, 0]), qv(&[1, 0, 0]), qv(&[0, 0, 1])]).unwrap();
    assert_eq!(f4().directional_derivative(&qv(&[0, 0, 0]), &zero).unwrap(), perm);
}

#[test]
fn recession_examples() {
    let restricted = ex_f4().restrict(&[0, 1]).unwrap();
    assert_eq!(restricted.homogeneity(), Homogeneity::Subhomogeneous);
    for x in [qv(&[3, -2]), qv(&[-1, 4]), qv(&[0, 0])] {
        let expect = vec![x[1].clone(), Rational::max_of(x[1].clone(), z(0))];
        assert_eq!(restricted.eval(&x), expect);
    }
    let rec = restricted.additive_recession().into_model().unwrap();
    assert_eq!(rec.eval(&qv(&[5, -3])), qv(&[-3, -3]));
    assert_eq!(f1().additive_recession().into_model().unwrap(), f1());

    let mult = f1().multiplicative_recession();
    for (row, orig) in mult.coordinates().iter().zip(f1().coordinates()) {
        let (Coordinate::MaxAffine(a), Coordinate::MaxAffine(b)) = (row, orig) else {
            panic!("max-affine expected")
        };
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(b).all(|(g, h)| g.p == h.p && g.r == z(0)));
    }
    let bihomogeneous = f3();
    assert_eq!(bihomogeneous.multiplicative_recession(), bihomogeneous);
}

#[test]
fn restriction_examples() {
    let m = f1().restrict(&[2]).unwrap();
    assert_eq!(
        m.coordinates()[0],
        Coordinate::MaxAffine(vec![gen(&[(1, 1)], z(0)), gen(&[(0, 1)], z(-2))])
    );
    for y in [-5, -2, 0, 3] {
        assert_eq!(m.eval(&qv(&[y])), vec![Rational::max_of(z(y), z(-2))]);
    }
    assert_eq!(f1().restrict(&[0, 1, 2]).unwrap(), f1());
    assert!(matches!(f1().restrict(&[]), Err(Error::InvalidNodeSet(_))));
    let lse = MapModel::<f64>::new(vec![
        Coordinate::LogSumExp(vec![1.0, 0.0]),
        Coordinate::LogSumExp(vec![1.0, 0.0]),
    ])
    .unwrap();
    assert_eq!(lse.restrict(&[1]), Err(Error::DisjointSupport { coordinate: 2 }));
}

#[test]
fn lift_examples() {
    let lift = f1().lift_subhomogeneous();
    assert_eq!(lift.dim(), 4);
    assert_eq!(lift.restrict(&[0, 1, 2]).unwrap().eval(&qv(&[1, 2, 3])), f1().eval(&qv(&[1, 2, 3])));
    let sub = ex_f4().restrict(&[0, 1]).unwrap();
    let lifted = sub.lift_subhomogeneous();
    assert_eq!(lifted.homogeneity(), Homogeneity::Homogeneous);
    // Fixed points of (x2, x2 ∨ 0) are {(t, t) : t ≥ 0}.
    for t in [0, 2, 7] {
        let fixed = qv(&[t, t]);
        assert_eq!(sub.eval(&fixed), fixed);
        assert_eq!(lifted.eval(&qv(&[t, t, 0])), qv(&[t, t, 0]));
    }
}

#[test]
fn composition_examples() {
    let id = MapModel::identity(3);
    assert_eq!(model::compose(&id, &f1(), DEFAULT_COMPOSE_CAP).unwrap(), f1());
    let sq = model::power(&f4(), 2, DEFAULT_COMPOSE_CAP).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let x = random_vec(&mut rng, 3, 5);
        assert_eq!(sq.eval(&x), f4().iterate(&x, 2));
    }
    let sq1 = model::power(&f1(), 2, DEFAULT_COMPOSE_CAP).unwrap();
    let zero = qv(&[0, 0, 0]);
    let g1 = critical::critical_data(&f1(), &zero, &z(0), &z(0)).unwrap().graph;
    let g2 = critical::critical_data(&sq1, &zero, &z(0), &z(0)).unwrap().graph;
    assert_eq!(g2, graph::graph_power(&g1, 2));
    assert!(matches!(model::compose(&f2(), &f2(), DEFAULT_COMPOSE_CAP), Err(Error::LogSumExpUnsupported { .. })));
}

#[test]
fn graph_of_map_examples() {
    let g = f2().graph();
    assert_eq!(graph::strong_components(&g), vec![vec![0, 1, 2]]);
    assert_eq!(
        MapModel::<Rational>::identity(2).graph(),
        DiGraph::from_arcs(2, [(0, 0), (1, 1)])
    );
    assert_eq!(
        f1().graph(),
        DiGraph::from_arcs(3, [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0), (2, 2)])
    );
}

fn model_and_points() -> impl Strategy<Value = (u64, u8)> {
    (any::<u64>(), 0u8..4)
}

/// One of the fixtures (as f64 where needed) or a random model.
fn pick(seed: u64, which: u8) -> MapModel<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match which {
        0 => f1().to_float(),
        1 => f2(),
        2 => f4().to_float(),
        _ => random_model(&mut rng, 5).to_float(),
    }
}

fn sub_model(seed: u64) -> MapModel<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_model(&mut rng, 4);
    let rows = m
        .generator_rows()
        .unwrap()
        .iter()
        .map(|row| {
            row.iter()
                .map(|g| {
                    let factor = if rng.gen_bool(0.4) { q(3, 4) } else { z(1) };
                    Generator::new(vector::scale(&g.p, &factor), g.r.clone())
                })
                .collect()
        })
        .collect();
    MapModel::max_affine(rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monotone((seed, which) in model_and_points(), bump in proptest::collection::vec(0.0f64..3.0, 5)) {
        let m = pick(seed, which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let x = random_fvec(&mut rng, m.dim(), 5.0);
        let y: Vec<f64> = x.iter().zip(&bump).map(|(a, b)| a + b).collect();
        prop_assert!(vector::leq(&m.eval(&x), &m.eval(&y), &1e-12));
    }

    #[test]
    fn homogeneous_exactly(seed in any::<u64>(), shift in -20i64..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, 5);
        let x = random_vec(&mut rng, m.dim(), 5);
        let c = q(shift, 3);
        prop_assert_eq!(m.eval(&vector::add_scalar(&x, &c)), vector::add_scalar(&m.eval(&x), &c));
        let f = f2();
        let xf = random_fvec(&mut rng, 3, 5.0);
        let lhs = f.eval(&vector::add_scalar(&xf, &1.5));
        let rhs = vector::add_scalar(&f.eval(&xf), &1.5);
        prop_assert!(vector::sup_dist(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn subhomogeneous_shift(seed in any::<u64>(), shift in 0i64..20) {
        let m = sub_model(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let x = random_vec(&mut rng, m.dim(), 5);
        let c = q(shift, 2);
        prop_assert!(vector::leq(&m.eval(&vector::add_scalar(&x, &c)), &vector::add_scalar(&m.eval(&x), &c), &z(0)));
    }

    #[test]
    fn nonexpansive((seed, which) in model_and_points()) {
        let m = pick(seed, which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let x = random_fvec(&mut rng, m.dim(), 5.0);
        let y = random_fvec(&mut rng, m.dim(), 5.0);
        prop_assert!(vector::sup_dist(&m.eval(&x), &m.eval(&y)) <= vector::sup_dist(&x, &y) + 1e-12);
    }

    #[test]
    fn convex_coordinates((seed, which) in model_and_points(), alpha in 0.01f64..0.99) {
        let m = pick(seed, which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        let x = random_fvec(&mut rng, m.dim(), 5.0);
        let y = random_fvec(&mut rng, m.dim(), 5.0);
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
        let (fx, fy, fm) = (m.eval(&x), m.eval(&y), m.eval(&mid));
        for i in 0..m.dim() {
            prop_assert!(fm[i] <= alpha * fx[i] + (1.0 - alpha) * fy[i] + 1e-12);
        }
    }

    #[test]
    fn subgradient_inequality(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, 5);
        let v = random_vec(&mut rng, m.dim(), 3);
        let rect = m.subdiff_generators(&v, &z(0)).unwrap();
        let fv = m.eval(&v);
        for _ in 0..10 {
            let x = random_vec(&mut rng, m.dim(), 5);
            let fx = m.eval(&x);
            let dx = vector::sub(&x, &v);
            for (i, row) in rect.rows.iter().enumerate() {
                for p in row {
                    prop_assert!(fx[i].clone() - fv[i].clone() >= vector::dot(p, &dx));
                }
            }
        }
    }

    #[test]
    fn chain_rule(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m1 = random_model(&mut rng, 4);
        let n = m1.dim();
        let mut m2 = random_model(&mut rng, 4);
        while m2.dim() != n {
            m2 = random_model(&mut rng, 4);
        }
        let comp = model::compose(&m1, &m2, DEFAULT_COMPOSE_CAP).unwrap();
        let v = random_vec(&mut rng, n, 2);
        for _ in 0..5 {
            let x = random_vec(&mut rng, n, 5);
            prop_assert_eq!(comp.eval(&x), m1.eval(&m2.eval(&x)));
        }
        let outer = m1.subdiff_generators(&m2.eval(&v), &z(0)).unwrap();
        let inner = m2.subdiff_generators(&v, &z(0)).unwrap();
        let whole = comp.subdiff_generators(&v, &z(0)).unwrap();
        for _ in 0..5 {
            let y = random_vec(&mut rng, n, 5);
            let product = outer.support(&inner.support(&y));
            prop_assert_eq!(whole.support(&y), product);
        }
    }

    #[test]
    fn additive_recession_is_a_decreasing_limit(seed in any::<u64>()) {
        let m = sub_model(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
        let y = random_vec(&mut rng, m.dim(), 3);
        let rec = m.additive_recession().eval(&y);
        let at = |rho: i64| vector::add_scalar(&m.eval(&vector::add_scalar(&y, &z(rho))), &z(-rho));
        let (a, b, c) = (at(10), at(100), at(1000));
        prop_assert!(vector::leq(&b, &a, &z(0)) && vector::leq(&c, &b, &z(0)));
        for i in 0..m.dim() {
            match &rec[i] {
                Some(limit) => prop_assert_eq!(&c[i], limit),
                None => prop_assert!(c[i] < a[i].clone() - z(50)),
            }
        }
    }
}
