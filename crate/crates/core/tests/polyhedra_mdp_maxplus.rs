mod common;

use std::collections::BTreeSet;

use cmh_core::critical;
use cmh_core::maxplus::{self, Entry, MaxPlusMatrix};
use cmh_core::mdp::{self, Action, MdpModel, Policy, DEFAULT_POLICY_CAP};
use cmh_core::model::{self, MapModel, DEFAULT_COMPOSE_CAP};
use cmh_core::polyhedra::{self, DEFAULT_ENUMERATION_CAP};
use cmh_core::scalar::{Rational, Scalar};
use cmh_core::spectral;
use cmh_core::Error;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: usize = DEFAULT_ENUMERATION_CAP;

fn dims(m: &MapModel<Rational>) -> (usize, usize, i64) {
    let zero = vec![z(0); m.dim()];
    let cd = critical::critical_data(m, &zero, &z(0), &z(0)).unwrap();
    let pieces = polyhedra::eigenspace_enumerate(m, &z(0), CAP).unwrap();
    (
        cd.class_count(),
        polyhedra::eigenspace_dimension(m, &z(0), &cd, CAP).unwrap(),
        polyhedra::eigenspace_affine_dimension(&pieces),
    )
}

fn is_eigenvector(m: &MapModel<Rational>, x: &[Rational]) -> bool {
    polyhedra::eigenspace_membership(m, &z(0), x, &z(0))
}

#[test]
fn f1_eigenspace() {
    let m = f1();
    let pieces = polyhedra::eigenspace_enumerate(&m, &z(0), CAP).unwrap();
    assert!(!pieces.is_empty());
    let inside = |x: &[Rational]| x[0] == x[1] && x[2] <= x[1] && x[0].clone() - z(2) <= x[2];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let mut x = random_vec(&mut rng, 3, 3);
        if rng.gen_bool(0.5) {
            x[1] = x[0].clone();
        }
        assert_eq!(is_eigenvector(&m, &x), inside(&x));
        let covered = pieces.iter().any(|p| p.polyhedron.contains(&x));
        assert_eq!(covered, inside(&x));
    }
    for p in &pieces {
        assert!(inside(&p.point));
    }
    assert_eq!(dims(&m), (2, 2, 2));
    // Every super-eigenvector is an eigenvector here.
    let sup = polyhedra::super_eigenspace(&m, &z(0)).unwrap();
    assert_eq!(polyhedra::affine_dimension(&sup), 2);
    let hull = polyhedra::affine_hull(&sup).unwrap();
    assert_eq!(hull.directions.len(), 2);
}

#[test]
fn fixture_dimensions() {
    assert_eq!(dims(&f3()), (2, 2, 2));
    assert_eq!(dims(&f4()), (2, 2, 2));
    assert_eq!(dims(&ex_f4()), (2, 2, 2));
    assert_eq!(dims(&moreau_k()), (1, 1, 1));
    let sq = model::power(&f4(), 2, DEFAULT_COMPOSE_CAP).unwrap();
    assert_eq!(dims(&sq), (3, 3, 3));
}

#[test]
fn f3_membership() {
    let m = f3();
    assert!(is_eigenvector(&m, &qv(&[2, 2, 1])));
    assert!(is_eigenvector(&m, &qv(&[3, -1, 3])));
    assert!(!is_eigenvector(&m, &qv(&[2, 1, 1])));
    let pieces = polyhedra::eigenspace_enumerate(&m, &z(0), CAP).unwrap();
    let selections: Vec<Vec<usize>> = pieces.iter().map(|p| p.selection.clone()).collect();
    assert_eq!(selections, vec![vec![0, 0, 0], vec![1, 0, 0]]);
}

#[test]
fn enumeration_cap() {
    assert!(matches!(
        polyhedra::eigenspace_enumerate(&f1(), &z(0), 5),
        Err(Error::CapExceeded { cap: 5, needed: 24 })
    ));
}

fn mdp_of(m: &MapModel<Rational>) -> MdpModel<Rational> {
    let rows = m.generator_rows().unwrap();
    let states = (1..=m.dim()).map(|i| format!("s{i}")).collect();
    let actions = rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(k, g)| Action {
                    name: format!("a{}", k + 1),
                    reward: g.r.clone(),
                    transition: g.p.clone(),
                })
                .collect()
        })
        .collect();
    MdpModel::new(states, actions).unwrap()
}

#[test]
fn mdp_examples() {
    for m in [f1(), f4()] {
        let mdp = mdp_of(&m);
        assert_eq!(mdp.to_map(), m);
        assert_eq!(mdp::brute_force_lambda(&mdp, DEFAULT_POLICY_CAP).unwrap(), z(0));
        let report = mdp::optimal_class_check(&mdp, &z(0), &qv(&[0, 0, 0]), &z(0)).unwrap();
        assert!(report.all_certified());
        assert!(report.counterexamples.is_empty());
        for c in &report.certificates {
            assert_eq!(c.value, z(0));
            assert!(c.is_final);
        }
    }

    let mdp = mdp_of(&f1());
    let a = mdp::policy_analysis(&mdp, &Policy::Deterministic(vec![0, 0, 1])).unwrap();
    assert_eq!(a.final_classes, vec![vec![0], vec![1]]);
    assert_eq!(a.mean_reward, qv(&[0, 0, 0]));
    let b = mdp::policy_analysis(&mdp, &Policy::Deterministic(vec![2, 2, 0])).unwrap();
    assert_eq!(b.final_classes, vec![vec![2]]);
    assert_eq!(b.mean_reward, qv(&[0, 0, 0]));
    let c = mdp::policy_analysis(&mdp, &Policy::Deterministic(vec![2, 0, 1])).unwrap();
    assert_eq!(c.final_classes, vec![vec![0, 2], vec![1]]);
    assert_eq!(c.class_values, vec![q(-5, 2), z(0)]);
    assert!(matches!(
        mdp::policy_analysis(&mdp, &Policy::Deterministic(vec![0, 0, 5])),
        Err(Error::InvalidPolicy(_))
    ));
}

fn fin(n: i64, d: i64) -> Entry<Rational> {
    Some(q(n, d))
}

#[test]
fn maxplus_examples() {
    let a = MaxPlusMatrix::new(vec![vec![fin(1, 1), fin(3, 1)], vec![fin(-1, 1), None]]).unwrap();
    assert_eq!(maxplus::maxplus_rho(&a), z(1));
    assert_eq!(maxplus::brute_force_rho(&a), z(1));
    let (l, v) = maxplus::maxplus_eigen(&a).unwrap();
    assert_eq!(l, z(1));
    assert_eq!(a.apply(&v), v.iter().map(|x| x + z(1)).collect::<Vec<_>>());
    let crit = maxplus::maxplus_critical(&a, &l, &v, &z(0)).unwrap();
    assert_eq!(crit.arcs().iter().copied().collect::<Vec<_>>(), vec![(0, 0), (0, 1), (1, 0)]);

    let star = maxplus::kleene_star(&[vec![fin(-1, 1), fin(2, 1)], vec![fin(-3, 1), None]]).unwrap();
    assert_eq!(star, vec![vec![fin(0, 1), fin(2, 1)], vec![fin(-3, 1), fin(0, 1)]]);
    assert!(maxplus::kleene_plus(&[vec![fin(1, 1)]]).is_err());

    let reducible = MaxPlusMatrix::new(vec![vec![fin(0, 1), None], vec![fin(0, 1), fin(1, 1)]]).unwrap();
    assert_eq!(maxplus::maxplus_eigen(&reducible), Err(Error::Reducible));
    assert!(MaxPlusMatrix::<Rational>::new(vec![vec![None, None], vec![fin(0, 1), None]]).is_err());
}

fn random_irreducible(rng: &mut ChaCha8Rng, max_n: usize) -> MaxPlusMatrix<Rational> {
    let n = rng.gen_range(1..=max_n);
    let mut entries: Vec<Vec<Entry<Rational>>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| rng.gen_bool(0.4).then(|| q(rng.gen_range(-12..=12), 4)))
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(&mut order[..], rng);
    for k in 0..n {
        let (i, j) = (order[k], order[(k + 1) % n]);
        if entries[i][j].is_none() {
            entries[i][j] = Some(q(rng.gen_range(-12..=12), 4));
        }
    }
    MaxPlusMatrix::new(entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn maxplus_cross_oracles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_irreducible(&mut rng, 6);
        let rho = maxplus::maxplus_rho(&a);
        if a.dim() <= 5 {
            prop_assert_eq!(&rho, &maxplus::brute_force_rho(&a));
        }
        let (l, v) = maxplus::maxplus_eigen(&a).unwrap();
        prop_assert_eq!(&l, &rho);
        let m = a.to_map();
        let cd = critical::critical_data(&m, &v, &l, &z(0)).unwrap();
        prop_assert_eq!(maxplus::maxplus_critical(&a, &l, &v, &z(0)).unwrap(), cd.graph);
        let r = spectral::find_eigenvector(&m, None, &z(0), 20_000);
        prop_assert_eq!(r.lambda, l);
    }

    #[test]
    fn kleene_star_is_the_best_path_closure(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_irreducible(&mut rng, 5);
        let rho = maxplus::maxplus_rho(&a);
        let n = a.dim();
        let shifted: Vec<Vec<Entry<Rational>>> = a
            .entries()
            .iter()
            .map(|row| row.iter().map(|x| x.as_ref().map(|v| v - &rho)).collect())
            .collect();
        let star = maxplus::kleene_star(&shifted).unwrap();
        // Bellman–Ford style relaxation over paths of length < n.
        for s in 0..n {
            let mut best: Vec<Option<Rational>> = vec![None; n];
            best[s] = Some(z(0));
            for _ in 0..n {
                let mut next = best.clone();
                for i in 0..n {
                    for j in 0..n {
                        if let (Some(b), Some(w)) = (&best[i], &shifted[i][j]) {
                            let cand = b + w;
                            if next[j].as_ref().is_none_or(|c| cand > *c) {
                                next[j] = Some(cand);
                            }
                        }
                    }
                }
                best = next;
            }
            for t in 0..n {
                prop_assert_eq!(&star[s][t], &best[t]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn dimension_equals_class_count(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, 4);
        let (classes, dim, _) = dims(&m);
        prop_assert_eq!(dim, classes);
    }

    #[test]
    fn enumeration_is_sound_and_complete(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, 4);
        let pieces = polyhedra::eigenspace_enumerate(&m, &z(0), CAP).unwrap();
        let found: BTreeSet<Vec<usize>> = pieces.iter().map(|p| p.selection.clone()).collect();
        for sel in polyhedra::all_selections(&m).unwrap() {
            let poly = polyhedra::selection_polyhedron(&m, &z(0), &sel).unwrap();
            prop_assert_eq!(polyhedra::lp_feasible(&poly).is_some(), found.contains(&sel));
        }
        for p in &pieces {
            prop_assert!(is_eigenvector(&m, &p.point));
            prop_assert!(p.polyhedron.contains(&p.point));
        }
        let r = spectral::find_eigenvector(&m, Some(&random_vec(&mut rng, m.dim(), 3)), &z(0), 20_000);
        prop_assert!(pieces.iter().any(|p| p.polyhedron.contains(&r.v)));
    }

    #[test]
    fn mdp_encodings_are_certified(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_model(&mut rng, 4);
        let mdp = mdp_of(&m);
        prop_assert_eq!(mdp::brute_force_lambda(&mdp, DEFAULT_POLICY_CAP).unwrap(), z(0));
        let report = mdp::optimal_class_check(&mdp, &z(0), &vec![z(0); m.dim()], &z(0)).unwrap();
        prop_assert!(report.all_certified());
        prop_assert!(report.counterexamples.is_empty());
    }
}

fn random_mdp(rng: &mut ChaCha8Rng) -> MdpModel<Rational> {
    let n = rng.gen_range(1..=5);
    let actions = (0..n)
        .map(|i| {
            let mut list: Vec<Action<Rational>> = (0..rng.gen_range(1..=3))
                .map(|k| Action {
                    name: format!("a{}", k + 1),
                    reward: q(rng.gen_range(-8..=8), 4),
                    transition: random_row(rng, n),
                })
                .collect();
            list.push(Action {
                name: "stay".into(),
                reward: z(0),
                transition: cmh_core::vector::unit(n, i),
            });
            list
        })
        .collect();
    MdpModel::new((1..=n).map(|i| format!("s{i}")).collect(), actions).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn mdp_value_matches_the_eigenvalue(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mdp = random_mdp(&mut rng);
        let best = mdp::brute_force_lambda(&mdp, DEFAULT_POLICY_CAP).unwrap();
        let r = spectral::find_eigenvector(&mdp.to_map().to_float(), None, &1e-10, 1_000_000);
        if r.status == spectral::EigenStatus::Converged {
            prop_assert!((r.lambda - cmh_core::scalar::rational_to_f64(&best)).abs() <= 1e-8);
        }
        let x = random_vec(&mut rng, mdp.len(), 3);
        let fx = mdp.to_map().eval(&x);
        for (i, list) in mdp.actions().iter().enumerate() {
            let top = list
                .iter()
                .map(|a| cmh_core::vector::dot(&a.transition, &x) + a.reward.clone())
                .fold(z(-1000), Rational::max_of);
            prop_assert_eq!(&fx[i], &top);
        }
    }

    #[test]
    fn karp_on_a_small_alphabet(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=5);
        let alphabet: [Entry<Rational>; 4] = [None, Some(z(0)), Some(z(1)), Some(z(2))];
        let entries: Vec<Vec<Entry<Rational>>> = (0..n)
            .map(|_| {
                let mut row: Vec<Entry<Rational>> =
                    (0..n).map(|_| alphabet[rng.gen_range(0..4)].clone()).collect();
                if row.iter().all(Option::is_none) {
                    row[rng.gen_range(0..n)] = Some(z(0));
                }
                row
            })
            .collect();
        let a = MaxPlusMatrix::new(entries).unwrap();
        prop_assert_eq!(maxplus::maxplus_rho(&a), maxplus::brute_force_rho(&a));
    }
}
