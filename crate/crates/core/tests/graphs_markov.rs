mod common;

use std::collections::BTreeSet;

use cmh_core::graph::{self, DiGraph};
use cmh_core::markov;
use cmh_core::scalar::Rational;
use cmh_core::Error;
use common::*;
use num_integer::Integer;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> DiGraph {
    let mut g = DiGraph::full(n);
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                g.add_arc(i, j);
            }
        }
    }
    g
}

fn random_stochastic(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<Vec<Rational>> {
    let n = rng.gen_range(1..=max_n);
    (0..n).map(|_| random_row(rng, n)).collect()
}

fn bool_matrix(g: &DiGraph) -> Vec<Vec<bool>> {
    let n = g.universe();
    let mut a = vec![vec![false; n]; n];
    for &(i, j) in g.arcs() {
        a[i][j] = true;
    }
    a
}

/// Walk-length oracle: gcd of all `k ≤ |class|` for which some node of the
/// class returns to itself in exactly `k` steps inside the class.
fn walk_period(g: &DiGraph, class: &[usize]) -> usize {
    let inside = g.induced(&class.iter().copied().collect());
    let a = bool_matrix(&inside);
    let n = a.len();
    let mut reach = a.clone();
    let mut period = 0usize;
    for k in 1..=class.len() {
        if class.iter().any(|&i| reach[i][i]) {
            period = period.gcd(&k);
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for l in 0..n {
                if reach[i][l] {
                    for j in 0..n {
                        next[i][j] |= a[l][j];
                    }
                }
            }
        }
        reach = next;
    }
    period
}

/// Arc `i → j` iff some path of length `k` exists, by dynamic programming.
fn walks_of_length(g: &DiGraph, k: usize) -> DiGraph {
    let mut out = DiGraph::new(g.universe());
    for &i in g.nodes() {
        out.add_node(i);
        let mut frontier: BTreeSet<usize> = [i].into();
        for _ in 0..k {
            frontier = frontier.iter().flat_map(|&u| g.successors(u)).collect();
        }
        for j in frontier {
            out.add_arc(i, j);
        }
    }
    out
}

#[test]
fn component_examples() {
    let g = DiGraph::from_arcs(5, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 4), (4, 2)]);
    assert_eq!(graph::strong_components(&g), vec![vec![0, 1], vec![2, 3, 4]]);
    assert_eq!(graph::final_classes(&g), vec![vec![2, 3, 4]]);
    assert_eq!(graph::component_period(&g, &[0, 1]).unwrap(), 2);
    assert_eq!(graph::component_period(&g, &[2, 3, 4]).unwrap(), 3);
    assert_eq!(graph::cyclicity(&g).unwrap(), 6);

    let mixed = DiGraph::from_arcs(3, [(0, 1), (1, 2), (2, 0), (1, 0)]);
    assert_eq!(graph::cyclicity(&mixed).unwrap(), 1);
    assert_eq!(graph::cyclicity(&DiGraph::new(4)).unwrap(), 1);

    let lonely = DiGraph::from_arcs(2, [(0, 1)]);
    assert_eq!(
        graph::component_period(&lonely, &[1]),
        Err(Error::TrivialComponent { node: 2 })
    );
}

#[test]
fn powers_of_a_cycle() {
    let cycle = DiGraph::from_arcs(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
    let sq = graph::graph_power(&cycle, 2);
    assert_eq!(sq, DiGraph::from_arcs(4, [(0, 2), (1, 3), (2, 0), (3, 1)]));
    assert_eq!(graph::strong_components(&sq), vec![vec![0, 2], vec![1, 3]]);
    assert_eq!(graph::graph_power(&cycle, 4), DiGraph::from_arcs(4, (0..4).map(|i| (i, i))));
}

#[test]
fn markov_examples() {
    let p = vec![
        vec![q(1, 2), q(1, 2), z(0)],
        vec![q(1, 1), z(0), z(0)],
        vec![q(1, 4), z(0), q(3, 4)],
    ];
    markov::check_stochastic(&p).unwrap();
    assert_eq!(markov::final_classes(&p), vec![vec![0, 1]]);
    assert_eq!(markov::final_graph(&p), DiGraph::from_arcs(3, [(0, 0), (0, 1), (1, 0)]));
    assert_eq!(markov::invariant_measure(&p, &[0, 1]).unwrap(), vec![q(2, 3), q(1, 3)]);
    assert_eq!(
        markov::invariant_measure(&p, &[2]),
        Err(Error::NotFinalClass)
    );
    let r = vec![z(3), z(0), z(5)];
    assert_eq!(markov::class_value(&p, &r, &[0, 1]).unwrap(), z(2));
    assert_eq!(markov::mean_reward(&p, &r).unwrap(), vec![z(2), z(2), z(2)]);

    let bad = vec![vec![q(1, 2), q(2, 3)], vec![z(0), z(1)]];
    assert!(matches!(markov::check_substochastic(&bad), Err(Error::NotStochastic(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn period_matches_walk_lengths(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.3);
        for class in graph::strong_components(&g) {
            match graph::component_period(&g, &class) {
                Ok(d) => prop_assert_eq!(d, walk_period(&g, &class)),
                Err(_) => prop_assert!(!g.is_nontrivial(&class)),
            }
        }
    }

    #[test]
    fn power_is_walk_reachability(seed in any::<u64>(), n in 1usize..7, k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.3);
        prop_assert_eq!(graph::graph_power(&g, k), walks_of_length(&g, k));
    }

    #[test]
    fn power_splits_a_class_by_its_period(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, n, 0.35);
        for class in graph::strong_components(&g) {
            let Ok(d) = graph::component_period(&g, &class) else { continue };
            let inside = g.induced(&class.iter().copied().collect());
            let pd = graph::graph_power(&inside, d);
            let parts = graph::strong_components(&pd);
            prop_assert_eq!(parts.len(), d);
            for part in parts {
                prop_assert_eq!(graph::component_period(&pd, &part).unwrap(), 1);
            }
        }
    }

    #[test]
    fn final_graph_commutes_with_powers(seed in any::<u64>(), k in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_stochastic(&mut rng, 7);
        let lhs = markov::final_graph(&markov::mat_pow(&p, k));
        let rhs = graph::graph_power(&markov::final_graph(&p), k);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn invariant_measures_live_on_their_class(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_stochastic(&mut rng, 7);
        for class in markov::final_classes(&p) {
            let m = markov::invariant_measure(&p, &class).unwrap();
            prop_assert!(m.iter().all(|x| *x > z(0)));
            prop_assert_eq!(m.iter().fold(z(0), |a, x| a + x), z(1));
            for (b, &j) in class.iter().enumerate() {
                let mp = class.iter().enumerate().fold(z(0), |a, (c, &i)| a + &m[c] * &p[i][j]);
                prop_assert_eq!(&mp, &m[b]);
            }
        }
    }

    #[test]
    fn harmonic_vectors_peak_on_final_classes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_stochastic(&mut rng, 7);
        let r = random_vec(&mut rng, p.len(), 4);
        let h = markov::mean_reward(&p, &r).unwrap();
        prop_assert_eq!(markov::mat_vec(&p, &h), h.clone());
        let top = h.iter().cloned().fold(z(-1000), |a, b| if b > a { b } else { a });
        let finals: BTreeSet<usize> = markov::final_classes(&p).into_iter().flatten().collect();
        prop_assert!(finals.iter().any(|&i| h[i] == top));
    }

    #[test]
    fn orbit_period_divides_cyclicity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_stochastic(&mut rng, 7);
        let c = graph::cyclicity(&markov::final_graph(&p)).unwrap();
        let pf: Vec<Vec<f64>> = p.iter().map(|row| to_f(row)).collect();
        let mut x = random_fvec(&mut rng, p.len(), 5.0);
        for _ in 0..3000 {
            x = markov::mat_vec(&pf, &x);
        }
        let mut y = x.clone();
        for _ in 0..c {
            y = markov::mat_vec(&pf, &y);
        }
        let gap = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-9, "gap {} for cyclicity {}", gap, c);
    }
}
