//! (Sub)stochastic matrices: graphs, final classes, invariant measures and
//! Cesàro mean rewards.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{self, DiGraph};
use crate::linalg;
use crate::scalar::Scalar;
use crate::vector;

/// Square, nonnegative, row sums at most one.
pub fn check_substochastic<S: Scalar>(p: &[Vec<S>]) -> Result<()> {
    let n = p.len();
    for (i, row) in p.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotStochastic(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
        }
        if row.iter().any(|x| *x < S::zero() || !x.is_finite()) {
            return Err(Error::NotStochastic(format!("row {} has a negative or non-finite entry", i + 1)));
        }
        if vector::sum(row) > S::one() + S::structural_eps() {
            return Err(Error::NotStochastic(format!("row {} sums above 1", i + 1)));
        }
    }
    Ok(())
}

/// Substochastic with every row summing to one.
pub fn check_stochastic<S: Scalar>(p: &[Vec<S>]) -> Result<()> {
    check_substochastic(p)?;
    match p.iter().position(|row| !vector::sum(row).near(&S::one())) {
        Some(i) => Err(Error::NotStochastic(format!("row {} does not sum to 1", i + 1))),
        None => Ok(()),
    }
}

/// Arc `i → j` iff `P_ij > 0`.
pub fn matrix_graph<S: Scalar>(p: &[Vec<S>]) -> DiGraph {
    let mut g = DiGraph::full(p.len());
    for (i, row) in p.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if *x > S::zero() {
                g.add_arc(i, j);
            }
        }
    }
    g
}

fn class_is_stochastic<S: Scalar>(p: &[Vec<S>], class: &[usize]) -> bool {
    class
        .iter()
        .all(|&i| vector::sum(&vector::restrict(&p[i], class)).near(&S::one()))
}

/// Final classes of `G(P)` whose principal submatrix is stochastic, sorted
/// by smallest node.
pub fn final_classes<S: Scalar>(p: &[Vec<S>]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = graph::final_classes(&matrix_graph(p))
        .into_iter()
        .filter(|c| class_is_stochastic(p, c))
        .collect();
    classes.sort();
    classes
}

/// Union of `G(P_FF)` over the final classes `F`.
pub fn final_graph<S: Scalar>(p: &[Vec<S>]) -> DiGraph {
    let g = matrix_graph(p);
    let mut out = DiGraph::new(p.len());
    for class in final_classes(p) {
        let keep: BTreeSet<usize> = class.iter().copied().collect();
        out = out.union(&g.induced(&keep));
    }
    out
}

/// Stationary distribution of `P_FF`, listed in the order of `class`.
pub fn invariant_measure<S: Scalar>(p: &[Vec<S>], class: &[usize]) -> Result<Vec<S>> {
    check_substochastic(p)?;
    let mut sorted = class.to_vec();
    sorted.sort_unstable();
    if !final_classes(p).contains(&sorted) {
        return Err(Error::NotFinalClass);
    }
    let k = class.len();
    // Rows: (P_FF − I)ᵀ m = 0 for all but the last column, then Σ m = 1.
    let mut a: Vec<Vec<S>> = (0..k.saturating_sub(1))
        .map(|col| {
            (0..k)
                .map(|row| {
                    let entry = p[class[row]][class[col]].clone();
                    if row == col {
                        entry - S::one()
                    } else {
                        entry
                    }
                })
                .collect()
        })
        .collect();
    a.push((0..k).map(|_| S::one()).collect());
    let mut b = vector::zeros::<S>(k);
    b[k - 1] = S::one();
    linalg::solve(&a, &b)
}

/// Per-class mean reward `m_F · r_F`.
pub fn class_value<S: Scalar>(p: &[Vec<S>], r: &[S], class: &[usize]) -> Result<S> {
    let m = invariant_measure(p, class)?;
    Ok(vector::dot(&m, &vector::restrict(r, class)))
}

/// Cesàro limit of `(1/k) Σ P^t r`: constant on each final class, harmonic
/// extension on transient nodes.
pub fn mean_reward<S: Scalar>(p: &[Vec<S>], r: &[S]) -> Result<Vec<S>> {
    check_stochastic(p)?;
    let n = p.len();
    if r.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: r.len() });
    }
    let mut mu: Vec<Option<S>> = (0..n).map(|_| None).collect();
    for class in final_classes(p) {
        let value = class_value(p, r, &class)?;
        for &i in &class {
            mu[i] = Some(value.clone());
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&i| mu[i].is_none()).collect();
    if !transient.is_empty() {
        let a: Vec<Vec<S>> = transient
            .iter()
            .map(|&i| {
                transient
                    .iter()
                    .map(|&j| {
                        let e = p[i][j].clone();
                        if i == j {
                            S::one() - e
                        } else {
                            -e
                        }
                    })
                    .collect()
            })
            .collect();
        let b: Vec<S> = transient
            .iter()
            .map(|&i| {
                (0..n)
                    .filter_map(|j| mu[j].as_ref().map(|v| p[i][j].clone() * v.clone()))
                    .fold(S::zero(), |acc, x| acc + x)
            })
            .collect();
        let h = linalg::solve(&a, &b)?;
        for (&i, hi) in transient.iter().zip(h) {
            mu[i] = Some(hi);
        }
    }
    Ok(mu.into_iter().map(|x| x.expect("every node assigned")).collect())
}

pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Vec<Vec<S>> {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .fold(S::zero(), |acc, (x, brow)| acc + x.clone() * brow[j].clone())
                })
                .collect()
        })
        .collect()
}

/// `P^k`, `k ≥ 1`.
pub fn mat_pow<S: Scalar>(p: &[Vec<S>], k: usize) -> Vec<Vec<S>> {
    assert!(k >= 1, "mat_pow needs k >= 1");
    (1..k).fold(p.to_vec(), |acc, _| mat_mul(&acc, p))
}

pub fn mat_vec<S: Scalar>(p: &[Vec<S>], x: &[S]) -> Vec<S> {
    p.iter().map(|row| vector::dot(row, x)).collect()
}
