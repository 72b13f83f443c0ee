//! Max-plus matrices: maximal circuit mean (Karp), Kleene star, eigenvector
//! of an irreducible matrix, saturation and critical graphs.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{self, DiGraph};
use crate::model::{Generator, MapModel};
use crate::scalar::Scalar;
use crate::vector;

/// `None` stands for −∞.
pub type Entry<S> = Option<S>;

fn mp_add<S: Scalar>(a: &Entry<S>, b: &Entry<S>) -> Entry<S> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.clone() + y.clone()),
        _ => None,
    }
}

fn mp_max<S: Scalar>(a: Entry<S>, b: Entry<S>) -> Entry<S> {
    match (a, b) {
        (Some(x), Some(y)) => Some(S::max_of(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Square matrix over `R ∪ {−∞}` with a finite entry in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxPlusMatrix<S> {
    entries: Vec<Vec<Entry<S>>>,
}

impl<S: Scalar> MaxPlusMatrix<S> {
    pub fn new(entries: Vec<Vec<Entry<S>>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidMaxPlus("empty matrix".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidMaxPlus(format!("row {} has {} entries, expected {n}", i + 1, row.len())));
            }
            if row.iter().all(Option::is_none) {
                return Err(Error::InvalidMaxPlus(format!("row {} has no finite entry", i + 1)));
            }
            if row.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMaxPlus(format!("row {} has a non-finite entry", i + 1)));
            }
        }
        Ok(MaxPlusMatrix { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<Entry<S>>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Entry<S> {
        &self.entries[i][j]
    }

    /// Arc `i → j` iff `A_ij` is finite.
    pub fn graph(&self) -> DiGraph {
        let n = self.dim();
        let mut g = DiGraph::full(n);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if x.is_some() {
                    g.add_arc(i, j);
                }
            }
        }
        g
    }

    /// `f_A(x)_i = max_j (A_ij + x_j)` as a max-affine model.
    pub fn to_map(&self) -> MapModel<S> {
        let n = self.dim();
        MapModel::max_affine(
            self.entries
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter_map(|(j, x)| x.as_ref().map(|a| Generator::new(vector::unit(n, j), a.clone())))
                        .collect()
                })
                .collect(),
        )
        .expect("finite entry per row")
    }

    pub fn apply(&self, x: &[S]) -> Vec<S> {
        self.to_map().eval(x)
    }

    fn shifted(&self, c: &S) -> Vec<Vec<Entry<S>>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|x| x.as_ref().map(|a| a.clone() - c.clone())).collect())
            .collect()
    }
}

/// Maximal circuit mean by Karp's recursion, started from every node.
pub fn maxplus_rho<S: Scalar>(a: &MaxPlusMatrix<S>) -> S {
    let n = a.dim();
    // d[k][v]: best weight of a walk with k arcs ending at v.
    let mut d: Vec<Vec<Entry<S>>> = vec![vec![Some(S::zero()); n]];
    for k in 1..=n {
        let prev = &d[k - 1];
        let row: Vec<Entry<S>> = (0..n)
            .map(|v| {
                (0..n).fold(None, |acc, u| mp_max(acc, mp_add(&prev[u], &a.entries[u][v])))
            })
            .collect();
        d.push(row);
    }
    let mut best: Option<S> = None;
    for v in 0..n {
        let Some(dn) = &d[n][v] else { continue };
        let mut worst: Option<S> = None;
        for (k, dk) in d.iter().enumerate().take(n) {
            if let Some(dk) = &dk[v] {
                let mean = (dn.clone() - dk.clone()) / S::from_i64((n - k) as i64);
                worst = Some(match worst {
                    Some(w) => S::min_of(w, mean),
                    None => mean,
                });
            }
        }
        if let Some(w) = worst {
            best = Some(match best {
                Some(b) => S::max_of(b, w),
                None => w,
            });
        }
    }
    best.expect("every row has a finite entry, so a circuit exists")
}

/// Maximal circuit mean by enumerating every elementary circuit.
pub fn brute_force_rho<S: Scalar>(a: &MaxPlusMatrix<S>) -> S {
    let n = a.dim();
    let mut best: Option<S> = None;
    // Circuits are rooted at their smallest node.
    fn walk<S: Scalar>(
        a: &MaxPlusMatrix<S>,
        root: usize,
        at: usize,
        weight: S,
        len: usize,
        on_path: &mut Vec<bool>,
        best: &mut Option<S>,
    ) {
        for next in root..a.dim() {
            let Some(w) = &a.entries[at][next] else { continue };
            let total = weight.clone() + w.clone();
            if next == root {
                let mean = total / S::from_i64((len + 1) as i64);
                *best = Some(match best.take() {
                    Some(b) => S::max_of(b, mean),
                    None => mean,
                });
            } else if !on_path[next] {
                on_path[next] = true;
                walk(a, root, next, total, len + 1, on_path, best);
                on_path[next] = false;
            }
        }
    }
    for root in 0..n {
        let mut on_path = vec![false; n];
        on_path[root] = true;
        walk(a, root, root, S::zero(), 0, &mut on_path, &mut best);
    }
    best.expect("every row has a finite entry, so a circuit exists")
}

/// `A⁺ = A ⊕ A² ⊕ …` by Floyd–Warshall relaxation; requires every circuit
/// of `A` to have nonpositive weight.
pub fn kleene_plus<S: Scalar>(a: &[Vec<Entry<S>>]) -> Result<Vec<Vec<Entry<S>>>> {
    let n = a.len();
    let mut b = a.to_vec();
    for k in 0..n {
        for i in 0..n {
            if b[i][k].is_none() {
                continue;
            }
            for j in 0..n {
                let via = mp_add(&b[i][k], &b[k][j]);
                b[i][j] = mp_max(b[i][j].take(), via);
            }
        }
    }
    if (0..n).any(|i| b[i][i].as_ref().is_some_and(|x| x.is_positive())) {
        return Err(Error::InvalidMaxPlus("circuit of positive weight".into()));
    }
    Ok(b)
}

/// `A* = I ⊕ A⁺`.
pub fn kleene_star<S: Scalar>(a: &[Vec<Entry<S>>]) -> Result<Vec<Vec<Entry<S>>>> {
    let mut b = kleene_plus(a)?;
    for (i, row) in b.iter_mut().enumerate() {
        row[i] = mp_max(row[i].take(), Some(S::zero()));
    }
    Ok(b)
}

/// Eigenvalue and an eigenvector of an irreducible matrix: the column of
/// `(A − ρ)*` at the first node lying on a circuit of mean `ρ`.
pub fn maxplus_eigen<S: Scalar>(a: &MaxPlusMatrix<S>) -> Result<(S, Vec<S>)> {
    if graph::strong_components(&a.graph()).len() != 1 {
        return Err(Error::Reducible);
    }
    let rho = maxplus_rho(a);
    let plus = kleene_plus(&a.shifted(&rho))?;
    let n = a.dim();
    let node = (0..n)
        .find(|&i| plus[i][i].as_ref().is_some_and(|x| x.near(&S::zero())))
        .ok_or_else(|| Error::InvalidMaxPlus("no circuit attains the maximal mean".into()))?;
    let v: Vec<S> = (0..n)
        .map(|i| {
            if i == node {
                S::zero()
            } else {
                plus[i][node].clone().expect("irreducible matrix has finite star")
            }
        })
        .collect();
    Ok((rho, v))
}

fn check_eigenpair<S: Scalar>(a: &MaxPlusMatrix<S>, lambda: &S, v: &[S], tol: &S) -> Result<()> {
    let residual = vector::sup_dist(&vector::add_scalar(&a.apply(v), &-lambda.clone()), v);
    if residual <= *tol {
        Ok(())
    } else {
        Err(Error::InvalidEigenpair {
            residual: residual.to_f64(),
            tol: tol.to_f64(),
        })
    }
}

/// Arcs `i → j` with `λ + v_i = A_ij + v_j`.
pub fn saturation_graph<S: Scalar>(a: &MaxPlusMatrix<S>, lambda: &S, v: &[S], tol: &S) -> Result<DiGraph> {
    check_eigenpair(a, lambda, v, tol)?;
    let n = a.dim();
    let mut g = DiGraph::full(n);
    for i in 0..n {
        for j in 0..n {
            if let Some(x) = &a.entries[i][j] {
                let gap = (lambda.clone() + v[i].clone() - x.clone() - v[j].clone()).abs();
                if gap <= *tol {
                    g.add_arc(i, j);
                }
            }
        }
    }
    Ok(g)
}

/// Arcs of the saturation graph inside its nontrivial strong components.
pub fn maxplus_critical<S: Scalar>(a: &MaxPlusMatrix<S>, lambda: &S, v: &[S], tol: &S) -> Result<DiGraph> {
    let sat = saturation_graph(a, lambda, v, tol)?;
    let mut out = DiGraph::new(a.dim());
    for class in graph::strong_components(&sat) {
        if sat.is_nontrivial(&class) {
            let keep: BTreeSet<usize> = class.into_iter().collect();
            out = out.union(&sat.induced(&keep));
        }
    }
    Ok(out)
}
