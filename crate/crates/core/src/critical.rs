//! Critical graph, critical classes and cyclicity of a map at an
//! eigenvector, together with witness matrices, invariant classes and
//! sections.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{self, DiGraph};
use crate::markov;
use crate::model::{MapModel, RectangularSet};
use crate::scalar::Scalar;
use crate::spectral;
use crate::vector;

/// Union of the final graphs of all matrices in the convex hull of a
/// rectangular set.
///
/// Each round keeps the rows summing to one on the surviving nodes. Nodes
/// left without such a row are dropped; otherwise every final class of
/// the resulting graph is nontrivial, is emitted, and rows touching it are
/// discarded before the next round.
pub fn final_graph_of_rect<S: Scalar>(rect: &RectangularSet<S>) -> DiGraph {
    let n = rect.dim();
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut rows: Vec<Vec<&Vec<S>>> = rect.rows.iter().map(|r| r.iter().collect()).collect();
    let mut out = DiGraph::new(n);

    let mass = |p: &Vec<S>, alive: &BTreeSet<usize>| {
        alive.iter().fold(S::zero(), |acc, &j| acc + p[j].clone())
    };

    while !alive.is_empty() {
        for &i in &alive {
            rows[i].retain(|p| mass(p, &alive).near(&S::one()));
        }
        let dead: Vec<usize> = alive.iter().copied().filter(|&i| rows[i].is_empty()).collect();
        if !dead.is_empty() {
            for i in dead {
                alive.remove(&i);
            }
            continue;
        }

        let mut g = DiGraph::new(n);
        for &i in &alive {
            g.add_node(i);
            for p in &rows[i] {
                for &j in &alive {
                    if p[j] > S::zero() {
                        g.add_arc(i, j);
                    }
                }
            }
        }
        let finals: BTreeSet<usize> = graph::final_classes(&g).into_iter().flatten().collect();
        debug_assert!(!finals.is_empty());
        out = out.union(&g.induced(&finals));
        for &i in &finals {
            alive.remove(&i);
        }
        for &i in &alive {
            rows[i].retain(|p| finals.iter().all(|&j| p[j].is_zero()));
        }
    }
    out
}

/// Critical graph, its classes (sorted by smallest node) and cyclicity.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalData {
    pub graph: DiGraph,
    pub classes: Vec<Vec<usize>>,
    pub nodes: Vec<usize>,
    pub cyclicity: usize,
}

impl CriticalData {
    pub fn from_graph(graph: DiGraph) -> Result<Self> {
        let mut classes = graph::strong_components(&graph);
        classes.sort();
        let cyclicity = graph::cyclicity(&graph)?;
        let nodes = graph.nodes().iter().copied().collect();
        Ok(CriticalData {
            graph,
            classes,
            nodes,
            cyclicity,
        })
    }

    /// Number of critical classes.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, node: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&node))
    }

    /// Per-class cyclicities, in class order.
    pub fn class_cyclicities(&self) -> Vec<usize> {
        self.classes
            .iter()
            .map(|c| graph::component_period(&self.graph, c).expect("critical classes are nontrivial"))
            .collect()
    }
}

fn checked_subdiff<S: Scalar>(m: &MapModel<S>, v: &[S], lambda: &S, tol: &S) -> Result<RectangularSet<S>> {
    spectral::require_eigenpair(m, lambda, v, tol)?;
    m.subdiff_generators(v, tol)
}

pub fn critical_data<S: Scalar>(m: &MapModel<S>, v: &[S], lambda: &S, tol: &S) -> Result<CriticalData> {
    let rect = checked_subdiff(m, v, lambda, tol)?;
    CriticalData::from_graph(final_graph_of_rect(&rect))
}

fn uniform_average<S: Scalar>(rows: &[&Vec<S>], n: usize) -> Vec<S> {
    let weight = S::one() / S::from_i64(rows.len() as i64);
    rows.iter()
        .fold(vector::zeros::<S>(n), |acc, p| vector::add(&acc, &vector::scale(p, &weight)))
}

/// A matrix in the convex hull of `∂f(v)` whose final graph is the
/// critical graph.
///
/// A critical row averages the active rows that are stochastic and
/// supported in its class; any other row averages all active rows.
pub fn witness_matrix<S: Scalar>(m: &MapModel<S>, v: &[S], lambda: &S, tol: &S) -> Result<Vec<Vec<S>>> {
    let rect = checked_subdiff(m, v, lambda, tol)?;
    let cd = CriticalData::from_graph(final_graph_of_rect(&rect))?;
    let n = m.dim();
    let matrix: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let all: Vec<&Vec<S>> = rect.rows[i].iter().collect();
            let chosen: Vec<&Vec<S>> = match cd.class_of(i) {
                Some(c) => {
                    let class = &cd.classes[c];
                    all.iter()
                        .copied()
                        .filter(|p| {
                            vector::sum(p).near(&S::one())
                                && p.iter().enumerate().all(|(j, x)| x.is_zero() || class.contains(&j))
                        })
                        .collect()
                }
                None => all,
            };
            uniform_average(&chosen, n)
        })
        .collect();
    if markov::final_graph(&matrix) != cd.graph {
        return Err(Error::Precondition(
            "witness matrix final graph differs from the critical graph".into(),
        ));
    }
    Ok(matrix)
}

/// Critical classes left invariant by every active row.
pub fn invariant_critical_classes<S: Scalar>(
    m: &MapModel<S>,
    v: &[S],
    lambda: &S,
    tol: &S,
) -> Result<Vec<Vec<usize>>> {
    let rect = checked_subdiff(m, v, lambda, tol)?;
    let cd = CriticalData::from_graph(final_graph_of_rect(&rect))?;
    Ok(cd
        .classes
        .into_iter()
        .filter(|class| {
            class.iter().all(|&i| {
                rect.rows[i]
                    .iter()
                    .all(|p| p.iter().enumerate().all(|(j, x)| x.is_zero() || class.contains(&j)))
            })
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectionRule {
    SmallestNode,
    Explicit(Vec<usize>),
}

/// A node set meeting each critical class exactly once.
pub fn section(cd: &CriticalData, rule: &SectionRule) -> Result<Vec<usize>> {
    match rule {
        SectionRule::SmallestNode => Ok(cd.classes.iter().map(|c| c[0]).collect()),
        SectionRule::Explicit(nodes) => {
            let set: BTreeSet<usize> = nodes.iter().copied().collect();
            if set.len() != nodes.len() {
                return Err(Error::InvalidSection("repeated node".into()));
            }
            for (k, class) in cd.classes.iter().enumerate() {
                let hits = class.iter().filter(|i| set.contains(i)).count();
                if hits != 1 {
                    return Err(Error::InvalidSection(format!(
                        "class C{} is met {hits} times",
                        k + 1
                    )));
                }
            }
            if let Some(i) = set.iter().find(|i| cd.class_of(**i).is_none()) {
                return Err(Error::InvalidSection(format!("node {} is not critical", i + 1)));
            }
            Ok(set.into_iter().collect())
        }
    }
}
