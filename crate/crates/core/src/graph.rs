//! Directed graphs on subsets of `{0..n}`: strong components, final
//! classes, boolean powers and cyclicity.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A directed graph whose nodes form a subset of `{0, .., universe-1}`.
///
/// Self-loops are allowed; parallel arcs are not representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiGraph {
    universe: usize,
    nodes: BTreeSet<usize>,
    arcs: BTreeSet<(usize, usize)>,
}

impl DiGraph {
    pub fn new(universe: usize) -> Self {
        DiGraph {
            universe,
            nodes: BTreeSet::new(),
            arcs: BTreeSet::new(),
        }
    }

    /// Graph on all of `{0..universe}` with no arcs.
    pub fn full(universe: usize) -> Self {
        let mut g = DiGraph::new(universe);
        g.nodes.extend(0..universe);
        g
    }

    pub fn from_arcs(universe: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = DiGraph::new(universe);
        for (i, j) in arcs {
            g.add_arc(i, j);
        }
        g
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn nodes(&self) -> &BTreeSet<usize> {
        &self.nodes
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    pub fn add_node(&mut self, i: usize) {
        assert!(i < self.universe, "node {i} outside universe {}", self.universe);
        self.nodes.insert(i);
    }

    /// Adds the arc and both endpoints.
    pub fn add_arc(&mut self, i: usize, j: usize) {
        self.add_node(i);
        self.add_node(j);
        self.arcs.insert((i, j));
    }

    pub fn has_arc(&self, i: usize, j: usize) -> bool {
        self.arcs.contains(&(i, j))
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.arcs.range((i, 0)..=(i, usize::MAX)).map(|&(_, j)| j)
    }

    /// Subgraph induced by `keep`.
    pub fn induced(&self, keep: &BTreeSet<usize>) -> DiGraph {
        DiGraph {
            universe: self.universe,
            nodes: self.nodes.intersection(keep).copied().collect(),
            arcs: self
                .arcs
                .iter()
                .filter(|(i, j)| keep.contains(i) && keep.contains(j))
                .copied()
                .collect(),
        }
    }

    /// Union of nodes and arcs.
    pub fn union(&self, other: &DiGraph) -> DiGraph {
        let mut g = self.clone();
        g.universe = g.universe.max(other.universe);
        g.nodes.extend(other.nodes.iter().copied());
        g.arcs.extend(other.arcs.iter().copied());
        g
    }

    fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self.nodes.iter().map(|&i| (i, Vec::new())).collect();
        for &(i, j) in &self.arcs {
            adj.get_mut(&i).expect("arc endpoint is a node").push(j);
        }
        adj
    }

    /// Whether the component `class` has a circuit (more than one node or a loop).
    pub fn is_nontrivial(&self, class: &[usize]) -> bool {
        class.len() > 1 || class.first().is_some_and(|&i| self.has_arc(i, i))
    }
}

/// Strong components in topological order of the condensation; ties are
/// broken by smallest node. Each class is sorted.
pub fn strong_components(g: &DiGraph) -> Vec<Vec<usize>> {
    let comp_of = tarjan(g);
    let ncomp = comp_of.values().copied().max().map_or(0, |m| m + 1);
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (&node, &c) in &comp_of {
        classes[c].push(node);
    }
    // Condensation arcs and in-degrees.
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncomp];
    for &(i, j) in g.arcs() {
        let (ci, cj) = (comp_of[&i], comp_of[&j]);
        if ci != cj {
            succ[ci].insert(cj);
        }
    }
    let mut indeg = vec![0usize; ncomp];
    for s in &succ {
        for &c in s {
            indeg[c] += 1;
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> = (0..ncomp)
        .filter(|&c| indeg[c] == 0)
        .map(|c| Reverse((classes[c][0], c)))
        .collect();
    let mut order = Vec::with_capacity(ncomp);
    while let Some(Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                heap.push(Reverse((classes[d][0], d)));
            }
        }
    }
    order.into_iter().map(|c| core::mem::take(&mut classes[c])).collect()
}

/// Iterative Tarjan low-link; returns node -> component id.
fn tarjan(g: &DiGraph) -> BTreeMap<usize, usize> {
    let adj = g.adjacency();
    let mut index: BTreeMap<usize, usize> = BTreeMap::new();
    let mut low: BTreeMap<usize, usize> = BTreeMap::new();
    let mut on_stack: BTreeSet<usize> = BTreeSet::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut comp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next_index = 0;
    let mut next_comp = 0;

    for &root in g.nodes() {
        if index.contains_key(&root) {
            continue;
        }
        // (node, position in its successor list)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index.insert(root, next_index);
        low.insert(root, next_index);
        next_index += 1;
        stack.push(root);
        on_stack.insert(root);

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succs = &adj[&v];
            if *pos < succs.len() {
                let w = succs[*pos];
                *pos += 1;
                if let alloc::collections::btree_map::Entry::Vacant(slot) = index.entry(w) {
                    slot.insert(next_index);
                    low.insert(w, next_index);
                    next_index += 1;
                    stack.push(w);
                    on_stack.insert(w);
                    call.push((w, 0));
                } else if on_stack.contains(&w) {
                    let lw = index[&w];
                    let lv = low.get_mut(&v).unwrap();
                    *lv = (*lv).min(lw);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    let lv = low[&v];
                    let lp = low.get_mut(&parent).unwrap();
                    *lp = (*lp).min(lv);
                }
                if low[&v] == index[&v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack.remove(&w);
                        comp.insert(w, next_comp);
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Classes with no arc leaving the class (trivial classes included).
pub fn final_classes(g: &DiGraph) -> Vec<Vec<usize>> {
    strong_components(g)
        .into_iter()
        .filter(|class| {
            let set: BTreeSet<usize> = class.iter().copied().collect();
            class
                .iter()
                .all(|&i| g.successors(i).all(|j| set.contains(&j)))
        })
        .collect()
}

/// Arc `i -> j` iff a path of length exactly `k` exists. `k >= 1`.
pub fn graph_power(g: &DiGraph, k: usize) -> DiGraph {
    assert!(k >= 1, "graph_power needs k >= 1");
    let nodes: Vec<usize> = g.nodes().iter().copied().collect();
    let pos: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let m = nodes.len();
    let mut base = vec![vec![false; m]; m];
    for &(i, j) in g.arcs() {
        base[pos[&i]][pos[&j]] = true;
    }
    let mul = |a: &Vec<Vec<bool>>, b: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
        let mut c = vec![vec![false; m]; m];
        for i in 0..m {
            for l in 0..m {
                if a[i][l] {
                    for j in 0..m {
                        c[i][j] |= b[l][j];
                    }
                }
            }
        }
        c
    };
    let mut result: Option<Vec<Vec<bool>>> = None;
    let mut sq = base;
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => sq.clone(),
                Some(r) => mul(&r, &sq),
            });
        }
        e >>= 1;
        if e > 0 {
            sq = mul(&sq, &sq);
        }
    }
    let reach = result.expect("k >= 1");
    let mut out = DiGraph::new(g.universe());
    for &i in &nodes {
        out.add_node(i);
    }
    for (a, &i) in nodes.iter().enumerate() {
        for (b, &j) in nodes.iter().enumerate() {
            if reach[a][b] {
                out.add_arc(i, j);
            }
        }
    }
    out
}

/// Period of one strongly connected, nontrivial component via BFS levels.
pub fn component_period(g: &DiGraph, class: &[usize]) -> Result<usize> {
    if !g.is_nontrivial(class) {
        return Err(Error::TrivialComponent { node: class.first().map_or(0, |i| i + 1) });
    }
    let members: BTreeSet<usize> = class.iter().copied().collect();
    let mut level: BTreeMap<usize, i64> = BTreeMap::new();
    let root = class[0];
    level.insert(root, 0);
    let mut queue = alloc::collections::VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let lu = level[&u];
        for v in g.successors(u).filter(|v| members.contains(v)) {
            if let alloc::collections::btree_map::Entry::Vacant(e) = level.entry(v) {
                e.insert(lu + 1);
                queue.push_back(v);
            }
        }
    }
    let mut period: i64 = 0;
    for &(u, v) in g.arcs() {
        if members.contains(&u) && members.contains(&v) {
            period = period.gcd(&(level[&u] + 1 - level[&v]).abs());
        }
    }
    Ok(period as usize)
}

/// lcm of the periods of all strong components; 1 for the empty graph.
pub fn cyclicity(g: &DiGraph) -> Result<usize> {
    strong_components(g)
        .iter()
        .try_fold(1usize, |acc, class| Ok(acc.lcm(&component_period(g, class)?)))
}
