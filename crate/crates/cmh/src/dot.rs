use std::fmt::Write;

use cmh_core::graph::DiGraph;

/// DOT text for a graph with 1-based node labels; each class becomes a
/// cluster labelled `C1..Cs` in the given order.
pub fn to_dot(name: &str, g: &DiGraph, classes: &[Vec<usize>]) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    let mut clustered = std::collections::BTreeSet::new();
    for (k, class) in classes.iter().enumerate() {
        writeln!(out, "  subgraph cluster_C{} {{", k + 1).unwrap();
        writeln!(out, "    label=\"C{}\";", k + 1).unwrap();
        for &i in class {
            writeln!(out, "    {};", i + 1).unwrap();
            clustered.insert(i);
        }
        writeln!(out, "  }}").unwrap();
    }
    for &i in g.nodes().iter().filter(|i| !clustered.contains(i)) {
        writeln!(out, "  {};", i + 1).unwrap();
    }
    for &(i, j) in g.arcs() {
        writeln!(out, "  {} -> {};", i + 1, j + 1).unwrap();
    }
    out.push_str("}\n");
    out
}
