//! Exact polyhedra: feasibility, affine hulls, and the eigenspace of a
//! max-affine map as a union of polyhedra indexed by generator selections.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::critical::CriticalData;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp::{self, LpOutcome};
use crate::model::{advance, MapModel};
use crate::scalar::{Rational, Scalar};
use crate::spectral;
use crate::vector;

/// Default ceiling on the number of generator selections enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 100_000;

/// `{x : a·x = b for equalities, a·x ≤ b for inequalities}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPolyhedron {
    pub dim: usize,
    pub equalities: Vec<(Vec<Rational>, Rational)>,
    pub inequalities: Vec<(Vec<Rational>, Rational)>,
}

impl RationalPolyhedron {
    /// The whole space `R^dim`.
    pub fn space(dim: usize) -> Self {
        RationalPolyhedron {
            dim,
            equalities: Vec::new(),
            inequalities: Vec::new(),
        }
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equalities.iter().all(|(a, b)| vector::dot(a, x) == *b)
            && self.inequalities.iter().all(|(a, b)| vector::dot(a, x) <= *b)
    }

    /// Intersection with another polyhedron of the same dimension.
    pub fn intersect(&self, other: &RationalPolyhedron) -> RationalPolyhedron {
        let mut out = self.clone();
        out.equalities.extend(other.equalities.iter().cloned());
        out.inequalities.extend(other.inequalities.iter().cloned());
        out
    }
}

pub fn lp_feasible(poly: &RationalPolyhedron) -> Option<Vec<Rational>> {
    match lp::maximize(poly, &vector::zeros(poly.dim)) {
        LpOutcome::Optimal { point, .. } => Some(point),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("zero objective is bounded"),
    }
}

/// Affine hull `point + span(directions)` of a nonempty polyhedron.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineHull {
    pub point: Vec<Rational>,
    pub directions: Vec<Vec<Rational>>,
    /// Indices of inequalities that hold with equality on the whole set.
    pub implicit: Vec<usize>,
}

impl AffineHull {
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }
}

/// Finds implicit equalities (an inequality is implicit iff its minimum
/// over the set equals its bound) and returns the affine hull.
pub fn affine_hull(poly: &RationalPolyhedron) -> Option<AffineHull> {
    let first = lp_feasible(poly)?;
    let mut witnesses = vec![first.clone()];
    let mut implicit = Vec::new();
    for (k, (a, b)) in poly.inequalities.iter().enumerate() {
        if witnesses.iter().any(|w| vector::dot(a, w) < *b) {
            continue;
        }
        match lp::minimize(poly, a) {
            LpOutcome::Optimal { value, .. } if value == *b => implicit.push(k),
            LpOutcome::Optimal { point, .. } => witnesses.push(point),
            // Unbounded below: the inequality is certainly not implicit.
            LpOutcome::Unbounded => {}
            LpOutcome::Infeasible => unreachable!("feasibility established"),
        }
    }
    let rows: Vec<Vec<Rational>> = poly
        .equalities
        .iter()
        .map(|(a, _)| a.clone())
        .chain(implicit.iter().map(|&k| poly.inequalities[k].0.clone()))
        .collect();
    Some(AffineHull {
        point: first,
        directions: linalg::null_space(&rows, poly.dim),
        implicit,
    })
}

/// Dimension of the affine hull; −1 for the empty set.
pub fn affine_dimension(poly: &RationalPolyhedron) -> i64 {
    affine_hull(poly).map_or(-1, |h| h.dimension() as i64)
}

/// Generator index chosen in each row.
pub type PolicySelection = Vec<usize>;

fn exact_rows(m: &MapModel<Rational>) -> Result<Vec<&[crate::model::Generator<Rational>]>> {
    m.generator_rows()
}

/// Constraints of row `i` under the choice `k`: the chosen piece attains
/// `λ + x_i` and dominates the other pieces.
fn row_constraints(
    m: &MapModel<Rational>,
    lambda: &Rational,
    i: usize,
    k: usize,
    poly: &mut RationalPolyhedron,
) -> Result<()> {
    let rows = exact_rows(m)?;
    let n = m.dim();
    let chosen = &rows[i][k];
    let mut eq = vector::zeros::<Rational>(n);
    eq[i] = Rational::one();
    let eq = vector::sub(&eq, &chosen.p);
    let rhs = &chosen.r - lambda;
    if !(eq.iter().all(Zero::is_zero) && rhs.is_zero()) {
        poly.equalities.push((eq, rhs));
    }
    for (l, other) in rows[i].iter().enumerate() {
        if l == k {
            continue;
        }
        let a = vector::sub(&other.p, &chosen.p);
        let b = &chosen.r - &other.r;
        if a.iter().all(Zero::is_zero) && b >= Rational::zero() {
            continue;
        }
        poly.inequalities.push((a, b));
    }
    Ok(())
}

/// `K_φ`: eigenvectors for `λ` at which the selection `φ` is active.
pub fn selection_polyhedron(
    m: &MapModel<Rational>,
    lambda: &Rational,
    selection: &[usize],
) -> Result<RationalPolyhedron> {
    let mut poly = RationalPolyhedron::space(m.dim());
    for (i, &k) in selection.iter().enumerate() {
        row_constraints(m, lambda, i, k, &mut poly)?;
    }
    Ok(poly)
}

/// `{x : f(x) ≤ λ + x}`.
pub fn super_eigenspace(m: &MapModel<Rational>, lambda: &Rational) -> Result<RationalPolyhedron> {
    let rows = exact_rows(m)?;
    let n = m.dim();
    let mut poly = RationalPolyhedron::space(n);
    for (i, row) in rows.iter().enumerate() {
        for g in row.iter() {
            let mut a = g.p.clone();
            a[i] -= Rational::one();
            poly.inequalities.push((a, lambda - &g.r));
        }
    }
    Ok(poly)
}

/// One nonempty piece of the eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPiece {
    pub selection: PolicySelection,
    pub polyhedron: RationalPolyhedron,
    pub point: Vec<Rational>,
}

/// All selections `φ` with `K_φ ≠ ∅`, in lexicographic order.
///
/// Selections are explored row by row; a partial selection whose
/// constraints are already infeasible is not extended.
pub fn eigenspace_enumerate(m: &MapModel<Rational>, lambda: &Rational, cap: usize) -> Result<Vec<EigenPiece>> {
    let rows = exact_rows(m)?;
    let total = rows.iter().fold(1usize, |acc, r| acc.saturating_mul(r.len()));
    if total > cap {
        return Err(Error::CapExceeded { cap, needed: total });
    }
    let n = m.dim();
    let mut out = Vec::new();
    let mut stack: Vec<(PolicySelection, RationalPolyhedron)> = vec![(Vec::new(), RationalPolyhedron::space(n))];
    while let Some((sel, poly)) = stack.pop() {
        let i = sel.len();
        if i == n {
            let point = lp_feasible(&poly).expect("feasibility checked on extension");
            out.push(EigenPiece {
                selection: sel,
                polyhedron: poly,
                point,
            });
            continue;
        }
        // Push in reverse so the stack pops in lexicographic order.
        for k in (0..rows[i].len()).rev() {
            let mut next = poly.clone();
            row_constraints(m, lambda, i, k, &mut next)?;
            if lp_feasible(&next).is_some() {
                let mut s = sel.clone();
                s.push(k);
                stack.push((s, next));
            }
        }
    }
    Ok(out)
}

/// Every selection, feasible or not; used by tests as a brute-force oracle.
pub fn all_selections(m: &MapModel<Rational>) -> Result<Vec<PolicySelection>> {
    let rows = exact_rows(m)?;
    let mut choice = vec![0usize; rows.len()];
    let mut out = vec![choice.clone()];
    while advance(&mut choice, |i| rows[i].len()) {
        out.push(choice.clone());
    }
    Ok(out)
}

/// Direct check `f(x) = λ + x` within `tol`.
pub fn eigenspace_membership<S: Scalar>(m: &MapModel<S>, lambda: &S, x: &[S], tol: &S) -> bool {
    spectral::verify_eigenpair(m, lambda, x, tol).0
}

/// Dimension of the eigenspace restricted to the critical nodes, computed
/// from the affine hulls of all nonempty pieces.
pub fn eigenspace_dimension(
    m: &MapModel<Rational>,
    lambda: &Rational,
    cd: &CriticalData,
    cap: usize,
) -> Result<usize> {
    let pieces = eigenspace_enumerate(m, lambda, cap)?;
    Ok(projected_hull_dimension(&pieces, &cd.nodes))
}

/// Affine dimension of the union of the pieces after restriction to `nodes`.
pub fn projected_hull_dimension(pieces: &[EigenPiece], nodes: &[usize]) -> usize {
    let mut base: Option<Vec<Rational>> = None;
    let mut spanning: Vec<Vec<Rational>> = Vec::new();
    for piece in pieces {
        let hull = affine_hull(&piece.polyhedron).expect("pieces are nonempty");
        let p = vector::restrict(&hull.point, nodes);
        match &base {
            None => base = Some(p),
            Some(b) => spanning.push(vector::sub(&p, b)),
        }
        spanning.extend(hull.directions.iter().map(|d| vector::restrict(d, nodes)));
    }
    linalg::rank(&spanning, nodes.len())
}

/// Dimension of the eigenspace itself: the largest piece dimension.
pub fn eigenspace_affine_dimension(pieces: &[EigenPiece]) -> i64 {
    pieces
        .iter()
        .map(|p| affine_dimension(&p.polyhedron))
        .max()
        .unwrap_or(-1)
}
