//! Eigenvalue brackets, eigenvector search, the spectral projector,
//! periodic-orbit limits and the lattice operations on fixed points.
//!
//! Throughout, `g = f − λ` denotes the normalized map.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::critical;
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::model::{advance, Homogeneity, MapModel};
use crate::polyhedra::{self, RationalPolyhedron};
use crate::scalar::{Mode, Rational, Scalar};
use crate::vector;

/// Iterations spent on exact rational iterates before switching to a
/// float shadow plus an exact snap.
const EXACT_ITERATION_BUDGET: usize = 64;
/// Largest number of near-active selections tried by a snap.
const SNAP_SELECTION_CAP: usize = 4096;
/// Relative gap below which two float piece values count as tied.
const SNAP_ACTIVE_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenStatus {
    Converged,
    MaxIter,
    DivergedBracket,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<S> {
    pub lambda: S,
    pub v: Vec<S>,
    /// `|f(v) − λ − v|_∞`.
    pub residual: S,
    pub iterations: usize,
    pub status: EigenStatus,
    /// Tightest bracket `(lower, upper)` of the eigenvalue seen.
    pub bounds: (S, S),
}

/// Returns whether `|f(v) − λ − v|_∞ ≤ tol`, and the residual.
pub fn verify_eigenpair<S: Scalar>(m: &MapModel<S>, lambda: &S, v: &[S], tol: &S) -> (bool, S) {
    if v.len() != m.dim() {
        return (false, S::zero());
    }
    let residual = vector::sup_dist(&m.eval_shifted(v, lambda), v);
    (residual <= *tol, residual)
}

pub(crate) fn require_eigenpair<S: Scalar>(m: &MapModel<S>, lambda: &S, v: &[S], tol: &S) -> Result<()> {
    if v.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: v.len(),
        });
    }
    match verify_eigenpair(m, lambda, v, tol) {
        (true, _) => Ok(()),
        (false, residual) => Err(Error::InvalidEigenpair {
            residual: residual.to_f64(),
            tol: tol.to_f64(),
        }),
    }
}

fn spread<S: Scalar>(d: &[S]) -> (S, S) {
    (
        vector::min_entry(d).unwrap_or_else(S::zero),
        vector::max_entry(d).unwrap_or_else(S::zero),
    )
}

/// `min_i` and `max_i` of `f^k(x0) − f^{k−1}(x0)`.
pub fn eigenvalue_bounds<S: Scalar>(m: &MapModel<S>, x0: &[S], k: usize) -> (S, S) {
    assert!(k >= 1, "eigenvalue_bounds needs k >= 1");
    let before = m.iterate(x0, k - 1);
    let after = m.eval(&before);
    spread(&vector::sub(&after, &before))
}

/// Searches for an eigenpair: power-iteration brackets first, then a
/// damped iteration `x ← ½(x + f(x) − λ̂)` with periodic re-centering.
///
/// Exact models get an exact answer when the search succeeds: either the
/// rational iterates settle, or the float result is snapped onto the
/// polyhedral piece it lies in.
pub fn find_eigenvector<S: Scalar>(m: &MapModel<S>, x0: Option<&[S]>, tol: &S, max_iter: usize) -> EigenResult<S> {
    let n = m.dim();
    let start: Vec<S> = x0.map_or_else(|| vector::zeros(n), <[S]>::to_vec);
    match S::MODE {
        Mode::Float => {
            let mf = m.to_float();
            let xf: Vec<f64> = start.iter().map(Scalar::to_f64).collect();
            let r = float_search(&mf, &xf, tol.to_f64(), max_iter);
            convert_result(r, |x| S::from_f64(*x).unwrap_or_else(S::zero))
        }
        Mode::Exact => {
            let mq = m
                .map_scalars(|x| x.to_rational().expect("exact scalar"))
                .expect("same model");
            let xq: Vec<Rational> = start.iter().map(|x| x.to_rational().expect("exact scalar")).collect();
            let tq = tol.to_rational().unwrap_or_else(Rational::zero);
            let r = exact_search(&mq, &xq, &tq, max_iter);
            convert_result(r, S::from_rational)
        }
    }
}

fn convert_result<A: Scalar, B: Scalar>(r: EigenResult<A>, f: impl Fn(&A) -> B) -> EigenResult<B> {
    EigenResult {
        lambda: f(&r.lambda),
        v: r.v.iter().map(&f).collect(),
        residual: f(&r.residual),
        iterations: r.iterations,
        status: r.status,
        bounds: (f(&r.bounds.0), f(&r.bounds.1)),
    }
}

fn recenter(x: &mut [f64], homogeneous: bool) {
    if homogeneous {
        if let Some(&last) = x.last() {
            for v in x.iter_mut() {
                *v -= last;
            }
        }
    }
}

fn float_search(m: &MapModel<f64>, x0: &[f64], tol: f64, max_iter: usize) -> EigenResult<f64> {
    let homogeneous = m.homogeneity() == Homogeneity::Homogeneous;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut x = x0.to_vec();
    let mut iterations = 0;
    let mut best: (f64, Vec<f64>, f64) = (f64::INFINITY, x.clone(), 0.0);

    let finish = |v: Vec<f64>, lambda: f64, iterations, status, bounds| {
        let residual = verify_eigenpair(m, &lambda, &v, &0.0).1;
        EigenResult {
            lambda,
            v,
            residual,
            iterations,
            status,
            bounds,
        }
    };

    // Bracket phase: plain power iteration.
    let bracket_budget = (max_iter / 2).max(1).min(max_iter);
    while iterations < bracket_budget {
        let fx = m.eval(&x);
        iterations += 1;
        let (lo, hi) = spread(&vector::sub(&fx, &x));
        if !lo.is_finite() || !hi.is_finite() {
            return finish(best.1, best.2, iterations, EigenStatus::DivergedBracket, (lower, upper));
        }
        lower = lower.max(lo);
        upper = upper.min(hi);
        let half = (hi - lo) / 2.0;
        if half < best.0 {
            best = (half, x.clone(), (lo + hi) / 2.0);
        }
        if half <= tol {
            return finish(x, (lo + hi) / 2.0, iterations, EigenStatus::Converged, (lower, upper));
        }
        if upper - lower < tol / 10.0 {
            break;
        }
        x = fx;
        recenter(&mut x, homogeneous);
    }

    // Damped phase.
    let mut lambda_hat = if lower.is_finite() && upper.is_finite() {
        (lower + upper) / 2.0
    } else {
        best.2
    };
    let mut step = 0usize;
    while iterations < max_iter {
        let fx = m.eval(&x);
        iterations += 1;
        let d = vector::sub(&fx, &x);
        let (lo, hi) = spread(&d);
        if !lo.is_finite() || !hi.is_finite() {
            return finish(best.1, best.2, iterations, EigenStatus::DivergedBracket, (lower, upper));
        }
        let half = (hi - lo) / 2.0;
        if half < best.0 {
            best = (half, x.clone(), (lo + hi) / 2.0);
        }
        if half <= tol {
            return finish(x, (lo + hi) / 2.0, iterations, EigenStatus::Converged, (lower, upper));
        }
        x = x
            .iter()
            .zip(&fx)
            .map(|(a, b)| 0.5 * (a + b - lambda_hat))
            .collect();
        step += 1;
        if step.is_multiple_of(64) {
            lambda_hat = (lo + hi) / 2.0;
            recenter(&mut x, homogeneous);
        }
    }
    finish(best.1, best.2, iterations, EigenStatus::MaxIter, (lower, upper))
}

fn exact_search(m: &MapModel<Rational>, x0: &[Rational], tol: &Rational, max_iter: usize) -> EigenResult<Rational> {
    let mut x = x0.to_vec();
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    let mut iterations = 0;
    let quick = EXACT_ITERATION_BUDGET.min(max_iter);
    while iterations < quick {
        let fx = m.eval(&x);
        iterations += 1;
        let (lo, hi) = spread(&vector::sub(&fx, &x));
        lower = Some(lower.map_or(lo.clone(), |l| Rational::max_of(l, lo.clone())));
        upper = Some(upper.map_or(hi.clone(), |u| Rational::min_of(u, hi.clone())));
        if lo == hi || (&hi - &lo) / Rational::from_i64(2) <= *tol {
            let lambda = (&lo + &hi) / Rational::from_i64(2);
            let residual = verify_eigenpair(m, &lambda, &x, &Rational::zero()).1;
            return EigenResult {
                lambda,
                v: x,
                residual,
                iterations,
                status: EigenStatus::Converged,
                bounds: (lower.unwrap(), upper.unwrap()),
            };
        }
        x = fx;
    }

    let mf = m.to_float();
    let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
    let shadow = float_search(&mf, &xf, 1e-11, max_iter.saturating_sub(iterations).max(1));
    iterations += shadow.iterations;
    let bounds = (
        lower.unwrap_or_else(|| Rational::from_f64(shadow.bounds.0).unwrap_or_else(Rational::zero)),
        upper.unwrap_or_else(|| Rational::from_f64(shadow.bounds.1).unwrap_or_else(Rational::zero)),
    );
    if shadow.status == EigenStatus::Converged {
        if let Some((lambda, v)) = snap_eigenpair(m, &shadow.v) {
            return EigenResult {
                lambda,
                v,
                residual: Rational::zero(),
                iterations,
                status: EigenStatus::Converged,
                bounds,
            };
        }
    }
    let lambda = Rational::from_f64(shadow.lambda).unwrap_or_else(Rational::zero);
    let v: Vec<Rational> = shadow
        .v
        .iter()
        .map(|x| Rational::from_f64(*x).unwrap_or_else(Rational::zero))
        .collect();
    let (ok, residual) = verify_eigenpair(m, &lambda, &v, tol);
    EigenResult {
        lambda,
        v,
        residual,
        iterations,
        status: if ok { EigenStatus::Converged } else { EigenStatus::MaxIter },
        bounds,
    }
}

/// Per-row generator indices whose float value at `x` is within a small
/// relative gap of the row maximum, best first.
fn near_active(m: &MapModel<Rational>, x: &[f64]) -> Option<Vec<Vec<usize>>> {
    let rows = m.generator_rows().ok()?;
    let scale = 1.0 + x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Some(
        rows.iter()
            .map(|row| {
                let values: Vec<f64> = row
                    .iter()
                    .map(|g| g.p.iter().zip(x).map(|(p, v)| p.to_f64() * v).sum::<f64>() + g.r.to_f64())
                    .collect();
                let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut idx: Vec<usize> = (0..row.len())
                    .filter(|&k| top - values[k] <= SNAP_ACTIVE_GAP * scale)
                    .collect();
                idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
                idx
            })
            .collect(),
    )
}

fn selections(sets: &[Vec<usize>]) -> Option<Vec<Vec<usize>>> {
    let total = sets.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.len()))?;
    if total == 0 || total > SNAP_SELECTION_CAP {
        return None;
    }
    let mut pos = vec![0usize; sets.len()];
    let mut out = Vec::with_capacity(total);
    loop {
        out.push(pos.iter().enumerate().map(|(i, &p)| sets[i][p]).collect());
        if !advance(&mut pos, |i| sets[i].len()) {
            return Some(out);
        }
    }
}

/// Exact eigenpair on a piece selected near a float approximation.
fn snap_eigenpair(m: &MapModel<Rational>, approx: &[f64]) -> Option<(Rational, Vec<Rational>)> {
    let n = m.dim();
    let rows = m.generator_rows().ok()?;
    let homogeneous = m.homogeneity() == Homogeneity::Homogeneous;
    for sel in selections(&near_active(m, approx)?)? {
        // Variables (x, λ).
        let mut poly = RationalPolyhedron::space(n + 1);
        for (i, &k) in sel.iter().enumerate() {
            let g = &rows[i][k];
            let mut a: Vec<Rational> = g.p.iter().map(|x| -x.clone()).collect();
            a[i] += Rational::one();
            a.push(Rational::one());
            poly.equalities.push((a, g.r.clone()));
            for (l, h) in rows[i].iter().enumerate() {
                if l == k {
                    continue;
                }
                let mut a = h.p.clone();
                a[i] -= Rational::one();
                a.push(-Rational::one());
                poly.inequalities.push((a, -h.r.clone()));
            }
        }
        if homogeneous {
            let mut a = vector::zeros::<Rational>(n + 1);
            a[n - 1] = Rational::one();
            let anchor = Rational::from_f64(approx[n - 1]).unwrap_or_else(Rational::zero);
            poly.equalities.push((a, anchor));
        }
        if let Some(mut point) = polyhedra::lp_feasible(&poly) {
            let lambda = point.pop().expect("lambda variable");
            if verify_eigenpair(m, &lambda, &point, &Rational::zero()).0 {
                return Some((lambda, point));
            }
        }
    }
    None
}

/// A monotone limit together with the work spent reaching it.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitResult<S> {
    pub point: Vec<S>,
    pub iterations: usize,
    /// `|g(point) − point|_∞`.
    pub residual: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// Nonincreasing sequence from a super-eigenvector.
    Down,
    /// Nondecreasing sequence from a sub-eigenvector.
    Up,
}

/// `f^ω(z) = lim (f − λ)^k(z)` for `f(z) ≤ λ + z`.
pub fn spectral_projector<S: Scalar>(
    m: &MapModel<S>,
    lambda: &S,
    z: &[S],
    tol: &S,
    max_iter: usize,
) -> Result<LimitResult<S>> {
    check_dim(m, z)?;
    let slack = match S::MODE {
        Mode::Exact => S::zero(),
        Mode::Float => tol.clone(),
    };
    if !vector::leq(&m.eval_shifted(z, lambda), z, &slack) {
        return Err(Error::Precondition("f(z) ≤ λ + z fails".into()));
    }
    monotone_limit(m, lambda, z, Direction::Down, tol, max_iter)
}

fn check_dim<S: Scalar>(m: &MapModel<S>, x: &[S]) -> Result<()> {
    if x.len() == m.dim() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: x.len(),
        })
    }
}

fn monotone_limit<S: Scalar>(
    m: &MapModel<S>,
    lambda: &S,
    start: &[S],
    dir: Direction,
    tol: &S,
    max_iter: usize,
) -> Result<LimitResult<S>> {
    let budget = match S::MODE {
        Mode::Float => max_iter,
        Mode::Exact => EXACT_ITERATION_BUDGET.min(max_iter),
    };
    let mut x = start.to_vec();
    let mut iterations = 0;
    let mut gap = S::zero();
    while iterations < budget {
        let y = m.eval_shifted(&x, lambda);
        iterations += 1;
        gap = vector::sup_dist(&y, &x);
        if gap <= *tol {
            return Ok(LimitResult {
                point: x,
                iterations,
                residual: gap,
            });
        }
        x = y;
    }
    if S::MODE == Mode::Exact && m.is_pure_max_affine() {
        let mq = m.map_scalars(|v| v.to_rational().expect("exact scalar"))?;
        let lq = lambda.to_rational().expect("exact scalar");
        let sq: Vec<Rational> = start.iter().map(|v| v.to_rational().expect("exact scalar")).collect();
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        let (shadow, spent) = float_limit(&mq.to_float(), lq.to_f64(), &xf, max_iter.saturating_sub(iterations));
        iterations += spent;
        if let Some(point) = snap_limit(&mq, &lq, &sq, &shadow, dir) {
            return Ok(LimitResult {
                point: point.iter().map(S::from_rational).collect(),
                iterations,
                residual: S::zero(),
            });
        }
        while iterations < max_iter {
            let y = m.eval_shifted(&x, lambda);
            iterations += 1;
            gap = vector::sup_dist(&y, &x);
            if gap <= *tol {
                return Ok(LimitResult {
                    point: x,
                    iterations,
                    residual: gap,
                });
            }
            x = y;
        }
    }
    Err(Error::MaxIterations {
        max_iter,
        residual: gap.to_f64(),
    })
}

/// Float iteration of `g` until it stalls at rounding level.
fn float_limit(m: &MapModel<f64>, lambda: f64, x0: &[f64], max_iter: usize) -> (Vec<f64>, usize) {
    let mut x = x0.to_vec();
    for k in 0..max_iter {
        let y = m.eval_shifted(&x, &lambda);
        let scale = 1.0 + y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let gap = vector::sup_dist(&y, &x);
        x = y;
        if gap <= 1e-13 * scale {
            return (x, k + 1);
        }
    }
    (x, max_iter)
}

/// The extreme eigenvector on the side of `bound`, searched on pieces
/// near the float limit `approx`.
fn snap_limit(
    m: &MapModel<Rational>,
    lambda: &Rational,
    bound: &[Rational],
    approx: &[f64],
    dir: Direction,
) -> Option<Vec<Rational>> {
    let n = m.dim();
    let scale = 1.0 + approx.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut box_poly = RationalPolyhedron::space(n);
    for (i, b) in bound.iter().enumerate() {
        let mut a = vector::unit::<Rational>(n, i);
        let mut rhs = b.clone();
        if dir == Direction::Up {
            a = a.iter().map(|x| -x.clone()).collect();
            rhs = -rhs;
        }
        box_poly.inequalities.push((a, rhs));
    }
    let objective: Vec<Rational> = (0..n)
        .map(|_| match dir {
            Direction::Down => Rational::one(),
            Direction::Up => -Rational::one(),
        })
        .collect();
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for sel in selections(&near_active(m, approx)?)? {
        let poly = polyhedra::selection_polyhedron(m, lambda, &sel).ok()?.intersect(&box_poly);
        if let LpOutcome::Optimal { point, value } = lp::maximize(&poly, &objective) {
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, point));
            }
        }
    }
    let (_, point) = best?;
    let close = point
        .iter()
        .zip(approx)
        .all(|(p, a)| (p.to_f64() - a).abs() <= 1e-6 * scale);
    let exact = verify_eigenpair(m, lambda, &point, &Rational::zero()).0;
    let certified = match dir {
        // The greatest eigenvector below a super-eigenvector agrees with it
        // on the critical nodes.
        Direction::Down => critical::critical_data(m, &point, lambda, &Rational::zero())
            .is_ok_and(|cd| cd.nodes.iter().all(|&i| point[i] == bound[i])),
        Direction::Up => close,
    };
    (exact && certified).then_some(point)
}

/// A periodic orbit of `g = f − λ` reached from `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitResult<S> {
    pub period: usize,
    pub points: Vec<Vec<S>>,
    /// `max_i |g(points[i]) − points[i+1 mod period]|_∞`.
    pub residual: S,
    /// Step `k` at which `|g^{k}(x) − g^{k−c}(x)|_∞ ≤ tol` first held.
    pub detection_step: usize,
    pub detection_gap: S,
}

fn divisors(c: usize) -> Vec<usize> {
    (1..=c).filter(|d| c.is_multiple_of(*d)).collect()
}

/// Iterates `g` until the orbit repeats with period dividing
/// `cycle_bound`, then finds the smallest such period.
pub fn periodic_limit<S: Scalar>(
    m: &MapModel<S>,
    lambda: &S,
    x: &[S],
    cycle_bound: usize,
    tol: &S,
    max_iter: usize,
) -> Result<OrbitResult<S>> {
    check_dim(m, x)?;
    let c = cycle_bound.max(1);
    let g = |y: &[S]| m.eval_shifted(y, lambda);
    let mut window: alloc::collections::VecDeque<Vec<S>> = alloc::collections::VecDeque::with_capacity(c + 1);
    window.push_back(x.to_vec());
    let mut step = 0usize;
    let mut gap = S::zero();
    loop {
        if window.len() == c + 1 {
            gap = vector::sup_dist(window.back().unwrap(), window.front().unwrap());
            if gap <= *tol {
                break;
            }
            window.pop_front();
        }
        if step >= max_iter {
            return Err(Error::MaxIterations {
                max_iter,
                residual: gap.to_f64(),
            });
        }
        let next = g(window.back().unwrap());
        window.push_back(next);
        step += 1;
    }
    let detection_step = step;
    let detection_gap = gap;

    // Continue from the detection point to test the proper divisors.
    let budget = detection_step.max(64);
    let mut seq: Vec<Vec<S>> = vec![window.back().unwrap().clone()];
    let mut period = c;
    let mut start = 0usize;
    'divisors: for d in divisors(c).into_iter().filter(|&d| d < c) {
        for j in 0..=budget {
            while seq.len() <= j + d {
                let next = g(seq.last().unwrap());
                seq.push(next);
            }
            if vector::sup_dist(&seq[j + d], &seq[j]) <= *tol {
                period = d;
                start = j;
                break 'divisors;
            }
        }
    }
    while seq.len() < start + period {
        let next = g(seq.last().unwrap());
        seq.push(next);
    }
    let points: Vec<Vec<S>> = seq[start..start + period].to_vec();
    let residual = (0..period)
        .map(|i| vector::sup_dist(&g(&points[i]), &points[(i + 1) % period]))
        .fold(S::zero(), S::max_of);
    Ok(OrbitResult {
        period,
        points,
        residual,
        detection_step,
        detection_gap,
    })
}

fn require_fixed<S: Scalar>(m: &MapModel<S>, lambda: &S, x: &[S], tol: &S) -> Result<()> {
    check_dim(m, x)?;
    if verify_eigenpair(m, lambda, x, tol).0 {
        Ok(())
    } else {
        Err(Error::Precondition("argument is not a fixed point of f − λ".into()))
    }
}

/// Greatest fixed point of `f − λ` below both `x` and `y`.
pub fn lattice_meet<S: Scalar>(
    m: &MapModel<S>,
    lambda: &S,
    x: &[S],
    y: &[S],
    tol: &S,
    max_iter: usize,
) -> Result<Vec<S>> {
    require_fixed(m, lambda, x, tol)?;
    require_fixed(m, lambda, y, tol)?;
    Ok(monotone_limit(m, lambda, &vector::meet(x, y), Direction::Down, tol, max_iter)?.point)
}

/// Least fixed point of `f − λ` above both `x` and `y`.
pub fn lattice_join<S: Scalar>(
    m: &MapModel<S>,
    lambda: &S,
    x: &[S],
    y: &[S],
    tol: &S,
    max_iter: usize,
) -> Result<Vec<S>> {
    require_fixed(m, lambda, x, tol)?;
    require_fixed(m, lambda, y, tol)?;
    Ok(monotone_limit(m, lambda, &vector::join(x, y), Direction::Up, tol, max_iter)?.point)
}

/// Critical data of the multiplicative recession at 0 (a fixed point of
/// the recession). A single class there guarantees that `f` has an
/// eigenvector; more classes prove nothing.
pub fn recession_diagnostic<S: Scalar>(m: &MapModel<S>) -> Result<critical::CriticalData> {
    let rec = m.multiplicative_recession();
    let zero = vector::zeros::<S>(m.dim());
    critical::critical_data(&rec, &zero, &S::zero(), &S::structural_eps())
}
