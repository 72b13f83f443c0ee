//! Convex monotone (sub)homogeneous maps given coordinate-wise, and their
//! calculus: evaluation, subdifferentials, derivatives, recessions,
//! restriction, lifting and composition.

use core::cmp::Ordering;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::DiGraph;
use crate::scalar::{Mode, Scalar};
use crate::vector;

/// Default ceiling on generators produced by [`compose`] before deduplication.
pub const DEFAULT_COMPOSE_CAP: usize = 1_000_000;

/// One affine piece `x ↦ p·x + r` of a max-affine coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator<S> {
    pub p: Vec<S>,
    pub r: S,
}

impl<S: Scalar> Generator<S> {
    pub fn new(p: Vec<S>, r: S) -> Self {
        Generator { p, r }
    }

    pub fn value(&self, x: &[S]) -> S {
        vector::dot(&self.p, x) + self.r.clone()
    }

    pub fn row_sum(&self) -> S {
        vector::sum(&self.p)
    }

    /// Row sum equal to one (up to the structural slack in float mode).
    pub fn is_stochastic(&self) -> bool {
        self.row_sum().near(&S::one())
    }

    fn map<T: Scalar>(&self, f: &impl Fn(&S) -> T) -> Generator<T> {
        Generator {
            p: self.p.iter().map(f).collect(),
            r: f(&self.r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coordinate<S> {
    /// `max_k (p_k·x + r_k)` over a nonempty generator list.
    MaxAffine(Vec<Generator<S>>),
    /// `log Σ_j w_j e^{x_j}`; float mode only.
    LogSumExp(Vec<S>),
}

impl<S: Scalar> Coordinate<S> {
    pub fn eval(&self, x: &[S]) -> S {
        match self {
            Coordinate::MaxAffine(gens) => gens
                .iter()
                .map(|g| g.value(x))
                .reduce(S::max_of)
                .expect("validated coordinate has generators"),
            Coordinate::LogSumExp(w) => {
                S::log_sum_exp(w, x).expect("validated log_sum_exp row in float mode")
            }
        }
    }

    pub fn generators(&self) -> Option<&[Generator<S>]> {
        match self {
            Coordinate::MaxAffine(g) => Some(g),
            Coordinate::LogSumExp(_) => None,
        }
    }

    fn is_homogeneous(&self) -> bool {
        match self {
            Coordinate::MaxAffine(gens) => gens.iter().all(Generator::is_stochastic),
            Coordinate::LogSumExp(_) => true,
        }
    }

    fn map<T: Scalar>(&self, f: &impl Fn(&S) -> T) -> Coordinate<T> {
        match self {
            Coordinate::MaxAffine(gens) => Coordinate::MaxAffine(gens.iter().map(|g| g.map(f)).collect()),
            Coordinate::LogSumExp(w) => Coordinate::LogSumExp(w.iter().map(f).collect()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Homogeneity {
    Homogeneous,
    Subhomogeneous,
}

/// A validated map `R^n → R^n`. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MapModel<S> {
    coordinates: Vec<Coordinate<S>>,
    homogeneity: Homogeneity,
}

/// Per-row lists of (sub)stochastic vectors; denotes the convex hull of
/// the product of the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RectangularSet<S> {
    pub rows: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> RectangularSet<S> {
    pub fn new(rows: Vec<Vec<Vec<S>>>) -> Self {
        RectangularSet { rows }
    }

    /// The singleton set `{P}`.
    pub fn from_matrix(p: &[Vec<S>]) -> Self {
        RectangularSet {
            rows: p.iter().map(|row| vec![row.clone()]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Support function `Σ_i max_{p ∈ row i} p·y_i` evaluated row-wise.
    pub fn support(&self, y: &[S]) -> Vec<S> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| vector::dot(p, y))
                    .reduce(S::max_of)
                    .unwrap_or_else(S::zero)
            })
            .collect()
    }
}

/// Checks every structural invariant; the first offender is reported.
pub fn validate_model<S: Scalar>(coordinates: &[Coordinate<S>]) -> Result<()> {
    let n = coordinates.len();
    for (i, coord) in coordinates.iter().enumerate() {
        let coordinate = i + 1;
        match coord {
            Coordinate::MaxAffine(gens) => {
                if gens.is_empty() {
                    return Err(Error::EmptyCoordinate { coordinate });
                }
                for (k, g) in gens.iter().enumerate() {
                    let generator = k + 1;
                    if g.p.len() != n {
                        return Err(Error::WrongLength {
                            coordinate,
                            generator,
                            expected: n,
                            found: g.p.len(),
                        });
                    }
                    if !g.r.is_finite() || g.p.iter().any(|x| !x.is_finite()) {
                        return Err(Error::NonFinite { coordinate });
                    }
                    if let Some(j) = g.p.iter().position(|x| *x < S::zero()) {
                        return Err(Error::NegativeEntry {
                            coordinate,
                            generator,
                            entry: j + 1,
                        });
                    }
                    let s = g.row_sum();
                    if s > S::one() + S::structural_eps() {
                        return Err(Error::RowSum {
                            coordinate,
                            generator,
                            sum: format!("{s}"),
                        });
                    }
                }
            }
            Coordinate::LogSumExp(w) => {
                if S::MODE == Mode::Exact {
                    return Err(Error::LogSumExpInExactMode { coordinate });
                }
                if w.len() != n {
                    return Err(Error::WrongLength {
                        coordinate,
                        generator: 1,
                        expected: n,
                        found: w.len(),
                    });
                }
                if w.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { coordinate });
                }
                if let Some(j) = w.iter().position(|x| *x < S::zero()) {
                    return Err(Error::NegativeEntry {
                        coordinate,
                        generator: 1,
                        entry: j + 1,
                    });
                }
                if !w.iter().any(|x| *x > S::zero()) {
                    return Err(Error::EmptySupport { coordinate });
                }
            }
        }
    }
    Ok(())
}

impl<S: Scalar> MapModel<S> {
    /// Validates the coordinates and infers homogeneity.
    pub fn new(coordinates: Vec<Coordinate<S>>) -> Result<Self> {
        validate_model(&coordinates)?;
        let homogeneity = if coordinates.iter().all(Coordinate::is_homogeneous) {
            Homogeneity::Homogeneous
        } else {
            Homogeneity::Subhomogeneous
        };
        Ok(MapModel {
            coordinates,
            homogeneity,
        })
    }

    /// Convenience constructor for pure max-affine models.
    pub fn max_affine(rows: Vec<Vec<Generator<S>>>) -> Result<Self> {
        Self::new(rows.into_iter().map(Coordinate::MaxAffine).collect())
    }

    /// The linear map `x ↦ P x`.
    pub fn linear(p: &[Vec<S>]) -> Result<Self> {
        Self::max_affine(
            p.iter()
                .map(|row| vec![Generator::new(row.clone(), S::zero())])
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(&(0..n).map(|i| vector::unit(n, i)).collect::<Vec<_>>())
            .expect("identity is valid")
    }

    pub fn dim(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinates(&self) -> &[Coordinate<S>] {
        &self.coordinates
    }

    pub fn homogeneity(&self) -> Homogeneity {
        self.homogeneity
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    pub fn is_pure_max_affine(&self) -> bool {
        self.coordinates
            .iter()
            .all(|c| matches!(c, Coordinate::MaxAffine(_)))
    }

    /// Generator lists, or the first log-sum-exp coordinate as an error.
    pub fn generator_rows(&self) -> Result<Vec<&[Generator<S>]>> {
        self.coordinates
            .iter()
            .enumerate()
            .map(|(i, c)| c.generators().ok_or(Error::LogSumExpUnsupported { coordinate: i + 1 }))
            .collect()
    }

    fn check_len(&self, x: &[S]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            })
        }
    }

    /// `f(x)`. Panics if `x` has the wrong length.
    pub fn eval(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.dim(), "eval: dimension mismatch");
        self.coordinates.iter().map(|c| c.eval(x)).collect()
    }

    /// `f(x) − λ`.
    pub fn eval_shifted(&self, x: &[S], lambda: &S) -> Vec<S> {
        vector::add_scalar(&self.eval(x), &-lambda.clone())
    }

    /// `f^k(x)`.
    pub fn iterate(&self, x: &[S], k: usize) -> Vec<S> {
        (0..k).fold(x.to_vec(), |y, _| self.eval(&y))
    }

    /// Indices of the generators active at `v` for each max-affine row
    /// (`None` for log-sum-exp rows). Exact mode ignores `tol`.
    pub fn active_indices(&self, v: &[S], tol: &S) -> Result<Vec<Option<Vec<usize>>>> {
        self.check_len(v)?;
        let tol = match S::MODE {
            Mode::Exact => S::zero(),
            Mode::Float => tol.clone(),
        };
        self.coordinates
            .iter()
            .enumerate()
            .map(|(i, c)| match c {
                Coordinate::MaxAffine(gens) => {
                    let values: Vec<S> = gens.iter().map(|g| g.value(v)).collect();
                    let top = values.iter().cloned().reduce(S::max_of).expect("nonempty");
                    let active: Vec<usize> = values
                        .iter()
                        .enumerate()
                        .filter(|(_, val)| (top.clone() - (*val).clone()).abs() <= tol)
                        .map(|(k, _)| k)
                        .collect();
                    if active.is_empty() {
                        Err(Error::EmptyActiveSet { coordinate: i + 1 })
                    } else {
                        Ok(Some(active))
                    }
                }
                Coordinate::LogSumExp(_) => Ok(None),
            })
            .collect()
    }

    /// Generators of `∂f(v)`: the active rows of each coordinate, or the
    /// gradient for log-sum-exp coordinates.
    pub fn subdiff_generators(&self, v: &[S], tol: &S) -> Result<RectangularSet<S>> {
        let active = self.active_indices(v, tol)?;
        let rows = self
            .coordinates
            .iter()
            .zip(active)
            .enumerate()
            .map(|(i, (c, act))| match (c, act) {
                (Coordinate::MaxAffine(gens), Some(idx)) => Ok(idx.into_iter().map(|k| gens[k].p.clone()).collect()),
                (Coordinate::LogSumExp(w), _) => S::log_sum_exp_gradient(w, v)
                    .map(|g| vec![g])
                    .ok_or(Error::EmptyActiveSet { coordinate: i + 1 }),
                _ => unreachable!("active set shape follows coordinate kind"),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RectangularSet { rows })
    }

    /// `y ↦ max_{p ∈ ∂f_i(v)} p·y`, as a max-affine model with zero offsets.
    pub fn directional_derivative(&self, v: &[S], tol: &S) -> Result<MapModel<S>> {
        let rect = self.subdiff_generators(v, tol)?;
        MapModel::max_affine(
            rect.rows
                .into_iter()
                .map(|row| dedup_rows(row.into_iter().map(|p| Generator::new(p, S::zero())).collect()))
                .collect(),
        )
    }

    /// `lim −ρ + f(ρ + y)`; rows without a stochastic generator are `None`
    /// (the limit is −∞ there).
    pub fn additive_recession(&self) -> AdditiveRecession<S> {
        AdditiveRecession {
            rows: self
                .coordinates
                .iter()
                .map(|c| match c {
                    Coordinate::MaxAffine(gens) => {
                        let kept: Vec<Generator<S>> = gens.iter().filter(|g| g.is_stochastic()).cloned().collect();
                        (!kept.is_empty()).then_some(Coordinate::MaxAffine(kept))
                    }
                    lse => Some(lse.clone()),
                })
                .collect(),
        }
    }

    /// `lim μ⁻¹ f(μ x)`: offsets dropped, log-sum-exp rows become the max
    /// over their support.
    pub fn multiplicative_recession(&self) -> MapModel<S> {
        let n = self.dim();
        let coords = self
            .coordinates
            .iter()
            .map(|c| match c {
                Coordinate::MaxAffine(gens) => Coordinate::MaxAffine(dedup_rows(
                    gens.iter().map(|g| Generator::new(g.p.clone(), S::zero())).collect(),
                )),
                Coordinate::LogSumExp(w) => Coordinate::MaxAffine(
                    w.iter()
                        .enumerate()
                        .filter(|(_, x)| **x > S::zero())
                        .map(|(j, _)| Generator::new(vector::unit(n, j), S::zero()))
                        .collect(),
                ),
            })
            .collect();
        MapModel::new(coords).expect("recession of a valid model is valid")
    }

    /// `f_NN = r_N ∘ f ∘ i_N`: coordinates in `nodes`, other inputs fixed at 0.
    pub fn restrict(&self, nodes: &[usize]) -> Result<MapModel<S>> {
        let nodes = normalize_nodes(nodes, self.dim())?;
        let coords = nodes
            .iter()
            .map(|&i| match &self.coordinates[i] {
                Coordinate::MaxAffine(gens) => Ok(Coordinate::MaxAffine(
                    gens.iter()
                        .map(|g| Generator::new(vector::restrict(&g.p, &nodes), g.r.clone()))
                        .collect(),
                )),
                Coordinate::LogSumExp(w) => {
                    let rw = vector::restrict(w, &nodes);
                    if rw.iter().any(|x| *x > S::zero()) {
                        Ok(Coordinate::LogSumExp(rw))
                    } else {
                        Err(Error::DisjointSupport { coordinate: i + 1 })
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        MapModel::new(coords)
    }

    /// Homogeneous map on `n+1` coordinates whose eigenvectors `(z, 0)` with
    /// eigenvalue 0 are exactly the fixed points `z` of `self`.
    pub fn lift_subhomogeneous(&self) -> MapModel<S> {
        let n = self.dim();
        let mut coords: Vec<Coordinate<S>> = self
            .coordinates
            .iter()
            .map(|c| match c {
                Coordinate::MaxAffine(gens) => Coordinate::MaxAffine(
                    gens.iter()
                        .map(|g| {
                            let mut p = g.p.clone();
                            let deficit = S::one() - g.row_sum();
                            p.push(if deficit.is_positive() { deficit } else { S::zero() });
                            Generator::new(p, g.r.clone())
                        })
                        .collect(),
                ),
                Coordinate::LogSumExp(w) => {
                    let mut w = w.clone();
                    w.push(S::zero());
                    Coordinate::LogSumExp(w)
                }
            })
            .collect();
        coords.push(Coordinate::MaxAffine(vec![Generator::new(vector::unit(n + 1, n), S::zero())]));
        MapModel::new(coords).expect("lift of a valid model is valid")
    }

    /// Adds `c` to every coordinate: `x ↦ f(x) + c`.
    pub fn shift(&self, c: &S) -> Result<MapModel<S>> {
        let coords = self
            .coordinates
            .iter()
            .map(|coord| match coord {
                Coordinate::MaxAffine(gens) => Coordinate::MaxAffine(
                    gens.iter()
                        .map(|g| Generator::new(g.p.clone(), g.r.clone() + c.clone()))
                        .collect(),
                ),
                Coordinate::LogSumExp(w) => {
                    let factor = S::from_f64(libm::exp(c.to_f64())).unwrap_or_else(S::one);
                    Coordinate::LogSumExp(vector::scale(w, &factor))
                }
            })
            .collect();
        MapModel::new(coords)
    }

    /// Graph with an arc `i → j` iff `f_i(ν e_j) → +∞`.
    pub fn graph(&self) -> DiGraph {
        let n = self.dim();
        let mut g = DiGraph::full(n);
        for (i, c) in self.coordinates.iter().enumerate() {
            match c {
                Coordinate::MaxAffine(gens) => {
                    for gen in gens {
                        for (j, x) in gen.p.iter().enumerate() {
                            if *x > S::zero() {
                                g.add_arc(i, j);
                            }
                        }
                    }
                }
                Coordinate::LogSumExp(w) => {
                    for (j, x) in w.iter().enumerate() {
                        if *x > S::zero() {
                            g.add_arc(i, j);
                        }
                    }
                }
            }
        }
        g
    }

    /// Same model with every scalar converted.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Result<MapModel<T>> {
        MapModel::new(self.coordinates.iter().map(|c| c.map(&f)).collect())
    }

    /// Float shadow of the model.
    pub fn to_float(&self) -> MapModel<f64> {
        let coords = self.coordinates.iter().map(|c| c.map(&|x: &S| x.to_f64())).collect();
        // Rounding may push a row sum a hair above one; validation allows
        // the structural slack.
        MapModel::new(coords).expect("float image of a valid model is valid")
    }
}

/// Result of [`MapModel::additive_recession`].
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveRecession<S> {
    pub rows: Vec<Option<Coordinate<S>>>,
}

impl<S: Scalar> AdditiveRecession<S> {
    /// Row values, `None` where the limit is −∞.
    pub fn eval(&self, y: &[S]) -> Vec<Option<S>> {
        self.rows.iter().map(|r| r.as_ref().map(|c| c.eval(y))).collect()
    }

    /// The recession as a model when no row is −∞.
    pub fn into_model(self) -> Option<MapModel<S>> {
        let coords: Option<Vec<_>> = self.rows.into_iter().collect();
        coords.and_then(|c| MapModel::new(c).ok())
    }
}

pub(crate) fn normalize_nodes(nodes: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut sorted = nodes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() {
        return Err(Error::InvalidNodeSet("empty".into()));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidNodeSet(format!("node {} outside 1..{n}", bad + 1)));
    }
    Ok(sorted)
}

/// Keeps one generator per slope vector, with the largest offset, in
/// order of first occurrence.
pub fn dedup_rows<S: Scalar>(gens: Vec<Generator<S>>) -> Vec<Generator<S>> {
    let lex = |a: &[S], b: &[S]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    };
    let mut order: Vec<usize> = (0..gens.len()).collect();
    order.sort_by(|&a, &b| lex(&gens[a].p, &gens[b].p).then(a.cmp(&b)));

    // Representative (first occurrence) of each run of equal slopes.
    let mut keep: Vec<Option<S>> = vec![None; gens.len()];
    let mut start = 0;
    while start < order.len() {
        let head = order[start];
        let mut end = start + 1;
        while end < order.len() && gens[order[end]].p.iter().zip(&gens[head].p).all(|(a, b)| a.near(b)) {
            end += 1;
        }
        let first = order[start..end].iter().copied().min().unwrap();
        let best = order[start..end]
            .iter()
            .map(|&k| gens[k].r.clone())
            .fold(gens[first].r.clone(), S::max_of);
        keep[first] = Some(best);
        start = end;
    }
    gens.into_iter()
        .zip(keep)
        .filter_map(|(g, r)| r.map(|r| Generator::new(g.p, r)))
        .collect()
}

/// `f1 ∘ f2` for pure max-affine models of the same dimension.
pub fn compose<S: Scalar>(m1: &MapModel<S>, m2: &MapModel<S>, cap: usize) -> Result<MapModel<S>> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch {
            expected: m1.dim(),
            found: m2.dim(),
        });
    }
    let outer = m1.generator_rows()?;
    let inner = m2.generator_rows()?;
    let n = m1.dim();

    let mut needed: usize = 0;
    for row in &outer {
        for g in row.iter() {
            let count = g
                .p
                .iter()
                .enumerate()
                .filter(|(_, x)| **x > S::zero())
                .fold(1usize, |acc, (j, _)| acc.saturating_mul(inner[j].len()));
            needed = needed.saturating_add(count);
        }
    }
    if needed > cap {
        return Err(Error::CapExceeded { cap, needed });
    }

    let rows = outer
        .iter()
        .map(|row| {
            let mut produced = Vec::new();
            for g in row.iter() {
                let support: Vec<usize> = (0..n).filter(|&j| g.p[j] > S::zero()).collect();
                let mut choice = vec![0usize; support.len()];
                loop {
                    let mut p = vector::zeros::<S>(n);
                    let mut r = g.r.clone();
                    for (slot, &j) in support.iter().enumerate() {
                        let h = &inner[j][choice[slot]];
                        let w = g.p[j].clone();
                        for (pk, hk) in p.iter_mut().zip(&h.p) {
                            if !hk.is_zero() {
                                *pk = pk.clone() + w.clone() * hk.clone();
                            }
                        }
                        r = r + w * h.r.clone();
                    }
                    produced.push(Generator::new(p, r));
                    if !advance(&mut choice, |slot| inner[support[slot]].len()) {
                        break;
                    }
                }
            }
            dedup_rows(produced)
        })
        .collect();
    MapModel::max_affine(rows)
}

/// `f^k` as a max-affine model; `k = 0` gives the identity.
pub fn power<S: Scalar>(m: &MapModel<S>, k: usize, cap: usize) -> Result<MapModel<S>> {
    m.generator_rows()?;
    let mut acc = MapModel::identity(m.dim());
    for _ in 0..k {
        acc = compose(&acc, m, cap)?;
    }
    Ok(acc)
}

/// Odometer increment over mixed radices; false once it wraps around.
pub(crate) fn advance(choice: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for slot in (0..choice.len()).rev() {
        choice[slot] += 1;
        if choice[slot] < radix(slot) {
            return true;
        }
        choice[slot] = 0;
    }
    false
}
