#![allow(dead_code)]

use cmh_core::model::{Coordinate, Generator, MapModel};
use cmh_core::scalar::{Rational, Scalar};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub fn z(n: i64) -> Rational {
    Rational::from_i64(n)
}

pub fn qv(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| z(x)).collect()
}

/// Generator from `(numerator, denominator)` pairs and an integer offset.
pub fn gen(p: &[(i64, i64)], r: Rational) -> Generator<Rational> {
    Generator::new(p.iter().map(|&(a, b)| q(a, b)).collect(), r)
}

pub fn unit(n: usize, j: usize, r: Rational) -> Generator<Rational> {
    Generator::new(cmh_core::vector::unit(n, j), r)
}

/// Three-state example with critical classes {1,2} and {3}.
pub fn f1() -> MapModel<Rational> {
    MapModel::max_affine(vec![
        vec![
            gen(&[(1, 1), (0, 1), (0, 1)], z(0)),
            gen(&[(1, 2), (1, 2), (0, 1)], z(0)),
            gen(&[(0, 1), (0, 1), (1, 1)], z(-3)),
            gen(&[(1, 2), (0, 1), (1, 2)], z(0)),
        ],
        vec![
            gen(&[(0, 1), (1, 1), (0, 1)], z(0)),
            gen(&[(2, 3), (1, 3), (0, 1)], z(0)),
            gen(&[(1, 1), (0, 1), (0, 1)], z(-1)),
        ],
        vec![gen(&[(0, 1), (0, 1), (1, 1)], z(0)), gen(&[(1, 1), (0, 1), (0, 1)], z(-2))],
    ])
    .unwrap()
}

/// `(½(x1+x2), log(e^{x2} + 8e^{x3}), x1 ∨ (x3 − 1))`.
pub fn f2() -> MapModel<f64> {
    MapModel::new(vec![
        Coordinate::MaxAffine(vec![Generator::new(vec![0.5, 0.5, 0.0], 0.0)]),
        Coordinate::LogSumExp(vec![0.0, 1.0, 8.0]),
        Coordinate::MaxAffine(vec![
            Generator::new(vec![1.0, 0.0, 0.0], 0.0),
            Generator::new(vec![0.0, 0.0, 1.0], -1.0),
        ]),
    ])
    .unwrap()
}

pub fn f2_eigenvector() -> Vec<f64> {
    let l = std::f64::consts::LN_2;
    vec![l, 3.0 * l, 0.0]
}

/// `(x2 ∨ x3, x2, x3)`.
pub fn f3() -> MapModel<Rational> {
    MapModel::max_affine(vec![
        vec![unit(3, 1, z(0)), unit(3, 2, z(0))],
        vec![unit(3, 1, z(0))],
        vec![unit(3, 2, z(0))],
    ])
    .unwrap()
}

/// Cyclic example with unit constants: critical graph is a 2-cycle on
/// {1,2} plus a loop at 3.
pub fn f4() -> MapModel<Rational> {
    MapModel::max_affine(vec![
        vec![unit(3, 1, z(0)), gen(&[(1, 2), (0, 1), (1, 2)], z(-1))],
        vec![unit(3, 0, z(0)), gen(&[(0, 1), (1, 2), (1, 2)], z(-1))],
        vec![unit(3, 2, z(0)), gen(&[(1, 2), (1, 2), (0, 1)], z(-1))],
    ])
    .unwrap()
}

/// `(x2, x2 ∨ x3, x3)`.
pub fn ex_f4() -> MapModel<Rational> {
    MapModel::max_affine(vec![
        vec![unit(3, 1, z(0))],
        vec![unit(3, 1, z(0)), unit(3, 2, z(0))],
        vec![unit(3, 2, z(0))],
    ])
    .unwrap()
}

/// `(x1 ∨ x2, x1 ∨ x2)`.
pub fn moreau_k() -> MapModel<Rational> {
    let row = vec![unit(2, 0, z(0)), unit(2, 1, z(0))];
    MapModel::max_affine(vec![row.clone(), row]).unwrap()
}

const WEIGHT_GRID: [(i64, i64); 5] = [(1, 4), (1, 3), (1, 2), (2, 3), (1, 1)];
const OFFSET_GRID: [(i64, i64); 3] = [(0, 1), (-1, 2), (-1, 1)];

/// Stochastic row with support of size 1 to 3 and grid weights.
pub fn random_row<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let k = rng.gen_range(1..=n.min(3));
    let mut p = vec![z(0); n];
    for &j in &idx[..k] {
        let (a, b) = WEIGHT_GRID[rng.gen_range(0..WEIGHT_GRID.len())];
        p[j] = q(a, b);
    }
    let s: Rational = p.iter().fold(z(0), |acc, x| acc + x.clone());
    p.into_iter().map(|x| x / s.clone()).collect()
}

/// Pure max-affine model with `f(0) = 0`: n ≤ `max_n`, ≤ 3 generators per
/// row, offsets shifted so each row's largest offset is zero.
pub fn random_model<R: Rng>(rng: &mut R, max_n: usize) -> MapModel<Rational> {
    let n = rng.gen_range(1..=max_n);
    let rows = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let mut gens: Vec<Generator<Rational>> = (0..k)
                .map(|_| {
                    let (a, b) = OFFSET_GRID[rng.gen_range(0..OFFSET_GRID.len())];
                    Generator::new(random_row(rng, n), q(a, b))
                })
                .collect();
            let top = gens.iter().map(|g| g.r.clone()).fold(z(-100), Rational::max_of);
            for g in gens.iter_mut() {
                g.r = g.r.clone() - top.clone();
            }
            gens
        })
        .collect();
    MapModel::max_affine(rows).unwrap()
}

/// Random rational vector with entries in `[-span, span]` on a 1/4 grid.
pub fn random_vec<R: Rng>(rng: &mut R, n: usize, span: i64) -> Vec<Rational> {
    (0..n).map(|_| q(rng.gen_range(-4 * span..=4 * span), 4)).collect()
}

pub fn random_fvec<R: Rng>(rng: &mut R, n: usize, span: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-span..=span)).collect()
}

pub fn to_f(v: &[Rational]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}
