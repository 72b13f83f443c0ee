#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use cmh::format::{self, AnyMdp, AnyModel};
use cmh_core::mdp::MdpModel;
use cmh_core::model::{Generator, MapModel};
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

pub fn fixture_path(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect()
}

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap()
}

pub fn exact_fixture(name: &str) -> MapModel<Rational> {
    let text = String::from_utf8(fixture_bytes(name)).unwrap();
    match format::parse_model(&text, None).unwrap() {
        AnyModel::Exact(m) => m,
        AnyModel::Float(_) => panic!("{name} is not exact"),
    }
}

pub fn float_fixture(name: &str) -> MapModel<f64> {
    let text = String::from_utf8(fixture_bytes(name)).unwrap();
    match format::parse_model(&text, None).unwrap() {
        AnyModel::Float(m) => m,
        AnyModel::Exact(m) => m.to_float(),
    }
}

pub fn exact_mdp(name: &str) -> MdpModel<Rational> {
    let text = String::from_utf8(fixture_bytes(name)).unwrap();
    match format::parse_mdp(&text, None).unwrap() {
        AnyMdp::Exact(m) => m,
        AnyMdp::Float(_) => panic!("{name} is not exact"),
    }
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

pub fn random_stochastic<R: Rng>(rng: &mut R, max_n: usize) -> Vec<Vec<Rational>> {
    let n = rng.gen_range(1..=max_n);
    (0..n).map(|_| random_row(rng, n)).collect()
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

/// Runs one acceptance check, prints its verdict line straight to the
/// process stdout so it survives test capture, then fails the test if the
/// check or its time limit failed.
pub fn criterion(number: usize, title: &str, limit: Duration, check: impl FnOnce() -> Result<(), String>) {
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let verdict = match &result {
        Ok(()) if elapsed <= limit => Ok(()),
        Ok(()) => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
        Err(e) => Err(e.clone()),
    };
    let line = match &verdict {
        Ok(()) => format!("PASS criterion {number:>2}: {title} ({elapsed:.2?})"),
        Err(e) => format!("FAIL criterion {number:>2}: {title} ({elapsed:.2?}): {e}"),
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
    if let Err(e) = verdict {
        panic!("criterion {number}: {e}");
    }
}

#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}
