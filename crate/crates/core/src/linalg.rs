//! Dense Gaussian elimination: solves, rank and null spaces.
//!
//! Exact mode pivots on the first nonzero entry; float mode uses partial
//! pivoting and treats entries below a relative threshold as zero.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar};
use crate::vector;

fn pivot_row<S: Scalar>(rows: &[Vec<S>], col: usize, from: usize, eps: &S) -> Option<usize> {
    match S::MODE {
        Mode::Exact => (from..rows.len()).find(|&r| !rows[r][col].is_zero()),
        Mode::Float => {
            let mut best: Option<(usize, S)> = None;
            for (r, row) in rows.iter().enumerate().skip(from) {
                let a = row[col].abs();
                if a > *eps && best.as_ref().is_none_or(|(_, b)| a > *b) {
                    best = Some((r, a));
                }
            }
            best.map(|(r, _)| r)
        }
    }
}

fn float_eps<S: Scalar>(rows: &[Vec<S>]) -> S {
    match S::MODE {
        Mode::Exact => S::zero(),
        Mode::Float => {
            let scale = rows
                .iter()
                .flat_map(|r| r.iter())
                .map(|x| x.abs())
                .fold(S::one(), S::max_of);
            S::from_f64(1e-10).unwrap_or_else(S::zero) * scale
        }
    }
}

/// Reduce `rows` to reduced row echelon form in place; returns pivot columns.
pub fn rref<S: Scalar>(rows: &mut [Vec<S>], ncols: usize) -> Vec<usize> {
    let eps = float_eps(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= rows.len() {
            break;
        }
        let Some(p) = pivot_row(rows, c, r, &eps) else {
            continue;
        };
        rows.swap(r, p);
        let inv = S::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone();
            for j in 0..rows[i].len() {
                let delta = factor.clone() * rows[r][j].clone();
                rows[i][j] = rows[i][j].clone() - delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a list of row vectors of length `ncols`.
pub fn rank<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{x : A x = 0}` for `A` given by rows of length `ncols`.
pub fn null_space<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vector::zeros::<S>(ncols);
            v[f] = S::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solve the square system `A x = b`.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Result<Vec<S>> {
    let n = a.len();
    let mut aug: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, n);
    if pivots.len() < n {
        return Err(Error::Singular);
    }
    let x: Vec<S> = aug.iter().map(|r| r[n].clone()).collect();
    if S::MODE == Mode::Float {
        let residual = a
            .iter()
            .zip(b)
            .map(|(row, bi)| (vector::dot(row, &x) - bi.clone()).abs())
            .fold(S::zero(), S::max_of);
        if residual.to_f64() > 1e-10 {
            return Err(Error::Singular);
        }
    }
    Ok(x)
}
