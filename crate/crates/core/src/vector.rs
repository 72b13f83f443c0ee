//! Small dense-vector helpers.

use alloc::vec::Vec;

use crate::scalar::Scalar;

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sum<S: Scalar>(a: &[S]) -> S {
    a.iter().fold(S::zero(), |acc, x| acc + x.clone())
}

pub fn add_scalar<S: Scalar>(a: &[S], c: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() + c.clone()).collect()
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale<S: Scalar>(a: &[S], c: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

pub fn meet<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| S::min_of(x.clone(), y.clone()))
        .collect()
}

pub fn join<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter()
        .zip(b)
        .map(|(x, y)| S::max_of(x.clone(), y.clone()))
        .collect()
}

pub fn max_entry<S: Scalar>(a: &[S]) -> Option<S> {
    a.iter().cloned().reduce(S::max_of)
}

pub fn min_entry<S: Scalar>(a: &[S]) -> Option<S> {
    a.iter().cloned().reduce(S::min_of)
}

/// `|a - b|_∞`; zero for empty vectors.
pub fn sup_dist<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.clone() - y.clone()).abs())
        .fold(S::zero(), S::max_of)
}

/// Componentwise `a <= b + slack`.
pub fn leq<S: Scalar>(a: &[S], b: &[S], slack: &S) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| *x <= y.clone() + slack.clone())
}

/// Restrict a vector to the listed (0-based) indices.
pub fn restrict<S: Scalar>(a: &[S], idx: &[usize]) -> Vec<S> {
    idx.iter().map(|&i| a[i].clone()).collect()
}

pub fn zeros<S: Scalar>(n: usize) -> Vec<S> {
    (0..n).map(|_| S::zero()).collect()
}

pub fn unit<S: Scalar>(n: usize, j: usize) -> Vec<S> {
    (0..n)
        .map(|i| if i == j { S::one() } else { S::zero() })
        .collect()
}
