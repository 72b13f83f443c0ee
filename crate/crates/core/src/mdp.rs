//! Finite Markov decision processes with the average-reward criterion:
//! conversion to a max-affine map, policy evaluation, brute-force optimal
//! value and the optimal-class certificate at a bias vector.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::critical;
use crate::error::{Error, Result};
use crate::markov;
use crate::model::{advance, Generator, MapModel};
use crate::scalar::Scalar;
use crate::vector;

/// Default ceiling on deterministic policies enumerated.
pub const DEFAULT_POLICY_CAP: usize = 100_000;
const SUBSET_ENUMERATION_LIMIT: usize = 1 << 10;
const SUBSET_SAMPLES: usize = 256;
const SAMPLING_SEED: u64 = 0x5e_ed0f_c0de;

#[derive(Debug, Clone, PartialEq)]
pub struct Action<S> {
    pub name: String,
    pub reward: S,
    pub transition: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MdpModel<S> {
    states: Vec<String>,
    actions: Vec<Vec<Action<S>>>,
}

/// A stationary policy.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy<S> {
    /// One action index per state.
    Deterministic(Vec<usize>),
    /// Convex weights over each state's actions.
    Randomized(Vec<Vec<S>>),
}

impl<S: Scalar> MdpModel<S> {
    pub fn new(states: Vec<String>, actions: Vec<Vec<Action<S>>>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::InvalidMdp("no states".into()));
        }
        if actions.len() != n {
            return Err(Error::InvalidMdp(format!("{} states but {} action lists", n, actions.len())));
        }
        for (i, list) in actions.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::InvalidMdp(format!("state {} has no actions", states[i])));
            }
            for a in list {
                let where_ = || format!("state {}, action {}", states[i], a.name);
                if a.transition.len() != n {
                    return Err(Error::InvalidMdp(format!("{}: transition has {} entries", where_(), a.transition.len())));
                }
                if !a.reward.is_finite() || a.transition.iter().any(|x| !x.is_finite() || *x < S::zero()) {
                    return Err(Error::InvalidMdp(format!("{}: negative or non-finite value", where_())));
                }
                if !vector::sum(&a.transition).near(&S::one()) {
                    return Err(Error::InvalidMdp(format!("{}: transition does not sum to 1", where_())));
                }
            }
        }
        Ok(MdpModel { states, actions })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[Vec<Action<S>>] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `f_i(x) = max_a (r_i^a + P_i^a x)`, one generator per action.
    pub fn to_map(&self) -> MapModel<S> {
        MapModel::max_affine(
            self.actions
                .iter()
                .map(|list| {
                    list.iter()
                        .map(|a| Generator::new(a.transition.clone(), a.reward.clone()))
                        .collect()
                })
                .collect(),
        )
        .expect("validated MDP gives a valid map")
    }

    fn policy_weights(&self, policy: &Policy<S>) -> Result<Vec<Vec<S>>> {
        let n = self.len();
        match policy {
            Policy::Deterministic(choice) => {
                if choice.len() != n {
                    return Err(Error::InvalidPolicy(format!("{} choices for {n} states", choice.len())));
                }
                choice
                    .iter()
                    .enumerate()
                    .map(|(i, &a)| {
                        if a >= self.actions[i].len() {
                            return Err(Error::InvalidPolicy(format!(
                                "state {}: action {} out of range",
                                self.states[i],
                                a + 1
                            )));
                        }
                        let mut w = vector::zeros::<S>(self.actions[i].len());
                        w[a] = S::one();
                        Ok(w)
                    })
                    .collect()
            }
            Policy::Randomized(weights) => {
                if weights.len() != n {
                    return Err(Error::InvalidPolicy(format!("{} weight rows for {n} states", weights.len())));
                }
                for (i, w) in weights.iter().enumerate() {
                    if w.len() != self.actions[i].len()
                        || w.iter().any(|x| *x < S::zero())
                        || !vector::sum(w).near(&S::one())
                    {
                        return Err(Error::InvalidPolicy(format!(
                            "state {}: weights must be a probability vector over its actions",
                            self.states[i]
                        )));
                    }
                }
                Ok(weights.clone())
            }
        }
    }
}

/// The Markov chain and rewards induced by a policy, with its final
/// classes and mean rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyAnalysis<S> {
    pub matrix: Vec<Vec<S>>,
    pub reward: Vec<S>,
    pub final_classes: Vec<Vec<usize>>,
    /// `m_F · r_F` per final class, in the same order.
    pub class_values: Vec<S>,
    pub mean_reward: Vec<S>,
}

pub fn policy_analysis<S: Scalar>(mdp: &MdpModel<S>, policy: &Policy<S>) -> Result<PolicyAnalysis<S>> {
    let weights = mdp.policy_weights(policy)?;
    let n = mdp.len();
    let mut matrix = Vec::with_capacity(n);
    let mut reward = Vec::with_capacity(n);
    for (list, w) in mdp.actions.iter().zip(&weights) {
        let mut row = vector::zeros::<S>(n);
        let mut r = S::zero();
        for (a, wa) in list.iter().zip(w) {
            if wa.is_zero() {
                continue;
            }
            row = vector::add(&row, &vector::scale(&a.transition, wa));
            r = r + wa.clone() * a.reward.clone();
        }
        matrix.push(row);
        reward.push(r);
    }
    let final_classes = markov::final_classes(&matrix);
    let class_values = final_classes
        .iter()
        .map(|c| markov::class_value(&matrix, &reward, c))
        .collect::<Result<Vec<_>>>()?;
    let mean_reward = markov::mean_reward(&matrix, &reward)?;
    Ok(PolicyAnalysis {
        matrix,
        reward,
        final_classes,
        class_values,
        mean_reward,
    })
}

/// Largest mean reward over all deterministic policies and states.
pub fn brute_force_lambda<S: Scalar>(mdp: &MdpModel<S>, cap: usize) -> Result<S> {
    let sizes: Vec<usize> = mdp.actions.iter().map(Vec::len).collect();
    let total = sizes.iter().fold(1usize, |acc, &k| acc.saturating_mul(k));
    if total > cap {
        return Err(Error::CapExceeded { cap, needed: total });
    }
    let mut choice = vec![0usize; mdp.len()];
    let mut best: Option<S> = None;
    loop {
        let analysis = policy_analysis(mdp, &Policy::Deterministic(choice.clone()))?;
        let top = vector::max_entry(&analysis.mean_reward).expect("nonempty");
        best = Some(match best {
            Some(b) => S::max_of(b, top),
            None => top,
        });
        if !advance(&mut choice, |i| sizes[i]) {
            break;
        }
    }
    Ok(best.expect("at least one policy"))
}

/// One critical class shown optimal by an explicit randomized policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCertificate<S> {
    pub class: Vec<usize>,
    pub policy: Vec<Vec<S>>,
    pub is_final: bool,
    pub value: S,
    pub certified: bool,
}

/// A sampled active-supported policy with an optimal final class outside
/// every critical class.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample<S> {
    pub policy: Vec<Vec<S>>,
    pub class: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport<S> {
    /// Actions attaining `λ + v_i = r_i^a + P_i^a v`, per state.
    pub active_actions: Vec<Vec<usize>>,
    pub critical_classes: Vec<Vec<usize>>,
    pub certificates: Vec<ClassCertificate<S>>,
    pub sampled_policies: usize,
    pub exhaustive: bool,
    pub counterexamples: Vec<Counterexample<S>>,
}

impl<S> OptimalityReport<S> {
    pub fn all_certified(&self) -> bool {
        self.certificates.iter().all(|c| c.certified) && self.counterexamples.is_empty()
    }
}

fn uniform_over<S: Scalar>(len: usize, chosen: &[usize]) -> Vec<S> {
    let w = S::one() / S::from_i64(chosen.len() as i64);
    let mut out = vector::zeros::<S>(len);
    for &a in chosen {
        out[a] = w.clone();
    }
    out
}

/// Checks that critical classes are exactly the optimal final classes of
/// policies built from active actions.
///
/// Every critical class gets an explicit policy under which it is final
/// with value `λ`. Conversely, uniform mixtures over subsets of active
/// actions (all of them when few, a fixed-seed sample otherwise) must
/// only produce optimal final classes inside critical classes.
pub fn optimal_class_check<S: Scalar>(mdp: &MdpModel<S>, lambda: &S, v: &[S], tol: &S) -> Result<OptimalityReport<S>> {
    let map = mdp.to_map();
    let cd = critical::critical_data(&map, v, lambda, tol)?;
    let active: Vec<Vec<usize>> = map
        .active_indices(v, tol)?
        .into_iter()
        .map(|a| a.expect("max-affine rows"))
        .collect();
    let n = mdp.len();
    let close = |a: &S, b: &S| (a.clone() - b.clone()).abs() <= *tol;

    let mut certificates = Vec::new();
    for class in &cd.classes {
        let policy: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let list = &mdp.actions[i];
                let chosen: Vec<usize> = if class.contains(&i) {
                    active[i]
                        .iter()
                        .copied()
                        .filter(|&a| {
                            list[a]
                                .transition
                                .iter()
                                .enumerate()
                                .all(|(j, x)| x.is_zero() || class.contains(&j))
                        })
                        .collect()
                } else {
                    active[i].clone()
                };
                uniform_over(list.len(), &chosen)
            })
            .collect();
        let analysis = policy_analysis(mdp, &Policy::Randomized(policy.clone()))?;
        let pos = analysis.final_classes.iter().position(|f| f == class);
        let value = match pos {
            Some(k) => analysis.class_values[k].clone(),
            None => markov::class_value(&analysis.matrix, &analysis.reward, class).unwrap_or_else(|_| S::zero()),
        };
        certificates.push(ClassCertificate {
            class: class.clone(),
            policy,
            is_final: pos.is_some(),
            certified: pos.is_some() && close(&value, lambda),
            value,
        });
    }

    let subset_counts: Vec<usize> = active
        .iter()
        .map(|a| (1usize << a.len().min(usize::BITS as usize - 1)) - 1)
        .collect();
    let total = subset_counts.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k));
    let exhaustive = total.is_some_and(|t| t <= SUBSET_ENUMERATION_LIMIT);
    let masks: Vec<Vec<usize>> = if exhaustive {
        let mut pos = vec![0usize; n];
        let mut out = Vec::new();
        loop {
            out.push(pos.iter().map(|p| p + 1).collect());
            if !advance(&mut pos, |i| subset_counts[i]) {
                break;
            }
        }
        out
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(SAMPLING_SEED);
        (0..SUBSET_SAMPLES)
            .map(|_| {
                active
                    .iter()
                    .map(|a| {
                        let bits = a.len().min(63);
                        rng.gen_range(1..(1u64 << bits)) as usize
                    })
                    .collect()
            })
            .collect()
    };

    let mut counterexamples = Vec::new();
    for mask in &masks {
        let policy: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let chosen: Vec<usize> = active[i]
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask[i] >> b & 1 == 1)
                    .map(|(_, &a)| a)
                    .collect();
                uniform_over(mdp.actions[i].len(), &chosen)
            })
            .collect();
        let analysis = policy_analysis(mdp, &Policy::Randomized(policy.clone()))?;
        for (class, value) in analysis.final_classes.iter().zip(&analysis.class_values) {
            if !close(value, lambda) {
                continue;
            }
            let inside = cd.classes.iter().any(|c| class.iter().all(|i| c.contains(i)));
            if !inside {
                counterexamples.push(Counterexample {
                    policy: policy.clone(),
                    class: class.clone(),
                });
            }
        }
    }

    Ok(OptimalityReport {
        active_actions: active,
        critical_classes: cd.classes,
        certificates,
        sampled_policies: masks.len(),
        exhaustive,
        counterexamples,
    })
}
