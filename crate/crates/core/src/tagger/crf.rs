//! Linear-chain CRF over per-position emission scores.
//!
//! `transitions` is an `(L + 2) × (L + 2)` matrix indexed `[from, to]`;
//! row `L` is the virtual start state and column `L + 1` the virtual end
//! state. A path `y` scores
//! `trans[start, y₀] + Σₜ emit[t, yₜ] + Σₜ trans[yₜ₋₁, yₜ] + trans[y_T, end]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;

pub fn start_state(labels: usize) -> usize {
    labels
}

pub fn end_state(labels: usize) -> usize {
    labels + 1
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + libm::log(values.iter().map(|v| libm::exp(v - max)).sum::<f64>())
}

/// Score of one label path.
pub fn path_score(emissions: &Matrix, transitions: &Matrix, path: &[usize]) -> f64 {
    let l = emissions.cols();
    let mut score = transitions[(start_state(l), path[0])];
    for (t, &y) in path.iter().enumerate() {
        score += emissions[(t, y)];
        if t > 0 {
            score += transitions[(path[t - 1], y)];
        }
    }
    score + transitions[(path[path.len() - 1], end_state(l))]
}

/// Forward log-scores: `alpha[t][j]` = log-sum of all prefixes ending in `j` at `t`.
fn forward(emissions: &Matrix, transitions: &Matrix) -> Vec<Vec<f64>> {
    let (steps, l) = (emissions.rows(), emissions.cols());
    let mut alpha = Vec::with_capacity(steps);
    alpha.push(
        (0..l)
            .map(|j| transitions[(start_state(l), j)] + emissions[(0, j)])
            .collect::<Vec<_>>(),
    );
    let mut scratch = vec![0.0; l];
    for t in 1..steps {
        let prev: &Vec<f64> = &alpha[t - 1];
        let next = (0..l)
            .map(|j| {
                for i in 0..l {
                    scratch[i] = prev[i] + transitions[(i, j)];
                }
                log_sum_exp(&scratch) + emissions[(t, j)]
            })
            .collect();
        alpha.push(next);
    }
    alpha
}

/// `beta[t][i]` = log-sum of all suffixes after `t` given label `i` at `t`, end transition included.
fn backward(emissions: &Matrix, transitions: &Matrix) -> Vec<Vec<f64>> {
    let (steps, l) = (emissions.rows(), emissions.cols());
    let mut beta = vec![vec![0.0; l]; steps];
    for i in 0..l {
        beta[steps - 1][i] = transitions[(i, end_state(l))];
    }
    let mut scratch = vec![0.0; l];
    for t in (0..steps - 1).rev() {
        for i in 0..l {
            for j in 0..l {
                scratch[j] = transitions[(i, j)] + emissions[(t + 1, j)] + beta[t + 1][j];
            }
            beta[t][i] = log_sum_exp(&scratch);
        }
    }
    beta
}

/// Log of the sum of `exp(score)` over every label path. Requires at least one step.
pub fn log_partition(emissions: &Matrix, transitions: &Matrix) -> f64 {
    let l = emissions.cols();
    let alpha = forward(emissions, transitions);
    let last = &alpha[alpha.len() - 1];
    let finals: Vec<f64> = (0..l)
        .map(|j| last[j] + transitions[(j, end_state(l))])
        .collect();
    log_sum_exp(&finals)
}

/// Rounding can push `log Z − score` a hair below zero; NaN passes through.
fn non_negative(loss: f64) -> f64 {
    if loss < 0.0 {
        0.0
    } else {
        loss
    }
}

/// `log Z − score(gold)`.
pub fn neg_log_likelihood(emissions: &Matrix, transitions: &Matrix, gold: &[usize]) -> f64 {
    non_negative(log_partition(emissions, transitions) - path_score(emissions, transitions, gold))
}

/// Loss with its gradients with respect to emissions and transitions.
pub struct CrfGradient {
    pub loss: f64,
    pub d_emissions: Matrix,
    pub d_transitions: Matrix,
}

/// Negative log-likelihood and its gradient via forward-backward marginals.
pub fn neg_log_likelihood_grad(
    emissions: &Matrix,
    transitions: &Matrix,
    gold: &[usize],
) -> CrfGradient {
    let (steps, l) = (emissions.rows(), emissions.cols());
    let alpha = forward(emissions, transitions);
    let beta = backward(emissions, transitions);
    let log_z = {
        let last = &alpha[steps - 1];
        let finals: Vec<f64> = (0..l)
            .map(|j| last[j] + transitions[(j, end_state(l))])
            .collect();
        log_sum_exp(&finals)
    };
    let loss = non_negative(log_z - path_score(emissions, transitions, gold));

    let mut d_emissions = Matrix::zeros(steps, l);
    let mut d_transitions = Matrix::zeros(l + 2, l + 2);
    for t in 0..steps {
        for j in 0..l {
            let marginal = libm::exp(alpha[t][j] + beta[t][j] - log_z);
            d_emissions[(t, j)] = marginal;
            if t == 0 {
                d_transitions[(start_state(l), j)] += marginal;
            }
            if t == steps - 1 {
                d_transitions[(j, end_state(l))] += marginal;
            }
        }
        d_emissions[(t, gold[t])] -= 1.0;
    }
    for t in 0..steps.saturating_sub(1) {
        for i in 0..l {
            for j in 0..l {
                let pair =
                    alpha[t][i] + transitions[(i, j)] + emissions[(t + 1, j)] + beta[t + 1][j]
                        - log_z;
                d_transitions[(i, j)] += libm::exp(pair);
            }
        }
        d_transitions[(gold[t], gold[t + 1])] -= 1.0;
    }
    d_transitions[(start_state(l), gold[0])] -= 1.0;
    d_transitions[(gold[steps - 1], end_state(l))] -= 1.0;
    CrfGradient {
        loss,
        d_emissions,
        d_transitions,
    }
}

/// Highest-scoring path and its score (as computed by [`path_score`]).
/// Ties go to the smaller label index.
pub fn viterbi_decode(emissions: &Matrix, transitions: &Matrix) -> (Vec<usize>, f64) {
    let (steps, l) = (emissions.rows(), emissions.cols());
    let mut score: Vec<f64> = (0..l)
        .map(|j| transitions[(start_state(l), j)] + emissions[(0, j)])
        .collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(steps);
    for t in 1..steps {
        let mut next = vec![0.0; l];
        let mut ptr = vec![0usize; l];
        for j in 0..l {
            let mut best = 0;
            let mut best_score = f64::NEG_INFINITY;
            for (i, s) in score.iter().enumerate() {
                let cand = s + transitions[(i, j)];
                if cand > best_score {
                    best = i;
                    best_score = cand;
                }
            }
            next[j] = best_score + emissions[(t, j)];
            ptr[j] = best;
        }
        score = next;
        back.push(ptr);
    }
    let mut last = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (j, s) in score.iter().enumerate() {
        let cand = s + transitions[(j, end_state(l))];
        if cand > best_score {
            last = j;
            best_score = cand;
        }
    }
    let mut path = vec![last; steps];
    for t in (1..steps).rev() {
        path[t - 1] = back[t - 1][path[t]];
    }
    let score = path_score(emissions, transitions, &path);
    (path, score)
}
