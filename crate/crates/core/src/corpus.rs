//! Seeded random testing problems for oracle comparisons.
//!
//! `Uniform` is the reference corpus: p-values i.i.d. U[0, 1], weights
//! i.i.d. U[0.5, 5], alpha = 0.05. Most of its problems reject nothing, so
//! `Enriched` additionally draws each p-value from U[0, alpha] with
//! probability one half to exercise the multi-rejection paths.

use rand::Rng;

use crate::montecarlo::rng::substream;
use crate::problem::TestingProblem;

pub const CORPUS_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corpus {
    Uniform,
    Enriched,
}

/// Problem `index` of the corpus keyed by `seed`, with `m` drawn uniformly
/// from `1..=max_m`.
pub fn random_problem(kind: Corpus, seed: u64, index: u64, max_m: usize) -> TestingProblem {
    let mut rng = substream(seed, index);
    let m = rng.random_range(1..=max_m);
    let p = (0..m)
        .map(|_| match kind {
            Corpus::Enriched if rng.random_bool(0.5) => rng.random_range(0.0..CORPUS_ALPHA),
            _ => rng.random::<f64>(),
        })
        .collect();
    let w = (0..m).map(|_| rng.random_range(0.5..5.0)).collect();
    TestingProblem::unlabeled(p, w, CORPUS_ALPHA).expect("corpus draws are valid")
}

/// `count` problems from the corpus.
pub fn corpus(kind: Corpus, seed: u64, count: usize, max_m: usize) -> Vec<TestingProblem> {
    (0..count as u64)
        .map(|i| random_problem(kind, seed, i, max_m))
        .collect()
}

/// Problem `index` of the mixed corpus: odd indices enriched, even uniform.
pub fn mixed_problem(seed: u64, index: u64, max_m: usize) -> TestingProblem {
    let kind = if index % 2 == 1 {
        Corpus::Enriched
    } else {
        Corpus::Uniform
    };
    random_problem(kind, seed, index, max_m)
}

pub fn mixed_corpus(seed: u64, count: usize, max_m: usize) -> Vec<TestingProblem> {
    (0..count as u64)
        .map(|i| mixed_problem(seed, i, max_m))
        .collect()
}
