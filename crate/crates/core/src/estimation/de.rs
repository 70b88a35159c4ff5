//! Differential evolution (`rand/1/bin`) maximizer.
//!
//! Trial vectors are generated sequentially from a per-restart ChaCha stream,
//! evaluated in parallel, then selected in index order, so the result depends
//! only on the seed and never on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub population: usize,
    /// Differential weight `F`.
    pub weight: f64,
    /// Crossover probability.
    pub crossover: f64,
    pub generations: usize,
    pub restarts: usize,
    /// Stop a restart after this many generations without improvement.
    pub stall_generations: usize,
    pub stall_tolerance: f64,
    pub seed: u64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population: 60,
            weight: 0.7,
            crossover: 0.9,
            generations: 400,
            restarts: 8,
            stall_generations: 50,
            stall_tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::InvalidArgument("DE population must be at least 4".into()));
        }
        if !(self.weight > 0.0 && self.weight <= 2.0) || !(0.0..=1.0).contains(&self.crossover) {
            return Err(Error::InvalidArgument("DE weight must be in (0, 2] and crossover in [0, 1]".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("DE needs at least one restart".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DeResult {
    pub best: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

/// Maximizes `fitness` over `R^n`. `init` draws a starting member; members
/// with non-finite fitness are redrawn (up to a bounded number of tries).
/// Candidates scored `-∞` are never selected over finite ones, which is how
/// constraints are enforced.
pub fn maximize<F, I>(n: usize, fitness: F, init: I, config: &DeConfig) -> Result<DeResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
    I: Fn(&mut ChaCha8Rng) -> Vec<f64>,
{
    config.validate()?;
    let np = config.population;
    let mut overall: Option<DeResult> = None;
    let mut evaluations = 0;

    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(restart as u64);

        let mut pop: Vec<Vec<f64>> = (0..np).map(|_| init(&mut rng)).collect();
        let mut fit: Vec<f64> = pop.par_iter().map(|x| fitness(x)).collect();
        evaluations += np;
        for _ in 0..100 {
            let bad: Vec<usize> = (0..np).filter(|&i| !fit[i].is_finite()).collect();
            if bad.is_empty() {
                break;
            }
            for &i in &bad {
                pop[i] = init(&mut rng);
            }
            let redrawn: Vec<f64> = bad.par_iter().map(|&i| fitness(&pop[i])).collect();
            evaluations += bad.len();
            for (&i, f) in bad.iter().zip(redrawn) {
                fit[i] = f;
            }
        }

        let mut best = argmax(&fit);
        let mut reference = fit[best];
        let mut stall = 0;
        for _ in 0..config.generations {
            let trials: Vec<Vec<f64>> = (0..np)
                .map(|i| {
                    let (a, b, c) = distinct_three(&mut rng, np, i);
                    let jrand = rng.random_range(0..n);
                    (0..n)
                        .map(|j| {
                            if j == jrand || rng.random::<f64>() < config.crossover {
                                pop[a][j] + config.weight * (pop[b][j] - pop[c][j])
                            } else {
                                pop[i][j]
                            }
                        })
                        .collect()
                })
                .collect();
            let trial_fit: Vec<f64> = trials.par_iter().map(|x| fitness(x)).collect();
            evaluations += np;
            for (i, (t, f)) in trials.into_iter().zip(trial_fit).enumerate() {
                if f >= fit[i] {
                    pop[i] = t;
                    fit[i] = f;
                }
            }
            best = argmax(&fit);
            if fit[best] > reference + config.stall_tolerance {
                reference = fit[best];
                stall = 0;
            } else {
                stall += 1;
                if stall >= config.stall_generations {
                    break;
                }
            }
        }
        if overall.as_ref().is_none_or(|o| fit[best] > o.value) {
            overall = Some(DeResult {
                best: pop[best].clone(),
                value: fit[best],
                evaluations: 0,
            });
        }
    }
    let mut result = overall.expect("at least one restart");
    result.evaluations = evaluations;
    Ok(result)
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

fn distinct_three<R: Rng>(rng: &mut R, n: usize, exclude: usize) -> (usize, usize, usize) {
    let mut pick = |taken: &[usize]| loop {
        let k = rng.random_range(0..n);
        if k != exclude && !taken.contains(&k) {
            return k;
        }
    };
    let a = pick(&[]);
    let b = pick(&[a]);
    let c = pick(&[a, b]);
    (a, b, c)
}
