//! Eigenangle samplers and first-return-time experiments.
//!
//! The CUE sampler is Metropolis-within-Gibbs on the joint eigenangle
//! log-density `2 sum_{i<j} ln|sin((theta_i - theta_j)/2)|` (the squared
//! Vandermonde on the circle), with a wrapped Gaussian random-walk proposal.
//! First-return searches scan candidate re-entry times: in continuous time
//! these are `t = (2 pi k - pi eps) / |theta_i|`, merged across eigenvalues
//! in increasing order; in discrete time every integer is a candidate.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::Error;
use crate::numerics::special::{chi2_sf, dist_to_nearest_int, kolmogorov_sf, wrap_angle};

/// Which eigenangle law a sample was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    CueMcmc,
    IidUniform,
}

/// Continuous or integer-time first-return experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeKind {
    Continuous,
    Discrete,
}

/// Metropolis chain settings. Defaults follow the size of the matrix:
/// step `pi / sqrt(n)`, burn-in `2000 n` sweeps, thinning `20 n` sweeps.
#[derive(Clone, Copy, Debug)]
pub struct McmcParams {
    pub burn_in_sweeps: usize,
    pub thin_sweeps: usize,
    pub step_sigma: f64,
}

impl McmcParams {
    pub fn for_size(n: usize) -> Self {
        McmcParams {
            burn_in_sweeps: 2000 * n,
            thin_sweeps: 20 * n,
            step_sigma: PI / (n.max(1) as f64).sqrt(),
        }
    }
}

/// One draw of `n` eigenangles in `[-pi, pi]`.
#[derive(Clone, Debug)]
pub struct AngleSample {
    pub thetas: Vec<f64>,
    pub model: Model,
    pub seed: u64,
    /// Chain sample index (CUE) or replication stream (i.i.d.).
    pub index: u64,
}

/// Sequential Metropolis chain targeting the CUE eigenangle density.
pub struct CueChain {
    n: usize,
    thetas: Vec<f64>,
    rng: ChaCha8Rng,
    params: McmcParams,
    seed: u64,
    samples_taken: u64,
    proposed: u64,
    accepted: u64,
}

impl CueChain {
    pub fn new(n: usize, seed: u64, params: McmcParams) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        // start from equally spaced angles, the energy minimum
        let thetas = (0..n)
            .map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64)
            .collect();
        CueChain {
            n,
            thetas,
            rng,
            params,
            seed,
            samples_taken: 0,
            proposed: 0,
            accepted: 0,
        }
    }

    fn log_weight_of(&self, i: usize, theta_i: f64) -> f64 {
        let mut s = 0.0;
        for (j, &tj) in self.thetas.iter().enumerate() {
            if j == i {
                continue;
            }
            s += ((theta_i - tj) / 2.0).sin().abs().ln();
        }
        2.0 * s
    }

    fn sweep(&mut self) {
        if self.n == 1 {
            // no interaction: the marginal is exactly uniform
            self.thetas[0] = self.rng.random_range(-PI..PI);
            return;
        }
        for i in 0..self.n {
            let z: f64 = self.rng.sample(StandardNormal);
            let proposal = wrap_angle(self.thetas[i] + self.params.step_sigma * z);
            let delta = self.log_weight_of(i, proposal) - self.log_weight_of(i, self.thetas[i]);
            self.proposed += 1;
            let u: f64 = self.rng.random();
            if u.ln() < delta {
                self.thetas[i] = proposal;
                self.accepted += 1;
            }
        }
    }

    pub fn burn_in(&mut self) {
        for _ in 0..self.params.burn_in_sweeps {
            self.sweep();
        }
    }

    /// Advances by the thinning interval and returns the new state.
    pub fn next_sample(&mut self) -> AngleSample {
        for _ in 0..self.params.thin_sweeps {
            self.sweep();
        }
        self.samples_taken += 1;
        self.snapshot()
    }

    fn snapshot(&self) -> AngleSample {
        AngleSample {
            thetas: self.thetas.clone(),
            model: Model::CueMcmc,
            seed: self.seed,
            index: self.samples_taken,
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return f64::NAN;
        }
        self.accepted as f64 / self.proposed as f64
    }
}

/// One CUE draw: fresh chain, burn-in, snapshot. Deterministic in the seed.
pub fn sample_cue(n: usize, seed: u64, params: McmcParams) -> AngleSample {
    let mut chain = CueChain::new(n, seed, params);
    chain.burn_in();
    let mut s = chain.snapshot();
    s.index = 0;
    s
}

/// `count` thinned draws from a single burned-in chain.
pub fn cue_chain_samples(n: usize, seed: u64, params: McmcParams, count: usize) -> Vec<AngleSample> {
    let mut chain = CueChain::new(n, seed, params);
    chain.burn_in();
    (0..count).map(|_| chain.next_sample()).collect()
}

/// I.i.d. uniform angles on `[-pi, pi]`.
pub fn sample_iid(n: usize, seed: u64) -> AngleSample {
    sample_iid_stream(n, seed, 0)
}

/// I.i.d. draw from the replication stream `(seed, index)`.
pub fn sample_iid_stream(n: usize, seed: u64, index: u64) -> AngleSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    AngleSample {
        thetas: (0..n).map(|_| rng.random_range(-PI..PI)).collect(),
        model: Model::IidUniform,
        seed,
        index,
    }
}

/// Outcome of one first-return experiment.
#[derive(Clone, Debug)]
pub struct FirstReturnRecord {
    /// Raw first-return time (continuous) or first-return integer (discrete).
    pub tau: f64,
    /// Continuous: `n tau / (4 eps^{-(n-1)})`; discrete: `n0 eps^n`.
    pub normalized: f64,
    pub candidates_checked: u64,
    /// True when no return was found before the horizon; `tau` then holds
    /// the horizon itself (a censored observation).
    pub horizon_hit: bool,
}

/// Default continuous search horizon, `1e4` times the conjectured mean.
pub fn default_horizon_continuous(n: usize, eps: f64) -> f64 {
    1e4 * 4.0 * eps.powi(-(n as i32 - 1)) / n as f64
}

/// Default discrete search horizon, `1e3` times the conjectured mean.
pub fn default_horizon_discrete(n: usize, eps: f64) -> u64 {
    (1e3 * eps.powi(-(n as i32))).min(4.6e18) as u64
}

fn check_eps(eps: f64) -> Result<(), Error> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Strong-return test at time `t`; `skip` marks the eigenvalue generating the
/// candidate, which sits exactly on the (closed) window edge.
fn is_strong_return(t: f64, eps: f64, thetas: &[f64], skip: Option<usize>) -> bool {
    thetas.iter().enumerate().all(|(j, &theta)| {
        Some(j) == skip || dist_to_nearest_int(t * theta / (2.0 * PI)) <= eps / 2.0
    })
}

/// Candidate re-entry stream entry; min-heap on `t`.
struct Cand {
    t: f64,
    eig: usize,
    k: u64,
}

impl PartialEq for Cand {
    fn eq(&self, other: &Self) -> bool {
        self.t == other.t
    }
}
impl Eq for Cand {}
impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: smallest time = highest priority
        other.t.total_cmp(&self.t)
    }
}

const ZERO_ANGLE: f64 = 1e-12;

/// First strong return in continuous time, by a k-way merge over the
/// per-eigenvalue candidate streams.
pub fn first_return_continuous(
    sample: &AngleSample,
    eps: f64,
    horizon: f64,
) -> Result<FirstReturnRecord, Error> {
    check_eps(eps)?;
    let n = sample.thetas.len();
    if n == 0 {
        return Err(Error::domain("empty sample"));
    }
    let norm = |tau: f64| n as f64 * tau / (4.0 * eps.powi(-(n as i32 - 1)));

    let mut heap: BinaryHeap<Cand> = BinaryHeap::new();
    for (i, &theta) in sample.thetas.iter().enumerate() {
        // an eigenvalue at zero never leaves the window and spawns no
        // candidates
        if theta.abs() >= ZERO_ANGLE {
            heap.push(Cand {
                t: (2.0 * PI - PI * eps) / theta.abs(),
                eig: i,
                k: 1,
            });
        }
    }

    let mut checked = 0u64;
    while let Some(c) = heap.pop() {
        if c.t > horizon {
            break;
        }
        checked += 1;
        if is_strong_return(c.t, eps, &sample.thetas, Some(c.eig)) {
            return Ok(FirstReturnRecord {
                tau: c.t,
                normalized: norm(c.t),
                candidates_checked: checked,
                horizon_hit: false,
            });
        }
        let k = c.k + 1;
        heap.push(Cand {
            t: (2.0 * PI * k as f64 - PI * eps) / sample.thetas[c.eig].abs(),
            eig: c.eig,
            k,
        });
    }
    Ok(FirstReturnRecord {
        tau: horizon,
        normalized: norm(horizon),
        candidates_checked: checked,
        horizon_hit: true,
    })
}

/// First strong return over integer times: the smallest `n0 >= 1` with
/// `||n0 theta_i / 2 pi|| <= eps / 2` for every `i`.
pub fn first_return_discrete(
    sample: &AngleSample,
    eps: f64,
    horizon: u64,
) -> Result<FirstReturnRecord, Error> {
    check_eps(eps)?;
    let n = sample.thetas.len();
    if n == 0 {
        return Err(Error::domain("empty sample"));
    }
    let fractions: Vec<f64> = sample.thetas.iter().map(|t| t / (2.0 * PI)).collect();
    let half = eps / 2.0;
    let norm = |n0: f64| n0 * eps.powi(n as i32);

    for step in 1..=horizon {
        let s = step as f64;
        if fractions.iter().all(|&x| dist_to_nearest_int(s * x) <= half) {
            return Ok(FirstReturnRecord {
                tau: s,
                normalized: norm(s),
                candidates_checked: step,
                horizon_hit: false,
            });
        }
    }
    Ok(FirstReturnRecord {
        tau: horizon as f64,
        normalized: norm(horizon as f64),
        candidates_checked: horizon,
        horizon_hit: true,
    })
}

/// Mean spacing between consecutive candidate re-entry times, `4 / n`.
pub fn mean_candidate_gap(n: usize) -> f64 {
    4.0 / n as f64
}

/// Empirical candidate spacing: merge the first `count` candidates of a
/// sample and average consecutive gaps.
pub fn empirical_candidate_gap(sample: &AngleSample, count: usize) -> f64 {
    let mut heap: BinaryHeap<Cand> = BinaryHeap::new();
    // the eps offset shifts every stream uniformly and cancels in the gaps
    for (i, &theta) in sample.thetas.iter().enumerate() {
        if theta.abs() >= ZERO_ANGLE {
            heap.push(Cand {
                t: 2.0 * PI / theta.abs(),
                eig: i,
                k: 1,
            });
        }
    }
    let mut first = None;
    let mut last = 0.0;
    let mut seen = 0usize;
    while let Some(c) = heap.pop() {
        seen += 1;
        if first.is_none() {
            first = Some(c.t);
        }
        last = c.t;
        if seen == count {
            break;
        }
        let k = c.k + 1;
        heap.push(Cand {
            t: 2.0 * PI * k as f64 / sample.thetas[c.eig].abs(),
            eig: c.eig,
            k,
        });
    }
    match first {
        Some(f) if seen > 1 => (last - f) / (seen - 1) as f64,
        _ => f64::NAN,
    }
}

/// Exponential fit of normalized first-return statistics.
#[derive(Clone, Debug)]
pub struct ExpFit {
    /// Maximum-likelihood rate, `1 / mean`.
    pub lambda_hat: f64,
    pub n_samples: usize,
    /// Kolmogorov-Smirnov statistic against Exp(1) (the conjectured law,
    /// not the fitted one).
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    /// Horizon-censored records excluded from the fit.
    pub censored: usize,
}

/// Fits Exp to the uncensored normalized statistics and tests against Exp(1).
pub fn fit_exponential(records: &[FirstReturnRecord]) -> Result<ExpFit, Error> {
    let mut vals: Vec<f64> = records
        .iter()
        .filter(|r| !r.horizon_hit)
        .map(|r| r.normalized)
        .collect();
    let censored = records.len() - vals.len();
    if vals.len() < 30 {
        return Err(Error::TooFewSamples {
            need: 30,
            got: vals.len(),
        });
    }
    let n = vals.len();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let lambda_hat = 1.0 / mean;

    vals.sort_by(|a, b| a.total_cmp(b));
    let mut d = 0.0f64;
    for (i, &x) in vals.iter().enumerate() {
        let f = 1.0 - (-x).exp();
        d = d.max(f - i as f64 / n as f64);
        d = d.max((i + 1) as f64 / n as f64 - f);
    }
    let nf = n as f64;
    let ks_p_value = kolmogorov_sf((nf.sqrt() + 0.12 + 0.11 / nf.sqrt()) * d);
    Ok(ExpFit {
        lambda_hat,
        n_samples: n,
        ks_statistic: d,
        ks_p_value,
        censored,
    })
}

/// Full first-return experiment description.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: usize,
    pub eps: f64,
    pub samples: usize,
    pub model: Model,
    pub time: TimeKind,
    pub seed: u64,
    /// Multiplies the default horizon.
    pub horizon_mult: f64,
    /// Chain settings for the CUE model; defaults from `McmcParams::for_size`.
    pub mcmc: Option<McmcParams>,
}

/// Runs the experiment. I.i.d. replications run in parallel with one RNG
/// stream per replication; CUE samples come from one sequential thinned
/// chain and the searches run in parallel.
pub fn run_first_return(cfg: &ExperimentConfig) -> Result<Vec<FirstReturnRecord>, Error> {
    if cfg.n == 0 || cfg.samples == 0 {
        return Err(Error::domain("n and samples must be at least 1"));
    }
    check_eps(cfg.eps)?;
    if !(cfg.horizon_mult > 0.0) {
        return Err(Error::domain("horizon multiplier must be positive"));
    }
    let samples: Vec<AngleSample> = match cfg.model {
        Model::IidUniform => (0..cfg.samples as u64)
            .into_par_iter()
            .map(|i| sample_iid_stream(cfg.n, cfg.seed, i))
            .collect(),
        Model::CueMcmc => {
            let params = cfg.mcmc.unwrap_or_else(|| McmcParams::for_size(cfg.n));
            cue_chain_samples(cfg.n, cfg.seed, params, cfg.samples)
        }
    };
    match cfg.time {
        TimeKind::Continuous => {
            let horizon = default_horizon_continuous(cfg.n, cfg.eps) * cfg.horizon_mult;
            samples
                .par_iter()
                .map(|s| first_return_continuous(s, cfg.eps, horizon))
                .collect()
        }
        TimeKind::Discrete => {
            let horizon =
                ((default_horizon_discrete(cfg.n, cfg.eps) as f64) * cfg.horizon_mult) as u64;
            samples
                .par_iter()
                .map(|s| first_return_discrete(s, cfg.eps, horizon.max(1)))
                .collect()
        }
    }
}

/// `E |sum_i exp(i theta_i)|^2` over a set of samples (equals 1 for CUE).
pub fn mean_abs_trace_sq(samples: &[AngleSample]) -> f64 {
    let mut acc = 0.0;
    for s in samples {
        let re: f64 = s.thetas.iter().map(|t| t.cos()).sum();
        let im: f64 = s.thetas.iter().map(|t| t.sin()).sum();
        acc += re * re + im * im;
    }
    acc / samples.len() as f64
}

fn chi2_from_counts(counts: &[u64], expected: &[f64]) -> (f64, f64) {
    let stat: f64 = counts
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    (stat, chi2_sf(stat, counts.len() as u32 - 1))
}

/// Chi-square test of marginal uniformity for one coordinate.
pub fn chi2_uniform_marginal(samples: &[AngleSample], coord: usize, bins: usize) -> (f64, f64) {
    let mut counts = vec![0u64; bins];
    for s in samples {
        let theta = s.thetas[coord];
        let b = (((theta + PI) / (2.0 * PI) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let expected = vec![samples.len() as f64 / bins as f64; bins];
    chi2_from_counts(&counts, &expected)
}

/// Chi-square test of the two-eigenvalue spacing density
/// `sin^2(delta/2) / pi` on `[0, 2 pi)`.
pub fn chi2_spacing_two(samples: &[AngleSample], bins: usize) -> (f64, f64) {
    let mut counts = vec![0u64; bins];
    for s in samples {
        assert_eq!(s.thetas.len(), 2);
        let mut delta = s.thetas[0] - s.thetas[1];
        delta -= 2.0 * PI * (delta / (2.0 * PI)).floor();
        let b = ((delta / (2.0 * PI) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    // CDF of the spacing law: (x - sin x) / (2 pi)
    let cdf = |x: f64| (x - x.sin()) / (2.0 * PI);
    let total = samples.len() as f64;
    let expected: Vec<f64> = (0..bins)
        .map(|b| {
            let lo = 2.0 * PI * b as f64 / bins as f64;
            let hi = 2.0 * PI * (b + 1) as f64 / bins as f64;
            total * (cdf(hi) - cdf(lo))
        })
        .collect();
    chi2_from_counts(&counts, &expected)
}
