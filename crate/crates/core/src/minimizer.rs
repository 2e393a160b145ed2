//! Random-restart minimization of the p-frame energy over `N` unit vectors in `R^d`.
//!
//! Each restart runs projected gradient descent on the smoothed energy
//! `sum_{i != j} (<x_i, x_j>^2 + s^2)^(p/2)` with backtracking and
//! renormalization. The smoothing `s` shrinks geometrically from
//! `smoothing_start` to `smoothing_end` over the first part of the iteration
//! budget and is held at `smoothing_end` afterwards.
//!
//! Restart `r` draws its start from ChaCha stream `r` of `seed`, so the report
//! does not depend on how restarts are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{
    abs_pow, conjecture_formula_value, dot, frame_energy, gram_of, multiplicity_energy,
    repeated_ortho_multiplicities, Exponent, UnitVectorConfiguration,
};

/// Armijo sufficient-decrease constant.
pub const ARMIJO: f64 = 1e-4;
/// Energy below `ortho - DECISION_MARGIN` counts as beating the repeated-orthonormal value.
pub const DECISION_MARGIN: f64 = 1e-7;
/// Fraction of the iteration budget spent lowering the smoothing.
const CONTINUATION_FRACTION: f64 = 0.6;
/// Backtracking gives up below this step.
const MIN_STEP: f64 = 1e-24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    pub smoothing_start: f64,
    pub smoothing_end: f64,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            restarts: 64,
            max_iterations: 5000,
            step_tolerance: 1e-12,
            smoothing_start: 1e-2,
            smoothing_end: 1e-9,
            seed: 0,
        }
    }
}

impl MinimizeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::domain("restarts and max_iterations must be positive"));
        }
        if !(self.step_tolerance > 0.0 && self.smoothing_end > 0.0) {
            return Err(Error::domain("tolerances must be > 0"));
        }
        if !(self.smoothing_end <= self.smoothing_start) {
            return Err(Error::domain("smoothing_end must not exceed smoothing_start"));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizationReport {
    pub best_config: UnitVectorConfiguration,
    pub best_energy: f64,
    pub best_restart: usize,
    pub per_restart_energies: Vec<f64>,
    pub iterations_used: Vec<usize>,
    pub converged: Vec<bool>,
}

/// Serializable view of a [`MinimizationReport`].
#[derive(Debug, Clone, Serialize)]
pub struct MinimizationSummary {
    pub d: usize,
    pub n: usize,
    pub p: f64,
    pub best_energy: f64,
    pub best_restart: usize,
    pub best_vectors: Vec<Vec<f64>>,
    pub sorted_off_diagonal_abs: Vec<f64>,
    pub per_restart_energies: Vec<f64>,
    pub iterations_used: Vec<usize>,
    pub converged: Vec<bool>,
}

impl MinimizationReport {
    pub fn summary(&self, p: f64) -> MinimizationSummary {
        MinimizationSummary {
            d: self.best_config.dim(),
            n: self.best_config.len(),
            p,
            best_energy: self.best_energy,
            best_restart: self.best_restart,
            best_vectors: self.best_config.to_vecs(),
            sorted_off_diagonal_abs: gram_of(&self.best_config).sorted_off_diagonal_abs(),
            per_restart_energies: self.per_restart_energies.clone(),
            iterations_used: self.iterations_used.clone(),
            converged: self.converged.clone(),
        }
    }
}

#[inline]
fn pair_term(t: f64, p: f64, s2: f64) -> f64 {
    if s2 == 0.0 {
        abs_pow(t, p)
    } else {
        (t * t + s2).powf(0.5 * p)
    }
}

/// `sum_{i != j} (<x_i, x_j>^2 + s^2)^(p/2)`; equal to the frame energy at `s = 0`.
pub fn smoothed_energy(config: &UnitVectorConfiguration, p: f64, smoothing: f64) -> f64 {
    energy_flat(config.flat(), config.dim(), p, smoothing * smoothing)
}

fn energy_flat(x: &[f64], d: usize, p: f64, s2: f64) -> f64 {
    let n = x.len() / d;
    let mut upper = 0.0;
    for i in 0..n {
        let xi = &x[i * d..(i + 1) * d];
        for j in (i + 1)..n {
            upper += pair_term(dot(xi, &x[j * d..(j + 1) * d]), p, s2);
        }
    }
    2.0 * upper
}

/// Smoothed energy and its Riemannian gradient (written to `grad`).
fn energy_and_gradient(x: &[f64], d: usize, p: f64, s2: f64, grad: &mut [f64]) -> f64 {
    let n = x.len() / d;
    grad.fill(0.0);
    let mut upper = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (xi, xj) = (&x[i * d..(i + 1) * d], &x[j * d..(j + 1) * d]);
            let t = dot(xi, xj);
            upper += pair_term(t, p, s2);
            // d/dt of 2 (t^2 + s^2)^(p/2), one factor 2 from ordered pairs
            let w = if s2 == 0.0 {
                if t == 0.0 {
                    0.0
                } else {
                    2.0 * p * t.signum() * t.abs().powf(p - 1.0)
                }
            } else {
                2.0 * p * t * (t * t + s2).powf(0.5 * p - 1.0)
            };
            for k in 0..d {
                grad[i * d + k] += w * xj[k];
                grad[j * d + k] += w * xi[k];
            }
        }
    }
    for i in 0..n {
        let xi = &x[i * d..(i + 1) * d];
        let gi = &mut grad[i * d..(i + 1) * d];
        let radial = dot(gi, xi);
        for k in 0..d {
            gi[k] -= radial * xi[k];
        }
    }
    2.0 * upper
}

/// Tangent-space gradient of the smoothed energy at each vector.
pub fn energy_gradient(config: &UnitVectorConfiguration, p: f64, smoothing: f64) -> Vec<Vec<f64>> {
    let d = config.dim();
    let mut g = vec![0.0; config.flat().len()];
    energy_and_gradient(config.flat(), d, p, smoothing * smoothing, &mut g);
    g.chunks_exact(d).map(<[f64]>::to_vec).collect()
}

fn normalize_rows(x: &mut [f64], d: usize) {
    for row in x.chunks_exact_mut(d) {
        let norm = dot(row, row).sqrt();
        row.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Uniform random start for restart `restart`: Gaussian coordinates, normalized.
pub fn random_configuration(d: usize, n: usize, seed: u64, restart: usize) -> UnitVectorConfiguration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let mut x = vec![0.0; n * d];
    loop {
        for v in x.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        if x.chunks_exact(d).all(|r| dot(r, r) > 1e-24) {
            break;
        }
    }
    normalize_rows(&mut x, d);
    UnitVectorConfiguration::from_flat_unchecked(d, x)
}

struct Descent {
    coords: Vec<f64>,
    energy: f64,
    iterations: usize,
    converged: bool,
}

fn descend(d: usize, n: usize, p: f64, opts: &MinimizeOptions, restart: usize) -> Descent {
    let mut x = random_configuration(d, n, opts.seed, restart).flat().to_vec();
    let mut grad = vec![0.0; x.len()];
    let mut trial = vec![0.0; x.len()];
    let max_step = 1.0 / n as f64;
    let mut step = max_step;
    let ramp = ((opts.max_iterations as f64 * CONTINUATION_FRACTION) as usize).max(1);
    let ratio = opts.smoothing_end / opts.smoothing_start;
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..opts.max_iterations {
        iterations = it + 1;
        let holding = it >= ramp;
        let s = if holding {
            opts.smoothing_end
        } else {
            opts.smoothing_start * ratio.powf(it as f64 / ramp as f64)
        };
        let s2 = s * s;
        let e = energy_and_gradient(&x, d, p, s2, &mut grad);
        let g2 = dot(&grad, &grad);
        if g2 == 0.0 {
            converged = holding;
            if holding {
                break;
            }
            continue;
        }

        step = (2.0 * step).min(max_step);
        let mut accepted = false;
        while step >= MIN_STEP {
            for (t, (xi, gi)) in trial.iter_mut().zip(x.iter().zip(&grad)) {
                *t = xi - step * gi;
            }
            normalize_rows(&mut trial, d);
            if energy_flat(&trial, d, p, s2) <= e - ARMIJO * step * g2 {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no descent at this smoothing; stationary up to rounding
            if holding {
                converged = true;
                break;
            }
            step = max_step;
            continue;
        }
        let moved = x
            .iter()
            .zip(&trial)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut trial);
        if holding && moved < opts.step_tolerance {
            converged = true;
            break;
        }
    }
    let config = UnitVectorConfiguration::from_flat_unchecked(d, x);
    let energy = frame_energy(&gram_of(&config), Exponent(p));
    Descent {
        coords: config.flat().to_vec(),
        energy,
        iterations,
        converged,
    }
}

/// Best of `opts.restarts` independent descents. Ties go to the lowest restart index.
pub fn minimize_energy(d: usize, n: usize, p: f64, opts: &MinimizeOptions) -> Result<MinimizationReport> {
    if d == 0 || n == 0 {
        return Err(Error::Empty);
    }
    Exponent::new(p)?;
    opts.validate()?;
    let runs: Vec<Descent> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| descend(d, n, p, opts, r))
        .collect();
    let mut best = 0;
    for (r, run) in runs.iter().enumerate() {
        if run.energy < runs[best].energy {
            best = r;
        }
    }
    Ok(MinimizationReport {
        best_config: UnitVectorConfiguration::from_flat_unchecked(d, runs[best].coords.clone()),
        best_energy: runs[best].energy,
        best_restart: best,
        per_restart_energies: runs.iter().map(|r| r.energy).collect(),
        iterations_used: runs.iter().map(|r| r.iterations).collect(),
        converged: runs.iter().map(|r| r.converged).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub d: usize,
    pub n: usize,
    pub p_lo: f64,
    pub p_hi: f64,
    pub estimate: f64,
    pub bracket: (f64, f64),
    pub steps: usize,
    pub ortho_value: f64,
    pub best_energy_at_p_hi: f64,
}

impl ThresholdEstimate {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }
}

/// Repeated-orthonormal energy for `N` vectors in `R^d`.
pub fn ortho_value(d: usize, n: usize) -> f64 {
    multiplicity_energy(&repeated_ortho_multiplicities(d, n))
}

/// Bisects on `p` for the exponent where random-restart minimization first
/// beats the repeated-orthonormal value by more than [`DECISION_MARGIN`].
pub fn threshold_bisect(
    d: usize,
    n: usize,
    p_lo: f64,
    p_hi: f64,
    tol: f64,
    opts: &MinimizeOptions,
) -> Result<ThresholdEstimate> {
    if !(p_lo < p_hi && tol > 0.0) {
        return Err(Error::domain(format!("need p_lo < p_hi and tol > 0, got [{p_lo}, {p_hi}], {tol}")));
    }
    let ortho = ortho_value(d, n);
    let best_at = |p: f64| minimize_energy(d, n, p, opts).map(|r| r.best_energy);

    let at_lo = best_at(p_lo)?;
    if at_lo < ortho - DECISION_MARGIN {
        return Err(Error::precondition(format!(
            "p_lo={p_lo}: repeated-orthonormal value {ortho} already beaten (best {at_lo})"
        )));
    }
    let at_hi = best_at(p_hi)?;
    if !(at_hi < ortho - DECISION_MARGIN) {
        return Err(Error::precondition(format!(
            "p_hi={p_hi}: repeated-orthonormal value {ortho} not beaten (best {at_hi})"
        )));
    }
    let (mut lo, mut hi) = (p_lo, p_hi);
    let mut steps = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if best_at(mid)? < ortho - DECISION_MARGIN {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(ThresholdEstimate {
        d,
        n,
        p_lo,
        p_hi,
        estimate: 0.5 * (lo + hi),
        bracket: (lo, hi),
        steps,
        ortho_value: ortho,
        best_energy_at_p_hi: at_hi,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub p_lo: f64,
    pub p_hi: f64,
    pub p_estimate: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    pub ortho_value: f64,
    /// `d (k^2 - k) + 2k`, reported alongside the direct count.
    pub formula_value: f64,
    pub best_energy_at_p_hi: Option<f64>,
    pub restarts: usize,
    pub seed: u64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KObservation {
    pub k: usize,
    pub estimates: Vec<f64>,
    pub spread: Option<f64>,
    /// Whether all estimates at this `k` agree within the scan tolerance.
    pub independent_of_d_and_m: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub per_k: Vec<KObservation>,
    /// Whether the mean estimate increases with `k`.
    pub increasing_in_k: Option<bool>,
    pub skipped: Vec<String>,
}

/// Exponent bracket used by [`conjecture_scan`].
pub const SCAN_BRACKET: (f64, f64) = (1.0, 2.0);
/// Largest `N` accepted by the scan.
pub const SCAN_MAX_N: usize = 12;

/// Threshold estimates for `N = m + k d` over a grid of `(d, k, m)`.
/// Observations about the conjecture are recorded, never asserted.
pub fn conjecture_scan(
    d_list: &[usize],
    k_list: &[usize],
    m_list: &[usize],
    tol: f64,
    opts: &MinimizeOptions,
) -> Result<ScanTable> {
    opts.validate()?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &k in k_list {
        for &d in d_list {
            for &m in m_list {
                let n = m + k * d;
                if k == 0 || m == 0 || m >= d || d < 2 {
                    skipped.push(format!("(d={d}, k={k}, m={m}): need k >= 1, d >= 2, 1 <= m < d"));
                    continue;
                }
                if n > SCAN_MAX_N {
                    skipped.push(format!("(d={d}, k={k}, m={m}): N={n} exceeds {SCAN_MAX_N}"));
                    continue;
                }
                let mut row = ScanRow {
                    d,
                    k,
                    m,
                    n,
                    p_lo: SCAN_BRACKET.0,
                    p_hi: SCAN_BRACKET.1,
                    p_estimate: None,
                    bracket: None,
                    ortho_value: ortho_value(d, n),
                    formula_value: conjecture_formula_value(d, k),
                    best_energy_at_p_hi: None,
                    restarts: opts.restarts,
                    seed: opts.seed,
                    error: None,
                };
                match threshold_bisect(d, n, SCAN_BRACKET.0, SCAN_BRACKET.1, tol, opts) {
                    Ok(est) => {
                        row.p_estimate = Some(est.estimate);
                        row.bracket = Some(est.bracket);
                        row.best_energy_at_p_hi = Some(est.best_energy_at_p_hi);
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                rows.push(row);
            }
        }
    }

    let mut ks: Vec<usize> = rows.iter().map(|r| r.k).collect();
    ks.dedup();
    let per_k: Vec<KObservation> = ks
        .iter()
        .map(|&k| {
            let estimates: Vec<f64> = rows.iter().filter(|r| r.k == k).filter_map(|r| r.p_estimate).collect();
            let spread = (!estimates.is_empty()).then(|| {
                let hi = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let lo = estimates.iter().copied().fold(f64::INFINITY, f64::min);
                hi - lo
            });
            KObservation {
                k,
                independent_of_d_and_m: spread.filter(|_| estimates.len() > 1).map(|s| s <= 2.0 * tol),
                estimates,
                spread,
            }
        })
        .collect();
    let means: Vec<f64> = per_k
        .iter()
        .filter(|o| !o.estimates.is_empty())
        .map(|o| o.estimates.iter().sum::<f64>() / o.estimates.len() as f64)
        .collect();
    let increasing_in_k = (means.len() > 1).then(|| means.windows(2).all(|w| w[1] > w[0]));
    Ok(ScanTable {
        rows,
        per_k,
        increasing_in_k,
        skipped,
    })
}
