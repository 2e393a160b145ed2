//! Simplex relaxation of the frame energy.
//!
//! For a cap `c` and exponent `p`, `M(c, p, N)` is the minimum of
//! `sum_i f(t_i)` with `f(t) = (t / (c - t))^(p/2)` over `sum t_i = 1`,
//! `t_i in [0, c)`. When `A` is an `N x N` unit-diagonal matrix of rank `d`,
//! `E_p(A) >= M(1/(N-d), p, N)` for `p in [1, 2]`.
//!
//! `f` is concave on `[0, c * a_p]` and convex on `[c * a_p, c)` where
//! `a_p = 1/2 - p/4`, so a minimizer puts `k` equal masses in the convex
//! region and at most one nonzero mass in the concave region. [`m_value`]
//! searches exactly those candidates; [`m_bruteforce`] scans the simplex.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{frame_energy, validate_rank, Exponent, GramMatrix, RANK_TOL};

/// Slack below which the bound check reports a failure.
pub const BOUND_TOL: f64 = 1e-9;
/// Absolute x-tolerance of the golden-section refinement.
pub const SEARCH_X_TOL: f64 = 1e-12;
/// Points in the safety grid evaluated alongside golden-section search.
pub const SAFETY_GRID: usize = 1000;
/// Largest `N` accepted by [`m_bruteforce`].
pub const BRUTEFORCE_MAX_N: usize = 5;

/// `f_{c,p}(t) = (t/(c-t))^(p/2)`, `+inf` for `t >= c`.
pub fn f_relax(c: f64, p: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be >= 0, got {t}")));
    }
    if !(c > 0.0 && p > 0.0) {
        return Err(Error::domain(format!("need c > 0 and p > 0, got c={c}, p={p}")));
    }
    Ok(f_unchecked(c, p, t))
}

#[inline]
fn f_unchecked(c: f64, p: f64, t: f64) -> f64 {
    if t >= c {
        f64::INFINITY
    } else if t == 0.0 {
        0.0
    } else {
        (t / (c - t)).powf(0.5 * p)
    }
}

/// `1/2 - p/4`: inflection point of `f_{1,p}`.
#[inline]
pub fn inflection_threshold(p: f64) -> f64 {
    0.5 - 0.25 * p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationProblem {
    cap: f64,
    p: f64,
    n: usize,
}

impl RelaxationProblem {
    pub fn new(cap: f64, p: f64, n: usize) -> Result<Self> {
        Exponent::in_bound_range(p)?;
        if n == 0 {
            return Err(Error::domain("N must be positive"));
        }
        if !(cap.is_finite() && cap > 1.0 / n as f64) {
            return Err(Error::domain(format!(
                "cap must exceed 1/N = {}, got {cap}",
                1.0 / n as f64
            )));
        }
        Ok(RelaxationProblem { cap, p, n })
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        f_unchecked(self.cap, self.p, t)
    }

    /// Boundary between the concave and convex parts of `f`: `c * (1/2 - p/4)`.
    pub fn concave_limit(&self) -> f64 {
        self.cap * inflection_threshold(self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// `k` masses of `1/k`, the rest zero.
    CaseI,
    /// `k` masses of `x`, one of `1 - kx`, the rest zero.
    CaseII,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelaxationCandidate {
    pub case_tag: CaseTag,
    pub k: usize,
    pub x: Option<f64>,
    pub value: f64,
}

impl RelaxationCandidate {
    /// The masses `t_1..t_N` this candidate stands for.
    pub fn masses(&self, n: usize) -> Vec<f64> {
        let mut t = vec![0.0; n];
        match (self.case_tag, self.x) {
            (CaseTag::CaseII, Some(x)) => {
                t[..self.k].fill(x);
                t[self.k] = 1.0 - self.k as f64 * x;
            }
            _ => t[..self.k].fill(1.0 / self.k as f64),
        }
        t
    }
}

/// `k * f(1/k)`; `+inf` when `1/k >= c`.
pub fn case_i_value(prob: &RelaxationProblem, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    Ok(k as f64 * prob.f(1.0 / k as f64))
}

/// `k * f(x) + f(1 - kx)`. Requires a point of the simplex: `x >= 0`, `kx <= 1`, `k < N`.
pub fn case_ii_value(prob: &RelaxationProblem, k: usize, x: f64) -> Result<f64> {
    if k == 0 || k >= prob.n {
        return Err(Error::domain(format!("case (ii) needs 1 <= k < N, got k={k}")));
    }
    let rest = 1.0 - k as f64 * x;
    if !(x >= 0.0) || rest < 0.0 {
        return Err(Error::domain(format!(
            "x={x} with k={k} leaves the simplex (1 - kx = {rest})"
        )));
    }
    Ok(case_ii_unchecked(prob, k, x))
}

#[inline]
fn case_ii_unchecked(prob: &RelaxationProblem, k: usize, x: f64) -> f64 {
    let rest = (1.0 - k as f64 * x).max(0.0);
    k as f64 * prob.f(x) + prob.f(rest)
}

/// Whether `(k, x)` satisfies the structured case-(ii) constraints:
/// `x >= c a_p`, `0 < 1 - kx < c a_p`, `x < c`.
pub fn is_case_ii_admissible(prob: &RelaxationProblem, k: usize, x: f64) -> bool {
    let lim = prob.concave_limit();
    let rest = 1.0 - k as f64 * x;
    x >= lim && rest > 0.0 && rest < lim && x < prob.cap && rest < prob.cap
}

/// Closed x-interval over which case (ii) is searched, or `None` when empty.
pub fn case_ii_interval(prob: &RelaxationProblem, k: usize) -> Option<(f64, f64)> {
    if k == 0 || k >= prob.n {
        return None;
    }
    let lim = prob.concave_limit();
    if lim <= 0.0 {
        return None;
    }
    let kf = k as f64;
    let lo = lim.max((1.0 - lim) / kf);
    let hi = (1.0 / kf).min(prob.cap);
    (lo <= hi).then_some((lo, hi))
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c == d {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Best case-(ii) point for a given `k`: golden-section over the whole interval,
/// a safety grid, and a local golden-section around the best grid point.
/// Returns `None` when the case is infeasible for this `k`.
pub fn minimize_case_ii(prob: &RelaxationProblem, k: usize) -> Option<(f64, f64)> {
    let (lo, hi) = case_ii_interval(prob, k)?;
    let eval = |x: f64| case_ii_unchecked(prob, k, x);
    let mut best = (lo, eval(lo));
    let mut consider = |x: f64, v: f64| {
        if v < best.1 {
            best = (x, v);
        }
    };
    consider(hi, eval(hi));
    if hi > lo {
        let (x, v) = golden_section(eval, lo, hi, SEARCH_X_TOL);
        consider(x, v);

        let h = (hi - lo) / SAFETY_GRID as f64;
        let (mut gi, mut gv) = (0usize, f64::INFINITY);
        for i in 0..=SAFETY_GRID {
            let v = eval(lo + h * i as f64);
            if v < gv {
                gi = i;
                gv = v;
            }
        }
        let gx = lo + h * gi as f64;
        consider(gx, gv);
        let a = (gx - h).max(lo);
        let b = (gx + h).min(hi);
        let (x, v) = golden_section(eval, a, b, SEARCH_X_TOL);
        consider(x, v);
    }
    Some(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelaxationOptimum {
    pub value: f64,
    pub candidate: RelaxationCandidate,
    /// Case-(i) `k` admitted by the structure filter but with `1/k >= c`.
    pub rejected_by_cap: Vec<usize>,
    pub candidates_examined: usize,
}

/// `M(c, p, N)` over the structured candidates.
pub fn m_value(prob: &RelaxationProblem) -> Result<RelaxationOptimum> {
    let lim = prob.concave_limit();
    let mut best: Option<RelaxationCandidate> = None;
    let mut rejected_by_cap = Vec::new();
    let mut examined = 0;
    let mut offer = |cand: RelaxationCandidate| {
        if cand.value.is_finite() && best.is_none_or(|b| cand.value < b.value) {
            best = Some(cand);
        }
    };

    for k in 1..=prob.n {
        let t = 1.0 / k as f64;
        if t < lim {
            continue;
        }
        if t >= prob.cap {
            rejected_by_cap.push(k);
            continue;
        }
        examined += 1;
        offer(RelaxationCandidate {
            case_tag: CaseTag::CaseI,
            k,
            x: None,
            value: case_i_value(prob, k)?,
        });
    }
    for k in 1..prob.n {
        if let Some((x, value)) = minimize_case_ii(prob, k) {
            examined += 1;
            offer(RelaxationCandidate {
                case_tag: CaseTag::CaseII,
                k,
                x: Some(x),
                value,
            });
        }
    }

    let candidate = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no finite candidate for c={}, p={}, N={}",
            prob.cap, prob.p, prob.n
        ))
    })?;
    Ok(RelaxationOptimum {
        value: candidate.value,
        candidate,
        rejected_by_cap,
        candidates_examined: examined,
    })
}

/// Exhaustive scan of the simplex at resolution `1/grid_steps`, skipping points
/// with a mass `>= c`.
pub fn m_bruteforce(prob: &RelaxationProblem, grid_steps: usize) -> Result<f64> {
    if prob.n > BRUTEFORCE_MAX_N {
        return Err(Error::precondition(format!(
            "brute force limited to N <= {BRUTEFORCE_MAX_N}, got {}",
            prob.n
        )));
    }
    if grid_steps == 0 {
        return Err(Error::domain("grid_steps must be positive"));
    }
    let table: Vec<f64> = (0..=grid_steps)
        .map(|i| prob.f(i as f64 / grid_steps as f64))
        .collect();
    if prob.n == 1 {
        return Ok(table[grid_steps]);
    }
    // parallel over the first coordinate; min is order independent
    let best = (0..=grid_steps)
        .into_par_iter()
        .map(|first| {
            let head = table[first];
            if !head.is_finite() {
                return f64::INFINITY;
            }
            head + min_compositions(&table, grid_steps - first, prob.n - 1)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

/// Minimum of `sum table[n_i]` over compositions of `remaining` into `parts` parts.
fn min_compositions(table: &[f64], remaining: usize, parts: usize) -> f64 {
    if parts == 1 {
        return table[remaining];
    }
    let mut best = f64::INFINITY;
    for first in 0..=remaining {
        let head = table[first];
        if !head.is_finite() || head >= best {
            continue;
        }
        let v = head + min_compositions(table, remaining - first, parts - 1);
        if v < best {
            best = v;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub energy: f64,
    pub relaxation: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Compares `E_p(A)` with `M(1/(N-d), p, N)`.
pub fn check_bound(gram: &GramMatrix, d: usize, p: f64) -> Result<BoundReport> {
    let exponent = Exponent::in_bound_range(p)?;
    let n = gram.order();
    if n <= d {
        return Err(Error::precondition(format!(
            "need N > d for the cap 1/(N-d), got N={n}, d={d}"
        )));
    }
    let rank = validate_rank(gram, d, RANK_TOL);
    if !rank.within {
        return Err(Error::precondition(format!(
            "matrix has numerical rank {} > d={d}",
            rank.rank
        )));
    }
    let prob = RelaxationProblem::new(1.0 / (n - d) as f64, p, n)?;
    Ok(bound_report(frame_energy(gram, exponent), m_value(&prob)?.value))
}

pub(crate) fn bound_report(energy: f64, relaxation: f64) -> BoundReport {
    let slack = energy - relaxation;
    BoundReport {
        energy,
        relaxation,
        slack,
        pass: slack >= -BOUND_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prob(c: f64, p: f64, n: usize) -> RelaxationProblem {
        RelaxationProblem::new(c, p, n).unwrap()
    }

    #[test]
    fn f_relax_values() {
        assert_eq!(f_relax(1.0, 1.3, 0.0).unwrap(), 0.0);
        for m in 1..6 {
            let c = 1.0 / m as f64;
            for &p in &[1.0, 1.5, 2.0] {
                let v = f_relax(c, p, c / 2.0).unwrap();
                assert!((v - 1.0).abs() < 1e-15, "{v}");
            }
        }
        assert_eq!(f_relax(1.0, 2.0, 0.5).unwrap(), 1.0);
        assert_eq!(f_relax(0.5, 1.0, 0.5).unwrap(), f64::INFINITY);
        assert!(f_relax(1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn case_i_examples() {
        for m in 1..8 {
            let c = 1.0 / m as f64;
            let pr = prob(c, 1.4, 2 * m + 2);
            let v = case_i_value(&pr, 2 * m).unwrap();
            assert!((v - 2.0 * m as f64).abs() < 1e-12);
            assert_eq!(case_i_value(&pr, m).unwrap(), f64::INFINITY);
        }
        assert_eq!(case_i_value(&prob(1.0, 2.0, 3), 2).unwrap(), 2.0);
    }

    #[test]
    fn case_ii_hand_value() {
        let v = case_ii_value(&prob(1.0, 2.0, 3), 1, 0.6).unwrap();
        assert!((v - 13.0 / 6.0).abs() < 1e-15);
        assert!(case_ii_value(&prob(1.0, 2.0, 3), 2, 0.6).is_err());
    }

    #[test]
    fn case_ii_continuity_at_one_over_k() {
        let pr = prob(0.5, 1.2, 6);
        for k in 3..6 {
            let a = case_ii_value(&pr, k, 1.0 / k as f64).unwrap();
            let b = case_i_value(&pr, k).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn collapsed_interval_returns_the_point() {
        // p = 1: limit 1/4, k = 4 gives lo = max(1/4, 3/16) = 1/4 = hi.
        let pr = prob(1.0, 1.0, 5);
        let (lo, hi) = case_ii_interval(&pr, 4).unwrap();
        assert_eq!(lo, hi);
        let (x, v) = minimize_case_ii(&pr, 4).unwrap();
        assert_eq!(x, lo);
        assert_eq!(v, case_ii_value(&pr, 4, lo).unwrap());
    }

    #[test]
    fn no_case_ii_at_p_two() {
        assert!(case_ii_interval(&prob(1.0, 2.0, 4), 2).is_none());
    }

    #[test]
    fn case_ii_matches_dense_grid() {
        let pr = prob(1.0, 1.5, 3);
        let (x, v) = minimize_case_ii(&pr, 1).unwrap();
        let (lo, hi) = case_ii_interval(&pr, 1).unwrap();
        let steps = ((hi - lo) / 1e-6).ceil() as usize;
        let grid = (0..=steps)
            .map(|i| case_ii_value(&pr, 1, (lo + (hi - lo) * i as f64 / steps as f64).min(hi)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(v <= grid + 1e-9, "{v} vs {grid} at x={x}");
        assert!(v >= grid - 1e-9);
    }

    #[test]
    fn m_value_orthoplex_regime() {
        let r = m_value(&prob(1.0, 1.0, 5)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
        let r = m_value(&prob(0.5, 1.05, 7)).unwrap();
        assert!((r.value - 4.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn bruteforce_two_points() {
        let pr = prob(1.0, 2.0, 2);
        let b = m_bruteforce(&pr, 1000).unwrap();
        let m = m_value(&pr).unwrap().value;
        assert!((b - m).abs() < 1e-5, "{b} vs {m}");
        assert_eq!(m, 2.0);
    }

    #[test]
    fn bruteforce_refuses_large_n() {
        assert!(matches!(m_bruteforce(&prob(1.0, 1.5, 6), 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn bruteforce_point_mass_bound() {
        // c > 1 admits t = (1, 0, ...): the result is at most f(1).
        let pr = prob(1.5, 1.3, 3);
        let b = m_bruteforce(&pr, 60).unwrap();
        assert!(b <= (1.0f64 / 0.5).powf(0.65) + 1e-15);
    }

    #[test]
    fn bound_rejects_n_not_above_d() {
        let id = GramMatrix::new(nalgebra::DMatrix::identity(3, 3)).unwrap();
        assert!(matches!(check_bound(&id, 3, 1.5), Err(Error::Precondition(_))));
    }

    #[test]
    fn problem_validation() {
        assert!(RelaxationProblem::new(0.2, 1.5, 5).is_err());
        assert!(RelaxationProblem::new(0.5, 2.5, 5).is_err());
        assert!(RelaxationProblem::new(0.5, 1.5, 0).is_err());
    }
}
