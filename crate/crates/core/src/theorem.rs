//! Numerical check of the lower bound `E_p(A) >= 2m` for `N = d + m` vectors.
//!
//! The bound reduces to `M(1/m, p, N) >= 2m` for `p <= p0(m)`. Case (ii)
//! candidates with `k = j` masses are the functions
//!
//! ```text
//! g_j(x) = j (mx/(1-mx))^q + (m(1-jx)/(1-m(1-jx)))^q,   x in I = (1/(j+1), 1/j)
//! ```
//!
//! for `j in [m, 4m]`. The argument is that `g_j' = 0` has at most one root in
//! `I` (via a convex `f_aux` and a concave `g_aux` that meet at the left end),
//! that any root is a local maximum, and that the endpoint values are `>= 2m`.
//! [`verify_theorem`] evaluates each of those steps and records margins.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::relaxation::{case_i_value, RelaxationProblem};

/// Minimum of `g_j` on `I` must be at least `2m - MIN_TOL`.
pub const MIN_TOL: f64 = 1e-9;
/// Closed-form endpoint values vs. direct evaluation.
pub const ENDPOINT_TOL: f64 = 1e-12;
/// `|g_j'(1/(j+1))|` bound.
pub const LEFT_DERIVATIVE_TOL: f64 = 1e-9;
/// Ties in the integer minimization over `j`.
pub const TIE_TOL: f64 = 1e-12;
/// Scan resolution for critical points.
pub const CRITICAL_SCAN: usize = 10_000;
/// Bisection tolerance for critical points.
pub const CRITICAL_X_TOL: f64 = 1e-13;
/// Grid for the convexity/concavity and minimum checks.
pub const CHECK_GRID: usize = 1000;
/// Distances from `1/j` at which the divergence of `g_j'` is sampled.
pub const DIVERGENCE_OFFSETS: [f64; 3] = [1e-6, 1e-9, 1e-12];
/// Minimum growth of `|g_j'|` between consecutive divergence offsets.
pub const DIVERGENCE_GROWTH: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremParams {
    pub m: usize,
    pub p0: f64,
    pub q: f64,
}

/// `p0(m) = 2 ln((2m+1)/(2m)) / ln((m+1)/m)`, `q = p0/2`.
pub fn p_threshold(m: usize) -> TheoremParams {
    let mf = m as f64;
    let p0 = 2.0 * (1.0 / (2.0 * mf)).ln_1p() / (1.0 / mf).ln_1p();
    TheoremParams { m, p0, q: 0.5 * p0 }
}

/// Interval `I_j = (1/(j+1), 1/j)`.
#[inline]
pub fn interval(j: usize) -> (f64, f64) {
    (1.0 / (j as f64 + 1.0), 1.0 / j as f64)
}

/// Sample points `[a + delta, b - delta]` with `delta = 1e-9 |I|`.
fn interior_grid(j: usize, points: usize) -> Vec<f64> {
    let (a, b) = interval(j);
    let delta = 1e-9 * (b - a);
    let (lo, hi) = (a + delta, b - delta);
    (0..=points)
        .map(|i| lo + (hi - lo) * i as f64 / points as f64)
        .collect()
}

/// `1 - j x`, with rounding residue at `x = 1/j` snapped to zero.
#[inline]
fn tail(j: usize, x: f64) -> f64 {
    let y = 1.0 - j as f64 * x;
    if y < 0.0 && y > -4.0 * f64::EPSILON {
        0.0
    } else {
        y
    }
}

fn check_args(m: usize, j: usize, x: f64) -> Result<(f64, f64)> {
    if m == 0 || j == 0 {
        return Err(Error::domain("m and j must be positive"));
    }
    let mf = m as f64;
    let y = tail(j, x);
    if !(x > 0.0) || y < 0.0 || !(1.0 - mf * x > 0.0) || !(1.0 - mf * y > 0.0) {
        return Err(Error::domain(format!("x={x} outside the domain of g_j (m={m}, j={j})")));
    }
    Ok((mf, y))
}

/// `g_j(x)`.
pub fn g_value(m: usize, j: usize, x: f64, q: f64) -> Result<f64> {
    let (mf, y) = check_args(m, j, x)?;
    let first = (mf * x / (1.0 - mf * x)).powf(q);
    let second = if y == 0.0 { 0.0 } else { (mf * y / (1.0 - mf * y)).powf(q) };
    Ok(j as f64 * first + second)
}

/// Closed-form `g_j'(x)`. Requires `x < 1/j`.
pub fn g_derivative(m: usize, j: usize, x: f64, q: f64) -> Result<f64> {
    let (mf, y) = check_args(m, j, x)?;
    if y == 0.0 {
        return Err(Error::domain("g_j' is unbounded at x = 1/j"));
    }
    let jf = j as f64;
    let u = 1.0 - mf * x;
    let v = 1.0 - mf * y;
    let lead = q * jf * mf;
    Ok(lead * (mf * x / u).powf(q - 1.0) / (u * u) - lead * (mf * y / v).powf(q - 1.0) / (v * v))
}

/// `gamma = 1 - 2/(q+1)`, the exponent of `g_aux`.
#[inline]
pub fn aux_exponent(q: f64) -> f64 {
    1.0 - 2.0 / (q + 1.0)
}

fn aux_args(m: usize, j: usize, x: f64) -> Result<(f64, f64, f64)> {
    let mf = m as f64;
    let jf = j as f64;
    let y = 1.0 - jf * x;
    let den = 1.0 + mf * (jf * x - 1.0);
    if !(x > 0.0 && y > 0.0 && den > 0.0) {
        return Err(Error::domain(format!("x={x} outside the domain of the auxiliary pair")));
    }
    Ok((mf, jf, den))
}

/// `(f_aux, g_aux)` with `f_aux = (1-mx)/(1+m(jx-1))` and `g_aux = (x/(1-jx))^gamma`.
pub fn aux_pair(m: usize, j: usize, x: f64, q: f64) -> Result<(f64, f64)> {
    let (mf, jf, den) = aux_args(m, j, x)?;
    let f = (1.0 - mf * x) / den;
    let g = (x / (1.0 - jf * x)).powf(aux_exponent(q));
    Ok((f, g))
}

/// First derivatives `(f_aux', g_aux')`.
pub fn aux_pair_derivative(m: usize, j: usize, x: f64, q: f64) -> Result<(f64, f64)> {
    let (mf, jf, den) = aux_args(m, j, x)?;
    let gamma = aux_exponent(q);
    let y = 1.0 - jf * x;
    let f1 = -mf * (1.0 + jf - mf) / (den * den);
    let g1 = gamma * (x / y).powf(gamma - 1.0) / (y * y);
    Ok((f1, g1))
}

/// Closed-form second derivatives `(f_aux'', g_aux'')`.
pub fn aux_pair_second_derivative(m: usize, j: usize, x: f64, q: f64) -> Result<(f64, f64)> {
    let (mf, jf, den) = aux_args(m, j, x)?;
    let gamma = aux_exponent(q);
    let y = 1.0 - jf * x;
    let f2 = 2.0 * jf * (1.0 + jf - mf) * mf * mf / den.powi(3);
    let g2 = gamma * (x / y).powf(gamma) * (gamma - 1.0 + 2.0 * jf * x) / (x * x * y * y);
    Ok((f2, g2))
}

/// Unique interior zero of `g_j'`, located by a sign-change scan and bisection.
///
/// Returns [`Error::StructureViolation`] when the scan brackets more than one root.
pub fn find_critical_point(m: usize, j: usize, q: f64) -> Result<Option<f64>> {
    let grid = interior_grid(j, CRITICAL_SCAN);
    let signs: Vec<bool> = grid
        .iter()
        .map(|&x| g_derivative(m, j, x, q).map(|d| d > 0.0))
        .collect::<Result<_>>()?;
    let brackets: Vec<usize> = (0..CRITICAL_SCAN).filter(|&i| signs[i] != signs[i + 1]).collect();
    match brackets.as_slice() {
        [] => Ok(None),
        [i] => {
            let (mut lo, mut hi) = (grid[*i], grid[*i + 1]);
            let lo_positive = signs[*i];
            while hi - lo > CRITICAL_X_TOL {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (g_derivative(m, j, mid, q)? > 0.0) == lo_positive {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(Some(0.5 * (lo + hi)))
        }
        many => Err(Error::StructureViolation(format!(
            "g_j' changes sign {} times in I for m={m}, j={j}",
            many.len()
        ))),
    }
}

/// Closed-form `(g_j(1/(j+1)), g_j(1/j))`. The right value is `+inf` when `j <= m`.
pub fn endpoint_values(m: usize, j: usize, q: f64) -> (f64, f64) {
    let (mf, jf) = (m as f64, j as f64);
    let left = if jf + 1.0 > mf {
        (1.0 + jf) * (mf / (1.0 + jf - mf)).powf(q)
    } else {
        f64::INFINITY
    };
    let right = if j > m {
        jf * (mf / (jf - mf)).powf(q)
    } else {
        f64::INFINITY
    };
    (left, right)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub m: usize,
    pub j: Option<usize>,
    pub x: Option<f64>,
    pub check: String,
    pub detail: String,
}

/// How `g_j'` behaves as `x -> 1/j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RightLimit {
    /// `g_j'` decreases without bound while `g_j(1/j)` is finite.
    MinusInfinity,
    /// `j = m`: `g_j` itself blows up at `1/j`, `g_j' -> +inf`.
    Pole,
    /// Neither pattern was observed.
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointRecord {
    pub j: usize,
    pub interval: (f64, f64),
    pub critical_x: Option<f64>,
    pub critical_value: Option<f64>,
    pub critical_is_local_max: Option<bool>,
    pub endpoint_left_value: f64,
    pub endpoint_right_value: f64,
    pub left_formula_error: f64,
    pub right_formula_error: Option<f64>,
    pub derivative_left: f64,
    pub right_limit: RightLimit,
    pub derivative_near_right: Vec<f64>,
    pub aux_left_values: (f64, f64),
    /// `g_aux'(a) - f_aux'(a)` at the left end; the argument needs it `>= 0` for `j < 4m`.
    pub aux_slope_margin: f64,
    pub aux_convexity_violations: usize,
    pub aux_concavity_violations: usize,
    /// Smallest `x` in the grid where `g_aux` fails to be concave.
    pub aux_concavity_first_violation: Option<f64>,
    pub aux_sign_changes: usize,
    pub min_on_interval: f64,
    pub argmin_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseIRecord {
    pub p: f64,
    pub min_value: f64,
    pub argmin_k: usize,
    pub ks_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceRecord {
    pub name: String,
    pub js: Vec<usize>,
    pub values: Vec<f64>,
    pub min_value: f64,
    pub argmin: Vec<usize>,
    pub unimodal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub m: usize,
    pub p0: f64,
    pub p: f64,
    pub q: f64,
    pub exploratory: bool,
    pub records: Vec<CriticalPointRecord>,
    pub case_i: Vec<CaseIRecord>,
    pub endpoint_sequences: Vec<SequenceRecord>,
    /// Intervals whose minimum of `g_j` falls below `2m`.
    pub dips: Vec<usize>,
    pub failures: Vec<Failure>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn first_failure(&self) -> Option<&Failure> {
        self.failures.first()
    }
}

struct Checker<'a> {
    m: usize,
    failures: &'a mut Vec<Failure>,
}

impl Checker<'_> {
    fn require(&mut self, ok: bool, j: Option<usize>, x: Option<f64>, check: &str, detail: String) {
        if !ok {
            self.failures.push(Failure {
                m: self.m,
                j,
                x,
                check: check.to_string(),
                detail,
            });
        }
    }
}

fn second_difference_violations(
    xs: &[f64],
    h: f64,
    f: impl Fn(f64) -> Result<f64>,
    expect_positive: bool,
) -> Result<(usize, Option<f64>)> {
    let mut count = 0;
    let mut first = None;
    for &x in &xs[1..xs.len() - 1] {
        let d2 = f(x - h)? - 2.0 * f(x)? + f(x + h)?;
        let ok = if expect_positive { d2 > 0.0 } else { d2 < 0.0 };
        if !ok {
            count += 1;
            first.get_or_insert(x);
        }
    }
    Ok((count, first))
}

fn check_interval(m: usize, j: usize, q: f64, failures: &mut Vec<Failure>) -> Result<CriticalPointRecord> {
    let mut chk = Checker { m, failures };
    let two_m = 2.0 * m as f64;
    let (a, b) = interval(j);
    let (left_cf, right_cf) = endpoint_values(m, j, q);

    let left_direct = g_value(m, j, a, q)?;
    let left_err = (left_direct - left_cf).abs();
    chk.require(
        left_err <= ENDPOINT_TOL,
        Some(j),
        Some(a),
        "endpoint_left_formula",
        format!("direct {left_direct} vs closed form {left_cf}"),
    );
    let right_err = if j > m {
        let direct = g_value(m, j, b, q)?;
        let err = (direct - right_cf).abs();
        chk.require(
            err <= ENDPOINT_TOL,
            Some(j),
            Some(b),
            "endpoint_right_formula",
            format!("direct {direct} vs closed form {right_cf}"),
        );
        Some(err)
    } else {
        None
    };

    let derivative_left = g_derivative(m, j, a, q)?;
    chk.require(
        derivative_left.abs() <= LEFT_DERIVATIVE_TOL,
        Some(j),
        Some(a),
        "derivative_left_zero",
        format!("g_j'(1/(j+1)) = {derivative_left}"),
    );

    let near: Vec<f64> = DIVERGENCE_OFFSETS
        .iter()
        .map(|&off| g_derivative(m, j, b - off, q))
        .collect::<Result<_>>()?;
    let grows = near.windows(2).all(|w| w[1].abs() >= DIVERGENCE_GROWTH * w[0].abs());
    let right_limit = if grows && near.iter().all(|&d| d < 0.0) && right_cf.is_finite() {
        RightLimit::MinusInfinity
    } else if grows && near.iter().all(|&d| d > 0.0) && !right_cf.is_finite() {
        RightLimit::Pole
    } else {
        RightLimit::Unclassified
    };
    let expected = if j > m { RightLimit::MinusInfinity } else { RightLimit::Pole };
    chk.require(
        right_limit == expected,
        Some(j),
        Some(b),
        "derivative_right_limit",
        format!("expected {expected:?}, observed {right_limit:?}: g_j' near 1/j = {near:?}"),
    );

    // auxiliary pair
    let aux_left_values = aux_pair(m, j, a, q)?;
    chk.require(
        (aux_left_values.0 - 1.0).abs() <= ENDPOINT_TOL && (aux_left_values.1 - 1.0).abs() <= ENDPOINT_TOL,
        Some(j),
        Some(a),
        "aux_left_agreement",
        format!("(f_aux, g_aux) at 1/(j+1) = {aux_left_values:?}"),
    );
    let (fd, gd) = aux_pair_derivative(m, j, a, q)?;
    let aux_slope_margin = gd - fd;
    if j < 4 * m {
        chk.require(
            aux_slope_margin >= 0.0,
            Some(j),
            Some(a),
            "aux_slope_order",
            format!("f_aux' = {fd} exceeds g_aux' = {gd} at 1/(j+1)"),
        );
    }

    let grid = interior_grid(j, CHECK_GRID);
    let h = 0.5 * (grid[1] - grid[0]);
    let mut convex_bad = 0;
    let mut concave_bad = 0;
    let mut concave_first = None;
    for &x in &grid {
        let (f2, g2) = aux_pair_second_derivative(m, j, x, q)?;
        if !(f2 > 0.0) {
            convex_bad += 1;
        }
        if !(g2 < 0.0) {
            concave_bad += 1;
            concave_first.get_or_insert(x);
        }
    }
    let (fd_bad, _) = second_difference_violations(&grid, h, |x| Ok(aux_pair(m, j, x, q)?.0), true)?;
    let (gd_bad, gd_first) = second_difference_violations(&grid, h, |x| Ok(aux_pair(m, j, x, q)?.1), false)?;
    let aux_convexity_violations = convex_bad.max(fd_bad);
    let aux_concavity_violations = concave_bad.max(gd_bad);
    let aux_concavity_first_violation = match (concave_first, gd_first) {
        (Some(u), Some(v)) => Some(u.min(v)),
        (u, v) => u.or(v),
    };
    chk.require(
        aux_convexity_violations == 0,
        Some(j),
        None,
        "aux_convexity",
        format!("f_aux not convex at {aux_convexity_violations} of {} grid points", grid.len()),
    );
    chk.require(
        aux_concavity_violations == 0,
        Some(j),
        aux_concavity_first_violation,
        "aux_concavity",
        format!("g_aux not concave at {aux_concavity_violations} of {} grid points", grid.len()),
    );

    let diffs: Vec<f64> = grid
        .iter()
        .map(|&x| aux_pair(m, j, x, q).map(|(f, g)| f - g))
        .collect::<Result<_>>()?;
    let aux_sign_changes = diffs.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count();
    let max_changes = if j == 4 * m { 0 } else { 1 };
    chk.require(
        aux_sign_changes <= max_changes,
        Some(j),
        None,
        "aux_crossings",
        format!("f_aux - g_aux changes sign {aux_sign_changes} times"),
    );

    // critical points of g_j
    let critical_x = match find_critical_point(m, j, q) {
        Ok(x) => x,
        Err(Error::StructureViolation(msg)) => {
            chk.require(false, Some(j), None, "critical_uniqueness", msg);
            None
        }
        Err(e) => return Err(e),
    };
    if j == 4 * m {
        chk.require(
            critical_x.is_none(),
            Some(j),
            critical_x,
            "no_critical_at_4m",
            "a critical point was found for j = 4m".into(),
        );
    }
    let (critical_value, critical_is_local_max) = match critical_x {
        Some(xc) => {
            let v = g_value(m, j, xc, q)?;
            let probe = 1e-6 * (b - a);
            let is_max = v >= g_value(m, j, xc - probe, q)?
                && v >= g_value(m, j, xc + probe, q)?
                && v >= left_cf
                && (right_cf.is_infinite() || v >= right_cf);
            chk.require(
                is_max,
                Some(j),
                Some(xc),
                "critical_is_local_max",
                format!("g_j({xc}) = {v} is not a local maximum"),
            );
            (Some(v), Some(is_max))
        }
        None => (None, None),
    };

    let mut min_on_interval = left_cf;
    let mut argmin_x = a;
    let mut consider = |x: f64, v: f64| {
        if v < min_on_interval {
            min_on_interval = v;
            argmin_x = x;
        }
    };
    consider(b, right_cf);
    for &x in &grid {
        consider(x, g_value(m, j, x, q)?);
    }
    if let (Some(x), Some(v)) = (critical_x, critical_value) {
        consider(x, v);
    }
    chk.require(
        min_on_interval >= two_m - MIN_TOL,
        Some(j),
        Some(argmin_x),
        "interval_minimum",
        format!("min g_j = {min_on_interval} < 2m = {two_m}"),
    );

    Ok(CriticalPointRecord {
        j,
        interval: (a, b),
        critical_x,
        critical_value,
        critical_is_local_max,
        endpoint_left_value: left_cf,
        endpoint_right_value: right_cf,
        left_formula_error: left_err,
        right_formula_error: right_err,
        derivative_left,
        right_limit,
        derivative_near_right: near,
        aux_left_values,
        aux_slope_margin,
        aux_convexity_violations,
        aux_concavity_violations,
        aux_concavity_first_violation,
        aux_sign_changes,
        min_on_interval,
        argmin_x,
    })
}

/// Whether `values` is non-increasing then non-decreasing, up to [`TIE_TOL`].
pub fn is_unimodal(values: &[f64]) -> bool {
    let mut rising = false;
    for w in values.windows(2) {
        if w[1] > w[0] + TIE_TOL {
            rising = true;
        } else if rising && w[1] < w[0] - TIE_TOL {
            return false;
        }
    }
    true
}

fn sequence_record(name: &str, js: Vec<usize>, values: Vec<f64>) -> SequenceRecord {
    let min_value = values.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin = js
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v <= min_value + TIE_TOL)
        .map(|(&j, _)| j)
        .collect();
    SequenceRecord {
        name: name.into(),
        unimodal: is_unimodal(&values),
        js,
        values,
        min_value,
        argmin,
    }
}

/// Runs every check of the argument for excess `m`.
///
/// With `p_override`, `q = p/2` replaces `q_m` and the report is marked
/// exploratory; dips below `2m` are then recorded in `dips` and `failures`
/// but are an expected outcome outside the proven range.
pub fn verify_theorem(m: usize, p_override: Option<f64>) -> Result<VerificationReport> {
    if m == 0 {
        return Err(Error::domain("m must be >= 1"));
    }
    let params = p_threshold(m);
    let p = p_override.unwrap_or(params.p0);
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::domain(format!("exponent must lie in [1, 2], got {p}")));
    }
    let q = 0.5 * p;
    let two_m = 2.0 * m as f64;

    let per_j: Vec<(CriticalPointRecord, Vec<Failure>)> = (m..=4 * m)
        .into_par_iter()
        .map(|j| {
            let mut f = Vec::new();
            check_interval(m, j, q, &mut f).map(|r| (r, f))
        })
        .collect::<Result<_>>()?;
    let mut failures = Vec::new();
    let mut records = Vec::with_capacity(per_j.len());
    for (r, f) in per_j {
        records.push(r);
        failures.extend(f);
    }
    let dips = records
        .iter()
        .filter(|r| r.min_on_interval < two_m - MIN_TOL)
        .map(|r| r.j)
        .collect();

    // case (i): k masses of 1/k with c = 1/m, at p and ten smaller exponents
    let mut chk = Checker { m, failures: &mut failures };
    let mut case_i = Vec::new();
    for i in 0..=10 {
        let pi = if i == 10 { p } else { 1.0 + (p - 1.0) * i as f64 / 10.0 };
        let prob = RelaxationProblem::new(1.0 / m as f64, pi, 8 * m + 2)?;
        let lim = prob.concave_limit();
        let mut best = (f64::INFINITY, 0usize);
        let mut checked = 0;
        for k in (m + 1)..=(8 * m + 2) {
            if 1.0 / (k as f64) < lim {
                break;
            }
            checked += 1;
            let v = case_i_value(&prob, k)?;
            if v < best.0 {
                best = (v, k);
            }
        }
        chk.require(
            best.0 >= two_m - MIN_TOL,
            None,
            None,
            "case_i_minimum",
            format!("min_k k f(1/k) = {} at k={} for p={pi}", best.0, best.1),
        );
        case_i.push(CaseIRecord {
            p: pi,
            min_value: best.0,
            argmin_k: best.1,
            ks_checked: checked,
        });
    }

    // integer minimization over j of the endpoint values
    let js_left: Vec<usize> = (m..=8 * m).collect();
    let js_right: Vec<usize> = ((m + 1)..=8 * m).collect();
    let left = sequence_record(
        "left",
        js_left.clone(),
        js_left.iter().map(|&j| endpoint_values(m, j, q).0).collect(),
    );
    let right = sequence_record(
        "right",
        js_right.clone(),
        js_right.iter().map(|&j| endpoint_values(m, j, q).1).collect(),
    );
    for seq in [&left, &right] {
        chk.require(
            seq.unimodal,
            None,
            None,
            "endpoint_sequence_unimodal",
            format!("{} endpoint values are not decreasing-then-increasing in j", seq.name),
        );
        chk.require(
            (seq.min_value - two_m).abs() <= TIE_TOL * two_m.max(1.0) && seq.min_value >= two_m - MIN_TOL,
            None,
            None,
            "endpoint_sequence_minimum",
            format!("{} endpoint minimum {} differs from 2m", seq.name, seq.min_value),
        );
        chk.require(
            seq.argmin.iter().any(|&j| j == 2 * m || j == 2 * m + 1),
            None,
            None,
            "endpoint_sequence_argmin",
            format!("{} endpoint minimum attained at {:?}", seq.name, seq.argmin),
        );
    }

    let pass = failures.is_empty();
    Ok(VerificationReport {
        m,
        p0: params.p0,
        p,
        q,
        exploratory: p_override.is_some(),
        records,
        case_i,
        endpoint_sequences: vec![left, right],
        dips,
        failures,
        pass,
    })
}
