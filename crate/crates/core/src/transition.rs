//! Five points on the circle and the exponent at which the repeated
//! orthonormal configuration `{e1, e1, e2, e2, e2}` stops being optimal.
//!
//! The family has Gram matrix
//!
//! ```text
//!  1   1   0   a  -a
//!  1   1   0   a  -a
//!  0   0   1   s   s        s = sqrt(1 - a^2)
//!  a   a   s   1   b
//! -a  -a   s   b   1
//! ```
//!
//! which has rank 2 when `b = -1` or `b = 1 - 2a^2`. On the second branch the
//! ordered-pair energy is `2 + 8a^p + 2(1-2a^2)^p + 4(1-a^2)^(p/2)`. Four
//! off-diagonal entries equal `s`, hence the coefficient 4 on the last term.
//! The transition `(a*, p*)` is where the local minimum of this energy in `a`
//! touches the repeated-orthonormal value 8.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{abs_pow, GramMatrix};
use crate::minimizer::{threshold_bisect, MinimizeOptions, ThresholdEstimate};

/// Energy of `{e1, e1, e2, e2, e2}` under ordered counting.
pub const ORTHO_VALUE: f64 = 8.0;
/// Published 35-digit root of the transition system.
pub const REFERENCE_ALPHA: &str = "0.43421690071432109168188584186122094";
pub const REFERENCE_P: &str = "1.77766251887018589539510545748522601";
/// Published estimate of the seven-point transition.
pub const REFERENCE_P_SEVEN: &str = "1.840321171266";

/// Search window for stationary `alpha`, clear of both ends of `(0, 1/sqrt 2)`.
pub const ALPHA_MARGIN: f64 = 1e-6;
/// Scan points used to bracket the local minimum in `alpha`.
pub const ALPHA_SCAN: usize = 4000;
/// Target bisection width for `alpha`.
pub const ALPHA_TOL: f64 = 1e-15;
/// Declared solutions must have both residuals below this.
pub const RESIDUAL_TOL: f64 = 1e-12;

pub fn reference_alpha() -> f64 {
    REFERENCE_ALPHA.parse().expect("valid literal")
}

pub fn reference_p() -> f64 {
    REFERENCE_P.parse().expect("valid literal")
}

/// Number of leading significant digits on which `value` agrees with `reference`.
pub fn agreeing_digits(value: f64, reference: f64) -> u32 {
    if value == reference {
        return 17;
    }
    let rel = ((value - reference) / reference).abs();
    (-rel.log10()).floor().clamp(0.0, 17.0) as u32
}

fn max_alpha() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

/// `1 - 2 alpha^2`, with rounding residue at `alpha = 1/sqrt 2` snapped to zero.
fn one_minus_two_a2(alpha: f64) -> f64 {
    let v = 1.0 - 2.0 * alpha * alpha;
    if v < 0.0 && v > -4.0 * f64::EPSILON {
        0.0
    } else {
        v
    }
}

/// The 5x5 Gram matrix of the family, rows ordered as above.
pub fn five_point_gram(alpha: f64, beta: f64) -> Result<GramMatrix> {
    if !(alpha.abs() <= 1.0) || !beta.is_finite() {
        return Err(Error::domain(format!("need |alpha| <= 1, got alpha={alpha}, beta={beta}")));
    }
    let a = alpha;
    let s = (1.0 - a * a).sqrt();
    let rows = [
        [1.0, 1.0, 0.0, a, -a],
        [1.0, 1.0, 0.0, a, -a],
        [0.0, 0.0, 1.0, s, s],
        [a, a, s, 1.0, beta],
        [-a, -a, s, beta, 1.0],
    ];
    GramMatrix::from_rows(&rows.map(|r| r.to_vec()))
}

fn minor_determinant(alpha: f64, beta: f64) -> f64 {
    // det [[1, a, -a], [a, 1, b], [-a, b, 1]] by cofactors along the first row
    let a = alpha;
    1.0 * (1.0 - beta * beta) - a * (a + a * beta) + (-a) * (a * beta + a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaRoots {
    pub roots: [f64; 2],
    pub determinants: [f64; 2],
}

/// `beta` values making the 3x3 minor singular: `-1` and `1 - 2 alpha^2`.
pub fn beta_roots(alpha: f64) -> Result<BetaRoots> {
    if !(alpha.abs() <= 1.0) {
        return Err(Error::domain(format!("need |alpha| <= 1, got {alpha}")));
    }
    let roots = [-1.0, 1.0 - 2.0 * alpha * alpha];
    Ok(BetaRoots {
        roots,
        determinants: roots.map(|b| minor_determinant(alpha, b)),
    })
}

fn check_alpha(alpha: f64, p: f64) -> Result<()> {
    if !(0.0..=max_alpha()).contains(&alpha) {
        return Err(Error::domain(format!("alpha must lie in [0, 1/sqrt 2], got {alpha}")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::domain(format!("p must be > 0, got {p}")));
    }
    Ok(())
}

/// `2 + 8 a^p + 2 (1 - 2a^2)^p + 4 (1 - a^2)^(p/2)` on the `b = 1 - 2a^2` branch.
pub fn five_point_energy(alpha: f64, p: f64) -> Result<f64> {
    check_alpha(alpha, p)?;
    Ok(energy_unchecked(alpha, p))
}

#[inline]
fn energy_unchecked(a: f64, p: f64) -> f64 {
    2.0 + 8.0 * abs_pow(a, p) + 2.0 * abs_pow(one_minus_two_a2(a), p) + 4.0 * abs_pow(1.0 - a * a, 0.5 * p)
}

/// Energy on the `b = -1` branch: `4 + 8 a^p + 4 (1 - a^2)^(p/2)`.
pub fn five_point_energy_beta_minus_one(alpha: f64, p: f64) -> Result<f64> {
    check_alpha(alpha, p)?;
    Ok(4.0 + 8.0 * abs_pow(alpha, p) + 4.0 * abs_pow(1.0 - alpha * alpha, 0.5 * p))
}

/// `p (8 a^(p-1) - 8 a (1-2a^2)^(p-1) - 4 a (1-a^2)^(p/2-1))` for `a` strictly inside.
pub fn five_point_energy_dalpha(alpha: f64, p: f64) -> Result<f64> {
    check_alpha(alpha, p)?;
    if alpha == 0.0 || alpha == max_alpha() {
        return Err(Error::domain("derivative needs alpha strictly inside (0, 1/sqrt 2)"));
    }
    Ok(dalpha_unchecked(alpha, p))
}

#[inline]
fn dalpha_unchecked(a: f64, p: f64) -> f64 {
    let c = 1.0 - 2.0 * a * a;
    let s2 = 1.0 - a * a;
    p * (8.0 * a.powf(p - 1.0) - 8.0 * a * c.powf(p - 1.0) - 4.0 * a * s2.powf(0.5 * p - 1.0))
}

/// Local minimum of the family's energy in `alpha` for fixed `p`: the last
/// sign change of the derivative from negative to positive, refined by bisection.
pub fn stationary_alpha(p: f64) -> Option<f64> {
    let lo = ALPHA_MARGIN;
    let hi = max_alpha() - ALPHA_MARGIN;
    let at = |i: usize| lo + (hi - lo) * i as f64 / ALPHA_SCAN as f64;
    let mut bracket = None;
    let mut prev = dalpha_unchecked(lo, p);
    for i in 1..=ALPHA_SCAN {
        let cur = dalpha_unchecked(at(i), p);
        if prev < 0.0 && cur >= 0.0 {
            bracket = Some((at(i - 1), at(i)));
        }
        prev = cur;
    }
    let (mut a, mut b) = bracket?;
    while b - a > ALPHA_TOL {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if dalpha_unchecked(mid, p) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    // keep whichever end has the smaller derivative
    Some(if dalpha_unchecked(a, p).abs() <= dalpha_unchecked(b, p).abs() { a } else { b })
}

/// Energy at the local minimum in `alpha`, or `+inf` if there is none.
pub fn stationary_energy(p: f64) -> (Option<f64>, f64) {
    match stationary_alpha(p) {
        Some(a) => (Some(a), energy_unchecked(a, p)),
        None => (None, f64::INFINITY),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionSolution {
    pub alpha_star: f64,
    pub p_star: f64,
    pub target: f64,
    pub energy_residual: f64,
    pub stationarity_residual: f64,
}

impl TransitionSolution {
    pub fn residuals_within(&self, tol: f64) -> bool {
        self.energy_residual.abs() <= tol && self.stationarity_residual.abs() <= tol
    }
}

/// Lowest exponent tried for the outer bracket.
const P_FLOOR: f64 = 1.0;
/// Upper bracket candidates; the first whose stationary energy is below target wins.
const P_CEILINGS: [f64; 9] = [2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0];

/// Solves `{E(alpha, p) = target, dE/dalpha = 0}` by nested bisection: the
/// inner solve gives the stationary `alpha` for each `p`, the outer one moves
/// `p` until the stationary energy crosses `target`.
pub fn solve_with_target(target: f64) -> Result<TransitionSolution> {
    let excess = |p: f64| stationary_energy(p).1 - target;
    if !(excess(P_FLOOR) > 0.0) {
        return Err(Error::Solver(format!(
            "stationary energy already below {target} at p={P_FLOOR}"
        )));
    }
    let mut hi = P_CEILINGS.iter().copied().find(|&p| excess(p) < 0.0).ok_or_else(|| {
        Error::Solver(format!(
            "no exponent in [{P_FLOOR}, {}] brings the stationary energy below {target}",
            P_CEILINGS[P_CEILINGS.len() - 1]
        ))
    })?;
    let mut lo = P_FLOOR;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (p, alpha) = [lo, hi]
        .into_iter()
        .filter_map(|p| stationary_alpha(p).map(|a| (p, a)))
        .min_by(|x, y| {
            let ex = (energy_unchecked(x.1, x.0) - target).abs();
            let ey = (energy_unchecked(y.1, y.0) - target).abs();
            ex.total_cmp(&ey)
        })
        .ok_or_else(|| Error::Solver(format!("no stationary alpha near p in [{lo}, {hi}]")))?;
    Ok(TransitionSolution {
        alpha_star: alpha,
        p_star: p,
        target,
        energy_residual: energy_unchecked(alpha, p) - target,
        stationarity_residual: dalpha_unchecked(alpha, p),
    })
}

/// The five-point transition: target equal to the repeated-orthonormal value 8.
pub fn solve_transition() -> Result<TransitionSolution> {
    solve_with_target(ORTHO_VALUE)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub epsilon: f64,
    pub alpha: f64,
    pub p: f64,
    pub energy: f64,
    /// `alpha` truncated to 12 decimal digits.
    pub alpha_truncated: f64,
    pub energy_truncated: f64,
}

/// A configuration of the family beating the repeated-orthonormal value:
/// solves the system with target `8 - 2 epsilon`.
pub fn subthreshold_witness(epsilon: f64) -> Result<Witness> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::domain(format!("epsilon must lie in (0, 0.5], got {epsilon}")));
    }
    let sol = solve_with_target(ORTHO_VALUE - 2.0 * epsilon)?;
    let alpha_truncated = (sol.alpha_star * 1e12).trunc() / 1e12;
    Ok(Witness {
        epsilon,
        alpha: sol.alpha_star,
        p: sol.p_star,
        energy: energy_unchecked(sol.alpha_star, sol.p_star),
        alpha_truncated,
        energy_truncated: energy_unchecked(alpha_truncated, sol.p_star),
    })
}

/// Bracket searched by [`circle_transition`].
pub const CIRCLE_BRACKET: (f64, f64) = (1.5, 2.0);

/// Transition for `N` points on the circle by global search: bisects on `p`
/// for the first exponent where random-restart minimization beats the
/// repeated-orthonormal value.
pub fn circle_transition(n: usize, tol: f64, opts: &MinimizeOptions) -> Result<ThresholdEstimate> {
    if n < 3 {
        return Err(Error::domain(format!("need N >= 3, got {n}")));
    }
    threshold_bisect(2, n, CIRCLE_BRACKET.0, CIRCLE_BRACKET.1, tol, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{frame_energy, validate_rank, Exponent, RANK_TOL};

    #[test]
    fn gram_shape() {
        let g = five_point_gram(0.0, 1.0).unwrap();
        assert_eq!(frame_energy(&g, Exponent::new(1.3).unwrap()), 8.0);
        let g = five_point_gram(0.4, 0.68).unwrap();
        let r = validate_rank(&g, 2, RANK_TOL);
        assert!(r.within && r.rank == 2, "{r:?}");
        assert!(r.singular_values[2] < 1e-10);
        assert!(five_point_gram(1.2, 0.0).is_err());
    }

    #[test]
    fn beta_root_examples() {
        let r = beta_roots(0.0).unwrap();
        assert_eq!(r.roots, [-1.0, 1.0]);
        let r = beta_roots(max_alpha()).unwrap();
        assert!(r.roots[1].abs() < 1e-15);
        let r = beta_roots(0.5).unwrap();
        assert_eq!(r.roots, [-1.0, 0.5]);
        assert!(r.determinants.iter().all(|d| d.abs() <= 1e-15));
    }

    #[test]
    fn energy_at_zero_alpha() {
        for &p in &[1.0, 1.5, 2.0] {
            assert_eq!(five_point_energy(0.0, p).unwrap(), 8.0);
        }
        assert!(five_point_energy(0.8, 1.5).is_err());
    }

    #[test]
    fn derivative_small_alpha_at_p_two() {
        let d = five_point_energy_dalpha(1e-8, 2.0).unwrap();
        assert!(d.abs() < 1e-6, "{d}");
    }

    #[test]
    fn no_stationary_point_far_below_transition() {
        assert_eq!(stationary_alpha(1.2), None);
        assert!(stationary_alpha(1.9).is_some());
    }

    #[test]
    fn witness_domain() {
        assert!(subthreshold_witness(0.0).is_err());
        assert!(subthreshold_witness(0.6).is_err());
    }

    #[test]
    fn digits() {
        assert_eq!(agreeing_digits(1.0, 1.0), 17);
        assert_eq!(agreeing_digits(1.000_002, 1.0), 5);
    }
}
