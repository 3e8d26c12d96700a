//! Quadrature variances, the two-mode correlation function and the `|xi|`
//! scans that locate squeezing windows.
//!
//! Every observable is computed twice: from closed forms in the
//! normalization series (sector weights `w_p = N^2 |xi|^{2p} / ([p]![p+nu]!)`)
//! and by applying the truncated Fock-space operators to the constructed
//! state. The two must agree to `10 * series_tol` relative to the size of
//! the quantities involved.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::fockspace::{build_space, FockSpace, TwoModeState};
use crate::qcalculus::qbessel_j;
use crate::qkernel::{Base, QContext, Terms};
use crate::states::{build_state, normalization, required_n_max, sector_pair, CoherentFamilySpec, Parity};

/// Slack below which a variance must fall under its bound to count as squeezed.
pub const SQUEEZING_SLACK: f64 = 1e-10;
/// Extra shells added on top of [`required_n_max`] for the Fock route.
pub const FOCK_MARGIN: usize = 4;
pub const DEFAULT_SCAN_RESOLUTION: f64 = 1e-2;
pub const SCAN_ENDPOINT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `X_1 = (K+ + K-)/2`, `X_2 = i(K+ - K-)/2`.
    Su11,
    /// `Y_1, Y_2` built from mode 1.
    SingleMode1,
    /// `Z_1, Z_2` built from mode 2.
    SingleMode2,
    /// `W_1, W_2` mixing both modes.
    TwoMode,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Su11 => "su11",
            Family::SingleMode1 => "single_mode_1",
            Family::SingleMode2 => "single_mode_2",
            Family::TwoMode => "two_mode",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureReport {
    pub family: Family,
    pub spec: CoherentFamilySpec,
    /// Closed-form variances of the two quadratures.
    pub variances: [f64; 2],
    /// The same variances from the truncated Fock space.
    pub fock_variances: [f64; 2],
    /// Right-hand side of the squeezing inequality.
    pub bound: f64,
    pub squeezed: [bool; 2],
}

impl QuadratureReport {
    fn new(
        family: Family,
        spec: &CoherentFamilySpec,
        variances: [f64; 2],
        fock_variances: [f64; 2],
        bound: f64,
    ) -> Self {
        QuadratureReport {
            family,
            spec: *spec,
            variances,
            fock_variances,
            bound,
            squeezed: variances.map(|v| v < bound - SQUEEZING_SLACK),
        }
    }

    /// Largest relative gap between the closed-form and Fock-space variances.
    pub fn route_gap(&self) -> f64 {
        (0..2)
            .map(|i| relative_gap(self.variances[i], self.fock_variances[i]))
            .fold(0.0, f64::max)
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn check_routes(ctx: &QContext, what: &'static str, closed: f64, fock: f64, scale: f64) -> Result<()> {
    if (closed - fock).abs() > 10.0 * ctx.series_tol() * scale.max(closed.abs()).max(1.0) {
        return Err(QError::RouteMismatch { what, closed, fock });
    }
    Ok(())
}

/// `(sinh_bar, cosh_bar)`: the odd and even normalization series at `x = |xi|^2`.
pub fn hyperbolic_bars(ctx: &QContext, x: f64, charge: i64) -> Result<(f64, f64)> {
    let nu = charge.unsigned_abs() as usize;
    Ok((
        ctx.pair_series(x, nu, Terms::Odd)?,
        ctx.pair_series(x, nu, Terms::Even)?,
    ))
}

/// `(tanh_bar, coth_bar)` at `x = |xi|^2`.
pub fn hyperbolic_ratios(ctx: &QContext, x: f64, charge: i64) -> Result<(f64, f64)> {
    if x == 0.0 {
        return Err(QError::DivisionByZero("coth_bar at |xi| = 0"));
    }
    let (s, c) = hyperbolic_bars(ctx, x, charge)?;
    Ok((s / c, c / s))
}

/// `|coth_bar - 1 - J_nu(q, sqrt(q) [2] |xi|) / (|xi|^nu sinh_bar)|`.
pub fn coth_identity_residual(ctx: &QContext, modulus: f64, charge: i64) -> Result<f64> {
    let nu = charge.unsigned_abs() as usize;
    let x = modulus * modulus;
    let (s, c) = hyperbolic_bars(ctx, x, charge)?;
    if s == 0.0 {
        return Err(QError::DivisionByZero("coth_bar at |xi| = 0"));
    }
    let j = qbessel_j(ctx, nu, ctx.sqrt_q() * ctx.two_sqrt() * modulus)?;
    Ok((c / s - 1.0 - j / (modulus.powi(nu as i32) * s)).abs())
}

/// Normalized sector weights summed against `f(m, n)`.
pub fn sector_expectation<F>(ctx: &QContext, spec: &CoherentFamilySpec, f: F) -> Result<f64>
where
    F: Fn(usize, usize) -> f64,
{
    spec.validate()?;
    let nu = spec.nu();
    let ln_n2 = 2.0 * normalization(ctx, spec.xi_modulus, spec.charge, spec.parity)?.ln();
    let x = spec.xi_modulus * spec.xi_modulus;
    let mut sum = 0.0;
    let mut prev_w = f64::INFINITY;
    for p in (0..=ctx.max_terms()).filter(|&p| spec.parity.keeps(p)) {
        let w = if p == 0 {
            (ln_n2 - ctx.ln_qfactorial(nu, Base::Q)).exp()
        } else if x == 0.0 {
            0.0
        } else {
            (ln_n2 + p as f64 * x.ln() - ctx.ln_qfactorial(p, Base::Q) - ctx.ln_qfactorial(p + nu, Base::Q)).exp()
        };
        let (m, n) = sector_pair(spec.charge, p);
        let t = w * f(m, n);
        sum += t;
        if w == 0.0 || (w < prev_w && sum != 0.0 && t.abs() <= 1e-3 * ctx.series_tol() * sum.abs()) {
            return Ok(sum);
        }
        prev_w = w;
    }
    Err(QError::NonConvergence {
        what: "sector expectation",
        terms: ctx.max_terms(),
    })
}

/// First and second moments that every quadrature variance is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Moments {
    bracket_2k0: f64,
    /// `<a_i+ a_i>` = `<[N_i]>`.
    number: [f64; 2],
    /// `<[a_i, a_i+]>`.
    commutator: [f64; 2],
    k_minus: Complex64,
}

fn closed_moments(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<Moments> {
    let qn = |k: usize| ctx.qnumber(k, Base::Q);
    Ok(Moments {
        bracket_2k0: sector_expectation(ctx, spec, |m, n| qn(m + n + 1))?,
        number: [
            sector_expectation(ctx, spec, |m, _| qn(m))?,
            sector_expectation(ctx, spec, |_, n| qn(n))?,
        ],
        commutator: [
            sector_expectation(ctx, spec, |m, _| qn(m + 1) - qn(m))?,
            sector_expectation(ctx, spec, |_, n| qn(n + 1) - qn(n))?,
        ],
        k_minus: if spec.parity == Parity::Full {
            spec.xi()
        } else {
            Complex64::new(0.0, 0.0)
        },
    })
}

/// Fock space large enough for the state plus a margin, and the state on it.
pub fn fock_state(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<(FockSpace, TwoModeState)> {
    let fs = build_space(ctx, required_n_max(ctx, spec)? + FOCK_MARGIN)?;
    let psi = build_state(ctx, spec, fs.space)?;
    Ok((fs, psi))
}

/// Variances of `(A + A+)/2` and `i(A+ - A)/2` given `A+ psi` and `A psi`.
fn quadrature_pair(psi: &TwoModeState, raised: &TwoModeState, lowered: &TwoModeState) -> [f64; 2] {
    let half = Complex64::new(0.5, 0.0);
    let x1 = raised.linear_combination(half, lowered, half);
    let x2 = raised.linear_combination(Complex64::new(0.0, 0.5), lowered, Complex64::new(0.0, -0.5));
    [x1, x2].map(|x| {
        let mean = psi.inner(&x).re;
        x.norm().powi(2) - mean * mean
    })
}

/// SU_q(1,1) quadrature variances at the spec's `|xi|` and phase `theta`.
pub fn su11_variances(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<QuadratureReport> {
    let (closed, bound) = su11_closed(ctx, spec)?;
    let (fs, psi) = fock_state(ctx, spec)?;
    let up = fs.k_plus.apply(&psi)?;
    let down = fs.k_minus.apply(&psi)?;
    let fock = quadrature_pair(&psi, &up, &down);
    let scale = 4.0 * bound + spec.xi_modulus.powi(2) * 2.0 * ratio_for(ctx, spec)?.abs();
    for i in 0..2 {
        check_routes(ctx, "SU(1,1) variance", closed[i], fock[i], scale)?;
    }
    Ok(QuadratureReport::new(Family::Su11, spec, closed, fock, bound))
}

/// `tanh_bar` for even states, `coth_bar` for odd, unused (0) for full.
fn ratio_for(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<f64> {
    let x = spec.xi_modulus * spec.xi_modulus;
    match spec.parity {
        Parity::Full => Ok(0.0),
        Parity::Even if x == 0.0 => Ok(0.0),
        Parity::Even => Ok(hyperbolic_ratios(ctx, x, spec.charge)?.0),
        Parity::Odd => Ok(hyperbolic_ratios(ctx, x, spec.charge)?.1),
    }
}

fn su11_closed(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<([f64; 2], f64)> {
    let qn = |k: usize| ctx.qnumber(k, Base::Q);
    let b = sector_expectation(ctx, spec, |m, n| qn(m + n + 1))?;
    let quarter = 0.25 * b;
    let vars = match spec.parity {
        Parity::Full => [quarter, quarter],
        _ => {
            let x = spec.xi_modulus * spec.xi_modulus;
            let r = ratio_for(ctx, spec)?;
            let c2 = (2.0 * spec.xi_phase).cos();
            [quarter + 0.5 * x * (c2 + r), quarter + 0.5 * x * (-c2 + r)]
        }
    };
    Ok((vars, quarter.abs()))
}

/// Single-mode variances: `[Y report, Z report]`.
pub fn single_mode_variances(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<[QuadratureReport; 2]> {
    let mo = closed_moments(ctx, spec)?;
    let (fs, psi) = fock_state(ctx, spec)?;
    let mut out = Vec::with_capacity(2);
    for (i, (lower, raise), family) in [
        (0, (&fs.a1, &fs.a1_dag), Family::SingleMode1),
        (1, (&fs.a2, &fs.a2_dag), Family::SingleMode2),
    ] {
        let v = 0.25 * (mo.commutator[i] + 2.0 * mo.number[i]);
        let fock = quadrature_pair(&psi, &raise.apply(&psi)?, &lower.apply(&psi)?);
        for f in fock {
            check_routes(ctx, "single-mode variance", v, f, v)?;
        }
        out.push(QuadratureReport::new(
            family,
            spec,
            [v, v],
            fock,
            0.25 * mo.commutator[i].abs(),
        ));
    }
    Ok([out[0], out[1]])
}

/// Two-mode variances of `W_1 = (Y_1 + Z_1)/sqrt 2`, `W_2 = (Y_2 + Z_2)/sqrt 2`.
pub fn two_mode_variances(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<QuadratureReport> {
    let mo = closed_moments(ctx, spec)?;
    let base = 0.125 * (mo.commutator[0] + mo.commutator[1] + 2.0 * (mo.number[0] + mo.number[1]));
    let cross = 0.5 * mo.k_minus.re;
    let closed = [base + cross, base - cross];
    let (fs, psi) = fock_state(ctx, spec)?;
    let s = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let up = fs.a1_dag.apply(&psi)?.linear_combination(s, &fs.a2_dag.apply(&psi)?, s);
    let down = fs.a1.apply(&psi)?.linear_combination(s, &fs.a2.apply(&psi)?, s);
    let fock = quadrature_pair(&psi, &up, &down);
    for i in 0..2 {
        check_routes(ctx, "two-mode variance", closed[i], fock[i], base + cross.abs())?;
    }
    let bound = 0.125 * (mo.commutator[0] + mo.commutator[1]).abs();
    Ok(QuadratureReport::new(Family::TwoMode, spec, closed, fock, bound))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub spec: CoherentFamilySpec,
    pub closed: f64,
    pub fock: f64,
    pub antibunched: bool,
}

/// `g = <(a1+ a2+)^2 (a1 a2)^2> / <a1+ a2+ a1 a2>^2` by both routes.
pub fn correlation_g(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<CorrelationReport> {
    spec.validate()?;
    if spec.xi_modulus == 0.0 {
        return Err(QError::DivisionByZero("g at |xi| = 0"));
    }
    let closed = match spec.parity {
        Parity::Full => 1.0,
        Parity::Even | Parity::Odd => {
            let (t, c) = hyperbolic_ratios(ctx, spec.xi_modulus.powi(2), spec.charge)?;
            if spec.parity == Parity::Even {
                c * c
            } else {
                t * t
            }
        }
    };
    let (fs, psi) = fock_state(ctx, spec)?;
    let once = fs.k_minus.apply(&psi)?;
    let twice = fs.k_minus.apply(&once)?;
    let fock = twice.norm().powi(2) / once.norm().powi(4);
    check_routes(ctx, "correlation g", closed, fock, closed)?;
    Ok(CorrelationReport {
        spec: *spec,
        closed,
        fock,
        antibunched: closed < 1.0,
    })
}

/// Argument convention for `J_nu` in the sign-change scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `J_nu(q, sqrt(q) [2]_{sqrt q} |xi|)`, the argument appearing in the coth identity.
    Scaled,
    /// `J_nu(q, [2]_{sqrt q} |xi|)`.
    Unscaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    CothLt1,
    JNegative(Convention),
    Su11Squeezed { parity: Parity, theta: f64 },
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::CothLt1 => f.write_str("coth-lt-1"),
            Predicate::JNegative(Convention::Scaled) => f.write_str("j-negative"),
            Predicate::JNegative(Convention::Unscaled) => f.write_str("j-negative-unscaled"),
            Predicate::Su11Squeezed { parity, theta } => write!(f, "su11-squeezed({parity}, theta={theta})"),
        }
    }
}

impl FromStr for Predicate {
    type Err = QError;

    /// Parses the parameterless labels; `su11-squeezed` defaults to the odd
    /// state at `theta = 0`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coth-lt-1" => Ok(Predicate::CothLt1),
            "j-negative" => Ok(Predicate::JNegative(Convention::Scaled)),
            "j-negative-unscaled" => Ok(Predicate::JNegative(Convention::Unscaled)),
            "su11-squeezed" => Ok(Predicate::Su11Squeezed {
                parity: Parity::Odd,
                theta: 0.0,
            }),
            _ => Err(QError::InvalidParameter(format!("unknown predicate {s:?}"))),
        }
    }
}

/// Continuous function whose negative values are where the predicate holds.
pub fn predicate_value(ctx: &QContext, charge: i64, predicate: Predicate, modulus: f64) -> Result<f64> {
    let nu = charge.unsigned_abs() as usize;
    match predicate {
        Predicate::CothLt1 => Ok(hyperbolic_ratios(ctx, modulus * modulus, charge)?.1 - 1.0),
        Predicate::JNegative(conv) => {
            let scale = match conv {
                Convention::Scaled => ctx.sqrt_q() * ctx.two_sqrt(),
                Convention::Unscaled => ctx.two_sqrt(),
            };
            qbessel_j(ctx, nu, scale * modulus)
        }
        Predicate::Su11Squeezed { parity, theta } => {
            let spec = CoherentFamilySpec::new(modulus, theta, charge, parity)?;
            let (vars, bound) = su11_closed(ctx, &spec)?;
            Ok(vars[0].min(vars[1]) - bound + SQUEEZING_SLACK)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub predicate: String,
    pub q: f64,
    pub charge: i64,
    pub range: [f64; 2],
    pub resolution: f64,
    /// Endpoint bracketing tolerance.
    pub tolerance: f64,
    pub intervals: Vec<[f64; 2]>,
}

/// Maximal `|xi|` intervals in `[lo, hi]` where the predicate holds.
///
/// The predicate's function is sampled on a uniform grid of spacing at most
/// `resolution`; each sign change is refined by bisection to
/// [`SCAN_ENDPOINT_TOL`]. Points where the function cannot be evaluated
/// count as not holding.
pub fn squeezing_scan(
    ctx: &QContext,
    charge: i64,
    predicate: Predicate,
    lo: f64,
    hi: f64,
    resolution: f64,
) -> Result<ScanReport> {
    if !(lo >= 0.0 && hi > lo && resolution > 0.0 && hi.is_finite()) {
        return Err(QError::InvalidParameter(format!(
            "scan needs 0 <= lo < hi and resolution > 0, got [{lo}, {hi}] at {resolution}"
        )));
    }
    let n = ((hi - lo) / resolution).ceil() as usize;
    let step = (hi - lo) / n as f64;
    let at = |i: usize| if i == n { hi } else { lo + i as f64 * step };
    let holds = |x: f64| matches!(predicate_value(ctx, charge, predicate, x), Ok(v) if v < 0.0);
    let flags = ctx.exec().map_range(n + 1, |i| holds(at(i)));
    let edge = |i: usize| {
        let (mut a, mut b) = (at(i - 1), at(i));
        let left = flags[i - 1];
        while b - a > SCAN_ENDPOINT_TOL {
            let m = 0.5 * (a + b);
            if holds(m) == left {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let mut intervals = Vec::new();
    let mut start = None;
    for (i, &flag) in flags.iter().enumerate().take(n + 1) {
        match (start, flag) {
            (None, true) => start = Some(if i == 0 { lo } else { edge(i) }),
            (Some(s), false) => {
                intervals.push([s, edge(i)]);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        intervals.push([s, hi]);
    }
    Ok(ScanReport {
        predicate: predicate.to_string(),
        q: ctx.q(),
        charge,
        range: [lo, hi],
        resolution: step,
        tolerance: SCAN_ENDPOINT_TOL,
        intervals,
    })
}

/// A published window where `J_|c|` is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRange {
    pub q: f64,
    pub charge: i64,
    pub lo: f64,
    pub hi: f64,
}

pub const REFERENCE_SIGN_RANGES: [ReferenceRange; 3] = [
    ReferenceRange {
        q: 0.2,
        charge: 0,
        lo: 1.020,
        hi: 5.208,
    },
    ReferenceRange {
        q: 0.5,
        charge: 1,
        lo: 1.808,
        hi: 3.770,
    },
    ReferenceRange {
        q: 0.9,
        charge: 2,
        lo: 2.560,
        hi: 4.166,
    },
];

/// The first negative-`J` interval on `[0, 10]` under both argument
/// conventions, against a reference window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConventionCheck {
    pub reference: ReferenceRange,
    pub scaled: Option<[f64; 2]>,
    pub unscaled: Option<[f64; 2]>,
    /// Largest endpoint deviation; infinite when no interval was found.
    pub scaled_deviation: f64,
    pub unscaled_deviation: f64,
}

impl ConventionCheck {
    /// The convention whose endpoints lie within `tol`, preferring the scaled one.
    pub fn matching(&self, tol: f64) -> Option<Convention> {
        if self.scaled_deviation <= tol {
            Some(Convention::Scaled)
        } else if self.unscaled_deviation <= tol {
            Some(Convention::Unscaled)
        } else {
            None
        }
    }
}

pub fn check_reference_range(ctx: &QContext, reference: &ReferenceRange) -> Result<ConventionCheck> {
    let ctx = ctx.with_q(reference.q)?;
    let first = |conv| -> Result<Option<[f64; 2]>> {
        let r = squeezing_scan(
            &ctx,
            reference.charge,
            Predicate::JNegative(conv),
            0.0,
            10.0,
            DEFAULT_SCAN_RESOLUTION,
        )?;
        Ok(r.intervals.first().copied())
    };
    let deviation = |iv: Option<[f64; 2]>| {
        iv.map_or(f64::INFINITY, |[a, b]| {
            (a - reference.lo).abs().max((b - reference.hi).abs())
        })
    };
    let scaled = first(Convention::Scaled)?;
    let unscaled = first(Convention::Unscaled)?;
    Ok(ConventionCheck {
        reference: *reference,
        scaled,
        unscaled,
        scaled_deviation: deviation(scaled),
        unscaled_deviation: deviation(unscaled),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn spec(r: f64, theta: f64, c: i64, p: Parity) -> CoherentFamilySpec {
        CoherentFamilySpec::new(r, theta, c, p).unwrap()
    }

    #[test]
    fn ratios_are_reciprocal() {
        let ctx = QContext::new(0.5).unwrap();
        let (t, c) = hyperbolic_ratios(&ctx, 0.64, 1).unwrap();
        assert_relative_eq!(t * c, 1.0, epsilon = 1e-15);
        assert!(matches!(
            hyperbolic_ratios(&ctx, 0.0, 1),
            Err(QError::DivisionByZero(_))
        ));
        let (t_small, _) = hyperbolic_ratios(&ctx, 1e-8, 0).unwrap();
        assert!(t_small < 1e-7);
    }

    #[test]
    fn coth_identity_holds() {
        for q in [0.2, 0.5, 0.9] {
            let ctx = QContext::new(q).unwrap();
            for c in -2..=2 {
                for r in [0.3, 0.8, 1.5, 3.0] {
                    let res = coth_identity_residual(&ctx, r, c).unwrap();
                    assert!(res < 1e-7, "q={q} c={c} r={r}: {res}");
                }
            }
        }
    }

    #[test]
    fn even_state_squeezes_at_small_xi() {
        let ctx = QContext::new(0.5).unwrap();
        let r = su11_variances(&ctx, &spec(0.5, FRAC_PI_2, 1, Parity::Even)).unwrap();
        assert!(r.squeezed[0], "{r:?}");
        assert!(!r.squeezed[1]);
    }

    #[test]
    fn odd_state_squeezes_inside_negative_window() {
        let ctx = QContext::new(0.5).unwrap();
        for theta in [0.0, FRAC_PI_2] {
            let r = su11_variances(&ctx, &spec(2.5, theta, 1, Parity::Odd)).unwrap();
            assert!(r.squeezed[0] || r.squeezed[1], "{r:?}");
        }
    }

    #[test]
    fn coherent_state_saturates_the_bound() {
        let ctx = QContext::new(0.7).unwrap();
        let r = su11_variances(&ctx, &spec(1.2, 0.4, 2, Parity::Full)).unwrap();
        assert_relative_eq!(r.variances[0], r.variances[1]);
        assert_relative_eq!(r.variances[0] * r.variances[1], r.bound * r.bound, max_relative = 1e-12);
        assert_eq!(r.squeezed, [false, false]);
        assert_relative_eq!(correlation_g(&ctx, &r.spec).unwrap().fock, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn no_single_or_two_mode_squeezing() {
        let ctx = QContext::new(0.5).unwrap();
        for p in [Parity::Even, Parity::Odd] {
            for c in [-2, 0, 1] {
                let s = spec(1.5, 0.7, c, p);
                for r in single_mode_variances(&ctx, &s).unwrap() {
                    assert_eq!(r.squeezed, [false, false]);
                    assert_relative_eq!(r.variances[0], r.variances[1]);
                }
                let w = two_mode_variances(&ctx, &s).unwrap();
                assert_eq!(w.squeezed, [false, false]);
                let [y, z] = single_mode_variances(&ctx, &s).unwrap();
                assert_relative_eq!(
                    w.variances[0],
                    0.5 * (y.variances[0] + z.variances[0]),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn vacuum_saturates_single_mode_bound() {
        let ctx = QContext::new(0.5).unwrap();
        let [y, _] = single_mode_variances(&ctx, &spec(0.0, 0.0, 0, Parity::Even)).unwrap();
        assert_eq!(y.variances[0], y.bound);
        assert_eq!(y.squeezed, [false, false]);
    }

    #[test]
    fn correlation_closed_forms() {
        let ctx = QContext::new(0.5).unwrap();
        let odd = correlation_g(&ctx, &spec(0.8, 0.0, 1, Parity::Odd)).unwrap();
        assert!(odd.antibunched);
        let even = correlation_g(&ctx, &spec(0.2, 0.0, 1, Parity::Even)).unwrap();
        assert!(even.closed > 1.0 && !even.antibunched);
        // Leading order: coth_bar ~ [1+nu] / |xi|^2 at small |xi| (nu = 1: [2]).
        let lead = ctx.qnumber(2, Base::Q) / 0.04;
        assert_relative_eq!(even.closed.sqrt(), lead, max_relative = 0.05);
        assert!(matches!(
            correlation_g(&ctx, &spec(0.0, 0.0, 1, Parity::Even)),
            Err(QError::DivisionByZero(_))
        ));
    }

    #[test]
    fn scan_reproduces_reference_windows() {
        let ctx = QContext::new(0.5).unwrap();
        for r in REFERENCE_SIGN_RANGES {
            let check = check_reference_range(&ctx, &r).unwrap();
            assert_eq!(check.matching(0.01), Some(Convention::Scaled), "{check:?}");
        }
    }

    #[test]
    fn coth_and_j_scans_agree() {
        let ctx = QContext::new(0.5).unwrap();
        let a = squeezing_scan(&ctx, 1, Predicate::CothLt1, 0.0, 10.0, 1e-2).unwrap();
        let b = squeezing_scan(&ctx, 1, Predicate::JNegative(Convention::Scaled), 0.0, 10.0, 1e-2).unwrap();
        assert_eq!(a.intervals.len(), b.intervals.len());
        for (x, y) in a.intervals.iter().zip(&b.intervals) {
            assert!((x[0] - y[0]).abs() < 2e-4 && (x[1] - y[1]).abs() < 2e-4);
        }
        let odd = Predicate::Su11Squeezed {
            parity: Parity::Odd,
            theta: 0.0,
        };
        let s = squeezing_scan(&ctx, 1, odd, 0.0, 10.0, 1e-2).unwrap();
        assert_eq!(s.intervals.len(), a.intervals.len());
    }

    #[test]
    fn scan_rejects_bad_ranges() {
        let ctx = QContext::new(0.5).unwrap();
        assert!(squeezing_scan(&ctx, 0, Predicate::CothLt1, -1.0, 1.0, 0.1).is_err());
        assert!(squeezing_scan(&ctx, 0, Predicate::CothLt1, 2.0, 1.0, 0.1).is_err());
    }
}
