//! Charge coherent states, their even and odd projections, and the checks
//! that tie the different constructions together.
//!
//! A state of charge `c` lives on the sector `|p + c, p>` (c >= 0) or
//! `|p, p + |c|>` (c < 0), so `p = min(m, n)` throughout. Its unnormalized
//! coefficients are `xi^p / sqrt([p]! [p + |c|]!)`; parity restricts `p`.
//! Constructed states keep the physical phase `e^{i p theta}`; comparisons
//! that must ignore a global phase say so explicitly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, Result};
use crate::fockspace::{FockSpace, TruncatedSpace, TwoModeState};
use crate::qkernel::{Base, QContext, Terms};

/// Which `p` values a state carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Full,
}

impl Parity {
    pub fn terms(self) -> Terms {
        match self {
            Parity::Even => Terms::Even,
            Parity::Odd => Terms::Odd,
            Parity::Full => Terms::All,
        }
    }

    pub fn keeps(self, p: usize) -> bool {
        self.terms().keeps(p)
    }

    /// Even <-> odd; full is its own partner.
    pub fn swapped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Full => Parity::Full,
        }
    }

    fn intersect(self, other: Parity) -> Option<Parity> {
        match (self, other) {
            (Parity::Full, p) | (p, Parity::Full) => Some(p),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" | "e" => Ok(Parity::Even),
            "odd" | "o" => Ok(Parity::Odd),
            "full" => Ok(Parity::Full),
            other => Err(QError::InvalidParameter(format!("unknown parity '{other}'"))),
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::Full => "full",
        })
    }
}

/// Identifies one member of a coherent-state family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentFamilySpec {
    pub xi_modulus: f64,
    pub xi_phase: f64,
    pub charge: i64,
    pub parity: Parity,
    pub normalized: bool,
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

impl CoherentFamilySpec {
    pub fn new(xi_modulus: f64, xi_phase: f64, charge: i64, parity: Parity) -> Result<Self> {
        let spec = CoherentFamilySpec {
            xi_modulus,
            xi_phase: wrap_phase(xi_phase),
            charge,
            parity,
            normalized: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_xi(xi: Complex64, charge: i64, parity: Parity) -> Result<Self> {
        Self::new(xi.norm(), if xi.norm() == 0.0 { 0.0 } else { xi.arg() }, charge, parity)
    }

    pub fn unnormalized(mut self) -> Self {
        self.normalized = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi_modulus >= 0.0 && self.xi_modulus.is_finite()) {
            return Err(QError::InvalidParameter(format!(
                "|xi| must be finite and nonnegative, got {}",
                self.xi_modulus
            )));
        }
        if !self.xi_phase.is_finite() {
            return Err(QError::InvalidParameter("phase must be finite".into()));
        }
        if self.parity == Parity::Odd && self.xi_modulus == 0.0 {
            return Err(QError::OddAtZero);
        }
        Ok(())
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.xi_modulus, self.xi_phase)
    }

    pub fn nu(&self) -> usize {
        self.charge.unsigned_abs() as usize
    }
}

/// Basis pair `(m, n)` of the `p`-th vector in the charge-`c` sector.
pub fn sector_pair(charge: i64, p: usize) -> (usize, usize) {
    let nu = charge.unsigned_abs() as usize;
    if charge >= 0 {
        (p + nu, p)
    } else {
        (p, p + nu)
    }
}

/// Two-mode normalizations and their single-mode counterparts at one `|xi|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizationSet {
    pub full: f64,
    pub even: f64,
    /// `None` at `xi = 0`.
    pub odd: Option<f64>,
    pub single_full: f64,
    pub single_even: f64,
    pub single_odd: Option<f64>,
}

impl NormalizationSet {
    pub fn get(&self, parity: Parity) -> Result<f64> {
        match parity {
            Parity::Full => Ok(self.full),
            Parity::Even => Ok(self.even),
            Parity::Odd => self.odd.ok_or(QError::OddAtZero),
        }
    }

    pub fn single(&self, parity: Parity) -> Result<f64> {
        match parity {
            Parity::Full => Ok(self.single_full),
            Parity::Even => Ok(self.single_even),
            Parity::Odd => self.single_odd.ok_or(QError::OddAtZero),
        }
    }
}

/// `N(|xi|^2)` for a two-mode family: `(sum_{p in parity} |xi|^{2p} / ([p]! [p+nu]!))^{-1/2}`.
pub fn normalization(ctx: &QContext, modulus: f64, charge: i64, parity: Parity) -> Result<f64> {
    if parity == Parity::Odd && modulus == 0.0 {
        return Err(QError::OddAtZero);
    }
    let s = ctx.pair_series(modulus * modulus, charge.unsigned_abs() as usize, parity.terms())?;
    Ok(s.powf(-0.5))
}

pub fn normalizations(ctx: &QContext, modulus: f64, charge: i64) -> Result<NormalizationSet> {
    let x = modulus * modulus;
    let (c, s) = ctx.qcosh_qsinh(x)?;
    let odd = (modulus > 0.0).then_some(());
    Ok(NormalizationSet {
        full: normalization(ctx, modulus, charge, Parity::Full)?,
        even: normalization(ctx, modulus, charge, Parity::Even)?,
        odd: odd
            .map(|_| normalization(ctx, modulus, charge, Parity::Odd))
            .transpose()?,
        single_full: ctx.qexp(x)?.powf(-0.5),
        single_even: c.powf(-0.5),
        single_odd: odd.map(|_| s.powf(-0.5)),
    })
}

/// `xi^p / sqrt([p]! [p+nu]!)` evaluated in log space.
fn sector_coefficient(ctx: &QContext, xi: Complex64, nu: usize, p: usize) -> Complex64 {
    let ln_c = -0.5 * (ctx.ln_qfactorial(p, Base::Q) + ctx.ln_qfactorial(p + nu, Base::Q));
    if p == 0 {
        return Complex64::new(ln_c.exp(), 0.0);
    }
    let r = xi.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar((p as f64 * r.ln() + ln_c).exp(), p as f64 * xi.arg())
}

/// Unnormalized sector series `sum_{p in parity} xi^p/sqrt([p]![p+nu]!) |sector_pair(p)>`,
/// truncated to the space without any tail check.
pub fn sector_series(
    ctx: &QContext,
    xi: Complex64,
    charge: i64,
    parity: Parity,
    space: TruncatedSpace,
) -> TwoModeState {
    let nu = charge.unsigned_abs() as usize;
    let mut s = TwoModeState::zeros(space, Some(charge));
    if nu > space.n_max() {
        return s;
    }
    for p in (0..=space.n_max() - nu).filter(|&p| parity.keeps(p)) {
        let (m, n) = sector_pair(charge, p);
        s.set(m, n, sector_coefficient(ctx, xi, nu, p));
    }
    s
}

/// Fraction of the family's norm that falls outside a cutoff `n_max`.
pub fn truncation_tail(ctx: &QContext, spec: &CoherentFamilySpec, n_max: usize) -> Result<f64> {
    let nu = spec.nu();
    let n = normalization(ctx, spec.xi_modulus, spec.charge, spec.parity)?;
    if nu > n_max {
        return Ok(1.0);
    }
    let x = spec.xi_modulus * spec.xi_modulus;
    let captured: f64 = (0..=n_max - nu)
        .filter(|&p| spec.parity.keeps(p))
        .map(|p| {
            if p == 0 {
                (-ctx.ln_qfactorial(nu, Base::Q)).exp()
            } else if x == 0.0 {
                0.0
            } else {
                (p as f64 * x.ln() - ctx.ln_qfactorial(p, Base::Q) - ctx.ln_qfactorial(p + nu, Base::Q)).exp()
            }
        })
        .sum();
    Ok((1.0 - captured * n * n).max(0.0))
}

/// Smallest cutoff (at least 4) whose truncation tail is below a tenth of
/// `series_tol`, plus two shells so interior checks see the whole state.
pub fn required_n_max(ctx: &QContext, spec: &CoherentFamilySpec) -> Result<usize> {
    spec.validate()?;
    let mut n_max = spec.nu().max(2);
    loop {
        if truncation_tail(ctx, spec, n_max)? <= 0.1 * ctx.series_tol() {
            return Ok((n_max + 2).max(4));
        }
        n_max += 1;
        if n_max > ctx.max_terms() {
            return Err(QError::TruncationInsufficient {
                n_max,
                tail: truncation_tail(ctx, spec, n_max)?,
            });
        }
    }
}

fn check_tail(ctx: &QContext, spec: &CoherentFamilySpec, space: TruncatedSpace) -> Result<()> {
    let tail = truncation_tail(ctx, spec, space.n_max())?;
    if tail > ctx.series_tol() {
        return Err(QError::TruncationInsufficient {
            n_max: space.n_max(),
            tail,
        });
    }
    Ok(())
}

/// Normalized charge coherent state `N sum_p xi^p / sqrt([p]![p+|c|]!) |sector_pair(p)>`.
pub fn charge_coherent(ctx: &QContext, spec: &CoherentFamilySpec, space: TruncatedSpace) -> Result<TwoModeState> {
    if spec.parity != Parity::Full {
        return Err(QError::InvalidParameter("charge_coherent needs parity = full".into()));
    }
    build_state(ctx, spec, space)
}

/// Normalized even or odd charge coherent state.
pub fn even_odd_charge_coherent(
    ctx: &QContext,
    spec: &CoherentFamilySpec,
    space: TruncatedSpace,
) -> Result<TwoModeState> {
    if spec.parity == Parity::Full {
        return Err(QError::InvalidParameter(
            "even_odd_charge_coherent needs parity even or odd".into(),
        ));
    }
    build_state(ctx, spec, space)
}

/// Any family member; unnormalized specs give the bare series (the `||c>` tables).
pub fn build_state(ctx: &QContext, spec: &CoherentFamilySpec, space: TruncatedSpace) -> Result<TwoModeState> {
    spec.validate()?;
    check_tail(ctx, spec, space)?;
    let s = sector_series(ctx, spec.xi(), spec.charge, spec.parity, space);
    if !spec.normalized {
        return Ok(s);
    }
    let n = normalization(ctx, spec.xi_modulus, spec.charge, spec.parity)?;
    Ok(s.scaled(Complex64::new(n, 0.0)))
}

/// Single-mode q-coherent state `N sum_n xi^n / sqrt([n]!) |n>` restricted by
/// parity, with `N = e_q^{-1/2}`, `cosh_q^{-1/2}` or `sinh_q^{-1/2}` of `|xi|^2`.
pub fn single_mode_coherent(ctx: &QContext, xi: Complex64, parity: Parity, n_max: usize) -> Result<Vec<Complex64>> {
    let r = xi.norm();
    if parity == Parity::Odd && r == 0.0 {
        return Err(QError::OddAtZero);
    }
    let norms = normalizations(ctx, r, 0)?;
    let n = norms.single(parity)?;
    let coeffs: Vec<Complex64> = (0..=n_max)
        .map(|k| {
            if !parity.keeps(k) {
                return Complex64::new(0.0, 0.0);
            }
            let ln_c = -0.5 * ctx.ln_qfactorial(k, Base::Q);
            if k == 0 {
                Complex64::new(n * ln_c.exp(), 0.0)
            } else if r == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(n * (k as f64 * r.ln() + ln_c).exp(), k as f64 * xi.arg())
            }
        })
        .collect();
    let captured: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if 1.0 - captured > ctx.series_tol() {
        return Err(QError::TruncationInsufficient {
            n_max,
            tail: 1.0 - captured,
        });
    }
    Ok(coeffs)
}

/// Both evaluation routes of an overlap `<a|b>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapRoutes {
    pub fock: Complex64,
    pub closed: Complex64,
}

/// Closed form `N_a N_b S_{a and b}(conj(xi_a) xi_b)`, with `S` the pair
/// series over the parities both states share, continued to complex argument.
pub fn overlap_closed_form(ctx: &QContext, a: &CoherentFamilySpec, b: &CoherentFamilySpec) -> Result<Complex64> {
    a.validate()?;
    b.validate()?;
    let zero = Complex64::new(0.0, 0.0);
    if a.charge != b.charge {
        return Ok(zero);
    }
    let Some(shared) = a.parity.intersect(b.parity) else {
        return Ok(zero);
    };
    let na = if a.normalized {
        normalization(ctx, a.xi_modulus, a.charge, a.parity)?
    } else {
        1.0
    };
    let nb = if b.normalized {
        normalization(ctx, b.xi_modulus, b.charge, b.parity)?
    } else {
        1.0
    };
    let s = ctx.pair_series_complex(a.xi().conj() * b.xi(), a.nu(), shared.terms())?;
    Ok(s * na * nb)
}

pub fn overlap_routes(ctx: &QContext, a: &CoherentFamilySpec, b: &CoherentFamilySpec) -> Result<OverlapRoutes> {
    let n_max = required_n_max(ctx, a)?.max(required_n_max(ctx, b)?);
    let space = TruncatedSpace::new(n_max)?;
    let fock = build_state(ctx, a, space)?.inner(&build_state(ctx, b, space)?);
    Ok(OverlapRoutes {
        fock,
        closed: overlap_closed_form(ctx, a, b)?,
    })
}

/// `<a|b>`, cross-checked between the Fock-space inner product and the closed form.
pub fn overlap(ctx: &QContext, a: &CoherentFamilySpec, b: &CoherentFamilySpec) -> Result<Complex64> {
    let r = overlap_routes(ctx, a, b)?;
    let scale = r.closed.norm().max(1.0);
    if (r.fock - r.closed).norm() > 10.0 * ctx.series_tol() * scale {
        return Err(QError::RouteMismatch {
            what: "overlap",
            closed: r.closed.norm(),
            fock: r.fock.norm(),
        });
    }
    Ok(r.closed)
}

/// Residuals of the identities linking full, even and odd states at one `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionReport {
    /// `|N^-2 - N_e^-2 - N_o^-2| / N^-2`.
    pub normalization_sum: f64,
    /// `|| |xi> - N (N_e^-1 |xi>_e + N_o^-1 |xi>_o) ||`.
    pub full_from_parts: f64,
    /// `|| |xi>_e - (N_e / 2N)(|xi> + |-xi>) ||`.
    pub even_combination: f64,
    /// `|| |xi>_o - (N_o / 2N)(|xi> - |-xi>) ||`.
    pub odd_combination: f64,
}

impl DecompositionReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.normalization_sum,
            self.full_from_parts,
            self.even_combination,
            self.odd_combination,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn decomposition_check(
    ctx: &QContext,
    xi: Complex64,
    charge: i64,
    space: TruncatedSpace,
) -> Result<DecompositionReport> {
    if xi.norm() == 0.0 {
        return Err(QError::OddAtZero);
    }
    let spec = |x: Complex64, p| CoherentFamilySpec::from_xi(x, charge, p);
    let full = build_state(ctx, &spec(xi, Parity::Full)?, space)?;
    let minus = build_state(ctx, &spec(-xi, Parity::Full)?, space)?;
    let even = build_state(ctx, &spec(xi, Parity::Even)?, space)?;
    let odd = build_state(ctx, &spec(xi, Parity::Odd)?, space)?;
    let ns = normalizations(ctx, xi.norm(), charge)?;
    let (n, ne, no) = (ns.full, ns.even, ns.odd.ok_or(QError::OddAtZero)?);
    let c = |v: f64| Complex64::new(v, 0.0);

    let inv2 = n.powi(-2);
    let recombined = even.linear_combination(c(n / ne), &odd, c(n / no));
    let sym = full.linear_combination(c(ne / (2.0 * n)), &minus, c(ne / (2.0 * n)));
    let anti = full.linear_combination(c(no / (2.0 * n)), &minus, c(-no / (2.0 * n)));
    Ok(DecompositionReport {
        normalization_sum: (inv2 - ne.powi(-2) - no.powi(-2)).abs() / inv2,
        full_from_parts: full.distance(&recombined),
        even_combination: even.distance(&sym),
        odd_combination: odd.distance(&anti),
    })
}

pub const MAX_NODE_DOUBLINGS: usize = 6;

/// Default uniform node count for the U(1) average.
pub fn default_u1_nodes(charge: i64) -> usize {
    64 * (1 + charge.unsigned_abs() as usize)
}

/// Average the product of a single-mode coherent state and a single-mode
/// even/odd/full state over the U(1) charge rotation, projecting out the
/// charge-`c` sector. The result equals the (normalized) two-mode family
/// member at `xi = xi1 * xi2`.
///
/// For `c >= 0` mode 1 carries `|e^{-i a} xi1>` and mode 2 the parity state
/// at `e^{i a} xi2`, weighted by `e^{i c a}`; for `c < 0` the roles of the
/// modes are exchanged and the weight is `e^{-i c a}`.
pub fn u1_project(
    ctx: &QContext,
    xi1: Complex64,
    xi2: Complex64,
    charge: i64,
    parity: Parity,
    space: TruncatedSpace,
) -> Result<TwoModeState> {
    if xi1.norm() == 0.0 {
        return Err(QError::InvalidParameter("U(1) projection needs xi1 != 0".into()));
    }
    let xi = xi1 * xi2;
    let ns = normalizations(ctx, xi2.norm(), 0)?;
    let n_target = normalization(ctx, xi.norm(), charge, parity)?;
    let prefactor = n_target * ctx.qexp(xi1.norm_sqr())?.sqrt() / ns.single(parity)? * xi1.powi(-(charge as i32));

    let mut nodes = default_u1_nodes(charge);
    let mut previous = project_with_nodes(ctx, xi1, xi2, charge, parity, space, nodes, prefactor)?;
    for _ in 0..MAX_NODE_DOUBLINGS {
        nodes *= 2;
        let next = project_with_nodes(ctx, xi1, xi2, charge, parity, space, nodes, prefactor)?;
        let change = next.distance(&previous);
        if change <= ctx.series_tol() {
            let tail = 1.0 - next.norm().powi(2);
            if tail > 10.0 * ctx.series_tol() {
                return Err(QError::TruncationInsufficient {
                    n_max: space.n_max(),
                    tail,
                });
            }
            return Ok(next);
        }
        previous = next;
    }
    Err(QError::QuadratureNotConverged {
        nodes,
        change: f64::NAN,
    })
}

#[allow(clippy::too_many_arguments)]
fn project_with_nodes(
    ctx: &QContext,
    xi1: Complex64,
    xi2: Complex64,
    charge: i64,
    parity: Parity,
    space: TruncatedSpace,
    nodes: usize,
    prefactor: Complex64,
) -> Result<TwoModeState> {
    let n_max = space.n_max();
    let alphas: Vec<f64> = (0..nodes)
        .map(|j| -PI + 2.0 * PI * (j as f64 + 1.0) / nodes as f64)
        .collect();
    let tables = ctx
        .exec()
        .map(&alphas, |&a| -> Result<(Vec<Complex64>, Vec<Complex64>, Complex64)> {
            let rot = Complex64::from_polar(1.0, a);
            let coherent = single_mode_coherent_unchecked(ctx, xi1 * rot.conj(), Parity::Full, n_max)?;
            let parity_state = single_mode_coherent_unchecked(ctx, xi2 * rot, parity, n_max)?;
            let weight = Complex64::from_polar(1.0 / nodes as f64, charge as f64 * a);
            if charge >= 0 {
                Ok((coherent, parity_state, weight))
            } else {
                Ok((parity_state, coherent, weight.conj()))
            }
        });
    let tables = tables.into_iter().collect::<Result<Vec<_>>>()?;
    let coefficients = ctx.exec().map_range(space.dim(), |idx| {
        let (m, n) = space.pair(idx);
        let sum: Complex64 = tables.iter().map(|(one, two, w)| one[m] * two[n] * w).sum();
        sum * prefactor
    });
    TwoModeState::from_coefficients(space, coefficients, Some(charge))
}

fn single_mode_coherent_unchecked(
    ctx: &QContext,
    xi: Complex64,
    parity: Parity,
    n_max: usize,
) -> Result<Vec<Complex64>> {
    match single_mode_coherent(ctx, xi, parity, n_max) {
        Err(QError::TruncationInsufficient { .. }) => {
            let norms = normalizations(ctx, xi.norm(), 0)?;
            let n = norms.single(parity)?;
            Ok((0..=n_max)
                .map(|k| {
                    if !parity.keeps(k) {
                        Complex64::new(0.0, 0.0)
                    } else {
                        xi.powu(k as u32) * n * (-0.5 * ctx.ln_qfactorial(k, Base::Q)).exp()
                    }
                })
                .collect())
        }
        other => other,
    }
}

/// Named residuals of the operator actions on the unnormalized `||c>` tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DAlgebraReport {
    pub charge: i64,
    pub xi: (f64, f64),
    pub residuals: Vec<(String, f64)>,
}

impl DAlgebraReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

type Family<'a> = Box<dyn Fn(Complex64) -> TwoModeState + Send + Sync + 'a>;

/// `(f(q x) - f(x/q)) / ((q - 1/q) x)` for a state-valued `f`.
fn q_difference(q: f64, f: &(dyn Fn(Complex64) -> TwoModeState + Send + Sync), x: Complex64) -> TwoModeState {
    let up = f(x * q);
    let down = f(x / q);
    let denom = (q - 1.0 / q) * x;
    up.linear_combination(denom.inv(), &down, -denom.inv())
}

/// Multiply the coefficient of `xi^p` by `p` (the action of `xi d/dxi`).
fn xi_d_dxi(state: &TwoModeState) -> TwoModeState {
    let mut out = state.clone();
    for (m, n, c) in state.nonzero() {
        out.set(m, n, c * m.min(n) as f64);
    }
    out
}

/// At `q = 1`, `D (xi^a * table)` via the coefficient relation
/// `D xi^k = k xi^{k-1}`; entries of `table` carry `xi^{min(m,n) + offset}`.
fn classical_d_of_power(state: &TwoModeState, xi: Complex64, a: i64, offset: i64) -> TwoModeState {
    let mut out = state.clone();
    for (m, n, c) in state.nonzero() {
        let k = m.min(n) as i64 + offset + a;
        out.set(m, n, c * xi.powi(a as i32 - 1) * k as f64);
    }
    out
}

fn relative_interior(lhs: &TwoModeState, rhs: &TwoModeState) -> f64 {
    let scale = rhs.norm().max(lhs.norm()).max(f64::MIN_POSITIVE);
    lhs.interior_distance(rhs) / scale
}

/// Check the ladder, number and SU_q(1,1) actions on `||c>_{e,o}`.
///
/// For `c > 0`: `a1 ||c> = ||c-1>`, `a2 ||c>_e = xi ||c+1>_o`,
/// `a1+ ||c> = xi^{-c} D xi^{c+1} ||c+1>`, `a2+ ||c>_e = D ||c-1>_o`,
/// `N1 = xi d/dxi + c`, `N2 = xi d/dxi`; `c < 0` mirrors the modes.
/// For every `c`: `K- ||c>_e = xi ||c>_o`,
/// `K+ ||c>_e = xi^{-|c|} D xi^{|c|+1} D ||c>_o` and
/// `K0 = (2 xi d/dxi + |c| + 1)/2`. `D` is the symmetric q-difference
/// evaluated on the lattice `{q^2 xi, xi, q^-2 xi}`; at `q = 1` it is the
/// ordinary derivative applied through the coefficients.
pub fn dalgebra_check(ctx: &QContext, charge: i64, xi: Complex64, fs: &FockSpace) -> Result<DAlgebraReport> {
    if charge == 0 {
        return Err(QError::InvalidParameter(
            "D-algebra ladder check needs |charge| >= 1".into(),
        ));
    }
    if xi.norm() == 0.0 {
        return Err(QError::OddAtZero);
    }
    let space = fs.space;
    let q = ctx.q();
    let nu = charge.unsigned_abs() as i64;
    let table = |c: i64, p: Parity| -> Family<'_> { Box::new(move |x| sector_series(ctx, x, c, p, space)) };
    let at = |c: i64, p: Parity| sector_series(ctx, xi, c, p, space);
    let cx = |v: f64| Complex64::new(v, 0.0);

    // xi^pre D xi^post F, either on the lattice or through coefficients.
    let twisted_d = |pre: i64, post: i64, f: &Family<'_>, offset: i64| -> TwoModeState {
        let d = if ctx.is_undeformed() {
            classical_d_of_power(&f(xi), xi, post, offset)
        } else {
            let g = |x: Complex64| f(x).scaled(x.powi(post as i32));
            q_difference(q, &g, xi)
        };
        d.scaled(xi.powi(pre as i32))
    };

    let mut residuals = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let me = at(charge, parity);
        let tag = if parity == Parity::Even { "e" } else { "o" };
        let mut push = |name: &str, lhs: TwoModeState, rhs: TwoModeState| {
            residuals.push((format!("{name} [{tag}]"), relative_interior(&lhs, &rhs)));
        };

        let (down, up) = (charge - 1, charge + 1);
        if charge > 0 {
            push("a1", fs.a1.apply(&me)?, at(down, parity));
            push("a2", fs.a2.apply(&me)?, at(up, parity.swapped()).scaled(xi));
            push(
                "a1+",
                fs.a1_dag.apply(&me)?,
                twisted_d(-charge, charge + 1, &table(up, parity), 0),
            );
            push(
                "a2+",
                fs.a2_dag.apply(&me)?,
                twisted_d(0, 0, &table(down, parity.swapped()), 0),
            );
            push(
                "N1",
                fs.n1.apply(&me)?,
                xi_d_dxi(&me).linear_combination(cx(1.0), &me, cx(charge as f64)),
            );
            push("N2", fs.n2.apply(&me)?, xi_d_dxi(&me));
        } else {
            push("a1", fs.a1.apply(&me)?, at(down, parity.swapped()).scaled(xi));
            push("a2", fs.a2.apply(&me)?, at(up, parity));
            push(
                "a1+",
                fs.a1_dag.apply(&me)?,
                twisted_d(0, 0, &table(up, parity.swapped()), 0),
            );
            push(
                "a2+",
                fs.a2_dag.apply(&me)?,
                twisted_d(charge, 1 - charge, &table(down, parity), 0),
            );
            push("N1", fs.n1.apply(&me)?, xi_d_dxi(&me));
            push(
                "N2",
                fs.n2.apply(&me)?,
                xi_d_dxi(&me).linear_combination(cx(1.0), &me, cx(-charge as f64)),
            );
        }
        push("Q", fs.charge.apply(&me)?, me.scaled(cx(charge as f64)));
        push("K-", fs.k_minus.apply(&me)?, at(charge, parity.swapped()).scaled(xi));

        let partner = table(charge, parity.swapped());
        let inner: Family<'_> = if ctx.is_undeformed() {
            Box::new(|x: Complex64| classical_d_of_power(&partner(x), x, 0, 0))
        } else {
            Box::new(|x: Complex64| q_difference(q, &*partner, x))
        };
        push("K+", fs.k_plus.apply(&me)?, twisted_d(-nu, nu + 1, &inner, -1));
        let k0 = xi_d_dxi(&me).linear_combination(cx(1.0), &me, cx((nu + 1) as f64 / 2.0));
        push("K0", fs.k0.apply(&me)?, k0);
    }
    Ok(DAlgebraReport {
        charge,
        xi: (xi.re, xi.im),
        residuals,
    })
}

/// Interior residuals of the defining eigen-equations of a constructed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenResiduals {
    /// `||K- psi - xi psi||` for parity full, `||K-^2 psi - xi^2 psi||` otherwise.
    pub pair_lowering: f64,
    /// `||Q psi - c psi||`.
    pub charge: f64,
    /// `| ||psi|| - 1 |` (zero for unnormalized specs by convention).
    pub norm: f64,
}

impl EigenResiduals {
    pub fn max(&self) -> f64 {
        self.pair_lowering.max(self.charge).max(self.norm)
    }
}

pub fn eigen_residuals(spec: &CoherentFamilySpec, state: &TwoModeState, fs: &FockSpace) -> Result<EigenResiduals> {
    let xi = spec.xi();
    let once = fs.k_minus.apply(state)?;
    let pair_lowering = match spec.parity {
        Parity::Full => once.interior_distance(&state.scaled(xi)),
        _ => fs.k_minus.apply(&once)?.interior_distance(&state.scaled(xi * xi)),
    };
    let charge = fs
        .charge
        .apply(state)?
        .interior_distance(&state.scaled(Complex64::new(spec.charge as f64, 0.0)));
    Ok(EigenResiduals {
        pair_lowering,
        charge,
        norm: if spec.normalized {
            (state.norm() - 1.0).abs()
        } else {
            0.0
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::build_space;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn states_at_zero_xi() {
        let c = ctx(0.5);
        let space = TruncatedSpace::new(6).unwrap();
        let s = build_state(&c, &CoherentFamilySpec::new(0.0, 0.0, 0, Parity::Full).unwrap(), space).unwrap();
        assert!(s.distance(&TwoModeState::basis(space, 0, 0)) < 1e-15);
        let s = build_state(&c, &CoherentFamilySpec::new(0.0, 0.0, 3, Parity::Full).unwrap(), space).unwrap();
        assert!(s.distance(&TwoModeState::basis(space, 3, 0)) < 1e-15);
        let s = build_state(&c, &CoherentFamilySpec::new(0.0, 0.0, 2, Parity::Even).unwrap(), space).unwrap();
        assert!(s.distance(&TwoModeState::basis(space, 2, 0)) < 1e-15);
        assert!(matches!(
            CoherentFamilySpec::new(0.0, 0.0, 0, Parity::Odd),
            Err(QError::OddAtZero)
        ));
    }

    #[test]
    fn eigen_properties() {
        let c = ctx(0.5);
        let fs = build_space(&c, 30).unwrap();
        let xi = Complex64::from_polar(0.8, 0.4);
        let full = build_state(&c, &CoherentFamilySpec::from_xi(xi, 1, Parity::Full).unwrap(), fs.space).unwrap();
        assert!(fs.k_minus.apply(&full).unwrap().interior_distance(&full.scaled(xi)) < 1e-8);
        let odd = build_state(&c, &CoherentFamilySpec::from_xi(xi, 0, Parity::Odd).unwrap(), fs.space).unwrap();
        let kk = fs.k_minus.apply(&fs.k_minus.apply(&odd).unwrap()).unwrap();
        assert!(kk.interior_distance(&odd.scaled(xi * xi)) < 1e-8);
    }

    #[test]
    fn too_small_space_is_rejected() {
        let c = ctx(0.9);
        let spec = CoherentFamilySpec::new(4.0, 0.0, 0, Parity::Full).unwrap();
        let r = build_state(&c, &spec, TruncatedSpace::new(4).unwrap());
        assert!(matches!(r, Err(QError::TruncationInsufficient { .. })));
    }

    #[test]
    fn overlap_orthogonality() {
        let c = ctx(0.5);
        let e1 = CoherentFamilySpec::new(0.8, 0.3, 1, Parity::Even).unwrap();
        let o1 = CoherentFamilySpec::new(0.8, 0.3, 1, Parity::Odd).unwrap();
        let e2 = CoherentFamilySpec::new(1.1, -0.7, 2, Parity::Even).unwrap();
        assert_eq!(overlap(&c, &e1, &o1).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(overlap(&c, &e1, &e2).unwrap(), Complex64::new(0.0, 0.0));
        assert!((overlap(&c, &e1, &e1).unwrap() - 1.0).norm() < 1e-12);
        let f1 = CoherentFamilySpec::new(1.2, 1.0, -1, Parity::Full).unwrap();
        let f2 = CoherentFamilySpec::new(0.6, -2.0, -1, Parity::Full).unwrap();
        let r = overlap_routes(&c, &f1, &f2).unwrap();
        assert!((r.fock - r.closed).norm() < 1e-12);
    }

    #[test]
    fn decomposition_identities() {
        let c = ctx(0.5);
        let r = decomposition_check(&c, Complex64::new(0.8, 0.0), 1, TruncatedSpace::new(30).unwrap()).unwrap();
        assert!(r.max_residual() < 1e-10, "{r:?}");
    }

    #[test]
    fn u1_projection_matches_direct_state() {
        let c = ctx(0.5);
        let space = TruncatedSpace::new(30).unwrap();
        let direct = build_state(&c, &CoherentFamilySpec::new(0.64, 0.0, 0, Parity::Even).unwrap(), space).unwrap();
        let p1 = u1_project(
            &c,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.64, 0.0),
            0,
            Parity::Even,
            space,
        )
        .unwrap();
        let p2 = u1_project(
            &c,
            Complex64::new(2.0, 0.0),
            Complex64::new(0.32, 0.0),
            0,
            Parity::Even,
            space,
        )
        .unwrap();
        assert!(p1.distance_up_to_phase(&direct) < 1e-11);
        assert!(p2.distance_up_to_phase(&direct) < 1e-11);
    }

    #[test]
    fn dalgebra_actions() {
        for q in [0.5, 1.0] {
            let c = ctx(q);
            let fs = build_space(&c, 30).unwrap();
            for charge in [-2, -1, 1, 2] {
                let r = dalgebra_check(&c, charge, Complex64::from_polar(0.9, 0.3), &fs).unwrap();
                assert!(r.max_residual() < 1e-8, "q={q} {r:?}");
            }
        }
    }
}
