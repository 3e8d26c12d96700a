//! Numerical checks of the resolution of identity for the even and odd
//! charge coherent states.
//!
//! The angular integral is done analytically: it collapses each sector
//! operator onto its diagonal. What remains is a radial Jackson integral
//! in base `sqrt q` against `K_nu(q, [2] u)`, which is finite because `K_nu`
//! vanishes for `u >= zeta`. The lattice is anchored so that its points are
//! `u = zeta q^k`; every `e_q` argument inside `K_nu` then falls on
//! `-zeta q^m` and is served from a cache.

use std::f64::consts::PI;

use quadrature::double_exponential;
use serde::Serialize;

use crate::error::{QError, Result};
use crate::qcalculus::{qbessel_j_imaginary, qbessel_k, qbessel_k_with, QLattice};
use crate::qkernel::{Base, QContext};
use crate::states::normalization;

/// `int_{-pi}^{pi} e^{i k theta} d theta`.
pub fn theta_integral(k: i64) -> f64 {
    if k == 0 {
        2.0 * PI
    } else {
        0.0
    }
}

/// `e_q(-zeta q^m)` for `m = 1..`, with direct evaluation off the lattice.
struct ExpCache<'a> {
    ctx: &'a QContext,
    zeta: f64,
    ln_q: f64,
    values: Vec<f64>,
}

impl<'a> ExpCache<'a> {
    fn new(ctx: &'a QContext, zeta: f64) -> Result<Self> {
        let ln_q = ctx.q().ln();
        let len = (((1e-18 / zeta).ln() / ln_q).ceil().max(1.0) as usize).min(ctx.lattice_depth());
        let values = (1..=len)
            .map(|m| ctx.qexp(-zeta * ctx.q().powi(m as i32)))
            .collect::<Result<_>>()?;
        Ok(ExpCache {
            ctx,
            zeta,
            ln_q,
            values,
        })
    }

    fn get(&self, y: f64) -> Result<f64> {
        if y >= self.zeta {
            return Ok(0.0);
        }
        let m = ((y / self.zeta).ln() / self.ln_q).round();
        if m >= 1.0 && (m as usize) <= self.values.len() {
            let on_lattice = self.zeta * self.ctx.q().powi(m as i32);
            if (on_lattice - y).abs() <= 1e-12 * y {
                return Ok(self.values[m as usize - 1]);
            }
        }
        self.ctx.qexp(-y)
    }
}

/// `int_0^inf d_{sqrt q} u  u^{2p+1} g(u) K_nu(q, [2] u)` for `p = 0..=p_max`.
fn radial_integrals<G>(ctx: &QContext, nu: usize, p_max: usize, g: G) -> Result<Vec<f64>>
where
    G: Fn(f64) -> Result<f64>,
{
    let two = ctx.two_sqrt();
    if ctx.is_undeformed() {
        return (0..=p_max)
            .map(|p| {
                let f = |s: f64| {
                    if s <= 0.0 || s >= 1.0 {
                        return 0.0;
                    }
                    let u = s / (1.0 - s);
                    let v = (|| Ok::<f64, QError>(u.powi(2 * p as i32 + 1) * g(u)? * qbessel_k(ctx, nu, two * u)?))();
                    v.unwrap_or(f64::NAN) / ((1.0 - s) * (1.0 - s))
                };
                let out = double_exponential::integrate(f, 0.0, 1.0, ctx.series_tol() * 1e-2);
                if out.integral.is_finite() {
                    Ok(out.integral)
                } else {
                    Err(QError::NonConvergence {
                        what: "radial quadrature",
                        terms: out.num_function_evaluations as usize,
                    })
                }
            })
            .collect();
    }
    let zeta = ctx.find_zeta()?;
    let cache = ExpCache::new(ctx, zeta)?;
    let lattice = QLattice::new(ctx.sqrt_q(), zeta / ctx.sqrt_q(), ctx.lattice_depth())?;
    let mut sums = vec![0.0; p_max + 1];
    let mut quiet = 0;
    let mut last = 0.0;
    // k = 0 sits on u = zeta, where K_nu has no support.
    for k in 1..=ctx.lattice_depth() as i64 {
        let u = lattice.point(k);
        let kv = qbessel_k_with(ctx, nu, two * u, |t| cache.get(t))?;
        let base = lattice.spacing() * u * u * g(u)? * kv;
        let mut w = base;
        for s in sums.iter_mut() {
            *s += w;
            w *= u * u;
        }
        last = base;
        if base.abs() <= ctx.series_tol() * sums[0].abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sums);
            }
        } else {
            quiet = 0;
        }
    }
    Err(QError::TailNotConverged {
        contribution: last,
        sum: sums[0],
    })
}

/// `int_0^inf d_{sqrt q} u  u^{2p+nu+1} K_nu(q, [2]_{sqrt q} u)` for `p = 0..=p_max`.
pub fn radial_moments(ctx: &QContext, nu: usize, p_max: usize) -> Result<Vec<f64>> {
    radial_integrals(ctx, nu, p_max, |u| Ok(u.powi(nu as i32)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentCheckResult {
    pub q: f64,
    pub n: usize,
    pub charge: i64,
    /// `[2]^2` times the radial moment.
    pub computed: f64,
    /// `[n]! [n+|c|]!`.
    pub expected: f64,
    pub relative_error: f64,
}

impl MomentCheckResult {
    fn new(ctx: &QContext, n: usize, charge: i64, moment: f64) -> Self {
        let nu = charge.unsigned_abs() as usize;
        let two = ctx.two_sqrt();
        let computed = two * two * moment;
        let expected = (ctx.ln_qfactorial(n, Base::Q) + ctx.ln_qfactorial(n + nu, Base::Q)).exp();
        MomentCheckResult {
            q: ctx.q(),
            n,
            charge,
            computed,
            expected,
            relative_error: (computed - expected).abs() / expected,
        }
    }
}

/// Compares `[2]^2 int u^{2n+|c|+1} K_|c|(q, [2] u)` with `[n]! [n+|c|]!`.
pub fn radial_moment_check(ctx: &QContext, n: usize, charge: i64) -> Result<MomentCheckResult> {
    let m = radial_moments(ctx, charge.unsigned_abs() as usize, n)?;
    Ok(MomentCheckResult::new(ctx, n, charge, m[n]))
}

/// [`radial_moment_check`] for every `n <= n_max` and each listed charge,
/// one lattice sweep per charge.
pub fn radial_moment_grid(ctx: &QContext, n_max: usize, charges: &[i64]) -> Result<Vec<MomentCheckResult>> {
    let rows = ctx.exec().map(charges, |&c| -> Result<Vec<MomentCheckResult>> {
        let m = radial_moments(ctx, c.unsigned_abs() as usize, n_max)?;
        Ok((0..=n_max).map(|n| MomentCheckResult::new(ctx, n, c, m[n])).collect())
    });
    Ok(rows.into_iter().collect::<Result<Vec<_>>>()?.concat())
}

/// Matrix of one sector operator `I_c` on its first `n_check + 1` basis
/// vectors, assembled from the weight function and the analytic angle integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorIdentityReport {
    pub q: f64,
    pub charge: i64,
    pub n_check: usize,
    /// Row-major `(n_check + 1)^2` entries.
    pub matrix: Vec<f64>,
}

impl SectorIdentityReport {
    pub fn entry(&self, n: usize, m: usize) -> f64 {
        self.matrix[n * (self.n_check + 1) + m]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..=self.n_check).map(|n| self.entry(n, n)).collect()
    }

    /// Largest `|I_nn - 1|`.
    pub fn diagonal_deviation(&self) -> f64 {
        self.diagonal().iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn off_diagonal_max(&self) -> f64 {
        let k = self.n_check + 1;
        (0..k * k)
            .filter(|i| i / k != i % k)
            .map(|i| self.matrix[i].abs())
            .fold(0.0, f64::max)
    }
}

/// The completeness weight times the full normalization,
/// `(-i)^nu J_nu(q, i sqrt(q) [2] r) N^2(r^2)`, evaluated as two series.
fn weight_times_norm(ctx: &QContext, nu: usize, charge: i64, r: f64) -> Result<f64> {
    let j = qbessel_j_imaginary(ctx, nu, ctx.sqrt_q() * ctx.two_sqrt() * r)?;
    let n = normalization(ctx, r, charge, crate::states::Parity::Full)?;
    Ok(j * n * n)
}

/// `<n| I_c |m>` in the sector basis for `n, m <= n_check`.
///
/// With `xi = r e^{i theta}` each entry is
/// `(1/pi) int d theta e^{i(n-m) theta} int d_{sqrt q} r  r^{n+m+1} ([2]^2/2) w(r) K(r) / sqrt(...)`,
/// kept only when `n` and `m` share a parity (the even and odd projectors
/// do not mix).
pub fn resolution_of_identity(ctx: &QContext, charge: i64, n_check: usize) -> Result<SectorIdentityReport> {
    let nu = charge.unsigned_abs() as usize;
    let two = ctx.two_sqrt();
    let radial = radial_integrals(ctx, nu, n_check, |r| weight_times_norm(ctx, nu, charge, r))?;
    let ln_f = |n: usize| 0.5 * (ctx.ln_qfactorial(n, Base::Q) + ctx.ln_qfactorial(n + nu, Base::Q));
    let k = n_check + 1;
    let mut matrix = vec![0.0; k * k];
    for n in 0..k {
        for m in 0..k {
            let angle = theta_integral(n as i64 - m as i64);
            if angle == 0.0 || n % 2 != m % 2 {
                continue;
            }
            // n == m here, so r^{n+m+1} = r^{2n+1}.
            matrix[n * k + m] = angle / PI * 0.5 * two * two * radial[n] / (ln_f(n) + ln_f(m)).exp();
        }
    }
    Ok(SectorIdentityReport {
        q: ctx.q(),
        charge,
        n_check,
        matrix,
    })
}

/// Sum of the sector operators over `|c| <= n_check`, on the basis block
/// `|m, n>` with `m, n <= n_check`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityBlockReport {
    pub q: f64,
    pub n_check: usize,
    /// `(m, n, <m,n| sum_c I_c |m,n>)` for every basis vector in the block.
    pub diagonal: Vec<(usize, usize, f64)>,
    /// Largest off-diagonal entry; entries across sectors vanish because
    /// each `I_c` preserves the charge.
    pub off_diagonal_max: f64,
}

impl IdentityBlockReport {
    pub fn max_deviation(&self) -> f64 {
        self.diagonal
            .iter()
            .map(|&(_, _, d)| (d - 1.0).abs())
            .fold(self.off_diagonal_max, f64::max)
    }
}

pub fn identity_block(ctx: &QContext, n_check: usize) -> Result<IdentityBlockReport> {
    let nc = n_check as i64;
    let charges: Vec<i64> = (-nc..=nc).collect();
    let sectors = ctx
        .exec()
        .map(&charges, |&c| {
            resolution_of_identity(ctx, c, n_check - c.unsigned_abs() as usize)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut diagonal = Vec::new();
    let mut off = 0.0f64;
    for s in &sectors {
        off = off.max(s.off_diagonal_max());
        for (p, d) in s.diagonal().into_iter().enumerate() {
            let (m, n) = crate::states::sector_pair(s.charge, p);
            diagonal.push((m, n, d));
        }
    }
    diagonal.sort_by_key(|&(m, n, _)| (m, n));
    Ok(IdentityBlockReport {
        q: ctx.q(),
        n_check,
        diagonal,
        off_diagonal_max: off,
    })
}
