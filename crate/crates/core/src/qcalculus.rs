//! Symmetric q-derivative, Jackson q-integrals and the q-Bessel functions.
//!
//! The lattice convention is the symmetric one: an integral in base `b`
//! samples the points `anchor * b^(2k+1)` with weight `(1/b - b) * point`.
//! On `[0, a]` this exactly inverts the symmetric q-derivative
//! `(f(bx) - f(x/b)) / ((b - 1/b) x)`.

use quadrature::double_exponential;

use crate::error::{QError, Result};
use crate::qkernel::{Base, QContext, Terms};

/// Geometric sample points `anchor * base^(2k+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QLattice {
    base: f64,
    anchor: f64,
    depth: usize,
}

impl QLattice {
    pub fn new(base: f64, anchor: f64, depth: usize) -> Result<Self> {
        if base == 1.0 {
            return Err(QError::DegenerateLattice);
        }
        if !(base > 0.0 && base < 1.0) {
            return Err(QError::InvalidParameter(format!("lattice base {base} outside (0,1)")));
        }
        if !(anchor > 0.0 && anchor.is_finite()) {
            return Err(QError::InvalidParameter(format!(
                "lattice anchor {anchor} must be positive"
            )));
        }
        Ok(QLattice { base, anchor, depth })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `anchor * base^(2k+1)`; positive `k` moves toward 0.
    pub fn point(&self, k: i64) -> f64 {
        self.anchor * self.base.powi((2 * k + 1) as i32)
    }

    /// Jackson weight `(1/b - b)`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.base - self.base
    }

    /// Sum over `k >= 0` (the finite integral on `[0, anchor]`).
    pub fn sum_toward_zero<F>(&self, f: F, tol: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        self.sweep(&f, tol, 0, 1).map(|s| s * self.spacing())
    }

    /// Sum over every integer `k` (the integral on `[0, inf)`).
    pub fn sum_all<F>(&self, f: F, tol: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let down = self.sweep(&f, tol, 0, 1)?;
        let up = self.sweep(&f, tol, -1, -1)?;
        Ok((down + up) * self.spacing())
    }

    fn sweep<F>(&self, f: &F, tol: f64, start: i64, step: i64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        const QUIET_SHELLS: usize = 3;
        let mut sum = 0.0;
        let mut quiet = 0;
        let mut last = 0.0;
        let mut k = start;
        for _ in 0..self.depth {
            let t = self.point(k);
            if t == 0.0 || !t.is_finite() {
                return Ok(sum);
            }
            last = t * f(t)?;
            sum += last;
            if last.abs() <= tol * sum.abs() {
                quiet += 1;
                if quiet >= QUIET_SHELLS {
                    return Ok(sum);
                }
            } else {
                quiet = 0;
            }
            k += step;
        }
        Err(QError::TailNotConverged {
            contribution: last,
            sum,
        })
    }
}

/// Symmetric difference quotient `(f(bx) - f(x/b)) / ((b - 1/b) x)`.
pub fn symmetric_difference<F>(base: f64, f: F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if x == 0.0 {
        return Err(QError::DivisionByZero("q-derivative at x = 0"));
    }
    if base == 1.0 {
        return Err(QError::DivisionByZero("q-derivative with q = 1"));
    }
    Ok((f(base * x)? - f(x / base)?) / ((base - 1.0 / base) * x))
}

/// The symmetric q-derivative `D_q` in base `q`.
pub fn qderivative<F>(ctx: &QContext, f: F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    symmetric_difference(ctx.q(), f, x)
}

/// `int_0^upper f(t) d_b t` in the chosen base.
pub fn qintegral_in<F>(ctx: &QContext, base: Base, f: F, upper: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if upper == 0.0 {
        return Ok(0.0);
    }
    let b = ctx.base_value(base);
    let lattice = QLattice::new(b, upper, ctx.lattice_depth())?;
    lattice.sum_toward_zero(f, ctx.series_tol())
}

/// `int_0^upper f(t) d_q t`.
pub fn qintegral<F>(ctx: &QContext, f: F, upper: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    qintegral_in(ctx, Base::Q, f, upper)
}

/// `int_0^inf f(t) d_b t` on the lattice `anchor * b^(2k+1)`, `k` over all integers.
pub fn qintegral_inf<F>(ctx: &QContext, base: Base, f: F, anchor: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let lattice = QLattice::new(ctx.base_value(base), anchor, ctx.lattice_depth())?;
    lattice.sum_all(f, ctx.series_tol())
}

/// Rescaled argument `x / (sqrt(q) [2]_{sqrt q})` of the J series.
pub fn bessel_argument(ctx: &QContext, x: f64) -> f64 {
    x / (ctx.sqrt_q() * ctx.two_sqrt())
}

/// `J_nu(q, x) = sum_k (-1)^k / ([k]! [nu+k]!) (x / (sqrt(q) [2]_{sqrt q}))^(nu+2k)`.
pub fn qbessel_j(ctx: &QContext, nu: usize, x: f64) -> Result<f64> {
    let z = bessel_argument(ctx, x);
    if z == 0.0 {
        return Ok(if nu == 0 { 1.0 } else { 0.0 });
    }
    let s = ctx.pair_series(-z * z, nu, Terms::All)?;
    Ok(z.powi(nu as i32) * s)
}

/// `(-i)^nu J_nu(q, i r)` for real `r`: the all-positive series
/// `sum_k z^(nu+2k) / ([k]! [nu+k]!)` with `z = r / (sqrt(q) [2]_{sqrt q})`.
pub fn qbessel_j_imaginary(ctx: &QContext, nu: usize, r: f64) -> Result<f64> {
    let z = bessel_argument(ctx, r);
    if z == 0.0 {
        return Ok(if nu == 0 { 1.0 } else { 0.0 });
    }
    Ok(z.powi(nu as i32) * ctx.pair_series(z * z, nu, Terms::All)?)
}

/// Upper end `[2]_{sqrt q} zeta` of the argument range where K_nu is nonzero.
pub fn qbessel_k_limit(ctx: &QContext) -> Result<f64> {
    Ok(ctx.two_sqrt() * ctx.find_zeta()?)
}

/// `K_nu(q, x)` from its q-integral representation over `t`.
///
/// The integrand carries `e_q(-t) e_q(-x^2/([2]^2 t))`, so only lattice
/// points inside `x^2/([2]^2 zeta) < t < zeta` contribute and the sum is
/// finite. At `q = 1` the ordinary integral is evaluated by
/// double-exponential quadrature.
pub fn qbessel_k(ctx: &QContext, nu: usize, x: f64) -> Result<f64> {
    qbessel_k_with(ctx, nu, x, |t| ctx.qexp(-t))
}

/// [`qbessel_k`] with a caller-supplied evaluator for `t -> e_q(-t)`.
pub fn qbessel_k_with<E>(ctx: &QContext, nu: usize, x: f64, e_neg: E) -> Result<f64>
where
    E: Fn(f64) -> Result<f64>,
{
    if !(x > 0.0) {
        return Err(QError::InvalidParameter(format!("K_nu needs x > 0, got {x}")));
    }
    if ctx.is_undeformed() {
        return classical_k(ctx, nu, x);
    }
    let two = ctx.two_sqrt();
    let zeta = ctx.find_zeta()?;
    let limit = two * zeta;
    if x >= limit {
        return Err(QError::EmptySupport { x, limit });
    }
    let c = x * x / (two * two);
    let lower = c / zeta;
    let q = ctx.q();
    let mut sum = 0.0;
    let mut last = 0.0;
    let mut t = zeta * q;
    for _ in 0..ctx.lattice_depth() {
        if t <= lower {
            let pre = (x / two).powi(nu as i32) / two;
            return Ok(pre * (1.0 / q - q) * sum);
        }
        last = t.powi(-(nu as i32)) * e_neg(t)? * e_neg(c / t)?;
        sum += last;
        t *= q * q;
    }
    Err(QError::TailNotConverged {
        contribution: last,
        sum,
    })
}

/// `K_nu(x) = int_0^inf e^{-x cosh t} cosh(nu t) dt`, which stays smooth as `x -> 0`.
fn classical_k(ctx: &QContext, nu: usize, x: f64) -> Result<f64> {
    // e^{-x} int e^{-x (cosh t - 1)} cosh(nu t) dt with t = w / sqrt(x): the
    // peak at t = 0 has width ~ 1/sqrt(x).
    let scale = x.sqrt().max(1.0);
    let integrand = |s: f64| {
        if s <= 0.0 || s >= 1.0 {
            return 0.0;
        }
        let t = s / (1.0 - s) / scale;
        let v = (-x * (t.cosh() - 1.0)).exp() * (nu as f64 * t).cosh();
        if v.is_finite() {
            v / ((1.0 - s) * (1.0 - s) * scale)
        } else {
            0.0
        }
    };
    let out = double_exponential::integrate(integrand, 0.0, 1.0, ctx.series_tol() * 1e-3);
    Ok(out.integral * (-x).exp())
}
