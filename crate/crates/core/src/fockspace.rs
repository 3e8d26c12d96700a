//! Truncated two-mode Fock space and the deformed generators acting on it.
//!
//! Basis vectors `|m, n>` with `0 <= m, n <= n_max` are stored at flat index
//! `m * (n_max + 1) + n`. Operators are real sparse matrices; states carry
//! complex coefficients.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;
use sprs::{CsMat, TriMat};

use crate::error::{QError, Result};
use crate::qkernel::{Base, QContext};

pub const DEFAULT_LEAKAGE_TOL: f64 = 1e-12;

/// Index bookkeeping for the truncated two-mode basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TruncatedSpace {
    n_max: usize,
}

impl TruncatedSpace {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(QError::InvalidParameter(format!(
                "n_max must be at least 2, got {n_max}"
            )));
        }
        Ok(TruncatedSpace { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn side(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        self.side() * self.side()
    }

    pub fn index(&self, m: usize, n: usize) -> usize {
        debug_assert!(m <= self.n_max && n <= self.n_max);
        m * self.side() + n
    }

    pub fn pair(&self, idx: usize) -> (usize, usize) {
        (idx / self.side(), idx % self.side())
    }

    /// Both occupations at most `n_max - 2`.
    pub fn is_interior(&self, idx: usize) -> bool {
        let (m, n) = self.pair(idx);
        m + 2 <= self.n_max && n + 2 <= self.n_max
    }
}

/// A real sparse matrix on the truncated basis with a label and the shift it
/// applies to the charge `m - n`.
#[derive(Clone)]
pub struct LinearOperator {
    label: String,
    matrix: CsMat<f64>,
    charge_shift: i64,
}

impl fmt::Debug for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearOperator")
            .field("label", &self.label)
            .field("dim", &self.matrix.rows())
            .field("nnz", &self.matrix.nnz())
            .field("charge_shift", &self.charge_shift)
            .finish()
    }
}

impl LinearOperator {
    pub fn from_triplets(label: &str, dim: usize, entries: &[(usize, usize, f64)], charge_shift: i64) -> Self {
        let mut tri = TriMat::new((dim, dim));
        for &(r, c, v) in entries {
            tri.add_triplet(r, c, v);
        }
        LinearOperator {
            label: label.to_string(),
            matrix: tri.to_csr(),
            charge_shift,
        }
    }

    pub fn diagonal(label: &str, space: &TruncatedSpace, f: impl Fn(usize, usize) -> f64) -> Self {
        let entries: Vec<_> = (0..space.dim())
            .map(|i| {
                let (m, n) = space.pair(i);
                (i, i, f(m, n))
            })
            .filter(|e| e.2 != 0.0)
            .collect();
        Self::from_triplets(label, space.dim(), &entries, 0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn charge_shift(&self) -> i64 {
        self.charge_shift
    }

    pub fn matrix(&self) -> &CsMat<f64> {
        &self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix.get(row, col).copied().unwrap_or(0.0)
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.matrix.nnz());
        for (r, row) in self.matrix.outer_iterator().enumerate() {
            for (c, &v) in row.iter() {
                out.push((r, c, v));
            }
        }
        out
    }

    pub fn transpose(&self, label: &str) -> Self {
        LinearOperator {
            label: label.to_string(),
            matrix: self.matrix.transpose_view().to_csr(),
            charge_shift: -self.charge_shift,
        }
    }

    /// Matrix product `self * rhs`.
    pub fn compose(&self, rhs: &LinearOperator) -> Self {
        LinearOperator {
            label: format!("{} {}", self.label, rhs.label),
            matrix: &self.matrix * &rhs.matrix,
            charge_shift: self.charge_shift + rhs.charge_shift,
        }
    }

    /// `sum_i c_i A_i`; the charge shift of the first term is kept.
    pub fn combine(label: &str, terms: &[(f64, &LinearOperator)]) -> Self {
        let dim = terms.first().map(|t| t.1.dim()).unwrap_or(0);
        let mut entries = Vec::new();
        for (c, op) in terms {
            for (r, col, v) in op.entries() {
                entries.push((r, col, c * v));
            }
        }
        let shift = terms.first().map(|t| t.1.charge_shift).unwrap_or(0);
        Self::from_triplets(label, dim, &entries, shift)
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &LinearOperator) -> Self {
        let ab = self.compose(rhs);
        let ba = rhs.compose(self);
        Self::combine(&format!("[{}, {}]", self.label, rhs.label), &[(1.0, &ab), (-1.0, &ba)])
    }

    /// Largest `|self - other|` entry, optionally restricted to rows and
    /// columns inside the interior block of `space`.
    pub fn max_deviation(&self, other: &LinearOperator, interior: Option<&TruncatedSpace>) -> f64 {
        let diff = Self::combine("diff", &[(1.0, self), (-1.0, other)]);
        diff.entries()
            .into_iter()
            .filter(|(r, c, _)| interior.is_none_or(|s| s.is_interior(*r) && s.is_interior(*c)))
            .map(|e| e.2.abs())
            .fold(0.0, f64::max)
    }

    /// [`Self::max_deviation`] divided by the largest entry of `other`
    /// (floored at 1) in the same region.
    pub fn relative_deviation(&self, other: &LinearOperator, interior: Option<&TruncatedSpace>) -> f64 {
        let scale = other
            .entries()
            .into_iter()
            .filter(|(r, c, _)| interior.is_none_or(|s| s.is_interior(*r) && s.is_interior(*c)))
            .map(|e| e.2.abs())
            .fold(1.0, f64::max);
        self.max_deviation(other, interior) / scale
    }

    pub fn apply(&self, state: &TwoModeState) -> Result<TwoModeState> {
        self.apply_with_tol(state, DEFAULT_LEAKAGE_TOL)
    }

    /// Matrix-vector product; warns when the input carries more than `tol`
    /// weight in the two outermost shells, where truncation corrupts the result.
    pub fn apply_with_tol(&self, state: &TwoModeState, tol: f64) -> Result<TwoModeState> {
        if self.dim() != state.coefficients.len() {
            return Err(QError::DimensionMismatch {
                op: self.dim(),
                state: state.coefficients.len(),
            });
        }
        let edge = state.edge_weight();
        if edge > tol {
            log::warn!(
                "applying {} to a state with edge weight {edge:.3e} > {tol:.1e}; result is truncation-affected",
                self.label
            );
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (r, row) in self.matrix.outer_iterator().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, &v) in row.iter() {
                acc += state.coefficients[c] * v;
            }
            out[r] = acc;
        }
        Ok(TwoModeState {
            space: state.space,
            coefficients: out,
            charge: state.charge.map(|q| q + self.charge_shift),
        })
    }
}

/// Coefficient vector on the truncated basis with an optional charge tag.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    space: TruncatedSpace,
    coefficients: Vec<Complex64>,
    charge: Option<i64>,
}

impl TwoModeState {
    pub fn zeros(space: TruncatedSpace, charge: Option<i64>) -> Self {
        TwoModeState {
            space,
            coefficients: vec![Complex64::new(0.0, 0.0); space.dim()],
            charge,
        }
    }

    pub fn basis(space: TruncatedSpace, m: usize, n: usize) -> Self {
        let mut s = Self::zeros(space, Some(m as i64 - n as i64));
        s.coefficients[space.index(m, n)] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_coefficients(space: TruncatedSpace, coefficients: Vec<Complex64>, charge: Option<i64>) -> Result<Self> {
        if coefficients.len() != space.dim() {
            return Err(QError::DimensionMismatch {
                op: space.dim(),
                state: coefficients.len(),
            });
        }
        Ok(TwoModeState {
            space,
            coefficients,
            charge,
        })
    }

    pub fn space(&self) -> TruncatedSpace {
        self.space
    }

    pub fn charge(&self) -> Option<i64> {
        self.charge
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, m: usize, n: usize) -> Complex64 {
        self.coefficients[self.space.index(m, n)]
    }

    pub fn set(&mut self, m: usize, n: usize, c: Complex64) {
        let i = self.space.index(m, n);
        self.coefficients[i] = c;
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Squared weight on basis vectors with `m` or `n` above `n_max - 2`.
    pub fn edge_weight(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.space.is_interior(*i))
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &TwoModeState) -> Complex64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        TwoModeState {
            space: self.space,
            coefficients: self.coefficients.iter().map(|v| v * c).collect(),
            charge: self.charge,
        }
    }

    /// `a * self + b * other`; the charge tag survives only if both agree.
    pub fn linear_combination(&self, a: Complex64, other: &TwoModeState, b: Complex64) -> Self {
        TwoModeState {
            space: self.space,
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(x, y)| a * x + b * y)
                .collect(),
            charge: if self.charge == other.charge { self.charge } else { None },
        }
    }

    /// `||self - other||` restricted to interior basis vectors.
    pub fn interior_distance(&self, other: &TwoModeState) -> f64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .enumerate()
            .filter(|(i, _)| self.space.is_interior(*i))
            .map(|(_, (a, b))| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `||self - other||` over the whole truncated space.
    pub fn distance(&self, other: &TwoModeState) -> f64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `min_phi ||self - e^{i phi} other||`, for comparisons that ignore a
    /// global phase.
    pub fn distance_up_to_phase(&self, other: &TwoModeState) -> f64 {
        let ov = other.inner(self);
        let phase = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.distance(&other.scaled(phase))
    }

    /// `<self| op |self>`.
    pub fn expectation(&self, op: &LinearOperator) -> Result<Complex64> {
        Ok(self.inner(&op.apply(self)?))
    }

    /// Nonzero coefficients as `(m, n, c)` in basis order.
    pub fn nonzero(&self) -> Vec<(usize, usize, Complex64)> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(i, c)| {
                let (m, n) = self.space.pair(i);
                (m, n, *c)
            })
            .collect()
    }
}

/// The generators on one truncated space.
#[derive(Debug, Clone)]
pub struct FockSpace {
    pub space: TruncatedSpace,
    pub a1: LinearOperator,
    pub a1_dag: LinearOperator,
    pub a2: LinearOperator,
    pub a2_dag: LinearOperator,
    pub n1: LinearOperator,
    pub n2: LinearOperator,
    pub charge: LinearOperator,
    pub k_minus: LinearOperator,
    pub k_plus: LinearOperator,
    pub k0: LinearOperator,
    /// Diagonal `[m + n + 1]`.
    pub bracket_2k0: LinearOperator,
    q: f64,
}

fn lowering(label: &str, space: &TruncatedSpace, mode: usize, value: impl Fn(usize) -> f64) -> LinearOperator {
    let mut entries = Vec::new();
    for m in 0..=space.n_max() {
        for n in 0..=space.n_max() {
            let (k, from, to) = if mode == 1 {
                (m, (m, n), (m.wrapping_sub(1), n))
            } else {
                (n, (m, n), (m, n.wrapping_sub(1)))
            };
            if k == 0 {
                continue;
            }
            entries.push((space.index(to.0, to.1), space.index(from.0, from.1), value(k)));
        }
    }
    let shift = if mode == 1 { -1 } else { 1 };
    LinearOperator::from_triplets(label, space.dim(), &entries, shift)
}

/// Build the truncated space with its generator set.
pub fn build_space(ctx: &QContext, n_max: usize) -> Result<FockSpace> {
    let space = TruncatedSpace::new(n_max)?;
    let sq = |k: usize| ctx.qnumber(k, Base::Q).sqrt();
    let a1 = lowering("a1", &space, 1, sq);
    let a2 = lowering("a2", &space, 2, sq);
    let a1_dag = a1.transpose("a1+");
    let a2_dag = a2.transpose("a2+");
    let n1 = LinearOperator::diagonal("N1", &space, |m, _| m as f64);
    let n2 = LinearOperator::diagonal("N2", &space, |_, n| n as f64);
    let charge = LinearOperator::diagonal("Q", &space, |m, n| m as f64 - n as f64);
    let mut k_minus = a1.compose(&a2);
    k_minus.label = "K-".into();
    let mut k_plus = a1_dag.compose(&a2_dag);
    k_plus.label = "K+".into();
    let k0 = LinearOperator::diagonal("K0", &space, |m, n| (m + n + 1) as f64 / 2.0);
    let bracket_2k0 = LinearOperator::diagonal("[2K0]", &space, |m, n| ctx.qnumber(m + n + 1, Base::Q));
    Ok(FockSpace {
        space,
        a1,
        a1_dag,
        a2,
        a2_dag,
        n1,
        n2,
        charge,
        k_minus,
        k_plus,
        k0,
        bracket_2k0,
        q: ctx.q(),
    })
}

impl FockSpace {
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Diagonal `q^{-N_i}`.
    pub fn q_pow_minus_n(&self, mode: usize) -> LinearOperator {
        let q = self.q;
        LinearOperator::diagonal("q^-N", &self.space, |m, n| {
            q.powi(-((if mode == 1 { m } else { n }) as i32))
        })
    }
}

/// Largest elementwise deviation of each algebra relation, relative to the
/// largest entry of its right-hand side (floored at 1).
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorReport {
    /// `a_i a_i+ - q a_i+ a_i - q^{-N_i}` for modes 1 and 2 (interior).
    pub heisenberg: [f64; 2],
    /// `[N_i, a_i+] - a_i+` (interior).
    pub number_raising: [f64; 2],
    /// `[N_i, a_i] + a_i` (interior).
    pub number_lowering: [f64; 2],
    /// `[K+, K-] + [2K0]` (interior).
    pub k_plus_k_minus: f64,
    /// `[K0, K+] - K+` (interior).
    pub k0_k_plus: f64,
    /// `[K0, K-] + K-` (interior).
    pub k0_k_minus: f64,
    /// `[Q, a1 a2]` on the full matrix.
    pub charge_k_minus: f64,
}

impl CommutatorReport {
    pub fn max_deviation(&self) -> f64 {
        self.heisenberg
            .iter()
            .chain(&self.number_raising)
            .chain(&self.number_lowering)
            .chain([
                &self.k_plus_k_minus,
                &self.k0_k_plus,
                &self.k0_k_minus,
                &self.charge_k_minus,
            ])
            .fold(0.0, |a, &b| a.max(b))
    }
}

pub fn commutator_suite(fs: &FockSpace) -> CommutatorReport {
    let interior = Some(&fs.space);
    let modes = [(&fs.a1, &fs.a1_dag, &fs.n1, 1), (&fs.a2, &fs.a2_dag, &fs.n2, 2)];
    let mut heisenberg = [0.0; 2];
    let mut raising = [0.0; 2];
    let mut lowering = [0.0; 2];
    for (i, (a, ad, n, mode)) in modes.into_iter().enumerate() {
        let lhs = LinearOperator::combine("", &[(1.0, &a.compose(ad)), (-fs.q, &ad.compose(a))]);
        heisenberg[i] = lhs.relative_deviation(&fs.q_pow_minus_n(mode), interior);
        raising[i] = n.commutator(ad).relative_deviation(ad, interior);
        let minus_a = LinearOperator::combine("", &[(-1.0, a)]);
        lowering[i] = n.commutator(a).relative_deviation(&minus_a, interior);
    }
    let minus_bracket = LinearOperator::combine("", &[(-1.0, &fs.bracket_2k0)]);
    let minus_k = LinearOperator::combine("", &[(-1.0, &fs.k_minus)]);
    let zero = LinearOperator::from_triplets("0", fs.space.dim(), &[], 0);
    CommutatorReport {
        heisenberg,
        number_raising: raising,
        number_lowering: lowering,
        k_plus_k_minus: fs
            .k_plus
            .commutator(&fs.k_minus)
            .relative_deviation(&minus_bracket, interior),
        k0_k_plus: fs.k0.commutator(&fs.k_plus).relative_deviation(&fs.k_plus, interior),
        k0_k_minus: fs.k0.commutator(&fs.k_minus).relative_deviation(&minus_k, interior),
        charge_k_minus: fs.charge.commutator(&fs.k_minus).relative_deviation(&zero, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(q: f64, n_max: usize) -> FockSpace {
        build_space(&QContext::new(q).unwrap(), n_max).unwrap()
    }

    #[test]
    fn index_map_is_bijective() {
        let s = TruncatedSpace::new(5).unwrap();
        for i in 0..s.dim() {
            let (m, n) = s.pair(i);
            assert_eq!(s.index(m, n), i);
        }
        assert!(TruncatedSpace::new(1).is_err());
    }

    #[test]
    fn lowering_examples() {
        let f = fs(0.5, 4);
        let s = TwoModeState::basis(f.space, 1, 0);
        let out = f.a1.apply(&s).unwrap();
        assert_eq!(out, TwoModeState::basis(f.space, 0, 0));
        let num = f.a1_dag.compose(&f.a1);
        let ctx = QContext::new(0.5).unwrap();
        for m in 0..=4 {
            let i = f.space.index(m, 2);
            assert!((num.get(i, i) - ctx.qnumber(m, Base::Q)).abs() < 1e-14);
        }
        let i = f.space.index(3, 1);
        assert_eq!(f.charge.get(i, i), 2.0);
    }

    #[test]
    fn k_actions_on_low_states() {
        let f = fs(0.5, 4);
        let out = f.k_minus.apply(&TwoModeState::basis(f.space, 1, 1)).unwrap();
        assert!(out.distance(&TwoModeState::basis(f.space, 0, 0)) < 1e-15);
        let out = f.k_plus.apply(&TwoModeState::basis(f.space, 0, 0)).unwrap();
        assert!(out.distance(&TwoModeState::basis(f.space, 1, 1)) < 1e-15);
        assert_eq!(out.charge(), Some(0));
    }

    #[test]
    fn adjoints_are_exact_transposes() {
        let f = fs(0.7, 6);
        for (a, ad) in [(&f.a1, &f.a1_dag), (&f.a2, &f.a2_dag)] {
            for (r, c, v) in a.entries() {
                assert_eq!(ad.get(c, r), v);
            }
            assert_eq!(a.entries().len(), ad.entries().len());
        }
    }

    #[test]
    fn undeformed_algebra_is_exact() {
        let r = commutator_suite(&fs(1.0, 6));
        assert!(r.max_deviation() < 1e-12, "{r:?}");
    }

    #[test]
    fn deformed_algebra_on_interior() {
        let r = commutator_suite(&fs(0.5, 8));
        assert!(r.max_deviation() < 1e-10, "{r:?}");
        assert_eq!(r.charge_k_minus, 0.0);
    }

    #[test]
    fn construction_from_undeformed_bosons() {
        let ctx = QContext::new(0.6).unwrap();
        let f = build_space(&ctx, 7).unwrap();
        let b1 = lowering("b1", &f.space, 1, |k| (k as f64).sqrt());
        // sqrt([N+1]/(N+1)) acting after b1, with N the undeformed number operator
        let scale = LinearOperator::diagonal("s", &f.space, |m, _| {
            (ctx.qnumber(m + 1, Base::Q) / (m + 1) as f64).sqrt()
        });
        let a1 = scale.compose(&b1);
        assert!(a1.max_deviation(&f.a1, None) < 1e-12);
    }

    #[test]
    fn charge_tag_follows_shifts() {
        let f = fs(0.5, 4);
        let s = TwoModeState::basis(f.space, 2, 1);
        assert_eq!(f.a1.apply(&s).unwrap().charge(), Some(0));
        assert_eq!(f.a2.apply(&s).unwrap().charge(), Some(2));
        let qs = f.charge.apply(&s).unwrap();
        assert!(qs.distance(&s.scaled(Complex64::new(1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = fs(0.5, 4);
        let s = TwoModeState::basis(TruncatedSpace::new(3).unwrap(), 0, 0);
        assert!(matches!(f.a1.apply(&s), Err(QError::DimensionMismatch { .. })));
    }
}
