use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use qcat_core::completeness::{radial_moment_check, resolution_of_identity};
use qcat_core::fockspace::{build_space, commutator_suite, LinearOperator};
use qcat_core::observables::{
    correlation_g, coth_identity_residual, fock_state, single_mode_variances, su11_variances, two_mode_variances,
    QuadratureReport,
};
use qcat_core::states::{dalgebra_check, eigen_residuals, overlap_routes, CoherentFamilySpec, Parity};
use qcat_core::{Base, QContext, QError};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Cell, Document, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Algebra,
    States,
    Observables,
    Completeness,
    All,
}

const CHARGES: [i64; 5] = [-2, -1, 0, 1, 2];
const MODULI: [f64; 4] = [0.3, 0.8, 1.5, 3.0];
const PARITIES: [Parity; 3] = [Parity::Even, Parity::Odd, Parity::Full];

struct Checks {
    suite: &'static str,
    table: Table,
    failed: usize,
}

impl Checks {
    fn record(&mut self, check: &str, case: String, tol: f64, value: Result<f64, QError>) {
        let (residual, pass, error) = match value {
            Ok(v) => (Cell::Float(v), v <= tol, Cell::Empty),
            Err(e) => (Cell::Empty, false, Cell::Text(format!("{}: {e}", e.kind()))),
        };
        if !pass {
            self.failed += 1;
        }
        self.table.push(vec![
            self.suite.into(),
            check.into(),
            case.into(),
            residual,
            tol.into(),
            pass.into(),
            error,
        ]);
    }
}

fn spec_case(c: i64, r: f64, p: Parity) -> String {
    format!("c={c} xi={r} {p}")
}

fn algebra(ctx: &QContext, out: &mut Checks) -> CliResult<()> {
    let fs = build_space(ctx, 8)?;
    let r = commutator_suite(&fs);
    for (name, v) in [
        ("heisenberg_1", r.heisenberg[0]),
        ("heisenberg_2", r.heisenberg[1]),
        ("number_raising_1", r.number_raising[0]),
        ("number_raising_2", r.number_raising[1]),
        ("number_lowering_1", r.number_lowering[0]),
        ("number_lowering_2", r.number_lowering[1]),
        ("k_plus_k_minus", r.k_plus_k_minus),
        ("k0_k_plus", r.k0_k_plus),
        ("k0_k_minus", r.k0_k_minus),
        ("charge_k_minus", r.charge_k_minus),
    ] {
        out.record(name, "n_max=8".into(), 1e-10, Ok(v));
    }

    let plain = build_space(&QContext::new(1.0)?, 8)?;
    for (mode, a, b) in [(1, &fs.a1, &plain.a1), (2, &fs.a2, &plain.a2)] {
        let f = LinearOperator::diagonal("f", &fs.space, |m, n| {
            let k = if mode == 1 { m } else { n };
            (ctx.qnumber(k + 1, Base::Q) / (k + 1) as f64).sqrt()
        });
        out.record(
            "undeformed_construction",
            format!("mode={mode}"),
            1e-12,
            Ok(f.compose(b).max_deviation(a, None)),
        );
    }

    let big = build_space(ctx, 30)?;
    for c in [1, 2, -1] {
        match dalgebra_check(ctx, c, Complex64::from_polar(0.8, 0.3), &big) {
            Ok(rep) => {
                for (name, v) in rep.residuals {
                    out.record("dalgebra", format!("c={c} xi=0.8 {name}"), 1e-8, Ok(v));
                }
            }
            Err(e) => out.record("dalgebra", format!("c={c} xi=0.8"), 1e-8, Err(e)),
        }
    }
    Ok(())
}

fn states(ctx: &QContext, out: &mut Checks) {
    for c in CHARGES {
        for r in MODULI {
            for p in PARITIES {
                let case = spec_case(c, r, p);
                let built = CoherentFamilySpec::new(r, 0.4, c, p).and_then(|s| {
                    let (fs, psi) = fock_state(ctx, &s)?;
                    Ok((s, fs, psi))
                });
                let (spec, fs, psi) = match built {
                    Ok(v) => v,
                    Err(e) => {
                        out.record("construction", case, 0.0, Err(e));
                        continue;
                    }
                };
                let res = eigen_residuals(&spec, &psi, &fs);
                out.record(
                    "eigen",
                    case.clone(),
                    1e-8,
                    res.clone().map(|r| r.pair_lowering.max(r.charge)),
                );
                out.record("norm", case.clone(), 1e-12, res.map(|r| r.norm));
                let mean = (|| -> qcat_core::Result<f64> {
                    let n1 = psi.expectation(&fs.n1)?.re;
                    let n2 = psi.expectation(&fs.n2)?.re;
                    Ok((n1 - n2 - c as f64).abs() / n1.max(1.0))
                })();
                out.record("mean_number", case, 1e-12, mean);
            }
            let pair = (|| -> qcat_core::Result<f64> {
                let even = CoherentFamilySpec::new(r, 0.4, c, Parity::Even)?;
                let odd = CoherentFamilySpec::new(r, 0.4, c, Parity::Odd)?;
                let next = CoherentFamilySpec::new(r, 0.4, c + 1, Parity::Even)?;
                let mut worst = 0.0f64;
                for (a, b) in [(&even, &odd), (&even, &next), (&odd, &next)] {
                    let o = overlap_routes(ctx, a, b)?;
                    worst = worst.max(o.fock.norm()).max(o.closed.norm());
                }
                Ok(worst)
            })();
            out.record("orthogonality", format!("c={c} xi={r}"), 1e-10, pair);
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn observables(ctx: &QContext, out: &mut Checks) {
    for c in CHARGES {
        for r in MODULI {
            out.record(
                "coth_identity",
                format!("c={c} xi={r}"),
                1e-7,
                coth_identity_residual(ctx, r, c),
            );
            for p in PARITIES {
                for th in [0.0, FRAC_PI_2] {
                    let case = format!("{} theta={th}", spec_case(c, r, p));
                    let spec = match CoherentFamilySpec::new(r, th, c, p) {
                        Ok(s) => s,
                        Err(e) => {
                            out.record("construction", case, 0.0, Err(e));
                            continue;
                        }
                    };
                    let reports = (|| -> qcat_core::Result<[QuadratureReport; 4]> {
                        let [y, z] = single_mode_variances(ctx, &spec)?;
                        Ok([su11_variances(ctx, &spec)?, y, z, two_mode_variances(ctx, &spec)?])
                    })();
                    out.record(
                        "variance_routes",
                        case.clone(),
                        1e-7,
                        reports
                            .clone()
                            .map(|rs| rs.iter().map(|r| r.route_gap()).fold(0.0, f64::max)),
                    );
                    if p != Parity::Full {
                        let flagged = reports
                            .clone()
                            .map(|rs| rs[1..].iter().flat_map(|r| r.squeezed).filter(|&s| s).count() as f64);
                        out.record("no_single_or_two_mode_squeezing", case.clone(), 0.0, flagged);
                    }
                    let g = correlation_g(ctx, &spec);
                    out.record("g_routes", case.clone(), 1e-7, g.clone().map(|g| rel(g.closed, g.fock)));
                    if p == Parity::Full {
                        out.record(
                            "g_full_is_one",
                            case,
                            1e-9,
                            g.map(|g| (g.closed - 1.0).abs().max((g.fock - 1.0).abs())),
                        );
                    }
                }
            }
        }
    }
}

fn completeness(ctx: &QContext, out: &mut Checks) {
    for c in -4i64..=4 {
        for n in 0..=6 {
            out.record(
                "radial_moment",
                format!("n={n} c={c}"),
                1e-6,
                radial_moment_check(ctx, n, c).map(|r| r.relative_error),
            );
        }
    }
    for c in -4i64..=4 {
        match resolution_of_identity(ctx, c, 4) {
            Ok(rep) => {
                for (n, d) in rep.diagonal().into_iter().enumerate() {
                    out.record("identity_diagonal", format!("n={n} c={c}"), 1e-5, Ok((d - 1.0).abs()));
                }
                out.record(
                    "identity_off_diagonal",
                    format!("c={c}"),
                    1e-5,
                    Ok(rep.off_diagonal_max()),
                );
            }
            Err(e) => out.record("identity_diagonal", format!("c={c}"), 1e-5, Err(e)),
        }
    }
}

/// Runs the suite and returns the report with the number of failed checks.
pub fn run(cfg: &RunConfig, suite: Suite) -> CliResult<(Document, usize)> {
    let q = cfg.require_q()?;
    let ctx = cfg.context(q)?;
    let columns = ["suite", "check", "case", "residual", "tolerance", "pass", "error"];
    let suites = if suite == Suite::All {
        vec![Suite::Algebra, Suite::States, Suite::Observables, Suite::Completeness]
    } else {
        vec![suite]
    };
    let mut table = Table::new("rows", &columns);
    let mut failed = 0;
    for s in suites {
        let name = match s {
            Suite::Algebra => "algebra",
            Suite::States => "states",
            Suite::Observables => "observables",
            Suite::Completeness => "completeness",
            Suite::All => unreachable!(),
        };
        let mut checks = Checks {
            suite: name,
            table: Table::new("rows", &columns),
            failed: 0,
        };
        match s {
            Suite::Algebra => algebra(&ctx, &mut checks)?,
            Suite::States => states(&ctx, &mut checks),
            Suite::Observables => observables(&ctx, &mut checks),
            _ => completeness(&ctx, &mut checks),
        }
        failed += checks.failed;
        table.rows.extend(checks.table.rows);
    }
    let mut doc = Document::default();
    cfg.echo(&mut doc);
    doc.meta("checks", table.rows.len());
    doc.meta("failed", failed);
    doc.tables.push(table);
    Ok((doc, failed))
}
