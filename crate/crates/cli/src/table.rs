use qcat_core::observables::{
    correlation_g, single_mode_variances, su11_variances, two_mode_variances, QuadratureReport,
};
use qcat_core::states::{CoherentFamilySpec, Parity};
use qcat_core::QContext;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Cell, Document, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Observable {
    G,
    Variances,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub qs: Vec<f64>,
    pub charges: Vec<i64>,
    pub moduli: Vec<f64>,
    pub thetas: Vec<f64>,
    pub parities: Vec<Parity>,
}

impl Grid {
    fn points(&self) -> Vec<(f64, i64, f64, f64, Parity)> {
        let mut out = Vec::new();
        for &q in &self.qs {
            for &c in &self.charges {
                for &r in &self.moduli {
                    for &th in &self.thetas {
                        for &p in &self.parities {
                            out.push((q, c, r, th, p));
                        }
                    }
                }
            }
        }
        out
    }
}

const KEY: [&str; 5] = ["q", "charge", "xi", "theta", "parity"];

fn key(q: f64, c: i64, r: f64, th: f64, p: Parity) -> Vec<Cell> {
    vec![q.into(), c.into(), r.into(), th.into(), p.to_string().into()]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// One row per grid point (per quadrature for variances); construction
/// errors land in the `error` column and do not abort the table.
pub fn run(cfg: &RunConfig, observable: Observable, grid: &Grid) -> CliResult<Document> {
    let contexts = grid
        .qs
        .iter()
        .map(|&q| cfg.context(q))
        .collect::<CliResult<Vec<QContext>>>()?;
    let ctx_for = |q: f64| &contexts[grid.qs.iter().position(|&x| x == q).unwrap_or(0)];

    let mut doc = Document::default();
    cfg.echo(&mut doc);
    doc.meta(
        "observable",
        if observable == Observable::G { "g" } else { "variances" },
    );
    let table = match observable {
        Observable::G => {
            let mut t = Table::new(
                "rows",
                &[&KEY[..], &["closed", "fock", "rel_diff", "antibunched", "error"]].concat(),
            );
            for (q, c, r, th, p) in grid.points() {
                let mut row = key(q, c, r, th, p);
                let res = CoherentFamilySpec::new(r, th, c, p).and_then(|s| correlation_g(ctx_for(q), &s));
                match res {
                    Ok(g) => row.extend([
                        g.closed.into(),
                        g.fock.into(),
                        rel(g.closed, g.fock).into(),
                        g.antibunched.into(),
                        Cell::Empty,
                    ]),
                    Err(e) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, error_cell(&e)]),
                }
                t.push(row);
            }
            t
        }
        Observable::Variances => {
            let cols = [
                "family",
                "quadrature",
                "closed",
                "fock",
                "rel_diff",
                "bound",
                "squeezed",
                "error",
            ];
            let mut t = Table::new("rows", &[&KEY[..], &cols].concat());
            for (q, c, r, th, p) in grid.points() {
                let ctx = ctx_for(q);
                let reports = CoherentFamilySpec::new(r, th, c, p).and_then(|s| {
                    let [y, z] = single_mode_variances(ctx, &s)?;
                    Ok([su11_variances(ctx, &s)?, y, z, two_mode_variances(ctx, &s)?])
                });
                match reports {
                    Ok(reports) => {
                        for rep in reports {
                            for i in 0..2 {
                                let mut row = key(q, c, r, th, p);
                                row.extend(variance_cells(&rep, i));
                                t.push(row);
                            }
                        }
                    }
                    Err(e) => {
                        let mut row = key(q, c, r, th, p);
                        row.extend(std::iter::repeat_n(Cell::Empty, cols.len() - 1));
                        row.push(error_cell(&e));
                        t.push(row);
                    }
                }
            }
            t
        }
    };
    doc.tables.push(table);
    Ok(doc)
}

fn variance_cells(rep: &QuadratureReport, i: usize) -> Vec<Cell> {
    vec![
        rep.family.to_string().into(),
        (i + 1).into(),
        rep.variances[i].into(),
        rep.fock_variances[i].into(),
        rel(rep.variances[i], rep.fock_variances[i]).into(),
        rep.bound.into(),
        rep.squeezed[i].into(),
        Cell::Empty,
    ]
}

fn error_cell(e: &qcat_core::QError) -> Cell {
    format!("{}: {e}", e.kind()).into()
}
