use qcat_core::fockspace::{build_space, TruncatedSpace};
use qcat_core::states::{build_state, eigen_residuals, CoherentFamilySpec, Parity};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Document, Table};

pub struct StateArgs {
    pub charge: i64,
    pub xi: f64,
    pub theta: f64,
    pub parity: Parity,
}

/// Nonzero coefficients of one family member, with its norm and eigen residuals.
pub fn run(cfg: &RunConfig, args: &StateArgs) -> CliResult<Document> {
    let q = cfg.require_q()?;
    let ctx = cfg.context(q)?;
    let spec = CoherentFamilySpec::new(args.xi, args.theta, args.charge, args.parity)?;
    let space = TruncatedSpace::new(cfg.n_max)?;
    let psi = build_state(&ctx, &spec, space)?;
    let fs = build_space(&ctx, cfg.n_max)?;
    let res = eigen_residuals(&spec, &psi, &fs)?;

    let mut doc = Document::default();
    cfg.echo(&mut doc);
    doc.meta("charge", args.charge);
    doc.meta("xi", args.xi);
    doc.meta("theta", spec.xi_phase);
    doc.meta("parity", args.parity.to_string());
    doc.meta("norm_residual", (psi.norm() - 1.0).abs());
    doc.meta("pair_lowering_residual", res.pair_lowering);
    doc.meta("charge_residual", res.charge);

    let mut t = Table::new("rows", &["m", "n", "re", "im"]);
    for (m, n, c) in psi.nonzero() {
        t.push(vec![m.into(), n.into(), c.re.into(), c.im.into()]);
    }
    doc.tables.push(t);
    Ok(doc)
}
