use qcat_core::observables::{check_reference_range, squeezing_scan, Convention, Predicate, REFERENCE_SIGN_RANGES};

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Cell, Document, Table};

/// Largest endpoint deviation accepted by `--paper-check`.
pub const REFERENCE_TOL: f64 = 0.01;

pub struct ScanArgs {
    pub charge: i64,
    pub predicate: Predicate,
    pub lo: f64,
    pub hi: f64,
    pub resolution: f64,
    pub paper_check: bool,
}

/// Returns the document and whether every reference row matched (always
/// true without `--paper-check`).
pub fn run(cfg: &RunConfig, args: &ScanArgs) -> CliResult<(Document, bool)> {
    let q = cfg.require_q()?;
    let ctx = cfg.context(q)?;
    let report = squeezing_scan(&ctx, args.charge, args.predicate, args.lo, args.hi, args.resolution)?;

    let mut doc = Document::default();
    cfg.echo(&mut doc);
    doc.meta("predicate", report.predicate.clone());
    doc.meta("charge", report.charge);
    doc.meta("lo", report.range[0]);
    doc.meta("hi", report.range[1]);
    doc.meta("resolution", report.resolution);
    doc.meta("endpoint_tol", report.tolerance);

    let mut t = Table::new("intervals", &["lo", "hi"]);
    for [a, b] in &report.intervals {
        t.push(vec![(*a).into(), (*b).into()]);
    }
    doc.tables.push(t);

    let mut ok = true;
    if args.paper_check {
        let mut r = Table::new(
            "reference",
            &[
                "q",
                "charge",
                "expected_lo",
                "expected_hi",
                "scaled_lo",
                "scaled_hi",
                "scaled_deviation",
                "unscaled_lo",
                "unscaled_hi",
                "unscaled_deviation",
                "matching",
            ],
        );
        for reference in &REFERENCE_SIGN_RANGES {
            let c = check_reference_range(&ctx, reference)?;
            let matching = c.matching(REFERENCE_TOL);
            ok &= matching.is_some();
            let ends = |iv: Option<[f64; 2]>| -> [Cell; 2] { [iv.map(|v| v[0]).into(), iv.map(|v| v[1]).into()] };
            let [slo, shi] = ends(c.scaled);
            let [ulo, uhi] = ends(c.unscaled);
            r.push(vec![
                reference.q.into(),
                reference.charge.into(),
                reference.lo.into(),
                reference.hi.into(),
                slo,
                shi,
                finite(c.scaled_deviation),
                ulo,
                uhi,
                finite(c.unscaled_deviation),
                match matching {
                    Some(Convention::Scaled) => "scaled".into(),
                    Some(Convention::Unscaled) => "unscaled".into(),
                    None => "none".into(),
                },
            ]);
        }
        doc.meta("reference_tol", REFERENCE_TOL);
        doc.meta("reference_pass", ok);
        doc.tables.push(r);
    }
    Ok((doc, ok))
}

fn finite(v: f64) -> Cell {
    if v.is_finite() {
        v.into()
    } else {
        Cell::Empty
    }
}
