use std::collections::BTreeMap;

use log::info;
use serde_json::{json, Value};

use fracleg::bounds::{seminorm_endpoint, seminorm_interior, BoundCurve, BoundKind};
use fracleg::fraccalc::{Location, Modulator, RegularityProfile, SingularFunction};
use fracleg::harness::{
    convergence_table, decay_table, figure1_data, run_selected, tightness_profile, write_figure1, write_profile,
    write_table1, write_table2, write_table3, write_tightness, ConvergenceTable, Norm, TightnessRow, TwoNormBlock,
    CHECKS,
};
use fracleg::legexp::{coeff_quadrature, expand, LegendreSeries, Provenance, Strategy};

use crate::args::{
    BoundKindArg, BoundsArgs, Command, ConvergenceArgs, DecayArgs, ExpandArgs, FiguresArgs, Format, ModelArgs,
    ModelKind, ModulatorArg, NormArg, StrategyArg, TightnessArgs, VerifyArgs,
};
use crate::error::{usage, CliError, CliResult};
use crate::output::{csv_bytes, is_dir_like, write_bytes, Output};

pub fn run(command: &Command, out: &Output) -> CliResult<()> {
    match command {
        Command::Expand(a) => run_expand(a, out),
        Command::Bounds(a) => run_bounds(a, out),
        Command::Convergence(a) => run_convergence(a, out),
        Command::Decay(a) => run_decay(a, out),
        Command::Tightness(a) => run_tightness(a, out),
        Command::Figures(a) => run_figures(a, out),
        Command::Verify(a) => run_verify(a, out),
    }
}

fn modulator(m: ModulatorArg) -> Modulator {
    match m {
        ModulatorArg::One => Modulator::One,
        ModulatorArg::Sin => Modulator::Sin,
        ModulatorArg::Cos => Modulator::Cos,
        ModulatorArg::Exp => Modulator::Exp,
    }
}

fn model_name(k: ModelKind) -> &'static str {
    match k {
        ModelKind::AbsPower => "abs-power",
        ModelKind::AbsX => "abs-x",
        ModelKind::InteriorPlusPower => "interior-plus-power",
        ModelKind::EndpointPower => "endpoint-power",
        ModelKind::Smooth => "smooth",
    }
}

fn require_model(m: &ModelArgs) -> CliResult<ModelKind> {
    m.model.ok_or_else(|| usage("--model is required for this subcommand"))
}

/// The model function for one value of --mu.
fn build_model(m: &ModelArgs, mu: Option<f64>) -> CliResult<SingularFunction> {
    let kind = require_model(m)?;
    let name = model_name(kind);
    if m.modulator != ModulatorArg::One && !matches!(kind, ModelKind::EndpointPower | ModelKind::Smooth) {
        return Err(usage(format!("--modulator applies to endpoint-power and smooth, not {name}")));
    }
    let need_mu = || mu.ok_or_else(|| usage(format!("--mu is required for {name}")));
    let u = match kind {
        ModelKind::AbsPower => SingularFunction::abs_power(need_mu()?)?,
        ModelKind::InteriorPlusPower => SingularFunction::interior_plus_power(m.theta, need_mu()?)?,
        ModelKind::EndpointPower => SingularFunction::endpoint_power(need_mu()?, modulator(m.modulator))?,
        ModelKind::AbsX | ModelKind::Smooth => {
            if mu.is_some() {
                return Err(usage(format!("{name} takes no --mu")));
            }
            match kind {
                ModelKind::AbsX => SingularFunction::AbsX,
                _ => SingularFunction::smooth(modulator(m.modulator)),
            }
        }
    };
    Ok(u)
}

fn single_mu(m: &ModelArgs, sub: &str) -> CliResult<Option<f64>> {
    match m.mu.as_slice() {
        [] => Ok(None),
        [mu] => Ok(Some(*mu)),
        _ => Err(usage(format!("{sub} takes a single --mu value"))),
    }
}

/// One entry per --mu value, or a single `None` when there is none.
fn mu_blocks(m: &ModelArgs) -> Vec<Option<f64>> {
    if m.mu.is_empty() {
        vec![None]
    } else {
        m.mu.iter().map(|v| Some(*v)).collect()
    }
}

fn check_doubling(degrees: &[usize], what: &str) -> CliResult<()> {
    if degrees.len() < 2 || degrees[0] == 0 || degrees.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(usage(format!("{what} needs at least two doubling degrees such as 8,16,32, got {degrees:?}")));
    }
    Ok(())
}

fn run_expand(a: &ExpandArgs, out: &Output) -> CliResult<()> {
    let u = build_model(&a.model, single_mu(&a.model, "expand")?)?;
    if !(a.quad_tol > 0.0 && a.quad_tol < 1.0) {
        return Err(usage(format!("--quad-tol must lie in (0, 1), got {}", a.quad_tol)));
    }
    let series = match a.strategy {
        StrategyArg::Closed => expand(&u, a.degree, Strategy::ClosedFormPreferred)?,
        StrategyArg::Quadrature if a.quad_tol == fracleg::legexp::EXPAND_TOL => {
            expand(&u, a.degree, Strategy::QuadratureOnly)?
        }
        StrategyArg::Quadrature => {
            let c = (0..=a.degree).map(|n| coeff_quadrature(&u, n, a.quad_tol)).collect::<fracleg::Result<Vec<_>>>()?;
            LegendreSeries::new(c, vec![Provenance::Quadrature; a.degree + 1])?
        }
    };
    info!("expanded {} to degree {}", u.label(), a.degree);
    out.emit(
        "expand",
        "expansion",
        |w| series.write_csv(w),
        || {
            let rows: Vec<Value> = series
                .coefficients()
                .iter()
                .zip(series.provenance())
                .enumerate()
                .map(|(n, (c, p))| json!({ "n": n, "coefficient": c, "provenance": p.as_str() }))
                .collect();
            Ok(json!({ "function": u.label(), "degree": a.degree, "coefficients": rows }))
        },
    )
}

fn bound_kind(k: BoundKindArg) -> BoundKind {
    match k {
        BoundKindArg::LinfInterior => BoundKind::LinfInterior,
        BoundKindArg::WeightedLinfInterior => BoundKind::WeightedLinfInterior,
        BoundKindArg::L2Interior => BoundKind::L2Interior,
        BoundKindArg::LinfEndpoint => BoundKind::LinfEndpoint,
        BoundKindArg::L2Endpoint => BoundKind::L2Endpoint,
        BoundKindArg::AbsxZero => BoundKind::AbsxAtZero,
        BoundKindArg::AbsxPm1 => BoundKind::AbsxAtPm1,
        BoundKindArg::CoeffDecay => BoundKind::CoeffDecay,
    }
}

/// Singular point of an interior model.
fn interior_point(kind: ModelKind, theta: f64) -> CliResult<f64> {
    match kind {
        ModelKind::AbsPower | ModelKind::AbsX => Ok(0.0),
        ModelKind::InteriorPlusPower => Ok(theta),
        other => Err(usage(format!(
            "interior bounds need abs-power, abs-x or interior-plus-power, not {}",
            model_name(other)
        ))),
    }
}

fn bound_profile(a: &BoundsArgs) -> CliResult<RegularityProfile> {
    let mu = single_mu(&a.model, "bounds")?;
    let endpoint = matches!(a.kind, BoundKindArg::LinfEndpoint | BoundKindArg::L2Endpoint);
    if matches!(a.kind, BoundKindArg::AbsxZero | BoundKindArg::AbsxPm1) {
        if a.model.model.is_some_and(|k| k != ModelKind::AbsX) {
            return Err(usage("the pointwise bounds at 0 and ±1 are stated for --model abs-x only"));
        }
        // |x|: order 1 with seminorm V[sign] = 2
        return Ok(RegularityProfile::new(1, 1.0, Location::Interior(0.0), 0, 2.0)?);
    }
    let Some(kind) = a.model.model else {
        // a bare order with a given seminorm
        let (Some(mu), Some(s)) = (mu, a.seminorm) else {
            return Err(usage("give --model, or both --mu and --seminorm"));
        };
        let loc = if endpoint { Location::LeftEndpoint } else { Location::Interior(a.model.theta) };
        return Ok(RegularityProfile::new(RegularityProfile::order_for(mu), mu, loc, a.m, s)?);
    };
    let u = build_model(&a.model, mu)?;
    let mu = u.mu().ok_or_else(|| usage(format!("{} has no singular exponent to bound", model_name(kind))))?;
    let k = RegularityProfile::order_for(mu);
    if endpoint {
        if kind != ModelKind::EndpointPower {
            return Err(usage("endpoint bounds need --model endpoint-power"));
        }
        let s = match a.seminorm {
            Some(s) => s,
            None => seminorm_endpoint(&u, mu, a.m)?,
        };
        Ok(RegularityProfile::new(k, mu, Location::LeftEndpoint, a.m, s)?)
    } else {
        let theta = interior_point(kind, a.model.theta)?;
        let s = match a.seminorm {
            Some(s) => s,
            None => seminorm_interior(&u, mu, theta)?,
        };
        Ok(RegularityProfile::new(k, mu, Location::Interior(theta), 0, s)?)
    }
}

fn run_bounds(a: &BoundsArgs, out: &Output) -> CliResult<()> {
    let profile = bound_profile(a)?;
    let curve = BoundCurve::evaluate(bound_kind(a.kind), profile, &a.degree)?;
    out.emit("bounds", "bounds", |w| curve.write_csv(w), || Ok(serde_json::to_value(&curve)?))
}

fn norm_pair(a: &ConvergenceArgs, kind: ModelKind) -> CliResult<(Norm, bool)> {
    let mut norms = a.norms.clone();
    norms.sort();
    norms.dedup();
    match norms.as_slice() {
        [] if kind == ModelKind::EndpointPower => Ok((Norm::L2, false)),
        [] => Ok((Norm::WeightedLinf, true)),
        [NormArg::Linf, NormArg::Wlinf] => Ok((Norm::WeightedLinf, true)),
        [NormArg::Linf, NormArg::L2] => Ok((Norm::L2, false)),
        _ => Err(usage("--norms must be linf,wlinf or linf,l2")),
    }
}

fn run_convergence(a: &ConvergenceArgs, out: &Output) -> CliResult<()> {
    let kind = require_model(&a.model)?;
    check_doubling(&a.degrees, "convergence")?;
    let (second, weighted) = norm_pair(a, kind)?;
    let mut tables: Vec<(Option<f64>, BTreeMap<Norm, ConvergenceTable>)> = Vec::new();
    for mu in mu_blocks(&a.model) {
        let u = build_model(&a.model, mu)?;
        tables.push((mu, convergence_table(&u, &a.degrees, &[Norm::Linf, second])?));
        info!("convergence table for {} done", u.label());
    }
    let blocks: Vec<TwoNormBlock<'_>> = tables
        .iter()
        .map(|(mu, t)| TwoNormBlock { mu: mu.unwrap_or(0.0), first: &t[&Norm::Linf], second: &t[&second] })
        .collect();
    let stem = if weighted { "table1" } else { "table3" };
    out.emit(
        "convergence",
        stem,
        |w| if weighted { write_table1(w, &blocks) } else { write_table3(w, &blocks) },
        || {
            let data: Vec<Value> = tables
                .iter()
                .map(|(mu, t)| Ok(json!({ "mu": mu, "tables": serde_json::to_value(t)? })))
                .collect::<CliResult<_>>()?;
            Ok(json!({ "model": model_name(kind), "blocks": data }))
        },
    )
}

fn run_decay(a: &DecayArgs, out: &Output) -> CliResult<()> {
    let kind = require_model(&a.model)?;
    check_doubling(&a.degrees, "decay")?;
    let mut tables: Vec<(f64, ConvergenceTable)> = Vec::new();
    for mu in mu_blocks(&a.model) {
        let u = build_model(&a.model, mu)?;
        tables.push((mu.unwrap_or(0.0), decay_table(&u, &a.degrees)?));
    }
    let blocks: Vec<(f64, &ConvergenceTable)> = tables.iter().map(|(mu, t)| (*mu, t)).collect();
    out.emit(
        "decay",
        "table2",
        |w| write_table2(w, &blocks),
        || {
            let data: Vec<Value> = tables
                .iter()
                .map(|(mu, t)| Ok(json!({ "mu": mu, "table": serde_json::to_value(t)? })))
                .collect::<CliResult<_>>()?;
            Ok(json!({ "model": model_name(kind), "blocks": data }))
        },
    )
}

fn check_tightness_degrees(degrees: &[usize]) -> CliResult<()> {
    if degrees.is_empty() || degrees.iter().any(|&n| n <= 2) {
        return Err(usage(format!("pointwise |x| bounds need every N > 2, got {degrees:?}")));
    }
    Ok(())
}

fn write_profiles(dir: &std::path::Path, rows: &[TightnessRow]) -> CliResult<Vec<std::path::PathBuf>> {
    rows.iter()
        .map(|r| {
            let path = dir.join(format!("fig2_profile_N{}.csv", r.n));
            write_bytes(&path, &csv_bytes(|w| write_profile(w, &r.profile))?)?;
            Ok(path)
        })
        .collect()
}

fn run_tightness(a: &TightnessArgs, out: &Output) -> CliResult<()> {
    check_tightness_degrees(&a.degrees)?;
    let rows = tightness_profile(&SingularFunction::AbsX, &a.degrees)?;
    out.emit("tightness", "tightness", |w| write_tightness(w, &rows), || Ok(serde_json::to_value(&rows)?))?;
    if let Some(dir) = out.out.as_deref().filter(|p| is_dir_like(p)) {
        write_profiles(dir, &rows)?;
    }
    Ok(())
}

fn run_figures(a: &FiguresArgs, out: &Output) -> CliResult<()> {
    let dir = match out.out.as_deref() {
        Some(p) if is_dir_like(p) || !p.exists() => p,
        _ => return Err(usage("figures writes several files: give --out with a directory")),
    };
    if out.format != Format::Csv {
        return Err(usage("figures writes CSV files only"));
    }
    check_tightness_degrees(&a.degrees)?;
    let mut written = Vec::new();
    for &n in &a.poly_degree {
        let path = dir.join(format!("fig1_n{n}.csv"));
        let data = figure1_data(n)?;
        write_bytes(&path, &csv_bytes(|w| write_figure1(w, &data))?)?;
        written.push(path);
    }
    let rows = tightness_profile(&SingularFunction::AbsX, &a.degrees)?;
    written.extend(write_profiles(dir, &rows)?);
    let summary = dir.join("fig2_bounds.csv");
    write_bytes(&summary, &csv_bytes(|w| write_tightness(w, &rows))?)?;
    written.push(summary);
    let listing: String = written.iter().map(|p| format!("{}\n", p.display())).collect();
    Output { out: None, format: Format::Csv }.emit_bytes("figures", listing.as_bytes())
}

fn run_verify(a: &VerifyArgs, out: &Output) -> CliResult<()> {
    if a.list {
        let names: String = CHECKS.iter().map(|(n, _)| format!("{n}\n")).collect();
        return Output { out: None, format: Format::Csv }.emit_bytes("checks", names.as_bytes());
    }
    if let Some(bad) = a.checks.iter().find(|c| !CHECKS.iter().any(|(n, _)| n == c)) {
        return Err(usage(format!("unknown check {bad:?}; run `fracleg verify --list` for the names")));
    }
    let names: Vec<&str> = a.checks.iter().map(String::as_str).collect();
    let report = run_selected(&names);
    info!("verify finished in {:.1}s", report.seconds);
    let bytes = match out.format {
        Format::Csv => {
            let mut s: String = report
                .checks
                .iter()
                .map(|c| format!("{} {} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
                .collect();
            s.push_str(&format!("{} passed, {} failed\n", report.passed(), report.failed()));
            s.into_bytes()
        }
        Format::Json => {
            // timings are left out so repeated runs compare equal
            let checks: Vec<Value> = report
                .checks
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect();
            let doc = crate::output::with_meta(
                "verify",
                json!({ "checks": checks, "passed": report.passed(), "failed": report.failed() }),
            );
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s.into_bytes()
        }
    };
    out.emit_bytes("verify", &bytes)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Verification { failed: report.failed(), total: report.checks.len() })
    }
}
