//! Subcommand handlers. Each writes either a text report or one JSON
//! document to `out`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use weylquant::dynamics::{evolve as run_dynamics, stability_bound, Dynamics, EvolveConfig, HamiltonianSpec, Tracker};
use weylquant::moments::{oscillator_table_with, write_table_csv, MomentReport, TableSource};
use weylquant::quantizer::{
    placement_variants, rule_catalog, symmetrize_monomial, weyl_monomial, weyl_quantize, Placement,
};
use weylquant::wavefunctions::{gaussian_packet, ho_eigenstate, GridSpec};
use weylquant::wigner::{
    gaussian_wigner_analytic, ho_wigner_analytic, marginals, negativity, radial_sign_changes, wigner_transform,
    PhaseGrid, WignerGrid,
};
use weylquant::{Error, HbarScalar, OperatorPoly, PhasePoly};

use crate::args::StateSpec;
use crate::error::{CliError, CliResult};
use crate::heatmap::export_heatmap;
use crate::SCHEMA_VERSION;

/// Samples below this fraction of the peak are ignored when counting rings.
const RING_FLOOR: f64 = 1e-6;

/// Default time step as a fraction of the stability bound.
const DT_SAFETY: f64 = 0.9;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::io(path, e)
}

fn emit_json(out: &mut dyn Write, mut doc: Value) -> CliResult<()> {
    doc["schema_version"] = json!(SCHEMA_VERSION);
    let text = serde_json::to_string_pretty(&doc).expect("documents serialize");
    writeln!(out, "{text}").map_err(io_err(Path::new("<stdout>")))
}

fn line(out: &mut dyn Write, text: impl AsRef<str>) -> CliResult<()> {
    writeln!(out, "{}", text.as_ref()).map_err(io_err(Path::new("<stdout>")))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn quantize(expr: &str, symmetrize: bool, json: bool, out: &mut dyn Write) -> CliResult<()> {
    let f: PhasePoly = expr.parse()?;
    let op = if symmetrize {
        let mut acc = OperatorPoly::zero();
        for (&(n, m), c) in f.terms() {
            acc = &acc + &symmetrize_monomial(n, m)?.scale(c);
        }
        acc
    } else {
        weyl_quantize(&f)
    };
    if json {
        let rule = if symmetrize { "symmetrize" } else { "weyl" };
        emit_json(
            out,
            json!({
                "command": "quantize",
                "rule": rule,
                "expr": f.to_string(),
                "operator": op.to_string(),
                "self_adjoint": op.is_self_adjoint(),
            }),
        )
    } else {
        line(out, op.to_string())
    }
}

/// `(n, m)` of an expression that is exactly `q^n p^m`.
fn monomial_powers(expr: &str) -> CliResult<(u32, u32)> {
    let f: PhasePoly = expr.parse()?;
    let mut terms = f.terms();
    match (terms.next(), terms.next()) {
        (Some((&(n, m), c)), None) if *c == HbarScalar::one() => Ok((n, m)),
        _ => Err(CliError::Usage(format!("expected a single monomial q^n p^m with unit coefficient, got {expr:?}"))),
    }
}

struct PlacementRow {
    placement: Placement,
    operator: OperatorPoly,
    minus_weyl: OperatorPoly,
}

fn placement_rows(n: u32, m: u32) -> CliResult<Vec<PlacementRow>> {
    let weyl = weyl_monomial(n, m);
    Placement::enumerate(n)
        .into_iter()
        .map(|placement| {
            let operator = placement_variants(n, m, placement)?;
            let minus_weyl = &operator - &weyl;
            Ok(PlacementRow { placement, operator, minus_weyl })
        })
        .collect()
}

fn placement_json(rows: &[PlacementRow]) -> Value {
    rows.iter()
        .map(|r| {
            json!({
                "left_q": r.placement.left_q,
                "right_q": r.placement.right_q,
                "op_q": r.placement.op_q,
                "operator": r.operator.to_string(),
                "minus_weyl": r.minus_weyl.to_string(),
            })
        })
        .collect()
}

fn placement_text(out: &mut dyn Write, rows: &[PlacementRow]) -> CliResult<()> {
    line(out, "placement\toperator\tminus_weyl")?;
    for r in rows {
        line(out, format!("{}\t{}\t{}", r.placement, r.operator, r.minus_weyl))?;
    }
    Ok(())
}

pub fn placements(expr: &str, json: bool, out: &mut dyn Write) -> CliResult<()> {
    let (n, m) = monomial_powers(expr)?;
    let rows = placement_rows(n, m)?;
    if json {
        emit_json(
            out,
            json!({
                "command": "placements",
                "expr": format!("q^{n} p^{m}"),
                "weyl": weyl_monomial(n, m).to_string(),
                "placements": placement_json(&rows),
            }),
        )
    } else {
        line(out, format!("weyl\t{}", weyl_monomial(n, m)))?;
        placement_text(out, &rows)
    }
}

pub fn compare_rules(expr: &str, json: bool, out: &mut dyn Write) -> CliResult<()> {
    let (n, m) = monomial_powers(expr)?;
    let catalog = match rule_catalog(&format!("q{n}p{m}")) {
        Ok(c) => c,
        Err(Error::UnknownCatalogEntry(_)) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let rows = placement_rows(n, m)?;
    let weyl = weyl_monomial(n, m);
    let matches = |op: &OperatorPoly| -> Vec<String> {
        rows.iter().filter(|r| &r.operator == op).map(|r| r.placement.to_string()).collect()
    };
    if json {
        let entries: Vec<Value> = catalog
            .iter()
            .map(|f| {
                json!({
                    "rule": f.rule_name,
                    "variant": f.variant,
                    "ambiguous": f.ambiguous,
                    "operator": f.operator.to_string(),
                    "minus_weyl": (&f.operator - &weyl).to_string(),
                    "matching_placements": matches(&f.operator),
                })
            })
            .collect();
        return emit_json(
            out,
            json!({
                "command": "compare-rules",
                "expr": format!("q^{n} p^{m}"),
                "weyl": weyl.to_string(),
                "catalog": entries,
                "placements": placement_json(&rows),
            }),
        );
    }
    line(out, format!("expression\tq^{n} p^{m}"))?;
    line(out, "rule\tvariant\tambiguous\toperator\tminus_weyl")?;
    if catalog.is_empty() {
        line(out, "(no published assignments for this monomial)")?;
    }
    for f in &catalog {
        line(
            out,
            format!("{}\t{}\t{}\t{}\t{}", f.rule_name, f.variant, f.ambiguous, f.operator, &f.operator - &weyl),
        )?;
    }
    line(out, "")?;
    placement_text(out, &rows)
}

pub struct WignerRequest {
    pub state: StateSpec,
    pub grid: GridSpec,
    pub hbar: f64,
    pub analytic: bool,
    pub out: Option<PathBuf>,
}

/// Builds the Wigner function of `state` on the axes paired with `grid`.
pub fn state_wigner(state: &StateSpec, grid: &GridSpec, hbar: f64, analytic: bool) -> CliResult<WignerGrid> {
    let axes = PhaseGrid::for_wavefunction(grid, hbar);
    let dist = match (state, analytic) {
        (StateSpec::Oscillator(n), true) => ho_wigner_analytic(*n, &axes, hbar),
        (StateSpec::Oscillator(n), false) => wigner_transform(&ho_eigenstate(*n, grid, hbar)?)?,
        (&StateSpec::Gaussian { x0, k0, alpha }, true) => gaussian_wigner_analytic(x0, k0, alpha, &axes, hbar),
        (&StateSpec::Gaussian { x0, k0, alpha }, false) => {
            wigner_transform(&gaussian_packet(x0, k0, alpha, grid, hbar)?)?
        }
    };
    Ok(dist)
}

fn wigner_summary(dist: &WignerGrid) -> Value {
    let xs = dist.x_values();
    let ps = dist.p_values();
    let norm = dist.integral();
    let mean = |g: &(dyn Fn(f64, f64) -> f64 + Sync)| dist.integrate_with(|ix, ip| g(xs[ix], ps[ip])) / norm;
    let (mx, mp) = (mean(&|x, _| x), mean(&|_, p| p));
    let dx = (mean(&|x, _| x * x) - mx * mx).max(0.0).sqrt();
    let dp = (mean(&|_, p| p * p) - mp * mp).max(0.0).sqrt();
    let neg = negativity(dist);
    let (x_density, p_density) = marginals(dist);
    let min_marginal = x_density.iter().chain(&p_density).copied().fold(f64::INFINITY, f64::min);
    let max = dist.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    json!({
        "integral": norm,
        "min": neg.min_value,
        "max": max,
        "negative_volume": neg.negative_volume,
        "min_marginal": min_marginal,
        "mean_x": mx,
        "mean_p": mp,
        "delta_x": dx,
        "delta_p": dp,
        "uncertainty_product": dx * dp,
        "sign_changes_p0": radial_sign_changes(dist, RING_FLOOR),
    })
}

pub fn wigner(req: &WignerRequest, json: bool, out: &mut dyn Write) -> CliResult<()> {
    let dist = state_wigner(&req.state, &req.grid, req.hbar, req.analytic)?;
    let summary = wigner_summary(&dist);
    let mut files = Vec::new();
    if let Some(dir) = &req.out {
        create_dir(dir)?;
        let stem = req.state.stem();
        let csv_path = dir.join(format!("{stem}.csv"));
        let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
        let mut w = BufWriter::new(file);
        dist.write_csv(&mut w).and_then(|_| w.flush()).map_err(io_err(&csv_path))?;
        let pgm_path = dir.join(format!("{stem}.pgm"));
        let sidecar = export_heatmap(&dist, &pgm_path)?;
        files = vec![csv_path, pgm_path, sidecar];
    }
    let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    if json {
        return emit_json(
            out,
            json!({
                "command": "wigner",
                "state": state_label(&req.state),
                "source": if req.analytic { "analytic" } else { "transform" },
                "hbar": req.hbar,
                "grid": { "nx": dist.nx(), "np": dist.np() },
                "summary": summary,
                "files": files,
            }),
        );
    }
    line(out, format!("state\t{}", state_label(&req.state)))?;
    if let Value::Object(map) = &summary {
        for (k, v) in map {
            line(out, format!("{k}\t{v}"))?;
        }
    }
    for f in &files {
        line(out, format!("wrote\t{f}"))?;
    }
    Ok(())
}

fn state_label(state: &StateSpec) -> String {
    match state {
        StateSpec::Oscillator(n) => format!("ho:{n}"),
        StateSpec::Gaussian { x0, k0, alpha } => format!("gauss:{x0},{k0},{alpha}"),
    }
}

fn report_json(r: &MomentReport) -> Value {
    json!({
        "n": r.n_label,
        "energy": r.mean_e,
        "dq_dp": r.uncertainty_product,
        "dE": r.delta_e,
        "dt": r.delta_t,
        "band_low": r.energy_band_low,
        "band_high": r.energy_band_high,
    })
}

pub fn oscillator_table(
    n_max: u32,
    grid: &GridSpec,
    hbar: f64,
    analytic: bool,
    path: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> CliResult<()> {
    let source = if analytic { TableSource::Analytic } else { TableSource::Transform };
    let rows = oscillator_table_with(n_max, source, grid, hbar)?;
    if let Some(path) = path {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            create_dir(parent)?;
        }
        let file = File::create(path).map_err(io_err(path))?;
        let mut w = BufWriter::new(file);
        write_table_csv(&rows, &mut w).and_then(|_| w.flush()).map_err(io_err(path))?;
    }
    if json {
        let rows: Vec<Value> = rows.iter().map(report_json).collect();
        return emit_json(
            out,
            json!({
                "command": "oscillator-table",
                "source": if analytic { "analytic" } else { "transform" },
                "hbar": hbar,
                "omega": 1.0,
                "rows": rows,
                "file": path.map(|p| p.display().to_string()),
            }),
        );
    }
    match path {
        Some(p) => line(out, format!("wrote\t{}", p.display())),
        None => write_table_csv(&rows, &mut *out).map_err(io_err(Path::new("<stdout>"))),
    }
}

pub struct EvolveRequest {
    pub dynamics: Dynamics,
    pub hamiltonian: HamiltonianSpec,
    pub potential_label: String,
    pub state: StateSpec,
    pub x_grid: GridSpec,
    pub p_grid: GridSpec,
    pub hbar: f64,
    pub dt: Option<f64>,
    pub steps: usize,
    pub trackers: Vec<Tracker>,
    pub snapshot_every: Option<usize>,
    pub out: Option<PathBuf>,
}

fn initial_distribution(state: &StateSpec, axes: &PhaseGrid, hbar: f64) -> WignerGrid {
    match *state {
        StateSpec::Oscillator(n) => ho_wigner_analytic(n, axes, hbar),
        StateSpec::Gaussian { x0, k0, alpha } => gaussian_wigner_analytic(x0, k0, alpha, axes, hbar),
    }
}

pub fn evolve(req: &EvolveRequest, json: bool, out: &mut dyn Write) -> CliResult<()> {
    if req.snapshot_every.is_some() && req.out.is_none() {
        return Err(CliError::Usage("--snapshot-every needs --out".into()));
    }
    if req.snapshot_every == Some(0) {
        return Err(CliError::Usage("--snapshot-every must be positive".into()));
    }
    let axes = PhaseGrid::new(req.x_grid, req.p_grid);
    let initial = initial_distribution(&req.state, &axes, req.hbar);
    let bound = stability_bound(&req.hamiltonian, &axes, req.hbar, req.dynamics);
    let dt = req.dt.unwrap_or(DT_SAFETY * bound);
    let config = EvolveConfig {
        dynamics: req.dynamics,
        dt,
        steps: req.steps,
        trackers: req.trackers.clone(),
        snapshot_every: req.snapshot_every,
    };
    let result = run_dynamics(&req.hamiltonian, &initial, &config)?;

    let mut files = Vec::new();
    if let Some(dir) = &req.out {
        create_dir(dir)?;
        let csv_path = dir.join("trackers.csv");
        let file = File::create(&csv_path).map_err(io_err(&csv_path))?;
        let mut w = BufWriter::new(file);
        result.write_csv(&mut w).and_then(|_| w.flush()).map_err(io_err(&csv_path))?;
        files.push(csv_path);
        for (k, (_, frame)) in result.frames.iter().enumerate() {
            let pgm = dir.join(format!("frame_{k:04}.pgm"));
            let sidecar = export_heatmap(frame, &pgm)?;
            files.push(pgm);
            files.push(sidecar);
        }
    }
    let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();

    let dynamics = match req.dynamics {
        Dynamics::Liouville => "liouville",
        Dynamics::Moyal => "moyal",
    };
    let last = |t: Tracker| result.series(t).and_then(|s| s.last().copied());
    if json {
        let mut summary = serde_json::Map::new();
        for (t, series) in &result.tracked {
            let first = series.first().copied().unwrap_or(f64::NAN);
            let (lo, hi) = series.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            summary.insert(t.label().to_string(), json!({ "initial": first, "final": last(*t), "min": lo, "max": hi }));
        }
        return emit_json(
            out,
            json!({
                "command": "evolve",
                "dynamics": dynamics,
                "potential": req.potential_label,
                "state": state_label(&req.state),
                "hbar": req.hbar,
                "dt": dt,
                "stability_bound": bound,
                "steps": req.steps,
                "t_final": result.times.last().copied().unwrap_or(0.0),
                "norm_drift": result.norm_drift,
                "trackers": summary,
                "frames": result.frames.len(),
                "files": files,
            }),
        );
    }
    line(out, format!("dynamics\t{dynamics}"))?;
    line(out, format!("potential\t{}", req.potential_label))?;
    line(out, format!("dt\t{dt}\t(bound {bound})"))?;
    line(out, format!("t_final\t{}", result.times.last().copied().unwrap_or(0.0)))?;
    line(out, format!("norm_drift\t{:e}", result.norm_drift))?;
    for (t, _) in &result.tracked {
        if let Some(v) = last(*t) {
            line(out, format!("{}\t{v}", t.label()))?;
        }
    }
    for f in &files {
        line(out, format!("wrote\t{f}"))?;
    }
    Ok(())
}
