use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde_json::{json, Value};

use hrwave::harness::{
    compute_error, fit_slope, group_series, overshoot_on_grid, read_csv, write_csv, ErrorRecord,
    RunFlag, Study,
};
use hrwave::integrate::{run as integrate, Method, RunOptions, SchemeConfig};
use hrwave::model::{InitialProfile, RNG_ALGORITHM};
use hrwave::spectral::snapshot::{read_snapshot, write_snapshot};
use hrwave::spectral::{pair_norm, sample_on_grid, PairField};
use hrwave::waveop::apply_group;

use crate::args::{PlotOpts, SimOpts};
use crate::plot::{gnuplot_loglog, line_svg, loglog_svg, raster_svg, Series};
use crate::setup::{self, Setup};
use crate::Failure;

const RASTER_CAP: usize = 128;

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::Other)
}

fn write_file(path: PathBuf, contents: impl AsRef<[u8]>) -> Result<(), Failure> {
    fs::write(&path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Other)
}

fn write_json(path: PathBuf, value: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Other(e.into()))?;
    write_file(path, text + "\n")
}

fn file_label(m: &Method) -> String {
    match m {
        Method::HrLri { alpha } => format!("hrlri_alpha{alpha}"),
        other => other.name().to_string(),
    }
}

fn method_label(m: &Method) -> String {
    match m {
        Method::HrLri { alpha } => format!("hrlri(alpha={alpha})"),
        other => other.name().to_string(),
    }
}

fn config_echo(o: &SimOpts, s: &Setup) -> Value {
    json!({
        "dim": s.problem.dim,
        "g": s.problem.nonlinearity.to_string(),
        "m": o.m,
        "init": o.init,
        "N": o.n,
        "alpha": o.alpha,
        "tau_ratio": o.tau_ratio,
        "T": o.t_final,
        "methods": s.methods.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
        "sweep": o.sweep,
        "ref_N": o.ref_n,
        "ref_alpha": o.ref_alpha,
        "ref_min_ratio": o.ref_min_ratio,
        "grid_factor": o.grid_factor,
        "snapshots": o.snapshots,
    })
}

fn timing_value(o: &SimOpts, seconds: f64) -> Value {
    if o.timing {
        json!(seconds)
    } else {
        Value::Null
    }
}

/// Rejects snapshot times that are not step multiples in `[0, T]` before
/// any field is allocated.
fn check_times(cfg: &SchemeConfig, times: &[f64]) -> Result<(), Failure> {
    let steps = cfg.steps().map_err(Failure::from)?;
    for &t in times {
        let n = (t / cfg.tau).round();
        if !t.is_finite()
            || n < 0.0
            || n > steps as f64
            || (t - n * cfg.tau).abs() > 1e-9 * cfg.t_final.max(1.0)
        {
            return Err(Failure::Usage(format!(
                "snapshot time {t} is not a multiple of tau = {} in [0, {}]",
                cfg.tau, cfg.t_final
            )));
        }
    }
    Ok(())
}

pub fn cmd_run(o: &SimOpts) -> Result<(), Failure> {
    let s = setup::problem(o)?;
    let n = setup::require_n(o)?;
    let [method] = s.methods[..] else {
        return Err(Failure::Usage("run takes exactly one --method".into()));
    };
    let cfg = setup::scheme(o, &s, method, n)?;
    let times = setup::snapshot_times(o)?;
    check_times(&cfg, &times)?;
    ensure_dir(&o.out)?;

    let profile = InitialProfile::prepare(&s.problem.initial, cfg.high_bandwidth())?;
    let initial = profile.materialize(cfg.high_bandwidth())?;
    let traj = integrate(
        &cfg,
        &profile,
        &RunOptions {
            snapshot_times: times,
            low_only: false,
        },
    )?;

    let mut files = vec!["initial.hrwv".to_string()];
    write_snapshot(o.out.join("initial.hrwv"), 0.0, &initial)?;
    for snap in &traj.snapshots {
        let name = format!("snapshot_t{}.hrwv", snap.time);
        write_snapshot(o.out.join(&name), snap.time, &snap.field)?;
        files.push(name);
    }
    write_snapshot(o.out.join("final.hrwv"), traj.state.t, &traj.solution()?)?;
    files.push("final.hrwv".into());

    let blowup = traj
        .blowup
        .map(|(step, time)| json!({"step": step, "time": time}));
    let meta = json!({
        "command": "run",
        "config": config_echo(o, &s),
        "method": method.to_string(),
        "tau": cfg.tau,
        "N_alpha": cfg.high_bandwidth(),
        "steps": cfg.steps()?,
        "steps_taken": traj.steps_taken,
        "final_time": traj.state.t,
        "seed": o.seed,
        "rng": RNG_ALGORITHM,
        "wall_seconds": timing_value(o, traj.wall_seconds),
        "blowup": blowup,
        "files": files,
    });
    write_json(o.out.join("metadata.json"), &meta)?;
    println!(
        "{}: N={n} N_alpha={} tau={} steps={} -> {}",
        method,
        cfg.high_bandwidth(),
        cfg.tau,
        traj.steps_taken,
        o.out.display()
    );
    if let Some((step, time)) = traj.blowup {
        return Err(Failure::BlowUp(format!(
            "blow-up at step {step} (t = {time})"
        )));
    }
    Ok(())
}

fn series_of(records: &[ErrorRecord]) -> Vec<Series> {
    group_series(records)
        .into_iter()
        .map(|g| {
            let slope = fit_slope(&g).ok();
            Series {
                label: g[0].label(),
                points: g
                    .iter()
                    .filter(|r| r.is_ok())
                    .map(|r| (r.tau, r.err0))
                    .collect(),
                note: slope.map(|p| format!("slope {p:.3}")),
            }
        })
        .collect()
}

fn print_slopes(records: &[ErrorRecord]) {
    for g in group_series(records) {
        match fit_slope(&g) {
            Ok(p) => println!("slope {} {}", g[0].label(), p),
            Err(_) => println!("slope {} n/a", g[0].label()),
        }
    }
}

const ERR_LABEL: &str = "error in L2 x H^-1";

pub fn cmd_converge(o: &SimOpts) -> Result<(), Failure> {
    let s = setup::problem(o)?;
    let sweep = setup::sweep(o)?;
    let spec = setup::experiment(o, &s, sweep)?;
    ensure_dir(&o.out)?;

    let study = Study::prepare(&spec)?;
    let mut records = study.run_all()?;
    if !o.timing {
        for r in &mut records {
            r.wall_seconds = 0.0;
        }
    }
    write_csv(&o.out.join("convergence.csv"), &records)?;
    for r in &records {
        println!(
            "{} N={} tau={:e} err={:e} {}",
            r.label(),
            r.n,
            r.tau,
            r.err0,
            r.flag
        );
    }
    print_slopes(&records);
    if o.svg {
        let series = series_of(&records);
        write_file(
            o.out.join("convergence.svg"),
            loglog_svg(&series, "Error versus step size", "tau", ERR_LABEL),
        )?;
        write_file(
            o.out.join("convergence.gp"),
            gnuplot_loglog(
                &series,
                "Error versus step size",
                "tau",
                ERR_LABEL,
                "convergence_gnuplot.svg",
            ),
        )?;
    }
    let meta = json!({
        "command": "converge",
        "config": config_echo(o, &s),
        "reference": {"N": spec.reference.n_ref, "tau": study.reference().tau()},
        "seed": o.seed,
        "rng": RNG_ALGORITHM,
    });
    write_json(o.out.join("metadata.json"), &meta)?;
    let blown: Vec<String> = records
        .iter()
        .filter(|r| r.flag == RunFlag::Blowup)
        .map(|r| format!("{} N={}", r.label(), r.n))
        .collect();
    if !blown.is_empty() {
        return Err(Failure::BlowUp(format!("blow-up in {}", blown.join(", "))));
    }
    Ok(())
}

/// Row-major `side × side` subsample (first index along x) of a square grid.
fn subsample(values: &[f64], points: usize, cap: usize) -> (usize, Vec<f64>) {
    let stride = points.div_ceil(cap).max(1);
    let side = points / stride;
    let mut out = Vec::with_capacity(side * side);
    for ix in 0..side {
        for iy in 0..side {
            out.push(values[ix * stride * points + iy * stride]);
        }
    }
    (side, out)
}

pub fn cmd_compare(o: &SimOpts) -> Result<(), Failure> {
    let s = setup::problem(o)?;
    if s.methods.len() < 2 {
        return Err(Failure::Usage(
            "compare needs at least two methods in --method".into(),
        ));
    }
    let n = setup::require_n(o)?;
    let spec = setup::experiment(o, &s, vec![n])?;
    let dim = s.problem.dim;
    let points = 2 * n * o.grid_factor;
    ensure_dir(&o.out)?;

    let study = Study::prepare(&spec)?;
    let alpha_cmp = s
        .methods
        .iter()
        .map(|m| spec.alpha_ref(*m))
        .fold(1.0, f64::max);
    let reference = study.reference().sample_u(alpha_cmp, points)?;

    let mut rows = Vec::new();
    let mut profiles: Vec<(String, Vec<f64>)> = Vec::new();
    let mut blown = Vec::new();
    for m in &s.methods {
        let (rec, traj) = study.run_case(*m, n)?;
        let label = method_label(m);
        if traj.blew_up() {
            blown.push(label);
            continue;
        }
        let sol = traj.solution()?;
        write_snapshot(
            o.out.join(format!("final_{}.hrwv", file_label(m))),
            traj.state.t,
            &sol,
        )?;
        let samples = sample_on_grid(&sol.u, points)?;
        let max_u = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let over = overshoot_on_grid(&samples, &reference)?;
        rows.push((label.clone(), m.alpha(), rec.err0, max_u, over));
        profiles.push((label, samples));
    }

    let mut table = String::from("method,alpha,err_L2Hm1,max_u,overshoot\n");
    for (label, alpha, err, max_u, over) in &rows {
        table.push_str(&format!(
            "{label},{alpha:.16e},{err:.16e},{max_u:.16e},{over:.16e}\n"
        ));
        println!("{label}: err={err:e} max_u={max_u:.6} overshoot={over:.6}");
    }
    write_file(o.out.join("overshoot.csv"), table)?;
    let mut order: Vec<&(String, f64, f64, f64, f64)> = rows.iter().collect();
    order.sort_by(|a, b| b.4.total_cmp(&a.4));
    println!(
        "overshoot ordering: {}",
        order
            .iter()
            .map(|r| r.0.as_str())
            .collect::<Vec<_>>()
            .join(" > ")
    );

    profiles.push(("reference".into(), reference));
    let mut csv = String::new();
    if dim == 1 {
        csv.push('x');
        for (label, _) in &profiles {
            csv.push(',');
            csv.push_str(label);
        }
        csv.push('\n');
        for i in 0..points {
            csv.push_str(&format!("{:.16e}", i as f64 / points as f64));
            for (_, v) in &profiles {
                csv.push_str(&format!(",{:.16e}", v[i]));
            }
            csv.push('\n');
        }
        if o.svg {
            let series: Vec<Series> = profiles
                .iter()
                .map(|(label, v)| Series {
                    label: label.clone(),
                    points: v
                        .iter()
                        .enumerate()
                        .map(|(i, y)| (i as f64 / points as f64, *y))
                        .collect(),
                    note: None,
                })
                .collect();
            write_file(
                o.out.join("compare.svg"),
                line_svg(&series, &format!("u at T = {}", o.t_final), "x", "u"),
            )?;
        }
    } else {
        let panels: Vec<(String, usize, Vec<f64>)> = profiles
            .iter()
            .map(|(label, v)| {
                let (side, sub) = subsample(v, points, RASTER_CAP);
                (label.clone(), side, sub)
            })
            .collect();
        let side = panels[0].1;
        csv.push_str("x,y");
        for (label, _, _) in &panels {
            csv.push(',');
            csv.push_str(label);
        }
        csv.push('\n');
        for ix in 0..side {
            for iy in 0..side {
                csv.push_str(&format!(
                    "{:.16e},{:.16e}",
                    ix as f64 / side as f64,
                    iy as f64 / side as f64
                ));
                for (_, _, v) in &panels {
                    csv.push_str(&format!(",{:.16e}", v[ix * side + iy]));
                }
                csv.push('\n');
            }
        }
        if o.svg {
            write_file(
                o.out.join("compare.svg"),
                raster_svg(&panels, &format!("u at T = {}", o.t_final)),
            )?;
        }
    }
    write_file(o.out.join("profiles.csv"), csv)?;
    let meta = json!({
        "command": "compare",
        "config": config_echo(o, &s),
        "grid_points": points,
        "reference": {"N": spec.reference.n_ref, "alpha": alpha_cmp},
        "seed": o.seed,
        "rng": RNG_ALGORITHM,
    });
    write_json(o.out.join("metadata.json"), &meta)?;
    if !blown.is_empty() {
        return Err(Failure::BlowUp(format!("blow-up in {}", blown.join(", "))));
    }
    Ok(())
}

fn verify_linear(dir: &Path) -> Result<(), Failure> {
    let meta_text = fs::read_to_string(dir.join("metadata.json"))
        .with_context(|| format!("reading {}/metadata.json", dir.display()))
        .map_err(|e| Failure::Usage(format!("{e:#}")))?;
    let meta: Value = serde_json::from_str(&meta_text)
        .map_err(|e| Failure::Usage(format!("metadata.json: {e}")))?;
    let m = meta["config"]["m"]
        .as_f64()
        .ok_or_else(|| Failure::Usage("metadata.json has no config.m".into()))?;
    if meta["config"]["g"].as_str() != Some("linear") {
        return Err(Failure::Usage(
            "verify-linear needs a run with --g linear".into(),
        ));
    }
    let (t0, initial) = read_snapshot(dir.join("initial.hrwv"))?;
    let (t1, last) = read_snapshot(dir.join("final.hrwv"))?;
    let exact = apply_group(&initial, t1 - t0, m)?;
    let rel = compute_error(&last, &exact)? / pair_norm(&exact, 0.0).max(f64::MIN_POSITIVE);
    let ok = rel <= 1e-10;
    println!(
        "linear check: relative error {rel:.3e} at t = {t1} (tolerance 1e-10): {}",
        if ok { "passed" } else { "FAILED" }
    );
    if ok {
        Ok(())
    } else {
        Err(Failure::Other(anyhow!(
            "final snapshot differs from the free evolution"
        )))
    }
}

fn plot_snapshots(o: &PlotOpts) -> Result<(), Failure> {
    let mut fields: Vec<(String, f64, PairField)> = Vec::new();
    for p in &o.snapshot {
        let (t, w) =
            read_snapshot(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
        let name = p.file_stem().map_or_else(
            || p.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        fields.push((name, t, w));
    }
    let dim = fields[0].2.dim();
    if fields.iter().any(|f| f.2.dim() != dim) {
        return Err(Failure::Usage("snapshots have different dimensions".into()));
    }
    if o.points < 2 || !o.points.is_power_of_two() {
        return Err(Failure::Usage(format!(
            "--points must be a power of two, got {}",
            o.points
        )));
    }
    let points = if dim == 1 {
        o.points
    } else {
        o.points.min(RASTER_CAP)
    };
    let svg = if dim == 1 {
        let series = fields
            .iter()
            .map(|(name, t, w)| {
                let v = sample_on_grid(&w.u, points)?;
                Ok(Series {
                    label: format!("{name} (t = {t})"),
                    points: v
                        .iter()
                        .enumerate()
                        .map(|(i, y)| (i as f64 / points as f64, *y))
                        .collect(),
                    note: None,
                })
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        line_svg(&series, "Solution profiles", "x", "u")
    } else {
        let panels = fields
            .iter()
            .map(|(name, t, w)| {
                Ok((
                    format!("{name} (t = {t})"),
                    points,
                    sample_on_grid(&w.u, points)?,
                ))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        raster_svg(&panels, "Solution profiles")
    };
    write_file(o.out.join("profiles.svg"), svg)
}

pub fn cmd_plot(o: &PlotOpts) -> Result<(), Failure> {
    if o.csv.is_none() && o.snapshot.is_empty() && o.verify_linear.is_none() {
        return Err(Failure::Usage(
            "plot needs --csv, --snapshot or --verify-linear".into(),
        ));
    }
    let records = match &o.csv {
        Some(p) => Some(read_csv(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?),
        None => None,
    };
    for p in &o.snapshot {
        if !p.is_file() {
            return Err(Failure::Usage(format!("{} does not exist", p.display())));
        }
    }
    if let Some(dir) = &o.verify_linear {
        verify_linear(dir)?;
    }
    if records.is_none() && o.snapshot.is_empty() {
        return Ok(());
    }
    ensure_dir(&o.out)?;
    if let Some(records) = records {
        let series = series_of(&records);
        write_file(
            o.out.join("convergence.svg"),
            loglog_svg(&series, "Error versus step size", "tau", ERR_LABEL),
        )?;
        write_file(
            o.out.join("convergence.gp"),
            gnuplot_loglog(
                &series,
                "Error versus step size",
                "tau",
                ERR_LABEL,
                "convergence_gnuplot.svg",
            ),
        )?;
        print_slopes(&records);
    }
    if !o.snapshot.is_empty() {
        plot_snapshots(o)?;
    }
    Ok(())
}
