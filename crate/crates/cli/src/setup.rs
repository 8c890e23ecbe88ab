//! Flags to validated core types. Nothing here allocates field data, so a
//! bad flag fails before any computation.

use std::path::Path;

use hrwave::harness::{ExperimentSpec, ProblemSpec, ReferenceSpec};
use hrwave::integrate::{Method, SchemeConfig};
use hrwave::model::{InitialData, Nonlinearity};
use hrwave::spectral::snapshot::read_snapshot;

use crate::args::SimOpts;
use crate::Failure;

pub const PRESETS: [&str; 6] = [
    "boxes:sg1d",
    "boxes:sg2d-one",
    "boxes:sg2d-two",
    "boxes:kg1d",
    "rough2d",
    "smooth:sin",
];

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

pub fn parse_nonlinearity(s: &str, m: f64) -> Result<Nonlinearity, Failure> {
    let s = s.trim().to_ascii_lowercase();
    let (name, arg) = match s.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (s.as_str(), None),
    };
    let coef = || -> Result<f64, Failure> {
        match arg {
            None => Ok(1.0),
            Some(a) => a
                .parse()
                .map_err(|_| usage(format!("bad coefficient in --g '{s}'"))),
        }
    };
    let nl = match name {
        "sine" | "sin" => Nonlinearity::sine(coef()?, m),
        "cubic" => Nonlinearity::cubic(coef()?, m),
        "linear" if arg.is_none() => Nonlinearity::linear(m),
        _ => {
            return Err(usage(format!(
                "unknown nonlinearity '{s}' (sine:A, cubic:L, linear)"
            )))
        }
    };
    nl.map_err(|e| usage(e.to_string()))
}

/// Preset name or snapshot path. `dim` only matters for `smooth:sin`.
pub fn parse_init(s: &str, dim: Option<usize>, seed: u64) -> Result<InitialData, Failure> {
    let data = match s.trim() {
        "boxes:sg1d" => InitialData::sine_gordon_1d(),
        "boxes:sg2d-one" => InitialData::sine_gordon_2d_one(),
        "boxes:sg2d-two" => InitialData::sine_gordon_2d_two(),
        "boxes:kg1d" => InitialData::klein_gordon_1d(),
        "rough2d" => InitialData::rough_2d(seed),
        "smooth:sin" => InitialData::smooth_sin(dim.unwrap_or(1)),
        other => {
            let path = Path::new(other);
            if !path.is_file() {
                return Err(usage(format!(
                    "--init '{other}' is neither a preset ({}) nor a snapshot file",
                    PRESETS.join(", ")
                )));
            }
            let (_, field) = read_snapshot(path).map_err(|e| usage(format!("{other}: {e}")))?;
            InitialData::Coefficients(field)
        }
    };
    if let Some(d) = dim {
        if d != data.dim() {
            return Err(usage(format!(
                "--dim {d} does not match the {}-dimensional initial data",
                data.dim()
            )));
        }
    }
    data.validate().map_err(|e| usage(e.to_string()))?;
    Ok(data)
}

pub fn parse_methods(s: Option<&str>, alpha: f64) -> Result<Vec<Method>, Failure> {
    let s = s.unwrap_or("hrlri");
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let m: Method = if item.eq_ignore_ascii_case("hrlri") {
            Method::HrLri { alpha }
        } else {
            item.parse()
                .map_err(|e: hrwave::Error| usage(e.to_string()))?
        };
        m.validate().map_err(|e| usage(e.to_string()))?;
        out.push(m);
    }
    if out.is_empty() {
        return Err(usage("--method needs at least one method"));
    }
    Ok(out)
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse()
                .map_err(|_| usage(format!("bad value '{x}' in {flag}")))
        })
        .collect()
}

fn pow2(n: usize, flag: &str) -> Result<usize, Failure> {
    if n == 0 || !n.is_power_of_two() {
        return Err(usage(format!("{flag} must be a power of two, got {n}")));
    }
    Ok(n)
}

pub struct Setup {
    pub problem: ProblemSpec,
    pub methods: Vec<Method>,
}

pub fn problem(o: &SimOpts) -> Result<Setup, Failure> {
    if !(o.m > 0.0 && o.m.is_finite()) {
        return Err(usage(format!("--m must be positive, got {}", o.m)));
    }
    if !(o.t_final > 0.0 && o.t_final.is_finite()) {
        return Err(usage(format!("--T must be positive, got {}", o.t_final)));
    }
    if !(o.tau_ratio > 0.0 && o.tau_ratio.is_finite()) {
        return Err(usage(format!(
            "--tau-ratio must be positive, got {}",
            o.tau_ratio
        )));
    }
    if !(o.alpha >= 1.0 && o.alpha.is_finite()) {
        return Err(usage(format!("--alpha must be >= 1, got {}", o.alpha)));
    }
    if o.grid_factor < 2 || !o.grid_factor.is_power_of_two() {
        return Err(usage(format!(
            "--grid-factor must be a power of two >= 2, got {}",
            o.grid_factor
        )));
    }
    let nonlinearity = parse_nonlinearity(&o.g, o.m)?;
    let initial = parse_init(&o.init, o.dim, o.seed)?;
    let problem = ProblemSpec {
        dim: initial.dim(),
        nonlinearity,
        initial,
        t_final: o.t_final,
    };
    problem.validate().map_err(|e| usage(e.to_string()))?;
    Ok(Setup {
        problem,
        methods: parse_methods(o.method.as_deref(), o.alpha)?,
    })
}

pub fn require_n(o: &SimOpts) -> Result<usize, Failure> {
    pow2(
        o.n.ok_or_else(|| usage("missing required flag --N"))?,
        "--N",
    )
}

pub fn scheme(o: &SimOpts, s: &Setup, method: Method, n: usize) -> Result<SchemeConfig, Failure> {
    let cfg = SchemeConfig {
        method,
        n,
        tau: o.tau_ratio / n as f64,
        t_final: o.t_final,
        nonlinearity: s.problem.nonlinearity,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

pub fn snapshot_times(o: &SimOpts) -> Result<Vec<f64>, Failure> {
    match &o.snapshots {
        None => Ok(Vec::new()),
        Some(s) => parse_list(s, "--snapshots"),
    }
}

/// Desk-scale default reference: `2^12` in 1D and `2^7` in 2D, raised to
/// `min_ratio · max(N)` when that is larger.
pub fn experiment(o: &SimOpts, s: &Setup, sweep: Vec<usize>) -> Result<ExperimentSpec, Failure> {
    for &n in &sweep {
        pow2(n, "--sweep")?;
    }
    let max_n = sweep
        .iter()
        .copied()
        .max()
        .ok_or_else(|| usage("empty sweep"))?;
    let desk = if s.problem.dim == 1 { 1 << 12 } else { 1 << 7 };
    let n_ref = match o.ref_n {
        Some(n) => pow2(n, "--ref-N")?,
        None => desk.max(o.ref_min_ratio.max(1) * max_n),
    };
    let spec = ExperimentSpec {
        problem: s.problem.clone(),
        sweep,
        tau_ratio: o.tau_ratio,
        methods: s.methods.clone(),
        reference: ReferenceSpec {
            n_ref,
            alpha_ref: o.ref_alpha,
            min_ratio: o.ref_min_ratio,
        },
        seed: Some(o.seed),
        threads: o.threads,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

pub fn sweep(o: &SimOpts) -> Result<Vec<usize>, Failure> {
    match (&o.sweep, o.n) {
        (Some(s), _) => parse_list(s, "--sweep"),
        (None, Some(n)) => Ok(vec![n]),
        (None, None) => Err(usage("missing required flag --sweep")),
    }
}
