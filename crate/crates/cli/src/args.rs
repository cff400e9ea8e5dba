//! Value parsers for the compound flags.

use std::str::FromStr;

use weylquant::dynamics::{HamiltonianSpec, Tracker};
use weylquant::wavefunctions::GridSpec;
use weylquant::PhasePoly;

use crate::error::{CliError, CliResult};

/// `--state`: `ho:n` or `gauss:x0,k0,alpha`.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Oscillator(u32),
    Gaussian { x0: f64, k0: f64, alpha: f64 },
}

impl StateSpec {
    /// File stem for exports.
    pub fn stem(&self) -> String {
        match self {
            StateSpec::Oscillator(n) => format!("wigner_ho{n}"),
            StateSpec::Gaussian { .. } => "wigner_gauss".to_string(),
        }
    }
}

fn numbers(text: &str, count: usize, flag: &str) -> CliResult<Vec<f64>> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    match values {
        Ok(v) if v.len() == count && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Usage(format!("{flag} expects {count} comma-separated numbers, got {text:?}"))),
    }
}

impl FromStr for StateSpec {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        if let Some(n) = s.strip_prefix("ho:") {
            let n = n.parse().map_err(|_| CliError::Usage(format!("--state ho:<n> needs a nonnegative integer, got {s:?}")))?;
            return Ok(StateSpec::Oscillator(n));
        }
        if let Some(rest) = s.strip_prefix("gauss:") {
            let v = numbers(rest, 3, "--state gauss:")?;
            if v[2] <= 0.0 {
                return Err(CliError::Usage("gaussian width alpha must be positive".into()));
            }
            return Ok(StateSpec::Gaussian { x0: v[0], k0: v[1], alpha: v[2] });
        }
        Err(CliError::Usage(format!("unknown state {s:?}; expected ho:<n> or gauss:<x0>,<k0>,<alpha>")))
    }
}

/// `--grid nx,xmin,xmax`.
pub fn parse_grid(s: &str) -> CliResult<GridSpec> {
    let parts: Vec<&str> = s.split(',').collect();
    let nx = parts
        .first()
        .and_then(|n| n.trim().parse::<usize>().ok())
        .ok_or_else(|| CliError::Usage(format!("--grid expects nx,xmin,xmax, got {s:?}")))?;
    let bounds = numbers(&parts[1..].join(","), 2, "--grid xmin,xmax")?;
    GridSpec::from_range(nx, bounds[0], bounds[1]).map_err(|e| CliError::Usage(e.to_string()))
}

/// `--potential harmonic|quartic|poly:<expr>`.
pub fn parse_potential(s: &str, mass: f64) -> CliResult<HamiltonianSpec> {
    let potential = match s {
        "harmonic" => HamiltonianSpec::harmonic().potential,
        "quartic" => HamiltonianSpec::quartic().potential,
        _ => match s.strip_prefix("poly:") {
            Some(expr) => expr.parse::<PhasePoly>()?,
            None => return Err(CliError::Usage(format!("unknown potential {s:?}; expected harmonic, quartic or poly:<expr>"))),
        },
    };
    HamiltonianSpec::new(potential, mass).map_err(|e| CliError::Usage(e.to_string()))
}

/// `--track a,b,c`.
pub fn parse_trackers(s: &str) -> CliResult<Vec<Tracker>> {
    let mut out = Vec::new();
    for label in s.split(',').map(str::trim).filter(|l| !l.is_empty()) {
        let t: Tracker = label.parse().map_err(|_| {
            let known: Vec<&str> = Tracker::ALL.iter().map(|t| t.label()).collect();
            CliError::Usage(format!("unknown tracker {label:?}; expected one of {}", known.join(", ")))
        })?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}
