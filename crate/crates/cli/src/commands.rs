use std::io::Write;

use serde::Serialize;
use serde_json::json;

use su11_core::closed_form::ProbeParams;
use su11_core::experiments::{
    difference_map, find_boundaries, sweep, validate_against_oracle, BoundaryOptions, OracleGrid,
};
use su11_core::{
    Axis, BoundReport, BudgetMode, BudgetSpec, Error as CoreError, OracleConfig, Param, Probe, Regime, Subtraction,
    SweepRow, SweepSpec,
};

use crate::error::{CliError, Result};
use crate::output::{num, opt_num, write_csv, write_json};
use crate::params::Params;
use crate::{Command, Format};

const DIRECT_KEYS: [&str; 2] = ["alpha", "r"];
const BUDGET_KEYS: [&str; 3] = ["N_in", "eta", "mode"];

/// Column order of sweep and map tables.
pub const SWEEP_HEADER: [&str; 8] = ["axis1", "axis2", "p", "qcrb", "hl_small", "hl_large", "diff", "feasible"];

pub fn run(command: Command, params: &mut Params, format: Format, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Eval => eval(params, format, out),
        Command::Sweep => run_sweep(params, format, out, false),
        Command::Map => run_sweep(params, format, out, true),
        Command::Regions => regions(params, format, out),
        Command::Validate => validate(params, format, out),
    }
}

fn parse_orders(s: &str) -> Result<Vec<Subtraction>> {
    let orders = s
        .split(',')
        .map(|p| {
            let n: u32 = p
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad subtraction order '{p}'")))?;
            Subtraction::try_from(n).map_err(CliError::from)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(orders)
}

fn parse_mode(s: &str) -> Result<BudgetMode> {
    match s {
        "pre" | "pre_subtraction" => Ok(BudgetMode::PreSubtraction),
        "post" | "post_subtraction" => Ok(BudgetMode::PostSubtraction),
        _ => Err(CliError::Config(format!("mode must be pre or post, got '{s}'"))),
    }
}

fn mode_name(m: BudgetMode) -> &'static str {
    match m {
        BudgetMode::PreSubtraction => "pre",
        BudgetMode::PostSubtraction => "post",
    }
}

fn parse_regime(s: &str) -> Result<Regime> {
    match s {
        "small" | "small_m" => Ok(Regime::SmallM),
        "large" | "large_m" => Ok(Regime::LargeM),
        "combined" => Ok(Regime::Combined),
        _ => Err(CliError::Config(format!("regime must be small, large or combined, got '{s}'"))),
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::SmallM => "small",
        Regime::LargeM => "large",
        Regime::Combined => "combined",
    }
}

/// `param:start:end:count`, e.g. `g:0:3:151`.
fn parse_axis(s: &str) -> Result<Axis> {
    let parts: Vec<&str> = s.split(':').collect();
    let [param, start, end, count] = parts[..] else {
        return Err(CliError::Config(format!("axis must be param:start:end:count, got '{s}'")));
    };
    let bad = |what: &str| CliError::Config(format!("bad axis {what} in '{s}'"));
    let axis = Axis::new(
        param.parse::<Param>()?,
        start.parse().map_err(|_| bad("start"))?,
        end.parse().map_err(|_| bad("end"))?,
        count.parse().map_err(|_| bad("count"))?,
    );
    axis.validate()?;
    Ok(axis)
}

fn nonnegative(params: &mut Params, key: &str, default: Option<f64>) -> Result<f64> {
    let v = match default {
        Some(d) => params.get_or(key, d)?,
        None => params.require(key)?,
    };
    if !(v.is_finite() && v >= 0.0) {
        return Err(CliError::Config(format!("{key} must be finite and >= 0, got {v}")));
    }
    Ok(v)
}

fn repeats(params: &mut Params) -> Result<u32> {
    let m: u32 = params.get_or("m", 1)?;
    if m == 0 {
        return Err(CliError::Config("m must be >= 1".into()));
    }
    Ok(m)
}

fn reject_mixed(params: &Params, axis_params: &[Param]) -> Result<(bool, bool)> {
    let direct = DIRECT_KEYS.iter().any(|k| params.has(k))
        || axis_params.iter().any(|p| matches!(p, Param::Alpha | Param::Squeeze));
    let budget = BUDGET_KEYS.iter().any(|k| params.has(k))
        || axis_params.iter().any(|p| matches!(p, Param::Eta | Param::TotalMean));
    if direct && budget {
        return Err(CliError::Config(
            "(alpha, r) and (N_in, eta, mode) parameterizations cannot be mixed".into(),
        ));
    }
    Ok((direct, budget))
}

#[derive(Serialize)]
struct EvalOutput {
    #[serde(flatten)]
    report: BoundReport,
    regime: Regime,
    diff: f64,
}

fn eval(params: &mut Params, format: Format, out: &mut dyn Write) -> Result<()> {
    params.reject_unknown(&["p", "alpha", "r", "N_in", "eta", "mode", "g", "m", "regime"])?;
    let (direct, budget) = reject_mixed(params, &[])?;
    let p = Subtraction::try_from(params.require::<u32>("p")?)?;
    let g = nonnegative(params, "g", None)?;
    let m = repeats(params)?;
    let regime = parse_regime(&params.get_or("regime", "small".to_string())?)?;

    let report = if direct {
        let alpha = nonnegative(params, "alpha", Some(0.0))?;
        let r = nonnegative(params, "r", Some(0.0))?;
        BoundReport::evaluate(p, ProbeParams::new(alpha, r), g, m)
    } else if budget {
        let total_mean = nonnegative(params, "N_in", None)?;
        let eta: f64 = params.require("eta")?;
        let mode = parse_mode(&params.get_or("mode", "pre".to_string())?)?;
        BoundReport::for_budget(
            &BudgetSpec {
                total_mean,
                squeeze_fraction: eta,
                subtracted: p,
                mode,
            },
            g,
            m,
        )
    } else {
        return Err(CliError::Config("eval needs either alpha/r or N_in/eta".into()));
    };
    let report = report.map_err(|e| match e {
        // a degenerate probe, e.g. the vacuum
        CoreError::Domain(msg) => CliError::Infeasible(msg),
        other => other.into(),
    })?;
    let diff = report.qcrb - report.hl(regime);

    match format {
        Format::Csv => {
            let header = [
                "p", "alpha", "r", "g", "m", "qfi", "qcrb", "mean_inside", "mean_sq_inside", "hl_small", "hl_large",
                "hl_combined", "diff",
            ];
            let row = vec![
                report.p.to_string(),
                num(report.alpha_mag),
                num(report.squeeze_mag),
                num(report.gain),
                report.repeats.to_string(),
                num(report.qfi),
                num(report.qcrb),
                num(report.mean_inside),
                num(report.mean_sq_inside),
                num(report.hl_small_m),
                num(report.hl_large_m),
                num(report.hl_combined),
                num(diff),
            ];
            write_csv(out, &header, &[row])
        }
        Format::Json => write_json(
            out,
            "eval",
            params.resolved(),
            serde_json::Value::Null,
            "report",
            &EvalOutput { report, regime, diff },
        ),
    }
}

fn sweep_row(r: &SweepRow) -> Vec<String> {
    vec![
        num(r.axis1),
        opt_num(r.axis2),
        r.p.to_string(),
        opt_num(r.qcrb),
        opt_num(r.hl_small),
        opt_num(r.hl_large),
        opt_num(r.diff),
        r.feasible.to_string(),
    ]
}

fn run_sweep(params: &mut Params, format: Format, out: &mut dyn Write, map: bool) -> Result<()> {
    params.reject_unknown(&[
        "p", "alpha", "r", "N_in", "eta", "mode", "g", "m", "regime", "axis1", "axis2",
    ])?;
    let (default1, default2) = if map {
        ("eta:0:1:201", Some("g:0:3:151"))
    } else {
        ("g:0:3:151", None)
    };
    let axis1 = parse_axis(&params.get_or("axis1", default1.to_string())?)?;
    let axis2 = match params.raw("axis2").as_deref().or(default2) {
        Some(s) => {
            params.note("axis2", s);
            Some(parse_axis(s)?)
        }
        None => None,
    };
    let axis_params: Vec<Param> = std::iter::once(axis1.param).chain(axis2.map(|a| a.param)).collect();
    let (direct, _) = reject_mixed(params, &axis_params)?;

    let probe = if direct {
        Probe::Direct {
            alpha: nonnegative(params, "alpha", Some(0.0))?,
            squeeze: nonnegative(params, "r", Some(0.0))?,
        }
    } else {
        Probe::Budget {
            total_mean: params.get_or("N_in", 200.0)?,
            eta: params.get_or("eta", 0.5)?,
            mode: parse_mode(&params.get_or("mode", "pre".to_string())?)?,
        }
    };
    let spec = SweepSpec {
        axis1,
        axis2,
        probe,
        gain: nonnegative(params, "g", Some(3.0))?,
        repeats: repeats(params)?,
        orders: parse_orders(&params.get_or("p", "0,1,2".to_string())?)?,
        regime: parse_regime(&params.get_or("regime", "small".to_string())?)?,
    };
    let rows = if map {
        difference_map(&spec, spec.regime)?
    } else {
        sweep(&spec)?
    };

    match format {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows.iter().map(sweep_row).collect();
            write_csv(out, &SWEEP_HEADER, &table)
        }
        Format::Json => {
            let floors: serde_json::Map<String, serde_json::Value> = spec
                .orders
                .iter()
                .filter_map(|&p| spec.feasibility_floor(p).map(|f| (p.to_string(), json!(f))))
                .collect();
            let extra = json!({
                "axis1": axis1.param.to_string(),
                "axis2": axis2.map(|a| a.param.to_string()),
                "feasibility_floor": floors,
            });
            write_json(out, if map { "map" } else { "sweep" }, params.resolved(), extra, "rows", &rows)
        }
    }
}

fn regions(params: &mut Params, format: Format, out: &mut dyn Write) -> Result<()> {
    params.reject_unknown(&["p", "g", "N_in", "m", "regime", "mode", "samples", "tol"])?;
    let orders = parse_orders(&params.get_or("p", "0,1,2".to_string())?)?;
    let g = nonnegative(params, "g", Some(3.0))?;
    let total_mean: f64 = params.get_or("N_in", 200.0)?;
    let m = repeats(params)?;
    let regime = parse_regime(&params.get_or("regime", "small".to_string())?)?;
    let defaults = BoundaryOptions::default();
    let opts = BoundaryOptions {
        samples: params.get_or("samples", defaults.samples)?,
        tolerance: params.get_or("tol", defaults.tolerance)?,
        mode: parse_mode(&params.get_or("mode", mode_name(defaults.mode).to_string())?)?,
    };
    let found = orders
        .iter()
        .map(|&p| find_boundaries(p, g, total_mean, m, regime, &opts))
        .collect::<su11_core::Result<Vec<_>>>()?;

    match format {
        Format::Csv => {
            let header = [
                "p", "g", "N_in", "regime", "eta_c", "eta_l", "eta_u", "crossings", "max_residual", "tolerance",
            ];
            let rows: Vec<Vec<String>> = found
                .iter()
                .map(|b| {
                    vec![
                        b.p.to_string(),
                        num(b.g),
                        num(b.total_mean),
                        regime_name(b.regime).to_string(),
                        opt_num(b.eta_c),
                        opt_num(b.eta_l),
                        opt_num(b.eta_u),
                        b.crossings.len().to_string(),
                        num(b.max_residual()),
                        num(b.tolerance),
                    ]
                })
                .collect();
            write_csv(out, &header, &rows)
        }
        Format::Json => write_json(out, "regions", params.resolved(), serde_json::Value::Null, "boundaries", &found),
    }
}

fn validate(params: &mut Params, format: Format, out: &mut dyn Write) -> Result<()> {
    params.reject_unknown(&[
        "p", "gmin", "gmax", "rmin", "rmax", "amin", "amax", "n", "dims", "max_dims", "tail_tol", "series_tol",
        "max_terms", "alpha_phase", "pump_phase",
    ])?;
    let base = OracleGrid::default();
    let range = |params: &mut Params, lo: &str, hi: &str, v: &[f64]| -> Result<(f64, f64)> {
        Ok((
            nonnegative(params, lo, Some(v[0]))?,
            nonnegative(params, hi, Some(v[v.len() - 1]))?,
        ))
    };
    let gains = range(params, "gmin", "gmax", &base.gains)?;
    let squeezes = range(params, "rmin", "rmax", &base.squeezes)?;
    let alphas = range(params, "amin", "amax", &base.alphas)?;
    let n: usize = params.get_or("n", base.gains.len())?;
    if n == 0 {
        return Err(CliError::Config("n must be >= 1".into()));
    }
    let mut grid = OracleGrid::spanning(gains, squeezes, alphas, n);
    grid.orders = parse_orders(&params.get_or("p", "0,1,2".to_string())?)?;
    grid.alpha_phase = params.get_or("alpha_phase", base.alpha_phase)?;
    grid.pump_phase = params.get_or("pump_phase", base.pump_phase)?;
    let cfg = OracleConfig::default();
    let dims = params.get_or("dims", cfg.dims)?;
    grid.config = OracleConfig {
        dims,
        max_dims: params.get_or("max_dims", cfg.max_dims.max(dims))?,
        tail_tolerance: params.get_or("tail_tol", cfg.tail_tolerance)?,
        series: su11_core::fock::SeriesOptions {
            tolerance: params.get_or("series_tol", cfg.series.tolerance)?,
            max_terms: params.get_or("max_terms", cfg.series.max_terms)?,
        },
    };
    let report = validate_against_oracle(&grid)?;

    match format {
        Format::Csv => {
            let header = [
                "gain", "squeeze", "alpha", "p", "dims", "quantity", "predicted", "oracle", "rel_err", "tolerance",
                "status",
            ];
            let rows: Vec<Vec<String>> = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        num(e.point.gain),
                        num(e.point.squeeze),
                        num(e.point.alpha),
                        e.point.p.to_string(),
                        e.point.dims.to_string(),
                        e.quantity.to_string(),
                        num(e.predicted),
                        num(e.oracle),
                        num(e.rel_err),
                        num(e.tolerance),
                        format!("{:?}", e.status).to_lowercase(),
                    ]
                })
                .collect();
            write_csv(out, &header, &rows)?;
        }
        Format::Json => write_json(out, "validate", params.resolved(), serde_json::Value::Null, "report", &report)?,
    }
    out.flush()?;

    for s in &report.skipped {
        eprintln!(
            "skipped g={} r={} alpha={} p={}: {}",
            s.gain, s.squeeze, s.alpha, s.p, s.reason
        );
    }
    for s in &report.summary {
        eprintln!(
            "{:<30} checked {:>4}  failed {:>4}  flagged {:>4}  max rel err {:.3e}",
            s.quantity.to_string(),
            s.checked,
            s.failed,
            s.flagged,
            s.max_rel_err
        );
    }
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<String> = report.failing().iter().map(|q| q.to_string()).collect();
        Err(CliError::ValidationFailed(names.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_syntax() {
        let a = parse_axis("g:0:3:151").unwrap();
        assert_eq!((a.param, a.start, a.end, a.count), (Param::Gain, 0.0, 3.0, 151));
        assert!(parse_axis("g:0:3").is_err());
        assert!(parse_axis("q:0:3:5").is_err());
        assert!(parse_axis("eta:0:1:1").is_err());
    }

    #[test]
    fn order_lists() {
        assert_eq!(parse_orders("0, 2").unwrap(), vec![Subtraction::Zero, Subtraction::Two]);
        assert!(parse_orders("3").is_err());
        assert!(parse_orders("x").is_err());
    }

    #[test]
    fn names_round_trip() {
        for r in [Regime::SmallM, Regime::LargeM, Regime::Combined] {
            assert_eq!(parse_regime(regime_name(r)).unwrap(), r);
        }
        for m in [BudgetMode::PreSubtraction, BudgetMode::PostSubtraction] {
            assert_eq!(parse_mode(mode_name(m)).unwrap(), m);
        }
    }
}
