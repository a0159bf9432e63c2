use gldpc::doping::{DopingKind, DopingSidecar};
use gldpc::ensemble::{
    construct_regular, optimize_ensemble, realize_counts, sweep_counts, DeConfig, RegularDesign, SweepOutcome,
};
use gldpc::protograph::{parse_rate, Rate};
use gldpc::seeds::substream;
use gldpc::sim::to_csv;
use gldpc::{
    de_threshold, dope_conventional, dope_partial, lift, pexit, run_bler, typical_dmin_check, BaseMatrix,
    ComponentCode, DecoderMode, DegreeCountVector, DopingSpec, EnsembleDistribution, PexitCode, PexitLimits,
    SimConfig, SparsePcm,
};
use serde_json::json;

use crate::error::CliError;
use crate::files::Io;
use crate::{CheckArgs, ConstructArgs, ConstructMode, Decoder, OptimizeArgs, SimulateArgs, SweepArgs, ThresholdArgs, ThresholdMode};

const DESIGN_TOL: f64 = 1e-4;

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn hamming(m: usize) -> Result<ComponentCode, CliError> {
    if m < 2 {
        return usage(format!("--component {m}: Hamming redundancy must be at least 2"));
    }
    Ok(ComponentCode::hamming(m, true)?)
}

fn rate_arg(s: &str) -> Result<Rate, CliError> {
    parse_rate(s).map_err(|e| CliError::Usage(format!("--rate {s}: {e}")))
}

fn rate_str(r: Rate) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn counts_str(d: &DegreeCountVector) -> String {
    d.entries().iter().map(|(deg, n)| format!("{deg}:{n}")).collect::<Vec<_>>().join(",")
}

fn parse_counts(s: &str) -> Result<DegreeCountVector, CliError> {
    let mut pairs = Vec::new();
    for part in s.split(',') {
        let parsed = part.split_once(':').and_then(|(d, n)| Some((d.trim().parse().ok()?, n.trim().parse().ok()?)));
        match parsed {
            Some(p) => pairs.push(p),
            None => return usage(format!("--counts: {part:?} is not degree:count")),
        }
    }
    Ok(DegreeCountVector::new(pairs)?)
}

/// Reports which of the named flags are set when the mode does not use them.
fn forbid(mode: &str, flags: &[(&str, bool)]) -> Result<(), CliError> {
    let bad: Vec<&str> = flags.iter().filter(|(_, set)| *set).map(|(n, _)| *n).collect();
    if bad.is_empty() {
        Ok(())
    } else {
        usage(format!("{} not used by {mode} mode", bad.join(", ")))
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str, mode: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{mode} mode needs {flag}")))
}

pub fn construct(a: &ConstructArgs, io: &mut Io) -> Result<(), CliError> {
    let comp = hamming(a.component)?;
    let mu = comp.mu();
    if a.n == 0 || !a.n.is_multiple_of(mu) {
        return usage(format!("--N {} is not a positive multiple of the component length {mu}", a.n));
    }
    let lift_seed = substream(a.seed, "lift", 0);
    let rate = rate_arg(a.rate.as_deref().unwrap_or("1/2"))?;
    let nv = a.nv.unwrap_or(400);
    match a.mode {
        ConstructMode::Regular => {
            forbid(
                "regular",
                &[
                    ("--ymax", a.ymax.is_some()),
                    ("--l", a.l.is_some()),
                    ("--r", a.r.is_some()),
                    ("--ensemble", a.ensemble.is_some()),
                    ("--generations", a.generations.is_some()),
                    ("--population", a.population.is_some()),
                    ("--base", a.base.is_some()),
                    ("--check-idx", a.check_idx.is_some()),
                ],
            )?;
            let mut design = RegularDesign::new(a.wr.unwrap_or(2), comp.clone(), nv, rate, a.seed);
            design.y_range = a.y_range;
            design.tol = DESIGN_TOL;
            let outcome = construct_regular(&design)?;
            let best = outcome.best();
            let lifted = lift(&best.base, a.n, mu, lift_seed)?;
            let code = dope_partial(&best.base, &lifted, &DopingSpec::leftmost(best.y, comp))?;
            io.write_code(&code)?;
            let candidates: Vec<_> = outcome
                .candidates
                .iter()
                .map(|c| json!({"y": c.y, "n_c": c.n_c, "epsilon_star": c.threshold.epsilon_star, "attempts": c.attempts}))
                .collect();
            io.write_json(
                "report.json",
                &json!({
                    "mode": "regular",
                    "y": best.y,
                    "rate": rate_str(code.rate()),
                    "threshold": best.threshold,
                    "candidates": candidates,
                }),
            )
        }
        ConstructMode::Irregular => {
            forbid(
                "irregular",
                &[
                    ("--wr", a.wr.is_some()),
                    ("--y-range", a.y_range.is_some()),
                    ("--base", a.base.is_some()),
                    ("--check-idx", a.check_idx.is_some()),
                ],
            )?;
            let ymax = require(a.ymax, "--ymax", "irregular")?;
            let (ensemble, de_report) = match &a.ensemble {
                Some(path) => {
                    forbid(
                        "irregular with --ensemble",
                        &[
                            ("--l", a.l.is_some()),
                            ("--r", a.r.is_some()),
                            ("--generations", a.generations.is_some()),
                            ("--population", a.population.is_some()),
                        ],
                    )?;
                    let e: EnsembleDistribution = io.read_json(path)?;
                    e.validate()?;
                    (e, serde_json::Value::Null)
                }
                None => {
                    let mut cfg = de_config(ymax, a.l.unwrap_or(20), a.r.unwrap_or(9), nv, rate, &comp, a.seed)?;
                    if let Some(g) = a.generations {
                        cfg.generations = g;
                    }
                    if let Some(p) = a.population {
                        cfg.population = p;
                    }
                    let out = optimize_ensemble(&cfg)?;
                    if !out.constraints.satisfied() {
                        return Err(CliError::Infeasible(format!("optimized ensemble violates {:?}", out.constraints)));
                    }
                    let r = json!({"de_threshold": out.threshold, "constraints": out.constraints});
                    (out.ensemble, r)
                }
            };
            let cfg = sweep_config(&ensemble, ymax, nv, rate, &comp, a.seed)?;
            let counts = realize_counts(&ensemble.lambda, nv)?;
            let sweep = sweep_counts(&counts, &cfg)?;
            let best = sweep.best();
            let lifted = lift(&best.base, a.n, mu, lift_seed)?;
            let code = dope_partial(&best.base, &lifted, &DopingSpec::leftmost(best.y, comp))?;
            io.write_code(&code)?;
            io.write_json("ensemble.json", &ensemble)?;
            io.write_json("gc_base.json", &sweep.g_c)?;
            let mut report = sweep_report(&sweep);
            report["mode"] = json!("irregular");
            report["rate"] = json!(rate_str(code.rate()));
            report["optimization"] = de_report;
            io.write_json("report.json", &report)
        }
        ConstructMode::Conventional => {
            forbid(
                "conventional",
                &[
                    ("--rate", a.rate.is_some()),
                    ("--nv", a.nv.is_some()),
                    ("--wr", a.wr.is_some()),
                    ("--y-range", a.y_range.is_some()),
                    ("--ymax", a.ymax.is_some()),
                    ("--l", a.l.is_some()),
                    ("--r", a.r.is_some()),
                    ("--ensemble", a.ensemble.is_some()),
                    ("--generations", a.generations.is_some()),
                    ("--population", a.population.is_some()),
                ],
            )?;
            let Some(base_path) = &a.base else {
                return usage("conventional mode needs --base");
            };
            let idx = require(a.check_idx, "--check-idx", "conventional")?;
            let base: BaseMatrix = io.read_json(base_path)?;
            let lifted = lift(&base, a.n, mu, lift_seed)?;
            let code = dope_conventional(&base, idx, &comp, &lifted)?;
            let t = pexit::threshold(&PexitCode::conventional(&base, &[idx], &comp)?, DESIGN_TOL, &PexitLimits::default())?;
            io.write_code(&code)?;
            io.write_json(
                "report.json",
                &json!({"mode": "conventional", "check_idx": idx, "rate": rate_str(code.rate()), "threshold": t}),
            )
        }
    }
}

fn de_config(
    ymax: usize,
    l: usize,
    r: usize,
    nv: usize,
    rate: Rate,
    comp: &ComponentCode,
    seed: u64,
) -> Result<DeConfig, CliError> {
    if l <= 6 || r < 3 {
        return usage(format!("need --l > 6 and --r >= 3, got {l} and {r}"));
    }
    Ok(DeConfig::new(ymax, l, r, nv, rate, comp.clone(), seed))
}

/// Sweep settings for an externally supplied ensemble; only the design
/// size, component and seed matter there.
fn sweep_config(
    e: &EnsembleDistribution,
    ymax: usize,
    nv: usize,
    rate: Rate,
    comp: &ComponentCode,
    seed: u64,
) -> Result<DeConfig, CliError> {
    let l = e.lambda.keys().max().copied().unwrap_or(7).max(7);
    let r = e.rho.keys().max().copied().unwrap_or(3).max(3);
    de_config(ymax, l, r, nv, rate, comp, seed)
}

fn sweep_report(s: &SweepOutcome) -> serde_json::Value {
    let points: Vec<_> = s
        .points
        .iter()
        .map(|p| {
            json!({
                "y": p.y,
                "n_c": p.n_c,
                "counts": counts_str(&p.counts),
                "epsilon_star": p.threshold.epsilon_star,
                "attempts": p.attempts,
            })
        })
        .collect();
    json!({
        "counts_c": counts_str(&s.counts_c),
        "g_c_threshold": s.g_c_threshold,
        "y_opt": s.y_opt,
        "threshold": s.best().threshold,
        "points": points,
    })
}

pub fn check(a: &CheckArgs, io: &mut Io) -> Result<(), CliError> {
    let code = io.read_code(&a.pcm, &a.sidecar)?;
    let pcm = code.pcm().pcm();
    let alist_ok = SparsePcm::from_alist(&pcm.to_alist()).is_ok_and(|p| &p == pcm);
    let bytes_ok = SparsePcm::from_bytes(&pcm.to_bytes()).is_ok_and(|p| &p == pcm);
    let sidecar_ok = serde_json::to_string(&code.sidecar())
        .ok()
        .and_then(|s| serde_json::from_str::<DopingSidecar>(&s).ok())
        .is_some_and(|s| s == code.sidecar());
    let dmin = match code.kind() {
        DopingKind::Partial { doped_cols } => Some(typical_dmin_check(code.base(), doped_cols)),
        DopingKind::Conventional { .. } => None,
    };
    let ok = alist_ok && bytes_ok && sidecar_ok && dmin.as_ref().is_none_or(|d| d.ok);
    io.write_json(
        "check.json",
        &json!({
            "rows": pcm.rows(),
            "cols": pcm.cols(),
            "nnz": pcm.nnz(),
            "lifting": code.lifting(),
            "rate": rate_str(code.rate()),
            "gc_blocks": code.gc_blocks().len(),
            "four_cycles": pcm.four_cycles(),
            "alist_roundtrip": alist_ok,
            "binary_roundtrip": bytes_ok,
            "sidecar_roundtrip": sidecar_ok,
            "typical_dmin": dmin,
            "ok": ok,
        }),
    )?;
    if ok {
        Ok(())
    } else {
        Err(CliError::Infeasible("code failed one or more checks, see check.json".into()))
    }
}

pub fn threshold(a: &ThresholdArgs, io: &mut Io) -> Result<(), CliError> {
    if !(a.tol > 0.0 && a.tol < 0.5) {
        return usage(format!("--tol {} must lie in (0, 0.5)", a.tol));
    }
    if a.max_iters == 0 {
        return usage("--max-iters must be positive");
    }
    let limits = PexitLimits {
        max_iters: a.max_iters,
        ..PexitLimits::default()
    };
    let (mode, result) = if let Some(path) = &a.ensemble {
        if !matches!(a.mode, None | Some(ThresholdMode::De)) {
            return usage("--ensemble only supports --mode de");
        }
        let e: EnsembleDistribution = io.read_json(path)?;
        e.validate()?;
        let eps = de_threshold(&e, a.tol)?;
        (ThresholdMode::De, json!({"epsilon_star": eps}))
    } else if let Some(path) = &a.sidecar {
        let side: DopingSidecar = io.read_json(path)?;
        let default = match side.kind {
            DopingKind::Partial { .. } => ThresholdMode::Pd,
            DopingKind::Conventional { .. } => ThresholdMode::Conventional,
        };
        let mode = a.mode.unwrap_or(default);
        let code = match (mode, &side.kind) {
            (ThresholdMode::Ldpc, _) => PexitCode::ldpc(&side.base),
            (ThresholdMode::Pd, DopingKind::Partial { doped_cols }) => {
                PexitCode::pd(&side.base, doped_cols, &side.component)?
            }
            (ThresholdMode::Conventional, DopingKind::Conventional { check_idx }) => {
                PexitCode::conventional(&side.base, &[*check_idx], &side.component)?
            }
            _ => return usage(format!("--mode {mode:?} does not match the doping kind of the sidecar")),
        };
        (mode, serde_json::to_value(pexit::threshold(&code, a.tol, &limits)?).unwrap_or_default())
    } else if let Some(path) = &a.base {
        if !matches!(a.mode, None | Some(ThresholdMode::Ldpc)) {
            return usage("a plain base matrix only supports --mode ldpc; pass --sidecar for doped codes");
        }
        let base: BaseMatrix = io.read_json(path)?;
        let t = pexit::threshold(&PexitCode::ldpc(&base), a.tol, &limits)?;
        (ThresholdMode::Ldpc, serde_json::to_value(t).unwrap_or_default())
    } else {
        return usage("threshold needs --sidecar, --base or --ensemble");
    };
    io.write_json("threshold.json", &json!({"mode": mode, "tol": a.tol, "threshold": result}))
}

pub fn optimize(a: &OptimizeArgs, io: &mut Io) -> Result<(), CliError> {
    let comp = hamming(a.component)?;
    let mut cfg = de_config(a.ymax, a.l, a.r, a.nv, rate_arg(&a.rate)?, &comp, a.seed)?;
    cfg.generations = a.generations;
    cfg.population = a.population;
    let out = optimize_ensemble(&cfg)?;
    io.write_json("ensemble.json", &out.ensemble)?;
    io.write_json(
        "report.json",
        &json!({
            "de_threshold": out.threshold,
            "constraints": out.constraints,
            "satisfied": out.constraints.satisfied(),
            "history": out.history,
        }),
    )?;
    if out.constraints.satisfied() {
        Ok(())
    } else {
        Err(CliError::Infeasible(format!("best ensemble violates {:?}", out.constraints)))
    }
}

/// Parses `a,b,c` or the inclusive range `start:stop:step`.
pub fn parse_eps(s: &str) -> Result<Vec<f64>, CliError> {
    let num = |t: &str| -> Result<f64, CliError> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Usage(format!("--eps: {t:?} is not a number")))
    };
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, c] = parts.as_slice() else {
            return usage("--eps range must be start:stop:step");
        };
        let (a, b, c) = (num(a)?, num(b)?, num(c)?);
        if !(c > 0.0) || b < a {
            return usage("--eps range needs step > 0 and stop >= start");
        }
        let count = ((b - a) / c + 1e-9).floor() as usize + 1;
        (0..count).map(|k| ((a + k as f64 * c) * 1e12).round() / 1e12).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if let Some(bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return usage(format!("--eps value {bad} outside [0, 1]"));
    }
    Ok(values)
}

pub fn simulate(a: &SimulateArgs, workers: usize, io: &mut Io) -> Result<(), CliError> {
    let eps = parse_eps(&a.eps)?;
    if a.target_errors == 0 || a.max_blocks == 0 || a.max_iters == 0 {
        return usage("--target-errors, --max-blocks and --max-iters must be positive");
    }
    let code = io.read_code(&a.pcm, &a.sidecar)?;
    let mode = match a.decoder {
        Decoder::Gldpc => DecoderMode::Gldpc,
        Decoder::Peeling => DecoderMode::Peeling,
    };
    let mut results = Vec::with_capacity(eps.len());
    for &e in &eps {
        let cfg = SimConfig {
            epsilon: e,
            max_blocks: a.max_blocks,
            target_errors: a.target_errors,
            max_decoder_iters: a.max_iters,
            rng_seed: substream(a.seed, "sim", e.to_bits()),
            workers,
            mode,
        };
        let r = run_bler(&code, &cfg)?;
        log::info!("eps {e}: {} errors in {} blocks", r.block_errors, r.blocks_run);
        results.push(r);
    }
    let csv = to_csv(&results);
    print!("{csv}");
    io.write("bler.csv", csv.as_bytes())?;
    io.write_json("bler.json", &results)
}

pub fn sweep(a: &SweepArgs, io: &mut Io) -> Result<(), CliError> {
    let comp = hamming(a.component)?;
    let rate = rate_arg(&a.rate)?;
    let (counts, cfg) = match (&a.ensemble, &a.counts) {
        (Some(path), _) => {
            let e: EnsembleDistribution = io.read_json(path)?;
            e.validate()?;
            (realize_counts(&e.lambda, a.nv)?, sweep_config(&e, a.ymax, a.nv, rate, &comp, a.seed)?)
        }
        (None, Some(s)) => {
            let counts = parse_counts(s)?;
            if counts.total() != a.nv {
                return usage(format!("--counts cover {} nodes, --nv is {}", counts.total(), a.nv));
            }
            let l = counts.max_degree().max(7);
            (counts, de_config(a.ymax, l, 9, a.nv, rate, &comp, a.seed)?)
        }
        (None, None) => return usage("sweep needs --ensemble or --counts"),
    };
    let s = sweep_counts(&counts, &cfg)?;
    io.write_json("sweep.json", &sweep_report(&s))?;
    io.write_json("gc_base.json", &s.g_c)?;
    io.write_json("base.json", &s.best().base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_range_is_inclusive_and_clean() {
        let v = parse_eps("0.38:0.45:0.01").unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!(v[1], 0.39);
        assert_eq!(*v.last().unwrap(), 0.45);
        assert_eq!(parse_eps("0.1, 0.2").unwrap(), vec![0.1, 0.2]);
    }

    #[test]
    fn eps_outside_unit_interval_is_usage() {
        for bad in ["1.2", "-0.1", "0.1:1.1:0.5", "x", "0.5:0.4:0.1", "0.1:0.2:0"] {
            assert_eq!(parse_eps(bad).unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn counts_parse() {
        let c = parse_counts("2:3,3:1").unwrap();
        assert_eq!(counts_str(&c), "2:3,3:1");
        assert!(parse_counts("2-3").is_err());
    }
}
