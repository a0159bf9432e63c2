//! Design pipelines: regular protographs doped in bulks, and irregular
//! ensembles optimized by differential evolution, realized as protographs
//! and swept over the number of doped bulks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::component::ComponentCode;
use crate::doping::{degree_transform_inverse, necessary_doping_bound, typical_dmin_check};
use crate::error::{Error, Result};
use crate::peg::{peg_build, PegConfig};
use crate::pexit::{de_threshold, threshold, PexitCode, PexitLimits, ThresholdResult};
use crate::protograph::{rate_to_f64, BaseMatrix, DegreeCountVector, EnsembleDistribution, Rate};
use crate::seeds::substream;

/// Number of checks of the undoped design, `n_v (1 - R)`, which must be an
/// integer.
pub fn base_checks(n_v: usize, rate: Rate) -> Result<usize> {
    let n_c = (Rate::new(1, 1) - rate) * Rate::new(n_v as i64, 1);
    if !n_c.is_integer() || *n_c.numer() <= 0 || rate <= Rate::new(0, 1) {
        return Err(Error::InvalidArgument(format!("n_v = {n_v} and rate {rate} give {n_c} checks")));
    }
    Ok(*n_c.numer() as usize)
}

/// PEG column order that places undoped degree-2 columns first. Their
/// edges then always land in distinct components, so they form a forest
/// whenever there are fewer of them than checks.
fn undoped_first(degrees: &[usize], doped: &[bool]) -> Vec<usize> {
    let n = degrees.len();
    let mut order: Vec<usize> = (0..n).filter(|&j| degrees[j] == 2 && !doped[j]).collect();
    order.extend((0..n).filter(|&j| degrees[j] == 2 && doped[j]));
    let mut rest: Vec<usize> = (0..n).filter(|&j| degrees[j] != 2).collect();
    rest.sort_by_key(|&j| degrees[j]);
    order.extend(rest);
    order
}

/// Builds a protograph with the given column degrees whose leftmost
/// `doped` columns are degree-2 and doped, retrying until the undoped
/// degree-2 columns are cycle free.
fn build_doped_protograph(
    n_c: usize,
    counts: &DegreeCountVector,
    n_doped: usize,
    seed: u64,
    max_retries: usize,
) -> Result<(BaseMatrix, usize)> {
    let n_v = counts.total();
    let degrees = counts.column_assignment();
    if degrees.iter().take(n_doped).any(|&d| d != 2) {
        return Err(Error::Infeasible(format!("fewer than {n_doped} degree-2 columns to dope")));
    }
    let doped: Vec<bool> = (0..n_v).map(|j| j < n_doped).collect();
    let order = undoped_first(&degrees, &doped);
    let doped_cols: Vec<usize> = (0..n_doped).collect();
    for attempt in 0..max_retries.max(1) {
        let cfg = PegConfig::new(n_c, n_v, counts.clone(), substream(seed, "peg", attempt as u64))
            .with_order(order.clone());
        let base = peg_build(&cfg)?;
        if typical_dmin_check(&base, &doped_cols).ok {
            return Ok((base, attempt + 1));
        }
    }
    Err(Error::Infeasible(format!(
        "undoped degree-2 columns still form a cycle after {max_retries} attempts"
    )))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularDesign {
    pub w_r: usize,
    pub code: ComponentCode,
    pub n_v: usize,
    pub rate: Rate,
    /// Inclusive `(lo, hi)`; defaults to the doping bound up to `n_v / mu`.
    pub y_range: Option<(usize, usize)>,
    pub seed: u64,
    pub max_retries: usize,
    pub tol: f64,
}

impl RegularDesign {
    pub fn new(w_r: usize, code: ComponentCode, n_v: usize, rate: Rate, seed: u64) -> Self {
        RegularDesign {
            w_r,
            code,
            n_v,
            rate,
            y_range: None,
            seed,
            max_retries: 16,
            tol: 1e-4,
        }
    }

    /// Checks of the doped protograph, `n_v (1 - R) - (mu - kappa) y`.
    pub fn n_c(&self, y: usize) -> Result<usize> {
        let n_c0 = base_checks(self.n_v, self.rate)?;
        n_c0.checked_sub(self.code.redundancy() * y)
            .filter(|&n| n >= 2)
            .ok_or_else(|| Error::Infeasible(format!("y = {y} leaves no checks")))
    }

    pub fn resolved_range(&self) -> Result<(usize, usize)> {
        let (mu, kappa) = (self.code.mu(), self.code.kappa());
        let n_c0 = base_checks(self.n_v, self.rate)?;
        let (mut lo, mut hi) = match self.y_range {
            Some(r) => r,
            None => (necessary_doping_bound(self.n_v, n_c0, mu, kappa)?, self.n_v / mu),
        };
        lo = lo.max(if self.w_r == 2 { 1 } else { 0 });
        hi = hi.min(self.n_v / mu);
        while hi >= lo && self.n_c(hi).map_or(true, |n| self.w_r * self.n_v < 2 * n) {
            if hi == 0 {
                break;
            }
            hi -= 1;
        }
        if lo > hi || self.n_c(hi).is_err() {
            return Err(Error::Infeasible(format!(
                "no feasible y for rate {} with ({mu},{kappa}) components",
                self.rate
            )));
        }
        Ok((lo, hi))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularCandidate {
    pub y: usize,
    pub n_c: usize,
    pub base: BaseMatrix,
    pub threshold: ThresholdResult,
    pub attempts: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularOutcome {
    pub y_best: usize,
    pub candidates: Vec<RegularCandidate>,
}

impl RegularOutcome {
    pub fn best(&self) -> &RegularCandidate {
        self.candidates.iter().find(|c| c.y == self.y_best).expect("best y is a candidate")
    }
}

/// For each `y` builds a `w_r`-regular protograph with `n_c(y)` checks,
/// dopes its leftmost `y mu` columns and keeps the `y` with the highest
/// PD threshold.
pub fn construct_regular(d: &RegularDesign) -> Result<RegularOutcome> {
    let (lo, hi) = d.resolved_range()?;
    let mu = d.code.mu();
    let limits = PexitLimits::default();
    let results: Vec<Result<RegularCandidate>> = (lo..=hi)
        .into_par_iter()
        .map(|y| {
            let n_c = d.n_c(y)?;
            let counts = DegreeCountVector::new([(d.w_r, d.n_v)])?;
            let (base, attempts) =
                build_doped_protograph(n_c, &counts, y * mu, substream(d.seed, "regular", y as u64), d.max_retries)?;
            let doped: Vec<usize> = (0..y * mu).collect();
            let pexit = PexitCode::pd(&base, &doped, &d.code)?;
            let t = threshold(&pexit, d.tol, &limits)?;
            Ok(RegularCandidate {
                y,
                n_c,
                base,
                threshold: t,
                attempts,
            })
        })
        .collect();
    let mut candidates = Vec::new();
    let mut first_err = None;
    for r in results {
        match r {
            Ok(c) => candidates.push(c),
            Err(e) => {
                log::warn!("regular design candidate dropped: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    let best = candidates
        .iter()
        .max_by(|a, b| {
            a.threshold
                .epsilon_star
                .total_cmp(&b.threshold.epsilon_star)
                .then(b.y.cmp(&a.y))
        })
        .map(|c| c.y);
    match best {
        Some(y_best) => Ok(RegularOutcome { y_best, candidates }),
        None => Err(first_err.unwrap_or_else(|| Error::Infeasible("empty y range".into()))),
    }
}

/// Integer degree counts from an edge-perspective distribution: node
/// fractions are floored and the shortfall is handed out one node at a
/// time starting from the lowest degree.
pub fn realize_counts(lambda: &BTreeMap<usize, f64>, n_v: usize) -> Result<DegreeCountVector> {
    let total: f64 = lambda.values().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidEnsemble("empty lambda".into()));
    }
    let sigma: f64 = lambda.iter().map(|(&d, &v)| v / total / d as f64).sum();
    let mut counts: Vec<(usize, usize)> = lambda
        .iter()
        .map(|(&d, &v)| (d, (n_v as f64 * (v / total / d as f64) / sigma + 1e-9).floor() as usize))
        .collect();
    let mut have: usize = counts.iter().map(|c| c.1).sum();
    let (mut k, len) = (0, counts.len());
    while have < n_v {
        counts[k % len].1 += 1;
        have += 1;
        k += 1;
    }
    DegreeCountVector::new(counts)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeConfig {
    pub population: usize,
    pub f: f64,
    pub cr: f64,
    pub generations: usize,
    pub rng_seed: u64,
    pub y_max: usize,
    /// Largest variable degree; the support is `{2, ..., 6, l}`.
    pub l: usize,
    /// Largest check degree; the support is `{r - 1, r}`.
    pub r: usize,
    pub n_v: usize,
    pub rate: Rate,
    pub code: ComponentCode,
    /// Bisection tolerance of the fitness evaluation.
    pub tol: f64,
    pub max_retries: usize,
}

impl DeConfig {
    pub fn new(y_max: usize, l: usize, r: usize, n_v: usize, rate: Rate, code: ComponentCode, rng_seed: u64) -> Self {
        DeConfig {
            population: 50,
            f: 0.5,
            cr: 0.9,
            generations: 300,
            rng_seed,
            y_max,
            l,
            r,
            n_v,
            rate,
            code,
            tol: 1e-5,
            max_retries: 16,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::InvalidArgument("population must be at least 4".into()));
        }
        if !(self.f > 0.0 && self.f <= 2.0) || !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidArgument("F must be in (0, 2] and CR in [0, 1]".into()));
        }
        if self.l <= 6 || self.r < 3 {
            return Err(Error::InvalidArgument("need l > 6 and r >= 3".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        base_checks(self.n_v, self.rate)?;
        Ok(())
    }

    fn degrees(&self) -> [usize; 6] {
        [2, 3, 4, 5, 6, self.l]
    }

    /// Upper bound on `lambda_2` for a given `Sigma = int lambda`.
    pub fn lambda2_max(&self, sigma: f64) -> f64 {
        let n_c = base_checks(self.n_v, self.rate).unwrap_or(0) as f64;
        let cap = n_c - 1.0 - (self.y_max * self.code.redundancy()) as f64;
        2.0 * sigma * cap / self.n_v as f64
    }

    /// Lower bounds `(degree, bound)` keeping enough higher-degree nodes to
    /// undo `y_max` bulks.
    pub fn lambda_min(&self, sigma: f64) -> Vec<(usize, f64)> {
        self.code
            .column_weight_histogram()
            .into_iter()
            .map(|(w, n_w)| {
                let d = 2 + w;
                (d, d as f64 * n_w as f64 * sigma * self.y_max as f64 / self.n_v as f64)
            })
            .collect()
    }
}

/// Constraint residuals of an ensemble under a [`DeConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub rate_error: f64,
    pub lambda2_excess: f64,
    pub existence_deficit: f64,
}

impl ConstraintReport {
    pub fn satisfied(&self) -> bool {
        self.rate_error <= 1e-9 && self.lambda2_excess <= 1e-12 && self.existence_deficit <= 1e-12
    }
}

pub fn check_constraints(e: &EnsembleDistribution, cfg: &DeConfig) -> ConstraintReport {
    let sigma = e.lambda_integral();
    let lambda2_excess = (e.lambda_at_degree(2) - cfg.lambda2_max(sigma)).max(0.0);
    let existence_deficit = cfg
        .lambda_min(sigma)
        .into_iter()
        .map(|(d, lb)| (lb - e.lambda_at_degree(d)).max(0.0))
        .sum();
    ConstraintReport {
        rate_error: (e.rate() - rate_to_f64(cfg.rate)).abs(),
        lambda2_excess,
        existence_deficit,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeOutcome {
    pub ensemble: EnsembleDistribution,
    pub threshold: f64,
    /// Best fitness after each generation.
    pub history: Vec<f64>,
    pub constraints: ConstraintReport,
}

struct Candidate {
    genes: [f64; 6],
    fitness: f64,
    ensemble: Option<EnsembleDistribution>,
}

/// Clips, normalizes and projects the six lambda coefficients onto the
/// constraint set; the check side follows from the rate. Returns the
/// repaired genes, the ensemble when the rate is attainable and the
/// residual violation.
fn repair(genes: &[f64; 6], cfg: &DeConfig) -> ([f64; 6], Option<EnsembleDistribution>, f64) {
    let degs = cfg.degrees();
    let mut g = genes.map(|v| if v.is_finite() { v.clamp(0.0, 1.0) } else { 0.0 });
    let normalize = |g: &mut [f64; 6]| {
        let s: f64 = g.iter().sum();
        if s <= 0.0 {
            *g = [1.0 / 6.0; 6];
        } else {
            g.iter_mut().for_each(|v| *v /= s);
        }
    };
    normalize(&mut g);
    let bounds: Vec<(usize, f64)> = cfg
        .lambda_min(1.0)
        .into_iter()
        .filter_map(|(d, per_sigma)| degs.iter().position(|&x| x == d).map(|k| (k, per_sigma)))
        .collect();
    for _ in 0..50 {
        let sigma: f64 = g.iter().zip(degs).map(|(v, d)| v / d as f64).sum();
        let mut pinned = [false; 6];
        for &(k, per_sigma) in &bounds {
            let lb = per_sigma * sigma;
            if g[k] < lb {
                g[k] = lb;
                pinned[k] = true;
            }
        }
        let ub = cfg.lambda2_max(sigma).max(0.0);
        if g[0] > ub {
            g[0] = ub;
            pinned[0] = true;
        }
        let fixed: f64 = (0..6).filter(|&k| pinned[k]).map(|k| g[k]).sum();
        let free: f64 = (0..6).filter(|&k| !pinned[k]).map(|k| g[k]).sum();
        if free > 0.0 && fixed < 1.0 {
            let scale = (1.0 - fixed) / free;
            (0..6).filter(|&k| !pinned[k]).for_each(|k| g[k] *= scale);
        } else {
            normalize(&mut g);
        }
        if !pinned.iter().any(|&p| p) {
            break;
        }
    }
    normalize(&mut g);
    let sigma: f64 = g.iter().zip(degs).map(|(v, d)| v / d as f64).sum();
    let one_minus_r = 1.0 - rate_to_f64(cfg.rate);
    let r = cfg.r as f64;
    // rho_{r-1} / (r-1) + rho_r / r = (1 - R) Sigma with rho_{r-1} + rho_r = 1
    let rho_lo = ((one_minus_r * sigma) - 1.0 / r) * r * (r - 1.0);
    let rate_violation = (-rho_lo).max(rho_lo - 1.0).max(0.0);
    let lambda = degs.iter().copied().zip(g.iter().copied()).filter(|&(_, v)| v > 0.0);
    let rho_lo = rho_lo.clamp(0.0, 1.0);
    let ens = EnsembleDistribution::new(lambda, [(cfg.r - 1, rho_lo), (cfg.r, 1.0 - rho_lo)]
        .into_iter()
        .filter(|&(_, v)| v > 0.0))
    .ok();
    let violation = match &ens {
        Some(e) => {
            let c = check_constraints(e, cfg);
            rate_violation + c.lambda2_excess + c.existence_deficit
        }
        None => rate_violation + 1.0,
    };
    (g, ens, violation)
}

fn evaluate(genes: &[f64; 6], cfg: &DeConfig) -> Result<Candidate> {
    let (genes, ens, violation) = repair(genes, cfg);
    let fitness = match (&ens, violation > 1e-12) {
        (Some(e), false) => de_threshold(e, cfg.tol)?,
        _ => -violation,
    };
    Ok(Candidate {
        genes,
        fitness,
        ensemble: if violation > 1e-12 { None } else { ens },
    })
}

/// Maximizes the density-evolution threshold over `lambda` supported on
/// `{2,...,6,l}` and `rho` on `{r-1, r}` subject to the rate, the
/// `lambda_2` cap and the lower bounds that keep every `y <= y_max`
/// realizable. Strategy rand/1/bin.
pub fn optimize_ensemble(cfg: &DeConfig) -> Result<DeOutcome> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(substream(cfg.rng_seed, "de", 0));
    let np = cfg.population;
    let mut pop: Vec<Candidate> = Vec::with_capacity(np);
    let mut tries = 0;
    while pop.len() < np {
        let batch: Vec<[f64; 6]> = (0..np - pop.len())
            .map(|_| std::array::from_fn(|_| rng.gen::<f64>()))
            .collect();
        let evaluated = batch.par_iter().map(|g| evaluate(g, cfg)).collect::<Result<Vec<_>>>()?;
        pop.extend(evaluated.into_iter().filter(|c| c.ensemble.is_some()));
        tries += 1;
        if tries > cfg.max_retries * 64 {
            return Err(Error::Infeasible("no feasible ensemble found during initialization".into()));
        }
    }
    let mut history = Vec::with_capacity(cfg.generations);
    for _ in 0..cfg.generations {
        let trials: Vec<[f64; 6]> = (0..np)
            .map(|i| {
                let mut pick = || loop {
                    let k = rng.gen_range(0..np);
                    if k != i {
                        break k;
                    }
                };
                let a = pick();
                let b = loop {
                    let k = pick();
                    if k != a {
                        break k;
                    }
                };
                let c = loop {
                    let k = pick();
                    if k != a && k != b {
                        break k;
                    }
                };
                let jrand = rng.gen_range(0..6);
                std::array::from_fn(|k| {
                    if k == jrand || rng.gen::<f64>() < cfg.cr {
                        pop[a].genes[k] + cfg.f * (pop[b].genes[k] - pop[c].genes[k])
                    } else {
                        pop[i].genes[k]
                    }
                })
            })
            .collect();
        let evaluated = trials.par_iter().map(|g| evaluate(g, cfg)).collect::<Result<Vec<_>>>()?;
        for (slot, trial) in pop.iter_mut().zip(evaluated) {
            if trial.fitness >= slot.fitness {
                *slot = trial;
            }
        }
        history.push(pop.iter().map(|c| c.fitness).fold(f64::NEG_INFINITY, f64::max));
    }
    let best = pop
        .into_iter()
        .filter(|c| c.ensemble.is_some())
        .max_by(|a, b| a.fitness.total_cmp(&b.fitness))
        .ok_or_else(|| Error::Infeasible("population lost every feasible member".into()))?;
    let ensemble = best.ensemble.expect("filtered on feasibility");
    let constraints = check_constraints(&ensemble, cfg);
    Ok(DeOutcome {
        ensemble,
        threshold: best.fitness,
        history,
        constraints,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepPoint {
    pub y: usize,
    pub n_c: usize,
    pub counts: DegreeCountVector,
    pub base: BaseMatrix,
    pub threshold: ThresholdResult,
    pub attempts: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub counts_c: DegreeCountVector,
    pub g_c: BaseMatrix,
    pub g_c_threshold: ThresholdResult,
    pub points: Vec<SweepPoint>,
    pub y_opt: usize,
}

impl SweepOutcome {
    pub fn best(&self) -> &SweepPoint {
        self.points.iter().find(|p| p.y == self.y_opt).expect("y_opt is a sweep point")
    }
}

/// Realizes `e` as the `G_c` protograph, then for every `y <= y_max`
/// builds the matching `G_p` and evaluates its PD threshold.
pub fn realize_and_sweep(e: &EnsembleDistribution, cfg: &DeConfig) -> Result<SweepOutcome> {
    let counts = realize_counts(&e.lambda, cfg.n_v)?;
    sweep_counts(&counts, cfg)
}

/// [`realize_and_sweep`] starting from integer `G_c` counts.
pub fn sweep_counts(counts_c: &DegreeCountVector, cfg: &DeConfig) -> Result<SweepOutcome> {
    let n_c = base_checks(cfg.n_v, cfg.rate)?;
    if counts_c.total() != cfg.n_v {
        return Err(Error::InvalidDegrees(format!("counts cover {} of {} nodes", counts_c.total(), cfg.n_v)));
    }
    let mu = cfg.code.mu();
    let limits = PexitLimits::default();
    let tol = 1e-4;
    let g_c = build_doped_protograph(n_c, counts_c, 0, substream(cfg.rng_seed, "gc", 0), cfg.max_retries)
        .map(|(b, _)| b)
        .or_else(|_| peg_build(&PegConfig::new(n_c, cfg.n_v, counts_c.clone(), substream(cfg.rng_seed, "gc", 1))))?;
    let g_c_threshold = threshold(&PexitCode::ldpc(&g_c), tol, &limits)?;
    let points: Vec<Result<Option<SweepPoint>>> = (1..=cfg.y_max)
        .into_par_iter()
        .map(|y| {
            let Ok(counts) = degree_transform_inverse(counts_c, &cfg.code, y) else {
                return Ok(None);
            };
            let Some(n_c_y) = n_c.checked_sub(cfg.code.redundancy() * y).filter(|&n| n >= 2) else {
                return Ok(None);
            };
            let built = build_doped_protograph(
                n_c_y,
                &counts,
                y * mu,
                substream(cfg.rng_seed, "gp", y as u64),
                cfg.max_retries,
            );
            let (base, attempts) = match built {
                Ok(b) => b,
                Err(Error::Infeasible(msg)) | Err(Error::InvalidDegrees(msg)) => {
                    log::warn!("y = {y} skipped: {msg}");
                    return Ok(None);
                }
                Err(e) => return Err(e),
            };
            let doped: Vec<usize> = (0..y * mu).collect();
            let t = threshold(&PexitCode::pd(&base, &doped, &cfg.code)?, tol, &limits)?;
            Ok(Some(SweepPoint {
                y,
                n_c: n_c_y,
                counts,
                base,
                threshold: t,
                attempts,
            }))
        })
        .collect();
    let points: Vec<SweepPoint> = points.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect();
    let y_opt = points
        .iter()
        .max_by(|a, b| a.threshold.epsilon_star.total_cmp(&b.threshold.epsilon_star).then(b.y.cmp(&a.y)))
        .map(|p| p.y)
        .ok_or_else(|| Error::Infeasible("no y in 1..=y_max is realizable".into()))?;
    Ok(SweepOutcome {
        counts_c: counts_c.clone(),
        g_c,
        g_c_threshold,
        points,
        y_opt,
    })
}
