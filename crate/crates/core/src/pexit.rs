//! Protograph EXIT analysis on the BEC, for plain LDPC protographs,
//! conventional GLDPC protographs and the partially doped variant whose
//! generalized checks hang off single variable nodes as virtual nodes.

use serde::{Deserialize, Serialize};

use crate::component::{ComponentCode, ExitTable};
use crate::error::{Error, Result};
use crate::protograph::{BaseMatrix, EnsembleDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PexitMode {
    Ldpc,
    Conventional,
    Pd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PexitLimits {
    pub delta_conv: f64,
    pub max_iters: usize,
}

impl Default for PexitLimits {
    fn default() -> Self {
        PexitLimits {
            delta_conv: 1e-9,
            max_iters: 10_000,
        }
    }
}

/// A protograph with its doping metadata, flattened for message passing.
/// Parallel edges are expanded into independent edges.
#[derive(Debug, Clone)]
pub struct PexitCode {
    mode: PexitMode,
    n_v: usize,
    n_c: usize,
    /// (check, variable) per edge, grouped by check
    edge_check: Vec<usize>,
    edge_var: Vec<usize>,
    check_edges: Vec<Vec<usize>>,
    var_edges: Vec<Vec<usize>>,
    gc_check: Vec<bool>,
    virtual_gc: Vec<bool>,
    exit: Option<ExitTable>,
}

impl PexitCode {
    pub fn ldpc(base: &BaseMatrix) -> Self {
        Self::build(base, PexitMode::Ldpc, &[], &[], None)
    }

    /// Partial doping: every column in `doped_cols` gets a virtual GC node.
    pub fn pd(base: &BaseMatrix, doped_cols: &[usize], code: &ComponentCode) -> Result<Self> {
        if let Some(&j) = doped_cols.iter().find(|&&j| j >= base.n_v()) {
            return Err(Error::InvalidDoping(format!("column {j} out of range")));
        }
        Ok(Self::build(base, PexitMode::Pd, doped_cols, &[], Some(ExitTable::new(code))))
    }

    /// Conventional doping: the listed checks become GC nodes. Each must have
    /// degree equal to the component length.
    pub fn conventional(base: &BaseMatrix, checks: &[usize], code: &ComponentCode) -> Result<Self> {
        for &i in checks {
            if i >= base.n_c() || base.row_degree(i) != code.mu() {
                return Err(Error::InvalidDoping(format!(
                    "check {i} cannot host a length-{} component",
                    code.mu()
                )));
            }
        }
        Ok(Self::build(base, PexitMode::Conventional, &[], checks, Some(ExitTable::new(code))))
    }

    fn build(
        base: &BaseMatrix,
        mode: PexitMode,
        doped_cols: &[usize],
        gc_checks: &[usize],
        exit: Option<ExitTable>,
    ) -> Self {
        let (n_c, n_v) = (base.n_c(), base.n_v());
        let mut code = PexitCode {
            mode,
            n_v,
            n_c,
            edge_check: Vec::new(),
            edge_var: Vec::new(),
            check_edges: vec![Vec::new(); n_c],
            var_edges: vec![Vec::new(); n_v],
            gc_check: vec![false; n_c],
            virtual_gc: vec![false; n_v],
            exit,
        };
        for i in 0..n_c {
            for (j, b) in base.row_neighbors(i) {
                for _ in 0..b {
                    let e = code.edge_check.len();
                    code.edge_check.push(i);
                    code.edge_var.push(j);
                    code.check_edges[i].push(e);
                    code.var_edges[j].push(e);
                }
            }
        }
        for &i in gc_checks {
            code.gc_check[i] = true;
        }
        for &j in doped_cols {
            code.virtual_gc[j] = true;
        }
        code
    }

    pub fn mode(&self) -> PexitMode {
        self.mode
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn edges(&self) -> usize {
        self.edge_var.len()
    }
}

/// Message state of one PEXIT run at a fixed erasure probability.
#[derive(Debug, Clone)]
pub struct PexitState<'a> {
    code: &'a PexitCode,
    eps: f64,
    /// variable-to-check, per edge
    pub i_ev: Vec<f64>,
    /// check-to-variable, per edge
    pub i_ec: Vec<f64>,
    /// virtual GC to variable, per variable node (zero when not doped)
    pub i_egc_virtual: Vec<f64>,
    pub i_app: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a> PexitState<'a> {
    pub fn new(code: &'a PexitCode, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidArgument(format!("epsilon {eps} outside [0, 1]")));
        }
        let e = code.edges();
        Ok(PexitState {
            code,
            eps,
            i_ev: vec![0.0; e],
            i_ec: vec![0.0; e],
            i_egc_virtual: vec![0.0; code.n_v],
            i_app: vec![0.0; code.n_v],
            scratch: Vec::new(),
        })
    }

    /// One round of variable, check and APP updates. Returns the largest
    /// change of any message.
    pub fn step(&mut self) -> Result<f64> {
        let code = self.code;
        let eps = self.eps;
        let mut delta: f64 = 0.0;

        // variable to check; the virtual node is one more neighbor
        for j in 0..code.n_v {
            let edges = &code.var_edges[j];
            let extra = if code.virtual_gc[j] { 1.0 - self.i_egc_virtual[j] } else { 1.0 };
            leave_one_out(edges.iter().map(|&e| 1.0 - self.i_ec[e]), &mut self.scratch);
            for (k, &e) in edges.iter().enumerate() {
                let v = 1.0 - eps * self.scratch[k] * extra;
                delta = delta.max((v - self.i_ev[e]).abs());
                self.i_ev[e] = v;
            }
        }
        // virtual GC nodes see the full product over the real neighbors
        if code.mode == PexitMode::Pd {
            let exit = code.exit.as_ref().expect("pd mode carries an exit table");
            for j in (0..code.n_v).filter(|&j| code.virtual_gc[j]) {
                let p: f64 = code.var_edges[j].iter().map(|&e| 1.0 - self.i_ec[e]).product();
                let i_a = 1.0 - eps * p;
                let v = exit.exit(i_a);
                delta = delta.max((v - self.i_egc_virtual[j]).abs());
                self.i_egc_virtual[j] = v;
            }
        }
        // check to variable
        for i in 0..code.n_c {
            let edges = &code.check_edges[i];
            if code.gc_check[i] {
                let exit = code.exit.as_ref().expect("conventional mode carries an exit table");
                let i_a = edges.iter().map(|&e| self.i_ev[e]).sum::<f64>() / edges.len() as f64;
                let v = exit.exit(i_a);
                for &e in edges {
                    delta = delta.max((v - self.i_ec[e]).abs());
                    self.i_ec[e] = v;
                }
            } else {
                leave_one_out(edges.iter().map(|&e| self.i_ev[e]), &mut self.scratch);
                for (k, &e) in edges.iter().enumerate() {
                    let v = self.scratch[k];
                    delta = delta.max((v - self.i_ec[e]).abs());
                    self.i_ec[e] = v;
                }
            }
        }
        // a posteriori
        for j in 0..code.n_v {
            let mut p: f64 = code.var_edges[j].iter().map(|&e| 1.0 - self.i_ec[e]).product();
            if code.virtual_gc[j] {
                p *= 1.0 - self.i_egc_virtual[j];
            }
            self.i_app[j] = 1.0 - eps * p;
        }
        if !delta.is_finite() || self.i_app.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite message at epsilon {eps}")));
        }
        Ok(delta)
    }

    pub fn converged(&self, delta_conv: f64) -> bool {
        self.i_app.iter().all(|&v| v >= 1.0 - delta_conv)
    }
}

/// Writes the product of all items except the `k`-th into `out[k]`.
fn leave_one_out(items: impl ExactSizeIterator<Item = f64>, out: &mut Vec<f64>) {
    let n = items.len();
    out.clear();
    out.resize(n, 1.0);
    let vals: Vec<f64> = items.collect();
    let mut acc = 1.0;
    for k in 0..n {
        out[k] = acc;
        acc *= vals[k];
    }
    acc = 1.0;
    for k in (0..n).rev() {
        out[k] *= acc;
        acc *= vals[k];
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PexitOutcome {
    pub success: bool,
    pub iterations: usize,
}

/// Runs PEXIT at `eps` until every APP value reaches `1 - delta_conv`, the
/// messages stop moving, or the iteration cap is hit.
pub fn pexit_evaluate(code: &PexitCode, eps: f64, limits: &PexitLimits) -> Result<PexitOutcome> {
    let mut st = PexitState::new(code, eps)?;
    for it in 1..=limits.max_iters {
        let delta = st.step()?;
        if st.converged(limits.delta_conv) {
            return Ok(PexitOutcome {
                success: true,
                iterations: it,
            });
        }
        if delta < 1e-15 {
            return Ok(PexitOutcome {
                success: false,
                iterations: it,
            });
        }
    }
    Ok(PexitOutcome {
        success: false,
        iterations: limits.max_iters,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub epsilon_star: f64,
    pub iterations_at_threshold: usize,
    pub converged: bool,
    pub bisection_width: f64,
}

/// Largest decodable erasure probability, by bisection to width `tol`.
pub fn threshold(code: &PexitCode, tol: f64, limits: &PexitLimits) -> Result<ThresholdResult> {
    bisect(tol, |eps| pexit_evaluate(code, eps, limits).map(|o| (o.success, o.iterations)))
}

fn bisect(tol: f64, mut eval: impl FnMut(f64) -> Result<(bool, usize)>) -> Result<ThresholdResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let (ok_top, it_top) = eval(1.0)?;
    if ok_top {
        return Ok(ThresholdResult {
            epsilon_star: 1.0,
            iterations_at_threshold: it_top,
            converged: true,
            bisection_width: 0.0,
        });
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let (_, mut it_lo) = eval(0.0)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let (ok, it) = eval(mid)?;
        if ok {
            lo = mid;
            it_lo = it;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        epsilon_star: lo,
        iterations_at_threshold: it_lo,
        converged: true,
        bisection_width: hi - lo,
    })
}

/// Density-evolution threshold of an unstructured ensemble: the largest
/// `eps` for which `x <- eps * lambda(1 - rho(1 - x))` started at `eps`
/// reaches zero.
pub fn de_threshold(e: &EnsembleDistribution, tol: f64) -> Result<f64> {
    let lam: Vec<(i32, f64)> = e.lambda.iter().map(|(&d, &c)| (d as i32 - 1, c)).collect();
    let rho: Vec<(i32, f64)> = e.rho.iter().map(|(&d, &c)| (d as i32 - 1, c)).collect();
    let poly = |p: &[(i32, f64)], x: f64| p.iter().map(|&(k, c)| c * x.powi(k)).sum::<f64>();
    let r = bisect(tol, |eps| {
        let mut x = eps;
        for it in 1..=1_000_000 {
            let next = eps * poly(&lam, 1.0 - poly(&rho, 1.0 - x));
            if !next.is_finite() {
                return Err(Error::Numerical(format!("density evolution diverged at {eps}")));
            }
            if next < 1e-10 {
                return Ok((true, it));
            }
            if next >= x {
                return Ok((false, it));
            }
            x = next;
        }
        Ok((false, 1_000_000))
    })?;
    Ok(r.epsilon_star)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::peg::{peg_build, PegConfig};
    use crate::protograph::DegreeCountVector;

    fn h1511() -> ComponentCode {
        ComponentCode::hamming(4, true).unwrap()
    }

    fn regular36() -> BaseMatrix {
        let d = DegreeCountVector::new([(3, 400)]).unwrap();
        peg_build(&PegConfig::new(200, 400, d, 11)).unwrap()
    }

    #[test]
    fn trivial_extremes() {
        let base = BaseMatrix::from_rows(vec![vec![1, 2, 1], vec![1, 1, 1]]).unwrap();
        let code = PexitCode::ldpc(&base);
        let lim = PexitLimits::default();
        assert_eq!(pexit_evaluate(&code, 0.0, &lim).unwrap(), PexitOutcome { success: true, iterations: 1 });
        assert!(!pexit_evaluate(&code, 1.0, &lim).unwrap().success);
    }

    #[test]
    fn regular_three_six_threshold() {
        let code = PexitCode::ldpc(&regular36());
        let lim = PexitLimits::default();
        assert!(pexit_evaluate(&code, 0.42, &lim).unwrap().success);
        assert!(!pexit_evaluate(&code, 0.44, &lim).unwrap().success);
        let t = threshold(&code, 1e-4, &lim).unwrap();
        assert!((t.epsilon_star - 0.429).abs() < 0.005, "{t:?}");
        assert!(t.bisection_width <= 1e-4);
    }

    #[test]
    fn pd_without_doping_is_ldpc() {
        let base = regular36();
        let a = PexitCode::ldpc(&base);
        let b = PexitCode::pd(&base, &[], &h1511()).unwrap();
        let mut sa = PexitState::new(&a, 0.43).unwrap();
        let mut sb = PexitState::new(&b, 0.43).unwrap();
        for _ in 0..50 {
            sa.step().unwrap();
            sb.step().unwrap();
            assert_eq!(sa.i_ev, sb.i_ev);
            assert_eq!(sa.i_ec, sb.i_ec);
            assert_eq!(sa.i_app, sb.i_app);
        }
    }

    #[test]
    fn messages_nondecreasing() {
        let base = BaseMatrix::from_rows(vec![vec![1, 2, 1, 1, 0], vec![1, 1, 0, 1, 2]]).unwrap();
        let code = PexitCode::pd(&base, &[0], &ComponentCode::hamming(3, true).unwrap()).unwrap();
        let mut st = PexitState::new(&code, 0.5).unwrap();
        let mut prev = (st.i_ev.clone(), st.i_ec.clone(), st.i_egc_virtual.clone());
        for _ in 0..200 {
            st.step().unwrap();
            assert!(st.i_ev.iter().zip(&prev.0).all(|(a, b)| a >= b));
            assert!(st.i_ec.iter().zip(&prev.1).all(|(a, b)| a >= b));
            assert!(st.i_egc_virtual.iter().zip(&prev.2).all(|(a, b)| a >= b));
            prev = (st.i_ev.clone(), st.i_ec.clone(), st.i_egc_virtual.clone());
        }
    }

    #[test]
    fn success_monotone_in_epsilon() {
        let base = BaseMatrix::from_rows(vec![vec![1, 2, 1, 1, 0], vec![1, 1, 0, 1, 2]]).unwrap();
        let code = PexitCode::pd(&base, &[0], &ComponentCode::hamming(3, true).unwrap()).unwrap();
        let lim = PexitLimits::default();
        let ok: Vec<bool> = (0..=100)
            .map(|k| pexit_evaluate(&code, k as f64 / 100.0, &lim).unwrap().success)
            .collect();
        let first_fail = ok.iter().position(|&s| !s).unwrap();
        assert!(ok[first_fail..].iter().all(|&s| !s));
    }

    #[test]
    fn conventional_average_matches_pd_on_uniform_input() {
        // a single GC check whose neighbors all see the same value
        let code = ComponentCode::hamming(3, true).unwrap();
        let table = ExitTable::new(&code);
        let base = BaseMatrix::from_rows(vec![vec![1; 7]]).unwrap();
        let conv = PexitCode::conventional(&base, &[0], &code).unwrap();
        let mut st = PexitState::new(&conv, 0.3).unwrap();
        st.step().unwrap();
        st.step().unwrap();
        let i_a = st.i_ev[0];
        assert!(st.i_ev.iter().all(|&v| v == i_a));
        assert!((st.i_ec[0] - table.exit(i_a)).abs() < 1e-15);
    }

    #[test]
    fn conventional_requires_matching_degree() {
        let base = BaseMatrix::from_rows(vec![vec![1; 6]]).unwrap();
        assert!(PexitCode::conventional(&base, &[0], &ComponentCode::hamming(3, true).unwrap()).is_err());
    }

    fn grid_threshold(e: &EnsembleDistribution) -> f64 {
        (1..=10_000)
            .map(|k| {
                let x = k as f64 / 10_000.0;
                x / e.lambda_at(1.0 - e.rho_at(1.0 - x))
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn de_threshold_regular() {
        let e = EnsembleDistribution::new([(3, 1.0)], [(6, 1.0)]).unwrap();
        let t = de_threshold(&e, 1e-5).unwrap();
        assert!((t - grid_threshold(&e)).abs() < 1e-4);
        assert!((t - 0.4294).abs() < 1e-3);
    }

    #[test]
    fn de_threshold_cycle_code() {
        let e = EnsembleDistribution::new([(2, 1.0)], [(2, 1.0)]).unwrap();
        assert!(de_threshold(&e, 1e-4).unwrap() > 0.999);
    }

    #[test]
    fn de_threshold_table_row() {
        let e = EnsembleDistribution::normalized(
            [(2, 0.2049), (3, 0.2489), (4, 0.1150), (5, 0.074), (6, 0.0210), (20, 0.3363)],
            [(8, 0.9735), (9, 0.0265)],
        )
        .unwrap();
        let t = de_threshold(&e, 1e-4).unwrap();
        assert!((t - 0.4815).abs() < 0.002, "{t}");
        assert!((t - grid_threshold(&e)).abs() < 5e-4);
    }
}
