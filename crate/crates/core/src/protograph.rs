//! Protograph base matrices, degree bookkeeping and design rates.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational used for design rates.
pub type Rate = Ratio<i64>;

/// An `n_c x n_v` protograph base matrix. Entry `(i, j)` is the number of
/// parallel edges between check node `i` and variable node `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BaseMatrixRepr", into = "BaseMatrixRepr")]
pub struct BaseMatrix {
    n_c: usize,
    n_v: usize,
    entries: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct BaseMatrixRepr {
    rows: Vec<Vec<u32>>,
}

impl TryFrom<BaseMatrixRepr> for BaseMatrix {
    type Error = Error;

    fn try_from(repr: BaseMatrixRepr) -> Result<Self> {
        BaseMatrix::from_rows(repr.rows)
    }
}

impl From<BaseMatrix> for BaseMatrixRepr {
    fn from(b: BaseMatrix) -> Self {
        BaseMatrixRepr { rows: b.rows() }
    }
}

impl BaseMatrix {
    /// Builds and validates a base matrix from row-major data.
    pub fn new(n_c: usize, n_v: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != n_c * n_v {
            return Err(Error::InvalidBase(format!(
                "expected {} entries for {n_c}x{n_v}, got {}",
                n_c * n_v,
                entries.len()
            )));
        }
        let b = BaseMatrix { n_c, n_v, entries };
        b.validate()?;
        Ok(b)
    }

    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n_c = rows.len();
        let n_v = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_v) {
            return Err(Error::InvalidBase("ragged rows".into()));
        }
        Self::new(n_c, n_v, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix without enforcing the degree invariants. Used while a
    /// construction is still in progress.
    pub(crate) fn unchecked(n_c: usize, n_v: usize, entries: Vec<u32>) -> Self {
        debug_assert_eq!(entries.len(), n_c * n_v);
        BaseMatrix { n_c, n_v, entries }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_c == 0 || self.n_v == 0 {
            return Err(Error::InvalidBase("empty matrix".into()));
        }
        if let Some(j) = (0..self.n_v).find(|&j| self.col_degree(j) == 0) {
            return Err(Error::InvalidBase(format!("variable node {j} is unconnected")));
        }
        if let Some(i) = (0..self.n_c).find(|&i| self.row_degree(i) < 2) {
            return Err(Error::InvalidBase(format!("check node {i} has degree < 2")));
        }
        Ok(())
    }

    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n_v + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: u32) {
        self.entries[i * self.n_v + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.n_v).map(<[u32]>::to_vec).collect()
    }

    pub fn col_degree(&self, j: usize) -> usize {
        (0..self.n_c).map(|i| self.get(i, j) as usize).sum()
    }

    pub fn row_degree(&self, i: usize) -> usize {
        self.entries[i * self.n_v..(i + 1) * self.n_v]
            .iter()
            .map(|&b| b as usize)
            .sum()
    }

    pub fn col_degrees(&self) -> Vec<usize> {
        (0..self.n_v).map(|j| self.col_degree(j)).collect()
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        (0..self.n_c).map(|i| self.row_degree(i)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.entries.iter().map(|&b| b as usize).sum()
    }

    /// Check-node neighbors of variable node `j` with multiplicities.
    pub fn col_neighbors(&self, j: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        (0..self.n_c).filter_map(move |i| {
            let b = self.get(i, j);
            (b > 0).then_some((i, b))
        })
    }

    /// Variable-node neighbors of check node `i` with multiplicities.
    pub fn row_neighbors(&self, i: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        (0..self.n_v).filter_map(move |j| {
            let b = self.get(i, j);
            (b > 0).then_some((j, b))
        })
    }

    /// Histogram of column degrees.
    pub fn column_degrees(&self) -> DegreeCountVector {
        DegreeCountVector::from_degrees(self.col_degrees())
    }

    /// Design rate `1 - (n_c + (mu - kappa) y) / n_v`, or `1 - n_c / n_v`
    /// when `doping` is `None`.
    pub fn design_rate(&self, doping: Option<DopingParams>) -> Result<Rate> {
        design_rate(self.n_c, self.n_v, doping)
    }
}

/// `(mu, kappa, y)` of a bulk-aligned partial doping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DopingParams {
    pub mu: usize,
    pub kappa: usize,
    pub y: usize,
}

pub fn design_rate(n_c: usize, n_v: usize, doping: Option<DopingParams>) -> Result<Rate> {
    if n_v == 0 {
        return Err(Error::InvalidArgument("n_v must be positive".into()));
    }
    let extra = match doping {
        None => 0,
        Some(DopingParams { mu, kappa, y }) => {
            if kappa < 1 || mu <= kappa {
                return Err(Error::InvalidArgument(format!(
                    "need mu > kappa >= 1, got ({mu}, {kappa})"
                )));
            }
            (mu - kappa) * y
        }
    };
    let rate = Rate::new(1, 1) - Rate::new((n_c + extra) as i64, n_v as i64);
    if rate <= Rate::new(0, 1) {
        return Err(Error::NonPositiveRate(rate.to_string()));
    }
    Ok(rate)
}

/// Parses `"1/2"`, `"0.5"` or `"1"` into an exact rate.
pub fn parse_rate(s: &str) -> Result<Rate> {
    let bad = || Error::InvalidArgument(format!("cannot parse rate {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rate::new(n, d));
    }
    let v: f64 = s.trim().parse().map_err(|_| bad())?;
    Rate::approximate_float(v).ok_or_else(bad)
}

pub fn rate_to_f64(r: Rate) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Counts of variable nodes per degree, sorted by ascending degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DegreeCountVector {
    entries: Vec<(usize, usize)>,
}

impl DegreeCountVector {
    /// Builds from `(degree, count)` pairs. Degrees must be distinct and
    /// positive; zero counts are dropped.
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (d, c) in pairs {
            if d == 0 {
                return Err(Error::InvalidDegrees("degree 0".into()));
            }
            if map.insert(d, c).is_some() {
                return Err(Error::InvalidDegrees(format!("duplicate degree {d}")));
            }
        }
        Ok(DegreeCountVector {
            entries: map.into_iter().filter(|&(_, c)| c > 0).collect(),
        })
    }

    /// Builds from parallel degree and count slices, e.g.
    /// `D^(2,3,4,5,6) = (115,76,114,76,19)`.
    pub fn from_counts(degrees: &[usize], counts: &[usize]) -> Result<Self> {
        if degrees.len() != counts.len() {
            return Err(Error::InvalidDegrees("length mismatch".into()));
        }
        Self::new(degrees.iter().copied().zip(counts.iter().copied()))
    }

    pub fn from_degrees(degrees: impl IntoIterator<Item = usize>) -> Self {
        let mut map = BTreeMap::new();
        for d in degrees {
            *map.entry(d).or_insert(0) += 1;
        }
        DegreeCountVector {
            entries: map.into_iter().collect(),
        }
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn count(&self, degree: usize) -> usize {
        self.entries
            .iter()
            .find(|&&(d, _)| d == degree)
            .map_or(0, |&(_, c)| c)
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|&(_, c)| c).sum()
    }

    pub fn edges(&self) -> usize {
        self.entries.iter().map(|&(d, c)| d * c).sum()
    }

    pub fn max_degree(&self) -> usize {
        self.entries.last().map_or(0, |&(d, _)| d)
    }

    /// Per-column degrees in ascending order (column 0 gets the lowest degree).
    pub fn column_assignment(&self) -> Vec<usize> {
        self.entries
            .iter()
            .flat_map(|&(d, c)| std::iter::repeat_n(d, c))
            .collect()
    }
}

/// Edge-perspective degree distribution pair `(lambda, rho)`, keyed by node
/// degree (coefficient of `x^(d-1)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDistribution {
    pub lambda: BTreeMap<usize, f64>,
    pub rho: BTreeMap<usize, f64>,
}

const NORM_TOL: f64 = 1e-9;

impl EnsembleDistribution {
    pub fn new(
        lambda: impl IntoIterator<Item = (usize, f64)>,
        rho: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self> {
        let e = EnsembleDistribution {
            lambda: collect_coeffs(lambda)?,
            rho: collect_coeffs(rho)?,
        };
        e.validate()?;
        Ok(e)
    }

    /// Like [`EnsembleDistribution::new`] but rescales each side to sum to one.
    pub fn normalized(
        lambda: impl IntoIterator<Item = (usize, f64)>,
        rho: impl IntoIterator<Item = (usize, f64)>,
    ) -> Result<Self> {
        let mut lambda = collect_coeffs(lambda)?;
        let mut rho = collect_coeffs(rho)?;
        for side in [&mut lambda, &mut rho] {
            let s: f64 = side.values().sum();
            if s <= 0.0 {
                return Err(Error::InvalidEnsemble("zero total mass".into()));
            }
            side.values_mut().for_each(|v| *v /= s);
        }
        Self::new(lambda, rho)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, side) in [("lambda", &self.lambda), ("rho", &self.rho)] {
            if side.values().any(|&v| !(0.0..=1.0).contains(&v)) {
                return Err(Error::InvalidEnsemble(format!("{name} coefficient outside [0,1]")));
            }
            let s: f64 = side.values().sum();
            if (s - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidEnsemble(format!("{name} sums to {s}")));
            }
        }
        Ok(())
    }

    /// `lambda(x) = sum_d lambda_d x^(d-1)`.
    pub fn lambda_at(&self, x: f64) -> f64 {
        eval_edge_poly(&self.lambda, x)
    }

    /// Coefficient `lambda_d`, zero when `d` is not in the support.
    pub fn lambda_at_degree(&self, d: usize) -> f64 {
        self.lambda.get(&d).copied().unwrap_or(0.0)
    }

    pub fn rho_at(&self, x: f64) -> f64 {
        eval_edge_poly(&self.rho, x)
    }

    /// `int_0^1 lambda(x) dx = sum_d lambda_d / d`.
    pub fn lambda_integral(&self) -> f64 {
        self.lambda.iter().map(|(&d, &v)| v / d as f64).sum()
    }

    pub fn rho_integral(&self) -> f64 {
        self.rho.iter().map(|(&d, &v)| v / d as f64).sum()
    }

    pub fn rate(&self) -> f64 {
        1.0 - self.rho_integral() / self.lambda_integral()
    }

    /// Edge-perspective distribution of a base matrix's column and row degrees.
    pub fn from_base(b: &BaseMatrix) -> Self {
        let edges = b.edge_count() as f64;
        let mut lambda = BTreeMap::new();
        for d in b.col_degrees() {
            *lambda.entry(d).or_insert(0.0) += d as f64 / edges;
        }
        let mut rho = BTreeMap::new();
        for d in b.row_degrees() {
            *rho.entry(d).or_insert(0.0) += d as f64 / edges;
        }
        EnsembleDistribution { lambda, rho }
    }
}

fn collect_coeffs(it: impl IntoIterator<Item = (usize, f64)>) -> Result<BTreeMap<usize, f64>> {
    let mut map = BTreeMap::new();
    for (d, v) in it {
        if d == 0 {
            return Err(Error::InvalidEnsemble("degree 0".into()));
        }
        if !v.is_finite() {
            return Err(Error::InvalidEnsemble("non-finite coefficient".into()));
        }
        *map.entry(d).or_insert(0.0) += v;
    }
    Ok(map)
}

fn eval_edge_poly(coeffs: &BTreeMap<usize, f64>, x: f64) -> f64 {
    coeffs.iter().map(|(&d, &v)| v * x.powi(d as i32 - 1)).sum()
}

/// Returns true iff the ensemble's rate is within `1e-6` of `rate`.
pub fn validate_ensemble(e: &EnsembleDistribution, rate: Rate) -> bool {
    (e.rate() - rate_to_f64(rate)).abs() < 1e-6
}
