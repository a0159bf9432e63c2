//! Generalized-check doping of lifted protograph codes.
//!
//! Partial doping appends the component parity checks on top of the lifted
//! matrix for selected protograph variable nodes: each doped column's `N`
//! copies are split into `N / mu` consecutive blocks and every block gets its
//! own copy of the component parity-check matrix. Conventional doping instead
//! replaces every lifted copy of one protograph check by the component code.

use serde::{Deserialize, Serialize};

use crate::component::ComponentCode;
use crate::error::{Error, Result};
use crate::lifting::{LiftedPcm, RowOrigin};
use crate::protograph::{BaseMatrix, DegreeCountVector, DopingParams, Rate};
use crate::sparse::SparsePcm;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DopingSpec {
    pub doped_cols: Vec<usize>,
    pub code: ComponentCode,
}

impl DopingSpec {
    pub fn new(doped_cols: Vec<usize>, code: ComponentCode) -> Self {
        DopingSpec { doped_cols, code }
    }

    /// The leftmost `y * mu` columns, the layout used by all regular designs.
    pub fn leftmost(y: usize, code: ComponentCode) -> Self {
        DopingSpec {
            doped_cols: (0..y * code.mu()).collect(),
            code,
        }
    }

    pub fn x(&self) -> usize {
        self.doped_cols.len()
    }

    /// Number of bulks when `x` is a multiple of `mu`.
    pub fn y(&self) -> Option<usize> {
        let mu = self.code.mu();
        self.x().is_multiple_of(mu).then(|| self.x() / mu)
    }

    pub fn params(&self) -> Option<DopingParams> {
        self.y().map(|y| DopingParams {
            mu: self.code.mu(),
            kappa: self.code.kappa(),
            y,
        })
    }

    pub fn validate(&self, base: &BaseMatrix) -> Result<()> {
        let mut seen = vec![false; base.n_v()];
        for &j in &self.doped_cols {
            if j >= base.n_v() {
                return Err(Error::InvalidDoping(format!("column {j} out of range")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidDoping(format!("column {j} listed twice")));
            }
            if base.col_degree(j) != 2 {
                return Err(Error::InvalidDoping(format!(
                    "column {j} has degree {}, only degree-2 columns are doped",
                    base.col_degree(j)
                )));
            }
        }
        Ok(())
    }

    pub fn is_doped(&self, n_v: usize) -> Vec<bool> {
        let mut d = vec![false; n_v];
        for &j in &self.doped_cols {
            d[j] = true;
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DopingKind {
    Partial { doped_cols: Vec<usize> },
    Conventional { check_idx: usize },
}

/// One generalized check: `mu` lifted columns in component-code column order
/// and the first of its `mu - kappa` consecutive rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcBlock {
    pub cols: Vec<u32>,
    pub first_row: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdGldpcCode {
    pcm: LiftedPcm,
    base: BaseMatrix,
    code: ComponentCode,
    kind: DopingKind,
    gc_blocks: Vec<GcBlock>,
}

/// Metadata needed next to the alist file to reload a code exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DopingSidecar {
    pub format: String,
    pub base: BaseMatrix,
    pub lifting: usize,
    pub component: ComponentCode,
    pub kind: DopingKind,
    pub gc_blocks: Vec<GcBlock>,
}

const SIDECAR_FORMAT: &str = "gldpc-doping/1";

impl PdGldpcCode {
    pub fn pcm(&self) -> &LiftedPcm {
        &self.pcm
    }

    pub fn base(&self) -> &BaseMatrix {
        &self.base
    }

    pub fn code(&self) -> &ComponentCode {
        &self.code
    }

    pub fn kind(&self) -> &DopingKind {
        &self.kind
    }

    pub fn gc_blocks(&self) -> &[GcBlock] {
        &self.gc_blocks
    }

    pub fn lifting(&self) -> usize {
        self.pcm.lifting()
    }

    pub fn beta(&self) -> usize {
        self.lifting() / self.code.mu()
    }

    /// `1 - rows / cols`, exact when the matrix has full row rank.
    pub fn rate(&self) -> Rate {
        Rate::new(1, 1) - Rate::new(self.pcm.rows() as i64, self.pcm.cols() as i64)
    }

    /// Rows that are plain single parity checks.
    pub fn spc_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.pcm
            .row_origin()
            .iter()
            .enumerate()
            .filter_map(|(r, o)| matches!(o, RowOrigin::Check(_)).then_some(r))
    }

    pub fn sidecar(&self) -> DopingSidecar {
        DopingSidecar {
            format: SIDECAR_FORMAT.into(),
            base: self.base.clone(),
            lifting: self.lifting(),
            component: self.code.clone(),
            kind: self.kind.clone(),
            gc_blocks: self.gc_blocks.clone(),
        }
    }

    /// Reassembles a code from its parity-check matrix and sidecar, checking
    /// that the GC rows really carry the component code.
    pub fn from_parts(pcm: SparsePcm, sidecar: DopingSidecar) -> Result<Self> {
        if sidecar.format != SIDECAR_FORMAT {
            return Err(Error::InvalidArgument(format!("unknown sidecar format {:?}", sidecar.format)));
        }
        let DopingSidecar {
            base,
            lifting: n,
            component: code,
            kind,
            gc_blocks,
            ..
        } = sidecar;
        let m = code.redundancy();
        if n == 0 || pcm.cols() != base.n_v() * n {
            return Err(Error::InvalidArgument("matrix width does not match base and lifting".into()));
        }
        let mut row_origin = vec![None; pcm.rows()];
        for (g, blk) in gc_blocks.iter().enumerate() {
            if blk.cols.len() != code.mu() || blk.first_row as usize + m > pcm.rows() {
                return Err(Error::InvalidArgument(format!("GC block {g} is malformed")));
            }
            for r in 0..m {
                let row = blk.first_row as usize + r;
                let mut want: Vec<u32> = (0..code.mu())
                    .filter(|&k| code.pcm_bit(r, k))
                    .map(|k| blk.cols[k])
                    .collect();
                want.sort_unstable();
                if pcm.row(row) != want.as_slice() || row_origin[row].is_some() {
                    return Err(Error::InvalidArgument(format!("row {row} does not match GC block {g}")));
                }
                row_origin[row] = Some(RowOrigin::Gc(g as u32));
            }
        }
        // remaining rows are SPC copies; recover their base check from degrees
        let mut col_origin = Vec::with_capacity(pcm.cols());
        col_origin.extend((0..pcm.cols()).map(|c| (c / n) as u32));
        let mut spc_counts = vec![0usize; base.n_c()];
        let rows: Vec<Option<RowOrigin>> = row_origin;
        let mut next_check = 0usize;
        let skip = match kind {
            DopingKind::Conventional { check_idx } => Some(check_idx),
            DopingKind::Partial { .. } => None,
        };
        let mut origin = Vec::with_capacity(rows.len());
        for o in rows {
            match o {
                Some(o) => origin.push(o),
                None => {
                    while Some(next_check) == skip || (next_check < base.n_c() && spc_counts[next_check] == n) {
                        next_check += 1;
                    }
                    if next_check >= base.n_c() {
                        return Err(Error::InvalidArgument("too many parity rows".into()));
                    }
                    spc_counts[next_check] += 1;
                    origin.push(RowOrigin::Check(next_check as u32));
                }
            }
        }
        Ok(PdGldpcCode {
            pcm: LiftedPcm::from_parts(pcm, n, col_origin, origin),
            base,
            code,
            kind,
            gc_blocks,
        })
    }
}

/// Appends the component checks for `spec.doped_cols` on top of `lifted`.
pub fn dope_partial(base: &BaseMatrix, lifted: &LiftedPcm, spec: &DopingSpec) -> Result<PdGldpcCode> {
    spec.validate(base)?;
    let n = lifted.lifting();
    let mu = spec.code.mu();
    if !n.is_multiple_of(mu) {
        return Err(Error::LiftingFactor { n, mu });
    }
    if lifted.cols() != base.n_v() * n || lifted.rows() != base.n_c() * n {
        return Err(Error::InvalidArgument("lifted matrix does not match base".into()));
    }
    let m = spec.code.redundancy();
    let beta = n / mu;
    let gc_rows = spec.x() * beta * m;
    if gc_rows + lifted.rows() >= lifted.cols() {
        return Err(Error::NonPositiveRate(format!(
            "{} rows for {} columns",
            gc_rows + lifted.rows(),
            lifted.cols()
        )));
    }
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(gc_rows + lifted.rows());
    let mut origin = Vec::with_capacity(gc_rows + lifted.rows());
    let mut blocks = Vec::with_capacity(spec.x() * beta);
    for &j in &spec.doped_cols {
        for b in 0..beta {
            let cols: Vec<u32> = (0..mu).map(|k| (j * n + b * mu + k) as u32).collect();
            let g = blocks.len() as u32;
            blocks.push(GcBlock {
                cols: cols.clone(),
                first_row: rows.len() as u32,
            });
            for r in 0..m {
                rows.push((0..mu).filter(|&k| spec.code.pcm_bit(r, k)).map(|k| cols[k]).collect());
                origin.push(RowOrigin::Gc(g));
            }
        }
    }
    for r in 0..lifted.rows() {
        rows.push(lifted.pcm().row(r).to_vec());
    }
    origin.extend_from_slice(lifted.row_origin());
    let pcm = SparsePcm::from_rows(lifted.cols(), rows)?;
    Ok(PdGldpcCode {
        pcm: LiftedPcm::from_parts(pcm, n, lifted.col_origin().to_vec(), origin),
        base: base.clone(),
        code: spec.code.clone(),
        kind: DopingKind::Partial {
            doped_cols: spec.doped_cols.clone(),
        },
        gc_blocks: blocks,
    })
}

/// Replaces every lifted copy of check `check_idx` by the component code on
/// its `mu` neighbors (taken in ascending column order).
pub fn dope_conventional(
    base: &BaseMatrix,
    check_idx: usize,
    code: &ComponentCode,
    lifted: &LiftedPcm,
) -> Result<PdGldpcCode> {
    if check_idx >= base.n_c() {
        return Err(Error::InvalidDoping(format!("check {check_idx} out of range")));
    }
    if base.row_degree(check_idx) != code.mu() {
        return Err(Error::InvalidDoping(format!(
            "check {check_idx} has degree {}, component length is {}",
            base.row_degree(check_idx),
            code.mu()
        )));
    }
    let n = lifted.lifting();
    let m = code.redundancy();
    let mut rows = Vec::new();
    let mut origin = Vec::new();
    let mut blocks = Vec::with_capacity(n);
    for c in 0..n {
        let cols = lifted.pcm().row(check_idx * n + c).to_vec();
        if cols.len() != code.mu() {
            return Err(Error::InvalidDoping("lifted check lost an edge to a collision".into()));
        }
        blocks.push(GcBlock {
            cols: cols.clone(),
            first_row: rows.len() as u32,
        });
        for r in 0..m {
            rows.push((0..code.mu()).filter(|&k| code.pcm_bit(r, k)).map(|k| cols[k]).collect());
            origin.push(RowOrigin::Gc(c as u32));
        }
    }
    for r in 0..lifted.rows() {
        if r / n != check_idx {
            rows.push(lifted.pcm().row(r).to_vec());
            origin.push(lifted.row_origin()[r]);
        }
    }
    if rows.len() >= lifted.cols() {
        return Err(Error::NonPositiveRate(format!("{} rows for {} columns", rows.len(), lifted.cols())));
    }
    let pcm = SparsePcm::from_rows(lifted.cols(), rows)?;
    Ok(PdGldpcCode {
        pcm: LiftedPcm::from_parts(pcm, n, lifted.col_origin().to_vec(), origin),
        base: base.clone(),
        code: code.clone(),
        kind: DopingKind::Conventional { check_idx },
        gc_blocks: blocks,
    })
}

/// Outcome of [`typical_dmin_check`]. `witness` lists the undoped degree-2
/// variable nodes of one cycle when the check fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DminCheck {
    pub ok: bool,
    pub witness: Option<Vec<usize>>,
}

/// Checks that the undoped degree-2 variable nodes form no cycle among
/// themselves. A degree-2 node with a double edge counts as a cycle.
pub fn typical_dmin_check(base: &BaseMatrix, doped_cols: &[usize]) -> DminCheck {
    let n_c = base.n_c();
    let mut doped = vec![false; base.n_v()];
    for &j in doped_cols {
        if j < base.n_v() {
            doped[j] = true;
        }
    }
    let mut parent: Vec<usize> = (0..n_c).collect();
    // forest edges kept for witness reconstruction: (neighbor check, vn)
    let mut forest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_c];
    for j in (0..base.n_v()).filter(|&j| !doped[j] && base.col_degree(j) == 2) {
        let nb: Vec<(usize, u32)> = base.col_neighbors(j).collect();
        if nb.len() == 1 {
            return DminCheck {
                ok: false,
                witness: Some(vec![j]),
            };
        }
        let (a, b) = (nb[0].0, nb[1].0);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            let mut cycle = forest_path(&forest, a, b);
            cycle.push(j);
            return DminCheck {
                ok: false,
                witness: Some(cycle),
            };
        }
        parent[ra] = rb;
        forest[a].push((b, j));
        forest[b].push((a, j));
    }
    DminCheck { ok: true, witness: None }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn forest_path(forest: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; forest.len()];
    let mut seen = vec![false; forest.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(c) = stack.pop() {
        if c == to {
            break;
        }
        for &(d, v) in &forest[c] {
            if !std::mem::replace(&mut seen[d], true) {
                prev[d] = Some((c, v));
                stack.push(d);
            }
        }
    }
    let mut path = Vec::new();
    let mut c = to;
    while let Some((p, v)) = prev[c] {
        path.push(v);
        c = p;
    }
    path.reverse();
    path
}

/// Smallest bulk count `y` with `y >= (n_v - n_c + 1) / mu` when the check
/// count itself shrinks as `n_c = n_c0 - (mu - kappa) y`. Here `n_c0` is the
/// check count of the undoped design, `n_v (1 - R)`.
pub fn necessary_doping_bound(n_v: usize, n_c0: usize, mu: usize, kappa: usize) -> Result<usize> {
    if n_v == 0 || kappa == 0 || mu <= kappa {
        return Err(Error::InvalidArgument(format!(
            "need n_v > 0 and mu > kappa > 0, got n_v={n_v} mu={mu} kappa={kappa}"
        )));
    }
    // mu y >= n_v - n_c0 + (mu - kappa) y + 1  <=>  kappa y >= n_v - n_c0 + 1
    let num = n_v as i64 - n_c0 as i64 + 1;
    if num <= 0 {
        return Ok(0);
    }
    Ok((num as usize).div_ceil(kappa))
}

/// Degree profile seen by the PEXIT analysis of the PD-GLDPC code (`G_c`)
/// from the protograph profile (`G_p`): each bulk of `mu` doped degree-2
/// nodes turns into nodes of degree `2 + w` for every component column of
/// weight `w`.
pub fn degree_transform(d_p: &DegreeCountVector, code: &ComponentCode, y: usize) -> Result<DegreeCountVector> {
    let mu = code.mu();
    let have = d_p.count(2);
    if have < mu * y {
        return Err(Error::InvalidDegrees(format!(
            "{} degree-2 nodes cannot cover {y} bulks of {mu}",
            have
        )));
    }
    let mut counts: std::collections::BTreeMap<usize, usize> = d_p.entries().iter().copied().collect();
    *counts.entry(2).or_insert(0) -= mu * y;
    for (w, k) in code.column_weight_histogram() {
        *counts.entry(2 + w).or_insert(0) += k * y;
    }
    DegreeCountVector::new(counts)
}

/// Inverse of [`degree_transform`]: recovers `G_p` from `G_c`.
pub fn degree_transform_inverse(
    d_c: &DegreeCountVector,
    code: &ComponentCode,
    y: usize,
) -> Result<DegreeCountVector> {
    let mut counts: std::collections::BTreeMap<usize, usize> = d_c.entries().iter().copied().collect();
    for (w, k) in code.column_weight_histogram() {
        let slot = counts.entry(2 + w).or_insert(0);
        if *slot < k * y {
            return Err(Error::InvalidDegrees(format!(
                "only {} degree-{} nodes, {y} bulks need {}",
                slot,
                2 + w,
                k * y
            )));
        }
        *slot -= k * y;
    }
    *counts.entry(2).or_insert(0) += code.mu() * y;
    DegreeCountVector::new(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::lift;

    fn h74() -> ComponentCode {
        ComponentCode::hamming(3, true).unwrap()
    }

    fn h1511() -> ComponentCode {
        ComponentCode::hamming(4, true).unwrap()
    }

    #[test]
    fn small_partial_instance() {
        let base = BaseMatrix::from_rows(vec![vec![1, 1, 1], vec![1, 0, 1]]).unwrap();
        let lifted = lift(&base, 14, 7, 1).unwrap();
        let spec = DopingSpec::new(vec![0], h74());
        let code = dope_partial(&base, &lifted, &spec).unwrap();
        assert_eq!((code.pcm().rows(), code.pcm().cols()), (34, 42));
        assert_eq!(code.gc_blocks().len(), 2);
        let weights = h74().column_weights();
        for (k, &w) in weights.iter().enumerate() {
            assert_eq!(code.pcm().pcm().col(k).len(), 2 + w);
            assert_eq!(code.pcm().pcm().col(7 + k).len(), 2 + w);
        }
        assert_eq!(code.spc_rows().count(), 28);
    }

    #[test]
    fn no_doping_is_identity() {
        let base = BaseMatrix::from_rows(vec![vec![1, 1, 1], vec![1, 0, 1]]).unwrap();
        let lifted = lift(&base, 14, 7, 1).unwrap();
        let code = dope_partial(&base, &lifted, &DopingSpec::new(vec![], h74())).unwrap();
        assert_eq!(code.pcm(), &lifted);
    }

    #[test]
    fn regular_design_has_rate_half() {
        let base = BaseMatrix::new(124, 400, {
            // any valid degree-2-heavy matrix of the right shape will do
            let mut e = vec![0u32; 124 * 400];
            for j in 0..400 {
                e[(j % 124) * 400 + j] = 1;
                e[((j + 1 + j / 124) % 124) * 400 + j] = 1;
            }
            e
        })
        .unwrap();
        let lifted = lift(&base, 75, 15, 2).unwrap();
        let spec = DopingSpec::leftmost(19, h1511());
        assert_eq!(spec.x(), 285);
        let code = dope_partial(&base, &lifted, &spec).unwrap();
        assert_eq!(code.rate(), Rate::new(1, 2));
        assert_eq!(base.design_rate(spec.params()).unwrap(), Rate::new(1, 2));
    }

    #[test]
    fn overdoping_rejected() {
        let base = BaseMatrix::from_rows(vec![vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        let lifted = lift(&base, 7, 7, 1).unwrap();
        let spec = DopingSpec::new(vec![0, 1, 2], h74());
        assert!(matches!(dope_partial(&base, &lifted, &spec), Err(Error::NonPositiveRate(_))));
    }

    #[test]
    fn doping_non_degree_two_rejected() {
        let base = BaseMatrix::from_rows(vec![vec![2, 1, 1], vec![1, 1, 1]]).unwrap();
        let lifted = lift(&base, 7, 7, 1).unwrap();
        assert!(dope_partial(&base, &lifted, &DopingSpec::new(vec![0], h74())).is_err());
        assert!(dope_partial(&base, &lifted, &DopingSpec::new(vec![1, 1], h74())).is_err());
    }

    #[test]
    fn conventional_rate_three_sevenths() {
        let base = BaseMatrix::from_rows(vec![vec![1; 7], vec![1, 1, 0, 0, 0, 0, 0]]).unwrap();
        let lifted = lift(&base, 7, 7, 3).unwrap();
        let code = dope_conventional(&base, 0, &h74(), &lifted).unwrap();
        assert_eq!(code.rate(), Rate::new(3, 7));
        assert!(dope_conventional(&base, 1, &h74(), &lifted).is_err());
    }

    #[test]
    fn spc_replacement_is_identity() {
        let base = BaseMatrix::from_rows(vec![vec![1, 1, 1, 1], vec![1, 1, 0, 1]]).unwrap();
        let lifted = lift(&base, 5, 5, 3).unwrap();
        let code = dope_conventional(&base, 0, &ComponentCode::spc(4).unwrap(), &lifted).unwrap();
        let mut a: Vec<Vec<u32>> = (0..lifted.rows()).map(|r| lifted.pcm().row(r).to_vec()).collect();
        let mut b: Vec<Vec<u32>> = (0..code.pcm().rows()).map(|r| code.pcm().pcm().row(r).to_vec()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn sidecar_reload_is_exact() {
        let base = BaseMatrix::from_rows(vec![vec![1, 1, 1, 2], vec![1, 0, 1, 1], vec![0, 1, 1, 1]]).unwrap();
        let lifted = lift(&base, 14, 7, 9).unwrap();
        for code in [
            dope_partial(&base, &lifted, &DopingSpec::new(vec![0, 1], h74())).unwrap(),
            dope_conventional(&base, 2, &ComponentCode::spc(3).unwrap(), &lifted).unwrap(),
        ] {
            let text = code.pcm().pcm().to_alist();
            let json = serde_json::to_string(&code.sidecar()).unwrap();
            let back = PdGldpcCode::from_parts(
                SparsePcm::from_alist(&text).unwrap(),
                serde_json::from_str(&json).unwrap(),
            )
            .unwrap();
            assert_eq!(back, code);
        }
    }

    #[test]
    fn parallel_degree_two_nodes_form_cycle() {
        let base = BaseMatrix::from_rows(vec![vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        let r = typical_dmin_check(&base, &[]);
        assert!(!r.ok);
        assert_eq!(r.witness.as_ref().map(Vec::len), Some(2));
        assert!(typical_dmin_check(&base, &[0, 1]).ok);
        assert!(!typical_dmin_check(&base, &[0]).ok);
    }

    #[test]
    fn double_edge_fails() {
        let base = BaseMatrix::from_rows(vec![vec![2, 1, 1], vec![0, 1, 1]]).unwrap();
        assert_eq!(typical_dmin_check(&base, &[]).witness, Some(vec![0]));
    }

    #[test]
    fn necessary_bounds() {
        assert_eq!(necessary_doping_bound(400, 200, 15, 11).unwrap(), 19);
        assert_eq!(necessary_doping_bound(400, 300, 15, 11).unwrap(), 10);
        assert_eq!(necessary_doping_bound(400, 400, 15, 11).unwrap(), 1);
    }

    #[test]
    fn transforms() {
        let code = h1511();
        let cases = [
            ([240, 114, 17, 3, 0, 26], 5, [165, 134, 47, 23, 5, 26]),
            ([287, 85, 3, 2, 0, 23], 9, [152, 121, 57, 38, 9, 23]),
            ([341, 38, 2, 3, 0, 16], 14, [131, 94, 86, 59, 14, 16]),
        ];
        let degs = [2, 3, 4, 5, 6, 20];
        for (p, y, c) in cases {
            let dp = DegreeCountVector::from_counts(&degs, &p).unwrap();
            let dc = DegreeCountVector::from_counts(&degs, &c).unwrap();
            assert_eq!(degree_transform(&dp, &code, y).unwrap(), dc);
            assert_eq!(degree_transform_inverse(&dc, &code, y).unwrap(), dp);
        }
        let reg = DegreeCountVector::new([(2, 400)]).unwrap();
        let dc = degree_transform(&reg, &code, 19).unwrap();
        assert_eq!(dc, DegreeCountVector::from_counts(&[2, 3, 4, 5, 6], &[115, 76, 114, 76, 19]).unwrap());
        assert_eq!(degree_transform(&reg, &code, 0).unwrap(), reg);
        assert!(degree_transform(&reg, &code, 27).is_err());
    }
}
