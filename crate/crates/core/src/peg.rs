//! Progressive edge-growth construction of protograph base matrices.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protograph::{BaseMatrix, DegreeCountVector};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PegConfig {
    pub n_c: usize,
    pub n_v: usize,
    /// Column `j` receives the `j`-th smallest degree.
    pub target_degrees: DegreeCountVector,
    pub rng_seed: u64,
    pub max_retries: usize,
    /// Column processing order. Defaults to ascending degree (column index).
    #[serde(default)]
    pub order: Option<Vec<usize>>,
    /// Degree-2 columns that must stay cycle free among themselves.
    #[serde(default)]
    pub forest_cols: Vec<usize>,
}

impl PegConfig {
    pub fn new(n_c: usize, n_v: usize, target_degrees: DegreeCountVector, rng_seed: u64) -> Self {
        PegConfig {
            n_c,
            n_v,
            target_degrees,
            rng_seed,
            max_retries: 16,
            order: None,
            forest_cols: Vec::new(),
        }
    }

    pub fn with_forest(mut self, cols: Vec<usize>) -> Self {
        self.forest_cols = cols;
        self
    }

    pub fn with_order(mut self, order: Vec<usize>) -> Self {
        self.order = Some(order);
        self
    }

    fn validate(&self) -> Result<Vec<usize>> {
        if self.n_c == 0 || self.n_v == 0 {
            return Err(Error::InvalidDegrees("empty dimensions".into()));
        }
        if self.target_degrees.total() != self.n_v {
            return Err(Error::InvalidDegrees(format!(
                "degree counts sum to {}, expected n_v = {}",
                self.target_degrees.total(),
                self.n_v
            )));
        }
        // Parallel edges are only forced on a single-check protograph.
        if self.n_c > 1 && self.target_degrees.max_degree() > self.n_c {
            return Err(Error::InvalidDegrees(format!(
                "degree {} exceeds n_c = {}",
                self.target_degrees.max_degree(),
                self.n_c
            )));
        }
        if self.target_degrees.edges() < 2 * self.n_c {
            return Err(Error::InvalidDegrees(format!(
                "{} edges cannot give {} checks degree >= 2",
                self.target_degrees.edges(),
                self.n_c
            )));
        }
        let order = match &self.order {
            None => (0..self.n_v).collect(),
            Some(o) => {
                let mut seen = vec![false; self.n_v];
                if o.len() != self.n_v || o.iter().any(|&j| j >= self.n_v || std::mem::replace(&mut seen[j], true)) {
                    return Err(Error::InvalidArgument("order is not a permutation of the columns".into()));
                }
                o.clone()
            }
        };
        Ok(order)
    }
}

/// Builds a base matrix with exactly the requested column degrees.
///
/// Each edge of a variable node goes to a check node that is unreachable from
/// it in the current graph or, if every check is reachable, one at maximum
/// distance; among those the check of smallest current degree wins, ties
/// broken uniformly at random.
pub fn peg_build(cfg: &PegConfig) -> Result<BaseMatrix> {
    let order = cfg.validate()?;
    let degrees = cfg.target_degrees.column_assignment();
    let mut forest = vec![false; cfg.n_v];
    for &j in &cfg.forest_cols {
        if j >= cfg.n_v || degrees[j] != 2 {
            return Err(Error::InvalidArgument(format!("forest column {j} is not a degree-2 column")));
        }
        forest[j] = true;
    }
    let mut last_err = None;
    for attempt in 0..=cfg.max_retries {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        rng.set_stream(attempt as u64);
        let b = build_once(cfg.n_c, cfg.n_v, &degrees, &order, &forest, &mut rng);
        match b.validate() {
            Ok(()) => return Ok(b),
            Err(e) => last_err = Some(e),
        }
    }
    Err(Error::Infeasible(format!(
        "PEG failed after {} attempts: {}",
        cfg.max_retries + 1,
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn build_once(
    n_c: usize,
    n_v: usize,
    degrees: &[usize],
    order: &[usize],
    forest: &[bool],
    rng: &mut ChaCha8Rng,
) -> BaseMatrix {
    let mut b = BaseMatrix::unchecked(n_c, n_v, vec![0; n_c * n_v]);
    let mut vn_adj: Vec<Vec<usize>> = vec![Vec::new(); n_v];
    let mut cn_adj: Vec<Vec<usize>> = vec![Vec::new(); n_c];
    let mut cn_deg = vec![0usize; n_c];

    let mut depth = vec![usize::MAX; n_c];
    let mut vn_seen = vec![false; n_v];
    let mut queue = VecDeque::new();
    let mut candidates = Vec::new();
    let mut comp: Vec<usize> = (0..n_c).collect();

    for &j in order {
        for k in 0..degrees[j] {
            candidates.clear();
            if k == 0 {
                candidates.extend(0..n_c);
            } else {
                // BFS over the current graph from v_j
                depth.fill(usize::MAX);
                vn_seen.fill(false);
                queue.clear();
                vn_seen[j] = true;
                for &c in &vn_adj[j] {
                    if depth[c] == usize::MAX {
                        depth[c] = 0;
                        queue.push_back(c);
                    }
                }
                while let Some(c) = queue.pop_front() {
                    for &v in &cn_adj[c] {
                        if std::mem::replace(&mut vn_seen[v], true) {
                            continue;
                        }
                        for &c2 in &vn_adj[v] {
                            if depth[c2] == usize::MAX {
                                depth[c2] = depth[c] + 1;
                                queue.push_back(c2);
                            }
                        }
                    }
                }
                let root = forest[j].then(|| find(&mut comp, vn_adj[j][0]));
                let mut allowed = |c: usize| root.is_none_or(|r| find(&mut comp, c) != r);
                candidates.extend((0..n_c).filter(|&c| depth[c] == usize::MAX && allowed(c)));
                if candidates.is_empty() {
                    let deepest = (0..n_c)
                        .filter(|&c| depth[c] != usize::MAX && b.get(c, j) == 0 && allowed(c))
                        .map(|c| depth[c])
                        .max();
                    candidates.extend((0..n_c).filter(|&c| Some(depth[c]) == deepest && b.get(c, j) == 0));
                    candidates.retain(|&c| allowed(c));
                }
                if candidates.is_empty() {
                    // every check already adjacent: parallel edge is forced
                    candidates.extend(0..n_c);
                }
            }
            let min_deg = candidates.iter().map(|&c| cn_deg[c]).min().unwrap_or(0);
            candidates.retain(|&c| cn_deg[c] == min_deg);
            let c = candidates[rng.gen_range(0..candidates.len())];
            b.set(c, j, b.get(c, j) + 1);
            if !vn_adj[j].contains(&c) {
                vn_adj[j].push(c);
                cn_adj[c].push(j);
            }
            cn_deg[c] += 1;
        }
        if forest[j] && vn_adj[j].len() == 2 {
            let (a, c) = (find(&mut comp, vn_adj[j][0]), find(&mut comp, vn_adj[j][1]));
            comp[a] = c;
        }
    }
    b
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}
