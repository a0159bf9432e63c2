//! Copy-and-permute lifting of a base matrix.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protograph::BaseMatrix;
use crate::sparse::SparsePcm;

/// Where a row of a (possibly doped) lifted matrix came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowOrigin {
    /// Single parity check, copy of base check node `i`.
    Check(u32),
    /// Row of a generalized-check block with the given index.
    Gc(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPcm {
    pcm: SparsePcm,
    lifting: usize,
    col_origin: Vec<u32>,
    row_origin: Vec<RowOrigin>,
}

impl LiftedPcm {
    pub fn pcm(&self) -> &SparsePcm {
        &self.pcm
    }

    pub fn lifting(&self) -> usize {
        self.lifting
    }

    /// Base variable node of each column.
    pub fn col_origin(&self) -> &[u32] {
        &self.col_origin
    }

    pub fn row_origin(&self) -> &[RowOrigin] {
        &self.row_origin
    }

    pub fn rows(&self) -> usize {
        self.pcm.rows()
    }

    pub fn cols(&self) -> usize {
        self.pcm.cols()
    }

    /// Rebuilds a lifted matrix from a plain PCM in the lifted layout: column
    /// `j * n + c` is copy `c` of base node `j` and row `i * n + c` copy `c`
    /// of base check `i`.
    pub fn from_pcm(pcm: SparsePcm, lifting: usize) -> Result<Self> {
        if lifting == 0 || !pcm.cols().is_multiple_of(lifting) || !pcm.rows().is_multiple_of(lifting) {
            return Err(Error::InvalidArgument(format!(
                "{}x{} matrix is not a lifting by {lifting}",
                pcm.rows(),
                pcm.cols()
            )));
        }
        let col_origin = (0..pcm.cols()).map(|c| (c / lifting) as u32).collect();
        let row_origin = (0..pcm.rows()).map(|r| RowOrigin::Check((r / lifting) as u32)).collect();
        Ok(LiftedPcm {
            pcm,
            lifting,
            col_origin,
            row_origin,
        })
    }

    pub(crate) fn from_parts(pcm: SparsePcm, lifting: usize, col_origin: Vec<u32>, row_origin: Vec<RowOrigin>) -> Self {
        debug_assert_eq!(col_origin.len(), pcm.cols());
        debug_assert_eq!(row_origin.len(), pcm.rows());
        LiftedPcm {
            pcm,
            lifting,
            col_origin,
            row_origin,
        }
    }
}

/// Lifts `base` by `n`. Each of the `b_ij` parallel edges between check `i`
/// and variable `j` becomes a uniformly random permutation matrix; parallel
/// permutations are redrawn until they share no position. `mu` is the
/// component length the result must be compatible with (`mu | n`).
pub fn lift(base: &BaseMatrix, n: usize, mu: usize, seed: u64) -> Result<LiftedPcm> {
    if n == 0 || mu == 0 || !n.is_multiple_of(mu) {
        return Err(Error::LiftingFactor { n, mu });
    }
    let (n_c, n_v) = (base.n_c(), base.n_v());
    if let Some(bmax) = base.rows().into_iter().flatten().max() {
        if bmax as usize > n {
            return Err(Error::InvalidArgument(format!(
                "entry {bmax} cannot be lifted by {n}"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut col_adj: Vec<Vec<u32>> = vec![Vec::new(); n_v * n];
    let mut perm: Vec<u32> = (0..n as u32).collect();
    for i in 0..n_c {
        for j in 0..n_v {
            let b = base.get(i, j);
            if b == 0 {
                continue;
            }
            let used = disjoint_perms(n, b as usize, &mut perm, &mut rng);
            for (c, rows) in used.into_iter().enumerate() {
                for r in rows {
                    col_adj[j * n + c].push((i * n) as u32 + r);
                }
            }
        }
    }
    let pcm = SparsePcm::from_columns(n_c * n, col_adj)?;
    LiftedPcm::from_pcm(pcm, n)
}

fn disjoint_perms(n: usize, b: usize, perm: &mut [u32], rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let mut used: Vec<Vec<u32>> = vec![Vec::with_capacity(b); n];
    'draw: for _ in 0..64 {
        used.iter_mut().for_each(Vec::clear);
        for _ in 0..b {
            let mut ok = false;
            for _ in 0..64 {
                perm.shuffle(rng);
                if (0..n).all(|c| !used[c].contains(&perm[c])) {
                    ok = true;
                    break;
                }
            }
            if !ok {
                continue 'draw;
            }
            for c in 0..n {
                used[c].push(perm[c]);
            }
        }
        return used;
    }
    // dense multi-edges: distinct cyclic shifts under random relabelling
    let mut sigma: Vec<u32> = (0..n as u32).collect();
    sigma.shuffle(rng);
    let mut tau: Vec<usize> = (0..n).collect();
    tau.shuffle(rng);
    let mut shifts: Vec<usize> = (0..n).collect();
    shifts.shuffle(rng);
    (0..n)
        .map(|c| shifts[..b].iter().map(|s| sigma[(tau[c] + s) % n]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> BaseMatrix {
        BaseMatrix::from_rows(vec![vec![1, 2, 1, 1, 0], vec![1, 1, 0, 1, 2]]).unwrap()
    }

    #[test]
    fn degrees_scale_with_lifting() {
        let b = fig3();
        let l = lift(&b, 30, 15, 7).unwrap();
        assert_eq!((l.rows(), l.cols()), (60, 150));
        for c in 0..l.cols() {
            assert_eq!(l.pcm().col(c).len(), b.col_degree(c / 30));
        }
        for r in 0..l.rows() {
            assert_eq!(l.pcm().row(r).len(), b.row_degree(r / 30));
        }
        assert_eq!(l.pcm().nnz(), b.edge_count() * 30);
    }

    #[test]
    fn lifting_must_be_multiple_of_mu() {
        assert_eq!(lift(&fig3(), 20, 15, 0).unwrap_err(), Error::LiftingFactor { n: 20, mu: 15 });
    }

    #[test]
    fn parallel_edges_need_room() {
        assert!(lift(&fig3(), 1, 1, 0).is_err());
        assert!(lift(&fig3(), 2, 1, 0).is_ok());
    }

    #[test]
    fn dense_parallel_edges() {
        let b = BaseMatrix::from_rows(vec![vec![5, 5], vec![1, 1]]).unwrap();
        let l = lift(&b, 6, 3, 2).unwrap();
        assert!((0..12).all(|c| l.pcm().col(c).len() == 6));
    }

    #[test]
    fn deterministic_by_seed() {
        assert_eq!(lift(&fig3(), 15, 15, 3).unwrap(), lift(&fig3(), 15, 15, 3).unwrap());
        assert_ne!(lift(&fig3(), 15, 15, 3).unwrap(), lift(&fig3(), 15, 15, 4).unwrap());
    }

    #[test]
    fn alist_round_trip_preserves_layout() {
        let l = lift(&fig3(), 15, 15, 1).unwrap();
        let back = SparsePcm::from_alist(&l.pcm().to_alist()).unwrap();
        assert_eq!(LiftedPcm::from_pcm(back, 15).unwrap(), l);
    }
}
