//! Dense GF(2) matrices with rows packed into 64-bit words.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.words {
            self.data.swap(a * self.words + k, b * self.words + k);
        }
    }

    /// `row[dst] ^= row[src]`.
    fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let w = self.words;
        let (d, s) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * w);
            (&mut lo[dst * w..dst * w + w], &hi[..w])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..src * w + w])
        };
        for (x, y) in d.iter_mut().zip(s) {
            *x ^= y;
        }
    }

    /// Reduces to reduced row echelon form in place, pivoting over the first
    /// `pivot_cols` columns only. Returns the pivot columns in row order.
    pub fn rref_limited(&mut self, pivot_cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..pivot_cols.min(self.cols) {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&k| self.get(k, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for k in 0..self.rows {
                if k != r && self.get(k, c) {
                    self.xor_row(k, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_limited(self.cols)
    }

    pub fn rank(&self) -> usize {
        self.clone().rank_in_place()
    }

    /// Row-echelon rank; leaves the matrix partially reduced.
    pub fn rank_in_place(&mut self) -> usize {
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&k| self.get(k, c)) else {
                continue;
            };
            self.swap_rows(r, p);
            for k in r + 1..self.rows {
                if self.get(k, c) {
                    self.xor_row(k, r);
                }
            }
            r += 1;
        }
        r
    }
}

/// Rank of a set of column vectors each packed in a `u64` (at most 64 rows).
pub fn rank_of_columns(cols: impl IntoIterator<Item = u64>) -> usize {
    // xor basis indexed by leading bit
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for mut v in cols {
        while v != 0 {
            let top = 63 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}
