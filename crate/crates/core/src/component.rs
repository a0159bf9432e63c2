//! Hamming component codes: parity-check matrices, the exact BEC EXIT
//! function of a generalized check node and ML erasure decoding of a single
//! component block.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{rank_of_columns, BitMatrix};

/// Largest length for which the enumeration oracle is run.
pub const ORACLE_MAX_LEN: usize = 20;

/// A binary linear `(mu, kappa)` code given by an `(mu - kappa) x mu`
/// parity-check matrix. Columns are stored as `m`-bit integers, bit `r`
/// holding row `r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComponentRepr", into = "ComponentRepr")]
pub struct ComponentCode {
    mu: usize,
    kappa: usize,
    columns: Vec<u64>,
    d_min: usize,
    d_min_dual: usize,
    hamming: bool,
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    m: usize,
    columns: Vec<u64>,
}

impl TryFrom<ComponentRepr> for ComponentCode {
    type Error = Error;

    fn try_from(r: ComponentRepr) -> Result<Self> {
        ComponentCode::from_columns(r.m, r.columns)
    }
}

impl From<ComponentCode> for ComponentRepr {
    fn from(c: ComponentCode) -> Self {
        ComponentRepr {
            m: c.redundancy(),
            columns: c.columns,
        }
    }
}

impl ComponentCode {
    /// The `(2^m - 1, 2^m - 1 - m)` Hamming code. With `systematic` the last
    /// `m` columns form the identity and the information columns are the
    /// remaining nonzero vectors in ascending order.
    pub fn hamming(m: usize, systematic: bool) -> Result<Self> {
        if !(2..=8).contains(&m) {
            return Err(Error::ComponentRange(format!("hamming m={m} not in 2..=8")));
        }
        let mu = (1usize << m) - 1;
        let columns: Vec<u64> = if systematic {
            let mut info: Vec<u64> = (1..=mu as u64).filter(|v| v.count_ones() >= 2).collect();
            info.extend((0..m).map(|r| 1u64 << r));
            info
        } else {
            (1..=mu as u64).collect()
        };
        Ok(ComponentCode {
            mu,
            kappa: mu - m,
            columns,
            d_min: 3,
            d_min_dual: 1 << (m - 1),
            hamming: true,
        })
    }

    /// The `(mu, mu - 1)` single parity check code.
    pub fn spc(mu: usize) -> Result<Self> {
        if mu < 2 {
            return Err(Error::ComponentRange(format!("spc length {mu} < 2")));
        }
        Self::from_columns(1, vec![1; mu])
    }

    /// A code from explicit parity-check columns over `m` rows. The matrix
    /// must have full row rank.
    pub fn from_columns(m: usize, columns: Vec<u64>) -> Result<Self> {
        let mu = columns.len();
        if m == 0 || m > 16 || mu <= m || mu > 255 {
            return Err(Error::ComponentRange(format!("unsupported shape {m}x{mu}")));
        }
        if columns.iter().any(|&c| c >> m != 0) {
            return Err(Error::ComponentRange("column exceeds m bits".into()));
        }
        if rank_of_columns(columns.iter().copied()) != m {
            return Err(Error::ComponentRange("parity-check matrix is rank deficient".into()));
        }
        let d_min = smallest_dependent_set(&columns, m);
        let d_min_dual = (1u64..1 << m)
            .map(|msg| columns.iter().filter(|&&c| (c & msg).count_ones() % 2 == 1).count())
            .min()
            .unwrap_or(0);
        let is_hamming = {
            let mut sorted = columns.clone();
            sorted.sort_unstable();
            sorted.iter().copied().eq(1..=((1u64 << m) - 1))
        };
        Ok(ComponentCode {
            mu,
            kappa: mu - m,
            columns,
            d_min,
            d_min_dual,
            hamming: is_hamming,
        })
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Number of parity-check rows, `mu - kappa`.
    pub fn redundancy(&self) -> usize {
        self.mu - self.kappa
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn d_min_dual(&self) -> usize {
        self.d_min_dual
    }

    pub fn is_hamming(&self) -> bool {
        self.hamming
    }

    pub fn columns(&self) -> &[u64] {
        &self.columns
    }

    pub fn pcm_bit(&self, row: usize, col: usize) -> bool {
        (self.columns[col] >> row) & 1 == 1
    }

    /// Parity-check matrix as dense rows.
    pub fn pcm_rows(&self) -> Vec<Vec<u8>> {
        (0..self.redundancy())
            .map(|r| (0..self.mu).map(|c| u8::from(self.pcm_bit(r, c))).collect())
            .collect()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        self.columns.iter().map(|c| c.count_ones() as usize).collect()
    }

    /// `(weight, count)` histogram of the parity-check columns.
    pub fn column_weight_histogram(&self) -> Vec<(usize, usize)> {
        let mut h = vec![0usize; self.redundancy() + 1];
        for w in self.column_weights() {
            h[w] += 1;
        }
        h.into_iter().enumerate().filter(|&(_, c)| c > 0).collect()
    }

    /// Erasure decoding of one component word.
    ///
    /// `known_bits[k]` is read only for positions not in `erased`.
    pub fn ml_erase_decode(&self, erased: &[usize], known_bits: &[u8]) -> Result<ErasureDecode> {
        if known_bits.len() != self.mu {
            return Err(Error::InvalidArgument(format!(
                "expected {} known bits, got {}",
                self.mu,
                known_bits.len()
            )));
        }
        let mut is_erased = vec![false; self.mu];
        for &e in erased {
            if e >= self.mu || is_erased[e] {
                return Err(Error::InvalidArgument(format!("bad erased position {e}")));
            }
            is_erased[e] = true;
        }
        let m = self.redundancy();
        let syndrome = (0..self.mu)
            .filter(|&k| !is_erased[k] && known_bits[k] & 1 == 1)
            .fold(0u64, |s, k| s ^ self.columns[k]);

        let ne = erased.len();
        let mut aug = BitMatrix::zeros(m, ne + 1);
        for r in 0..m {
            for (k, &pos) in erased.iter().enumerate() {
                if self.pcm_bit(r, pos) {
                    aug.set(r, k, true);
                }
            }
            aug.set(r, ne, (syndrome >> r) & 1 == 1);
        }
        let pivots = aug.rref_limited(ne);
        let rank = pivots.len();
        if (rank..m).any(|r| aug.get(r, ne)) {
            return Err(Error::InconsistentSyndrome);
        }
        let mut resolved = Vec::new();
        let mut unresolved = Vec::new();
        let mut determined = vec![false; ne];
        for (r, &c) in pivots.iter().enumerate() {
            let weight = (0..ne).filter(|&k| aug.get(r, k)).count();
            if rank == ne || weight == 1 {
                determined[c] = true;
                resolved.push((erased[c], u8::from(aug.get(r, ne))));
            }
        }
        for (k, &pos) in erased.iter().enumerate() {
            if !determined[k] {
                unresolved.push(pos);
            }
        }
        resolved.sort_unstable();
        unresolved.sort_unstable();
        Ok(ErasureDecode { resolved, unresolved })
    }

    /// Positions of `erased` (a bit mask over the `mu <= 64` positions)
    /// determined by the parity checks when every other bit is known.
    pub fn resolvable_mask(&self, erased: u64) -> u64 {
        debug_assert!(self.mu <= 64);
        let m = self.redundancy();
        let mut rows = [0u64; 32];
        for (c, &col) in self.columns.iter().enumerate() {
            if (erased >> c) & 1 == 1 {
                let mut bits = col;
                while bits != 0 {
                    let r = bits.trailing_zeros() as usize;
                    rows[r] |= 1 << c;
                    bits &= bits - 1;
                }
            }
        }
        let rows = &mut rows[..m];
        let mut rank = 0;
        let mut remaining = erased;
        while remaining != 0 && rank < m {
            let c = remaining.trailing_zeros();
            remaining &= remaining - 1;
            let bit = 1u64 << c;
            let Some(p) = (rank..m).find(|&k| rows[k] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (k, row) in rows.iter_mut().enumerate() {
                if k != rank && *row & bit != 0 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
        if rank == erased.count_ones() as usize {
            return erased;
        }
        rows[..rank]
            .iter()
            .filter(|r| r.count_ones() == 1)
            .fold(0, |acc, r| acc | r)
    }
}

/// Outcome of [`ComponentCode::ml_erase_decode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureDecode {
    /// `(position, bit)` pairs, sorted by position.
    pub resolved: Vec<(usize, u8)>,
    pub unresolved: Vec<usize>,
}

fn smallest_dependent_set(columns: &[u64], m: usize) -> usize {
    // any m + 1 columns are dependent
    for size in 1..=m + 1 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            if idx.iter().fold(0u64, |s, &k| s ^ columns[k]) == 0 {
                return size;
            }
            // next combination
            let mut p = size;
            while p > 0 && idx[p - 1] == columns.len() - size + p - 1 {
                p -= 1;
            }
            if p == 0 {
                break;
            }
            idx[p - 1] += 1;
            for q in p..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    m + 1
}

/// Which computation produced the polynomial used by [`ExitTable::exit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitSource {
    ClosedForm,
    Oracle,
}

/// Precomputed extrinsic transfer polynomial of a component code on the BEC.
///
/// `exit(I_A) = (1/mu) sum_{h=1}^{mu} (1-I_A)^(h-1) I_A^(mu-h) c_h` with
/// `c_h = h e_h - (mu-h+1) e_(h-1)` and `e_h` the sum over all `h`-subsets
/// of parity-check columns of their rank.
#[derive(Debug, Clone)]
pub struct ExitTable {
    mu: usize,
    e_tilde: Vec<BigInt>,
    closed_coeffs: Vec<f64>,
    oracle_coeffs: Option<Vec<f64>>,
    source: ExitSource,
}

impl ExitTable {
    pub fn new(code: &ComponentCode) -> Self {
        let mu = code.mu();
        let e_tilde = if code.is_hamming() {
            hamming_e_tilde(code.redundancy())
        } else {
            enumerate_e_tilde(code)
        };
        let closed_coeffs = (1..=mu)
            .map(|h| {
                let c = BigInt::from(h) * &e_tilde[h] - BigInt::from(mu - h + 1) * &e_tilde[h - 1];
                big_to_f64(&c)
            })
            .collect::<Vec<_>>();
        let oracle_coeffs = (mu <= ORACLE_MAX_LEN).then(|| {
            oracle_counts(code)
                .into_iter()
                .map(|c| c as f64)
                .collect::<Vec<_>>()
        });
        let source = match &oracle_coeffs {
            Some(o) if o.iter().zip(&closed_coeffs).any(|(a, b)| (a - b).abs() > 1e-6 * a.abs().max(1.0)) => {
                log::warn!("closed-form EXIT coefficients of a length-{mu} code disagree with enumeration; using enumeration");
                ExitSource::Oracle
            }
            _ => ExitSource::ClosedForm,
        };
        ExitTable {
            mu,
            e_tilde,
            closed_coeffs,
            oracle_coeffs,
            source,
        }
    }

    /// Length of the component code the table was built for.
    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn source(&self) -> ExitSource {
        self.source
    }

    /// `e_0 .. e_mu`, exactly.
    pub fn e_tilde(&self) -> &[BigInt] {
        &self.e_tilde
    }

    /// Extrinsic information from the closed-form coefficients.
    pub fn exit_closed_form(&self, i_a: f64) -> Result<f64> {
        check_unit(i_a)?;
        Ok(eval_exit(&self.closed_coeffs, i_a))
    }

    /// The transfer function used by the analysis.
    #[inline]
    pub fn exit(&self, i_a: f64) -> f64 {
        match (self.source, &self.oracle_coeffs) {
            (ExitSource::Oracle, Some(o)) => eval_exit(o, i_a),
            _ => eval_exit(&self.closed_coeffs, i_a),
        }
    }
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("mutual information {x} outside [0,1]")));
    }
    Ok(())
}

/// `coeffs[h-1]` multiplies `(1-a)^(h-1) a^(mu-h)`.
fn eval_exit(coeffs: &[f64], i_a: f64) -> f64 {
    let mu = coeffs.len();
    let q = 1.0 - i_a;
    let mut total = 0.0;
    let mut qp = 1.0;
    for (k, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            total += c * qp * i_a.powi((mu - 1 - k) as i32);
        }
        qp *= q;
    }
    (total / mu as f64).clamp(0.0, 1.0)
}

fn big_to_f64(b: &BigInt) -> f64 {
    b.to_f64().unwrap_or(if b.is_negative() { f64::MIN } else { f64::MAX })
}

fn binomial(n: &BigInt, k: usize) -> BigInt {
    // n choose k for integer n >= 0
    if k == 0 {
        return BigInt::one();
    }
    if n < &BigInt::from(k) {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Gaussian binomial `[a b]_2 = prod_{i<b} (2^a - 2^i) / (2^b - 2^i)`.
fn gaussian_binomial(a: usize, b: usize) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..b {
        num *= (BigInt::one() << a) - (BigInt::one() << i);
        den *= (BigInt::one() << b) - (BigInt::one() << i);
    }
    num / den
}

/// `e_h` for the Hamming code with `m` parity rows.
///
/// The parity-check columns are all nonzero vectors of `F_2^m`. The number
/// of `h`-subsets spanning a fixed `t`-dimensional subspace follows from
/// Moebius inversion on the subspace lattice:
/// `sum_u (-1)^u 2^(u(u-1)/2) [t u]_2 C(2^(t-u) - 1, h)`, and there are
/// `[m t]_2` such subspaces.
fn hamming_e_tilde(m: usize) -> Vec<BigInt> {
    let mu = (1usize << m) - 1;
    (0..=mu)
        .map(|h| {
            let mut e = BigInt::zero();
            for t in 1..=m.min(h) {
                let mut spanning = BigInt::zero();
                for u in 0..t {
                    let pool = (BigInt::one() << (t - u)) - BigInt::one();
                    let term = (BigInt::one() << (u * u.saturating_sub(1) / 2))
                        * gaussian_binomial(t, u)
                        * binomial(&pool, h);
                    if u % 2 == 0 {
                        spanning += term;
                    } else {
                        spanning -= term;
                    }
                }
                e += BigInt::from(t) * gaussian_binomial(m, t) * spanning;
            }
            e
        })
        .collect()
}

/// `e_h` by direct summation over column subsets (small codes only).
fn enumerate_e_tilde(code: &ComponentCode) -> Vec<BigInt> {
    let mu = code.mu();
    let mut e = vec![BigInt::zero(); mu + 1];
    if mu > ORACLE_MAX_LEN {
        log::warn!("enumerating e_h for a length-{mu} non-Hamming code is infeasible; using zeros");
        return e;
    }
    for subset in 0u64..(1 << mu) {
        let rank = rank_of_columns(
            (0..mu).filter(|&k| (subset >> k) & 1 == 1).map(|k| code.columns()[k]),
        );
        e[subset.count_ones() as usize] += rank;
    }
    e
}

/// For each erasure count `s` of the other `mu - 1` positions, the number of
/// `(position, pattern)` pairs in which the position is recoverable.
fn oracle_counts(code: &ComponentCode) -> Vec<u64> {
    let mu = code.mu();
    let cols = code.columns();
    let mut counts = vec![0u64; mu];
    for j in 0..mu {
        let others: Vec<u64> = (0..mu).filter(|&k| k != j).map(|k| cols[k]).collect();
        for pattern in 0u64..(1 << (mu - 1)) {
            let erased = (0..mu - 1)
                .filter(|&k| (pattern >> k) & 1 == 1)
                .map(|k| others[k]);
            let r = rank_of_columns(erased.clone());
            if rank_of_columns(erased.chain(std::iter::once(cols[j]))) > r {
                counts[pattern.count_ones() as usize] += 1;
            }
        }
    }
    counts
}

/// Exact extrinsic information by enumerating every erasure pattern of the
/// other positions (each erased with probability `1 - i_a`).
pub fn exit_oracle(code: &ComponentCode, i_a: f64) -> Result<f64> {
    if code.mu() > ORACLE_MAX_LEN {
        return Err(Error::SizeLimit(format!(
            "enumeration oracle limited to length {ORACLE_MAX_LEN}, got {}",
            code.mu()
        )));
    }
    check_unit(i_a)?;
    let coeffs: Vec<f64> = oracle_counts(code).into_iter().map(|c| c as f64).collect();
    Ok(eval_exit(&coeffs, i_a))
}

/// Closed-form EXIT of a component code at `i_a`.
pub fn exit_closed_form(code: &ComponentCode, i_a: f64) -> Result<f64> {
    ExitTable::new(code).exit_closed_form(i_a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn hamming_shapes() {
        let h3 = ComponentCode::hamming(3, true).unwrap();
        assert_eq!((h3.mu(), h3.kappa(), h3.redundancy()), (7, 4, 3));
        let h4 = ComponentCode::hamming(4, true).unwrap();
        assert_eq!((h4.mu(), h4.kappa()), (15, 11));
        assert_eq!(h4.column_weight_histogram(), vec![(1, 4), (2, 6), (3, 4), (4, 1)]);
        assert_eq!(h4.d_min(), 3);
        assert_eq!(h4.d_min_dual(), 8);
        let h2 = ComponentCode::hamming(2, false).unwrap();
        assert_eq!((h2.mu(), h2.kappa()), (3, 1));
        assert_eq!(rank_of_columns(h2.columns().iter().copied()), 2);
        assert!(ComponentCode::hamming(1, true).is_err());
        assert!(ComponentCode::hamming(9, true).is_err());
    }

    #[test]
    fn systematic_tail_is_identity() {
        for m in 2..=6 {
            let c = ComponentCode::hamming(m, true).unwrap();
            let tail = &c.columns()[c.mu() - m..];
            assert!(tail.iter().enumerate().all(|(r, &col)| col == 1 << r));
        }
    }

    #[test]
    fn generic_constructor_recovers_hamming_parameters() {
        let h = ComponentCode::hamming(3, false).unwrap();
        let g = ComponentCode::from_columns(3, h.columns().to_vec()).unwrap();
        assert_eq!((g.d_min(), g.d_min_dual()), (3, 4));
        assert!(g.is_hamming());
        let spc = ComponentCode::spc(6).unwrap();
        assert_eq!((spc.d_min(), spc.d_min_dual(), spc.kappa()), (2, 6, 5));
        assert!(ComponentCode::from_columns(2, vec![1, 1, 1]).is_err());
    }

    #[test]
    fn exit_endpoints() {
        let h = ComponentCode::hamming(3, true).unwrap();
        let t = ExitTable::new(&h);
        assert!((t.exit_closed_form(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(t.exit_closed_form(0.0).unwrap().abs() < 1e-12);
        assert!(t.exit_closed_form(1.5).is_err());
        assert!((exit_oracle(&h, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_oracle() {
        for m in 2..=4 {
            let h = ComponentCode::hamming(m, true).unwrap();
            let t = ExitTable::new(&h);
            assert_eq!(t.source(), ExitSource::ClosedForm);
            for k in 0..=100 {
                let a = k as f64 / 100.0;
                let d = t.exit_closed_form(a).unwrap() - exit_oracle(&h, a).unwrap();
                assert!(d.abs() < 1e-9, "m={m} a={a} diff={d}");
            }
        }
    }

    #[test]
    fn oracle_by_hand_for_length_three() {
        // (3,1) code: a bit is recoverable iff at least one other bit is known,
        // so the extrinsic information is 1 - (1-p)^2.
        let h = ComponentCode::hamming(2, false).unwrap();
        for p in [0.0, 0.2, 0.5, 0.9] {
            let want = 1.0 - (1.0 - p) * (1.0 - p);
            assert!((exit_oracle(&h, p).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_matches_monte_carlo() {
        let h = ComponentCode::hamming(3, true).unwrap();
        let p = 0.9;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let j = rng.gen_range(0..7);
            let mut erased = 1u64 << j;
            for k in (0..7).filter(|&k| k != j) {
                if rng.gen::<f64>() >= p {
                    erased |= 1 << k;
                }
            }
            if h.resolvable_mask(erased) >> j & 1 == 1 {
                hits += 1;
            }
        }
        let est = hits as f64 / n as f64;
        let exact = exit_oracle(&h, p).unwrap();
        let sigma = (exact * (1.0 - exact) / n as f64).sqrt();
        assert!((est - exact).abs() < 3.0 * sigma, "est {est} exact {exact}");
    }

    #[test]
    fn exit_monotone() {
        let t = ExitTable::new(&ComponentCode::hamming(4, true).unwrap());
        let mut prev = 0.0;
        for k in 0..=1000 {
            let v = t.exit(k as f64 / 1000.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn large_hamming_closed_form_is_finite() {
        let t = ExitTable::new(&ComponentCode::hamming(8, true).unwrap());
        for a in [0.0, 0.3, 0.7, 0.99, 1.0] {
            let v = t.exit(a);
            assert!(v.is_finite() && (0.0..=1.0).contains(&v));
        }
        assert!((t.exit(1.0) - 1.0).abs() < 1e-9);
    }

    fn weight3_codewords(h: &ComponentCode) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for a in 0..7 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    let cols = h.columns();
                    if cols[a] ^ cols[b] ^ cols[c] == 0 {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn ml_decode_single_erasures() {
        let h = ComponentCode::hamming(3, true).unwrap();
        for e in 0..7 {
            let d = h.ml_erase_decode(&[e], &[0; 7]).unwrap();
            assert_eq!(d.resolved, vec![(e, 0)]);
            assert!(d.unresolved.is_empty());
        }
    }

    #[test]
    fn ml_decode_triples() {
        let h = ComponentCode::hamming(3, true).unwrap();
        let supports = weight3_codewords(&h);
        assert_eq!(supports.len(), 7);
        let mut failures = 0;
        for a in 0..7 {
            for b in a + 1..7 {
                for c in b + 1..7 {
                    let d = h.ml_erase_decode(&[a, b, c], &[0; 7]).unwrap();
                    if supports.contains(&[a, b, c]) {
                        assert_eq!(d.unresolved, vec![a, b, c]);
                        failures += 1;
                    } else {
                        assert_eq!(d.resolved.len(), 3);
                    }
                }
            }
        }
        assert_eq!(failures, 7);
    }

    #[test]
    fn ml_decode_recovers_values() {
        let h = ComponentCode::hamming(3, true).unwrap();
        // codeword with support {0,1,...}: pick any weight-3 codeword
        let [a, b, c] = weight3_codewords(&h)[0];
        let mut word = [0u8; 7];
        for p in [a, b, c] {
            word[p] = 1;
        }
        let other = (0..7).find(|p| ![a, b, c].contains(p)).unwrap();
        let d = h.ml_erase_decode(&[a, other], &word).unwrap();
        assert_eq!(d.resolved, {
            let mut v = vec![(a, 1), (other, 0)];
            v.sort();
            v
        });
    }

    #[test]
    fn ml_decode_detects_inconsistency() {
        let h = ComponentCode::hamming(3, true).unwrap();
        let mut word = [0u8; 7];
        word[0] = 1;
        assert_eq!(h.ml_erase_decode(&[], &word), Err(Error::InconsistentSyndrome));
    }

    #[test]
    fn pairs_always_resolved() {
        let h = ComponentCode::hamming(3, true).unwrap();
        for a in 0..7 {
            for b in a + 1..7 {
                assert_eq!(h.resolvable_mask(1 << a | 1 << b), 1 << a | 1 << b);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn mask_path_agrees_with_matrix_path(mask in 0u64..(1 << 15)) {
            let h = ComponentCode::hamming(4, true).unwrap();
            let erased: Vec<usize> = (0..15).filter(|&k| mask >> k & 1 == 1).collect();
            let d = h.ml_erase_decode(&erased, &[0; 15]).unwrap();
            let from_matrix = d.resolved.iter().fold(0u64, |acc, &(p, _)| acc | 1 << p);
            proptest::prop_assert_eq!(h.resolvable_mask(mask), from_matrix);
            if erased.len() < h.d_min() {
                proptest::prop_assert!(d.unresolved.is_empty());
            }
            let rank = rank_of_columns(erased.iter().map(|&k| h.columns()[k]));
            proptest::prop_assert_eq!(d.unresolved.is_empty(), rank == erased.len());
        }
    }
}
