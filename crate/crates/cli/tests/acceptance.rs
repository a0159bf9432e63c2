//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run a subset with `cargo test -p gldpc-cli --test acceptance -- 2 7`.
//! Failures are reported but only fail the process when
//! `ACCEPTANCE_STRICT=1` is set.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use gldpc::component::exit_oracle;
use gldpc::doping::{degree_transform, dope_partial, DopingSpec};
use gldpc::ensemble::{
    construct_regular, optimize_ensemble, realize_and_sweep, DeConfig, RegularDesign, RegularOutcome,
};
use gldpc::protograph::{validate_ensemble, Rate};
use gldpc::seeds::substream;
use gldpc::sim::{block_erasures, Decoder};
use gldpc::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn near(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn h(m: usize) -> ComponentCode {
    ComponentCode::hamming(m, true).unwrap()
}

const SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
const PEXIT_TOL: f64 = 1e-4;

fn ldpc_threshold(base: &BaseMatrix) -> f64 {
    threshold(&PexitCode::ldpc(base), PEXIT_TOL, &PexitLimits::default()).unwrap().epsilon_star
}

fn peg_threshold(n_c: usize, counts: &[(usize, usize)], seed: u64) -> f64 {
    let counts = DegreeCountVector::new(counts.iter().copied()).unwrap();
    let base = peg_build(&PegConfig::new(n_c, 400, counts, substream(seed, "peg", 0))).unwrap();
    ldpc_threshold(&base)
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in [3, 4] {
        let code = h(m);
        let table = ExitTable::new(&code);
        for k in 0..=100 {
            let ia = k as f64 / 100.0;
            let d = (table.exit(ia) - exit_oracle(&code, ia).unwrap()).abs();
            let d2 = (table.exit_closed_form(ia).unwrap() - exit_oracle(&code, ia).unwrap()).abs();
            worst = worst.max(d).max(d2);
        }
    }
    (worst <= 1e-9, format!("max |EXIT - oracle| over (7,4),(15,11) x 101 points = {worst:.2e}"))
}

/// Per-y medians over the seeds and their argmax.
fn regular_sweep(rate: Rate, range: (usize, usize)) -> (BTreeMap<usize, f64>, usize) {
    let mut per_y: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for s in SEEDS {
        let mut d = RegularDesign::new(2, h(4), 400, rate, s);
        d.y_range = Some(range);
        let out: RegularOutcome = construct_regular(&d).unwrap();
        for c in out.candidates {
            per_y.entry(c.y).or_default().push(c.threshold.epsilon_star);
        }
    }
    let med: BTreeMap<usize, f64> = per_y.into_iter().map(|(y, v)| (y, median(v))).collect();
    let arg = med.iter().max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0))).map(|(&y, _)| y).unwrap();
    (med, arg)
}

fn criterion_2() -> Outcome {
    let tol = 0.005;
    let mut ok = true;
    let mut notes = Vec::new();
    let mut report = |name: &str, got: f64, want: f64| {
        let pass = near(got, want, tol);
        ok &= pass;
        notes.push(format!("{name} {got:.4}/{want}{}", if pass { "" } else { " (off)" }));
    };
    let half = Rate::new(1, 2);
    let quarter = Rate::new(1, 4);
    report("(3,6)", median(SEEDS.iter().map(|&s| peg_threshold(200, &[(3, 400)], s)).collect()), 0.429);
    let (med, arg) = regular_sweep(half, (19, 22));
    report("PD y=19", med[&19], 0.444);
    report(
        "irr 1/2",
        median(SEEDS.iter().map(|&s| peg_threshold(200, &[(2, 115), (3, 76), (4, 114), (5, 76), (6, 19)], s)).collect()),
        0.4234,
    );
    report("(3,4)", median(SEEDS.iter().map(|&s| peg_threshold(300, &[(3, 400)], s)).collect()), 0.647);
    let (med4, arg4) = regular_sweep(quarter, (10, 13));
    report("PD y=10", med4[&10], 0.6935);
    report(
        "irr 1/4",
        median(SEEDS.iter().map(|&s| peg_threshold(300, &[(2, 250), (3, 40), (4, 60), (5, 40), (6, 10)], s)).collect()),
        0.6883,
    );
    let fmt = |m: &BTreeMap<usize, f64>| m.iter().map(|(y, t)| format!("{y}:{t:.4}")).collect::<Vec<_>>().join(" ");
    notes.push(format!("argmax 1/2 = {arg} [{}]", fmt(&med)));
    notes.push(format!("argmax 1/4 = {arg4} [{}]", fmt(&med4)));
    ok &= arg == 19 && arg4 == 10;
    (ok, notes.join("; "))
}

struct TableRow {
    y_max: usize,
    lambda: [f64; 6],
    rho: [f64; 2],
    de: f64,
    g_c: f64,
    g_c_counts: [usize; 6],
    g_p_counts: [usize; 5],
    y_opt: usize,
    pd: f64,
}

fn table_rows() -> Vec<TableRow> {
    vec![
        TableRow {
            y_max: 5,
            lambda: [0.2049, 0.2489, 0.1150, 0.074, 0.0210, 0.3363],
            rho: [0.9735, 0.0265],
            de: 0.4815,
            g_c: 0.4620,
            g_c_counts: [165, 134, 47, 23, 5, 26],
            g_p_counts: [240, 114, 17, 3, 26],
            y_opt: 5,
            pd: 0.4699,
        },
        TableRow {
            y_max: 10,
            lambda: [0.1894, 0.2255, 0.1431, 0.1191, 0.0357, 0.2872],
            rho: [0.9908, 0.0012],
            de: 0.4696,
            g_c: 0.4523,
            g_c_counts: [152, 121, 57, 38, 9, 23],
            g_p_counts: [287, 85, 3, 2, 23],
            y_opt: 9,
            pd: 0.4638,
        },
        TableRow {
            y_max: 15,
            lambda: [0.1632, 0.1758, 0.2143, 0.1827, 0.0543, 0.2098],
            rho: [0.9940, 0.0060],
            de: 0.4476,
            g_c: 0.4352,
            g_c_counts: [131, 94, 86, 59, 14, 16],
            g_p_counts: [341, 38, 2, 3, 16],
            y_opt: 14,
            pd: 0.4534,
        },
    ]
}

fn criterion_3() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for row in table_rows() {
        let e = EnsembleDistribution::normalized(
            [2, 3, 4, 5, 6, 20].into_iter().zip(row.lambda),
            [8, 9].into_iter().zip(row.rho),
        )
        .unwrap();
        let de = de_threshold(&e, 1e-5).unwrap();
        let cfg = DeConfig::new(row.y_max, 20, 9, 400, Rate::new(1, 2), h(4), 0);
        let s = realize_and_sweep(&e, &cfg).unwrap();
        let pd = s.best().threshold.epsilon_star;
        let g_p = DegreeCountVector::from_counts(&[2, 3, 4, 5, 20], &row.g_p_counts).unwrap();
        let printed_c = DegreeCountVector::from_counts(&[2, 3, 4, 5, 6, 20], &row.g_c_counts).unwrap();
        let transform_ok = degree_transform(&g_p, &h(4), row.y_opt).is_ok_and(|d| d == printed_c);
        let row_ok = near(de, row.de, 0.002)
            && near(s.g_c_threshold.epsilon_star, row.g_c, 0.006)
            && s.y_opt == row.y_opt
            && near(pd, row.pd, 0.006)
            && transform_ok;
        ok &= row_ok;
        notes.push(format!(
            "y_max={}: DE {de:.4}/{} G_c {:.4}/{} y_opt {}/{} PD {pd:.4}/{} transform {}",
            row.y_max,
            row.de,
            s.g_c_threshold.epsilon_star,
            row.g_c,
            s.y_opt,
            row.y_opt,
            row.pd,
            if transform_ok { "exact" } else { "MISMATCH" }
        ));
    }
    (ok, notes.join("; "))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let cfg = DeConfig::new(5, 20, 9, 400, Rate::new(1, 2), h(4), 0);
    let out = optimize_ensemble(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let recheck = de_threshold(&out.ensemble, cfg.tol).unwrap();
    let bounds_ok = out.ensemble.lambda.values().chain(out.ensemble.rho.values()).all(|&v| (0.0..=1.0).contains(&v));
    let feasible = out.constraints.satisfied()
        && bounds_ok
        && validate_ensemble(&out.ensemble, cfg.rate)
        && out.ensemble.lambda.keys().all(|d| [2, 3, 4, 5, 6, 20].contains(d))
        && out.ensemble.rho.keys().all(|d| [8, 9].contains(d));
    let ok = out.threshold >= 0.475 && recheck >= 0.475 && feasible && secs <= 900.0;
    (
        ok,
        format!(
            "threshold {:.4} (recheck {recheck:.4}), constraints {:?} exact={feasible}, {secs:.0} s",
            out.threshold, out.constraints
        ),
    )
}

/// Small random PD code with `n <= 2000`.
fn random_code(seed: u64) -> PdGldpcCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_v = rng.gen_range(6..=14);
    let n_c = rng.gen_range(3..=n_v / 2 + 1);
    let d2 = rng.gen_range(n_v / 3..=n_v - 1);
    let counts = DegreeCountVector::new([(2, d2), (3, n_v - d2)]).unwrap();
    let base = peg_build(&PegConfig::new(n_c, n_v, counts, seed)).unwrap();
    let m = rng.gen_range(3..=4);
    let code = ComponentCode::hamming(m, rng.gen_bool(0.5)).unwrap();
    let mu = code.mu();
    let lifted = lift(&base, mu * rng.gen_range(1..=4), mu, seed).unwrap();
    let doped: Vec<usize> = (0..n_v).filter(|&j| base.col_degree(j) == 2 && rng.gen_bool(0.4)).collect();
    dope_partial(&base, &lifted, &DopingSpec::new(doped, code.clone()))
        .or_else(|_| dope_partial(&base, &lifted, &DopingSpec::new(vec![], code)))
        .unwrap()
}

fn reference_peeling(pcm: &SparsePcm, erasures: &[usize]) -> Vec<usize> {
    let mut erased = vec![false; pcm.cols()];
    for &c in erasures {
        erased[c] = true;
    }
    loop {
        let mut changed = false;
        for r in 0..pcm.rows() {
            let left: Vec<u32> = pcm.row(r).iter().copied().filter(|&c| erased[c as usize]).collect();
            if left.len() == 1 {
                erased[left[0] as usize] = false;
                changed = true;
            }
        }
        if !changed {
            return (0..pcm.cols()).filter(|&c| erased[c]).collect();
        }
    }
}

fn criterion_5() -> Outcome {
    let (mut violations, mut peel_mismatch, mut successes, mut max_n) = (0, 0, 0, 0);
    for seed in 0..1000u64 {
        let code = random_code(seed);
        let n = code.pcm().cols();
        max_n = max_n.max(n);
        let eps = 0.1 + 0.4 * (seed % 11) as f64 / 10.0;
        let e = block_erasures(n, eps, seed, 0);
        let o = decode_block(&code, &e, DecoderMode::Gldpc).unwrap();
        if o.success {
            successes += 1;
            if !erasure_rank_oracle(&code, &e).unwrap() {
                violations += 1;
            }
        }
        let p = Decoder::new(&code, DecoderMode::Peeling, usize::MAX).decode(&e).unwrap();
        if p.residual != reference_peeling(code.pcm().pcm(), &e) {
            peel_mismatch += 1;
        }
    }
    (
        violations == 0 && peel_mismatch == 0 && max_n <= 2000,
        format!(
            "1000 codes (n <= {max_n}): {successes} iterative successes, {violations} without ML support, \
             {peel_mismatch} peeling mismatches"
        ),
    )
}

fn random_protograph(rng: &mut ChaCha8Rng) -> BaseMatrix {
    loop {
        let n_v = rng.gen_range(2..=12);
        let n_c = rng.gen_range(2..=6);
        let mut rows = vec![vec![0u32; n_v]; n_c];
        for j in 0..n_v {
            let deg = if rng.gen_bool(0.7) { 2 } else { rng.gen_range(1..=4) };
            for _ in 0..deg {
                rows[rng.gen_range(0..n_c)][j] += 1;
            }
        }
        if let Ok(b) = BaseMatrix::from_rows(rows) {
            return b;
        }
    }
}

/// Cycle search by DFS over the check multigraph of undoped degree-2 nodes.
fn dfs_has_cycle(base: &BaseMatrix, doped: &[bool]) -> bool {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); base.n_c()];
    for j in 0..base.n_v() {
        if doped[j] || base.col_degree(j) != 2 {
            continue;
        }
        let ends: Vec<usize> = base.col_neighbors(j).flat_map(|(c, k)| std::iter::repeat_n(c, k as usize)).collect();
        adj[ends[0]].push((ends[1], j));
        if ends[0] != ends[1] {
            adj[ends[1]].push((ends[0], j));
        }
    }
    fn visit(adj: &[Vec<(usize, usize)>], c: usize, via: Option<usize>, seen: &mut [bool]) -> bool {
        seen[c] = true;
        adj[c].iter().any(|&(d, e)| Some(e) != via && (seen[d] || visit(adj, d, Some(e), seen)))
    }
    let mut seen = vec![false; base.n_c()];
    (0..base.n_c()).any(|c| !seen[c] && visit(&adj, c, None, &mut seen))
}

/// A witness must be undoped degree-2 nodes whose edges meet every check an
/// even number of times.
fn witness_is_cycle(base: &BaseMatrix, doped: &[bool], w: &[usize]) -> bool {
    let mut parity = vec![0u32; base.n_c()];
    for &j in w {
        if doped[j] || base.col_degree(j) != 2 {
            return false;
        }
        for (c, k) in base.col_neighbors(j) {
            parity[c] += k;
        }
    }
    !w.is_empty() && parity.iter().all(|p| p % 2 == 0)
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(substream(0, "dmin", 0));
    let (mut subsets, mut disagree, mut bad_witness) = (0u64, 0u64, 0u64);
    for _ in 0..200 {
        let base = random_protograph(&mut rng);
        let deg2: Vec<usize> = (0..base.n_v()).filter(|&j| base.col_degree(j) == 2).collect();
        for mask in 0u32..1 << deg2.len() {
            let cols: Vec<usize> = (0..deg2.len()).filter(|k| mask >> k & 1 == 1).map(|k| deg2[k]).collect();
            let mut doped = vec![false; base.n_v()];
            cols.iter().for_each(|&j| doped[j] = true);
            let got = typical_dmin_check(&base, &cols);
            subsets += 1;
            if got.ok == dfs_has_cycle(&base, &doped) {
                disagree += 1;
            }
            if !got.ok && !got.witness.as_deref().is_some_and(|w| witness_is_cycle(&base, &doped, w)) {
                bad_witness += 1;
            }
        }
    }
    (
        disagree == 0 && bad_witness == 0,
        format!("{subsets} doping subsets of 200 protographs: {disagree} disagreements, {bad_witness} invalid witnesses"),
    )
}

fn undoped(base: &BaseMatrix, n: usize, seed: u64) -> PdGldpcCode {
    let lifted = lift(base, n, 1, substream(seed, "lift", 0)).unwrap();
    dope_partial(base, &lifted, &DopingSpec::new(vec![], h(4))).unwrap()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let seed = 0;
    let n = 15;
    let mut d = RegularDesign::new(2, h(4), 400, Rate::new(1, 2), seed);
    d.y_range = Some((19, 22));
    let design = construct_regular(&d).unwrap();
    let best = design.best();
    let eps_star = best.threshold.epsilon_star;
    let pd = dope_partial(
        &best.base,
        &lift(&best.base, n, 15, substream(seed, "lift", 0)).unwrap(),
        &DopingSpec::leftmost(best.y, h(4)),
    )
    .unwrap();
    let peg = |n_c: usize, counts: &[(usize, usize)]| {
        let c = DegreeCountVector::new(counts.iter().copied()).unwrap();
        peg_build(&PegConfig::new(n_c, 400, c, substream(seed, "peg", 0))).unwrap()
    };
    let irregular = undoped(&peg(200, &[(2, 115), (3, 76), (4, 114), (5, 76), (6, 19)]), n, seed);
    let regular = undoped(&peg(200, &[(3, 400)]), n, seed);
    let codes = [("PD", &pd), ("irregular", &irregular), ("(3,6)", &regular)];
    let mut wins = 0;
    let mut notes = vec![format!("n = {}, eps* = {eps_star:.4}", pd.pcm().cols())];
    for k in [3, 2, 1] {
        let eps = ((eps_star - 0.01 * k as f64) * 1e4).round() / 1e4;
        let res: Vec<SimResult> = codes
            .iter()
            .map(|(_, c)| {
                let mut cfg = SimConfig::new(eps, substream(seed, "sim", k));
                cfg.max_blocks = 10_000;
                cfg.target_errors = u64::MAX;
                cfg.workers = std::thread::available_parallelism().map_or(1, |p| p.get());
                run_bler(c, &cfg).unwrap()
            })
            .collect();
        let separated = res[1..].iter().all(|r| res[0].ci_high < r.ci_low);
        wins += usize::from(separated);
        notes.push(format!(
            "eps {eps}: {} [{}]",
            codes
                .iter()
                .zip(&res)
                .map(|((name, _), r)| format!("{name} {}/{} [{:.1e},{:.1e}]", r.block_errors, r.blocks_run, r.ci_low, r.ci_high))
                .collect::<Vec<_>>()
                .join(", "),
            if separated { "separated" } else { "overlap" }
        ));
    }
    notes.push(format!("{:.0} s", start.elapsed().as_secs_f64()));
    (wins >= 2, notes.join("; "))
}

fn gldpc(args: &[&str], cwd: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gldpc")).args(args).current_dir(cwd).output().unwrap()
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let steps: [&[&str]; 3] = [
        &["construct", "--mode", "regular", "--N", "15", "--seed", "3", "--y-range", "19:20", "--out", "design"],
        &[
            "simulate", "--pcm", "design/code.alist", "--sidecar", "design/doping.json", "--eps", "0.40:0.46:0.03",
            "--target-errors", "20", "--max-blocks", "300", "--seed", "3", "--out", "sim",
        ],
        &["threshold", "--sidecar", "design/doping.json", "--out", "thr"],
    ];
    for s in steps {
        let o = gldpc(s, p);
        if !o.status.success() {
            return (false, format!("{} failed: {}", s[0], String::from_utf8_lossy(&o.stderr)));
        }
    }
    let mut compared = 0;
    for (run, files) in [
        ("design", &["code.alist", "code.gpcm", "base.json", "doping.json", "report.json"][..]),
        ("sim", &["bler.csv", "bler.json"][..]),
        ("thr", &["threshold.json"][..]),
    ] {
        let manifest = p.join(run).join("manifest.json");
        let again = format!("{run}_replay");
        let o = gldpc(&["--workers", "2", "replay", manifest.to_str().unwrap(), "--out", &again], p);
        if !o.status.success() {
            return (false, format!("replay of {run} failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
        for f in files {
            let a = std::fs::read(p.join(run).join(f)).unwrap();
            let b = std::fs::read(p.join(&again).join(f)).unwrap();
            if a != b {
                return (false, format!("{run}/{f} differs after replay"));
            }
            compared += 1;
        }
    }
    (true, format!("{compared} files byte-identical after replay (with a different worker count)"))
}

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(usize, &str, fn() -> Outcome); 8] = [
        (1, "GC EXIT vs enumeration", criterion_1),
        (2, "threshold reproduction", criterion_2),
        (3, "ensemble table reproduction", criterion_3),
        (4, "DE optimizer quality", criterion_4),
        (5, "decoder/ML consistency", criterion_5),
        (6, "typical-dmin checker", criterion_6),
        (7, "finite-length ordering", criterion_7),
        (8, "manifest replay determinism", criterion_8),
    ];
    let mut failed = 0;
    for (k, name, f) in criteria {
        if !wanted.is_empty() && !wanted.contains(&k) {
            continue;
        }
        let t = Instant::now();
        let (ok, detail) = f();
        failed += usize::from(!ok);
        println!(
            "criterion {k} ({name}): {} | {detail} | {:.1} s",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("{failed} criteria failed");
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
