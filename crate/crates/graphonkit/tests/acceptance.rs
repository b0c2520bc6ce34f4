//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use graphonkit_core::cutnorm::{self, cut_norm_exact};
use graphonkit_core::exact::{ExactStepGraphon, Q};
use graphonkit_core::math::derive_seed;
use graphonkit_core::metrics::{self, Metric, Mode, Options};
use graphonkit_core::sampler::{self, GraphMode};
use graphonkit_core::{gallery, ops, Coupling, Mass, StepGraphon};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, || format!("took {:.1} s, limit {limit} s", elapsed.as_secs_f64()))
}

fn random_symmetric(rng: &mut ChaCha8Rng, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let x = rng.random_range(lo..hi);
            v[i * k + j] = x;
            v[j * k + i] = x;
        }
    }
    v
}

fn random_graphon(rng: &mut ChaCha8Rng, max_k: usize, lo: f64, hi: f64) -> StepGraphon {
    let k = rng.random_range(1..=max_k);
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.5)).collect();
    let ambient = if rng.random::<bool>() { Mass::Infinite } else { Mass::Finite(w.iter().sum::<f64>() + 1.0) };
    StepGraphon::from_flat(w, random_symmetric(rng, k, lo, hi), ambient).unwrap()
}

fn naive_cut(a: &[Q], k: usize) -> Q {
    let zero = Q::from_integer(0);
    let mut best = zero;
    for s in 0u32..1 << k {
        for t in 0u32..1 << k {
            let mut acc = zero;
            for i in (0..k).filter(|i| s >> i & 1 == 1) {
                for j in (0..k).filter(|j| t >> j & 1 == 1) {
                    acc += a[i * k + j];
                }
            }
            let abs = if acc < zero { -acc } else { acc };
            best = best.max(abs);
        }
    }
    best
}

fn c1_oracle_equivalence() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..200 {
        let k = rng.random_range(1..=6usize);
        let w: Vec<i64> = (0..k).map(|_| rng.random_range(1..=5)).collect();
        let mut v = vec![0i64; k * k];
        for i in 0..k {
            for j in i..k {
                let x = rng.random_range(-5..=5);
                v[i * k + j] = x;
                v[j * k + i] = x;
            }
        }
        let e = ExactStepGraphon::from_integers(w.clone(), 1, v.clone(), 1, None).unwrap();
        let a: Vec<Q> = (0..k * k).map(|ij| Q::from_integer((w[ij / k] * w[ij % k] * v[ij]) as i128)).collect();
        let naive = naive_cut(&a, k);
        let gray = e.cut_norm().unwrap();
        ensure(gray == naive, || format!("case {case}: Gray {gray} vs naive {naive}"))?;
        let float = cut_norm_exact(&e.to_step_graphon()).unwrap().value;
        ensure(Q::from_integer(float as i128) == naive && float.fract() == 0.0, || format!("case {case}: float {float} vs {naive}"))?;
    }
    within(start.elapsed(), 10.0)?;
    Ok(format!("200 cases in {:.2} s", start.elapsed().as_secs_f64()))
}

fn c2_cut_below_l1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut nonneg = 0;
    for case in 0..500 {
        let signed = case % 2 == 0;
        let w = random_graphon(&mut rng, 10, if signed { -2.0 } else { 0.0 }, 2.0);
        let c = cut_norm_exact(&w).unwrap().value;
        let l1 = w.l1_norm();
        ensure(c <= l1 + 1e-12, || format!("case {case}: cut {c} > l1 {l1}"))?;
        if w.is_nonnegative() {
            nonneg += 1;
            ensure((c - l1).abs() <= 1e-12, || format!("case {case}: nonnegative cut {c} vs l1 {l1}"))?;
        }
    }
    Ok(format!("500 graphons, {nonneg} non-negative"))
}

fn atom(v: f64) -> StepGraphon {
    StepGraphon::new(vec![1.0], vec![vec![v]], Mass::Finite(1.0)).unwrap()
}

fn c3_edp() -> Check {
    let (w1, w2) = (atom(1.0), atom(-1.0));
    let id = Coupling::northwest_corner(&[1.0], &[1.0]);
    let (e1, e2) = (w1.trivial_extension(Mass::Finite(1.0)), w2.trivial_extension(Mass::Finite(1.0)));
    let swap = Coupling::from_assignment(&[1, 0], &[1.0, 1.0], &[1.0, 1.0]).unwrap();
    for p in [1.0, 1.5, 2.0, 3.0] {
        let m = if p == 1.0 { Metric::L1 } else { Metric::Lp(p) };
        let forced = metrics::coupling_objective(&w1, &w2, &id, m, cutnorm::K_EXACT).unwrap().0;
        ensure(forced == 2.0, || format!("p = {p}: forced identity gives {forced}"))?;
        let swapped = metrics::coupling_objective(&e1, &e2, &swap, m, cutnorm::K_EXACT).unwrap().0;
        let target = 2f64.powf(1.0 / p);
        ensure((swapped - target).abs() <= 1e-12, || format!("p = {p}: transposition gives {swapped}, want {target}"))?;
    }
    let d1 = metrics::delta_1(&e1, &e2, &Options::default()).unwrap().value;
    ensure(d1 <= 2.0, || format!("delta_1 on the extension is {d1}"))?;
    let claims = gallery::verify("edp", 0).unwrap();
    ensure(gallery::all_hold(&claims), || gallery::claims_table(&claims))?;
    Ok(format!("forced 2, transposition 2^(1/p), extended delta_1 = {d1}"))
}

fn c4_epconv() -> Check {
    for n in 1..=10usize {
        let e = gallery::epconv_graphon(n).unwrap();
        let c = e.cut_norm().unwrap();
        ensure(c == Q::from_integer(1), || format!("n = {n}: cut norm {c}"))?;
        let lp = e.to_step_graphon().lp_norm(2.0).unwrap();
        let target = (n as f64).powf(-2.0 * (1.0 - 1.0 / 2.0));
        ensure((lp - target).abs() <= 1e-12, || format!("n = {n}: L2 norm {lp}, want {target}"))?;
    }
    Ok("n = 1..10".into())
}

fn c5_stretch_l1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let w = random_graphon(&mut rng, 6, -2.0, 2.0);
        let u = rng.random_range(0.05..20.0);
        let lhs = ops::stretch(&w, u).unwrap().l1_norm();
        let rhs = u * w.l1_norm();
        ensure((lhs - rhs).abs() <= 1e-12, || format!("case {case}: {lhs} vs {rhs}"))?;
    }
    Ok("100 pairs".into())
}

fn c6_graph_graphons() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = Options::with_mode(Mode::AlternatingLp, 0);
    for case in 0..50 {
        let n = rng.random_range(1..=8usize);
        let density = rng.random_range(0.1..0.9);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < density {
                    edges.push((u, v));
                }
            }
        }
        let p = sampler::graph_to_graphon(n, &edges, GraphMode::Probability).unwrap();
        let c = sampler::graph_to_graphon(n, &edges, GraphMode::Counting).unwrap();
        let d = metrics::stretched_distance(&p, &c, Metric::Cut, &opts).unwrap();
        ensure(d.value == 0.0, || format!("case {case}: distance {}", d.value))?;
        let eq = metrics::equalize_masses(&ops::normalize(&p), &ops::normalize(&c));
        let canonical = Coupling::northwest_corner(eq.w1.weights(), eq.w2.weights());
        let (v, _) = metrics::coupling_objective(&eq.w1, &eq.w2, &canonical, Metric::Cut, cutnorm::K_EXACT).unwrap();
        ensure(v == 0.0, || format!("case {case}: canonical coupling gives {v}"))?;
    }
    Ok("50 graphs".into())
}

fn three_block() -> StepGraphon {
    StepGraphon::new(
        vec![0.5, 1.0, 1.5],
        vec![vec![0.9, 0.2, 0.4], vec![0.2, 0.6, 0.1], vec![0.4, 0.1, 0.3]],
        Mass::Finite(3.0),
    )
    .unwrap()
}

fn c7_edge_expectation() -> Check {
    let start = Instant::now();
    let w = three_block();
    let (t, runs) = (3.0, 2000);
    let counts: Vec<f64> =
        (0..runs).map(|r| sampler::sample_tilde_graph(&w, t, derive_seed(70, r)).unwrap().edge_count() as f64).collect();
    let mean = counts.iter().sum::<f64>() / runs as f64;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (runs - 1) as f64;
    let se = (var / runs as f64).sqrt();
    let expected = t * t / 2.0 * w.integral();
    ensure((mean - expected).abs() <= 4.0 * se, || format!("mean {mean}, expected {expected}, se {se}"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("mean {mean:.3} vs {expected:.3} (se {se:.3}), {:.2} s", start.elapsed().as_secs_f64()))
}

fn c8_invariance() -> Check {
    let w = three_block();
    let mut notes = Vec::new();
    for u in [4.0, 0.25] {
        let r = sampler::stretch_time_invariance_check(&w, u, 2.0, 1000, 7).unwrap();
        let min_p = r.tests.iter().map(|t| t.result.p_value).fold(1.0, f64::min);
        ensure(r.pass, || format!("u = {u}: smallest p-value {min_p}"))?;
        notes.push(format!("u = {u}: min p {min_p:.3}"));
    }
    Ok(notes.join(", "))
}

fn c9_convergence_trend() -> Check {
    let w = StepGraphon::new(vec![0.5, 0.5], vec![vec![0.9, 0.2], vec![0.2, 0.6]], Mass::Finite(1.0)).unwrap();
    let mut notes = Vec::new();
    for seed in [1, 2, 3] {
        let rows = sampler::convergence_series(&w, &[2.0, 4.0, 8.0, 16.0], 50, seed).unwrap();
        let m = sampler::series_medians(&rows);
        ensure(m[3].1 < m[0].1, || format!("seed {seed}: median at 16 is {}, at 2 is {}", m[3].1, m[0].1))?;
        notes.push(format!("{:.3} -> {:.3}", m[0].1, m[3].1));
    }
    Ok(notes.join(", "))
}

fn c10_gallery() -> Check {
    let start = Instant::now();
    for name in ["ea1", "ea3", "ea3p", "eweakbad", "eurt", "enotui", "ef"] {
        let claims = gallery::verify(name, 0).unwrap();
        ensure(gallery::all_hold(&claims), || format!("{name}:\n{}", gallery::claims_table(&claims)))?;
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("7 examples in {:.2} s", start.elapsed().as_secs_f64()))
}

fn c11_bracket_soundness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..100 {
        let k = rng.random_range(1..=4usize);
        let make = |rng: &mut ChaCha8Rng| {
            StepGraphon::from_flat(vec![1.0 / k as f64; k], random_symmetric(rng, k, -1.0, 1.0), Mass::Finite(1.0)).unwrap()
        };
        let (a, b) = (make(&mut rng), make(&mut rng));
        let perm = metrics::cut_distance(&a, &b, &Options::with_mode(Mode::Permutation, 0)).unwrap();
        let gap = (a.integral() - b.integral()).abs();
        ensure(perm.value >= gap - 1e-12, || format!("case {case}: permutation {} below |integral gap| {gap}", perm.value))?;
        let mut opts = Options::with_mode(Mode::AlternatingLp, case);
        opts.warm_starts = vec![perm.coupling.clone()];
        let alt = metrics::cut_distance(&a, &b, &opts).unwrap();
        ensure(alt.value <= perm.value + 1e-9, || format!("case {case}: alternating {} above permutation {}", alt.value, perm.value))?;
        ensure(alt.value >= gap - 1e-12, || format!("case {case}: alternating {} below lower bound {gap}", alt.value))?;
    }
    Ok("100 pairs".into())
}

fn run_bin(args: &[&str], threads: &str, dir: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_graphonkit"))
        .args(args)
        .args(["--threads", threads])
        .current_dir(dir)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c12_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let big = StepGraphon::from_flat(vec![0.05; 20], random_symmetric(&mut rng, 20, -1.0, 1.0), Mass::Infinite).unwrap();
    let small = StepGraphon::from_flat(vec![0.25; 4], random_symmetric(&mut rng, 4, -1.0, 1.0), Mass::Finite(1.0)).unwrap();
    let write = |name: &str, w: &StepGraphon| {
        std::fs::write(d.join(name), graphonkit::io::graphon_text(&graphonkit::io::graphon_to_json(w))).unwrap();
    };
    write("big.json", &big);
    write("small.json", &small);
    write("tb.json", &three_block());
    let commands: &[&[&str]] = &[
        &["cutnorm", "big.json"],
        &["cutnorm", "big.json", "--heuristic", "8", "--seed", "3"],
        &["dist", "big.json", "small.json", "--metric", "cut", "--mode", "altlp", "--seed", "4", "--k-exact", "12"],
        &["dist", "small.json", "tb.json", "--metric", "l1", "--mode", "both", "--seed", "5", "--stretched"],
        &["sample", "tb.json", "--t", "6", "--seed", "9"],
        &["sample", "tb.json", "--t", "2", "--seed", "9", "--invariance", "4", "--runs", "100"],
        &["converge", "tb.json", "--tgrid", "2,4", "--runs", "6", "--seed", "2"],
        &["example", "enotui", "--n", "2", "--seed", "8"],
        &["verify", "enotui", "--seed", "8"],
        &["diag", "tails", "--family", "small.json", "tb.json", "--M", "0.5,1"],
    ];
    for cmd in commands {
        let reference = run_bin(cmd, "1", d);
        for threads in ["1", "4"] {
            let again = run_bin(cmd, threads, d);
            ensure(again == reference, || format!("{cmd:?} differs with --threads {threads}"))?;
        }
    }
    Ok(format!("{} commands, threads 1 and 4", commands.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("cut-norm oracle equivalence", c1_oracle_equivalence),
        ("cut norm below L1, equal when non-negative", c2_cut_below_l1),
        ("one-point example values", c3_edp),
        ("cut norm versus Lp for spreading constants", c4_epconv),
        ("stretching scales the L1 norm", c5_stretch_l1),
        ("graph graphons at stretched distance 0", c6_graph_graphons),
        ("mean edge count", c7_edge_expectation),
        ("stretch/time invariance of the sampler", c8_invariance),
        ("convergence trend of sampled graphs", c9_convergence_trend),
        ("gallery certificates", c10_gallery),
        ("metric bracket soundness", c11_bracket_soundness),
        ("determinism across thread counts", c12_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(f)) {
            Ok(r) => r,
            Err(e) => Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into())),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("criterion {:>2}: PASS  {name} ({note}; {secs:.2} s)", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 12 criteria pass", 12 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
