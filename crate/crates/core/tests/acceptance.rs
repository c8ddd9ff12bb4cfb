//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails. Run with
//! `cargo test -p urbasis --test acceptance`.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tempfile::TempDir;
use urbasis::bounds::{greedy_log_bounds, growth_cap, k_envelope, symmetric_sqrt_bound};
use urbasis::construction::{run_with_growth, BasisTrace};
use urbasis::growth::{GrowthSpec, Threshold};
use urbasis::intset::{ln_big, IntSet};
use urbasis::oracle::{
    brute_count, brute_rep_report, cross_check, verify_all_decompositions, verify_b_growth,
    verify_decomposition, verify_step_fields, verify_unique_window, Outcome,
};
use urbasis::tracefile::TraceFile;
use urbasis::run_greedy;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pass(o: Outcome, what: &str) -> Result<(), String> {
    match o {
        Outcome::Pass => Ok(()),
        Outcome::Fail(w) => Err(format!("{what}: {w}")),
    }
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

fn threshold_trace(spec: &str, k: usize) -> BasisTrace {
    let t: Threshold = spec.parse().expect("valid threshold");
    run_with_growth(&GrowthSpec::Threshold(t), k).expect("threshold run")
}

/// Step replay on `i64` with its own sumset scan; shares no code with the
/// library.
fn replay_greedy(steps: usize) -> Vec<Vec<i64>> {
    let mut a = vec![0i64, 1];
    let mut out = vec![a.clone()];
    while out.len() < steps {
        let sums: std::collections::BTreeSet<i64> =
            a.iter().flat_map(|x| a.iter().map(move |y| x + y)).collect();
        let c = a.iter().map(|v| v.abs()).max().unwrap();
        let mut b = 1;
        while sums.contains(&b) && sums.contains(&-b) {
            b += 1;
        }
        if !sums.contains(&b) {
            a.extend([b + 3 * c, -3 * c]);
        } else {
            a.extend([-(b + 3 * c), 3 * c]);
        }
        a.sort();
        out.push(a.clone());
    }
    out
}

fn oracle_suite(trace: &BasisTrace) -> Result<(), String> {
    pass(verify_step_fields(trace), "step fields")?;
    pass(verify_unique_window(trace), "unique window")?;
    pass(verify_all_decompositions(trace).map_err(|e| e.to_string())?, "decomposition")?;
    if trace.len() >= 2 {
        pass(verify_b_growth(trace).map_err(|e| e.to_string())?, "b growth")?;
    }
    let last = trace.last().unwrap();
    let r = 2 * &last.d;
    let report = brute_rep_report(&last.set, &-&r, &r).map_err(|e| e.to_string())?;
    ensure(report.violations.is_empty(), || format!("repeated sums at {:?}", report.violations))?;
    cross_check(&last.set, &report).map_err(|d| format!("{d:?}"))
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let t = run_greedy(3).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let want: [&[i64]; 3] = [&[0, 1], &[-4, 0, 1, 3], &[-14, -4, 0, 1, 3, 12]];
    for (s, w) in t.steps.iter().zip(want) {
        ensure(s.set == IntSet::from_i64s(w), || format!("A_{} = {}", s.k, s.set))?;
    }
    let db: Vec<(BigInt, BigInt)> = t.steps.iter().map(|s| (s.d.clone(), s.b.clone())).collect();
    ensure(db[0] == (big(1), big(1)) && db[1] == (big(4), big(2)), || format!("(d, b) = {db:?}"))?;
    ensure(t.steps[2].b == big(5), || format!("b_3 = {}", t.steps[2].b))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("A_3 = {}, b_3 = 5, {elapsed:?}", t.steps[2].set))
}

fn criterion_2() -> Verdict {
    let t = run_greedy(4).map_err(|e| e.to_string())?;
    let a4 = t.final_set().unwrap();
    let expected = IntSet::from_i64s(&[-42, -14, -4, 0, 1, 3, 12, 47]);
    ensure(a4 == &expected, || format!("A_4 = {a4}"))?;
    let replay = replay_greedy(4);
    for (s, r) in t.steps.iter().zip(&replay) {
        ensure(s.set == IntSet::from_i64s(r), || format!("step {} disagrees with replay", s.k))?;
    }
    let printed = IntSet::from_i64s(&[-84, -14, -4, 0, 1, 3, 12, 89]);
    ensure(&printed != a4, || "printed A_4 unexpectedly reproduced".into())?;
    oracle_suite(&t)?;
    Ok(format!("A_4 = {a4} matches replay, oracle suite passes"))
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let t = run_greedy(20).map_err(|e| e.to_string())?;
    let last = t.last().unwrap();
    let r = 2 * &last.d;
    let report = brute_rep_report(&last.set, &-&r, &r).map_err(|e| e.to_string())?;
    ensure(report.violations.is_empty(), || format!("violations {:?}", report.violations))?;
    pass(verify_unique_window(&t), "unique window")?;
    let inner = brute_rep_report(&last.set, &big(-10), &big(10)).map_err(|e| e.to_string())?;
    ensure((-10..=10).all(|n| inner.count(&big(n)) == 1), || "some |n| <= 10 not represented once".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "window [-{r}, {r}]: {} sums, 0 violations, |n| <= 10 unique, {elapsed:?}",
        report.counts.len()
    ))
}

fn criterion_4() -> Verdict {
    let table: Vec<String> = (1..=9).map(|e| format!("1{}", "0".repeat(e))).collect();
    let table = format!("table:{}", table.join(","));
    let mut traces = vec![("greedy".to_string(), run_greedy(20).map_err(|e| e.to_string())?)];
    for spec in ["loglog:2,4,3", "log:1,0,1", table.as_str()] {
        traces.push((spec.to_string(), threshold_trace(spec, 10)));
    }
    let mut pairs = 0;
    for (name, t) in &traces {
        for w in t.steps.windows(2) {
            let o = verify_decomposition(&w[0], &w[1]).map_err(|e| format!("{name}: {e}"))?;
            pass(o, name)?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} step pairs across {} traces", traces.len()))
}

fn criterion_5() -> Verdict {
    const K: usize = 40;
    let t = run_greedy(K).map_err(|e| e.to_string())?;
    let (ln3, ln5) = (3f64.ln(), 5f64.ln());
    let tol = 1e-9;
    let mut samples = Vec::new();
    for s in &t.steps {
        samples.push(s.d.clone());
        if let Some(c) = &s.c {
            samples.push(c.clone());
            samples.push(3 * c);
        }
    }
    for x in &samples {
        let obs = t.counting_profile(x).map_err(|e| e.to_string())? as u64;
        let exact = greedy_log_bounds(x, obs).map_err(|e| e.to_string())?;
        ensure(exact.holds, || format!("exact bound fails at x = {x}, A = {obs}"))?;
        let lx = ln_big(x);
        let (lo, hi) = (2.0 * lx / ln5 + 0.634, 2.0 * lx / ln3 + 2.0);
        ensure(lo <= obs as f64 + tol && obs as f64 <= hi + tol, || {
            format!("x = {x}: {lo} <= {obs} <= {hi} fails")
        })?;
    }
    for s in &t.steps {
        let e = k_envelope(s.k, &s.d).map_err(|e| e.to_string())?;
        ensure(e.holds, || format!("envelope fails at k = {}: c = {}", s.k, s.d))?;
    }
    Ok(format!("{} samples, envelope for k <= {K}", samples.len()))
}

fn criterion_6() -> Verdict {
    let t = threshold_trace("loglog:2,4,3", 10);
    let f = Threshold::log_log(2.0, 4.0, 3.0).map_err(|e| e.to_string())?;
    let c1 = t.steps[0].c.clone().unwrap();
    let mut samples = vec![c1.clone()];
    for w in t.steps.windows(2) {
        let (d, c, next) = (&w[0].d, w[0].c.as_ref().unwrap(), &w[1].d);
        let c3: BigInt = 3 * c;
        let mid_lo: BigInt = (d * &c3).sqrt();
        let mid_hi: BigInt = (&c3 * next).sqrt();
        samples.extend([d.clone(), d + 1, c.clone(), mid_lo, &c3 - 1, c3.clone(), &c3 + 1, mid_hi, next - 1]);
    }
    samples.push(t.last().unwrap().d.clone());
    samples.retain(|x| x >= &c1);
    samples.sort();
    samples.dedup();
    let mut tightest = f64::INFINITY;
    for x in &samples {
        let obs = t.counting_profile(x).map_err(|e| e.to_string())? as u64;
        let fx = f.eval(x);
        let row = growth_cap(fx, x, obs, f.is_exact());
        ensure(row.holds, || format!("A(-x,x) = {obs} > f(x) = {fx} at x = {x}"))?;
        tightest = tightest.min(fx - obs as f64);
    }
    Ok(format!("{} samples, d_10 has {} bits, min slack {tightest:.3e}", samples.len(), t.last().unwrap().d.bits()))
}

fn criterion_7() -> Verdict {
    let mut traces = vec![run_greedy(20).map_err(|e| e.to_string())?];
    traces.push(threshold_trace("loglog:2,4,3", 8));
    traces.push(threshold_trace("log:1,0,1", 8));
    let mut checked = 0;
    for t in &traces {
        let d_k = t.last().unwrap().d.clone();
        let mut xs: Vec<BigInt> = (1..=200).map(big).collect();
        for s in &t.steps {
            xs.extend([s.d.clone(), &s.d + 1, &s.d - 1]);
            if let Some(c) = &s.c {
                xs.extend([3 * c, 3 * c - 1]);
            }
        }
        xs.retain(|x| x >= &big(1) && x <= &d_k);
        for x in &xs {
            let obs = t.counting_profile(x).map_err(|e| e.to_string())? as u64;
            let row = symmetric_sqrt_bound(1, x, obs).map_err(|e| e.to_string())?;
            ensure(row.holds, || format!("A(-x,x) = {obs} > sqrt(8x) at x = {x}"))?;
            checked += 1;
        }
    }
    let m = 50;
    let dense = IntSet::from_i64s(&(-m..=m).collect::<Vec<_>>());
    let x = big(m);
    let obs = dense.counting_symmetric(&x).map_err(|e| e.to_string())? as u64;
    let row = symmetric_sqrt_bound(1, &x, obs).map_err(|e| e.to_string())?;
    ensure(!row.holds, || "interval [-50, 50] was accepted".into())?;
    Ok(format!("{checked} samples hold, interval [-{m}, {m}] rejected at x = {m}"))
}

fn random_set(rng: &mut StdRng) -> IntSet {
    let n = rng.gen_range(0..=200);
    match rng.gen_range(0..4) {
        0 => (0..n).map(|_| big(rng.gen_range(-50..=50))).collect(),
        1 => (0..n).map(|_| big(rng.gen_range(-2000..=2000))).collect(),
        2 => (0..n).map(|_| big(rng.gen_range(-1_000_000_000..=1_000_000_000))).collect(),
        _ => (0..n)
            .map(|_| {
                let hi: BigInt = BigInt::from(rng.gen::<u64>()) << 128;
                let v: BigInt = hi + BigInt::from(rng.gen::<u64>() % 64);
                if rng.gen() {
                    -v
                } else {
                    v
                }
            })
            .collect(),
    }
}

fn criterion_8() -> Verdict {
    const PROBES: usize = 10_000;
    const PER_SET: usize = 100;
    let mut rng = StdRng::seed_from_u64(0x5eed_0b5e);
    let mut probes = 0;
    let mut hits = 0;
    while probes < PROBES {
        let a = random_set(&mut rng);
        if a.is_empty() {
            let n = big(rng.gen_range(-10..=10));
            ensure(a.rep_count(&n) == brute_count(&a, &n), || "empty set disagrees".into())?;
            probes += 1;
            continue;
        }
        let lo = 2 * a.min().unwrap() - 3;
        let hi = 2 * a.max().unwrap() + 3;
        let report = brute_rep_report(&a, &lo, &hi).map_err(|e| e.to_string())?;
        let elems = a.as_slice();
        for i in 0..PER_SET {
            let n = match rng.gen_range(0..3) {
                0 => &elems[rng.gen_range(0..elems.len())] + &elems[rng.gen_range(0..elems.len())],
                1 => {
                    &elems[rng.gen_range(0..elems.len())] + &elems[rng.gen_range(0..elems.len())]
                        + rng.gen_range(-2..=2)
                }
                _ => &lo + BigInt::from(rng.gen::<u64>()) % (&hi - &lo + 1),
            };
            let fast = a.rep_count(&n);
            let slow = if i % 10 == 0 { brute_count(&a, &n) } else { report.count(&n) };
            ensure(fast == slow, || format!("n = {n}: rep_count {fast}, oracle {slow} on {a}"))?;
            hits += usize::from(fast > 0);
            probes += 1;
        }
    }
    Ok(format!("{probes} probes agree ({hits} with r(n) > 0)"))
}

fn criterion_9() -> Verdict {
    let mut traces = vec![
        TraceFile::new(GrowthSpec::Greedy, run_greedy(40).map_err(|e| e.to_string())?),
        TraceFile::new(
            GrowthSpec::ExplicitC(vec![big(1), big(7), big(100)]),
            run_with_growth(&GrowthSpec::ExplicitC(vec![big(1), big(7), big(100)]), 4)
                .map_err(|e| e.to_string())?,
        ),
    ];
    for spec in ["loglog:2,4,3", "table:10,100,1000"] {
        let t: Threshold = spec.parse().map_err(|e: urbasis::growth::GrowthError| e.to_string())?;
        traces.push(TraceFile::new(GrowthSpec::Threshold(t), threshold_trace(spec, 4)));
    }
    for tf in &traces {
        let text = tf.to_text();
        let back = TraceFile::parse(&text).map_err(|e| e.to_string())?;
        ensure(&back == tf && back.to_text() == text, || format!("{} does not round-trip", tf.mode))?;
    }

    let exe = env!("CARGO_BIN_EXE_urbasis");
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let modes: [&[&str]; 4] = [
        &["--greedy", "25"],
        &["--threshold", "loglog:2,4,3", "10"],
        &["--threshold", "log:1.5,0.25,2", "8"],
        &["--c-list", "[1,5,40,500]"],
    ];
    for (i, mode) in modes.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let p = dir.path().join(format!("{i}-{run}.jsonl"));
            let st = Command::new(exe).arg("build").args(*mode).arg("-o").arg(&p).output();
            let st = st.map_err(|e| e.to_string())?;
            ensure(st.status.success(), || format!("build {mode:?} failed"))?;
            outputs.push(fs::read(&p).map_err(|e| e.to_string())?);
        }
        ensure(outputs[0] == outputs[1], || format!("build {mode:?} is not deterministic"))?;
    }
    Ok(format!("{} traces round-trip, {} builds byte-identical", traces.len(), modes.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("worked example", criterion_1),
        ("A_4 erratum", criterion_2),
        ("uniqueness at K = 20", criterion_3),
        ("decomposition identity", criterion_4),
        ("greedy logarithmic envelope", criterion_5),
        ("growth cap loglog:2,4,3", criterion_6),
        ("sqrt(8x) predicate", criterion_7),
        ("rep_count vs oracle", criterion_8),
        ("round-trip and determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
