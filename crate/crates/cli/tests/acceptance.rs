//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use agdistill::csscode::{certify_dual_distance, logical_z_ops, quantum_params, syndrome, DEFAULT_SUBSET_CAP};
use agdistill::decoder::{build_decoder, oracle_decode, DegA1Choice, DEFAULT_ORACLE_CAP};
use agdistill::distill::{analytic_bound, overhead_report, simulate, ErrorModel};
use agdistill::gf2e::{Fe, Field};
use agdistill::phasepoly::decomposition;
use agdistill::selfdual::paper_basis_s10;
use agdistill::statecheck::{teleport_ccz_check, teleport_u_check, twirl_check, TELEPORT_TOL, TWIRL_TOL};
use agdistill::triortho::{is_triorthogonal, transversality_check, TriorthogonalMatrix, VerifyMode};
use agdistill_cli::manifest::default_basis;
use agdistill_cli::{build, ConstructArgs, Preset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn preset(p: Preset) -> agdistill_cli::Built {
    let args = ConstructArgs { preset: Some(p), curve: None, a: None, k: None, seed: 0, out: PathBuf::new() };
    build(&args).unwrap_or_else(|e| panic!("construct {p:?}: {e}"))
}

fn workers() -> usize {
    std::env::var("AGDISTILL_THREADS").ok().and_then(|v| v.parse().ok()).unwrap_or(0)
}

fn peak_rss_mib() -> Option<f64> {
    let s = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = s.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

const LISTED_CZ: [[u64; 2]; 20] = [
    [1, 2], [1, 5], [1, 7], [1, 10], [2, 3], [2, 6], [2, 8], [3, 4], [3, 7], [3, 9],
    [4, 5], [4, 8], [4, 10], [5, 6], [5, 9], [6, 7], [6, 10], [7, 8], [8, 9], [9, 10],
];
const LISTED_CCZ: [[u64; 3]; 70] = [
    [1, 2, 3], [1, 2, 5], [1, 2, 6], [1, 2, 8], [1, 2, 9], [1, 2, 10], [1, 3, 4], [1, 3, 5],
    [1, 3, 8], [1, 3, 9], [1, 4, 5], [1, 4, 6], [1, 4, 10], [1, 5, 10], [1, 6, 7], [1, 6, 9],
    [1, 7, 8], [1, 7, 9], [1, 7, 10], [1, 8, 10], [1, 9, 10], [2, 3, 4], [2, 3, 6], [2, 3, 7],
    [2, 3, 9], [2, 3, 10], [2, 4, 5], [2, 4, 6], [2, 4, 9], [2, 4, 10], [2, 5, 6], [2, 5, 7],
    [2, 7, 8], [2, 7, 10], [2, 8, 9], [2, 8, 10], [3, 4, 5], [3, 4, 7], [3, 4, 8], [3, 4, 10],
    [3, 5, 6], [3, 5, 7], [3, 5, 10], [3, 6, 7], [3, 6, 8], [3, 8, 9], [3, 9, 10], [4, 5, 6],
    [4, 5, 8], [4, 5, 9], [4, 6, 7], [4, 6, 8], [4, 7, 8], [4, 7, 9], [4, 9, 10], [5, 6, 7],
    [5, 6, 9], [5, 6, 10], [5, 7, 8], [5, 7, 9], [5, 8, 9], [5, 8, 10], [6, 7, 8], [6, 7, 10],
    [6, 8, 9], [6, 8, 10], [6, 9, 10], [7, 8, 9], [7, 9, 10], [8, 9, 10],
];

fn as_sets(v: &serde_json::Value, key: &str) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = v[key]
        .as_array()
        .unwrap_or_else(|| panic!("missing {key}"))
        .iter()
        .map(|x| match x.as_array() {
            Some(a) => a.iter().map(|y| y.as_u64().unwrap()).collect(),
            None => vec![x.as_u64().unwrap()],
        })
        .collect();
    out.sort();
    out
}

/// 1. Listed 10-qubit decomposition via the CLI, exact, < 5 s.
fn criterion_1() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_agdistill"))
        .args(["decompose", "--basis", "paper"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(out.status.success(), format!("exit {:?}", out.status.code()))?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let z = as_sets(&v, "z");
    let cz = as_sets(&v, "cz");
    let ccz = as_sets(&v, "ccz");
    check(z == (1..=10).map(|i| vec![i]).collect::<Vec<_>>(), format!("Z set {z:?}"))?;
    check(cz == LISTED_CZ.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), "CZ set differs")?;
    check(ccz == LISTED_CCZ.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), "CCZ set differs")?;
    check(v["c"] == 70, format!("C = {}", v["c"]))?;
    check(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!("Z=10 CZ=20 CCZ=70 exact, C=70, {:.2}s < 5s", elapsed.as_secs_f64()))
}

/// 2. Field layer, exact, < 10 s.
fn criterion_2() -> Outcome {
    let start = Instant::now();
    let f = Field::with_default(10).map_err(|e| e.to_string())?;
    let poly = |exps: &[u32]| Fe(exps.iter().fold(0u16, |a, &e| a | 1 << e));
    let prod = f.mul(poly(&[0, 6, 8]), poly(&[1, 5]));
    check(prod == poly(&[3, 4, 5, 6, 7, 9]), format!("product {:#x}", prod.0))?;
    let ones = f.elements().filter(|&x| f.trace(x) == 1).count();
    check(ones == 512, format!("trace ones {ones}"))?;

    let f32 = Field::with_default(5).map_err(|e| e.to_string())?;
    let all: Vec<Fe> = f32.elements().collect();
    for &a in &all {
        check(f32.multinomial7_check(&[a]), format!("m=1 fails at {a:?}"))?;
        for &b in &all {
            check(f32.multinomial7_check(&[a, b]), format!("m=2 fails at {a:?},{b:?}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..10_000 {
        let len = rng.gen_range(3..=8);
        let y: Vec<Fe> = (0..len).map(|_| Fe(rng.gen_range(0..32))).collect();
        check(f32.multinomial7_check(&y), format!("random list {i} fails"))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("product ok, trace 512/512, multinomial 1056 + 10^4 lists, {:.2}s < 10s", elapsed.as_secs_f64()))
}

/// 3. Small pipeline, exact, < 2 min.
fn criterion_3(t: &TriorthogonalMatrix) -> Outcome {
    let start = Instant::now();
    check((t.n, t.m, t.k) == (30, 5, 1), format!("(n,m,k)=({},{},{})", t.n, t.m, t.k))?;
    let r = is_triorthogonal(t, VerifyMode::Exhaustive);
    check(r.pass && r.triples_checked == 125 && r.pairs_checked == 25, format!("{r:?}"))?;
    let f = &t.field;
    let l = logical_z_ops(t);
    for a in 0..t.k {
        for b in 0..t.k {
            let want = if a == b { Fe::ONE } else { Fe::ZERO };
            check(f.dot(t.rows.row(a), l.rows.row(b)) == want, "logical duality")?;
        }
    }
    check(certify_dual_distance(f, &t.g0(), 5, DEFAULT_SUBSET_CAP) == Ok(true), "dual distance 5")?;
    let p = quantum_params(t).map_err(|e| e.to_string())?;
    check(p.d_lower == 5 && p.t == 2, format!("d={} t={}", p.d_lower, p.t))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(120), format!("took {elapsed:?}"))?;
    Ok(format!("n=30 m=5, 125 triples + 25 pairs, 27405 subsets, d=5 t=2, {:.2}s < 120s", elapsed.as_secs_f64()))
}

/// 4. Every error of weight 1..=2 decoded exactly; oracle agreement on 10^3 cosets; < 30 min.
fn criterion_4(t: &TriorthogonalMatrix) -> Outcome {
    let start = Instant::now();
    let dec = build_decoder(t, 2, DegA1Choice::Scan).map_err(|e| e.to_string())?;
    let (n, q) = (t.n, t.field.q() as u16);
    let mut count = 0usize;
    let mut e = vec![Fe::ZERO; n];
    let decode_exact = |e: &[Fe]| -> Result<(), String> {
        let r = dec.decode(&syndrome(t, e).map_err(|x| x.to_string())?);
        if r.matched && r.e_hat == e {
            Ok(())
        } else {
            Err(format!("decode fails on {e:?}"))
        }
    };
    for i in 0..n {
        for vi in 1..q {
            e[i] = Fe(vi);
            decode_exact(&e)?;
            count += 1;
            for j in i + 1..n {
                for vj in 1..q {
                    e[j] = Fe(vj);
                    decode_exact(&e)?;
                    count += 1;
                }
                e[j] = Fe::ZERO;
            }
        }
        e[i] = Fe::ZERO;
    }
    check(count == 418_965, format!("enumerated {count}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let r = t.m - t.k;
    let mut decodable = 0;
    for _ in 0..1000 {
        let s: Vec<Fe> = (0..r).map(|_| Fe(rng.gen_range(0..q))).collect();
        let o = oracle_decode(t, &s, 2, DEFAULT_ORACLE_CAP).map_err(|e| e.to_string())?;
        let d = dec.decode(&s);
        if o.matched {
            decodable += 1;
            check(d.matched && d.e_hat == o.e_hat, format!("disagree on syndrome {s:?}"))?;
        } else {
            let w = d.e_hat.iter().filter(|x| !x.is_zero()).count();
            check(!d.matched || w > 2, format!("decoder beat oracle on {s:?}"))?;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(1800), format!("took {elapsed:?}"))?;
    Ok(format!(
        "418965/418965 exact, oracle agrees on 1000 cosets ({decodable} within radius), {:.1}s < 1800s",
        elapsed.as_secs_f64()
    ))
}

/// 5. Upper 95% Wilson bound of block failure below the union bound at p = 0.02, 0.05.
fn criterion_5(t: &TriorthogonalMatrix) -> Outcome {
    let start = Instant::now();
    let dec = build_decoder(t, 2, DegA1Choice::Scan).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (p, seed) in [(0.02, 502u64), (0.05, 505)] {
        let rep = simulate(t, &dec, ErrorModel::Iid { p }, 1_000_000, seed, workers(), 1)
            .map_err(|e| e.to_string())?;
        let bound = analytic_bound(30, 2, p, 1);
        check((bound - 4060.0 * p * p * p).abs() < 1e-12, format!("bound {bound}"))?;
        check(rep.ci_high <= bound, format!("p={p}: upper CI {} > bound {bound}", rep.ci_high))?;
        parts.push(format!("p={p}: eps={:.3e} ci_hi={:.3e} <= {bound:.4e}", rep.epsilon, rep.ci_high));
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(600), format!("took {elapsed:?}"))?;
    Ok(format!("{}, 10^6 trials each, {:.1}s < 600s", parts.join("; "), elapsed.as_secs_f64()))
}

/// 6. Hermitian F_256, a=500, k=100, < 1 h.
fn criterion_6(b: &agdistill_cli::Built, built_in: Duration) -> Outcome {
    let start = Instant::now() - built_in;
    let t = &b.matrix;
    let r = is_triorthogonal(t, VerifyMode::Sampled { trials: 100_000, seed: 6 });
    check(r.pass, format!("{} violations", r.violations.len()))?;
    check(transversality_check(t, 10_000, 6), "transversality")?;
    check(b.params.d_lower == 162 && b.params.t == 20, format!("d={} t={}", b.params.d_lower, b.params.t))?;
    let dec = build_decoder(t, 20, DegA1Choice::Fixed(b.manifest.params.deg_a1)).map_err(|e| e.to_string())?;
    let rep = simulate(t, &dec, ErrorModel::FixedWeight { weight: 20 }, 10_000, 6, workers(), 1)
        .map_err(|e| e.to_string())?;
    check(rep.block_failures == 0, format!("{} failures", rep.block_failures))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(3600), format!("took {elapsed:?}"))?;
    Ok(format!(
        "n={} m={} d=162 t=20, 10^5 triples, 10^4 transversality, 0/10^4 weight-20 failures, {:.1}s < 3600s",
        t.n, t.m, elapsed.as_secs_f64()
    ))
}

/// 7. Hermitian F_1024, a=2232, k=620; budget 12 h and 16 GiB.
fn criterion_7(b: &agdistill_cli::Built, built_in: Duration) -> Outcome {
    let start = Instant::now() - built_in;
    let t = &b.matrix;
    let p = &b.params;
    check(p.genus == 496 && p.a == 2232 && p.k == 620, format!("{p:?}"))?;
    check(p.m == 1737 && p.d_lower == 622 && p.t == 62, format!("m={} d={} t={}", p.m, p.d_lower, p.t))?;
    check(p.d_lower > 5 * 496 / 4, "d below 621")?;
    let r = is_triorthogonal(t, VerifyMode::Sampled { trials: 10_000, seed: 7 });
    check(r.pass, format!("{} violations", r.violations.len()))?;
    check(transversality_check(t, 1_000, 7), "transversality")?;
    let elapsed = start.elapsed();
    let rss = peak_rss_mib();
    check(elapsed < Duration::from_secs(12 * 3600), format!("wall time {elapsed:?} over 12 h"))?;
    if let Some(m) = rss {
        check(m < 16.0 * 1024.0, format!("peak RSS {m:.0} MiB over 16 GiB"))?;
    }
    Ok(format!(
        "n={} m=1737 d=622>=621 t=62, 10^4 triples, 10^3 transversality, {:.1}s, peak RSS {} MiB",
        t.n,
        elapsed.as_secs_f64(),
        rss.map_or("n/a".into(), |m| format!("{m:.0}"))
    ))
}

/// 8. Dense state checks, < 1 min.
fn criterion_8() -> Outcome {
    let start = Instant::now();
    let u = teleport_u_check(8);
    let c = teleport_ccz_check(8);
    check(u < TELEPORT_TOL, format!("teleport U deviation {u:e}"))?;
    check(c < TELEPORT_TOL, format!("teleport CCZ deviation {c:e}"))?;
    let tw = (0..100).map(twirl_check).fold(0.0, f64::max);
    check(tw < TWIRL_TOL, format!("twirl off-diagonal {tw:e}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("U {u:.1e} < 1e-10, CCZ {c:.1e} < 1e-10, twirl {tw:.1e} < 1e-12 over 100 densities"))
}

/// 9. Overhead arithmetic C n / k per artifact.
fn criterion_9(artifacts: &[(&str, &TriorthogonalMatrix)]) -> Outcome {
    let mut parts = Vec::new();
    for &(name, t) in artifacts {
        let basis = default_basis(&t.field, 0).map_err(|e| e.to_string())?;
        let c = decomposition(&t.field, &basis).map_err(|e| e.to_string())?.c();
        let o = overhead_report(t.n, t.k, c).map_err(|e| e.to_string())?;
        check(o.zeta == c * t.n && o.xi == t.k, format!("{name}: {o:?}"))?;
        check((o.ratio - (c * t.n) as f64 / t.k as f64).abs() < 1e-9, format!("{name}: ratio"))?;
        parts.push(format!("{name} C={c} ratio={:.2}", o.ratio));
    }
    let f = Field::with_default(10).map_err(|e| e.to_string())?;
    let listed = paper_basis_s10(&f).map_err(|e| e.to_string())?;
    check(decomposition(&f, &listed).map_err(|e| e.to_string())?.c() == 70, "C_conv 70")?;
    check(overhead_report(30, 0, 1).is_err(), "k=0 accepted")?;
    Ok(parts.join(", "))
}

fn run(id: usize, what: &str, f: impl FnOnce() -> Outcome) -> bool {
    let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
    });
    match res {
        Ok(detail) => {
            println!("criterion {id} PASS [{what}] {detail}");
            true
        }
        Err(why) => {
            println!("criterion {id} FAIL [{what}] {why}");
            false
        }
    }
}

fn main() {
    let small = preset(Preset::Small).matrix;
    let mut ok = true;
    ok &= run(1, "10-qubit gate decomposition", criterion_1);
    ok &= run(2, "field layer", criterion_2);
    ok &= run(3, "small pipeline", || criterion_3(&small));
    ok &= run(4, "decoder exactness", || criterion_4(&small));
    ok &= run(5, "Monte Carlo vs union bound", || criterion_5(&small));
    let timed = |p| {
        let start = Instant::now();
        catch_unwind(|| preset(p)).map(|b| (b, start.elapsed()))
    };
    let mid = timed(Preset::Mid);
    ok &= run(6, "F_256 construction", || match &mid {
        Ok((b, d)) => criterion_6(b, *d),
        Err(_) => Err("construct failed".into()),
    });
    let big = timed(Preset::Paper);
    ok &= run(7, "F_1024 construction", || match &big {
        Ok((b, d)) => criterion_7(b, *d),
        Err(_) => Err("construct failed".into()),
    });
    ok &= run(8, "state checks", criterion_8);
    ok &= run(9, "overhead arithmetic", || {
        let mut arts = vec![("small", &small)];
        for (name, b) in [("mid", &mid), ("paper", &big)] {
            arts.push((name, &b.as_ref().map_err(|_| format!("{name} construct failed"))?.0.matrix));
        }
        criterion_9(&arts)
    });
    if !ok {
        std::process::exit(1);
    }
}
