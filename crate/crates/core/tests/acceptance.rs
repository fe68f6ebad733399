//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use clique_cascade::analytic::{clustering_coefficient, extinction_probability, root_degree_pmf};
use clique_cascade::dist::{child_count_pmf, ModelParams, Pmf};
use clique_cascade::matrix::{cascade_verdict, mean_matrix, spectral_radius, VerdictKind};
use clique_cascade::sim::{estimate, replicate_key, run_contagion, GammaPrime, Sampler, SimConfig};
use clique_cascade::verify::{verify_model, CheckKind};
use common::{model, theta};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_models(seed: u64, count: usize, d_max: usize, w_max: usize) -> Vec<ModelParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| common::random_model(&mut rng, d_max, w_max, theta("0.1")))
        .collect()
}

/// Point masses, two-point mixtures and randomized pmfs with `d̄, w̄ ≤ 4`.
fn oracle_suite() -> Vec<ModelParams> {
    let mut models = Vec::new();
    for d in 1..=4 {
        for w in 2..=4 {
            models.push(model(&[(d, 1.0)], &[(w, 1.0)], "0.1"));
        }
    }
    models.push(model(&[(1, 0.5), (3, 0.5)], &[(2, 0.5), (3, 0.5)], "0.1"));
    models.push(model(&[(2, 0.5), (4, 0.5)], &[(2, 0.5), (4, 0.5)], "0.1"));
    models.push(model(&[(1, 0.3), (4, 0.7)], &[(3, 0.6), (4, 0.4)], "0.1"));
    models.push(model(&[(1, 0.5), (2, 0.5)], &[(2, 0.5), (4, 0.5)], "0.1"));
    models.extend(random_models(100, 10, 4, 4));
    models
}

const SUITE_THETAS: [&str; 4] = ["1/10", "3/10", "2/5", "49/100"];

fn worst_check(kind: CheckKind) -> Result<(f64, usize), String> {
    let mut worst = 0.0f64;
    let mut runs = 0;
    for params in oracle_suite() {
        for t in SUITE_THETAS {
            let params = params.with_theta(theta(t));
            for c in verify_model(&params).map_err(|e| e.to_string())? {
                if c.kind == kind {
                    worst = worst.max(c.value);
                    ensure(c.passed, || format!("{kind:?} = {} at w={} for {params:?}", c.value, c.clique_size))?;
                    runs += 1;
                }
            }
        }
    }
    Ok((worst, runs))
}

fn criterion_1() -> Outcome {
    let models = oracle_suite().len();
    ensure(models >= 20, || format!("only {models} models"))?;
    let (tv, sizes) = worst_check(CheckKind::CliqueLawTotalVariation)?;
    let (mismatches, _) = worst_check(CheckKind::CascadeSizeMismatches)?;
    ensure(mismatches == 0.0, || format!("{mismatches} cascade-size mismatches"))?;
    Ok(format!("{models} models x 4 thresholds, {sizes} clique laws, max TV {tv:.2e}, 0 cascade-size mismatches"))
}

fn criterion_2() -> Outcome {
    let (diff, sizes) = worst_check(CheckKind::MeanActiveChildren)?;
    Ok(format!("{sizes} clique sizes, max |m - oracle| {diff:.2e}"))
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{name} = {got}, expected {want} ± {tol}"))
}

fn criterion_3() -> Outcome {
    let cube = model(&[(3, 1.0)], &[(3, 1.0)], "1/10");
    close("C", clustering_coefficient(&cube).value, 0.2, 1e-12)?;
    let x = child_count_pmf(&cube).map_err(|e| e.to_string())?;
    ensure(x.is_point_mass_at(4), || format!("X law {x:?}"))?;
    let m = mean_matrix(&cube).map_err(|e| e.to_string())?;
    let nonzero: Vec<_> = m.nonzero().collect();
    ensure(nonzero == vec![(4, 4, 4.0)], || format!("M nonzero entries {nonzero:?}"))?;
    let v = cascade_verdict(&cube).map_err(|e| e.to_string())?;
    let rho = v.rho.unwrap_or(f64::NAN);
    close("rho", rho, 4.0, 1e-10)?;
    ensure(v.kind == VerdictKind::CascadePossible, || format!("{v:?}"))?;
    let cold = cube.with_theta(theta("3/10"));
    let m = mean_matrix(&cold).map_err(|e| e.to_string())?;
    ensure(m.nonzero().next().is_none(), || "M not zero at 3/10".into())?;
    let v = cascade_verdict(&cold).map_err(|e| e.to_string())?;
    ensure(v.kind == VerdictKind::FiniteAlmostSurely, || format!("{v:?}"))?;

    let tree = model(&[(1, 0.5), (3, 0.5)], &[(2, 1.0)], "1/10");
    let ext = extinction_probability(&tree).map_err(|e| e.to_string())?;
    close("eta", ext.eta, 1.0 / 3.0, 1e-12)?;
    close("p_ext", ext.p_ext, 5.0 / 27.0, 1e-12)?;

    let root = root_degree_pmf(&model(&[(2, 1.0)], &[(3, 1.0)], "1/10")).map_err(|e| e.to_string())?;
    ensure(root == Pmf::point(4), || format!("root degree {root:?}"))?;
    Ok(format!("C=0.2, X=4, rho={rho}, zero M at 3/10, eta={:.15}, p_ext={:.15}", ext.eta, ext.p_ext))
}

fn criterion_4() -> Outcome {
    let models = random_models(400, 10, 4, 4);
    for params in &models {
        for t in ["0.5", "0.6"] {
            let v = cascade_verdict(&params.with_theta(theta(t))).map_err(|e| e.to_string())?;
            ensure(v.kind == VerdictKind::FiniteAlmostSurely, || format!("theta {t}: {v:?} for {params:?}"))?;
        }
        let a = cascade_verdict(&params.with_theta(theta("3/10"))).map_err(|e| e.to_string())?;
        let b = cascade_verdict(&params.with_theta(theta("30/100"))).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{a:?} vs {b:?}"))?;
    }
    let v = cascade_verdict(&model(&[(2, 1.0)], &[(2, 1.0)], "0.4")).map_err(|e| e.to_string())?;
    ensure(v.kind == VerdictKind::CascadeAlmostSure, || format!("path: {v:?}"))?;
    Ok("10 models finite at 0.5 and 0.6, path model cascades surely, 3/10 = 30/100".into())
}

fn criterion_5() -> Outcome {
    let grid: Vec<_> = (1..=51u64).map(|k| theta(&format!("{k}/100"))).collect();
    for params in random_models(500, 10, 4, 4) {
        let mut last = f64::INFINITY;
        for &t in &grid {
            let rho = spectral_radius(&mean_matrix(&params.with_theta(t)).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure(rho <= last + 1e-10 * last.max(1.0), || format!("rho rose to {rho} from {last} at {t}"))?;
            last = rho;
        }
    }
    let thetas = ["0.05", "0.1", "0.15", "0.2", "0.25", "0.3", "0.4", "0.5"];
    let config = SimConfig { depth: 6, replicates: 1_000, seed: 5 };
    for params in random_models(501, 10, 3, 3) {
        let mut last = f64::INFINITY;
        for t in thetas {
            let s = estimate(&params.with_theta(theta(t)), &config).map_err(|e| e.to_string())?.survival_frequency;
            ensure(s <= last, || format!("survival rose to {s} from {last} at {t}"))?;
            last = s;
        }
    }
    Ok("rho non-increasing on 51-point grid (10 models); survival non-increasing on shared seeds (10 models)".into())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let cube = model(&[(3, 1.0)], &[(3, 1.0)], "0.1");
    let config = SimConfig { depth: 5, replicates: 100, seed: 7 };
    let hot = estimate(&cube, &config).map_err(|e| e.to_string())?.survival_frequency;
    ensure(hot == 1.0, || format!("survival {hot} at 0.1"))?;
    let cold = estimate(&cube.with_theta(theta("0.3")), &config).map_err(|e| e.to_string())?.survival_frequency;
    ensure(cold == 0.0, || format!("survival {cold} at 0.3"))?;
    let tree = model(&[(1, 0.5), (3, 0.5)], &[(2, 1.0)], "0.4");
    let alive = estimate(&tree, &SimConfig { depth: 30, replicates: 10_000, seed: 2024 })
        .map_err(|e| e.to_string())?
        .graph_alive_frequency;
    close("graph_alive_frequency", alive, 22.0 / 27.0, 0.02)?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("1.0 / 0.0 exact, graph alive at depth 30 = {alive:.4} (target 0.8148), {elapsed:.2?}"))
}

fn criterion_7() -> Outcome {
    let n = 100_000u64;
    let mut worst = 0.0f64;
    for (i, params) in random_models(700, 5, 4, 4).iter().enumerate() {
        let params = params.with_theta(theta("0.2"));
        let sampler = Sampler::new(&params).map_err(|e| e.to_string())?;
        let mut graph: BTreeMap<u64, u64> = BTreeMap::new();
        for r in 0..n {
            let mut g = sampler.local_graph(1, replicate_key(70, r));
            run_contagion(&mut g, params.theta());
            *graph.entry(g.active_by_depth()[1]).or_insert(0) += 1;
        }
        let gamma = GammaPrime::new(&params).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(7000 + i as u64);
        let mut process: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..n {
            *process.entry(gamma.sample_root(&mut rng).values().sum()).or_insert(0) += 1;
        }
        let bins: BTreeSet<u64> = graph.keys().chain(process.keys()).copied().collect();
        for k in bins {
            let fa = *graph.get(&k).unwrap_or(&0) as f64 / n as f64;
            let fb = *process.get(&k).unwrap_or(&0) as f64 / n as f64;
            let pooled = (fa + fb) / 2.0;
            let se = (pooled * (1.0 - pooled) * 2.0 / n as f64).sqrt();
            ensure((fa - fb).abs() <= 3.0 * se, || format!("model {i} bin {k}: {fa} vs {fb} (se {se:.2e})"))?;
            if se > 0.0 {
                worst = worst.max((fa - fb).abs() / se);
            }
        }
    }
    Ok(format!("5 models, 1e5 replicates, largest bin deviation {worst:.2} SE"))
}

fn criterion_8() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("model.json");
    std::fs::write(
        &cfg,
        r#"{"p": [[1, 0.3], [2, 0.3], [3, 0.4]], "q": [[2, 0.4], [3, 0.3], [4, 0.3]], "theta": "0.15",
            "sim": {"depth": 6, "replicates": 5000, "seed": 123}}"#,
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "2", "8", "1", "8"] {
        let out_path = dir.path().join(format!("report-{}.json", outputs.len()));
        let status = Command::new(env!("CARGO_BIN_EXE_clique-cascade"))
            .args(["simulate", "--config"])
            .arg(&cfg)
            .args(["--threads", threads, "--out"])
            .arg(&out_path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("simulate exited with {status}"))?;
        outputs.push(std::fs::read(&out_path).map_err(|e| e.to_string())?);
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || "reports differ between runs".into())?;
    Ok(format!("5 runs under 1/2/8 threads, {} identical bytes each", outputs[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("clique law oracle suite", criterion_1),
        ("mean active children vs enumeration", criterion_2),
        ("golden values", criterion_3),
        ("phase-transition rules", criterion_4),
        ("monotonicity in threshold", criterion_5),
        ("Monte Carlo vs analytic", criterion_6),
        ("graph vs multi-type process coupling", criterion_7),
        ("determinism across thread counts", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        if i == 0 {
            let elapsed = start.elapsed();
            if outcome.is_ok() && elapsed >= Duration::from_secs(60) {
                outcome = Err(format!("took {elapsed:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{:.2?}]", i + 1, start.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail} [{:.2?}]", i + 1, start.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
