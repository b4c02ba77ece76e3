//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits non-zero if any fails.
//!
//! Criteria 6-8 need the MNIST training files under `data/mnist/`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use awdo::nn::{self, Dataset};
use awdo::wdo::{self, Velocity};
use awdo::{
    awdo_run, mnist, BenchObjective, BenchPressure, BestTracker, Cmaes, CmaesConfig, NetworkParams,
    NetworkShape, Parcel, Position, WdoCoefficients,
};
use awdo_cli::commands::{self, AwdoRow};
use awdo_cli::{files, DatasetSource, ExperimentConfig};
use ndarray::Array2;
use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn mnist_source() -> DatasetSource {
    let dir = workspace_root().join("data/mnist");
    DatasetSource::Idx {
        images: dir.join("train-images-idx3-ubyte.gz"),
        labels: dir.join("train-labels-idx1-ubyte.gz"),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

// ---------------------------------------------------------------- 1

/// Velocity update written out term by term, one dimension at a time.
fn oracle_velocity(
    x: &[f64],
    u: &[f64],
    best: &[f64],
    rank: usize,
    [alpha, g, rt, c]: [f64; 4],
    other: &[Option<usize>],
) -> Vec<f64> {
    let i = rank as f64;
    let mut out = Vec::new();
    for d in 0..x.len() {
        let friction = (1.0 - alpha) * u[d];
        let gravity = g * x[d];
        let pull = (1.0 - 1.0 / i).abs() * rt * (best[d] - x[d]);
        let coriolis = match other[d] {
            Some(od) => c * u[od] / i,
            None => 0.0,
        };
        out.push(friction - gravity + pull + coriolis);
    }
    out
}

fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..=12);
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let u: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.3..=0.3)).collect();
        let best: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let rank = rng.random_range(1..=30);
        let (alpha, g, rt, c) = (
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=5.0),
            rng.random_range(0.0..=5.0),
        );
        // independent draw of the Coriolis source dimension
        let seed: u64 = rng.random();
        let mut draw = ChaCha8Rng::seed_from_u64(seed);
        let other: Vec<Option<usize>> = (0..dim)
            .map(|d| {
                (dim > 1).then(|| {
                    let k = draw.random_range(0..dim - 1);
                    if k >= d {
                        k + 1
                    } else {
                        k
                    }
                })
            })
            .collect();
        let want = oracle_velocity(&x, &u, &best, rank, [alpha, g, rt, c], &other);

        let parcel = Parcel {
            position: Position::clamped(x.clone()),
            velocity: Velocity::clamped(u.clone()),
            pressure: Some(0.0),
            rank,
        };
        let coeffs = WdoCoefficients::new(alpha, g, rt, c).map_err(|e| e.to_string())?;
        let tracker = BestTracker {
            position: Position::clamped(best.clone()),
            pressure: 0.0,
        };
        let got = wdo::unclamped_velocity(&parcel, &coeffs, &tracker.position, &other);
        for (a, b) in got.iter().zip(&want) {
            worst = worst.max(relative_error(*a, *b));
        }
        let clamped = wdo::update_velocity(
            &parcel,
            &coeffs,
            &tracker,
            &mut ChaCha8Rng::seed_from_u64(seed),
        );
        for (k, (a, b)) in clamped.iter().zip(&want).enumerate() {
            if a.abs() > 0.3 || relative_error(*a, b.clamp(-0.3, 0.3)) > 1e-12 {
                return Err(format!("clamped component {k}: {a} vs oracle {b}"));
            }
        }
    }
    if worst <= 1e-12 {
        Ok(format!("100 updates, max relative error {worst:.1e}"))
    } else {
        Err(format!("max relative error {worst:.3e} > 1e-12"))
    }
}

// ---------------------------------------------------------------- 2

fn random_dataset(rng: &mut ChaCha8Rng, m: usize, input: usize, classes: usize) -> Dataset<f64> {
    let x = Array2::from_shape_fn((m, input), |_| rng.random_range(0.0..=1.0));
    let labels = (0..m).map(|_| rng.random_range(0..classes)).collect();
    Dataset::new(x, labels, classes).unwrap()
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let eps = 1e-4;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let shape = NetworkShape::new(
            rng.random_range(1..=3),
            rng.random_range(1..=5),
            rng.random_range(2..=3),
        )
        .map_err(|e| e.to_string())?;
        let m = rng.random_range(1..=10);
        let data = random_dataset(&mut rng, m, shape.input, shape.output);
        let lambda = rng.random_range(0.0..=1.0);
        let params = nn::init_params(shape, -1.0, 1.0, &mut rng).map_err(|e| e.to_string())?;
        let analytic = nn::gradient(&params, &data, lambda)
            .map_err(|e| e.to_string())?
            .flatten();
        let flat = params.flatten();
        for k in 0..flat.len() {
            let at = |delta: f64| {
                let mut p = flat.clone();
                p[k] += delta;
                nn::cost(&NetworkParams::unflatten(&p, shape).unwrap(), &data, lambda).unwrap()
            };
            let numeric = (at(eps) - at(-eps)) / (2.0 * eps);
            let scale = numeric.abs().max(analytic[k].abs());
            if scale > 0.0 {
                worst = worst.max((numeric - analytic[k]).abs() / scale);
            }
        }
    }
    if worst <= 1e-6 {
        Ok(format!("20 nets, max relative error {worst:.1e}"))
    } else {
        Err(format!("max relative error {worst:.3e} > 1e-6"))
    }
}

// ---------------------------------------------------------------- 3

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let want = 10.0 * std::f64::consts::LN_2;
    let shape = NetworkShape::default();
    let mut worst = 0.0f64;
    for m in [1, 2, 7, 64, 500] {
        let data = random_dataset(&mut rng, m, shape.input, shape.output);
        let j = nn::cost(&NetworkParams::zeros(shape), &data, 0.0).map_err(|e| e.to_string())?;
        worst = worst.max((j - want).abs());
    }
    if worst <= 1e-9 {
        Ok(format!(
            "m in {{1, 2, 7, 64, 500}}, max |J - 10 ln 2| = {worst:.1e}"
        ))
    } else {
        Err(format!("|J - 10 ln 2| = {worst:.3e} > 1e-9"))
    }
}

// ---------------------------------------------------------------- 4

/// Evaluations until the best value drops below `target`, or `None` if the
/// budget runs out first.
fn cmaes_evaluations(
    f: fn(&[f64]) -> f64,
    n: usize,
    mean: f64,
    target: f64,
    budget: usize,
    seed: u64,
) -> Option<usize> {
    let lambda = 4 + (3.0 * (n as f64).ln()).floor() as usize;
    let mut es = Cmaes::new(&CmaesConfig::new(vec![mean; n], 0.5, lambda)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = 0;
    while used + lambda <= budget {
        let candidates = es.ask(&mut rng);
        let fitness: Vec<f64> = candidates.iter().map(|x| f(x)).collect();
        used += lambda;
        es.tell(&candidates, &fitness).unwrap();
        if es.best().unwrap().1 < target {
            return Some(used);
        }
    }
    None
}

fn criterion_4() -> Verdict {
    let run = |f, n, mean, target, budget| {
        let evals: Vec<f64> = (0..10)
            .map(|seed| {
                cmaes_evaluations(f, n, mean, target, budget, seed)
                    .map_or(f64::INFINITY, |e| e as f64)
            })
            .collect();
        median(evals)
    };
    let sphere = run(awdo::bench::sphere, 4, 1.0, 1e-10, 2000);
    let rosen = run(awdo::bench::rosenbrock, 5, 0.0, 1e-6, 20000);
    let msg = format!("median evaluations: sphere n=4 {sphere}, rosenbrock n=5 {rosen}");
    if sphere <= 2000.0 && rosen <= 20000.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Verdict {
    let f = BenchPressure::new(BenchObjective::Sphere, 10);
    let mut bests = Vec::new();
    for seed in 0..10 {
        let config = awdo::AwdoConfig {
            max_iterations: 2000,
            ..awdo::AwdoConfig::<f64>::new(20, seed)
        };
        bests.push(
            awdo_run(&f, 10, &config)
                .map_err(|e| e.to_string())?
                .best_pressure,
        );
    }
    let med = median(bests);
    if med < 1e-3 {
        Ok(format!("median best pressure {med:.3e}"))
    } else {
        Err(format!("median best pressure {med:.3e} >= 1e-3"))
    }
}

// ---------------------------------------------------------------- 6-8

fn mnist_config(subset: usize) -> ExperimentConfig {
    let mut config =
        ExperimentConfig::from_json(r#"{"seed": 1, "gd": {"initial_step": 3.0}}"#).unwrap();
    config.dataset = Some(mnist_source());
    config.subset_size = subset;
    config
}

fn criterion_6() -> Verdict {
    let config = mnist_config(5000);
    let data =
        commands::load_dataset(&config, NetworkShape::default()).map_err(|e| e.to_string())?;
    let run = commands::run_gd(&config, &data).map_err(|e| e.to_string())?;
    let first = run
        .history
        .iter()
        .find(|r| r.accuracy >= 0.95)
        .map(|r| r.iteration);
    let last = run.history.last().unwrap();
    let msg = format!(
        "5000 examples: accuracy {:.4} after {} iterations, first >= 0.95 at {first:?}",
        last.accuracy, last.iteration
    );
    if last.iteration <= 400 && last.accuracy >= 0.95 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn scaled_awdo(data: &Dataset<f64>) -> Result<Vec<AwdoRow>, String> {
    let mut config = mnist_config(500);
    config.awdo.population_n = 25;
    config.awdo.max_iterations = 2000;
    Ok(commands::run_awdo(&config, data)
        .map_err(|e| e.to_string())?
        .history)
}

fn criterion_7(history: &[AwdoRow]) -> Verdict {
    let last = history.last().ok_or("empty history")?;
    let msg = format!(
        "500 examples, N=25, seed 1: accuracy of best {:.3} after {} iterations",
        last.train_accuracy_of_best, last.iteration
    );
    if last.iteration == 2000 && last.train_accuracy_of_best >= 0.70 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_8(awdo_history: &[AwdoRow], data: &Dataset<f64>) -> Verdict {
    let config = mnist_config(500);
    let gd = commands::run_gd(&config, data)
        .map_err(|e| e.to_string())?
        .history;
    let mut report = String::new();
    let mut checked = 0;
    for threshold in [0.3, 0.4, 0.5, 0.6, 0.7] {
        let Some(awdo_at) = awdo_history
            .iter()
            .find(|r| r.train_accuracy_of_best >= threshold)
        else {
            continue;
        };
        let Some(gd_at) = gd.iter().find(|r| r.accuracy >= threshold) else {
            return Err(format!(
                "GD never reached {threshold} while AWDO did at {}",
                awdo_at.iteration
            ));
        };
        write!(
            report,
            " {threshold}: GD {} vs AWDO {};",
            gd_at.iteration, awdo_at.iteration
        )
        .unwrap();
        if 10 * gd_at.iteration > awdo_at.iteration {
            return Err(format!("gap below 10x:{report}"));
        }
        checked += 1;
    }
    if checked == 0 {
        return Err("AWDO reached none of the thresholds".into());
    }
    Ok(format!("iterations to accuracy{report}"))
}

// ---------------------------------------------------------------- 9

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_awdo"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "awdo {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn criterion_9() -> Verdict {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (images, labels) = match mnist_source() {
        DatasetSource::Idx { images, labels } => (images, labels),
        DatasetSource::Synthetic { .. } => unreachable!(),
    };
    let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for (rep, threads) in [(0, 1), (1, 1), (2, 2)] {
        let dir = tmp.path().join(format!("rep{rep}"));
        let config = dir.join("config.json");
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let doc = serde_json::json!({
            "seed": 42,
            "threads": threads,
            "output_dir": "out",
            "dataset": {"kind": "idx", "images": images, "labels": labels},
            "subset_size": 100,
            "awdo": {"population_n": 8, "max_iterations": 15},
            "gd": {"max_iterations": 10},
            "bench": {"dimension": 6}
        });
        std::fs::write(&config, doc.to_string()).map_err(|e| e.to_string())?;
        let c = config.to_str().unwrap();
        for (objective, optimizer) in [
            ("sphere", "awdo"),
            ("rastrigin", "awdo"),
            ("rosenbrock", "cmaes"),
        ] {
            run_cli(&["bench", objective, optimizer, "--config", c])?;
        }
        run_cli(&["train-gd", "--config", c])?;
        run_cli(&["train-awdo", "--config", c])?;
        let out = dir.join("out");
        for params in ["gd_params.bin", "awdo_params.bin"] {
            let pgm = out.join(params.replace(".bin", ".pgm"));
            run_cli(&[
                "render-weights",
                "--params",
                out.join(params).to_str().unwrap(),
                "--out",
                pgm.to_str().unwrap(),
            ])?;
        }
        let mut names: Vec<_> = std::fs::read_dir(&out)
            .map_err(|e| e.to_string())?
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        outputs.push(
            names
                .into_iter()
                .map(|n| (n.clone(), std::fs::read(out.join(&n)).unwrap()))
                .collect(),
        );
    }
    if outputs[0].len() != 9 {
        return Err(format!("expected 9 output files, got {}", outputs[0].len()));
    }
    for (rep, other) in outputs.iter().enumerate().skip(1) {
        for ((name, a), (name_b, b)) in outputs[0].iter().zip(other) {
            if name != name_b || a != b {
                return Err(format!("{name} differs in repeat {rep}"));
            }
        }
    }
    let names: Vec<&str> = outputs[0].iter().map(|(n, _)| n.as_str()).collect();
    Ok(format!(
        "3 runs (threads 1, 1, 2) byte-identical: {}",
        names.join(" ")
    ))
}

// ---------------------------------------------------------------- 10

fn property(
    name: &str,
    report: &mut Vec<String>,
    result: Result<(), String>,
) -> Result<(), String> {
    match result {
        Ok(()) => {
            report.push(name.to_string());
            Ok(())
        }
        Err(e) => Err(format!("{name}: {e}")),
    }
}

fn check<S: Strategy>(
    runner: &mut TestRunner,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn coefficient_box() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=5.0f64, 0.0..=5.0f64)
}

fn criterion_10() -> Verdict {
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    });
    let mut passed = Vec::new();

    let r = check(
        &mut runner,
        (1usize..10, 1usize..40, coefficient_box(), any::<u64>()),
        |(dim, rank, (a, g, rt, c), seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coords = |rng: &mut ChaCha8Rng, lim: f64| {
                (0..dim)
                    .map(|_| rng.random_range(-lim..=lim))
                    .collect::<Vec<_>>()
            };
            let parcel = Parcel {
                position: Position::clamped(coords(&mut rng, 1.0)),
                velocity: Velocity::clamped(coords(&mut rng, 0.3)),
                pressure: Some(1.0),
                rank,
            };
            let best = BestTracker {
                position: Position::clamped(coords(&mut rng, 1.0)),
                pressure: 0.0,
            };
            let coeffs = WdoCoefficients::new(a, g, rt, c).unwrap();
            let v = wdo::update_velocity(&parcel, &coeffs, &best, &mut rng);
            prop_assert!(v.iter().all(|u| u.abs() <= 0.3));
            let x = wdo::update_position(&parcel, &v);
            prop_assert!(x.iter().all(|p| p.abs() <= 1.0));
            Ok(())
        },
    );
    property("velocity/position clamps", &mut passed, r)?;

    let r = check(
        &mut runner,
        (0usize..3, 1usize..6, 2usize..8, any::<u64>()),
        |(obj, dim, n, seed)| {
            let f = BenchPressure::new(BenchObjective::ALL[obj], dim);
            let config = awdo::AwdoConfig {
                max_iterations: 20,
                ..awdo::AwdoConfig::<f64>::new(n, seed)
            };
            let out = awdo_run(&f, dim, &config).unwrap();
            let records = out.history.records();
            prop_assert!(records
                .windows(2)
                .all(|w| w[1].best_pressure <= w[0].best_pressure));
            prop_assert_eq!(records.last().unwrap().best_pressure, out.best_pressure);
            Ok(())
        },
    );
    property("best-so-far monotone", &mut passed, r)?;

    let r = check(
        &mut runner,
        prop::collection::vec(0u8..6, 2..30),
        |levels| {
            let mut parcels: Vec<Parcel<f64>> = levels
                .iter()
                .map(|&l| Parcel {
                    pressure: Some(l as f64),
                    ..Parcel::at_rest(Position::clamped(vec![0.0]))
                })
                .collect();
            wdo::rank_population(&mut parcels).unwrap();
            let mut ranks: Vec<usize> = parcels.iter().map(|p| p.rank).collect();
            for i in 0..parcels.len() {
                for j in 0..parcels.len() {
                    if levels[i] < levels[j] || (levels[i] == levels[j] && i < j) {
                        prop_assert!(parcels[i].rank < parcels[j].rank);
                    }
                }
            }
            ranks.sort();
            prop_assert_eq!(ranks, (1..=parcels.len()).collect::<Vec<_>>());
            Ok(())
        },
    );
    property("rank permutation", &mut passed, r)?;

    let r = check(
        &mut runner,
        (2usize..12, prop::collection::vec(any::<u16>(), 1..20)),
        |(classes, raw)| {
            let labels: Vec<usize> = raw.iter().map(|&l| l as usize % classes).collect();
            let x = Array2::<f64>::zeros((labels.len(), 3));
            let data = Dataset::new(x, labels.clone(), classes).unwrap();
            for (row, &label) in data.targets().rows().into_iter().zip(&labels) {
                prop_assert_eq!(row.iter().filter(|&&v| v == 1.0).count(), 1);
                prop_assert_eq!(row.iter().filter(|&&v| v == 0.0).count(), classes - 1);
                prop_assert_eq!(row[label], 1.0);
            }
            Ok(())
        },
    );
    property("one-hot", &mut passed, r)?;

    let r = check(
        &mut runner,
        (1usize..8, 1usize..8, 1usize..8, any::<u64>()),
        |(i, h, o, seed)| {
            let shape = NetworkShape::new(i, h, o).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let flat: Vec<f64> = (0..shape.param_count())
                .map(|_| rng.random_range(-10.0..10.0))
                .collect();
            let params = NetworkParams::unflatten(&flat, shape).unwrap();
            prop_assert_eq!(params.flatten(), flat.clone());
            prop_assert!(NetworkParams::unflatten(&flat[1..], shape).is_err());
            let decoded = files::decode_params(&files::encode_params(&flat)).unwrap();
            prop_assert_eq!(decoded, flat);
            Ok(())
        },
    );
    property("flatten round-trip", &mut passed, r)?;

    let r = check(
        &mut runner,
        (1usize..5, 1usize..9, 1usize..9, any::<u64>()),
        |(count, rows, cols, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let images = mnist::IdxImages {
                count,
                rows,
                cols,
                pixels: (0..count * rows * cols).map(|_| rng.random()).collect(),
            };
            let labels: Vec<u8> = (0..count).map(|_| rng.random_range(0..10)).collect();
            prop_assert_eq!(
                mnist::parse_idx_images(&mnist::write_idx_images(&images)).unwrap(),
                images
            );
            prop_assert_eq!(
                mnist::parse_idx_labels(&mnist::write_idx_labels(&labels)).unwrap(),
                labels
            );
            Ok(())
        },
    );
    property("IDX round-trip", &mut passed, r)?;

    let r = check(
        &mut runner,
        (any::<u64>(), -5.0..5.0f64),
        |(seed, spread)| {
            let shape = NetworkShape::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let flat: Vec<f64> = (0..shape.param_count())
                .map(|_| spread * rng.random_range(-1.0..=1.0))
                .collect();
            let pgm =
                files::render_hidden_weights(&NetworkParams::unflatten(&flat, shape).unwrap())
                    .unwrap();
            let header = b"P5\n104 104\n255\n";
            prop_assert_eq!(&pgm[..header.len()], &header[..]);
            prop_assert_eq!(pgm.len(), header.len() + 104 * 104);
            Ok(())
        },
    );
    property("PGM 104x104", &mut passed, r)?;

    Ok(passed.join(", "))
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, started: Instant, verdict: Verdict| {
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(msg) => println!("criterion {n:>2}: PASS ({secs:.1}s) {msg}"),
            Err(msg) => {
                failures += 1;
                println!("criterion {n:>2}: FAIL ({secs:.1}s) {msg}");
            }
        }
    };
    type Check = fn() -> Verdict;
    let quick: [(usize, Check); 5] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
    ];
    for (n, f) in quick {
        let t = Instant::now();
        report(n, t, f());
    }

    let t = Instant::now();
    report(6, t, criterion_6());

    let t = Instant::now();
    let scaled = commands::load_dataset(&mnist_config(500), NetworkShape::default())
        .map_err(|e| e.to_string());
    let awdo_history = scaled.clone().and_then(|data| scaled_awdo(&data));
    report(7, t, awdo_history.clone().and_then(|h| criterion_7(&h)));
    let t = Instant::now();
    report(
        8,
        t,
        scaled.and_then(|data| awdo_history.and_then(|h| criterion_8(&h, &data))),
    );

    let t = Instant::now();
    report(9, t, criterion_9());
    let t = Instant::now();
    report(10, t, criterion_10());

    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
