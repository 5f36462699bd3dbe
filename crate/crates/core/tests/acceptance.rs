//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Criteria run one after another so the timing
//! check is not disturbed by the others.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{random_line, random_subtree, random_tree};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use treeline::io::DatasetFile;
use treeline::oracle::{
    objective_by_enumeration, oracle_pc, project_by_enumeration, project_union_by_enumeration,
};
use treeline::synth::{synth_trees, SynthConfig};
use treeline::{
    distance, explained_curve, explained_variation, linreg, pc_treelines, project, project_union,
    BinaryTree, TreeDataset,
};

const ORACLE_DATASETS: usize = 200;
const ORACLE_MAX_TREES: usize = 8;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const PROJECTION_PAIRS: usize = 1000;
const UNION_CASES: usize = 500;
const METRIC_TRIPLES: usize = 10_000;
const CONCAVITY_RUNS: usize = 100;
const SCALING_SMALL: usize = 100_000;
const SCALING_LARGE: usize = 200_000;
const SCALING_RUNS: usize = 5;
const SCALING_MAX_RATIO: f64 = 2.5;
const REG_T: f64 = 2.1213203435596424;
const REG_T_TOL: f64 = 1e-9;
// two-sided Student-t tail at t = 3/sqrt(2), df = 3, frozen from scipy
const REG_P: f64 = 0.12402706265755457;
const REG_P_TOL: f64 = 1e-6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_equivalence() -> Outcome {
    let clock = Instant::now();
    for seed in 0..ORACLE_DATASETS as u64 {
        let mut r = rng(seed);
        let n = r.gen_range(1..=ORACLE_MAX_TREES);
        let p = r.gen_range(0.3..0.9);
        // depth 3: indices 1..=15
        let trees = (0..n).map(|_| random_tree(&mut r, 3, p, 1.0)).collect();
        let data = TreeDataset::new(trees).map_err(|e| e.to_string())?;
        let start = if seed % 4 == 3 {
            BinaryTree::empty()
        } else {
            data.intersection()
        };
        let fast = pc_treelines(&data, &start, 3).map_err(|e| e.to_string())?;
        let slow = oracle_pc(&data, &start, 3).map_err(|e| e.to_string())?;
        for k in 1..=3 {
            let a = objective_by_enumeration(&data, &start, &fast.lines[..k.min(fast.lines.len())]);
            let b = objective_by_enumeration(&data, &start, &slow.lines[..k.min(slow.lines.len())]);
            check(a == b, || {
                format!("seed {seed}, k = {k}: solver objective {a}, oracle {b}")
            })?;
        }
    }
    let took = clock.elapsed();
    check(took < ORACLE_BUDGET, || {
        format!("took {took:.1?}, budget {ORACLE_BUDGET:?}")
    })?;
    Ok(format!("{ORACLE_DATASETS} datasets, k = 1..3, {took:.2?}"))
}

fn single_projection() -> Outcome {
    for seed in 0..PROJECTION_PAIRS as u64 {
        let mut r = rng(10_000 + seed);
        let t = random_tree(&mut r, 5, 0.7, 0.95);
        let start = random_subtree(&mut r, &t, 0.6);
        let line = random_line(&mut r, &start, 6);
        let p = project(&t, &line);
        let (j, member, ties) = project_by_enumeration(&t, &line);
        check(ties == 1 && p.index == j && p.tree == member, || {
            format!("seed {seed}: projection {} (index {}), enumeration {member} (index {j}, {ties} ties)", p.tree, p.index)
        })?;
        let d: Vec<i64> = (0..=line.len())
            .map(|k| distance(&t, &line.member(k)) as i64)
            .collect();
        for k in 1..d.len() {
            let step = if k <= p.index { -1 } else { 1 };
            check(d[k] - d[k - 1] == step, || {
                format!("seed {seed}: distance profile {d:?}")
            })?;
        }
    }
    Ok(format!("{PROJECTION_PAIRS} pairs, unimodal with unit steps"))
}

fn union_projection() -> Outcome {
    for seed in 0..UNION_CASES as u64 {
        let mut r = rng(20_000 + seed);
        let t = random_tree(&mut r, 4, 0.7, 0.95);
        let start = random_subtree(&mut r, &t, 0.5);
        let q = r.gen_range(1..=3);
        let lines: Vec<_> = (0..q).map(|_| random_line(&mut r, &start, 5)).collect();
        let fast = project_union(&t, &lines).map_err(|e| e.to_string())?;
        let (slow, ties) = project_union_by_enumeration(&t, &lines);
        check(ties == 1 && fast == slow, || {
            format!("seed {seed}: {fast} vs {slow} ({ties} ties)")
        })?;
    }
    Ok(format!("{UNION_CASES} cases, q <= 3"))
}

fn metric_suite() -> Outcome {
    let mut r = rng(30_000);
    for i in 0..METRIC_TRIPLES {
        let [a, b, c] = [(); 3].map(|_| random_tree(&mut r, 4, 0.6, 0.95));
        let (ab, ba, bc, ac) = (
            distance(&a, &b),
            distance(&b, &a),
            distance(&b, &c),
            distance(&a, &c),
        );
        check(distance(&a, &a) == 0, || {
            format!("triple {i}: d(a, a) != 0")
        })?;
        check((ab == 0) == (a == b), || {
            format!("triple {i}: d = 0 but trees differ")
        })?;
        check(ab == ba, || format!("triple {i}: asymmetric"))?;
        check(ac <= ab + bc, || format!("triple {i}: triangle inequality"))?;
        check(ab == a.len() + b.len() - 2 * a.common_count(&b), || {
            format!("triple {i}: size identity")
        })?;
    }
    Ok(format!("{METRIC_TRIPLES} triples, zero violations"))
}

fn concavity() -> Outcome {
    for seed in 0..CONCAVITY_RUNS as u64 {
        let cfg = SynthConfig {
            n: 5 + (seed as usize * 7) % 80,
            seed,
            ..SynthConfig::default()
        };
        let data = TreeDataset::new(synth_trees(&cfg).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let res = pc_treelines(&data, &data.intersection(), 5).map_err(|e| e.to_string())?;
        check(res.gains.windows(2).all(|w| w[0] >= w[1]), || {
            format!("seed {seed}: gains {:?}", res.gains)
        })?;
        let curve = explained_curve(&data, &res).map_err(|e| e.to_string())?;
        for (k, &g) in res.gains.iter().enumerate() {
            check(curve[k + 1] - curve[k] == g, || {
                format!("seed {seed}: curve {curve:?}, gains {:?}", res.gains)
            })?;
            let direct =
                explained_variation(&data, &res.lines, k + 1).map_err(|e| e.to_string())?;
            check(direct == curve[k + 1], || {
                format!("seed {seed}: explained at {} is {direct}", k + 1)
            })?;
        }
    }
    Ok(format!("{CONCAVITY_RUNS} synthetic runs, K = 5"))
}

/// Leading trees of one synthetic stream until `total` nodes are reached.
fn dataset_with_nodes(pool: &[BinaryTree], total: usize) -> TreeDataset {
    let mut acc = 0;
    let take = pool
        .iter()
        .take_while(|t| {
            let before = acc;
            acc += t.len();
            before < total
        })
        .count();
    TreeDataset::new(pool[..take].to_vec()).unwrap()
}

fn median_time(data: &TreeDataset) -> Duration {
    let start = data.intersection();
    let _ = pc_treelines(data, &start, 5);
    let mut times: Vec<Duration> = (0..SCALING_RUNS)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(pc_treelines(data, &start, 5).unwrap());
            t.elapsed()
        })
        .collect();
    times.sort();
    times[SCALING_RUNS / 2]
}

fn linear_scaling() -> Outcome {
    let cfg = SynthConfig {
        n: 40_000,
        seed: 77,
        ..SynthConfig::default()
    };
    let pool = synth_trees(&cfg).map_err(|e| e.to_string())?;
    let small = dataset_with_nodes(&pool, SCALING_SMALL);
    let large = dataset_with_nodes(&pool, SCALING_LARGE);
    check(large.total_nodes() >= SCALING_LARGE, || {
        "synthetic pool too small".into()
    })?;
    let (ts, tl) = (median_time(&small), median_time(&large));
    let ratio = tl.as_secs_f64() / ts.as_secs_f64();
    let summary = format!(
        "{} nodes in {ts:.2?}, {} nodes in {tl:.2?}, ratio {ratio:.2} (limit {SCALING_MAX_RATIO})",
        small.total_nodes(),
        large.total_nodes()
    );
    check(ratio <= SCALING_MAX_RATIO, || summary.clone())?;
    Ok(summary)
}

fn regression() -> Outcome {
    let xs = [1i64, 2, 3, 4, 5];
    let ys = [2i64, 4, 5, 4, 5];
    let n = Ratio::from_integer(xs.len() as i64);
    let mx = Ratio::from_integer(xs.iter().sum::<i64>()) / n;
    let my = Ratio::from_integer(ys.iter().sum::<i64>()) / n;
    let sxy: Ratio<i64> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (Ratio::from_integer(x) - mx) * (Ratio::from_integer(y) - my))
        .sum();
    let sxx: Ratio<i64> = xs
        .iter()
        .map(|&x| (Ratio::from_integer(x) - mx).pow(2))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    check(
        slope == Ratio::new(3, 5) && intercept == Ratio::new(11, 5),
        || format!("rational fit gave {slope}, {intercept}"),
    )?;
    let as_f64 = |q: Ratio<i64>| *q.numer() as f64 / *q.denom() as f64;

    let x: Vec<f64> = xs.iter().map(|&v| v as f64).collect();
    let y: Vec<f64> = ys.iter().map(|&v| v as f64).collect();
    let fit = linreg(&x, &y).map_err(|e| e.to_string())?;
    check(fit.slope == as_f64(slope), || {
        format!("slope {} != 0.6", fit.slope)
    })?;
    check(fit.intercept == as_f64(intercept), || {
        format!("intercept {} != 2.2", fit.intercept)
    })?;
    check((fit.t_stat - REG_T).abs() <= REG_T_TOL, || {
        format!("t {}", fit.t_stat)
    })?;
    check((fit.p_value - REG_P).abs() <= REG_P_TOL, || {
        format!("p {}", fit.p_value)
    })?;
    Ok(format!(
        "slope {}, intercept {}, t {:.12}, p {:.12}",
        fit.slope, fit.intercept, fit.t_stat, fit.p_value
    ))
}

fn run(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_treeline"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn depth_profile(t: &BinaryTree) -> Vec<usize> {
    let mut counts = vec![0; 64];
    for v in t.nodes() {
        counts[v.depth() as usize] += 1;
    }
    counts
}

fn smoke() -> Outcome {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name);
    let s = |p: &Path| p.to_str().unwrap().to_string();
    run(&[
        "synth",
        "--n",
        "73",
        "--max-depth",
        "10",
        "--seed",
        "2024",
        "-o",
        &s(&path("raw.json")),
    ])?;

    let mut datasets = Vec::new();
    for mode in ["descendant", "thickness"] {
        let canon = path(&format!("{mode}.json"));
        run(&[
            "convert",
            &s(&path("raw.json")),
            "--correspondence",
            mode,
            "-o",
            &s(&canon),
        ])?;
        let data = DatasetFile::read(&canon)
            .and_then(|f| f.to_dataset())
            .map_err(|e| e.to_string())?;
        check(data.len() == 73, || format!("{mode}: {} trees", data.len()))?;
        check(
            data.trees()
                .iter()
                .all(|t| t.nodes().iter().all(|v| v.depth() <= 10)),
            || format!("{mode}: tree deeper than 10"),
        )?;
        datasets.push(data);
    }
    for (a, b) in datasets[0].trees().iter().zip(datasets[1].trees()) {
        check(depth_profile(a) == depth_profile(b), || {
            "correspondences disagree on level sizes".into()
        })?;
    }

    let mut report = Vec::new();
    for (mode, data) in ["descendant", "thickness"].iter().zip(&datasets) {
        let canon = s(&path(&format!("{mode}.json")));
        let pcs = s(&path(&format!("{mode}-pcs.json")));
        run(&["pca", &canon, "--k", "4", "-o", &pcs])?;
        let res = treeline::io::read_pc_result(&pcs).map_err(|e| e.to_string())?;
        let k = res.lines.len();
        check(k <= 4 && res.gains.windows(2).all(|w| w[0] >= w[1]), || {
            format!("{mode}: gains {:?}", res.gains)
        })?;
        check(k > 0, || format!("{mode}: no components"))?;
        let curve = explained_curve(data, &res).map_err(|e| e.to_string())?;
        check(*curve.last().unwrap() <= data.total_nodes() as u64, || {
            format!("{mode}: explained exceeds total")
        })?;

        let csv = String::from_utf8(run(&["scores", &canon, "--pcs", &pcs])?)
            .map_err(|e| e.to_string())?;
        let mut lines = csv.lines();
        let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
        check(header.len() == 3 + 2 * k - 1, || {
            format!("{mode}: header {header:?}")
        })?;
        for (row, t) in lines.zip(data.trees()) {
            let vals: Vec<usize> = row.split(',').skip(3).map(|v| v.parse().unwrap()).collect();
            for (j, line) in res.lines.iter().enumerate() {
                check(vals[j] <= line.len(), || {
                    format!("{mode}: score beyond line length")
                })?;
            }
            let mut best = vals[0];
            for j in 1..k {
                best = best.max(vals[j]);
                let union = vals[k + j - 1];
                let prev = if j == 1 { vals[0] } else { vals[k + j - 2] };
                check(
                    union >= best && union >= prev && union <= prev + vals[j],
                    || format!("{mode}: union scores {vals:?}"),
                )?;
            }
            let full = project_union(t, &res.lines).map_err(|e| e.to_string())?;
            check(
                full.len() == res.start.len() + vals[if k == 1 { 0 } else { 2 * k - 2 }],
                || format!("{mode}: projection size and score disagree"),
            )?;
        }

        let out = run(&["regress", &canon, "--pcs", &pcs, "--covariate", "age"])?;
        let v: Value = serde_json::from_slice(&out).map_err(|e| e.to_string())?;
        let rows = v.as_array().ok_or("regress output is not a list")?;
        check(rows.len() == 2 * k - 1, || {
            format!("{mode}: {} regressions", rows.len())
        })?;
        for r in rows {
            let p = r["p_value"].as_f64().unwrap_or(f64::NAN);
            check((0.0..=1.0).contains(&p) && r["n"] == 73, || {
                format!("{mode}: bad regression {r}")
            })?;
        }
        report.push(format!(
            "{mode}: {k} PCs, PC1 p = {:.4}",
            rows[0]["p_value"].as_f64().unwrap()
        ));
    }
    fs::remove_dir_all(dir.path()).ok();
    Ok(report.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "oracle equivalence of principal tree-lines",
            oracle_equivalence,
        ),
        ("single tree-line projection", single_projection),
        ("union tree-line projection", union_projection),
        ("tree distance metric", metric_suite),
        ("concave explained variation", concavity),
        ("linear-time scaling", linear_scaling),
        ("age regression", regression),
        ("end-to-end synthetic pipeline", smoke),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
