//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits nonzero if any criterion fails.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use rand::seq::SliceRandom;
use rand::RngExt;
use tempfile::TempDir;
use texttopo::embed_topo::{
    column_distance_matrix, embedding_topo_features, smooth_columns, EmbedTopoConfig, EmbeddingMatrix, SmoothingMode,
};
use texttopo::eval::{
    ensemble_combine, evaluate_probabilities, predict_stacked, train_linear, FeatureMatrix, Labels, LogisticConfig,
    Probabilities,
};
use texttopo::ingest::{load_corpus, load_embeddings, CorpusOptions};
use texttopo::ph::{betti_at_scale, rips_persistence};
use texttopo::pipeline::{extract_corpus, ExtractConfig, ExtractMode};
use texttopo::tfidf_topo::{loop_statistics, tfidf_topo_features, TfidfTopoConfig};
use texttopo::wasserstein::wasserstein;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ph_oracle_equivalence() -> Outcome {
    let mut r = rng(2024);
    let mut worst = 0f64;
    for trial in 0..200 {
        let n = r.random_range(3..=7);
        let dist = random_matrix(&mut r, n);
        let gap = diagram_vs_oracle(&rips_persistence(&dist), &dist)
            .ok_or_else(|| format!("matrix {trial} (n = {n}): bar counts differ from the oracle"))?;
        ensure(gap < 1e-9, || format!("matrix {trial} (n = {n}): gap {gap:e}"))?;
        worst = worst.max(gap);
    }
    Ok(format!("200 matrices, max |delta| = {worst:e}"))
}

fn known_shapes() -> Outcome {
    let square = pairs(rips_persistence(&unit_square()).dim(1));
    ensure(square.len() == 1 && (square[0].0 - 1.0).abs() < 1e-9 && (square[0].1 - 2f64.sqrt()).abs() < 1e-9, || {
        format!("unit square dim1 = {square:?}")
    })?;
    let mut notes = Vec::new();
    for n in [6, 12, 20] {
        let dist = circle(n);
        let bars = pairs(rips_persistence(&dist).dim(1));
        let (_, oracle) = oracle_persistence(&dist);
        ensure(bars.len() == 1, || format!("circle n = {n}: {} loops", bars.len()))?;
        ensure(max_bar_gap(&bars, &oracle).is_some_and(|g| g < 1e-9), || {
            format!("circle n = {n}: {bars:?} vs {oracle:?}")
        })?;
        let mid = (bars[0].0 + bars[0].1) / 2.0;
        let betti = betti_at_scale(&dist, mid).map_err(|e| e.to_string())?;
        ensure(betti == (1, 1), || format!("circle n = {n}: betti at {mid} = {betti:?}"))?;
        notes.push(format!("n={n} ({:.4}, {:.4})", bars[0].0, bars[0].1));
    }
    Ok(format!("square (1, sqrt 2); circles {}", notes.join(", ")))
}

fn wasserstein_exactness() -> Outcome {
    let mut r = rng(7);
    let w = |a: &[(f64, f64)], b: &[(f64, f64)]| wasserstein(&to_bars(a), &to_bars(b), 1.0).map_err(|e| e.to_string());
    let mut worst = 0f64;
    for case in 0..100 {
        let (m, k) = (r.random_range(0..=6), r.random_range(0..=6));
        let (a, b) = (random_diagram(&mut r, m), random_diagram(&mut r, k));
        let gap = (w(&a, &b)? - oracle_wasserstein(&a, &b, 1.0)).abs();
        ensure(gap < 1e-9, || format!("pair {case}: gap {gap:e}"))?;
        worst = worst.max(gap);
    }
    for case in 0..100 {
        let sizes: Vec<usize> = (0..3).map(|_| r.random_range(0..=5)).collect();
        let [a, b, c] = [0, 1, 2].map(|i| random_diagram(&mut r, sizes[i]));
        let (ab, ba, bc, ac) = (w(&a, &b)?, w(&b, &a)?, w(&b, &c)?, w(&a, &c)?);
        ensure((ab - ba).abs() < 1e-12, || format!("triple {case}: asymmetric {ab} vs {ba}"))?;
        ensure(ac <= ab + bc + 1e-9, || format!("triple {case}: triangle inequality {ac} > {ab} + {bc}"))?;
        let mut same = a.clone();
        same.shuffle(&mut r);
        same.push((0.25, 0.25));
        ensure(w(&a, &same)? == 0.0, || format!("triple {case}: nonzero distance to a relabelled copy"))?;
        if !a.is_empty() && a.iter().any(|p| p.1 > p.0) {
            let mut moved = a.clone();
            let i = moved.iter().position(|p| p.1 > p.0).unwrap();
            moved[i].1 += 0.05;
            ensure(w(&a, &moved)? > 0.0, || format!("triple {case}: distinct diagrams at distance 0"))?;
        }
    }
    Ok(format!("100 pairs vs enumeration (max |delta| = {worst:e}), 100 triples"))
}

fn feature_shapes() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let vocab: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
    let mut r = rng(5);
    let mut emb = String::from("10 5\n");
    for w in &vocab {
        let v: Vec<String> = (0..5).map(|_| format!("{:.5}", r.random_range(-1.0..1.0))).collect();
        emb.push_str(&format!("{w} {}\n", v.join(" ")));
    }
    let docs: Vec<(String, String)> = (0..5)
        .map(|d| {
            let text: Vec<&str> = (0..40).map(|_| vocab[r.random_range(0..10)].as_str()).collect();
            (text.join(" "), ["drama", "comedy", "action", "romance", "drama|action"][d].to_string())
        })
        .collect();
    let emb_path = dir.path().join("emb.txt");
    let corpus_path = dir.path().join("corpus.csv");
    fs::write(&emb_path, emb).map_err(|e| e.to_string())?;
    fs::write(&corpus_path, corpus_csv(&docs)).map_err(|e| e.to_string())?;

    let table = load_embeddings(&emb_path).map_err(|e| e.to_string())?;
    let corpus =
        load_corpus(&corpus_path, &CorpusOptions { min_tokens: 1, ..Default::default() }).map_err(|e| e.to_string())?;
    let config = ExtractConfig::default();
    let tp1 = extract_corpus(&corpus, ExtractMode::Tp1, Some(&table), &config).map_err(|e| e.to_string())?;
    let tp2 = extract_corpus(&corpus, ExtractMode::Tp2, None, &config).map_err(|e| e.to_string())?;
    ensure(tp1.features.n_rows() == 5 && tp1.features.n_cols() == 10, || {
        format!("TP1 shape {}x{}", tp1.features.n_rows(), tp1.features.n_cols())
    })?;
    ensure(tp2.features.n_rows() == 5 && tp2.features.n_cols() == 14, || {
        format!("TP2 shape {}x{}", tp2.features.n_rows(), tp2.features.n_cols())
    })?;
    for i in 0..5 {
        let x = &tp2.features.row(i)[..9];
        ensure(x.windows(2).all(|p| p[0] <= p[1]), || format!("row {i}: H0 deaths not sorted: {x:?}"))?;
    }
    for doc in &corpus.documents {
        let f = tfidf_topo_features(&doc.tokens, &TfidfTopoConfig::default()).map_err(|e| e.to_string())?;
        ensure(f.x.len() == 9, || format!("{}: {} H0 deaths", doc.id, f.x.len()))?;
    }
    Ok("TP1 = 2 x 5 = 10, TP2 = 9 + 5 = 14 on 5 documents".into())
}

fn degenerate_inputs() -> Outcome {
    let same: Vec<String> = (0..10).flat_map(|_| ["alpha", "beta", "beta", "gamma"].map(String::from)).collect();
    let f = tfidf_topo_features(&same, &TfidfTopoConfig::default()).map_err(|e| e.to_string())?.to_vec();
    ensure(f == vec![0.0; 14], || format!("identical blocks: {f:?}"))?;

    let col = [0.3, -1.2, 0.8, 0.1, 2.0, -0.4, 0.9];
    let psi = EmbeddingMatrix::new(7, 5, col.iter().flat_map(|&v| [v; 5]).collect()).map_err(|e| e.to_string())?;
    let omega = embedding_topo_features(&psi, &EmbedTopoConfig::default()).map_err(|e| e.to_string())?;
    ensure(omega.omega1 == vec![0.0; 5], || format!("identical columns: omega1 = {:?}", omega.omega1))?;

    let disjoint: Vec<String> = (0..10).flat_map(|b| (0..4).map(move |k| format!("b{b}k{k}"))).collect();
    let g = tfidf_topo_features(&disjoint, &TfidfTopoConfig::default()).map_err(|e| e.to_string())?;
    ensure(g.y[0] == 0.0 && g.y[1..] == [0.0; 4], || format!("no loops: y = {:?}", g.y))?;
    ensure(loop_statistics(&[])[1..] == [0.0; 4], || "empty loop statistics".into())?;
    Ok("identical blocks -> 14 zeros; identical columns -> omega1 = 0; no loops -> y2..y5 = 0".into())
}

fn word_order() -> Outcome {
    let rows: Vec<Vec<f64>> =
        (0..8).map(|t| vec![if t < 4 { 1.0 } else { 0.0 }, if t % 2 == 0 { 1.0 } else { 0.0 }]).collect();
    let mut shuffled = rows.clone();
    shuffled.rotate_left(1);
    let theta = |r: &[Vec<f64>]| -> Result<f64, String> {
        let m = EmbeddingMatrix::from_rows(r).map_err(|e| e.to_string())?;
        Ok(column_distance_matrix(&smooth_columns(&m, SmoothingMode::Truncate)).map_err(|e| e.to_string())?.get(0, 1))
    };
    let (a, b) = (theta(&rows)?, theta(&shuffled)?);
    ensure(a != b, || format!("theta unchanged by reordering: {a}"))?;
    Ok(format!("theta(0,1) = {a:.6} vs {b:.6} after reordering"))
}

fn synthetic_classification() -> Outcome {
    let mut accuracies = Vec::new();
    for seed in 0..5u64 {
        let mut r = rng(1000 + seed);
        let mut rows = Vec::new();
        let mut classes = Vec::new();
        for d in 0..200 {
            let class = d % 2;
            let tokens = motif_document(&mut r, class == 0, 10, 40, 300);
            rows.push(tfidf_topo_features(&tokens, &TfidfTopoConfig::default()).map_err(|e| e.to_string())?.to_vec());
            classes.push(class);
        }
        let ids: Vec<String> = (0..200).map(|i| format!("d{i}")).collect();
        let names: Vec<String> = texttopo::pipeline::feature_names(ExtractMode::Tp2, 0, 10);
        let features = FeatureMatrix::from_rows(ids.clone(), names, &rows).map_err(|e| e.to_string())?;
        let labels = Labels::from_indices(vec!["motif".into(), "plain".into()], &classes).map_err(|e| e.to_string())?;

        let mut order: Vec<usize> = (0..200).collect();
        order.shuffle(&mut r);
        let (train, test) = order.split_at(texttopo::ingest::train_size(200));
        let pick = |rows: &[usize]| -> Vec<String> { rows.iter().map(|&i| ids[i].clone()).collect() };
        let model = train_linear(
            &features.select_rows(&pick(train)).map_err(|e| e.to_string())?,
            &labels.select(train),
            &LogisticConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        let proba = model
            .predict_proba(&features.select_rows(&pick(test)).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let correct = proba.values.iter().zip(test).filter(|(p, &i)| usize::from(p[1] > p[0]) == classes[i]).count();
        accuracies.push(correct as f64 / test.len() as f64);
    }
    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    ensure(mean >= 0.80, || format!("mean accuracy {mean:.3} over seeds {accuracies:?}"))?;
    Ok(format!("mean test accuracy {mean:.3} over 5 seeds"))
}

fn ensemble_improvement() -> Outcome {
    let classes: Vec<String> = ["drama", "comedy", "action", "romance"].map(String::from).to_vec();
    let n = 300;
    let mut r = rng(99);
    let values: Vec<Vec<bool>> = (0..n).map(|_| (0..4).map(|_| r.random_bool(0.35)).collect()).collect();
    let labels = Labels::new(classes.clone(), values).map_err(|e| e.to_string())?;
    let ids: Vec<String> = (0..n).map(|i| format!("r{i}")).collect();
    // Each source is informative on two classes and nearly blind on the other two.
    let source = |strength: [f64; 4], r: &mut rand_chacha::ChaCha8Rng| Probabilities {
        ids: ids.clone(),
        classes: classes.clone(),
        values: labels
            .values
            .iter()
            .map(|row| {
                (0..4)
                    .map(|c| {
                        let noise: f64 = (0..3).map(|_| r.random_range(-1.0..1.0)).sum();
                        let z = if row[c] { strength[c] } else { -strength[c] } + noise - 0.3;
                        1.0 / (1.0 + (-z).exp())
                    })
                    .collect()
            })
            .collect(),
    };
    let a = source([1.2, 1.0, 0.2, 0.1], &mut r);
    let b = source([0.1, 0.3, 1.1, 1.3], &mut r);
    let train: Vec<usize> = (0..texttopo::ingest::train_size(n)).collect();
    let subset = |p: &Probabilities| Probabilities {
        ids: train.iter().map(|&i| p.ids[i].clone()).collect(),
        classes: p.classes.clone(),
        values: train.iter().map(|&i| p.values[i].clone()).collect(),
    };
    let (a, b, labels) = (subset(&a), subset(&b), labels.select(&train));
    let f1 = |p: &Probabilities| evaluate_probabilities(p, &labels).map(|rep| rep.macro_f1).map_err(|e| e.to_string());
    let model = ensemble_combine(&a, &b, &labels, &LogisticConfig::stacking()).map_err(|e| e.to_string())?;
    let ens = predict_stacked(&model, &[&a, &b]).map_err(|e| e.to_string())?;
    let (fa, fb, fe) = (f1(&a)?, f1(&b)?, f1(&ens)?);
    ensure(fe >= fa.max(fb), || format!("ensemble macro F1 {fe:.4} < max({fa:.4}, {fb:.4})"))?;
    Ok(format!("macro F1: a {fa:.4}, b {fb:.4}, ensemble {fe:.4}"))
}

fn cli_determinism() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("corpus.csv");
    let emb = dir.path().join("emb.txt");
    fs::write(&corpus, genre_corpus(8, 60, 80)).map_err(|e| e.to_string())?;
    fs::write(&emb, embeddings_text(9, 60, 6)).map_err(|e| e.to_string())?;
    let bin = env!("CARGO_BIN_EXE_texttopo");
    let p = |name: String| dir.path().join(name).to_string_lossy().into_owned();
    let mut runs = Vec::new();
    for round in 0..2 {
        let (feats, report) = (p(format!("f{round}.csv")), p(format!("r{round}.csv")));
        let c = corpus.to_string_lossy();
        let e = emb.to_string_lossy();
        let status = Command::new(bin)
            .args(["extract", "--corpus", &c, "--embeddings", &e, "--min-tokens", "50", "--seed", "3", "--out", &feats])
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("extract exited with {status}"))?;
        let out = Command::new(bin)
            .args([
                "train-eval",
                "--corpus",
                &c,
                "--min-tokens",
                "50",
                "--seed",
                "3",
                "--features",
                &feats,
                "--out",
                &report,
            ])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("train-eval exited with {}", out.status))?;
        runs.push((
            fs::read(&feats).map_err(|e| e.to_string())?,
            fs::read(&report).map_err(|e| e.to_string())?,
            out.stdout,
        ));
    }
    ensure(runs[0] == runs[1], || "outputs differ between runs".into())?;
    Ok(format!("feature CSV ({} bytes) and report identical across two runs", runs[0].0.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("ph-oracle-equivalence", Duration::from_secs(10), ph_oracle_equivalence),
        ("known-shapes", Duration::from_secs(5), known_shapes),
        ("wasserstein-exactness-and-axioms", Duration::from_secs(10), wasserstein_exactness),
        ("feature-shape-contracts", Duration::from_secs(30), feature_shapes),
        ("degenerate-inputs", Duration::from_secs(30), degenerate_inputs),
        ("word-order-sensitivity", Duration::from_secs(30), word_order),
        ("synthetic-classification-signal", Duration::from_secs(60), synthetic_classification),
        ("ensemble-improvement", Duration::from_secs(30), ensemble_improvement),
        ("end-to-end-determinism", Duration::from_secs(60), cli_determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed > budget {
                Err(format!("took {elapsed:.2?}, budget {budget:?}"))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why} [{elapsed:.2?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
