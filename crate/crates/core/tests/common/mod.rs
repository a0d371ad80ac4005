//! Brute-force oracles and data generators shared by the integration tests.
//!
//! Nothing here calls into the library's reduction or assignment code, so the
//! oracles stay independent of the implementations they check.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use texttopo::ph::{Bar, DistanceMatrix, PersistenceDiagram};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Symmetric matrix with zero diagonal and off-diagonal entries drawn from (0.05, 1).
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix {
    DistanceMatrix::from_fn(n, |_, _| rng.random_range(0.05..1.0)).unwrap()
}

/// Like [`random_matrix`] but entries take only a handful of values, so ties are common.
pub fn tied_matrix(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix {
    DistanceMatrix::from_fn(n, |_, _| f64::from(rng.random_range(1..5u8))).unwrap()
}

/// `n` evenly spaced points on the unit circle, with chord distances.
pub fn circle(n: usize) -> DistanceMatrix {
    DistanceMatrix::from_fn(n, |i, j| {
        let k = (j - i).min(n - (j - i));
        2.0 * (PI * k as f64 / n as f64).sin()
    })
    .unwrap()
}

pub fn unit_square() -> DistanceMatrix {
    let s = 2f64.sqrt();
    DistanceMatrix::from_rows(&[
        vec![0.0, 1.0, s, 1.0],
        vec![1.0, 0.0, 1.0, s],
        vec![s, 1.0, 0.0, 1.0],
        vec![1.0, s, 1.0, 0.0],
    ])
    .unwrap()
}

pub type BarList = Vec<(f64, f64)>;

struct Cell {
    verts: Vec<usize>,
    diam: f64,
}

fn cells(dist: &DistanceMatrix) -> Vec<Cell> {
    let n = dist.len();
    let mut out = Vec::new();
    for a in 0..n {
        out.push(Cell { verts: vec![a], diam: 0.0 });
        for b in a + 1..n {
            out.push(Cell { verts: vec![a, b], diam: dist.get(a, b) });
            for c in b + 1..n {
                let diam = dist.get(a, b).max(dist.get(a, c)).max(dist.get(b, c));
                out.push(Cell { verts: vec![a, b, c], diam });
            }
        }
    }
    out.sort_by(|x, y| {
        x.diam.total_cmp(&y.diam).then(x.verts.len().cmp(&y.verts.len())).then_with(|| x.verts.cmp(&y.verts))
    });
    out
}

/// Standard left-to-right column reduction of the full boundary matrix of the
/// 2-skeleton over Z/2. Returns (dim 0 bars, dim 1 bars), each sorted, with
/// zero-length dim 1 bars removed.
pub fn oracle_persistence(dist: &DistanceMatrix) -> (BarList, BarList) {
    let cells = cells(dist);
    let index: HashMap<Vec<usize>, usize> = cells.iter().enumerate().map(|(i, c)| (c.verts.clone(), i)).collect();
    let mut columns: Vec<Vec<usize>> = cells
        .iter()
        .map(|c| {
            let mut col: Vec<usize> = if c.verts.len() == 1 {
                Vec::new()
            } else {
                (0..c.verts.len())
                    .map(|skip| {
                        let face: Vec<usize> =
                            c.verts.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                        index[&face]
                    })
                    .collect()
            };
            col.sort_unstable();
            col
        })
        .collect();

    let mut owner: HashMap<usize, usize> = HashMap::new();
    let mut paired = vec![false; cells.len()];
    let mut dim0 = Vec::new();
    let mut dim1 = Vec::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match owner.get(&low) {
                Some(&k) => {
                    let other = columns[k].clone();
                    columns[j] = symmetric_difference(&columns[j], &other);
                }
                None => break,
            }
        }
        if let Some(&low) = columns[j].last() {
            owner.insert(low, j);
            paired[low] = true;
            paired[j] = true;
            let bar = (cells[low].diam, cells[j].diam);
            match cells[low].verts.len() {
                1 => dim0.push(bar),
                2 if bar.1 > bar.0 => dim1.push(bar),
                _ => {}
            }
        }
    }
    for (i, c) in cells.iter().enumerate() {
        if !paired[i] && columns[i].is_empty() {
            match c.verts.len() {
                1 => dim0.push((c.diam, f64::INFINITY)),
                2 => dim1.push((c.diam, f64::INFINITY)),
                _ => {}
            }
        }
    }
    sort_pairs(&mut dim0);
    sort_pairs(&mut dim1);
    (dim0, dim1)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn sort_pairs(v: &mut [(f64, f64)]) {
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
}

pub fn pairs(bars: &[Bar]) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = bars.iter().map(|b| (b.birth, b.death)).collect();
    sort_pairs(&mut v);
    v
}

/// Largest absolute difference between two sorted bar lists, or `None` if their
/// lengths or infinite deaths disagree.
pub fn max_bar_gap(a: &[(f64, f64)], b: &[(f64, f64)]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut gap = 0f64;
    for (x, y) in a.iter().zip(b) {
        if x.1.is_infinite() != y.1.is_infinite() {
            return None;
        }
        gap = gap.max((x.0 - y.0).abs());
        if x.1.is_finite() {
            gap = gap.max((x.1 - y.1).abs());
        }
    }
    Some(gap)
}

/// Gap between a computed diagram and the oracle across both dimensions.
pub fn diagram_vs_oracle(pd: &PersistenceDiagram, dist: &DistanceMatrix) -> Option<f64> {
    let (o0, o1) = oracle_persistence(dist);
    Some(max_bar_gap(&pairs(pd.dim(0)), &o0)?.max(max_bar_gap(&pairs(pd.dim(1)), &o1)?))
}

/// Rank over Z/2 of a set of columns given as bitmasks.
fn rank_gf2(mut cols: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let mask = 1u64 << bit;
        if let Some(p) = cols.iter().position(|&c| c & mask != 0) {
            let pivot = cols.swap_remove(p);
            for c in cols.iter_mut() {
                if *c & mask != 0 {
                    *c ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Betti numbers of the Rips complex at `scale` from ranks of the boundary maps.
pub fn oracle_betti(dist: &DistanceMatrix, scale: f64) -> (usize, usize) {
    let n = dist.len();
    assert!(n <= 11, "edge bitmasks hold at most 64 edges");
    let mut edge_id = HashMap::new();
    let mut d1 = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if dist.get(a, b) <= scale {
                edge_id.insert((a, b), d1.len());
                d1.push((1u64 << a) | (1u64 << b));
            }
        }
    }
    let mut d2 = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if let (Some(&x), Some(&y), Some(&z)) =
                    (edge_id.get(&(a, b)), edge_id.get(&(a, c)), edge_id.get(&(b, c)))
                {
                    d2.push((1u64 << x) | (1u64 << y) | (1u64 << z));
                }
            }
        }
    }
    let edges = d1.len();
    let r1 = rank_gf2(d1);
    let r2 = rank_gf2(d2);
    (n - r1, edges - r1 - r2)
}

/// Minimum spanning tree edge weights (Prim), sorted ascending.
pub fn mst_weights(dist: &DistanceMatrix) -> Vec<f64> {
    let n = dist.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut out = Vec::new();
    best[0] = 0.0;
    for step in 0..n {
        let u = (0..n).filter(|&v| !in_tree[v]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
        in_tree[u] = true;
        if step > 0 {
            out.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] {
                best[v] = best[v].min(dist.get(u, v));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn point_cost(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn diag_cost(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Exhaustive search over all partial matchings of `a` into `b`; unmatched points go to the diagonal.
pub fn oracle_wasserstein(a: &[(f64, f64)], b: &[(f64, f64)], p: f64) -> f64 {
    fn go(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, p: f64) -> f64 {
        if i == a.len() {
            return b.iter().zip(used.iter()).filter(|(_, &u)| !u).map(|(&q, _)| diag_cost(q).powf(p)).sum();
        }
        let mut best = diag_cost(a[i]).powf(p) + go(i + 1, a, b, used, p);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(point_cost(a[i], b[j]).powf(p) + go(i + 1, a, b, used, p));
                used[j] = false;
            }
        }
        best
    }
    go(0, a, b, &mut vec![false; b.len()], p).powf(1.0 / p)
}

/// Random finite diagram with `n` points, births in [0, 1) and lifetimes in [0, 1).
pub fn random_diagram(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let b: f64 = rng.random_range(0.0..1.0);
            (b, b + rng.random_range(0.0..1.0))
        })
        .collect()
}

pub fn to_bars(points: &[(f64, f64)]) -> Vec<Bar> {
    points.iter().map(|&(b, d)| Bar::new(b, d)).collect()
}

pub const MOTIF_LEN: usize = 20;

/// Fixed 20-token motif, disjoint from the filler vocabulary.
pub fn motif() -> Vec<String> {
    (0..MOTIF_LEN).map(|i| format!("motif{i}")).collect()
}

/// Document of `blocks * block_len` tokens. With `with_motif`, every other
/// block carries the motif and the rest is filler; otherwise the same number of
/// filler tokens are shuffled uniformly.
pub fn motif_document(
    rng: &mut ChaCha8Rng,
    with_motif: bool,
    blocks: usize,
    block_len: usize,
    vocab: usize,
) -> Vec<String> {
    let filler = |rng: &mut ChaCha8Rng| format!("w{}", rng.random_range(0..vocab));
    let mut tokens = Vec::with_capacity(blocks * block_len);
    for b in 0..blocks {
        let mut block: Vec<String> = if with_motif && b % 2 == 0 {
            let mut v = motif();
            v.extend((MOTIF_LEN..block_len).map(|_| filler(rng)));
            v
        } else {
            (0..block_len).map(|_| filler(rng)).collect()
        };
        block.shuffle(rng);
        tokens.extend(block);
    }
    tokens
}

/// Corpus CSV text: `id,text,labels` with `docs` given as (text, labels).
pub fn corpus_csv(docs: &[(String, String)]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "text", "labels"]).unwrap();
    for (i, (text, labels)) in docs.iter().enumerate() {
        w.write_record([format!("doc{i:03}").as_str(), text, labels]).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Small four-genre corpus whose texts mix a per-genre motif with filler, `len` tokens each.
pub fn genre_corpus(seed: u64, docs: usize, len: usize) -> String {
    const GENRES: [&str; 4] = ["drama", "comedy", "action", "romance"];
    let mut rng = rng(seed);
    let rows: Vec<(String, String)> = (0..docs)
        .map(|i| {
            let g = i % 4;
            let second = (i / 4) % 4;
            let labels = if second != g && i % 3 == 0 {
                format!("{}|{}", GENRES[g], GENRES[second])
            } else {
                GENRES[g].to_string()
            };
            let words: Vec<String> = (0..len)
                .map(|t| {
                    if t % 7 < 2 {
                        format!("{}{}", GENRES[g], t % 5)
                    } else {
                        format!("w{}", rng.random_range(0..60))
                    }
                })
                .collect();
            (words.join(" "), labels)
        })
        .collect();
    corpus_csv(&rows)
}

/// Word2vec text table for tokens `w0..w{vocab}` plus the genre motif words.
pub fn embeddings_text(seed: u64, vocab: usize, dim: usize) -> String {
    let mut rng = rng(seed);
    let mut words: Vec<String> = (0..vocab).map(|i| format!("w{i}")).collect();
    for g in ["drama", "comedy", "action", "romance"] {
        words.extend((0..5).map(|k| format!("{g}{k}")));
    }
    let mut out = format!("{} {dim}\n", words.len());
    for w in &words {
        out.push_str(w);
        for _ in 0..dim {
            out.push_str(&format!(" {:.6}", rng.random_range(-1.0..1.0)));
        }
        out.push('\n');
    }
    out
}
