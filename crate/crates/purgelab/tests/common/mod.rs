//! Shared test-only oracles and generators. Everything here is written
//! independently of the library code paths it checks.

#![allow(dead_code)]

use purgelab::datakit::{AttributeMeta, Cell, Dataset, Instance};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random mixed-schema dataset: numeric and categorical attributes, random
/// labels, occasional missing cells.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, missing_rate: f64) -> Dataset {
    let numeric = rng.gen_range(1..=3);
    let categorical = rng.gen_range(0..=2);
    let classes = rng.gen_range(2..=4);
    let mut attributes = Vec::new();
    for j in 0..numeric {
        attributes.push(AttributeMeta::numeric(format!("n{j}")));
    }
    let mut cat_sizes = Vec::new();
    for j in 0..categorical {
        let size = rng.gen_range(2..=4);
        cat_sizes.push(size);
        attributes.push(AttributeMeta::categorical(
            format!("c{j}"),
            (0..size).map(|v| format!("v{v}")).collect(),
        ));
    }
    let mut instances = Vec::new();
    for _ in 0..n {
        let mut values = Vec::new();
        for _ in 0..numeric {
            values.push(if rng.gen_bool(missing_rate) {
                Cell::Missing
            } else {
                Cell::Num(rng.gen_range(-5.0..5.0))
            });
        }
        for &size in &cat_sizes {
            values.push(if rng.gen_bool(missing_rate) {
                Cell::Missing
            } else {
                Cell::Cat(rng.gen_range(0..size))
            });
        }
        instances.push(Instance { values, label: rng.gen_range(0..classes) });
    }
    // Guarantee at least two present classes.
    if instances.iter().all(|i| i.label == instances[0].label) {
        instances[0].label = (instances[1].label + 1) % classes;
    }
    Dataset::new(
        format!("random-{n}"),
        attributes,
        (0..classes).map(|c| format!("k{c}")).collect(),
        instances,
    )
    .unwrap()
}

/// Purely numeric random dataset (no missing), for geometric oracles.
pub fn random_numeric_dataset(rng: &mut ChaCha8Rng, n: usize, dims: usize, classes: usize) -> Dataset {
    let attributes = (0..dims).map(|j| AttributeMeta::numeric(format!("x{j}"))).collect();
    let mut instances: Vec<Instance> = (0..n)
        .map(|_| Instance {
            values: (0..dims).map(|_| Cell::Num(rng.gen_range(0.0..1.0))).collect(),
            label: rng.gen_range(0..classes),
        })
        .collect();
    if instances.iter().all(|i| i.label == instances[0].label) {
        instances[0].label = (instances[1].label + 1) % classes;
    }
    Dataset::new(
        "numeric",
        attributes,
        (0..classes).map(|c| format!("k{c}")).collect(),
        instances,
    )
    .unwrap()
}

/// Brute-force two-sided Wilcoxon signed-ranks p-value: raw enumeration of
/// every sign assignment over the kept differences (split-and-drop-odd zero
/// handling, mean ranks for ties).
pub fn wilcoxon_brute_force_p(a: &[f64], b: &[f64]) -> f64 {
    let mut diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let zeros = diffs.iter().filter(|&&d| d == 0.0).count();
    if zeros % 2 == 1 {
        let drop = diffs.iter().position(|&d| d == 0.0).unwrap();
        diffs.swap_remove(drop);
    }
    let n = diffs.len();
    if n == 0 {
        return 1.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diffs[i].abs().partial_cmp(&diffs[j].abs()).unwrap());
    let mut ranks = vec![0.0; n];
    let mut pos = 0;
    while pos < n {
        let mut end = pos;
        while end + 1 < n && diffs[order[end + 1]].abs() == diffs[order[pos]].abs() {
            end += 1;
        }
        let mean_rank = (pos + end + 2) as f64 / 2.0;
        for &idx in &order[pos..=end] {
            ranks[idx] = mean_rank;
        }
        pos = end + 1;
    }
    let zero_half: f64 =
        diffs.iter().zip(&ranks).filter(|(d, _)| **d == 0.0).map(|(_, r)| r / 2.0).sum();
    let nonzero: Vec<f64> =
        diffs.iter().zip(&ranks).filter(|(d, _)| **d != 0.0).map(|(_, r)| *r).collect();
    let total: f64 = ranks.iter().sum();
    let observed_plus: f64 = zero_half
        + diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| *r).sum::<f64>();
    let observed_min = observed_plus.min(total - observed_plus);

    let m = nonzero.len();
    let mut tail = 0u64;
    for mask in 0u64..(1u64 << m) {
        let w_plus: f64 = zero_half
            + nonzero
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, r)| *r)
                .sum::<f64>();
        if w_plus.min(total - w_plus) <= observed_min {
            tail += 1;
        }
    }
    tail as f64 / (1u64 << m) as f64
}

/// Brute-force UPGMA: cluster distances recomputed from the original matrix
/// (mean over cross pairs) at every step, closest pair first, ties to the
/// pair with the lexicographically smallest (min leaf, max leaf) key.
pub fn upgma_brute_force(dist: &[Vec<f64>]) -> Vec<(usize, usize, f64)> {
    let n = dist.len();
    // (label, member leaves)
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    let mut next_label = n;
    while clusters.len() > 1 {
        let mut best: Option<(f64, usize, usize, (usize, usize))> = None;
        for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let mut total = 0.0;
                for &x in &clusters[i].1 {
                    for &y in &clusters[j].1 {
                        total += dist[x][y];
                    }
                }
                let mean = total / (clusters[i].1.len() * clusters[j].1.len()) as f64;
                let min_i = *clusters[i].1.iter().min().unwrap();
                let min_j = *clusters[j].1.iter().min().unwrap();
                let key = (min_i.min(min_j), min_i.max(min_j));
                let better = match &best {
                    None => true,
                    Some((bd, _, _, bkey)) => {
                        mean < *bd || (mean == *bd && key < *bkey)
                    }
                };
                if better {
                    best = Some((mean, i, j, key));
                }
            }
        }
        let (height, i, j, _) = best.unwrap();
        let (label_i, label_j) = (clusters[i].0, clusters[j].0);
        merges.push((label_i.min(label_j), label_i.max(label_j), height));
        let mut members = clusters[i].1.clone();
        members.extend(clusters[j].1.clone());
        clusters[i] = (next_label, members);
        clusters.remove(j);
        next_label += 1;
    }
    merges
}

/// Brute-force N1: enumerate every spanning tree of the complete graph via
/// Pruefer sequences, keep the minimum-weight one, and count the fraction of
/// vertices incident to a cross-class edge. Assumes distinct edge weights so
/// the MST is unique.
pub fn n1_brute_force(dist: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = dist.len();
    assert!((2..=8).contains(&n));
    let tree_edges = |pruefer: &[usize]| -> Vec<(usize, usize)> {
        let mut degree = vec![1usize; n];
        for &p in pruefer {
            degree[p] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        let mut pruefer = pruefer.to_vec();
        while let Some(&p) = pruefer.first() {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf, p));
            degree[leaf] -= 1;
            degree[p] -= 1;
            pruefer.remove(0);
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        edges
    };

    let mut best_weight = f64::INFINITY;
    let mut best_edges = Vec::new();
    let seq_count = (n as u64).pow((n - 2) as u32);
    for code in 0..seq_count {
        let mut pruefer = Vec::with_capacity(n - 2);
        let mut c = code;
        for _ in 0..n - 2 {
            pruefer.push((c % n as u64) as usize);
            c /= n as u64;
        }
        let edges = tree_edges(&pruefer);
        let weight: f64 = edges.iter().map(|&(a, b)| dist[a][b]).sum();
        if weight < best_weight {
            best_weight = weight;
            best_edges = edges;
        }
    }
    let mut boundary = vec![false; n];
    for (a, b) in best_edges {
        if labels[a] != labels[b] {
            boundary[a] = true;
            boundary[b] = true;
        }
    }
    boundary.iter().filter(|&&x| x).count() as f64 / n as f64
}
