//! Reference implementations the integration suites check the library
//! against. Everything here is deliberately naive and route-independent:
//! plain loops, textbook algorithms, no shared kernels with the crate.
#![allow(dead_code)]

use ndarray::{Array2, ArrayView2};

pub fn frobenius(a: ArrayView2<'_, f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues (descending) and the matching eigenvectors as columns.
pub fn jacobi_symmetric_eigen(a: ArrayView2<'_, f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "symmetric input required");
    let scale = frobenius(a) + 1.0;
    let mut m = a.to_owned();
    let mut v = Array2::<f64>::eye(n);

    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        if off.sqrt() < 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let mip = m[[i, p]];
                    let miq = m[[i, q]];
                    m[[i, p]] = c * mip - s * miq;
                    m[[i, q]] = s * mip + c * miq;
                }
                for i in 0..n {
                    let mpi = m[[p, i]];
                    let mqi = m[[q, i]];
                    m[[p, i]] = c * mpi - s * mqi;
                    m[[q, i]] = s * mpi + c * mqi;
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip - s * viq;
                    v[[i, q]] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].total_cmp(&m[[i, i]]));
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    (values, vectors)
}

pub struct BestClustering {
    pub inertia: f64,
    pub labels: Vec<usize>,
}

/// Exhaustive minimum-inertia clustering over every surjective assignment
/// of `n` points to `k` clusters. Centroid means and the inertia sum run
/// over points in index order, matching the library's finalization order,
/// so an optimal partition reproduces its inertia bit for bit.
pub fn exhaustive_min_inertia(points: ArrayView2<'_, f64>, k: usize) -> BestClustering {
    let n = points.nrows();
    let d = points.ncols();
    assert!(n >= k && k >= 1);
    assert!((k as f64).powi(n as i32) < 2e7, "instance too large to enumerate");

    let mut labels = vec![0usize; n];
    let mut best: Option<BestClustering> = None;
    loop {
        if (0..k).all(|j| labels.contains(&j)) {
            let mut sums = vec![vec![0.0f64; d]; k];
            let mut counts = vec![0usize; k];
            for i in 0..n {
                for c in 0..d {
                    sums[labels[i]][c] += points[[i, c]];
                }
                counts[labels[i]] += 1;
            }
            let centroids: Vec<Vec<f64>> = sums
                .iter()
                .zip(counts.iter())
                .map(|(s, &cnt)| s.iter().map(|&x| x / cnt as f64).collect())
                .collect();
            let mut inertia = 0.0;
            for i in 0..n {
                let mut acc = 0.0;
                for c in 0..d {
                    let diff = points[[i, c]] - centroids[labels[i]][c];
                    acc += diff * diff;
                }
                inertia += acc;
            }
            if best.as_ref().is_none_or(|b| inertia < b.inertia) {
                best = Some(BestClustering { inertia, labels: labels.clone() });
            }
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return best.expect("at least one surjective assignment exists");
            }
            labels[pos] += 1;
            if labels[pos] < k {
                break;
            }
            labels[pos] = 0;
            pos += 1;
        }
    }
}

pub struct WeatOracle {
    pub effect_size: f64,
    pub p_value: f64,
    pub repartitions: u64,
}

fn choose_recurse(
    pool: usize,
    need: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if need == 0 {
        visit(chosen);
        return;
    }
    for i in start..=(pool - need) {
        chosen.push(i);
        choose_recurse(pool, need - 1, i + 1, chosen, visit);
        chosen.pop();
    }
}

/// Exhaustive association-test statistics from precomputed per-word
/// association values, first target group then second. Uses the
/// selected-minus-rest form of the statistic and recursive subset
/// generation, sharing nothing with the library's bitmask route.
pub fn exhaustive_weat(s_x: &[f64], s_y: &[f64]) -> WeatOracle {
    assert_eq!(s_x.len(), s_y.len());
    let n = s_x.len();
    let all: Vec<f64> = s_x.iter().chain(s_y.iter()).copied().collect();

    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mean_all = mean(&all);
    let var =
        all.iter().map(|s| (s - mean_all) * (s - mean_all)).sum::<f64>() / (all.len() - 1) as f64;
    let std = var.sqrt();
    let effect_size = if std == 0.0 { 0.0 } else { (mean(s_x) - mean(s_y)) / std };

    let observed: f64 = s_x.iter().sum::<f64>() - s_y.iter().sum::<f64>();
    let mut hits = 0u64;
    let mut total = 0u64;
    let mut chosen = Vec::with_capacity(n);
    choose_recurse(2 * n, n, 0, &mut chosen, &mut |sel| {
        let mut inside = 0.0;
        let mut outside = 0.0;
        let mut si = 0;
        for (i, &v) in all.iter().enumerate() {
            if si < sel.len() && sel[si] == i {
                inside += v;
                si += 1;
            } else {
                outside += v;
            }
        }
        total += 1;
        if inside - outside >= observed {
            hits += 1;
        }
    });

    WeatOracle {
        effect_size,
        p_value: hits as f64 / total as f64,
        repartitions: total,
    }
}

pub struct BruteAnalogy {
    pub correct: usize,
    pub answered: usize,
    pub skipped: usize,
    /// Predicted vocabulary index per answered question, in input order.
    pub predictions: Vec<Option<usize>>,
}

/// Naive analogy evaluation: linear token lookup, per-candidate cosine via
/// explicit dot products, strict-max argmax keeping the first winner.
pub fn brute_force_analogy(
    tokens: &[String],
    matrix: ArrayView2<'_, f64>,
    questions: &[(String, String, String, String)],
) -> BruteAnalogy {
    let n = tokens.len();
    let d = matrix.ncols();
    let find = |w: &str| tokens.iter().position(|t| t == w);
    let norm = |i: usize| -> f64 {
        let mut acc = 0.0;
        for c in 0..d {
            acc += matrix[[i, c]] * matrix[[i, c]];
        }
        acc.sqrt()
    };

    let mut out = BruteAnalogy { correct: 0, answered: 0, skipped: 0, predictions: Vec::new() };
    for (qa, qb, qc, qd) in questions {
        let ids = [find(qa), find(qb), find(qc), find(qd)];
        let usable = ids.iter().all(|i| i.is_some_and(|i| norm(i) > 0.0));
        if !usable {
            out.skipped += 1;
            out.predictions.push(None);
            continue;
        }
        let [a, b, c, answer] = ids.map(|i| i.unwrap());
        let query: Vec<f64> = (0..d).map(|j| matrix[[c, j]] - matrix[[a, j]] + matrix[[b, j]]).collect();
        let qnorm = query.iter().map(|v| v * v).sum::<f64>().sqrt();

        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if j == a || j == b || j == c {
                continue;
            }
            let nj = norm(j);
            if nj == 0.0 {
                continue;
            }
            let mut dot = 0.0;
            for col in 0..d {
                dot += query[col] * matrix[[j, col]];
            }
            let cos = dot / (qnorm * nj);
            if best.is_none_or(|(_, bs)| cos > bs) {
                best = Some((j, cos));
            }
        }
        let (pred, _) = best.expect("vocabulary larger than the exclusion set");
        out.answered += 1;
        if pred == answer {
            out.correct += 1;
        }
        out.predictions.push(Some(pred));
    }
    out
}
