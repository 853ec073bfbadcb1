//! Lloyd's k-means with k-means++ seeding.
//!
//! Runs 10 restarts of at most 300 iterations each and keeps the restart
//! with the lowest inertia (ties go to the lowest restart index). A restart
//! stops when the assignment is stable or the largest centroid shift drops
//! below 1e-4. All randomness comes from ChaCha8 streams derived from the
//! caller's seed, so results are reproducible across runs and platforms.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const RESTARTS: usize = 10;
const MAX_ITERS: usize = 300;
const SHIFT_TOL: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct ClusterResult {
    /// Cluster index per point, parallel to the input rows.
    pub labels: Vec<usize>,
    /// k x d matrix; row j is the mean of the points labeled j.
    pub centroids: Array2<f64>,
    /// Sum of squared distances from each point to its centroid.
    pub inertia: f64,
}

/// Each restart gets an independent, reproducible ChaCha8 stream.
fn restart_seed(seed: u64, restart: u64) -> u64 {
    crate::seeds::mix(seed.wrapping_add((restart + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let diff = x - y;
        acc += diff * diff;
    }
    acc
}

/// k-means++: first centroid uniform, then each next point drawn with
/// probability proportional to its squared distance to the nearest chosen
/// centroid. Degenerate case (all remaining distances zero) falls back to a
/// uniform draw.
fn plus_plus_init(points: ArrayView2<'_, f64>, k: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = Array2::zeros((k, d));
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).assign(&points.row(first));

    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), points.row(first))).collect();
    for j in 1..k {
        let total: f64 = d2.iter().sum();
        let idx = if total > 0.0 {
            let x = rng.gen::<f64>() * total;
            let mut cum = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                cum += w;
                if cum > x {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave cum <= x at the end; take the last point
            // with positive weight.
            pick.unwrap_or_else(|| {
                d2.iter().rposition(|&w| w > 0.0).expect("total > 0")
            })
        } else {
            rng.gen_range(0..n)
        };
        centroids.row_mut(j).assign(&points.row(idx));
        for (i, slot) in d2.iter_mut().enumerate() {
            let dist = sq_dist(points.row(i), points.row(idx));
            if dist < *slot {
                *slot = dist;
            }
        }
    }
    centroids
}

struct Restart {
    labels: Vec<usize>,
    centroids: Array2<f64>,
    inertia: f64,
    /// Inertia after each assignment phase; non-increasing by construction.
    history: Vec<f64>,
}

fn run_restart(points: ArrayView2<'_, f64>, k: usize, rng: &mut ChaCha8Rng) -> Restart {
    let n = points.nrows();
    let d = points.ncols();
    let mut centroids = plus_plus_init(points, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut history = Vec::new();

    let point_norms: Vec<f64> = (0..n).map(|i| points.row(i).dot(&points.row(i))).collect();

    for _ in 0..MAX_ITERS {
        // Assignment. argmin_j ||p - c_j||^2 = argmin_j (||c_j||^2 - 2 p.c_j),
        // computed through one gemm; ties go to the lowest centroid index.
        let dots = points.dot(&centroids.t());
        let cn: Vec<f64> = (0..k).map(|j| centroids.row(j).dot(&centroids.row(j))).collect();
        let mut changed = false;
        let mut inertia_acc = 0.0;
        for i in 0..n {
            let mut best = 0;
            let mut best_val = cn[0] - 2.0 * dots[[i, 0]];
            for j in 1..k {
                let val = cn[j] - 2.0 * dots[[i, j]];
                if val < best_val {
                    best_val = val;
                    best = j;
                }
            }
            inertia_acc += point_norms[i] + best_val;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        history.push(inertia_acc.max(0.0));
        if !changed {
            break;
        }

        // Update. An empty cluster keeps its previous centroid.
        let mut sums = Array2::<f64>::zeros((k, d));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let mut row = sums.row_mut(labels[i]);
            row += &points.row(i);
            counts[labels[i]] += 1;
        }
        let mut shift: f64 = 0.0;
        for (j, &c) in counts.iter().enumerate() {
            if c > 0 {
                let mean = &sums.row(j) / c as f64;
                shift = shift.max(sq_dist(mean.view(), centroids.row(j)).sqrt());
                centroids.row_mut(j).assign(&mean);
            }
        }
        if shift < SHIFT_TOL {
            break;
        }
    }

    // Canonical finalization: centroids become the means of the final
    // assignment, and inertia is recomputed in point order against them, so
    // equal partitions always report bitwise-equal inertia.
    let mut sums = Array2::<f64>::zeros((k, d));
    let mut counts = vec![0usize; k];
    for i in 0..n {
        let mut row = sums.row_mut(labels[i]);
        row += &points.row(i);
        counts[labels[i]] += 1;
    }
    for (j, &c) in counts.iter().enumerate() {
        if c > 0 {
            let mean = &sums.row(j) / c as f64;
            centroids.row_mut(j).assign(&mean);
        }
    }
    let mut inertia = 0.0;
    for (i, &l) in labels.iter().enumerate() {
        inertia += sq_dist(points.row(i), centroids.row(l));
    }
    Restart { labels, centroids, inertia, history }
}

/// [`kmeans`] result plus convergence diagnostics.
pub struct KmeansDetail {
    pub result: ClusterResult,
    /// Index of the restart that won on inertia (first winner on ties).
    pub winning_restart: usize,
    /// Inertia after each Lloyd iteration of the winning restart.
    pub history: Vec<f64>,
}

/// Same clustering as [`kmeans`], keeping per-run diagnostics.
pub fn kmeans_detailed(
    points: ArrayView2<'_, f64>,
    k: usize,
    seed: u64,
) -> Result<KmeansDetail> {
    let n = points.nrows();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if n < k {
        return Err(Error::InvalidInput(format!("{n} points cannot form {k} clusters")));
    }

    let mut best: Option<(usize, Restart)> = None;
    for r in 0..RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, r as u64));
        let run = run_restart(points, k, &mut rng);
        let better = match &best {
            None => true,
            Some((_, b)) => run.inertia < b.inertia,
        };
        if better {
            best = Some((r, run));
        }
    }
    let (winning_restart, run) = best.expect("RESTARTS > 0");
    Ok(KmeansDetail {
        result: ClusterResult {
            labels: run.labels,
            centroids: run.centroids,
            inertia: run.inertia,
        },
        winning_restart,
        history: run.history,
    })
}

/// Clusters the rows of `points` into `k` groups.
pub fn kmeans(points: ArrayView2<'_, f64>, k: usize, seed: u64) -> Result<ClusterResult> {
    kmeans_detailed(points, k, seed).map(|d| d.result)
}
