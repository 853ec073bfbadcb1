//! Bias metrics over embedding sets.
//!
//! * [`neighborhood_alignment`]: how well 2-means clustering over known
//!   male- and female-biased words recovers the gender split; 0.5 means the
//!   clusters carry no gender signal, 1.0 means perfect separation.
//! * [`weat`]: word embedding association test with effect size and a
//!   one-sided permutation p-value, exact when the repartition count is
//!   small enough, Monte Carlo otherwise.
//! * [`analogy_accuracy`]: 3CosAdd word analogies, excluding the three query
//!   words from the candidates.
//! * [`categorization_purity`]: cluster words into as many clusters as
//!   labeled categories and score the majority overlap.
//! * [`pair_difference_similarity`]: cosine structure of the definitional
//!   difference vectors, optionally against a second (e.g. debiased) set.

use std::collections::BTreeMap;

use ndarray::{s, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::debias::GenderPairSet;
use crate::error::{Error, Result};
use crate::kmeans::kmeans;
use crate::linalg::cosine_similarity;
use crate::store::{EmbeddingSet, WordList};

/// Repartition counts up to this bound are enumerated exactly; larger ones
/// fall back to Monte Carlo sampling.
pub const EXACT_PERMUTATION_LIMIT: u128 = 200_000;

#[derive(Debug, Clone, Serialize)]
pub struct AlignmentResult {
    /// Folded agreement max(a, 1 - a) between cluster labels and the true
    /// gender split; always in [0.5, 1].
    pub accuracy: f64,
    /// Cluster index per word, male group first, then female group.
    pub cluster_labels: Vec<usize>,
    pub word_count: usize,
}

/// Clusters the two biased groups with 2-means and measures how well the
/// clusters reproduce the gender split.
pub fn neighborhood_alignment(
    set: &EmbeddingSet,
    male: &WordList,
    female: &WordList,
    seed: u64,
) -> Result<AlignmentResult> {
    if male.is_empty() || female.is_empty() {
        return Err(Error::EmptyInput);
    }
    if male.len() != female.len() {
        return Err(Error::InvalidInput(format!(
            "group sizes differ: {} male vs {} female",
            male.len(),
            female.len()
        )));
    }
    let k = male.len();
    let mut points = Array2::zeros((2 * k, set.dim()));
    for (r, w) in male.iter().chain(female.iter()).enumerate() {
        let idx = set
            .index_of(w)
            .ok_or_else(|| Error::MissingWord { word: w.clone() })?;
        points.row_mut(r).assign(&set.row(idx));
    }
    let clusters = kmeans(points.view(), 2, seed)?;
    let hits = clusters
        .labels
        .iter()
        .enumerate()
        .filter(|&(i, &l)| l == usize::from(i >= k))
        .count();
    let a = hits as f64 / (2 * k) as f64;
    Ok(AlignmentResult {
        accuracy: a.max(1.0 - a),
        cluster_labels: clusters.labels,
        word_count: 2 * k,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct WeatResult {
    /// Effect size d = (mean_X s - mean_Y s) / sample-std over X union Y.
    pub effect_size: f64,
    /// One-sided p-value: fraction of equal-size repartitions whose
    /// statistic is >= the observed one (the identity partition included).
    pub p_value: f64,
    /// Repartitions examined: the full count when exact, the number of
    /// Monte Carlo draws otherwise.
    pub permutations_used: u64,
    pub exact: bool,
    /// Words missing from the vocabulary across all four lists.
    pub dropped_words: usize,
    /// Per-side target count after dropping and trimming.
    pub target_size: usize,
}

fn binom_capped(n: u64, k: u64, cap: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
        if c > cap {
            return None;
        }
    }
    Some(c)
}

/// Gosper's hack: next bitmask with the same popcount.
fn next_combination(v: u64) -> u64 {
    let t = v | (v - 1);
    let low = !t & (!t).wrapping_neg();
    (t + 1) | ((low - 1) >> (v.trailing_zeros() + 1))
}

/// Sum of s-values selected by `mask`, accumulated in ascending bit order so
/// equal masks always produce bitwise-equal sums.
fn masked_sum(svals: &[f64], mask: u64) -> f64 {
    let mut sum = 0.0;
    for (i, s) in svals.iter().enumerate() {
        if mask & (1u64 << i) != 0 {
            sum += s;
        }
    }
    sum
}

fn resolve_list(set: &EmbeddingSet, list: &WordList) -> (Vec<usize>, usize) {
    let mut kept = Vec::with_capacity(list.len());
    let mut dropped = 0;
    for w in list.iter() {
        match set.index_of(w) {
            Some(i) => kept.push(i),
            None => dropped += 1,
        }
    }
    (kept, dropped)
}

struct WeatCore {
    svals: Vec<f64>,
    n: usize,
    effect_size: f64,
    dropped_words: usize,
}

/// Association values and effect size shared by both p-value routes.
fn weat_core(
    set: &EmbeddingSet,
    x: &WordList,
    y: &WordList,
    a: &WordList,
    b: &WordList,
) -> Result<WeatCore> {
    let (x_idx, x_drop) = resolve_list(set, x);
    let (y_idx, y_drop) = resolve_list(set, y);
    let (a_idx, a_drop) = resolve_list(set, a);
    let (b_idx, b_drop) = resolve_list(set, b);
    let dropped_words = x_drop + y_drop + a_drop + b_drop;

    let n = x_idx.len().min(y_idx.len());
    if n == 0 {
        return Err(Error::InvalidInput("no target words left after dropping".into()));
    }
    if a_idx.is_empty() || b_idx.is_empty() {
        return Err(Error::InvalidInput("attribute list empty after dropping".into()));
    }
    if 2 * n > 64 {
        return Err(Error::InvalidInput(format!(
            "target lists too large for the permutation test: {n} per side, limit 32"
        )));
    }
    let x_idx = &x_idx[..n];
    let y_idx = &y_idx[..n];

    let assoc = |w: usize| -> Result<f64> {
        let mut sa = 0.0;
        for &i in &a_idx {
            sa += cosine_similarity(set.row(w), set.row(i))?;
        }
        let mut sb = 0.0;
        for &i in &b_idx {
            sb += cosine_similarity(set.row(w), set.row(i))?;
        }
        Ok(sa / a_idx.len() as f64 - sb / b_idx.len() as f64)
    };

    let mut svals = Vec::with_capacity(2 * n);
    for &w in x_idx.iter().chain(y_idx.iter()) {
        svals.push(assoc(w)?);
    }

    let mean_x = svals[..n].iter().sum::<f64>() / n as f64;
    let mean_y = svals[n..].iter().sum::<f64>() / n as f64;
    // The std is computed over a sorted copy so that swapping X and Y flips
    // the effect size sign bitwise.
    let mut sorted = svals.clone();
    sorted.sort_unstable_by(f64::total_cmp);
    let mean_all = sorted.iter().sum::<f64>() / (2 * n) as f64;
    let std = if n == 1 && sorted[0] == sorted[1] {
        0.0
    } else {
        (sorted.iter().map(|s| (s - mean_all) * (s - mean_all)).sum::<f64>()
            / (2 * n - 1) as f64)
            .sqrt()
    };
    let effect_size = if std == 0.0 { 0.0 } else { (mean_x - mean_y) / std };

    Ok(WeatCore { svals, n, effect_size, dropped_words })
}

/// Tail count over every equal-split repartition; `None` when the count
/// exceeds [`EXACT_PERMUTATION_LIMIT`].
fn permutation_p_exact(svals: &[f64], n: usize) -> Option<(f64, u64)> {
    let count = binom_capped(2 * n as u64, n as u64, EXACT_PERMUTATION_LIMIT)?;
    let total: f64 = svals.iter().sum();
    let stat = |mask: u64| 2.0 * masked_sum(svals, mask) - total;
    let observed = stat((1u64 << n) - 1);
    let mut hits = 0u64;
    let mut mask = (1u64 << n) - 1;
    let end = 1u64 << (2 * n);
    while mask < end {
        if stat(mask) >= observed {
            hits += 1;
        }
        mask = next_combination(mask);
    }
    Some((hits as f64 / count as f64, count as u64))
}

/// Tail estimate from uniformly sampled repartitions.
fn permutation_p_sampled(svals: &[f64], n: usize, seed: u64, draws: u64) -> (f64, u64) {
    let total: f64 = svals.iter().sum();
    let stat = |mask: u64| 2.0 * masked_sum(svals, mask) - total;
    let observed = stat((1u64 << n) - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..2 * n).collect();
    let mut hits = 0u64;
    for _ in 0..draws {
        for i in 0..n {
            let j = rng.gen_range(i..2 * n);
            indices.swap(i, j);
        }
        let mut mask = 0u64;
        for &i in &indices[..n] {
            mask |= 1u64 << i;
        }
        if stat(mask) >= observed {
            hits += 1;
        }
    }
    (hits as f64 / draws as f64, draws)
}

/// Word embedding association test of targets X vs Y against attributes A
/// vs B. Missing words are dropped; the longer target list is trimmed from
/// the tail to match the shorter. The p-value uses non-strict >=, so a
/// statistic-preserving repartition (X = Y, say) can never look
/// significant. Enumeration is exact while the repartition count stays
/// within [`EXACT_PERMUTATION_LIMIT`], sampled beyond it.
pub fn weat(
    set: &EmbeddingSet,
    x: &WordList,
    y: &WordList,
    a: &WordList,
    b: &WordList,
    seed: u64,
    max_permutations: u64,
) -> Result<WeatResult> {
    if max_permutations == 0 {
        return Err(Error::InvalidInput("max_permutations must be at least 1".into()));
    }
    let core = weat_core(set, x, y, a, b)?;
    let (p_value, permutations_used, exact) = match permutation_p_exact(&core.svals, core.n) {
        Some((p, used)) => (p, used, true),
        None => {
            let (p, used) = permutation_p_sampled(&core.svals, core.n, seed, max_permutations);
            (p, used, false)
        }
    };
    Ok(WeatResult {
        effect_size: core.effect_size,
        p_value,
        permutations_used,
        exact,
        dropped_words: core.dropped_words,
        target_size: core.n,
    })
}

/// [`weat`] with the sampling route forced, regardless of instance size.
/// Exists so the sampler can be validated against exact enumeration on
/// instances small enough to enumerate; reports `exact: false` always.
pub fn weat_forced_monte_carlo(
    set: &EmbeddingSet,
    x: &WordList,
    y: &WordList,
    a: &WordList,
    b: &WordList,
    seed: u64,
    max_permutations: u64,
) -> Result<WeatResult> {
    if max_permutations == 0 {
        return Err(Error::InvalidInput("max_permutations must be at least 1".into()));
    }
    let core = weat_core(set, x, y, a, b)?;
    let (p_value, permutations_used) =
        permutation_p_sampled(&core.svals, core.n, seed, max_permutations);
    Ok(WeatResult {
        effect_size: core.effect_size,
        p_value,
        permutations_used,
        exact: false,
        dropped_words: core.dropped_words,
        target_size: core.n,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyQuestion {
    pub a: String,
    pub b: String,
    pub c: String,
    pub answer: String,
    pub section: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectionStats {
    pub correct: usize,
    pub answered: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalogyResult {
    /// Fraction correct among answered questions (0 when none answered).
    pub accuracy: f64,
    pub correct: usize,
    pub answered: usize,
    /// Questions with a missing or zero-length word.
    pub skipped: usize,
    pub sections: BTreeMap<String, SectionStats>,
}

/// Aggregates section stats into (semantic, syntactic) pairs of
/// (correct, answered). Sections named `gram*` (the standard syntactic
/// section prefix) or `msr*` count as syntactic.
pub fn sem_syn_totals(result: &AnalogyResult) -> ((usize, usize), (usize, usize)) {
    let mut sem = (0, 0);
    let mut syn = (0, 0);
    for (name, stats) in &result.sections {
        let bucket = if name.starts_with("gram") || name.starts_with("msr") {
            &mut syn
        } else {
            &mut sem
        };
        bucket.0 += stats.correct;
        bucket.1 += stats.answered;
    }
    (sem, syn)
}

struct ResolvedQuestion {
    q: usize,
    a: usize,
    b: usize,
    c: usize,
    answer: usize,
}

/// 3CosAdd accuracy: for each question a:b :: c:?, the prediction is the
/// vocabulary word (excluding a, b and c) whose cosine to c - a + b is
/// largest, ties to the lowest index. Questions with any missing or
/// zero-length word are skipped.
pub fn analogy_accuracy(set: &EmbeddingSet, questions: &[AnalogyQuestion]) -> Result<AnalogyResult> {
    if questions.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = set.len();
    let d = set.dim();

    let mut normalized = set.matrix().to_owned();
    let mut unusable = vec![false; n];
    for (i, mut row) in normalized.rows_mut().into_iter().enumerate() {
        let norm = row.dot(&row).sqrt();
        if norm == 0.0 {
            unusable[i] = true;
        } else {
            row.mapv_inplace(|v| v / norm);
        }
    }

    let mut skipped = 0usize;
    let mut resolved: Vec<ResolvedQuestion> = Vec::with_capacity(questions.len());
    for (q, question) in questions.iter().enumerate() {
        let ids = [&question.a, &question.b, &question.c, &question.answer]
            .map(|w| set.index_of(w).filter(|&i| !unusable[i]));
        match ids {
            [Some(a), Some(b), Some(c), Some(answer)] => {
                resolved.push(ResolvedQuestion { q, a, b, c, answer });
            }
            _ => skipped += 1,
        }
    }

    const CHUNK: usize = 32;
    let mut qbuf = Array2::<f64>::zeros((CHUNK, d));
    let mut sbuf = Array2::<f64>::zeros((CHUNK, n));
    let mut correct_flags = vec![false; questions.len()];

    for chunk in resolved.chunks(CHUNK) {
        let m = chunk.len();
        for (r, rq) in chunk.iter().enumerate() {
            let mut row = qbuf.row_mut(r);
            row.assign(&set.row(rq.c));
            row -= &set.row(rq.a);
            row += &set.row(rq.b);
        }
        ndarray::linalg::general_mat_mul(
            1.0,
            &qbuf.slice(s![..m, ..]),
            &normalized.t(),
            0.0,
            &mut sbuf.slice_mut(s![..m, ..]),
        );
        for (r, rq) in chunk.iter().enumerate() {
            let scores = sbuf.row(r);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if unusable[j] || j == rq.a || j == rq.b || j == rq.c {
                    continue;
                }
                let sc = scores[j];
                if best.is_none_or(|(_, bs)| sc > bs) {
                    best = Some((j, sc));
                }
            }
            if let Some((j, _)) = best {
                correct_flags[rq.q] = j == rq.answer;
            }
        }
    }

    let mut sections: BTreeMap<String, SectionStats> = BTreeMap::new();
    let mut correct = 0usize;
    for rq in &resolved {
        let entry = sections.entry(questions[rq.q].section.clone()).or_insert(SectionStats {
            correct: 0,
            answered: 0,
            accuracy: 0.0,
        });
        entry.answered += 1;
        if correct_flags[rq.q] {
            entry.correct += 1;
            correct += 1;
        }
    }
    for stats in sections.values_mut() {
        stats.accuracy =
            if stats.answered > 0 { stats.correct as f64 / stats.answered as f64 } else { 0.0 };
    }
    let answered = resolved.len();
    Ok(AnalogyResult {
        accuracy: if answered > 0 { correct as f64 / answered as f64 } else { 0.0 },
        correct,
        answered,
        skipped,
        sections,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PurityResult {
    /// Fraction of words landing in a cluster whose majority category is
    /// theirs; in (0, 1].
    pub purity: f64,
    pub word_count: usize,
    pub category_count: usize,
    pub dropped_words: usize,
}

/// Clusters the labeled words into as many clusters as categories and
/// scores cluster purity. Missing words are dropped.
pub fn categorization_purity(
    set: &EmbeddingSet,
    items: &[(String, String)],
    seed: u64,
) -> Result<PurityResult> {
    if items.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut kept: Vec<(usize, &str)> = Vec::with_capacity(items.len());
    let mut dropped = 0usize;
    for (word, category) in items {
        match set.index_of(word) {
            Some(i) => kept.push((i, category.as_str())),
            None => dropped += 1,
        }
    }
    let mut categories: Vec<&str> = kept.iter().map(|&(_, c)| c).collect();
    categories.sort_unstable();
    categories.dedup();
    let k = categories.len();
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least two categories, found {k}"
        )));
    }
    if kept.len() < k {
        return Err(Error::InvalidInput(format!(
            "fewer words ({}) than categories ({k})",
            kept.len()
        )));
    }

    let mut points = Array2::zeros((kept.len(), set.dim()));
    for (r, &(i, _)) in kept.iter().enumerate() {
        points.row_mut(r).assign(&set.row(i));
    }
    let clusters = kmeans(points.view(), k, seed)?;

    let cat_id: BTreeMap<&str, usize> =
        categories.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut counts = vec![vec![0usize; k]; k];
    for (r, &(_, c)) in kept.iter().enumerate() {
        counts[clusters.labels[r]][cat_id[c]] += 1;
    }
    let majority: usize = counts.iter().map(|row| row.iter().max().copied().unwrap_or(0)).sum();

    Ok(PurityResult {
        purity: majority as f64 / kept.len() as f64,
        word_count: kept.len(),
        category_count: k,
        dropped_words: dropped,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDifferenceReport {
    /// One label per pair, `male-female`.
    pub labels: Vec<String>,
    /// Cosine similarity between difference vectors; symmetric with a unit
    /// diagonal.
    pub similarity: Vec<Vec<f64>>,
    /// Present when a comparison set was given: similarity there minus
    /// similarity here.
    pub delta: Option<Vec<Vec<f64>>>,
    /// Percent change of each difference vector's length in the comparison
    /// set.
    pub norm_change_pct: Option<Vec<f64>>,
}

fn difference_vectors(set: &EmbeddingSet, pairs: &GenderPairSet) -> Result<Vec<ndarray::Array1<f64>>> {
    pairs.validate_against(set)?;
    let diffs: Vec<ndarray::Array1<f64>> = pairs
        .iter()
        .map(|p| {
            &set.vector(&p.male).expect("validated") - &set.vector(&p.female).expect("validated")
        })
        .collect();
    if diffs.iter().any(|v| v.iter().all(|&x| x == 0.0)) {
        return Err(Error::UndefinedSimilarity);
    }
    Ok(diffs)
}

fn similarity_matrix(diffs: &[ndarray::Array1<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = diffs.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        out[i][i] = 1.0;
        for j in 0..i {
            let c = cosine_similarity(diffs[i].view(), diffs[j].view())?;
            out[i][j] = c;
            out[j][i] = c;
        }
    }
    Ok(out)
}

/// Cosine structure of the male-minus-female difference vectors. With a
/// comparison set (the same vocabulary after debiasing, typically), also
/// reports the similarity change and the length change of each difference.
pub fn pair_difference_similarity(
    set: &EmbeddingSet,
    compare: Option<&EmbeddingSet>,
    pairs: &GenderPairSet,
) -> Result<PairDifferenceReport> {
    let diffs = difference_vectors(set, pairs)?;
    let similarity = similarity_matrix(&diffs)?;
    let labels = pairs.iter().map(|p| format!("{}-{}", p.male, p.female)).collect();

    let (delta, norm_change_pct) = match compare {
        None => (None, None),
        Some(other) => {
            let other_diffs = difference_vectors(other, pairs)?;
            let other_sim = similarity_matrix(&other_diffs)?;
            let delta: Vec<Vec<f64>> = other_sim
                .iter()
                .zip(similarity.iter())
                .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x - y).collect())
                .collect();
            let norms: Vec<f64> = diffs
                .iter()
                .zip(other_diffs.iter())
                .map(|(v, w)| {
                    let nv = v.dot(v).sqrt();
                    let nw = w.dot(w).sqrt();
                    (nw / nv - 1.0) * 100.0
                })
                .collect();
            (Some(delta), Some(norms))
        }
    };

    Ok(PairDifferenceReport { labels, similarity, delta, norm_change_pct })
}

/// Everything the eval command can measure, assembled per run.
#[derive(Debug, Clone, Serialize)]
pub struct BiasReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighborhood: Option<AlignmentResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub weat: Vec<NamedWeatResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analogy: Option<AnalogyResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub categorization: Option<PurityResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_difference: Option<PairDifferenceReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedWeatResult {
    pub name: String,
    #[serde(flatten)]
    pub result: WeatResult,
}

impl BiasReport {
    pub fn empty() -> Self {
        BiasReport {
            neighborhood: None,
            weat: Vec::new(),
            analogy: None,
            categorization: None,
            pair_difference: None,
        }
    }
}
