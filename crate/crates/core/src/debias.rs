//! Gender-direction estimation, hard debiasing, and the frequency-direction
//! purification pipeline.
//!
//! The full pipeline ([`double_hard_debias`]) works on decentralized
//! embeddings: subtract the vocabulary mean, test each top principal
//! component as a frequency-distortion candidate, remove the candidate whose
//! removal makes male- and female-biased words hardest to separate by
//! clustering, then project out the gender direction recomputed from the
//! purified definitional pairs. The output stays decentralized; the mean is
//! not added back and vectors are not renormalized.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kmeans::kmeans;
use crate::linalg::{center, principal_components, PcaResult, Subspace};
use crate::store::{EmbeddingSet, WordList};

/// Default definitional pairs, (female, male) per entry.
pub const DEFINITIONAL_PAIRS: [(&str, &str); 10] = [
    ("woman", "man"),
    ("girl", "boy"),
    ("she", "he"),
    ("mother", "father"),
    ("daughter", "son"),
    ("gal", "guy"),
    ("female", "male"),
    ("her", "his"),
    ("herself", "himself"),
    ("Mary", "John"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenderPair {
    pub female: String,
    pub male: String,
}

/// Ordered list of distinct definitional pairs.
#[derive(Debug, Clone)]
pub struct GenderPairSet {
    pairs: Vec<GenderPair>,
}

impl GenderPairSet {
    pub fn new(pairs: Vec<GenderPair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, p) in pairs.iter().enumerate() {
            if pairs[..i].contains(p) {
                return Err(Error::InvalidInput(format!(
                    "duplicate pair {},{}",
                    p.male, p.female
                )));
            }
        }
        Ok(GenderPairSet { pairs })
    }

    pub fn definitional() -> Self {
        let pairs = DEFINITIONAL_PAIRS
            .iter()
            .map(|(f, m)| GenderPair { female: (*f).into(), male: (*m).into() })
            .collect();
        GenderPairSet { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &GenderPair> {
        self.pairs.iter()
    }

    /// All tokens of all pairs, in order, duplicates dropped.
    pub fn token_list(&self) -> WordList {
        let mut words = Vec::new();
        for p in &self.pairs {
            if !words.contains(&p.female) {
                words.push(p.female.clone());
            }
            if !words.contains(&p.male) {
                words.push(p.male.clone());
            }
        }
        WordList::new("definitional-pairs", words).expect("duplicates were dropped")
    }

    pub fn validate_against(&self, set: &EmbeddingSet) -> Result<()> {
        for p in &self.pairs {
            for w in [&p.female, &p.male] {
                if !set.contains(w) {
                    return Err(Error::MissingWord { word: w.clone() });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DebiasVariant {
    /// Neutralize everything except gender-specific words.
    Hard,
    /// Neutralize every word, gender-specific ones included.
    StrongHard,
    /// Hard, preceded by frequency-direction purification.
    DoubleHard,
}

#[derive(Debug, Clone)]
pub struct DebiasConfig {
    /// How many top principal components to score as frequency-direction
    /// candidates. `None` uses ceil(d / 100) + 6, capped at min(n, d).
    pub candidate_count: Option<usize>,
    /// Words taken from each end of the gender axis for the scoring
    /// clusters; capped at half the non-excluded vocabulary.
    pub biased_word_count: usize,
    pub variant: DebiasVariant,
    pub seed: u64,
    /// Words whose gender is intentional; never neutralized (except by
    /// [`DebiasVariant::StrongHard`]) and never counted as biased.
    pub gender_specific_words: WordList,
    /// 1-based component numbers to remove instead of the discovered one.
    pub override_components: Option<Vec<usize>>,
    /// Fit the candidate PCA on the biased words only instead of the full
    /// vocabulary.
    pub pca_on_biased_only: bool,
}

impl Default for DebiasConfig {
    fn default() -> Self {
        DebiasConfig {
            candidate_count: None,
            biased_word_count: 500,
            variant: DebiasVariant::DoubleHard,
            seed: 42,
            gender_specific_words: WordList::empty("gender-specific"),
            override_components: None,
            pca_on_biased_only: false,
        }
    }
}

impl DebiasConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.candidate_count {
            if c == 0 {
                return Err(Error::InvalidInput("candidate_count must be at least 1".into()));
            }
        }
        if self.biased_word_count < 2 {
            return Err(Error::InvalidInput("biased_word_count must be at least 2".into()));
        }
        if let Some(overrides) = &self.override_components {
            if overrides.is_empty() {
                return Err(Error::InvalidInput("override_components is empty".into()));
            }
            if overrides.contains(&0) {
                return Err(Error::InvalidInput("component numbers are 1-based".into()));
            }
        }
        Ok(())
    }
}

pub fn default_candidate_count(dim: usize, vocab: usize) -> usize {
    (dim.div_ceil(100) + 6).min(dim.min(vocab)).max(1)
}

/// Outcome of scoring the candidate components. Component numbers are
/// 1-based: `selected_index = 2` means the second principal component.
#[derive(Debug, Clone, Serialize)]
pub struct DiscoveryReport {
    /// Folded clustering accuracy per candidate, in component order; each
    /// value lies in [0.5, 1], lower meaning better purification.
    pub scores: Vec<f64>,
    /// 1-based component number with the lowest score (lowest index wins
    /// ties).
    pub selected_index: usize,
    /// 1-based numbers of other candidates scoring within 0.01 of the
    /// selected one.
    pub near_ties: Vec<usize>,
}

/// Gender direction from stacked pair rows (w - mu_i) / sqrt(|D_i|), the top
/// right singular vector of that matrix.
fn direction_from_pair_rows(rows: &[(Array1<f64>, Array1<f64>)]) -> Result<Subspace> {
    let d = rows[0].0.len();
    let mut m = Array2::zeros((2 * rows.len(), d));
    let scale = 1.0 / 2.0_f64.sqrt();
    for (i, (f, mv)) in rows.iter().enumerate() {
        let mu = (f + mv) / 2.0;
        m.row_mut(2 * i).assign(&((f - &mu) * scale));
        m.row_mut(2 * i + 1).assign(&((mv - &mu) * scale));
    }
    match principal_components(m.view(), 1) {
        Ok(pca) => Ok(pca.components),
        Err(Error::RankDeficient { .. }) => Err(Error::InvalidInput(
            "definitional pairs define no direction (identical vectors)".into(),
        )),
        Err(e) => Err(e),
    }
}

/// Top right singular vector of the per-pair centered definitional rows.
pub fn gender_direction(set: &EmbeddingSet, pairs: &GenderPairSet) -> Result<Subspace> {
    pairs.validate_against(set)?;
    let rows: Vec<(Array1<f64>, Array1<f64>)> = pairs
        .iter()
        .map(|p| {
            (
                set.vector(&p.female).expect("validated").to_owned(),
                set.vector(&p.male).expect("validated").to_owned(),
            )
        })
        .collect();
    direction_from_pair_rows(&rows)
}

/// Flips the direction, if needed, so male definitional words project
/// positively on average.
pub fn orient_male_positive(
    direction: &Subspace,
    set: &EmbeddingSet,
    pairs: &GenderPairSet,
) -> Result<Subspace> {
    pairs.validate_against(set)?;
    let b = direction.direction();
    let mut polarity = 0.0;
    for p in pairs.iter() {
        polarity += set.vector(&p.male).expect("validated").dot(&b);
        polarity -= set.vector(&p.female).expect("validated").dot(&b);
    }
    if polarity < 0.0 {
        Subspace::new(direction.basis().mapv(|x| -x))
    } else {
        Ok(direction.clone())
    }
}

/// Removes the projection onto `direction` from every word in `neutral`;
/// all other vectors are returned untouched.
pub fn hard_debias(
    set: &EmbeddingSet,
    direction: &Subspace,
    neutral: &WordList,
) -> Result<EmbeddingSet> {
    if direction.dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: direction.dim() });
    }
    let mut matrix = set.matrix().to_owned();
    for word in neutral.iter() {
        let idx = set
            .index_of(word)
            .ok_or_else(|| Error::MissingWord { word: word.clone() })?;
        let mut row = matrix.row_mut(idx);
        for b in direction.basis().rows() {
            let coeff = row.dot(&b);
            row.scaled_add(-coeff, &b);
        }
    }
    set.with_matrix(matrix)
}

/// Words with the largest positive and most negative signed projections onto
/// the (1-dimensional, male-positive) direction. Ties rank by vocabulary
/// order. The requested count is capped at half the non-excluded vocabulary
/// so the two lists cannot overlap.
pub fn top_biased_words(
    set: &EmbeddingSet,
    direction: &Subspace,
    count: usize,
    exclusions: &WordList,
) -> Result<(WordList, WordList)> {
    if direction.dim() != set.dim() {
        return Err(Error::DimensionMismatch { expected: set.dim(), got: direction.dim() });
    }
    let b = direction.direction();
    let mut scored: Vec<(usize, f64)> = Vec::new();
    for (i, token) in set.tokens().iter().enumerate() {
        if !exclusions.contains(token) {
            scored.push((i, set.row(i).dot(&b)));
        }
    }
    let effective = count.min(scored.len() / 2);
    if effective == 0 {
        return Err(Error::InvalidInput(format!(
            "vocabulary too small: {} words available after exclusions",
            scored.len()
        )));
    }

    let mut by_desc = scored.clone();
    by_desc.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let male: Vec<String> =
        by_desc[..effective].iter().map(|&(i, _)| set.tokens()[i].clone()).collect();

    scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    let female: Vec<String> =
        scored[..effective].iter().map(|&(i, _)| set.tokens()[i].clone()).collect();

    Ok((WordList::new("male-biased", male)?, WordList::new("female-biased", female)?))
}

struct Discovery {
    report: DiscoveryReport,
    centered: Array2<f64>,
    candidates: PcaResult,
}

fn remove_component_rows(rows: &mut Array2<f64>, u: ArrayView1<'_, f64>) {
    for mut row in rows.rows_mut() {
        let coeff = row.dot(&u);
        row.scaled_add(-coeff, &u);
    }
}

fn pair_rows_of(matrix: ArrayView2<'_, f64>, idx: &[(usize, usize)]) -> Vec<(Array1<f64>, Array1<f64>)> {
    idx.iter()
        .map(|&(f, m)| (matrix.row(f).to_owned(), matrix.row(m).to_owned()))
        .collect()
}

fn discover(set: &EmbeddingSet, pairs: &GenderPairSet, config: &DebiasConfig) -> Result<Discovery> {
    config.validate()?;
    pairs.validate_against(set)?;

    let mut candidate_count = config
        .candidate_count
        .unwrap_or_else(|| default_candidate_count(set.dim(), set.len()));
    if let Some(overrides) = &config.override_components {
        candidate_count = candidate_count.max(*overrides.iter().max().expect("non-empty"));
    }

    let direction0 = gender_direction(set, pairs)?;
    let direction0 = orient_male_positive(&direction0, set, pairs)?;
    let exclusions =
        config.gender_specific_words.union(&pairs.token_list(), "excluded-from-ranking");
    let (male, female) =
        top_biased_words(set, &direction0, config.biased_word_count, &exclusions)?;

    let (centered, _mean) = center(set.matrix())?;

    let candidates = if config.pca_on_biased_only {
        let mut rows = Array2::zeros((male.len() + female.len(), set.dim()));
        for (r, w) in male.iter().chain(female.iter()).enumerate() {
            let idx = set.index_of(w).expect("ranked words are in vocabulary");
            rows.row_mut(r).assign(&centered.row(idx));
        }
        let (sub_centered, _) = center(rows.view())?;
        principal_components(sub_centered.view(), candidate_count)?
    } else {
        principal_components(centered.view(), candidate_count)?
    };

    let biased_count = male.len();
    let mut biased_rows = Array2::zeros((2 * biased_count, set.dim()));
    for (r, w) in male.iter().chain(female.iter()).enumerate() {
        let idx = set.index_of(w).expect("ranked words are in vocabulary");
        biased_rows.row_mut(r).assign(&centered.row(idx));
    }
    let pair_idx: Vec<(usize, usize)> = pairs
        .iter()
        .map(|p| {
            (
                set.index_of(&p.female).expect("validated"),
                set.index_of(&p.male).expect("validated"),
            )
        })
        .collect();

    let mut scores = Vec::with_capacity(candidate_count);
    for c in 0..candidate_count {
        let u = candidates.components.component(c);

        let mut purged = biased_rows.clone();
        remove_component_rows(&mut purged, u);

        let mut pair_rows = pair_rows_of(centered.view(), &pair_idx);
        for (f, m) in pair_rows.iter_mut() {
            let cf = f.dot(&u);
            f.scaled_add(-cf, &u);
            let cm = m.dot(&u);
            m.scaled_add(-cm, &u);
        }
        let direction_c = direction_from_pair_rows(&pair_rows)?;

        let g = direction_c.direction();
        remove_component_rows(&mut purged, g);

        let clusters = kmeans(purged.view(), 2, config.seed)?;
        let hits = clusters
            .labels
            .iter()
            .enumerate()
            .filter(|&(i, &l)| l == usize::from(i >= biased_count))
            .count();
        let accuracy = hits as f64 / (2 * biased_count) as f64;
        scores.push(accuracy.max(1.0 - accuracy));
    }

    let selected0 = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .expect("candidate_count >= 1");
    let near_ties: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|&(i, &s)| i != selected0 && s - scores[selected0] <= 0.01)
        .map(|(i, _)| i + 1)
        .collect();

    Ok(Discovery {
        report: DiscoveryReport { scores, selected_index: selected0 + 1, near_ties },
        centered,
        candidates,
    })
}

/// Scores every candidate component without modifying the embeddings.
pub fn discover_frequency_direction(
    set: &EmbeddingSet,
    pairs: &GenderPairSet,
    config: &DebiasConfig,
) -> Result<DiscoveryReport> {
    discover(set, pairs, config).map(|d| d.report)
}

/// The full pipeline: decentralize, remove the discovered frequency
/// component (or the configured overrides), then hard-debias against the
/// gender direction recomputed from the purified pairs.
pub fn double_hard_debias(
    set: &EmbeddingSet,
    pairs: &GenderPairSet,
    config: &DebiasConfig,
) -> Result<(EmbeddingSet, DiscoveryReport)> {
    let disc = discover(set, pairs, config)?;
    let mut matrix = disc.centered;

    let removal: Vec<usize> = match &config.override_components {
        Some(list) => list.iter().map(|&n| n - 1).collect(),
        None => vec![disc.report.selected_index - 1],
    };
    for &c in &removal {
        remove_component_rows(&mut matrix, disc.candidates.components.component(c));
    }

    let pair_idx: Vec<(usize, usize)> = pairs
        .iter()
        .map(|p| {
            (
                set.index_of(&p.female).expect("validated"),
                set.index_of(&p.male).expect("validated"),
            )
        })
        .collect();
    let direction = direction_from_pair_rows(&pair_rows_of(matrix.view(), &pair_idx))?;
    let g = direction.direction();

    let keep = match config.variant {
        DebiasVariant::StrongHard => WordList::empty("none"),
        DebiasVariant::Hard | DebiasVariant::DoubleHard => {
            config.gender_specific_words.union(&pairs.token_list(), "gender-specific")
        }
    };
    for (i, token) in set.tokens().iter().enumerate() {
        if !keep.contains(token) {
            let mut row = matrix.row_mut(i);
            let coeff = row.dot(&g);
            row.scaled_add(-coeff, &g);
        }
    }

    Ok((set.with_matrix(matrix)?, disc.report))
}

/// Classic baseline without purification: estimate the gender direction on
/// the raw embeddings and neutralize. No centering is applied, so untouched
/// words keep their exact input vectors.
pub fn hard_debias_pipeline(
    set: &EmbeddingSet,
    pairs: &GenderPairSet,
    config: &DebiasConfig,
) -> Result<EmbeddingSet> {
    config.validate()?;
    pairs.validate_against(set)?;
    let direction = gender_direction(set, pairs)?;
    let neutral = match config.variant {
        DebiasVariant::StrongHard => {
            WordList::new("all", set.tokens().to_vec()).expect("vocab tokens are unique")
        }
        DebiasVariant::Hard | DebiasVariant::DoubleHard => {
            let keep = config.gender_specific_words.union(&pairs.token_list(), "keep");
            let words: Vec<String> =
                set.tokens().iter().filter(|t| !keep.contains(t)).cloned().collect();
            if words.is_empty() {
                return Err(Error::InvalidInput("no neutral words to debias".into()));
            }
            WordList::new("neutral", words).expect("vocab tokens are unique")
        }
    };
    hard_debias(set, &direction, &neutral)
}
