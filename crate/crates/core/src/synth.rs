//! Synthetic embeddings with planted structure, used by the test suite and
//! for generating small fixtures.
//!
//! Every word is isotropic Gaussian noise (sigma = 1) plus two planted
//! signals: a gender offset of +-`gender_strength` on `gender_axis` for the
//! two biased word groups, and a frequency amplitude `freq_scale * L` on
//! `freq_axis`, where L is the word's log-frequency. Male-group words draw
//! log-frequencies around `freq_log_mean_male`, female-group words around
//! `freq_log_mean_female`, so the frequency axis carries enough
//! group-correlated variance to dominate the spectrum (a top-3 principal
//! component at the defaults) and to be discoverable by purification.
//!
//! Definitional pair words and the small gender-specific list sit far out on
//! the gender axis with low noise, mimicking words whose gender is
//! essentially exact, and take the midpoint log-frequency so their pair
//! differences carry no frequency signal.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::debias::{DebiasConfig, GenderPairSet};
use crate::error::{Error, Result};
use crate::linalg::{center, principal_components};
use crate::store::{EmbeddingSet, WordList};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Words per biased group.
    pub group_size: usize,
    pub dim: usize,
    pub gender_axis: usize,
    pub freq_axis: usize,
    /// Gender offset of biased group words.
    pub gender_strength: f64,
    /// Gender offset of definitional and gender-specific words.
    pub pair_strength: f64,
    /// Noise scale of definitional and gender-specific words.
    pub pair_noise: f64,
    /// Multiplier from log-frequency to the frequency-axis amplitude.
    pub freq_scale: f64,
    pub freq_log_mean_male: f64,
    pub freq_log_mean_female: f64,
    pub freq_log_sd: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            group_size: 500,
            dim: 50,
            gender_axis: 0,
            freq_axis: 1,
            gender_strength: 0.8,
            pair_strength: 2.0,
            pair_noise: 0.1,
            freq_scale: 0.85,
            freq_log_mean_male: (1.0e5_f64).ln(),
            freq_log_mean_female: (1.0e3_f64).ln(),
            freq_log_sd: 0.5,
            seed: 0,
        }
    }
}

/// Extra tokens whose gender is intentional, (female, male) interleaved.
const SPECIFIC_WORDS: [(&str, bool); 4] =
    [("queen", false), ("king", true), ("waitress", false), ("waiter", true)];

pub struct SynthSet {
    pub set: EmbeddingSet,
    pub pairs: GenderPairSet,
    /// The male biased group, in vocabulary order.
    pub male_words: WordList,
    /// The female biased group, in vocabulary order.
    pub female_words: WordList,
    pub config: SynthConfig,
}

impl SynthSet {
    /// The generator's gender-specific tokens (not counting pair words).
    pub fn specific_words(&self) -> WordList {
        WordList::new(
            "gender-specific",
            SPECIFIC_WORDS.iter().map(|(w, _)| (*w).to_string()).collect(),
        )
        .expect("constants are unique")
    }

    /// 1-based index of the principal component that matches the planted
    /// frequency axis, judged by the largest `freq_axis` coordinate among
    /// the candidate components the given config would score. Fails when no
    /// candidate carries most of the axis.
    pub fn planted_component(&self, config: &DebiasConfig) -> Result<usize> {
        let count = config.candidate_count.unwrap_or_else(|| {
            crate::debias::default_candidate_count(self.set.dim(), self.set.len())
        });
        let (centered, _) = center(self.set.matrix())?;
        let pca = principal_components(centered.view(), count)?;
        let (best, coord) = (0..count)
            .map(|i| (i, pca.components.component(i)[self.config.freq_axis].abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("count >= 1");
        if coord < 0.5 {
            return Err(Error::Numeric(format!(
                "planted frequency axis is not identifiable (best overlap {coord:.3})"
            )));
        }
        Ok(best + 1)
    }
}

/// Builds the planted-structure embedding set. Vocabulary order: the male
/// group (`m0000`..), the female group (`f0000`..), the definitional pair
/// words, then the gender-specific words; total size 2 * group_size + 24.
pub fn generate(config: &SynthConfig) -> SynthSet {
    assert!(config.group_size >= 1, "group_size must be at least 1");
    assert!(
        config.gender_axis < config.dim && config.freq_axis < config.dim,
        "planted axes must fit the dimension"
    );
    assert_ne!(config.gender_axis, config.freq_axis, "planted axes must differ");

    fn normal(rng: &mut ChaCha8Rng) -> f64 {
        StandardNormal.sample(rng)
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let pairs = GenderPairSet::definitional();
    let pair_tokens: Vec<(String, bool)> = pairs
        .iter()
        .flat_map(|p| {
            [(p.female.clone(), false), (p.male.clone(), true)]
        })
        .collect();

    let n = 2 * config.group_size + pair_tokens.len() + SPECIFIC_WORDS.len();
    let mut tokens = Vec::with_capacity(n);
    let mut matrix = Array2::zeros((n, config.dim));
    let mid_log = (config.freq_log_mean_male + config.freq_log_mean_female) / 2.0;

    let mut row = 0;
    let mut push_word =
        |tokens: &mut Vec<String>, matrix: &mut Array2<f64>, rng: &mut ChaCha8Rng,
         token: String, male: bool, group: bool| {
            let noise_scale = if group { 1.0 } else { config.pair_noise };
            for j in 0..config.dim {
                matrix[[row, j]] = noise_scale * normal(rng);
            }
            let sign = if male { 1.0 } else { -1.0 };
            let strength = if group { config.gender_strength } else { config.pair_strength };
            matrix[[row, config.gender_axis]] += sign * strength;
            let log_freq = if group {
                let mean = if male { config.freq_log_mean_male } else { config.freq_log_mean_female };
                mean + config.freq_log_sd * normal(rng)
            } else {
                mid_log
            };
            matrix[[row, config.freq_axis]] += config.freq_scale * log_freq;
            tokens.push(token);
            row += 1;
        };

    let mut male_words = Vec::with_capacity(config.group_size);
    for i in 0..config.group_size {
        let t = format!("m{i:04}");
        male_words.push(t.clone());
        push_word(&mut tokens, &mut matrix, &mut rng, t, true, true);
    }
    let mut female_words = Vec::with_capacity(config.group_size);
    for i in 0..config.group_size {
        let t = format!("f{i:04}");
        female_words.push(t.clone());
        push_word(&mut tokens, &mut matrix, &mut rng, t, false, true);
    }
    for (t, male) in pair_tokens {
        push_word(&mut tokens, &mut matrix, &mut rng, t, male, false);
    }
    for (t, male) in SPECIFIC_WORDS {
        push_word(&mut tokens, &mut matrix, &mut rng, t.to_string(), male, false);
    }

    SynthSet {
        set: EmbeddingSet::new(tokens, matrix).expect("generated tokens are unique and finite"),
        pairs,
        male_words: WordList::new("male-group", male_words).expect("unique"),
        female_words: WordList::new("female-group", female_words).expect("unique"),
        config: config.clone(),
    }
}
