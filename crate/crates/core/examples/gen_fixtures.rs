//! Regenerates the checked-in files under `fixtures/`:
//!
//! ```text
//! cargo run -p debias-core --example gen_fixtures
//! ```
//!
//! The tiny embedding table is synthetic with planted gender and frequency
//! structure, small enough that the whole command-line pipeline runs in
//! well under a second. The word-list files cover every loader format.

use std::fs;
use std::path::PathBuf;

use debias_core::debias::DEFINITIONAL_PAIRS;
use debias_core::synth::{generate, SynthConfig};

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    fs::create_dir_all(&dir).expect("fixtures dir");

    let config = SynthConfig { group_size: 15, dim: 10, seed: 31415, ..SynthConfig::default() };
    let data = generate(&config);
    data.set.save_glove_text(dir.join("tiny_vectors.txt")).expect("write vectors");

    let pairs: String =
        DEFINITIONAL_PAIRS.iter().map(|(f, m)| format!("{m},{f}\n")).collect();
    fs::write(dir.join("pairs.csv"), pairs).expect("write pairs");

    let specific = data.specific_words().words().join("\n") + "\n";
    fs::write(dir.join("specific.txt"), specific).expect("write specific");

    // 8 + 8 targets: small enough that the association test enumerates all
    // 12870 repartitions exactly.
    let mut weat = String::from("# planted gender groups vs definitional words\n[targets_x]\n");
    for w in data.male_words.words().iter().take(8) {
        weat.push_str(w);
        weat.push('\n');
    }
    weat.push_str("[targets_y]\n");
    for w in data.female_words.words().iter().take(8) {
        weat.push_str(w);
        weat.push('\n');
    }
    weat.push_str("[attributes_a]\n");
    for (_, m) in DEFINITIONAL_PAIRS.iter().take(8) {
        weat.push_str(m);
        weat.push('\n');
    }
    weat.push_str("[attributes_b]\n");
    for (f, _) in DEFINITIONAL_PAIRS.iter().take(8) {
        weat.push_str(f);
        weat.push('\n');
    }
    fs::write(dir.join("weat_gender.txt"), weat).expect("write weat");

    // One semantic and one syntactic-named section; the zebra line tests
    // out-of-vocabulary skipping.
    let analogy = "\
: family-pairs
he she his her
man woman king queen
boy girl waiter waitress
king queen man woman
zebra stripes he she
: gram1-possessive
he his she her
his he her she
";
    fs::write(dir.join("analogy.txt"), analogy).expect("write analogy");

    let mut categories = String::new();
    for w in data.male_words.words().iter().take(4) {
        categories.push_str(&format!("{w},masculine\n"));
    }
    categories.push_str("king,masculine\nwaiter,masculine\n");
    for w in data.female_words.words().iter().take(4) {
        categories.push_str(&format!("{w},feminine\n"));
    }
    categories.push_str("queen,feminine\nwaitress,feminine\n");
    fs::write(dir.join("categories.csv"), categories).expect("write categories");

    println!("wrote fixtures to {}", dir.display());
}
