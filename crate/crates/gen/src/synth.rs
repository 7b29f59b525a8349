//! Synthetic passages with a chosen reading ease, built from word pairs in
//! the rewriter's synonym table.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use readctl_core::dataset::CorpusEntry;
use readctl_core::text::analyze;

/// (plain, elaborate) pairs by part of speech.
pub const NOUNS: &[(&str, &str)] = &[
    ("dog", "animal"),
    ("cat", "feline"),
    ("bird", "creature"),
    ("house", "residence"),
    ("car", "automobile"),
    ("boat", "vessel"),
    ("man", "gentleman"),
    ("kid", "youngster"),
    ("friend", "companion"),
    ("guest", "visitor"),
    ("king", "monarch"),
    ("judge", "magistrate"),
    ("guard", "sentinel"),
    ("doc", "physician"),
    ("chief", "commander"),
    ("book", "publication"),
    ("gift", "donation"),
    ("room", "chamber"),
    ("town", "municipality"),
    ("hill", "elevation"),
    ("crowd", "multitude"),
    ("team", "organization"),
    ("plan", "strategy"),
    ("tool", "instrument"),
];

pub const VERBS: &[(&str, &str)] = &[
    ("found", "discovered"),
    ("saw", "observed"),
    ("helped", "assisted"),
    ("told", "informed"),
    ("asked", "inquired"),
    ("built", "constructed"),
    ("fixed", "repaired"),
    ("kept", "maintained"),
    ("sent", "transmitted"),
    ("met", "encountered"),
    ("hid", "concealed"),
    ("held", "retained"),
    ("bought", "purchased"),
    ("liked", "appreciated"),
    ("hated", "detested"),
    ("led", "directed"),
];

pub const ADJECTIVES: &[(&str, &str)] = &[
    ("big", "enormous"),
    ("small", "diminutive"),
    ("old", "elderly"),
    ("young", "youthful"),
    ("good", "excellent"),
    ("great", "magnificent"),
    ("bad", "terrible"),
    ("strong", "powerful"),
    ("brave", "courageous"),
    ("calm", "tranquil"),
    ("kind", "considerate"),
    ("sad", "melancholy"),
    ("glad", "delighted"),
    ("wise", "intelligent"),
    ("tall", "towering"),
    ("strange", "peculiar"),
    ("rich", "affluent"),
    ("poor", "impoverished"),
    ("cold", "frigid"),
    ("warm", "comfortable"),
    ("bright", "glittering"),
    ("dark", "shadowy"),
];

const JOINERS: [&str; 3] = [", and ", ", but ", ", so "];

fn pick<'a, R: Rng>(pairs: &[(&'a str, &'a str)], long: f64, rng: &mut R) -> &'a str {
    let &(plain, elaborate) = pairs.choose(rng).expect("non-empty word list");
    if rng.gen_bool(long) {
        elaborate
    } else {
        plain
    }
}

fn clause<R: Rng>(long: f64, rng: &mut R) -> String {
    format!(
        "the {} {} {} the {} {}",
        pick(ADJECTIVES, long, rng),
        pick(NOUNS, long, rng),
        pick(VERBS, long, rng),
        pick(ADJECTIVES, long, rng),
        pick(NOUNS, long, rng)
    )
}

fn passage<R: Rng>(clauses: usize, long: f64, min_words: usize, rng: &mut R) -> String {
    let mut sentences = Vec::new();
    let mut words = 0;
    while words < min_words {
        let mut s = clause(long, rng);
        for _ in 1..clauses {
            s.push_str(JOINERS.choose(rng).expect("joiners"));
            s.push_str(&clause(long, rng));
        }
        words += s.split_whitespace().count();
        let mut chars = s.chars();
        let first = chars.next().expect("clause text").to_uppercase();
        sentences.push(format!("{}{}.", first, chars.as_str()));
    }
    sentences.join(" ")
}

/// A passage of at least `min_words` words whose score is as close to
/// `target` as a small parameter search allows. Returns the text and its score.
pub fn synthetic_passage<R: Rng>(target: f64, min_words: usize, rng: &mut R) -> (String, f64) {
    let mut best: Option<(String, f64)> = None;
    for clauses in 1..=5 {
        for step in 0..=10 {
            let long = f64::from(step) / 10.0;
            let text = passage(clauses, long, min_words, rng);
            let fres = analyze::<f64>(&text).expect("synthetic text has words").fres;
            if best.as_ref().is_none_or(|(_, f)| (fres - target).abs() < (f - target).abs()) {
                best = Some((text, fres));
            }
        }
    }
    best.expect("search evaluates at least one passage")
}

/// `n` passages with targets evenly spaced over `[lo, hi]`, ids `syn-000`...
pub fn synthetic_corpus(n: usize, lo: f64, hi: f64, min_words: usize, seed: u64) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let t = if n > 1 { lo + (hi - lo) * i as f64 / (n - 1) as f64 } else { lo };
            let (text, _) = synthetic_passage(t, min_words, &mut rng);
            CorpusEntry::new(format!("syn-{i:03}"), text)
        })
        .collect()
}
