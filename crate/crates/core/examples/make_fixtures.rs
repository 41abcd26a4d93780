//! Regenerates the synthetic corpora under `fixtures/corpora`.
//!
//! ```text
//! cargo run -p ara-core --example make_fixtures -- fixtures/corpora
//! ```
//!
//! Text is word salad drawn from small per-language lexicons. Grade 1
//! documents use short sentences of short roots; higher grades add
//! affixed forms and longer sentences, so the grade is learnable from the
//! surface features. The three Philippine lexicons share most roots,
//! English shares none.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DOCS_PER_GRADE: usize = 12;
const SEED: u64 = 20240611;

const ROOTS: &[&str] = &[
    "bahay", "tubig", "araw", "gabi", "bata", "aso", "puno", "dahon", "isda", "bundok", "ilog",
    "ulan", "hangin", "lupa", "bato", "kain", "inom", "takbo", "lakad", "tulog", "basa", "sulat",
    "laro", "kanta", "ganda", "bilis", "tahimik", "saya", "bigas", "mata", "kamay", "paa", "ulo",
    "dila", "buhok", "ngipin", "langit", "bituin", "buwan", "dagat", "bangka", "lapis", "papel",
    "guro", "aklat", "pinto", "silid", "kusina", "palengke", "manok", "baboy", "kalabaw", "ibon",
    "bulaklak", "prutas", "mangga", "saging", "tanim", "ani", "sakit", "gamot", "tulong", "salita",
];

const ENGLISH: &[&str] = &[
    "house", "water", "sun", "night", "child", "dog", "tree", "leaf", "fish", "mountain", "river",
    "rain", "wind", "land", "stone", "eat", "drink", "run", "walk", "sleep", "read", "write", "play",
    "sing", "beautiful", "quick", "quiet", "happy", "rice", "eye", "hand", "foot", "head", "teacher",
    "book", "door", "room", "kitchen", "market", "chicken", "bird", "flower", "fruit", "plant",
    "harvest", "sickness", "medicine", "help", "word", "morning", "school", "friend", "family",
    "village", "garden", "window", "table", "story", "music", "animal",
];

const ENGLISH_LONG: &[&str] = &[
    "understanding", "environment", "responsibility", "community", "celebration", "information",
    "particularly", "comfortable", "neighborhood", "opportunity", "independent", "temperature",
    "agriculture", "experience", "government", "photograph",
];

struct Lexicon {
    code: &'static str,
    function: &'static [&'static str],
    roots: Vec<String>,
    long: Vec<String>,
}

fn bikol(root: &str) -> String {
    let mut w = root.trim_start_matches('h').to_string();
    if let Some(i) = w.rfind('i') {
        if i + 2 >= w.len() {
            w.replace_range(i..i + 1, "e");
        }
    }
    if w.is_empty() {
        root.to_string()
    } else {
        w.replace("ay", "ai")
    }
}

fn cebuano(root: &str) -> String {
    let mut w = root.replace('e', "i");
    if let Some(stripped) = w.strip_suffix("an") {
        w = format!("{stripped}on");
    }
    if let Some(i) = w.find('o') {
        if i + 2 < w.len() {
            w.replace_range(i..i + 1, "u");
        }
    }
    w
}

fn lexicons() -> Vec<Lexicon> {
    let affixed = |roots: &[String], prefixes: &[&str], suffixes: &[&str]| -> Vec<String> {
        let mut out = Vec::new();
        for (i, r) in roots.iter().enumerate() {
            let p = prefixes[i % prefixes.len()];
            let s = suffixes[(i / prefixes.len()) % suffixes.len()];
            out.push(format!("{p}{r}{s}"));
        }
        out
    };
    let tgl_roots: Vec<String> = ROOTS.iter().map(|s| s.to_string()).collect();
    let bcl_roots: Vec<String> = ROOTS.iter().map(|r| bikol(r)).collect();
    let ceb_roots: Vec<String> = ROOTS.iter().map(|r| cebuano(r)).collect();
    let tgl_pre = &["pinag", "nakaka", "ipinag", "pag", "mag"];
    let bcl_pre = &["pinag", "nakaka", "pag", "mag", "naka"];
    let ceb_pre = &["gina", "nagpa", "pag", "mag", "naka"];
    vec![
        Lexicon {
            code: "tgl",
            function: &["ang", "ng", "sa", "mga", "ay", "si", "at", "na"],
            long: affixed(&tgl_roots, tgl_pre, &["an", "in", "han"]),
            roots: tgl_roots,
        },
        Lexicon {
            code: "bcl",
            function: &["an", "kan", "sa", "mga", "si", "asin", "na", "nin"],
            long: affixed(&bcl_roots, bcl_pre, &["an", "on", "han"]),
            roots: bcl_roots,
        },
        Lexicon {
            code: "ceb",
            function: &["ang", "sa", "mga", "si", "ug", "nga", "kay", "og"],
            long: affixed(&ceb_roots, ceb_pre, &["on", "an", "hon"]),
            roots: ceb_roots,
        },
        Lexicon {
            code: "eng",
            function: &["the", "a", "of", "and", "to", "in", "is", "with"],
            roots: ENGLISH.iter().map(|s| s.to_string()).collect(),
            long: ENGLISH_LONG.iter().map(|s| s.to_string()).collect(),
        },
    ]
}

fn sentence(lex: &Lexicon, grade: usize, rng: &mut ChaCha8Rng) -> String {
    let len = rng.gen_range(2 + 2 * grade..=4 + 4 * grade);
    let long_share = [0.0, 0.05, 0.3, 0.55][grade];
    let mut words = Vec::with_capacity(len);
    for i in 0..len {
        let w = if i % 3 == 0 {
            lex.function.choose(rng).unwrap().to_string()
        } else if rng.gen_bool(long_share) {
            lex.long.choose(rng).unwrap().clone()
        } else {
            lex.roots.choose(rng).unwrap().clone()
        };
        words.push(w);
    }
    if grade > 1 && len > 6 && rng.gen_bool(0.6) {
        let at = rng.gen_range(2..len - 2);
        words[at].push(',');
    }
    let mut s = words.join(" ");
    if let Some(first) = s.get(0..1) {
        s.replace_range(0..1, &first.to_uppercase());
    }
    let end = [".", ".", ".", "!", "?"].choose(rng).unwrap();
    s.push_str(end);
    s
}

fn write_language(out: &Path, lex: &Lexicon, rng: &mut ChaCha8Rng) -> std::io::Result<()> {
    let dir = out.join(lex.code);
    fs::create_dir_all(dir.join("texts"))?;
    let mut manifest = String::from("id\tlanguage\tgrade\ttext_path\n");
    for grade in 1..=3 {
        for i in 1..=DOCS_PER_GRADE {
            let id = format!("{}-g{grade}-{i:02}", lex.code);
            let sentences = rng.gen_range(3 + grade..=6 + 2 * grade);
            let mut text = String::new();
            for s in 0..sentences {
                if s > 0 {
                    text.push(' ');
                }
                text.push_str(&sentence(lex, grade, rng));
            }
            // a stray entity, as scraped sources tend to have
            if i % 5 == 0 {
                text.push_str(" &amp;");
            }
            text.push('\n');
            let rel = format!("texts/{id}.txt");
            fs::write(dir.join(&rel), text)?;
            manifest.push_str(&format!("{id}\t{}\t{grade}\t{rel}\n", lex.code));
        }
    }
    fs::write(dir.join("manifest.tsv"), manifest)
}

fn main() -> std::io::Result<()> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "fixtures/corpora".into()).into();
    for (i, lex) in lexicons().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + i as u64);
        write_language(&out, lex, &mut rng)?;
    }
    println!("wrote corpora to {}", out.display());
    Ok(())
}
