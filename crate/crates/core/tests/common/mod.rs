//! Shared helpers for integration tests: a seeded synthetic treebank with
//! UD-style relations, trivial baselines and random tree generators.

#![allow(dead_code)]

use depbench::conllu::{Sentence, Token};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DETS: &[&str] = &["the", "a", "this", "every", "some"];
const ADJS: &[&str] = &[
    "old", "small", "red", "quiet", "busy", "tall", "young", "cold", "new", "dark",
];
const NOUNS: &[&str] = &[
    "man", "woman", "dog", "cat", "teacher", "student", "city", "river", "house", "garden", "book", "letter", "car",
    "table", "window", "doctor", "child", "farmer", "bird", "market", "song", "story", "box", "hill",
];
const INSTRUMENTS: &[&str] = &["telescope", "knife", "hammer", "key", "pen", "spoon"];
const NAMES: &[&str] = &["anna", "omar", "li", "maria", "kofi", "sven"];
const TRANSITIVE: &[&str] = &[
    "saw", "found", "opened", "wrote", "bought", "cut", "watched", "carried", "read", "painted", "fixed", "took",
];
const INTRANSITIVE: &[&str] = &["slept", "arrived", "laughed", "waited", "sang", "ran", "fell", "smiled"];
const AUXES: &[&str] = &["has", "will", "could", "must"];
const ADVS: &[&str] = &["quickly", "often", "never", "slowly", "again", "finally"];
const LOCATIVE: &[&str] = &["in", "on", "at", "near"];

struct Builder {
    // (form, upos, head, deprel); head 0 until attached.
    toks: Vec<(String, &'static str, usize, &'static str)>,
}

impl Builder {
    fn push(&mut self, form: &str, upos: &'static str) -> usize {
        self.toks.push((form.to_string(), upos, 0, ""));
        self.toks.len()
    }

    fn attach(&mut self, dep: usize, head: usize, rel: &'static str) {
        self.toks[dep - 1].2 = head;
        self.toks[dep - 1].3 = rel;
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words.choose(rng).unwrap()
}

/// Bare noun phrase; returns the noun.
fn noun_phrase(b: &mut Builder, rng: &mut ChaCha8Rng, depth: usize, instrument: bool) -> usize {
    if !instrument && rng.gen_bool(0.12) {
        return b.push(pick(rng, NAMES), "PROPN");
    }
    let mut pre = Vec::new();
    if rng.gen_bool(0.85) {
        pre.push((b.push(pick(rng, DETS), "DET"), "det"));
    }
    for _ in 0..2 {
        if rng.gen_bool(0.3) {
            pre.push((b.push(pick(rng, ADJS), "ADJ"), "amod"));
        }
    }
    let noun = b.push(pick(rng, if instrument { INSTRUMENTS } else { NOUNS }), "NOUN");
    for (t, rel) in pre {
        b.attach(t, noun, rel);
    }
    if depth < 2 && rng.gen_bool(0.2) {
        // "of" phrases always modify the noun before them.
        let adp = b.push("of", "ADP");
        let inner = noun_phrase(b, rng, depth + 1, false);
        b.attach(adp, inner, "case");
        b.attach(inner, noun, "nmod");
    }
    noun
}

/// Noun phrase with optional coordination; returns the first conjunct.
fn coordinated_np(b: &mut Builder, rng: &mut ChaCha8Rng, depth: usize) -> usize {
    let first = noun_phrase(b, rng, depth, false);
    if depth == 0 && rng.gen_bool(0.12) {
        let cc = b.push(if rng.gen_bool(0.7) { "and" } else { "or" }, "CCONJ");
        let second = noun_phrase(b, rng, depth + 1, false);
        b.attach(cc, second, "cc");
        b.attach(second, first, "conj");
    }
    first
}

/// Verb phrase after the subject; returns the verb.
fn verb_phrase(b: &mut Builder, rng: &mut ChaCha8Rng, allow_coord: bool) -> usize {
    let mut pre = Vec::new();
    if rng.gen_bool(0.3) {
        pre.push((b.push(pick(rng, AUXES), "AUX"), "aux"));
    }
    if rng.gen_bool(0.2) {
        pre.push((b.push(pick(rng, ADVS), "ADV"), "advmod"));
    }
    let transitive = rng.gen_bool(0.7);
    let verb = b.push(pick(rng, if transitive { TRANSITIVE } else { INTRANSITIVE }), "VERB");
    for (t, rel) in pre {
        b.attach(t, verb, rel);
    }
    let object = transitive.then(|| {
        let obj = coordinated_np(b, rng, 0);
        b.attach(obj, verb, "obj");
        obj
    });
    for _ in 0..2 {
        if !rng.gen_bool(0.35) {
            break;
        }
        // "with" + instrument modifies the verb; "with" + other nouns
        // modifies the object when there is one.
        let with = rng.gen_bool(0.5);
        let adp = b.push(if with { "with" } else { pick(rng, LOCATIVE) }, "ADP");
        let instrument = with && rng.gen_bool(0.5);
        let noun = noun_phrase(b, rng, 1, instrument);
        b.attach(adp, noun, "case");
        match (with, instrument, object) {
            (true, false, Some(obj)) => b.attach(noun, obj, "nmod"),
            _ => b.attach(noun, verb, "obl"),
        }
    }
    if rng.gen_bool(0.15) {
        let adv = b.push(pick(rng, ADVS), "ADV");
        b.attach(adv, verb, "advmod");
    }
    if allow_coord && rng.gen_bool(0.1) {
        let cc = b.push("and", "CCONJ");
        let second = verb_phrase(b, rng, false);
        b.attach(cc, second, "cc");
        b.attach(second, verb, "conj");
    }
    verb
}

/// One sentence of the synthetic grammar. About 5% contain a relative
/// clause extraposed after the main verb, which makes the tree
/// non-projective.
pub fn synthetic_sentence(rng: &mut ChaCha8Rng) -> Sentence {
    let mut b = Builder { toks: Vec::new() };
    let subject = coordinated_np(&mut b, rng, 0);
    let verb = verb_phrase(&mut b, rng, true);
    b.attach(subject, verb, "nsubj");
    b.attach(verb, 0, "root");
    if rng.gen_bool(0.05) {
        let comma = b.push(",", "PUNCT");
        let rel = b.push("who", "PRON");
        let rel_verb = b.push(pick(rng, INTRANSITIVE), "VERB");
        b.attach(comma, rel_verb, "punct");
        b.attach(rel, rel_verb, "nsubj");
        b.attach(rel_verb, subject, "acl:relcl");
    }
    let punct = b.push(".", "PUNCT");
    b.attach(punct, verb, "punct");
    let tokens = b
        .toks
        .iter()
        .enumerate()
        .map(|(i, (form, upos, head, rel))| Token::new(i + 1, form, upos, *head, rel))
        .collect();
    Sentence::new(tokens)
}

pub fn synthetic_treebank(count: usize, seed: u64) -> Vec<Sentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let mut s = synthetic_sentence(&mut rng);
            s.sent_id = Some(format!("s{seed}-{}", i + 1));
            s.comments = vec![format!("# sent_id = s{seed}-{}", i + 1)];
            s
        })
        .collect()
}

/// Every token attached to the one before it; the first to the root.
pub fn attach_to_previous(corpus: &[Sentence]) -> Vec<Sentence> {
    baseline(corpus, |i| i - 1)
}

/// Every token attached to the artificial root.
pub fn attach_to_root(corpus: &[Sentence]) -> Vec<Sentence> {
    baseline(corpus, |_| 0)
}

fn baseline(corpus: &[Sentence], head: impl Fn(usize) -> usize) -> Vec<Sentence> {
    corpus
        .iter()
        .map(|s| {
            let mut s = s.clone();
            for t in &mut s.tokens {
                t.head = head(t.id);
                t.deprel = "dep".into();
            }
            s
        })
        .collect()
}

/// Random projective single-root tree over `n` tokens: a random
/// root, then random projective attachment of each side span.
pub fn random_projective_tree(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    fn span(rng: &mut impl Rng, lo: usize, hi: usize, head: usize, heads: &mut [usize]) {
        if lo > hi {
            return;
        }
        let r = rng.gen_range(lo..=hi);
        heads[r - 1] = head;
        span(rng, lo, r - 1, r, heads);
        span(rng, r + 1, hi, r, heads);
    }
    let mut heads = vec![0; n];
    span(rng, 1, n, 0, &mut heads);
    heads
}

/// Random tree without projectivity restriction (random recursive tree
/// over a shuffled order), single root.
pub fn random_tree(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![0; n];
    for k in 1..n {
        heads[order[k] - 1] = order[rng.gen_range(0..k)];
    }
    heads
}

pub fn sentence_from_heads(heads: &[usize], rels: &[&str]) -> Sentence {
    Sentence::new(
        heads
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let rel = if h == 0 { "root" } else { rels[i % rels.len()] };
                Token::new(i + 1, &format!("w{}", i + 1), "X", h, rel)
            })
            .collect(),
    )
}
