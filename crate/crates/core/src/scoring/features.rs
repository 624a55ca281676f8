//! Hashed sparse features for arcs and tokens.
//!
//! Feature values are built from FNV-1a hashes of the token strings, mixed
//! with a template tag, so the id space is stable across platforms and
//! compiler versions.

use crate::conllu::Sentence;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

const ROOT: u64 = 0x5a17_0000_0000_0001;
const BOS: u64 = 0x5a17_0000_0000_0002;
const EOS: u64 = 0x5a17_0000_0000_0003;
const NONE: u64 = 0x5a17_0000_0000_0004;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// splitmix64 finalizer.
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn combine(seed: u64, value: u64) -> u64 {
    finalize(seed ^ value.wrapping_add(0x9e37_79b9_7f4a_7c15).rotate_left(17))
}

fn feature(tag: u8, parts: &[u64]) -> u64 {
    parts.iter().fold(finalize(tag as u64 + 1), |h, &p| combine(h, p))
}

/// Map a raw feature hash into a `bits`-wide id.
pub fn feature_id(raw: u64, bits: u8) -> u32 {
    (finalize(raw) >> (64 - bits as u32)) as u32
}

/// Id of a raw feature conjoined with an output label.
pub fn labeled_feature_id(raw: u64, label: usize, bits: u8) -> u32 {
    (combine(raw, 0xa11c_e000_0000_0000 ^ label as u64) >> (64 - bits as u32)) as u32
}

/// Signed distance bin from head to dependent: 1, 2, 3, 4, 5-6, 7-10, >10.
pub fn distance_bin(head: usize, dep: usize) -> i8 {
    let dist = dep.abs_diff(head);
    let bin = match dist {
        0..=4 => dist as i8,
        5..=6 => 5,
        7..=10 => 6,
        _ => 7,
    };
    if dep > head {
        bin
    } else {
        -bin
    }
}

/// Per-sentence string hashes, with the root at position 0.
#[derive(Clone, Debug)]
pub struct FeatureContext {
    forms: Vec<u64>,
    upos: Vec<u64>,
    prefixes: Vec<[u64; 3]>,
    suffixes: Vec<[u64; 3]>,
}

impl FeatureContext {
    pub fn new(sentence: &Sentence) -> Self {
        let n = sentence.len();
        let mut forms = Vec::with_capacity(n + 1);
        let mut upos = Vec::with_capacity(n + 1);
        let mut prefixes = Vec::with_capacity(n + 1);
        let mut suffixes = Vec::with_capacity(n + 1);
        forms.push(ROOT);
        upos.push(ROOT);
        prefixes.push([ROOT; 3]);
        suffixes.push([ROOT; 3]);
        for token in &sentence.tokens {
            let lower = token.form.to_lowercase();
            forms.push(fnv1a(lower.as_bytes()));
            upos.push(fnv1a(token.upos.as_bytes()));
            let chars: Vec<char> = lower.chars().collect();
            let mut pre = [NONE; 3];
            let mut suf = [NONE; 3];
            for k in 1..=3.min(chars.len()) {
                let p: String = chars[..k].iter().collect();
                let s: String = chars[chars.len() - k..].iter().collect();
                pre[k - 1] = fnv1a(p.as_bytes());
                suf[k - 1] = fnv1a(s.as_bytes());
            }
            prefixes.push(pre);
            suffixes.push(suf);
        }
        FeatureContext {
            forms,
            upos,
            prefixes,
            suffixes,
        }
    }

    /// Number of tokens, excluding the root.
    pub fn len(&self) -> usize {
        self.forms.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn upos_at(&self, pos: isize) -> u64 {
        if pos < 0 {
            BOS
        } else if pos as usize > self.len() {
            EOS
        } else {
            self.upos[pos as usize]
        }
    }

    /// Token-level lookup where position 0 is padding rather than the root.
    fn window(&self, values: &[u64], pos: isize) -> u64 {
        if pos < 1 {
            BOS
        } else if pos as usize > self.len() {
            EOS
        } else {
            values[pos as usize]
        }
    }

    /// Raw arc features for `head -> dep`, appended to `out`.
    pub fn arc_raw(&self, head: usize, dep: usize, out: &mut Vec<u64>) {
        let (hf, hp) = (self.forms[head], self.upos[head]);
        let (df, dp) = (self.forms[dep], self.upos[dep]);
        let (h, d) = (head as isize, dep as isize);
        let (hp_l, hp_r) = (self.upos_at(h - 1), self.upos_at(h + 1));
        let (dp_l, dp_r) = (self.upos_at(d - 1), self.upos_at(d + 1));
        let dist = distance_bin(head, dep) as u64;

        let base: [(u8, &[u64]); 17] = [
            (1, &[hf]),
            (2, &[hp]),
            (3, &[hf, hp]),
            (4, &[df]),
            (5, &[dp]),
            (6, &[df, dp]),
            (7, &[hp, dp]),
            (8, &[hf, df]),
            (9, &[hf, hp, dp]),
            (10, &[hp, df, dp]),
            (11, &[hf, hp, df, dp]),
            (12, &[hf, dp]),
            (13, &[hp, df]),
            (14, &[hp, hp_r, dp_l, dp]),
            (15, &[hp_l, hp, dp_l, dp]),
            (16, &[hp, hp_r, dp, dp_r]),
            (17, &[hp_l, hp, dp, dp_r]),
        ];
        out.push(feature(0, &[dist]));
        for (tag, parts) in base {
            let f = feature(tag, parts);
            out.push(f);
            out.push(combine(f, dist));
        }
    }

    /// Raw features used to choose the relation label of `head -> dep`.
    pub fn label_raw(&self, head: usize, dep: usize, out: &mut Vec<u64>) {
        let (hf, hp) = (self.forms[head], self.upos[head]);
        let (df, dp) = (self.forms[dep], self.upos[dep]);
        let dir = (dep > head) as u64;
        let dist = distance_bin(head, dep) as u64;
        let dp_r = self.upos_at(dep as isize + 1);
        let dp_l = self.upos_at(dep as isize - 1);
        out.push(feature(40, &[]));
        out.push(feature(41, &[dp, dir]));
        out.push(feature(42, &[hp, dp, dir]));
        out.push(feature(43, &[df, dir]));
        out.push(feature(44, &[hf, dp]));
        out.push(feature(45, &[hp, df]));
        out.push(feature(46, &[dist, dp]));
        out.push(feature(47, &[hf]));
        out.push(feature(48, &[df, dp]));
        out.push(feature(49, &[dp_l, dp, dp_r, dir]));
        out.push(feature(50, &[hp, hf, df, dp]));
    }

    /// Raw window features of token `i` (1-based).
    pub fn token_raw(&self, i: usize, out: &mut Vec<u64>) {
        let c = i as isize;
        let f = |o: isize| self.window(&self.forms, c + o);
        let p = |o: isize| self.window(&self.upos, c + o);
        out.push(feature(60, &[]));
        for (k, o) in (-2isize..=2).enumerate() {
            out.push(feature(61 + k as u8, &[f(o)]));
            out.push(feature(66 + k as u8, &[p(o)]));
        }
        out.push(feature(71, &[p(-1), p(0)]));
        out.push(feature(72, &[p(0), p(1)]));
        out.push(feature(73, &[p(-1), p(0), p(1)]));
        out.push(feature(74, &[p(-2), p(-1), p(0)]));
        out.push(feature(75, &[p(0), p(1), p(2)]));
        out.push(feature(76, &[f(0), p(-1)]));
        out.push(feature(77, &[f(0), p(1)]));
        out.push(feature(78, &[f(-1), f(0)]));
        out.push(feature(79, &[f(0), f(1)]));
        out.push(feature(80, &[p(-2), p(-1), p(0), p(1), p(2)]));
        for k in 0..3 {
            out.push(feature(81 + k as u8, &[self.prefixes[i][k]]));
            out.push(feature(84 + k as u8, &[self.suffixes[i][k]]));
        }
    }
}

/// Hashed arc feature ids for `head -> dep` (head 0 is the root).
pub fn arc_features(sentence: &Sentence, head: usize, dep: usize, bits: u8) -> Vec<u32> {
    let ctx = FeatureContext::new(sentence);
    let mut raw = Vec::new();
    ctx.arc_raw(head, dep, &mut raw);
    raw.into_iter().map(|r| feature_id(r, bits)).collect()
}

/// Hashed window feature ids of the 1-based token `i`.
pub fn token_features(sentence: &Sentence, i: usize, bits: u8) -> Vec<u32> {
    let ctx = FeatureContext::new(sentence);
    let mut raw = Vec::new();
    ctx.token_raw(i, &mut raw);
    raw.into_iter().map(|r| feature_id(r, bits)).collect()
}
