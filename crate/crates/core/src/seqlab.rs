//! Bracketing encoding of dependency trees as one label per token.
//!
//! The label of token `i` describes arcs touching the boundary between
//! tokens `i - 1` and `i`:
//!
//! * `<`  token `i - 1` has its head to the right;
//! * `\`  one per left dependent of `i`;
//! * `/`  one per right dependent of `i - 1`;
//! * `>`  token `i` has a (non-root) head to its left.
//!
//! Root arcs are not encoded; the root is recovered as the headless token.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::DepTree;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Brackets {
    pub has_lt: bool,
    pub k_back: usize,
    pub k_fwd: usize,
    pub has_gt: bool,
}

impl Brackets {
    pub fn is_empty(&self) -> bool {
        !self.has_lt && self.k_back == 0 && self.k_fwd == 0 && !self.has_gt
    }
}

impl fmt::Display for Brackets {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("_");
        }
        if self.has_lt {
            f.write_str("<")?;
        }
        for _ in 0..self.k_back {
            f.write_str("\\")?;
        }
        for _ in 0..self.k_fwd {
            f.write_str("/")?;
        }
        if self.has_gt {
            f.write_str(">")?;
        }
        Ok(())
    }
}

impl FromStr for Brackets {
    type Err = Error;

    /// Accepts only the canonical rendering.
    fn from_str(s: &str) -> Result<Self> {
        if s == "_" {
            return Ok(Brackets::default());
        }
        let bad = || Error::Format(format!("not a canonical bracket string: `{s}`"));
        if s.is_empty() {
            return Err(bad());
        }
        let mut rest = s;
        let mut b = Brackets::default();
        if let Some(r) = rest.strip_prefix('<') {
            b.has_lt = true;
            rest = r;
        }
        let back = rest.len() - rest.trim_start_matches('\\').len();
        b.k_back = back;
        rest = &rest[back..];
        let fwd = rest.len() - rest.trim_start_matches('/').len();
        b.k_fwd = fwd;
        rest = &rest[fwd..];
        if let Some(r) = rest.strip_prefix('>') {
            b.has_gt = true;
            rest = r;
        }
        if rest.is_empty() {
            Ok(b)
        } else {
            Err(bad())
        }
    }
}

/// Bracket string plus the relation label of the token's incoming arc.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BracketLabel {
    pub brackets: Brackets,
    pub deprel: String,
}

impl BracketLabel {
    pub fn new(brackets: &str, deprel: &str) -> Result<Self> {
        Ok(BracketLabel {
            brackets: brackets.parse()?,
            deprel: deprel.to_owned(),
        })
    }
}

pub type LabelSequence = Vec<BracketLabel>;

/// Encode a tree. Never fails for a valid [`DepTree`], projective or not.
pub fn encode(tree: &DepTree) -> LabelSequence {
    let heads = tree.heads();
    let n = heads.len();
    let mut labels: Vec<BracketLabel> = (0..n)
        .map(|i| BracketLabel {
            brackets: Brackets::default(),
            deprel: tree.deprels()[i].clone(),
        })
        .collect();

    for dep in 1..=n {
        let head = heads[dep - 1];
        if head == 0 {
            continue;
        }
        if head > dep {
            // Leftward arc: `<` right after the dependent, `\` on the head.
            labels[dep].brackets.has_lt = true;
            labels[head - 1].brackets.k_back += 1;
        } else {
            // Rightward arc: `/` right after the head, `>` on the dependent.
            labels[head].brackets.k_fwd += 1;
            labels[dep - 1].brackets.has_gt = true;
        }
    }
    labels
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepairPolicy {
    /// Exactly one token attaches to the root.
    #[default]
    SingleRoot,
    /// Every headless token attaches to the root.
    MultiRoot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symbol {
    Lt,
    Back,
    Fwd,
    Gt,
}

/// A correction applied while turning a label sequence into a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Repair {
    /// A symbol had no partner (empty stack, or `<`/`/` on the first token).
    DroppedSymbol { token: usize, symbol: Symbol },
    /// An arc was found for a token that already had a head.
    DroppedArc { head: usize, dep: usize },
    /// A stack entry was still pending at the end of the sentence.
    DroppedPending { token: usize },
    /// A headless token after the first was attached to 0.
    Rooted { token: usize },
    /// A headless token was attached to the root token.
    AttachedToRoot { token: usize, root: usize },
    /// A cycle was broken by re-attaching `token`.
    CycleBroken { token: usize, new_head: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub tree: DepTree,
    pub repairs: Vec<Repair>,
}

/// Decode a label sequence into a tree, repairing ill-formed input.
///
/// Symbols of a token are consumed in the order `<`, `\`, `/`, `>` so that
/// arcs between adjacent tokens are matched against their own push.
pub fn decode(labels: &[BracketLabel], policy: RepairPolicy) -> Result<Decoded> {
    let n = labels.len();
    if n == 0 {
        return Err(Error::invalid("cannot decode an empty label sequence"));
    }
    let mut heads: Vec<Option<usize>> = vec![None; n];
    let mut repairs = Vec::new();
    // Dependents waiting for a head to their right, and heads waiting for a
    // dependent to their right.
    let mut pending_deps: Vec<usize> = Vec::new();
    let mut pending_heads: Vec<usize> = Vec::new();

    for (idx, label) in labels.iter().enumerate() {
        let token = idx + 1;
        let b = &label.brackets;
        if b.has_lt {
            if token > 1 {
                pending_deps.push(token - 1);
            } else {
                repairs.push(Repair::DroppedSymbol {
                    token,
                    symbol: Symbol::Lt,
                });
            }
        }
        for _ in 0..b.k_back {
            match pending_deps.pop() {
                Some(dep) => attach(&mut heads, token, dep, &mut repairs),
                None => repairs.push(Repair::DroppedSymbol {
                    token,
                    symbol: Symbol::Back,
                }),
            }
        }
        for _ in 0..b.k_fwd {
            if token > 1 {
                pending_heads.push(token - 1);
            } else {
                repairs.push(Repair::DroppedSymbol {
                    token,
                    symbol: Symbol::Fwd,
                });
            }
        }
        if b.has_gt {
            match pending_heads.pop() {
                Some(head) => attach(&mut heads, head, token, &mut repairs),
                None => repairs.push(Repair::DroppedSymbol {
                    token,
                    symbol: Symbol::Gt,
                }),
            }
        }
    }
    let mut leftovers: Vec<usize> = pending_deps.into_iter().chain(pending_heads).collect();
    leftovers.sort_unstable();
    repairs.extend(leftovers.into_iter().map(|token| Repair::DroppedPending { token }));

    let heads = repair_heads(heads, policy, &mut repairs);
    let deprels = labels.iter().map(|l| l.deprel.clone()).collect();
    let tree = DepTree::new(heads, deprels)?;
    Ok(Decoded { tree, repairs })
}

fn attach(heads: &mut [Option<usize>], head: usize, dep: usize, repairs: &mut Vec<Repair>) {
    if heads[dep - 1].is_some() {
        repairs.push(Repair::DroppedArc { head, dep });
    } else {
        heads[dep - 1] = Some(head);
    }
}

/// Turn a partial head assignment into a tree: attach headless tokens, then
/// break any remaining cycles.
fn repair_heads(partial: Vec<Option<usize>>, policy: RepairPolicy, repairs: &mut Vec<Repair>) -> Vec<usize> {
    let n = partial.len();
    let mut root_token = None;
    let mut heads: Vec<usize> = Vec::with_capacity(n);
    for (i, h) in partial.iter().enumerate() {
        let token = i + 1;
        let head = match (*h, policy, root_token) {
            (Some(h), _, _) => h,
            (None, RepairPolicy::SingleRoot, Some(root)) => {
                repairs.push(Repair::AttachedToRoot { token, root });
                root
            }
            // The first headless token is the tree's root; the encoding
            // never marks root arcs, so only later ones count as repairs.
            (None, _, None) => {
                root_token = Some(token);
                0
            }
            (None, RepairPolicy::MultiRoot, Some(_)) => {
                repairs.push(Repair::Rooted { token });
                0
            }
        };
        heads.push(head);
    }

    // Every token now has a head; walk each chain to find cycles.
    let mut state = vec![0u8; n + 1]; // 0 unseen, 1 on current path, 2 done
    state[0] = 2;
    for start in 1..=n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        while state[cur] == 0 {
            state[cur] = 1;
            path.push(cur);
            cur = heads[cur - 1];
        }
        if state[cur] == 1 {
            let pos = path.iter().position(|&t| t == cur).unwrap();
            let lowest = *path[pos..].iter().min().unwrap();
            let new_head = match (policy, root_token) {
                (RepairPolicy::SingleRoot, Some(root)) => root,
                _ => {
                    root_token.get_or_insert(lowest);
                    0
                }
            };
            heads[lowest - 1] = new_head;
            repairs.push(Repair::CycleBroken {
                token: lowest,
                new_head,
            });
        }
        for t in path {
            state[t] = 2;
        }
    }
    heads
}

/// Distinct `(bracket string, deprel)` pairs produced by encoding `corpus`,
/// in lexicographic order.
pub fn label_vocabulary<'a, I>(corpus: I) -> BTreeSet<(String, String)>
where
    I: IntoIterator<Item = &'a DepTree>,
{
    corpus
        .into_iter()
        .flat_map(|tree| encode(tree).into_iter().map(|l| (l.brackets.to_string(), l.deprel)))
        .collect()
}

/// Write label sequences as `bracket<TAB>deprel` lines, one blank line after
/// each sentence.
pub fn write_labels(sequences: &[LabelSequence]) -> String {
    let mut out = String::new();
    for seq in sequences {
        for label in seq {
            out.push_str(&label.brackets.to_string());
            out.push('\t');
            out.push_str(&label.deprel);
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn read_labels(text: &str) -> Result<Vec<LabelSequence>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            continue;
        }
        let (brackets, deprel) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(idx + 1, "expected `bracket<TAB>deprel`"))?;
        let brackets = brackets
            .parse()
            .map_err(|e: Error| Error::parse(idx + 1, e.to_string()))?;
        current.push(BracketLabel {
            brackets,
            deprel: deprel.to_owned(),
        });
    }
    if !current.is_empty() {
        out.push(current);
    }
    Ok(out)
}
