//! Dependency trees: validation, per-arc projectivity and exhaustive
//! enumeration of small trees.
//!
//! Tokens are numbered from 1; position 0 is the artificial root. A head
//! vector `heads` stores the head of token `i` at `heads[i - 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sentence length accepted by [`enumerate_trees`].
pub const MAX_ENUMERATION_LENGTH: usize = 7;

/// Whether more than one token may attach to the artificial root.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootPolicy {
    #[default]
    Single,
    Multiple,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Cycle,
    Unreachable,
    OutOfRange,
    SelfLoop,
    MultiRoot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// 1-based token index.
    pub token: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeValidity {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl TreeValidity {
    fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort_by_key(|v| (v.token, v.kind));
        TreeValidity {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub fn tokens_with(&self, kind: ViolationKind) -> Vec<usize> {
        self.violations
            .iter()
            .filter(|v| v.kind == kind)
            .map(|v| v.token)
            .collect()
    }
}

/// Check that `heads` forms a tree rooted at the artificial root.
///
/// Every token must reach position 0 by following head links. Tokens lying
/// on a cycle are reported as `Cycle`; tokens whose head chain runs into a
/// cycle, a self loop or an out-of-range head are reported as `Unreachable`.
/// `MultiRoot` is only reported under [`RootPolicy::Single`], once for
/// every root child after the first.
pub fn validate(heads: &[usize], policy: RootPolicy) -> TreeValidity {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unvisited,
        InProgress,
        Rooted,
        Broken,
    }

    let n = heads.len();
    let mut violations = Vec::new();
    let mut broken_link = vec![false; n + 1];

    for (i, &h) in heads.iter().enumerate() {
        let token = i + 1;
        if h > n {
            violations.push(Violation {
                kind: ViolationKind::OutOfRange,
                token,
            });
            broken_link[token] = true;
        } else if h == token {
            violations.push(Violation {
                kind: ViolationKind::SelfLoop,
                token,
            });
            broken_link[token] = true;
        }
    }

    let mut mark = vec![Mark::Unvisited; n + 1];
    mark[0] = Mark::Rooted;
    let mut on_cycle = vec![false; n + 1];
    let mut path = Vec::new();

    for start in 1..=n {
        if mark[start] != Mark::Unvisited {
            continue;
        }
        path.clear();
        let mut cur = start;
        let outcome = loop {
            match mark[cur] {
                Mark::Rooted => break Mark::Rooted,
                Mark::Broken => break Mark::Broken,
                Mark::InProgress => {
                    // `cur` closes a cycle consisting of the path suffix
                    // starting at `cur`.
                    let pos = path.iter().position(|&t| t == cur).unwrap();
                    for &t in &path[pos..] {
                        on_cycle[t] = true;
                    }
                    break Mark::Broken;
                }
                Mark::Unvisited => {
                    if broken_link[cur] {
                        mark[cur] = Mark::Broken;
                        path.push(cur);
                        break Mark::Broken;
                    }
                    mark[cur] = Mark::InProgress;
                    path.push(cur);
                    cur = heads[cur - 1];
                }
            }
        };
        for &t in &path {
            mark[t] = outcome;
        }
    }

    for token in 1..=n {
        if on_cycle[token] {
            violations.push(Violation {
                kind: ViolationKind::Cycle,
                token,
            });
        } else if mark[token] == Mark::Broken && !broken_link[token] {
            violations.push(Violation {
                kind: ViolationKind::Unreachable,
                token,
            });
        }
    }

    if policy == RootPolicy::Single {
        for (i, _) in heads.iter().enumerate().filter(|(_, &h)| h == 0).skip(1) {
            violations.push(Violation {
                kind: ViolationKind::MultiRoot,
                token: i + 1,
            });
        }
    }

    TreeValidity::from_violations(violations)
}

/// A validated dependency tree with relation labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DepTree {
    heads: Vec<usize>,
    deprels: Vec<String>,
}

impl DepTree {
    /// Build a tree, rejecting anything that is not connected and acyclic.
    /// Several root children are allowed.
    pub fn new(heads: Vec<usize>, deprels: Vec<String>) -> Result<Self> {
        if heads.is_empty() {
            return Err(Error::Validation("a tree needs at least one token".into()));
        }
        if heads.len() != deprels.len() {
            return Err(Error::Validation(format!(
                "{} heads but {} relation labels",
                heads.len(),
                deprels.len()
            )));
        }
        let validity = validate(&heads, RootPolicy::Multiple);
        if !validity.ok {
            let v = validity.violations[0];
            return Err(Error::Validation(format!(
                "{:?} at token {} in heads {:?}",
                v.kind, v.token, heads
            )));
        }
        Ok(DepTree { heads, deprels })
    }

    /// Tree with every relation set to `label`.
    pub fn unlabeled(heads: Vec<usize>, label: &str) -> Result<Self> {
        let deprels = vec![label.to_owned(); heads.len()];
        DepTree::new(heads, deprels)
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn deprels(&self) -> &[String] {
        &self.deprels
    }

    /// Head of the 1-based token `dep`.
    pub fn head(&self, dep: usize) -> usize {
        self.heads[dep - 1]
    }

    pub fn deprel(&self, dep: usize) -> &str {
        &self.deprels[dep - 1]
    }

    pub fn root_children(&self) -> impl Iterator<Item = usize> + '_ {
        self.heads
            .iter()
            .enumerate()
            .filter(|(_, &h)| h == 0)
            .map(|(i, _)| i + 1)
    }

    pub fn into_parts(self) -> (Vec<usize>, Vec<String>) {
        (self.heads, self.deprels)
    }
}

/// Whether the arc into `dep` is projective: no token strictly inside the
/// arc's span has its head outside the span. Root arcs are projective.
pub fn is_projective_arc(tree: &DepTree, dep: usize) -> Result<bool> {
    if dep == 0 || dep > tree.len() {
        return Err(Error::invalid(format!("token {dep} outside 1..={}", tree.len())));
    }
    Ok(arc_is_projective(tree.heads(), dep))
}

pub(crate) fn arc_is_projective(heads: &[usize], dep: usize) -> bool {
    let head = heads[dep - 1];
    if head == 0 {
        return true;
    }
    let (lo, hi) = if head < dep { (head, dep) } else { (dep, head) };
    ((lo + 1)..hi).all(|k| {
        let h = heads[k - 1];
        (lo..=hi).contains(&h)
    })
}

/// Number of arcs in `tree` that are not projective.
pub fn nonprojective_arc_count(tree: &DepTree) -> usize {
    (1..=tree.len())
        .filter(|&d| !arc_is_projective(tree.heads(), d))
        .count()
}

pub fn is_projective(tree: &DepTree) -> bool {
    nonprojective_arc_count(tree) == 0
}

/// All single-root trees over `n` tokens, in lexicographic order of their
/// head vectors.
///
/// The projective listing is generated independently of the unrestricted
/// one, by recursively splitting spans around their heads.
pub fn enumerate_trees(n: usize, projective_only: bool) -> Result<Vec<Vec<usize>>> {
    if n == 0 || n > MAX_ENUMERATION_LENGTH {
        return Err(Error::invalid(format!(
            "tree enumeration supports 1..={MAX_ENUMERATION_LENGTH} tokens, got {n}"
        )));
    }
    if projective_only {
        let mut trees = projective_spans(1, n, n)
            .into_iter()
            .map(|(root, mut heads)| {
                heads[root - 1] = 0;
                heads
            })
            .collect::<Vec<_>>();
        trees.sort();
        Ok(trees)
    } else {
        let mut trees = Vec::new();
        let mut heads = vec![usize::MAX; n];
        extend_assignment(&mut heads, 0, false, &mut trees);
        Ok(trees)
    }
}

fn extend_assignment(heads: &mut Vec<usize>, next: usize, root_used: bool, out: &mut Vec<Vec<usize>>) {
    let n = heads.len();
    if next == n {
        if root_used {
            out.push(heads.clone());
        }
        return;
    }
    let dep = next + 1;
    for head in 0..=n {
        if head == dep || (head == 0 && root_used) {
            continue;
        }
        if head != 0 && closes_cycle(heads, head, dep) {
            continue;
        }
        heads[next] = head;
        extend_assignment(heads, next + 1, root_used || head == 0, out);
    }
    heads[next] = usize::MAX;
}

/// Whether walking up from `head` through assigned links reaches `dep`.
fn closes_cycle(heads: &[usize], head: usize, dep: usize) -> bool {
    let mut cur = head;
    for _ in 0..heads.len() {
        if cur == dep {
            return true;
        }
        if cur == 0 || cur == usize::MAX {
            return false;
        }
        cur = heads[cur - 1];
    }
    false
}

/// Projective trees spanning tokens `lo..=hi` of an `n`-token sentence,
/// returned as the span head and a head vector in which entries outside the
/// span, and the span head's own entry, are zero.
fn projective_spans(lo: usize, hi: usize, n: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for root in lo..=hi {
        let lefts = dependent_sequences(lo, root - 1, root, n);
        let rights = dependent_sequences(root + 1, hi, root, n);
        for left in &lefts {
            for right in &rights {
                let heads = left.iter().zip(right).map(|(&a, &b)| a.max(b)).collect();
                out.push((root, heads));
            }
        }
    }
    out
}

/// Ways of covering `lo..=hi` with consecutive projective subtrees whose
/// heads attach to `governor`.
fn dependent_sequences(lo: usize, hi: usize, governor: usize, n: usize) -> Vec<Vec<usize>> {
    if lo > hi {
        return vec![vec![0; n]];
    }
    let mut out = Vec::new();
    for split in lo..=hi {
        let rests = dependent_sequences(split + 1, hi, governor, n);
        for (sub_root, sub) in projective_spans(lo, split, n) {
            for rest in &rests {
                let mut heads: Vec<usize> = sub.iter().zip(rest).map(|(&a, &b)| a.max(b)).collect();
                heads[sub_root - 1] = governor;
                out.push(heads);
            }
        }
    }
    out
}
