//! Left-to-right head selection: one attachment per word, in order, with
//! heads that would close a cycle masked out.

use crate::error::{Error, Result};
use crate::graph::{ArcScores, LabelScores};
use crate::tree::DepTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L2RState {
    n: usize,
    focus: usize,
    heads: Vec<Option<usize>>,
}

impl L2RState {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a sentence needs at least one token"));
        }
        Ok(L2RState {
            n,
            focus: 1,
            heads: vec![None; n],
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Token whose head is chosen next.
    pub fn focus(&self) -> usize {
        self.focus
    }

    pub fn is_terminal(&self) -> bool {
        self.focus > self.n
    }

    pub fn arc_count(&self) -> usize {
        self.focus - 1
    }

    pub fn assigned_heads(&self) -> &[Option<usize>] {
        &self.heads
    }

    /// Whether attaching the focus word to `head` would close a cycle: the
    /// focus is already an ancestor of `head`.
    fn closes_cycle(&self, head: usize) -> bool {
        let mut cur = head;
        while cur != 0 {
            if cur == self.focus {
                return true;
            }
            match self.heads[cur - 1] {
                Some(h) => cur = h,
                None => return false,
            }
        }
        false
    }

    fn is_valid(&self, head: usize) -> bool {
        head <= self.n && head != self.focus && !self.closes_cycle(head)
    }

    /// Candidate heads for the focus word, in increasing order. Always
    /// contains 0.
    pub fn valid_heads(&self) -> Result<Vec<usize>> {
        if self.is_terminal() {
            return Err(Error::invalid("no decisions left in a terminal state"));
        }
        Ok((0..=self.n).filter(|&h| self.is_valid(h)).collect())
    }

    pub fn step(&mut self, head: usize) -> Result<()> {
        if self.is_terminal() {
            return Err(Error::invalid("no decisions left in a terminal state"));
        }
        if !self.is_valid(head) {
            return Err(Error::invalid(format!(
                "head {head} is not a valid choice for token {}",
                self.focus
            )));
        }
        self.heads[self.focus - 1] = Some(head);
        self.focus += 1;
        Ok(())
    }

    /// Head vector of a terminal state.
    pub fn heads(&self) -> Option<Vec<usize>> {
        self.heads.iter().copied().collect()
    }
}

/// Gold head of the focus word, or 0 when earlier choices made it invalid.
pub fn oracle_head(state: &L2RState, gold: &DepTree) -> usize {
    let head = gold.head(state.focus());
    if state.is_valid(head) {
        head
    } else {
        0
    }
}

/// Keep the best-scoring root child on the root and hang every other root
/// child from it.
pub(crate) fn collapse_roots<S: ArcScores + ?Sized>(heads: &mut [usize], scores: &S) {
    let roots: Vec<usize> = (1..=heads.len()).filter(|&d| heads[d - 1] == 0).collect();
    if roots.len() <= 1 {
        return;
    }
    let mut keep = roots[0];
    for &r in &roots[1..] {
        if scores.arc_score(0, r) > scores.arc_score(0, keep) {
            keep = r;
        }
    }
    for r in roots {
        if r != keep {
            heads[r - 1] = keep;
        }
    }
}

/// Greedy left-to-right parse: at every step take the best valid head, then
/// label each arc with its best relation.
pub fn greedy_parse<S>(scores: &S, labels: &[String], single_root: bool) -> Result<DepTree>
where
    S: ArcScores + LabelScores + ?Sized,
{
    let mut state = L2RState::new(scores.len())?;
    while !state.is_terminal() {
        let head = best_valid_head(&state, scores);
        state.step(head)?;
    }
    let mut heads = state.heads().unwrap();
    if single_root {
        collapse_roots(&mut heads, scores);
    }
    let label_ids = crate::graph::assign_labels(&heads, scores)?;
    let deprels = label_ids.into_iter().map(|l| labels[l].clone()).collect();
    DepTree::new(heads, deprels)
}

/// Highest-scoring valid head of the focus word; ties go to the lowest index.
pub(crate) fn best_valid_head<S: ArcScores + ?Sized>(state: &L2RState, scores: &S) -> usize {
    let dep = state.focus();
    let mut best = 0;
    let mut best_score = scores.arc_score(0, dep);
    for head in 1..=state.len() {
        if !state.is_valid(head) {
            continue;
        }
        let s = scores.arc_score(head, dep);
        if s > best_score {
            best = head;
            best_score = s;
        }
    }
    best
}
