//! Edge-factored decoding: maximum spanning arborescence over arc scores,
//! followed by independent per-arc label selection.

use crate::error::{Error, Result};

/// Scores for every head candidate of every dependent.
pub trait ArcScores {
    /// Number of tokens; positions run 0 (root) through `len()`.
    fn len(&self) -> usize;

    fn arc_score(&self, head: usize, dep: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Scores for every relation label of a given arc.
pub trait LabelScores {
    fn label_count(&self) -> usize;

    fn label_score(&self, head: usize, dep: usize, label: usize) -> f64;
}

/// Dense score table: arc scores indexed `[head][dep]` and label scores
/// indexed `[head][dep][label]`. Diagonal entries are never read.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    n: usize,
    arcs: Vec<f64>,
    label_count: usize,
    labels: Vec<f64>,
}

impl ScoreTable {
    /// Table for `n` tokens with all scores zero.
    pub fn new(n: usize, label_count: usize) -> Self {
        let side = n + 1;
        ScoreTable {
            n,
            arcs: vec![0.0; side * side],
            label_count,
            labels: vec![0.0; side * side * label_count],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut table = ScoreTable::new(n, 0);
        for head in 0..=n {
            for dep in 1..=n {
                if head != dep {
                    table.set_arc(head, dep, f(head, dep));
                }
            }
        }
        table
    }

    pub fn set_arc(&mut self, head: usize, dep: usize, score: f64) {
        self.arcs[head * (self.n + 1) + dep] = score;
    }

    pub fn set_label(&mut self, head: usize, dep: usize, label: usize, score: f64) {
        let idx = (head * (self.n + 1) + dep) * self.label_count + label;
        self.labels[idx] = score;
    }
}

impl ArcScores for ScoreTable {
    fn len(&self) -> usize {
        self.n
    }

    fn arc_score(&self, head: usize, dep: usize) -> f64 {
        self.arcs[head * (self.n + 1) + dep]
    }
}

impl LabelScores for ScoreTable {
    fn label_count(&self) -> usize {
        self.label_count
    }

    fn label_score(&self, head: usize, dep: usize, label: usize) -> f64 {
        self.labels[(head * (self.n + 1) + dep) * self.label_count + label]
    }
}

/// Sum of arc scores of a head assignment.
pub fn tree_score<S: ArcScores + ?Sized>(scores: &S, heads: &[usize]) -> f64 {
    heads.iter().enumerate().map(|(i, &h)| scores.arc_score(h, i + 1)).sum()
}

/// Highest-scoring spanning arborescence rooted at position 0.
///
/// With `single_root`, only trees with exactly one root child are
/// considered: the unrestricted decoder runs once per candidate root with
/// every other root arc removed, and the best total wins (lowest root index
/// on ties). Ties between arcs go to the lower head index.
pub fn cle_decode<S: ArcScores + ?Sized>(scores: &S, single_root: bool) -> Result<Vec<usize>> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::invalid("cannot decode an empty sentence"));
    }
    if n == 1 {
        return Ok(vec![0]);
    }

    let side = n + 1;
    let mut matrix = vec![f64::NEG_INFINITY; side * side];
    for head in 0..=n {
        for dep in 1..=n {
            if head != dep {
                matrix[head * side + dep] = scores.arc_score(head, dep);
            }
        }
    }

    if !single_root {
        let parents = chu_liu_edmonds(&matrix, side);
        return Ok(parents[1..].to_vec());
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut masked = matrix.clone();
    for root in 1..=n {
        for dep in 1..=n {
            masked[dep] = if dep == root { matrix[dep] } else { f64::NEG_INFINITY };
        }
        let parents = chu_liu_edmonds(&masked, side);
        let heads = parents[1..].to_vec();
        let total = tree_score(scores, &heads);
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, heads));
        }
    }
    Ok(best.unwrap().1)
}

/// Maximum spanning arborescence of a dense `side x side` matrix indexed
/// `[head * side + dep]`, rooted at node 0. Returns the parent of every
/// node; `parents[0]` is meaningless.
fn chu_liu_edmonds(matrix: &[f64], side: usize) -> Vec<usize> {
    // Best incoming arc of every non-root node.
    let mut parents = vec![0usize; side];
    for dep in 1..side {
        let mut best = usize::MAX;
        let mut best_score = f64::NEG_INFINITY;
        for head in 0..side {
            if head == dep {
                continue;
            }
            let s = matrix[head * side + dep];
            if best == usize::MAX || s > best_score {
                best = head;
                best_score = s;
            }
        }
        parents[dep] = best;
    }

    let cycle = match find_cycle(&parents) {
        Some(c) => c,
        None => return parents,
    };

    let mut in_cycle = vec![false; side];
    for &v in &cycle {
        in_cycle[v] = true;
    }

    // Contracted graph: non-cycle nodes keep their relative order (so the
    // root stays at 0) and the cycle becomes the last node.
    let outside: Vec<usize> = (0..side).filter(|&v| !in_cycle[v]).collect();
    let mut new_index = vec![usize::MAX; side];
    for (i, &v) in outside.iter().enumerate() {
        new_index[v] = i;
    }
    let c = outside.len();
    let c_side = c + 1;
    let mut contracted = vec![f64::NEG_INFINITY; c_side * c_side];

    // For arcs entering the cycle: which cycle node they enter.
    let mut enter_at = vec![usize::MAX; c_side];
    // For arcs leaving the cycle: which cycle node they leave from.
    let mut leave_from = vec![usize::MAX; c_side];

    for (ui, &u) in outside.iter().enumerate() {
        for (wi, &w) in outside.iter().enumerate() {
            if ui != wi {
                contracted[ui * c_side + wi] = matrix[u * side + w];
            }
        }
        let mut best_in = f64::NEG_INFINITY;
        let mut best_out = f64::NEG_INFINITY;
        for &v in &cycle_nodes_sorted(&cycle) {
            let gain = matrix[u * side + v] - matrix[parents[v] * side + v];
            if enter_at[ui] == usize::MAX || gain > best_in {
                enter_at[ui] = v;
                best_in = gain;
            }
            if u != 0 {
                let s = matrix[v * side + u];
                if leave_from[ui] == usize::MAX || s > best_out {
                    leave_from[ui] = v;
                    best_out = s;
                }
            }
        }
        contracted[ui * c_side + c] = best_in;
        if u != 0 {
            contracted[c * c_side + ui] = best_out;
        }
    }

    let sub = chu_liu_edmonds(&contracted, c_side);

    let mut result = parents.clone();
    for (wi, &w) in outside.iter().enumerate().skip(1) {
        let p = sub[wi];
        result[w] = if p == c { leave_from[wi] } else { outside[p] };
    }
    let entering = sub[c];
    let v = enter_at[entering];
    result[v] = outside[entering];
    result
}

fn cycle_nodes_sorted(cycle: &[usize]) -> Vec<usize> {
    let mut nodes = cycle.to_vec();
    nodes.sort_unstable();
    nodes
}

/// First cycle found in a parent array (node 0 is the root and has no
/// parent).
fn find_cycle(parents: &[usize]) -> Option<Vec<usize>> {
    let side = parents.len();
    let mut state = vec![0u8; side];
    state[0] = 2;
    for start in 1..side {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        while state[cur] == 0 {
            state[cur] = 1;
            path.push(cur);
            cur = parents[cur];
        }
        if state[cur] == 1 {
            let pos = path.iter().position(|&v| v == cur).unwrap();
            return Some(path[pos..].to_vec());
        }
        for v in path {
            state[v] = 2;
        }
    }
    None
}

/// Best label for every arc of `heads`; ties go to the lowest label index.
pub fn assign_labels<S: LabelScores + ?Sized>(heads: &[usize], scores: &S) -> Result<Vec<usize>> {
    let count = scores.label_count();
    if count == 0 {
        return Err(Error::invalid("label vocabulary is empty"));
    }
    Ok(heads
        .iter()
        .enumerate()
        .map(|(i, &head)| {
            let dep = i + 1;
            let mut best = 0;
            let mut best_score = scores.label_score(head, dep, 0);
            for label in 1..count {
                let s = scores.label_score(head, dep, label);
                if s > best_score {
                    best = label;
                    best_score = s;
                }
            }
            best
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{validate, RootPolicy};

    #[test]
    fn single_token() {
        let t = ScoreTable::from_fn(1, |_, _| -3.0);
        assert_eq!(cle_decode(&t, true).unwrap(), vec![0]);
        assert_eq!(cle_decode(&t, false).unwrap(), vec![0]);
        assert!(cle_decode(&ScoreTable::new(0, 0), true).is_err());
    }

    #[test]
    fn two_tokens_single_root() {
        let mut t = ScoreTable::new(2, 0);
        t.set_arc(0, 1, 1.0);
        t.set_arc(0, 2, 1.0);
        t.set_arc(1, 2, 5.0);
        t.set_arc(2, 1, 0.0);
        let heads = cle_decode(&t, true).unwrap();
        assert_eq!(heads, vec![0, 1]);
        assert_eq!(tree_score(&t, &heads), 6.0);
    }

    #[test]
    fn single_root_restriction_changes_answer() {
        // Unrestricted prefers both tokens on the root.
        let mut t = ScoreTable::new(2, 0);
        t.set_arc(0, 1, 5.0);
        t.set_arc(0, 2, 5.0);
        t.set_arc(1, 2, 1.0);
        t.set_arc(2, 1, 1.0);
        assert_eq!(cle_decode(&t, false).unwrap(), vec![0, 0]);
        assert_eq!(cle_decode(&t, true).unwrap(), vec![0, 1]);
    }

    #[test]
    fn contracts_cycles() {
        // 1 and 2 prefer each other; 3 prefers 2; root arcs are weak.
        let t = ScoreTable::from_fn(3, |h, d| match (h, d) {
            (1, 2) | (2, 1) => 10.0,
            (2, 3) => 8.0,
            (0, 1) => 2.0,
            (0, _) => 1.0,
            _ => 0.0,
        });
        let heads = cle_decode(&t, false).unwrap();
        assert!(validate(&heads, RootPolicy::Multiple).ok);
        assert_eq!(heads, vec![0, 1, 2]);
    }

    #[test]
    fn nested_contraction() {
        let t = ScoreTable::from_fn(4, |h, d| match (h, d) {
            (1, 2) | (2, 1) => 9.0,
            (3, 4) | (4, 3) => 9.0,
            (2, 3) => 5.0,
            (3, 2) => 5.0,
            (0, 4) => 1.0,
            _ => 0.0,
        });
        let heads = cle_decode(&t, true).unwrap();
        assert!(validate(&heads, RootPolicy::Single).ok);
        // Best: 0->4, 4->3, 3->2, 2->1 = 1 + 9 + 5 + 9.
        assert_eq!(tree_score(&t, &heads), 24.0);
    }

    #[test]
    fn label_argmax_and_ties() {
        let mut t = ScoreTable::new(1, 2);
        t.set_label(0, 1, 0, 2.0);
        t.set_label(0, 1, 1, 1.0);
        assert_eq!(assign_labels(&[0], &t).unwrap(), vec![0]);
        t.set_label(0, 1, 1, 2.0);
        assert_eq!(assign_labels(&[0], &t).unwrap(), vec![0]);
        t.set_label(0, 1, 1, 2.5);
        assert_eq!(assign_labels(&[0], &t).unwrap(), vec![1]);
        assert!(assign_labels(&[0], &ScoreTable::new(1, 0)).is_err());
    }
}
