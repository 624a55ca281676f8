use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::features::{feature_id, labeled_feature_id, FeatureContext};
use crate::conllu::Sentence;
use crate::error::{Error, Result};
use crate::graph::{assign_labels, cle_decode, ArcScores, LabelScores};
use crate::seqlab::{decode, BracketLabel, RepairPolicy};
use crate::transition::greedy_parse;
use crate::tree::DepTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Paradigm {
    Graph,
    Transition,
    Seqlab,
}

impl Paradigm {
    pub const ALL: [Paradigm; 3] = [Paradigm::Graph, Paradigm::Transition, Paradigm::Seqlab];

    pub fn as_str(self) -> &'static str {
        match self {
            Paradigm::Graph => "graph",
            Paradigm::Transition => "transition",
            Paradigm::Seqlab => "seqlab",
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Paradigm::Graph => 0,
            Paradigm::Transition => 1,
            Paradigm::Seqlab => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        Paradigm::ALL.into_iter().find(|p| p.tag() == tag)
    }
}

impl fmt::Display for Paradigm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Paradigm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Paradigm::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown paradigm `{s}` (graph, transition, seqlab)")))
    }
}

pub const MIN_FEATURE_BITS: u8 = 8;
pub const MAX_FEATURE_BITS: u8 = 26;

pub(crate) fn check_bits(bits: u8) -> Result<()> {
    if (MIN_FEATURE_BITS..=MAX_FEATURE_BITS).contains(&bits) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "feature_space_bits must be in {MIN_FEATURE_BITS}..={MAX_FEATURE_BITS}, got {bits}"
        )))
    }
}

/// Labels of a sequence-labelling model are stored as `bracket<TAB>deprel`.
pub(crate) fn seqlab_entry(label: &BracketLabel) -> String {
    format!("{}\t{}", label.brackets, label.deprel)
}

fn parse_seqlab_entry(entry: &str) -> Result<BracketLabel> {
    let (b, d) = entry
        .split_once('\t')
        .ok_or_else(|| Error::Format(format!("bad sequence label `{entry}`")))?;
    BracketLabel::new(b, d)
}

/// A trained linear scorer for one paradigm.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    paradigm: Paradigm,
    feature_space_bits: u8,
    labels: Vec<String>,
    weights: Vec<f64>,
    seq_labels: Vec<BracketLabel>,
}

impl LinearModel {
    pub fn new(paradigm: Paradigm, feature_space_bits: u8, labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        check_bits(feature_space_bits)?;
        if labels.is_empty() {
            return Err(Error::invalid("label vocabulary is empty"));
        }
        if weights.len() != 1usize << feature_space_bits {
            return Err(Error::invalid(format!(
                "{} weights for a {}-bit feature space",
                weights.len(),
                feature_space_bits
            )));
        }
        let seq_labels = if paradigm == Paradigm::Seqlab {
            labels.iter().map(|l| parse_seqlab_entry(l)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        Ok(LinearModel {
            paradigm,
            feature_space_bits,
            labels,
            weights,
            seq_labels,
        })
    }

    pub fn paradigm(&self) -> Paradigm {
        self.paradigm
    }

    pub fn feature_space_bits(&self) -> u8 {
        self.feature_space_bits
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Label entries of a sequence-labelling model.
    pub fn sequence_labels(&self) -> &[BracketLabel] {
        &self.seq_labels
    }

    /// Parse one sentence. With `single_root`, exactly one token attaches
    /// to the root.
    pub fn parse(&self, sentence: &Sentence, single_root: bool) -> Result<DepTree> {
        if sentence.is_empty() {
            return Err(Error::invalid("cannot parse an empty sentence"));
        }
        let ctx = FeatureContext::new(sentence);
        match self.paradigm {
            Paradigm::Graph => {
                let scorer = ArcScorer::new(&self.weights, self.feature_space_bits, &ctx, self.labels.len());
                let heads = cle_decode(&scorer, single_root)?;
                let ids = assign_labels(&heads, &scorer)?;
                let deprels = ids.into_iter().map(|l| self.labels[l].clone()).collect();
                DepTree::new(heads, deprels)
            }
            Paradigm::Transition => {
                let scorer = ArcScorer::new(&self.weights, self.feature_space_bits, &ctx, self.labels.len());
                greedy_parse(&scorer, &self.labels, single_root)
            }
            Paradigm::Seqlab => {
                let tagger = TokenScorer::new(&self.weights, self.feature_space_bits, &ctx);
                let labels: Vec<BracketLabel> = (1..=ctx.len())
                    .map(|i| self.seq_labels[tagger.best_label(i, self.seq_labels.len())].clone())
                    .collect();
                let policy = if single_root {
                    RepairPolicy::SingleRoot
                } else {
                    RepairPolicy::MultiRoot
                };
                Ok(decode(&labels, policy)?.tree)
            }
        }
    }

    /// Parse every sentence, returning copies with HEAD and DEPREL replaced.
    pub fn parse_corpus(&self, sentences: &[Sentence], single_root: bool) -> Result<Vec<Sentence>> {
        sentences
            .iter()
            .map(|s| {
                let tree = self.parse(s, single_root)?;
                let mut out = s.clone();
                out.set_tree(&tree)?;
                Ok(out)
            })
            .collect()
    }
}

/// Arc and label scores of one sentence under a weight vector. Arc scores
/// are computed once up front; label scores on demand.
pub(crate) struct ArcScorer<'a> {
    weights: &'a [f64],
    bits: u8,
    ctx: &'a FeatureContext,
    arcs: Vec<f64>,
    label_count: usize,
}

impl<'a> ArcScorer<'a> {
    pub(crate) fn new(weights: &'a [f64], bits: u8, ctx: &'a FeatureContext, label_count: usize) -> Self {
        let n = ctx.len();
        let side = n + 1;
        let mut arcs = vec![0.0; side * side];
        let mut raw = Vec::new();
        for head in 0..=n {
            for dep in 1..=n {
                if head == dep {
                    continue;
                }
                raw.clear();
                ctx.arc_raw(head, dep, &mut raw);
                arcs[head * side + dep] = raw.iter().map(|&r| weights[feature_id(r, bits) as usize]).sum();
            }
        }
        ArcScorer {
            weights,
            bits,
            ctx,
            arcs,
            label_count,
        }
    }
}

impl ArcScores for ArcScorer<'_> {
    fn len(&self) -> usize {
        self.ctx.len()
    }

    fn arc_score(&self, head: usize, dep: usize) -> f64 {
        self.arcs[head * (self.ctx.len() + 1) + dep]
    }
}

impl LabelScores for ArcScorer<'_> {
    fn label_count(&self) -> usize {
        self.label_count
    }

    fn label_score(&self, head: usize, dep: usize, label: usize) -> f64 {
        let mut raw = Vec::with_capacity(12);
        self.ctx.label_raw(head, dep, &mut raw);
        raw.iter()
            .map(|&r| self.weights[labeled_feature_id(r, label, self.bits) as usize])
            .sum()
    }
}

/// Per-token label scores for the sequence-labelling paradigm.
pub(crate) struct TokenScorer<'a> {
    weights: &'a [f64],
    bits: u8,
    raw: Vec<Vec<u64>>,
}

impl<'a> TokenScorer<'a> {
    pub(crate) fn new(weights: &'a [f64], bits: u8, ctx: &FeatureContext) -> Self {
        let raw = (1..=ctx.len())
            .map(|i| {
                let mut r = Vec::new();
                ctx.token_raw(i, &mut r);
                r
            })
            .collect();
        TokenScorer { weights, bits, raw }
    }

    /// Best label of token `i`; ties go to the lowest index.
    pub(crate) fn best_label(&self, i: usize, count: usize) -> usize {
        best_token_label(self.weights, self.bits, &self.raw[i - 1], count)
    }
}

pub(crate) fn best_token_label(weights: &[f64], bits: u8, raw: &[u64], count: usize) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for label in 0..count {
        let s: f64 = raw
            .iter()
            .map(|&r| weights[labeled_feature_id(r, label, bits) as usize])
            .sum();
        if s > best_score {
            best = label;
            best_score = s;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paradigm_names() {
        for p in Paradigm::ALL {
            assert_eq!(p.as_str().parse::<Paradigm>().unwrap(), p);
            assert_eq!(Paradigm::from_tag(p.tag()), Some(p));
        }
        assert!("biaffine".parse::<Paradigm>().is_err());
        assert_eq!(Paradigm::from_tag(9), None);
    }

    #[test]
    fn constructor_checks() {
        let w = vec![0.0; 256];
        assert!(LinearModel::new(Paradigm::Graph, 8, vec!["x".into()], w.clone()).is_ok());
        assert!(LinearModel::new(Paradigm::Graph, 8, vec![], w.clone()).is_err());
        assert!(LinearModel::new(Paradigm::Graph, 9, vec!["x".into()], w.clone()).is_err());
        assert!(LinearModel::new(Paradigm::Graph, 4, vec!["x".into()], vec![0.0; 16]).is_err());
        assert!(LinearModel::new(Paradigm::Seqlab, 8, vec!["x".into()], w.clone()).is_err());
        assert!(LinearModel::new(Paradigm::Seqlab, 8, vec!["<\\\tnsubj".into()], w).is_ok());
    }

    #[test]
    fn zero_model_still_emits_trees() {
        let s = Sentence::new(
            (1..=4)
                .map(|i| crate::conllu::Token::new(i, "w", "X", 0, "dep"))
                .collect(),
        );
        for p in Paradigm::ALL {
            let labels = if p == Paradigm::Seqlab {
                vec!["_\tdep".to_string()]
            } else {
                vec!["dep".to_string()]
            };
            let m = LinearModel::new(p, 10, labels, vec![0.0; 1024]).unwrap();
            let t = m.parse(&s, true).unwrap();
            assert_eq!(t.root_children().count(), 1, "{p}");
        }
    }
}
