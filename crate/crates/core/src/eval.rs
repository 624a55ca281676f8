//! Attachment scores.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::conllu::Sentence;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PunctPolicy {
    #[default]
    Include,
    /// Drop tokens whose gold UPOS is `PUNCT`.
    ExcludeUposPunct,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub uas: f64,
    pub las: f64,
    pub token_count: usize,
    pub correct_heads: usize,
    pub correct_labeled: usize,
    pub punct_policy: PunctPolicy,
}

/// `100 * num / den` rounded half-up to two decimals, computed exactly.
pub fn percent_2dp(num: usize, den: usize) -> f64 {
    if den == 0 {
        return 0.0;
    }
    let (num, den) = (num as u128, den as u128);
    let hundredths = (20_000 * num + den) / (2 * den);
    hundredths as f64 / 100.0
}

impl EvalResult {
    fn from_counts(heads: usize, labeled: usize, tokens: usize, policy: PunctPolicy) -> Self {
        let pct = |c: usize| {
            if tokens == 0 {
                0.0
            } else {
                100.0 * c as f64 / tokens as f64
            }
        };
        EvalResult {
            uas: pct(heads),
            las: pct(labeled),
            token_count: tokens,
            correct_heads: heads,
            correct_labeled: labeled,
            punct_policy: policy,
        }
    }

    pub fn uas_2dp(&self) -> f64 {
        percent_2dp(self.correct_heads, self.token_count)
    }

    pub fn las_2dp(&self) -> f64 {
        percent_2dp(self.correct_labeled, self.token_count)
    }

    /// `uas<TAB>las<TAB>tokens`.
    pub fn to_tsv(&self) -> String {
        format!("{:.2}\t{:.2}\t{}", self.uas_2dp(), self.las_2dp(), self.token_count)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "uas": self.uas_2dp(),
            "las": self.las_2dp(),
            "tokens": self.token_count,
            "correct_heads": self.correct_heads,
            "correct_labeled": self.correct_labeled,
            "punct_policy": self.punct_policy,
        })
    }
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UAS {:.2} LAS {:.2}", self.uas_2dp(), self.las_2dp())
    }
}

pub fn score(gold: &[Sentence], pred: &[Sentence], policy: PunctPolicy) -> Result<EvalResult> {
    if gold.len() != pred.len() {
        return Err(Error::Alignment {
            sentence: gold.len().min(pred.len()) + 1,
            message: format!("{} gold vs {} predicted sentences", gold.len(), pred.len()),
        });
    }
    let (mut tokens, mut heads, mut labeled) = (0, 0, 0);
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(Error::Alignment {
                sentence: i + 1,
                message: format!("{} gold vs {} predicted tokens", g.len(), p.len()),
            });
        }
        for (gt, pt) in g.tokens.iter().zip(&p.tokens) {
            if gt.form != pt.form {
                return Err(Error::Alignment {
                    sentence: i + 1,
                    message: format!("token {}: `{}` vs `{}`", gt.id, gt.form, pt.form),
                });
            }
            if policy == PunctPolicy::ExcludeUposPunct && gt.upos == "PUNCT" {
                continue;
            }
            tokens += 1;
            if gt.head == pt.head {
                heads += 1;
                if gt.deprel == pt.deprel {
                    labeled += 1;
                }
            }
        }
    }
    Ok(EvalResult::from_counts(heads, labeled, tokens, policy))
}
