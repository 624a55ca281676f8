//! CoNLL-U reading and writing, plus treebank statistics.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{nonprojective_arc_count, DepTree};

const EMPTY: &str = "_";

/// One syntactic word. Columns that this crate does not interpret are kept
/// verbatim so that rewritten files only differ in HEAD and DEPREL.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// Token with placeholder values in every column not given.
    pub fn new(id: usize, form: &str, upos: &str, head: usize, deprel: &str) -> Self {
        Token {
            id,
            form: form.to_owned(),
            lemma: EMPTY.to_owned(),
            upos: upos.to_owned(),
            xpos: EMPTY.to_owned(),
            feats: EMPTY.to_owned(),
            head,
            deprel: deprel.to_owned(),
            deps: EMPTY.to_owned(),
            misc: EMPTY.to_owned(),
        }
    }
}

/// A line that is not a syntactic word: a multiword token range (`1-2`) or
/// an empty node (`1.1`). `after` is the number of syntactic words that
/// precede it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtraLine {
    pub after: usize,
    pub line: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    pub sent_id: Option<String>,
    /// Comment lines including the leading `#`.
    pub comments: Vec<String>,
    pub extra_lines: Vec<ExtraLine>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence {
            tokens,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn heads(&self) -> Vec<usize> {
        self.tokens.iter().map(|t| t.head).collect()
    }

    pub fn tree(&self) -> Result<DepTree> {
        DepTree::new(self.heads(), self.tokens.iter().map(|t| t.deprel.clone()).collect())
    }

    /// Overwrite HEAD and DEPREL with the values of `tree`.
    pub fn set_tree(&mut self, tree: &DepTree) -> Result<()> {
        if tree.len() != self.len() {
            return Err(Error::Validation(format!(
                "tree has {} tokens, sentence has {}",
                tree.len(),
                self.len()
            )));
        }
        for (i, token) in self.tokens.iter_mut().enumerate() {
            token.head = tree.heads()[i];
            token.deprel = tree.deprels()[i].clone();
        }
        Ok(())
    }
}

/// Parse CoNLL-U text into sentences.
pub fn parse_conllu(text: &str) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    let mut current = Sentence::default();
    let mut start_line = 0;
    let mut token_lines = Vec::new();
    let mut in_block = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);

        if line.trim().is_empty() {
            if in_block {
                sentences.push(finish(current, start_line, &token_lines)?);
                current = Sentence::default();
                token_lines.clear();
                in_block = false;
            }
            continue;
        }

        if !in_block {
            in_block = true;
            start_line = line_no;
        }

        if let Some(body) = line.strip_prefix('#') {
            if let Some(rest) = body.trim_start().strip_prefix("sent_id") {
                if let Some(value) = rest.trim_start().strip_prefix('=') {
                    current.sent_id = Some(value.trim().to_owned());
                }
            }
            current.comments.push(line.to_owned());
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::parse(
                line_no,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }

        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            current.extra_lines.push(ExtraLine {
                after: current.tokens.len(),
                line: line.to_owned(),
            });
            continue;
        }

        let id: usize = id
            .parse()
            .map_err(|_| Error::parse(line_no, format!("non-numeric token id `{}`", cols[0])))?;
        let head: usize = cols[6]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("non-numeric head `{}`", cols[6])))?;

        current.tokens.push(Token {
            id,
            form: cols[1].to_owned(),
            lemma: cols[2].to_owned(),
            upos: cols[3].to_owned(),
            xpos: cols[4].to_owned(),
            feats: cols[5].to_owned(),
            head,
            deprel: cols[7].to_owned(),
            deps: cols[8].to_owned(),
            misc: cols[9].to_owned(),
        });
        token_lines.push(line_no);
    }

    if in_block {
        sentences.push(finish(current, start_line, &token_lines)?);
    }

    Ok(sentences)
}

fn finish(sentence: Sentence, start_line: usize, token_lines: &[usize]) -> Result<Sentence> {
    let n = sentence.tokens.len();
    if n == 0 {
        return Err(Error::Validation(format!(
            "sentence starting at line {start_line} has no tokens"
        )));
    }
    for (i, token) in sentence.tokens.iter().enumerate() {
        let line = token_lines[i];
        if token.id != i + 1 {
            return Err(Error::Validation(format!(
                "line {line}: expected token id {}, found {}",
                i + 1,
                token.id
            )));
        }
        if token.head > n {
            return Err(Error::Validation(format!(
                "line {line}: head {} out of range for a {n}-token sentence",
                token.head
            )));
        }
        if token.head == token.id {
            return Err(Error::Validation(format!(
                "line {line}: token {} is its own head",
                token.id
            )));
        }
        if token.form.is_empty() {
            return Err(Error::Validation(format!("line {line}: empty form")));
        }
    }
    Ok(sentence)
}

fn field(value: &str) -> &str {
    if value.is_empty() {
        EMPTY
    } else {
        value
    }
}

/// Render sentences as CoNLL-U. Each sentence is followed by a blank line.
pub fn write_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        for comment in &sentence.comments {
            out.push_str(comment);
            out.push('\n');
        }
        let mut extras = sentence.extra_lines.iter().peekable();
        for (i, t) in sentence.tokens.iter().enumerate() {
            while let Some(extra) = extras.next_if(|e| e.after <= i) {
                out.push_str(&extra.line);
                out.push('\n');
            }
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.id,
                field(&t.form),
                field(&t.lemma),
                field(&t.upos),
                field(&t.xpos),
                field(&t.feats),
                t.head,
                field(&t.deprel),
                field(&t.deps),
                field(&t.misc),
            );
        }
        for extra in extras {
            out.push_str(&extra.line);
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreebankStats {
    pub sentence_count: usize,
    pub token_count: usize,
    /// Tokens per sentence.
    pub avg_sentence_length: f64,
    /// Percentage of all arcs (root arcs included) that are non-projective.
    pub nonprojective_arc_pct: f64,
    /// Unicode scalar values per token.
    pub avg_word_length: f64,
}

pub fn treebank_stats(sentences: &[Sentence]) -> Result<TreebankStats> {
    if sentences.is_empty() {
        return Err(Error::invalid("statistics need at least one sentence"));
    }
    let mut tokens = 0usize;
    let mut chars = 0usize;
    let mut nonprojective = 0usize;
    for sentence in sentences {
        tokens += sentence.len();
        chars += sentence.tokens.iter().map(|t| t.form.chars().count()).sum::<usize>();
        nonprojective += nonprojective_arc_count(&sentence.tree()?);
    }
    Ok(TreebankStats {
        sentence_count: sentences.len(),
        token_count: tokens,
        avg_sentence_length: tokens as f64 / sentences.len() as f64,
        nonprojective_arc_pct: 100.0 * nonprojective as f64 / tokens as f64,
        avg_word_length: chars as f64 / tokens as f64,
    })
}
