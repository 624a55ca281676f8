use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::{feature_id, labeled_feature_id, FeatureContext};
use super::model::{best_token_label, check_bits, seqlab_entry, ArcScorer, LinearModel, Paradigm};
use super::perceptron::AveragedPerceptron;
use crate::conllu::Sentence;
use crate::error::{Error, Result};
use crate::eval::{score, PunctPolicy};
use crate::graph::{assign_labels, cle_decode, ArcScores, LabelScores};
use crate::seqlab::encode;
use crate::transition::{best_valid_head, oracle_head, L2RState};
use crate::tree::DepTree;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Epochs without held-out LAS improvement before stopping.
    pub patience: usize,
    pub shuffle_seed: u64,
    pub feature_space_bits: u8,
    /// Decode with exactly one root child, both during training and for
    /// held-out evaluation.
    pub single_root: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_epochs: 20,
            patience: 10,
            shuffle_seed: 1,
            feature_space_bits: 22,
            single_root: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_epochs == 0 {
            return Err(Error::invalid("max_epochs must be at least 1"));
        }
        if self.patience == 0 {
            return Err(Error::invalid("patience must be at least 1"));
        }
        check_bits(self.feature_space_bits)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub dev_uas: f64,
    pub dev_las: f64,
    pub train_errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub epochs: Vec<EpochStats>,
    /// 1-based epoch whose averaged weights were kept.
    pub best_epoch: usize,
    pub best_dev_las: f64,
}

pub fn train(
    train_set: &[Sentence],
    dev_set: &[Sentence],
    paradigm: Paradigm,
    config: &TrainConfig,
) -> Result<(LinearModel, TrainSummary)> {
    train_with_probe(train_set, dev_set, paradigm, config, &mut || {})
}

/// Like [`train`], calling `probe` after every training sentence.
pub fn train_with_probe(
    train_set: &[Sentence],
    dev_set: &[Sentence],
    paradigm: Paradigm,
    config: &TrainConfig,
    probe: &mut dyn FnMut(),
) -> Result<(LinearModel, TrainSummary)> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::invalid("training corpus is empty"));
    }
    if dev_set.is_empty() {
        return Err(Error::invalid("held-out corpus is empty"));
    }

    let instances: Vec<Instance> = train_set
        .iter()
        .map(|s| {
            Ok(Instance {
                ctx: FeatureContext::new(s),
                gold: s.tree()?,
            })
        })
        .collect::<Result<_>>()?;

    let labels = label_set(paradigm, &instances);
    if labels.is_empty() {
        return Err(Error::invalid("label vocabulary is empty"));
    }
    let mut trainer = Trainer::new(paradigm, config, labels);

    let mut rng = ChaCha8Rng::seed_from_u64(config.shuffle_seed);
    let mut order: Vec<usize> = (0..instances.len()).collect();
    let mut epochs = Vec::new();
    let mut best: Option<(usize, f64, LinearModel)> = None;

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut rng);
        let mut errors = 0;
        for &i in &order {
            errors += trainer.learn(&instances[i]);
            probe();
        }

        let model = trainer.snapshot()?;
        let predicted = model.parse_corpus(dev_set, config.single_root)?;
        let result = score(dev_set, &predicted, PunctPolicy::Include)?;
        epochs.push(EpochStats {
            epoch,
            dev_uas: result.uas,
            dev_las: result.las,
            train_errors: errors,
        });

        if best.as_ref().is_none_or(|(_, las, _)| result.las > *las) {
            best = Some((epoch, result.las, model));
        }
        let best_epoch = best.as_ref().unwrap().0;
        if epoch - best_epoch >= config.patience {
            break;
        }
    }

    let (best_epoch, best_dev_las, model) = best.unwrap();
    Ok((
        model,
        TrainSummary {
            epochs,
            best_epoch,
            best_dev_las,
        },
    ))
}

struct Instance {
    ctx: FeatureContext,
    gold: DepTree,
}

fn label_set(paradigm: Paradigm, instances: &[Instance]) -> Vec<String> {
    let set: BTreeSet<String> = match paradigm {
        Paradigm::Graph | Paradigm::Transition => instances
            .iter()
            .flat_map(|i| i.gold.deprels().iter().cloned())
            .collect(),
        Paradigm::Seqlab => instances
            .iter()
            .flat_map(|i| encode(&i.gold).into_iter().map(|l| seqlab_entry(&l)))
            .collect(),
    };
    set.into_iter().collect()
}

struct Trainer {
    paradigm: Paradigm,
    bits: u8,
    single_root: bool,
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    perceptron: AveragedPerceptron,
    raw: Vec<u64>,
    ids: Vec<u32>,
}

impl Trainer {
    fn new(paradigm: Paradigm, config: &TrainConfig, labels: Vec<String>) -> Self {
        let label_index = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Trainer {
            paradigm,
            bits: config.feature_space_bits,
            single_root: config.single_root,
            labels,
            label_index,
            perceptron: AveragedPerceptron::new(config.feature_space_bits),
            raw: Vec::new(),
            ids: Vec::new(),
        }
    }

    fn snapshot(&self) -> Result<LinearModel> {
        LinearModel::new(
            self.paradigm,
            self.bits,
            self.labels.clone(),
            self.perceptron.averaged(),
        )
    }

    /// One training sentence; returns the number of wrong decisions.
    fn learn(&mut self, inst: &Instance) -> usize {
        match self.paradigm {
            Paradigm::Graph => self.learn_graph(inst),
            Paradigm::Transition => self.learn_transition(inst),
            Paradigm::Seqlab => self.learn_seqlab(inst),
        }
    }

    fn arc_ids(&mut self, ctx: &FeatureContext, head: usize, dep: usize) {
        self.raw.clear();
        ctx.arc_raw(head, dep, &mut self.raw);
        self.ids.clear();
        let bits = self.bits;
        self.ids.extend(self.raw.iter().map(|&r| feature_id(r, bits)));
    }

    fn update_arc(&mut self, ctx: &FeatureContext, head: usize, dep: usize, delta: f64) {
        self.arc_ids(ctx, head, dep);
        self.perceptron.update(&self.ids, delta);
    }

    fn update_label(&mut self, ctx: &FeatureContext, head: usize, dep: usize, label: usize, delta: f64) {
        self.raw.clear();
        ctx.label_raw(head, dep, &mut self.raw);
        self.ids.clear();
        let bits = self.bits;
        self.ids
            .extend(self.raw.iter().map(|&r| labeled_feature_id(r, label, bits)));
        self.perceptron.update(&self.ids, delta);
    }

    /// Label update on every gold arc.
    fn learn_labels(&mut self, inst: &Instance) -> usize {
        let predicted = {
            let view = ArcLabelView {
                weights: self.perceptron.weights(),
                bits: self.bits,
                ctx: &inst.ctx,
                count: self.labels.len(),
            };
            assign_labels(inst.gold.heads(), &view).expect("non-empty label set")
        };
        let mut errors = 0;
        for dep in 1..=inst.gold.len() {
            let head = inst.gold.head(dep);
            let gold = self.label_index[inst.gold.deprel(dep)];
            let pred = predicted[dep - 1];
            if pred != gold {
                self.update_label(&inst.ctx, head, dep, gold, 1.0);
                self.update_label(&inst.ctx, head, dep, pred, -1.0);
                errors += 1;
            }
        }
        errors
    }

    fn learn_graph(&mut self, inst: &Instance) -> usize {
        let predicted = {
            let scorer = ArcScorer::new(self.perceptron.weights(), self.bits, &inst.ctx, 0);
            cle_decode(&scorer, self.single_root).expect("non-empty sentence")
        };
        let mut errors = 0;
        for dep in 1..=inst.gold.len() {
            let gold = inst.gold.head(dep);
            let pred = predicted[dep - 1];
            if gold != pred {
                self.update_arc(&inst.ctx, gold, dep, 1.0);
                self.update_arc(&inst.ctx, pred, dep, -1.0);
                errors += 1;
            }
        }
        errors += self.learn_labels(inst);
        self.perceptron.tick();
        errors
    }

    fn learn_transition(&mut self, inst: &Instance) -> usize {
        let n = inst.gold.len();
        let mut state = L2RState::new(n).expect("non-empty sentence");
        let mut errors = 0;
        while !state.is_terminal() {
            let dep = state.focus();
            let oracle = oracle_head(&state, &inst.gold);
            let predicted = {
                let view = FocusScores {
                    trainer: self,
                    ctx: &inst.ctx,
                    dep,
                };
                best_valid_head(&state, &view)
            };
            if predicted != oracle {
                self.update_arc(&inst.ctx, oracle, dep, 1.0);
                self.update_arc(&inst.ctx, predicted, dep, -1.0);
                errors += 1;
            }
            self.perceptron.tick();
            state.step(oracle).expect("oracle head is valid");
        }
        errors + self.learn_labels(inst)
    }

    fn learn_seqlab(&mut self, inst: &Instance) -> usize {
        let gold_labels: Vec<usize> = encode(&inst.gold)
            .iter()
            .map(|l| self.label_index[&seqlab_entry(l)])
            .collect();
        let mut errors = 0;
        let raws: Vec<Vec<u64>> = (1..=inst.gold.len())
            .map(|i| {
                let mut r = Vec::new();
                inst.ctx.token_raw(i, &mut r);
                r
            })
            .collect();
        let bits = self.bits;
        for (raw, &gold) in raws.iter().zip(&gold_labels) {
            let predicted = best_token_label(self.perceptron.weights(), bits, raw, self.labels.len());
            if predicted != gold {
                let up: Vec<u32> = raw.iter().map(|&r| labeled_feature_id(r, gold, bits)).collect();
                let down: Vec<u32> = raw.iter().map(|&r| labeled_feature_id(r, predicted, bits)).collect();
                self.perceptron.update(&up, 1.0);
                self.perceptron.update(&down, -1.0);
                errors += 1;
            }
            self.perceptron.tick();
        }
        errors
    }
}

/// Current arc scores into one focus word, computed fresh from the weights.
struct FocusScores<'a> {
    trainer: &'a Trainer,
    ctx: &'a FeatureContext,
    dep: usize,
}

impl ArcScores for FocusScores<'_> {
    fn len(&self) -> usize {
        self.ctx.len()
    }

    fn arc_score(&self, head: usize, dep: usize) -> f64 {
        debug_assert_eq!(dep, self.dep);
        let mut raw = Vec::with_capacity(40);
        self.ctx.arc_raw(head, dep, &mut raw);
        let w = self.trainer.perceptron.weights();
        raw.iter().map(|&r| w[feature_id(r, self.trainer.bits) as usize]).sum()
    }
}

struct ArcLabelView<'a> {
    weights: &'a [f64],
    bits: u8,
    ctx: &'a FeatureContext,
    count: usize,
}

impl LabelScores for ArcLabelView<'_> {
    fn label_count(&self) -> usize {
        self.count
    }

    fn label_score(&self, head: usize, dep: usize, label: usize) -> f64 {
        let mut raw = Vec::with_capacity(12);
        self.ctx.label_raw(head, dep, &mut raw);
        raw.iter()
            .map(|&r| self.weights[labeled_feature_id(r, label, self.bits) as usize])
            .sum()
    }
}
