//! Tokenization, bag-of-words embeddings, the STS similarity objective and
//! the dataset generators.

mod goalgen;
pub mod jsonl;
mod sts;
mod templates;

use std::collections::BTreeMap;

use thiserror::Error;

pub(crate) use goalgen::choose_request;
pub use goalgen::{
    generate_goal_dataset, generate_goal_dataset_with, scene_pool, without_categories, GoalRecord,
    IncompleteMode, PoolScene, Style, TemplateSplit, IMPERFECT_VISION_RATE,
};
pub use sts::{check_sts_pair, generate_sts_dataset, rule_score, StsPair};
pub use templates::{kind_key, render, surface, TemplateSet, Templates};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TextError {
    #[error("embedding dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("empty batch")]
    EmptyBatch,
    #[error("gold score {0} is not one of 5.0, 3.3, 1.7")]
    InvalidScore(f64),
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("no scene in the pool can host a task")]
    EmptySceneSource,
    #[error("{0}")]
    Format(String),
}

/// Lowercase, drop everything except letters, digits and whitespace, split
/// on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// Sorted token index built from a training corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    index: BTreeMap<String, usize>,
}

impl Vocabulary {
    pub fn build<I, S>(tokens: I) -> Result<Self, TextError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut words: Vec<String> = tokens.into_iter().map(|t| t.as_ref().to_string()).collect();
        words.sort();
        words.dedup();
        if words.is_empty() {
            return Err(TextError::EmptyVocabulary);
        }
        Ok(Vocabulary {
            index: words.into_iter().enumerate().map(|(i, w)| (w, i)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }
}

/// Dense sentence vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(pub Vec<f64>);

impl Embedding {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Term-count vector; out-of-vocabulary tokens are dropped.
pub fn embed<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Embedding {
    let mut v = vec![0.0; vocab.len()];
    for t in tokens {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            v[i] += 1.0;
        }
    }
    Embedding(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StsConfig {
    epsilon: f64,
}

impl StsConfig {
    pub fn new(epsilon: f64) -> Result<Self, TextError> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(StsConfig { epsilon })
        } else {
            Err(TextError::InvalidEpsilon(epsilon))
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for StsConfig {
    fn default() -> Self {
        StsConfig { epsilon: 1e-8 }
    }
}

/// `u.v / max(|u| |v|, eps)`.
pub fn cosine_similarity(u: &Embedding, v: &Embedding, cfg: &StsConfig) -> Result<f64, TextError> {
    if u.dim() != v.dim() {
        return Err(TextError::DimensionMismatch(u.dim(), v.dim()));
    }
    let dot: f64 = u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum();
    Ok(dot / (u.norm() * v.norm()).max(cfg.epsilon))
}

/// The three STS gold scores.
pub const STS_SCORES: [f64; 3] = [5.0, 3.3, 1.7];

/// Mean squared error between cosine similarity and `gold / 5`.
pub fn sts_loss(pairs: &[(Embedding, Embedding, f64)], cfg: &StsConfig) -> Result<f64, TextError> {
    if pairs.is_empty() {
        return Err(TextError::EmptyBatch);
    }
    let mut total = 0.0;
    for (u, v, gold) in pairs {
        if !STS_SCORES.contains(gold) {
            return Err(TextError::InvalidScore(*gold));
        }
        let d = cosine_similarity(u, v, cfg)? - gold / 5.0;
        total += d * d;
    }
    Ok(total / pairs.len() as f64)
}
