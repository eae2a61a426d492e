use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{GoalError, TaskAction};
use crate::scene::Category;

const SHIPPED_LEXICON: &str = include_str!("../../data/lexicon.json");

/// Verb, intent and alias tables driving the baseline predictor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictorLexicon {
    pub version: u32,
    pub verbs: BTreeMap<TaskAction, Vec<String>>,
    /// Multi-word phrases (space separated tokens) signalling an intent.
    pub intents: BTreeMap<TaskAction, Vec<String>>,
    pub stopwords: BTreeSet<String>,
    /// Tokens that introduce an instrument or destination.
    pub object_markers: BTreeSet<String>,
    /// Extra surface forms (plurals, synonyms, multi-word names).
    pub aliases: BTreeMap<String, Category>,
}

/// A category named in an instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mention {
    pub category: Category,
    /// Token index of the first word of the mention.
    pub position: usize,
    /// Preceded (within two tokens) by an object marker such as "with" or "in".
    pub after_marker: bool,
}

impl PredictorLexicon {
    pub fn kitchen() -> Self {
        Self::from_json(SHIPPED_LEXICON).expect("shipped lexicon is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, GoalError> {
        let lex: PredictorLexicon =
            serde_json::from_str(text).map_err(|e| GoalError::Format(e.to_string()))?;
        for a in TaskAction::ALL {
            if lex.verbs.get(&a).is_none_or(|v| v.is_empty()) {
                return Err(GoalError::Format(format!("no verb entry for {a}")));
            }
        }
        Ok(lex)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lexicon serializes")
    }

    pub fn is_stopword(&self, token: &str) -> bool {
        self.stopwords.contains(token)
    }

    /// Action of the first lexicon verb in `tokens`.
    pub fn verb_action<S: AsRef<str>>(&self, tokens: &[S]) -> Option<TaskAction> {
        tokens.iter().find_map(|t| {
            self.verbs
                .iter()
                .find(|(_, vs)| vs.iter().any(|v| v == t.as_ref()))
                .map(|(a, _)| *a)
        })
    }

    /// Action of the earliest intent phrase in `tokens`.
    pub fn intent_action<S: AsRef<str>>(&self, tokens: &[S]) -> Option<TaskAction> {
        let mut best: Option<(usize, TaskAction)> = None;
        for (action, phrases) in &self.intents {
            for p in phrases {
                let words: Vec<&str> = p.split_whitespace().collect();
                if let Some(pos) = find_phrase(tokens, &words) {
                    if best.is_none_or(|(b, _)| pos < b) {
                        best = Some((pos, *action));
                    }
                }
            }
        }
        best.map(|(_, a)| a)
    }

    /// Categories named in `tokens`, in text order, at most once each.
    ///
    /// Exact names, plurals and aliases are tried first; only when none
    /// match are tokens scanned for a category name as a substring.
    pub fn mentions<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<Mention> {
        let toks: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        let mut found: Vec<Mention> = Vec::new();
        let push = |found: &mut Vec<Mention>, category: Category, position: usize| {
            if found.iter().all(|m| m.category != category) {
                found.push(Mention {
                    category,
                    position,
                    after_marker: self.after_marker(&toks, position),
                });
            }
        };
        let mut i = 0;
        while i < toks.len() {
            if let Some((len, c)) = self.match_at(&toks, i) {
                push(&mut found, c, i);
                i += len;
            } else {
                i += 1;
            }
        }
        if found.is_empty() {
            for (i, t) in toks.iter().enumerate() {
                let longest = Category::ALL
                    .iter()
                    .filter(|c| t.contains(c.as_str()))
                    .max_by_key(|c| c.as_str().len());
                if let Some(c) = longest {
                    push(&mut found, *c, i);
                }
            }
        }
        found.sort_by_key(|m| m.position);
        found
    }

    fn match_at(&self, toks: &[&str], i: usize) -> Option<(usize, Category)> {
        if i + 1 < toks.len() {
            let pair = format!("{} {}", toks[i], toks[i + 1]);
            if let Some(c) = self.aliases.get(&pair) {
                return Some((2, *c));
            }
        }
        let t = toks[i];
        if let Some(c) = self.aliases.get(t) {
            return Some((1, *c));
        }
        Category::ALL
            .iter()
            .find(|c| {
                let name = c.as_str();
                t == name || t.strip_suffix('s') == Some(name) || t.strip_suffix("es") == Some(name)
            })
            .map(|c| (1, *c))
    }

    fn after_marker(&self, toks: &[&str], position: usize) -> bool {
        toks[position.saturating_sub(2)..position]
            .iter()
            .any(|t| self.object_markers.contains(*t))
    }
}

fn find_phrase<S: AsRef<str>>(tokens: &[S], words: &[&str]) -> Option<usize> {
    if words.is_empty() || words.len() > tokens.len() {
        return None;
    }
    (0..=tokens.len() - words.len())
        .find(|&i| words.iter().enumerate().all(|(j, w)| tokens[i + j].as_ref() == *w))
}
