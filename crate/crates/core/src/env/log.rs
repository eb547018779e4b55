use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::action::{Action, ActionKind, Effect};
use crate::error::Result;

/// Observable environment state queried by the check APIs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvFacts {
    #[serde(default)]
    pub files: BTreeSet<String>,
    #[serde(default)]
    pub screen_text: BTreeSet<String>,
    #[serde(default)]
    pub control_text: BTreeSet<String>,
    #[serde(default)]
    pub clipboard: String,
    /// Every value the clipboard has held, oldest first.
    #[serde(default)]
    pub clipboard_history: Vec<String>,
    #[serde(default)]
    pub window_titles: BTreeSet<String>,
}

impl EnvFacts {
    pub fn with_file(mut self, path: impl Into<String>) -> Self {
        self.files.insert(path.into());
        self
    }

    pub fn with_screen_text(mut self, text: impl Into<String>) -> Self {
        self.screen_text.insert(text.into());
        self
    }

    pub fn with_control_text(mut self, text: impl Into<String>) -> Self {
        self.control_text.insert(text.into());
        self
    }

    fn apply(&mut self, effect: &Effect) {
        match effect {
            Effect::CreateFile(p) => {
                self.files.insert(p.clone());
            }
            Effect::ShowText(t) => {
                self.screen_text.insert(t.clone());
            }
            Effect::ShowControl(t) => {
                self.control_text.insert(t.clone());
            }
            Effect::SetClipboard(t) => {
                self.clipboard = t.clone();
                self.clipboard_history.push(t.clone());
            }
            Effect::OpenWindow(t) => {
                self.window_titles.insert(t.clone());
            }
        }
    }
}

/// Append-only record of a run: actions in order plus the facts they produced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventLog {
    actions: Vec<Action>,
    facts: EnvFacts,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// A log starting from fixture state.
    pub fn with_facts(facts: EnvFacts) -> Self {
        Self {
            actions: Vec::new(),
            facts,
        }
    }

    pub fn from_actions(actions: impl IntoIterator<Item = Action>) -> Result<Self> {
        let mut log = Self::new();
        for action in actions {
            log.append(action)?;
        }
        Ok(log)
    }

    /// Records an action and applies its effects.
    pub fn append(&mut self, action: Action) -> Result<()> {
        action.validate()?;
        for effect in &action.effects {
            self.facts.apply(effect);
        }
        self.actions.push(action);
        Ok(())
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn facts(&self) -> &EnvFacts {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub(crate) fn clicks(&self) -> impl Iterator<Item = &Action> {
        self.actions
            .iter()
            .filter(|a| a.function == ActionKind::ClickInput)
    }

    /// All keyboard input concatenated, or `None` if nothing was typed.
    pub fn typed_stream(&self) -> Option<String> {
        let mut typed = self.actions.iter().filter_map(Action::text).peekable();
        typed.peek()?;
        Some(typed.collect())
    }
}
