use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    ClickInput,
    WheelMouseInput,
    KeyboardInput,
}

impl ActionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::ClickInput => "click_input",
            ActionKind::WheelMouseInput => "wheel_mouse_input",
            ActionKind::KeyboardInput => "keyboard_input",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A change to the simulated environment caused by an action.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Effect {
    CreateFile(String),
    ShowText(String),
    ShowControl(String),
    SetClipboard(String),
    OpenWindow(String),
}

/// One agent action. Field names follow the released trajectory format;
/// `effects` is simulation-only and omitted when empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub function: ActionKind,
    #[serde(default)]
    pub args: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<[i64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thought: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control_text: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub effects: Vec<Effect>,
}

const BUTTONS: [&str; 4] = ["left", "right", "middle", "x"];

impl Action {
    fn bare(function: ActionKind, args: Map<String, Value>) -> Self {
        Self {
            function,
            args,
            rect: None,
            description: None,
            thought: None,
            control_text: None,
            effects: Vec::new(),
        }
    }

    /// Single left click on a control.
    pub fn click(control_text: impl Into<String>) -> Self {
        Self::click_with("left", false).on(control_text)
    }

    pub fn click_with(button: &str, double: bool) -> Self {
        let mut args = Map::new();
        args.insert("button".into(), Value::from(button));
        args.insert("double".into(), Value::from(double));
        Self::bare(ActionKind::ClickInput, args)
    }

    pub fn type_text(text: impl Into<String>) -> Self {
        let mut args = Map::new();
        args.insert("text".into(), Value::from(text.into()));
        Self::bare(ActionKind::KeyboardInput, args)
    }

    pub fn scroll(dy: i64) -> Self {
        let mut args = Map::new();
        args.insert("dx".into(), Value::from(0));
        args.insert("dy".into(), Value::from(dy));
        Self::bare(ActionKind::WheelMouseInput, args)
    }

    pub fn on(mut self, control_text: impl Into<String>) -> Self {
        self.control_text = Some(control_text.into());
        self
    }

    pub fn with_effect(mut self, effect: Effect) -> Self {
        self.effects.push(effect);
        self
    }

    pub fn described(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn button(&self) -> Option<&str> {
        self.args.get("button").and_then(Value::as_str)
    }

    pub fn is_double(&self) -> bool {
        self.args
            .get("double")
            .and_then(Value::as_bool)
            .unwrap_or(false)
    }

    /// Typed text of a keyboard action.
    pub fn text(&self) -> Option<&str> {
        match self.function {
            ActionKind::KeyboardInput => self.args.get("text").and_then(Value::as_str),
            _ => None,
        }
    }

    /// Kind-specific required arguments are present and well-typed.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::MalformedAction(msg));
        match self.function {
            ActionKind::ClickInput => {
                match self.button() {
                    Some(b) if BUTTONS.contains(&b) => {}
                    Some(b) => return fail(format!("click_input: unknown button `{b}`")),
                    None => return fail("click_input requires `button`".into()),
                }
                if !self.args.get("double").is_some_and(Value::is_boolean) {
                    return fail("click_input requires boolean `double`".into());
                }
            }
            ActionKind::KeyboardInput => {
                if self.text().is_none() {
                    return fail("keyboard_input requires string `text`".into());
                }
            }
            ActionKind::WheelMouseInput => {
                for key in ["dx", "dy"] {
                    if self.args.get(key).is_some_and(|v| !v.is_i64()) {
                        return fail(format!("wheel_mouse_input `{key}` must be an integer"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical token used for sequence matching: kind, principal argument, control text.
    pub fn token(&self) -> String {
        let principal = match self.function {
            ActionKind::ClickInput => format!(
                "{}{}",
                self.button().unwrap_or(""),
                if self.is_double() { "x2" } else { "" }
            ),
            ActionKind::KeyboardInput => self.text().unwrap_or("").to_string(),
            ActionKind::WheelMouseInput => {
                let dy = self.args.get("dy").and_then(Value::as_i64).unwrap_or(0);
                let dx = self.args.get("dx").and_then(Value::as_i64).unwrap_or(0);
                format!("{dx},{dy}")
            }
        };
        format!(
            "{}|{}|{}",
            self.function,
            principal,
            self.control_text.as_deref().unwrap_or("")
        )
    }
}
