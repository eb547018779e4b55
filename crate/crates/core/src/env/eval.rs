use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use super::checks::{self, CheckApi};
use super::log::EventLog;
use crate::error::{Error, Result};
use crate::template::{self, Parameters};

pub const SUCCESS_MESSAGE: &str = "Subtask completed successfully";

/// One step of an evaluation function: an API call, its literal arguments,
/// and the message reported when it fails. `negate` inverts the check
/// (e.g. "the old file must no longer exist").
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub api: String,
    #[serde(default)]
    pub args: Map<String, Value>,
    pub message: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct ResolvedCheck {
    api: CheckApi,
    text: String,
    count: u64,
    negate: bool,
}

impl ResolvedCheck {
    fn holds(&self, log: &EventLog) -> bool {
        let t = self.text.as_str();
        let raw = match self.api {
            CheckApi::MouseClicks => checks::check_mouse_clicks(log, t),
            CheckApi::KeyboardTypes => checks::check_keyboard_types(log, t),
            CheckApi::FileExists => checks::check_file_exists(log, t),
            CheckApi::TextExistsViaOcr => checks::check_text_exists_via_ocr(log, t),
            CheckApi::TextExistsViaControl => checks::check_text_exists_via_control(log, t),
            CheckApi::TextExists => checks::check_text_exists(log, t),
            CheckApi::ClipboardContains => checks::check_clipboard_contains(log, t),
            CheckApi::WindowTitleContains => checks::check_window_title_contains(log, t),
            CheckApi::ControlTreeContains => checks::check_control_tree_contains(log, t),
            CheckApi::ClickCountAtLeast => checks::check_click_count_at_least(log, t, self.count),
            CheckApi::ScrollOccurred => checks::check_scroll_occurred(log),
        };
        raw != self.negate
    }
}

impl Check {
    /// A check with the standard failure message for its API.
    pub fn new(api: CheckApi, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut args = Map::new();
        if let Some(name) = api.text_arg() {
            args.insert(name.into(), Value::from(text.clone()));
        }
        Self {
            api: api.name().to_string(),
            args,
            message: default_message(api, &text, 1, false),
            negate: false,
        }
    }

    pub fn mouse_clicks(text: impl Into<String>) -> Self {
        Self::new(CheckApi::MouseClicks, text)
    }

    pub fn keyboard_types(text: impl Into<String>) -> Self {
        Self::new(CheckApi::KeyboardTypes, text)
    }

    pub fn file_exists(path: impl Into<String>) -> Self {
        Self::new(CheckApi::FileExists, path)
    }

    pub fn text_via_control(text: impl Into<String>) -> Self {
        Self::new(CheckApi::TextExistsViaControl, text)
    }

    pub fn click_count_at_least(text: impl Into<String>, count: u64) -> Self {
        let text = text.into();
        let mut check = Self::new(CheckApi::ClickCountAtLeast, text.clone());
        check.args.insert("count".into(), Value::from(count));
        check.message = default_message(CheckApi::ClickCountAtLeast, &text, count, false);
        check
    }

    pub fn negated(mut self) -> Self {
        self.negate = !self.negate;
        if let Ok(api) = self.api.parse::<CheckApi>() {
            let text = self.text().unwrap_or_default().to_string();
            let count = self.args.get("count").and_then(Value::as_u64).unwrap_or(1);
            self.message = default_message(api, &text, count, self.negate);
        }
        self
    }

    pub fn with_message(mut self, message: impl Into<String>) -> Self {
        self.message = message.into();
        self
    }

    /// The primary string argument, if present.
    pub fn text(&self) -> Option<&str> {
        self.args
            .get("text")
            .or_else(|| self.args.get("file_path"))
            .and_then(Value::as_str)
    }

    fn resolve(&self) -> Result<ResolvedCheck> {
        let api: CheckApi = self.api.parse()?;
        let malformed = |reason: String| Error::MalformedCheck {
            api: self.api.clone(),
            reason,
        };
        let mut allowed = vec![];
        let text = match api.text_arg() {
            Some(name) => {
                allowed.push(name);
                self.args
                    .get(name)
                    .and_then(Value::as_str)
                    .ok_or_else(|| malformed(format!("missing string argument `{name}`")))?
                    .to_string()
            }
            None => String::new(),
        };
        let mut count = 1;
        if api == CheckApi::ClickCountAtLeast {
            allowed.push("count");
            count = self
                .args
                .get("count")
                .and_then(Value::as_u64)
                .filter(|&c| c >= 1)
                .ok_or_else(|| malformed("`count` must be a positive integer".into()))?;
        }
        if let Some(extra) = self.args.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(malformed(format!("unexpected argument `{extra}`")));
        }
        Ok(ResolvedCheck {
            api,
            text,
            count,
            negate: self.negate,
        })
    }
}

fn default_message(api: CheckApi, text: &str, count: u64, negate: bool) -> String {
    let reason = match (api, negate) {
        (CheckApi::MouseClicks, false) => format!("agent did not click '{text}'"),
        (CheckApi::KeyboardTypes, false) => format!("the text '{text}' was not typed"),
        (CheckApi::FileExists, false) => format!("the file '{text}' does not exist"),
        (CheckApi::FileExists, true) => format!("the file '{text}' still exists"),
        (
            CheckApi::TextExistsViaOcr | CheckApi::TextExistsViaControl | CheckApi::TextExists,
            false,
        ) => {
            format!("the text '{text}' is not on screen")
        }
        (CheckApi::ClipboardContains, false) => format!("the clipboard never held '{text}'"),
        (CheckApi::WindowTitleContains, false) => format!("no window titled '{text}' was opened"),
        (CheckApi::ControlTreeContains, false) => {
            format!("no control containing '{text}' was found")
        }
        (CheckApi::ClickCountAtLeast, false) => {
            format!("'{text}' was clicked fewer than {count} times")
        }
        (CheckApi::ScrollOccurred, false) => "the agent never scrolled".to_string(),
        (api, true) => format!("{api} unexpectedly held for '{text}'"),
    };
    format!("Subtask execution failed because {reason}.")
}

/// An ordered list of checks. Serializes as a bare JSON array.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvalFunction {
    pub checks: Vec<Check>,
}

impl EvalFunction {
    pub fn new(checks: Vec<Check>) -> Self {
        Self { checks }
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    fn resolve(&self) -> Result<Vec<ResolvedCheck>> {
        if self.checks.is_empty() {
            return Err(Error::MalformedCheck {
                api: String::new(),
                reason: "evaluation function has no checks".into(),
            });
        }
        self.checks.iter().map(Check::resolve).collect()
    }

    /// Well-formedness: at least one check, registered APIs, correct arguments.
    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    /// Substitutes `{placeholder}`s in string arguments and messages.
    pub fn instantiate(&self, params: &Parameters) -> Result<Self> {
        let fill = |s: &str| {
            template::instantiate(s, params).map_err(|placeholder| Error::MissingParameter {
                node: "evaluation function".into(),
                placeholder,
            })
        };
        let mut out = self.clone();
        for check in &mut out.checks {
            for value in check.args.values_mut() {
                if let Value::String(s) = value {
                    *s = fill(s)?;
                }
            }
            check.message = fill(&check.message)?;
        }
        Ok(out)
    }
}

/// Checks passed over checks total. Kept unreduced: `2/4`, not `1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Progress {
    pub passed: usize,
    pub total: usize,
}

impl Progress {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.passed as u64, self.total.max(1) as u64)
    }

    pub fn as_f64(&self) -> f64 {
        self.passed as f64 / self.total.max(1) as f64
    }
}

impl fmt::Display for Progress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.passed, self.total)
    }
}

impl FromStr for Progress {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (p, t) = s
            .split_once('/')
            .ok_or_else(|| format!("`{s}` is not p/t"))?;
        let passed = p
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let total: usize = t
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        if total == 0 || passed > total {
            return Err(format!("`{s}` is not a fraction in [0, 1]"));
        }
        Ok(Self { passed, total })
    }
}

impl Serialize for Progress {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Progress {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResult {
    pub success: bool,
    pub message: String,
    pub progress: Progress,
}

/// Runs checks in order; the first failure at index `i` scores `i/len`.
pub fn run_eval_function(function: &EvalFunction, log: &EventLog) -> Result<EvalResult> {
    let resolved = function.resolve()?;
    let total = resolved.len();
    for (i, check) in resolved.iter().enumerate() {
        if !check.holds(log) {
            return Ok(EvalResult {
                success: false,
                message: function.checks[i].message.clone(),
                progress: Progress { passed: i, total },
            });
        }
    }
    Ok(EvalResult {
        success: true,
        message: SUCCESS_MESSAGE.to_string(),
        progress: Progress {
            passed: total,
            total,
        },
    })
}
