//! The check APIs that evaluation functions are composed from.
//!
//! The first six are the documented system-level APIs. The remaining five
//! (clipboard, window title, control tree, click count, scroll) are
//! additions of this toolkit that fill out the eleven-API surface.
//!
//! Every check is false on an empty log with empty facts.

use std::fmt;
use std::str::FromStr;

use super::action::ActionKind;
use super::log::EventLog;
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CheckApi {
    MouseClicks,
    KeyboardTypes,
    FileExists,
    TextExistsViaOcr,
    TextExistsViaControl,
    TextExists,
    ClipboardContains,
    WindowTitleContains,
    ControlTreeContains,
    ClickCountAtLeast,
    ScrollOccurred,
}

impl CheckApi {
    pub const ALL: [CheckApi; 11] = [
        CheckApi::MouseClicks,
        CheckApi::KeyboardTypes,
        CheckApi::FileExists,
        CheckApi::TextExistsViaOcr,
        CheckApi::TextExistsViaControl,
        CheckApi::TextExists,
        CheckApi::ClipboardContains,
        CheckApi::WindowTitleContains,
        CheckApi::ControlTreeContains,
        CheckApi::ClickCountAtLeast,
        CheckApi::ScrollOccurred,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckApi::MouseClicks => "check_mouse_clicks",
            CheckApi::KeyboardTypes => "check_keyboard_types",
            CheckApi::FileExists => "check_file_exists",
            CheckApi::TextExistsViaOcr => "check_text_exists_via_ocr",
            CheckApi::TextExistsViaControl => "check_text_exists_via_control",
            CheckApi::TextExists => "check_text_exists",
            CheckApi::ClipboardContains => "check_clipboard_contains",
            CheckApi::WindowTitleContains => "check_window_title_contains",
            CheckApi::ControlTreeContains => "check_control_tree_contains",
            CheckApi::ClickCountAtLeast => "check_click_count_at_least",
            CheckApi::ScrollOccurred => "check_scroll_occurred",
        }
    }

    /// Whether the API is one of the six documented ones.
    pub fn is_documented(self) -> bool {
        (self as usize) < 6
    }

    /// Name of the string argument, if any.
    pub fn text_arg(self) -> Option<&'static str> {
        match self {
            CheckApi::FileExists => Some("file_path"),
            CheckApi::ScrollOccurred => None,
            _ => Some("text"),
        }
    }
}

impl fmt::Display for CheckApi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckApi {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        CheckApi::ALL
            .into_iter()
            .find(|api| api.name() == s)
            .ok_or_else(|| Error::UnknownApi(s.to_string()))
    }
}

/// Some click landed on a control whose text equals `text` exactly.
pub fn check_mouse_clicks(log: &EventLog, text: &str) -> bool {
    log.clicks()
        .any(|a| a.control_text.as_deref() == Some(text))
}

/// `text` is a contiguous substring of everything typed so far.
pub fn check_keyboard_types(log: &EventLog, text: &str) -> bool {
    log.typed_stream().is_some_and(|typed| typed.contains(text))
}

pub fn check_file_exists(log: &EventLog, file_path: &str) -> bool {
    log.facts().files.contains(file_path)
}

/// Simulated OCR: membership in the screen-text fact set.
pub fn check_text_exists_via_ocr(log: &EventLog, text: &str) -> bool {
    log.facts().screen_text.contains(text)
}

pub fn check_text_exists_via_control(log: &EventLog, text: &str) -> bool {
    log.facts().control_text.contains(text)
}

pub fn check_text_exists(log: &EventLog, text: &str) -> bool {
    check_text_exists_via_ocr(log, text) || check_text_exists_via_control(log, text)
}

/// The clipboard has held a value containing `text` at some point.
pub fn check_clipboard_contains(log: &EventLog, text: &str) -> bool {
    log.facts()
        .clipboard_history
        .iter()
        .any(|value| value.contains(text))
}

pub fn check_window_title_contains(log: &EventLog, text: &str) -> bool {
    log.facts().window_titles.iter().any(|t| t.contains(text))
}

/// Substring query over the control tree, unlike the exact via-control check.
pub fn check_control_tree_contains(log: &EventLog, text: &str) -> bool {
    log.facts().control_text.iter().any(|t| t.contains(text))
}

pub fn check_click_count_at_least(log: &EventLog, text: &str, count: u64) -> bool {
    let clicks = log
        .clicks()
        .filter(|a| a.control_text.as_deref() == Some(text))
        .count() as u64;
    count > 0 && clicks >= count
}

pub fn check_scroll_occurred(log: &EventLog) -> bool {
    log.actions()
        .iter()
        .any(|a| a.function == ActionKind::WheelMouseInput)
}
