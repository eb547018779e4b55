use serde_json::Value;

use crate::env::{Action, Check, CheckApi, Effect, EvalFunction};
use crate::error::Result;
use crate::model::Subtask;
use crate::template::Parameters;

/// A click on no particular control whose only purpose is `effect`.
fn fact(effect: Effect) -> Action {
    Action::click_with("left", false).with_effect(effect)
}

/// The shortest action list that satisfies every non-negated check.
///
/// Negated checks need no action as long as the starting environment does not
/// already violate them. Checks already satisfied by earlier script actions
/// are skipped.
pub fn minimal_script(function: &EvalFunction) -> Result<Vec<Action>> {
    function.validate()?;
    let mut script: Vec<Action> = Vec::new();
    for check in function.checks.iter().filter(|c| !c.negate) {
        let text = check.text().unwrap_or_default().to_string();
        let api: CheckApi = check.api.parse()?;
        let clicks_on = |script: &[Action]| {
            script
                .iter()
                .filter(|a| {
                    a.button().is_some() && a.control_text.as_deref() == Some(text.as_str())
                })
                .count() as u64
        };
        match api {
            CheckApi::MouseClicks => {
                if clicks_on(&script) == 0 {
                    script.push(Action::click(text));
                }
            }
            CheckApi::ClickCountAtLeast => {
                let count = check.args.get("count").and_then(Value::as_u64).unwrap_or(1);
                for _ in clicks_on(&script)..count {
                    script.push(Action::click(text.clone()));
                }
            }
            CheckApi::KeyboardTypes => script.push(Action::type_text(text)),
            CheckApi::FileExists => script.push(fact(Effect::CreateFile(text))),
            CheckApi::TextExistsViaOcr => script.push(fact(Effect::ShowText(text))),
            CheckApi::TextExistsViaControl
            | CheckApi::TextExists
            | CheckApi::ControlTreeContains => script.push(fact(Effect::ShowControl(text))),
            CheckApi::ClipboardContains => script.push(fact(Effect::SetClipboard(text))),
            CheckApi::WindowTitleContains => script.push(fact(Effect::OpenWindow(text))),
            CheckApi::ScrollOccurred => script.push(Action::scroll(-1)),
        }
    }
    Ok(script)
}

/// The table-driven evaluation function for one instantiated subtask: open the
/// application, type every parameter value (in key order), and show the
/// instantiated instruction as a completion marker.
pub fn reference_eval(subtask: &Subtask, params: &Parameters) -> Result<EvalFunction> {
    let mut checks = vec![Check::mouse_clicks(subtask.application.clone())];
    checks.extend(params.values().map(|v| Check::keyboard_types(v.clone())));
    checks.push(Check::text_via_control(subtask.instruction(params)?));
    Ok(EvalFunction::new(checks))
}
