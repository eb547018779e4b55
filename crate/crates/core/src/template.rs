//! `{placeholder}` templates used by subtask instructions and check arguments.

use std::collections::BTreeMap;

/// Parameter set instantiating one template.
pub type Parameters = BTreeMap<String, String>;

enum Piece<'a> {
    Literal(&'a str),
    Slot(&'a str),
}

fn pieces(template: &str) -> Vec<Piece<'_>> {
    let mut out = Vec::new();
    let bytes = template.as_bytes();
    let mut literal_start = 0;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            let name_len = bytes[i + 1..]
                .iter()
                .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                .count();
            let close = i + 1 + name_len;
            if name_len > 0 && close < bytes.len() && bytes[close] == b'}' {
                if literal_start < i {
                    out.push(Piece::Literal(&template[literal_start..i]));
                }
                out.push(Piece::Slot(&template[i + 1..close]));
                i = close + 1;
                literal_start = i;
                continue;
            }
        }
        i += 1;
    }
    if literal_start < template.len() {
        out.push(Piece::Literal(&template[literal_start..]));
    }
    out
}

/// Placeholder names in order of first appearance, without duplicates.
pub fn placeholders(template: &str) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for piece in pieces(template) {
        if let Piece::Slot(name) = piece {
            if !names.iter().any(|n| n == name) {
                names.push(name.to_string());
            }
        }
    }
    names
}

/// Fills every placeholder from `params`. On a missing key, returns its name.
pub fn instantiate(template: &str, params: &Parameters) -> Result<String, String> {
    let mut out = String::with_capacity(template.len());
    for piece in pieces(template) {
        match piece {
            Piece::Literal(text) => out.push_str(text),
            Piece::Slot(name) => match params.get(name) {
                Some(value) => out.push_str(value),
                None => return Err(name.to_string()),
            },
        }
    }
    Ok(out)
}
