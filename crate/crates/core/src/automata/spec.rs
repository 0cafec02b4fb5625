//! JSON spec format for FSMs. Unknown keys are rejected so that typos in
//! hand-written specs surface as parse errors instead of silent defaults.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Fsm, FsmError, Letter};

/// Errors from reading a spec document: either malformed JSON (with
/// position) or a semantically invalid machine (naming the offender).
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] FsmError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct FsmSpec {
    pub name: String,
    pub alphabet: Vec<LetterSpec>,
    pub states: Vec<String>,
    pub initial: String,
    pub accepting: Vec<String>,
    pub transitions: Vec<TransitionSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct LetterSpec {
    pub symbol: String,
    #[serde(default)]
    pub args: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TransitionSpec {
    pub from: String,
    pub on: String,
    pub to: String,
}

pub(crate) fn parse_fsm_spec(text: &str) -> Result<Fsm, SpecError> {
    let raw: FsmSpec = serde_json::from_str(text).map_err(|e| SpecError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let alphabet = raw
        .alphabet
        .into_iter()
        .map(|l| Letter { symbol: l.symbol, arg_types: l.args })
        .collect();
    let transitions: Vec<(String, String, String)> =
        raw.transitions.into_iter().map(|t| (t.from, t.on, t.to)).collect();
    Ok(Fsm::new(raw.name, raw.states, alphabet, &raw.initial, &raw.accepting, &transitions)?)
}

pub(crate) fn fsm_to_json(m: &Fsm) -> String {
    let mut transitions = Vec::new();
    for q in 0..m.state_count() {
        for (l, letter) in m.alphabet().iter().enumerate() {
            if let Some(p) = m.step(q, l) {
                transitions.push(TransitionSpec {
                    from: m.states()[q].clone(),
                    on: letter.symbol.clone(),
                    to: m.states()[p].clone(),
                });
            }
        }
    }
    let spec = FsmSpec {
        name: m.name().to_string(),
        alphabet: m
            .alphabet()
            .iter()
            .map(|l| LetterSpec { symbol: l.symbol.clone(), args: l.arg_types.clone() })
            .collect(),
        states: m.states().to_vec(),
        initial: m.states()[m.initial()].clone(),
        accepting: m.accepting().iter().map(|&q| m.states()[q].clone()).collect(),
        transitions,
    };
    let mut out = serde_json::to_string_pretty(&spec).expect("spec serialization");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const A4_SPEC: &str = r#"{
        "name": "a4",
        "alphabet": [{"symbol": "a", "args": []}],
        "states": ["q0", "q1", "q2", "q3"],
        "initial": "q0",
        "accepting": ["q0"],
        "transitions": [
            {"from": "q0", "on": "a", "to": "q1"},
            {"from": "q1", "on": "a", "to": "q2"},
            {"from": "q2", "on": "a", "to": "q3"},
            {"from": "q3", "on": "a", "to": "q0"}
        ]
    }"#;

    #[test]
    fn parses_a4_spec() {
        let m = parse_fsm_spec(A4_SPEC).unwrap();
        assert_eq!(m.state_count(), 4);
        assert_eq!(m.name(), "a4");
        assert!(m.accepts(&["a", "a", "a", "a"]).unwrap());
    }

    #[test]
    fn undeclared_state_is_named_in_error() {
        let text = A4_SPEC.replace("\"q1\"},", "\"q9\"},");
        let err = parse_fsm_spec(&text).unwrap_err();
        assert!(err.to_string().contains("q9"), "got: {err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = A4_SPEC.replace("\"name\": \"a4\",", "\"name\": \"a4\", \"bogus\": 1,");
        assert!(matches!(parse_fsm_spec(&text), Err(SpecError::Json { .. })));
    }

    #[test]
    fn duplicate_transition_rejected() {
        let text = A4_SPEC.replace(
            "{\"from\": \"q0\", \"on\": \"a\", \"to\": \"q1\"},",
            "{\"from\": \"q0\", \"on\": \"a\", \"to\": \"q1\"},
             {\"from\": \"q0\", \"on\": \"a\", \"to\": \"q2\"},",
        );
        let err = parse_fsm_spec(&text).unwrap_err();
        assert!(err.to_string().contains("duplicate transition"), "got: {err}");
    }

    #[test]
    fn cli_builder_spec_has_sixteen_transitions() {
        let m = crate::corpus::cli_builder_fsm();
        assert_eq!(m.state_count(), 6);
        assert_eq!(m.transition_count(), 16);
        assert_eq!(m.accepting().len(), 4);
    }

    #[test]
    fn json_round_trip() {
        let m = parse_fsm_spec(A4_SPEC).unwrap();
        let again = parse_fsm_spec(&m.to_spec_json()).unwrap();
        assert_eq!(m, again);
    }
}
