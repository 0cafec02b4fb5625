//! Deterministic finite state machines: the data model, JSON spec parsing,
//! the transformations every encoder relies on (totalization, power-of-two
//! padding, coaccessibility, dead-state pruning), and the ground-truth
//! membership oracle.
//!
//! States are referred to by name in specs and by declaration index
//! internally. Encoders assign binary codes by declaration order, so
//! everything here keeps collections ordered.

mod regex;
mod spec;

pub use regex::{regex_to_fsm, RegexError};
pub use spec::SpecError;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Index of a state in declaration order.
pub type StateId = usize;

/// An alphabet letter: the API function name plus the list of its runtime
/// argument types. Argument types never influence the protocol; they are
/// carried through to code emission and token mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    pub symbol: String,
    pub arg_types: Vec<String>,
}

impl Letter {
    pub fn new(symbol: impl Into<String>) -> Self {
        Letter { symbol: symbol.into(), arg_types: Vec::new() }
    }

    pub fn with_args(symbol: impl Into<String>, arg_types: &[&str]) -> Self {
        Letter {
            symbol: symbol.into(),
            arg_types: arg_types.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Errors from constructing or operating on an [`Fsm`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FsmError {
    #[error("no states declared")]
    NoStates,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("letter symbol `{0}` is neither an identifier nor an operator token")]
    BadSymbol(String),
    #[error("state `{0}` is not declared")]
    UndeclaredState(String),
    #[error("letter `{0}` is not declared")]
    UndeclaredLetter(String),
    #[error("duplicate transition from `{from}` on `{on}`")]
    DuplicateTransition { from: String, on: String },
    #[error("unknown symbol `{0}` in word")]
    UnknownWordSymbol(String),
    #[error("ring size must be at least 1")]
    EmptyRing,
    #[error("initial state `{0}` cannot reach an accepting state; the language is empty")]
    EmptyLanguage(String),
}

/// A deterministic finite state machine with a possibly partial transition
/// function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsm {
    name: String,
    states: Vec<String>,
    alphabet: Vec<Letter>,
    initial: StateId,
    accepting: BTreeSet<StateId>,
    // transitions[state][letter] = target state, if defined
    transitions: Vec<Vec<Option<StateId>>>,
}

/// The run of a word on an FSM: the visited states, the position of the
/// first undefined transition if any, and the resulting verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub word: Vec<String>,
    /// `states_visited[0]` is the initial state; one entry per consumed letter after that.
    pub states_visited: Vec<StateId>,
    /// 1-based position of the first letter whose transition is undefined.
    pub stuck_at: Option<usize>,
    pub accepted: bool,
}

impl Fsm {
    /// Builds and validates an FSM from named parts. Transitions are
    /// `(from, on, to)` triples over declared names.
    pub fn new(
        name: impl Into<String>,
        states: Vec<String>,
        alphabet: Vec<Letter>,
        initial: &str,
        accepting: &[String],
        transitions: &[(String, String, String)],
    ) -> Result<Self, FsmError> {
        if states.is_empty() {
            return Err(FsmError::NoStates);
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s.clone()) {
                return Err(FsmError::DuplicateState(s.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for l in &alphabet {
            if !is_valid_symbol(&l.symbol) {
                return Err(FsmError::BadSymbol(l.symbol.clone()));
            }
            if !seen.insert(l.symbol.clone()) {
                return Err(FsmError::DuplicateLetter(l.symbol.clone()));
            }
        }
        let state_index = |s: &str| -> Result<StateId, FsmError> {
            states
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| FsmError::UndeclaredState(s.to_string()))
        };
        let letter_index = |s: &str| -> Result<usize, FsmError> {
            alphabet
                .iter()
                .position(|x| x.symbol == s)
                .ok_or_else(|| FsmError::UndeclaredLetter(s.to_string()))
        };
        let initial = state_index(initial)?;
        let accepting = accepting
            .iter()
            .map(|s| state_index(s))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let mut table = vec![vec![None; alphabet.len()]; states.len()];
        for (from, on, to) in transitions {
            let f = state_index(from)?;
            let l = letter_index(on)?;
            let t = state_index(to)?;
            if table[f][l].is_some() {
                return Err(FsmError::DuplicateTransition { from: from.clone(), on: on.clone() });
            }
            table[f][l] = Some(t);
        }
        Ok(Fsm { name: name.into(), states, alphabet, initial, accepting, transitions: table })
    }

    /// Parses an FSM from its JSON spec document.
    pub fn from_spec_json(text: &str) -> Result<Self, SpecError> {
        spec::parse_fsm_spec(text)
    }

    /// Serializes back into the JSON spec format.
    pub fn to_spec_json(&self) -> String {
        spec::fsm_to_json(self)
    }

    /// The n-state ring recognizing words of `a`s whose length is a multiple
    /// of n. The initial state is the sole accepting state.
    pub fn ring(n: usize) -> Result<Self, FsmError> {
        if n == 0 {
            return Err(FsmError::EmptyRing);
        }
        let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        let transitions: Vec<(String, String, String)> = (0..n)
            .map(|i| (format!("q{i}"), "a".to_string(), format!("q{}", (i + 1) % n)))
            .collect();
        Fsm::new(
            format!("ring{n}"),
            states,
            vec![Letter::new("a")],
            "q0",
            &["q0".to_string()],
            &transitions,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet(&self) -> &[Letter] {
        &self.alphabet
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<StateId> {
        &self.accepting
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting.contains(&q)
    }

    pub fn letter_index(&self, symbol: &str) -> Option<usize> {
        self.alphabet.iter().position(|l| l.symbol == symbol)
    }

    /// The transition target for `(state, letter index)`, if defined.
    pub fn step(&self, q: StateId, letter: usize) -> Option<StateId> {
        self.transitions[q][letter]
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.iter().flatten().filter(|t| t.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.transitions.iter().flatten().all(|t| t.is_some())
    }

    /// Runs a word and returns the full trace. Symbols must be declared.
    pub fn run<S: AsRef<str>>(&self, word: &[S]) -> Result<Run, FsmError> {
        let mut letters = Vec::with_capacity(word.len());
        for s in word {
            let s = s.as_ref();
            letters.push(
                self.letter_index(s).ok_or_else(|| FsmError::UnknownWordSymbol(s.to_string()))?,
            );
        }
        let mut states_visited = vec![self.initial];
        let mut stuck_at = None;
        let mut q = self.initial;
        for (i, &l) in letters.iter().enumerate() {
            match self.step(q, l) {
                Some(p) => {
                    q = p;
                    states_visited.push(p);
                }
                None => {
                    stuck_at = Some(i + 1);
                    break;
                }
            }
        }
        let accepted = stuck_at.is_none() && self.is_accepting(q);
        Ok(Run {
            word: word.iter().map(|s| s.as_ref().to_string()).collect(),
            states_visited,
            stuck_at,
            accepted,
        })
    }

    /// Whether the FSM accepts the word.
    pub fn accepts<S: AsRef<str>>(&self, word: &[S]) -> Result<bool, FsmError> {
        Ok(self.run(word)?.accepted)
    }

    /// Makes the transition function total and pads the state count to a
    /// power of two, both with non-accepting sink states that loop on every
    /// letter. The language is unchanged. Already-conforming machines are
    /// returned as-is.
    pub fn totalize_and_pad(&self) -> Fsm {
        let needs_total = !self.is_total();
        let total_count = self.state_count() + usize::from(needs_total);
        let padded = padded_state_count(total_count);
        if !needs_total && padded == self.state_count() {
            return self.clone();
        }
        let mut out = self.clone();
        let mut fresh = 0usize;
        let mut fresh_name = || {
            loop {
                let name = if fresh == 0 { "sink".to_string() } else { format!("sink{fresh}") };
                fresh += 1;
                if !out.states.contains(&name) {
                    return name;
                }
            }
        };
        let mut sinks = Vec::new();
        for _ in out.states.len()..padded {
            let name = fresh_name();
            out.states.push(name);
            out.transitions.push(vec![None; out.alphabet.len()]);
            sinks.push(out.states.len() - 1);
        }
        // Sinks absorb everything; missing transitions of original states go
        // to the first sink.
        let first_sink = sinks[0];
        for &s in &sinks {
            for l in 0..out.alphabet.len() {
                out.transitions[s][l] = Some(s);
            }
        }
        for q in 0..out.transitions.len() {
            for l in 0..out.alphabet.len() {
                if out.transitions[q][l].is_none() {
                    out.transitions[q][l] = Some(first_sink);
                }
            }
        }
        debug_assert!(out.is_total());
        debug_assert!(out.state_count().is_power_of_two());
        out
    }

    /// The set of states from which some accepting state is reachable,
    /// computed by reverse reachability from the accepting set.
    pub fn coaccessible(&self) -> BTreeSet<StateId> {
        let n = self.state_count();
        let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n {
            for l in 0..self.alphabet.len() {
                if let Some(p) = self.transitions[q][l] {
                    reverse[p].push(q);
                }
            }
        }
        let mut seen: BTreeSet<StateId> = self.accepting.clone();
        let mut queue: Vec<StateId> = seen.iter().copied().collect();
        while let Some(q) = queue.pop() {
            for &p in &reverse[q] {
                if seen.insert(p) {
                    queue.push(p);
                }
            }
        }
        seen
    }

    /// Removes every state that cannot reach an accepting state. Transitions
    /// into removed states are deleted, so the result may be partial.
    /// Fails when the initial state itself is dead (empty language).
    pub fn prune_dead(&self) -> Result<Fsm, FsmError> {
        let alive = self.coaccessible();
        if !alive.contains(&self.initial) {
            return Err(FsmError::EmptyLanguage(self.states[self.initial].clone()));
        }
        if alive.len() == self.state_count() {
            return Ok(self.clone());
        }
        let kept: Vec<StateId> = (0..self.state_count()).filter(|q| alive.contains(q)).collect();
        let mut new_id = vec![usize::MAX; self.state_count()];
        for (i, &q) in kept.iter().enumerate() {
            new_id[q] = i;
        }
        let states = kept.iter().map(|&q| self.states[q].clone()).collect();
        let transitions = kept
            .iter()
            .map(|&q| {
                self.transitions[q]
                    .iter()
                    .map(|t| t.filter(|p| alive.contains(p)).map(|p| new_id[p]))
                    .collect()
            })
            .collect();
        let accepting = self.accepting.iter().map(|&q| new_id[q]).collect();
        Ok(Fsm {
            name: self.name.clone(),
            states,
            alphabet: self.alphabet.clone(),
            initial: new_id[self.initial],
            accepting,
            transitions,
        })
    }
}

impl fmt::Display for Fsm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} states, {} letters, {} transitions)",
            self.name,
            self.state_count(),
            self.alphabet.len(),
            self.transition_count()
        )
    }
}

/// Smallest power of two >= max(count, 2).
pub(crate) fn padded_state_count(count: usize) -> usize {
    count.max(2).next_power_of_two()
}

/// A letter symbol is either an alphanumeric identifier or an operator token
/// made of ML symbol characters (e.g. `||`).
pub fn is_valid_symbol(s: &str) -> bool {
    if s.is_empty() {
        return false;
    }
    let alnum = {
        let mut chars = s.chars();
        let first = chars.next().unwrap();
        (first.is_ascii_alphabetic() || first == '_')
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
    };
    const SYMBOLIC: &str = "!%&$#+-/:<=>?@\\~`^|*";
    let symbolic = s.chars().all(|c| SYMBOLIC.contains(c));
    alnum || symbolic
}

/// All words over `alphabet` of length at most `max_len`, in
/// length-then-lexicographic order (lexicographic by declaration order).
pub fn enumerate_words(alphabet: &[Letter], max_len: usize) -> WordIter<'_> {
    WordIter { alphabet, max_len, next: Some(Vec::new()) }
}

/// Iterator produced by [`enumerate_words`].
pub struct WordIter<'a> {
    alphabet: &'a [Letter],
    max_len: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for WordIter<'_> {
    type Item = Vec<String>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        let word =
            current.iter().map(|&l| self.alphabet[l].symbol.clone()).collect::<Vec<String>>();
        self.next = if self.alphabet.is_empty() {
            None
        } else {
            let mut digits = current;
            // Odometer increment; carry past the top grows the word.
            let mut i = digits.len();
            loop {
                if i == 0 {
                    if digits.len() == self.max_len {
                        break None;
                    }
                    digits = vec![0; digits.len() + 1];
                    break Some(digits);
                }
                i -= 1;
                if digits[i] + 1 < self.alphabet.len() {
                    digits[i] += 1;
                    break Some(digits);
                }
                digits[i] = 0;
            }
        };
        Some(word)
    }
}
