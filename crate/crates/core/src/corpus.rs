//! Deterministic machine and rewrite-system corpora for verification and
//! benchmarks. Everything here is seeded, so test failures reproduce
//! exactly.

use std::collections::BTreeSet;

use crate::automata::{Fsm, Letter};
use crate::encode_rewrite::{RewriteSystem, Rule, Term, TypeSymbol};

/// SplitMix64: tiny, fast, and identical on every platform.
#[derive(Debug, Clone)]
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: seed.wrapping_add(0x9e37_79b9_7f4a_7c15) }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    pub fn chance(&mut self, num: u32, den: u32) -> bool {
        (self.next_u64() % den as u64) < num as u64
    }
}

/// A random FSM with up to `max_states` states and `max_letters` letters.
/// The transition function is strictly partial, the accepting set is
/// non-empty, and the initial state can always reach an accepting state.
pub fn random_fsm(seed: u64, max_states: usize, max_letters: usize) -> Fsm {
    let mut rng = SplitMix::new(seed);
    loop {
        let n = 2 + rng.below(max_states - 1);
        let k = 1 + rng.below(max_letters);
        let states: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        let alphabet: Vec<Letter> =
            (0..k).map(|i| Letter::new(((b'a' + i as u8) as char).to_string())).collect();
        let mut transitions = Vec::new();
        let mut defined = 0usize;
        for q in 0..n {
            for l in 0..k {
                if rng.chance(7, 10) {
                    let target = rng.below(n);
                    transitions.push((
                        format!("q{q}"),
                        alphabet[l].symbol.clone(),
                        format!("q{target}"),
                    ));
                    defined += 1;
                }
            }
        }
        if defined == n * k {
            // Keep δ strictly partial: drop one transition.
            transitions.pop();
        }
        let mut accepting = BTreeSet::new();
        for q in 0..n {
            if rng.chance(1, 3) {
                accepting.insert(format!("q{q}"));
            }
        }
        if accepting.is_empty() {
            accepting.insert(format!("q{}", rng.below(n)));
        }
        let accepting: Vec<String> = accepting.into_iter().collect();
        let m = Fsm::new(format!("rand{seed}"), states, alphabet, "q0", &accepting, &transitions)
            .expect("generated machine is well-formed");
        if m.coaccessible().contains(&m.initial()) {
            return m;
        }
        // Initial state is dead; retry with the advanced generator state.
    }
}

/// A random deterministic rewrite system over a two-letter alphabet, with
/// type symbols of arity at most 2 and a small initial term.
pub fn random_rewrite_system(seed: u64) -> RewriteSystem {
    let mut rng = SplitMix::new(seed ^ 0xdead_beef);
    let letters = vec![Letter::new("L"), Letter::new("R")];
    let type_count = 2 + rng.below(3);
    let types: Vec<TypeSymbol> = (0..type_count)
        .map(|i| TypeSymbol {
            name: format!("t{i}"),
            arity: rng.below(3),
            accepting: rng.chance(1, 2),
        })
        .collect();
    let mut types = types;
    if !types.iter().any(|t| t.accepting) {
        types[0].accepting = true;
    }
    // Ground initial term: pick the first nullary symbol, inventing one if
    // needed so a ground term exists.
    if !types.iter().any(|t| t.arity == 0) {
        types.push(TypeSymbol { name: "base".into(), arity: 0, accepting: false });
    }
    let nullary = types.iter().find(|t| t.arity == 0).unwrap().name.clone();
    let initial = Term { head: nullary.clone(), children: Vec::new() };

    let mut rand_term = |rng: &mut SplitMix, vars: &[String], depth: usize| -> Term {
        fn go(
            rng: &mut SplitMix,
            types: &[TypeSymbol],
            nullary: &str,
            vars: &[String],
            depth: usize,
        ) -> Term {
            if !vars.is_empty() && rng.chance(1, 2) {
                return Term { head: vars[rng.below(vars.len())].clone(), children: Vec::new() };
            }
            if depth == 0 {
                return Term { head: nullary.to_string(), children: Vec::new() };
            }
            let t = &types[rng.below(types.len())];
            let children =
                (0..t.arity).map(|_| go(rng, types, nullary, vars, depth - 1)).collect();
            Term { head: t.name.clone(), children }
        }
        go(rng, &types, &nullary, vars, depth)
    };

    let mut rules = Vec::new();
    for letter in &letters {
        for t in &types {
            if rng.chance(2, 3) {
                let vars: Vec<String> = (0..t.arity).map(|i| format!("x{i}")).collect();
                let rhs = rand_term(&mut rng, &vars, 2);
                rules.push(Rule {
                    symbol: letter.symbol.clone(),
                    head: t.name.clone(),
                    vars,
                    rhs,
                });
            }
        }
    }
    RewriteSystem::new(format!("rw{seed}"), letters, types, initial, rules)
        .expect("generated system is well-formed")
}

/// The six-state command-line-builder machine used throughout the tests:
/// 16 transitions, four accepting states, letters carrying string payloads.
pub fn cli_builder_fsm() -> Fsm {
    let states: Vec<String> = (0..6).map(|i| format!("q{i}")).collect();
    let alphabet = vec![
        Letter::with_args("name", &["string"]),
        Letter::with_args("description", &["string"]),
        Letter::new("optional"),
        Letter::with_args("argument", &["string"]),
        Letter::with_args("||", &["string"]),
        Letter::with_args("argtype", &["string"]),
    ];
    let t = |from: usize, on: &str, to: usize| {
        (format!("q{from}"), on.to_string(), format!("q{to}"))
    };
    let transitions = vec![
        t(0, "name", 1),
        t(1, "description", 2),
        t(1, "optional", 3),
        t(1, "argument", 4),
        t(2, "optional", 3),
        t(2, "argument", 4),
        t(3, "argument", 4),
        t(4, "description", 2),
        t(4, "optional", 3),
        t(4, "||", 4),
        t(4, "argument", 4),
        t(4, "argtype", 5),
        t(5, "description", 2),
        t(5, "optional", 3),
        t(5, "argument", 4),
        t(5, "||", 5),
    ];
    Fsm::new(
        "cli_builder",
        states,
        alphabet,
        "q0",
        &["q1".to_string(), "q2".to_string(), "q4".to_string(), "q5".to_string()],
        &transitions,
    )
    .expect("cli builder machine is well-formed")
}

/// The regular expression defining the same interface as
/// [`cli_builder_fsm`]. The trailing `description` of each argument group is
/// optional, matching the machine.
pub const CLI_BUILDER_REGEX: &str =
    "name description? (optional? argument ||* (argtype ||*)? description?)*";

/// The Dyck rewrite system over L/R brackets: a counter in unary.
pub fn dyck_rewrite_system() -> RewriteSystem {
    RewriteSystem::new(
        "dyck",
        vec![Letter::new("L"), Letter::new("R")],
        vec![
            TypeSymbol { name: "z".into(), arity: 0, accepting: true },
            TypeSymbol { name: "s".into(), arity: 1, accepting: false },
        ],
        Term { head: "z".into(), children: Vec::new() },
        vec![
            Rule {
                symbol: "L".into(),
                head: "z".into(),
                vars: vec![],
                rhs: Term::parse("s(z)").unwrap(),
            },
            Rule {
                symbol: "L".into(),
                head: "s".into(),
                vars: vec!["x".into()],
                rhs: Term::parse("s(s(x))").unwrap(),
            },
            Rule {
                symbol: "R".into(),
                head: "s".into(),
                vars: vec!["x".into()],
                rhs: Term::parse("x").unwrap(),
            },
        ],
    )
    .expect("dyck system is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_fsm_is_reproducible() {
        let a = random_fsm(5, 8, 3);
        let b = random_fsm(5, 8, 3);
        assert_eq!(a, b);
        assert!(!a.is_total());
        assert!(a.coaccessible().contains(&a.initial()));
    }

    #[test]
    fn random_rewrite_is_reproducible() {
        let a = random_rewrite_system(9);
        let b = random_rewrite_system(9);
        assert_eq!(a, b);
    }
}
