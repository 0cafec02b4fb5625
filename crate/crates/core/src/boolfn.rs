//! Truth-table algebra for Boolean functions and vector functions, the
//! sparse closure, and linear circuit synthesis for the Church-encoded
//! backend.
//!
//! A function on n bits is its table of 2^n output bits, indexed by the
//! numeric value of the input vector. The canonical label of a function is
//! `g{k}` where k is the table read as a binary number with the output for
//! input 0 in the most significant position; the four two-bit conjunctions
//! are then g1 = b2∧b1, g2 = b2∧¬b1, g4 = ¬b2∧b1, g8 = ¬b2∧¬b1.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::automata::Fsm;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoolFnError {
    #[error("arity mismatch: function on {expected} bits applied to {got} bits")]
    ArityMismatch { expected: usize, got: usize },
    #[error("bit count {requested} exceeds the guard of {guard} (2^2^n functions); raise the guard to proceed")]
    GuardExceeded { requested: usize, guard: usize },
    #[error("transition function is not total at state `{state}` on `{symbol}`")]
    PartialTransition { state: String, symbol: String },
    #[error("state count {0} is not a power of two; pad the machine first")]
    NotPowerOfTwo(usize),
    #[error("symbol `{0}` is not in the alphabet")]
    UnknownSymbol(String),
}

/// A fixed-width vector of bits ⟨b_n, …, b_2, b_1⟩, indexed from the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitVec {
    width: usize,
    value: u32,
}

impl BitVec {
    pub fn new(width: usize, value: u32) -> Self {
        debug_assert!(width == 32 || value < (1 << width));
        BitVec { width, value }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The vector's numeric value, used as a truth-table index.
    pub fn value(&self) -> u32 {
        self.value
    }

    /// Bit i for i in 1..=width (b_1 is the least significant).
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i >= 1 && i <= self.width);
        (self.value >> (i - 1)) & 1 == 1
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (1..=self.width).rev() {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A Boolean function on n bits as a truth table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolFn {
    arity: usize,
    table: Vec<bool>,
}

impl BoolFn {
    pub fn from_table(arity: usize, table: Vec<bool>) -> Self {
        assert_eq!(table.len(), 1 << arity, "table length must be 2^arity");
        BoolFn { arity, table }
    }

    /// The function with the given canonical mask (see module docs).
    pub fn from_mask(arity: usize, mask: u64) -> Self {
        let size = 1usize << arity;
        let table = (0..size).map(|v| (mask >> (size - 1 - v)) & 1 == 1).collect();
        BoolFn { arity, table }
    }

    pub fn constant(arity: usize, value: bool) -> Self {
        BoolFn { arity, table: vec![value; 1 << arity] }
    }

    /// Projection of bit i (1-based from the right).
    pub fn projection(arity: usize, i: usize) -> Self {
        let table = (0..1usize << arity).map(|v| (v >> (i - 1)) & 1 == 1).collect();
        BoolFn { arity, table }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn eval(&self, v: BitVec) -> Result<bool, BoolFnError> {
        if v.width() != self.arity {
            return Err(BoolFnError::ArityMismatch { expected: self.arity, got: v.width() });
        }
        Ok(self.table[v.value() as usize])
    }

    /// The canonical mask, when it fits in 64 bits (arity <= 6).
    pub fn mask(&self) -> Option<u64> {
        if self.arity > 6 {
            return None;
        }
        let size = self.table.len();
        let mut k = 0u64;
        for (v, &bit) in self.table.iter().enumerate() {
            if bit {
                k |= 1 << (size - 1 - v);
            }
        }
        Some(k)
    }

    /// Canonical label: `g{k}` in decimal while the mask is small, hex with
    /// a `gx` prefix for wide tables where the decimal form would be
    /// unwieldy.
    pub fn label(&self) -> String {
        match self.mask() {
            Some(k) => format!("g{k}"),
            None => {
                let mut hex = String::with_capacity(self.table.len() / 4 + 2);
                for chunk in self.table.chunks(4) {
                    let mut nibble = 0u8;
                    for (i, &bit) in chunk.iter().enumerate() {
                        if bit {
                            nibble |= 1 << (3 - i);
                        }
                    }
                    hex.push(char::from_digit(nibble as u32, 16).unwrap());
                }
                format!("gx{hex}")
            }
        }
    }

    pub fn is_constant(&self) -> Option<bool> {
        let first = self.table[0];
        self.table.iter().all(|&b| b == first).then_some(first)
    }
}

/// A Boolean vector function on n bits: components ⟨f_n, …, f_2, f_1⟩ where
/// f_i computes bit i of the output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecFn {
    arity: usize,
    components: Vec<BoolFn>, // components[0] = f_n, components[arity-1] = f_1
}

impl VecFn {
    pub fn new(components: Vec<BoolFn>) -> Self {
        let arity = components.len();
        assert!(components.iter().all(|c| c.arity() == arity), "component arity mismatch");
        VecFn { arity, components }
    }

    pub fn identity(arity: usize) -> Self {
        VecFn {
            arity,
            components: (0..arity).map(|i| BoolFn::projection(arity, arity - i)).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Component f_i for i in 1..=n.
    pub fn component(&self, i: usize) -> &BoolFn {
        &self.components[self.arity - i]
    }

    /// Components in display order ⟨f_n, …, f_1⟩.
    pub fn components(&self) -> &[BoolFn] {
        &self.components
    }

    pub fn apply(&self, v: BitVec) -> Result<BitVec, BoolFnError> {
        if v.width() != self.arity {
            return Err(BoolFnError::ArityMismatch { expected: self.arity, got: v.width() });
        }
        let mut value = 0u32;
        for i in 1..=self.arity {
            if self.component(i).eval(v)? {
                value |= 1 << (i - 1);
            }
        }
        Ok(BitVec::new(self.arity, value))
    }

    /// Composition g ∘ f of two vector functions.
    pub fn then(&self, g: &VecFn) -> Result<VecFn, BoolFnError> {
        if g.arity != self.arity {
            return Err(BoolFnError::ArityMismatch { expected: self.arity, got: g.arity });
        }
        let components =
            g.components.iter().map(|c| compose(c, self)).collect::<Result<Vec<_>, _>>()?;
        Ok(VecFn::new(components))
    }
}

/// (g ∘ f)(v) = g(f(v)), by table evaluation.
pub fn compose(g: &BoolFn, f: &VecFn) -> Result<BoolFn, BoolFnError> {
    if g.arity() != f.arity() {
        return Err(BoolFnError::ArityMismatch { expected: f.arity(), got: g.arity() });
    }
    let n = f.arity();
    let mut table = Vec::with_capacity(1 << n);
    for v in 0..1u32 << n {
        let image = f.apply(BitVec::new(n, v))?;
        table.push(g.eval(image)?);
    }
    Ok(BoolFn::from_table(n, table))
}

/// The state-to-bit-vector assignment: states in declaration order map to
/// the binary values 0, 1, 2, …, so the mapping is a bijection exactly when
/// the machine has 2^n states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Beta {
    bits: usize,
}

impl Beta {
    /// The assignment for a totalized, padded machine.
    pub fn for_fsm(m: &Fsm) -> Result<Self, BoolFnError> {
        let n = m.state_count();
        if !n.is_power_of_two() || n < 2 {
            return Err(BoolFnError::NotPowerOfTwo(n));
        }
        Ok(Beta { bits: n.trailing_zeros() as usize })
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn of(&self, state: usize) -> BitVec {
        BitVec::new(self.bits, state as u32)
    }
}

/// The vector function f^σ with f^σ(β(q)) = β(δ_σ(q)). Requires a total
/// transition function on a power-of-two state count.
pub fn transition_vecfn(m: &Fsm, beta: &Beta, symbol: &str) -> Result<VecFn, BoolFnError> {
    let letter = m
        .letter_index(symbol)
        .ok_or_else(|| BoolFnError::UnknownSymbol(symbol.to_string()))?;
    if m.state_count() != 1 << beta.bits() {
        return Err(BoolFnError::NotPowerOfTwo(m.state_count()));
    }
    let n = beta.bits();
    let mut tables: Vec<Vec<bool>> = vec![Vec::with_capacity(1 << n); n];
    for q in 0..m.state_count() {
        let p = m.step(q, letter).ok_or_else(|| BoolFnError::PartialTransition {
            state: m.states()[q].clone(),
            symbol: symbol.to_string(),
        })?;
        let image = beta.of(p);
        for i in 1..=n {
            tables[n - i].push(image.bit(i));
        }
    }
    Ok(VecFn::new(tables.into_iter().map(|t| BoolFn::from_table(n, t)).collect()))
}

/// All 2^(2^n) Boolean functions on n bits, ordered by ascending mask. The
/// guard bounds n because the count is doubly exponential.
pub fn all_boolfns(n: usize, guard_bits: usize) -> Result<Vec<BoolFn>, BoolFnError> {
    if n == 0 || n > guard_bits {
        return Err(BoolFnError::GuardExceeded { requested: n, guard: guard_bits });
    }
    let count = 1u64 << (1 << n);
    Ok((0..count).map(|k| BoolFn::from_mask(n, k)).collect())
}

/// The function with g(β(q)) = 1 iff q is in the set. With the accepting
/// set this is g^F; with the coaccessible set it is g^R.
pub fn acceptor_fn(beta: &Beta, states: impl IntoIterator<Item = usize>) -> BoolFn {
    let mut table = vec![false; 1 << beta.bits()];
    for q in states {
        table[q] = true;
    }
    BoolFn::from_table(beta.bits(), table)
}

/// Smallest superset of the seeds closed under post-composition with每 the
/// per-symbol vector functions: seeds first, then BFS discovery order.
pub fn sparse_closure(seeds: &[BoolFn], fs: &[VecFn]) -> Vec<BoolFn> {
    let mut result: Vec<BoolFn> = Vec::new();
    let mut seen: HashMap<BoolFn, usize> = HashMap::new();
    for s in seeds {
        if !seen.contains_key(s) {
            seen.insert(s.clone(), result.len());
            result.push(s.clone());
        }
    }
    let mut at = 0;
    while at < result.len() {
        let g = result[at].clone();
        for f in fs {
            let c = compose(&g, f).expect("closure arities match");
            if !seen.contains_key(&c) {
                seen.insert(c.clone(), result.len());
                result.push(c);
            }
        }
        at += 1;
    }
    result
}

/// A linear Boolean circuit: every input and every COPY binder is consumed
/// exactly once, so the circuit renders directly into Church-encoded code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub inputs: Vec<String>,
    pub body: CircuitExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircuitExpr {
    True,
    False,
    Var(String),
    Not(Box<CircuitExpr>),
    And(Box<CircuitExpr>, Box<CircuitExpr>),
    Or(Box<CircuitExpr>, Box<CircuitExpr>),
    /// Fanout: evaluate `source`, bind it to both names, continue.
    Copy { source: Box<CircuitExpr>, binders: (String, String), body: Box<CircuitExpr> },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("free variable `{0}`")]
    FreeVariable(String),
    #[error("variable `{0}` consumed more than once")]
    ConsumedTwice(String),
    #[error("variable `{0}` never consumed")]
    NeverConsumed(String),
    #[error("input count mismatch: circuit takes {expected}, got {got}")]
    InputMismatch { expected: usize, got: usize },
}

/// Synthesizes a linear circuit computing `g`: disjunctive normal form over
/// the minterms in descending input order, with each input fanned out to its
/// use count through a chain of COPY gates. Constant functions consume the
/// inputs with an AND tree whose result is absorbed by the constant.
pub fn synth_circuit(g: &BoolFn) -> Circuit {
    let n = g.arity();
    let inputs: Vec<String> = (1..=n).rev().map(|i| format!("b{i}")).collect();
    let minterms: Vec<u32> =
        (0..1u32 << n).rev().filter(|&v| g.table()[v as usize]).collect();

    if let Some(value) = g.is_constant() {
        // Consume every input once via a balanced AND tree, then absorb the
        // result: T OR tree = T, F AND tree = F.
        let leaves: Vec<CircuitExpr> =
            inputs.iter().map(|b| CircuitExpr::Var(b.clone())).collect();
        let tree = balanced_and(leaves);
        let body = if value {
            CircuitExpr::Or(Box::new(CircuitExpr::True), Box::new(tree))
        } else {
            CircuitExpr::And(Box::new(CircuitExpr::False), Box::new(tree))
        };
        return Circuit { inputs, body };
    }

    // Each minterm consumes every input once.
    let uses = minterms.len();
    let mut names: Vec<Vec<String>> = Vec::with_capacity(n);
    for b in &inputs {
        if uses == 1 {
            names.push(vec![b.clone()]);
        } else {
            names.push((1..=uses).map(|j| format!("{b}_{j}")).collect());
        }
    }

    let mut terms = Vec::with_capacity(uses);
    for (use_idx, &v) in minterms.iter().enumerate() {
        let mut literals = Vec::with_capacity(n);
        for (pos, _) in inputs.iter().enumerate() {
            let i = n - pos; // bit index
            let var = CircuitExpr::Var(names[pos][use_idx].clone());
            literals.push(if (v >> (i - 1)) & 1 == 1 {
                var
            } else {
                CircuitExpr::Not(Box::new(var))
            });
        }
        terms.push(
            literals
                .into_iter()
                .rev()
                .reduce(|acc, l| CircuitExpr::And(Box::new(l), Box::new(acc)))
                .expect("at least one literal"),
        );
    }
    let dnf = terms
        .into_iter()
        .rev()
        .reduce(|acc, t| CircuitExpr::Or(Box::new(t), Box::new(acc)))
        .expect("at least one minterm");

    // Wrap in copy chains, outermost for the highest bit.
    let mut body = dnf;
    for (pos, b) in inputs.iter().enumerate().rev() {
        if uses < 2 {
            continue;
        }
        body = copy_chain(b, &names[pos], body);
    }
    Circuit { inputs, body }
}

/// Chains COPY gates so `source` becomes the given use names: the last copy
/// binds the final two names, earlier copies bind one name and a carrier.
fn copy_chain(source: &str, names: &[String], body: CircuitExpr) -> CircuitExpr {
    let k = names.len();
    debug_assert!(k >= 2);
    let mut current = body;
    // Build from the innermost copy outward.
    for j in (0..k - 1).rev() {
        let src = if j == 0 { source.to_string() } else { format!("{source}_c{j}") };
        let second = if j == k - 2 {
            names[k - 1].clone()
        } else {
            format!("{source}_c{}", j + 1)
        };
        current = CircuitExpr::Copy {
            source: Box::new(CircuitExpr::Var(src)),
            binders: (names[j].clone(), second),
            body: Box::new(current),
        };
    }
    current
}

fn balanced_and(mut leaves: Vec<CircuitExpr>) -> CircuitExpr {
    if leaves.is_empty() {
        return CircuitExpr::True;
    }
    while leaves.len() > 1 {
        let mut next = Vec::with_capacity(leaves.len().div_ceil(2));
        let mut it = leaves.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(CircuitExpr::And(Box::new(a), Box::new(b))),
                None => next.push(a),
            }
        }
        leaves = next;
    }
    leaves.pop().unwrap()
}

/// Evaluates a circuit under standard Boolean semantics, enforcing the
/// linearity discipline: consuming a variable twice or leaving one
/// unconsumed is a structural error named after the variable.
pub fn eval_circuit(c: &Circuit, v: BitVec) -> Result<bool, CircuitError> {
    if v.width() != c.inputs.len() {
        return Err(CircuitError::InputMismatch { expected: c.inputs.len(), got: v.width() });
    }
    // Environment with single-use entries: None = already consumed.
    let mut env: HashMap<String, Option<bool>> = HashMap::new();
    for (pos, name) in c.inputs.iter().enumerate() {
        let i = c.inputs.len() - pos;
        env.insert(name.clone(), Some(v.bit(i)));
    }
    let result = eval_expr(&c.body, &mut env)?;
    for (name, slot) in env {
        if slot.is_some() {
            return Err(CircuitError::NeverConsumed(name));
        }
    }
    Ok(result)
}

fn eval_expr(
    e: &CircuitExpr,
    env: &mut HashMap<String, Option<bool>>,
) -> Result<bool, CircuitError> {
    match e {
        CircuitExpr::True => Ok(true),
        CircuitExpr::False => Ok(false),
        CircuitExpr::Var(name) => match env.get_mut(name) {
            None => Err(CircuitError::FreeVariable(name.clone())),
            Some(slot) => slot.take().ok_or_else(|| CircuitError::ConsumedTwice(name.clone())),
        },
        CircuitExpr::Not(x) => Ok(!eval_expr(x, env)?),
        CircuitExpr::And(a, b) => {
            let a = eval_expr(a, env)?;
            let b = eval_expr(b, env)?;
            Ok(a && b)
        }
        CircuitExpr::Or(a, b) => {
            let a = eval_expr(a, env)?;
            let b = eval_expr(b, env)?;
            Ok(a || b)
        }
        CircuitExpr::Copy { source, binders, body } => {
            let bit = eval_expr(source, env)?;
            for name in [&binders.0, &binders.1] {
                if env.insert(name.clone(), Some(bit)).is_some() {
                    // Rebinding an existing name would break single-use
                    // accounting.
                    return Err(CircuitError::ConsumedTwice(name.clone()));
                }
            }
            let out = eval_expr(body, env)?;
            for name in [&binders.0, &binders.1] {
                match env.remove(name) {
                    Some(None) => {}
                    Some(Some(_)) => return Err(CircuitError::NeverConsumed(name.clone())),
                    None => unreachable!("binder vanished"),
                }
            }
            Ok(out)
        }
    }
}

/// Counts COPY gates, used by tests and diagnostics.
pub fn copy_count(e: &CircuitExpr) -> usize {
    match e {
        CircuitExpr::True | CircuitExpr::False | CircuitExpr::Var(_) => 0,
        CircuitExpr::Not(x) => copy_count(x),
        CircuitExpr::And(a, b) | CircuitExpr::Or(a, b) => copy_count(a) + copy_count(b),
        CircuitExpr::Copy { source, body, .. } => 1 + copy_count(source) + copy_count(body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Letter;

    fn xor2() -> BoolFn {
        BoolFn::from_table(2, vec![false, true, true, false])
    }

    fn ring4_vecfn() -> VecFn {
        let m = Fsm::ring(4).unwrap().totalize_and_pad();
        let beta = Beta::for_fsm(&m).unwrap();
        transition_vecfn(&m, &beta, "a").unwrap()
    }

    #[test]
    fn eval_named_conjunctions() {
        let g8 = BoolFn::from_mask(2, 8);
        assert!(g8.eval(BitVec::new(2, 0b00)).unwrap());
        assert!(!g8.eval(BitVec::new(2, 0b01)).unwrap());
        let g1 = BoolFn::from_mask(2, 1);
        assert!(!g1.eval(BitVec::new(2, 0b10)).unwrap());
        assert!(g1.eval(BitVec::new(2, 0b11)).unwrap());
        let top = BoolFn::constant(3, true);
        for v in 0..8 {
            assert!(top.eval(BitVec::new(3, v)).unwrap());
        }
    }

    #[test]
    fn eq5_names_reproduce() {
        // g1 = b2∧b1, g2 = b2∧¬b1, g4 = ¬b2∧b1, g8 = ¬b2∧¬b1.
        let from_formula = |f: fn(bool, bool) -> bool| {
            BoolFn::from_table(
                2,
                (0..4u32)
                    .map(|v| f((v >> 1) & 1 == 1, v & 1 == 1))
                    .collect(),
            )
        };
        assert_eq!(from_formula(|b2, b1| b2 && b1).label(), "g1");
        assert_eq!(from_formula(|b2, b1| b2 && !b1).label(), "g2");
        assert_eq!(from_formula(|b2, b1| !b2 && b1).label(), "g4");
        assert_eq!(from_formula(|b2, b1| !b2 && !b1).label(), "g8");
    }

    #[test]
    fn ring4_transition_tables() {
        let f = ring4_vecfn();
        let expect = [(0b00, 0b01), (0b01, 0b10), (0b10, 0b11), (0b11, 0b00)];
        for (v, image) in expect {
            assert_eq!(f.apply(BitVec::new(2, v)).unwrap().value(), image);
        }
        // f2 is XOR, f1 is NOT of the low bit.
        assert_eq!(f.component(2), &xor2());
        assert_eq!(f.component(1), &BoolFn::from_table(2, vec![true, false, true, false]));
    }

    #[test]
    fn identity_letter_gives_identity_vecfn() {
        let states: Vec<String> = (0..4).map(|i| format!("q{i}")).collect();
        let transitions: Vec<(String, String, String)> =
            (0..4).map(|i| (format!("q{i}"), "a".into(), format!("q{i}"))).collect();
        let m = Fsm::new("loops", states, vec![Letter::new("a")], "q0", &["q0".into()], &transitions)
            .unwrap();
        let beta = Beta::for_fsm(&m).unwrap();
        let f = transition_vecfn(&m, &beta, "a").unwrap();
        assert_eq!(f, VecFn::identity(2));
    }

    #[test]
    fn compose_walks_the_ring() {
        let f = ring4_vecfn();
        let g8 = BoolFn::from_mask(2, 8);
        let g1 = compose(&g8, &f).unwrap();
        assert_eq!(g1.label(), "g1");
        let g2 = compose(&g1, &f).unwrap();
        assert_eq!(g2.label(), "g2");
        let g4 = compose(&g2, &f).unwrap();
        assert_eq!(g4.label(), "g4");
        assert_eq!(compose(&g4, &f).unwrap().label(), "g8");
    }

    #[test]
    fn compose_with_identity() {
        let id = VecFn::identity(2);
        for k in 0..16 {
            let g = BoolFn::from_mask(2, k);
            assert_eq!(compose(&g, &id).unwrap(), g);
        }
    }

    #[test]
    fn all_boolfns_counts() {
        assert_eq!(all_boolfns(1, 4).unwrap().len(), 4);
        let two = all_boolfns(2, 4).unwrap();
        assert_eq!(two.len(), 16);
        for k in [1u64, 2, 4, 8] {
            assert_eq!(two[k as usize].mask(), Some(k));
        }
        assert_eq!(all_boolfns(3, 4).unwrap().len(), 256);
        assert_eq!(
            all_boolfns(5, 4).unwrap_err(),
            BoolFnError::GuardExceeded { requested: 5, guard: 4 }
        );
    }

    #[test]
    fn acceptor_examples() {
        let beta = Beta { bits: 2 };
        assert_eq!(acceptor_fn(&beta, [0usize]).label(), "g8");
        assert_eq!(acceptor_fn(&beta, 0..4), BoolFn::constant(2, true));
        assert_eq!(acceptor_fn(&beta, []), BoolFn::constant(2, false));
    }

    #[test]
    fn closure_of_ring4_acceptor() {
        let f = ring4_vecfn();
        let closure = sparse_closure(&[BoolFn::from_mask(2, 8)], std::slice::from_ref(&f));
        let labels: Vec<String> = closure.iter().map(|g| g.label()).collect();
        assert_eq!(labels, vec!["g8", "g1", "g2", "g4"]);
    }

    #[test]
    fn closure_fixed_point_on_constant() {
        let f = ring4_vecfn();
        let top = BoolFn::constant(2, true);
        assert_eq!(sparse_closure(&[top.clone()], &[f]), vec![top]);
    }

    #[test]
    fn closure_matches_brute_force_on_cli_builder() {
        let m = crate::corpus::cli_builder_fsm().totalize_and_pad();
        let beta = Beta::for_fsm(&m).unwrap();
        let fs: Vec<VecFn> = m
            .alphabet()
            .iter()
            .map(|l| transition_vecfn(&m, &beta, &l.symbol).unwrap())
            .collect();
        let gf = acceptor_fn(&beta, m.accepting().iter().copied());
        let gr = acceptor_fn(&beta, m.coaccessible());
        let sparse = sparse_closure(&[gf.clone(), gr.clone()], &fs);
        assert!(sparse.len() <= 2 * m.state_count());

        // Brute force: restrict the full function space to those reachable
        // from the seeds by repeated composition.
        let all = all_boolfns(beta.bits(), 4).unwrap();
        let mut reached: Vec<bool> = all
            .iter()
            .map(|g| *g == gf || *g == gr)
            .collect();
        loop {
            let mut grew = false;
            for (i, g) in all.iter().enumerate() {
                if !reached[i] {
                    continue;
                }
                for f in &fs {
                    let c = compose(g, f).unwrap();
                    let j = c.mask().unwrap() as usize;
                    if !reached[j] {
                        reached[j] = true;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let brute: Vec<&BoolFn> =
            all.iter().enumerate().filter(|(i, _)| reached[*i]).map(|(_, g)| g).collect();
        assert_eq!(brute.len(), sparse.len());
        for g in brute {
            assert!(sparse.contains(g));
        }
    }

    #[test]
    fn closure_is_closed_and_minimal() {
        for seed in [3u64, 11, 29] {
            let m = crate::corpus::random_fsm(seed, 8, 3).totalize_and_pad();
            let beta = Beta::for_fsm(&m).unwrap();
            let fs: Vec<VecFn> = m
                .alphabet()
                .iter()
                .map(|l| transition_vecfn(&m, &beta, &l.symbol).unwrap())
                .collect();
            let gf = acceptor_fn(&beta, m.accepting().iter().copied());
            let closure = sparse_closure(std::slice::from_ref(&gf), &fs);
            for g in &closure {
                for f in &fs {
                    assert!(closure.contains(&compose(g, f).unwrap()), "not closed");
                }
            }
            if closure.len() <= 8 {
                // Minimality: every non-seed has a predecessor besides itself.
                for x in closure.iter().skip(1) {
                    let has_pred = closure
                        .iter()
                        .filter(|g| *g != x)
                        .any(|g| fs.iter().any(|f| &compose(g, f).unwrap() == x));
                    assert!(has_pred, "member {} is unreachable without itself", x.label());
                }
            }
        }
    }

    #[test]
    fn synth_xor_uses_one_copy_per_input() {
        let c = synth_circuit(&xor2());
        assert_eq!(copy_count(&c.body), 2);
        assert!(eval_circuit(&c, BitVec::new(2, 0b10)).unwrap());
        assert!(!eval_circuit(&c, BitVec::new(2, 0b00)).unwrap());
        assert!(!eval_circuit(&c, BitVec::new(2, 0b11)).unwrap());
    }

    #[test]
    fn synth_g8_is_copy_free() {
        let g8 = BoolFn::from_mask(2, 8);
        let c = synth_circuit(&g8);
        assert_eq!(copy_count(&c.body), 0);
        assert_eq!(
            c.body,
            CircuitExpr::And(
                Box::new(CircuitExpr::Not(Box::new(CircuitExpr::Var("b2".into())))),
                Box::new(CircuitExpr::Not(Box::new(CircuitExpr::Var("b1".into())))),
            )
        );
    }

    #[test]
    fn synth_constant_false_consumes_inputs() {
        let c = synth_circuit(&BoolFn::constant(3, false));
        // Linearity holds and the value is false everywhere.
        for v in 0..8 {
            assert!(!eval_circuit(&c, BitVec::new(3, v)).unwrap());
        }
    }

    #[test]
    fn synth_round_trip_all_functions_up_to_three_bits() {
        for n in 1..=3usize {
            for k in 0..1u64 << (1 << n) {
                let g = BoolFn::from_mask(n, k);
                let c = synth_circuit(&g);
                for v in 0..1u32 << n {
                    let bv = BitVec::new(n, v);
                    assert_eq!(
                        eval_circuit(&c, bv).unwrap(),
                        g.eval(bv).unwrap(),
                        "n={n} k={k} v={v}"
                    );
                }
            }
        }
    }

    #[test]
    fn eval_circuit_reports_linearity_violations() {
        let broken = Circuit {
            inputs: vec!["b1".into()],
            body: CircuitExpr::And(
                Box::new(CircuitExpr::Var("b1".into())),
                Box::new(CircuitExpr::Var("b1".into())),
            ),
        };
        assert_eq!(
            eval_circuit(&broken, BitVec::new(1, 1)).unwrap_err(),
            CircuitError::ConsumedTwice("b1".into())
        );
        let free = Circuit { inputs: vec![], body: CircuitExpr::Var("zz".into()) };
        assert_eq!(
            eval_circuit(&free, BitVec::new(0, 0)).unwrap_err(),
            CircuitError::FreeVariable("zz".into())
        );
    }

    #[test]
    fn wide_labels_use_hex() {
        let g = BoolFn::projection(7, 1);
        assert!(g.label().starts_with("gx"));
    }
}
