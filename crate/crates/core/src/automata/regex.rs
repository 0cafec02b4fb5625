//! Regular expressions over a declared alphabet, compiled to deterministic
//! FSMs via the standard Thompson construction followed by subset
//! determinization and dead-state pruning. No minimization: the encoders do
//! not require minimal machines.
//!
//! Pattern surface: declared symbols as atoms (longest match wins, so an
//! operator letter like `||` is not read as alternation), juxtaposition for
//! concatenation, `|` for alternation, postfix `*` and `?`, and `( )` for
//! grouping.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Fsm, FsmError, Letter};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegexError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown symbol starting at position {position}: `{symbol}`")]
    UnknownSymbol { position: usize, symbol: String },
    #[error(transparent)]
    Fsm(#[from] FsmError),
}

#[derive(Debug, Clone, PartialEq)]
enum Ast {
    Empty,
    Sym(usize),
    Seq(Vec<Ast>),
    Alt(Vec<Ast>),
    Star(Box<Ast>),
    Opt(Box<Ast>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Sym(usize),
    LParen,
    RParen,
    Bar,
    Star,
    Question,
}

fn lex(pattern: &str, alphabet: &[Letter]) -> Result<Vec<(usize, Token)>, RegexError> {
    // Longest declared symbol first, so `||` beats `|`.
    let mut by_len: Vec<(usize, &str)> =
        alphabet.iter().enumerate().map(|(i, l)| (i, l.symbol.as_str())).collect();
    by_len.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));

    let bytes = pattern.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    'outer: while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        for &(idx, sym) in &by_len {
            if pattern[pos..].starts_with(sym) {
                tokens.push((pos, Token::Sym(idx)));
                pos += sym.len();
                continue 'outer;
            }
        }
        let tok = match c {
            '(' => Token::LParen,
            ')' => Token::RParen,
            '|' => Token::Bar,
            '*' => Token::Star,
            '?' => Token::Question,
            _ => {
                let end = pattern[pos..]
                    .find(|c: char| c.is_ascii_whitespace() || "()|*?".contains(c))
                    .map(|o| pos + o)
                    .unwrap_or(pattern.len());
                return Err(RegexError::UnknownSymbol {
                    position: pos,
                    symbol: pattern[pos..end].to_string(),
                });
            }
        };
        tokens.push((pos, tok));
        pos += 1;
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    at: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.at).map(|&(_, t)| t)
    }

    fn alt(&mut self) -> Result<Ast, RegexError> {
        let mut branches = vec![self.seq()?];
        while self.peek() == Some(Token::Bar) {
            self.at += 1;
            branches.push(self.seq()?);
        }
        Ok(if branches.len() == 1 { branches.pop().unwrap() } else { Ast::Alt(branches) })
    }

    fn seq(&mut self) -> Result<Ast, RegexError> {
        let mut items = Vec::new();
        while let Some(tok) = self.peek() {
            match tok {
                Token::RParen | Token::Bar => break,
                _ => items.push(self.postfix()?),
            }
        }
        Ok(match items.len() {
            0 => Ast::Empty,
            1 => items.pop().unwrap(),
            _ => Ast::Seq(items),
        })
    }

    fn postfix(&mut self) -> Result<Ast, RegexError> {
        let mut node = self.atom()?;
        while let Some(tok) = self.peek() {
            match tok {
                Token::Star => {
                    self.at += 1;
                    node = Ast::Star(Box::new(node));
                }
                Token::Question => {
                    self.at += 1;
                    node = Ast::Opt(Box::new(node));
                }
                _ => break,
            }
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<Ast, RegexError> {
        let (pos, tok) = match self.tokens.get(self.at) {
            Some(&t) => t,
            None => {
                return Err(RegexError::Syntax {
                    position: self.end,
                    message: "unexpected end of pattern".into(),
                })
            }
        };
        self.at += 1;
        match tok {
            Token::Sym(i) => Ok(Ast::Sym(i)),
            Token::LParen => {
                let inner = self.alt()?;
                match self.tokens.get(self.at) {
                    Some(&(_, Token::RParen)) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    _ => Err(RegexError::Syntax {
                        position: pos,
                        message: "unclosed parenthesis".into(),
                    }),
                }
            }
            Token::Star | Token::Question => Err(RegexError::Syntax {
                position: pos,
                message: "postfix operator with nothing to repeat".into(),
            }),
            Token::RParen => {
                Err(RegexError::Syntax { position: pos, message: "unmatched `)`".into() })
            }
            Token::Bar => unreachable!("handled by alt"),
        }
    }
}

// Thompson NFA fragment: states are indices, one accepting exit per fragment.
struct Nfa {
    eps: Vec<Vec<usize>>,
    sym: Vec<Vec<(usize, usize)>>, // (letter, target)
}

impl Nfa {
    fn new_state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.sym.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, ast: &Ast) -> (usize, usize) {
        match ast {
            Ast::Empty => {
                let s = self.new_state();
                let e = self.new_state();
                self.eps[s].push(e);
                (s, e)
            }
            Ast::Sym(l) => {
                let s = self.new_state();
                let e = self.new_state();
                self.sym[s].push((*l, e));
                (s, e)
            }
            Ast::Seq(items) => {
                let mut frags = items.iter().map(|a| self.build(a));
                let (s, mut e) = frags.next().expect("non-empty seq");
                for (s2, e2) in frags {
                    self.eps[e].push(s2);
                    e = e2;
                }
                (s, e)
            }
            Ast::Alt(branches) => {
                let s = self.new_state();
                let e = self.new_state();
                for b in branches {
                    let (bs, be) = self.build(b);
                    self.eps[s].push(bs);
                    self.eps[be].push(e);
                }
                (s, e)
            }
            Ast::Star(inner) => {
                let s = self.new_state();
                let e = self.new_state();
                let (is, ie) = self.build(inner);
                self.eps[s].push(is);
                self.eps[s].push(e);
                self.eps[ie].push(is);
                self.eps[ie].push(e);
                (s, e)
            }
            Ast::Opt(inner) => {
                let s = self.new_state();
                let e = self.new_state();
                let (is, ie) = self.build(inner);
                self.eps[s].push(is);
                self.eps[s].push(e);
                self.eps[ie].push(e);
                (s, e)
            }
        }
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut queue: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = queue.pop() {
            for &p in &self.eps[q] {
                if set.insert(p) {
                    queue.push(p);
                }
            }
        }
    }
}

/// Compiles a pattern over declared letters into a deterministic FSM with
/// the given name. The language of the result equals the language of the
/// pattern.
pub fn regex_to_fsm(pattern: &str, alphabet: &[Letter], name: &str) -> Result<Fsm, RegexError> {
    let tokens = lex(pattern, alphabet)?;
    let mut parser = Parser { tokens: &tokens, at: 0, end: pattern.len() };
    let ast = parser.alt()?;
    if let Some(&(pos, _)) = parser.tokens.get(parser.at) {
        return Err(RegexError::Syntax { position: pos, message: "unexpected token".into() });
    }

    let mut nfa = Nfa { eps: Vec::new(), sym: Vec::new() };
    let (start, accept) = nfa.build(&ast);

    // Subset construction; subsets discovered in BFS order get consecutive ids.
    let mut initial = BTreeSet::from([start]);
    nfa.closure(&mut initial);
    let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut order: Vec<BTreeSet<usize>> = Vec::new();
    ids.insert(initial.clone(), 0);
    order.push(initial);
    let mut table: Vec<Vec<Option<usize>>> = Vec::new();
    let mut at = 0;
    while at < order.len() {
        let current = order[at].clone();
        let mut row = vec![None; alphabet.len()];
        for (l, slot) in row.iter_mut().enumerate() {
            let mut next = BTreeSet::new();
            for &q in &current {
                for &(sym, target) in &nfa.sym[q] {
                    if sym == l {
                        next.insert(target);
                    }
                }
            }
            if next.is_empty() {
                continue;
            }
            nfa.closure(&mut next);
            let id = *ids.entry(next.clone()).or_insert_with(|| {
                order.push(next);
                order.len() - 1
            });
            *slot = Some(id);
        }
        table.push(row);
        at += 1;
    }

    let states: Vec<String> = (0..order.len()).map(|i| format!("s{i}")).collect();
    let accepting: Vec<String> = order
        .iter()
        .enumerate()
        .filter(|(_, set)| set.contains(&accept))
        .map(|(i, _)| format!("s{i}"))
        .collect();
    let mut transitions = Vec::new();
    for (q, row) in table.iter().enumerate() {
        for (l, target) in row.iter().enumerate() {
            if let Some(p) = target {
                transitions.push((
                    format!("s{q}"),
                    alphabet[l].symbol.clone(),
                    format!("s{p}"),
                ));
            }
        }
    }
    let dfa = Fsm::new(name, states, alphabet.to_vec(), "s0", &accepting, &transitions)?;
    Ok(dfa.prune_dead()?)
}
