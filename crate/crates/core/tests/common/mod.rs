//! Test-only oracles that share no code with the automaton layer: a direct
//! recursive interpreter of DSL semantics and a string enumerator.

#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use regforge::alphabet::SPEC_CHARS;
use regforge::dsl::{CharClass, Count, Regex};
use regforge::synth::{Space, Sym};

/// Characters of the 78-symbol alphabet.
pub fn standard_chars() -> Vec<char> {
    ('A'..='Z')
        .chain('a'..='z')
        .chain('0'..='9')
        .chain(SPEC_CHARS.chars())
        .collect()
}

fn in_class(c: CharClass, ch: char) -> bool {
    match c {
        CharClass::Let => ch.is_ascii_alphabetic(),
        CharClass::Cap => ch.is_ascii_uppercase(),
        CharClass::Low => ch.is_ascii_lowercase(),
        CharClass::Num => ch.is_ascii_digit(),
        CharClass::Spec => SPEC_CHARS.contains(ch),
        CharClass::Any => ch.is_ascii_alphanumeric() || SPEC_CHARS.contains(ch),
        CharClass::Null => false,
    }
}

/// Memoized membership by recursion on the DSL definition.
pub struct Interp<'a> {
    s: Vec<char>,
    memo: HashMap<(*const Regex, usize, usize), bool>,
    _r: std::marker::PhantomData<&'a Regex>,
}

impl<'a> Interp<'a> {
    pub fn matches(r: &'a Regex, s: &str) -> bool {
        let mut it = Interp {
            s: s.chars().collect(),
            memo: HashMap::new(),
            _r: std::marker::PhantomData,
        };
        let n = it.s.len();
        it.m(r, 0, n)
    }

    fn m(&mut self, r: &'a Regex, i: usize, j: usize) -> bool {
        let key = (r as *const Regex, i, j);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = self.eval(r, i, j);
        self.memo.insert(key, v);
        v
    }

    fn count(k: &Count) -> u32 {
        k.value().expect("concrete count")
    }

    /// `r` repeated exactly `k` times over `[i, j)`; pieces may be empty.
    fn reps(&mut self, r: &'a Regex, k: u32, i: usize, j: usize) -> bool {
        if k == 0 {
            return i == j;
        }
        (i..=j).any(|m| self.m(r, i, m) && self.reps(r, k - 1, m, j))
    }

    fn star(&mut self, r: &'a Regex, i: usize, j: usize) -> bool {
        i == j || (i + 1..=j).any(|m| self.m(r, i, m) && self.star(r, m, j))
    }

    fn eval(&mut self, r: &'a Regex, i: usize, j: usize) -> bool {
        match r {
            Regex::Class(c) => j == i + 1 && in_class(*c, self.s[i]),
            Regex::Char(c) => j == i + 1 && self.s[i] == *c,
            Regex::Str(t) => self.s[i..j].iter().copied().eq(t.chars()),
            Regex::StartWith(x) => (i..=j).any(|m| self.m(x, i, m)),
            Regex::EndWith(x) => (i..=j).any(|m| self.m(x, m, j)),
            Regex::Contain(x) => (i..=j).any(|a| (a..=j).any(|b| self.m(x, a, b))),
            Regex::Not(x) => !self.m(x, i, j),
            Regex::Optional(x) => i == j || self.m(x, i, j),
            Regex::Star(x) => self.star(x, i, j),
            Regex::NotCc(x) => {
                j == i + 1 && in_class(CharClass::Any, self.s[i]) && !self.m(x, i, j)
            }
            Regex::Concat(a, b) => (i..=j).any(|m| self.m(a, i, m) && self.m(b, m, j)),
            Regex::And(a, b) => self.m(a, i, j) && self.m(b, i, j),
            Regex::Or(a, b) => self.m(a, i, j) || self.m(b, i, j),
            Regex::Rep(x, k) => self.reps(x, Self::count(k), i, j),
            Regex::RepAtLeast(x, k) => {
                let k = Self::count(k);
                (i..=j).any(|m| self.reps(x, k, i, m) && self.star(x, m, j))
            }
            Regex::RepRange(x, k1, k2) => {
                (Self::count(k1)..=Self::count(k2)).any(|k| self.reps(x, k, i, j))
            }
            Regex::AnonConst | Regex::Hole => panic!("interpreter needs a concrete regex"),
        }
    }
}

/// Every string over `chars` of length at most `max_len`, shortest first.
pub fn enumerate(chars: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * chars.len());
        for s in &layer {
            for &c in chars {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// The six characters of the reduced alphabet.
pub const REDUCED: &str = "Aab01-";

fn leaf() -> impl Strategy<Value = Regex> {
    prop_oneof![
        prop::sample::select(vec![
            CharClass::Let,
            CharClass::Cap,
            CharClass::Low,
            CharClass::Num,
            CharClass::Any,
            CharClass::Spec,
        ])
        .prop_map(Regex::Class),
        prop::sample::select(REDUCED.chars().collect::<Vec<_>>()).prop_map(Regex::Char),
        prop::sample::select(vec!["ab", "a0", "-1"]).prop_map(|s| Regex::Str(s.to_string())),
    ]
}

/// Random regexes over the reduced alphabet with at most `ops` operators.
pub fn regex_strategy(ops: u32) -> impl Strategy<Value = Regex> {
    leaf().prop_recursive(ops, ops * 2 + 1, 2, |inner| {
        let b = |r: Regex| Box::new(r);
        prop_oneof![
            inner.clone().prop_map(move |r| Regex::StartWith(b(r))),
            inner.clone().prop_map(move |r| Regex::EndWith(b(r))),
            inner.clone().prop_map(move |r| Regex::Contain(b(r))),
            inner.clone().prop_map(move |r| Regex::Not(b(r))),
            inner.clone().prop_map(move |r| Regex::Optional(b(r))),
            inner.clone().prop_map(move |r| Regex::Star(b(r))),
            inner.clone().prop_map(move |r| Regex::NotCc(b(r))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Regex::Concat(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Regex::And(b(x), b(y))),
            (inner.clone(), inner.clone()).prop_map(move |(x, y)| Regex::Or(b(x), b(y))),
            (inner.clone(), 0u32..3).prop_map(move |(x, k)| Regex::Rep(b(x), Count::Value(k))),
            (inner.clone(), 0u32..3)
                .prop_map(move |(x, k)| Regex::RepAtLeast(b(x), Count::Value(k))),
            (inner.clone(), 0u32..2, 1u32..3).prop_map(move |(x, a, d)| Regex::RepRange(
                b(x),
                Count::Value(a),
                Count::Value(a + d)
            )),
        ]
    })
}

/// `p` can still be completed into `g`: equal shape, holes anywhere.
pub fn compat(p: &Regex, g: &Regex) -> bool {
    if matches!(p, Regex::Hole) {
        return true;
    }
    if std::mem::discriminant(p) != std::mem::discriminant(g) {
        return false;
    }
    if p.is_leaf() {
        return p == g;
    }
    let (pc, gc) = (p.counts(), g.counts());
    let (pk, gk) = (p.children(), g.children());
    pc.len() == gc.len()
        && pc.iter().zip(&gc).all(|(a, b)| *a == Count::Hole || a == b)
        && pk.len() == gk.len()
        && pk.iter().zip(&gk).all(|(a, b)| compat(a, b))
}

/// One derivation step: the partial regex before and after, and the
/// production's log-probability.
#[derive(Debug, Clone)]
pub struct Step {
    pub before: Regex,
    pub after: Regex,
    pub logp: f64,
}

/// The leftmost derivation of `gold` in `space`, if the space can derive it.
pub fn gold_derivation(space: &Space, gold: &Regex) -> Option<Vec<Step>> {
    fn go(
        space: &Space,
        gold: &Regex,
        ast: Regex,
        pending: Vec<Sym>,
        steps: &mut Vec<Step>,
    ) -> bool {
        let mut pending = pending;
        let Some(sym) = pending.pop() else {
            return ast == *gold;
        };
        if steps.len() > 200 {
            return false;
        }
        for prod in space.productions(sym, &ast) {
            let mut next = ast.clone();
            if !next.fill_first_hole(prod.fill) || !compat(&next, gold) {
                continue;
            }
            let mut p = pending.clone();
            p.extend(prod.children.iter().rev());
            steps.push(Step {
                before: ast.clone(),
                after: next.clone(),
                logp: prod.logp,
            });
            if go(space, gold, next, p, steps) {
                return true;
            }
            steps.pop();
        }
        false
    }
    let mut steps = Vec::new();
    go(space, gold, Regex::Hole, vec![Sym::Start], &mut steps).then_some(steps)
}

/// `n` uniformly random steps from the start symbol, restarting whenever a
/// walk completes early. `None` if no walk reaches `n` steps.
pub fn random_derivation<R: rand::Rng>(space: &Space, n: usize, rng: &mut R) -> Option<Vec<Step>> {
    'walk: for _ in 0..1000 {
        let mut ast = Regex::Hole;
        let mut pending = vec![Sym::Start];
        let mut steps = Vec::new();
        while steps.len() < n {
            let Some(sym) = pending.pop() else {
                continue 'walk;
            };
            let prods = space.productions(sym, &ast);
            if prods.is_empty() {
                continue 'walk;
            }
            let prod = prods[rng.gen_range(0..prods.len())].clone();
            let mut next = ast.clone();
            if !next.fill_first_hole(prod.fill) {
                continue 'walk;
            }
            pending.extend(prod.children.iter().rev());
            steps.push(Step {
                before: ast,
                after: next.clone(),
                logp: prod.logp,
            });
            ast = next;
        }
        return Some(steps);
    }
    None
}
