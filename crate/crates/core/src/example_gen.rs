//! Positive and negative string examples for a regex. Positives come from a
//! stochastic walk over its automaton; negatives from the difference between
//! a slightly perturbed regex and the original, so they sit close to the
//! language boundary.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::automaton::{
    enumerate_window, sample_accepted, AutomatonError, Compiler, Coverage, Dfa,
    DEFAULT_WINDOW_SLACK,
};
use crate::dsl::{BinaryOp, CharClass, Count, Regex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LabeledExample {
    pub text: String,
    pub polarity: Polarity,
    /// `traversal` for positives, the perturbation for negatives, or
    /// `fallback` for padding drawn from the complement.
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationKind {
    ClassSwap,
    ParameterShift,
    NegationFlip,
    ComponentDrop,
    ComponentDuplicate,
    ConstantSwap,
    OptionalityToggle,
}

impl MutationKind {
    pub fn name(self) -> &'static str {
        match self {
            MutationKind::ClassSwap => "class-swap",
            MutationKind::ParameterShift => "parameter-shift",
            MutationKind::NegationFlip => "negation-flip",
            MutationKind::ComponentDrop => "component-drop",
            MutationKind::ComponentDuplicate => "component-duplicate",
            MutationKind::ConstantSwap => "constant-swap",
            MutationKind::OptionalityToggle => "optionality-toggle",
        }
    }
}

/// One mutation: the subtree at `path` (child indices from the root) was
/// rewritten by `kind`; `variant` numbers the rewrites of one kind at one
/// node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perturbation {
    pub path: Vec<usize>,
    pub kind: MutationKind,
    pub variant: usize,
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@", self.kind.name())?;
        if self.path.is_empty() {
            f.write_str("root")?;
        } else {
            let parts: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
            f.write_str(&parts.join("."))?;
        }
        if self.variant > 0 {
            write!(f, "#{}", self.variant)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExampleError {
    #[error("the regex accepts no string")]
    EmptyLanguage,
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleConfig {
    pub n_pos: usize,
    pub n_neg: usize,
    /// Extra length beyond the shortest accepted string.
    pub window_slack: usize,
    /// Weight of not-yet-taken transitions during positive sampling.
    pub novelty: f64,
    /// Draws per requested string before falling back to enumeration.
    pub tries: usize,
}

impl Default for ExampleConfig {
    fn default() -> Self {
        ExampleConfig {
            n_pos: 6,
            n_neg: 6,
            window_slack: DEFAULT_WINDOW_SLACK,
            novelty: 4.0,
            tries: 20,
        }
    }
}

/// Strings of one polarity; `shortfall` is set when fewer than requested
/// could be produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleBatch {
    pub examples: Vec<LabeledExample>,
    pub shortfall: bool,
}

impl ExampleBatch {
    pub fn texts(&self) -> Vec<&str> {
        self.examples.iter().map(|e| e.text.as_str()).collect()
    }
}

fn window(d: &Dfa, slack: usize) -> Option<(usize, usize)> {
    d.shortest_len().map(|s| (s, s + slack))
}

/// Draws up to `n` distinct strings of `d` within the default window,
/// topping up by enumeration when random draws keep colliding.
fn distinct_from<R: Rng>(
    d: &Dfa,
    n: usize,
    cfg: &ExampleConfig,
    rng: &mut R,
    taken: &HashSet<String>,
    coverage: Option<&mut Coverage>,
) -> Result<Vec<String>, ExampleError> {
    let Some((lo, hi)) = window(d, cfg.window_slack) else {
        return Ok(Vec::new());
    };
    let mut out: Vec<String> = Vec::new();
    let mut seen: HashSet<String> = taken.clone();
    let mut cov = coverage;
    for _ in 0..n * cfg.tries {
        if out.len() >= n {
            break;
        }
        let s = sample_accepted(d, rng, lo, hi, cov.as_deref_mut())?;
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    if out.len() < n {
        for s in enumerate_window(d, lo, hi, n + seen.len()) {
            if out.len() >= n {
                break;
            }
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

/// `n` distinct accepted strings, biased toward covering unvisited
/// transitions across the set.
pub fn gen_positive<R: Rng>(
    ast: &Regex,
    cfg: &ExampleConfig,
    rng: &mut R,
) -> Result<ExampleBatch, ExampleError> {
    let d = Compiler::new(Alphabet::standard()).compile(ast)?;
    gen_positive_dfa(&d, cfg, rng)
}

fn gen_positive_dfa<R: Rng>(
    d: &Dfa,
    cfg: &ExampleConfig,
    rng: &mut R,
) -> Result<ExampleBatch, ExampleError> {
    if d.is_empty() {
        return Err(ExampleError::EmptyLanguage);
    }
    let mut cov = Coverage::with_novelty(cfg.novelty);
    let strings = distinct_from(d, cfg.n_pos, cfg, rng, &HashSet::new(), Some(&mut cov))?;
    Ok(ExampleBatch {
        shortfall: strings.len() < cfg.n_pos,
        examples: strings
            .into_iter()
            .map(|text| LabeledExample {
                text,
                polarity: Polarity::Positive,
                provenance: "traversal".into(),
            })
            .collect(),
    })
}

const SWAP_CLASSES: [CharClass; 5] = [
    CharClass::Num,
    CharClass::Let,
    CharClass::Low,
    CharClass::Cap,
    CharClass::Spec,
];

fn node_at<'a>(r: &'a Regex, path: &[usize]) -> &'a Regex {
    path.iter().fold(r, |n, &i| n.children()[i])
}

fn replace_at(r: &Regex, path: &[usize], new: Regex) -> Regex {
    let mut out = r.clone();
    let mut n = &mut out;
    for &i in path {
        n = n.children_mut().swap_remove(i);
    }
    *n = new;
    out
}

/// Neighbor of a constant symbol within its class, cycling.
fn neighbor(alpha: &Alphabet, c: char) -> Option<char> {
    let i = alpha.index_of(c)?;
    let members: Vec<usize> = alpha.class_set(alpha.class_of(i)).iter().collect();
    let pos = members.iter().position(|&m| m == i)?;
    members
        .get((pos + 1) % members.len())
        .filter(|&&m| m != i)
        .map(|&m| alpha.symbol(m))
}

fn shifted(k: &Count, delta: i64, min: i64) -> Option<Count> {
    let v = k.value()? as i64 + delta;
    (v >= min).then_some(Count::Value(v as u32))
}

/// Rewrites of the single node `n`.
fn local_mutations(alpha: &Alphabet, n: &Regex) -> Vec<(MutationKind, Regex)> {
    use MutationKind::*;
    let mut out = Vec::new();
    match n {
        Regex::Class(c) if SWAP_CLASSES.contains(c) => {
            for o in SWAP_CLASSES {
                if o != *c {
                    out.push((ClassSwap, Regex::Class(o)));
                }
            }
        }
        Regex::Char(c) => {
            if let Some(m) = neighbor(alpha, *c) {
                out.push((ConstantSwap, Regex::Char(m)));
            }
            if let Some(i) = alpha.index_of(*c) {
                out.push((ClassSwap, Regex::Class(alpha.class_of(i))));
            }
        }
        Regex::Str(s) => {
            let chars: Vec<char> = s.chars().collect();
            if let Some(m) = chars.last().and_then(|&c| neighbor(alpha, c)) {
                let mut t = chars.clone();
                *t.last_mut().expect("non-empty") = m;
                out.push((ConstantSwap, Regex::Str(t.into_iter().collect())));
            }
            if chars.len() > 1 {
                let t: String = chars[..chars.len() - 1].iter().collect();
                out.push((ConstantSwap, Regex::constant(&t)));
            }
        }
        Regex::Rep(x, k) => {
            for d in [-1, 1] {
                if let Some(k) = shifted(k, d, 1) {
                    out.push((ParameterShift, Regex::Rep(x.clone(), k)));
                }
            }
        }
        Regex::RepAtLeast(x, k) => {
            for d in [-1, 1] {
                if let Some(k) = shifted(k, d, 0) {
                    out.push((ParameterShift, Regex::RepAtLeast(x.clone(), k)));
                }
            }
        }
        Regex::RepRange(x, k1, k2) => {
            let (a, b) = (k1.value(), k2.value());
            for (d1, d2) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                if let (Some(n1), Some(n2)) = (shifted(k1, d1, 0), shifted(k2, d2, 1)) {
                    if n1.value() <= n2.value() && (n1.value(), n2.value()) != (a, b) {
                        out.push((ParameterShift, Regex::RepRange(x.clone(), n1, n2)));
                    }
                }
            }
        }
        Regex::Not(x) | Regex::NotCc(x) => out.push((NegationFlip, (**x).clone())),
        Regex::StartWith(_) | Regex::EndWith(_) | Regex::Contain(_) => {
            out.push((NegationFlip, Regex::not(n.clone())))
        }
        Regex::Optional(x) => out.push((OptionalityToggle, (**x).clone())),
        _ => {}
    }
    out
}

/// Structural rewrites of a concat/and/or spine rooted at `n`.
fn spine_mutations(n: &Regex) -> Vec<(MutationKind, Regex)> {
    use MutationKind::*;
    let op = match n {
        Regex::Concat(..) => BinaryOp::Concat,
        Regex::And(..) => BinaryOp::And,
        Regex::Or(..) => BinaryOp::Or,
        _ => return Vec::new(),
    };
    let parts: Vec<Regex> = n.spine(op).into_iter().cloned().collect();
    let mut out = Vec::new();
    for i in 0..parts.len() {
        let mut dropped = parts.clone();
        dropped.remove(i);
        out.push((ComponentDrop, Regex::chain(op, dropped)));
        if op == BinaryOp::Concat {
            let mut dup = parts.clone();
            dup.insert(i, parts[i].clone());
            out.push((ComponentDuplicate, Regex::chain(op, dup)));
            if !matches!(parts[i], Regex::Optional(_)) {
                let mut opt = parts.clone();
                opt[i] = Regex::optional(parts[i].clone());
                out.push((OptionalityToggle, Regex::chain(op, opt)));
            }
        }
    }
    out
}

/// Every single-subtree mutation of `ast`, before any language check, in
/// pre-order of the mutated node.
fn candidates(ast: &Regex) -> Vec<(Perturbation, Regex)> {
    let alpha = Alphabet::standard();
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<usize>, bool)> = vec![(Vec::new(), false)];
    while let Some((path, inner_spine)) = stack.pop() {
        let n = node_at(ast, &path);
        let mut here = local_mutations(&alpha, n);
        // a spine is mutated once, at its head
        if !inner_spine {
            here.extend(spine_mutations(n));
        }
        let mut seen: HashMap<MutationKind, usize> = HashMap::new();
        for (kind, new) in here {
            let v = seen.entry(kind).or_insert(0);
            let pert = Perturbation {
                path: path.clone(),
                kind,
                variant: *v,
            };
            *v += 1;
            out.push((pert, replace_at(ast, &path, new)));
        }
        let kids = n.children().len();
        for i in (0..kids).rev() {
            let child = n.children()[i];
            let same_spine = i == 1
                && std::mem::discriminant(child) == std::mem::discriminant(n)
                && matches!(n, Regex::Concat(..) | Regex::And(..) | Regex::Or(..));
            let mut p = path.clone();
            p.push(i);
            stack.push((p, same_spine));
        }
    }
    out
}

/// A perturbation together with the language it adds.
#[derive(Debug, Clone)]
struct Scored {
    pert: Perturbation,
    regex: Regex,
    extra: Dfa,
    /// L(perturbed) contains L(original).
    weakening: bool,
}

fn scored(ast: &Regex, compiler: &mut Compiler, orig: &Dfa) -> Vec<Scored> {
    let mut seen: HashSet<Regex> = HashSet::new();
    let mut out = Vec::new();
    for (pert, regex) in candidates(ast) {
        if regex == *ast || !seen.insert(regex.clone()) {
            continue;
        }
        let Ok(d) = compiler.compile(&regex) else {
            continue;
        };
        let Ok(extra) = d.difference(orig) else {
            continue;
        };
        if extra.is_empty() {
            continue;
        }
        let weakening = orig.is_subset(&d).unwrap_or(false);
        out.push(Scored {
            pert,
            regex,
            extra,
            weakening,
        });
    }
    out
}

/// Single-subtree mutations of `ast` that accept at least one string the
/// original rejects. Enumeration is exhaustive and deterministic.
pub fn perturb(ast: &Regex) -> Vec<(Perturbation, Regex)> {
    let mut compiler = Compiler::new(Alphabet::standard());
    let Ok(orig) = compiler.compile(ast) else {
        return Vec::new();
    };
    scored(ast, &mut compiler, &orig)
        .into_iter()
        .map(|s| (s.pert, s.regex))
        .collect()
}

/// `n` distinct strings rejected by `ast`, each sampled from the extra
/// language of one perturbation. Perturbations that only widen the language
/// come first, then the rest, each group shuffled; negatives are allocated
/// round-robin over that order. Missing strings are padded from the
/// complement with provenance `fallback`.
pub fn gen_negative<R: Rng>(
    ast: &Regex,
    cfg: &ExampleConfig,
    rng: &mut R,
) -> Result<ExampleBatch, ExampleError> {
    let mut compiler = Compiler::new(Alphabet::standard());
    let orig = compiler.compile(ast)?;
    gen_negative_dfa(ast, &orig, &mut compiler, cfg, rng)
}

fn gen_negative_dfa<R: Rng>(
    ast: &Regex,
    orig: &Dfa,
    compiler: &mut Compiler,
    cfg: &ExampleConfig,
    rng: &mut R,
) -> Result<ExampleBatch, ExampleError> {
    if orig.is_empty() {
        return Err(ExampleError::EmptyLanguage);
    }
    let all = scored(ast, compiler, orig);
    let (mut order, mut rest): (Vec<Scored>, Vec<Scored>) =
        all.into_iter().partition(|s| s.weakening);
    order.shuffle(rng);
    rest.shuffle(rng);
    order.extend(rest);

    let mut taken: HashSet<String> = HashSet::new();
    let mut out: Vec<LabeledExample> = Vec::new();
    let mut exhausted = vec![false; order.len()];
    while out.len() < cfg.n_neg && exhausted.iter().any(|e| !e) {
        for (i, s) in order.iter().enumerate() {
            if out.len() >= cfg.n_neg {
                break;
            }
            if exhausted[i] {
                continue;
            }
            let got = distinct_from(&s.extra, 1, cfg, rng, &taken, None)?;
            match got.into_iter().next() {
                Some(text) => {
                    taken.insert(text.clone());
                    out.push(LabeledExample {
                        text,
                        polarity: Polarity::Negative,
                        provenance: s.pert.to_string(),
                    });
                }
                None => exhausted[i] = true,
            }
        }
    }
    if out.len() < cfg.n_neg {
        let complement = orig.complement();
        let pad = distinct_from(&complement, cfg.n_neg - out.len(), cfg, rng, &taken, None)?;
        out.extend(pad.into_iter().map(|text| LabeledExample {
            text,
            polarity: Polarity::Negative,
            provenance: "fallback".into(),
        }));
    }
    Ok(ExampleBatch {
        shortfall: out.len() < cfg.n_neg,
        examples: out,
    })
}

/// Both example sets for one regex.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSet {
    pub positives: ExampleBatch,
    pub negatives: ExampleBatch,
}

pub fn gen_examples<R: Rng>(
    ast: &Regex,
    cfg: &ExampleConfig,
    rng: &mut R,
) -> Result<ExampleSet, ExampleError> {
    let mut compiler = Compiler::new(Alphabet::standard());
    let d = compiler.compile(ast)?;
    let positives = gen_positive_dfa(&d, cfg, rng)?;
    let negatives = gen_negative_dfa(ast, &d, &mut compiler, cfg, rng)?;
    Ok(ExampleSet {
        positives,
        negatives,
    })
}
