use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

use crate::alphabet::{Alphabet, SymSet};
use crate::approx::Approximator;
use crate::automaton::{Compiler, Dfa};
use crate::dsl::{ast_metrics, print_dsl, BinaryOp, CharClass, Regex};

use super::space::{Space, Sym};
use super::{is_consistent, SynthesisTask};

/// Scores derivations step by step; the score of a derivation is the sum of
/// its step increments, so an empty derivation scores 0.
pub trait Scorer {
    /// Increment for rewriting `before` into `after` by a production of
    /// log-probability `logp`.
    fn delta(&self, before: &Regex, after: &Regex, logp: f64) -> f64;
}

/// Production log-probability plus `lambda` times the change in overlap,
/// the fraction of character classes seen in the positive examples that the
/// regex's literals mention.
#[derive(Debug, Clone)]
pub struct DefaultScorer {
    pub lambda: f64,
    targets: Vec<SymSet>,
    alpha: std::sync::Arc<Alphabet>,
}

impl DefaultScorer {
    pub fn new<S: AsRef<str>>(pos: &[S], lambda: f64) -> DefaultScorer {
        let alpha = Alphabet::standard();
        let mut targets = Vec::new();
        for c in [
            CharClass::Num,
            CharClass::Low,
            CharClass::Cap,
            CharClass::Spec,
        ] {
            let set = alpha.class_set(c);
            let seen = pos.iter().any(|s| {
                s.as_ref()
                    .chars()
                    .any(|ch| alpha.index_of(ch).is_some_and(|i| set.contains(i)))
            });
            if seen {
                targets.push(set);
            }
        }
        DefaultScorer {
            lambda,
            targets,
            alpha,
        }
    }

    /// A class counts as mentioned when some literal piece (a class, or one
    /// character of a constant) lies inside it, so `<let>` mentions neither
    /// letter case.
    pub fn overlap(&self, r: &Regex) -> f64 {
        if self.targets.is_empty() {
            return 0.0;
        }
        let mut pieces: Vec<SymSet> = Vec::new();
        r.walk(&mut |n| match n {
            Regex::Str(t) => {
                pieces.extend(t.chars().map(|c| self.alpha.mentioned(&Regex::Char(c))))
            }
            _ if n.is_literal() => pieces.push(self.alpha.mentioned(n)),
            _ => {}
        });
        let hit = self
            .targets
            .iter()
            .filter(|t| pieces.iter().any(|p| !p.is_empty() && p.is_subset(**t)))
            .count();
        hit as f64 / self.targets.len() as f64
    }
}

impl Scorer for DefaultScorer {
    fn delta(&self, before: &Regex, after: &Regex, logp: f64) -> f64 {
        logp + self.lambda * (self.overlap(after) - self.overlap(before))
    }
}

/// The scorer used when none is supplied: `lambda = 2`.
pub fn default_scorer(task: &SynthesisTask) -> DefaultScorer {
    DefaultScorer::new(&task.pos, 2.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Drop infeasible partial derivations; off gives the filter baseline.
    pub prune: bool,
    /// Prune every `stride` steps.
    pub stride: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            prune: true,
            stride: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Some returned regex is consistent with the examples.
    Found,
    /// Regexes were completed, none consistent.
    NoConsistent,
    /// The budget ran out before any regex was completed.
    NoSolution,
    /// A string is both a positive and a negative example.
    InconsistentTask,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthResult {
    /// Up to `k` complete regexes, best first.
    pub ranked: Vec<Regex>,
    pub expansions: usize,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
struct Item {
    ast: Regex,
    /// Pending symbols, next one last.
    pending: Vec<Sym>,
    score: f64,
    size: usize,
    depth: usize,
    text: String,
}

impl Item {
    fn new(ast: Regex, pending: Vec<Sym>, score: f64, depth: usize) -> Item {
        Item {
            size: ast_metrics(&ast).size,
            text: print_dsl(&ast),
            ast,
            pending,
            score,
            depth,
        }
    }
}

/// Beam order: higher score, then smaller AST, then DSL text.
fn better(a: &Item, b: &Item) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then(a.size.cmp(&b.size))
        .then_with(|| a.text.cmp(&b.text))
        .then_with(|| a.pending.cmp(&b.pending))
}

/// Max-heap entry: the better item is the greater one.
struct Kept(Item);

impl PartialEq for Kept {
    fn eq(&self, o: &Self) -> bool {
        better(&self.0, &o.0) == Ordering::Equal
    }
}

impl Eq for Kept {}

impl PartialOrd for Kept {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Kept {
    fn cmp(&self, o: &Self) -> Ordering {
        better(&o.0, &self.0)
    }
}

/// Best first: higher score, then smaller AST, then DSL text.
fn rank(a: &(f64, usize, Regex), b: &(f64, usize, Regex)) -> Ordering {
    b.0.total_cmp(&a.0)
        .then(a.1.cmp(&b.1))
        .then_with(|| print_dsl(&a.2).cmp(&print_dsl(&b.2)))
}

/// Number of complete conjuncts on the `and` spines of `r`.
fn complete_conjuncts(r: &Regex) -> usize {
    let mut n = 0;
    let mut stack = vec![r];
    while let Some(x) = stack.pop() {
        if matches!(x, Regex::And(..)) {
            for part in x.spine(BinaryOp::And) {
                n += usize::from(part.is_complete());
                stack.push(part);
            }
        } else {
            stack.extend(x.children());
        }
    }
    n
}

/// Some `and` spine of `r` has a complete conjunct that is universal or
/// implied by the other complete conjuncts. The grammar never produces such
/// a conjunct, and further conjuncts only shrink the others' intersection,
/// so derivations containing one are dead.
fn redundant_conjunct(compiler: &mut Compiler, r: &Regex) -> bool {
    let mut stack = vec![r];
    while let Some(x) = stack.pop() {
        if !matches!(x, Regex::And(..)) {
            stack.extend(x.children());
            continue;
        }
        let parts = x.spine(BinaryOp::And);
        let mut dfas = Vec::new();
        for part in parts.iter().filter(|p| p.is_complete()) {
            match compiler.compile(part) {
                Ok(d) => dfas.push(d),
                Err(_) => return false,
            }
        }
        for (i, d) in dfas.iter().enumerate() {
            let mut others: Option<Dfa> = None;
            for (j, e) in dfas.iter().enumerate() {
                if j != i {
                    others = match others {
                        None => Some(e.clone()),
                        Some(o) => match o.intersect(e) {
                            Ok(both) => Some(both),
                            Err(_) => return false,
                        },
                    };
                }
            }
            let implied = match &others {
                None => d.is_universal(),
                Some(o) => o.is_subset(d).unwrap_or(false),
            };
            if implied {
                return true;
            }
        }
        stack.extend(parts);
    }
    false
}

/// Beam search over derivations of the template grammar. Each generated
/// child counts as one expansion against `task.budget`. Candidates that do
/// not fit in the beam are kept; when the beam dies out before `task.k`
/// results are found, search resumes from the best kept candidates. With pruning on, partial derivations
/// that no completion can make consistent are dropped at every `stride`-th
/// depth and completed regexes must be consistent. Derivations with a
/// redundant conjunct are dropped in both modes, since the grammar cannot
/// produce them.
pub fn synth_beam(task: &SynthesisTask, scorer: &dyn Scorer, cfg: &SynthConfig) -> SynthResult {
    if task.pos.iter().any(|p| task.neg.contains(p)) {
        return SynthResult {
            ranked: Vec::new(),
            expansions: 0,
            outcome: Outcome::InconsistentTask,
        };
    }
    let space = Space::from_examples(&task.pos, &task.neg, task.template);
    let mut approx = Approximator::new(Alphabet::standard());
    let started = Instant::now();
    let mut done: Vec<(f64, usize, Regex)> = Vec::new();
    let mut done_seen: HashSet<Regex> = HashSet::new();
    let mut expansions = 0usize;
    let width = task.beam.max(1);
    // candidates cut from the beam
    let mut reserve: BinaryHeap<Kept> = BinaryHeap::new();
    let mut beam = vec![Item::new(Regex::Hole, vec![Sym::Start], 0.0, 0)];
    'search: loop {
        if beam.is_empty() {
            if done.len() >= task.k || reserve.is_empty() {
                break;
            }
            while beam.len() < width {
                match reserve.pop() {
                    Some(k) => beam.push(k.0),
                    None => break,
                }
            }
        }
        let mut next: Vec<Item> = Vec::new();
        for item in &beam {
            let mut pending = item.pending.clone();
            let sym = pending
                .pop()
                .expect("incomplete items have pending symbols");
            let depth = item.depth + 1;
            let prune_now = cfg.prune && depth % cfg.stride.max(1) == 0;
            for prod in space.productions(sym, &item.ast) {
                if expansions >= task.budget
                    || task.time_limit.is_some_and(|t| started.elapsed() >= t)
                {
                    break 'search;
                }
                expansions += 1;
                let mut ast = item.ast.clone();
                if !ast.fill_first_hole(prod.fill) {
                    continue;
                }
                if complete_conjuncts(&ast) > complete_conjuncts(&item.ast)
                    && redundant_conjunct(approx.compiler(), &ast)
                {
                    continue;
                }
                let score = item.score + scorer.delta(&item.ast, &ast, prod.logp);
                let mut child_pending = pending.clone();
                child_pending.extend(prod.children.iter().rev());
                if child_pending.is_empty() {
                    if cfg.prune && !is_consistent(&ast, &task.pos, &task.neg) {
                        continue;
                    }
                    if done_seen.insert(ast.clone()) {
                        let size = ast_metrics(&ast).size;
                        done.push((score, size, ast));
                    }
                    continue;
                }
                if prune_now && !approx.feasible(&ast, &task.pos, &task.neg) {
                    continue;
                }
                next.push(Item::new(ast, child_pending, score, depth));
            }
        }
        next.sort_by(better);
        next.dedup_by(|a, b| a.ast == b.ast && a.pending == b.pending);
        if next.len() > width {
            reserve.extend(next.split_off(width).into_iter().map(Kept));
        }
        beam = next;
    }
    done.sort_by(rank);
    done.truncate(task.k);
    let ranked: Vec<Regex> = done.into_iter().map(|d| d.2).collect();
    let outcome = if ranked.is_empty() {
        Outcome::NoSolution
    } else if ranked
        .iter()
        .any(|r| is_consistent(r, &task.pos, &task.neg))
    {
        Outcome::Found
    } else {
        Outcome::NoConsistent
    };
    SynthResult {
        ranked,
        expansions,
        outcome,
    }
}
