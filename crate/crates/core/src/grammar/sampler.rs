use std::collections::HashSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::alphabet::{Alphabet, SymSet, SPEC_CHARS};
use crate::automaton::{Compiler, Dfa};
use crate::dsl::{ast_metrics, BinaryOp, CharClass, Regex};

use super::recognize;
use super::{derivable, semantic_complexity, GrammarConfig, GrammarError, Nonterminal, Template};

/// Category of a subtree kept for copying.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pooled {
    Comp,
    Seg,
}

/// Outcome of one weighted draw: a production of the nonterminal, or a copy
/// of the pooled subtree with the given index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Choice {
    Rule(usize),
    Copy(usize),
}

/// Context the sampler consults while expanding nonterminals.
#[derive(Debug, Clone)]
pub struct DerivationState {
    /// Completed top-level parts of the tree under construction.
    pub placed: Vec<Regex>,
    /// Completed components and segments, in creation order, without duplicates.
    pub pool: Vec<(Pooled, Regex)>,
    /// Symbols allowed by an active composed-by constraint.
    pub allowed: Option<SymSet>,
    pub copy_boost: f64,
}

impl DerivationState {
    pub fn new(copy_boost: f64) -> DerivationState {
        DerivationState {
            placed: Vec::new(),
            pool: Vec::new(),
            allowed: None,
            copy_boost,
        }
    }

    pub fn remember(&mut self, kind: Pooled, r: Regex) {
        if !self.pool.iter().any(|(k, p)| *k == kind && *p == r) {
            self.pool.push((kind, r));
        }
    }

    fn fits(&self, set: SymSet) -> bool {
        self.allowed.is_none_or(|a| set.is_subset(a))
    }
}

/// Symbols of every literal (class other than `<any>`/`<null>`, or constant)
/// occurring in `r`.
pub fn literal_symbols(alpha: &Alphabet, r: &Regex) -> SymSet {
    let mut set = SymSet::EMPTY;
    r.walk(&mut |n| {
        if n.is_literal() {
            set = set.union(alpha.mentioned(n));
        }
    });
    set
}

const CC_CLASSES: [CharClass; 5] = [
    CharClass::Num,
    CharClass::Let,
    CharClass::Low,
    CharClass::Cap,
    CharClass::Spec,
];

/// Adjusts the base weights of `nt` to the derivation context and
/// normalizes them.
///
/// For `Comp` and `Seg`, pooled subtrees of that category are added as copy
/// alternatives; together they carry half the mean production weight, times
/// the copy boost. Under a composed-by constraint, character classes outside
/// the allowed symbols and copies mentioning such symbols get weight zero.
pub fn adapt_weights(
    state: &DerivationState,
    nt: Nonterminal,
    base: &[f64],
) -> Result<Vec<(Choice, f64)>, GrammarError> {
    let alpha = Alphabet::standard();
    let mut out: Vec<(Choice, f64)> = base
        .iter()
        .enumerate()
        .map(|(i, &w)| (Choice::Rule(i), w))
        .collect();
    match nt {
        Nonterminal::CC => {
            for (i, c) in CC_CLASSES.iter().enumerate() {
                if !state.fits(alpha.class_set(*c)) {
                    out[i].1 = 0.0;
                }
            }
        }
        Nonterminal::Literal if !CC_CLASSES.iter().any(|c| state.fits(alpha.class_set(*c))) => {
            out[0].1 = 0.0;
        }
        _ => {}
    }
    let kind = match nt {
        Nonterminal::Comp => Some(Pooled::Comp),
        Nonterminal::Seg => Some(Pooled::Seg),
        _ => None,
    };
    if let Some(kind) = kind {
        let copies: Vec<usize> = state
            .pool
            .iter()
            .enumerate()
            .filter(|(_, (k, _))| *k == kind)
            .map(|(i, _)| i)
            .collect();
        if !copies.is_empty() {
            let positive: Vec<f64> = base.iter().copied().filter(|w| *w > 0.0).collect();
            let mean = if positive.is_empty() {
                1.0
            } else {
                positive.iter().sum::<f64>() / positive.len() as f64
            };
            let each = 0.5 * mean * state.copy_boost / copies.len() as f64;
            for i in copies {
                let ok = state.fits(literal_symbols(&alpha, &state.pool[i].1));
                out.push((Choice::Copy(i), if ok { each } else { 0.0 }));
            }
        }
    }
    let total: f64 = out.iter().map(|o| o.1).sum();
    if total.is_nan() || total <= 0.0 {
        return Err(GrammarError::DeadEnd(nt.name()));
    }
    for o in &mut out {
        o.1 /= total;
    }
    Ok(out)
}

/// Why one expansion failed; both trigger a retry one level up.
#[derive(Debug)]
enum Fail {
    DeadEnd,
    Reject,
}

type Step<T> = Result<T, Fail>;

struct Sampler<'a, R: Rng> {
    cfg: &'a GrammarConfig,
    rng: &'a mut R,
    alpha: Arc<Alphabet>,
    compiler: Compiler,
    state: DerivationState,
}

impl<'a, R: Rng> Sampler<'a, R> {
    fn new(cfg: &'a GrammarConfig, rng: &'a mut R, compiler: Compiler) -> Self {
        Sampler {
            cfg,
            rng,
            alpha: Alphabet::standard(),
            compiler,
            state: DerivationState::new(cfg.copy_boost),
        }
    }

    fn draw(&mut self, options: &[(Choice, f64)]) -> Step<Choice> {
        let total: f64 = options.iter().map(|o| o.1).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Fail::DeadEnd);
        }
        let mut x = self.rng.gen::<f64>() * total;
        for &(c, w) in options {
            if w > 0.0 {
                if x < w {
                    return Ok(c);
                }
                x -= w;
            }
        }
        Ok(options
            .iter()
            .rev()
            .find(|o| o.1 > 0.0)
            .expect("positive weight")
            .0)
    }

    /// Draws a production of `nt`, ignoring copy alternatives.
    fn rule(&mut self, nt: Nonterminal, mask: &[usize]) -> Step<usize> {
        let mut base = self.cfg.base_weights(nt);
        for &i in mask {
            base[i] = 0.0;
        }
        let mut options = adapt_weights(&self.state, nt, &base).map_err(|_| Fail::DeadEnd)?;
        options.retain(|o| matches!(o.0, Choice::Rule(_)));
        match self.draw(&options)? {
            Choice::Rule(i) => Ok(i),
            Choice::Copy(_) => unreachable!(),
        }
    }

    /// Runs `f` up to the local backtracking limit.
    fn retry<T>(&mut self, mut f: impl FnMut(&mut Self) -> Step<T>) -> Step<T> {
        let mut last = Fail::Reject;
        for _ in 0..self.cfg.backtrack {
            match f(self) {
                Ok(v) => return Ok(v),
                Err(e) => last = e,
            }
        }
        Err(last)
    }

    fn dfa(&mut self, r: &Regex) -> Step<Dfa> {
        self.compiler.compile(r).map_err(|_| Fail::Reject)
    }

    fn parts(&mut self, lo: usize, hi: usize) -> usize {
        let weights: Vec<(Choice, f64)> = (lo..=hi)
            .map(|n| (Choice::Rule(n), self.cfg.part_decay.powi((n - lo) as i32)))
            .collect();
        match self.draw(&weights) {
            Ok(Choice::Rule(n)) => n,
            _ => lo,
        }
    }

    fn k_rep(&mut self) -> u32 {
        self.rng.gen_range(2..=6)
    }

    fn k_atleast(&mut self) -> u32 {
        self.rng.gen_range(1..=6)
    }

    fn k_range(&mut self) -> (u32, u32) {
        let k1 = self.rng.gen_range(1..=4);
        let k2 = self.rng.gen_range(k1 + 1..=(k1 + 5).min(9));
        (k1, k2)
    }

    fn symbol_pool(&self) -> SymSet {
        self.state.allowed.unwrap_or_else(|| self.alpha.full())
    }

    fn random_symbol(&mut self, set: SymSet) -> Step<char> {
        let syms: Vec<usize> = set.iter().collect();
        let &i = syms.choose(self.rng).ok_or(Fail::DeadEnd)?;
        Ok(self.alpha.symbol(i))
    }

    // ---- literals

    fn cc(&mut self) -> Step<Regex> {
        let i = self.rule(Nonterminal::CC, &[])?;
        Ok(Regex::Class(CC_CLASSES[i]))
    }

    fn const_char(&mut self) -> Step<Regex> {
        let c = self.random_symbol(self.symbol_pool())?;
        Ok(Regex::Char(c))
    }

    fn string_const(&mut self) -> Step<Regex> {
        let pool = self.symbol_pool();
        let alnum = pool.minus(self.alpha.class_set(CharClass::Spec));
        let from = if alnum.is_empty() { pool } else { alnum };
        let len = self.rng.gen_range(2..=3);
        let mut s = String::new();
        for _ in 0..len {
            s.push(self.random_symbol(from)?);
        }
        Ok(Regex::Str(s))
    }

    /// `single` restricts to one-symbol literals (no string constants).
    fn literal(&mut self, single: bool) -> Step<Regex> {
        let mask: &[usize] = if single { &[2] } else { &[] };
        match self.rule(Nonterminal::Literal, mask)? {
            0 => self.cc(),
            1 => self.const_char(),
            _ => self.string_const(),
        }
    }

    fn literal_set(&mut self, single: bool) -> Step<Regex> {
        let mut items = vec![self.literal(single)?];
        while items.len() < 3 && self.rule(Nonterminal::LiteralSet, &[])? == 1 {
            let next = self.retry(|s| {
                let l = s.literal(single)?;
                if s.redundant_in_set(&items, &l) {
                    Err(Fail::Reject)
                } else {
                    Ok(l)
                }
            })?;
            items.push(next);
        }
        Ok(Regex::chain(BinaryOp::Or, items))
    }

    /// A literal adds nothing to an alternation, or makes an existing
    /// member pointless, when the symbol sets are nested.
    fn redundant_in_set(&self, items: &[Regex], l: &Regex) -> bool {
        let single = |r: &Regex| !matches!(r, Regex::Str(_));
        if !single(l) {
            return items.contains(l);
        }
        let set = self.alpha.mentioned(l);
        let others = items
            .iter()
            .filter(|r| single(r))
            .fold(SymSet::EMPTY, |acc, r| acc.union(self.alpha.mentioned(r)));
        set.is_subset(others)
            || items
                .iter()
                .filter(|r| single(r))
                .any(|r| self.alpha.mentioned(r).is_subset(set))
    }

    // ---- constraints

    fn min_cons_expr(&mut self) -> Step<Regex> {
        match self.rule(Nonterminal::MinConsExpr, &[])? {
            0 => self.literal(false),
            _ => {
                let l = self.literal(false)?;
                Ok(Regex::rep(l, self.k_rep()))
            }
        }
    }

    fn cons_expr(&mut self) -> Step<Regex> {
        match self.rule(Nonterminal::ConsExpr, &[])? {
            0 => self.literal_set(false),
            1 => self.min_cons_expr(),
            _ => {
                let a = self.min_cons_expr()?;
                let b = self.min_cons_expr()?;
                Ok(Regex::concat(a, b))
            }
        }
    }

    fn basic_cons(&mut self, allow_not: bool) -> Step<Regex> {
        let mask: &[usize] = if allow_not { &[] } else { &[0] };
        Ok(match self.rule(Nonterminal::BasicCons, mask)? {
            0 => Regex::not(self.basic_cons(false)?),
            1 => Regex::startwith(self.cons_expr()?),
            2 => Regex::endwith(self.cons_expr()?),
            _ => Regex::contain(self.cons_expr()?),
        })
    }

    fn length_cons(&mut self) -> Step<Regex> {
        let any = Regex::class(CharClass::Any);
        Ok(match self.rule(Nonterminal::LengthCons, &[])? {
            0 => Regex::rep(any, self.k_rep()),
            1 => Regex::repatleast(any, self.rng.gen_range(2..=6)),
            _ => {
                let (k1, k2) = self.k_range();
                Regex::reprange(any, k1, k2)
            }
        })
    }

    fn consist_of(&mut self) -> Step<Regex> {
        Ok(Regex::repatleast(self.literal_set(true)?, 1))
    }

    /// Class followed by a strictly smaller literal, for "starts with a
    /// capital but not A".
    fn adversative(&mut self, start: bool) -> Step<Regex> {
        let first = self.cc()?;
        let Regex::Class(c) = first else {
            unreachable!()
        };
        let mut subs: Vec<Regex> = Vec::new();
        if c == CharClass::Let {
            for sub in [CharClass::Cap, CharClass::Low] {
                if self.state.fits(self.alpha.class_set(sub)) {
                    subs.push(Regex::Class(sub));
                }
            }
        }
        let chars = self.alpha.class_set(c);
        let second = if !subs.is_empty() && self.rng.gen_bool(0.3) {
            subs.choose(self.rng).cloned().expect("non-empty")
        } else {
            Regex::Char(self.random_symbol(chars)?)
        };
        Ok(if start {
            Regex::and(
                Regex::startwith(first),
                Regex::not(Regex::startwith(second)),
            )
        } else {
            Regex::and(Regex::endwith(first), Regex::not(Regex::endwith(second)))
        })
    }

    fn cond_contain(&mut self) -> Step<Regex> {
        let which = self.rule(Nonterminal::CondContainCons, &[])?;
        let lit = self.literal(false)?;
        let excluded = self.literal(true)?;
        if self.alpha.mentioned(&lit) == self.alpha.mentioned(&excluded) {
            return Err(Fail::Reject);
        }
        let inner = if which == 0 {
            Regex::concat(lit, Regex::notcc(excluded))
        } else {
            Regex::concat(Regex::notcc(excluded), lit)
        };
        Ok(Regex::not(Regex::contain(inner)))
    }

    fn macro_cons(&mut self, kind: usize) -> Step<Regex> {
        match kind {
            0 => self.consist_of(),
            1 => self.adversative(true),
            2 => self.adversative(false),
            _ => self.cond_contain(),
        }
    }

    /// A constraint of the given kind: `(cons production, macro production)`.
    fn cons(&mut self, kind: (usize, usize)) -> Step<Regex> {
        let r = match kind.0 {
            0 => self.basic_cons(true)?,
            1 => self.length_cons()?,
            _ => self.macro_cons(kind.1)?,
        };
        if ast_metrics(&r).depth > self.cfg.cons_depth_cap {
            return Err(Fail::Reject);
        }
        Ok(r)
    }

    fn int_temp(&mut self, lo: usize, hi: usize, budget: u32) -> Step<(Regex, u32)> {
        let n = self.parts(lo, hi).min(budget as usize).max(1);
        let saved_allowed = self.state.allowed;
        // decide the kind of every slot first so a composed-by constraint can
        // be expanded before the others
        let mut kinds = Vec::with_capacity(n);
        let mut left = budget;
        let mut have_consist = false;
        for i in 0..n {
            let after = (n - i - 1) as u32;
            let macro_ok = left >= 2 + after;
            let cons = self.rule(Nonterminal::Cons, if macro_ok { &[] } else { &[2] })?;
            let mac = if cons == 2 {
                self.rule(
                    Nonterminal::MacroCons,
                    if have_consist { &[0] } else { &[] },
                )?
            } else {
                0
            };
            have_consist |= cons == 2 && mac == 0;
            left -= if cons == 2 { 2 } else { 1 };
            kinds.push((cons, mac));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| kinds[i] != (2, 0));
        let mut parts: Vec<Option<Regex>> = vec![None; n];
        let mut dfas: Vec<Dfa> = Vec::new();
        let mut conj: Option<Dfa> = None;
        let result = (|| {
            for &i in &order {
                let (c, d) = self.retry(|s| {
                    let c = s.cons(kinds[i])?;
                    let d = s.dfa(&c)?;
                    if d.is_empty() || d.is_universal() {
                        return Err(Fail::Reject);
                    }
                    if let Some(prev) = &conj {
                        let both = prev.intersect(&d).map_err(|_| Fail::Reject)?;
                        // conflicting, or implied by what is already there
                        if both.is_empty() || prev.is_subset(&d).unwrap_or(true) {
                            return Err(Fail::Reject);
                        }
                    }
                    Ok((c, d))
                })?;
                if kinds[i] == (2, 0) {
                    self.state.allowed = Some(literal_symbols(&self.alpha, &c));
                }
                conj = Some(match &conj {
                    Some(prev) => prev.intersect(&d).map_err(|_| Fail::Reject)?,
                    None => d.clone(),
                });
                dfas.push(d);
                parts[i] = Some(c);
            }
            // no constraint may be implied by the others
            for j in 0..dfas.len() {
                let mut rest: Option<Dfa> = None;
                for (m, d) in dfas.iter().enumerate() {
                    if m != j {
                        rest = Some(match rest {
                            Some(r) => r.intersect(d).map_err(|_| Fail::Reject)?,
                            None => d.clone(),
                        });
                    }
                }
                if let Some(rest) = rest {
                    if rest.is_subset(&dfas[j]).unwrap_or(true) {
                        return Err(Fail::Reject);
                    }
                }
            }
            Ok(())
        })();
        self.state.allowed = saved_allowed;
        result?;
        let parts: Vec<Regex> = parts.into_iter().map(|p| p.expect("filled")).collect();
        let cost = kinds.iter().map(|k| if k.0 == 2 { 2 } else { 1 }).sum();
        self.state.placed.extend(parts.iter().cloned());
        Ok((Regex::chain(BinaryOp::And, parts), cost))
    }

    // ---- components

    fn comp_expr(&mut self) -> Step<Regex> {
        match self.rule(Nonterminal::CompExpr, &[])? {
            0 => self.literal(false),
            _ => self.literal_set(false),
        }
    }

    fn basic_comp(&mut self) -> Step<Regex> {
        Ok(match self.rule(Nonterminal::BasicComp, &[])? {
            0 => self.comp_expr()?,
            1 => Regex::rep(self.comp_expr()?, self.k_rep()),
            2 => Regex::repatleast(self.comp_expr()?, self.k_atleast()),
            _ => {
                let e = self.comp_expr()?;
                let (k1, k2) = self.k_range();
                Regex::reprange(e, k1, k2)
            }
        })
    }

    fn macro_comp(&mut self) -> Step<Regex> {
        let which = self.rule(Nonterminal::MacroComp, &[])?;
        let side = |s: &mut Self| -> Step<Regex> {
            let l = s.literal(false)?;
            Ok(match which {
                0 => Regex::rep(l, s.k_rep()),
                1 => Regex::repatleast(l, s.k_atleast()),
                _ => {
                    let (k1, k2) = s.k_range();
                    Regex::reprange(l, k1, k2)
                }
            })
        };
        let a = side(self)?;
        let b = side(self)?;
        let (da, db) = (self.dfa(&a)?, self.dfa(&b)?);
        if da.is_subset(&db).unwrap_or(true) || db.is_subset(&da).unwrap_or(true) {
            return Err(Fail::Reject);
        }
        Ok(Regex::or(a, b))
    }

    /// One component costing at most `max_cost`.
    fn comp(&mut self, max_cost: u32, inside_optional: bool) -> Step<(Regex, u32)> {
        let mut base = self.cfg.base_weights(Nonterminal::Comp);
        if inside_optional {
            base[0] = 0.0;
        }
        if max_cost < 2 {
            base[2] = 0.0;
        }
        let mut options =
            adapt_weights(&self.state, Nonterminal::Comp, &base).map_err(|_| Fail::DeadEnd)?;
        for o in &mut options {
            if let Choice::Copy(i) = o.0 {
                let r = &self.state.pool[i].1;
                let cost = recognize::comp(r).unwrap_or(u32::MAX);
                if cost > max_cost || (inside_optional && matches!(r, Regex::Optional(_))) {
                    o.1 = 0.0;
                }
            }
        }
        let (r, cost, copied) = match self.draw(&options)? {
            Choice::Copy(i) => {
                let r = self.state.pool[i].1.clone();
                let cost = recognize::comp(&r).unwrap_or(1);
                (r, cost, true)
            }
            Choice::Rule(0) => {
                let (inner, cost) = self.comp(max_cost, true)?;
                (Regex::optional(inner), cost, false)
            }
            Choice::Rule(1) => (self.basic_comp()?, 1, false),
            Choice::Rule(_) => (self.macro_comp()?, 2, false),
        };
        if ast_metrics(&r).depth > self.cfg.comp_depth_cap {
            return Err(Fail::Reject);
        }
        if !copied && !inside_optional {
            self.state.remember(Pooled::Comp, r.clone());
        }
        Ok((r, cost))
    }

    fn cat_temp(&mut self, lo: usize, hi: usize, budget: u32) -> Step<(Regex, u32)> {
        let n = self.parts(lo, hi).min(budget as usize).max(1);
        let mut parts = Vec::with_capacity(n);
        let mut left = budget;
        for i in 0..n {
            let after = (n - i - 1) as u32;
            let (c, cost) = self.retry(|s| s.comp(left - after, false))?;
            left -= cost;
            parts.push(c);
        }
        self.state.placed.extend(parts.iter().cloned());
        Ok((Regex::chain(BinaryOp::Concat, parts), budget - left))
    }

    // ---- separation

    fn new_seg(&mut self, budget: u32) -> Step<(Regex, u32)> {
        let (lo, hi) = (self.cfg.seg_min_parts, self.cfg.seg_max_parts);
        let (seg, cost) = self.retry(|s| match s.rule(Nonterminal::Seg, &[])? {
            0 => s.int_temp(lo, hi, budget),
            _ => s.cat_temp(lo, hi, budget),
        })?;
        self.state.remember(Pooled::Seg, seg.clone());
        Ok((seg, cost))
    }

    /// Next segment: a copy of an earlier one or a fresh one within `budget`.
    fn next_seg(&mut self, budget: u32) -> Step<(Regex, u32)> {
        let base = self.cfg.base_weights(Nonterminal::Seg);
        let options =
            adapt_weights(&self.state, Nonterminal::Seg, &base).map_err(|_| Fail::DeadEnd)?;
        let copy_mass: f64 = options
            .iter()
            .filter(|o| matches!(o.0, Choice::Copy(_)))
            .map(|o| o.1)
            .sum();
        let fresh: Vec<(Choice, f64)> = vec![(Choice::Rule(0), 1.0 - copy_mass)];
        let mut all = fresh;
        all.extend(
            options
                .into_iter()
                .filter(|o| matches!(o.0, Choice::Copy(_))),
        );
        if budget == 0 {
            all[0].1 = 0.0;
        }
        match self.draw(&all)? {
            Choice::Copy(i) => Ok((self.state.pool[i].1.clone(), 0)),
            Choice::Rule(_) => self.new_seg(budget),
        }
    }

    fn delimiter(&mut self) -> Step<Regex> {
        let chars: Vec<char> = SPEC_CHARS.chars().collect();
        Ok(Regex::Char(*chars.choose(self.rng).expect("non-empty")))
    }

    fn sep_temp(&mut self, budget: u32) -> Step<Regex> {
        if self.rng.gen_bool(self.cfg.star_separation) {
            let (seg, _) = self.new_seg(budget)?;
            let d = self.delimiter()?;
            return Ok(Regex::concat(
                seg.clone(),
                Regex::star(Regex::concat(d, seg)),
            ));
        }
        let (s1, c1) = self.new_seg(budget.saturating_sub(2).max(1))?;
        let mut left = budget.saturating_sub(c1);
        let (s2, c2) = self.next_seg(left.saturating_sub(1))?;
        left = left.saturating_sub(c2);
        let (s3, _) = self.next_seg(left)?;
        let d = self.delimiter()?;
        Ok(Regex::chain(
            BinaryOp::Concat,
            vec![s1, d.clone(), s2, d, s3],
        ))
    }

    fn template(&mut self, t: Template) -> Step<Regex> {
        let cap = self.cfg.complexity_cap;
        let (lo, hi) = (self.cfg.min_parts, self.cfg.max_parts);
        let r = match t {
            Template::Intersection => self.int_temp(lo, hi, cap)?.0,
            Template::Concatenation => self.cat_temp(lo, hi, cap)?.0,
            Template::Separation => self.sep_temp(cap)?,
        };
        let d = self.dfa(&r)?;
        if d.is_empty() || d.is_universal() {
            return Err(Fail::Reject);
        }
        if !derivable(&r, t) || semantic_complexity(&r).map_or(true, |c| c > cap) {
            return Err(Fail::Reject);
        }
        Ok(r)
    }
}

/// Samples one regex of the given template. Invalid trees (empty or
/// universal language, redundant constraints, over the complexity cap) are
/// rejected and resampled up to `cfg.budget` times.
pub fn sample_regex<R: Rng>(
    template: Template,
    cfg: &GrammarConfig,
    rng: &mut R,
) -> Result<Regex, GrammarError> {
    let mut compiler = Compiler::new(Alphabet::standard());
    for _ in 0..cfg.budget {
        let mut s = Sampler::new(cfg, rng, compiler);
        let out = s.template(template);
        compiler = s.compiler;
        if let Ok(r) = out {
            return Ok(r);
        }
    }
    Err(GrammarError::BudgetExhausted {
        template,
        attempts: cfg.budget,
    })
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent random stream for one batch slot.
pub fn slot_rng(seed: u64, template: Template, index: u64, attempt: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    let mut h = splitmix(seed);
    for (i, part) in [template.index(), index, attempt].into_iter().enumerate() {
        h = splitmix(h ^ part.wrapping_mul(0x0100_0000_01b3).wrapping_add(i as u64));
    }
    for chunk in key.chunks_mut(8) {
        h = splitmix(h);
        chunk.copy_from_slice(&h.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Samples `count` regexes per template, pairwise inequivalent as
/// languages. Slots are sampled in parallel from their own streams and
/// accepted in slot order, so the result does not depend on thread count.
pub fn sample_batch(
    mix: &[(Template, usize)],
    cfg: &GrammarConfig,
) -> Result<Vec<(Template, Regex)>, GrammarError> {
    let slots: Vec<(Template, u64)> = mix
        .iter()
        .flat_map(|&(t, n)| (0..n as u64).map(move |i| (t, i)))
        .collect();
    let mut done: Vec<Option<Regex>> = vec![None; slots.len()];
    let mut attempts = vec![0u64; slots.len()];
    let mut seen: HashSet<Dfa> = HashSet::new();
    let mut pending: Vec<usize> = (0..slots.len()).collect();
    while !pending.is_empty() {
        let drawn: Vec<Result<(Regex, Dfa), GrammarError>> = pending
            .par_iter()
            .map(|&s| {
                let (t, i) = slots[s];
                let mut rng = slot_rng(cfg.seed, t, i, attempts[s]);
                let r = sample_regex(t, cfg, &mut rng)?;
                let d = crate::automaton::compile(&r)?;
                Ok((r, d))
            })
            .collect();
        let mut still = Vec::new();
        for (&s, res) in pending.iter().zip(drawn) {
            let (r, d) = res?;
            if seen.insert(d) {
                done[s] = Some(r);
            } else {
                attempts[s] += 1;
                if attempts[s] as usize > cfg.budget {
                    return Err(GrammarError::BudgetExhausted {
                        template: slots[s].0,
                        attempts: cfg.budget,
                    });
                }
                still.push(s);
            }
        }
        pending = still;
    }
    Ok(slots
        .iter()
        .zip(done)
        .map(|(&(t, _), r)| (t, r.expect("filled")))
        .collect())
}
