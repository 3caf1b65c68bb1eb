//! The derivation space searched by the synthesizer: the template grammar
//! as typed symbols, with constants drawn from the examples.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, SPEC_CHARS};
use crate::dsl::{CharClass, Count, HoleFill, Regex};
use crate::grammar::Template;

/// A pending grammar symbol. Numeric payloads bound the remaining number of
/// parts so every derivation terminates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Start,
    IntTemp(u8),
    Cons,
    BasicCons,
    BasicConsNoNot,
    LengthCons,
    ConsExpr,
    MinConsExpr,
    CatTemp(u8),
    Comp,
    CompNoOpt,
    BasicComp,
    MacroComp,
    SepTemp,
    Seg,
    /// Second or third segment: a new one or a copy of an earlier one.
    SegOrCopy(u8),
    /// Copy of the first segment (star form).
    SegCopy,
    Delim,
    /// Same delimiter as the first one.
    DelimCopy,
    Literal,
    LitSingle,
    CC,
    LiteralSet(u8),
    LiteralSetSingle(u8),
    KRep,
    KAtLeast,
    KLower,
    KUpper,
}

/// One way to expand a symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Production {
    pub fill: HoleFill,
    /// Symbols for the holes `fill` introduces, in pre-order.
    pub children: Vec<Sym>,
    pub logp: f64,
}

/// Limits and constants of the search space.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub template: Option<Template>,
    pub max_parts: u8,
    pub seg_parts: u8,
    pub max_set: u8,
    pub max_count: u32,
    chars: Vec<char>,
    strings: Vec<String>,
    delims: Vec<char>,
}

/// Ratio between the probabilities of consecutive counts.
const COUNT_DECAY: f64 = 0.6;

const CLASSES: [CharClass; 5] = [
    CharClass::Num,
    CharClass::Let,
    CharClass::Low,
    CharClass::Cap,
    CharClass::Spec,
];

impl Space {
    /// Constants come from the examples: characters in at least half of the
    /// positives, characters only seen in negatives, and substrings of
    /// length 2-3 shared by at least half of the positives.
    pub fn from_examples<S: AsRef<str>>(pos: &[S], neg: &[S], template: Option<Template>) -> Space {
        let alpha = Alphabet::standard();
        let known = |c: &char| alpha.index_of(*c).is_some();
        // characters by the number of positives containing them
        let mut freq: BTreeMap<char, usize> = BTreeMap::new();
        for s in pos {
            let mut here: Vec<char> = s.as_ref().chars().filter(known).collect();
            here.sort();
            here.dedup();
            for c in here {
                *freq.entry(c).or_default() += 1;
            }
        }
        let need_char = pos.len().div_ceil(2).max(1);
        let mut chars: Vec<(char, usize)> = freq
            .iter()
            .filter(|c| *c.1 >= need_char)
            .map(|(c, n)| (*c, *n))
            .collect();
        chars.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut chars: Vec<char> = chars.into_iter().take(10).map(|c| c.0).collect();
        let mut extra: Vec<char> = neg
            .iter()
            .flat_map(|s| s.as_ref().chars().collect::<Vec<_>>())
            .filter(|c| known(c) && !freq.contains_key(c))
            .collect();
        extra.sort();
        extra.dedup();
        chars.extend(extra.into_iter().take(4));

        let mut subs: BTreeMap<String, usize> = BTreeMap::new();
        for s in pos {
            let cs: Vec<char> = s.as_ref().chars().collect();
            let mut here: Vec<String> = Vec::new();
            for len in 2..=3 {
                for w in cs.windows(len) {
                    if w.iter().all(known) {
                        here.push(w.iter().collect());
                    }
                }
            }
            here.sort();
            here.dedup();
            for h in here {
                *subs.entry(h).or_default() += 1;
            }
        }
        let need = pos.len().div_ceil(2).max(2);
        let mut strings: Vec<(String, usize)> = subs.into_iter().filter(|s| s.1 >= need).collect();
        strings.sort_by(|a, b| {
            b.1.cmp(&a.1)
                .then(b.0.len().cmp(&a.0.len()))
                .then(a.0.cmp(&b.0))
        });
        let strings = strings.into_iter().take(5).map(|s| s.0).collect();

        let mut delims: Vec<char> = SPEC_CHARS
            .chars()
            .filter(|c| pos.iter().any(|s| s.as_ref().contains(*c)))
            .collect();
        if delims.is_empty() {
            delims = SPEC_CHARS.chars().take(4).collect();
        }
        Space {
            template,
            max_parts: 3,
            seg_parts: 2,
            max_set: 3,
            max_count: 9,
            chars,
            strings,
            delims,
        }
    }

    pub fn constants(&self) -> (&[char], &[String]) {
        (&self.chars, &self.strings)
    }

    /// Expansions of `sym`, the first pending symbol of `ast`.
    pub fn productions(&self, sym: Sym, ast: &Regex) -> Vec<Production> {
        use Sym::*;
        let h = || Regex::Hole;
        let any = || Regex::Class(CharClass::Any);
        let e = |r: Regex, children: Vec<Sym>| (HoleFill::Expr(r), children);
        let mut out: Vec<(HoleFill, Vec<Sym>)> = Vec::new();
        match sym {
            Start => {
                // Start only renames the root hole
                for t in Template::ALL {
                    if self.template.is_none_or(|x| x == t) {
                        let next = match t {
                            Template::Intersection => IntTemp(self.max_parts),
                            Template::Concatenation => CatTemp(self.max_parts),
                            Template::Separation => SepTemp,
                        };
                        out.push(e(h(), vec![next]));
                    }
                }
            }
            IntTemp(n) => {
                out.push(e(h(), vec![Cons]));
                if n > 1 {
                    out.push(e(Regex::and(h(), h()), vec![Cons, IntTemp(n - 1)]));
                }
            }
            Cons => {
                out.push(e(h(), vec![BasicCons]));
                out.push(e(h(), vec![LengthCons]));
                out.push(e(
                    Regex::repatleast(h(), 1),
                    vec![LiteralSetSingle(self.max_set)],
                ));
                out.push(e(
                    Regex::and(Regex::startwith(h()), Regex::not(Regex::startwith(h()))),
                    vec![CC, LitSingle],
                ));
                out.push(e(
                    Regex::and(Regex::endwith(h()), Regex::not(Regex::endwith(h()))),
                    vec![CC, LitSingle],
                ));
                out.push(e(
                    Regex::not(Regex::contain(Regex::concat(h(), Regex::notcc(h())))),
                    vec![Literal, LitSingle],
                ));
                out.push(e(
                    Regex::not(Regex::contain(Regex::concat(Regex::notcc(h()), h()))),
                    vec![LitSingle, Literal],
                ));
                // basic, length and macro equally likely; the two orders of
                // the conditional-contain macro share one macro's share
                let third = 1.0 / 3.0;
                let m = third / 4.0;
                return weighted(out, &[third, third, m, m, m, m / 2.0, m / 2.0]);
            }
            BasicCons | BasicConsNoNot => {
                if sym == BasicCons {
                    out.push(e(Regex::not(h()), vec![BasicConsNoNot]));
                }
                out.push(e(Regex::startwith(h()), vec![ConsExpr]));
                out.push(e(Regex::endwith(h()), vec![ConsExpr]));
                out.push(e(Regex::contain(h()), vec![ConsExpr]));
            }
            LengthCons => {
                out.push(e(Regex::Rep(Box::new(any()), Count::Hole), vec![KRep]));
                out.push(e(
                    Regex::RepAtLeast(Box::new(any()), Count::Hole),
                    vec![KAtLeast],
                ));
                out.push(e(
                    Regex::RepRange(Box::new(any()), Count::Hole, Count::Hole),
                    vec![KLower, KUpper],
                ));
            }
            ConsExpr => {
                out.push(e(h(), vec![LiteralSet(self.max_set)]));
                out.push(e(
                    Regex::Rep(Box::new(h()), Count::Hole),
                    vec![Literal, KRep],
                ));
                out.push(e(Regex::concat(h(), h()), vec![MinConsExpr, MinConsExpr]));
            }
            MinConsExpr => {
                out.push(e(h(), vec![Literal]));
                out.push(e(
                    Regex::Rep(Box::new(h()), Count::Hole),
                    vec![Literal, KRep],
                ));
            }
            CatTemp(n) => {
                out.push(e(h(), vec![Comp]));
                if n > 1 {
                    out.push(e(Regex::concat(h(), h()), vec![Comp, CatTemp(n - 1)]));
                }
            }
            Comp | CompNoOpt => {
                if sym == Comp {
                    out.push(e(Regex::optional(h()), vec![CompNoOpt]));
                }
                out.push(e(h(), vec![BasicComp]));
                out.push(e(h(), vec![MacroComp]));
            }
            BasicComp => {
                let set = LiteralSet(self.max_set);
                out.push(e(h(), vec![set]));
                out.push(e(Regex::Rep(Box::new(h()), Count::Hole), vec![set, KRep]));
                out.push(e(
                    Regex::RepAtLeast(Box::new(h()), Count::Hole),
                    vec![set, KAtLeast],
                ));
                out.push(e(
                    Regex::RepRange(Box::new(h()), Count::Hole, Count::Hole),
                    vec![set, KLower, KUpper],
                ));
            }
            MacroComp => {
                let rep = || Regex::Rep(Box::new(Regex::Hole), Count::Hole);
                let atl = || Regex::RepAtLeast(Box::new(Regex::Hole), Count::Hole);
                let rng = || Regex::RepRange(Box::new(Regex::Hole), Count::Hole, Count::Hole);
                out.push(e(
                    Regex::or(rep(), rep()),
                    vec![Literal, KRep, Literal, KRep],
                ));
                out.push(e(
                    Regex::or(atl(), atl()),
                    vec![Literal, KAtLeast, Literal, KAtLeast],
                ));
                out.push(e(
                    Regex::or(rng(), rng()),
                    vec![Literal, KLower, KUpper, Literal, KLower, KUpper],
                ));
            }
            SepTemp => {
                out.push(e(
                    Regex::concat(
                        h(),
                        Regex::concat(h(), Regex::concat(h(), Regex::concat(h(), h()))),
                    ),
                    vec![Seg, Delim, SegOrCopy(1), DelimCopy, SegOrCopy(2)],
                ));
                out.push(e(
                    Regex::concat(h(), Regex::star(Regex::concat(h(), h()))),
                    vec![Seg, Delim, SegCopy],
                ));
            }
            Seg => {
                out.push(e(h(), vec![IntTemp(self.seg_parts)]));
                out.push(e(h(), vec![CatTemp(self.seg_parts)]));
            }
            SegOrCopy(n) => {
                out.push(e(h(), vec![Seg]));
                for seg in segments(ast).into_iter().take(n as usize) {
                    out.push(e(seg, vec![]));
                }
            }
            SegCopy => {
                if let Some(seg) = segments(ast).into_iter().next() {
                    out.push(e(seg, vec![]));
                }
            }
            Delim => {
                for &c in &self.delims {
                    out.push(e(Regex::Char(c), vec![]));
                }
            }
            DelimCopy => {
                if let Regex::Concat(_, rest) = ast {
                    if let Regex::Concat(d, _) = rest.as_ref() {
                        out.push(e((**d).clone(), vec![]));
                    }
                }
            }
            Literal | LitSingle => {
                // class, character constant and string constant are equally
                // likely groups
                let mut groups: Vec<Vec<Regex>> = vec![
                    CLASSES.iter().map(|c| Regex::Class(*c)).collect(),
                    self.chars.iter().map(|c| Regex::Char(*c)).collect(),
                ];
                if sym == Literal {
                    groups.push(self.strings.iter().map(|s| Regex::Str(s.clone())).collect());
                }
                groups.retain(|g| !g.is_empty());
                let g = groups.len() as f64;
                let mut prods = Vec::new();
                for group in groups {
                    let n = group.len() as f64;
                    for r in group {
                        prods.push(Production {
                            fill: HoleFill::Expr(r),
                            children: vec![],
                            logp: -(g * n).ln(),
                        });
                    }
                }
                return prods;
            }
            CC => {
                for c in CLASSES {
                    out.push(e(Regex::Class(c), vec![]));
                }
            }
            LiteralSet(n) | LiteralSetSingle(n) => {
                let (lit, next) = match sym {
                    LiteralSet(_) => (Literal, LiteralSet(n.saturating_sub(1))),
                    _ => (LitSingle, LiteralSetSingle(n.saturating_sub(1))),
                };
                out.push(e(h(), vec![lit]));
                if n > 1 {
                    out.push(e(Regex::or(h(), h()), vec![lit, next]));
                }
            }
            KRep | KAtLeast | KLower => {
                let hi = if sym == KLower {
                    self.max_count - 1
                } else {
                    self.max_count
                };
                return geometric((1..=hi).collect());
            }
            KUpper => {
                let lo = pending_lower(ast).unwrap_or(0);
                return geometric((lo + 1..=self.max_count.max(lo + 1)).collect());
            }
        }
        uniform(out)
    }
}

fn uniform(out: Vec<(HoleFill, Vec<Sym>)>) -> Vec<Production> {
    let n = out.len() as f64;
    out.into_iter()
        .map(|(fill, children)| Production {
            fill,
            children,
            logp: -n.ln(),
        })
        .collect()
}

/// Counts in increasing order with probabilities decaying by `COUNT_DECAY`.
fn geometric(ks: Vec<u32>) -> Vec<Production> {
    let w: Vec<f64> = (0..ks.len()).map(|i| COUNT_DECAY.powi(i as i32)).collect();
    let total: f64 = w.iter().sum();
    ks.into_iter()
        .zip(w)
        .map(|(k, w)| Production {
            fill: HoleFill::Count(k),
            children: vec![],
            logp: (w / total).ln(),
        })
        .collect()
}

fn weighted(out: Vec<(HoleFill, Vec<Sym>)>, w: &[f64]) -> Vec<Production> {
    out.into_iter()
        .zip(w)
        .map(|((fill, children), w)| Production {
            fill,
            children,
            logp: w.ln(),
        })
        .collect()
}

/// Complete segments of a separation root, in order.
fn segments(ast: &Regex) -> Vec<Regex> {
    let mut out = Vec::new();
    if let Regex::Concat(s1, rest) = ast {
        if s1.is_complete() {
            out.push((**s1).clone());
        }
        if let Regex::Concat(_, rest) = rest.as_ref() {
            if let Regex::Concat(s2, _) = rest.as_ref() {
                if s2.is_complete() {
                    out.push((**s2).clone());
                }
            }
        }
    }
    out
}

/// Lower bound of the `reprange` whose upper bound is the next hole.
fn pending_lower(r: &Regex) -> Option<u32> {
    fn go(r: &Regex) -> Option<Option<u32>> {
        if matches!(r, Regex::Hole) {
            return Some(None);
        }
        for c in r.children() {
            if let Some(v) = go(c) {
                return Some(v);
            }
        }
        match r {
            Regex::RepRange(_, k1, Count::Hole) if *k1 != Count::Hole => Some(k1.value()),
            _ if r.counts().contains(&Count::Hole) => Some(None),
            _ => None,
        }
    }
    go(r).flatten()
}
