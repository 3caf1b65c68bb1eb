//! Abstract figures: a regex drawn as a row of blocks whose content and
//! constraints are given by shaded block ends and linked textual hints.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{print_dsl, CharClass, Count, Regex};
use crate::grammar::recognize::{
    cat_temp, comp, consist_of, int_temp, literal_set, macro_comp, macro_cons,
};
use crate::grammar::{template_of, Template};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FigureError {
    #[error("expression is not shaped like any template: {0}")]
    NotTemplate(String),
    #[error("label {0} is empty")]
    EmptyLabel(usize),
    #[error("link {0} points outside the figure")]
    DanglingLink(usize),
    #[error("link {link}: no hint phrasing matches `{text}`")]
    Unreadable { link: usize, text: String },
}

/// One kind of constraint or component, as counted by the figure audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    StartWith,
    EndWith,
    NotStartWith,
    NotEndWith,
    Contain,
    NotContain,
    Length,
    LengthAtLeast,
    LengthRange,
    ConsistOf,
    AdvStartWith,
    AdvEndWith,
    CondContain,
    Literal,
    Rep,
    RepAtLeast,
    RepRange,
    Alternation,
    Optional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockShape {
    /// A whole string described by constraints.
    Constraint,
    /// One piece of a concatenation.
    Component,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub shape: BlockShape,
    /// Segment index; blocks of one segment share a group.
    pub group: usize,
    /// Nesting depth of `optional` around the component, drawn dashed.
    #[serde(default)]
    pub optional: u32,
    /// The block stands for a repeated segment.
    #[serde(default)]
    pub repeated: bool,
}

/// Where a link attaches: shaded head, shaded tail, or the block body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Head,
    Tail,
    Body,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub block: usize,
    pub label: usize,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelimiterMark {
    /// The mark sits before the first block of this group.
    pub before_group: usize,
    pub symbol: char,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FigureSpec {
    pub template: Template,
    pub blocks: Vec<Block>,
    pub labels: Vec<String>,
    pub links: Vec<Link>,
    pub delimiters: Vec<DelimiterMark>,
    #[serde(default)]
    pub positives: Vec<String>,
    #[serde(default)]
    pub negatives: Vec<String>,
}

impl FigureSpec {
    pub fn with_examples(mut self, positives: Vec<String>, negatives: Vec<String>) -> FigureSpec {
        self.positives = positives;
        self.negatives = negatives;
        self
    }

    pub fn validate(&self) -> Result<(), FigureError> {
        if let Some(i) = self.labels.iter().position(|l| l.trim().is_empty()) {
            return Err(FigureError::EmptyLabel(i));
        }
        if let Some(i) = self
            .links
            .iter()
            .position(|l| l.block >= self.blocks.len() || l.label >= self.labels.len())
        {
            return Err(FigureError::DanglingLink(i));
        }
        Ok(())
    }

    /// Number of links attached to each label.
    pub fn label_uses(&self) -> Vec<usize> {
        let mut uses = vec![0; self.labels.len()];
        for l in &self.links {
            uses[l.label] += 1;
        }
        uses
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Family {
    Head,
    Tail,
    ConstraintBody,
    ComponentBody,
}

fn family(shape: BlockShape, role: Role) -> Family {
    match (shape, role) {
        (_, Role::Head) => Family::Head,
        (_, Role::Tail) => Family::Tail,
        (BlockShape::Constraint, Role::Body) => Family::ConstraintBody,
        (BlockShape::Component, Role::Body) => Family::ComponentBody,
    }
}

use ConstraintKind as K;

/// Hint phrasings per kind. `{x}`/`{y}` stand for literal descriptions,
/// `{k}`/`{k1}`/`{k2}` for counts.
const POOL: &[(Family, ConstraintKind, &[&str])] = &[
    (Family::Head, K::StartWith, &["{x}"]),
    (Family::Head, K::NotStartWith, &["not {x}", "never {x}"]),
    (
        Family::Head,
        K::AdvStartWith,
        &["{x} but not {y}", "{x} except {y}"],
    ),
    (Family::Tail, K::EndWith, &["{x}"]),
    (Family::Tail, K::NotEndWith, &["not {x}", "never {x}"]),
    (
        Family::Tail,
        K::AdvEndWith,
        &["{x} but not {y}", "{x} except {y}"],
    ),
    (
        Family::ConstraintBody,
        K::Contain,
        &["contain {x}", "have {x}", "include {x}"],
    ),
    (
        Family::ConstraintBody,
        K::NotContain,
        &["not contain {x}", "never have {x}", "exclude {x}"],
    ),
    (
        Family::ConstraintBody,
        K::Length,
        &["exactly {k} characters", "length {k}"],
    ),
    (
        Family::ConstraintBody,
        K::LengthAtLeast,
        &["at least {k} characters", "{k} or more characters"],
    ),
    (
        Family::ConstraintBody,
        K::LengthRange,
        &[
            "{k1} to {k2} characters",
            "between {k1} and {k2} characters",
        ],
    ),
    (
        Family::ConstraintBody,
        K::ConsistOf,
        &["only {x}", "consist of {x}", "made up of {x}"],
    ),
    (
        Family::ConstraintBody,
        K::CondContain,
        &[
            "{x} must be followed by {y}",
            "{x} always followed by {y}",
            "{x} must be preceded by {y}",
            "{x} always preceded by {y}",
        ],
    ),
    (Family::ComponentBody, K::Literal, &["{x}"]),
    (
        Family::ComponentBody,
        K::Rep,
        &["exactly {k} of {x}", "{k} × {x}"],
    ),
    (
        Family::ComponentBody,
        K::RepAtLeast,
        &["at least {k} of {x}", "{k} or more of {x}"],
    ),
    (
        Family::ComponentBody,
        K::RepRange,
        &["{k1} to {k2} of {x}", "between {k1} and {k2} of {x}"],
    ),
    (
        Family::ComponentBody,
        K::Alternation,
        &["either {x} or {y}", "{x}, or else {y}"],
    ),
];

fn phrasings(kind: ConstraintKind) -> &'static [&'static str] {
    POOL.iter()
        .find(|(_, k, _)| *k == kind)
        .map(|(_, _, p)| *p)
        .expect("every label kind has phrasings")
}

fn fill(template: &str, x: &str, y: &str, k1: Count, k2: Count) -> String {
    template
        .replace("{x}", x)
        .replace("{y}", y)
        .replace("{k1}", &k1.to_string())
        .replace("{k2}", &k2.to_string())
        .replace("{k}", &k1.to_string())
}

fn class_phrase(c: CharClass) -> &'static str {
    match c {
        CharClass::Num => "a digit",
        CharClass::Let => "a letter",
        CharClass::Low => "a lowercase letter",
        CharClass::Cap => "a capital letter",
        CharClass::Spec => "a special character",
        CharClass::Any => "any character",
        CharClass::Null => "nothing",
    }
}

/// Plain-words rendering of a literal expression.
pub fn describe(r: &Regex) -> String {
    match r {
        Regex::Class(c) => class_phrase(*c).to_string(),
        Regex::Char(c) => format!("\"{c}\""),
        Regex::Str(s) => format!("\"{s}\""),
        Regex::AnonConst => "a constant".to_string(),
        Regex::Or(..) => r
            .spine(crate::dsl::BinaryOp::Or)
            .into_iter()
            .map(describe)
            .collect::<Vec<_>>()
            .join(" or "),
        Regex::Rep(x, k) => format!("{k} × {}", describe(x)),
        Regex::Concat(a, b) => format!("{} then {}", describe(a), describe(b)),
        Regex::NotCc(x) => format!("anything but {}", describe(x)),
        other => print_dsl(other),
    }
}

/// One constraint or component with what its label needs.
struct Piece<'a> {
    kind: ConstraintKind,
    role: Role,
    /// Subtree whose identity decides label sharing.
    node: &'a Regex,
    x: String,
    y: String,
    k1: Count,
    k2: Count,
    /// Index range into the kind's phrasings.
    variants: std::ops::Range<usize>,
}

impl<'a> Piece<'a> {
    fn new(kind: ConstraintKind, role: Role, node: &'a Regex) -> Piece<'a> {
        Piece {
            kind,
            role,
            node,
            x: String::new(),
            y: String::new(),
            k1: Count::Hole,
            k2: Count::Hole,
            variants: 0..phrasings(kind).len(),
        }
    }

    fn x(mut self, r: &Regex) -> Self {
        self.x = describe(r);
        self
    }

    fn y(mut self, r: &Regex) -> Self {
        self.y = describe(r);
        self
    }

    fn k(mut self, k1: Count, k2: Count) -> Self {
        self.k1 = k1;
        self.k2 = k2;
        self
    }
}

fn not_template(r: &Regex) -> FigureError {
    FigureError::NotTemplate(print_dsl(r))
}

fn is_any(r: &Regex) -> bool {
    matches!(r, Regex::Class(CharClass::Any))
}

/// Constraints of an intersection, preferring a macro reading of a node
/// over splitting it.
fn int_parts(r: &Regex) -> Option<Vec<&Regex>> {
    if macro_cons(r) || !matches!(r, Regex::And(..)) {
        return crate::grammar::recognize::cons(r).map(|_| vec![r]);
    }
    let Regex::And(a, b) = r else { unreachable!() };
    crate::grammar::recognize::cons(a)?;
    int_temp(b)?;
    let mut out = vec![a.as_ref()];
    out.extend(int_parts(b)?);
    Some(out)
}

fn cons_piece(r: &Regex) -> Option<Piece<'_>> {
    Some(match r {
        Regex::Rep(x, k) if is_any(x) => Piece::new(K::Length, Role::Body, r).k(*k, *k),
        Regex::RepAtLeast(x, k) if is_any(x) => {
            Piece::new(K::LengthAtLeast, Role::Body, r).k(*k, *k)
        }
        Regex::RepRange(x, k1, k2) if is_any(x) => {
            Piece::new(K::LengthRange, Role::Body, r).k(*k1, *k2)
        }
        Regex::RepAtLeast(x, _) if consist_of(r) => Piece::new(K::ConsistOf, Role::Body, r).x(x),
        Regex::StartWith(x) => Piece::new(K::StartWith, Role::Head, r).x(x),
        Regex::EndWith(x) => Piece::new(K::EndWith, Role::Tail, r).x(x),
        Regex::Contain(x) => Piece::new(K::Contain, Role::Body, r).x(x),
        Regex::And(a, b) => {
            let Regex::Not(n) = b.as_ref() else {
                return None;
            };
            match (a.as_ref(), n.as_ref()) {
                (Regex::StartWith(x), Regex::StartWith(y)) => {
                    Piece::new(K::AdvStartWith, Role::Head, r).x(x).y(y)
                }
                (Regex::EndWith(x), Regex::EndWith(y)) => {
                    Piece::new(K::AdvEndWith, Role::Tail, r).x(x).y(y)
                }
                _ => return None,
            }
        }
        Regex::Not(n) => match n.as_ref() {
            Regex::Contain(c) => match c.as_ref() {
                Regex::Concat(a, b)
                    if matches!(b.as_ref(), Regex::NotCc(_)) && a.is_literal_or_anon() =>
                {
                    let Regex::NotCc(s) = b.as_ref() else {
                        unreachable!()
                    };
                    let mut p = Piece::new(K::CondContain, Role::Body, r).x(a).y(s);
                    p.variants = 0..2;
                    p
                }
                Regex::Concat(a, b)
                    if matches!(a.as_ref(), Regex::NotCc(_)) && b.is_literal_or_anon() =>
                {
                    let Regex::NotCc(s) = a.as_ref() else {
                        unreachable!()
                    };
                    let mut p = Piece::new(K::CondContain, Role::Body, r).x(b).y(s);
                    p.variants = 2..4;
                    p
                }
                _ => Piece::new(K::NotContain, Role::Body, r).x(c),
            },
            Regex::StartWith(x) => Piece::new(K::NotStartWith, Role::Head, r).x(x),
            Regex::EndWith(x) => Piece::new(K::NotEndWith, Role::Tail, r).x(x),
            // a doubly negated constraint reads as the constraint itself
            Regex::Not(inner) => {
                let mut p = cons_piece(inner)?;
                p.node = r;
                p
            }
            _ => return None,
        },
        _ => return None,
    })
}

trait LiteralExt {
    fn is_literal_or_anon(&self) -> bool;
}

impl LiteralExt for Regex {
    fn is_literal_or_anon(&self) -> bool {
        self.is_literal() || matches!(self, Regex::AnonConst)
    }
}

/// Strips `optional` wrappers, returning their count.
fn unwrap_optional(r: &Regex) -> (&Regex, u32) {
    match r {
        Regex::Optional(x) => {
            let (inner, n) = unwrap_optional(x);
            (inner, n + 1)
        }
        _ => (r, 0),
    }
}

fn comp_piece(r: &Regex) -> Option<Piece<'_>> {
    Some(match r {
        _ if literal_set(r) => Piece::new(K::Literal, Role::Body, r).x(r),
        Regex::Rep(x, k) if literal_set(x) => Piece::new(K::Rep, Role::Body, r).x(x).k(*k, *k),
        Regex::RepAtLeast(x, k) if literal_set(x) => {
            Piece::new(K::RepAtLeast, Role::Body, r).x(x).k(*k, *k)
        }
        Regex::RepRange(x, k1, k2) if literal_set(x) => {
            Piece::new(K::RepRange, Role::Body, r).x(x).k(*k1, *k2)
        }
        Regex::Or(a, b) if macro_comp(r) => Piece::new(K::Alternation, Role::Body, r).x(a).y(b),
        _ => return None,
    })
}

fn cat_parts(r: &Regex) -> Option<Vec<&Regex>> {
    cat_temp(r)?;
    let parts = r.spine(crate::dsl::BinaryOp::Concat);
    parts.iter().all(|p| comp(p).is_some()).then_some(parts)
}

enum Seg<'a> {
    Int(Vec<&'a Regex>),
    Cat(Vec<&'a Regex>),
}

/// Reads a segment as a concatenation unless the intersection reading is
/// strictly cheaper.
fn segment(r: &Regex) -> Option<Seg<'_>> {
    match (int_temp(r), cat_temp(r)) {
        (Some(i), Some(c)) if i < c => int_parts(r).map(Seg::Int),
        (_, Some(_)) => cat_parts(r).map(Seg::Cat),
        (Some(_), None) => int_parts(r).map(Seg::Int),
        (None, None) => None,
    }
}

/// Segments, delimiters, and whether the last segment repeats.
fn sep_parts(r: &Regex) -> Option<(Vec<&Regex>, Vec<char>, bool)> {
    let delim = |d: &Regex| match d {
        Regex::Char(c) => Some(*c),
        Regex::AnonConst => Some('?'),
        _ => None,
    };
    let Regex::Concat(s1, rest) = r else {
        return None;
    };
    if let Regex::Star(inner) = rest.as_ref() {
        let Regex::Concat(d, s2) = inner.as_ref() else {
            return None;
        };
        return Some((vec![s1, s2], vec![delim(d)?], true));
    }
    let Regex::Concat(d1, rest) = rest.as_ref() else {
        return None;
    };
    let Regex::Concat(s2, rest) = rest.as_ref() else {
        return None;
    };
    let Regex::Concat(d2, s3) = rest.as_ref() else {
        return None;
    };
    Some((vec![s1, s2, s3], vec![delim(d1)?, delim(d2)?], false))
}

/// Blocks and the pieces linked to each, in drawing order.
type Layout<'a> = Vec<(Block, Vec<Piece<'a>>)>;

fn push_seg<'a>(blocks: &mut Layout<'a>, seg: Seg<'a>, group: usize, repeated: bool) -> Option<()> {
    match seg {
        Seg::Int(parts) => {
            let pieces = parts
                .into_iter()
                .map(cons_piece)
                .collect::<Option<Vec<_>>>()?;
            blocks.push((
                Block {
                    shape: BlockShape::Constraint,
                    group,
                    optional: 0,
                    repeated,
                },
                pieces,
            ));
        }
        Seg::Cat(parts) => {
            for p in parts {
                let (inner, optional) = unwrap_optional(p);
                let piece = comp_piece(inner)?;
                blocks.push((
                    Block {
                        shape: BlockShape::Component,
                        group,
                        optional,
                        repeated,
                    },
                    vec![piece],
                ));
            }
        }
    }
    Some(())
}

fn layout(r: &Regex) -> Result<(Template, Layout<'_>, Vec<DelimiterMark>), FigureError> {
    let t = template_of(r).ok_or_else(|| not_template(r))?;
    let mut blocks: Layout = Vec::new();
    let mut delimiters = Vec::new();
    let ok = match t {
        Template::Intersection => {
            int_parts(r).and_then(|p| push_seg(&mut blocks, Seg::Int(p), 0, false))
        }
        Template::Concatenation => {
            cat_parts(r).and_then(|p| push_seg(&mut blocks, Seg::Cat(p), 0, false))
        }
        Template::Separation => sep_parts(r).and_then(|(segs, delims, star)| {
            let last = segs.len() - 1;
            for (g, s) in segs.into_iter().enumerate() {
                push_seg(&mut blocks, segment(s)?, g, star && g == last)?;
            }
            for (i, d) in delims.into_iter().enumerate() {
                delimiters.push(DelimiterMark {
                    before_group: i + 1,
                    symbol: d,
                });
            }
            Some(())
        }),
    };
    ok.ok_or_else(|| not_template(r))?;
    Ok((t, blocks, delimiters))
}

/// Multiset (sorted) of constraint and component kinds of a template-shaped
/// regex, counting every occurrence including copies.
pub fn constraint_kinds(r: &Regex) -> Result<Vec<ConstraintKind>, FigureError> {
    let (_, blocks, _) = layout(r)?;
    let mut out = Vec::new();
    for (b, pieces) in &blocks {
        out.extend(std::iter::repeat_n(K::Optional, b.optional as usize));
        out.extend(pieces.iter().map(|p| p.kind));
    }
    out.sort();
    Ok(out)
}

/// Builds the figure of a template-shaped regex. Identical subtrees share a
/// label; each label's phrasing is drawn from its kind's synonym pool.
pub fn figure_spec<R: Rng>(r: &Regex, rng: &mut R) -> Result<FigureSpec, FigureError> {
    let (template, laid, delimiters) = layout(r)?;
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<(Role, String), usize> = HashMap::new();
    let mut blocks = Vec::new();
    let mut links = Vec::new();
    for (bi, (block, pieces)) in laid.into_iter().enumerate() {
        blocks.push(block);
        for p in pieces {
            let key = (p.role, print_dsl(p.node));
            let label = *index.entry(key).or_insert_with(|| {
                let choices: Vec<&str> = phrasings(p.kind)[p.variants.clone()].to_vec();
                let phrase = choices.choose(rng).expect("non-empty pool");
                labels.push(fill(phrase, &p.x, &p.y, p.k1, p.k2));
                labels.len() - 1
            });
            links.push(Link {
                block: bi,
                label,
                role: p.role,
            });
        }
    }
    let spec = FigureSpec {
        template,
        blocks,
        labels,
        links,
        delimiters,
        positives: Vec::new(),
        negatives: Vec::new(),
    };
    spec.validate()?;
    Ok(spec)
}

/// Anchored pattern per phrasing, most specific (longest fixed text) first.
fn matchers() -> &'static [(Family, ConstraintKind, regex::Regex)] {
    static CELL: OnceLock<Vec<(Family, ConstraintKind, regex::Regex)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut v = Vec::new();
        for (fam, kind, phrases) in POOL {
            for ph in *phrases {
                let mut pat = String::from("^");
                let mut fixed = 0;
                let mut rest = *ph;
                while let Some(open) = rest.find('{') {
                    let close = open + rest[open..].find('}').expect("closed placeholder");
                    pat.push_str(&regex::escape(&rest[..open]));
                    fixed += rest[..open].len();
                    pat.push_str(match &rest[open + 1..close] {
                        "x" | "y" => "(.+)",
                        _ => r"(\S+)",
                    });
                    rest = &rest[close + 1..];
                }
                pat.push_str(&regex::escape(rest));
                fixed += rest.len();
                pat.push('$');
                v.push((
                    fixed,
                    *fam,
                    *kind,
                    regex::Regex::new(&pat).expect("valid pattern"),
                ));
            }
        }
        v.sort_by_key(|e| std::cmp::Reverse(e.0));
        v.into_iter().map(|(_, f, k, r)| (f, k, r)).collect()
    })
}

/// Reconstructs the constraint-kind multiset (sorted) from the figure
/// alone: block glyphs give optionality, link roles give the shaded end,
/// and label text is read back against the phrasing pool.
pub fn audit(spec: &FigureSpec) -> Result<Vec<ConstraintKind>, FigureError> {
    spec.validate()?;
    let mut out = Vec::new();
    for b in &spec.blocks {
        out.extend(std::iter::repeat_n(K::Optional, b.optional as usize));
    }
    for (i, l) in spec.links.iter().enumerate() {
        let fam = family(spec.blocks[l.block].shape, l.role);
        let text = &spec.labels[l.label];
        let kind = matchers()
            .iter()
            .find(|(f, _, re)| *f == fam && re.is_match(text))
            .map(|(_, k, _)| *k)
            .ok_or_else(|| FigureError::Unreadable {
                link: i,
                text: text.clone(),
            })?;
        out.push(kind);
    }
    out.sort();
    Ok(out)
}
