//! Recognizer for the structured grammar, doubling as the semantic
//! complexity measure: every derivation is scored (constraints and
//! components count one, macros two) and the cheapest derivation within a
//! template wins.

use crate::dsl::{CharClass, Count, DslError, Regex};

use super::Template;

/// True iff `r` is generated by the grammar rules of `template`.
pub fn derivable(r: &Regex, template: Template) -> bool {
    score(r, template).is_some()
}

/// Semantic complexity under the template reported by [`template_of`].
pub fn semantic_complexity(r: &Regex) -> Result<u32, DslError> {
    template_of(r)
        .and_then(|t| score(r, t))
        .ok_or_else(|| DslError::NotTemplateShaped(r.to_string()))
}

/// Semantic complexity of the cheapest derivation under `template`.
pub fn semantic_complexity_as(r: &Regex, template: Template) -> Result<u32, DslError> {
    score(r, template).ok_or_else(|| DslError::NotTemplateShaped(r.to_string()))
}

/// Some template deriving `r`, preferring separation, then intersection.
pub fn template_of(r: &Regex) -> Option<Template> {
    [
        Template::Separation,
        Template::Intersection,
        Template::Concatenation,
    ]
    .into_iter()
    .find(|&t| derivable(r, t))
}

fn score(r: &Regex, t: Template) -> Option<u32> {
    match t {
        Template::Intersection => int_temp(r),
        Template::Concatenation => cat_temp(r),
        Template::Separation => sep_temp(r),
    }
}

fn min_of(a: Option<u32>, b: Option<u32>) -> Option<u32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn positive(k: &Count) -> bool {
    match k {
        Count::Value(v) => *v >= 1,
        Count::Anon => true,
        Count::Hole => false,
    }
}

fn exactly_one(k: &Count) -> bool {
    matches!(k, Count::Value(1) | Count::Anon)
}

pub(crate) fn int_temp(r: &Regex) -> Option<u32> {
    let chained = match r {
        Regex::And(a, b) => cons(a).zip(int_temp(b)).map(|(x, y)| x + y),
        _ => None,
    };
    min_of(cons(r), chained)
}

pub(crate) fn cons(r: &Regex) -> Option<u32> {
    if basic_cons(r) || length_cons(r) {
        Some(1)
    } else if macro_cons(r) {
        Some(2)
    } else {
        None
    }
}

pub(crate) fn basic_cons(r: &Regex) -> bool {
    match r {
        Regex::Not(x) => basic_cons(x),
        Regex::StartWith(x) | Regex::EndWith(x) | Regex::Contain(x) => cons_expr(x),
        _ => false,
    }
}

fn length_cons(r: &Regex) -> bool {
    let any = |x: &Regex| matches!(x, Regex::Class(CharClass::Any));
    match r {
        Regex::Rep(x, k) | Regex::RepAtLeast(x, k) => any(x) && positive(k),
        Regex::RepRange(x, k1, k2) => any(x) && positive(k1) && positive(k2),
        _ => false,
    }
}

pub(crate) fn macro_cons(r: &Regex) -> bool {
    consist_of(r) || adversative(r) || cond_contain(r)
}

pub(crate) fn consist_of(r: &Regex) -> bool {
    matches!(r, Regex::RepAtLeast(x, k) if exactly_one(k) && literal_set(x))
}

fn adversative(r: &Regex) -> bool {
    match r {
        Regex::And(a, b) => match (a.as_ref(), b.as_ref()) {
            (Regex::StartWith(x), Regex::Not(n)) => {
                matches!(n.as_ref(), Regex::StartWith(y) if literal(x) && literal(y))
            }
            (Regex::EndWith(x), Regex::Not(n)) => {
                matches!(n.as_ref(), Regex::EndWith(y) if literal(x) && literal(y))
            }
            _ => false,
        },
        _ => false,
    }
}

fn cond_contain(r: &Regex) -> bool {
    let Regex::Not(n) = r else { return false };
    let Regex::Contain(c) = n.as_ref() else {
        return false;
    };
    let Regex::Concat(a, b) = c.as_ref() else {
        return false;
    };
    let notcc_lit = |x: &Regex| matches!(x, Regex::NotCc(y) if literal(y));
    (literal(a) && notcc_lit(b)) || (notcc_lit(a) && literal(b))
}

fn cons_expr(r: &Regex) -> bool {
    literal_set(r)
        || min_cons_expr(r)
        || matches!(r, Regex::Concat(a, b) if min_cons_expr(a) && min_cons_expr(b))
}

fn min_cons_expr(r: &Regex) -> bool {
    literal(r) || matches!(r, Regex::Rep(x, k) if literal(x) && positive(k))
}

pub(crate) fn cat_temp(r: &Regex) -> Option<u32> {
    let chained = match r {
        Regex::Concat(a, b) => comp(a).zip(cat_temp(b)).map(|(x, y)| x + y),
        _ => None,
    };
    min_of(comp(r), chained)
}

pub(crate) fn comp(r: &Regex) -> Option<u32> {
    match r {
        Regex::Optional(x) => comp(x),
        _ if basic_comp(r) => Some(1),
        _ if macro_comp(r) => Some(2),
        _ => None,
    }
}

fn basic_comp(r: &Regex) -> bool {
    comp_expr(r)
        || match r {
            Regex::Rep(x, k) | Regex::RepAtLeast(x, k) => comp_expr(x) && positive(k),
            Regex::RepRange(x, k1, k2) => comp_expr(x) && positive(k1) && positive(k2),
            _ => false,
        }
}

pub(crate) fn macro_comp(r: &Regex) -> bool {
    let Regex::Or(a, b) = r else { return false };
    match (a.as_ref(), b.as_ref()) {
        (Regex::Rep(x, k), Regex::Rep(y, l))
        | (Regex::RepAtLeast(x, k), Regex::RepAtLeast(y, l)) => {
            literal(x) && literal(y) && positive(k) && positive(l)
        }
        (Regex::RepRange(x, k1, k2), Regex::RepRange(y, l1, l2)) => {
            literal(x) && literal(y) && [k1, k2, l1, l2].into_iter().all(positive)
        }
        _ => false,
    }
}

fn comp_expr(r: &Regex) -> bool {
    literal_set(r)
}

fn sep_temp(r: &Regex) -> Option<u32> {
    let Regex::Concat(s1, rest) = r else {
        return None;
    };
    // concat(Seg, star(concat(Delimiter, Seg)))
    if let Regex::Star(inner) = rest.as_ref() {
        if let Regex::Concat(d, s2) = inner.as_ref() {
            if delimiter(d) {
                return distinct_cost(&[s1, s2]);
            }
        }
        return None;
    }
    // concat(Seg, Delimiter, Seg, Delimiter, Seg), nested to the right
    let Regex::Concat(d1, rest) = rest.as_ref() else {
        return None;
    };
    let Regex::Concat(s2, rest) = rest.as_ref() else {
        return None;
    };
    let Regex::Concat(d2, s3) = rest.as_ref() else {
        return None;
    };
    if !(delimiter(d1) && delimiter(d2)) {
        return None;
    }
    distinct_cost(&[s1, s2, s3])
}

fn distinct_cost(segs: &[&Regex]) -> Option<u32> {
    let mut total = 0;
    for (i, s) in segs.iter().enumerate() {
        let cost = seg(s)?;
        if !segs[..i].contains(s) {
            total += cost;
        }
    }
    Some(total)
}

fn seg(r: &Regex) -> Option<u32> {
    min_of(int_temp(r), cat_temp(r))
}

fn delimiter(r: &Regex) -> bool {
    matches!(r, Regex::Char(_) | Regex::AnonConst)
}

pub(crate) fn literal(r: &Regex) -> bool {
    r.is_literal() || matches!(r, Regex::AnonConst)
}

pub(crate) fn literal_set(r: &Regex) -> bool {
    literal(r) || matches!(r, Regex::Or(a, b) if literal(a) && literal_set(b))
}
