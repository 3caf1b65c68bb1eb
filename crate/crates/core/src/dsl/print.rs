use super::{BinaryOp, CharClass, Count, Regex};

/// Canonical DSL text: binary operators nested to the right, no whitespace.
pub fn print_dsl(r: &Regex) -> String {
    let mut out = String::new();
    write_dsl(r, &mut out);
    out
}

fn write_dsl(r: &Regex, out: &mut String) {
    match r {
        Regex::Class(c) => {
            out.push('<');
            out.push_str(c.name());
            out.push('>');
        }
        Regex::Char(c) => {
            out.push('<');
            out.push(*c);
            out.push('>');
        }
        Regex::Str(s) => {
            out.push('<');
            out.push_str(s);
            out.push('>');
        }
        Regex::AnonConst => out.push_str("const"),
        Regex::Hole => out.push('?'),
        _ => {
            out.push_str(op_name(r));
            out.push('(');
            for (i, c) in r.children().into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_dsl(c, out);
            }
            for k in r.counts() {
                out.push(',');
                out.push_str(&k.to_string());
            }
            out.push(')');
        }
    }
}

fn op_name(r: &Regex) -> &'static str {
    match r {
        Regex::StartWith(_) => "startwith",
        Regex::EndWith(_) => "endwith",
        Regex::Contain(_) => "contain",
        Regex::Not(_) => "not",
        Regex::Optional(_) => "optional",
        Regex::Star(_) => "star",
        Regex::NotCc(_) => "notcc",
        Regex::Concat(..) => BinaryOp::Concat.name(),
        Regex::And(..) => BinaryOp::And.name(),
        Regex::Or(..) => BinaryOp::Or.name(),
        Regex::Rep(..) => "rep",
        Regex::RepAtLeast(..) => "repatleast",
        Regex::RepRange(..) => "reprange",
        _ => "",
    }
}

/// Pre-order token sequence of the canonical printing, e.g.
/// `["rep", "(", "<num>", ",", "4", ")"]`.
pub fn to_tokens(r: &Regex) -> Vec<String> {
    let mut out = Vec::new();
    push_tokens(r, &mut out);
    out
}

fn push_tokens(r: &Regex, out: &mut Vec<String>) {
    if r.is_leaf() {
        out.push(print_dsl(r));
        return;
    }
    out.push(op_name(r).to_string());
    out.push("(".into());
    for (i, c) in r.children().into_iter().enumerate() {
        if i > 0 {
            out.push(",".into());
        }
        push_tokens(c, out);
    }
    for k in r.counts() {
        out.push(",".into());
        out.push(k.to_string());
    }
    out.push(")".into());
}

/// Binding strength of a rendered standard regex, loosest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Union,
    Inter,
    Concat,
    Prefix,
    Postfix,
    Atom,
}

use crate::alphabet::SPEC_CHARS;

/// Renders a DSL regex in standard notation: `~` is complement, `&` is
/// intersection and `∅` the empty language.
///
/// Operands of `&` and `|` are parenthesized unless they are leaves; operands
/// of `~` and the postfix operators unless they denote a single symbol.
pub fn to_standard_regex(r: &Regex) -> String {
    render(r).0
}

fn class_text(c: CharClass) -> String {
    match c {
        CharClass::Let => "[A-Za-z]".into(),
        CharClass::Cap => "[A-Z]".into(),
        CharClass::Low => "[a-z]".into(),
        CharClass::Num => "[0-9]".into(),
        CharClass::Any => ".".into(),
        CharClass::Spec => format!("[{SPEC_CHARS}]"),
        CharClass::Null => "∅".into(),
    }
}

fn escape(c: char) -> String {
    if ".+*?$^&@#~|()[]{}\\\"<>".contains(c) {
        format!("\\{c}")
    } else {
        c.to_string()
    }
}

fn escape_in_brackets(c: char) -> String {
    if "^]\\-[".contains(c) {
        format!("\\{c}")
    } else {
        c.to_string()
    }
}

fn wrap(text: String, needs: bool) -> String {
    if needs {
        format!("({text})")
    } else {
        text
    }
}

fn render(r: &Regex) -> (String, Prec) {
    match r {
        Regex::Class(c) => (class_text(*c), Prec::Atom),
        Regex::Char(c) => (escape(*c), Prec::Atom),
        Regex::Str(s) => (s.chars().map(escape).collect(), Prec::Concat),
        Regex::AnonConst => ("const".into(), Prec::Atom),
        Regex::Hole => ("□".into(), Prec::Atom),
        Regex::StartWith(a) => {
            let (t, p) = render(a);
            (format!("{}.*", wrap(t, p < Prec::Concat)), Prec::Concat)
        }
        Regex::EndWith(a) => {
            let (t, p) = render(a);
            (format!(".*{}", wrap(t, p < Prec::Concat)), Prec::Concat)
        }
        Regex::Contain(a) => {
            let (t, p) = render(a);
            (format!(".*{}.*", wrap(t, p < Prec::Concat)), Prec::Concat)
        }
        Regex::Not(a) => {
            let (t, p) = render(a);
            (format!("~{}", wrap(t, p < Prec::Atom)), Prec::Prefix)
        }
        Regex::Optional(a) => postfix(a, "?"),
        Regex::Star(a) => postfix(a, "*"),
        Regex::Rep(a, k) => postfix(a, &format!("{{{}}}", count_text(*k))),
        Regex::RepAtLeast(a, k) => postfix(a, &format!("{{{},}}", count_text(*k))),
        Regex::RepRange(a, k1, k2) => {
            postfix(a, &format!("{{{},{}}}", count_text(*k1), count_text(*k2)))
        }
        Regex::NotCc(a) => (notcc_text(a), Prec::Atom),
        Regex::Concat(a, b) => {
            let (ta, pa) = render(a);
            let (tb, pb) = render(b);
            (
                format!(
                    "{}{}",
                    wrap(ta, pa < Prec::Concat),
                    wrap(tb, pb < Prec::Concat)
                ),
                Prec::Concat,
            )
        }
        Regex::And(a, b) => infix(a, b, "&", Prec::Inter),
        Regex::Or(a, b) => infix(a, b, "|", Prec::Union),
    }
}

fn count_text(k: Count) -> String {
    match k {
        Count::Value(v) => v.to_string(),
        Count::Anon => "int".into(),
        Count::Hole => "□".into(),
    }
}

fn postfix(a: &Regex, op: &str) -> (String, Prec) {
    let (t, p) = render(a);
    (format!("{}{op}", wrap(t, p < Prec::Atom)), Prec::Postfix)
}

fn infix(a: &Regex, b: &Regex, op: &str, prec: Prec) -> (String, Prec) {
    let (ta, _) = render(a);
    let (tb, _) = render(b);
    (
        format!("{}{op}{}", wrap(ta, !a.is_leaf()), wrap(tb, !b.is_leaf())),
        prec,
    )
}

fn notcc_text(a: &Regex) -> String {
    let set = match a {
        Regex::Char(c) => escape_in_brackets(*c),
        Regex::Class(CharClass::Let) => "A-Za-z".into(),
        Regex::Class(CharClass::Cap) => "A-Z".into(),
        Regex::Class(CharClass::Low) => "a-z".into(),
        Regex::Class(CharClass::Num) => "0-9".into(),
        Regex::Class(CharClass::Spec) => SPEC_CHARS.chars().map(escape_in_brackets).collect(),
        other => return format!("(.&~({}))", render(other).0),
    };
    format!("[^{set}]")
}
