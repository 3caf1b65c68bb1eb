use serde::{Deserialize, Serialize};

use super::{Count, Regex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AstMetrics {
    /// Number of nodes, terminals included. Integer parameters are not nodes.
    pub size: usize,
    /// Longest root-to-leaf path, counting the root as 1.
    pub depth: usize,
}

pub fn ast_metrics(r: &Regex) -> AstMetrics {
    let children = r.children();
    let (size, depth) = children.iter().fold((0, 0), |(s, d), c| {
        let m = ast_metrics(c);
        (s + m.size, d.max(m.depth))
    });
    AstMetrics {
        size: size + 1,
        depth: depth + 1,
    }
}

/// Replaces every constant by `const` and every integer parameter by `int`.
pub fn anonymize(r: &Regex) -> Regex {
    let mut out = r.clone();
    anonymize_in_place(&mut out);
    out
}

fn anonymize_in_place(r: &mut Regex) {
    match r {
        Regex::Char(_) | Regex::Str(_) => *r = Regex::AnonConst,
        Regex::Rep(a, k) | Regex::RepAtLeast(a, k) => {
            anon_count(k);
            anonymize_in_place(a);
        }
        Regex::RepRange(a, k1, k2) => {
            anon_count(k1);
            anon_count(k2);
            anonymize_in_place(a);
        }
        other => {
            for c in other.children_mut() {
                anonymize_in_place(c);
            }
        }
    }
}

fn anon_count(k: &mut Count) {
    if let Count::Value(_) = k {
        *k = Count::Anon;
    }
}
