use std::fmt::Write;

use super::figure::{FigureSpec, Role};

const MARGIN: f64 = 20.0;
const BLOCK_W: f64 = 110.0;
const BLOCK_H: f64 = 44.0;
const BLOCK_GAP: f64 = 10.0;
const GROUP_GAP: f64 = 44.0;
const SHADE: f64 = 0.28;
const LABEL_Y: f64 = 140.0;
const LABEL_H: f64 = 26.0;
const LABEL_GAP: f64 = 14.0;
const CHAR_W: f64 = 7.0;
const LINE_H: f64 = 18.0;

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn label_width(text: &str) -> f64 {
    text.chars().count() as f64 * CHAR_W + 16.0
}

/// Static SVG: blocks in a row with shaded ends and delimiter marks
/// between segments, hint labels below joined by elbow connectors, and
/// the example strings underneath. The layout depends only on the spec.
pub fn render_svg(spec: &FigureSpec) -> String {
    let top = MARGIN;
    let mut xs = Vec::with_capacity(spec.blocks.len());
    let mut marks = Vec::new();
    let mut x = MARGIN;
    for (i, b) in spec.blocks.iter().enumerate() {
        if i > 0 {
            if spec.blocks[i - 1].group != b.group {
                let mid = x + GROUP_GAP / 2.0;
                marks.extend(
                    spec.delimiters
                        .iter()
                        .filter(|d| d.before_group == b.group)
                        .map(|d| (mid, d.symbol)),
                );
                x += GROUP_GAP;
            } else {
                x += BLOCK_GAP;
            }
        }
        xs.push(x);
        x += BLOCK_W;
    }
    let row_w = x;

    let mut lx = Vec::with_capacity(spec.labels.len());
    let mut cursor = MARGIN;
    for l in &spec.labels {
        lx.push(cursor);
        cursor += label_width(l) + LABEL_GAP;
    }
    let labels_w = cursor - LABEL_GAP;

    let examples_y = LABEL_Y + LABEL_H + 30.0;
    let n_examples = spec.positives.len().max(spec.negatives.len());
    let longest = spec
        .positives
        .iter()
        .chain(&spec.negatives)
        .map(|s| s.chars().count())
        .max()
        .unwrap_or(0) as f64;
    let col_w = (longest + 4.0) * CHAR_W + 20.0;
    let width = row_w.max(labels_w).max(MARGIN + 2.0 * col_w) + MARGIN;
    let height = if n_examples > 0 {
        examples_y + LINE_H * (n_examples as f64 + 1.0) + MARGIN
    } else {
        LABEL_Y + LABEL_H + MARGIN
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="monospace" font-size="12">"#
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, spec.template);

    for (i, b) in spec.blocks.iter().enumerate() {
        let bx = xs[i];
        let dash = if b.optional > 0 {
            r#" stroke-dasharray="5,3""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r##"<rect class="block" x="{bx:.1}" y="{top:.1}" width="{BLOCK_W:.1}" height="{BLOCK_H:.1}" fill="#ffffff" stroke="#333333"{dash}/>"##
        );
        let roles: Vec<Role> = spec
            .links
            .iter()
            .filter(|l| l.block == i)
            .map(|l| l.role)
            .collect();
        if roles.contains(&Role::Head) {
            let _ = writeln!(
                s,
                r##"<rect class="head" x="{bx:.1}" y="{top:.1}" width="{:.1}" height="{BLOCK_H:.1}" fill="#999999"/>"##,
                BLOCK_W * SHADE
            );
        }
        if roles.contains(&Role::Tail) {
            let _ = writeln!(
                s,
                r##"<rect class="tail" x="{:.1}" y="{top:.1}" width="{:.1}" height="{BLOCK_H:.1}" fill="#999999"/>"##,
                bx + BLOCK_W * (1.0 - SHADE),
                BLOCK_W * SHADE
            );
        }
        if b.repeated {
            let _ = writeln!(
                s,
                r#"<text class="repeat" x="{:.1}" y="{:.1}" text-anchor="end">repeated</text>"#,
                bx + BLOCK_W - 4.0,
                top - 4.0
            );
        }
    }
    for (mx, sym) in &marks {
        let cy = top + BLOCK_H / 2.0;
        let _ = writeln!(
            s,
            r##"<circle class="delim" cx="{mx:.1}" cy="{cy:.1}" r="11" fill="#eeeeee" stroke="#333333"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{mx:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            cy + 4.0,
            esc(&sym.to_string())
        );
    }

    for (i, l) in spec.links.iter().enumerate() {
        let bx = xs[l.block];
        let ax = match l.role {
            Role::Head => bx + BLOCK_W * SHADE / 2.0,
            Role::Tail => bx + BLOCK_W * (1.0 - SHADE / 2.0),
            Role::Body => bx + BLOCK_W / 2.0,
        };
        let ay = top + BLOCK_H;
        let tx = lx[l.label] + label_width(&spec.labels[l.label]) / 2.0;
        let elbow = ay + 16.0 + 6.0 * (i % 8) as f64;
        let _ = writeln!(
            s,
            r##"<polyline class="link" points="{ax:.1},{ay:.1} {ax:.1},{elbow:.1} {tx:.1},{elbow:.1} {tx:.1},{LABEL_Y:.1}" fill="none" stroke="#555555"/>"##
        );
    }

    for (i, l) in spec.labels.iter().enumerate() {
        let w = label_width(l);
        let _ = writeln!(
            s,
            r##"<rect class="label" x="{:.1}" y="{LABEL_Y:.1}" width="{w:.1}" height="{LABEL_H:.1}" rx="4" fill="#f7f7f7" stroke="#555555"/>"##,
            lx[i]
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            lx[i] + w / 2.0,
            LABEL_Y + LABEL_H / 2.0 + 4.0,
            esc(l)
        );
    }

    if n_examples > 0 {
        for (col, (title, list)) in [("positive", &spec.positives), ("negative", &spec.negatives)]
            .into_iter()
            .enumerate()
        {
            let cx = MARGIN + col as f64 * col_w;
            let _ = writeln!(
                s,
                r#"<text class="examples" x="{cx:.1}" y="{examples_y:.1}">{title}</text>"#
            );
            for (j, e) in list.iter().enumerate() {
                let _ = writeln!(
                    s,
                    r#"<text class="example" x="{cx:.1}" y="{:.1}">{}</text>"#,
                    examples_y + LINE_H * (j as f64 + 1.0),
                    esc(e)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
