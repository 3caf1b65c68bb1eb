use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automaton::compile;
use crate::dsl::{parse_dsl, print_dsl, Regex};

use super::{is_consistent, SynthError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskOutcome {
    /// The top prediction is equivalent to the gold regex.
    pub acc: bool,
    /// Some prediction is equivalent to the gold regex.
    pub equiv_found: bool,
    /// Some prediction is consistent with the examples.
    pub consistent_found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub tasks: Vec<TaskOutcome>,
    /// Percentages over all tasks.
    pub acc: f64,
    pub equiv_found: f64,
    pub consistent_found: f64,
}

impl EvalReport {
    pub fn to_table(&self) -> String {
        format!(
            "tasks             {}\nacc               {:.1}%\nequiv-found       {:.1}%\nconsistent-found  {:.1}%\n",
            self.tasks.len(),
            self.acc,
            self.equiv_found,
            self.consistent_found
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn equivalent(a: &Regex, b: &Regex) -> bool {
    match (compile(a), compile(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

/// Scores ranked prediction lists against gold regexes and their examples.
pub fn evaluate(
    predictions: &[Vec<Regex>],
    gold: &[Regex],
    examples: &[(Vec<String>, Vec<String>)],
) -> Result<EvalReport, SynthError> {
    if predictions.len() != gold.len() || examples.len() != gold.len() {
        return Err(SynthError::Misaligned {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    let tasks: Vec<TaskOutcome> = predictions
        .par_iter()
        .zip(gold.par_iter())
        .zip(examples.par_iter())
        .map(|((preds, g), (pos, neg))| {
            let eq: Vec<bool> = preds.iter().map(|p| equivalent(p, g)).collect();
            TaskOutcome {
                acc: eq.first().copied().unwrap_or(false),
                equiv_found: eq.iter().any(|e| *e),
                consistent_found: preds.iter().any(|p| is_consistent(p, pos, neg)),
            }
        })
        .collect();
    let pct = |f: fn(&TaskOutcome) -> bool| {
        if tasks.is_empty() {
            0.0
        } else {
            100.0 * tasks.iter().filter(|t| f(t)).count() as f64 / tasks.len() as f64
        }
    };
    Ok(EvalReport {
        acc: pct(|t| t.acc),
        equiv_found: pct(|t| t.equiv_found),
        consistent_found: pct(|t| t.consistent_found),
        tasks,
    })
}

/// Prediction file: one block per task, blocks separated by blank lines,
/// one DSL regex per line, best first. Lines starting with `#` are
/// comments, so a block holding only a comment is a task without
/// predictions.
pub fn parse_predictions(text: &str) -> Result<Vec<Vec<Regex>>, SynthError> {
    let mut out = Vec::new();
    let mut block: Option<Vec<Regex>> = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            out.extend(block.take());
            continue;
        }
        let cur = block.get_or_insert_with(Vec::new);
        if line.starts_with('#') {
            continue;
        }
        let r = parse_dsl(line).map_err(|source| SynthError::BadPrediction {
            line: i + 1,
            source,
        })?;
        cur.push(r);
    }
    out.extend(block);
    Ok(out)
}

pub fn write_predictions(lists: &[Vec<Regex>]) -> String {
    let mut out = String::new();
    for (i, list) in lists.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("# task {i}\n"));
        for r in list {
            out.push_str(&print_dsl(r));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Regex {
        parse_dsl(s).unwrap()
    }

    fn ex(pos: &[&str], neg: &[&str]) -> (Vec<String>, Vec<String>) {
        (
            pos.iter().map(|s| s.to_string()).collect(),
            neg.iter().map(|s| s.to_string()).collect(),
        )
    }

    #[test]
    fn fixture_percentages() {
        let gold = vec![p("rep(<num>,2)"), p("startwith(<low>)"), p("contain(<x>)")];
        let examples = vec![
            ex(&["12"], &["1"]),
            ex(&["ab"], &["Ab"]),
            ex(&["x"], &["y"]),
        ];
        let preds = vec![
            // equivalent at rank 1, written differently
            vec![p("concat(<num>,<num>)")],
            // consistent but wrong, then equivalent at rank 2
            vec![p("startwith(<a>)"), p("startwith(<low>)")],
            // nothing useful
            vec![p("<y>")],
        ];
        let r = evaluate(&preds, &gold, &examples).unwrap();
        assert!((r.acc - 100.0 / 3.0).abs() < 1e-9);
        assert!((r.equiv_found - 200.0 / 3.0).abs() < 1e-9);
        assert!((r.consistent_found - 200.0 / 3.0).abs() < 1e-9);
        assert!(r.tasks.iter().all(|t| !t.equiv_found || t.consistent_found));
    }

    #[test]
    fn gold_everywhere_and_all_wrong() {
        let gold = vec![p("rep(<num>,2)"), p("<a>")];
        let examples = vec![ex(&["12"], &["1"]), ex(&["a"], &["b"])];
        let r = evaluate(
            &[vec![gold[0].clone()], vec![gold[1].clone()]],
            &gold,
            &examples,
        )
        .unwrap();
        assert_eq!(
            (r.acc, r.equiv_found, r.consistent_found),
            (100.0, 100.0, 100.0)
        );
        let r = evaluate(&[vec![p("<b>")], vec![]], &gold, &examples).unwrap();
        assert_eq!((r.acc, r.equiv_found, r.consistent_found), (0.0, 0.0, 0.0));
        assert!(evaluate(&[vec![]], &gold, &examples).is_err());
    }

    #[test]
    fn prediction_files_round_trip() {
        let lists = vec![
            vec![p("<a>"), p("rep(<num>,3)")],
            vec![],
            vec![p("star(<any>)")],
        ];
        let text = write_predictions(&lists);
        assert_eq!(parse_predictions(&text).unwrap(), lists);
        assert!(matches!(
            parse_predictions("<a>\nrep(\n"),
            Err(SynthError::BadPrediction { line: 2, .. })
        ));
    }
}
