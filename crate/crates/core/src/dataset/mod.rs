//! Dataset records and the generation pipeline: sampled regexes with their
//! examples and figures, JSONL persistence, regex-disjoint splits, and
//! summary statistics.

mod figure;
mod svg;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{ast_metrics, parse_dsl, print_dsl, to_standard_regex, to_tokens, Regex};
use crate::example_gen::{gen_examples, ExampleConfig};
use crate::grammar::{sample_batch, slot_rng, GrammarConfig, GrammarError, Template};

pub use figure::{
    audit, constraint_kinds, describe, figure_spec, Block, BlockShape, ConstraintKind,
    DelimiterMark, FigureError, FigureSpec, Link, Role,
};
pub use svg::render_svg;

/// Positives and negatives per record.
pub const EXAMPLES_PER_SIDE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    Train,
    Dev,
    Test,
    /// Reserved; never assigned by [`make_splits`].
    TestE,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
            Split::TestE => "test-e",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeExample {
    pub text: String,
    /// The perturbation that produced the string, or `fallback`.
    pub provenance: String,
}

/// One dataset row.
///
/// JSON fields: `id`, `template` (`intersection|concatenation|separation`),
/// `dsl`, `regex` (standard syntax), `positives` (6 strings), `negatives`
/// (6 `{text, provenance}` objects), `figure`, `split`
/// (`train|dev|test|test-e`) and an optional free-text `description`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenRecord {
    pub id: String,
    pub template: Template,
    pub dsl: String,
    pub regex: String,
    pub positives: Vec<String>,
    pub negatives: Vec<NegativeExample>,
    pub figure: FigureSpec,
    pub split: Split,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

impl GenRecord {
    pub fn ast(&self) -> Result<Regex, crate::dsl::DslError> {
        parse_dsl(&self.dsl)
    }

    fn check(&self) -> Result<(), String> {
        if self.positives.len() != EXAMPLES_PER_SIDE {
            return Err(format!(
                "{} positives, expected {EXAMPLES_PER_SIDE}",
                self.positives.len()
            ));
        }
        if self.negatives.len() != EXAMPLES_PER_SIDE {
            return Err(format!(
                "{} negatives, expected {EXAMPLES_PER_SIDE}",
                self.negatives.len()
            ));
        }
        self.ast().map_err(|e| format!("dsl: {e}"))?;
        self.figure.validate().map_err(|e| format!("figure: {e}"))
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error("bad split fractions {0:?}")]
    Fractions([f64; 3]),
    #[error("{regexes} regexes cannot fill split fractions {fractions:?}")]
    TooFew { regexes: usize, fractions: [f64; 3] },
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Figure(#[from] FigureError),
}

impl DatasetError {
    /// Sampling ran out of budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            DatasetError::Grammar(GrammarError::BudgetExhausted { .. })
        )
    }
}

/// One JSON object per line, in order.
pub fn to_jsonl(records: &[GenRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl<R: BufRead>(reader: R) -> Result<Vec<GenRecord>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: GenRecord = serde_json::from_str(&line).map_err(|e| DatasetError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        rec.check().map_err(|message| DatasetError::Schema {
            line: i + 1,
            message,
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn emit_dataset(records: &[GenRecord], path: &Path) -> Result<(), DatasetError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(to_jsonl(records).as_bytes())?;
    f.flush()?;
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<Vec<GenRecord>, DatasetError> {
    from_jsonl(BufReader::new(std::fs::File::open(path)?))
}

/// Assigns train/dev/test by regex identity: records sharing a DSL string
/// share a split. Group counts are rounded from `fractions`.
pub fn make_splits<R: Rng>(
    mut records: Vec<GenRecord>,
    fractions: [f64; 3],
    rng: &mut R,
) -> Result<Vec<GenRecord>, DatasetError> {
    let sum: f64 = fractions.iter().sum();
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) || (sum - 1.0).abs() > 1e-6 {
        return Err(DatasetError::Fractions(fractions));
    }
    let mut groups: Vec<&str> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for r in &records {
        if seen.insert(r.dsl.as_str()) {
            groups.push(r.dsl.as_str());
        }
    }
    let n = groups.len();
    let n_train = (fractions[0] * n as f64).round() as usize;
    let n_dev = ((fractions[1] * n as f64).round() as usize).min(n - n_train.min(n));
    let n_test = n.saturating_sub(n_train + n_dev);
    let counts = [n_train, n_dev, n_test];
    if n_train > n
        || fractions
            .iter()
            .zip(counts)
            .any(|(f, c)| *f > 0.0 && c == 0)
    {
        return Err(DatasetError::TooFew {
            regexes: n,
            fractions,
        });
    }
    groups.shuffle(rng);
    let assign: HashMap<String, Split> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let s = if i < n_train {
                Split::Train
            } else if i < n_train + n_dev {
                Split::Dev
            } else {
                Split::Test
            };
            (g.to_string(), s)
        })
        .collect();
    for r in &mut records {
        r.split = assign[&r.dsl];
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub count: usize,
    pub avg_size: f64,
    pub avg_depth: f64,
    /// Distinct DSL tokens over all regexes.
    pub unique_tokens: usize,
}

impl DatasetStats {
    pub fn to_table(&self) -> String {
        format!(
            "records        {}\navg size       {:.2}\navg depth      {:.2}\nunique tokens  {}\n",
            self.count, self.avg_size, self.avg_depth, self.unique_tokens
        )
    }
}

/// Aggregates over regexes; unparsable DSL strings are skipped.
pub fn stats(records: &[GenRecord]) -> DatasetStats {
    let asts: Vec<Regex> = records.iter().filter_map(|r| r.ast().ok()).collect();
    stats_of(&asts)
}

pub fn stats_of(asts: &[Regex]) -> DatasetStats {
    let mut tokens = BTreeSet::new();
    let (mut size, mut depth) = (0usize, 0usize);
    for a in asts {
        let m = ast_metrics(a);
        size += m.size;
        depth += m.depth;
        tokens.extend(to_tokens(a));
    }
    let n = asts.len();
    let avg = |x: usize| if n == 0 { 0.0 } else { x as f64 / n as f64 };
    DatasetStats {
        count: n,
        avg_size: avg(size),
        avg_depth: avg(depth),
        unique_tokens: tokens.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Total records; split evenly over the templates when `template` is
    /// unset, earlier templates taking the remainder.
    pub n: usize,
    pub template: Option<Template>,
    pub seed: u64,
    pub grammar: GrammarConfig,
    pub examples: ExampleConfig,
    pub fractions: [f64; 3],
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n: 1200,
            template: None,
            seed: 0,
            grammar: GrammarConfig::default(),
            examples: ExampleConfig::default(),
            fractions: [0.62, 0.10, 0.28],
        }
    }
}

impl PipelineConfig {
    pub fn mix(&self) -> Vec<(Template, usize)> {
        match self.template {
            Some(t) => vec![(t, self.n)],
            None => Template::ALL
                .iter()
                .enumerate()
                .map(|(i, &t)| (t, self.n / 3 + usize::from(i < self.n % 3)))
                .collect(),
        }
    }
}

const EXAMPLE_SALT: u64 = 0x6578_616d_706c_6573;
const FIGURE_SALT: u64 = 0x6669_6775_7265_7321;
const SPLIT_SALT: u64 = 0x7370_6c69_7473_2121;

/// Examples and figure for one regex, or `None` when either side falls
/// short of six strings.
pub fn build_record(
    t: Template,
    slot: u64,
    r: &Regex,
    seed: u64,
    ecfg: &ExampleConfig,
) -> Result<Option<GenRecord>, FigureError> {
    let ecfg = ExampleConfig {
        n_pos: EXAMPLES_PER_SIDE,
        n_neg: EXAMPLES_PER_SIDE,
        ..ecfg.clone()
    };
    let mut rng = slot_rng(seed ^ EXAMPLE_SALT, t, slot, 0);
    let Ok(ex) = gen_examples(r, &ecfg, &mut rng) else {
        return Ok(None);
    };
    if ex.positives.shortfall
        || ex.negatives.shortfall
        || ex.positives.examples.len() != EXAMPLES_PER_SIDE
        || ex.negatives.examples.len() != EXAMPLES_PER_SIDE
    {
        return Ok(None);
    }
    let positives: Vec<String> = ex
        .positives
        .examples
        .iter()
        .map(|e| e.text.clone())
        .collect();
    let negatives: Vec<NegativeExample> = ex
        .negatives
        .examples
        .iter()
        .map(|e| NegativeExample {
            text: e.text.clone(),
            provenance: e.provenance.clone(),
        })
        .collect();
    let mut frng = slot_rng(seed ^ FIGURE_SALT, t, slot, 0);
    let figure = figure_spec(r, &mut frng)?.with_examples(
        positives.clone(),
        negatives.iter().map(|n| n.text.clone()).collect(),
    );
    Ok(Some(GenRecord {
        id: String::new(),
        template: t,
        dsl: print_dsl(r),
        regex: to_standard_regex(r),
        positives,
        negatives,
        figure,
        split: Split::Train,
        description: None,
    }))
}

/// Samples regexes, derives examples and figures in parallel, and splits.
/// Regexes whose examples fall short are replaced by later samples, so the
/// output depends only on the configuration.
pub fn generate_dataset(cfg: &PipelineConfig) -> Result<Vec<GenRecord>, DatasetError> {
    let mut gcfg = cfg.grammar.clone();
    gcfg.seed = cfg.seed;
    let mix = cfg.mix();
    let mut extra = 4;
    let records = loop {
        let drawn: Vec<(Template, usize)> = mix
            .iter()
            .map(|&(t, n)| (t, if n == 0 { 0 } else { n + n / 8 + extra }))
            .collect();
        let batch = sample_batch(&drawn, &gcfg)?;
        let mut slots = Vec::with_capacity(batch.len());
        let mut counters: HashMap<Template, u64> = HashMap::new();
        for (t, r) in &batch {
            let c = counters.entry(*t).or_insert(0);
            slots.push((*t, *c, r));
            *c += 1;
        }
        let built: Vec<Option<GenRecord>> = slots
            .par_iter()
            .map(|(t, slot, r)| build_record(*t, *slot, r, cfg.seed, &cfg.examples))
            .collect::<Result<_, _>>()?;
        let mut out = Vec::with_capacity(cfg.n);
        let mut short = false;
        for &(t, n) in &mix {
            let kept: Vec<GenRecord> = built
                .iter()
                .zip(&slots)
                .filter(|(_, s)| s.0 == t)
                .filter_map(|(b, _)| b.clone())
                .take(n)
                .collect();
            short |= kept.len() < n;
            out.extend(kept);
        }
        if !short {
            break out;
        }
        if extra > 4 * cfg.n.max(8) {
            return Err(DatasetError::Grammar(GrammarError::BudgetExhausted {
                template: mix[0].0,
                attempts: gcfg.budget,
            }));
        }
        extra *= 4;
    };
    let mut records = records;
    for (i, r) in records.iter_mut().enumerate() {
        r.id = format!("r{i:05}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ SPLIT_SALT);
    if records.is_empty() {
        return Ok(records);
    }
    make_splits(records, cfg.fractions, &mut rng)
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            "test-e" => Ok(Split::TestE),
            _ => Err(format!("unknown split `{s}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> PipelineConfig {
        PipelineConfig {
            n: 12,
            seed: 5,
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn stats_of_one_regex() {
        let s = stats_of(&[parse_dsl("rep(<num>,4)").unwrap()]);
        assert_eq!((s.count, s.avg_size, s.avg_depth), (1, 2.0, 2.0));
        let e = stats(&[]);
        assert_eq!(
            (e.count, e.avg_size, e.avg_depth, e.unique_tokens),
            (0, 0.0, 0.0, 0)
        );
    }

    #[test]
    fn pipeline_records_are_sound_and_round_trip() {
        let recs = generate_dataset(&small()).unwrap();
        assert_eq!(recs.len(), 12);
        for r in &recs {
            let d = crate::automaton::compile(&r.ast().unwrap()).unwrap();
            assert!(r.positives.iter().all(|p| d.matches(p)));
            assert!(r.negatives.iter().all(|n| !d.matches(&n.text)));
            assert_eq!(
                audit(&r.figure).unwrap(),
                constraint_kinds(&r.ast().unwrap()).unwrap()
            );
        }
        let text = to_jsonl(&recs);
        assert_eq!(from_jsonl(text.as_bytes()).unwrap(), recs);
        assert_eq!(to_jsonl(&generate_dataset(&small()).unwrap()), text);
    }

    #[test]
    fn schema_errors_name_the_line() {
        let recs = generate_dataset(&small()).unwrap();
        let mut bad = recs[1].clone();
        bad.positives.pop();
        let text = to_jsonl(&[recs[0].clone(), bad]);
        match from_jsonl(text.as_bytes()) {
            Err(DatasetError::Schema { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            from_jsonl("{\"id\": 3}\n".as_bytes()),
            Err(DatasetError::Malformed { line: 1, .. })
        ));
        assert!(from_jsonl("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn split_fractions() {
        let recs = generate_dataset(&small()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let all = make_splits(recs.clone(), [1.0, 0.0, 0.0], &mut rng).unwrap();
        assert!(all.iter().all(|r| r.split == Split::Train));
        assert!(matches!(
            make_splits(recs.clone(), [0.5, 0.6, 0.0], &mut rng),
            Err(DatasetError::Fractions(_))
        ));
        assert!(matches!(
            make_splits(recs[..2].to_vec(), [0.62, 0.10, 0.28], &mut rng),
            Err(DatasetError::TooFew { .. })
        ));
    }
}
