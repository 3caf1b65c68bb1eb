use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use regforge::dataset::{
    self, figure_spec, generate_dataset, render_svg, DatasetError, PipelineConfig,
};
use regforge::dsl::{parse_dsl, print_dsl};
use regforge::example_gen::{gen_examples, ExampleConfig};
use regforge::grammar::{GrammarConfig, GrammarError, Template};
use regforge::synth::{self, default_scorer, synth_beam, SynthConfig, SynthesisTask};

#[derive(Parser)]
#[command(
    name = "regforge",
    version,
    about = "Sample structured regexes, generate examples and figures, synthesize regexes from examples"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a dataset: regexes, examples, figures and splits, as JSONL.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grammar configuration (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Restrict to one template; otherwise the three are mixed evenly.
        #[arg(long)]
        template: Option<Template>,
        #[arg(long, default_value_t = 1200)]
        n: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory to also write one SVG figure per record.
        #[arg(long)]
        figures: Option<PathBuf>,
    },
    /// Positive and negative examples for one DSL regex.
    Examples {
        dsl: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Strings per polarity.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG figure for one DSL regex, with its examples alongside.
    Figure {
        dsl: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ranked regexes for an examples file (`+ text` / `- text` lines).
    Synth {
        examples: PathBuf,
        #[arg(long)]
        template: Option<Template>,
        #[arg(long, default_value_t = synth::DEFAULT_BEAM)]
        beam: usize,
        #[arg(long, default_value_t = synth::DEFAULT_K)]
        k: usize,
        /// Maximum number of generated search states.
        #[arg(long, default_value_t = synth::DEFAULT_BUDGET)]
        budget: usize,
        /// Disable approximation pruning (k-best filter baseline).
        #[arg(long)]
        no_prune: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a predictions file against a dataset file.
    Eval {
        predictions: PathBuf,
        gold: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Size, depth and token statistics of a dataset file.
    Stats {
        dataset: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_examples(text: &str) -> Result<(Vec<String>, Vec<String>)> {
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_at(line.len().min(2)) {
            ("+ ", s) => pos.push(s.to_string()),
            ("- ", s) => neg.push(s.to_string()),
            _ => bail!("line {}: expected `+ text` or `- text`", i + 1),
        }
    }
    Ok((pos, neg))
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Generate {
            seed,
            config,
            template,
            n,
            out,
            figures,
        } => {
            let grammar = match config {
                Some(p) => GrammarConfig::load(&p)?,
                None => GrammarConfig::default(),
            };
            let cfg = PipelineConfig {
                n,
                template,
                seed,
                grammar,
                ..PipelineConfig::default()
            };
            let records = generate_dataset(&cfg)?;
            if let Some(dir) = figures {
                fs::create_dir_all(&dir)?;
                for r in &records {
                    fs::write(dir.join(format!("{}.svg", r.id)), render_svg(&r.figure))?;
                }
            }
            write_out(out.as_deref(), &dataset::to_jsonl(&records))
        }
        Cmd::Examples { dsl, seed, n, out } => {
            let r = parse_dsl(&dsl)?;
            let cfg = ExampleConfig {
                n_pos: n,
                n_neg: n,
                ..ExampleConfig::default()
            };
            let ex = gen_examples(&r, &cfg, &mut ChaCha8Rng::seed_from_u64(seed))?;
            let mut text = String::new();
            for e in &ex.positives.examples {
                text.push_str(&format!("+ {}\n", e.text));
            }
            for e in &ex.negatives.examples {
                text.push_str(&format!("- {}\t# {}\n", e.text, e.provenance));
            }
            if ex.positives.shortfall || ex.negatives.shortfall {
                eprintln!("warning: fewer than {n} examples on some side");
            }
            write_out(out.as_deref(), &text)
        }
        Cmd::Figure { dsl, seed, out } => {
            let r = parse_dsl(&dsl)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ex = gen_examples(&r, &ExampleConfig::default(), &mut rng)?;
            let texts = |b: &regforge::example_gen::ExampleBatch| {
                b.texts().iter().map(|s| s.to_string()).collect()
            };
            let spec = figure_spec(&r, &mut rng)?
                .with_examples(texts(&ex.positives), texts(&ex.negatives));
            write_out(out.as_deref(), &render_svg(&spec))
        }
        Cmd::Synth {
            examples,
            template,
            beam,
            k,
            budget,
            no_prune,
            out,
        } => {
            let text = fs::read_to_string(&examples)
                .with_context(|| format!("reading {}", examples.display()))?;
            let (pos, neg) = parse_examples(&text)?;
            let mut task = SynthesisTask::new(pos, neg);
            task.template = template;
            task.beam = beam;
            task.k = k;
            task.budget = budget;
            let cfg = SynthConfig {
                prune: !no_prune,
                ..SynthConfig::default()
            };
            let res = synth_beam(&task, &default_scorer(&task), &cfg);
            let mut text = format!(
                "# outcome {:?}, {} expansions\n",
                res.outcome, res.expansions
            );
            for r in &res.ranked {
                text.push_str(&print_dsl(r));
                text.push('\n');
            }
            write_out(out.as_deref(), &text)
        }
        Cmd::Eval {
            predictions,
            gold,
            json,
            out,
        } => {
            let preds = synth::parse_predictions(&fs::read_to_string(&predictions)?)?;
            let records = dataset::load_dataset(&gold)?;
            let gold_asts = records
                .iter()
                .map(|r| r.ast())
                .collect::<Result<Vec<_>, _>>()?;
            let examples: Vec<(Vec<String>, Vec<String>)> = records
                .iter()
                .map(|r| {
                    (
                        r.positives.clone(),
                        r.negatives.iter().map(|n| n.text.clone()).collect(),
                    )
                })
                .collect();
            let report = synth::evaluate(&preds, &gold_asts, &examples)?;
            let text = if json {
                report.to_json() + "\n"
            } else {
                report.to_table()
            };
            write_out(out.as_deref(), &text)
        }
        Cmd::Stats { dataset: path, out } => {
            let records = dataset::load_dataset(&path)?;
            write_out(out.as_deref(), &dataset::stats(&records).to_table())
        }
    }
}

fn is_budget(e: &anyhow::Error) -> bool {
    e.downcast_ref::<DatasetError>()
        .is_some_and(|d| d.is_budget())
        || matches!(
            e.downcast_ref::<GrammarError>(),
            Some(GrammarError::BudgetExhausted { .. })
        )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_budget(&e) { 2 } else { 1 })
        }
    }
}
