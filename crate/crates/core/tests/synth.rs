mod common;

use common::{gold_derivation, random_derivation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regforge::alphabet::Alphabet;
use regforge::approx::Approximator;
use regforge::automaton::compile;
use regforge::dsl::{parse_dsl, Regex};
use regforge::example_gen::{gen_examples, ExampleConfig};
use regforge::grammar::{sample_regex, slot_rng, GrammarConfig, Template};
use regforge::synth::{
    default_scorer, evaluate, is_consistent, synth_beam, Outcome, Scorer, Space, SynthConfig,
    SynthesisTask,
};

fn task_for(r: &Regex, seed: u64) -> SynthesisTask {
    let ex = gen_examples(
        r,
        &ExampleConfig::default(),
        &mut ChaCha8Rng::seed_from_u64(seed),
    )
    .unwrap();
    let own =
        |b: &regforge::example_gen::ExampleBatch| b.texts().iter().map(|s| s.to_string()).collect();
    SynthesisTask::new(own(&ex.positives), own(&ex.negatives))
}

fn small_cfg(cap: u32) -> GrammarConfig {
    GrammarConfig {
        complexity_cap: cap,
        ..GrammarConfig::default()
    }
}

/// Sampled ground truths with their tasks, template hint set.
fn sampled(seed: u64, per_template: u64, cap: u32) -> Vec<(Template, Regex, SynthesisTask)> {
    let cfg = small_cfg(cap);
    let mut out = Vec::new();
    for t in Template::ALL {
        for i in 0..per_template {
            let r = sample_regex(t, &cfg, &mut slot_rng(seed, t, i, 0)).unwrap();
            let mut task = task_for(&r, i);
            task.template = Some(t);
            out.push((t, r, task));
        }
    }
    out
}

fn equivalent(a: &Regex, b: &Regex) -> bool {
    compile(a).unwrap() == compile(b).unwrap()
}

#[test]
fn recovers_startwith_low_endwith_num() {
    // six examples a side often admit simpler consistent regexes, so the
    // gold is expected in the k-best for most example draws, not all
    let gold = parse_dsl("and(startwith(<low>),endwith(<num>))").unwrap();
    let mut hits = 0;
    for seed in 0..10 {
        let mut task = task_for(&gold, seed);
        task.template = Some(Template::Intersection);
        let res = synth_beam(&task, &default_scorer(&task), &SynthConfig::default());
        assert_eq!(res.outcome, Outcome::Found, "seed {seed}");
        hits += usize::from(res.ranked.iter().any(|r| equivalent(r, &gold)));
    }
    println!("gold in k-best for {hits}/10 example draws");
    assert!(hits >= 5);
}

#[test]
fn sampled_ground_truths_are_recovered_at_small_complexity() {
    let tasks = sampled(21, 10, 2);
    let mut hit = 0;
    for (_, gold, task) in &tasks {
        let res = synth_beam(task, &default_scorer(task), &SynthConfig::default());
        if res.ranked.iter().any(|r| equivalent(r, gold)) {
            hit += 1;
        }
    }
    println!("recovered {hit}/{}", tasks.len());
    assert!(hit * 3 >= tasks.len(), "recovered {hit}/{}", tasks.len());
}

#[test]
fn gold_derivation_outscores_random_derivation_of_equal_length() {
    let tasks = sampled(5, 60, 3);
    let (mut compared, mut wins) = (0, 0);
    for (i, (_, gold, task)) in tasks.iter().enumerate() {
        let space = Space::from_examples(&task.pos, &task.neg, task.template);
        let Some(g) = gold_derivation(&space, gold) else {
            continue;
        };
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        let Some(r) = random_derivation(&space, g.len(), &mut rng) else {
            continue;
        };
        let s = default_scorer(task);
        let score = |d: &[common::Step]| {
            d.iter()
                .map(|st| s.delta(&st.before, &st.after, st.logp))
                .sum::<f64>()
        };
        compared += 1;
        if score(&g) > score(&r) {
            wins += 1;
        }
        if compared == 100 {
            break;
        }
    }
    println!("gold wins {wins}/{compared}");
    assert_eq!(compared, 100);
    assert!(wins >= 75, "gold wins {wins}/{compared}");
}

#[test]
fn gold_prefixes_are_never_pruned() {
    let mut approx = Approximator::new(Alphabet::standard());
    let (mut derived, mut prefixes) = (0, 0);
    for (_, gold, task) in sampled(9, 40, 3) {
        let space = Space::from_examples(&task.pos, &task.neg, task.template);
        let Some(steps) = gold_derivation(&space, &gold) else {
            continue;
        };
        derived += 1;
        for st in &steps {
            prefixes += 1;
            assert!(
                approx.feasible(&st.after, &task.pos, &task.neg),
                "{} pruned for {gold}",
                st.after
            );
        }
    }
    println!("derived {derived}, prefixes {prefixes}");
    assert!(derived >= 40);
}

#[test]
fn eval_columns_are_monotone() {
    let tasks = sampled(13, 5, 2);
    let mut preds = Vec::new();
    let mut gold = Vec::new();
    let mut examples = Vec::new();
    for (_, g, task) in &tasks {
        let res = synth_beam(task, &default_scorer(task), &SynthConfig::default());
        preds.push(res.ranked);
        gold.push(g.clone());
        examples.push((task.pos.clone(), task.neg.clone()));
    }
    let rep = evaluate(&preds, &gold, &examples).unwrap();
    assert!(rep.acc <= rep.equiv_found && rep.equiv_found <= 100.0);
    for (t, (p, (pos, neg))) in rep.tasks.iter().zip(preds.iter().zip(&examples)) {
        assert!(!t.acc || t.equiv_found);
        if t.equiv_found {
            assert!(t.consistent_found);
            assert!(p.iter().any(|r| is_consistent(r, pos, neg)));
        }
    }
}

#[test]
fn three_task_fixture() {
    let p = |s: &str| parse_dsl(s).unwrap();
    let gold = vec![p("startwith(<a>)"), p("endwith(<num>)"), p("contain(<x>)")];
    let examples = vec![
        (vec!["ab".to_string()], vec!["ba".to_string()]),
        (vec!["a1".to_string()], vec!["1a".to_string()]),
        (vec!["axa".to_string()], vec!["aaa".to_string()]),
    ];
    let preds = vec![
        // rank 1 equivalent
        vec![p("startwith(<a>)")],
        // equivalent at rank 2, rank 1 consistent but wrong
        vec![p("endwith(<1>)"), p("endwith(<num>)")],
        // nothing equivalent, nothing consistent
        vec![p("startwith(<x>)")],
    ];
    let rep = evaluate(&preds, &gold, &examples).unwrap();
    let third = 100.0 / 3.0;
    assert!((rep.acc - third).abs() < 1e-9);
    assert!((rep.equiv_found - 2.0 * third).abs() < 1e-9);
    assert!((rep.consistent_found - 2.0 * third).abs() < 1e-9);
}
