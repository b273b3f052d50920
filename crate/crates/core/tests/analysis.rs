mod common;

use std::collections::{HashMap, HashSet};

use ittm::analysis::*;
use ittm::compiler::*;
use ittm::engine::Budget;
use ittm::ordinal::Ordinal;
use ittm::program::{MachineShape, Program};
use ittm::samples;
use rand::Rng;

use common::{bits, random_program, rng};

#[test]
fn halting_string_closure() {
    let mut r = rng(7);
    for _ in 0..10 {
        let q = random_program(&mut r, MachineShape::ONE_TAPE, 2, 0.3);
        let hs = halting_strings(&q, 8).unwrap();
        let sigmas: HashSet<&str> = hs.iter().map(|h| h.sigma.as_str()).collect();
        let taus: HashSet<&str> = hs.iter().map(|h| h.tau.as_str()).collect();
        let mut map: HashMap<&str, &str> = HashMap::new();
        for h in &hs {
            assert!(h.steps <= h.sigma.len() && h.tau.len() == h.sigma.len());
            assert!(map.insert(&h.sigma, &h.tau).is_none());
            if h.sigma.len() < 8 {
                for b in ["0", "1"] {
                    assert!(sigmas.contains(format!("{}{b}", h.sigma).as_str()));
                    assert!(taus.contains(format!("{}{b}", h.tau).as_str()));
                }
            }
        }
    }
}

#[test]
fn branch_refines() {
    let mut r = rng(11);
    for _ in 0..10 {
        let q = random_program(&mut r, MachineShape::ONE_TAPE, 2, 0.3);
        let short = leftmost_nonhalting_branch(&q, 8).unwrap();
        let long = leftmost_nonhalting_branch(&q, 16).unwrap();
        if let Some(l) = &long {
            let s = short.as_deref().expect("a live branch has live prefixes");
            assert!(l.starts_with(s), "{s} vs {l}");
        }
    }
}

#[test]
fn shape_is_checked() {
    let p = samples::identity();
    assert!(matches!(halting_strings(&p, 3), Err(AnalysisError::Shape(_))));
}

#[test]
fn stretch_attempts_fail() {
    let mut r = rng(3);
    for (name, q) in samples::stretch_attempts() {
        let found = (6..=14).map(|n| stretch_collision(&q, 5, n).unwrap()).find(|o| !matches!(o, CollisionOutcome::Exhausted { .. }));
        match found {
            Some(CollisionOutcome::Collision { t, u, .. }) => {
                assert_ne!(t, u);
                for _ in 0..3 {
                    let tail: Vec<bool> = (0..12).map(|_| r.gen_bool(0.5)).collect();
                    assert!(replay_collision(&q, 5, &bits(&t), &bits(&u), &tail, 200), "{name}");
                }
            }
            Some(CollisionOutcome::WrongOutput { .. }) => {}
            other => panic!("{name} survived: {other:?}"),
        }
    }
}

fn modes(p: &Program) -> Vec<(CosimMode, Program)> {
    vec![
        (CosimMode::Simulate, compile_simulate(p).unwrap()),
        (CosimMode::Onehat, compile_onehat(p).unwrap()),
        (CosimMode::Scratchpad, compile_scratchpad(p).unwrap()),
        (CosimMode::Pipeline, compile_simulate(p).unwrap()),
    ]
}

#[test]
fn cosimulation_passes() {
    let inputs = &standard_inputs()[..3];
    for p in [samples::identity(), samples::bitwise_not(), samples::first_bit()] {
        for (mode, q) in modes(&p) {
            let rep = cosimulate(&p, &q, &mode, inputs, Budget::default());
            assert!(rep.pass, "{mode}: {rep:?}");
        }
    }
    let q = compile_notdense(&samples::identity(), &[false, true]).unwrap();
    let rep = cosimulate(&samples::identity(), &q, &CosimMode::Notdense { sigma: "01".into() }, &[ "1(0)".parse().unwrap()], Budget::default());
    assert!(rep.pass, "{rep:?}");
}

#[test]
fn cosimulation_catches_a_flip() {
    let p = samples::bitwise_not();
    let mut q = compile_simulate(&p).unwrap();
    let (s, r, mut t) = q.transitions().find(|&(s, _, _)| s == q.start()).unwrap();
    t.write ^= 1;
    q.set_transition(s, r, Some(t));
    let rep = cosimulate(&p, &q, &CosimMode::Simulate, &standard_inputs(), Budget::default());
    assert!(!rep.pass);
    assert!(rep.rows.iter().any(|r| r.divergence.as_deref().is_some_and(|d| d.starts_with("micro-stage"))));
}

#[test]
fn survey_rows() {
    let b = Budget { steps_per_level: 2_000, max_level: 2, total_steps: 200_000 };
    assert_eq!(survey_halting(1, b).len(), 1);
    let rows = survey_range(1 << 40, 12, b);
    assert_eq!(rows.len(), 12);
    let ceiling = Ordinal::omega_pow(b.max_level + 1);
    for w in rows.windows(2) {
        assert!(w[0].stage <= w[1].stage);
    }
    assert!(rows.iter().all(|r| r.stage <= ceiling));
    assert!(rows.iter().filter(|r| r.outcome == SurveyOutcome::Halted).all(|r| r.stage < ceiling));
    assert!(survey_table(&rows).lines().count() == 13);
}
