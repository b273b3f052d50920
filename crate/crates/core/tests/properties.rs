mod common;

use std::collections::HashMap;

use ittm::analysis::{cosimulate, simulate_stage, CosimMode};
use ittm::compiler::compile_simulate;
use ittm::engine::{resolve_limit, run, Budget, FirstLimit, Status};
use ittm::machine::{apply_limit, init_configuration, step, Configuration, LimitSummary};
use ittm::ordinal::Ordinal;
use ittm::program::{MachineShape, Program};
use ittm::tape::{lcm, TapeWord};
use proptest::prelude::*;

use common::{random_program, rng};

/// Terms as a plain list, possibly non-canonical: `(exponent, coefficient)`.
fn arb_terms() -> impl Strategy<Value = Vec<(u32, u64)>> {
    prop::collection::vec((0u32..4, 1u64..6), 0..5)
}

/// Concatenation of order types: a term followed by a larger power is swallowed.
fn oracle_sum(parts: &[(u32, u64)]) -> Vec<(u32, u64)> {
    let mut out: Vec<(u32, u64)> = Vec::new();
    for &(e, c) in parts {
        while out.last().is_some_and(|&(e2, _)| e2 < e) {
            out.pop();
        }
        match out.last_mut() {
            Some((e2, c2)) if *e2 == e => *c2 += c,
            _ => out.push((e, c)),
        }
    }
    out
}

fn ord_of(terms: &[(u32, u64)]) -> Ordinal {
    terms.iter().fold(Ordinal::zero(), |acc, &(e, c)| acc.add(&Ordinal::term(e, c)).unwrap())
}

/// Order by the value at a large finite stand-in for ω.
fn weight(terms: &[(u32, u64)]) -> u128 {
    terms.iter().map(|&(e, c)| c as u128 * 1000u128.pow(e)).sum()
}

proptest! {
    #[test]
    fn ordinal_sum_matches_concatenation(a in arb_terms(), b in arb_terms()) {
        let (x, y) = (ord_of(&a), ord_of(&b));
        let sum = x.add(&y).unwrap();
        let all: Vec<_> = a.iter().chain(&b).copied().collect();
        prop_assert_eq!(sum.terms(), &oracle_sum(&all)[..]);
        prop_assert_eq!(x.terms(), &oracle_sum(&a)[..]);
    }

    #[test]
    fn ordinal_laws(a in arb_terms(), b in arb_terms(), c in arb_terms()) {
        let (x, y, z) = (ord_of(&a), ord_of(&b), ord_of(&c));
        prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
        let s = x.add(&y).unwrap();
        prop_assert!(x <= s && y <= s);
        if y < z {
            prop_assert!(x.add(&y).unwrap() < x.add(&z).unwrap());
        }
        prop_assert_eq!(x.cmp(&y), weight(x.terms()).cmp(&weight(y.terms())));
        prop_assert_eq!(x.to_string().parse::<Ordinal>().unwrap(), x.clone());
        prop_assert!(x < x.succ().unwrap());
        prop_assert_eq!(x.succ().unwrap().is_limit(), false);
        prop_assert_eq!(x.is_limit(), !x.is_zero() && x.finite_part() == 0);
    }

    #[test]
    fn tape_words_are_canonical(
        p1 in prop::collection::vec(any::<bool>(), 0..6), q1 in prop::collection::vec(any::<bool>(), 1..5),
        p2 in prop::collection::vec(any::<bool>(), 0..6), q2 in prop::collection::vec(any::<bool>(), 1..5),
    ) {
        let s = TapeWord::new(p1.clone(), q1.clone()).unwrap();
        let t = TapeWord::new(p2.clone(), q2.clone()).unwrap();
        let horizon = p1.len().max(p2.len()) + lcm(q1.len(), q2.len());
        let same = (0..horizon).all(|x| s.get(x) == t.get(x));
        prop_assert_eq!(s == t, same);
        prop_assert_eq!(s.to_string().parse::<TapeWord>().unwrap(), s.clone());
        let naive = |x: usize| if x < p1.len() { p1[x] } else { q1[(x - p1.len()) % q1.len()] };
        prop_assert!((0..40).all(|x| s.get(x) == naive(x)));
    }

    #[test]
    fn program_text_round_trips(seed in any::<u64>(), extra in 0usize..4) {
        let mut r = rng(seed);
        for shape in [MachineShape::ONE_TAPE, MachineShape::THREE_TAPE, MachineShape::with_pad(1), MachineShape::DOUBLE_HEAD] {
            let p = random_program(&mut r, shape, extra, 0.2);
            prop_assert_eq!(Program::parse(&p.to_text()).unwrap(), p);
        }
    }
}

fn brute_limit(p: &Program, c0: &Configuration) -> Option<Configuration> {
    let mut seen: HashMap<Configuration, usize> = HashMap::new();
    let mut trail = vec![c0.clone()];
    let mut c = c0.clone();
    seen.insert(c.clone(), 0);
    for t in 1..=10_000 {
        c = step(p, &c).ok()?;
        if let Some(&s) = seen.get(&c) {
            let cycle = &trail[s..t];
            let tapes = (0..c.tapes.len()).map(|k| cycle.iter().fold(TapeWord::zeros(), |a, x| a.or(&x.tapes[k]))).collect();
            let pad = (0..c.pad.len()).map(|k| cycle.iter().any(|x| x.pad[k])).collect();
            return apply_limit(p, &LimitSummary { tapes, pad }).ok();
        }
        seen.insert(c.clone(), t);
        trail.push(c.clone());
    }
    None
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn first_limit_is_the_limsup(seed in any::<u64>(), extra in 0usize..3, input in prop::collection::vec(any::<bool>(), 0..6)) {
        let mut r = rng(seed);
        let p = random_program(&mut r, MachineShape::ONE_TAPE, extra, 0.0);
        let c0 = init_configuration(&p, &TapeWord::finite(&input));
        if let Some(want) = brute_limit(&p, &c0) {
            match resolve_limit(&p, c0, Budget::default()) {
                Ok(FirstLimit::Limit { config, .. }) => prop_assert_eq!(config, want),
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn simulation_keeps_the_seven_to_one_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_program(&mut r, MachineShape::THREE_TAPE, 2, 0.1);
        let q = compile_simulate(&p).unwrap();
        let budget = Budget { steps_per_level: 5_000, max_level: 1, total_steps: 100_000 };
        let input: TapeWord = "10(0)".parse().unwrap();
        if resolve_limit(&p, init_configuration(&p, &input), budget).is_err() {
            return Ok(());
        }
        let rep = cosimulate(&p, &q, &CosimMode::Simulate, std::slice::from_ref(&input), budget);
        prop_assert!(rep.pass, "{:?}", rep.rows);
        let o = run(&p, &input, budget);
        if o.status == Status::Halted {
            prop_assert_eq!(rep.rows[0].q_stage.clone(), simulate_stage(&o.stage));
        }
    }
}
