//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line (run with
//! `--nocapture` to see them) and then asserts.

mod common;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use ittm::analysis::{
    cosimulate, halting_strings, interleave, standard_inputs, stretch_collision, CollisionOutcome, CosimMode,
};
use ittm::clockables::{clock_program, doublehead_clock, onetape_clock_successor, verify_clock, ClockSpec, ClockVerdict};
use ittm::compiler::{
    compile_characteristic, compile_onehat, compile_scratchpad, compile_simulate, stretch_program, BlockLayout,
};
use ittm::engine::{measure, resolve_limit, run, Budget, FirstLimit, Status};
use ittm::machine::{apply_limit, init_configuration, step, Configuration, LimitSummary};
use ittm::ordinal::Ordinal;
use ittm::program::{MachineShape, Program, Transition};
use ittm::samples;
use ittm::tape::{bits_to_string, TapeWord};
use rand::seq::SliceRandom;
use rand::Rng;

use common::{random_program, random_word, rng};

const STRETCH_TIME: Duration = Duration::from_secs(10);
const SIMULATION_TIME: Duration = Duration::from_secs(60);
const HALTING_STRING_TIME: Duration = Duration::from_secs(60);

fn tw(s: &str) -> TapeWord {
    s.parse().unwrap()
}

fn ord(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn report(n: u32, title: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("PASS criterion {n}: {title}");
    } else {
        println!("FAIL criterion {n}: {title}: {} failure(s); first: {}", failures.len(), failures[0]);
    }
    assert!(failures.is_empty(), "criterion {n}: {failures:#?}");
}

/// `a` spread to every third cell.
fn stretch_of(a: &TapeWord) -> TapeWord {
    TapeWord::from_fn(3 * a.tail_start(), 3 * a.period().len(), |x| x % 3 == 0 && a.get(x / 3))
}

fn stretch_inputs() -> Vec<TapeWord> {
    [
        "(0)", "(1)", "1(0)", "10(0)", "01(0)", "11(0)", "101(0)", "1101(0)", "0001(0)", "1111111(0)",
        "10000001(0)", "0110100110010110(0)", "(01)", "(10)", "(011)", "(110)", "1(01)", "0(011)", "1101(01)",
        "00(1)", "111(0011)", "1(00001)", "010(1101)", "1(0111)", "0000000001(10)",
    ]
    .iter()
    .map(|s| tw(s))
    .collect()
}

#[test]
fn criterion_1_stretch_exactness() {
    let s = stretch_program(&BlockLayout::three()).unwrap();
    let inputs = stretch_inputs();
    assert_eq!(inputs.len(), 25);
    assert!(inputs.iter().any(|a| a.is_finite_support()) && inputs.iter().any(|a| !a.is_finite_support()));
    let target = ord("w^2+1");
    let t0 = Instant::now();
    let mut failures = Vec::new();
    for a in &inputs {
        let o = run(&s, a, Budget::default());
        if o.status != Status::Halted {
            failures.push(format!("{a}: {:?}", o.message));
        } else if o.stage != target {
            failures.push(format!("{a}: stage {}", o.stage));
        } else if o.output[0] != stretch_of(a) {
            failures.push(format!("{a}: output {}", o.output[0]));
        }
    }
    let took = t0.elapsed();
    if took > STRETCH_TIME {
        failures.push(format!("took {took:?}"));
    }
    report(1, &format!("stretch halts at w^2+1 with s(a) on 25 inputs ({took:.2?})"), &failures);
}

#[test]
fn criterion_2_stage_omega_snapshot() {
    let s = stretch_program(&BlockLayout::three()).unwrap();
    let mut failures = Vec::new();
    for a in stretch_inputs() {
        let want: Vec<bool> =
            (0..32).map(|x| match x { 0 => a.get(0), 1 => false, 2 => true, _ => a.get(x - 2) }).collect();
        match resolve_limit(&s, init_configuration(&s, &a), Budget::default()) {
            Ok(FirstLimit::Limit { config, .. }) => {
                let got = config.tapes[0].bits(32);
                if got != want {
                    failures.push(format!("{a}: {} instead of {}", bits_to_string(&got), bits_to_string(&want)));
                }
            }
            Ok(FirstLimit::Halted { steps, .. }) => failures.push(format!("{a}: halted after {steps} steps")),
            Err(e) => failures.push(format!("{a}: {e}")),
        }
    }
    report(2, "stage-w tape of stretch is <a0 0 1 a1 a2 ...> on 32 cells", &failures);
}

#[test]
fn criterion_3_simulation_ratio() {
    let mut r = rng(3);
    let budget = Budget { steps_per_level: 5_000, max_level: 2, total_steps: 200_000 };
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let (mut halted, mut skipped, mut checked) = (0, 0, 0);
    while checked < 50 {
        let extra = r.gen_range(1..4);
        let p = random_program(&mut r, MachineShape::THREE_TAPE, extra, 0.05);
        p.validate().unwrap();
        let inputs: Vec<TapeWord> = (0..3).map(|_| random_word(&mut r)).collect();
        // the stage-w comparison needs a first limit the engine can find
        if inputs.iter().any(|a| resolve_limit(&p, init_configuration(&p, a), budget).is_err()) {
            skipped += 1;
            continue;
        }
        checked += 1;
        let q = compile_simulate(&p).unwrap();
        let rep = cosimulate(&p, &q, &CosimMode::Simulate, &inputs, budget);
        for row in &rep.rows {
            halted += row.q_stage.is_some() as usize;
            if !row.pass {
                failures.push(format!("program {checked} on {}: {:?} {:?}", row.input, row.divergence, row.error));
            }
        }
    }
    let took = t0.elapsed();
    if took > SIMULATION_TIME {
        failures.push(format!("took {took:?}"));
    }
    let title = format!("7:1 lockstep and stage-w interleave on 150 runs ({halted} halting, {skipped} programs without a findable first limit skipped, {took:.2?})");
    report(3, &title, &failures);
}

fn criterion_4_programs() -> Vec<(&'static str, Program)> {
    vec![
        ("identity", samples::identity()),
        ("not", samples::bitwise_not()),
        ("first-bit", samples::first_bit()),
        ("zero", samples::constant_zero()),
        ("every-other", samples::every_other_bit()),
    ]
}

fn ten_inputs() -> Vec<TapeWord> {
    ["(0)", "(1)", "10(0)", "01(0)", "1101(0)", "(01)", "(10)", "0(011)", "111(0)", "1(0110)"].iter().map(|s| tw(s)).collect()
}

#[test]
fn criterion_4_onehat_and_scratchpad() {
    let mut failures = Vec::new();
    for (name, p) in criterion_4_programs() {
        let oh = compile_onehat(&p).unwrap();
        let sp = compile_scratchpad(&p).unwrap();
        for a in ten_inputs() {
            let f = run(&p, &a, Budget::default());
            assert_eq!(f.status, Status::Halted, "{name} on {a}");
            let f = f.output[2].clone();
            let mut lead = vec![true];
            lead.extend(f.prefix());
            let one_f = TapeWord::new(lead, f.period().to_vec()).unwrap();
            let o1 = run(&oh, &a, Budget::default());
            if o1.status != Status::Halted || o1.output[0] != one_f {
                failures.push(format!("onehat {name} on {a}: {} vs {one_f}", o1.output[0]));
            }
            let o2 = run(&sp, &a, Budget::default());
            if o2.status != Status::Halted || o2.output[0] != f {
                failures.push(format!("scratchpad {name} on {a}: {} vs {f}", o2.output[0]));
            }
        }
    }
    report(4, "onehat gives 1f and scratchpad gives f on 5 programs x 10 inputs", &failures);
}

#[test]
fn criterion_5_efficiency_form() {
    let p = samples::first_bit();
    let ch = compile_characteristic(&p).unwrap();
    let mut failures = Vec::new();
    let mut recorded = Vec::new();
    for a in ten_inputs() {
        let alpha = measure(&p, &a, Budget::default()).unwrap();
        let want = Ordinal::omega_pow(2).add(&alpha).unwrap().add(&Ordinal::omega()).unwrap();
        let o = run(&ch, &a, Budget::default());
        if o.status != Status::Halted {
            failures.push(format!("{a}: {:?}", o.message));
            continue;
        }
        if alpha.finite_part() != 0 {
            recorded.push(format!("{a}: alpha {alpha}, stage {}", o.stage));
        } else if o.stage != want {
            failures.push(format!("{a}: alpha {alpha}, stage {} instead of {want}", o.stage));
        }
    }
    for r in &recorded {
        println!("  criterion 5 successor case (not asserted) {r}");
    }
    report(5, "characteristic program halts at w^2+alpha+w for limit alpha", &failures);
}

#[test]
fn criterion_6_clocking() {
    let b = Budget::default();
    let mut failures = Vec::new();
    for t in ["5", "w", "w+4", "w*2", "w*2+3", "w^2"] {
        let p = clock_program(&ClockSpec::three_tape(ord(t))).unwrap();
        match verify_clock(&p, &ord(t), b) {
            Ok(ClockVerdict::Ok) => {}
            v => failures.push(format!("3-tape {t}: {v:?}")),
        }
    }
    for t in ["w", "w*2", "w^2"] {
        let alpha = ord(t);
        let p3 = clock_program(&ClockSpec::three_tape(alpha.clone())).unwrap();
        let succ = onetape_clock_successor(&p3, b).unwrap();
        let dh = doublehead_clock(&p3, b).unwrap();
        let zero = TapeWord::zeros();
        let (s1, s2) = (measure(&succ, &zero, b), measure(&dh, &zero, b));
        match (s1, s2) {
            (Ok(s1), Ok(s2)) => {
                if s1 != alpha.succ().unwrap() {
                    failures.push(format!("successor clock for {t} halts at {s1}"));
                }
                if s2 != alpha {
                    failures.push(format!("double-head clock for {t} halts at {s2}"));
                }
                if s1 != s2.succ().unwrap() {
                    failures.push(format!("paired difference for {t}: {s1} vs {s2}"));
                }
            }
            (e1, e2) => failures.push(format!("{t}: {e1:?} {e2:?}")),
        }
    }
    report(6, "clocks exact; successor alpha+1, double-head alpha, paired difference 1", &failures);
}

/// Halting strings straight from the engine's step function.
fn oracle_halting(q: &Program, sigma: &[bool]) -> Option<String> {
    let mut c = Configuration { state: q.limit(), head: 0, tapes: vec![TapeWord::finite(sigma)], pad: vec![] };
    for _ in 0..sigma.len() {
        c = step(q, &c).unwrap();
        if c.state == q.halt() {
            return Some(bits_to_string(&c.tapes[0].bits(sigma.len())));
        }
    }
    None
}

#[test]
fn criterion_7_halting_string_laws() {
    const LEN: usize = 10;
    let mut r = rng(7);
    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut total = 0;
    for i in 0..20 {
        let q = {
            let extra = r.gen_range(1..4);
            random_program(&mut r, MachineShape::ONE_TAPE, extra, 0.3)
        };
        let hs = halting_strings(&q, LEN).unwrap();
        total += hs.len();
        let mut map: HashMap<String, String> = HashMap::new();
        for h in &hs {
            if let Some(prev) = map.insert(h.sigma.clone(), h.tau.clone()) {
                failures.push(format!("program {i}: {} maps to {prev} and {}", h.sigma, h.tau));
            }
        }
        let outputs: HashSet<&String> = map.values().collect();
        for len in 1..=LEN {
            for v in 0..1u32 << len {
                let sigma: Vec<bool> = (0..len).map(|k| v >> (len - 1 - k) & 1 == 1).collect();
                let s = bits_to_string(&sigma);
                if oracle_halting(&q, &sigma) != map.get(&s).cloned() {
                    failures.push(format!("program {i}: {s} disagrees with the step oracle"));
                }
            }
        }
        for (s, t) in &map {
            if s.len() == LEN {
                continue;
            }
            for b in ["0", "1"] {
                match map.get(&format!("{s}{b}")) {
                    Some(t2) if *t2 == format!("{t}{b}") => {}
                    other => failures.push(format!("program {i}: {s}{b} gives {other:?}, not {t}{b}")),
                }
                if !outputs.contains(&format!("{t}{b}")) {
                    failures.push(format!("program {i}: output {t}{b} missing"));
                }
            }
        }
    }
    let took = t0.elapsed();
    if took > HALTING_STRING_TIME {
        failures.push(format!("took {took:?}"));
    }
    report(7, &format!("halting strings closed under extension to length {LEN} ({total} strings, {took:.2?})"), &failures);
}

/// Limit configuration by brute force: step until a configuration repeats
/// exactly, then OR every cell over one full cycle.
fn brute_limit(p: &Program, c0: &Configuration, cap: usize) -> Option<Configuration> {
    let mut seen: HashMap<Configuration, usize> = HashMap::new();
    let mut trail = vec![c0.clone()];
    let mut c = c0.clone();
    seen.insert(c.clone(), 0);
    for t in 1..=cap {
        c = step(p, &c).ok()?;
        if c.state == p.halt() {
            return None;
        }
        if let Some(&s) = seen.get(&c) {
            let cycle = &trail[s..t];
            let tapes = (0..c.tapes.len())
                .map(|k| cycle.iter().fold(TapeWord::zeros(), |acc, x| acc.or(&x.tapes[k])))
                .collect();
            let pad = (0..c.pad.len()).map(|k| cycle.iter().any(|x| x.pad[k])).collect();
            return apply_limit(p, &LimitSummary { tapes, pad }).ok();
        }
        seen.insert(c.clone(), t);
        trail.push(c.clone());
    }
    None
}

#[test]
fn criterion_8_limit_oracle() {
    const CAP: usize = 10_000;
    let mut r = rng(8);
    let shapes = [MachineShape::ONE_TAPE, MachineShape::THREE_TAPE, MachineShape::with_pad(1), MachineShape::DOUBLE_HEAD];
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut tried = 0;
    while checked < 100 {
        tried += 1;
        assert!(tried < 20_000, "too few periodic programs");
        let shape = shapes[tried % shapes.len()];
        let p = {
            let extra = r.gen_range(1..4);
            random_program(&mut r, shape, extra, 0.0)
        };
        let bits: Vec<bool> = (0..r.gen_range(0..8)).map(|_| r.gen_bool(0.5)).collect();
        let c0 = init_configuration(&p, &TapeWord::finite(&bits));
        let Some(want) = brute_limit(&p, &c0, CAP) else { continue };
        checked += 1;
        match resolve_limit(&p, c0, Budget::default()) {
            Ok(FirstLimit::Limit { config, .. }) if config == want => {}
            other => failures.push(format!("program {tried} on {}: {other:?}", bits_to_string(&bits))),
        }
    }
    report(8, &format!("first limit matches the limsup oracle on {checked} periodic runs"), &failures);
}

#[test]
fn criterion_9_counting_falsifier() {
    const M: usize = 5;
    const MAX_N: usize = 14;
    let corpus = samples::stretch_attempts();
    assert!(corpus.len() >= 3);
    let mut failures = Vec::new();
    let mut found = Vec::new();
    for (name, q) in &corpus {
        assert_eq!(q.shape().scratch_pad_cells, 0);
        let hit = (1..=MAX_N).find_map(|n| match stretch_collision(q, M, n) {
            Ok(CollisionOutcome::Exhausted { .. }) => None,
            Ok(o) => Some(Ok((n, o))),
            Err(e) => Some(Err(e)),
        });
        match hit {
            Some(Ok((n, CollisionOutcome::Collision { .. }))) => found.push(format!("{name}: collision at n={n}")),
            Some(Ok((n, _))) => found.push(format!("{name}: wrong output at n={n}")),
            Some(Err(e)) => failures.push(format!("{name}: {e}")),
            None => failures.push(format!("{name} survives to n={MAX_N}")),
        }
    }
    for f in &found {
        println!("  criterion 9 {f}");
    }
    report(9, &format!("no one-pass stretch attempt survives (m={M}, n<={MAX_N})"), &failures);
}

/// `(state, read)` pairs of `q` taken in the first `7·200` steps on each input.
fn fired(q: &Program, p: &Program, inputs: &[TapeWord]) -> Vec<(usize, u32)> {
    let mut out = HashSet::new();
    for a in inputs {
        let mut c = init_configuration(q, &interleave(&init_configuration(p, a).tapes));
        for _ in 0..7 * ittm::analysis::LOCKSTEP {
            if c.state == q.halt() {
                break;
            }
            let read = ittm::machine::read_vector(q, &c);
            out.insert((c.state, read));
            c = step(q, &c).unwrap();
        }
    }
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort();
    v
}

#[test]
fn criterion_10_mutation_sensitivity() {
    let mut r = rng(10);
    let inputs = standard_inputs();
    let progs = criterion_4_programs();
    let mut failures = Vec::new();
    for i in 0..20 {
        let (name, p) = progs.choose(&mut r).unwrap();
        let q = compile_simulate(p).unwrap();
        let sites = fired(&q, p, &inputs);
        let &(s, read) = sites.choose(&mut r).unwrap();
        let id = s;
        let t = q.transition(id, read).unwrap();
        let bit = r.gen_range(0..q.width());
        let mut m = q.clone();
        m.set_transition(id, read, Some(Transition { write: t.write ^ 1 << bit, ..t }));
        let rep = cosimulate(p, &m, &CosimMode::Simulate, &inputs, Budget::default());
        if rep.pass {
            failures.push(format!("mutation {i} of {name} at ({}, {read}) passes", q.name(id)));
        }
    }
    report(10, "20 write-bit flips of compiled simulate programs all detected", &failures);
}
