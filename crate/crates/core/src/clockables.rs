//! Programs that halt on input 0 at a prescribed ordinal stage.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::Emitter;
use crate::engine::{run_traced, Budget, EngineError, EventKind, Recorder, Status};
use crate::ordinal::Ordinal;
use crate::program::{MachineShape, Move, Program, ProgramBuilder, StateId};
use crate::tape::TapeWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClockError {
    #[error("unsupported target {0}: expected w^2*a + w*b + n")]
    Unsupported(Ordinal),
    #[error("clock programs are generated for three-tape machines, not {0:?}")]
    Shape(MachineShape),
    #[error("the clocked ordinal {0} is not a limit")]
    NotLimit(Ordinal),
    #[error("expected a program halting at {expected}, it halts at {got}")]
    Stage { expected: Ordinal, got: Ordinal },
    #[error("zero cells are still changing after {0}")]
    Unstable(Ordinal),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClockSpec {
    pub target: Ordinal,
    pub machine: MachineShape,
}

impl ClockSpec {
    pub fn three_tape(target: Ordinal) -> Self {
        ClockSpec { target, machine: MachineShape::THREE_TAPE }
    }
}

/// Three-tape program halting on input 0 at exactly `ω²·a + ω·b + n`.
///
/// Cell 0 carries three flags: tape 0 marks the ω-counting phase, tape 1
/// arms the final limit, tape 2 is flashed once per ω-run so that it reads 1
/// exactly at limits of limits. Unary counters to the right count ω² and ω
/// blocks; each arms the flag one block early.
pub fn clock_program(spec: &ClockSpec) -> Result<Program, ClockError> {
    if spec.machine != MachineShape::THREE_TAPE {
        return Err(ClockError::Shape(spec.machine));
    }
    let t = &spec.target;
    if t.degree().is_some_and(|d| d > 2) {
        return Err(ClockError::Unsupported(t.clone()));
    }
    let (a, b, n) = (t.coefficient(2), t.coefficient(1), t.coefficient(0));
    let (pb, arm, fl) = (1u32, 2u32, 4u32);

    let mut bd = ProgramBuilder::new(MachineShape::THREE_TAPE);
    let (start, limit, halt) = (bd.start, bd.limit, bd.halt);
    let run = bd.state("run");
    bd.set_all(run, |r| (r, Move::R, run));

    // Final countdown of n steps.
    let fin: Vec<StateId> = (1..=n).map(|i| bd.state(&format!("fin{i}"))).collect();
    for (i, &s) in fin.iter().enumerate() {
        let next = fin.get(i + 1).copied().unwrap_or(halt);
        bd.set_all(s, |r| (r, Move::R, next));
    }
    let finish = fin.first().copied().unwrap_or(halt);

    // Walks back from cell `i` to cell 0 and clears the flash, optionally arming.
    let back = |bd: &mut ProgramBuilder, i: u64, set_arm: bool| -> StateId {
        let tag = if set_arm { "arm" } else { "clr" };
        let home = bd.state(&format!("home.{tag}"));
        bd.set_all(home, |r| ((r & !fl) | if set_arm { arm } else { 0 }, Move::R, run));
        let mut s = home;
        for k in 1..i {
            let t = bd.state(&format!("back{k}.{tag}"));
            bd.set_all(t, |r| (r, Move::L, s));
            s = t;
        }
        s
    };

    // Unary counter on tape `bit` from cell 1; filling cell `last` arms.
    let counter = |bd: &mut ProgramBuilder, name: &str, bit: u32, last: u64, clear: bool| -> StateId {
        let cells: Vec<StateId> = (1..=last).map(|i| bd.state(&format!("{name}{i}"))).collect();
        for (k, &s) in cells.iter().enumerate() {
            let i = k as u64 + 1;
            let next = cells.get(k + 1).copied().unwrap_or(run);
            let done = if i == last {
                back(bd, i, true)
            } else if clear {
                back(bd, i, false)
            } else {
                run
            };
            let mv = if i == last || clear { Move::L } else { Move::R };
            bd.set_all(s, |r| if r & bit != 0 { (r, Move::R, next) } else { (r | bit, mv, done) });
        }
        cells.first().copied().unwrap_or(run)
    };

    let enter_b = |r: u32| (r & !(arm | fl)) | pb | if b == 1 { arm } else { 0 };
    match (a, b) {
        (0, 0) => bd.set_all(start, |r| (r, Move::R, finish)),
        (0, _) => bd.set_all(start, |r| (enter_b(r), Move::R, run)),
        _ => bd.set_all(start, |r| ((r & !fl) | if a == 1 { arm } else { 0 }, Move::R, run)),
    }
    let inc_a = if a >= 2 { counter(&mut bd, "incA", 1, a - 1, true) } else { run };
    let inc_b = if b >= 2 { counter(&mut bd, "incB", 2, b - 1, false) } else { run };
    let flash = bd.state("flash");
    let clear = back(&mut bd, 1, false);
    bd.set_all(flash, |r| (r, Move::L, clear));
    bd.set_all(limit, |r| {
        match (r & pb != 0, r & arm != 0, r & fl != 0) {
            (false, _, false) => (r | fl, Move::R, flash),
            (false, true, true) if b == 0 => (r, Move::R, finish),
            (false, true, true) => (enter_b(r), Move::R, run),
            (false, false, true) => (r, Move::R, inc_a),
            (true, true, _) => (r, Move::R, finish),
            (true, false, _) => (r, Move::R, inc_b),
        }
    });
    Ok(bd.build())
}

/// The limit stage at which `p3` halts and the first cell of each tape there.
fn probe(p3: &Program, budget: Budget) -> Result<(Ordinal, [bool; 3]), ClockError> {
    if p3.shape() != MachineShape::THREE_TAPE {
        return Err(ClockError::Shape(p3.shape()));
    }
    let mut rec = Recorder::limits_only(1);
    let out = run_traced(p3, &TapeWord::zeros(), budget, &mut rec);
    if out.status != Status::Halted {
        return Err(ClockError::Engine(match out.status {
            Status::BudgetExhausted => EngineError::BudgetExhausted {
                stage: out.stage,
                reason: out.message.unwrap_or_default(),
            },
            _ => EngineError::Unresolved { stage: out.stage, level: 0, reason: out.message.unwrap_or_default() },
        }));
    }
    let alpha = out.stage;
    if !alpha.is_limit() {
        return Err(ClockError::NotLimit(alpha));
    }
    let e = rec
        .events
        .iter()
        .rev()
        .find(|e| e.event == EventKind::Limit && e.stage == alpha)
        .expect("a limit event precedes a halt at a limit");
    let first = |t: usize| e.window[t].starts_with('1');
    Ok((alpha, [first(0), first(1), first(2)]))
}

/// One-tape program halting at `α+1`, where `p3` halts at the limit `α`.
pub fn onetape_clock_successor(p3: &Program, budget: Budget) -> Result<Program, ClockError> {
    let (_, target) = probe(p3, budget)?;
    Ok(anticipate(p3, target, MachineShape::ONE_TAPE))
}

/// Double-head version of [`onetape_clock_successor`], halting at `α` itself.
pub fn doublehead_clock(p3: &Program, budget: Budget) -> Result<Program, ClockError> {
    let (_, target) = probe(p3, budget)?;
    Ok(anticipate(p3, target, MachineShape::DOUBLE_HEAD))
}

/// One-tape program halting at exactly `α` for `p3` halting at the limit `α`,
/// given `pb` halting at some `β < α` after which the cells that are 0 at `α`
/// never change again in the run of `p3`.
pub fn onetape_clock_limit(p3: &Program, pb: &Program, budget: Budget) -> Result<Program, ClockError> {
    let (alpha, target) = probe(p3, budget)?;
    let (beta, _) = probe(pb, budget)?;
    if beta >= alpha {
        return Err(ClockError::Stage { expected: alpha, got: beta });
    }
    check_stable(p3, &beta, target, budget)?;
    Ok(crate::clock_limit::emit(p3, pb, target))
}

/// Checks that after stage `beta` the first cells that are 0 at the halting
/// limit stay 0.
fn check_stable(p3: &Program, beta: &Ordinal, target: [bool; 3], budget: Budget) -> Result<(), ClockError> {
    let mut rec = Recorder { steps: true, window: 1, ..Recorder::default() };
    run_traced(p3, &TapeWord::zeros(), budget, &mut rec);
    for e in rec.events.iter().filter(|e| e.stage > *beta) {
        if target.iter().zip(&e.window).any(|(&keep, w)| !keep && w.starts_with('1')) {
            return Err(ClockError::Unstable(beta.clone()));
        }
    }
    Ok(())
}

/// Simulates `p3` over blocks of four after two flag cells, keeping cell 0
/// at 1 while a first cell that should end as 0 holds 1, and flashing cell 1
/// each time every first cell that should end as 1 has shown a 1.
fn anticipate(p3: &Program, target: [bool; 3], shape: MachineShape) -> Program {
    let mut em = Emitter::new(shape);
    let (start, limit, halt) = (em.b.start, em.b.limit, em.b.halt);
    let ones: u32 = (0..3).filter(|&t| target[t]).map(|t| 1 << t).sum();
    let sim = |em: &mut Emitter, n: StateId, seen: u32| em.st(&format!("{}.1.{seen}", p3.name(n)));

    // Lay down the leftmost marker at cell 5.
    let mut s = start;
    for i in 1..=5 {
        let t = em.st(&format!("init{i}"));
        em.pass(s, Move::R, t);
        s = t;
    }
    let (j1, j2) = (em.st("init6"), em.st("init7"));
    em.write(s, 1, Move::L, j1);
    em.pass(j1, Move::L, j2);
    let first = sim(&mut em, p3.start(), 0);
    em.pass(j2, Move::L, first);

    // Limit: flag 0 clear and flag 1 set means the target limit.
    let resume = sim(&mut em, p3.limit(), 0);
    let to_x0 = em.st("lim.x0");
    em.pass(to_x0, Move::R, resume);
    if em.extra {
        for r in 0..4u32 {
            let next = if r == 0b10 { halt } else { to_x0 };
            em.b.set(limit, r, r, Move::R, next);
        }
    } else {
        let z = em.st("lim.f1");
        em.on(limit, 1, 1, Move::R, to_x0);
        em.on(limit, 0, 0, Move::R, z);
        em.on(z, 1, 1, Move::R, halt);
        em.on(z, 0, 0, Move::R, resume);
    }

    for n in 0..p3.state_count() {
        if n == p3.halt() {
            continue;
        }
        let name = p3.name(n).to_string();
        for seen in 0..8u32 {
            if seen & !ones != 0 {
                continue;
            }
            let s1 = sim(&mut em, n, seen);
            for x in 0..2 {
                let s2 = em.st(&format!("{name}.2.{seen}.{x}"));
                em.on(s1, x, x, Move::R, s2);
                for y in 0..2 {
                    let s3 = em.st(&format!("{name}.3.{seen}.{x}{y}"));
                    em.on(s2, y, y, Move::R, s3);
                    for z in 0..2 {
                        let s4 = em.st(&format!("{name}.4.{seen}.{x}{y}{z}"));
                        em.on(s3, z, z, Move::R, s4);
                        let t = p3.transition(n, x | y << 1 | z << 2).expect("validated program");
                        for m in 0..2 {
                            let tag = format!("{}{}{m}.{seen}.{}", t.write, t.mv, p3.name(t.next));
                            let s5 = em.st(&format!("5.{tag}"));
                            em.on(s4, m, m, Move::L, s5);
                            let s6 = em.st(&format!("6.{tag}"));
                            em.write(s5, t.write >> 2 & 1, Move::L, s6);
                            let s7 = em.st(&format!("7.{tag}"));
                            em.write(s6, t.write >> 1 & 1, Move::L, s7);
                            let w0 = t.write & 1;
                            if t.next == p3.halt() {
                                em.write(s7, w0, Move::R, halt);
                                continue;
                            }
                            if m == 0 {
                                let target = sim(&mut em, t.next, seen);
                                relocate(&mut em, s7, w0, t.mv, &format!("{}{}.{seen}", t.mv, p3.name(t.next)), target);
                                continue;
                            }
                            // Block 0 was just written: refresh both flags.
                            let cur = t.write & 7;
                            let viol = cur & !ones != 0;
                            let cur1 = cur & ones;
                            let acc = seen | cur1;
                            let (action, rest) = if cur1 == ones {
                                (1, 0)
                            } else if acc == ones {
                                (2, 0)
                            } else {
                                (0, acc)
                            };
                            let target = sim(&mut em, t.next, rest);
                            let tag = format!("{action}{}{}.{rest}.{}", viol as u32, t.mv, p3.name(t.next));
                            let (d1, d0, d2) = (em.st(&format!("d1.{tag}")), em.st(&format!("d0.{tag}")), em.st(&format!("d2.{tag}")));
                            em.write(s7, w0, Move::L, d1);
                            em.write(d1, (action != 0) as u32, Move::L, d0);
                            em.write(d0, viol as u32, Move::R, d2);
                            let tail = format!("{}.{rest}.{}", t.mv, p3.name(t.next));
                            let after = if action == 2 { 0 } else { 2 };
                            match t.mv {
                                Move::L => {
                                    if after == 0 {
                                        em.write(d2, 0, Move::R, target);
                                    } else {
                                        em.pass(d2, Move::R, target);
                                    }
                                }
                                Move::R => {
                                    let x0 = em.st(&format!("d3.{tail}"));
                                    if after == 0 {
                                        em.write(d2, 0, Move::R, x0);
                                    } else {
                                        em.pass(d2, Move::R, x0);
                                    }
                                    relocate(&mut em, x0, 2, Move::R, &tail, target);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    em.build()
}

/// Four moves from the first cell of a block to the first cell of the next
/// (or previous) block; `w == 2` means write back on the first move.
fn relocate(em: &mut Emitter, from: StateId, w: u32, mv: Move, tag: &str, target: StateId) {
    let mut s = from;
    for i in 0..4 {
        let t = if i == 3 { target } else { em.st(&format!("mv{i}.{tag}")) };
        if i == 0 && w != 2 {
            em.write(s, w, mv, t);
        } else {
            em.pass(s, mv, t);
        }
        s = t;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClockVerdict {
    Ok,
    Mismatch { measured: Ordinal },
}

pub fn verify_clock(q: &Program, target: &Ordinal, budget: Budget) -> Result<ClockVerdict, EngineError> {
    let got = crate::engine::measure(q, &TapeWord::zeros(), budget)?;
    Ok(if got == *target { ClockVerdict::Ok } else { ClockVerdict::Mismatch { measured: got } })
}
