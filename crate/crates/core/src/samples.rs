//! Small three-tape programs used as compiler inputs and in tests.
//!
//! Input sits on tape 0 and output goes to tape 2; tape 1 is untouched.

use crate::program::{MachineShape, Move, Program, ProgramBuilder};

const IN: u32 = 1;
const OUT: u32 = 4;

/// Maps each input cell through `f` onto the output tape, then halts at the
/// first limit.
fn cellwise(f: impl Fn(usize, bool) -> bool, phases: usize) -> Program {
    let mut b = ProgramBuilder::new(MachineShape::THREE_TAPE);
    let states: Vec<_> = (0..phases)
        .map(|i| if i == 0 { b.start } else { b.state(&format!("p{i}")) })
        .collect();
    for (i, &s) in states.iter().enumerate() {
        let next = states[(i + 1) % phases];
        b.set_all(s, |r| {
            let o = f(i, r & IN != 0);
            ((r & !OUT) | if o { OUT } else { 0 }, Move::R, next)
        });
    }
    let (l, h) = (b.limit, b.halt);
    b.set_all(l, |r| (r, Move::R, h));
    b.build()
}

/// Output equals the input.
pub fn identity() -> Program {
    cellwise(|_, a| a, 1)
}

/// Output is the bitwise complement of the input.
pub fn bitwise_not() -> Program {
    cellwise(|_, a| !a, 1)
}

/// Keeps even-indexed input bits, zeroes the odd ones.
pub fn every_other_bit() -> Program {
    cellwise(|i, a| i == 0 && a, 2)
}

/// Decides whether the first input bit is 1: output `1(0)` or `(0)`, halting
/// at stage ω.
pub fn first_bit() -> Program {
    let mut b = ProgramBuilder::new(MachineShape::THREE_TAPE);
    let (s, l, h) = (b.start, b.limit, b.halt);
    let run = b.state("run");
    b.set_all(s, |r| ((r & !OUT) | if r & IN != 0 { OUT } else { 0 }, Move::R, run));
    b.set_all(run, |r| (r, Move::R, run));
    b.set_all(l, |r| (r, Move::R, h));
    b.build()
}

/// Halts at once with the all-zero output.
pub fn constant_zero() -> Program {
    let mut b = ProgramBuilder::new(MachineShape::THREE_TAPE);
    let (s, h) = (b.start, b.halt);
    b.set_all(s, |r| (r, Move::R, h));
    b.build()
}

/// Never halts: sweeps right forever and again after every limit.
pub fn never_halts() -> Program {
    let mut b = ProgramBuilder::new(MachineShape::THREE_TAPE);
    let (s, l) = (b.start, b.limit);
    b.set_all(s, |r| (r, Move::R, s));
    b.set_all(l, |r| (r, Move::R, s));
    b.build()
}

/// One-pass stretch attempt: keeps up to `cap` pending input bits in its
/// state, emits one at every third cell and zeros elsewhere, dropping the
/// oldest pending bit when full. Halts at the first limit.
pub fn queue_stretch(cap: usize) -> Program {
    let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
    let name = |q: &[bool], ph: usize| {
        let q: String = q.iter().map(|&x| if x { '1' } else { '0' }).collect();
        format!("q{q}.{ph}")
    };
    let mut queues: Vec<Vec<bool>> = vec![Vec::new()];
    for len in 1..=cap {
        for v in 0..1u32 << len {
            queues.push((0..len).map(|i| v >> i & 1 == 1).collect());
        }
    }
    for q in &queues {
        for ph in 0..3 {
            let s = if q.is_empty() && ph == 0 { b.start } else { b.state(&name(q, ph)) };
            for r in 0..2u32 {
                let mut nq = q.clone();
                nq.push(r == 1);
                if nq.len() > cap {
                    nq.remove(0);
                }
                let out = if ph == 0 && !nq.is_empty() { nq.remove(0) } else { false };
                let ns = if nq.is_empty() && ph == 2 { b.start } else { b.state(&name(&nq, (ph + 1) % 3)) };
                b.set(s, r, out as u32, Move::R, ns);
            }
        }
    }
    let (l, h) = (b.limit, b.halt);
    b.set_all(l, |r| (r, Move::R, h));
    b.build()
}

/// One-pass stretch attempt that keeps every third cell and blanks the rest.
pub fn blanking_stretch() -> Program {
    let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
    let (s, l, h) = (b.start, b.limit, b.halt);
    let (z1, z2) = (b.state("z1"), b.state("z2"));
    b.set_all(s, |r| (r, Move::R, z1));
    b.set_all(z1, |_| (0, Move::R, z2));
    b.set_all(z2, |_| (0, Move::R, s));
    b.set_all(l, |r| (r, Move::R, h));
    b.build()
}

/// Stretch attempt that never leaves cell 0.
pub fn stalled_stretch() -> Program {
    let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
    let (s, l, h) = (b.start, b.limit, b.halt);
    b.set_all(s, |r| (r, Move::L, s));
    b.set_all(l, |r| (r, Move::R, h));
    b.build()
}

/// The one-pass stretch attempts the counting argument is run against.
pub fn stretch_attempts() -> Vec<(&'static str, Program)> {
    vec![
        ("queue-1", queue_stretch(1)),
        ("queue-2", queue_stretch(2)),
        ("queue-3", queue_stretch(3)),
        ("blanking", blanking_stretch()),
        ("stalled", stalled_stretch()),
    ]
}

/// The named samples, as listed by the CLI.
pub fn by_name(name: &str) -> Option<Program> {
    Some(match name {
        "identity" => identity(),
        "not" => bitwise_not(),
        "every-other" => every_other_bit(),
        "first-bit" => first_bit(),
        "zero" => constant_zero(),
        "loop" => never_halts(),
        _ => return None,
    })
}

pub const NAMES: [&str; 6] = ["identity", "not", "every-other", "first-bit", "zero", "loop"];
