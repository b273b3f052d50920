#![allow(dead_code)]

use ittm::program::{MachineShape, Move, Program, ProgramBuilder};
use ittm::tape::TapeWord;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Total program with `extra` states besides start, limit and halt; halting
/// transitions are drawn with probability `halt`.
pub fn random_program(r: &mut StdRng, shape: MachineShape, extra: usize, halt: f64) -> Program {
    let mut b = ProgramBuilder::new(shape);
    let mut states = vec![b.start, b.limit];
    for i in 0..extra {
        states.push(b.state(&format!("s{i}")));
    }
    let h = b.halt;
    let writes = 1u32 << shape.width();
    for &s in &states {
        for read in 0..writes {
            let next = if r.gen_bool(halt) { h } else { states[r.gen_range(0..states.len())] };
            let mv = if r.gen_bool(0.5) { Move::L } else { Move::R };
            b.set(s, read, r.gen_range(0..writes), mv, next);
        }
    }
    b.build()
}

pub fn random_word(r: &mut StdRng) -> TapeWord {
    let n = r.gen_range(0..6);
    let p = r.gen_range(1..4);
    let prefix = (0..n).map(|_| r.gen_bool(0.5)).collect();
    let period = (0..p).map(|_| r.gen_bool(0.5)).collect();
    TapeWord::new(prefix, period).unwrap()
}

pub fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}
