//! Configurations and the successor and limit rules.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::program::{Move, Program, StateId};
use crate::tape::TapeWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("the machine is halted")]
    Halted,
    #[error("limit summary does not match the machine shape: {0}")]
    BadSummary(String),
    #[error("input does not match the machine shape: {0}")]
    BadInput(String),
}

/// State, head position, every tape and the scratch pad at one stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub state: StateId,
    pub head: usize,
    pub tapes: Vec<TapeWord>,
    pub pad: Vec<bool>,
}

impl Configuration {
    /// The tape that carries the output: the third tape of a three-tape
    /// machine, otherwise the only tape.
    pub fn output(&self) -> &TapeWord {
        if self.tapes.len() == 3 {
            &self.tapes[2]
        } else {
            &self.tapes[0]
        }
    }
}

/// Per-cell limsup values handed to [`apply_limit`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LimitSummary {
    pub tapes: Vec<TapeWord>,
    pub pad: Vec<bool>,
}

pub fn init_configuration(p: &Program, input: &TapeWord) -> Configuration {
    let shape = p.shape();
    let mut tapes = vec![TapeWord::zeros(); shape.tape_count];
    tapes[0] = input.clone();
    Configuration { state: p.start(), head: 0, tapes, pad: vec![false; shape.scratch_pad_cells] }
}

/// Packs the bits under the head (and the pad) into a read vector.
pub fn read_vector(p: &Program, c: &Configuration) -> u32 {
    let shape = p.shape();
    let mut v = 0u32;
    let mut i = 0;
    for tape in &c.tapes {
        for k in 0..shape.head_width {
            v |= (tape.get(c.head + k) as u32) << i;
            i += 1;
        }
    }
    for &b in &c.pad {
        v |= (b as u32) << i;
        i += 1;
    }
    v
}

/// Head position after a move; moving left from cell 0 leaves the head there.
pub fn moved(head: usize, mv: Move) -> usize {
    match mv {
        Move::L => head.saturating_sub(1),
        Move::R => head + 1,
    }
}

/// One successor step.
pub fn step(p: &Program, c: &Configuration) -> Result<Configuration, MachineError> {
    if c.state == p.halt() {
        return Err(MachineError::Halted);
    }
    let shape = p.shape();
    let read = read_vector(p, c);
    let t = p.transition(c.state, read).expect("validated programs are total");
    let mut next = c.clone();
    let mut i = 0;
    for tape in next.tapes.iter_mut() {
        for k in 0..shape.head_width {
            *tape = tape.with(c.head + k, t.write >> i & 1 == 1);
            i += 1;
        }
    }
    for b in next.pad.iter_mut() {
        *b = t.write >> i & 1 == 1;
        i += 1;
    }
    next.state = t.next;
    next.head = moved(c.head, t.mv);
    Ok(next)
}

/// The configuration entered at a limit stage.
pub fn apply_limit(p: &Program, summary: &LimitSummary) -> Result<Configuration, MachineError> {
    let shape = p.shape();
    if summary.tapes.len() != shape.tape_count || summary.pad.len() != shape.scratch_pad_cells {
        return Err(MachineError::BadSummary(format!(
            "{} tapes and {} pad cells",
            summary.tapes.len(),
            summary.pad.len()
        )));
    }
    Ok(Configuration { state: p.limit(), head: 0, tapes: summary.tapes.clone(), pad: summary.pad.clone() })
}

/// Whether `c2` is `c1` moved right by `d`: same state and pad, head advanced
/// by `d`, and every tape of `c2` from cell `d` on equal to the matching tape of `c1`.
pub fn shift_equivalent(c1: &Configuration, c2: &Configuration, d: usize) -> bool {
    d > 0
        && c1.state == c2.state
        && c1.pad == c2.pad
        && c2.head == c1.head + d
        && c1.tapes.len() == c2.tapes.len()
        && c1.tapes.iter().zip(&c2.tapes).all(|(a, b)| b.suffix(d) == *a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{MachineShape, ProgramBuilder};

    fn mover(mv: Move) -> Program {
        let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
        let (s, l) = (b.start, b.limit);
        b.set_all(s, |r| (r, mv, s));
        b.set_all(l, |r| (r, mv, l));
        b.build()
    }

    #[test]
    fn left_move_at_cell_zero_stays() {
        let p = mover(Move::L);
        let c = init_configuration(&p, &"1(0)".parse().unwrap());
        let c2 = step(&p, &c).unwrap();
        assert_eq!(c2.head, 0);
        assert_eq!(c2.state, p.start());
    }

    #[test]
    fn writes_extend_prefix() {
        let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
        let s = b.start;
        b.set_all(s, |_| (1, Move::R, s));
        let p = b.build();
        let mut c = init_configuration(&p, &"1(0)".parse().unwrap());
        c.head = 3;
        let c2 = step(&p, &c).unwrap();
        assert_eq!(c2.tapes[0].to_string(), "1001(0)");
    }

    #[test]
    fn double_head_reads_two_cells() {
        let p = {
            let b = ProgramBuilder::new(MachineShape::DOUBLE_HEAD);
            b.build()
        };
        let c = init_configuration(&p, &"10(0)".parse().unwrap());
        assert_eq!(read_vector(&p, &c), 0b01);
    }

    #[test]
    fn three_tape_init_and_pad() {
        let p = ProgramBuilder::new(MachineShape::THREE_TAPE).build();
        let a: TapeWord = "101(0)".parse().unwrap();
        let c = init_configuration(&p, &a);
        assert_eq!(c.tapes, vec![a, TapeWord::zeros(), TapeWord::zeros()]);
        let q = ProgramBuilder::new(MachineShape::with_pad(1)).build();
        assert_eq!(init_configuration(&q, &TapeWord::zeros()).pad, vec![false]);
    }

    #[test]
    fn limit_resets_head_and_state() {
        let p = mover(Move::R);
        let s = LimitSummary { tapes: vec!["1(01)".parse().unwrap()], pad: vec![] };
        let c = apply_limit(&p, &s).unwrap();
        assert_eq!((c.state, c.head), (p.limit(), 0));
    }

    #[test]
    fn shift_equivalence() {
        let p = mover(Move::R);
        let c1 = Configuration { state: p.start(), head: 2, tapes: vec!["1101(0)".parse().unwrap()], pad: vec![] };
        let c2 = Configuration { state: p.start(), head: 5, tapes: vec!["0001101(0)".parse().unwrap()], pad: vec![] };
        assert!(shift_equivalent(&c1, &c2, 3));
        let mut c3 = c2.clone();
        c3.state = p.limit();
        assert!(!shift_equivalent(&c1, &c3, 3));
        let z = Configuration { state: p.start(), head: 0, tapes: vec![TapeWord::zeros()], pad: vec![] };
        let z1 = Configuration { head: 1, ..z.clone() };
        assert!(shift_equivalent(&z, &z1, 1));
        assert!(!shift_equivalent(&z, &z, 1));
    }
}
