//! Level-0 runs: successor steps from one configuration until a halt or a
//! detected cycle that fixes the next limit.

use std::collections::HashMap;

use crate::machine::{moved, Configuration, LimitSummary};
use crate::program::{Move, Program, StateId};
use crate::tape::TapeWord;

/// Candidates examined per record for a shifted cycle.
const RECORD_WINDOW: usize = 64;

/// A tape held as explicit cells over a periodic background.
#[derive(Debug, Clone)]
pub(crate) struct WorkTape {
    base: TapeWord,
    cells: Vec<bool>,
}

impl WorkTape {
    pub fn new(base: TapeWord) -> Self {
        let cells = base.bits(base.tail_start());
        WorkTape { base, cells }
    }

    #[inline]
    pub fn get(&self, x: usize) -> bool {
        match self.cells.get(x) {
            Some(&b) => b,
            None => self.base.get(x),
        }
    }

    pub fn set(&mut self, x: usize, v: bool) {
        while self.cells.len() <= x {
            let n = self.cells.len();
            self.cells.push(self.base.get(n));
        }
        self.cells[x] = v;
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn base(&self) -> &TapeWord {
        &self.base
    }

    pub fn to_word(&self) -> TapeWord {
        let n = self.cells.len().max(self.base.tail_start());
        TapeWord::from_fn(n, self.base.period().len(), |x| self.get(x))
    }
}

/// A level-0 run settling into a cycle; `summary` is the limit content.
#[derive(Debug, Clone)]
pub(crate) struct SegmentEnd {
    pub summary: LimitSummary,
    pub ever: Option<LimitSummary>,
    pub cycle: Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cycle {
    Exact { base: u64, period: u64 },
    Shifted { base: u64, period: u64, drift: usize },
    Accelerated { base: u64, period: u64, drift: usize },
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn cell_key(channel: usize, x: usize) -> u64 {
    splitmix(((channel as u64) << 48) ^ x as u64)
}

/// Successor-stage simulation with enough history to check cycles exactly.
pub(crate) struct Segment<'a> {
    p: &'a Program,
    hw: usize,
    pub tapes: Vec<WorkTape>,
    pub pad: Vec<bool>,
    pub state: StateId,
    pub head: usize,
    pub t: u64,
    /// Per tape, per cell: (time, new value) for every change.
    hist: Vec<Vec<Vec<(u64, bool)>>>,
    /// Per tape, per cell: first time a 1 was written.
    first_one: Vec<Vec<u64>>,
    /// (time, channel, cell) in time order; channels past the tapes are pad cells.
    log: Vec<(u64, usize, usize)>,
    pub heads: Vec<usize>,
    states: Vec<StateId>,
    pad_log: Vec<u32>,
    pad_ever: u32,
    clamps: Vec<u64>,
    zobrist: u64,
    seen: HashMap<u64, Vec<u64>>,
    records: HashMap<StateId, Vec<u64>>,
    max_reach: usize,
    pub clamp_count: u64,
}

fn pack(bits: &[bool]) -> u32 {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (b as u32) << i)
}

impl<'a> Segment<'a> {
    pub fn new(p: &'a Program, c: &Configuration) -> Self {
        let shape = p.shape();
        let nt = shape.tape_count;
        let mut s = Segment {
            p,
            hw: shape.head_width,
            tapes: c.tapes.iter().cloned().map(WorkTape::new).collect(),
            pad: c.pad.clone(),
            state: c.state,
            head: c.head,
            t: 0,
            hist: vec![Vec::new(); nt],
            first_one: vec![Vec::new(); nt],
            log: Vec::new(),
            heads: vec![c.head],
            states: vec![c.state],
            pad_log: vec![pack(&c.pad)],
            pad_ever: pack(&c.pad),
            clamps: Vec::new(),
            zobrist: 0,
            seen: HashMap::new(),
            records: HashMap::new(),
            max_reach: c.head + shape.head_width - 1,
            clamp_count: 0,
        };
        let key = s.key();
        s.seen.insert(key, vec![0]);
        s.records.insert(c.state, vec![0]);
        s
    }

    pub fn program(&self) -> &'a Program {
        self.p
    }

    fn key(&self) -> u64 {
        let mut h = self.zobrist ^ splitmix(self.state as u64 ^ 0x5555_0000_0000);
        h ^= splitmix(self.head as u64 ^ 0x7777_0000_0000_0000);
        h ^ splitmix(pack(&self.pad) as u64 ^ 0x3333_0000_0000_0000_u64.rotate_left(7))
    }

    pub fn config(&self) -> Configuration {
        Configuration {
            state: self.state,
            head: self.head,
            tapes: self.tapes.iter().map(WorkTape::to_word).collect(),
            pad: self.pad.clone(),
        }
    }

    pub fn read(&self) -> u32 {
        let mut v = 0u32;
        let mut i = 0;
        for tape in &self.tapes {
            for k in 0..self.hw {
                v |= (tape.get(self.head + k) as u32) << i;
                i += 1;
            }
        }
        for &b in &self.pad {
            v |= (b as u32) << i;
            i += 1;
        }
        v
    }

    fn write_cell(&mut self, tape: usize, x: usize, v: bool) {
        if self.tapes[tape].get(x) == v {
            return;
        }
        self.tapes[tape].set(x, v);
        let time = self.t + 1;
        let h = &mut self.hist[tape];
        if h.len() <= x {
            h.resize(x + 1, Vec::new());
        }
        h[x].push((time, v));
        if v {
            let f = &mut self.first_one[tape];
            if f.len() <= x {
                f.resize(x + 1, u64::MAX);
            }
            if f[x] == u64::MAX {
                f[x] = time;
            }
        }
        self.log.push((time, tape, x));
        self.zobrist ^= cell_key(tape, x);
    }

    /// Executes one transition; returns true when it entered halt.
    pub fn step(&mut self) -> bool {
        let read = self.read();
        let tr = self.p.transition(self.state, read).expect("validated programs are total");
        let nt = self.tapes.len();
        let mut i = 0;
        for tape in 0..nt {
            for k in 0..self.hw {
                self.write_cell(tape, self.head + k, tr.write >> i & 1 == 1);
                i += 1;
            }
        }
        for j in 0..self.pad.len() {
            let v = tr.write >> i & 1 == 1;
            i += 1;
            if self.pad[j] != v {
                self.pad[j] = v;
                self.log.push((self.t + 1, nt + j, 0));
                self.zobrist ^= cell_key(nt + j, 0);
            }
        }
        if self.head == 0 && tr.mv == Move::L {
            self.clamps.push(self.t + 1);
            self.clamp_count += 1;
        }
        self.head = moved(self.head, tr.mv);
        if tr.next == self.p.halt() {
            self.state = tr.next;
            return true;
        }
        self.state = tr.next;
        self.t += 1;
        self.heads.push(self.head);
        self.states.push(self.state);
        let pk = pack(&self.pad);
        self.pad_log.push(pk);
        self.pad_ever |= pk;
        false
    }

    /// Value of a tape cell at time `tau` of this run.
    fn value_at(&self, tape: usize, x: usize, tau: u64) -> bool {
        match self.hist[tape].get(x) {
            Some(h) if !h.is_empty() => {
                let i = h.partition_point(|e| e.0 <= tau);
                if i == 0 {
                    !h[0].1
                } else {
                    h[i - 1].1
                }
            }
            _ => self.tapes[tape].get(x),
        }
    }

    pub fn ever_at(&self, tape: usize, x: usize, tau: u64) -> bool {
        if self.tapes[tape].base().get(x) {
            return true;
        }
        self.first_one[tape].get(x).is_some_and(|&f| f != u64::MAX && f <= tau)
    }

    fn log_after(&self, tau: u64) -> &[(u64, usize, usize)] {
        let i = self.log.partition_point(|e| e.0 <= tau);
        &self.log[i..]
    }

    fn current_ever(&self) -> LimitSummary {
        let tapes = (0..self.tapes.len())
            .map(|k| {
                let base = self.tapes[k].base();
                let n = self.tapes[k].len().max(base.tail_start());
                TapeWord::from_fn(n, base.period().len(), |x| self.ever_at(k, x, u64::MAX))
            })
            .collect();
        let pad = (0..self.pad.len()).map(|j| self.pad_ever >> j & 1 == 1).collect();
        LimitSummary { tapes, pad }
    }

    /// Checks the configuration at the current time against earlier equal ones.
    pub fn check_exact(&mut self) -> Option<SegmentEnd> {
        let key = self.key();
        let t = self.t;
        let candidates = self.seen.get(&key).cloned().unwrap_or_default();
        for &tau in &candidates {
            if self.equal_to_past(tau) {
                return Some(self.exact_limit(tau));
            }
        }
        self.seen.entry(key).or_default().push(t);
        None
    }

    fn equal_to_past(&self, tau: u64) -> bool {
        let i = tau as usize;
        if self.states[i] != self.state || self.heads[i] != self.head || self.pad_log[i] != pack(&self.pad) {
            return false;
        }
        let nt = self.tapes.len();
        self.log_after(tau)
            .iter()
            .filter(|e| e.1 < nt)
            .all(|&(_, k, x)| self.value_at(k, x, tau) == self.tapes[k].get(x))
    }

    fn exact_limit(&self, tau: u64) -> SegmentEnd {
        let nt = self.tapes.len();
        let mut limit: Vec<WorkTape> = self.tapes.clone();
        for &(time, k, x) in self.log_after(tau) {
            if k < nt && self.hist[k][x].iter().any(|e| e.0 == time && e.1) {
                limit[k].set(x, true);
            }
        }
        let window = &self.pad_log[tau as usize..];
        let pad_or = window.iter().fold(0, |a, &b| a | b);
        let summary = LimitSummary {
            tapes: limit.iter().map(WorkTape::to_word).collect(),
            pad: (0..self.pad.len()).map(|j| pad_or >> j & 1 == 1).collect(),
        };
        SegmentEnd {
            summary,
            ever: Some(self.current_ever()),
            cycle: Cycle::Exact { base: tau, period: self.t - tau },
        }
    }

    /// Whether the head just reached a new rightmost cell.
    pub fn is_record(&self) -> bool {
        self.head + self.hw - 1 > self.max_reach
    }

    /// At a record time, looks for an earlier record in the same state that
    /// the current configuration translates.
    pub fn check_shifted(&mut self) -> Option<SegmentEnd> {
        let reach = self.head + self.hw - 1;
        if reach <= self.max_reach {
            return None;
        }
        self.max_reach = reach;
        let t = self.t;
        let list = self.records.entry(self.state).or_default();
        list.push(t);
        let candidates: Vec<u64> = list.iter().rev().skip(1).take(RECORD_WINDOW).copied().collect();
        let mut min_head = self.head;
        let mut scanned = t;
        for tau in candidates {
            while scanned > tau {
                scanned -= 1;
                min_head = min_head.min(self.heads[scanned as usize]);
            }
            if let Some(end) = self.try_shift(tau, min_head) {
                return Some(end);
            }
        }
        None
    }

    fn try_shift(&self, tau: u64, f: usize) -> Option<SegmentEnd> {
        let i = tau as usize;
        if self.pad_log[i] != pack(&self.pad) {
            return None;
        }
        let h1 = self.heads[i];
        let d = self.head - h1;
        if f == 0 {
            let j = self.clamps.partition_point(|&c| c <= tau);
            if j < self.clamps.len() {
                return None;
            }
        }
        let reach1 = h1 + self.hw - 1;
        for tape in &self.tapes {
            let b = tape.base();
            if !d.is_multiple_of(b.period().len()) {
                return None;
            }
            let end = b.tail_start().max(reach1 + 1);
            if (reach1 + 1..end).any(|x| b.get(x + d) != b.get(x)) {
                return None;
            }
        }
        for k in 0..self.tapes.len() {
            if (f..=reach1).any(|x| self.value_at(k, x, tau) != self.tapes[k].get(x + d)) {
                return None;
            }
        }
        Some(self.shifted_limit(tau, f, d))
    }

    fn shifted_limit(&self, tau: u64, f: usize, d: usize) -> SegmentEnd {
        let nt = self.tapes.len();
        let reach2 = self.max_reach;
        let tapes = self.tapes.iter().map(|w| TapeWord::from_fn(f, d, |x| w.get(x))).collect();
        let window = &self.pad_log[tau as usize..];
        let pad_or = window.iter().fold(0, |a, &b| a | b);
        let summary = LimitSummary {
            tapes,
            pad: (0..self.pad.len()).map(|j| pad_or >> j & 1 == 1).collect(),
        };
        // Cells displaying 1 at some point during the cycle.
        let mut ones_in_cycle: Vec<Vec<usize>> = vec![Vec::new(); nt];
        for &(time, k, x) in self.log_after(tau) {
            if k < nt && self.hist[k][x].iter().any(|e| e.0 == time && e.1) {
                ones_in_cycle[k].push(x);
            }
        }
        let ever_tapes = (0..nt)
            .map(|k| {
                let base = self.tapes[k].base();
                let n0 = base.tail_start().max(reach2 + 1).max(f) + d;
                let mut e1: Vec<bool> = (0..n0 + d).map(|x| x >= f && self.value_at(k, x, tau)).collect();
                for &x in &ones_in_cycle[k] {
                    if x < e1.len() && x >= f {
                        e1[x] = true;
                    }
                }
                let mut g = e1;
                for x in f + d..g.len() {
                    if g[x - d] {
                        g[x] = true;
                    }
                }
                TapeWord::from_fn(n0, d, |x| self.ever_at(k, x, tau) || (x >= f && g[x]))
            })
            .collect();
        let ever = LimitSummary {
            tapes: ever_tapes,
            pad: (0..self.pad.len()).map(|j| self.pad_ever >> j & 1 == 1).collect(),
        };
        SegmentEnd { summary, ever: Some(ever), cycle: Cycle::Shifted { base: tau, period: self.t - tau, drift: d } }
    }

    pub fn head_width(&self) -> usize {
        self.hw
    }

    pub fn max_reach(&self) -> usize {
        self.max_reach
    }

    pub fn pad_ever(&self) -> u32 {
        self.pad_ever
    }

    pub fn records_of(&self, s: StateId) -> &[u64] {
        self.records.get(&s).map_or(&[], Vec::as_slice)
    }

    pub fn pad_at(&self, tau: u64) -> u32 {
        self.pad_log[tau as usize]
    }

    /// Column symbols (bit k = tape k) of cells `0..len` at time `tau`.
    pub fn snapshot(&self, tau: u64, len: usize) -> Vec<u8> {
        (0..len)
            .map(|x| (0..self.tapes.len()).fold(0u8, |acc, k| acc | (self.value_at(k, x, tau) as u8) << k))
            .collect()
    }

    pub fn bases(&self) -> impl Iterator<Item = &TapeWord> {
        self.tapes.iter().map(WorkTape::base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::init_configuration;
    use crate::program::{MachineShape, ProgramBuilder};

    fn run(p: &Program, input: &str, cap: u64) -> SegmentEnd {
        let c = init_configuration(p, &input.parse().unwrap());
        let mut s = Segment::new(p, &c);
        while s.t < cap {
            if s.step() {
                panic!("halted at {}", s.t);
            }
            if let Some(e) = s.check_exact() {
                return e;
            }
            if let Some(e) = s.check_shifted() {
                return e;
            }
        }
        panic!("no cycle within {cap} steps")
    }

    #[test]
    fn alternating_cell_limit_is_one() {
        let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
        let (s, a) = (b.start, b.state("a"));
        b.set_all(s, |_| (1, Move::L, a));
        b.set_all(a, |_| (0, Move::L, s));
        let p = b.build();
        let SegmentEnd { summary, cycle, .. } = run(&p, "(0)", 100);
        assert_eq!(summary.tapes[0].to_string(), "1(0)");
        assert!(matches!(cycle, Cycle::Exact { period: 2, .. }));
    }

    #[test]
    fn right_mover_limit_keeps_input() {
        let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
        let s = b.start;
        b.set_all(s, |r| (r, Move::R, s));
        let p = b.build();
        let SegmentEnd { summary, cycle, .. } = run(&p, "1101(01)", 100);
        assert_eq!(summary.tapes[0].to_string(), "1(10)");
        assert!(matches!(cycle, Cycle::Shifted { .. }));
    }

    #[test]
    fn wake_is_repeated() {
        // Writes 1,0,0 forever while moving right.
        let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
        let (s, x, y) = (b.start, b.state("x"), b.state("y"));
        b.set_all(s, |_| (1, Move::R, x));
        b.set_all(x, |_| (0, Move::R, y));
        b.set_all(y, |_| (0, Move::R, s));
        let p = b.build();
        let SegmentEnd { summary, ever, .. } = run(&p, "(1)", 100);
        assert_eq!(summary.tapes[0].to_string(), "(100)");
        assert_eq!(ever.unwrap().tapes[0].to_string(), "(1)");
    }

    #[test]
    fn untouched_cells_stay_out_of_ever() {
        let mut b = ProgramBuilder::new(MachineShape::ONE_TAPE);
        let (s, a, x, y) = (b.start, b.state("a"), b.state("x"), b.state("y"));
        b.set_all(s, |_| (0, Move::R, a));
        b.set_all(a, |_| (0, Move::R, x));
        b.set_all(x, |_| (1, Move::L, y));
        b.set_all(y, |_| (0, Move::R, x));
        let p = b.build();
        let SegmentEnd { summary, ever, .. } = run(&p, "(0)", 100);
        assert_eq!(summary.tapes[0].to_string(), "001(0)");
        assert_eq!(ever.unwrap().tapes[0].to_string(), "001(0)");
    }
}
