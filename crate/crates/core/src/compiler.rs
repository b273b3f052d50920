//! Translations of three-tape programs into one-tape programs, and the
//! stretch and compression programs they are built from.
//!
//! Block layouts interleave the simulated tapes: with blocks of three, cell
//! `3i+t` holds cell `i` of tape `t`. Blocks of four add a marker cell that is
//! 1 only in the leftmost block, so the simulation knows when a left move
//! must stay put.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::program::{MachineShape, Move, Program, ProgramBuilder, StateId};

/// Longest σ accepted by [`compile_notdense`]; phase one keeps `|σ|+5` input
/// bits in its state.
pub const MAX_SIGMA: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("expected a three-tape program with single-cell head and no pad, got {0}")]
    Shape(String),
    #[error("sigma must be non-empty")]
    EmptySigma,
    #[error("sigma longer than {MAX_SIGMA} bits")]
    SigmaTooLong,
    #[error("unsupported layout: {0}")]
    Layout(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    InputSim,
    ScratchSim,
    OutputSim,
    LeftmostMarker,
}

/// Flag cells at the start of the tape followed by fixed-width blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockLayout {
    pub flag_cells: usize,
    field_roles: Vec<Role>,
}

impl BlockLayout {
    pub fn new(flag_cells: usize, field_roles: Vec<Role>) -> Result<Self, CompileError> {
        if field_roles.is_empty() {
            return Err(CompileError::Layout("no fields".into()));
        }
        if field_roles.iter().filter(|&&r| r == Role::LeftmostMarker).count() > 1 {
            return Err(CompileError::Layout("more than one leftmost marker".into()));
        }
        Ok(BlockLayout { flag_cells, field_roles })
    }

    /// Blocks of three, no flags.
    pub fn three() -> Self {
        BlockLayout { flag_cells: 0, field_roles: vec![Role::InputSim, Role::ScratchSim, Role::OutputSim] }
    }

    /// Two flag cells, then blocks of three fields and a marker.
    pub fn four() -> Self {
        BlockLayout {
            flag_cells: 2,
            field_roles: vec![Role::InputSim, Role::ScratchSim, Role::OutputSim, Role::LeftmostMarker],
        }
    }

    pub fn block_width(&self) -> usize {
        self.field_roles.len()
    }

    pub fn field_roles(&self) -> &[Role] {
        &self.field_roles
    }

    pub fn field(&self, role: Role) -> Option<usize> {
        self.field_roles.iter().position(|&r| r == role)
    }
}

fn check_three_tape(p: &Program) -> Result<(), CompileError> {
    if p.shape() != MachineShape::THREE_TAPE {
        return Err(CompileError::Shape(format!("{:?}", p.shape())));
    }
    Ok(())
}

fn bit(v: u32, i: usize) -> u32 {
    v >> i & 1
}

/// Builder wrapper for one-tape programs whose read vector may carry a second
/// bit (a pad cell or the cell right of the head) that is written back
/// unchanged unless a transition is set directly.
pub(crate) struct Emitter {
    pub b: ProgramBuilder,
    pub extra: bool,
}

impl Emitter {
    pub fn new(shape: MachineShape) -> Self {
        Emitter { b: ProgramBuilder::new(shape), extra: shape.width() == 2 }
    }

    pub fn st(&mut self, name: &str) -> StateId {
        self.b.state(name)
    }

    /// On tape bit `r`, write `w` and keep the second bit.
    pub fn on(&mut self, s: StateId, r: u32, w: u32, mv: Move, next: StateId) {
        if self.extra {
            for p in 0..2 {
                self.b.set(s, r | p << 1, w | p << 1, mv, next);
            }
        } else {
            self.b.set(s, r, w, mv, next);
        }
    }

    pub fn pass(&mut self, s: StateId, mv: Move, next: StateId) {
        for r in 0..2 {
            self.on(s, r, r, mv, next);
        }
    }

    pub fn write(&mut self, s: StateId, w: u32, mv: Move, next: StateId) {
        for r in 0..2 {
            self.on(s, r, w, mv, next);
        }
    }

    pub fn build(self) -> Program {
        self.b.build()
    }
}

/// Seven micro-steps per simulated step over blocks of three.
///
/// At micro-stage `7k` the head sits on the first cell of the block for the
/// simulated head, in the state named after the simulated state. A simulated
/// halt is taken on the fifth micro-step, after the block has been written.
pub fn compile_simulate(p: &Program) -> Result<Program, CompileError> {
    check_three_tape(p)?;
    let mut em = Emitter::new(MachineShape::ONE_TAPE);
    let entry = |em: &mut Emitter, n: StateId| -> StateId {
        if n == p.start() {
            em.b.start
        } else if n == p.limit() {
            em.b.limit
        } else {
            em.st(&format!("{}.1", p.name(n)))
        }
    };
    let halt = em.b.halt;
    for n in 0..p.state_count() {
        if n == p.halt() {
            continue;
        }
        let name = p.name(n).to_string();
        let s1 = entry(&mut em, n);
        for x in 0..2 {
            let s2 = em.st(&format!("{name}.2.{x}"));
            em.on(s1, x, x, Move::R, s2);
            for y in 0..2 {
                let s3 = em.st(&format!("{name}.3.{x}{y}"));
                em.on(s2, y, y, Move::R, s3);
                for z in 0..2 {
                    let t = p.transition(n, x | y << 1 | z << 2).expect("validated program");
                    let tag = format!("{}{}.{}", t.write, t.mv, p.name(t.next));
                    let s4 = em.st(&format!("{name}.4.{tag}"));
                    em.on(s3, z, bit(t.write, 2), Move::L, s4);
                    let s5 = em.st(&format!("{name}.5.{tag}"));
                    em.write(s4, bit(t.write, 1), Move::L, s5);
                    if t.next == p.halt() {
                        em.write(s5, bit(t.write, 0), t.mv, halt);
                        continue;
                    }
                    let (s6, s7) = (em.st(&format!("m6.{}.{}", t.mv, p.name(t.next))), em.st(&format!("m7.{}.{}", t.mv, p.name(t.next))));
                    em.write(s5, bit(t.write, 0), t.mv, s6);
                    em.pass(s6, t.mv, s7);
                    let target = entry(&mut em, t.next);
                    em.pass(s7, t.mv, target);
                }
            }
        }
    }
    Ok(em.build())
}

/// The stretch `a ↦ ⟨a₀00a₁00···⟩` for [`BlockLayout::three`], or the
/// flagged four-wide variant `⟨00a₀101a₁000···⟩` for [`BlockLayout::four`].
pub fn stretch_program(layout: &BlockLayout) -> Result<Program, CompileError> {
    if *layout == BlockLayout::three() {
        Ok(stretch3())
    } else if *layout == BlockLayout::four() {
        Ok(onehat_machine(None, &Frame::new(Mode::Stretch)))
    } else {
        Err(CompileError::Layout(format!("{layout:?}")))
    }
}

fn stretch3() -> Program {
    let mut em = Emitter::new(MachineShape::ONE_TAPE);
    let (start, limit, halt) = (em.b.start, em.b.limit, em.b.halt);
    let c1 = em.st("c1");
    em.pass(start, Move::R, c1);
    let sh = |em: &mut Emitter, b: u32, c: u32| em.st(&format!("sh{b}{c}"));
    for a1 in 0..2 {
        let c2 = em.st(&format!("c2.{a1}"));
        em.on(c1, a1, 0, Move::R, c2);
        for a2 in 0..2 {
            let t = sh(&mut em, a1, a2);
            em.on(c2, a2, 1, Move::R, t);
        }
    }
    for b in 0..2 {
        for c in 0..2 {
            let s = sh(&mut em, b, c);
            for e in 0..2 {
                let t = sh(&mut em, c, e);
                em.on(s, e, b, Move::R, t);
            }
        }
    }
    let (l1, f1, f2) = (em.st("l1"), em.st("flash1"), em.st("flash2"));
    em.pass(limit, Move::R, l1);
    em.on(l1, 1, 0, Move::R, halt);
    em.on(l1, 0, 1, Move::L, f1);
    em.pass(f1, Move::R, f2);
    let seek = [em.st("seek0"), em.st("seek1"), em.st("seek2")];
    em.write(f2, 0, Move::R, seek[0]);
    let (keep, new0) = (em.st("keep"), em.st("new0"));
    em.on(seek[0], 0, 0, Move::R, seek[1]);
    em.on(seek[0], 1, 0, Move::R, keep);
    em.pass(seek[1], Move::R, seek[2]);
    em.pass(seek[2], Move::R, seek[0]);
    em.pass(keep, Move::R, new0);
    for e in 0..2 {
        let n1 = em.st(&format!("new1.{e}"));
        em.on(new0, e, 0, Move::R, n1);
        for c in 0..2 {
            let t = sh(&mut em, e, c);
            em.on(n1, c, 1, Move::R, t);
        }
    }
    em.build()
}

/// Copies field `field` of every `width`-cell block (after `flag_cells`
/// cells) to cell `i`, zeroing the rest, and halts at the first limit.
pub fn compression_program(layout: &BlockLayout) -> Result<Program, CompileError> {
    let field = layout
        .field(Role::OutputSim)
        .ok_or_else(|| CompileError::Layout("no output field".into()))?;
    let width = layout.block_width();
    if width < 3 {
        return Err(CompileError::Layout("compression needs blocks of at least three cells".into()));
    }
    let mut em = Emitter::new(MachineShape::ONE_TAPE);
    let (start, limit, halt) = (em.b.start, em.b.limit, em.b.halt);
    let mut at = start;
    for i in 0..layout.flag_cells {
        let next = em.st(&format!("skip{i}"));
        em.pass(at, Move::R, next);
        at = next;
    }
    emit_compressor(&mut em, at, 0, layout.flag_cells, width, field);
    em.pass(limit, Move::R, halt);
    Ok(em.build())
}

/// Compressor entered at the first cell of block 0 (cell `l`): field `f` of
/// block `k` ends up at cell `o + k`, every other cell from `o` on is zeroed.
///
/// Two markers travel right: `S` on the last cell of the block just read and
/// `W` on the next output cell; everything strictly between them is 0.
fn emit_compressor(em: &mut Emitter, entry: StateId, o: usize, l: usize, w: usize, f: usize) {
    let seek_s = em.st("cmp.seekS");
    let put_w = em.st("cmp.putW");
    // Block reader shared by the first block and all later ones.
    let read_block = |em: &mut Emitter, first: StateId, tag: &str, after: &dyn Fn(&mut Emitter, u32) -> StateId| {
        let mut cur = vec![(first, None::<u32>)];
        for i in 0..w {
            let mut next = Vec::new();
            for &(s, z) in &cur {
                for r in 0..2 {
                    let z2 = if i == f { Some(r) } else { z };
                    if i + 1 == w {
                        let t = after(em, z2.unwrap_or(0));
                        em.on(s, r, 1, Move::L, t);
                    } else {
                        let zs = z2.map_or("_".to_string(), |v| v.to_string());
                        let t = em.st(&format!("cmp.{tag}{}.{zs}", i + 1));
                        em.on(s, r, 0, Move::R, t);
                        if !next.iter().any(|&(n, _)| n == t) {
                            next.push((t, z2));
                        }
                    }
                }
            }
            cur = next;
        }
    };
    let walk = l + w - 2 - o;
    read_block(em, entry, "init", &|em, z| {
        let mut s = em.st(&format!("cmp.walk{z}.0"));
        let first = s;
        for i in 1..walk {
            let t = em.st(&format!("cmp.walk{z}.{i}"));
            em.write(s, 0, Move::L, t);
            s = t;
        }
        let put = em.st(&format!("cmp.put{z}"));
        em.write(s, 0, Move::L, put);
        em.write(put, z, Move::R, put_w);
        first
    });
    em.write(put_w, 1, Move::R, seek_s);
    let blk = em.st("cmp.blk0");
    em.on(seek_s, 0, 0, Move::R, seek_s);
    em.on(seek_s, 1, 0, Move::R, blk);
    read_block(em, blk, "blk", &|em, z| {
        let seek_w = em.st(&format!("cmp.seekW{z}"));
        em.on(seek_w, 0, 0, Move::L, seek_w);
        let pw = em.st("cmp.putW");
        em.on(seek_w, 1, z, Move::R, pw);
        seek_w
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Flag cells at 0 and 1, output `1` followed by the compressed output.
    OneHat,
    /// σ occupies the first cells; output is the compressed output itself.
    NotDense,
    /// Flag 0 is the pad cell and flag 1 is tape cell 0.
    Pad,
    /// Phase one alone, halting on the completed four-wide stretch.
    Stretch,
}

/// Cell positions of the four-wide layout for one mode.
#[derive(Debug, Clone)]
struct Frame {
    mode: Mode,
    sigma: Vec<bool>,
    /// Tape cell of flag 0, if on the tape; flag 1 sits right before block 0.
    f0: Option<usize>,
    /// First cell of block 0.
    l: usize,
    /// Cell receiving the first compressed bit.
    o: usize,
}

impl Frame {
    fn new(mode: Mode) -> Self {
        Self::with_sigma(mode, Vec::new())
    }

    fn with_sigma(mode: Mode, sigma: Vec<bool>) -> Self {
        let s = sigma.len();
        match mode {
            Mode::Pad => Frame { mode, sigma, f0: None, l: 1, o: 0 },
            Mode::OneHat | Mode::Stretch => Frame { mode, sigma, f0: Some(0), l: 2, o: 1 },
            Mode::NotDense => Frame { mode, sigma, f0: Some(s), l: s + 2, o: 0 },
        }
    }

    /// Phase-one target cell `c`, given the input bits read so far.
    fn target(&self, c: usize, a: impl Fn(usize) -> u32) -> u32 {
        let l = self.l;
        if c < self.sigma.len() {
            self.sigma[c] as u32
        } else if c < l {
            0
        } else if c == l {
            a(0)
        } else if c == l + 1 {
            0
        } else if c <= l + 3 {
            1
        } else {
            a(c - l - 3)
        }
    }
}

fn bits_name(bits: &[u32]) -> String {
    bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
}

/// The three-phase program: four-wide stretch, simulation over blocks of
/// four, compression. `p` is `None` only in [`Mode::Stretch`].
fn onehat_machine(p: Option<&Program>, fr: &Frame) -> Program {
    let mut em = Emitter::new(if fr.mode == Mode::Pad { MachineShape::with_pad(1) } else { MachineShape::ONE_TAPE });
    let (start, limit, halt) = (em.b.start, em.b.limit, em.b.halt);
    let l = fr.l;
    let k = l + 3;

    // Phase one: shift the input right by k while laying down the target.
    let init = |em: &mut Emitter, c: usize, bits: &[u32]| -> StateId {
        if c == 0 {
            start
        } else if c <= k {
            em.st(&format!("p1.{c}.{}", bits_name(bits)))
        } else {
            em.st(&format!("p1.q{}", bits_name(bits)))
        }
    };
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for c in 0..=k {
        let mut next = Vec::new();
        for bits in &layer {
            let s = init(&mut em, c, bits);
            for v in 0..2 {
                let w = fr.target(c, |i| bits[i]);
                let mut nb = bits.clone();
                nb.push(v);
                if c == k {
                    nb.remove(0);
                }
                let t = init(&mut em, c + 1, &nb);
                em.on(s, v, w, Move::R, t);
                if c < k {
                    next.push(nb);
                }
            }
        }
        layer = next;
    }
    for q in 0..1u32 << k {
        let bits: Vec<u32> = (0..k).map(|i| q >> i & 1).collect();
        let s = init(&mut em, k + 1, &bits);
        for v in 0..2 {
            let mut nb = bits[1..].to_vec();
            nb.push(v);
            let t = init(&mut em, k + 1, &nb);
            em.on(s, v, bits[0], Move::R, t);
        }
    }

    // Limit dispatch: σ check, flag 0, flag 1.
    let sim_entry = |em: &mut Emitter, p: &Program, n: StateId| em.st(&format!("b4.{}.1", p.name(n)));
    let f1 = if fr.mode == Mode::Pad { limit } else { em.st("flag1") };
    if let Some(f0c) = fr.f0 {
        let mut at = limit;
        for c in 0..f0c {
            let next = if c + 1 == f0c { em.st("flag0") } else { em.st(&format!("sigma{}", c + 1)) };
            let want = fr.sigma[c] as u32;
            em.on(at, want, want, Move::R, next);
            em.on(at, 1 - want, 1 - want, Move::R, halt);
            at = next;
        }
        em.on(at, 1, 1, Move::R, halt);
        em.on(at, 0, 0, Move::R, f1);
    } else {
        for r in 0..2 {
            em.b.set(limit, r | 2, r | 2, Move::R, halt);
        }
    }
    let (p1x, p1y) = (em.st("p1.x0"), em.st("p1.y0"));
    let set_pad_free = |em: &mut Emitter, s: StateId, r: u32, w: u32, mv: Move, next: StateId| {
        if em.extra {
            em.b.set(s, r, w, mv, next);
        } else {
            em.on(s, r, w, mv, next);
        }
    };
    match p {
        Some(p) => {
            let t = sim_entry(&mut em, p, p.limit());
            set_pad_free(&mut em, f1, 1, 1, Move::R, t);
        }
        None => set_pad_free(&mut em, f1, 1, 1, Move::R, halt),
    }
    set_pad_free(&mut em, f1, 0, 0, Move::R, p1x);
    em.pass(p1x, Move::R, p1y);

    // Completed stretch: erase the flag and set flag 1, or stop here.
    match p {
        Some(p) => {
            let (back, mark) = (em.st("p2.back"), em.st("p2.mark"));
            em.on(p1y, 1, 0, Move::L, back);
            em.pass(back, Move::L, mark);
            let t = sim_entry(&mut em, p, p.start());
            em.write(mark, 1, Move::R, t);
        }
        None => em.on(p1y, 1, 1, Move::R, halt),
    }
    // Otherwise flash y0 and move the marker one block right.
    let (fl1, fl2) = (em.st("p1.flash1"), em.st("p1.flash2"));
    let seek: Vec<StateId> = (0..4).map(|i| em.st(&format!("p1.seek{i}"))).collect();
    em.on(p1y, 0, 1, Move::L, fl1);
    em.pass(fl1, Move::R, fl2);
    em.write(fl2, 0, Move::R, seek[0]);
    let (km, kx, mvy) = (em.st("p1.km"), em.st("p1.kx"), em.st("p1.mvy"));
    em.on(seek[0], 0, 0, Move::R, seek[1]);
    em.on(seek[0], 1, 0, Move::R, km);
    for i in 1..4 {
        em.pass(seek[i], Move::R, seek[(i + 1) % 4]);
    }
    em.pass(km, Move::R, kx);
    em.pass(kx, Move::R, mvy);
    let sh3 = |em: &mut Emitter, e: u32, f: u32, g: u32| em.st(&format!("p1.sh{e}{f}{g}"));
    for e in 0..2 {
        let mvz = em.st(&format!("p1.mvz{e}"));
        em.on(mvy, e, 0, Move::R, mvz);
        for f in 0..2 {
            let mvm = em.st(&format!("p1.mvm{e}{f}"));
            em.on(mvz, f, 1, Move::R, mvm);
            for g in 0..2 {
                let t = sh3(&mut em, e, f, g);
                em.on(mvm, g, 0, Move::R, t);
            }
        }
    }
    for q in 0..8u32 {
        let (e, f, g) = (q & 1, q >> 1 & 1, q >> 2 & 1);
        let s = sh3(&mut em, e, f, g);
        for v in 0..2 {
            let t = sh3(&mut em, f, g, v);
            em.on(s, v, e, Move::R, t);
        }
    }

    let Some(p) = p else { return em.build() };

    // Phase two: ten micro-steps per simulated step over blocks of four.
    let pre = em.st("p3.pre");
    for n in 0..p.state_count() {
        if n == p.halt() {
            continue;
        }
        let name = p.name(n).to_string();
        let s1 = sim_entry(&mut em, p, n);
        for x in 0..2 {
            let s2 = em.st(&format!("b4.{name}.2.{x}"));
            em.on(s1, x, x, Move::R, s2);
            for y in 0..2 {
                let s3 = em.st(&format!("b4.{name}.3.{x}{y}"));
                em.on(s2, y, y, Move::R, s3);
                for z in 0..2 {
                    let s4 = em.st(&format!("b4.{name}.4.{x}{y}{z}"));
                    em.on(s3, z, z, Move::R, s4);
                    let t = p.transition(n, x | y << 1 | z << 2).expect("validated program");
                    for m in 0..2 {
                        let tag = format!("{}{}{m}.{}", t.write, t.mv, p.name(t.next));
                        let s5 = em.st(&format!("b4.5.{tag}"));
                        em.on(s4, m, m, Move::L, s5);
                        let s6 = em.st(&format!("b4.6.{tag}"));
                        em.write(s5, bit(t.write, 2), Move::L, s6);
                        let s7 = em.st(&format!("b4.7.{tag}"));
                        em.write(s6, bit(t.write, 1), Move::L, s7);
                        let w0 = bit(t.write, 0);
                        if t.next == p.halt() {
                            if m == 1 {
                                let back = em.st("p3.back");
                                em.write(s7, w0, Move::R, back);
                                em.pass(back, Move::L, pre);
                            } else {
                                let hs = em.st("p3.seek");
                                em.write(s7, w0, Move::L, hs);
                            }
                            continue;
                        }
                        let target = sim_entry(&mut em, p, t.next);
                        let moves = match (t.mv, m) {
                            (Move::R, _) => [Move::R; 4],
                            (Move::L, 0) => [Move::L; 4],
                            (Move::L, _) => [Move::R, Move::L, Move::R, Move::L],
                        };
                        let tail = format!("{}{m}.{}", t.mv, p.name(t.next));
                        let mut s = em.st(&format!("b4.8.{tail}"));
                        em.write(s7, w0, moves[0], s);
                        for (i, &mv) in moves.iter().enumerate().skip(1) {
                            let t2 = if i == 3 { target } else { em.st(&format!("b4.{}.{tail}", 8 + i)) };
                            em.pass(s, mv, t2);
                            s = t2;
                        }
                    }
                }
            }
        }
    }
    // After a simulated halt off block 0, walk left along the marker cells.
    let hs = em.st("p3.seek");
    let hl: Vec<StateId> = (0..3).map(|i| em.st(&format!("p3.seekl{i}"))).collect();
    let hf: Vec<StateId> = (0..2).map(|i| em.st(&format!("p3.found{i}"))).collect();
    em.on(hs, 0, 0, Move::L, hl[0]);
    em.pass(hl[0], Move::L, hl[1]);
    em.pass(hl[1], Move::L, hl[2]);
    em.pass(hl[2], Move::L, hs);
    em.on(hs, 1, 1, Move::L, hf[0]);
    em.pass(hf[0], Move::L, hf[1]);
    em.pass(hf[1], Move::L, pre);

    // Phase three prelude, then compression of field 2.
    let comp = match fr.mode {
        Mode::OneHat => {
            let (a, b, c) = (em.st("p3.f1"), em.st("p3.f0"), em.st("p3.f1b"));
            let comp = em.st("p3.compress");
            em.pass(pre, Move::L, a);
            em.pass(a, Move::L, b);
            em.write(b, 1, Move::R, c);
            em.pass(c, Move::R, comp);
            comp
        }
        Mode::Pad => {
            let a = em.st("p3.padset");
            let comp = em.st("p3.compress");
            for r in 0..2 {
                em.b.set(pre, r, r | 2, Move::R, a);
                em.b.set(pre, r | 2, r | 2, Move::R, a);
            }
            em.pass(a, Move::L, comp);
            comp
        }
        _ => pre,
    };
    emit_compressor(&mut em, comp, fr.o, l, 4, 2);
    em.build()
}

/// One-tape program computing `x ↦ 1⁀f(x)` for the function `f` of `p`.
pub fn compile_onehat(p: &Program) -> Result<Program, CompileError> {
    check_three_tape(p)?;
    Ok(onehat_machine(Some(p), &Frame::new(Mode::OneHat)))
}

/// One-tape program computing `f` itself, provided `σ` is never a prefix of
/// an output of `p`; it halts at the first limit where the tape no longer
/// starts with `σ`.
pub fn compile_notdense(p: &Program, sigma: &[bool]) -> Result<Program, CompileError> {
    check_three_tape(p)?;
    if sigma.is_empty() {
        return Err(CompileError::EmptySigma);
    }
    if sigma.len() > MAX_SIGMA {
        return Err(CompileError::SigmaTooLong);
    }
    Ok(onehat_machine(Some(p), &Frame::with_sigma(Mode::NotDense, sigma.to_vec())))
}

/// For deciders with outputs `1(0)` and `(0)`: [`compile_notdense`] with σ = `01`.
pub fn compile_characteristic(p: &Program) -> Result<Program, CompileError> {
    compile_notdense(p, &[false, true])
}

/// One-tape program with one pad cell computing `f` exactly; the leading 1 of
/// the onehat construction lands on the pad.
pub fn compile_scratchpad(p: &Program) -> Result<Program, CompileError> {
    check_three_tape(p)?;
    Ok(onehat_machine(Some(p), &Frame::new(Mode::Pad)))
}

/// Stretch, block simulation and compression, run one after another with
/// each output fed to the next as input.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub stretch: Program,
    pub simulate: Program,
    pub compress: Program,
}

impl Pipeline {
    pub fn stages(&self) -> [(&'static str, &Program); 3] {
        [("stretch", &self.stretch), ("simulate", &self.simulate), ("compress", &self.compress)]
    }
}

/// Manifest document naming the program files in chaining order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub chain: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub role: String,
    pub file: String,
}

pub fn pipeline_manifest(p: &Program) -> Result<Pipeline, CompileError> {
    Ok(Pipeline {
        stretch: stretch_program(&BlockLayout::three())?,
        simulate: compile_simulate(p)?,
        compress: compression_program(&BlockLayout::three())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn layouts() {
        assert_eq!(BlockLayout::three().block_width(), 3);
        assert_eq!(BlockLayout::four().field(Role::LeftmostMarker), Some(3));
        assert!(BlockLayout::new(0, vec![Role::LeftmostMarker, Role::LeftmostMarker]).is_err());
        assert!(stretch_program(&BlockLayout::new(1, vec![Role::InputSim; 2]).unwrap()).is_err());
    }

    #[test]
    fn emitted_programs_validate() {
        for p in [samples::identity(), samples::bitwise_not(), samples::first_bit()] {
            for q in [
                compile_simulate(&p).unwrap(),
                compile_onehat(&p).unwrap(),
                compile_characteristic(&p).unwrap(),
                compile_scratchpad(&p).unwrap(),
            ] {
                q.validate().unwrap();
                assert!(Program::parse(&q.to_text()).is_ok());
            }
        }
        stretch_program(&BlockLayout::four()).unwrap().validate().unwrap();
        compression_program(&BlockLayout::three()).unwrap().validate().unwrap();
    }

    #[test]
    fn shape_is_checked() {
        let one = stretch_program(&BlockLayout::three()).unwrap();
        assert!(matches!(compile_simulate(&one), Err(CompileError::Shape(_))));
        assert_eq!(compile_notdense(&samples::identity(), &[]).unwrap_err(), CompileError::EmptySigma);
    }
}
