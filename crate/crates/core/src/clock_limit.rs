//! Two clocks simulated side by side on one tape; the halting flag at cell 0
//! may only flash once the shorter clock has halted.
//!
//! Cell 0 is the flag, cell 1 records that the shorter clock is done, and
//! blocks of nine cells follow: three fields and a head mark for each clock,
//! then a marker that is 1 only in block 0. The true head of a clock is its
//! leftmost head mark; stray marks left by a limit sit further right and are
//! absorbed when the head reaches them.

use std::collections::HashSet;

use crate::compiler::Emitter;
use crate::program::{MachineShape, Move, Program, StateId};

const WIDTH: usize = 9;
const MARK: usize = 8;
/// First cell of block 0.
const BASE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Which {
    Main,
    Timer,
}

impl Which {
    fn fields(self) -> usize {
        match self {
            Which::Main => 0,
            Which::Timer => 4,
        }
    }

    fn head(self) -> usize {
        self.fields() + 3
    }
}

/// Simulated states of both clocks; `timer` is `None` once it has halted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Ctx {
    main: StateId,
    timer: Option<StateId>,
    seen: u32,
}

struct Gen<'a> {
    em: Emitter,
    main: &'a Program,
    timer: &'a Program,
    ones: u32,
    done: HashSet<(Which, Ctx)>,
    todo: Vec<(Which, Ctx)>,
}

pub(crate) fn emit(main: &Program, timer: &Program, target: [bool; 3]) -> Program {
    let ones = (0..3).filter(|&t| target[t]).map(|t| 1 << t).sum();
    let mut g = Gen { em: Emitter::new(MachineShape::ONE_TAPE), main, timer, ones, done: HashSet::new(), todo: Vec::new() };
    let (start, limit, halt) = (g.em.b.start, g.em.b.limit, g.em.b.halt);

    // Marks for both heads and block 0, then back to the first field.
    let first = g.seek(Which::Main, Ctx { main: main.start(), timer: Some(timer.start()), seen: 0 });
    let mut s = start;
    for cell in 0..BASE + MARK {
        let t = g.em.st(&format!("init{}", cell + 1));
        let w = [BASE + 3, BASE + 7].contains(&cell);
        if w {
            g.em.write(s, 1, Move::R, t);
        } else {
            g.em.pass(s, Move::R, t);
        }
        s = t;
    }
    g.travel(s, Some(1), Move::L, MARK, "init", first);

    // Limit: flag set means halt; otherwise re-mark the heads at block 0.
    let le = g.em.st("lim.done");
    g.em.on(limit, 1, 1, Move::R, halt);
    g.em.on(limit, 0, 0, Move::R, le);
    for e in 0..2 {
        let ctx = Ctx { main: main.limit(), timer: (e == 0).then(|| timer.limit()), seen: 0 };
        let resume = g.seek(Which::Main, ctx);
        let at = g.em.st(&format!("lim.x0.{e}"));
        g.em.on(le, e, e, Move::R, at);
        let tag = format!("lim{e}");
        let mark3 = g.em.st(&format!("lim.h3.{e}"));
        g.travel(at, None, Move::R, 3, &format!("{tag}a"), mark3);
        if e == 1 {
            g.travel(mark3, Some(1), Move::L, 3, &format!("{tag}b"), resume);
        } else {
            let mark7 = g.em.st("lim.h7");
            g.travel(mark3, Some(1), Move::R, 4, &format!("{tag}b"), mark7);
            g.travel(mark7, Some(1), Move::L, 7, &format!("{tag}c"), resume);
        }
    }

    while let Some((k, c)) = g.todo.pop() {
        g.emit_seek(k, c);
    }
    g.em.build()
}

impl<'a> Gen<'a> {
    fn prog(&self, k: Which) -> &'a Program {
        match k {
            Which::Main => self.main,
            Which::Timer => self.timer,
        }
    }

    fn ctx_name(&self, c: Ctx) -> String {
        let t = c.timer.map_or("*", |s| self.timer.name(s));
        format!("{}|{}|{}", self.main.name(c.main), t, c.seen)
    }

    fn name(&self, k: Which) -> &'static str {
        match k {
            Which::Main => "a",
            Which::Timer => "b",
        }
    }

    /// Entry state of the head search for `k`, at the first cell of block 0.
    fn seek(&mut self, k: Which, c: Ctx) -> StateId {
        if self.done.insert((k, c)) {
            self.todo.push((k, c));
        }
        let n = format!("{}.seek.{}.0.", self.name(k), self.ctx_name(c));
        self.em.st(&n)
    }

    /// `count` moves in direction `dir`, the first writing `write` if given.
    fn travel(&mut self, from: StateId, write: Option<u32>, dir: Move, count: usize, tag: &str, to: StateId) {
        let mut s = from;
        for i in 0..count {
            let t = if i + 1 == count { to } else { self.em.st(&format!("{tag}.tr{dir}{i}")) };
            match (i, write) {
                (0, Some(w)) => self.em.write(s, w, dir, t),
                _ => self.em.pass(s, dir, t),
            }
            s = t;
        }
    }

    /// State at a block marker cell that walks left to block 0 and then on
    /// to its first cell, arriving in `then`.
    fn home(&mut self, then: StateId, tag: &str) -> StateId {
        let h = self.em.st(&format!("home.{tag}"));
        let found = self.em.st(&format!("home.{tag}.f"));
        let prev = self.em.st(&format!("home.{tag}.p"));
        self.em.on(h, 1, 1, Move::L, found);
        self.em.on(h, 0, 0, Move::L, prev);
        self.travel(found, None, Move::L, MARK - 1, &format!("home.{tag}.f"), then);
        self.travel(prev, None, Move::L, WIDTH - 1, &format!("home.{tag}.p"), h);
        h
    }

    fn next_after(&mut self, k: Which, c: Ctx) -> StateId {
        match (k, c.timer) {
            (Which::Main, Some(_)) => self.seek(Which::Timer, c),
            _ => self.seek(Which::Main, c),
        }
    }

    fn emit_seek(&mut self, k: Which, c: Ctx) {
        let p = self.prog(k);
        let n = match k {
            Which::Main => c.main,
            Which::Timer => c.timer.expect("only live clocks are searched"),
        };
        let (fo, ho) = (k.fields(), k.head());
        let cn = self.ctx_name(c);
        let kn = self.name(k);
        let st = |g: &mut Gen, o: usize, bits: &str| g.em.st(&format!("{kn}.seek.{cn}.{o}.{bits}"));
        let found = |g: &mut Gen, o: usize, bits: &str| g.em.st(&format!("{kn}.found.{cn}.{o}.{bits}"));
        for o in 0..WIDTH {
            let patterns: Vec<String> = if o > fo && o <= ho {
                (0..1u32 << (o - fo)).map(|v| (0..o - fo).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect()).collect()
            } else {
                vec![String::new()]
            };
            for bits in patterns {
                let s = st(self, o, &bits);
                let next_o = (o + 1) % WIDTH;
                if o >= fo && o < ho {
                    for v in 0..2 {
                        let t = st(self, next_o, &format!("{bits}{v}"));
                        self.em.on(s, v, v, Move::R, t);
                    }
                } else if o == ho {
                    let miss = st(self, next_o, "");
                    self.em.on(s, 0, 0, Move::R, miss);
                    let hit = found(self, next_o, &bits);
                    self.em.on(s, 1, 1, Move::R, hit);
                } else {
                    let t = st(self, next_o, "");
                    self.em.pass(s, Move::R, t);
                }
            }
        }
        // Head found: read the block marker, then write the block back.
        for v in 0..8u32 {
            let bits: String = (0..3).map(|i| if v >> i & 1 == 1 { '1' } else { '0' }).collect();
            let mut s = found(self, ho + 1, &bits);
            for o in ho + 1..MARK {
                let t = found(self, o + 1, &bits);
                self.em.pass(s, Move::R, t);
                s = t;
            }
            let t = p.transition(n, v).expect("validated program");
            for m in 0..2u32 {
                let tag = format!("{kn}.wb.{cn}.{}{}{m}.{}", t.write, t.mv, p.name(t.next));
                let mut at = self.em.st(&format!("{tag}.{}", MARK - 1));
                self.em.on(s, m, m, Move::L, at);
                for o in (fo + 1..MARK).rev() {
                    let nx = self.em.st(&format!("{tag}.{}", o - 1));
                    match o {
                        _ if o == ho => self.em.write(at, 0, Move::L, nx),
                        _ if o > ho => self.em.pass(at, Move::L, nx),
                        _ => self.em.write(at, t.write >> (o - fo) & 1, Move::L, nx),
                    }
                    at = nx;
                }
                self.finish_step(k, c, at, t.write, t.mv, t.next, m, &tag);
            }
        }
    }

    /// At the first field of the head block with the write of that field
    /// still pending: move the head mark and hand over to the next search.
    #[allow(clippy::too_many_arguments)]
    fn finish_step(&mut self, k: Which, c: Ctx, at: StateId, w: u32, mv: Move, next: StateId, m: u32, tag: &str) {
        let p = self.prog(k);
        let (fo, ho) = (k.fields(), k.head());
        let w0 = w & 1;
        if next == p.halt() {
            match k {
                Which::Main => self.em.write(at, w0, Move::R, self.em.b.halt),
                Which::Timer => {
                    let then = self.enable(Ctx { timer: None, seen: 0, ..c });
                    let h = self.home(then, &format!("en.{}", self.ctx_name(Ctx { timer: None, seen: 0, ..c })));
                    self.travel(at, Some(w0), Move::R, MARK - fo, &format!("{tag}.halt"), h);
                }
            }
            return;
        }
        let mut c2 = c;
        match k {
            Which::Main => c2.main = next,
            Which::Timer => c2.timer = Some(next),
        }
        let mut first = Some(w0);
        let mut from = at;
        if k == Which::Main && m == 1 && c.timer.is_none() {
            from = self.refresh(at, w, tag, &mut c2);
            first = None;
        }
        let then = self.next_after(k, c2);
        let h = self.home(then, &format!("{}.{}", self.name(k), self.ctx_name(c2)));
        let set = self.em.st(&format!("{tag}.set"));
        self.travel(set, Some(1), Move::R, MARK - ho, &format!("{tag}.set"), h);
        match (mv, m) {
            (Move::R, _) => self.travel(from, first, Move::R, WIDTH + ho - fo, &format!("{tag}.mv"), set),
            (Move::L, 0) => self.travel(from, first, Move::L, WIDTH - (ho - fo), &format!("{tag}.mv"), set),
            (Move::L, _) => self.travel(from, first, Move::R, ho - fo, &format!("{tag}.mv"), set),
        }
    }

    /// Detour to the flag after the main clock wrote block 0. Returns the
    /// state back at the first field with nothing left to write.
    fn refresh(&mut self, at: StateId, w: u32, tag: &str, c2: &mut Ctx) -> StateId {
        let cur1 = w & self.ones;
        let acc = c2.seen | cur1;
        let (action, seen) = if cur1 == self.ones {
            (1, 0)
        } else if acc == self.ones {
            (2, 0)
        } else {
            (0, acc)
        };
        c2.seen = seen;
        let back = self.em.st(&format!("{tag}.rf.x0"));
        let c1 = self.em.st(&format!("{tag}.rf.c1"));
        let c0 = self.em.st(&format!("{tag}.rf.c0"));
        let out = self.em.st(&format!("{tag}.rf.out"));
        self.em.write(at, w & 1, Move::L, c1);
        self.em.pass(c1, Move::L, c0);
        self.em.pass(out, Move::R, back);
        match action {
            2 => {
                let e1 = self.em.st(&format!("{tag}.rf.e1"));
                let e0 = self.em.st(&format!("{tag}.rf.e0"));
                self.em.write(c0, 1, Move::R, e1);
                self.em.pass(e1, Move::L, e0);
                self.em.write(e0, 0, Move::R, out);
            }
            v => self.em.write(c0, v, Move::R, out),
        }
        back
    }

    /// The shorter clock has halted: set the done cell, read block 0 of the
    /// main clock and set the flag from it. Entered at the first field.
    fn enable(&mut self, c: Ctx) -> StateId {
        let cn = self.ctx_name(c);
        let s = self.em.st(&format!("en.{cn}"));
        let d = self.em.st(&format!("en.{cn}.d"));
        self.em.pass(s, Move::L, d);
        let r0 = self.em.st(&format!("en.{cn}.r"));
        self.em.write(d, 1, Move::R, r0);
        let mut layer = vec![(r0, 0u32)];
        for i in 0..3 {
            let mut next = Vec::new();
            for &(st, v) in &layer {
                for b in 0..2u32 {
                    let bits = v | b << i;
                    let t = self.em.st(&format!("en.{cn}.r{i}.{bits}"));
                    self.em.on(st, b, b, if i < 2 { Move::R } else { Move::L }, t);
                    next.push((t, bits));
                }
            }
            layer = next;
        }
        for (st, v) in layer {
            let cur1 = v & self.ones;
            let (f, seen) = if cur1 == self.ones { (1, 0) } else { (0, cur1) };
            let resume = self.seek(Which::Main, Ctx { seen, ..c });
            let c0 = self.em.st(&format!("en.{cn}.{v}.c0"));
            let c1 = self.em.st(&format!("en.{cn}.{v}.c1"));
            self.travel(st, None, Move::L, 3, &format!("en.{cn}.{v}.b"), c0);
            self.em.write(c0, f, Move::R, c1);
            self.em.pass(c1, Move::R, resume);
        }
        s
    }
}
