//! Acceleration of sweeps whose repeated blocks grow by a fixed amount per pass.
//!
//! Three same-state record configurations `A`, `B`, `C` are aligned so that
//! `B` is `A` with one extra copy of a few blocks; that yields a formula
//! `F(m)` of literals and repeated words with counts `a·m + b`. The step
//! `F(m) → F(m+1)` is then checked symbolically for every `m`, and the limit
//! read off the stable left part of the formula.

use crate::machine::LimitSummary;
use crate::program::{Move, Program, StateId};
use crate::segment::{Cycle, Segment, SegmentEnd};
use crate::tape::TapeWord;

const MAX_SPAN: usize = 8;
const MAX_INSERTIONS: usize = 4;
const MAX_BLOCK: usize = 64;
const ALIGN_BUDGET: u32 = 2_000;
const COPY_STEPS: u64 = 20_000;
const MACRO_STEPS: u64 = 2_000_000;

#[derive(Debug, Default)]
pub(crate) struct Accelerator {
    next_try: u64,
}

impl Accelerator {
    pub fn at_record(&mut self, seg: &Segment) -> Option<SegmentEnd> {
        if seg.head_width() != 1 || seg.t < self.next_try {
            return None;
        }
        let recs = seg.records_of(seg.state);
        let n = recs.len();
        for span in 1..=MAX_SPAN {
            if n < 2 * span + 1 {
                break;
            }
            let (ta, tb, tc) = (recs[n - 1 - 2 * span], recs[n - 1 - span], recs[n - 1]);
            if let Some(end) = try_accelerate(seg, ta, tb, tc, span) {
                return Some(end);
            }
        }
        self.next_try = seg.t + seg.t / 8;
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Seg {
    Lit(Vec<u8>),
    /// `word` repeated `a·m + b` times.
    Rep(Vec<u8>, i64, i64),
}

fn concretize(f: &[Seg], m: i64) -> Option<Vec<u8>> {
    let mut out = Vec::new();
    for s in f {
        match s {
            Seg::Lit(w) => out.extend_from_slice(w),
            Seg::Rep(w, a, b) => {
                let c = a * m + b;
                if c < 0 {
                    return None;
                }
                for _ in 0..c {
                    out.extend_from_slice(w);
                }
            }
        }
    }
    Some(out)
}

fn try_accelerate(seg: &Segment, ta: u64, tb: u64, tc: u64, span: usize) -> Option<SegmentEnd> {
    let s0 = seg.state;
    let pad0 = seg.pad_at(ta);
    if seg.pad_at(tb) != pad0 || seg.pad_at(tc) != pad0 {
        return None;
    }
    let (ra, rb, rc) = (seg.heads[ta as usize], seg.heads[tb as usize], seg.heads[tc as usize]);
    if rb <= ra || rc - rb != rb - ra {
        return None;
    }
    let d = rb - ra;
    let bases: Vec<&TapeWord> = seg.bases().collect();
    for b in &bases {
        if d % b.period().len() != 0 {
            return None;
        }
        let end = b.tail_start().max(ra + 1);
        if (ra + 1..end).any(|x| b.get(x + d) != b.get(x)) {
            return None;
        }
    }
    let a = seg.snapshot(ta, ra + 1);
    let b = seg.snapshot(tb, rb + 1);
    let c = seg.snapshot(tc, rc + 1);
    let ins = align(&a, &b)?;
    let mut f = build_formula(&a, &ins)?;
    // The head sits on the last cell, which must belong to a literal.
    if let [.., Seg::Rep(w, _, b), Seg::Lit(last)] = &mut f[..] {
        if last.is_empty() && *b >= 2 {
            *b -= 1;
            *last = w.clone();
        }
    }
    if concretize(&f, 1)? != b || concretize(&f, 2)? != c {
        return None;
    }
    let base_at = |x: usize| bases.iter().enumerate().fold(0u8, |acc, (k, w)| acc | (w.get(x) as u8) << k);
    let r = f.iter().position(|s| matches!(s, Seg::Rep(_, a, _) if *a > 0))?;
    // A sweep that turns inside the last copies of the first growing block
    // still leaves the block's left part alone; move those copies into the
    // literal after it.
    let (f, sym) = (0..=MAX_PEEL).find_map(|k| {
        let f = peel(&f, r, k)?;
        let mut sym = Symbolic::new(seg.program(), bases.len(), &f, s0, pad0, a.len(), &base_at);
        sym.run(span)?;
        let mut next = f.clone();
        for s in next.iter_mut() {
            if let Seg::Rep(_, a, b) = s {
                *b += *a;
            }
        }
        let got: Vec<Seg> = sym.segs.iter().map(|(s, _)| s.clone()).collect();
        (normalize(got) == normalize(next) && !sym.touched[..=r].iter().any(|&t| t)).then_some((f, sym))
    })?;
    let prefix = concretize(&f[..r], 0)?;
    let Seg::Rep(word, _, _) = &f[r] else { return None };
    let nt = bases.len();
    let tapes = (0..nt)
        .map(|k| {
            TapeWord::from_fn(prefix.len(), word.len(), |x| {
                let s = if x < prefix.len() { prefix[x] } else { word[(x - prefix.len()) % word.len()] };
                s >> k & 1 == 1
            })
        })
        .collect();
    let np = seg.pad.len();
    let pad = (0..np).map(|j| sym.pad_or >> j & 1 == 1).collect();
    let frozen = |m: i64| concretize(&f[..=r], m).map(|v| v.len());
    let growth = frozen(1)? - frozen(0)?;
    let ever = ever_after(seg, span, growth, prefix.len(), &frozen, &base_at, sym.pad_or);
    Some(SegmentEnd {
        summary: LimitSummary { tapes, pad },
        ever,
        cycle: Cycle::Accelerated { base: ta, period: tb - ta, drift: d },
    })
}

const MAX_PEEL: i64 = 3;

/// `f` with `k` copies of the repetition at `r` written out in the literal
/// that follows it.
fn peel(f: &[Seg], r: usize, k: i64) -> Option<Vec<Seg>> {
    let mut g = f.to_vec();
    let Seg::Rep(w, a, b) = g[r].clone() else { return None };
    if b < k {
        return None;
    }
    g[r] = Seg::Rep(w.clone(), a, b - k);
    let Some(Seg::Lit(next)) = g.get_mut(r + 1) else { return None };
    let mut lit = w.repeat(k as usize);
    lit.extend_from_slice(next);
    *next = lit;
    Some(g)
}

const EVER_STEPS: i64 = 4;

/// Cells that are 1 at some time of the accelerated run. The run is continued
/// concretely for a few macro steps; past the stable prefix every cell is
/// final once it lies inside the growing block, and the tail is extended with
/// the pattern of the last frozen growth blocks, which must agree twice.
fn ever_after(
    seg: &Segment,
    span: usize,
    growth: usize,
    prefix: usize,
    frozen: &dyn Fn(i64) -> Option<usize>,
    base_at: &dyn Fn(usize) -> u8,
    pad_or: u32,
) -> Option<LimitSummary> {
    let p = seg.program();
    let nt = seg.tapes.len();
    let np = seg.pad.len();
    let s0 = seg.state;
    let end = frozen(2 + EVER_STEPS)?;
    if growth == 0 || end < prefix + 2 * growth {
        return None;
    }
    let width = end.max(seg.max_reach() + 1) + 1;
    let col = |x: usize| (0..nt).fold(0u8, |acc, k| acc | (seg.tapes[k].get(x) as u8) << k);
    let mut cells: Vec<u8> = (0..width).map(col).collect();
    let mut ever: Vec<u8> = (0..width)
        .map(|x| (0..nt).fold(0u8, |acc, k| acc | (seg.ever_at(k, x, u64::MAX) as u8) << k))
        .collect();
    let mut pad = seg.pad.iter().enumerate().fold(0u32, |acc, (j, &b)| acc | (b as u32) << j);
    let mut pad_ever = seg.pad_ever() | pad_or;
    let (mut state, mut head, mut reach) = (s0, seg.head, seg.max_reach());
    let mut left = EVER_STEPS as usize * span;
    let mut steps = 0u64;
    while left > 0 {
        steps += 1;
        if steps > MACRO_STEPS {
            return None;
        }
        if head >= cells.len() {
            let x = cells.len();
            cells.push(base_at(x));
            ever.push(base_at(x));
        }
        let read = cells[head] as u32 | pad << nt;
        let t = p.transition(state, read)?;
        if t.next == p.halt() {
            return None;
        }
        cells[head] = (t.write & ((1 << nt) - 1)) as u8;
        ever[head] |= cells[head];
        pad = t.write >> nt & ((1 << np) - 1);
        pad_ever |= pad;
        head = match t.mv {
            Move::L => head.saturating_sub(1),
            Move::R => head + 1,
        };
        state = t.next;
        if head > reach {
            reach = head;
            if state == s0 {
                left -= 1;
            }
        }
    }
    // Smallest start of a tail that repeats with the growth period up to `end`.
    let periodic = |x0: usize| (x0..end - growth).all(|x| ever[x] == ever[x + growth]);
    let x0 = (prefix..=end - 2 * growth).find(|&x0| periodic(x0))?;
    let tapes = (0..nt)
        .map(|k| {
            TapeWord::from_fn(x0, growth, |x| {
                let v = if x < x0 { ever[x] } else { ever[x0 + (x - x0) % growth] };
                v >> k & 1 == 1
            })
        })
        .collect();
    let pad = (0..np).map(|j| pad_ever >> j & 1 == 1).collect();
    Some(LimitSummary { tapes, pad })
}

/// Insertions `(position in a, length)` turning `a` into `b`, each inserted
/// block equal to the block just before it.
fn align(a: &[u8], b: &[u8]) -> Option<Vec<(usize, usize)>> {
    fn rec(a: &[u8], b: &[u8], mut i: usize, mut j: usize, ins: &mut Vec<(usize, usize)>, budget: &mut u32) -> bool {
        while i < a.len() && j < b.len() && a[i] == b[j] {
            i += 1;
            j += 1;
        }
        if i == a.len() && j == b.len() {
            return true;
        }
        if ins.len() >= MAX_INSERTIONS || *budget == 0 {
            return false;
        }
        *budget -= 1;
        let prev = ins.last().map_or(0, |x| x.0);
        if !ins.is_empty() && i == prev {
            return false;
        }
        let max_l = MAX_BLOCK.min(j).min(b.len() - j).min(i - prev);
        for l in (1..=max_l).rev() {
            if b[j..j + l] == b[j - l..j] {
                ins.push((i, l));
                if rec(a, b, i, j + l, ins, budget) {
                    return true;
                }
                ins.pop();
            }
        }
        false
    }
    if b.len() <= a.len() {
        return None;
    }
    let mut ins = Vec::new();
    let mut budget = ALIGN_BUDGET;
    rec(a, b, 0, 0, &mut ins, &mut budget).then_some(ins)
}

fn build_formula(a: &[u8], ins: &[(usize, usize)]) -> Option<Vec<Seg>> {
    let mut f = Vec::new();
    let mut prev = 0;
    for &(i, l) in ins {
        let v = &a[i - l..i];
        let mut c = 0;
        while i >= prev + (c + 1) * l && &a[i - (c + 1) * l..i - c * l] == v {
            c += 1;
        }
        if c == 0 {
            return None;
        }
        f.push(Seg::Lit(a[prev..i - c * l].to_vec()));
        f.push(Seg::Rep(v.to_vec(), 1, c as i64));
        prev = i;
    }
    f.push(Seg::Lit(a[prev..].to_vec()));
    Some(f)
}

const NO_SRC: usize = usize::MAX;

struct Symbolic<'a, F: Fn(usize) -> u8> {
    p: &'a Program,
    nt: usize,
    segs: Vec<(Seg, usize)>,
    touched: Vec<bool>,
    state: StateId,
    pad: u32,
    pad_or: u32,
    target_state: StateId,
    head: (usize, usize),
    /// Length at `m = 0` of the region explored so far.
    explored: usize,
    base_at: &'a F,
    steps: u64,
    start_pad: u32,
    records: usize,
}

enum Side {
    Left,
    Right,
}

impl<'a, F: Fn(usize) -> u8> Symbolic<'a, F> {
    fn new(p: &'a Program, nt: usize, f: &[Seg], state: StateId, pad: u32, len0: usize, base_at: &'a F) -> Self {
        let segs: Vec<(Seg, usize)> = f.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let last = segs.len() - 1;
        let off = match &segs[last].0 {
            Seg::Lit(w) if !w.is_empty() => w.len() - 1,
            _ => usize::MAX,
        };
        Symbolic {
            p,
            nt,
            touched: vec![false; f.len()],
            segs,
            state,
            pad,
            pad_or: pad,
            target_state: state,
            head: (last, off),
            explored: len0,
            base_at,
            steps: 0,
            start_pad: pad,
            records: 0,
        }
    }

    fn mark(&mut self, src: usize) {
        if src != NO_SRC {
            self.touched[src] = true;
        }
    }

    fn transition(&self, sym: u8, state: StateId, pad: u32) -> Option<(u8, u32, Move, StateId)> {
        let read = sym as u32 | pad << self.nt;
        let tr = self.p.transition(state, read)?;
        if tr.next == self.p.halt() {
            return None;
        }
        let mask = (1u32 << self.nt) - 1;
        Some(((tr.write & mask) as u8, tr.write >> self.nt, tr.mv, tr.next))
    }

    /// Runs until `span` records in the starting state; `None` if the
    /// symbolic rules do not apply.
    fn run(&mut self, span: usize) -> Option<()> {
        if self.head.1 == usize::MAX {
            return None;
        }
        loop {
            self.steps += 1;
            if self.steps > MACRO_STEPS {
                return None;
            }
            let (si, off) = self.head;
            let src = self.segs[si].1;
            let Seg::Lit(w) = &self.segs[si].0 else { return None };
            let sym = w[off];
            let (ns, np, mv, next) = self.transition(sym, self.state, self.pad)?;
            if ns != sym {
                if let Seg::Lit(w) = &mut self.segs[si].0 {
                    w[off] = ns;
                }
                self.mark(src);
            }
            self.pad = np;
            self.pad_or |= np;
            self.state = next;
            let len = match &self.segs[si].0 {
                Seg::Lit(w) => w.len(),
                Seg::Rep(..) => unreachable!(),
            };
            match mv {
                Move::L if off > 0 => self.head = (si, off - 1),
                Move::L if si == 0 => {}
                Move::L => self.enter(si - 1, Side::Right)?,
                Move::R if off + 1 < len => self.head = (si, off + 1),
                Move::R if si + 1 < self.segs.len() => self.enter(si + 1, Side::Left)?,
                Move::R => self.append(),
            }
            if self.records == span {
                return (self.pad == self.start_pad).then_some(());
            }
        }
    }

    /// Extends the explored region by one untouched cell and moves onto it.
    fn append(&mut self) {
        let v = (self.base_at)(self.explored);
        self.explored += 1;
        let last = self.segs.len() - 1;
        match &mut self.segs[last] {
            (Seg::Lit(w), src) if *src == NO_SRC => {
                w.push(v);
                self.head = (last, w.len() - 1);
            }
            _ => {
                self.segs.push((Seg::Lit(vec![v]), NO_SRC));
                self.head = (last + 1, 0);
            }
        }
        if self.state == self.target_state {
            self.records += 1;
        }
    }

    /// Moves the head into segment `k` from the given side.
    fn enter(&mut self, k: usize, from: Side) -> Option<()> {
        let mut k = k;
        let mut from = from;
        loop {
            match &self.segs[k].0 {
                Seg::Lit(w) if w.is_empty() => {
                    // Skip empty literals.
                    match from {
                        Side::Left if k + 1 < self.segs.len() => k += 1,
                        Side::Left => {
                            self.segs.remove(k);
                            self.append();
                            return Some(());
                        }
                        Side::Right if k > 0 => k -= 1,
                        Side::Right => return None,
                    }
                }
                Seg::Lit(w) => {
                    self.head = (k, if matches!(from, Side::Left) { 0 } else { w.len() - 1 });
                    return Some(());
                }
                Seg::Rep(word, a, b) => {
                    let (word, a, b) = (word.clone(), *a, *b);
                    let src = self.segs[k].1;
                    if b < 1 {
                        if a == 0 && b == 0 {
                            self.segs.remove(k);
                            match from {
                                Side::Left if k < self.segs.len() => continue,
                                Side::Left => {
                                    self.append();
                                    return Some(());
                                }
                                Side::Right if k > 0 => {
                                    k -= 1;
                                    continue;
                                }
                                Side::Right => return None,
                            }
                        }
                        return None;
                    }
                    let (cells, exit, st, pd, changed) = self.run_copy(&word, &from, k == 0)?;
                    let far = matches!((&from, &exit), (Side::Left, Side::Right) | (Side::Right, Side::Left));
                    if far && st == self.state && pd == self.pad {
                        if changed {
                            self.mark(src);
                        }
                        self.segs[k].0 = Seg::Rep(cells, a, b);
                        match from {
                            Side::Left if k + 1 < self.segs.len() => {
                                k += 1;
                                continue;
                            }
                            Side::Left => {
                                self.append();
                                return Some(());
                            }
                            Side::Right if k > 0 => {
                                k -= 1;
                                continue;
                            }
                            Side::Right => return None,
                        }
                    }
                    if changed {
                        self.mark(src);
                    }
                    self.state = st;
                    self.pad = pd;
                    self.pad_or |= pd;
                    let peeled = (Seg::Lit(cells), src);
                    let rest = (Seg::Rep(word, a, b - 1), src);
                    match from {
                        Side::Left => {
                            self.segs[k] = rest;
                            self.segs.insert(k, peeled);
                            if far {
                                k += 1;
                            } else if k > 0 {
                                k -= 1;
                                from = Side::Right;
                            } else {
                                return None;
                            }
                        }
                        Side::Right => {
                            self.segs[k] = peeled;
                            self.segs.insert(k, rest);
                            if far {
                                // Now at the remaining repetition, entering from the right.
                            } else {
                                k += 2;
                                from = Side::Left;
                                if k >= self.segs.len() {
                                    self.append();
                                    return Some(());
                                }
                            }
                        }
                    }
                }
            }
        }
    }


    /// Runs the machine on one isolated copy of `word`.
    fn run_copy(&self, word: &[u8], from: &Side, leftmost: bool) -> Option<(Vec<u8>, Side, StateId, u32, bool)> {
        let mut cells = word.to_vec();
        let mut pos = if matches!(from, Side::Left) { 0 } else { cells.len() - 1 };
        let (mut st, mut pd) = (self.state, self.pad);
        let mut changed = false;
        for _ in 0..COPY_STEPS {
            let (ns, np, mv, next) = self.transition(cells[pos], st, pd)?;
            if ns != cells[pos] {
                cells[pos] = ns;
                changed = true;
            }
            st = next;
            pd = np;
            match mv {
                Move::L if pos == 0 => {
                    if leftmost {
                        return None;
                    }
                    return Some((cells, Side::Left, st, pd, changed));
                }
                Move::L => pos -= 1,
                Move::R if pos + 1 == cells.len() => return Some((cells, Side::Right, st, pd, changed)),
                Move::R => pos += 1,
            }
        }
        None
    }
}

fn primitive_root(w: &[u8]) -> (Vec<u8>, i64) {
    let n = w.len();
    for d in 1..=n {
        if n.is_multiple_of(d) && (d..n).all(|i| w[i] == w[i - d]) {
            return (w[..d].to_vec(), (n / d) as i64);
        }
    }
    (w.to_vec(), 1)
}

/// Canonical form: constant repetitions become literals, words are primitive,
/// repetitions sit as far left as possible and absorb neighbouring copies.
fn normalize(mut f: Vec<Seg>) -> Vec<Seg> {
    loop {
        let before = f.clone();
        let mut g: Vec<Seg> = Vec::new();
        for s in f {
            let s = match s {
                Seg::Rep(w, 0, b) => Seg::Lit(w.repeat(b.max(0) as usize)),
                Seg::Rep(w, a, b) => {
                    let (r, k) = primitive_root(&w);
                    Seg::Rep(r, a * k, b * k)
                }
                lit => lit,
            };
            match (g.last_mut(), s) {
                (_, Seg::Lit(w)) if w.is_empty() => {}
                (Some(Seg::Lit(prev)), Seg::Lit(w)) => prev.extend(w),
                (Some(Seg::Rep(pw, pa, pb)), Seg::Rep(w, a, b)) if *pw == w => {
                    *pa += a;
                    *pb += b;
                }
                (_, s) => g.push(s),
            }
        }
        // Absorb copies and rotate repetitions leftwards.
        let mut i = 0;
        while i < g.len() {
            if let Seg::Rep(w, a, b) = g[i].clone() {
                let l = w.len();
                if i > 0 {
                    if let Seg::Lit(prev) = &mut g[i - 1] {
                        if prev.len() >= l && prev[prev.len() - l..] == w[..] {
                            prev.truncate(prev.len() - l);
                            g[i] = Seg::Rep(w, a, b + 1);
                            continue;
                        }
                        if let Some(&last) = prev.last() {
                            if last == w[l - 1] {
                                prev.pop();
                                let mut r = w.clone();
                                r.rotate_right(1);
                                g[i] = Seg::Rep(r, a, b);
                                g.insert(i + 1, Seg::Lit(vec![last]));
                                continue;
                            }
                        }
                    }
                }
                if i + 1 < g.len() {
                    if let Seg::Lit(next) = &mut g[i + 1] {
                        if next.len() >= l && next[..l] == w[..] {
                            next.drain(..l);
                            g[i] = Seg::Rep(w, a, b + 1);
                            continue;
                        }
                    }
                }
            }
            i += 1;
        }
        f = g;
        if f == before {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligns_growing_runs() {
        let a = [1, 0, 1, 0, 1, 1, 0, 0, 0, 1];
        let b = [1, 0, 1, 0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 1];
        let ins = align(&a, &b).unwrap();
        let f = build_formula(&a, &ins).unwrap();
        assert_eq!(concretize(&f, 0).unwrap(), a);
        assert_eq!(concretize(&f, 1).unwrap(), b);
    }

    #[test]
    fn normal_form_is_rotation_invariant() {
        let x = vec![Seg::Lit(vec![1]), Seg::Rep(vec![0, 1], 1, 2), Seg::Lit(vec![0, 1, 1])];
        let y = vec![Seg::Lit(vec![1, 0]), Seg::Rep(vec![1, 0], 1, 2), Seg::Lit(vec![1, 1])];
        assert_eq!(normalize(x), normalize(y));
        let z = vec![Seg::Rep(vec![0, 0, 0], 1, 1), Seg::Lit(vec![0])];
        assert_eq!(normalize(z), vec![Seg::Rep(vec![0], 3, 4)]);
    }
}
