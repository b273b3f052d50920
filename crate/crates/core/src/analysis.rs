//! Desk-scale instruments: halting strings, the leftmost non-halting branch,
//! the stretch counting argument, co-simulation and a bounded halting survey.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compiler::{compression_program, stretch_program, BlockLayout};
use crate::engine::{resolve_limit, run, Budget, FirstLimit, Status};
use crate::machine::{init_configuration, moved, step, Configuration};
use crate::ordinal::{Ordinal, DEFAULT_HEIGHT};
use crate::program::{MachineShape, Move, Program, StateId, Transition};
use crate::tape::{bits_to_string, lcm, TapeWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("expected a one-tape single-head program, got {0:?}")]
    Shape(MachineShape),
    #[error("m = {m} is too small for a scratch pad of {p} cells: need m^2 * 2^p < 2^m")]
    Precondition { m: usize, p: usize },
}

// ---------------------------------------------------------------------------
// Finite runs on one tape.

/// A one-tape configuration with an explicit finite tape; cells past the end
/// read 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Finite {
    state: StateId,
    head: usize,
    cells: Vec<bool>,
    pad: u32,
}

impl Finite {
    fn get(&self, x: usize) -> bool {
        self.cells.get(x).copied().unwrap_or(false)
    }

    /// Takes one transition; returns it.
    fn step(&mut self, p: &Program) -> Transition {
        let read = self.get(self.head) as u32 | self.pad << 1;
        let t = p.transition(self.state, read).expect("validated programs are total");
        if self.head >= self.cells.len() {
            self.cells.resize(self.head + 1, false);
        }
        self.cells[self.head] = t.write & 1 == 1;
        self.pad = t.write >> 1;
        self.state = t.next;
        self.head = moved(self.head, t.mv);
        t
    }
}

fn one_tape(q: &Program) -> Result<(), AnalysisError> {
    let sh = q.shape();
    if sh.tape_count != 1 || sh.head_width != 1 {
        return Err(AnalysisError::Shape(sh));
    }
    Ok(())
}

fn strings(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u64 << len).map(move |v| (0..len).map(|i| v >> (len - 1 - i) & 1 == 1).collect())
}

// ---------------------------------------------------------------------------
// Halting strings.

/// `sigma` started at a limit (head 0, limit state, zeros beyond) halts after
/// `steps` transitions, the last one entering halt, leaving `tau` on its cells.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaltingString {
    pub sigma: String,
    pub tau: String,
    pub steps: usize,
}

/// Runs `sigma` from the limit state for at most `|sigma|` transitions.
fn halting_run(q: &Program, sigma: &[bool]) -> Option<(Vec<bool>, usize)> {
    let mut c = Finite { state: q.limit(), head: 0, cells: sigma.to_vec(), pad: 0 };
    for n in 1..=sigma.len() {
        c.step(q);
        if c.state == q.halt() {
            c.cells.truncate(sigma.len());
            return Some((c.cells, n));
        }
    }
    None
}

/// Every halting string of length `1..=maxlen`, shortest first, then in
/// lexicographic order.
pub fn halting_strings(q: &Program, maxlen: usize) -> Result<Vec<HaltingString>, AnalysisError> {
    one_tape(q)?;
    let mut out = Vec::new();
    for len in 1..=maxlen {
        for sigma in strings(len) {
            if let Some((tau, steps)) = halting_run(q, &sigma) {
                out.push(HaltingString { sigma: bits_to_string(&sigma), tau: bits_to_string(&tau), steps });
            }
        }
    }
    Ok(out)
}

/// Lexicographically least string of length `depth` with no prefix that is a
/// halting string output of `q`.
pub fn leftmost_nonhalting_branch(q: &Program, depth: usize) -> Result<Option<String>, AnalysisError> {
    let outputs: HashSet<String> = halting_strings(q, depth)?.into_iter().map(|h| h.tau).collect();
    fn dfs(prefix: &mut String, depth: usize, outputs: &HashSet<String>) -> bool {
        if prefix.len() == depth {
            return true;
        }
        for b in ['0', '1'] {
            prefix.push(b);
            if !outputs.contains(prefix.as_str()) && dfs(prefix, depth, outputs) {
                return true;
            }
            prefix.pop();
        }
        false
    }
    let mut s = String::new();
    Ok(dfs(&mut s, depth, &outputs).then_some(s))
}

// ---------------------------------------------------------------------------
// The counting argument against one-pass stretching.

/// Machine configuration at the first stage where each of the first `m`
/// cells off the multiples of three has been written and holds 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EventRecord {
    pub state: String,
    pub head: usize,
    pub cells: String,
    pub pad: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum CollisionOutcome {
    Collision { t: String, u: String, record: EventRecord, stage_t: u64, stage_u: u64 },
    WrongOutput { witness: String, reason: String },
    Exhausted { undecided: usize },
}

/// Step cap for inputs that have not reached the event after `n` steps.
pub fn stall_cap(n: usize) -> u64 {
    64 * n as u64 + 256
}

/// Positions of the first `m` cells that the stretch must leave at 0.
pub fn zero_cells(m: usize) -> Vec<usize> {
    (0..).filter(|x| x % 3 != 0).take(m).collect()
}

enum EventRun {
    Event { stage: u64, config: Finite },
    Halted { output: Vec<bool> },
    Stalled,
}

fn run_to_event(q: &Program, input: &[bool], zeros: &[usize], cap: u64) -> EventRun {
    let mut c = Finite { state: q.start(), head: 0, cells: input.to_vec(), pad: 0 };
    let mut visited = vec![false; zeros.len()];
    for k in 1..=cap {
        let at = c.head;
        c.step(q);
        if c.state == q.halt() {
            return EventRun::Halted { output: c.cells };
        }
        if let Some(i) = zeros.iter().position(|&z| z == at) {
            visited[i] = true;
        }
        if visited.iter().all(|&v| v) && zeros.iter().all(|&z| !c.get(z)) {
            return EventRun::Event { stage: k, config: c };
        }
    }
    EventRun::Stalled
}

fn stretched(a: &[bool]) -> Vec<bool> {
    a.iter().flat_map(|&b| [b, false, false]).collect()
}

/// Searches the inputs of length `n` for two with the same configuration at
/// the first event stage, which happens within `n` steps so that the cells
/// from `n` on are still untouched.
pub fn stretch_collision(q: &Program, m: usize, n: usize) -> Result<CollisionOutcome, AnalysisError> {
    one_tape(q)?;
    let p = q.shape().scratch_pad_cells;
    let fits = m < 120 && (m as u128).pow(2) << p < 1u128 << m;
    if !fits {
        return Err(AnalysisError::Precondition { m, p });
    }
    let zeros = zero_cells(m);
    let mut seen: HashMap<EventRecord, (Vec<bool>, u64)> = HashMap::new();
    let mut undecided = 0;
    for input in strings(n) {
        match run_to_event(q, &input, &zeros, stall_cap(n)) {
            EventRun::Event { stage, config } if stage <= n as u64 => {
                let mut cells = config.cells.clone();
                cells.resize(n, false);
                let record = EventRecord {
                    state: q.name(config.state).to_string(),
                    head: config.head,
                    cells: bits_to_string(&cells),
                    pad: bits_to_string(&(0..p).map(|j| config.pad >> j & 1 == 1).collect::<Vec<_>>()),
                };
                if let Some((t, st)) = seen.get(&record) {
                    return Ok(CollisionOutcome::Collision {
                        t: bits_to_string(t),
                        u: bits_to_string(&input),
                        record,
                        stage_t: *st,
                        stage_u: stage,
                    });
                }
                seen.insert(record, (input, stage));
            }
            EventRun::Event { .. } => undecided += 1,
            EventRun::Halted { output } => {
                let want = stretched(&input);
                let bad = (0..want.len()).find(|&x| output.get(x).copied().unwrap_or(false) != want[x]);
                let reason = match bad {
                    Some(x) => format!("halted after finitely many steps with cell {x} wrong"),
                    None => "halted after finitely many steps".into(),
                };
                return Ok(CollisionOutcome::WrongOutput { witness: bits_to_string(&input), reason });
            }
            EventRun::Stalled => {
                let reason = format!("no event within {} steps", stall_cap(n));
                return Ok(CollisionOutcome::WrongOutput { witness: bits_to_string(&input), reason });
            }
        }
    }
    Ok(CollisionOutcome::Exhausted { undecided })
}

/// Runs `t·y` and `u·y` to the event and `depth` steps beyond, and reports
/// whether the two runs agree at every one of those steps.
pub fn replay_collision(q: &Program, m: usize, t: &[bool], u: &[bool], tail: &[bool], depth: u64) -> bool {
    let zeros = zero_cells(m);
    let cap = stall_cap(t.len().max(u.len()));
    let at_event = |x: &[bool]| {
        let input: Vec<bool> = x.iter().chain(tail).copied().collect();
        match run_to_event(q, &input, &zeros, cap) {
            EventRun::Event { config, .. } => Some(config),
            _ => None,
        }
    };
    let (Some(mut a), Some(mut b)) = (at_event(t), at_event(u)) else { return false };
    let norm = |c: &Finite| {
        let mut c = c.clone();
        while c.cells.last() == Some(&false) {
            c.cells.pop();
        }
        c
    };
    for _ in 0..=depth {
        if norm(&a) != norm(&b) {
            return false;
        }
        if a.state == q.halt() {
            return true;
        }
        a.step(q);
        b.step(q);
    }
    true
}

// ---------------------------------------------------------------------------
// Co-simulation.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum CosimMode {
    Simulate,
    Onehat,
    Notdense { sigma: String },
    Scratchpad,
    Pipeline,
}

impl fmt::Display for CosimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CosimMode::Simulate => write!(f, "simulate"),
            CosimMode::Onehat => write!(f, "onehat"),
            CosimMode::Notdense { sigma } => write!(f, "notdense({sigma})"),
            CosimMode::Scratchpad => write!(f, "scratchpad"),
            CosimMode::Pipeline => write!(f, "pipeline"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosimRow {
    pub input: String,
    pub pass: bool,
    pub p_stage: Option<Ordinal>,
    pub q_stage: Option<Ordinal>,
    pub expected_stage: Option<Ordinal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosimReport {
    pub mode: CosimMode,
    pub pass: bool,
    pub rows: Vec<CosimRow>,
}

/// Successor steps compared one-for-seven before the stage-ω check.
pub const LOCKSTEP: u64 = 200;

/// `⟨t0 t1 t2⟩` interleaved cell by cell.
pub fn interleave(tapes: &[TapeWord]) -> TapeWord {
    let k = tapes.len();
    let n = tapes.iter().map(TapeWord::tail_start).max().unwrap_or(0);
    let per = tapes.iter().fold(1, |a, t| lcm(a, t.period().len()));
    TapeWord::from_fn(k * n, k * per, |x| tapes[x % k].get(x / k))
}

/// Cells `k, k+count, k+2·count, …` of `t`.
pub fn deinterleave(t: &TapeWord, k: usize, count: usize) -> TapeWord {
    let n = t.tail_start().div_ceil(count);
    TapeWord::from_fn(n, t.period().len(), |x| t.get(count * x + k))
}

fn limit_part(a: &Ordinal) -> Ordinal {
    let terms = a.terms().iter().copied().filter(|&(e, _)| e > 0).collect();
    Ordinal::from_terms(terms, DEFAULT_HEIGHT).expect("a sub-list of canonical terms")
}

/// Halting stage of the one-tape simulation when `p` halts at `α = λ + k`:
/// the simulated halt is taken on the fifth micro-step of step `k`.
pub fn simulate_stage(alpha: &Ordinal) -> Option<Ordinal> {
    let k = alpha.finite_part();
    limit_part(alpha).add(&Ordinal::finite(7 * k + 4)).ok()
}

/// `ω² + α + ω`.
pub fn efficiency_stage(alpha: &Ordinal) -> Option<Ordinal> {
    Ordinal::omega_pow(2).add(alpha).ok()?.add(&Ordinal::omega()).ok()
}

fn expected_state_name(p: &Program, n: StateId) -> String {
    if n == p.start() {
        "start".into()
    } else if n == p.limit() {
        "limit".into()
    } else {
        format!("{}.1", p.name(n))
    }
}

fn micro_check(c: &Configuration, tape: &TapeWord, head: usize, stage: &str) -> Option<String> {
    if c.tapes[0] != *tape {
        return Some(format!("{stage}: tape differs"));
    }
    if c.head != head {
        return Some(format!("{stage}: head at {} instead of {head}", c.head));
    }
    None
}

/// Steps `p` and `q` side by side for up to [`LOCKSTEP`] steps of `p`,
/// predicting every micro-stage of `q`. Returns the first divergence.
fn lockstep(p: &Program, q: &Program, cp0: &Configuration, cq0: &Configuration) -> Option<String> {
    let mut cp = cp0.clone();
    let mut cq = cq0.clone();
    for k in 0..LOCKSTEP {
        let at = format!("micro-stage {}", 7 * k);
        let tk = interleave(&cp.tapes);
        if let Some(d) = micro_check(&cq, &tk, 3 * cp.head, &at) {
            return Some(d);
        }
        if q.name(cq.state) != expected_state_name(p, cp.state) {
            return Some(format!("{at}: state {} for simulated {}", q.name(cq.state), p.name(cp.state)));
        }
        let t = p.transition(cp.state, crate::machine::read_vector(p, &cp)).expect("total");
        let next = step(p, &cp).expect("not halted");
        let h = 3 * cp.head;
        let t1 = interleave(&next.tapes);
        let with_z = tk.with(h + 2, t.write >> 2 & 1 == 1);
        let with_yz = with_z.with(h + 1, t.write >> 1 & 1 == 1);
        let heads = [h + 1, h + 2, h + 1, h, moved(h, t.mv), moved(moved(h, t.mv), t.mv), 3 * next.head];
        let tapes = [&tk, &tk, &with_z, &with_yz, &t1, &t1, &t1];
        let halts = next.state == p.halt();
        for j in 0..7 {
            cq = match step(q, &cq) {
                Ok(c) => c,
                Err(_) => return Some(format!("micro-stage {}: already halted", 7 * k + j as u64)),
            };
            let at = format!("micro-stage {}", 7 * k + j as u64 + 1);
            if let Some(d) = micro_check(&cq, tapes[j], heads[j], &at) {
                return Some(d);
            }
            let q_halted = cq.state == q.halt();
            if halts && j == 4 {
                return (!q_halted).then(|| format!("{at}: simulated halt not taken"));
            }
            if q_halted {
                return Some(format!("{at}: halted early"));
            }
        }
        cp = next;
    }
    None
}

/// Budget for the compiled side, which takes several steps per simulated one.
fn widened(b: Budget) -> Budget {
    Budget {
        steps_per_level: b.steps_per_level.saturating_mul(Q_FACTOR),
        total_steps: b.total_steps.saturating_mul(Q_FACTOR),
        ..b
    }
}

const Q_FACTOR: u64 = 8;

fn first_limit_tape(p: &Program, c: &Configuration, budget: Budget) -> Result<Option<Configuration>, String> {
    match resolve_limit(p, c.clone(), budget) {
        Ok(FirstLimit::Limit { config, .. }) => Ok(Some(config)),
        Ok(FirstLimit::Halted { .. }) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn out_word(o: &crate::engine::RunOutcome, t: usize) -> Option<TapeWord> {
    (o.status == Status::Halted).then(|| o.output[t].clone())
}

fn cosim_simulate(p: &Program, q: &Program, a: &TapeWord, budget: Budget) -> CosimRow {
    let mut row = CosimRow {
        input: a.to_string(),
        pass: false,
        p_stage: None,
        q_stage: None,
        expected_stage: None,
        divergence: None,
        error: None,
    };
    let cp = init_configuration(p, a);
    let qa = interleave(&cp.tapes);
    let cq = init_configuration(q, &qa);
    if let Some(d) = lockstep(p, q, &cp, &cq) {
        row.divergence = Some(d);
        return row;
    }
    match (first_limit_tape(p, &cp, budget), first_limit_tape(q, &cq, widened(budget))) {
        (Ok(Some(lp)), Ok(Some(lq))) => {
            if lq.tapes[0] != interleave(&lp.tapes) {
                row.divergence = Some("stage w: limit tapes do not interleave".into());
                return row;
            }
        }
        (Ok(None), Ok(None)) => {}
        (Ok(_), Ok(_)) => {
            row.divergence = Some("stage w: only one run reaches the limit".into());
            return row;
        }
        (Err(e), _) | (_, Err(e)) => {
            row.error = Some(e);
            return row;
        }
    }
    let op = run(p, a, budget);
    let oq = run(q, &qa, widened(budget));
    finish_row(&mut row, &op, &oq, |o| out_word(o, 0), |o| out_word(o, 0).map(|_| interleave(&o.output)), simulate_stage);
    row
}

/// Fills stages and the verdict from two full runs. `q_out` and `p_out` map
/// each outcome to the word that should agree.
fn finish_row(
    row: &mut CosimRow,
    op: &crate::engine::RunOutcome,
    oq: &crate::engine::RunOutcome,
    q_out: impl Fn(&crate::engine::RunOutcome) -> Option<TapeWord>,
    p_out: impl Fn(&crate::engine::RunOutcome) -> Option<TapeWord>,
    predict: impl Fn(&Ordinal) -> Option<Ordinal>,
) {
    if op.status != Status::Halted {
        row.error = Some(format!("p: {}", op.message.clone().unwrap_or_default()));
        row.pass = oq.status != Status::Halted;
        return;
    }
    row.p_stage = Some(op.stage.clone());
    row.expected_stage = predict(&op.stage);
    if oq.status != Status::Halted {
        row.error = Some(format!("q: {}", oq.message.clone().unwrap_or_default()));
        return;
    }
    row.q_stage = Some(oq.stage.clone());
    let outputs = q_out(oq) == p_out(op);
    if !outputs {
        row.divergence = Some(format!("output {} differs", oq.output[0]));
    } else if row.expected_stage != row.q_stage {
        row.divergence = Some(format!("stage {} instead of the predicted form", oq.stage));
    }
    row.pass = row.divergence.is_none();
}

fn cosim_row(p: &Program, q: &Program, mode: &CosimMode, a: &TapeWord, budget: Budget) -> CosimRow {
    let out = p.shape().tape_count - 1;
    let mut row = CosimRow {
        input: a.to_string(),
        pass: false,
        p_stage: None,
        q_stage: None,
        expected_stage: None,
        divergence: None,
        error: None,
    };
    if *mode == CosimMode::Simulate {
        return cosim_simulate(p, q, a, budget);
    }
    let op = run(p, a, budget);
    match mode {
        CosimMode::Simulate => unreachable!(),
        CosimMode::Onehat => {
            let oq = run(q, a, widened(budget));
            let lead = |w: TapeWord| {
                let mut bits = vec![true];
                bits.extend(w.prefix());
                TapeWord::new(bits, w.period().to_vec()).expect("non-empty period")
            };
            finish_row(&mut row, &op, &oq, |o| out_word(o, 0), |o| out_word(o, out).map(lead), efficiency_stage);
        }
        CosimMode::Notdense { .. } | CosimMode::Scratchpad => {
            let oq = run(q, a, widened(budget));
            finish_row(&mut row, &op, &oq, |o| out_word(o, 0), |o| out_word(o, out), efficiency_stage);
        }
        CosimMode::Pipeline => {
            let s = stretch_program(&BlockLayout::three()).expect("built-in layout");
            let c = compression_program(&BlockLayout::three()).expect("built-in layout");
            let os = run(&s, a, budget);
            let Some(sa) = out_word(&os, 0) else {
                row.error = Some(format!("stretch: {}", os.message.unwrap_or_default()));
                return row;
            };
            let oq = run(q, &sa, widened(budget));
            finish_row(&mut row, &op, &oq, |o| out_word(o, 0).map(|_| interleave(&o.output)), |o| out_word(o, 0).map(|_| interleave(&o.output)), simulate_stage);
            if row.pass {
                let Some(w) = out_word(&oq, 0) else { return row };
                let oc = run(&c, &w, budget);
                let got = out_word(&oc, 0);
                if got != out_word(&op, out) {
                    row.pass = false;
                    row.divergence = Some("compressed output differs".into());
                }
            }
        }
    }
    row
}

/// Runs `p` and the compiled `q` on every input and compares them under the
/// projection and stage form of `mode`.
pub fn cosimulate(p: &Program, q: &Program, mode: &CosimMode, inputs: &[TapeWord], budget: Budget) -> CosimReport {
    let rows: Vec<CosimRow> = std::thread::scope(|s| {
        let handles: Vec<_> = inputs.iter().map(|a| s.spawn(move || cosim_row(p, q, mode, a, budget))).collect();
        handles.into_iter().map(|h| h.join().expect("cosimulation worker")).collect()
    });
    CosimReport { mode: mode.clone(), pass: rows.iter().all(|r| r.pass), rows }
}

/// Inputs used when none are given.
pub fn standard_inputs() -> Vec<TapeWord> {
    ["(0)", "(1)", "10(0)", "(01)", "1101(0)", "0(011)"].iter().map(|s| s.parse().expect("literal")).collect()
}

// ---------------------------------------------------------------------------
// Halting survey.

/// Program `index` in the canonical enumeration of three-tape programs:
/// by state count, then by the bytes of the transition table.
pub fn enumerate_program(index: u128) -> Program {
    let shape = MachineShape::THREE_TAPE;
    let reads = 1usize << shape.width();
    let mut i = index;
    let mut states = 3usize;
    loop {
        let radix = (1u128 << shape.width()) * 2 * states as u128;
        let slots = (states - 1) * reads;
        match radix.checked_pow(slots as u32) {
            Some(size) if i >= size => {
                i -= size;
                states += 1;
            }
            _ => break,
        }
    }
    let radix = (1u128 << shape.width()) * 2 * states as u128;
    let slots = (states - 1) * reads;
    let mut digits = vec![0u128; slots];
    for d in digits.iter_mut().rev() {
        *d = i % radix;
        i /= radix;
    }
    let mut b = crate::program::ProgramBuilder::new(shape);
    let ids: Vec<StateId> =
        (0..states).map(|k| match k { 0 => b.start, 1 => b.limit, 2 => b.halt, k => b.state(&format!("s{k}")) }).collect();
    let mut it = digits.into_iter();
    for (k, &s) in ids.iter().enumerate() {
        if k == 2 {
            continue;
        }
        for r in 0..reads as u32 {
            let d = it.next().expect("one digit per slot");
            let n = states as u128;
            let (w, mv, next) = ((d / (2 * n)) as u32, if (d / n) % 2 == 1 { Move::R } else { Move::L }, ids[(d % n) as usize]);
            b.set(s, r, w, mv, next);
        }
    }
    b.build()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurveyOutcome {
    Halted,
    Unresolved,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub index: u128,
    pub outcome: SurveyOutcome,
    pub stage: Ordinal,
}

/// Runs programs `first..first+count` on input 0; rows sorted by stage.
pub fn survey_range(first: u128, count: usize, budget: Budget) -> Vec<SurveyRow> {
    let mut rows: Vec<SurveyRow> = (0..count as u128)
        .map(|k| {
            let index = first + k;
            let o = run(&enumerate_program(index), &TapeWord::zeros(), budget);
            let outcome = match o.status {
                Status::Halted => SurveyOutcome::Halted,
                Status::UnresolvedLimit => SurveyOutcome::Unresolved,
                Status::BudgetExhausted => SurveyOutcome::Exhausted,
            };
            SurveyRow { index, outcome, stage: o.stage }
        })
        .collect();
    rows.sort_by(|a, b| a.stage.cmp(&b.stage).then(a.index.cmp(&b.index)));
    rows
}

pub fn survey_halting(count: usize, budget: Budget) -> Vec<SurveyRow> {
    survey_range(0, count, budget)
}

/// Aligned text table.
pub fn survey_table(rows: &[SurveyRow]) -> String {
    let mut s = format!("{:>12}  {:<10}  {}\n", "program", "outcome", "stage");
    for r in rows {
        let o = serde_json::to_value(r.outcome).expect("plain enum");
        s.push_str(&format!("{:>12}  {:<10}  {}\n", r.index, o.as_str().unwrap_or(""), r.stage));
    }
    s
}
