//! Transfinite runs: successor steps, limits found by cycle detection,
//! nested up to a configurable level, on an exact ordinal clock.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bouncer;
use crate::machine::{apply_limit, init_configuration, Configuration, LimitSummary};
use crate::ordinal::Ordinal;
use crate::program::Program;
use crate::segment::{Cycle, Segment, SegmentEnd};
use crate::tape::{bits_to_string, lcm, TapeWord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Successor steps allowed in one level-0 run; also the item cap at higher levels.
    pub steps_per_level: u64,
    /// Deepest limit nesting: level j resolves limits of the form `S + ω^(j+1)`.
    pub max_level: u32,
    /// Steps allowed across the whole run.
    pub total_steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { steps_per_level: 50_000, max_level: 3, total_steps: 20_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CycleKind {
    Exact { period: u64 },
    Shifted { period: u64, drift: usize },
    /// A pattern whose repeated block grows each sweep, verified symbolically.
    Accelerated { period: u64, drift: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleEvidence {
    #[serde(flatten)]
    pub kind: CycleKind,
    pub level: u32,
    pub base_index: u64,
}

/// End of a segment: the configuration reached and which cells displayed a 1
/// along the way. `ever_one` is `None` when the segment was accelerated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSummary {
    pub final_config: Configuration,
    pub ever_one: Option<LimitSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Halted,
    UnresolvedLimit,
    BudgetExhausted,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: u64,
    pub limits: u64,
    pub clamps: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub status: Status,
    /// Halting stage, or the last stage reached.
    pub stage: Ordinal,
    pub output: Vec<TapeWord>,
    pub final_config: Option<Configuration>,
    pub evidence: Option<CycleEvidence>,
    pub message: Option<String>,
    pub stats: RunStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unresolved limit after stage {stage} at level {level}: {reason}")]
    Unresolved { stage: Ordinal, level: u32, reason: String },
    #[error("budget exhausted after stage {stage}: {reason}")]
    BudgetExhausted { stage: Ordinal, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Step,
    Limit,
    Halt,
    Resolve,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub event: EventKind,
    pub stage: Ordinal,
    pub state: String,
    pub head: usize,
    pub window: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pad: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<CycleEvidence>,
}

pub trait Observer {
    /// Whether per-step events are wanted; limit, resolve and halt events always arrive.
    fn wants_steps(&self) -> bool {
        true
    }
    fn window(&self) -> usize {
        16
    }
    fn event(&mut self, e: &TraceEvent);
}

/// Writes events as JSON lines.
pub struct JsonTrace<W: Write> {
    out: W,
    window: usize,
    pub steps: bool,
}

impl<W: Write> JsonTrace<W> {
    pub fn new(out: W, window: usize) -> Self {
        JsonTrace { out, window, steps: true }
    }
}

impl<W: Write> Observer for JsonTrace<W> {
    fn wants_steps(&self) -> bool {
        self.steps
    }
    fn window(&self) -> usize {
        self.window
    }
    fn event(&mut self, e: &TraceEvent) {
        let line = serde_json::to_string(e).expect("trace events serialize");
        // Trace output is best effort; a closed pipe should not abort the run.
        let _ = writeln!(self.out, "{line}");
    }
}

/// Collects events in memory.
#[derive(Debug, Default)]
pub struct Recorder {
    pub events: Vec<TraceEvent>,
    pub steps: bool,
    pub window: usize,
}

impl Recorder {
    pub fn limits_only(window: usize) -> Self {
        Recorder { events: Vec::new(), steps: false, window }
    }
}

impl Observer for Recorder {
    fn wants_steps(&self) -> bool {
        self.steps
    }
    fn window(&self) -> usize {
        self.window
    }
    fn event(&mut self, e: &TraceEvent) {
        self.events.push(e.clone());
    }
}

pub fn run(p: &Program, input: &TapeWord, budget: Budget) -> RunOutcome {
    run_from(p, init_configuration(p, input), Ordinal::zero(), budget, None)
}

pub fn run_traced(p: &Program, input: &TapeWord, budget: Budget, obs: &mut dyn Observer) -> RunOutcome {
    run_from(p, init_configuration(p, input), Ordinal::zero(), budget, Some(obs))
}

/// Runs from an arbitrary configuration at stage `stage`.
pub fn run_from(
    p: &Program,
    c: Configuration,
    stage: Ordinal,
    budget: Budget,
    obs: Option<&mut dyn Observer>,
) -> RunOutcome {
    let mut r = Runner { p, budget, obs, stats: RunStats::default(), last_evidence: None, last_stage: stage.clone() };
    r.emit_config(EventKind::Step, &stage, &c, None, true);
    let res = r.level(budget.max_level, c, stage);
    let stats = r.stats.clone();
    match res {
        Ok(Reached::Halted { stage, config }) => RunOutcome {
            status: Status::Halted,
            stage,
            output: config.tapes.clone(),
            final_config: Some(config),
            evidence: r.last_evidence,
            message: None,
            stats,
        },
        Ok(Reached::Limit { stage, .. }) => RunOutcome {
            status: Status::BudgetExhausted,
            stage,
            output: Vec::new(),
            final_config: None,
            evidence: r.last_evidence,
            message: Some("limit nesting exceeds max_level".into()),
            stats,
        },
        Err(e) => {
            let (status, stage) = match &e {
                EngineError::Unresolved { stage, .. } => (Status::UnresolvedLimit, stage.clone()),
                EngineError::BudgetExhausted { stage, .. } => (Status::BudgetExhausted, stage.clone()),
            };
            RunOutcome {
                status,
                stage,
                output: Vec::new(),
                final_config: None,
                evidence: r.last_evidence,
                message: Some(e.to_string()),
                stats,
            }
        }
    }
}

/// Halting stage of `p` on `input`.
pub fn measure(p: &Program, input: &TapeWord, budget: Budget) -> Result<Ordinal, EngineError> {
    let out = run(p, input, budget);
    match out.status {
        Status::Halted => Ok(out.stage),
        Status::UnresolvedLimit => Err(EngineError::Unresolved {
            stage: out.stage,
            level: 0,
            reason: out.message.unwrap_or_default(),
        }),
        Status::BudgetExhausted => Err(EngineError::BudgetExhausted {
            stage: out.stage,
            reason: out.message.unwrap_or_default(),
        }),
    }
}

/// Where a level-0 segment from `c` ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FirstLimit {
    /// Halted after `steps` successor steps.
    Halted { steps: u64, config: Configuration },
    /// Reached the next limit; `config` is the limit configuration.
    Limit { config: Configuration, evidence: CycleEvidence },
}

/// Runs successor steps from `c` until halt or the next limit.
pub fn resolve_limit(p: &Program, c: Configuration, budget: Budget) -> Result<FirstLimit, EngineError> {
    let b = Budget { max_level: 0, ..budget };
    let mut r = Runner { p, budget: b, obs: None, stats: RunStats::default(), last_evidence: None, last_stage: Ordinal::zero() };
    match r.level0(c, Ordinal::zero())? {
        Reached::Halted { stage, config } => Ok(FirstLimit::Halted { steps: stage.as_finite().expect("finite"), config }),
        Reached::Limit { config, .. } => {
            Ok(FirstLimit::Limit { config, evidence: r.last_evidence.expect("a limit carries evidence") })
        }
    }
}

enum Reached {
    Halted { stage: Ordinal, config: Configuration },
    Limit { stage: Ordinal, config: Configuration, ever: Option<LimitSummary> },
}

struct Runner<'a, 'o> {
    p: &'a Program,
    budget: Budget,
    obs: Option<&'o mut dyn Observer>,
    stats: RunStats,
    last_evidence: Option<CycleEvidence>,
    last_stage: Ordinal,
}

fn window_of(c: &Configuration, w: usize) -> (Vec<String>, Option<String>) {
    let window = c.tapes.iter().map(|t| bits_to_string(&t.bits(w))).collect();
    let pad = (!c.pad.is_empty()).then(|| bits_to_string(&c.pad));
    (window, pad)
}

impl<'a, 'o> Runner<'a, 'o> {
    fn emit_config(&mut self, kind: EventKind, stage: &Ordinal, c: &Configuration, ev: Option<CycleEvidence>, step_like: bool) {
        let p = self.p;
        if let Some(obs) = self.obs.as_deref_mut() {
            if step_like && kind == EventKind::Step && !obs.wants_steps() {
                return;
            }
            let (window, pad) = window_of(c, obs.window());
            obs.event(&TraceEvent {
                event: kind,
                stage: stage.clone(),
                state: p.name(c.state).to_string(),
                head: c.head,
                window,
                pad,
                evidence: ev,
            });
        }
    }

    fn stage_plus(&self, s: &Ordinal, o: &Ordinal, level: u32) -> Result<Ordinal, EngineError> {
        s.add(o).map_err(|e| EngineError::BudgetExhausted { stage: s.clone(), reason: format!("level {level}: {e}") })
    }

    fn level(&mut self, j: u32, c: Configuration, s: Ordinal) -> Result<Reached, EngineError> {
        if j == 0 {
            self.level0(c, s)
        } else {
            self.level_up(j, c, s)
        }
    }

    fn finish_limit(
        &mut self,
        j: u32,
        s: &Ordinal,
        summary: LimitSummary,
        ever: Option<LimitSummary>,
        kind: CycleKind,
        base_index: u64,
    ) -> Result<Reached, EngineError> {
        let evidence = CycleEvidence { kind, level: j, base_index };
        if j == self.budget.max_level {
            self.last_evidence = Some(evidence);
            let stage = s.add(&Ordinal::omega_pow(j + 1)).unwrap_or_else(|_| self.last_stage.clone());
            return Ok(Reached::Limit { stage, config: apply_limit(self.p, &summary).expect("shape"), ever });
        }
        let stage = self.stage_plus(s, &Ordinal::omega_pow(j + 1), j)?;
        let config = apply_limit(self.p, &summary).expect("engine summaries match the program shape");
        self.stats.limits += 1;
        self.last_evidence = Some(evidence);
        self.last_stage = stage.clone();
        self.emit_config(EventKind::Resolve, &stage, &config, Some(evidence), false);
        self.emit_config(EventKind::Limit, &stage, &config, None, false);
        Ok(Reached::Limit { stage, config, ever })
    }

    fn level0(&mut self, c: Configuration, s: Ordinal) -> Result<Reached, EngineError> {
        let p = self.p;
        let mut seg = Segment::new(p, &c);
        let mut acc = bouncer::Accelerator::default();
        let wants_steps = self.obs.as_deref().is_some_and(|o| o.wants_steps());
        let mut pending_step = false;
        loop {
            if seg.t >= self.budget.steps_per_level || self.stats.steps >= self.budget.total_steps {
                let reason = format!("no cycle within {} successor steps", seg.t);
                return Err(EngineError::Unresolved { stage: s, level: 0, reason });
            }
            if pending_step {
                let cfg = seg.config();
                let st = self.stage_plus(&s, &Ordinal::finite(seg.t), 0)?;
                self.emit_config(EventKind::Step, &st, &cfg, None, true);
            }
            let halted = seg.step();
            self.stats.steps += 1;
            if halted {
                self.stats.clamps += seg.clamp_count;
                let stage = self.stage_plus(&s, &Ordinal::finite(seg.t), 0)?;
                let config = seg.config();
                self.emit_config(EventKind::Halt, &stage, &config, None, false);
                return Ok(Reached::Halted { stage, config });
            }
            pending_step = wants_steps;
            let end = seg.check_exact().or_else(|| {
                if seg.is_record() {
                    seg.check_shifted().or_else(|| acc.at_record(&seg))
                } else {
                    None
                }
            });
            if let Some(end) = end {
                self.stats.clamps += seg.clamp_count;
                let SegmentEnd { summary, ever, cycle } = end;
                let (kind, base) = match cycle {
                    Cycle::Exact { base, period } => (CycleKind::Exact { period }, base),
                    Cycle::Shifted { base, period, drift } => (CycleKind::Shifted { period, drift }, base),
                    Cycle::Accelerated { base, period, drift } => (CycleKind::Accelerated { period, drift }, base),
                };
                return self.finish_limit(0, &s, summary, ever, kind, base);
            }
        }
    }

    fn level_up(&mut self, j: u32, c: Configuration, s: Ordinal) -> Result<Reached, EngineError> {
        let mut xs: Vec<Configuration> = vec![c.clone()];
        let mut es: Vec<Option<LimitSummary>> = vec![None];
        let mut index: HashMap<Configuration, usize> = HashMap::new();
        index.insert(c.clone(), 0);
        let mut cur = c;
        let mut st = s.clone();
        loop {
            let (stage, config, ever) = match self.level(j - 1, cur, st)? {
                Reached::Halted { stage, config } => return Ok(Reached::Halted { stage, config }),
                Reached::Limit { stage, config, ever } => (stage, config, ever),
            };
            xs.push(config.clone());
            es.push(ever);
            let n = xs.len() - 1;
            if let Some(&u) = index.get(&config) {
                let block = or_all(&es[u + 1..=n]).ok_or_else(|| EngineError::Unresolved {
                    stage: stage.clone(),
                    level: j,
                    reason: "cycle found but a sub-segment summary is opaque".into(),
                })?;
                let ever = or_all(&es[1..=n]);
                return self.finish_limit(j, &s, block, ever, CycleKind::Exact { period: (n - u) as u64 }, u as u64);
            }
            index.insert(config.clone(), n);
            if let Some((limit, ever, period, drift, base)) = shifted_items(&xs, &es) {
                return self.finish_limit(j, &s, limit, ever, CycleKind::Shifted { period, drift }, base);
            }
            if n as u64 >= self.budget.steps_per_level || self.stats.steps >= self.budget.total_steps {
                return Err(EngineError::Unresolved {
                    stage,
                    level: j,
                    reason: format!("no cycle among {n} limit configurations"),
                });
            }
            cur = config;
            st = stage;
        }
    }
}

fn or_summary(a: &LimitSummary, b: &LimitSummary) -> LimitSummary {
    LimitSummary {
        tapes: a.tapes.iter().zip(&b.tapes).map(|(x, y)| x.or(y)).collect(),
        pad: a.pad.iter().zip(&b.pad).map(|(x, y)| x | y).collect(),
    }
}

fn or_all(es: &[Option<LimitSummary>]) -> Option<LimitSummary> {
    let mut it = es.iter();
    let mut acc = it.next()?.clone()?;
    for e in it {
        acc = or_summary(&acc, e.as_ref()?);
    }
    Some(acc)
}

/// Length of the longest common prefix, or `None` if the words are equal.
pub fn lcp(a: &TapeWord, b: &TapeWord) -> Option<usize> {
    (0..a.horizon(b)).find(|&x| a.get(x) != b.get(x))
}

/// Whether `a[i..] == b[j..]`.
pub fn suffix_eq(a: &TapeWord, i: usize, b: &TapeWord, j: usize) -> bool {
    let n = a.tail_start().saturating_sub(i).max(b.tail_start().saturating_sub(j))
        + lcm(a.period().len(), b.period().len());
    (0..n).all(|x| a.get(i + x) == b.get(j + x))
}

fn prefix_eq(a: &TapeWord, b: &TapeWord, n: usize) -> bool {
    (0..n).all(|x| a.get(x) == b.get(x))
}

const MAX_ITEM_PERIOD: usize = 32;
const MAX_ITEM_DRIFT: usize = 4096;

type ShiftFound = (LimitSummary, Option<LimitSummary>, u64, usize, u64);

/// Drifting limit configurations at a higher level: items `u, u+P, u+2P, u+3P`
/// agree up to a frontier that advances by `d` cells per `P` items, and the
/// per-block summaries move with it.
fn shifted_items(xs: &[Configuration], es: &[Option<LimitSummary>]) -> Option<ShiftFound> {
    let n = xs.len() - 1;
    for period in 1..=MAX_ITEM_PERIOD.min(n / 3) {
        let u = n - 3 * period;
        let (t, v, w) = (u + period, u + 2 * period, n);
        let (xu, xt, xv, xw) = (&xs[u], &xs[t], &xs[v], &xs[w]);
        if xu.pad != xt.pad || xt.pad != xv.pad || xv.pad != xw.pad {
            continue;
        }
        let f = xu.tapes.iter().zip(&xt.tapes).filter_map(|(a, b)| lcp(a, b)).min()?;
        let f2 = xt.tapes.iter().zip(&xv.tapes).filter_map(|(a, b)| lcp(a, b)).min().unwrap_or(usize::MAX);
        if f2 <= f {
            continue;
        }
        let (Some(m1), Some(m2), Some(m3)) = (or_all(&es[u + 1..=t]), or_all(&es[t + 1..=v]), or_all(&es[v + 1..=w]))
        else {
            continue;
        };
        let dmax = (f2 - f).min(MAX_ITEM_DRIFT);
        for d in 1..=dmax {
            let tapes_ok = (0..xu.tapes.len()).all(|k| {
                suffix_eq(&xt.tapes[k], f + d, &xu.tapes[k], f)
                    && suffix_eq(&xv.tapes[k], f + 2 * d, &xt.tapes[k], f + d)
                    && suffix_eq(&xw.tapes[k], f + 3 * d, &xv.tapes[k], f + 2 * d)
                    && prefix_eq(&xv.tapes[k], &xt.tapes[k], f + d)
                    && prefix_eq(&xw.tapes[k], &xv.tapes[k], f + 2 * d)
            });
            if !tapes_ok {
                continue;
            }
            let sums_ok = (0..xu.tapes.len()).all(|k| {
                prefix_eq(&m2.tapes[k], &m1.tapes[k], f)
                    && prefix_eq(&m3.tapes[k], &m2.tapes[k], f + d)
                    && suffix_eq(&m2.tapes[k], f + d, &m1.tapes[k], f)
                    && suffix_eq(&m3.tapes[k], f + 2 * d, &m2.tapes[k], f + d)
            }) && m1.pad == m2.pad
                && m2.pad == m3.pad;
            if !sums_ok {
                continue;
            }
            let limit = LimitSummary {
                tapes: m3.tapes.iter().map(|m| TapeWord::from_fn(f, d, |x| m.get(x))).collect(),
                pad: m3.pad.clone(),
            };
            let prior = if u == 0 { Some(m1.clone()) } else { or_all(&es[1..=u]).map(|e| or_summary(&e, &m1)) };
            let ever = prior.map(|e| LimitSummary {
                tapes: e.tapes.iter().zip(&m1.tapes).map(|(et, m)| with_progression(et, m, f, d)).collect(),
                pad: e.pad,
            });
            return Some((limit, ever, period as u64, d, u as u64));
        }
    }
    None
}

/// `e` OR'd with `g[x] = OR of m[x - k·d]` over `k ≥ 0` with `x - k·d ≥ f`.
fn with_progression(e: &TapeWord, m: &TapeWord, f: usize, d: usize) -> TapeWord {
    let l = lcm(d, m.period().len());
    let l = lcm(l, e.period().len());
    let n0 = f.max(m.tail_start()).max(e.tail_start()) + l;
    let len = n0 + l;
    let mut g: Vec<bool> = (0..len).map(|x| x >= f && m.get(x)).collect();
    for x in f + d..len {
        if g[x - d] {
            g[x] = true;
        }
    }
    TapeWord::from_fn(n0, l, |x| e.get(x) || g[x])
}
