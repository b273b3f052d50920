//! Machine shapes, transition tables and the assembler text format.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::L => "L",
            Move::R => "R",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MachineShape {
    pub tape_count: usize,
    pub scratch_pad_cells: usize,
    pub head_width: usize,
}

impl MachineShape {
    pub const ONE_TAPE: MachineShape = MachineShape { tape_count: 1, scratch_pad_cells: 0, head_width: 1 };
    pub const THREE_TAPE: MachineShape = MachineShape { tape_count: 3, scratch_pad_cells: 0, head_width: 1 };
    pub const DOUBLE_HEAD: MachineShape = MachineShape { tape_count: 1, scratch_pad_cells: 0, head_width: 2 };

    pub fn with_pad(cells: usize) -> Self {
        MachineShape { tape_count: 1, scratch_pad_cells: cells, head_width: 1 }
    }

    /// Number of bits in a read (and write) vector.
    pub fn width(&self) -> usize {
        self.tape_count * self.head_width + self.scratch_pad_cells
    }

    pub fn check(&self) -> Result<(), ProgramError> {
        if self.tape_count == 0 || !(1..=2).contains(&self.head_width) {
            return Err(ProgramError::Shape(format!("{self:?}")));
        }
        if self.head_width == 2 && self.tape_count != 1 {
            return Err(ProgramError::Shape("a two-cell head needs exactly one tape".into()));
        }
        if self.width() > 16 {
            return Err(ProgramError::Shape("read vectors wider than 16 bits".into()));
        }
        Ok(())
    }
}

pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub write: u32,
    pub mv: Move,
    pub next: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("unsupported machine shape: {0}")]
    Shape(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{0}")]
    Invalid(ValidationReport),
}

/// Structured problems found by [`Program::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    /// `(state, read vector)` pairs with no transition.
    pub missing: Vec<(String, String)>,
    /// Transitions defined out of the halt state.
    pub from_halt: Vec<String>,
    pub other: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.from_halt.is_empty() && self.other.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.missing.is_empty() {
            let shown: Vec<String> =
                self.missing.iter().take(8).map(|(s, r)| format!("({s},{r})")).collect();
            parts.push(format!("{} missing transitions: {}", self.missing.len(), shown.join(" ")));
        }
        if !self.from_halt.is_empty() {
            parts.push(format!("transitions out of halt: {}", self.from_halt.join(" ")));
        }
        parts.extend(self.other.iter().cloned());
        write!(f, "invalid program: {}", parts.join("; "))
    }
}

/// A finite transition table over named states with distinguished
/// start, limit and halt states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    shape: MachineShape,
    names: Vec<String>,
    start: StateId,
    limit: StateId,
    halt: StateId,
    table: Vec<Option<Transition>>,
}

pub fn vec_to_string(bits: u32, width: usize) -> String {
    (0..width).map(|i| if bits >> i & 1 == 1 { "1" } else { "0" }).collect::<Vec<_>>().join(",")
}

impl Program {
    pub fn shape(&self) -> MachineShape {
        self.shape
    }

    pub fn width(&self) -> usize {
        self.shape.width()
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn limit(&self) -> StateId {
        self.limit
    }

    pub fn halt(&self) -> StateId {
        self.halt
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    fn slot(&self, state: StateId, read: u32) -> usize {
        (state << self.width()) | read as usize
    }

    pub fn transition(&self, state: StateId, read: u32) -> Option<Transition> {
        self.table[self.slot(state, read)]
    }

    pub fn set_transition(&mut self, state: StateId, read: u32, t: Option<Transition>) {
        let i = self.slot(state, read);
        self.table[i] = t;
    }

    /// All defined transitions as `(state, read, transition)`.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, u32, Transition)> + '_ {
        let w = self.width();
        self.table
            .iter()
            .enumerate()
            .filter_map(move |(i, t)| t.map(|t| (i >> w, (i & ((1 << w) - 1)) as u32, t)))
    }

    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut report = ValidationReport::default();
        let w = self.width();
        for s in 0..self.names.len() {
            for r in 0..(1u32 << w) {
                let t = self.transition(s, r);
                if s == self.halt {
                    if t.is_some() {
                        report.from_halt.push(format!("({},{})", self.names[s], vec_to_string(r, w)));
                    }
                } else if t.is_none() {
                    report.missing.push((self.names[s].clone(), vec_to_string(r, w)));
                }
            }
        }
        if self.start == self.halt || self.limit == self.halt {
            report.other.push("start and limit must differ from halt".into());
        }
        if report.is_empty() {
            Ok(())
        } else {
            Err(report)
        }
    }

    /// Assembler text, one transition per line.
    pub fn to_text(&self) -> String {
        let w = self.width();
        let mut out = format!(
            "machine tapes={} pad={} head={}\nstates {}\nstart {}\nlimit {}\nhalt {}\n",
            self.shape.tape_count,
            self.shape.scratch_pad_cells,
            self.shape.head_width,
            self.names.join(" "),
            self.names[self.start],
            self.names[self.limit],
            self.names[self.halt],
        );
        for (s, r, t) in self.transitions() {
            out.push_str(&format!(
                "{} {} -> {} {} {}\n",
                self.names[s],
                vec_to_string(r, w),
                vec_to_string(t.write, w),
                t.mv,
                self.names[t.next]
            ));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Program, ProgramError> {
        let err = |line: usize, reason: &str| ProgramError::Parse { line, reason: reason.to_string() };
        let mut shape = None;
        let mut builder: Option<ProgramBuilder> = None;
        let mut names: Option<Vec<String>> = None;
        let mut special: HashMap<&str, String> = HashMap::new();
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            match words.next().unwrap() {
                "machine" => {
                    let mut sh = MachineShape::ONE_TAPE;
                    for kv in words {
                        let (k, v) = kv.split_once('=').ok_or_else(|| err(line_no, "expected key=value"))?;
                        let v: usize = v.parse().map_err(|_| err(line_no, "bad number"))?;
                        match k {
                            "tapes" => sh.tape_count = v,
                            "pad" => sh.scratch_pad_cells = v,
                            "head" => sh.head_width = v,
                            _ => return Err(err(line_no, "unknown machine key")),
                        }
                    }
                    sh.check()?;
                    shape = Some(sh);
                }
                "states" => names = Some(words.map(str::to_string).collect()),
                key @ ("start" | "limit" | "halt") if !line.contains("->") => {
                    let v = words.next().ok_or_else(|| err(line_no, "missing state name"))?;
                    special.insert(key, v.to_string());
                }
                _ => rows.push((line_no, line.to_string())),
            }
        }
        let shape = shape.unwrap_or(MachineShape::ONE_TAPE);
        shape.check()?;
        let b = builder.get_or_insert_with(|| ProgramBuilder::new(shape));
        for n in names.unwrap_or_default() {
            b.state(&n);
        }
        let w = shape.width();
        let parse_vec = |line: usize, s: &str| -> Result<u32, ProgramError> {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != w {
                return Err(err(line, &format!("expected {w} bits, got `{s}`")));
            }
            let mut v = 0u32;
            for (i, p) in parts.iter().enumerate() {
                match *p {
                    "0" => {}
                    "1" => v |= 1 << i,
                    _ => return Err(err(line, "bits must be 0 or 1")),
                }
            }
            Ok(v)
        };
        for (line_no, line) in rows {
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err(line_no, "expected `->`"))?;
            let l: Vec<&str> = lhs.split_whitespace().collect();
            let r: Vec<&str> = rhs.split_whitespace().collect();
            if l.len() != 2 || r.len() != 3 {
                return Err(err(line_no, "expected `STATE READ -> WRITE MOVE NEXT`"));
            }
            let read = parse_vec(line_no, l[1])?;
            let write = parse_vec(line_no, r[0])?;
            let mv = match r[1] {
                "L" => Move::L,
                "R" => Move::R,
                _ => return Err(err(line_no, "move must be L or R")),
            };
            let s = b.state(l[0]);
            let next = b.state(r[2]);
            if b.get(s, read).is_some() {
                return Err(err(line_no, "duplicate transition"));
            }
            b.set(s, read, write, mv, next);
        }
        for key in ["start", "limit", "halt"] {
            let name = special.get(key).cloned().unwrap_or_else(|| key.to_string());
            let id = b.state(&name);
            match key {
                "start" => b.start = id,
                "limit" => b.limit = id,
                _ => b.halt = id,
            }
        }
        Ok(builder.unwrap().build_partial())
    }

    /// Stable byte serialization used for canonical ordering.
    pub fn table_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for t in &self.table {
            match t {
                None => out.push(0xff),
                Some(t) => {
                    out.extend_from_slice(&t.write.to_le_bytes()[..2]);
                    out.push(matches!(t.mv, Move::R) as u8);
                    out.extend_from_slice(&(t.next as u32).to_le_bytes());
                }
            }
        }
        out
    }
}

/// Incremental construction of programs with named states.
#[derive(Debug, Clone)]
pub struct ProgramBuilder {
    shape: MachineShape,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    table: Vec<Option<Transition>>,
    pub start: StateId,
    pub limit: StateId,
    pub halt: StateId,
}

impl ProgramBuilder {
    /// A builder pre-populated with `start`, `limit` and `halt`.
    pub fn new(shape: MachineShape) -> Self {
        let mut b = ProgramBuilder {
            shape,
            names: Vec::new(),
            index: HashMap::new(),
            table: Vec::new(),
            start: 0,
            limit: 0,
            halt: 0,
        };
        b.start = b.state("start");
        b.limit = b.state("limit");
        b.halt = b.state("halt");
        b
    }

    pub fn shape(&self) -> MachineShape {
        self.shape
    }

    pub fn width(&self) -> usize {
        self.shape.width()
    }

    /// Looks up or creates a state.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        self.table.extend(std::iter::repeat_n(None, 1 << self.width()));
        id
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn get(&self, s: StateId, read: u32) -> Option<Transition> {
        self.table[(s << self.width()) | read as usize]
    }

    pub fn set(&mut self, s: StateId, read: u32, write: u32, mv: Move, next: StateId) {
        let w = self.width();
        self.table[(s << w) | read as usize] = Some(Transition { write, mv, next });
    }

    /// Defines every read vector of `s` with `f(read) -> (write, move, next)`.
    pub fn set_all(&mut self, s: StateId, mut f: impl FnMut(u32) -> (u32, Move, StateId)) {
        for r in 0..(1u32 << self.width()) {
            let (w, m, n) = f(r);
            self.set(s, r, w, m, n);
        }
    }

    /// Fills every undefined non-halt slot with `f(state, read)`.
    pub fn fill(&mut self, mut f: impl FnMut(StateId, u32) -> (u32, Move, StateId)) {
        let w = self.width();
        for s in 0..self.names.len() {
            if s == self.halt {
                continue;
            }
            for r in 0..(1u32 << w) {
                if self.get(s, r).is_none() {
                    let (wr, m, n) = f(s, r);
                    self.set(s, r, wr, m, n);
                }
            }
        }
    }

    /// Fills undefined slots with a write-back move-right self loop.
    pub fn fill_idle(&mut self) {
        self.fill(|s, r| (r, Move::R, s));
    }

    fn build_partial(self) -> Program {
        Program {
            shape: self.shape,
            names: self.names,
            start: self.start,
            limit: self.limit,
            halt: self.halt,
            table: self.table,
        }
    }

    /// Finishes the program, filling gaps with idle loops.
    pub fn build(mut self) -> Program {
        self.fill_idle();
        self.build_partial()
    }

    /// Finishes without filling; the result may fail validation.
    pub fn build_raw(self) -> Program {
        self.build_partial()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLIP: &str = "machine tapes=1 pad=0 head=1
states start limit halt
start 0 -> 1 R halt
start 1 -> 0 R halt
limit 0 -> 0 R halt
limit 1 -> 1 R halt
";

    #[test]
    fn round_trips_text() {
        let p = Program::parse(FLIP).unwrap();
        assert!(p.validate().is_ok());
        let again = Program::parse(&p.to_text()).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn reports_missing_transition() {
        let text = FLIP.replace("start 1 -> 0 R halt\n", "");
        let p = Program::parse(&text).unwrap();
        let report = p.validate().unwrap_err();
        assert_eq!(report.missing, vec![("start".to_string(), "1".to_string())]);
    }

    #[test]
    fn reports_transition_out_of_halt() {
        let text = format!("{FLIP}halt 0 -> 0 R halt\n");
        let p = Program::parse(&text).unwrap();
        assert_eq!(p.validate().unwrap_err().from_halt.len(), 1);
    }

    #[test]
    fn rejects_bad_shape() {
        assert!(Program::parse("machine tapes=3 head=2\n").is_err());
        assert!(Program::parse("start 0 -> 0 X halt\n").is_err());
    }
}
