use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use ittm::analysis::{self, CollisionOutcome, CosimMode};
use ittm::clockables::{self, ClockSpec, ClockVerdict};
use ittm::compiler::{self, BlockLayout, Manifest, ManifestEntry};
use ittm::engine::{self, Budget, JsonTrace, Status};
use ittm::ordinal::Ordinal;
use ittm::program::Program;
use ittm::samples;
use ittm::tape::TapeWord;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Contract(String),
    #[error("{0}")]
    Engine(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Contract(_) => 1,
            CliError::Engine(_) => 2,
            CliError::Usage(_) => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "ittm", version, about = "Infinite time Turing machine simulator, compiler and analysis tools")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a program on an input and report the halting stage.
    Run(RunArgs),
    /// Emit one-tape programs from a three-tape program.
    Compile(CompileArgs),
    /// Emit or verify clock programs.
    Clock {
        #[command(subcommand)]
        cmd: ClockCmd,
    },
    /// Analysis instruments.
    Analyze {
        #[command(subcommand)]
        cmd: AnalyzeCmd,
    },
    /// Print a built-in sample program; lists the names when none is given.
    Sample { name: Option<String> },
    /// Run the programs of a pipeline manifest one after another.
    Chain {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "(0)")]
        input: TapeWord,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Successor steps per level-0 segment.
    #[arg(long, default_value_t = 50_000)]
    budget_steps: u64,
    #[arg(long, default_value_t = 3)]
    max_level: u32,
    #[arg(long, default_value_t = 20_000_000)]
    total_steps: u64,
}

impl BudgetArgs {
    fn budget(self) -> Budget {
        Budget { steps_per_level: self.budget_steps, max_level: self.max_level, total_steps: self.total_steps }
    }
}

// A program file, or a built-in sample.
#[derive(Args, Clone)]
struct ProgramArg {
    /// Program file in assembler format.
    #[arg(long, conflicts_with = "sample", required_unless_present = "sample")]
    program: Option<PathBuf>,
    /// Built-in sample; `ittm sample` lists them.
    #[arg(long)]
    sample: Option<String>,
}

impl ProgramArg {
    fn load(&self) -> Result<Program> {
        match (&self.program, &self.sample) {
            (Some(path), _) => load_program(path),
            (None, Some(name)) => samples::by_name(name)
                .or_else(|| samples::stretch_attempts().into_iter().find(|(n, _)| n == name).map(|(_, p)| p))
                .ok_or_else(|| CliError::Usage(format!("unknown sample `{name}`"))),
            (None, None) => Err(CliError::Usage("--program or --sample is required".into())),
        }
    }
}

fn load_program(path: &Path) -> Result<Program> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let p = Program::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    p.validate().map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(p)
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    program: ProgramArg,
    #[arg(long, default_value = "(0)")]
    input: TapeWord,
    #[command(flatten)]
    budget: BudgetArgs,
    /// Write a JSON-lines trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Cells per tape shown in trace events.
    #[arg(long, default_value_t = 16)]
    window: usize,
    /// Leave successor steps out of the trace.
    #[arg(long)]
    limits_only: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompileMode {
    Simulate,
    Onehat,
    Notdense,
    Characteristic,
    Scratchpad,
    Stretch,
    Compression,
    Pipeline,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Three,
    Four,
}

#[derive(Args)]
struct CompileArgs {
    mode: CompileMode,
    #[arg(long)]
    program: Option<PathBuf>,
    #[arg(long, conflicts_with = "program")]
    sample: Option<String>,
    /// Forbidden output prefix for notdense, as bits.
    #[arg(long)]
    sigma: Option<String>,
    /// Block layout for stretch and compression.
    #[arg(long, value_enum, default_value = "three")]
    layout: Layout,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    #[value(name = "3tape")]
    ThreeTape,
    OnetapeSucc,
    OnetapeLimit,
    Doublehead,
}

#[derive(Subcommand)]
enum ClockCmd {
    /// Emit a program halting at the target stage (the successor variant
    /// halts one step after it).
    Emit {
        #[arg(long)]
        target: Ordinal,
        #[arg(long, value_enum, default_value = "3tape")]
        variant: Variant,
        /// Earlier clocked stage after which the limit variant may flash.
        #[arg(long)]
        timer: Option<Ordinal>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Measure a program on input 0 against a target.
    Verify {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        target: Ordinal,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CosimArg {
    Simulate,
    Onehat,
    Notdense,
    Scratchpad,
    Pipeline,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Halting input strings up to a length.
    HaltingStrings {
        #[command(flatten)]
        program: ProgramArg,
        #[arg(long, default_value_t = 8)]
        maxlen: usize,
    },
    /// Branching tree of finite inputs.
    Branch {
        #[command(flatten)]
        program: ProgramArg,
        #[arg(long, default_value_t = 16)]
        depth: usize,
    },
    /// Search for two inputs a stretch cannot tell apart.
    StretchCollision {
        #[command(flatten)]
        program: ProgramArg,
        #[arg(long, default_value_t = 5)]
        m: usize,
        /// Input length; with --max-n, the first length tried.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Compare a compiled program against its source.
    Cosim {
        /// The three-tape program.
        #[arg(long)]
        p: PathBuf,
        /// The compiled program.
        #[arg(long)]
        q: PathBuf,
        #[arg(long, value_enum)]
        mode: CosimArg,
        #[arg(long)]
        sigma: Option<String>,
        /// Inputs; the standard set when none are given.
        #[arg(long = "input")]
        inputs: Vec<TapeWord>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Halting survey over enumerated programs.
    Survey {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        first: u128,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn print_json(v: &impl serde::Serialize) {
    let text = serde_json::to_string_pretty(v).expect("reports serialize");
    let _ = writeln!(io::stdout(), "{text}");
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_sigma(s: Option<&str>) -> Result<Vec<bool>> {
    let s = s.ok_or_else(|| CliError::Usage("--sigma is required for notdense".into()))?;
    ittm::tape::parse_bits(s).ok_or_else(|| CliError::Usage(format!("bad --sigma `{s}`")))
}

fn cmd_run(a: RunArgs) -> Result<()> {
    let p = a.program.load()?;
    let budget = a.budget.budget();
    let out = match &a.trace {
        Some(path) => {
            let f = fs::File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let mut tr = JsonTrace::new(BufWriter::new(f), a.window);
            tr.steps = !a.limits_only;
            engine::run_traced(&p, &a.input, budget, &mut tr)
        }
        None => engine::run(&p, &a.input, budget),
    };
    let output: Vec<String> = out.output.iter().map(ToString::to_string).collect();
    print_json(&json!({
        "status": out.status,
        "stage": out.stage,
        "output": output,
        "evidence": out.evidence,
        "message": out.message,
        "steps": out.stats.steps,
        "limits": out.stats.limits,
    }));
    match out.status {
        Status::Halted => Ok(()),
        _ => Err(CliError::Engine(out.message.unwrap_or_default())),
    }
}

fn cmd_compile(a: CompileArgs) -> Result<()> {
    fs::create_dir_all(&a.out).map_err(|e| CliError::Usage(format!("{}: {e}", a.out.display())))?;
    let layout = match a.layout {
        Layout::Three => BlockLayout::three(),
        Layout::Four => BlockLayout::four(),
    };
    let source = || ProgramArg { program: a.program.clone(), sample: a.sample.clone() }.load();
    let bad = |e: compiler::CompileError| CliError::Usage(e.to_string());
    let mut files: Vec<(String, Program)> = Vec::new();
    match a.mode {
        CompileMode::Simulate => files.push(("simulate".into(), compiler::compile_simulate(&source()?).map_err(bad)?)),
        CompileMode::Onehat => files.push(("onehat".into(), compiler::compile_onehat(&source()?).map_err(bad)?)),
        CompileMode::Notdense => {
            let sigma = parse_sigma(a.sigma.as_deref())?;
            files.push(("notdense".into(), compiler::compile_notdense(&source()?, &sigma).map_err(bad)?));
        }
        CompileMode::Characteristic => {
            files.push(("characteristic".into(), compiler::compile_characteristic(&source()?).map_err(bad)?))
        }
        CompileMode::Scratchpad => files.push(("scratchpad".into(), compiler::compile_scratchpad(&source()?).map_err(bad)?)),
        CompileMode::Stretch => files.push(("stretch".into(), compiler::stretch_program(&layout).map_err(bad)?)),
        CompileMode::Compression => files.push(("compression".into(), compiler::compression_program(&layout).map_err(bad)?)),
        CompileMode::Pipeline => {
            let pl = compiler::pipeline_manifest(&source()?).map_err(bad)?;
            let mut chain = Vec::new();
            for (role, p) in pl.stages() {
                chain.push(ManifestEntry { role: role.into(), file: format!("{role}.itm") });
                files.push((role.into(), p.clone()));
            }
            let m = serde_json::to_string_pretty(&Manifest { chain }).expect("manifest serializes");
            write_file(&a.out.join("manifest.json"), &m)?;
        }
    }
    for (name, p) in &files {
        let path = a.out.join(format!("{name}.itm"));
        write_file(&path, &p.to_text())?;
        println!("{} ({} states)", path.display(), p.state_count());
    }
    Ok(())
}

fn cmd_clock(c: ClockCmd) -> Result<()> {
    let engine_err = |e: clockables::ClockError| match e {
        clockables::ClockError::Engine(e) => CliError::Engine(e.to_string()),
        clockables::ClockError::Unsupported(_) | clockables::ClockError::Shape(_) => CliError::Usage(e.to_string()),
        e => CliError::Contract(e.to_string()),
    };
    match c {
        ClockCmd::Emit { target, variant, timer, out, budget } => {
            let b = budget.budget();
            let p3 = clockables::clock_program(&ClockSpec::three_tape(target)).map_err(engine_err)?;
            let q = match variant {
                Variant::ThreeTape => p3,
                Variant::OnetapeSucc => clockables::onetape_clock_successor(&p3, b).map_err(engine_err)?,
                Variant::Doublehead => clockables::doublehead_clock(&p3, b).map_err(engine_err)?,
                Variant::OnetapeLimit => {
                    let beta = timer.ok_or_else(|| CliError::Usage("--timer is required for onetape-limit".into()))?;
                    let pb = clockables::clock_program(&ClockSpec::three_tape(beta)).map_err(engine_err)?;
                    clockables::onetape_clock_limit(&p3, &pb, b).map_err(engine_err)?
                }
            };
            match out {
                Some(path) => write_file(&path, &q.to_text()),
                None => {
                    print!("{}", q.to_text());
                    Ok(())
                }
            }
        }
        ClockCmd::Verify { program, target, budget } => {
            let q = load_program(&program)?;
            let v = clockables::verify_clock(&q, &target, budget.budget()).map_err(|e| CliError::Engine(e.to_string()))?;
            print_json(&v);
            match v {
                ClockVerdict::Ok => Ok(()),
                ClockVerdict::Mismatch { measured } => Err(CliError::Contract(format!("measured {measured}, expected {target}"))),
            }
        }
    }
}

fn cmd_analyze(c: AnalyzeCmd) -> Result<()> {
    let usage = |e: analysis::AnalysisError| CliError::Usage(e.to_string());
    match c {
        AnalyzeCmd::HaltingStrings { program, maxlen } => {
            print_json(&analysis::halting_strings(&program.load()?, maxlen).map_err(usage)?);
        }
        AnalyzeCmd::Branch { program, depth } => {
            let b = analysis::leftmost_nonhalting_branch(&program.load()?, depth).map_err(usage)?;
            print_json(&json!({ "depth": depth, "branch": b }));
        }
        AnalyzeCmd::StretchCollision { program, m, n, max_n } => {
            let q = program.load()?;
            let mut last = None;
            for len in n..=max_n.unwrap_or(n).max(n) {
                let o = analysis::stretch_collision(&q, m, len).map_err(usage)?;
                let done = !matches!(o, CollisionOutcome::Exhausted { .. });
                last = Some(json!({ "n": len, "outcome": o }));
                if done {
                    print_json(&last);
                    return Ok(());
                }
            }
            print_json(&last);
            return Err(CliError::Contract("no collision or wrong output found".into()));
        }
        AnalyzeCmd::Cosim { p, q, mode, sigma, inputs, budget } => {
            let (p, q) = (load_program(&p)?, load_program(&q)?);
            let mode = match mode {
                CosimArg::Simulate => CosimMode::Simulate,
                CosimArg::Onehat => CosimMode::Onehat,
                CosimArg::Notdense => {
                    parse_sigma(sigma.as_deref())?;
                    CosimMode::Notdense { sigma: sigma.unwrap_or_default() }
                }
                CosimArg::Scratchpad => CosimMode::Scratchpad,
                CosimArg::Pipeline => CosimMode::Pipeline,
            };
            let inputs = if inputs.is_empty() { analysis::standard_inputs() } else { inputs };
            let rep = analysis::cosimulate(&p, &q, &mode, &inputs, budget.budget());
            print_json(&rep);
            if !rep.pass {
                return Err(CliError::Contract("co-simulation failed".into()));
            }
        }
        AnalyzeCmd::Survey { count, first, format, budget } => {
            let rows = analysis::survey_range(first, count, budget.budget());
            match format {
                TableFormat::Json => print_json(&rows),
                TableFormat::Text => print!("{}", analysis::survey_table(&rows)),
            }
        }
    }
    Ok(())
}

fn cmd_chain(manifest: &Path, input: &TapeWord, budget: Budget) -> Result<()> {
    let text = fs::read_to_string(manifest).map_err(|e| CliError::Usage(format!("{}: {e}", manifest.display())))?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", manifest.display())))?;
    let dir = manifest.parent().unwrap_or(Path::new("."));
    let mut word = input.clone();
    let mut stages = Vec::new();
    for entry in &m.chain {
        let p = load_program(&dir.join(&entry.file))?;
        let o = engine::run(&p, &word, budget);
        if o.status != Status::Halted {
            return Err(CliError::Engine(format!("{}: {}", entry.role, o.message.unwrap_or_default())));
        }
        word = o.output[0].clone();
        stages.push(json!({ "role": entry.role, "stage": o.stage, "output": word.to_string() }));
    }
    print_json(&json!({ "input": input.to_string(), "stages": stages, "output": word.to_string() }));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Compile(a) => cmd_compile(a),
        Cmd::Clock { cmd } => cmd_clock(cmd),
        Cmd::Analyze { cmd } => cmd_analyze(cmd),
        Cmd::Sample { name: None } => {
            samples::NAMES.iter().for_each(|n| println!("{n}"));
            samples::stretch_attempts().iter().for_each(|(n, _)| println!("{n}"));
            Ok(())
        }
        Cmd::Sample { name: Some(name) } => ProgramArg { program: None, sample: Some(name) }.load().map(|p| print!("{}", p.to_text())),
        Cmd::Chain { manifest, input, budget } => cmd_chain(&manifest, &input, budget.budget()),
    };
    let _ = io::stdout().flush();
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
