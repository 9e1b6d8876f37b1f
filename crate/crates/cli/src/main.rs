use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tamkit::compilers::{
    compile_grid_repeat, compile_multi_pixel, compile_single_pixel, compile_square_pattern, compile_stripes, Budget,
    BudgetKind, BudgetLine, CompiledSystem,
};
use tamkit::diag::{
    compile_pn_lift, compute_bits_capped, count_sf_systems, parse_bit_string, render_pn, BitSequence, Universe,
    DEFAULT_MAX_SYSTEMS, DEFAULT_MAX_WORK,
};
use tamkit::model::{parse_system, serialize_system, Dim, TileAssemblySystem};
use tamkit::patterns::{
    assembly_pattern_layer, default_rgb, export_ppm, grid_repeat, multi_pixel, parse_pattern, serialize_pattern,
    single_pixel, stripes, Pattern,
};
use tamkit::sim::{set_step_cap, Policy, SimState, TasRules, DEFAULT_STEP_CAP};
use tamkit::verify::{pn_differs, verify_weak};

/// Tile assembly workbench.
#[derive(Parser)]
#[command(name = "tamkit", version)]
struct Cli {
    /// Largest step count any single run may request.
    #[arg(long, global = true, default_value_t = DEFAULT_STEP_CAP)]
    step_cap: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compile a pattern family into a tile system (TAMSET v1).
    Compile {
        #[command(subcommand)]
        class: Class,
        #[command(flatten)]
        out: CompileOut,
    },
    /// Write a target pattern (PAT v1).
    Pattern {
        #[command(subcommand)]
        class: PatternClass,
        /// Output file; stdout when omitted.
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Grow a system and write the resulting pattern.
    Simulate {
        input: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        steps: u64,
        /// `paper` or `random:SEED`.
        #[arg(long, default_value = "paper", value_parser = parse_policy)]
        policy: Policy,
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Plane to read (defaults to 1 for two-plane systems, else 0).
        #[arg(long)]
        layer: Option<i32>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check that a system weakly (or strictly) assembles a target pattern.
    Verify {
        input: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        strict: bool,
    },
    /// Render a pattern as a plain PPM image.
    Render {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Lines `name r g b` overriding the built-in colors.
        #[arg(long)]
        colors: Option<PathBuf>,
    },
    /// Diagonalization over strength-free systems.
    Diag {
        #[command(subcommand)]
        cmd: DiagCmd,
    },
    /// Tile count, glue count and budget line of a system.
    Stats { input: PathBuf },
}

#[derive(Args)]
struct CompileOut {
    /// TAMSET output; the budget line goes to `<out>.budget`.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    /// Also write the target pattern here.
    #[arg(long, global = true)]
    target: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Class {
    /// n x n White square with one Black pixel at (i, j).
    SinglePixel { n: u32, i: u32, j: u32 },
    /// n x n White square with Black pixels at the given `x,y` points.
    MultiPixel {
        n: u32,
        #[arg(value_parser = parse_point, num_args = 1..)]
        pixels: Vec<(u32, u32)>,
    },
    /// Black columns every i and rows every j.
    Stripes { n: u32, i: u32, j: u32 },
    /// Arbitrary two-colored square.
    Square { pattern: PathBuf },
    /// m x m repetition of a two-colored square.
    GridRepeat { pattern: PathBuf, m: u32 },
}

#[derive(Subcommand)]
enum PatternClass {
    SinglePixel { n: u32, i: u32, j: u32 },
    MultiPixel {
        n: u32,
        #[arg(value_parser = parse_point, num_args = 1..)]
        pixels: Vec<(u32, u32)>,
    },
    Stripes { n: u32, i: u32, j: u32 },
    GridRepeat { pattern: PathBuf, m: u32 },
}

#[derive(Args)]
struct UniverseArgs {
    /// `tiles=T,colors=C,coops=K,coopbase=B,steps=S,pattsize=P,mode=directSF`.
    #[arg(long, default_value = "")]
    universe: String,
    #[arg(long, default_value_t = DEFAULT_MAX_SYSTEMS)]
    max_systems: u64,
    /// Cap on systems x (steps + 1).
    #[arg(long, default_value_t = DEFAULT_MAX_WORK)]
    max_work: u64,
    /// Use these bits (a `0101` string or a `BIT` sidecar file) instead of computing them.
    #[arg(long)]
    bits: Option<String>,
}

#[derive(Subcommand)]
enum DiagCmd {
    /// Number of systems in the universe.
    Count {
        #[command(flatten)]
        u: UniverseArgs,
    },
    /// Bit sequence of the universe, one character per system.
    Bits {
        #[command(flatten)]
        u: UniverseArgs,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write `BIT serial value reason` lines here.
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// The m x m pattern that differs from every system in the universe.
    Pattern {
        #[command(flatten)]
        u: UniverseArgs,
        /// Side of the pattern (default: twice the cell size).
        #[arg(long)]
        size: Option<u32>,
        /// Replay the flip systems and check the pattern disagrees with each.
        #[arg(long)]
        check: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Two-plane system whose upper plane is the pattern for the given bits.
    Lift {
        #[command(flatten)]
        u: UniverseArgs,
        #[arg(long)]
        size: Option<u32>,
        #[command(flatten)]
        out: CompileOut,
    },
}

fn parse_point(s: &str) -> Result<(u32, u32), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    Ok((x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?, y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?))
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    match s.split_once(':') {
        None if s == "paper" => Ok(Policy::PaperOrder),
        Some(("random", seed)) => seed.parse().map(Policy::UniformRandom).map_err(|_| format!("bad seed {seed:?}")),
        _ => Err(format!("expected paper or random:SEED, got {s:?}")),
    }
}

/// Errors that should exit with 1 rather than 3.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_system(path: &Path) -> Result<TileAssemblySystem> {
    parse_system(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn read_pattern(path: &Path) -> Result<Pattern> {
    parse_pattern(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn budget_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".budget");
    PathBuf::from(s)
}

fn emit_compiled(cs: &CompiledSystem, out: &CompileOut) -> Result<()> {
    let line = format!("{}\n", cs.budget_line());
    match &out.out {
        Some(p) => {
            fs::write(p, serialize_system(&cs.system)).with_context(|| format!("writing {}", p.display()))?;
            fs::write(budget_path(p), &line)?;
            print!("{line}");
        }
        None => print!("{}", serialize_system(&cs.system)),
    }
    if let Some(t) = &out.target {
        fs::write(t, serialize_pattern(&cs.target)).with_context(|| format!("writing {}", t.display()))?;
    }
    Ok(())
}

fn compile(class: &Class) -> Result<CompiledSystem> {
    Ok(match class {
        Class::SinglePixel { n, i, j } => compile_single_pixel(*n, *i, *j)?,
        Class::MultiPixel { n, pixels } => compile_multi_pixel(*n, pixels)?,
        Class::Stripes { n, i, j } => compile_stripes(*n, *i, *j)?,
        Class::Square { pattern } => compile_square_pattern(&read_pattern(pattern)?)?,
        Class::GridRepeat { pattern, m } => compile_grid_repeat(&read_pattern(pattern)?, *m)?,
    })
}

fn make_pattern(class: &PatternClass) -> Result<Pattern> {
    Ok(match class {
        PatternClass::SinglePixel { n, i, j } => single_pixel(*n, *i, *j)?,
        PatternClass::MultiPixel { n, pixels } => multi_pixel(*n, pixels)?,
        PatternClass::Stripes { n, i, j } => stripes(*n, *i, *j)?,
        PatternClass::GridRepeat { pattern, m } => grid_repeat(&read_pattern(pattern)?, *m),
    })
}

fn universe(args: &UniverseArgs) -> Result<Universe> {
    let u: Universe = args.universe.parse()?;
    u.validate()?;
    Ok(u)
}

/// Bits from `--bits`, or computed from the universe.
fn bits(args: &UniverseArgs) -> Result<(Universe, BitSequence)> {
    let u = universe(args)?;
    let seq = match &args.bits {
        Some(b) => {
            let text = if Path::new(b).is_file() { read(Path::new(b))? } else { b.clone() };
            if text.trim_start().starts_with("BIT") {
                BitSequence::parse_sidecar(&text)?
            } else {
                let v = parse_bit_string(&text)?;
                let records = v
                    .into_iter()
                    .enumerate()
                    .map(|(i, bit)| tamkit::diag::BitRecord { serial: i as u64, bit, reason: tamkit::diag::Reason::Flip })
                    .collect();
                BitSequence { records }
            }
        }
        None => compute_bits_capped(&u, args.max_systems, args.max_work)?,
    };
    if seq.is_empty() {
        bail!("empty bit sequence");
    }
    Ok((u, seq))
}

fn cell_size(u: &Universe, seq: &BitSequence) -> Result<u32> {
    let c = u.cell_size(seq.len() as u64);
    let c = u32::try_from(c).map_err(|_| anyhow!("cell size {c} too large"))?;
    if c < 2 {
        bail!("cell size must be at least 2 (got {c}); set pattsize");
    }
    Ok(c)
}

fn load_colors(path: &Path) -> Result<HashMap<String, [u8; 3]>> {
    let mut colors = default_rgb();
    for (n, line) in read(path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let rgb = |s: &str| s.parse::<u8>().with_context(|| format!("line {}: bad channel {s:?}", n + 1));
        match f.as_slice() {
            [name, r, g, b] => {
                colors.insert(name.to_string(), [rgb(r)?, rgb(g)?, rgb(b)?]);
            }
            _ => bail!("line {}: expected `name r g b`", n + 1),
        }
    }
    Ok(colors)
}

fn stats(sys: &TileAssemblySystem) -> String {
    let glues: BTreeSet<(&str, u32)> = sys
        .tiles()
        .iter()
        .flat_map(|t| t.glues.iter())
        .filter(|g| !g.is_null())
        .map(|g| (g.label.as_str(), g.strength))
        .collect();
    let dim = match sys.dim {
        Dim::Two => 2,
        Dim::Three => 3,
    };
    format!(
        "TILES {}\nGLUES {}\nTEMP {}\nDIM {}\nSEED {}\n",
        sys.tiles().len(),
        glues.len(),
        sys.temperature,
        dim,
        sys.seed.len()
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    set_step_cap(cli.step_cap);
    match cli.cmd {
        Cmd::Compile { class, out } => emit_compiled(&compile(&class)?, &out)?,
        Cmd::Pattern { class, out } => write_or_print(out.as_deref(), &serialize_pattern(&make_pattern(&class)?))?,
        Cmd::Simulate { input, steps, policy, trace, layer, out } => {
            let sys = read_system(&input)?;
            let rules = TasRules::new(&sys);
            let mut st = SimState::new(&rules);
            let outcome = st.run(steps, policy)?;
            if let Some(t) = trace {
                fs::write(&t, st.trace()).with_context(|| format!("writing {}", t.display()))?;
            }
            eprintln!("SIM steps={} terminal={}", outcome.steps, u8::from(outcome.terminal));
            let layer = layer.unwrap_or(if sys.dim == Dim::Three { 1 } else { 0 });
            let p = assembly_pattern_layer(&st.asm, sys.tiles(), &sys.tileset.palette, true, layer)
                .map_err(|e| Failed(format!("assembly does not form a pattern: {e}")))?;
            write_or_print(out.as_deref(), &serialize_pattern(&p))?;
            if !outcome.terminal {
                return Err(Failed(format!("not terminal after {} steps", outcome.steps)).into());
            }
        }
        Cmd::Verify { input, target, trials, seed, strict } => {
            let system = read_system(&input)?;
            let target = read_pattern(&target)?;
            let budget = Budget { kind: BudgetKind::LogN, cap: u64::MAX };
            let cs = CompiledSystem { system, target, budget };
            let report = verify_weak(&cs, trials, seed, strict).map_err(|e| Failed(e.to_string()))?;
            println!("{report}");
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Render { input, out, colors } => {
            let p = read_pattern(&input)?;
            let colors = match colors {
                Some(c) => load_colors(&c)?,
                None => default_rgb(),
            };
            fs::write(&out, export_ppm(&p, &colors)?).with_context(|| format!("writing {}", out.display()))?;
        }
        Cmd::Diag { cmd } => match cmd {
            DiagCmd::Count { u } => println!("{}", count_sf_systems(&universe(&u)?)),
            DiagCmd::Bits { u, out, sidecar } => {
                let (_, seq) = bits(&u)?;
                write_or_print(out.as_deref(), &seq.bit_string())?;
                if let Some(s) = sidecar {
                    fs::write(&s, seq.sidecar()).with_context(|| format!("writing {}", s.display()))?;
                }
            }
            DiagCmd::Pattern { u, size, check, out } => {
                let (univ, seq) = bits(&u)?;
                let c = cell_size(&univ, &seq)?;
                let p = render_pn(&seq.bits(), c, size.unwrap_or(2 * c));
                write_or_print(out.as_deref(), &serialize_pattern(&p))?;
                if check {
                    let r = pn_differs(&p, &univ, &seq)?;
                    eprintln!(
                        "DIFFERS {} flips={} checked={} witnesses={}",
                        if r.holds { "pass" } else { "fail" },
                        r.flips,
                        r.checked,
                        r.witnesses.len()
                    );
                    if !r.holds {
                        return Ok(ExitCode::from(1));
                    }
                }
            }
            DiagCmd::Lift { u, size, out } => {
                let (_, seq) = bits(&u)?;
                let m = size.unwrap_or(2 * seq.len() as u32);
                emit_compiled(&compile_pn_lift(&seq.bits(), m)?, &out)?;
            }
        },
        Cmd::Stats { input } => {
            let sys = read_system(&input)?;
            print!("{}", stats(&sys));
            if let Ok(text) = fs::read_to_string(budget_path(&input)) {
                if let Some(line) = text.lines().find_map(BudgetLine::parse) {
                    println!("{line}");
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Failed>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
