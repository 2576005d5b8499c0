//! The `selfsim` command line: configuration loading, command dispatch,
//! PPM rendering and JSON reports.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check, 2 on a usage
//! or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expand::{expand_quotient, frobenius_reciprocal, scalar_reciprocal, Side};
use crate::ff::PrimeField;
use crate::poly::{parse_poly, CoeffKind, Poly};
use crate::scenarios::{
    binomial_tiling, figure_preset, preset_names, razpet_check, recurrence_tiling, PresetConfig, RecurrenceSpec,
    PRESET_SIDE,
};
use crate::substitution::{
    find_block_substitution, kernel_chain, nominal_window_suffices, synthesize, verify_factorization,
    verify_invariance, LinearSubstitution, Synthesis,
};
use crate::tiling::{block_tiling, check_cells, count_colors, TilingBox};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

// ---------------------------------------------------------------------------
// Configuration

/// A validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub preset: Option<String>,
    pub field: PrimeField,
    pub d: usize,
    pub n: usize,
    pub p_text: String,
    pub q_text: String,
    pub side: Side,
    pub extents: Vec<usize>,
    pub p_num: Poly,
    pub q: Poly,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BoxSpec {
    Side(usize),
    Extents(Vec<usize>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    preset: Option<String>,
    p: Option<u64>,
    d: Option<usize>,
    n: Option<usize>,
    #[serde(rename = "P")]
    p_text: Option<String>,
    #[serde(rename = "Q")]
    q_text: Option<String>,
    side: Option<String>,
    #[serde(rename = "box")]
    extents: Option<BoxSpec>,
}

/// Unvalidated configuration fields.
#[derive(Clone, Debug)]
pub struct RawConfig {
    pub preset: Option<String>,
    pub p: u64,
    pub d: usize,
    pub n: usize,
    pub p_text: String,
    pub q_text: String,
    pub side: Side,
    pub extents: Vec<usize>,
}

impl RunConfig {
    /// Parses and validates the raw fields.
    pub fn new(raw: RawConfig) -> Result<Self> {
        let RawConfig { preset, p, d, n, p_text, q_text, side, extents } = raw;
        let field = PrimeField::new(p)?;
        if d == 0 || n == 0 {
            return Err(Error::Invalid("d and n must be positive".into()));
        }
        if extents.len() != n {
            return Err(Error::DimensionMismatch(format!("box has {} axes, n = {n}", extents.len())));
        }
        check_cells(&extents)?;
        let kind = if d == 1 { CoeffKind::Scalar } else { CoeffKind::Matrix(d) };
        let p_num = parse_poly(&p_text, field, n, kind)?;
        let q = parse_poly(&q_text, field, n, kind)?;
        if !q.is_series_unit() {
            return Err(Error::NotAUnit);
        }
        Ok(Self { preset, field, d, n, p_text, q_text, side, extents, p_num, q })
    }

    pub fn from_preset(cfg: &PresetConfig) -> Result<Self> {
        Self::new(RawConfig {
            preset: Some(cfg.name.into()),
            p: cfg.p as u64,
            d: cfg.d,
            n: cfg.n,
            p_text: cfg.p_text.clone(),
            q_text: cfg.q_text.clone(),
            side: cfg.side(),
            extents: cfg.extents.clone(),
        })
    }

    /// Reads `{p, d, n, P, Q, side?, box?}` or `{"preset": name, box?}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text)?;
        let side_override = file.side.as_deref().map(str::parse::<Side>).transpose()?;
        if let Some(name) = file.preset {
            let mut cfg = figure_preset(&name)?;
            if let Some(b) = file.extents {
                cfg.extents = expand_box(b, cfg.n);
            }
            let mut rc = Self::from_preset(&cfg)?;
            if let Some(side) = side_override {
                rc.side = side;
            }
            return Ok(rc);
        }
        let p = file.p.ok_or_else(|| Error::Invalid("config needs \"p\" or \"preset\"".into()))?;
        let q_text = file.q_text.ok_or_else(|| Error::Invalid("config needs \"Q\"".into()))?;
        let d = file.d.unwrap_or(1);
        let n = file.n.unwrap_or(2);
        let extents = file.extents.map_or_else(|| vec![PRESET_SIDE; n], |b| expand_box(b, n));
        let p_text = file.p_text.unwrap_or_else(|| default_numerator(d));
        Self::new(RawConfig { preset: None, p, d, n, p_text, q_text, side: side_override.unwrap_or_default(), extents })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn with_side(mut self, side: usize) -> Result<Self> {
        self.extents = vec![side; self.n];
        check_cells(&self.extents)?;
        Ok(self)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "p": self.p(),
            "d": self.d,
            "n": self.n,
            "P": self.p_text,
            "Q": self.q_text,
            "side": self.side.to_string(),
            "box": self.extents,
        });
        if let Some(name) = &self.preset {
            v["preset"] = json!(name);
        }
        v
    }

    pub fn expand(&self) -> Result<TilingBox> {
        expand_quotient(&self.p_num, &self.q, self.side, &self.extents)
    }

    pub fn synthesize(&self) -> Result<Synthesis> {
        synthesize(&self.p_num, &self.q, self.side)
    }

    fn recurrence(&self) -> Option<RecurrenceSpec> {
        self.preset.as_deref().and_then(|name| figure_preset(name).ok()?.recurrence())
    }
}

fn expand_box(b: BoxSpec, n: usize) -> Vec<usize> {
    match b {
        BoxSpec::Side(s) => vec![s; n],
        BoxSpec::Extents(e) => e,
    }
}

fn default_numerator(d: usize) -> String {
    if d == 1 {
        return "1".into();
    }
    let rows: Vec<String> = (0..d)
        .map(|i| format!("[{}]", (0..d).map(|j| if i == j { "1" } else { "0" }).collect::<Vec<_>>().join(",")))
        .collect();
    format!("[{}]", rows.join(","))
}

// ---------------------------------------------------------------------------
// Palette and PPM

pub type Rgb = [u8; 3];

pub const ZERO_RGB: Rgb = [255, 0, 0];

/// Entry `k` has hue `30° + 12.5°·((7k + 10) mod 24)`, saturation 0.9 for even
/// `k` and 0.6 for odd `k`, value 1. Hues near red are left out.
pub const HUE_TABLE: [Rgb; 24] = [
    [25, 255, 159],
    [108, 102, 255],
    [255, 140, 25],
    [108, 255, 102],
    [25, 159, 255],
    [236, 102, 255],
    [179, 255, 25],
    [102, 255, 223],
    [83, 25, 255],
    [255, 210, 102],
    [25, 255, 64],
    [102, 159, 255],
    [255, 25, 236],
    [172, 255, 102],
    [25, 255, 255],
    [172, 102, 255],
    [255, 236, 25],
    [102, 255, 159],
    [25, 64, 255],
    [255, 102, 210],
    [83, 255, 25],
    [102, 223, 255],
    [179, 25, 255],
    [236, 255, 102],
];

pub const BRIGHTNESS_LEVELS: u64 = 8;

/// Colors reached through the hue table.
pub const TABLE_COLORS: u64 = 24 * BRIGHTNESS_LEVELS;

fn table_rgb(idx: u64) -> Rgb {
    let base = HUE_TABLE[(idx % 24) as usize];
    let level = (idx / 24) as u32;
    base.map(|c| (c as u32 * (BRIGHTNESS_LEVELS as u32 - level) / BRIGHTNESS_LEVELS as u32) as u8)
}

fn pack(rgb: Rgb) -> u32 {
    (rgb[0] as u32) << 16 | (rgb[1] as u32) << 8 | rgb[2] as u32
}

fn reserved() -> &'static [u32] {
    static RESERVED: OnceLock<Vec<u32>> = OnceLock::new();
    RESERVED.get_or_init(|| {
        let mut v: Vec<u32> = (0..TABLE_COLORS).map(|i| pack(table_rgb(i))).collect();
        v.push(pack(ZERO_RGB));
        v.sort_unstable();
        v.dedup();
        v
    })
}

/// `k = Σ c_i p^i` over the coordinate vector (wrapping past 2^64).
pub fn color_code(color: &[u32], p: u32) -> u64 {
    color.iter().rev().fold(0u64, |acc, &c| acc.wrapping_mul(p as u64).wrapping_add(c as u64))
}

/// Zero ↦ red. A nonzero color with code `k` has index `k − 1`: indices below
/// 192 take hue `idx mod 24` at brightness `(8 − ⌊idx/24⌋)/8`; larger indices
/// enumerate, in increasing order, the 24-bit colors not used by the table or red.
pub fn palette_rgb(color: &[u32], p: u32) -> Rgb {
    let k = color_code(color, p);
    if color.iter().all(|&c| c == 0) {
        return ZERO_RGB;
    }
    let idx = k.wrapping_sub(1);
    if idx < TABLE_COLORS {
        return table_rgb(idx);
    }
    let mut v = ((idx - TABLE_COLORS) % (1 << 24)) as u32;
    for &r in reserved() {
        if r <= v {
            v += 1;
        }
    }
    let v = v & 0xFF_FFFF;
    [(v >> 16) as u8, (v >> 8) as u8, v as u8]
}

/// Binary PPM of a two-dimensional tiling: pixel `(x, y)` shows `T(x, y)`,
/// origin top left, `y` downward.
pub fn ppm_bytes(t: &TilingBox) -> Result<Vec<u8>> {
    if t.n() != 2 {
        return Err(Error::DimensionMismatch("only two-dimensional tilings render".into()));
    }
    let (w, h) = (t.extents()[0], t.extents()[1]);
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(3 * w * h);
    let p = t.field().p();
    for y in 0..h {
        for x in 0..w {
            out.extend_from_slice(&palette_rgb(t.cell(t.flat_index(&[x, y])), p));
        }
    }
    Ok(out)
}

pub fn render_ppm(t: &TilingBox, path: &Path) -> Result<()> {
    std::fs::write(path, ppm_bytes(t)?)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: Value) -> Self {
        Self { name: name.into(), ok, detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(command: &str, config: Value) -> Self {
        Self { command: command.into(), config, checks: Vec::new() }
    }

    fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Self-similar tilings from rational power series over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// JSON configuration file.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Named figure preset.
    #[arg(long)]
    pub preset: Option<String>,
    /// Box side overriding the configuration.
    #[arg(long = "box")]
    pub side: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expand P·Q⁻¹ on a box and optionally render it.
    Expand {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Write a PPM image.
        #[arg(long)]
        render: Option<PathBuf>,
    },
    /// Substitutions fixing the window tiling.
    #[command(subcommand)]
    Subst(SubstCommand),
    /// Substitutions for block tilings of M.
    #[command(subcommand)]
    Blocksub(BlocksubCommand),
    /// Oracle suite.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Figure presets.
    #[command(subcommand)]
    Preset(PresetCommand),
}

#[derive(Subcommand, Debug)]
pub enum SubstCommand {
    /// Build τ, Φ₁ and S and report their parameters.
    Build {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Check that T̄ is fixed by S and that M = τ ∘ T̄.
    Verify {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Write S as JSON.
    Dump {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read a JSON substitution; with a configuration, verify it on T̄.
    Load {
        file: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

#[derive(Subcommand, Debug)]
pub enum BlocksubCommand {
    /// Search (r, t) and verify the block substitution.
    Find {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 8)]
        s_max: u32,
        /// The block tiling is verified on a box of side p^(r+t) times this factor.
        #[arg(long, default_value_t = 64)]
        factor: usize,
        /// Write S′ as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum CheckCommand {
    /// Every oracle on one configuration, or on all presets.
    All {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 8)]
        s_max: u32,
        #[arg(long, default_value_t = 16)]
        factor: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum PresetCommand {
    /// List preset names and captions.
    List,
    /// Expand a preset, check it and optionally render it.
    Run {
        name: String,
        #[arg(long = "box")]
        side: Option<usize>,
        #[arg(long)]
        render: Option<PathBuf>,
    },
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let cfg = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::from_path(path)?,
            (None, Some(name)) => RunConfig::from_preset(&figure_preset(name)?)?,
            (None, None) => return Err(Error::Invalid("give --config or --preset".into())),
        };
        match self.side {
            Some(s) => cfg.with_side(s),
            None => Ok(cfg),
        }
    }
}

/// Runs the CLI on `args` (program name first), printing the report on
/// stdout, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let name = command_name(&cli.command);
    match dispatch(&cli.command) {
        Ok(report) => {
            print_report(&report);
            if report.ok() {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            let mut report = Report::new(&name, Value::Null);
            report.push(Check::new("input", false, json!(e.to_string())));
            print_report(&report);
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn print_report(report: &Report) {
    let mut out = std::io::stdout().lock();
    let _ = serde_json::to_writer_pretty(&mut out, report);
    let _ = writeln!(out);
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Expand { .. } => "expand",
        Command::Subst(SubstCommand::Build { .. }) => "subst build",
        Command::Subst(SubstCommand::Verify { .. }) => "subst verify",
        Command::Subst(SubstCommand::Dump { .. }) => "subst dump",
        Command::Subst(SubstCommand::Load { .. }) => "subst load",
        Command::Blocksub(_) => "blocksub find",
        Command::Check(_) => "check all",
        Command::Preset(PresetCommand::List) => "preset list",
        Command::Preset(PresetCommand::Run { .. }) => "preset run",
    }
    .into()
}

fn dispatch(command: &Command) -> Result<Report> {
    let name = command_name(command);
    match command {
        Command::Expand { cfg, render } => {
            let cfg = cfg.load()?;
            let mut report = Report::new(&name, cfg.to_json());
            expand_checks(&cfg, render.as_deref(), &mut report)?;
            Ok(report)
        }
        Command::Subst(sub) => subst(&name, sub),
        Command::Blocksub(BlocksubCommand::Find { cfg, s_max, factor, out }) => {
            let cfg = cfg.load()?;
            let mut report = Report::new(&name, cfg.to_json());
            let syn = cfg.synthesize()?;
            report.push(block_check(&cfg, &syn, *s_max, *factor, out.as_deref())?);
            Ok(report)
        }
        Command::Check(CheckCommand::All { cfg, s_max, factor }) => check_all(&name, cfg, *s_max, *factor),
        Command::Preset(PresetCommand::List) => {
            let presets: Vec<Value> = preset_names()
                .into_iter()
                .map(|n| {
                    let c = figure_preset(n).expect("listed");
                    json!({"name": c.name, "p": c.p, "d": c.d, "caption": c.caption})
                })
                .collect();
            let mut report = Report::new(&name, Value::Null);
            report.push(Check::new("presets", true, json!(presets)));
            Ok(report)
        }
        Command::Preset(PresetCommand::Run { name: preset, side, render }) => {
            let mut cfg = RunConfig::from_preset(&figure_preset(preset)?)?;
            if let Some(s) = side {
                cfg = cfg.with_side(*s)?;
            }
            let mut report = Report::new(&name, cfg.to_json());
            expand_checks(&cfg, render.as_deref(), &mut report)?;
            let syn = cfg.synthesize()?;
            report.push(invariance_check(&cfg, &syn)?);
            report.push(factorization_check(&cfg, &syn)?);
            Ok(report)
        }
    }
}

fn expand_checks(cfg: &RunConfig, render: Option<&Path>, report: &mut Report) -> Result<()> {
    let m = cfg.expand()?;
    report.push(Check::new("expand", true, json!({"box": m.extents(), "colors": count_colors(&m)})));
    if let Some(path) = render {
        render_ppm(&m, path)?;
        report.push(Check::new("render", true, json!(path.display().to_string())));
    }
    Ok(())
}

/// Largest box side not above the configured one that is divisible by `ell`.
fn divisible_extents(extents: &[usize], ell: usize) -> Vec<usize> {
    extents.iter().map(|&e| (e / ell).max(1) * ell).collect()
}

fn invariance_check(cfg: &RunConfig, syn: &Synthesis) -> Result<Check> {
    let ext = divisible_extents(&cfg.extents, cfg.p() as usize);
    let rep = verify_invariance(&syn.tbar_box(&ext)?, &syn.subst, 5)?;
    Ok(Check::new(
        "tbar_invariance",
        rep.ok,
        json!({"box": ext, "checked": rep.checked, "failures": rep.failures, "first_failure": rep.first_failure}),
    ))
}

fn factorization_check(cfg: &RunConfig, syn: &Synthesis) -> Result<Check> {
    let rep = verify_factorization(&syn.m_box(&cfg.extents)?, &syn.tbar_box(&cfg.extents)?, &syn.tau)?;
    Ok(Check::new(
        "tau_factorization",
        rep.ok,
        json!({"checked": rep.checked, "failures": rep.failures, "first_failure": rep.first_failure}),
    ))
}

fn block_check(cfg: &RunConfig, syn: &Synthesis, s_max: u32, factor: usize, out: Option<&Path>) -> Result<Check> {
    let bs = match find_block_substitution(&syn.tau, &syn.subst, s_max) {
        Ok(bs) => bs,
        Err(e @ Error::SearchExhausted { .. }) => {
            return Ok(Check::new("block_substitution", false, json!(e.to_string())));
        }
        Err(e) => return Err(e),
    };
    let p = cfg.p() as usize;
    let side = p.pow(bs.r + bs.t) * factor;
    let m = syn.m_box(&vec![side; cfg.n])?;
    let rep = verify_invariance(&block_tiling(&m, p.pow(bs.r))?, &bs.subst, 5)?;
    let bound = syn.d_window.pow(cfg.n as u32);
    if let Some(path) = out {
        std::fs::write(path, bs.subst.to_json())?;
    }
    Ok(Check::new(
        "block_substitution",
        rep.ok && bs.rho_rank <= bound,
        json!({
            "r": bs.r,
            "t": bs.t,
            "rank": bs.rho_rank,
            "rank_bound": bound,
            "kernel_dims": bs.kernel_dims,
            "box": side,
            "checked": rep.checked,
            "failures": rep.failures,
            "first_failure": rep.first_failure,
        }),
    ))
}

fn subst(name: &str, sub: &SubstCommand) -> Result<Report> {
    match sub {
        SubstCommand::Build { cfg } => {
            let cfg = cfg.load()?;
            let mut report = Report::new(name, cfg.to_json());
            let syn = cfg.synthesize()?;
            report.push(Check::new(
                "synthesis",
                true,
                json!({
                    "D": syn.d_window,
                    "D_nominal": syn.d_nominal,
                    "Q0": syn.q0.to_string(),
                    "h": syn.h.to_string(),
                    "color_dim": syn.subst.color_dim(),
                    "length": syn.subst.length(),
                    "rank": syn.subst.rank(),
                    "tau": syn.tau.matrix.to_string(),
                }),
            ));
            let sample: Vec<usize> = vec![64.min(cfg.extents[0]); cfg.n];
            if let Some(ok) = nominal_window_suffices(&syn, &sample)? {
                report.push(Check::new("nominal_window", true, json!({"suffices": ok, "box": sample})));
            }
            Ok(report)
        }
        SubstCommand::Verify { cfg } => {
            let cfg = cfg.load()?;
            let mut report = Report::new(name, cfg.to_json());
            let syn = cfg.synthesize()?;
            report.push(invariance_check(&cfg, &syn)?);
            report.push(factorization_check(&cfg, &syn)?);
            Ok(report)
        }
        SubstCommand::Dump { cfg, out } => {
            let cfg = cfg.load()?;
            let mut report = Report::new(name, cfg.to_json());
            let syn = cfg.synthesize()?;
            let text = syn.subst.to_json();
            std::fs::write(out, &text)?;
            report.push(Check::new("dump", true, json!({"path": out.display().to_string(), "bytes": text.len()})));
            Ok(report)
        }
        SubstCommand::Load { file, cfg } => {
            let text = std::fs::read_to_string(file)?;
            let s = LinearSubstitution::from_json(&text)?;
            let has_cfg = cfg.config.is_some() || cfg.preset.is_some();
            let loaded = if has_cfg { Some(cfg.load()?) } else { None };
            let mut report = Report::new(name, loaded.as_ref().map_or(Value::Null, RunConfig::to_json));
            report.push(Check::new(
                "load",
                true,
                json!({"p": s.field().p(), "n": s.n(), "t": s.t(), "color_dim": s.color_dim(), "rank": s.rank()}),
            ));
            report.push(Check::new("canonical", s.to_json() == text, Value::Null));
            if let Some(cfg) = loaded {
                let syn = cfg.synthesize()?;
                let ext = divisible_extents(&cfg.extents, s.length());
                let tb = syn.tbar_box(&ext)?;
                let check = if tb.color_dim() != s.color_dim() || s.field() != cfg.field {
                    Check::new("tbar_invariance", false, json!("substitution does not act on the window colors"))
                } else {
                    let rep = verify_invariance(&tb, &s, 5)?;
                    Check::new(
                        "tbar_invariance",
                        rep.ok,
                        json!({"box": ext, "failures": rep.failures, "first_failure": rep.first_failure}),
                    )
                };
                report.push(check);
            }
            Ok(report)
        }
    }
}

fn check_all(name: &str, args: &ConfigArgs, s_max: u32, factor: usize) -> Result<Report> {
    let single = args.config.is_some() || args.preset.is_some();
    let configs: Vec<RunConfig> = if single {
        vec![args.load()?]
    } else {
        let side = args.side.unwrap_or(256);
        preset_names()
            .into_iter()
            .map(|n| RunConfig::from_preset(&figure_preset(n)?)?.with_side(side))
            .collect::<Result<_>>()?
    };
    let mut report = Report::new(name, if single { configs[0].to_json() } else { json!("all presets") });
    if !single {
        report.push(lucas_check()?);
        report.push(razpet_suite()?);
    }
    for cfg in &configs {
        let label = cfg.preset.clone().unwrap_or_else(|| "config".into());
        let syn = cfg.synthesize()?;
        let mut checks = vec![
            invariance_check(cfg, &syn)?,
            factorization_check(cfg, &syn)?,
            block_check(cfg, &syn, s_max, factor, None)?,
            frobenius_check(cfg, &syn)?,
        ];
        if let Some(spec) = cfg.recurrence() {
            let ok = recurrence_tiling(&spec, &cfg.extents)?
                == expand_quotient(&spec.numerator(), &spec.denominator(), Side::Left, &cfg.extents)?;
            checks.push(Check::new("recurrence_series", ok, Value::Null));
        }
        let sample = vec![64.min(cfg.extents[0]); cfg.n];
        if let Some(ok) = nominal_window_suffices(&syn, &sample)? {
            checks.push(Check::new("nominal_window", true, json!({"suffices": ok})));
        }
        let chain = kernel_chain(&syn.tau, &syn.subst, 4)?;
        checks.push(Check::new("kernel_chain", true, json!(chain)));
        for c in checks {
            report.push(Check { name: format!("{label}/{}", c.name), ..c });
        }
    }
    Ok(report)
}

fn frobenius_check(cfg: &RunConfig, syn: &Synthesis) -> Result<Check> {
    let direct = scalar_reciprocal(&syn.q0, &cfg.extents)?;
    let frob = frobenius_reciprocal(&syn.q0, &cfg.extents)?;
    Ok(Check::new("frobenius_direct", direct == frob, Value::Null))
}

fn lucas_check() -> Result<Check> {
    let field = PrimeField::new(2)?;
    let q = parse_poly("1 - x1 - x2", field, 2, CoeffKind::Scalar)?;
    let one = Poly::one(field, 2, CoeffKind::Scalar);
    let ok = expand_quotient(&one, &q, Side::Right, &[256, 256])? == binomial_tiling(field, &[256, 256])?;
    Ok(Check::new("lucas", ok, json!({"box": [256, 256]})))
}

fn razpet_suite() -> Result<Check> {
    let mut failed = Vec::new();
    for p in [2u64, 3, 5] {
        let field = PrimeField::new(p)?;
        for a in 0..p as i64 {
            for c in 0..p as i64 {
                let spec = RecurrenceSpec::scalar(field, a, 1, c);
                let e = if p == 2 { 5 } else { 3 };
                if !razpet_check(&spec, e)?.ok {
                    failed.push(json!({"p": p, "a": a, "b": 1, "c": c}));
                }
            }
        }
    }
    Ok(Check::new("razpet", failed.is_empty(), json!({"failures": failed})))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palette_basics() {
        assert_eq!(palette_rgb(&[0, 0, 0, 0], 2), ZERO_RGB);
        assert_eq!(palette_rgb(&[0], 7), ZERO_RGB);
        assert_eq!(palette_rgb(&[1], 2), HUE_TABLE[0]);
        assert_eq!(color_code(&[1, 0, 1, 1], 2), 13);
    }

    #[test]
    fn palette_injective_on_first_colors() {
        let mut seen = std::collections::HashSet::new();
        seen.insert(ZERO_RGB);
        for k in 1..=70_000u32 {
            assert!(seen.insert(palette_rgb(&[k], 70_001)), "collision at {k}");
        }
    }

    #[test]
    fn config_examples() {
        let c = RunConfig::from_json(r#"{"p":2,"d":1,"n":2,"P":"1","Q":"1 + x1 + x2","box":[64,64]}"#).unwrap();
        assert_eq!(c.extents, vec![64, 64]);
        let c = RunConfig::from_json(r#"{"preset":"fig2-left"}"#).unwrap();
        assert_eq!(c.p(), 2);
        assert_eq!(c.extents, vec![1024, 1024]);
        assert!(matches!(RunConfig::from_json(r#"{"p":4,"Q":"1"}"#), Err(Error::NotPrime(4))));
        assert!(matches!(RunConfig::from_json(r#"{"p":2,"Q":"x1"}"#), Err(Error::NotAUnit)));
        assert!(matches!(RunConfig::from_json(r#"{"p":2,"Q":"1 +"}"#), Err(Error::Syntax { .. })));
        assert!(matches!(
            RunConfig::from_json(r#"{"p":2,"Q":"1","box":[100000,100000]}"#),
            Err(Error::BoxTooLarge { .. })
        ));
        let c = RunConfig::from_json(r#"{"p":3,"d":2,"Q":"[[1,0],[0,1]] - [[0,1],[1,0]]*x"}"#).unwrap();
        assert_eq!(c.p_text, "[[1,0],[0,1]]");
    }

    #[test]
    fn ppm_all_zero() {
        let t = TilingBox::zeros(PrimeField::new(3).unwrap(), crate::tiling::ColorKind::Matrix(2), vec![2, 2]).unwrap();
        let bytes = ppm_bytes(&t).unwrap();
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], [255, 0, 0].repeat(4).as_slice());
    }

    #[test]
    fn ppm_orientation() {
        let field = PrimeField::new(2).unwrap();
        let mut t = TilingBox::zeros(field, crate::tiling::ColorKind::Scalar, vec![3, 2]).unwrap();
        t.set(&[2, 0], &[1]);
        let bytes = ppm_bytes(&t).unwrap();
        let px = &bytes[b"P6\n3 2\n255\n".len()..];
        assert_eq!(&px[6..9], HUE_TABLE[0]);
        assert_eq!(px.len(), 18);
    }
}
