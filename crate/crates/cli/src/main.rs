//! `cutseq` — command-line front end for cutting-sequence recognition on
//! square-tiled surfaces.
//!
//! Every subcommand prints either line-oriented plain text (default) or a
//! single JSON object (`--format json`). Output is deterministic byte for
//! byte for fixed inputs. Exit codes: `0` for accept/consistent results,
//! `1` when a decision refutes the input (REJECT or SINGULAR), `2` for
//! usage errors and malformed files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cutseq_core::algebra::{parse_rational, QuadNum};
use cutseq_core::characterize::{
    combinatorial_lift, decide_parametric, decide_window, labels_determine_edges, LabeledSeq,
    Verdict,
};
use cutseq_core::gamma::{format_pair, GammaGraph, LR};
use cutseq_core::iet::IetSpec;
use cutseq_core::oracle::{trace, trace_segments, CornerConvention, GeoState, TraceOutcome};
use cutseq_core::surface::{Quadrant, Surface};
use cutseq_core::torusword::{slope_params, EWord};

#[derive(Parser)]
#[command(
    name = "cutseq",
    version,
    about = "Exact cutting-sequence tools for square-tiled surfaces",
    long_about = "Models square-tiled translation surfaces, traces geodesics with exact \
                  arithmetic, and decides whether symbolic sequences over (square, edge) \
                  labels are cutting sequences."
)]
struct Cli {
    /// Output format (plain is line-oriented, json is one object).
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a surface file: gluings, connectivity, good and bad squares.
    Surface {
        #[command(subcommand)]
        action: SurfaceAction,
    },
    /// Build the transition graph Γ^M of a surface.
    Gamma {
        /// Surface file.
        #[arg(long, value_name = "FILE")]
        surface: PathBuf,
        /// Number of vertical-edge crossings per step, 0 ≤ M < cycle modulus.
        #[arg(long = "M", value_name = "M")]
        m: usize,
    },
    /// Trace a geodesic and emit its cutting sequence.
    Trace {
        /// Surface file.
        #[arg(long, value_name = "FILE")]
        surface: PathBuf,
        /// Slope, e.g. `rat:211/500` or `quad:-1/2,1/2,5`.
        #[arg(long, value_name = "SLOPE")]
        slope: String,
        /// Start point `x,y` with rational coordinates (`x;y` admits full
        /// scalar literals).
        #[arg(long, value_name = "X,Y")]
        start: String,
        /// Start square label.
        #[arg(long, default_value_t = 1, value_name = "λ")]
        square: usize,
        /// Number of symbols to emit.
        #[arg(long, default_value_t = 32, value_name = "N")]
        n: usize,
        /// Corner records: H-then-V or V-then-H.
        #[arg(long, value_enum, default_value_t = CornerArg::Hv)]
        corner: CornerArg,
        /// Trace on a quadrant transform of the surface.
        #[arg(long, value_enum, default_value_t = QuadrantArg::Ne)]
        quadrant: QuadrantArg,
        /// Also emit exact per-square segment endpoints (up to N segments).
        #[arg(long)]
        emit_segments: bool,
    },
    /// Run the window decision procedure on a sequence file.
    Validate {
        /// Sequence file of whitespace-separated `<label><letter>` tokens.
        file: PathBuf,
        /// Surface file.
        #[arg(long, value_name = "FILE")]
        surface: PathBuf,
    },
    /// Lift an edge word to a labeled sequence by fixing the first square.
    Lift {
        /// Surface file.
        #[arg(long, value_name = "FILE")]
        surface: PathBuf,
        /// Edge word over {H,V}, e.g. `HVHHV`.
        #[arg(long, value_name = "WORD")]
        eps: String,
        /// Square containing the first crossing.
        #[arg(long, value_name = "λ")]
        lambda0: usize,
    },
    /// Derive an edge word: each maximal block of the non-isolated letter
    /// loses one occurrence.
    Derive {
        /// Edge word over {H,V}; `|` marks the ambient origin.
        word: String,
        /// Derive repeatedly until no further step is possible.
        #[arg(long, conflicts_with = "once")]
        full: bool,
        /// Derive exactly one step (the default).
        #[arg(long)]
        once: bool,
    },
    /// Classify the symmetry of an edge-word window.
    Symmetry {
        /// Edge word over {H,V}; `|` marks the ambient origin.
        word: String,
    },
    /// Dump the interval exchange conjugate to the skew product at a slope.
    Iet {
        /// Surface file.
        #[arg(long, value_name = "FILE")]
        surface: PathBuf,
        /// Slope, e.g. `quad:-1/2,1/2,5`.
        #[arg(long, value_name = "SLOPE")]
        slope: String,
        /// Check Keane's idoc condition up to this many iterations.
        #[arg(long, default_value_t = 12, value_name = "N")]
        idoc: usize,
        /// Report the cylinder of a walk word, e.g. `2L 6L` or `(2,L) (6,L)`.
        #[arg(long, value_name = "WORD")]
        cylinder: Option<String>,
    },
    /// Decide exactly whether the geodesic through a point meets a vertex.
    Decide {
        /// Surface file.
        #[arg(long, value_name = "FILE")]
        surface: PathBuf,
        /// Slope, e.g. `rat:211/500`.
        #[arg(long, value_name = "SLOPE")]
        slope: String,
        /// Start point `x,y` with rational coordinates (`x;y` admits full
        /// scalar literals).
        #[arg(long, value_name = "X,Y")]
        start: String,
        /// Square containing the start point.
        #[arg(long, value_name = "λ")]
        lambda0: usize,
    },
}

#[derive(Subcommand)]
enum SurfaceAction {
    /// Parse and check a surface file.
    Check {
        /// Surface file.
        file: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CornerArg {
    Hv,
    Vh,
}

impl From<CornerArg> for CornerConvention {
    fn from(c: CornerArg) -> CornerConvention {
        match c {
            CornerArg::Hv => CornerConvention::HV,
            CornerArg::Vh => CornerConvention::VH,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuadrantArg {
    Ne,
    Nw,
    Se,
    Sw,
}

impl From<QuadrantArg> for Quadrant {
    fn from(q: QuadrantArg) -> Quadrant {
        match q {
            QuadrantArg::Ne => Quadrant::NE,
            QuadrantArg::Nw => Quadrant::NW,
            QuadrantArg::Se => Quadrant::SE,
            QuadrantArg::Sw => Quadrant::SW,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    match cli.command {
        Command::Surface { action } => {
            let SurfaceAction::Check { file } = action;
            cmd_surface(format, &file)
        }
        Command::Gamma { surface, m } => cmd_gamma(format, &surface, m),
        Command::Trace {
            surface,
            slope,
            start,
            square,
            n,
            corner,
            quadrant,
            emit_segments,
        } => cmd_trace(
            format,
            &surface,
            &slope,
            &start,
            square,
            n,
            corner.into(),
            quadrant.into(),
            emit_segments,
        ),
        Command::Validate { file, surface } => cmd_validate(format, &file, &surface),
        Command::Lift { surface, eps, lambda0 } => cmd_lift(format, &surface, &eps, lambda0),
        Command::Derive { word, full, .. } => cmd_derive(format, &word, full),
        Command::Symmetry { word } => cmd_symmetry(format, &word),
        Command::Iet { surface, slope, idoc, cylinder } => {
            cmd_iet(format, &surface, &slope, idoc, cylinder.as_deref())
        }
        Command::Decide { surface, slope, start, lambda0 } => {
            cmd_decide(format, &surface, &slope, &start, lambda0)
        }
    }
}

fn load_surface(path: &Path) -> Result<Surface> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Surface::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// Scalar literal, with bare `p/q` accepted as shorthand for `rat:p/q`.
fn parse_scalar(text: &str) -> Result<QuadNum> {
    let text = text.trim();
    if text.starts_with("rat:") || text.starts_with("quad:") {
        return QuadNum::parse(text).map_err(|e| anyhow!("{e}"));
    }
    Ok(QuadNum::from_rational(
        parse_rational(text).map_err(|e| anyhow!("{e}"))?,
    ))
}

/// Start point grammar: `x,y` with rational coordinates, or `x;y` where each
/// coordinate may be any scalar literal (those contain commas themselves).
fn parse_start(text: &str) -> Result<(QuadNum, QuadNum)> {
    let (sx, sy) = match text.split_once(';') {
        Some(pair) => pair,
        None => text
            .split_once(',')
            .with_context(|| format!("start point `{text}` is not of the form x,y"))?,
    };
    Ok((parse_scalar(sx)?, parse_scalar(sy)?))
}

/// Walk-word grammar: whitespace-separated `2L` or `(2,L)` tokens.
fn parse_pair_word(text: &str) -> Result<Vec<(usize, LR)>> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let bare: String = token
            .chars()
            .filter(|c| !matches!(c, '(' | ')' | ','))
            .collect();
        let bad = || anyhow!("bad walk token `{token}`; expected e.g. `2L`");
        let Some(letter) = bare.chars().last().and_then(LR::from_char) else {
            return Err(bad());
        };
        let square: usize = bare[..bare.len() - 1].parse().map_err(|_| bad())?;
        if square == 0 {
            return Err(bad());
        }
        out.push((square, letter));
    }
    if out.is_empty() {
        bail!("empty walk word");
    }
    Ok(out)
}

fn emit(format: Format, plain: &str, value: Value) {
    match format {
        Format::Plain => println!("{plain}"),
        Format::Json => println!("{value}"),
    }
}

fn verdict_value(v: &Verdict) -> Value {
    json!({
        "kind": v.kind.to_string(),
        "reason": v.reason,
        "position": v.position,
    })
}

fn verdict_plain(v: &Verdict) -> String {
    let mut out = format!("kind: {}\nreason: {}", v.kind, v.reason);
    if let Some(p) = v.position {
        out.push_str(&format!("\nposition: {p}"));
    }
    out
}

fn verdict_exit(v: &Verdict) -> ExitCode {
    if v.is_refuted() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_surface(format: Format, file: &Path) -> Result<ExitCode> {
    let s = load_surface(file)?;
    let (good, bad) = s.classify_squares();
    let determined = labels_determine_edges(&s);
    let list = |set: &std::collections::BTreeSet<usize>| -> String {
        if set.is_empty() {
            "none".to_string()
        } else {
            set.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    let plain = format!(
        "d: {}\nh: {}\nv: {}\ncycle modulus: {}\ngood squares: {}\nbad squares: {}\nlabels determine edges: {}",
        s.degree(),
        s.h(),
        s.v(),
        s.cycle_modulus(),
        list(&good),
        list(&bad),
        determined,
    );
    let value = json!({
        "d": s.degree(),
        "h": s.h().to_string(),
        "v": s.v().to_string(),
        "cycle_modulus": s.cycle_modulus(),
        "good_squares": good,
        "bad_squares": bad,
        "labels_determine_edges": determined,
    });
    emit(format, &plain, value);
    Ok(ExitCode::SUCCESS)
}

fn cmd_gamma(format: Format, surface: &Path, m: usize) -> Result<ExitCode> {
    let s = load_surface(surface)?;
    let g = GammaGraph::build(&s, m).map_err(|e| anyhow!("{e}"))?;
    let bad: Vec<String> = g.bad_edges().iter().map(|&sym| format_pair(sym)).collect();
    let plain = format!(
        "{}strongly connected: {}\nbad edges: {}",
        g.render(),
        g.is_strongly_connected(),
        if bad.is_empty() { "none".to_string() } else { bad.join(" ") },
    );
    let value = json!({
        "m": g.m(),
        "degree": g.degree(),
        "strongly_connected": g.is_strongly_connected(),
        "edges": g.edges().iter().map(|e| json!({
            "from": e.from,
            "letter": e.letter.to_string(),
            "to": e.to,
            "bad": e.bad,
        })).collect::<Vec<_>>(),
        "bad_edges": bad,
    });
    emit(format, &plain, value);
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace(
    format: Format,
    surface: &Path,
    slope: &str,
    start: &str,
    square: usize,
    n: usize,
    corner: CornerConvention,
    quadrant: Quadrant,
    emit_segments: bool,
) -> Result<ExitCode> {
    let s = load_surface(surface)?.quadrant_transform(quadrant);
    let m = parse_scalar(slope)?;
    let (x, y) = parse_start(start)?;
    let result = trace(&s, &m, GeoState::new(square, x.clone(), y.clone()), n, corner)
        .map_err(|e| anyhow!("{e}"))?;
    let tokens = result
        .symbols
        .iter()
        .map(|sym| sym.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let outcome = match result.outcome {
        TraceOutcome::RanToLength => "ran to length".to_string(),
        TraceOutcome::SingularityHit => match result.hit_square {
            Some(sq) => format!("singularity hit at square {sq}"),
            None => "singularity hit".to_string(),
        },
    };
    let mut plain = String::new();
    if !tokens.is_empty() {
        plain.push_str(&tokens);
        plain.push('\n');
    }
    plain.push_str(&format!("outcome: {outcome}"));
    let mut value = json!({
        "symbols": tokens,
        "outcome": match result.outcome {
            TraceOutcome::RanToLength => "ran_to_length",
            TraceOutcome::SingularityHit => "singularity_hit",
        },
        "hit_square": result.hit_square,
    });
    if emit_segments {
        let (segments, _) = trace_segments(&s, &m, GeoState::new(square, x, y), n)
            .map_err(|e| anyhow!("{e}"))?;
        for seg in &segments {
            plain.push_str(&format!(
                "\nsegment {} from {} {} to {} {}",
                seg.square, seg.from.0, seg.from.1, seg.to.0, seg.to.1
            ));
        }
        value["segments"] = segments
            .iter()
            .map(|seg| {
                json!({
                    "square": seg.square,
                    "from": [seg.from.0.to_string(), seg.from.1.to_string()],
                    "to": [seg.to.0.to_string(), seg.to.1.to_string()],
                })
            })
            .collect();
    }
    emit(format, &plain, value);
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(format: Format, file: &Path, surface: &Path) -> Result<ExitCode> {
    let s = load_surface(surface)?;
    let text =
        fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let seq = LabeledSeq::parse(&text).map_err(|e| anyhow!("{}: {e}", file.display()))?;
    let verdict = decide_window(&seq, &s);
    emit(format, &verdict_plain(&verdict), verdict_value(&verdict));
    Ok(verdict_exit(&verdict))
}

fn cmd_lift(format: Format, surface: &Path, eps: &str, lambda0: usize) -> Result<ExitCode> {
    let s = load_surface(surface)?;
    let word = EWord::parse(eps).map_err(|e| anyhow!("{e}"))?;
    let seq = combinatorial_lift(&word, lambda0, &s).map_err(|e| anyhow!("{e}"))?;
    let rendered = seq.render();
    emit(format, &rendered, json!({ "sequence": rendered }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_derive(format: Format, word: &str, full: bool) -> Result<ExitCode> {
    let mut current = EWord::parse(word).map_err(|e| anyhow!("{e}"))?;
    let mut stages: Vec<String> = Vec::new();
    loop {
        match current.derive_once() {
            Ok(next) => {
                stages.push(next.render());
                current = next;
            }
            Err(e) if stages.is_empty() => return Err(anyhow!("{e}")),
            Err(_) => break,
        }
        if !full {
            break;
        }
    }
    emit(format, &stages.join("\n"), json!({ "stages": stages }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_symmetry(format: Format, word: &str) -> Result<ExitCode> {
    let w = EWord::parse(word).map_err(|e| anyhow!("{e}"))?;
    let verdict = w.classify_symmetry();
    let mut plain = format!("kind: {}", verdict.kind);
    if let Some(c) = verdict.center {
        plain.push_str(&format!("\ncenter: {c}"));
    }
    plain.push_str(&format!("\nverified pairs: {}", verdict.verified_pairs));
    let value = json!({
        "kind": verdict.kind.to_string(),
        "center": verdict.center,
        "verified_pairs": verdict.verified_pairs,
    });
    emit(format, &plain, value);
    Ok(ExitCode::SUCCESS)
}

fn cmd_iet(
    format: Format,
    surface: &Path,
    slope: &str,
    idoc: usize,
    cylinder: Option<&str>,
) -> Result<ExitCode> {
    let s = load_surface(surface)?;
    let m = parse_scalar(slope)?;
    let params = slope_params(&m, s.cycle_modulus()).map_err(|e| anyhow!("{e}"))?;
    let iet = IetSpec::conjugate_of(&s, &params).map_err(|e| anyhow!("{e}"))?;
    let k = iet.k();
    let alphabet: Vec<String> = (0..k).map(|a| iet.name(a).to_string()).collect();
    let pi0: Vec<usize> = (0..k).map(|a| iet.pi0(a)).collect();
    let pi1: Vec<usize> = (0..k).map(|a| iet.pi1(a)).collect();
    let lengths: Vec<String> = (0..k).map(|a| iet.length(a).to_string()).collect();
    let idoc_report = iet.check_idoc(idoc);
    let idoc_line = match &idoc_report {
        Ok(()) => format!("idoc: no collision within {idoc} iterations"),
        Err(v) => format!(
            "idoc: violated — orbit of {} lands on {} after {} iterations",
            iet.name(v.a),
            iet.name(v.b),
            v.n
        ),
    };
    let mut plain = format!(
        "alphabet: {}\npi0: {}\npi1: {}\nlengths: {}\ntotal: {}\nirreducible: {}\n{}",
        alphabet.join(" "),
        pi0.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "),
        pi1.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" "),
        lengths.join(" "),
        iet.total(),
        iet.is_irreducible(),
        idoc_line,
    );
    let mut value = json!({
        "alphabet": alphabet,
        "pi0": pi0,
        "pi1": pi1,
        "lengths": lengths,
        "total": iet.total().to_string(),
        "irreducible": iet.is_irreducible(),
        "idoc": match &idoc_report {
            Ok(()) => json!({ "ok": true, "iterations": idoc }),
            Err(v) => json!({ "ok": false, "n": v.n, "a": iet.name(v.a), "b": iet.name(v.b) }),
        },
    });
    if let Some(word_text) = cylinder {
        let word = parse_pair_word(word_text)?;
        let letters: Vec<usize> = word
            .iter()
            .map(|&(sq, side)| {
                if sq > s.degree() {
                    bail!("square {sq} does not exist on a {}-square surface", s.degree());
                }
                Ok(IetSpec::conjugate_index(sq, side == LR::R))
            })
            .collect::<Result<_>>()?;
        let rendered: Vec<String> = word.iter().map(|&sym| format_pair(sym)).collect();
        match iet.cylinder(&letters).map_err(|e| anyhow!("{e}"))? {
            Some((lo, hi)) => {
                let length = hi.try_sub(&lo).map_err(|e| anyhow!("{e}"))?;
                plain.push_str(&format!(
                    "\ncylinder {}: [{}, {}) length {}",
                    rendered.join(" "),
                    lo,
                    hi,
                    length
                ));
                value["cylinder"] = json!({
                    "word": rendered,
                    "lo": lo.to_string(),
                    "hi": hi.to_string(),
                    "length": length.to_string(),
                });
            }
            None => {
                plain.push_str(&format!("\ncylinder {}: empty", rendered.join(" ")));
                value["cylinder"] = json!({ "word": rendered, "empty": true });
            }
        }
    }
    emit(format, &plain, value);
    Ok(ExitCode::SUCCESS)
}

fn cmd_decide(
    format: Format,
    surface: &Path,
    slope: &str,
    start: &str,
    lambda0: usize,
) -> Result<ExitCode> {
    let s = load_surface(surface)?;
    let m = parse_scalar(slope)?;
    let (x, y) = parse_start(start)?;
    let outcome = decide_parametric(&s, &m, &x, &y, lambda0).map_err(|e| anyhow!("{e}"))?;
    let mut plain = verdict_plain(&outcome.verdict);
    let mut value = verdict_value(&outcome.verdict);
    if let Some(corner) = &outcome.corner {
        plain.push_str(&format!(
            "\ncorner: square {}, {}, after {} crossings",
            corner.square, corner.side, corner.crossings
        ));
        value["corner"] = json!({
            "square": corner.square,
            "side": corner.side.to_string(),
            "crossings": corner.crossings,
        });
    }
    emit(format, &plain, value);
    Ok(verdict_exit(&outcome.verdict))
}
