mod out;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tempcoal::game::expand;
use tempcoal::normal_forms::{gnf, gnf_over, simplify};
use tempcoal::parser::print;
use tempcoal::preference::{
    eliminate, fuzz_axiom, validate_in_place, validate_objectives, AxiomKind, EliminationStyle, FuzzOptions,
};
use tempcoal::semantics::{qualifiers, EvalContext, EvalOptions};
use tempcoal::solution::{Solver, Verdict};
use tempcoal::sptc::{enables, enforces, profile_context, wellformed, Sptc, SptcSpace, DEFAULT_CAP};
use tempcoal::{parse, Cgm, Error, ExpandedCgm, Formula, ObjectiveSystem};

use out::Out;

#[derive(Parser)]
#[command(name = "tempcoal", version, about = "Temporal preference and temporary coalitions on game models")]
struct Cli {
    /// Print line-delimited key=value records.
    #[arg(long, global = true)]
    records: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Play bounds default to stem 6 / loop 4, or 3 / 2 for the subcommands
/// that work on the latest-decision expansion, whose play universe grows
/// much faster.
#[derive(Args, Clone)]
struct Bounds {
    #[arg(long, value_parser = positive)]
    stem_bound: Option<usize>,
    #[arg(long, value_parser = positive)]
    loop_bound: Option<usize>,
    /// States of history visible to `<<G>>` strategies.
    #[arg(long, default_value_t = 1, value_parser = positive)]
    memory: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Bounds {
    fn options(&self) -> EvalOptions {
        self.options_or(6, 4)
    }

    fn expanded(&self) -> EvalOptions {
        self.options_or(3, 2)
    }

    fn options_or(&self, stem: usize, lp: usize) -> EvalOptions {
        EvalOptions {
            stem_bound: self.stem_bound.unwrap_or(stem),
            loop_bound: self.loop_bound.unwrap_or(lp),
            memory: self.memory,
            seed: self.seed,
            ..EvalOptions::default()
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Literal,
    Pairwise,
}

#[derive(Clone, Copy, ValueEnum)]
enum Judgment {
    Enforces,
    Enables,
    Wellformed,
}

#[derive(Subcommand)]
enum Cmd {
    /// Echo the normalized formula.
    Parse {
        #[arg(long)]
        formula: String,
        /// Model whose players bound the player indices.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Print the guard/derivative table of a future formula.
    Gnf {
        #[arg(long)]
        formula: String,
        /// Comma-separated guard vocabulary; defaults to the free atoms.
        #[arg(long)]
        ap: Option<String>,
    },
    /// Evaluate a formula at the initial state.
    Mc {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        prefs: Option<PathBuf>,
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Print a preference-free equivalent.
    Eliminate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        prefs: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value_t = Style::Literal)]
        style: Style,
        /// Fold constants in the result.
        #[arg(long)]
        simplify: bool,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Check that objectives are disjoint and exhaustive on the bounded plays.
    ValidatePrefs {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        prefs: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Judge a profile file: enforcement, enabling or well-formedness.
    Sptc {
        #[arg(value_enum)]
        judgment: Judgment,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long)]
        player: Option<u32>,
        /// Longest history checked for well-formedness.
        #[arg(long, default_value_t = 3, value_parser = positive)]
        depth: usize,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Check core membership of a profile for a target objective.
    Core {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        prefs: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        /// The target objective.
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
        cap: usize,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Dominance: search for a dominant profile, or judge `--profile`
    /// (for `--player`, or against `--profile2`).
    Dominant {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        prefs: PathBuf,
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, requires = "profile")]
        profile2: Option<PathBuf>,
        #[arg(long, requires = "profile", conflicts_with = "profile2")]
        player: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
        cap: usize,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Fuzz an axiom for counterexamples.
    Axioms {
        #[arg(long)]
        axiom: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Longest history checked per trial.
        #[arg(long, default_value_t = 3, value_parser = positive)]
        depth: usize,
        /// Play bounds inside each trial.
        #[arg(long, default_value_t = 3, value_parser = positive)]
        stem_bound: usize,
        #[arg(long, default_value_t = 2, value_parser = positive)]
        loop_bound: usize,
    },
}

enum Fail {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

type Run = Result<bool, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn file_name(path: &Path) -> String {
    path.display().to_string()
}

fn load_model(path: &Path) -> Result<Cgm, Fail> {
    Ok(Cgm::parse(&read(path)?, &file_name(path))?)
}

fn load_prefs(path: &Path, agents: u32) -> Result<ObjectiveSystem, Fail> {
    Ok(ObjectiveSystem::parse(&read(path)?, agents, &file_name(path))?)
}

fn load_profile(path: &Path, ex: &ExpandedCgm) -> Result<Sptc, Fail> {
    Ok(Sptc::parse(&read(path)?, ex, &file_name(path))?)
}

/// Validates `sys` against the plays of `ctx` and attaches it.
fn attach(ctx: EvalContext, mut sys: ObjectiveSystem) -> Result<EvalContext, Fail> {
    let report = validate_in_place(ctx.model(), &mut sys, ctx.universe())?;
    if !report.ok() {
        return Err(Fail::Usage("objectives are not disjoint and exhaustive (see validate-prefs)".into()));
    }
    Ok(ctx.with_objectives(sys))
}

fn cmd_parse(out: &Out, formula: &str, model: Option<&Path>) -> Run {
    let agents = match model {
        Some(p) => load_model(p)?.agents(),
        None => u32::MAX,
    };
    let f = parse(formula, agents)?;
    out.kv("formula", print(&f.normalize()));
    Ok(true)
}

fn cmd_gnf(out: &Out, formula: &str, ap: Option<&str>) -> Run {
    let f = parse(formula, u32::MAX)?;
    let form = match ap {
        Some(list) => {
            let ap: BTreeSet<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            gnf_over(&f, &ap)?
        }
        None => gnf(&f)?,
    };
    out.kv("formula", print(&f));
    for (g, d) in &form.entries {
        if out.records {
            out.kv("guard", print(&g.to_formula()));
            out.kv("derivative", print(d));
        } else {
            println!("{}  =>  {}", print(&g.to_formula()), print(&Formula::next(d.clone())));
        }
    }
    Ok(true)
}

fn cmd_mc(out: &Out, model: &Path, prefs: Option<&Path>, formula: &str, b: &Bounds) -> Run {
    let m = load_model(model)?;
    let f = parse(formula, m.agents())?;
    let opts = b.options();
    let mut ctx = EvalContext::for_formula(&m, &f, opts.clone())?;
    if let Some(p) = prefs {
        ctx = attach(ctx, load_prefs(p, m.agents())?)?;
    }
    let v = ctx.eval(&f)?;
    out.kv("formula", print(&f));
    out.kv("verdict", v);
    out.bounds(&opts);
    out.qualifiers(&qualifiers(&f, &opts));
    Ok(v)
}

fn cmd_eliminate(out: &Out, model: &Path, prefs: &Path, formula: &str, style: Style, fold: bool, b: &Bounds) -> Run {
    let m = load_model(model)?;
    let f = parse(formula, m.agents())?;
    let opts = b.options();
    let ctx = attach(EvalContext::new(m.clone(), opts.clone()), load_prefs(prefs, m.agents())?)?;
    let style = match style {
        Style::Literal => EliminationStyle::Literal,
        Style::Pairwise => EliminationStyle::Pairwise,
    };
    let mut g = eliminate(&f, ctx.objectives().expect("attached"), style)?;
    if fold {
        g = simplify(&g);
    }
    out.kv("formula", print(&f));
    out.kv("eliminated", print(&g));
    out.bounds(&opts);
    Ok(true)
}

fn cmd_validate(out: &Out, model: &Path, prefs: &Path, b: &Bounds) -> Run {
    let m = load_model(model)?;
    let sys = load_prefs(prefs, m.agents())?;
    let opts = b.options();
    let ctx = EvalContext::new(m.clone(), opts.clone());
    let report = validate_objectives(&m, &sys, ctx.universe())?;
    for (what, list) in [("overlap", &report.overlaps), ("gap", &report.gaps)] {
        for v in list.iter().take(5) {
            let names: Vec<&str> = v.classes.iter().map(|&c| sys.players()[v.player as usize - 1].names[c].as_str()).collect();
            out.note(format!("{what}: player {} play {} classes [{}]", v.player, v.play.display(&m), names.join(", ")));
        }
    }
    out.kv("disjoint", report.disjoint());
    out.kv("exhaustive", report.exhaustive());
    out.kv("plays_checked", report.plays_checked);
    out.kv("verdict", report.ok());
    out.bounds(&opts);
    Ok(report.ok())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sptc(
    out: &Out,
    judgment: Judgment,
    model: &Path,
    profile: &Path,
    formula: Option<&str>,
    player: Option<u32>,
    depth: usize,
    b: &Bounds,
) -> Run {
    let m = load_model(model)?;
    let ex = expand(&m)?;
    let s = load_profile(profile, &ex)?;
    let opts = b.expanded();
    let ctx = profile_context(&ex, &[(&s, "s")], opts.clone(), None)?;
    let goal = |name: &str| -> Result<Formula, Fail> {
        let text = formula.ok_or_else(|| Fail::Usage(format!("`{name}` needs --formula")))?;
        Ok(parse(text, m.agents())?)
    };
    let v = match judgment {
        Judgment::Enforces => {
            let f = goal("enforces")?;
            out.kv("formula", print(&f));
            enforces(&ctx, "s", &f)?
        }
        Judgment::Enables => {
            let f = goal("enables")?;
            let i = player.ok_or_else(|| Fail::Usage("`enables` needs --player".into()))?;
            out.kv("formula", print(&f));
            out.kv("player", i);
            enables(&ctx, "s", i, &f)?
        }
        Judgment::Wellformed => {
            out.kv("depth", depth);
            wellformed(&ctx, "s", depth)?
        }
    };
    out.kv("verdict", v);
    out.bounds(&opts);
    Ok(v)
}

fn verdict_lines(out: &Out, v: &Verdict, ex: &ExpandedCgm, sys: &ObjectiveSystem, opts: &EvalOptions) {
    out.kv("verdict", v.holds);
    out.kv("vacuous", v.vacuous);
    out.kv("sampled", v.sampled);
    out.kv("profiles_checked", v.checked);
    out.kv("failure", v.failure.as_ref().map_or(String::new(), |f| f.describe(ex, sys)));
    out.bounds(opts);
    out.kv("qualifiers", v.qualifiers.join("; "));
    out.note(format!("summary: {v}"));
}

fn cmd_core(out: &Out, model: &Path, prefs: &Path, profile: &Path, formula: &str, cap: usize, b: &Bounds) -> Run {
    let m = load_model(model)?;
    let sys = load_prefs(prefs, m.agents())?;
    let ex = expand(&m)?;
    let r = load_profile(profile, &ex)?;
    let theta = parse(formula, m.agents())?;
    let opts = b.expanded();
    let solver = Solver::new(&ex, sys.clone(), opts.clone(), SptcSpace::new(&ex, cap, b.seed), &[&r])?;
    let v = solver.core_check(&r, &theta)?;
    out.kv("target", print(&theta));
    verdict_lines(out, &v, &ex, &sys, &opts);
    Ok(v.holds)
}

#[allow(clippy::too_many_arguments)]
fn cmd_dominant(
    out: &Out,
    model: &Path,
    prefs: &Path,
    profile: Option<&Path>,
    profile2: Option<&Path>,
    player: Option<u32>,
    cap: usize,
    b: &Bounds,
) -> Run {
    let m = load_model(model)?;
    let sys = load_prefs(prefs, m.agents())?;
    let ex = expand(&m)?;
    let r = profile.map(|p| load_profile(p, &ex)).transpose()?;
    let s = profile2.map(|p| load_profile(p, &ex)).transpose()?;
    let extra: Vec<&Sptc> = r.iter().chain(s.iter()).collect();
    let opts = b.expanded();
    let solver = Solver::new(&ex, sys.clone(), opts.clone(), SptcSpace::new(&ex, cap, b.seed), &extra)?;
    let (mode, v) = match (&r, &s, player) {
        (None, _, _) => ("exists", solver.exists_dominant()?),
        (Some(r), Some(s), _) => ("pair", solver.dominance_d(s, r)?),
        (Some(r), None, Some(i)) => ("player", solver.dominant_for_player(r, i)?),
        (Some(r), None, None) => ("all", solver.dominant(r)?),
    };
    out.kv("mode", mode);
    if let Some(i) = player {
        out.kv("player", i);
    }
    verdict_lines(out, &v, &ex, &sys, &opts);
    if let Some((index, w)) = &v.witness {
        out.kv("witness_index", index);
        out.kv("witness", w.to_text(&ex));
    }
    Ok(v.holds)
}

fn cmd_axioms(out: &Out, axiom: &str, trials: usize, seed: u64, depth: usize, stem: usize, lp: usize) -> Run {
    let kind: AxiomKind = axiom.parse()?;
    let opts = FuzzOptions { trials, seed, max_history: depth, stem_bound: stem, loop_bound: lp, ..FuzzOptions::default() };
    let report = fuzz_axiom(kind, &opts)?;
    out.kv("axiom", kind.name());
    out.kv("trials", report.trials_run);
    out.kv("skipped", report.skipped);
    out.kv("seed", seed);
    out.kv("stem_bound", stem);
    out.kv("loop_bound", lp);
    out.kv("max_history", depth);
    match &report.countermodel {
        None => {
            out.kv("verdict", "no-counterexample");
            Ok(true)
        }
        Some(c) => {
            out.kv("verdict", "counterexample");
            out.kv("trial", c.trial);
            out.kv("history", c.history_names().join(" "));
            out.kv("formula", print(&c.formula));
            out.kv("dump", c.dump());
            Ok(false)
        }
    }
}

fn run(cli: Cli) -> Run {
    let out = Out { records: cli.records };
    match cli.cmd {
        Cmd::Parse { formula, model } => cmd_parse(&out, &formula, model.as_deref()),
        Cmd::Gnf { formula, ap } => cmd_gnf(&out, &formula, ap.as_deref()),
        Cmd::Mc { model, prefs, formula, bounds } => cmd_mc(&out, &model, prefs.as_deref(), &formula, &bounds),
        Cmd::Eliminate { model, prefs, formula, style, simplify, bounds } => {
            cmd_eliminate(&out, &model, &prefs, &formula, style, simplify, &bounds)
        }
        Cmd::ValidatePrefs { model, prefs, bounds } => cmd_validate(&out, &model, &prefs, &bounds),
        Cmd::Sptc { judgment, model, profile, formula, player, depth, bounds } => {
            cmd_sptc(&out, judgment, &model, &profile, formula.as_deref(), player, depth, &bounds)
        }
        Cmd::Core { model, prefs, profile, formula, cap, bounds } => {
            cmd_core(&out, &model, &prefs, &profile, &formula, cap, &bounds)
        }
        Cmd::Dominant { model, prefs, profile, profile2, player, cap, bounds } => {
            cmd_dominant(&out, &model, &prefs, profile.as_deref(), profile2.as_deref(), player, cap, &bounds)
        }
        Cmd::Axioms { axiom, trials, seed, depth, stem_bound, loop_bound } => {
            cmd_axioms(&out, &axiom, trials, seed, depth, stem_bound, loop_bound)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
