use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qtop_core::borel::{eval_set, hk_decompose, level_of, SetExpr};
use qtop_core::domains::{
    completion_is_isomorphic, family_member, fxomega_poset, ideal_completion, omega_ideal_model_check, phi_map,
    scott_space, way_below_matrix, IdealRep,
};
use qtop_core::games::{
    describe_status, label_transcript, play, player_one_by_name, player_two_chain, player_two_finite, Arena,
    PlayerTwo, Transcript, Verdict, VerdictStatus,
};
use qtop_core::io::{
    load_metric, load_poset, load_presentation, load_space, parse, read_json, ArenaFile, FCheckFile, FunctionFile,
    LoadedArena, MetricFile, PairsFile, SpaceFile, TournamentFile,
};
use qtop_core::quasimetric::{ball_topology, pi2_subspace_qm, qm_axioms_check, sigma2_tree_qm};
use qtop_core::representations::{
    admissible_translate, f_conditions_check, phi_point, FTables, NbhdSurjection, PrefixTable,
};
use qtop_core::suite::{exit_code, run_suite, Status, SuiteConfig};
use qtop_core::{FiniteSpace, PointSet, QtopError};

const EXIT_USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "qtop", version, about = "Finite-scale checks for quasi-metrics, T0 topologies, Borel levels and games")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Finite topological spaces.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Set expressions and Borel levels.
    #[command(subcommand)]
    Borel(BorelCmd),
    /// Quasi-metrics.
    #[command(subcommand)]
    Qm(QmCmd),
    /// The neighbourhood game.
    #[command(subcommand)]
    Game(GameCmd),
    /// Posets, ideals and the F×ω construction.
    #[command(subcommand)]
    Domain(DomainCmd),
    /// Prefix-scale representations.
    #[command(subcommand)]
    Repr(ReprCmd),
    /// Load the bundled fixtures and run every acceptance check.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Separation, sobriety and Cantor-Bendixson report.
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum BorelCmd {
    /// Level bound and truth table of an S-expression.
    Classify { space: PathBuf, expr: String },
    /// Shortest difference-hierarchy decomposition of a subset.
    Hk {
        space: PathBuf,
        /// Comma-separated point indices.
        #[arg(long, value_delimiter = ',')]
        set: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum QmCmd {
    /// Brute-force axiom check.
    Check { file: PathBuf },
    /// Derived quasi-metrics.
    #[command(subcommand)]
    Derive(DeriveCmd),
}

#[derive(Subcommand)]
enum DeriveCmd {
    /// `d′` on the intersection of the `U ∪ A`.
    Pi2 { metric: PathBuf, pairs: PathBuf },
    /// The tree quasi-metric `ρ` on the union of the `U ∖ V`.
    Sigma2 { metric: PathBuf, pairs: PathBuf },
}

#[derive(Subcommand)]
enum GameCmd {
    /// Play one game and print the transcript and verdict.
    Play {
        arena: PathBuf,
        #[arg(long, default_value = "walker")]
        p1: String,
        #[arg(long, default_value = "qm")]
        p2: String,
        #[arg(long, default_value_t = 20)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Play every pairing in a config and print a verdict table.
    Tournament { config: PathBuf },
}

#[derive(Subcommand)]
enum DomainCmd {
    /// Way-below, Scott topology and ideal completion of a poset.
    Poset { file: PathBuf },
    /// Truncated F×ω poset and φ samples for a presentation.
    Embed {
        presentation: PathBuf,
        #[arg(long, env = "QTOP_DEPTH_DEFAULT")]
        depth: Option<usize>,
        /// Points of X to sample, as comma-separated element lists; default:
        /// the first few finite points found.
        #[arg(long)]
        point: Vec<String>,
    },
}

#[derive(Subcommand)]
enum ReprCmd {
    /// Build g from f and check f = δ∘g on every prefix.
    Translate {
        table: PathBuf,
        #[arg(long, env = "QTOP_DEPTH_DEFAULT")]
        depth: Option<usize>,
    },
    /// Evaluate the family conditions relationally and as formulas.
    Fcheck { tables: PathBuf },
}

#[derive(Args)]
struct VerifyArgs {
    /// Directory of fixture files to load instead of the bundled ones.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    #[arg(long, default_value_t = SuiteConfig::default().seed)]
    seed: u64,
    /// Override every game horizon.
    #[arg(long)]
    horizon: Option<usize>,
    /// Include per-check timings (output is then not byte-stable).
    #[arg(long)]
    timing: bool,
}

struct Outcome {
    json: Value,
    text: String,
    code: u8,
}

fn outcome<T: Serialize>(v: &T, text: String, code: u8) -> Outcome {
    Outcome { json: serde_json::to_value(v).expect("serializable report"), text, code }
}

fn mark(b: bool) -> &'static str {
    if b {
        "✓"
    } else {
        "✗"
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli.command) {
        Ok(o) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&o.json).expect("json")),
                Format::Text => print!("{}", o.text),
            }
            ExitCode::from(o.code)
        }
        Err(e) => {
            let code = match e {
                QtopError::Parse(_) | QtopError::Io(_) | QtopError::NotAClosedFamily { .. } => EXIT_USAGE,
                _ => 1,
            };
            eprintln!("error: {e}");
            ExitCode::from(code)
        }
    }
}

fn run(cmd: &Command) -> Result<Outcome, QtopError> {
    match cmd {
        Command::Space(SpaceCmd::Check { file }) => space_check(&load_space(file)?),
        Command::Borel(BorelCmd::Classify { space, expr }) => borel_classify(&load_space(space)?, expr),
        Command::Borel(BorelCmd::Hk { space, set, max_len }) => borel_hk(&load_space(space)?, set, *max_len),
        Command::Qm(QmCmd::Check { file }) => qm_check(file),
        Command::Qm(QmCmd::Derive(d)) => qm_derive(d),
        Command::Game(GameCmd::Play { arena, p1, p2, rounds, seed }) => {
            game_play(&read_json::<ArenaFile>(arena)?, p1, p2, *rounds, *seed)
        }
        Command::Game(GameCmd::Tournament { config }) => tournament(&read_json(config)?),
        Command::Domain(DomainCmd::Poset { file }) => domain_poset(file),
        Command::Domain(DomainCmd::Embed { presentation, depth, point }) => domain_embed(presentation, *depth, point),
        Command::Repr(ReprCmd::Translate { table, depth }) => repr_translate(table, *depth),
        Command::Repr(ReprCmd::Fcheck { tables }) => repr_fcheck(&read_json(tables)?),
        Command::Verify(args) => verify(args),
    }
}

#[derive(Serialize)]
struct SpaceReport {
    points: Vec<String>,
    opens: usize,
    t0: bool,
    t1: bool,
    td: bool,
    sober: bool,
    scattered: bool,
    cb_rank: usize,
    perfect_kernel: Vec<usize>,
    maximal: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    indistinguishable: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sobriety_witness: Option<Vec<usize>>,
}

fn space_check(s: &FiniteSpace) -> Result<Outcome, QtopError> {
    let t0 = s.is_t0();
    let sober_witness = if t0 { s.sobriety_violation() } else { None };
    let r = SpaceReport {
        points: s.labels().to_vec(),
        opens: s.opens().len(),
        t0,
        t1: s.is_t1(),
        td: s.is_td(),
        sober: t0 && sober_witness.is_none(),
        scattered: s.is_scattered(),
        cb_rank: s.cb_rank(),
        perfect_kernel: s.perfect_kernel().to_vec(),
        maximal: s.max_elements().to_vec(),
        indistinguishable: s.t0_violation(),
        sobriety_witness: sober_witness.map(PointSet::to_vec),
    };
    let mut text = format!("{} points, {} opens\n", r.points.len(), r.opens);
    for (name, b) in [("T0", r.t0), ("T1", r.t1), ("TD", r.td), ("sober", r.sober), ("scattered", r.scattered)] {
        let _ = writeln!(text, "{name:<10} {}", mark(b));
    }
    let _ = writeln!(text, "CB rank    {}", r.cb_rank);
    if let Some((a, b)) = r.indistinguishable {
        let _ = writeln!(text, "points {a} and {b} have the same neighbourhoods");
    }
    if let Some(w) = &r.sobriety_witness {
        let _ = writeln!(text, "irreducible closed set without a unique generic point: {w:?}");
    }
    Ok(outcome(&r, text, 0))
}

fn read_expr(arg: &str) -> Result<SetExpr, QtopError> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| QtopError::Io(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    text.trim().parse()
}

fn borel_classify(s: &FiniteSpace, expr: &str) -> Result<Outcome, QtopError> {
    let e = read_expr(expr)?;
    let level = level_of(&e).to_string();
    let set = eval_set(&e, s)?;
    let table: Vec<(String, bool)> = s.labels().iter().enumerate().map(|(i, l)| (l.clone(), set.contains(i))).collect();
    let mut text = format!("{e}\nlevel bound: {level}\n");
    for (l, b) in &table {
        let _ = writeln!(text, "  {l:<12} {}", u8::from(*b));
    }
    let j = json!({ "expr": e.to_string(), "level": level, "set": set.to_vec(), "truth_table": table });
    Ok(Outcome { json: j, text, code: 0 })
}

fn borel_hk(s: &FiniteSpace, set: &[usize], max_len: usize) -> Result<Outcome, QtopError> {
    if let Some(&p) = set.iter().find(|&&p| p >= s.len()) {
        return Err(QtopError::BadPoint(p));
    }
    let target: PointSet = set.iter().copied().collect();
    match hk_decompose(s, target, max_len) {
        Some((alpha, seq)) => {
            let sets: Vec<Vec<usize>> = seq.iter().map(|a| a.to_vec()).collect();
            let text = format!("α = {alpha}: {sets:?}\n");
            Ok(Outcome { json: json!({ "alpha": alpha, "sets": sets }), text, code: 0 })
        }
        None => Err(QtopError::NoWitness(max_len)),
    }
}

fn qm_check(file: &Path) -> Result<Outcome, QtopError> {
    let d = load_metric(file)?;
    let r = qm_axioms_check(&d);
    let mut text = format!("{} points, {} triples: ", r.points, r.triples);
    if r.passed() {
        text.push_str("quasi-metric ✓\n");
    } else {
        let _ = writeln!(text, "{} violations", r.violations.len());
        for v in r.violations.iter().take(10) {
            let _ = writeln!(text, "  {v}");
        }
    }
    let code = if r.passed() { 0 } else { 1 };
    Ok(outcome(&r, text, code))
}

fn qm_derive(cmd: &DeriveCmd) -> Result<Outcome, QtopError> {
    let (metric, pairs) = match cmd {
        DeriveCmd::Pi2 { metric, pairs } | DeriveCmd::Sigma2 { metric, pairs } => (metric, pairs),
    };
    let d = load_metric(metric)?;
    let pairs = read_json::<PairsFile>(pairs)?.to_sets();
    let (points, derived, blocks) = match cmd {
        DeriveCmd::Pi2 { .. } => {
            let s = pi2_subspace_qm(&d, &pairs)?;
            (s.points, s.metric, None)
        }
        DeriveCmd::Sigma2 { .. } => {
            let t = sigma2_tree_qm(&d, &pairs)?;
            let blocks: Vec<(String, Vec<usize>)> = t
                .blocks
                .iter()
                .map(|(k, v)| (k.iter().map(|b| char::from(b'0' + b)).collect(), v.to_vec()))
                .collect();
            (t.points, t.rho, Some(blocks))
        }
    };
    let axioms = qm_axioms_check(&derived);
    let y: PointSet = points.iter().copied().collect();
    let same = ball_topology(&derived).same_topology(&ball_topology(&d).subspace(y));
    let mut text = format!("carrier points {points:?}\n");
    if let Some(b) = &blocks {
        for (k, v) in b {
            let _ = writeln!(text, "  A<{k}> = {v:?}");
        }
    }
    let _ = writeln!(text, "quasi-metric {}  subspace topology {}", mark(axioms.passed()), mark(same));
    let j = json!({
        "points": points,
        "metric": MetricFile::from_metric(&derived),
        "blocks": blocks,
        "axioms": axioms,
        "subspace_topology": same,
    });
    let code = if axioms.passed() { 0 } else { 1 };
    Ok(Outcome { json: j, text, code })
}

fn game_code(v: &Verdict) -> u8 {
    match v.status {
        VerdictStatus::WonByRefinement { .. } => 0,
        VerdictStatus::Undecided => 2,
        VerdictStatus::MalformedRun { .. } => 1,
    }
}

struct GameRun {
    verdict: Verdict,
    status: String,
    transcript: Value,
}

fn run_game<A: Arena>(arena: &A, p1: &str, p2: &dyn PlayerTwo<A>, rounds: usize, seed: u64) -> Result<GameRun, QtopError> {
    let mut one = player_one_by_name::<A>(p1, seed)?;
    let (t, v): (Transcript<A::Open>, Verdict) = play(arena, one.as_mut(), p2, rounds);
    Ok(GameRun {
        status: describe_status(arena, &v),
        transcript: serde_json::to_value(label_transcript(arena, &t)).expect("json"),
        verdict: v,
    })
}

fn game_on(a: &LoadedArena, p1: &str, p2: &str, rounds: usize, seed: u64) -> Result<GameRun, QtopError> {
    match a {
        LoadedArena::Chain(c) => run_game(c, p1, player_two_chain(p2)?.as_ref(), rounds, seed),
        LoadedArena::Finite(s) => run_game(s, p1, player_two_finite(p2, s)?.as_ref(), rounds, seed),
    }
}

fn game_play(arena: &ArenaFile, p1: &str, p2: &str, rounds: usize, seed: u64) -> Result<Outcome, QtopError> {
    let loaded = arena.load()?;
    let g = game_on(&loaded, p1, p2, rounds, seed)?;
    let mut text = String::new();
    if let Some(rs) = g.transcript.as_array() {
        for (i, r) in rs.iter().enumerate() {
            let radius = r.get("radius").and_then(Value::as_str).map(|s| format!("  ε={s}")).unwrap_or_default();
            let _ = writeln!(text, "{i:>3}  x={}  U={}  V={}{radius}", r["x"].as_str().unwrap_or(""), r["u"].as_str().unwrap_or(""), r["v"].as_str().unwrap_or(""));
        }
    }
    let _ = writeln!(text, "{}", g.status);
    let j = json!({
        "p1": p1, "p2": p2, "rounds": rounds, "seed": seed,
        "transcript": g.transcript, "verdict": g.verdict, "status": g.status,
    });
    Ok(Outcome { json: j, text, code: game_code(&g.verdict) })
}

#[derive(Serialize)]
struct TournamentRow {
    p1: String,
    p2: String,
    seed: u64,
    verdict: Verdict,
    status: String,
}

fn tournament(cfg: &TournamentFile) -> Result<Outcome, QtopError> {
    let loaded = cfg.arena.load()?;
    let mut rows = Vec::new();
    for p2 in &cfg.p2 {
        for p1 in &cfg.p1 {
            for &seed in &cfg.seeds {
                let g = game_on(&loaded, p1, p2, cfg.rounds, seed)?;
                rows.push(TournamentRow { p1: p1.clone(), p2: p2.clone(), seed, verdict: g.verdict, status: g.status });
            }
        }
    }
    let code = rows.iter().map(|r| game_code(&r.verdict)).fold(0, |acc, c| match (acc, c) {
        (1, _) | (_, 1) => 1,
        (2, _) | (_, 2) => 2,
        _ => 0,
    });
    let mut text = String::new();
    for r in &rows {
        let _ = writeln!(text, "{:<12} {:<10} seed {:<4} {}", r.p2, r.p1, r.seed, r.status);
    }
    Ok(outcome(&rows, text, code))
}

fn domain_poset(file: &Path) -> Result<Outcome, QtopError> {
    let p = load_poset(file)?;
    let wb = way_below_matrix(&p);
    let scott = scott_space(&p);
    let completion = ideal_completion(&p)?;
    let iso = completion_is_isomorphic(&p, &completion);
    let model = omega_ideal_model_check(&p);
    let text = format!(
        "{} elements\nway-below = order {}\nScott opens {}\nideals {} (isomorphic {})\ncompact or maximal {}\n",
        p.len(),
        mark(wb == p.le),
        scott.opens().len(),
        completion.ideals.len(),
        mark(iso),
        mark(model.holds)
    );
    let j = json!({
        "elements": p.elements,
        "way_below": wb,
        "way_below_is_order": wb == p.le,
        "scott_opens": scott.opens().iter().map(|o| o.to_vec()).collect::<Vec<_>>(),
        "ideals": completion.ideals.iter().map(|o| o.to_vec()).collect::<Vec<_>>(),
        "isomorphic": iso,
        "model": model,
    });
    Ok(Outcome { json: j, text, code: 0 })
}

fn parse_point(s: &str) -> Result<u64, QtopError> {
    s.split(',').filter(|t| !t.trim().is_empty()).try_fold(0u64, |m, t| {
        let i: u32 = t.trim().parse().map_err(|_| QtopError::Parse(format!("bad element {t:?}")))?;
        if i >= 63 {
            return Err(QtopError::Parse(format!("element {i} out of range")));
        }
        Ok(m | 1 << i)
    })
}

fn domain_embed(path: &Path, depth: Option<usize>, points: &[String]) -> Result<Outcome, QtopError> {
    let pres = load_presentation(path)?;
    let depth = depth.unwrap_or(3);
    let (elems, poset) = fxomega_poset(&pres, 4096)?;
    let xs: Vec<u64> = if points.is_empty() {
        let found: BTreeSet<u64> = (0..1u64 << pres.depth).filter_map(|f| family_member(f, &pres).witness).collect();
        found.into_iter().take(3).collect()
    } else {
        points.iter().map(|s| parse_point(s)).collect::<Result<_, _>>()?
    };
    let mut samples = Vec::new();
    let mut text = format!("truncated F×ω: {} elements at presentation depth {}\n", elems.len(), pres.depth);
    let mut code = 0;
    for &x in &xs {
        let r = phi_map(x, &pres, depth, 200)?;
        let chain = match &r.ideal {
            IdealRep::ChainGenerated(c, _) => c.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            IdealRep::Principal(e) => vec![e.to_string()],
        };
        if !(r.directed && r.lower_set) {
            code = 1;
        }
        let _ = writeln!(
            text,
            "φ({:?}): {} elements, lower set {}, directed {} ({} witnesses), chain {}",
            PointSet(x),
            r.elements.len(),
            mark(r.lower_set),
            mark(r.directed),
            r.witnesses.len(),
            chain.join(" ⊑ ")
        );
        samples.push(json!({
            "x": PointSet(x).to_vec(),
            "elements": r.elements.len(),
            "lower_set": r.lower_set,
            "directed": r.directed,
            "witnesses": r.witnesses.iter().take(5).map(|w| [w.a.to_string(), w.b.to_string(), w.upper.to_string()]).collect::<Vec<_>>(),
            "chain": chain,
        }));
    }
    let order: Vec<(usize, usize)> =
        (0..poset.len()).flat_map(|a| (0..poset.len()).map(move |b| (a, b))).filter(|&(a, b)| a != b && poset.leq(a, b)).collect();
    let j = json!({
        "depth": depth,
        "elements": poset.elements,
        "order": order,
        "phi": samples,
    });
    Ok(Outcome { json: j, text, code })
}

fn repr_translate(path: &Path, depth: Option<usize>) -> Result<Outcome, QtopError> {
    let file: FunctionFile = read_json(path)?;
    let (f, r) = file.load(depth)?;
    let rep = admissible_translate(&f, &r)?;
    let mut text = format!(
        "{} prefixes over {{0..{}}} to depth {}, g read to length {}\nf = δ∘g {}  sound {}\n",
        rep.prefixes_tested,
        rep.alphabet.saturating_sub(1),
        rep.depth,
        rep.g_length,
        mark(rep.mismatches.is_empty()),
        mark(rep.sound)
    );
    for m in rep.mismatches.iter().take(5) {
        let _ = writeln!(text, "  at {:?}: f = {:?}, δ∘g = {:?}", m.prefix, m.f_value, m.delta_g);
    }
    let code = if rep.holds() { 0 } else { 1 };
    Ok(outcome(&rep, text, code))
}

fn repr_fcheck(file: &FCheckFile) -> Result<Outcome, QtopError> {
    let (tables, images) = match (&file.tables, &file.space) {
        (Some(t), _) => (t.clone(), None),
        (None, Some(s)) => {
            let space = s.to_space()?;
            let n = space.len() as u64;
            let f = NbhdSurjection::new(space)?;
            let (t, images) = FTables::from_surjection(&f, &PrefixTable::new(n, file.depth.unwrap_or(2)));
            (t, Some(images))
        }
        (None, None) => return Err(QtopError::Parse("fcheck needs \"tables\" or \"space\"".into())),
    };
    let family = match (&file.family, file.point, &images) {
        (Some(f), _, _) => f.clone(),
        (None, Some(y), Some(images)) => phi_point(images, y),
        _ => return Err(QtopError::Parse("fcheck needs \"family\", or \"point\" with \"space\"".into())),
    };
    let r = f_conditions_check(&family, &tables)?;
    let mut text = format!("{} indices, depth {}\n", tables.len(), r.depth);
    for (a, b) in r.relational.iter().zip(&r.formulas) {
        let w = a.witness.as_ref().map(|w| format!("  witness {w:?}")).unwrap_or_default();
        let _ = writeln!(text, "{:<28} {} formula {}{w}", a.name, mark(a.pass), mark(b.pass));
    }
    let _ = writeln!(text, "formulations agree {}", mark(r.agree));
    let code = if r.all_pass() && r.agree { 0 } else { 1 };
    Ok(outcome(&r, text, code))
}

/// Bundled fixtures, checked by `verify`.
const FIXTURES: &[(&str, &str)] = &[
    ("sierpinski.json", include_str!("../../../fixtures/sierpinski.json")),
    ("powerset2.json", include_str!("../../../fixtures/powerset2.json")),
    ("omega1_scott.json", include_str!("../../../fixtures/omega1_scott.json")),
    ("d1_omega.json", include_str!("../../../fixtures/d1_omega.json")),
    ("diamond.json", include_str!("../../../fixtures/diamond.json")),
    ("presentation.json", include_str!("../../../fixtures/presentation.json")),
    ("delta.json", include_str!("../../../fixtures/delta.json")),
    ("fcheck.json", include_str!("../../../fixtures/fcheck.json")),
    ("tournament.json", include_str!("../../../fixtures/tournament.json")),
    ("pairs.json", include_str!("../../../fixtures/pairs.json")),
];

/// Parse and validate a fixture by the shape of its top-level keys.
fn check_fixture(name: &str, text: &str) -> Result<(), QtopError> {
    let v: Value = parse(text, name)?;
    let has = |k: &str| v.get(k).is_some();
    let ctx = |e: QtopError| QtopError::Parse(format!("{name}: {e}"));
    if has("arena") && has("p1") {
        parse::<TournamentFile>(text, name)?.arena.load().map_err(ctx)?;
    } else if has("arena") {
        parse::<ArenaFile>(text, name)?.load().map_err(ctx)?;
    } else if has("opens") {
        parse::<SpaceFile>(text, name)?.to_space().map_err(ctx)?;
    } else if has("table") {
        parse::<MetricFile>(text, name)?.to_metric().map_err(ctx)?;
    } else if has("elements") {
        let p: qtop_core::domains::FinPoset = parse(text, name)?;
        qtop_core::domains::FinPoset::new(p.elements, p.le).map_err(ctx)?;
    } else if has("pairs") && has("depth") {
        parse::<qtop_core::domains::Pi02Presentation>(text, name)?.validate().map_err(ctx)?;
    } else if has("pairs") {
        parse::<PairsFile>(text, name)?;
    } else if has("alphabet") {
        parse::<FunctionFile>(text, name)?.load(None).map_err(ctx)?;
    } else if has("family") || has("point") {
        let f: FCheckFile = parse(text, name)?;
        if let Some(s) = &f.space {
            s.to_space().map_err(ctx)?;
        }
    } else {
        return Err(QtopError::Parse(format!("{name}: unrecognised fixture")));
    }
    Ok(())
}

fn verify(args: &VerifyArgs) -> Result<Outcome, QtopError> {
    let loaded: Vec<(String, String)> = match &args.fixtures {
        None => FIXTURES.iter().map(|(n, t)| (n.to_string(), t.to_string())).collect(),
        Some(dir) => {
            let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
                .map_err(|e| QtopError::Io(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            files.sort();
            files
                .into_iter()
                .map(|p| {
                    let text = std::fs::read_to_string(&p).map_err(|e| QtopError::Io(format!("{}: {e}", p.display())))?;
                    Ok((p.display().to_string(), text))
                })
                .collect::<Result<_, QtopError>>()?
        }
    };
    for (name, text) in &loaded {
        check_fixture(name, text)?;
    }
    let cfg = SuiteConfig { seed: args.seed, horizon: args.horizon, timing: args.timing };
    let results = run_suite(&cfg);
    let mut text = format!("{} fixtures loaded\n", loaded.len());
    for r in &results {
        let tag = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::UndecidedAtDepth => "undecided",
        };
        let ms = r.millis.map(|m| format!(" ({m} ms)")).unwrap_or_default();
        let _ = writeln!(text, "{:>2} {:<22} {tag:<9} {}{ms}", r.id, r.name, r.witness);
    }
    let code = exit_code(&results) as u8;
    Ok(outcome(&results, text, code))
}
