//! Command-line front end.
//!
//! Every command prints a human-readable body followed by a `key=value`
//! machine block, except `katsura` and `desing`, which print a system file.
//! Exit codes: 0 when the command ran (Unknown verdicts included), 2 for
//! parse and validation errors, 3 for failed preconditions.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};

use crate::desing::{countable_property_bridge, desingularize_all_sources, desingularize_source, DesingError};
use crate::format::{fingerprint, parse_matrices, parse_system, write_system, LoadError};
use crate::groupoid::{germ_equal, isolated_fixed_point, unique_fixed_point, Germ, GroupoidError};
use crate::invariants::{katsura_homology, katsura_ktheory, phi_maps, FgAbelianGroup, InvariantError};
use crate::katsura::{build_katsura, KatsuraData};
use crate::props::{simplicity_report, PropertyReport};
use crate::semigroup::{eval_expression, sge_adjoint, Sge, SgeDisplay};
use crate::sfp::{minimal_strongly_fixed, verify_report, SfpVerdict};
use crate::system::System;
use crate::verdict::{SearchBudget, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "selfsim", version, about = "Self-similar graph systems: properties, germs and invariants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// State limit for semidecision searches.
    #[arg(long, global = true, default_value_t = SearchBudget::default().max_states)]
    pub budget_states: usize,
    /// Depth limit for semidecision searches.
    #[arg(long, global = true, default_value_t = SearchBudget::default().max_depth)]
    pub budget_depth: usize,
    /// Characteristic of the coefficient field for algebraic simplicity (0 or a prime).
    #[arg(long, global = true)]
    pub field_char: Option<u64>,
    /// Treat the groupoid as amenable
    #[arg(long, global = true)]
    pub assume_amenable: bool,
    /// Treat the action as faithful
    #[arg(long, global = true)]
    pub assume_faithful: bool,
    /// Replay certificates after computing them.
    #[arg(long, global = true)]
    pub verify: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a system file.
    Validate { file: String },
    /// Hausdorff, minimality, effectiveness and simplicity verdicts.
    Props { file: String },
    /// Minimal strongly fixed paths of a group element.
    Sfp { file: String, element: String },
    /// Katsura K-theory of a matrix pair.
    Ktheory { file: String },
    /// Katsura groupoid homology of a matrix pair.
    Homology { file: String },
    /// The Φ₀ matrix and H₀ of a system.
    Phi { file: String },
    /// Build the Katsura system of a matrix pair and print it as a system file.
    Katsura { file: String },
    /// Attach tails at sources and print the materialized system.
    Desing {
        file: String,
        /// The source to desingularize; all sources when omitted.
        vertex: Option<String>,
        #[arg(long, default_value_t = 3)]
        level: usize,
        /// Print the property report of the desingularized system instead.
        #[arg(long)]
        report: bool,
    },
    /// Evaluate a product of semigroup elements such as `(0, b, 1) * (1, e, 1)^*`.
    Sge { file: String, expression: String },
    /// Inspect a germ `[alpha; g; beta] @ prefix(cycle)^inf`.
    Germ {
        file: String,
        germ: String,
        /// Compare with another germ instead of the unit at the same point.
        #[arg(long)]
        equal: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure(i32, String);

impl Failure {
    fn parse(msg: impl std::fmt::Display) -> Self {
        Failure(EXIT_PARSE, format!("error: {msg}"))
    }

    fn precondition(msg: impl std::fmt::Display) -> Self {
        Failure(EXIT_PRECONDITION, format!("precondition failed: {msg}"))
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        Failure::parse(e)
    }
}

impl From<DesingError> for Failure {
    fn from(e: DesingError) -> Self {
        match e {
            DesingError::Invalid(_) => Failure::parse(e),
            _ => Failure::precondition(e),
        }
    }
}

impl From<InvariantError> for Failure {
    fn from(e: InvariantError) -> Self {
        Failure::precondition(e)
    }
}

impl From<GroupoidError> for Failure {
    fn from(e: GroupoidError) -> Self {
        match e {
            GroupoidError::Syntax(_) | GroupoidError::WrongShape => Failure::parse(e),
            _ => Failure::precondition(e),
        }
    }
}

/// Human-readable lines followed by a machine block.
struct Report {
    body: String,
    machine: Vec<(String, String)>,
}

impl Report {
    fn new(echo: &str) -> Self {
        Report { body: format!("command: {echo}\n"), machine: Vec::new() }
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.body.push_str(text.as_ref());
        self.body.push('\n');
    }

    fn key(&mut self, k: &str, v: impl ToString) {
        // Values stay on one line.
        self.machine.push((k.to_string(), v.to_string().replace('\n', " ")));
    }

    fn system(&mut self, sys: &System) {
        self.line(format!("system: {}", sys.name()));
        self.line(format!("fingerprint: {}", fingerprint(sys)));
        self.key("system", sys.name());
        self.key("fingerprint", fingerprint(sys));
    }

    fn verdict(&mut self, key: &str, label: &str, v: &Verdict) {
        self.line(format!("{label}: {v}"));
        self.key(key, v.word());
    }

    fn group(&mut self, key: &str, label: &str, g: &FgAbelianGroup) {
        self.line(format!("{label}: {g}"));
        let (rank, torsion) = g.machine();
        self.key(&format!("{key}_rank"), rank);
        self.key(&format!("{key}_torsion"), torsion);
    }

    fn finish(mut self, budget: Option<SearchBudget>) -> String {
        if let Some(b) = budget {
            self.line(format!("budget: max_states={} max_depth={}", b.max_states, b.max_depth));
            self.key("budget_states", b.max_states);
            self.key("budget_depth", b.max_depth);
        }
        let mut out = self.body;
        out.push_str("--\n");
        for (k, v) in &self.machine {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }
}

/// Runs the command line `args` (program name first) and returns its output.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_PARSE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let echo = std::iter::once("selfsim".to_string()).chain(args.iter().skip(1).cloned()).collect::<Vec<_>>().join(" ");
    match execute(&cli, &echo) {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(Failure(code, msg)) => Outcome { code, stdout: String::new(), stderr: msg + "\n" },
    }
}

fn read(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::parse(format!("{path}: {e}")))
}

fn load(path: &str, opts: &Options) -> Result<System, Failure> {
    let text = read(path)?;
    let mut sys = parse_system(&text).map_err(|e| Failure::parse(format!("{path}: {e}")))?;
    sys.assertions.amenable |= opts.assume_amenable;
    sys.assertions.faithful |= opts.assume_faithful;
    Ok(sys)
}

fn load_matrices(path: &str) -> Result<KatsuraData, Failure> {
    let text = read(path)?;
    parse_matrices(&text).map(KatsuraData::from).map_err(|e| Failure::parse(format!("{path}: {e}")))
}

fn execute(cli: &Cli, echo: &str) -> Result<String, Failure> {
    let opts = &cli.opts;
    let budget = SearchBudget::new(opts.budget_states, opts.budget_depth);
    if let Some(p) = opts.field_char {
        if p != 0 && !is_prime(p) {
            return Err(Failure::parse(format!("--field-char must be 0 or a prime, got {p}")));
        }
    }
    let mut r = Report::new(echo);
    match &cli.command {
        Command::Validate { file } => {
            let sys = load(file, opts)?;
            r.system(&sys);
            let g = sys.graph();
            let grp = sys.group();
            r.line(format!("vertices: {}", g.vertex_count()));
            r.line(format!("edges: {}", g.edge_count()));
            r.line(format!("backend: {} ({})", grp.kind(), grp.generator_names().join(" ")));
            let hyp = if sys.uses_weak_hypothesis() { "weak" } else { "strong" };
            r.line(format!("hypothesis: {hyp}"));
            r.line("status: valid");
            r.key("status", "valid");
            r.key("vertices", g.vertex_count());
            r.key("edges", g.edge_count());
            r.key("backend", grp.kind());
            r.key("generators", grp.generator_count());
            r.key("hypothesis", hyp);
            Ok(r.finish(None))
        }
        Command::Props { file } => {
            let sys = load(file, opts)?;
            r.system(&sys);
            let report = simplicity_report(&sys, sys.assertions.amenable, opts.field_char, budget);
            write_props(&mut r, &sys, &report);
            if opts.verify {
                verify_witness(&mut r, &sys, report.hausdorff_witness.as_ref(), budget)?;
            }
            Ok(r.finish(Some(budget)))
        }
        Command::Sfp { file, element } => {
            let sys = load(file, opts)?;
            let g = sys.parse_elem(element).map_err(Failure::parse)?;
            r.system(&sys);
            let rep = minimal_strongly_fixed(&sys, &g, budget);
            r.line(format!("element: {}", sys.show(&g)));
            let (word, detail) = match &rep.verdict {
                SfpVerdict::Finite => ("finite", String::new()),
                SfpVerdict::Infinite { witness } => ("infinite", witness.clone()),
                SfpVerdict::Unknown { reason } => ("unknown", reason.clone()),
            };
            if detail.is_empty() {
                r.line(format!("verdict: {word}"));
            } else {
                r.line(format!("verdict: {word} ({detail})"));
            }
            r.line(format!("listed to depth {}:", rep.listing_depth));
            let shown: Vec<String> = rep.paths.iter().map(|p| sys.show_path(p)).collect();
            for p in &shown {
                r.line(format!("  {p}"));
            }
            r.line(format!("states explored: {}", rep.states_explored));
            r.key("element", sys.show(&g));
            r.key("verdict", word);
            r.key("listing_depth", rep.listing_depth);
            r.key("paths", shown.join(","));
            r.key("states", rep.states_explored);
            if opts.verify {
                verify_report(&sys, &rep, budget).map_err(|e| Failure::precondition(format!("certificate replay: {e}")))?;
                r.line("verify: ok");
                r.key("verify", "ok");
            }
            Ok(r.finish(Some(budget)))
        }
        Command::Ktheory { file } => {
            let data = load_matrices(file)?;
            let k = katsura_ktheory(&data)?;
            r.line(format!("N: {}", data.n()));
            r.group("k0", "K0", &k.k0);
            r.group("k1", "K1", &k.k1);
            Ok(r.finish(None))
        }
        Command::Homology { file } => {
            let data = load_matrices(file)?;
            let h = katsura_homology(&data)?;
            r.line(format!("N: {}", data.n()));
            let removed: Vec<String> = h.removed_rows.iter().map(|i| (i + 1).to_string()).collect();
            r.line(format!("zero rows removed: {}", if removed.is_empty() { "none".into() } else { removed.join(" ") }));
            r.group("h0", "H0", &h.h0);
            r.group("h1", "H1", &h.h1);
            r.group("h2", "H2", &h.h2);
            r.line("Hn: 0 for n >= 3");
            r.group("k0", "K0", &h.k0);
            r.group("k1", "K1", &h.k1);
            r.key("removed_rows", removed.join(","));
            Ok(r.finish(None))
        }
        Command::Phi { file } => {
            let sys = load(file, opts)?;
            r.system(&sys);
            let p = phi_maps(&sys, None)?;
            let reps: Vec<&str> = p.representatives.iter().map(|&v| sys.graph().vertex_name(v)).collect();
            r.line(format!("orbit representatives: {}", reps.join(" ")));
            r.line("Phi0:");
            for line in p.phi0.to_string().lines() {
                r.line(format!("  {line}"));
            }
            r.group("h0", "H0", &p.h0);
            r.key("representatives", reps.join(","));
            Ok(r.finish(None))
        }
        Command::Katsura { file } => {
            let data = load_matrices(file)?;
            let sys = build_katsura(&data).map_err(Failure::precondition)?;
            Ok(write_system(&sys))
        }
        Command::Desing { file, vertex, level, report } => {
            let sys = load(file, opts)?;
            let t = match vertex {
                Some(name) => {
                    let v = sys.graph().vertex_id(name).ok_or_else(|| Failure::parse(format!("unknown vertex `{name}`")))?;
                    desingularize_source(&sys, v)?
                }
                None => desingularize_all_sources(&sys)?,
            };
            if !*report {
                return Ok(write_system(&t.materialize(*level)?.system));
            }
            r.system(&sys);
            let bases: Vec<&str> = t.tail_orbits().iter().map(|(b, _)| sys.graph().vertex_name(*b)).collect();
            r.line(format!("tails: {}", if bases.is_empty() { "none".into() } else { bases.join(" ") }));
            r.key("tails", bases.join(","));
            let report = countable_property_bridge(&t, *level, sys.assertions.amenable, opts.field_char, budget)?;
            write_props(&mut r, &sys, &report);
            Ok(r.finish(Some(budget)))
        }
        Command::Sge { file, expression } => {
            let sys = load(file, opts)?;
            let s = eval_expression(&sys, expression).map_err(Failure::parse)?;
            r.system(&sys);
            let adj = sge_adjoint(&sys, &s);
            r.line(format!("expression: {expression}"));
            r.line(format!("value: {}", SgeDisplay(&sys, &s)));
            r.line(format!("adjoint: {}", SgeDisplay(&sys, &adj)));
            r.key("value", SgeDisplay(&sys, &s));
            r.key("adjoint", SgeDisplay(&sys, &adj));
            r.key("zero", matches!(s, Sge::Zero));
            Ok(r.finish(None))
        }
        Command::Germ { file, germ, equal } => {
            let sys = load(file, opts)?;
            let u = Germ::parse(&sys, germ).map_err(Failure::parse)?;
            r.system(&sys);
            let graph = sys.graph();
            r.line(format!("germ: {}", u.display(&sys)));
            r.line(format!("source: {}", u.base.display(graph)));
            let target = u.target(&sys, budget.max_depth.max(64))?;
            r.line(format!("target: {}", target.display(graph)));
            r.key("germ", u.display(&sys));
            r.key("source", u.base.display(graph));
            r.key("target", target.display(graph));
            let (label, other) = match equal {
                Some(text) => ("equal", Germ::parse(&sys, text).map_err(Failure::parse)?),
                None => ("equals_unit", Germ::unit(&sys, u.base.clone())),
            };
            let v = germ_equal(&sys, &u, &other, budget);
            r.verdict(label, &format!("equal to {}", other.display(&sys)), &v);
            if u.s.alpha.len() > u.s.beta.len() {
                if let Some(p) = unique_fixed_point(&sys, &u.s, budget.max_depth.max(64))? {
                    r.line(format!("fixed point of the triple: {}", p.display(graph)));
                    r.key("fixed_point", p.display(graph));
                }
                let iso = isolated_fixed_point(&sys, &u.s)?;
                r.verdict("isolated_fixed_point", "fixed point isolated", &iso);
            }
            Ok(r.finish(Some(budget)))
        }
    }
}

fn write_props(r: &mut Report, sys: &System, p: &PropertyReport) {
    r.verdict("hausdorff", "hausdorff", &p.hausdorff);
    if let Some(w) = &p.hausdorff_witness {
        r.line(format!("hausdorff witness: {}", sys.show(w)));
        r.key("hausdorff_witness", sys.show(w));
    }
    r.verdict("minimal", "minimal", &p.minimal);
    r.verdict("effective", "effective", &p.effective);
    r.verdict("locally_contracting", "locally contracting", &p.locally_contracting);
    r.verdict("simple_cstar", "simple C*-algebra", &p.simple_cstar);
    r.verdict("simple_algebraic", "simple Steinberg algebra", &p.simple_algebraic);
    r.verdict("purely_infinite", "purely infinite", &p.purely_infinite);
    r.line(format!("amenable: {}", if p.amenable { "asserted" } else { "not asserted" }));
    r.key("amenable", p.amenable);
    let fc = p.field_char.map(|c| c.to_string()).unwrap_or_else(|| "unspecified".into());
    r.line(format!("field characteristic: {fc}"));
    r.key("field_char", fc);
    for w in &p.warnings {
        r.line(format!("warning: {w}"));
    }
    r.key("warnings", p.warnings.len());
    r.line(format!("coverage: {}", p.coverage));
}

fn verify_witness(r: &mut Report, sys: &System, witness: Option<&crate::group::Elem>, budget: SearchBudget) -> Result<(), Failure> {
    let Some(g) = witness else {
        r.line("verify: no certificate to replay");
        r.key("verify", "none");
        return Ok(());
    };
    let rep = minimal_strongly_fixed(sys, g, budget);
    if !rep.verdict.is_infinite() {
        return Err(Failure::precondition(format!("certificate replay: {} is no longer Infinite", sys.show(g))));
    }
    verify_report(sys, &rep, budget).map_err(|e| Failure::precondition(format!("certificate replay: {e}")))?;
    r.line(format!("verify: ok ({} minimal strongly fixed paths rechecked)", rep.paths.len()));
    r.key("verify", "ok");
    Ok(())
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}
