use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kmslab::algebra::{parse_element, AlgebraElement};
use kmslab::axb::{axb_report, IdealSemigroupData};
use kmslab::crossed::{decompose_trace, extremal_traces_enumerate, periodic_orbits};
use kmslab::cyclotomic::{format_rational, Cyclotomic, Rational};
use kmslab::group::GroupSpec;
use kmslab::groupoid::{Cocycle, FiniteGroupoid};
use kmslab::io::{
    self, ActionSpec, ClassificationReport, Format, Mode, OracleReport, SessionConfig,
};
use kmslab::kms::{check_kms, classify, compare_with_oracle, oracle_solution_space, to_float};
use kmslab::measure::quasi_invariant_polytope;
use kmslab::strategy::Engine;
use kmslab::suite::run_suite;
use kmslab::Error;

mod table;

use table::{fields, sparse, Table};

#[derive(Parser)]
#[command(
    name = "kmslab",
    version,
    about = "Exact KMS states on finite groupoid algebras"
)]
struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Same as `--format json`.
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Same as `--format table`.
    #[arg(long, global = true)]
    table: bool,
    #[arg(long, value_enum, global = true, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Positivity strategy (ldl, eigen); defaults by mode.
    #[arg(long, global = true)]
    positivity: Option<String>,
    /// Character-table strategy (burnside, abelian); defaults by mode.
    #[arg(long, global = true)]
    characters: Option<String>,
    /// Random seed; KMSLAB_SEED takes precedence when set.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate input documents.
    Validate(ValidateArgs),
    /// Vertices of the quasi-invariant measure polytope.
    Measures(InstanceArgs),
    /// Character table of a finite group.
    Characters {
        #[arg(long)]
        group: PathBuf,
    },
    #[command(subcommand)]
    Kms(KmsCommand),
    #[command(subcommand)]
    Traces(TracesCommand),
    #[command(subcommand)]
    Axb(AxbCommand),
    /// Run the generator suite and report per-instance verdicts.
    Suite,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    groupoid: Option<PathBuf>,
    /// Requires --groupoid.
    #[arg(long, requires = "groupoid")]
    cocycle: Option<PathBuf>,
    /// Requires --groupoid.
    #[arg(long, requires = "groupoid")]
    state: Option<PathBuf>,
    /// Algebra element such as "3*d(g1) + (1+2i)*d(g2)"; requires --groupoid.
    #[arg(long, requires = "groupoid")]
    element: Option<String>,
    #[arg(long)]
    group: Option<PathBuf>,
    #[arg(long)]
    system: Option<PathBuf>,
    /// Ideal-semigroup data.
    #[arg(long)]
    data: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    groupoid: PathBuf,
    /// Integer cocycle; zero when omitted.
    #[arg(long)]
    cocycle: Option<PathBuf>,
    /// Temperature parameter q = e^{-β}, a positive rational.
    #[arg(long)]
    q: String,
}

#[derive(Subcommand)]
enum KmsCommand {
    /// Extreme KMS states from measures and isotropy characters.
    Classify(InstanceArgs),
    /// Check a state against the KMS conditions.
    Check {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        state: PathBuf,
    },
    /// Solution space of the KMS linear conditions, solved directly.
    Oracle(InstanceArgs),
    /// Compare the classification with the oracle.
    Compare(InstanceArgs),
}

#[derive(Subcommand)]
enum TracesCommand {
    /// Split trace values on a ℤ-system into orbit masses and moments.
    Decompose {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        values: PathBuf,
        #[arg(long)]
        cutoff: usize,
    },
    /// Extreme traces of an abelian transformation groupoid.
    Extremal {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        action: PathBuf,
    },
}

#[derive(Subcommand)]
enum AxbCommand {
    /// Zeta values, measures, scaling checks and decay.
    Report(AxbArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Field {
    #[value(name = "Q")]
    Q,
}

#[derive(Args)]
struct AxbArgs {
    #[arg(long, conflicts_with_all = ["field", "primes_up_to"], required_unless_present = "field")]
    data: Option<PathBuf>,
    #[arg(long, value_enum, requires = "primes_up_to")]
    field: Option<Field>,
    #[arg(long)]
    primes_up_to: Option<u64>,
    #[arg(long)]
    beta: String,
    #[arg(long)]
    bound: u64,
}

/// A failure with its exit code.
enum Failure {
    Domain(Error),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_schema() {
            Failure::Input(e)
        } else {
            Failure::Domain(e)
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// A finished command: the JSON body and its table rendering.
struct Output {
    json: Value,
    table: String,
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Failure::Input(Error::Schema {
            pointer: "/".into(),
            message: format!("{}: {e}", path.display()),
        })
    })
}

fn value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn parse_beta(s: &str) -> Outcome<Rational> {
    Rational::from_str(s.trim()).map_err(|_| {
        Failure::Input(Error::Schema {
            pointer: "/beta".into(),
            message: format!("not a rational: {s:?}"),
        })
    })
}

struct Instance {
    groupoid: Arc<FiniteGroupoid>,
    cocycle: Cocycle,
    q: kmslab::algebra::Temperature,
}

fn load_instance(a: &InstanceArgs) -> Outcome<Instance> {
    let groupoid = io::parse_groupoid(&read(&a.groupoid)?)?.into_arc();
    let cocycle = match &a.cocycle {
        Some(p) => io::parse_cocycle(&groupoid, &read(p)?)?,
        None => Cocycle::zero(&groupoid),
    };
    let q = io::parse_temperature(&a.q)?;
    Ok(Instance {
        groupoid,
        cocycle,
        q,
    })
}

fn validate(a: &ValidateArgs) -> Outcome<Output> {
    let mut docs = serde_json::Map::new();
    let mut t = Table::new(&["document", "summary"]);
    if let Some(p) = &a.groupoid {
        let g = io::parse_groupoid(&read(p)?)?.into_arc();
        let orbits = g.orbits().len();
        docs.insert(
            "groupoid".into(),
            json!({"units": g.num_units(), "arrows": g.num_arrows(), "orbits": orbits, "principal": g.is_principal()}),
        );
        t.row([
            "groupoid".to_string(),
            format!(
                "{} units, {} arrows, {orbits} orbits",
                g.num_units(),
                g.num_arrows()
            ),
        ]);
        if let Some(p) = &a.cocycle {
            let c = io::parse_cocycle(&g, &read(p)?)?;
            docs.insert("cocycle".into(), json!({"zero": c.is_zero()}));
            t.row(["cocycle", if c.is_zero() { "zero" } else { "valid" }]);
        }
        if let Some(p) = &a.state {
            let w = io::parse_state(&g, &read(p)?)?;
            let mass = w.unit_mass();
            docs.insert("state".into(), json!({"unit_mass": value(&mass)}));
            t.row(["state".to_string(), format!("unit mass {mass}")]);
        }
        if let Some(e) = &a.element {
            let x: AlgebraElement<Cyclotomic> = parse_element(&g, e)?;
            let coeffs: BTreeMap<String, Cyclotomic> = x
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (g.arrow(i).id.clone(), c.clone()))
                .collect();
            t.row(["element".to_string(), sparse(coeffs.iter())]);
            docs.insert("element".into(), value(&coeffs));
        }
    }
    if let Some(p) = &a.group {
        let g = io::parse_group(&read(p)?)?;
        docs.insert(
            "group".into(),
            json!({"order": g.order(), "abelian": g.is_abelian()}),
        );
        t.row(["group".to_string(), format!("order {}", g.order())]);
    }
    if let Some(p) = &a.system {
        let s = io::parse_system(&read(p)?)?;
        let periods: Vec<usize> = periodic_orbits(&s).iter().map(Vec::len).collect();
        t.row([
            "system".to_string(),
            format!("{} points, periods {periods:?}", s.points.len()),
        ]);
        docs.insert(
            "system".into(),
            json!({"points": s.points.len(), "periods": periods}),
        );
    }
    if let Some(p) = &a.data {
        let d = io::parse_ideal_data(&read(p)?)?;
        t.row([
            "data".to_string(),
            format!(
                "{} primes, class number {}",
                d.primes.len(),
                d.class_number()
            ),
        ]);
        docs.insert(
            "data".into(),
            json!({"primes": d.primes.len(), "class_number": d.class_number()}),
        );
    }
    if docs.is_empty() {
        return Err(Failure::Input(Error::Schema {
            pointer: "/".into(),
            message: "nothing to validate".into(),
        }));
    }
    Ok(Output {
        json: json!({"valid": true, "documents": docs}),
        table: t.render(),
    })
}

fn measures(a: &InstanceArgs) -> Outcome<Output> {
    let inst = load_instance(a)?;
    let poly = quasi_invariant_polytope(&inst.groupoid, &inst.cocycle, &inst.q)?;
    let rows = io::measure_rows(&inst.groupoid, &poly.vertices);
    let mut t = Table::new(&["vertex", "weights"]).titled(format!("q = {}", inst.q));
    for (k, r) in rows.iter().enumerate() {
        t.row([k.to_string(), sparse(r.iter())]);
    }
    Ok(Output {
        json: json!({"q": inst.q.to_string(), "vertices": rows}),
        table: t.render(),
    })
}

fn characters(path: &Path, engine: &Engine) -> Outcome<Output> {
    let g = io::parse_group(&read(path)?)?;
    let table = engine.characters.table(&g, engine.seed)?;
    let report = io::CharacterTableReport::new(&g, &table);
    let mut headers = vec!["chi".to_string(), "deg".to_string()];
    headers.extend(report.classes.iter().map(|c| c[0].clone()));
    let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut t = Table::new(&headers).titled(format!("method {}", report.method));
    for (i, row) in report.characters.iter().enumerate() {
        let mut cells = vec![i.to_string(), report.degrees[i].to_string()];
        cells.extend(row.iter().map(|c| c.to_string()));
        t.row(cells);
    }
    Ok(Output {
        json: value(&report),
        table: t.render(),
    })
}

fn classification_table(r: &ClassificationReport) -> String {
    let mut out = fields(&[
        ("q", r.q.clone()),
        ("orbits", r.orbits.len().to_string()),
        ("expected count", r.expected_count.to_string()),
        ("extreme states", r.states.len().to_string()),
    ]);
    let mut t = Table::new(&["orbit", "representative", "character", "degree", "state"]);
    for s in &r.states {
        t.row([
            s.orbit.to_string(),
            s.representative.clone(),
            s.character.to_string(),
            s.degree.to_string(),
            sparse(s.state.iter()),
        ]);
    }
    out.push('\n');
    out.push_str(&t.render());
    out
}

fn kms(cmd: &KmsCommand, engine: &Engine, mode: Mode) -> Outcome<Output> {
    match cmd {
        KmsCommand::Classify(a) => {
            let inst = load_instance(a)?;
            let cls = classify(&inst.groupoid, &inst.cocycle, &inst.q, engine)?;
            let report = ClassificationReport::new(&cls);
            Ok(Output {
                table: classification_table(&report),
                json: value(&report),
            })
        }
        KmsCommand::Check { instance, state } => {
            let inst = load_instance(instance)?;
            let w = io::parse_state(&inst.groupoid, &read(state)?)?;
            let diag = match mode {
                Mode::Exact => check_kms(&w, &inst.cocycle, &inst.q, engine.positivity.as_ref())?,
                Mode::Float => check_kms(
                    &to_float(&w),
                    &inst.cocycle,
                    &inst.q,
                    engine.positivity.as_ref(),
                )?,
            };
            let mut body = value(&diag);
            body["passed"] = json!(diag.passed());
            let mut t = Table::new(&["condition", "pass", "witness"]);
            for (name, c) in [
                ("linear (L)", &diag.linear),
                ("normalized", &diag.normalized),
                ("hermitian", &diag.hermitian),
                ("positive", &diag.positive),
                ("isotropy", &diag.isotropy),
            ] {
                let witness = c
                    .witness
                    .as_ref()
                    .map(|w| value(w).to_string())
                    .unwrap_or_default();
                t.row([name.to_string(), c.pass.to_string(), witness]);
            }
            Ok(Output {
                json: body,
                table: t.render(),
            })
        }
        KmsCommand::Oracle(a) => {
            let inst = load_instance(a)?;
            let orc = oracle_solution_space(&inst.groupoid, &inst.cocycle, &inst.q)?;
            let report = OracleReport::new(&orc);
            let mut t = Table::new(&["vector", "entries"])
                .titled(format!("q = {}, dimension {}", report.q, report.dimension));
            t.row(["point".to_string(), sparse(report.point.iter())]);
            for (i, d) in report.directions.iter().enumerate() {
                t.row([format!("direction {i}"), sparse(d.iter())]);
            }
            Ok(Output {
                json: value(&report),
                table: t.render(),
            })
        }
        KmsCommand::Compare(a) => {
            let inst = load_instance(a)?;
            let cls = classify(&inst.groupoid, &inst.cocycle, &inst.q, engine)?;
            let orc = oracle_solution_space(&inst.groupoid, &inst.cocycle, &inst.q)?;
            let cmp = compare_with_oracle(&cls, &orc, engine)?;
            let mut body = value(&cmp);
            body["passed"] = json!(cmp.passed());
            let table = fields(&[
                ("inclusion", format!("{:?}", cmp.inclusion)),
                ("independence", format!("{:?}", cmp.independence)),
                ("dimension", format!("{:?}", cmp.dimension)),
                ("hull dimension", cmp.hull_dimension.to_string()),
                ("oracle dimension", cmp.oracle_dimension.to_string()),
            ]);
            Ok(Output { json: body, table })
        }
    }
}

fn traces(cmd: &TracesCommand) -> Outcome<Output> {
    match cmd {
        TracesCommand::Decompose {
            system,
            values,
            cutoff,
        } => {
            let sys = io::parse_system(&read(system)?)?;
            let vals = io::parse_orbit_values(&sys, &read(values)?, *cutoff)?;
            let data = decompose_trace(&sys, &vals, *cutoff)?;
            let orbits = periodic_orbits(&sys);
            let mut t = Table::new(&["orbit", "period", "weight", "nonzero moments"]);
            for e in &data.entries {
                let m = *cutoff as i64;
                let nonzero = (-m..=m).filter_map(|k| {
                    e.moments
                        .get(k)
                        .ok()
                        .filter(|c| !c.is_zero())
                        .map(|c| (k, c.clone()))
                });
                t.row([
                    sys.points[orbits[e.orbit][0]].clone(),
                    orbits[e.orbit].len().to_string(),
                    format_rational(&e.weight),
                    sparse(nonzero),
                ]);
            }
            Ok(Output {
                json: value(&data),
                table: t.render(),
            })
        }
        TracesCommand::Extremal {
            group,
            space,
            action,
        } => {
            let spec = ActionSpec {
                group: io::parse_document::<GroupSpec>(&read(group)?)?,
                space: io::parse_points(&read(space)?)?,
                map: io::parse_action_map(&read(action)?)?,
            };
            let t = io::action_from_spec(&spec)?;
            let traces = extremal_traces_enumerate(&t)?;
            let mut table = Table::new(&["orbit", "stabilizer", "character", "state"]);
            let rows: Vec<Value> = traces
                .iter()
                .map(|x| {
                    let orbit: Vec<&str> = x.orbit.iter().map(|&p| t.space[p].as_str()).collect();
                    let stab: Vec<&str> = x.stabilizer.iter().map(|&h| t.group.label(h)).collect();
                    let state = io::state_map(&x.state);
                    table.row([
                        orbit.join(" "),
                        stab.join(" "),
                        x.character.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
                        sparse(state.iter()),
                    ]);
                    json!({"orbit": orbit, "stabilizer": stab, "character": value(&x.character), "state": value(&state)})
                })
                .collect();
            Ok(Output {
                json: json!({"count": rows.len(), "traces": rows}),
                table: table.render(),
            })
        }
    }
}

fn axb(cmd: &AxbCommand) -> Outcome<Output> {
    let AxbCommand::Report(a) = cmd;
    let data = match (&a.data, a.primes_up_to) {
        (Some(p), _) => io::parse_ideal_data(&read(p)?)?,
        (None, Some(p)) => IdealSemigroupData::rationals(p),
        (None, None) => unreachable!("clap requires a data source"),
    };
    let beta = parse_beta(&a.beta)?;
    let report = axb_report(&data, &beta, a.bound)?;
    let mut body = value(&report);
    body["passed"] = json!(report.passed());
    let mut out = fields(&[
        ("beta", report.beta.clone()),
        ("bound", report.bound.to_string()),
        ("class number", report.class_number.to_string()),
        ("exact", report.exact.to_string()),
        ("passed", report.passed().to_string()),
    ]);
    let mut t = Table::new(&[
        "class",
        "partial zeta",
        "support",
        "scaling",
        "lifted scaling",
    ]);
    for c in &report.classes {
        let ok = |v: &[kmslab::axb::ScalingCheck]| {
            format!("{}/{}", v.iter().filter(|s| s.pass).count(), v.len())
        };
        t.row([
            c.class.clone(),
            c.partial_zeta.to_string(),
            c.measure.as_ref().map_or_else(
                || c.error.clone().unwrap_or_default(),
                |m| m.len().to_string(),
            ),
            ok(&c.scaling),
            ok(&c.lifted_scaling),
        ]);
    }
    out.push('\n');
    out.push_str(&t.render());
    out.push('\n');
    let mut p = vec![
        ("product support", report.product.measure.len().to_string()),
        (
            "product scaling",
            format!(
                "{}/{}",
                report.product.scaling.iter().filter(|s| s.pass).count(),
                report.product.scaling.len()
            ),
        ),
    ];
    if let Some(m) = &report.product.missing_mass {
        p.push(("missing mass", format!("{:.6e}", m.to_f64())));
    }
    if let Some(f) = &report.convex_combination {
        p.push((
            "convex-combination identity",
            format!("{} on {} ideals", f.holds, f.compared),
        ));
    }
    if let Some(last) = report.decay.last() {
        p.push(("decay (all primes)", format!("{:.6}", last.to_f64())));
    }
    out.push_str(&fields(&p));
    for w in &report.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    Ok(Output {
        json: body,
        table: out,
    })
}

fn suite(engine: &Engine) -> Outcome<Output> {
    let report = run_suite(engine)?;
    let s = &report.summary;
    let mut out = fields(&[
        ("seed", report.seed.to_string()),
        ("positivity", report.positivity.clone()),
        ("characters", report.characters.clone()),
        ("instances", s.instances.to_string()),
        ("passed", s.passed.to_string()),
        ("principal", s.principal.to_string()),
        ("abelian checks", s.abelian_checks.to_string()),
        ("dimension reported", s.dimension_reported.to_string()),
    ]);
    let failing: Vec<_> = report.instances.iter().filter(|r| !r.passed()).collect();
    if !failing.is_empty() {
        let mut t = Table::new(&["group", "components", "potential", "q", "error"]);
        for r in failing {
            t.row([
                r.group.clone(),
                format!("{:?}", r.components),
                format!("{:?}", r.potential),
                r.q.clone(),
                r.error.clone().unwrap_or_else(|| "verdict".into()),
            ]);
        }
        out.push('\n');
        out.push_str(&t.render());
    }
    Ok(Output {
        json: value(&report),
        table: out,
    })
}

fn error_body(e: &Error) -> Value {
    let kind = format!("{e:?}");
    let kind: String = kind.chars().take_while(|c| c.is_alphanumeric()).collect();
    let mut body = json!({"error": {"kind": kind, "message": e.to_string()}});
    match e {
        Error::Schema { pointer, .. } => body["error"]["pointer"] = json!(pointer),
        Error::NotATrace(v) => body["error"]["violation"] = value(v),
        _ => {}
    }
    body
}

fn run(cli: &Cli) -> Outcome<Output> {
    let format = if cli.table {
        Format::Table
    } else if cli.json {
        Format::Json
    } else {
        match cli.format {
            FormatArg::Json => Format::Json,
            FormatArg::Table => Format::Table,
        }
    };
    let mode = match cli.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    };
    let config = SessionConfig {
        mode,
        seed: cli.seed.unwrap_or(Engine::DEFAULT_SEED),
        format,
        positivity: cli.positivity.clone(),
        characters: cli.characters.clone(),
    }
    .with_env_seed()?;
    let engine = config.engine().map_err(Failure::Input)?;
    match &cli.command {
        Command::Validate(a) => validate(a),
        Command::Measures(a) => measures(a),
        Command::Characters { group } => characters(group, &engine),
        Command::Kms(c) => kms(c, &engine, mode),
        Command::Traces(c) => traces(c),
        Command::Axb(c) => axb(c),
        Command::Suite => suite(&engine),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let table = cli.table || (!cli.json && matches!(cli.format, FormatArg::Table));
    match run(&cli) {
        Ok(out) => {
            if table {
                print!("{}", out.table);
            } else {
                print!("{}", io::to_json(&out.json));
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (e, code) = match f {
                Failure::Domain(e) => (e, 1),
                Failure::Input(e) => (e, 2),
            };
            eprintln!("error: {e}");
            if !table {
                print!("{}", io::to_json(&error_body(&e)));
            }
            ExitCode::from(code)
        }
    }
}
