//! Subcommands of `setout`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use setout_core::constants::{BRUTE_FORCE_CAP, EPS_LP, MWU_C, RCRO_TAU_MULT, RCTO_TRIAL_CAP, RCTO_TRIAL_MULT};
use setout_core::cso_disjoint::{solve_cso_disjoint, DisjointConfig, RadiusChoice};
use setout_core::cso_general::{solve_cso, CsoConfig};
use setout_core::gcso::{solve_gcso, GcsoConfig};
use setout_core::gcso_disjoint::solve_gcso_disjoint;
use setout_core::gen::{planted_database, planted_general, planted_geometric, setcover, PointGen, RelGen};
use setout_core::instance::{instance_from_json, instance_to_json};
use setout_core::metric::{brute_force_cso, setcover_to_cso};
use setout_core::mwu::MwuConfig;
use setout_core::outliers::rcro::{solve_rcro, RcroConfig};
use setout_core::outliers::rcto::{solve_rcto, RctoConfig};
use setout_core::outliers::rcto1::{solve_rcto1, Rcto1Config};
use setout_core::outliers::{validate_result_solution, validate_tuple_solution};
use setout_core::relational::oracle::{rcro_opt, rcto1_opt, rcto_opt};
use setout_core::relational::{Database, Query};
use setout_core::{validate_solution, Claim, Instance, Params, SetSystem, TriSolution};

use crate::accept;
use crate::record::{digest, ratio, read_sidecar, sidecar_path, ClaimRecord, Metrics, OracleRecord, ParamsRecord, RunRecord};

#[derive(Debug, Parser)]
#[command(name = "setout", version, about = "k-center clustering with set and tuple outliers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded instance.
    Gen(GenArgs),
    /// Run a solver, validate its output and write the solution with a run record.
    Solve(SolveArgs),
    /// Compute the exact optimum of a small instance.
    Oracle(OracleArgs),
    /// Run the acceptance suite.
    Accept(AcceptArgs),
    /// Sweep a parameter grid and write runtimes and ratios as CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Cso,
    CsoDisjoint,
    #[value(alias = "gcso-mwu")]
    Gcso,
    GcsoDisjoint,
    Rcro,
    Rcto1,
    Rcto,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Cso => "cso",
            Algo::CsoDisjoint => "cso-disjoint",
            Algo::Gcso => "gcso",
            Algo::GcsoDisjoint => "gcso-disjoint",
            Algo::Rcro => "rcro",
            Algo::Rcto1 => "rcto1",
            Algo::Rcto => "rcto",
        }
    }

    fn relational(self) -> bool {
        matches!(self, Algo::Rcro | Algo::Rcto1 | Algo::Rcto)
    }

    /// Which exhaustive optimum the solver is measured against.
    fn model(self) -> Model {
        match self {
            Algo::Rcro => Model::Rcro,
            Algo::Rcto1 => Model::Rcto1,
            Algo::Rcto => Model::Rcto,
            _ => Model::Cso,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Cso,
    Rcro,
    Rcto1,
    Rcto,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Cso => "cso",
            Model::Rcro => "rcro",
            Model::Rcto1 => "rcto1",
            Model::Rcto => "rcto",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    General,
    Geometric,
    GeometricDisjoint,
    Setcover,
    Relational,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points, set-cover elements, or rows per relation.
    #[arg(long, default_value_t = 40)]
    pub n: usize,
    /// Outlier sets, or set-cover sets.
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    /// Dimension; relational default is one more than the relation count.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Planted far groups.
    #[arg(long, default_value_t = 1)]
    pub z: usize,
    /// Frequency bound of general instances.
    #[arg(long, default_value_t = 2)]
    pub f: usize,
    /// Relations.
    #[arg(long, default_value_t = 3)]
    pub g: usize,
    #[arg(long, default_value_t = 3)]
    pub clusters: usize,
    /// Planted bad tuples.
    #[arg(long, default_value_t = 2)]
    pub bad: usize,
    #[arg(long, default_value_t = 0)]
    pub bad_rel: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct Knobs {
    /// Coverage slack of the general solvers' relaxation.
    #[arg(long, default_value_t = EPS_LP)]
    pub eps_lp: f64,
    /// Constant of the MWU iteration budget.
    #[arg(long, default_value_t = MWU_C)]
    pub mwu_c: f64,
    /// Constant of the RCRO sample size.
    #[arg(long, default_value_t = RCRO_TAU_MULT)]
    pub tau_mult: f64,
    /// Constant of the RCTO trial count.
    #[arg(long, default_value_t = RCTO_TRIAL_MULT)]
    pub trial_mult: f64,
    /// Refuse RCTO runs needing more partition trials.
    #[arg(long, default_value_t = RCTO_TRIAL_CAP)]
    pub cap_trials: usize,
    /// Refuse exhaustive optima needing more combinations.
    #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
    pub cap_brute: u64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub z: usize,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub input: PathBuf,
    /// Solution file; without it solution and record go to stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Run record file, by default next to the solution.
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Known optimum; otherwise read from the oracle sidecar if present.
    #[arg(long)]
    pub opt: Option<f64>,
    #[command(flatten)]
    pub knobs: Knobs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub z: usize,
    #[arg(long, value_enum, default_value_t = Model::Cso)]
    pub model: Model,
    #[arg(long, default_value_t = BRUTE_FORCE_CAP)]
    pub cap_brute: u64,
    /// Defaults to `<input>.oracle.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AcceptArgs {
    /// Criteria to run, e.g. `1,4,7`; all by default.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Points, or rows per relation.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80")]
    pub ns: Vec<usize>,
    /// Outlier sets, or relations.
    #[arg(long, value_delimiter = ',', default_value = "4,8")]
    pub ms: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub ks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    pub zs: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub eps: f64,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also compute exact optima, leaving them empty when refused.
    #[arg(long)]
    pub oracle: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub knobs: Knobs,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(setout_core::Error),
    Failed(String),
}

impl From<setout_core::Error> for CliError {
    fn from(e: setout_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(setout_core::Error::CapExceeded(_)) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let res = match cli.command {
        Command::Gen(a) => gen(&a),
        Command::Solve(a) => solve(&a),
        Command::Oracle(a) => oracle(&a),
        Command::Accept(a) => return accept_cmd(&a),
        Command::Bench(a) => bench(&a),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("setout: {e}");
            e.exit_code()
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn params(k: usize, z: usize, eps: f64) -> CliResult<Params> {
    Params::new(k, z, eps).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn gen_text(a: &GenArgs) -> CliResult<String> {
    let d = a.d.unwrap_or(if a.kind == Kind::Relational { a.g + 1 } else { 2 });
    let pg = PointGen { n: a.n, d, k: a.k, z: a.z, m: a.m };
    Ok(match a.kind {
        Kind::General => instance_to_json(&Instance::General(planted_general(a.seed, &pg, a.f)?.instance)),
        Kind::Geometric => instance_to_json(&Instance::Geometric(planted_geometric(a.seed, &pg, false)?.instance)),
        Kind::GeometricDisjoint => instance_to_json(&Instance::Geometric(planted_geometric(a.seed, &pg, true)?.instance)),
        Kind::Setcover => {
            let sets = setcover(a.seed, a.n, a.m)?;
            instance_to_json(&Instance::General(setcover_to_cso(a.n, &sets, a.k)?))
        }
        Kind::Relational => {
            let rg = RelGen { g: a.g, d, rows: a.n, clusters: a.clusters, bad: a.bad, bad_rel: a.bad_rel };
            planted_database(a.seed, &rg)?.instance.to_json()
        }
    })
}

fn gen(a: &GenArgs) -> CliResult<()> {
    emit(a.output.as_deref(), &gen_text(a)?)
}

/// A loaded input of either family.
pub enum Input {
    Sets(Instance),
    Tuples(Database),
}

impl Input {
    pub fn parse(text: &str, relational: bool) -> CliResult<Input> {
        Ok(if relational { Input::Tuples(Database::from_json(text)?) } else { Input::Sets(instance_from_json(text)?) })
    }
}

#[derive(Serialize)]
struct ResultSolution<'a> {
    centers: &'a [Vec<f64>],
    outliers: &'a [Vec<f64>],
    radius: f64,
}

/// A validated solver output.
pub struct Executed {
    pub solution: serde_json::Value,
    pub metrics: Metrics,
    pub claim: Claim,
    pub size: usize,
    pub candidates: usize,
}

fn set_metrics(inst: &dyn SetSystem, sol: &TriSolution, p: &Params) -> CliResult<Metrics> {
    let c = sol.claim;
    let rep = validate_solution(inst, sol, p, (c.centers, c.outliers, c.cost))?;
    Ok(Metrics { centers: rep.num_centers, outliers: rep.num_outliers, radius: rep.radius, valid: rep.valid() })
}

pub fn execute(algo: Algo, input: &Input, p: &Params, seed: u64, knobs: &Knobs) -> CliResult<Executed> {
    let mwu = MwuConfig { c: knobs.mwu_c, ..MwuConfig::default() };
    let lp = CsoConfig { eps_lp: knobs.eps_lp, mwu };
    let gcfg = GcsoConfig { mwu };
    let wrong = || CliError::Usage(format!("--algo {} does not accept this input", algo.name()));
    let ex = match (algo, input) {
        (Algo::Cso | Algo::CsoDisjoint, Input::Sets(inst)) => {
            let sys = inst.as_set_system();
            let sol = if algo == Algo::Cso {
                solve_cso(sys, p, &lp)?.solution
            } else {
                solve_cso_disjoint(sys, p, &DisjointConfig { lp, radii: RadiusChoice::Auto })?.solution
            };
            let metrics = set_metrics(sys, &sol, p)?;
            Executed { solution: serde_json::to_value(&sol)?, metrics, claim: sol.claim, size: sys.len(), candidates: sys.num_sets() }
        }
        (Algo::Gcso | Algo::GcsoDisjoint, Input::Sets(Instance::Geometric(g))) => {
            let sol = if algo == Algo::Gcso { solve_gcso(g, p, &gcfg)?.solution } else { solve_gcso_disjoint(g, p, &gcfg)?.solution };
            let metrics = set_metrics(g, &sol, p)?;
            Executed { solution: serde_json::to_value(&sol)?, metrics, claim: sol.claim, size: g.len(), candidates: g.num_sets() }
        }
        (Algo::Rcro, Input::Tuples(db)) => {
            let q = Query::new(db)?;
            let run = solve_rcro(&q, p, seed, &RcroConfig { tau_mult: knobs.tau_mult, ..RcroConfig::default() })?;
            let rep = validate_result_solution(&q, &run.centers, &run.outliers);
            let metrics = Metrics { centers: rep.num_centers, outliers: run.outliers.len(), radius: rep.radius, valid: rep.valid() };
            let solution = serde_json::to_value(ResultSolution { centers: &run.centers, outliers: &run.outliers, radius: rep.radius })?;
            Executed { solution, metrics, claim: run.claim, size: db.size(), candidates: q.counted(|_, _| true).total as usize }
        }
        (Algo::Rcto1 | Algo::Rcto, Input::Tuples(db)) => {
            let q = Query::new(db)?;
            let (sol, claim, candidates) = if algo == Algo::Rcto1 {
                let run = solve_rcto1(&q, p, &Rcto1Config::default())?;
                (run.solution, run.claim, db.relation(0).rows.len())
            } else {
                let cfg = RctoConfig { trial_mult: knobs.trial_mult, trial_cap: knobs.cap_trials, ..RctoConfig::default() };
                let run = solve_rcto(&q, p, seed, &cfg)?;
                (run.solution, run.claim, db.size())
            };
            let rep = validate_tuple_solution(&q, &sol.centers, &sol.outliers);
            let valid = rep.centers_valid
                && rep.num_centers as f64 <= claim.centers * p.k as f64
                && rep.num_outliers as f64 <= claim.outliers * p.z as f64
                && (algo == Algo::Rcto || sol.outliers.iter().all(|t| t.rel == 0));
            let metrics = Metrics { centers: rep.num_centers, outliers: rep.num_outliers, radius: rep.radius, valid };
            Executed { solution: serde_json::to_value(&sol)?, metrics, claim, size: db.size(), candidates }
        }
        _ => return Err(wrong()),
    };
    if !ex.metrics.valid {
        return Err(CliError::Failed(format!("{} output failed validation: {:?}", algo.name(), ex.metrics)));
    }
    Ok(ex)
}

pub fn optimum(model: Model, input: &Input, k: usize, z: usize, cap: u64) -> CliResult<f64> {
    match (model, input) {
        (Model::Cso, Input::Sets(inst)) => Ok(brute_force_cso(inst.as_set_system(), k, z, cap)?.0),
        (Model::Rcro, Input::Tuples(db)) => Ok(rcro_opt(&Query::new(db)?, k, z, cap)?),
        (Model::Rcto1, Input::Tuples(db)) => Ok(rcto1_opt(&Query::new(db)?, k, z, cap)?.0),
        (Model::Rcto, Input::Tuples(db)) => Ok(rcto_opt(&Query::new(db)?, k, z, cap)?.0),
        _ => Err(CliError::Usage(format!("model {} does not accept this input", model.name()))),
    }
}

fn solve(a: &SolveArgs) -> CliResult<()> {
    let p = params(a.k, a.z, a.eps)?;
    let text = std::fs::read_to_string(&a.input)?;
    let dig = digest(text.as_bytes());
    let input = Input::parse(&text, a.algo.relational())?;
    let start = Instant::now();
    let ex = execute(a.algo, &input, &p, a.seed, &a.knobs)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut rec = RunRecord {
        command: "solve".into(),
        algo: a.algo.name().into(),
        seed: a.seed,
        params: ParamsRecord { k: a.k, z: a.z, eps: a.eps },
        instance_digest: dig.clone(),
        size: ex.size,
        candidates: ex.candidates,
        metrics: ex.metrics,
        claim: ClaimRecord::from(ex.claim),
        opt: None,
        ratio: None,
        wall_ms,
        threads: rayon::current_num_threads(),
    };
    if let Some(opt) = a.opt.or_else(|| read_sidecar(&a.input, a.algo.model().name(), a.k, a.z, &dig)) {
        rec.set_opt(opt);
    }
    match &a.output {
        Some(out) => {
            std::fs::write(out, serde_json::to_string_pretty(&ex.solution)?)?;
            let rp = a.record.clone().unwrap_or_else(|| {
                let mut s = out.as_os_str().to_owned();
                s.push(".record.json");
                PathBuf::from(s)
            });
            std::fs::write(rp, serde_json::to_string_pretty(&rec)?)?;
        }
        None => {
            let both = serde_json::json!({ "solution": ex.solution, "record": rec });
            println!("{}", serde_json::to_string_pretty(&both)?);
        }
    }
    Ok(())
}

fn oracle(a: &OracleArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.input)?;
    let input = Input::parse(&text, a.model != Model::Cso)?;
    let opt = optimum(a.model, &input, a.k, a.z, a.cap_brute)?;
    let rec = OracleRecord { k: a.k, z: a.z, model: a.model.name().into(), opt, instance_digest: digest(text.as_bytes()) };
    let path = a.output.clone().unwrap_or_else(|| sidecar_path(&a.input));
    std::fs::write(&path, serde_json::to_string_pretty(&rec)?)?;
    println!("{opt}");
    Ok(())
}

fn accept_cmd(a: &AcceptArgs) -> i32 {
    let ids: Vec<usize> = if a.only.is_empty() { (1..=accept::NAMES.len()).collect() } else { a.only.clone() };
    let mut ok = true;
    for id in ids {
        let v = accept::run(id);
        println!("{}", v.line());
        ok &= v.pass;
    }
    if ok {
        0
    } else {
        1
    }
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub algo: &'static str,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub z: usize,
    pub eps: f64,
    pub seed: u64,
    pub size: usize,
    pub wall_ms: f64,
    pub radius: Option<f64>,
    pub centers: Option<usize>,
    pub outliers: Option<usize>,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub error: Option<String>,
}

fn bench_input(algo: Algo, n: usize, m: usize, k: usize, z: usize, d: usize, seed: u64) -> CliResult<Input> {
    let pg = PointGen { n, d, k, z, m };
    Ok(match algo {
        Algo::Cso => Input::Sets(Instance::General(planted_general(seed, &pg, 2)?.instance)),
        Algo::CsoDisjoint => Input::Sets(Instance::General(planted_general(seed, &pg, 1)?.instance)),
        Algo::Gcso => Input::Sets(Instance::Geometric(planted_geometric(seed, &pg, false)?.instance)),
        Algo::GcsoDisjoint => Input::Sets(Instance::Geometric(planted_geometric(seed, &pg, true)?.instance)),
        Algo::Rcro | Algo::Rcto1 | Algo::Rcto => {
            let rg = RelGen { g: m, d: d.max(m), rows: n, clusters: 3, bad: z, bad_rel: 0 };
            Input::Tuples(planted_database(seed, &rg)?.instance)
        }
    })
}

pub fn bench_rows(a: &BenchArgs) -> Vec<BenchRow> {
    let mut grid = Vec::new();
    for &n in &a.ns {
        for &m in &a.ms {
            for &k in &a.ks {
                for &z in &a.zs {
                    for r in 0..a.reps as u64 {
                        grid.push((n, m, k, z, a.seed + r));
                    }
                }
            }
        }
    }
    grid.into_par_iter()
        .map(|(n, m, k, z, seed)| {
            let mut row = BenchRow {
                algo: a.algo.name(),
                n,
                m,
                k,
                z,
                eps: a.eps,
                seed,
                size: 0,
                wall_ms: 0.0,
                radius: None,
                centers: None,
                outliers: None,
                opt: None,
                ratio: None,
                error: None,
            };
            let res = (|| -> CliResult<()> {
                let input = bench_input(a.algo, n, m, k, z, a.d, seed)?;
                let p = params(k, z, a.eps)?;
                let start = Instant::now();
                let ex = execute(a.algo, &input, &p, seed, &a.knobs)?;
                row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                row.size = ex.size;
                row.radius = Some(ex.metrics.radius);
                row.centers = Some(ex.metrics.centers);
                row.outliers = Some(ex.metrics.outliers);
                if a.oracle {
                    if let Ok(opt) = optimum(a.algo.model(), &input, k, z, a.knobs.cap_brute) {
                        row.opt = Some(opt);
                        row.ratio = Some(ratio(ex.metrics.radius, opt));
                    }
                }
                Ok(())
            })();
            if let Err(e) = res {
                row.error = Some(e.to_string());
            }
            row
        })
        .collect()
}

fn bench(a: &BenchArgs) -> CliResult<()> {
    let rows = bench_rows(a);
    let sink: Box<dyn std::io::Write> = match &a.output {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in &rows {
        w.serialize(r).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
