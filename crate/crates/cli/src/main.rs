mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use damrl_core::ageing::classify_all_unchecked;
use damrl_core::export;
use damrl_core::theorems::catalog::{load_catalog, verify_entries, CatalogReport};
use damrl_core::theorems::search::{search_counterexample, Family, SearchSpec};
use damrl_core::theorems::Analysis;
use damrl_core::{
    compose, validate_lemma1, ComposedModel, CovariateFunction, Error, LifetimeModel, Settings, TheoremId,
};

use config::{check_settings, FamilyFile, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "damrl", version, about = "Dynamic additive mean residual life toolkit")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Right end of the analysis grid.
    #[arg(long, global = true)]
    grid_t: Option<f64>,
    /// Number of grid nodes.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Shape-test tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// CSV output path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Compose even when Lemma 1 rejects the covariate.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the base model and, if given, Lemma 1 for the covariate.
    Validate,
    /// Classify the base and transformed models into all ageing classes.
    Classify,
    /// Check theorem hypotheses against the computed classes.
    Theorems {
        /// Single theorem (T1..T10, C6..C9); all when omitted.
        #[arg(long)]
        id: Option<String>,
    },
    /// The built-in catalog of worked examples.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Random search for admissible covariates with one hypothesis dropped.
    Search {
        #[arg(long)]
        id: Option<String>,
        /// Hypothesis to drop: 1 or 2.
        #[arg(long)]
        drop: Option<usize>,
        /// Family file with `template` and `[params]`.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Write the curves t, m, r, S, m*, r*, S* as CSV.
    Export,
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Recompute every expected fact.
    Verify {
        /// Restrict to these entries.
        #[arg(long)]
        entry: Vec<String>,
    },
    /// List entry names and locators.
    List,
}

enum Failure {
    /// Bad configuration or unparsable input.
    Config(String),
    /// A check did not come out as required.
    Verdict(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Expr(_) => Failure::Config(e.to_string()),
            other => Failure::Verdict(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Verdict(format!("io: {e}"))
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    cfg: RunConfig,
    settings: Settings,
    out: Option<PathBuf>,
    seed: Option<u64>,
    force: bool,
}

impl Ctx {
    fn new(common: Common) -> Result<Self, Failure> {
        let cfg = match &common.config {
            Some(p) => RunConfig::load(p).map_err(Failure::Config)?,
            None => RunConfig::default(),
        };
        let mut settings = cfg.settings();
        if let Some(t) = common.grid_t {
            settings.horizon = Some(t);
        }
        if let Some(n) = common.grid_points {
            settings.grid_points = n;
        }
        if let Some(tol) = common.tol {
            settings.tol = tol;
        }
        check_settings(&settings).map_err(Failure::Config)?;
        let out = common.out.or_else(|| cfg.output.csv.as_ref().map(|p| cfg.resolve(p)));
        Ok(Self {
            cfg,
            settings,
            out,
            seed: common.seed,
            force: common.force,
        })
    }

    fn base(&self) -> Result<Arc<LifetimeModel>, Failure> {
        let (kind, src) = self
            .cfg
            .base_kind()
            .map_err(Failure::Config)?
            .ok_or_else(|| Failure::Config("a [base] block is required (pass --config)".into()))?;
        let model = LifetimeModel::parse(kind, src, src).map_err(|e| Failure::Config(format!("[base] {e}")))?;
        Ok(Arc::new(model))
    }

    fn covariate(&self) -> Result<Option<CovariateFunction>, Failure> {
        self.cfg
            .covariate
            .as_ref()
            .map(|c| CovariateFunction::parse(&c.expr).map_err(|e| Failure::Config(format!("[covariate] {e}"))))
            .transpose()
    }

    /// Base plus covariate (zero when absent).
    fn composed(&self) -> Result<ComposedModel, Failure> {
        let base = self.base()?;
        let cov = self.covariate()?.unwrap_or_else(CovariateFunction::zero);
        let cm = compose(base, cov, &self.settings, self.force)?;
        if let Some(b) = cm.banner() {
            println!("warning: {b}");
        }
        Ok(cm)
    }

    fn csv(&self, write: impl FnOnce(&mut dyn Write) -> damrl_core::Result<()>) -> Outcome {
        if let Some(path) = &self.out {
            let mut f = BufWriter::new(File::create(path).map_err(|e| Failure::Verdict(format!("io: {}: {e}", path.display())))?);
            write(&mut f)?;
            f.flush()?;
        }
        Ok(())
    }
}

fn validate(ctx: &Ctx) -> Outcome {
    let base = ctx.base()?;
    let report = base.validate(&ctx.settings);
    println!("base {}: {}", base.label(), if report.accepted() { "valid" } else { "invalid" });
    for v in &report.violations {
        println!("  violation: {v}");
    }
    for n in &report.notes {
        println!("  note: {n}");
    }
    let mut ok = report.accepted();
    if let Some(cov) = ctx.covariate()? {
        let l = validate_lemma1(&base, &cov, &ctx.settings);
        println!("Lemma 1 for c = {cov}: {}", if l.overall { "accept" } else { "reject" });
        println!("  (i)   0 <= c+m < inf     {}", l.cond_i.verdict);
        println!("  (ii)  c continuous       {}", if l.cond_ii { "holds" } else { "fails" });
        println!("  (iii) t+c+m increasing   {}", l.cond_iii.verdict);
        println!("  (iv)  int 1/(c+m) = inf  {}", l.cond_iv.as_str());
        for (t, a, b) in &l.slope_jumps {
            println!("  note: c' jumps at t = {t} ({a} vs {b})");
        }
        if let Some(f) = l.failure() {
            println!("  first failure: {f}");
        }
        ok &= l.overall;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verdict("validation failed".into()))
    }
}

fn classify(ctx: &Ctx) -> Outcome {
    let cm = ctx.composed()?;
    let settings = cm.pinned(&ctx.settings);
    let grid = cm.grid(&settings)?;
    let base = classify_all_unchecked(cm.base(), &grid, &settings)?;
    let star = classify_all_unchecked(cm.star(), &grid, &settings)?;
    println!("grid [0, {}] with {} points", grid.upper(), grid.points());
    println!("{:<7} {:<9} {:<9} witness (X*)", "class", "X", "X*");
    for (b, s) in base.verdicts.iter().zip(&star.verdicts) {
        let w = s.witness.map(|w| w.to_string()).unwrap_or_default();
        println!("{:<7} {:<9} {:<9} {}", b.class.name(), b.verdict.as_str(), s.verdict.as_str(), w);
    }
    for (label, c) in [("X", &base), ("X*", &star)] {
        if let Some((up, down)) = c.chain_violation() {
            println!("warning: {label} is {up} but not {down}; the grid may be too coarse");
        }
    }
    ctx.csv(|w| export::write_classifications(&[("X", &base), ("X*", &star)], w))
}

fn theorems(ctx: &Ctx, id: Option<&str>) -> Outcome {
    let ids = match id {
        Some(s) => vec![s.parse::<TheoremId>().map_err(|e| Failure::Config(e.to_string()))?],
        None => TheoremId::ALL.to_vec(),
    };
    let cm = ctx.composed()?;
    let analysis = Analysis::new(&cm, &ctx.settings)?;
    let reports = ids.iter().map(|&id| analysis.report(id)).collect::<damrl_core::Result<Vec<_>>>()?;
    println!(
        "{:<4} {:<6} {:<13} {:<13} {:<9} {:<9} {:<10} note",
        "id", "class", "hyp (i)", "hyp (ii)", "X", "X*", "applicable"
    );
    for r in &reports {
        let note = if !r.sound {
            "UNSOUND"
        } else if r.sufficiency_note {
            "class holds without the hypotheses"
        } else {
            ""
        };
        println!(
            "{:<4} {:<6} {:<13} {:<13} {:<9} {:<9} {:<10} {note}",
            r.id.name(),
            r.id.class().name(),
            r.hypotheses[0].label(),
            r.hypotheses[1].label(),
            r.base.verdict.as_str(),
            r.star.verdict.as_str(),
            r.applicable,
        );
    }
    ctx.csv(|w| export::write_reports(&reports, w))?;
    if reports.iter().all(|r| r.sound) {
        Ok(())
    } else {
        Err(Failure::Verdict("a theorem applied but its conclusion failed".into()))
    }
}

fn print_catalog(report: &CatalogReport) {
    for r in &report.rows {
        println!(
            "{} {:<24} {:<40} {:<18} expected {:<9} got {}",
            if r.pass { "ok  " } else { "FAIL" },
            r.entry,
            r.locator,
            r.subject.to_string(),
            r.expected.to_string(),
            r.computed
        );
    }
    for f in &report.findings {
        println!("finding [{}] {}: {}", f.entry, f.locator, f.description);
    }
}

fn catalog(ctx: &Ctx, action: &CatalogAction) -> Outcome {
    let mut entries = load_catalog();
    match action {
        CatalogAction::List => {
            for e in &entries {
                println!("{:<24} {:<40} {} facts", e.name, e.locator, e.facts.len());
            }
            Ok(())
        }
        CatalogAction::Verify { entry } => {
            if !entry.is_empty() {
                if let Some(bad) = entry.iter().find(|n| !entries.iter().any(|e| e.name == n.as_str())) {
                    return Err(Failure::Config(format!("no catalog entry named '{bad}'")));
                }
                entries.retain(|e| entry.iter().any(|n| n == e.name));
            }
            let report = verify_entries(&entries, &ctx.settings)?;
            print_catalog(&report);
            let bad = report.mismatches().len();
            println!("{} entries, {} facts, {bad} mismatches", report.entries(), report.rows.len());
            ctx.csv(|w| export::write_catalog(&report, w))?;
            if bad == 0 {
                Ok(())
            } else {
                Err(Failure::Verdict(format!("{bad} catalog mismatches")))
            }
        }
    }
}

fn search(ctx: &Ctx, id: Option<&str>, drop: Option<usize>, family: Option<&PathBuf>, trials: Option<usize>) -> Outcome {
    let block = &ctx.cfg.search;
    let id = id
        .or(block.id.as_deref())
        .ok_or_else(|| Failure::Config("search needs --id".into()))?
        .parse::<TheoremId>()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let drop = drop.or(block.drop).ok_or_else(|| Failure::Config("search needs --drop".into()))?;
    if !(drop == 1 || drop == 2) {
        return Err(Failure::Config(format!("--drop must be 1 or 2, got {drop}")));
    }
    let family_path = match family {
        Some(p) => p.clone(),
        None => block
            .family
            .as_ref()
            .map(|p| ctx.cfg.resolve(p))
            .ok_or_else(|| Failure::Config("search needs --family".into()))?,
    };
    let family = FamilyFile::load(&family_path).map_err(Failure::Config)?;
    let (kind, src) = ctx
        .cfg
        .base_kind()
        .map_err(Failure::Config)?
        .ok_or_else(|| Failure::Config("a [base] block is required (pass --config)".into()))?;
    LifetimeModel::parse(kind, src, src).map_err(|e| Failure::Config(format!("[base] {e}")))?;
    let spec = SearchSpec {
        id,
        drop,
        base: Family::new("base", kind, src, vec![]),
        family,
        trials: trials.or(block.trials).unwrap_or(100),
        seed: ctx.seed.or(block.seed).unwrap_or(0),
    };
    let outcome = match search_counterexample(&spec, &ctx.settings) {
        Ok(o) => o,
        Err(Error::SearchInconclusive(d)) => {
            println!("inconclusive: {d}");
            return Err(Failure::Verdict("no admissible samples".into()));
        }
        Err(e) => return Err(e.into()),
    };
    println!("{}", outcome.diagnostics);
    println!(
        "{} admissible: {} with {} holding (sufficiency only), {} with it failing (hypothesis needed)",
        outcome.findings.len(),
        outcome.sufficiency().count(),
        id.class(),
        outcome.necessity().count()
    );
    for f in &outcome.findings {
        let theta: Vec<String> = outcome.columns.iter().zip(&f.theta).map(|(c, v)| format!("{c}={v:.6}")).collect();
        println!("  trial {:<5} {:<30} star {}", f.trial, theta.join(" "), f.star_verdict);
    }
    ctx.csv(|w| export::write_findings(&outcome, w))
}

fn export_curves(ctx: &Ctx) -> Outcome {
    let cm = ctx.composed()?;
    let grid = cm.grid(&cm.pinned(&ctx.settings))?;
    match &ctx.out {
        Some(_) => ctx.csv(|w| export::write_curves(&cm, &grid, w)),
        None => {
            let stdout = io::stdout();
            export::write_curves(&cm, &grid, stdout.lock())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx::new(cli.common)?;
    match &cli.command {
        Command::Validate => validate(&ctx),
        Command::Classify => classify(&ctx),
        Command::Theorems { id } => theorems(&ctx, id.as_deref()),
        Command::Catalog { action } => catalog(&ctx, action),
        Command::Search {
            id,
            drop,
            family,
            trials,
        } => search(&ctx, id.as_deref(), *drop, family.as_ref(), *trials),
        Command::Export => export_curves(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
