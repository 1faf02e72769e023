use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bptsp_core::certificate::Builder;
use bptsp_core::comb::require_valid;
use bptsp_core::constraints::MAX_ENUMERATION_CAP;
use bptsp_core::experiments::{paper_tables, run_search, SearchConfig};
use bptsp_core::gen::{CombTarget, GenParams};
use bptsp_core::golden::Table2Variant;
use bptsp_core::graph::approx;
use bptsp_core::io::{load_instance, CertificateFile, CombFile, InstanceFile};
use bptsp_core::{
    build, check_point, classify, comb_inequality, facet_test, format_rational, is_implied, verify,
    BipartiteInstance, BuilderChoice, Comb, DegreeMode, FacetVerdict, FractionalPoint, Implication, ImpliedOptions,
    Rational, SecOptions,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod text;

#[derive(Parser, Debug)]
#[command(name = "bptsp", version, about = "Exact comb-inequality tools for bipartite TSP relaxations")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Le,
    Eq,
}

impl From<ModeArg> for DegreeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Le => DegreeMode::Le,
            ModeArg::Eq => DegreeMode::Eq,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BuilderArg {
    Auto,
    L1,
    L2,
    L3,
    T1,
    T2,
}

impl From<BuilderArg> for BuilderChoice {
    fn from(b: BuilderArg) -> Self {
        match b {
            BuilderArg::Auto => BuilderChoice::Auto,
            BuilderArg::L1 => BuilderChoice::Only(Builder::L1),
            BuilderArg::L2 => BuilderChoice::Only(Builder::L2),
            BuilderArg::L3 => BuilderChoice::Only(Builder::L3),
            BuilderArg::T1 => BuilderChoice::Only(Builder::T1),
            BuilderArg::T2 => BuilderChoice::Only(Builder::T2),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    Random,
    Fixed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a point against degree, bound and subtour-elimination constraints.
    VerifyPoint {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Le)]
        mode: ModeArg,
        /// Refuse instances with more vertices than this.
        #[arg(long, default_value_t = 24)]
        max_vertices: usize,
    },
    /// Report the intersection pattern and which implication results apply.
    Classify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        comb: PathBuf,
    },
    /// Build and verify a dominance certificate for a comb.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        comb: PathBuf,
        #[arg(long, value_enum, default_value_t = BuilderArg::Auto)]
        builder: BuilderArg,
        /// Also write the certificate JSON here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Independently verify a certificate file.
    VerifyCert {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Maximize the comb left-hand side over the relaxation with an exact LP.
    Implied {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        comb: PathBuf,
        /// Add subtour constraints on demand instead of all at once.
        #[arg(long)]
        lazy: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Le)]
        mode: ModeArg,
    },
    /// Test whether the comb inequality defines a facet of the tour polytope.
    Facet {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        comb: PathBuf,
    },
    /// Recompute the two bundled worked examples.
    PaperTables {
        #[arg(long, default_value = "corrected")]
        table2: Table2Variant,
    },
    /// Random comb search: certify covered combs, LP-check the rest.
    Search {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Second class size; defaults to `n`.
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value = "any")]
        target: CombTarget,
        #[arg(long, default_value_t = 2)]
        tooth_min: usize,
        #[arg(long, default_value_t = 4)]
        tooth_max: usize,
        #[arg(long, default_value_t = 5)]
        max_teeth: usize,
        #[arg(long, value_enum, default_value_t = OrientationArg::Random)]
        orientation: OrientationArg,
        /// Also run the LP on combs that a builder covers.
        #[arg(long)]
        lp_covered: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Le)]
        mode: ModeArg,
        /// Write the findings JSON here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Outcome of a command: the report and whether the checked property held.
struct Report {
    json: Value,
    text: String,
    confirmed: bool,
}

pub(crate) fn num(r: &Rational) -> Value {
    json!({ "exact": format_rational(r), "approx": approx(r) })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn instance_from(path: &Path) -> Result<(BipartiteInstance, FractionalPoint)> {
    load_instance(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn comb_from(path: &Path, instance: &BipartiteInstance) -> Result<Comb> {
    let comb = CombFile::parse(&read(path)?)
        .and_then(|f| f.build(instance))
        .with_context(|| format!("in {}", path.display()))?;
    require_valid(instance, &comb).with_context(|| format!("in {}", path.display()))?;
    Ok(comb)
}

fn verify_point(instance: &Path, mode: ModeArg, max_vertices: usize) -> Result<Report> {
    let (inst, point) = instance_from(instance)?;
    if max_vertices > MAX_ENUMERATION_CAP {
        bail!("--max-vertices may be at most {MAX_ENUMERATION_CAP}");
    }
    let rep = check_point(&inst, &point, mode.into(), &SecOptions::with_cap(max_vertices))?;
    let violations: Vec<Value> = rep
        .violations
        .iter()
        .map(|v| {
            json!({
                "kind": v.inequality.kind.to_string(),
                "on": v.inequality.provenance.describe(&inst),
                "lhs": num(&v.value),
                "rhs": num(&v.inequality.rhs),
                "inequality": v.inequality.describe(&inst),
            })
        })
        .collect();
    let json = json!({
        "feasible": rep.feasible,
        "constraints_checked": rep.checked.to_string(),
        "violations": violations,
    });
    Ok(Report { text: text::verify_point(&rep, &inst), json, confirmed: rep.feasible })
}

fn classify_cmd(instance: &Path, comb: &Path) -> Result<Report> {
    let (inst, _) = instance_from(instance)?;
    let comb = comb_from(comb, &inst)?;
    let class = classify(&inst, &comb)?;
    let patterns = bptsp_core::comb::Orientation::BOTH
        .iter()
        .map(|o| bptsp_core::pattern_for(&inst, &comb, *o))
        .collect::<bptsp_core::Result<Vec<_>>>()?;
    let json = json!({
        "t": comb.t(),
        "hypotheses": class.matched().iter().map(|h| h.to_string()).collect::<Vec<_>>(),
        "lemma1": class.lemma1,
        "lemma2": class.lemma2,
        "lemma3": class.lemma3,
        "theorem1": class.theorem1,
        "theorem2": class.theorem2,
        "theorem1_condition": class.theorem1_condition.iter().map(|c| json!({
            "orientation": c.orientation.to_string(),
            "w": c.w,
            "bound": num(&c.rhs),
            "holds": c.holds,
        })).collect::<Vec<_>>(),
        "patterns": patterns.iter().map(|p| json!({
            "orientation": p.orientation.to_string(),
            "p": p.p, "q": p.q, "s": p.s, "r": p.r, "w": p.w, "y": p.y,
            "tooth_order": p.order,
        })).collect::<Vec<_>>(),
        "notes": class.notes,
    });
    Ok(Report { text: text::classify(&class, &patterns), json, confirmed: true })
}

fn certificate_json(inst: &BipartiteInstance, cert: &bptsp_core::Certificate, rep: &bptsp_core::CertificateReport) -> Value {
    let witness = rep.witness.as_ref().map(|w| match w {
        bptsp_core::Witness::Edge { edge, required, covered } => json!({
            "edge": inst.edge_label(*edge), "required": num(required), "covered": num(covered),
        }),
        bptsp_core::Witness::Rhs { aggregate, target } => json!({
            "aggregate_rhs": num(aggregate), "target_rhs": num(target),
        }),
    });
    json!({
        "dominates": rep.dominates,
        "builder": cert.builder.to_string(),
        "orientation": cert.orientation.to_string(),
        "aggregate_rhs": num(&rep.aggregate_rhs),
        "target_rhs": num(&rep.target_rhs),
        "slack": num(&rep.slack),
        "witness": witness,
        "certificate": serde_json::to_value(CertificateFile::from_certificate(inst, cert)).expect("serializable"),
    })
}

fn certify(instance: &Path, comb: &Path, builder: BuilderArg, output: Option<&Path>) -> Result<Report> {
    let (inst, _) = instance_from(instance)?;
    let comb = comb_from(comb, &inst)?;
    let cert = match build(&inst, &comb, builder.into()) {
        Ok(c) => c,
        Err(e @ bptsp_core::Error::HypothesisNotMet { .. }) => {
            let class = classify(&inst, &comb)?;
            let json = json!({ "certified": false, "reason": e.to_string(), "notes": class.notes });
            return Ok(Report { text: format!("not certified: {e}\n"), json, confirmed: false });
        }
        Err(e) => return Err(e.into()),
    };
    let rep = verify(&inst, &cert)?;
    if let Some(path) = output {
        fs::write(path, CertificateFile::from_certificate(&inst, &cert).to_json())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let mut json = certificate_json(&inst, &cert, &rep);
    json["certified"] = json!(rep.dominates);
    Ok(Report { text: text::certificate(&inst, &cert, &rep), json, confirmed: rep.dominates })
}

fn verify_cert(instance: &Path, cert: &Path) -> Result<Report> {
    let (inst, _) = instance_from(instance)?;
    let cert = CertificateFile::parse(&read(cert)?)
        .and_then(|f| f.build(&inst))
        .with_context(|| format!("in {}", cert.display()))?;
    let rep = verify(&inst, &cert)?;
    Ok(Report {
        text: text::certificate(&inst, &cert, &rep),
        json: certificate_json(&inst, &cert, &rep),
        confirmed: rep.dominates,
    })
}

fn implied(instance: &Path, comb: &Path, lazy: bool, mode: ModeArg) -> Result<Report> {
    let (inst, _) = instance_from(instance)?;
    let comb = comb_from(comb, &inst)?;
    let target = comb_inequality(&inst, &comb)?;
    let opts = ImpliedOptions { mode: mode.into(), lazy, secs: SecOptions::default() };
    let rep = is_implied(&inst, &target, &opts)?;
    let mut json = json!({
        "rhs": num(&target.rhs),
        "rounds": rep.rounds,
        "constraints": rep.constraints,
    });
    match &rep.outcome {
        Implication::Implied { optimum, dual } => {
            json["status"] = json!("implied");
            json["optimum"] = num(optimum);
            json["dual_certificate"] = dual
                .terms
                .iter()
                .map(|(ineq, y)| {
                    json!({
                        "multiplier": num(y),
                        "kind": ineq.kind.to_string(),
                        "on": ineq.provenance.describe(&inst),
                        "inequality": ineq.describe(&inst),
                    })
                })
                .collect();
        }
        Implication::Violated { optimum, witness } => {
            json["status"] = json!("violated");
            json["optimum"] = num(optimum);
            json["excess"] = num(&(optimum - &target.rhs));
            json["witness"] = serde_json::to_value(InstanceFile::from_parts(&inst, witness))?;
        }
        Implication::RelaxationInfeasible => json["status"] = json!("relaxation-infeasible"),
    }
    Ok(Report { text: text::implied(&inst, &target, &rep), json, confirmed: rep.is_implied() })
}

fn facet(instance: &Path, comb: &Path) -> Result<Report> {
    let (inst, _) = instance_from(instance)?;
    let comb = comb_from(comb, &inst)?;
    let target = comb_inequality(&inst, &comb)?;
    let rep = facet_test(&inst, &target)?;
    let certified = build(&inst, &comb, BuilderChoice::Auto)
        .ok()
        .and_then(|c| verify(&inst, &c).ok())
        .map(|r| r.dominates)
        .unwrap_or(false);
    let json = json!({
        "verdict": format!("{:?}", rep.verdict),
        "polytope_dim": rep.polytope_dim,
        "tour_count": rep.tour_count,
        "tight_tour_count": rep.tight_tour_count,
        "tight_face_dim": rep.tight_face_dim,
        "violating_tours": rep.violating_tours,
        "certified": certified,
    });
    let text = text::facet(&rep, certified);
    Ok(Report { text, json, confirmed: rep.verdict != FacetVerdict::NotValid })
}

fn paper_tables_cmd(variant: Table2Variant) -> Result<Report> {
    let rep = paper_tables(variant)?;
    let tables: Vec<Value> = rep
        .tables
        .iter()
        .map(|t| {
            json!({
                "name": t.name,
                "feasible": t.feasible,
                "violations": t.violations,
                "constraints_checked": t.constraints_checked.to_string(),
                "hand_weight": num(&t.hand_weight),
                "teeth_weights": t.teeth_weights.iter().map(num).collect::<Vec<_>>(),
                "lhs": num(&t.lhs),
                "rhs": num(&t.rhs),
                "violation": num(&t.excess()),
                "expected_lhs": num(&t.expected_lhs),
                "expected_rhs": num(&t.expected_rhs),
                "hypotheses": t.class.matched().iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                "theorem1_condition": t.class.theorem1_condition.iter().map(|c| json!({
                    "orientation": c.orientation.to_string(), "holds": c.holds,
                })).collect::<Vec<_>>(),
                "reproduced": t.reproduced(),
                "mismatches": t.mismatches,
            })
        })
        .collect();
    let json = json!({ "ok": rep.ok(), "tables": tables, "notes": rep.notes });
    Ok(Report { text: text::paper_tables(&rep), json, confirmed: rep.ok() })
}

#[allow(clippy::too_many_arguments)]
fn search(
    seed: u64,
    n: usize,
    n2: Option<usize>,
    samples: usize,
    target: CombTarget,
    tooth: (usize, usize),
    max_teeth: usize,
    orientation: OrientationArg,
    lp_covered: bool,
    mode: ModeArg,
    output: Option<&Path>,
) -> Result<Report> {
    if tooth.0 < 2 || tooth.0 > tooth.1 {
        bail!("tooth sizes need 2 <= --tooth-min <= --tooth-max");
    }
    let config = SearchConfig {
        seed,
        n1: n,
        n2: n2.unwrap_or(n),
        samples,
        target,
        gen: GenParams {
            tooth_size: tooth,
            max_teeth,
            random_orientation: matches!(orientation, OrientationArg::Random),
            ..GenParams::default()
        },
        mode: mode.into(),
        lp_for_covered: lp_covered,
    };
    let rep = run_search(&config)?;
    let contradictions = rep.contradictions().len();
    let json = serde_json::to_value(&rep)?;
    if let Some(path) = output {
        fs::write(path, serde_json::to_string_pretty(&json)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let text = text::search(&rep);
    let json = if output.is_some() { json!({ "summary": rep.summary, "contradictions": contradictions }) } else { json };
    Ok(Report { text, json, confirmed: contradictions == 0 })
}

fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::VerifyPoint { instance, mode, max_vertices } => verify_point(instance, *mode, *max_vertices),
        Command::Classify { instance, comb } => classify_cmd(instance, comb),
        Command::Certify { instance, comb, builder, output } => {
            certify(instance, comb, *builder, output.as_deref())
        }
        Command::VerifyCert { instance, cert } => verify_cert(instance, cert),
        Command::Implied { instance, comb, lazy, mode } => implied(instance, comb, *lazy, *mode),
        Command::Facet { instance, comb } => facet(instance, comb),
        Command::PaperTables { table2 } => paper_tables_cmd(*table2),
        Command::Search {
            seed,
            n,
            n2,
            samples,
            target,
            tooth_min,
            tooth_max,
            max_teeth,
            orientation,
            lp_covered,
            mode,
            output,
        } => search(
            *seed,
            *n,
            *n2,
            *samples,
            *target,
            (*tooth_min, *tooth_max),
            *max_teeth,
            *orientation,
            *lp_covered,
            *mode,
            output.as_deref(),
        ),
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(rep) => {
            match cli.format {
                Format::Json => emit(&(serde_json::to_string_pretty(&rep.json).expect("json value") + "\n")),
                Format::Text => emit(&rep.text),
            }
            if rep.confirmed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            match cli.format {
                Format::Json => {
                    let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
                    emit(&(serde_json::to_string_pretty(&json!({ "error": chain })).expect("json value") + "\n"));
                }
                Format::Text => eprintln!("error: {e:#}"),
            }
            ExitCode::from(2)
        }
    }
}
