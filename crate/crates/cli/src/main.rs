use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use profnet::check::{
    corpus, creed_kit_check, creed_kit_violation, crosscheck, default_probes, Probe, CORPUS_MAX_LINKS, CORPUS_MAX_PARS,
};
use profnet::creed::Creed;
use profnet::defin::{
    definability_probes, extract_linking, oracle_from_structure, sequent_variables, verify_definability, Extraction,
    FamilyOracle, Linking, TabulatedOracle,
};
use profnet::grpd::{groupoid_from_json, DEFAULT_GROUP_BOUND};
use profnet::interp::{
    experiments_structured, Assignment, CreedAssignment, Layout, DEFAULT_EXPLICIT_BOUND, DEFAULT_ORBIT_BOUND,
};
use profnet::mll::{dr_check_mll, ProofStructure};
use profnet::Groupoid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "profnet", version, about = "Proof-structure correctness and definability checks")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// JSON file with default bounds: group_order, orbits, explicit, corpus_size.
    #[arg(long, env = "PROFNET_BOUNDS", global = true)]
    bounds: Option<PathBuf>,
    /// Largest endomorphism group accepted in assignments and probes.
    #[arg(long, global = true)]
    bound_group_order: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Danos–Regnier and semantic correctness of a structure.
    Check {
        structure: PathBuf,
        /// Probe catalog: a list of {"name", "creeds": {var: creed}}.
        #[arg(long)]
        probes: Option<PathBuf>,
    },
    /// Creed-kit criterion under one creed assignment.
    CheckCk {
        structure: PathBuf,
        /// {var: creed} with creeds in the {"groupoid", "at"} format.
        #[arg(long)]
        assignment: PathBuf,
    },
    /// Experiments of a structure under a groupoid assignment.
    Interpret {
        structure: PathBuf,
        /// {var: groupoid}.
        #[arg(long)]
        assignment: PathBuf,
    },
    /// Axiom linking of a family.
    Extract(OracleArgs),
    /// Extraction followed by comparison with the extracted structure.
    Verify(OracleArgs),
    /// Cross-check the two correctness criteria on a seeded corpus.
    Fuzz {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of structures (default from the bounds file, else 500).
        #[arg(long)]
        size: Option<usize>,
    },
}

#[derive(clap::Args, Debug)]
struct OracleArgs {
    /// Tabulated family JSON.
    #[arg(required_unless_present = "from_structure", conflicts_with = "from_structure")]
    oracle: Option<PathBuf>,
    /// Use the interpretation of this structure as the family.
    #[arg(long)]
    from_structure: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
struct Bounds {
    group_order: usize,
    orbits: usize,
    explicit: usize,
    corpus_size: usize,
}

impl Bounds {
    fn load(path: Option<&Path>, group_order: Option<usize>) -> Result<Self> {
        let mut b = Bounds {
            group_order: DEFAULT_GROUP_BOUND,
            orbits: DEFAULT_ORBIT_BOUND,
            explicit: DEFAULT_EXPLICIT_BOUND,
            corpus_size: 500,
        };
        if let Some(path) = path {
            let v = read_json(path)?;
            let field = |key: &str, slot: &mut usize| -> Result<()> {
                if let Some(x) = v.get(key) {
                    *slot = x.as_u64().with_context(|| format!("bound {key} must be a positive integer"))? as usize;
                }
                Ok(())
            };
            field("group_order", &mut b.group_order)?;
            field("orbits", &mut b.orbits)?;
            field("explicit", &mut b.explicit)?;
            field("corpus_size", &mut b.corpus_size)?;
        }
        if let Some(g) = group_order {
            b.group_order = g;
        }
        if [b.group_order, b.orbits, b.explicit, b.corpus_size].contains(&0) {
            bail!("bounds must be positive");
        }
        Ok(b)
    }

    fn admit(&self, name: &str, g: &Groupoid) -> Result<()> {
        let largest = g.iso_classes().reps.iter().map(|&r| g.end(r).len()).max().unwrap_or(1);
        if largest > self.group_order {
            bail!("{name}: endomorphism group of order {largest} exceeds the bound {}", self.group_order);
        }
        Ok(())
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_structure(path: &Path) -> Result<ProofStructure> {
    ProofStructure::from_json(&read_json(path)?).with_context(|| format!("structure {}", path.display()))
}

fn read_groupoids(path: &Path, bounds: &Bounds) -> Result<Assignment> {
    let v = read_json(path)?;
    let obj = v.as_object().context("assignment must be an object {var: groupoid}")?;
    let mut out = Assignment::new();
    for (var, g) in obj {
        let g = groupoid_from_json(g).with_context(|| format!("groupoid for {var}"))?;
        bounds.admit(var, &g)?;
        out.insert(var.clone(), g);
    }
    Ok(out)
}

fn read_creeds(v: &Value, bounds: &Bounds) -> Result<CreedAssignment> {
    let obj = v.as_object().context("creed assignment must be an object {var: creed}")?;
    let mut out = CreedAssignment::new();
    for (var, c) in obj {
        let (creed, _) = Creed::from_json(c).with_context(|| format!("creed for {var}"))?;
        bounds.admit(var, creed.groupoid())?;
        out.insert(var.clone(), creed);
    }
    Ok(out)
}

fn read_probes(path: &Path, bounds: &Bounds) -> Result<Vec<Probe>> {
    let v = read_json(path)?;
    let list = v.as_array().context("probe catalog must be a list")?;
    list.iter()
        .enumerate()
        .map(|(i, p)| {
            Ok(Probe {
                name: p.get("name").and_then(Value::as_str).map_or(format!("probe {i}"), str::to_string),
                creeds: read_creeds(p.get("creeds").context("probe without \"creeds\"")?, bounds)?,
            })
        })
        .collect()
}

fn load_oracle(args: &OracleArgs) -> Result<Box<dyn FamilyOracle>> {
    match (&args.from_structure, &args.oracle) {
        (Some(s), _) => Ok(Box::new(oracle_from_structure(&read_structure(s)?))),
        (None, Some(o)) => Ok(Box::new(TabulatedOracle::from_json(&read_json(o)?)?)),
        (None, None) => bail!("no family given"),
    }
}

/// Command result: the report and whether the verdict was positive.
struct Outcome {
    ok: bool,
    report: Value,
    text: String,
}

fn cmd_check(p: &ProofStructure, probes: Vec<Probe>) -> Result<Outcome> {
    let verdict = crosscheck(p, &probes)?;
    let mll = dr_check_mll(p);
    let mut report = verdict.to_json();
    report["dr_mll"] = json!(mll);
    report["structure"] = p.to_json();
    let mut text = format!(
        "MLL: {}\nMLL+Mix: {}\nsemantic: {} ({} probes, {} failed)\n",
        if mll { "correct" } else { "incorrect" },
        if verdict.dr_mix { "correct" } else { "incorrect" },
        if verdict.semantic { "correct" } else { "incorrect" },
        verdict.probes_run,
        verdict.failed_probes.len(),
    );
    if let Some(r) = &verdict.refutation {
        let j = r.to_json();
        text.push_str(&format!(
            "counterexample on {}: cycle {} through node {}, leaves {}\n",
            j["witness"]["group"], j["cycle"], j["node_n"], j["leaf_assignment"]
        ));
    }
    if !verdict.agrees() {
        text.push_str("DISAGREEMENT between the criteria\n");
    }
    Ok(Outcome {
        ok: verdict.dr_mix,
        report,
        text,
    })
}

fn cmd_check_ck(p: &ProofStructure, sigma: &CreedAssignment) -> Result<Outcome> {
    let holds = creed_kit_check(p, sigma)?;
    let groups = sigma.values().all(|c| c.groupoid().is_group());
    let violation = if groups && !holds { creed_kit_violation(p, sigma)? } else { None };
    let labels = violation.map(|v| {
        v.iter()
            .zip(p.occurrences())
            .map(|(&m, o)| sigma[&o.var].groupoid().label(m))
            .collect::<Vec<_>>()
    });
    let text = match &labels {
        None if holds => "creed-kit criterion holds\n".to_string(),
        None => "creed-kit criterion fails\n".to_string(),
        Some(l) => format!("creed-kit criterion fails; stabilizer element outside the creed: {l:?}\n"),
    };
    Ok(Outcome {
        ok: holds,
        report: json!({"holds": holds, "violation": labels}),
        text,
    })
}

fn cmd_interpret(p: &ProofStructure, sigma: &Assignment, bounds: &Bounds) -> Result<Outcome> {
    let block = experiments_structured(p, sigma, bounds.orbits)?;
    let size = Layout::new(p.sequent(), sigma).map(|l| l.groupoid().num_morphisms()).ok();
    let mut report = block.to_json();
    report["num_orbits"] = json!(block.num_orbits());
    report["target_morphisms"] = json!(size);
    let mut text = format!("{} orbit(s)\n", block.num_orbits());
    for (i, o) in block.orbits.iter().enumerate() {
        text.push_str(&format!("orbit {i} at leaf objects {:?}\n", o.base));
        for b in &o.blocks {
            let leaves: Vec<usize> = b.leaves.iter().map(|l| l + 1).collect();
            let elems: Vec<String> = b
                .elems
                .iter()
                .map(|t| {
                    let parts: Vec<String> = t.iter().zip(&b.leaves).map(|(&m, &l)| block.leaves[l].label(m)).collect();
                    format!("({})", parts.join(","))
                })
                .collect();
            text.push_str(&format!("  leaves {leaves:?}: {}\n", elems.join(" ")));
        }
    }
    Ok(Outcome { ok: true, report, text })
}

fn cmd_extract(oracle: &dyn FamilyOracle) -> Result<(Outcome, Option<Linking>)> {
    Ok(match extract_linking(oracle)? {
        Extraction::Linked(l) => {
            let report = l.to_json();
            let text = format!("links {}\n", report["links"]);
            (Outcome { ok: true, report, text }, Some(l))
        }
        Extraction::Rejected(d) => {
            let message = d.message();
            (
                Outcome {
                    ok: false,
                    report: json!({"rejected": message}),
                    text: format!("{message}\n"),
                },
                None,
            )
        }
    })
}

fn cmd_verify(oracle: &dyn FamilyOracle, bounds: &Bounds) -> Result<Outcome> {
    let (extracted, linking) = cmd_extract(oracle)?;
    let Some(linking) = linking else {
        return Ok(extracted);
    };
    let vars = sequent_variables(oracle.sequent());
    let report = verify_definability(oracle, &linking, &definability_probes(&vars), bounds.explicit)?;
    let ok = report.all_isomorphic();
    let mut text = extracted.text;
    for p in &report.probes {
        let verdict = match (p.method, p.isomorphic) {
            ("skipped", _) => "skipped",
            (_, true) => "isomorphic",
            (_, false) => "MISMATCH",
        };
        text.push_str(&format!("  {:<24} {:<9} {verdict}", p.name, p.method));
        if let Some(d) = &p.detail {
            text.push_str(&format!(" ({d})"));
        }
        text.push('\n');
    }
    text.push_str(if ok { "isomorphic at all probes\n" } else { "not isomorphic at every probe\n" });
    Ok(Outcome {
        ok,
        report: report.to_json(),
        text,
    })
}

fn cmd_fuzz(seed: u64, size: usize) -> Result<Outcome> {
    let structures = corpus(seed, size);
    let (mut correct, mut fallbacks) = (0, 0);
    let mut discrepancies: Vec<ProofStructure> = Vec::new();
    for p in &structures {
        let verdict = crosscheck(p, &default_probes(&p.variables()))?;
        correct += verdict.dr_mix as usize;
        fallbacks += verdict.refutation.as_ref().is_some_and(|r| r.primary_failure.is_some()) as usize;
        if !verdict.agrees() {
            discrepancies.push(p.clone());
        }
    }
    // Smallest failing structure first.
    discrepancies.sort_by_key(|p| (p.link_pairs().len(), p.occurrences().len()));
    let reproducer = discrepancies.first().map(ProofStructure::to_json);
    let max_links = structures.iter().map(|p| p.link_pairs().len()).max().unwrap_or(0);
    let report = json!({
        "seed": seed,
        "structures": structures.len(),
        "correct": correct,
        "incorrect": structures.len() - correct,
        "max_links": max_links,
        "bounds": {"links": CORPUS_MAX_LINKS, "pars": CORPUS_MAX_PARS},
        "fallback_witnesses": fallbacks,
        "discrepancies": discrepancies.len(),
        "reproducer": reproducer,
    });
    let mut text = format!(
        "{} structures (seed {seed}): {correct} correct, {} incorrect, {} discrepancies\n",
        structures.len(),
        structures.len() - correct,
        discrepancies.len()
    );
    if let Some(r) = &reproducer {
        text.push_str(&format!("smallest reproducer: {r}\n"));
    }
    Ok(Outcome {
        ok: discrepancies.is_empty(),
        report,
        text,
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let bounds = Bounds::load(cli.bounds.as_deref(), cli.bound_group_order)?;
    match &cli.command {
        Command::Check { structure, probes } => {
            let p = read_structure(structure)?;
            let probes = match probes {
                Some(path) => read_probes(path, &bounds)?,
                None => default_probes(&p.variables()),
            };
            cmd_check(&p, probes)
        }
        Command::CheckCk { structure, assignment } => {
            let p = read_structure(structure)?;
            cmd_check_ck(&p, &read_creeds(&read_json(assignment)?, &bounds)?)
        }
        Command::Interpret { structure, assignment } => {
            let p = read_structure(structure)?;
            cmd_interpret(&p, &read_groupoids(assignment, &bounds)?, &bounds)
        }
        Command::Extract(args) => Ok(cmd_extract(load_oracle(args)?.as_ref())?.0),
        Command::Verify(args) => cmd_verify(load_oracle(args)?.as_ref(), &bounds),
        Command::Fuzz { seed, size } => cmd_fuzz(*seed, size.unwrap_or(bounds.corpus_size)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&outcome.report).expect("JSON values serialize")),
                Format::Text => print!("{}", outcome.text),
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
