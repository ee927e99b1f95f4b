use std::fmt;
use std::fs;

use gfcube_core::attack::{
    online, preprocess, FixedKey, KeyedBlackBox, PreStatus, PreprocessConfig, RecordFile,
};
use gfcube_core::diff::delta_plan;
use gfcube_core::linalg::Solution;
use gfcube_core::poly::parse_element;
use gfcube_core::targets::{DegreeProfile, TargetSpec};
use gfcube_core::{
    degree_after_diff, verify as checks, DegreeBound, DiffPlan, Field, FieldElement, Monomial,
    MultiPoly,
};

use crate::{
    AttackOnlineArgs, AttackPreArgs, DegreeBoundArgs, DiffArgs, MakeTargetArgs, VerifyArgs,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit status 2.
    Input(String),
    /// Stopped without a full-rank system: exit status 3.
    Rank(String),
    /// A check or invariant failed: exit status 4.
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Rank(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Rank(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

fn input<E: fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn emit(out: Option<&str>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("{path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_field(text: &str) -> Result<Field, CliError> {
    text.parse()
        .map_err(|e| CliError::Input(format!("field `{text}`: {e}")))
}

fn parse_elements(field: &Field, text: &str) -> Result<Vec<FieldElement>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            let s = s
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .unwrap_or(s);
            parse_element(field, &format!("({s})")).map_err(input)
        })
        .collect()
}

fn single_term(field: &Field, nvars: usize, text: &str) -> Result<Monomial, CliError> {
    Monomial::parse(field, nvars, text).map_err(|e| CliError::Input(format!("plan: {e}")))
}

pub fn diff(args: DiffArgs) -> Result<(), CliError> {
    let field = parse_field(&args.field)?;
    let text = match args.poly.strip_prefix('@') {
        Some(path) => read(path)?,
        None => args.poly.clone(),
    };
    // folding never drops a variable, so this gives the plan's arity
    let plan_vars = MultiPoly::parse(&field, &args.plan).map_err(input)?.nvars();
    let f0 = MultiPoly::parse(&field, text.trim()).map_err(input)?;
    let n = f0.nvars().max(plan_vars);
    let f = f0.with_nvars(n).map_err(input)?;
    let term = single_term(&field, n, &args.plan)?;
    let plan = match &args.steps {
        None => DiffPlan::for_term(&field, &term).map_err(input)?,
        Some(steps) => {
            let vars = term.support();
            let groups: Vec<&str> = steps.split(';').collect();
            if groups.len() != vars.len() {
                return Err(CliError::Input(format!(
                    "{} step groups for {} plan variables",
                    groups.len(),
                    vars.len()
                )));
            }
            let mut lists = Vec::new();
            for (&v, g) in vars.iter().zip(groups) {
                let hs = parse_elements(&field, g)?;
                if hs.len() as u64 != term.exponents()[v] {
                    return Err(CliError::Input(format!(
                        "x{} has multiplicity {} but {} steps",
                        v + 1,
                        term.exponents()[v],
                        hs.len()
                    )));
                }
                lists.push(hs);
            }
            DiffPlan::with_steps(&field, vars, lists).map_err(input)?
        }
    };
    let g = delta_plan(&f, &plan).map_err(input)?;
    emit(args.out.as_deref(), &format!("{g}\n"))
}

pub fn degree_bound(args: DegreeBoundArgs) -> Result<(), CliError> {
    let field = parse_field(&args.field)?;
    let text = match degree_after_diff(args.d, args.k, field.characteristic()) {
        DegreeBound::Degree(b) => b.to_string(),
        DegreeBound::IdenticallyZero => "zero".to_string(),
    };
    println!("{text}");
    Ok(())
}

pub fn make_target(args: MakeTargetArgs) -> Result<(), CliError> {
    let field = parse_field(&args.field)?;
    let key = args
        .key
        .as_deref()
        .map(|k| parse_elements(&field, k))
        .transpose()?;
    let spec = match args.kind.as_str() {
        "planted" => {
            let cube = args
                .cube
                .as_deref()
                .map(|c| single_term(&field, args.n_pub, c))
                .transpose()?;
            TargetSpec::Planted {
                field,
                n_pub: args.n_pub,
                n_sec: args.n_sec,
                profile: DegreeProfile {
                    degree: args.degree,
                    noise_terms: args.noise_terms,
                    cube,
                },
                seed: args.seed,
                key,
            }
        }
        "toy" => TargetSpec::Toy {
            field,
            width: args.width,
            rounds: args.rounds,
            seed: args.seed,
            key,
        },
        other => return Err(CliError::Input(format!("unknown target kind `{other}`"))),
    };
    // construct once so infeasible profiles are reported now
    spec.build().map_err(input)?;
    emit(
        args.out.as_deref(),
        &format!("# gfcube target seed={}\n{spec}\n", args.seed),
    )
}

fn load_target(path: &str) -> Result<TargetSpec, CliError> {
    TargetSpec::parse(&read(path)?).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

pub fn attack_pre(args: AttackPreArgs) -> Result<(), CliError> {
    let spec = load_target(&args.target)?;
    let (target, _) = spec.build().map_err(input)?;
    if args.budget == 0 {
        return Err(CliError::Input("budget must be positive".into()));
    }
    let config = PreprocessConfig {
        budget: args.budget,
        max_total_mult: args.max_mult,
        trials: args.trials,
        seed: args.seed,
        jobs: args.jobs,
    };
    let outcome = preprocess(&target, &config).map_err(|e| CliError::Internal(e.to_string()))?;
    let file = RecordFile {
        field: spec.field().clone(),
        n_pub: target.n_pub(),
        n_sec: target.n_sec(),
        seed: args.seed,
        records: outcome.records.clone(),
    };
    emit(args.out.as_deref(), &file.to_text())?;
    let status = match outcome.status {
        PreStatus::FullRank => "full rank",
        PreStatus::BudgetExhausted => "budget exhausted",
        PreStatus::CandidatesExhausted => "candidates exhausted",
    };
    eprintln!(
        "terms tried: {}\nevaluations: {}\nrank: {}/{}\nstatus: {status}",
        outcome.terms_tried,
        outcome.evaluations,
        outcome.rank(),
        target.n_sec()
    );
    if outcome.status == PreStatus::FullRank {
        Ok(())
    } else {
        Err(CliError::Rank(format!(
            "rank {} of {} after preprocessing ({status})",
            outcome.rank(),
            target.n_sec()
        )))
    }
}

pub fn attack_online(args: AttackOnlineArgs) -> Result<(), CliError> {
    let spec = load_target(&args.target)?;
    let (target, key) = spec.build().map_err(input)?;
    let file = RecordFile::parse(&read(&args.records)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.records)))?;
    if file.field != *spec.field() || file.n_pub != target.n_pub() || file.n_sec != target.n_sec() {
        return Err(CliError::Input(
            "record file does not match the target".into(),
        ));
    }
    let field = spec.field();
    let fixed = FixedKey::new(&target, key.clone());
    let outcome =
        online(&fixed, &file.records, file.n_sec).map_err(|e| CliError::Internal(e.to_string()))?;
    let show = |v: &[FieldElement]| {
        v.iter()
            .map(|&x| field.format_element(x))
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut text = format!("rank: {}/{}\n", outcome.rank, file.n_sec);
    text.push_str(&format!("evaluations: {}\n", outcome.evaluations));
    let result = match &outcome.solution {
        Solution::Unique(found) => {
            text.push_str(&format!("key: {}\n", show(found)));
            if *found == key {
                text.push_str("matches target key: yes\n");
                Ok(())
            } else {
                text.push_str("matches target key: no\n");
                Err(CliError::Internal(
                    "recovered key differs from the target key".into(),
                ))
            }
        }
        Solution::Parametrized {
            particular, free, ..
        } => {
            let vars: Vec<String> = free.iter().map(|i| format!("x{}", i + 1)).collect();
            text.push_str(&format!("particular: {}\n", show(particular)));
            text.push_str(&format!("free: {}\n", vars.join(",")));
            text.push_str(&format!(
                "exhaustive search needed over {} secret variables\n",
                outcome.unknowns(file.n_sec)
            ));
            Err(CliError::Rank(format!(
                "rank {} of {}",
                outcome.rank, file.n_sec
            )))
        }
        Solution::Inconsistent { row } => {
            let term = file.records[*row].term.to_text();
            text.push_str(&format!("inconsistent: record {} (term {term})\n", row + 1));
            Err(CliError::Internal(format!(
                "record {} (term {term}) contradicts the others",
                row + 1
            )))
        }
    };
    emit(args.out.as_deref(), &text)?;
    result
}

pub fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let reports = checks::run_all(args.seed, args.scale.max(1));
    let mut text = format!(
        "# gfcube verify seed={} scale={}\n",
        args.seed,
        args.scale.max(1)
    );
    for r in &reports {
        text.push_str(&format!("{r}\n"));
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    text.push_str(&format!(
        "{} of {} checks passed\n",
        reports.len() - failed,
        reports.len()
    ));
    emit(args.out.as_deref(), &text)?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Internal(format!("{failed} checks failed")))
    }
}
