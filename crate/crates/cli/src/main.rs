use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use reid_basket::{
    classify, closure, gamma, r_index, r_max, sigma, sigma_prime, verify_all, verify_table,
    B2Spec, Basket, BoundCase, BranchPolicy, CanonicalSequence, ClassificationConstraints,
    ClassifyError, ClassifyOptions, ClosureOptions, Execution, FilterConfig, FixtureSource,
    Level, N1Policy, Plurigenera, PruneClause, Rational, SameLeaf, Split, TableReport,
    WeightedBasket, DEFAULT_STATE_LIMIT,
};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TRUNCATED: u8 = 3;

#[derive(Parser)]
#[command(name = "reid-basket", version, about = "Exact basket calculus for terminal weak Q-Fano 3-folds")]
struct Cli {
    /// Output layout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One tab-separated `key=value` record per line.
    Records,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants and anti-plurigenera of a weighted basket.
    Eval {
        #[arg(long, value_parser = parse_basket, allow_hyphen_values = true)]
        basket: Basket,
        #[arg(long)]
        p1: u32,
        #[arg(long, default_value_t = 24)]
        upto: u32,
    },
    /// The canonical sequence B(0), B(5), B(6), ... and its epsilon values.
    Canonical {
        #[arg(long, value_parser = parse_basket)]
        basket: Basket,
        /// Comma-separated levels to print instead of the full sequence.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<u32>>,
    },
    /// Baskets reachable by packing, under the given bounds.
    Pack {
        #[arg(long, value_parser = parse_basket)]
        basket: Basket,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        gamma_min: Rational,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        k3_max: Option<Rational>,
        /// P[-1] used for the volume bound.
        #[arg(long, default_value_t = 0)]
        p1: u32,
        #[arg(long)]
        coprime_only: bool,
        /// Stop with exit code 3 after visiting this many baskets.
        #[arg(long, default_value_t = DEFAULT_STATE_LIMIT)]
        state_limit: usize,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Every weighted basket meeting a constraint file.
    Classify {
        #[arg(long)]
        constraints: PathBuf,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Birationality bounds for a weighted basket.
    Criteria {
        #[arg(long, value_parser = parse_basket)]
        basket: Basket,
        #[arg(long)]
        p1: u32,
        /// Space or comma separated: case=N alt=N n1=single|windowN
        /// split=K/CASE/LEAF (LEAF: caseN or b2:N0) b2=N0[@MU] filter=default|none horizon=N
        #[arg(long)]
        policy: Option<String>,
    },
    /// Check the bundled tables against recomputed values.
    Verify {
        #[arg(long, conflicts_with = "all")]
        table: Option<u32>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        jobs: Jobs,
    },
}

#[derive(Args)]
struct Jobs {
    /// Worker threads; 1 runs sequentially, 0 or absent uses every core.
    #[arg(long)]
    jobs: Option<usize>,
}

impl Jobs {
    fn execution(&self) -> Execution {
        self.jobs.map_or_else(Execution::default, Execution::from_jobs)
    }
}

fn parse_basket(s: &str) -> Result<Basket, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e| format!("{e}"))
}

/// An error that maps to a specific exit code.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Exit(EXIT_USAGE, msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(&cli, &mut out);
    print!("{out}");
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Exit>() {
                Some(Exit(code, _)) => ExitCode::from(*code),
                None => ExitCode::FAILURE,
            }
        }
    }
}

fn run(cli: &Cli, out: &mut String) -> Result<u8> {
    let records = cli.format == Format::Records;
    match &cli.command {
        Command::Eval { basket, p1, upto } => eval(out, basket, *p1, *upto, records),
        Command::Canonical { basket, levels } => canonical(out, basket, levels.as_deref(), records),
        Command::Pack {
            basket,
            gamma_min,
            k3_max,
            p1,
            coprime_only,
            state_limit,
            jobs,
        } => {
            let mut prune = vec![PruneClause::GammaAtLeast(gamma_min.clone())];
            if let Some(bound) = k3_max {
                prune.push(PruneClause::K3AtMost {
                    p1: *p1,
                    bound: bound.clone(),
                });
            }
            let options = ClosureOptions {
                prune,
                coprime_only: *coprime_only,
                state_limit: *state_limit,
                execution: jobs.execution(),
            };
            let all = closure(basket, &options).map_err(|e| Exit(EXIT_TRUNCATED, e.to_string()))?;
            for b in all {
                let k3 = WeightedBasket::new(b.clone(), *p1).anti_volume().clone();
                if records {
                    writeln!(out, "basket={b}\tgamma={}\tk3={k3}", gamma(&b))?;
                } else {
                    writeln!(out, "{b}\t{}\t{k3}", gamma(&b))?;
                }
            }
            Ok(0)
        }
        Command::Classify { constraints, jobs } => {
            let text = std::fs::read_to_string(constraints)
                .with_context(|| format!("reading {}", constraints.display()))?;
            let c: ClassificationConstraints = text.parse().map_err(|e| usage(format!("{e}")))?;
            let found = classify(
                &c,
                ClassifyOptions {
                    execution: jobs.execution(),
                },
            )
            .map_err(|e| match e {
                ClassifyError::Constraint(e) => usage(e.to_string()),
                ClassifyError::Truncated(t) => Exit(EXIT_TRUNCATED, t.to_string()).into(),
            })?;
            for wb in found {
                let b = wb.basket();
                let rmax = r_max(b).map_or_else(|_| "-".to_string(), |r| r.to_string());
                if records {
                    writeln!(
                        out,
                        "basket={b}\tp1={}\tk3={}\trx={}\trmax={rmax}",
                        wb.p1(),
                        wb.anti_volume(),
                        r_index(b)
                    )?;
                } else {
                    writeln!(out, "{b}\t{}\t{}\t{}\t{rmax}", wb.p1(), wb.anti_volume(), r_index(b))?;
                }
            }
            Ok(0)
        }
        Command::Criteria { basket, p1, policy } => {
            let policy = parse_policy(*p1, policy.as_deref().unwrap_or(""))?;
            let wb = WeightedBasket::new(basket.clone(), *p1);
            let report = reid_basket::table_pipeline(&wb, &policy)
                .map_err(|e| anyhow!("{e}"))?;
            out.push_str(&if records {
                report.to_records()
            } else {
                report.to_text()
            });
            Ok(0)
        }
        Command::Verify { table, all, jobs } => {
            let source = FixtureSource::from_env();
            let reports: Vec<TableReport> = match (table, all) {
                (Some(id), _) => vec![verify_table(&source, *id, jobs.execution())?],
                (None, _) => verify_all(&source, jobs.execution())?,
            };
            let mut code = 0;
            for r in &reports {
                out.push_str(&if records { r.to_records() } else { r.to_text() });
                if !r.passed() {
                    code = EXIT_MISMATCH;
                }
            }
            Ok(code)
        }
    }
}

fn eval(out: &mut String, basket: &Basket, p1: u32, upto: u32, records: bool) -> Result<u8> {
    let wb = WeightedBasket::new(basket.clone(), p1);
    let rmax = r_max(basket).map_or_else(|_| "-".to_string(), |r| r.to_string());
    let p = Plurigenera::compute(&wb, upto);
    let fields = [
        ("sigma", sigma(basket).to_string()),
        ("sigma'", sigma_prime(basket).to_string()),
        ("gamma", gamma(basket).to_string()),
        ("r_X", r_index(basket).to_string()),
        ("r_max", rmax),
        ("-K^3", wb.anti_volume().to_string()),
    ];
    if records {
        let mut line = format!("basket={basket}\tp1={p1}");
        for (k, v) in &fields {
            write!(line, "\t{}={v}", k.replace('\'', "_prime").replace("-K^3", "k3"))?;
        }
        writeln!(out, "{line}")?;
        for m in 1..=upto {
            writeln!(out, "m={m}\tP={}", p.get(m))?;
        }
    } else {
        writeln!(out, "basket = {basket}")?;
        writeln!(out, "P[-1] given = {p1}")?;
        for (k, v) in &fields {
            writeln!(out, "{k} = {v}")?;
        }
        for m in 1..=upto {
            writeln!(out, "P[-{m}] = {}", p.get(m))?;
        }
    }
    Ok(0)
}

fn canonical(out: &mut String, basket: &Basket, levels: Option<&[u32]>, records: bool) -> Result<u8> {
    let seq = CanonicalSequence::new(basket);
    let rows: Vec<(u32, Basket, Option<u64>)> = match levels {
        None => seq
            .levels
            .iter()
            .map(|l| (l.level.get(), l.basket.clone(), l.epsilon))
            .collect(),
        Some(list) => list
            .iter()
            .map(|&n| {
                let level = Level::new(n).map_err(|e| usage(e.to_string()))?;
                let epsilon = seq
                    .levels
                    .iter()
                    .find(|l| l.level == level)
                    .and_then(|l| l.epsilon);
                Ok((n, seq.at(level).clone(), epsilon))
            })
            .collect::<Result<_>>()?,
    };
    for (n, b, eps) in rows {
        let eps = eps.map_or_else(|| "-".to_string(), |e| e.to_string());
        if records {
            writeln!(out, "level={n}\tbasket={b}\tepsilon={eps}")?;
        } else {
            writeln!(out, "B({n}) = {b}\tepsilon = {eps}")?;
        }
    }
    if records {
        writeln!(out, "stabilization={}", seq.stabilization_level.get())?;
    } else {
        writeln!(out, "stabilizes at level {}", seq.stabilization_level.get())?;
    }
    Ok(0)
}

fn parse_case(s: &str) -> Result<BoundCase> {
    s.parse()
        .ok()
        .and_then(BoundCase::from_number)
        .ok_or_else(|| usage(format!("bad case `{s}` (expected 1, 2 or 3)")))
}

/// Reads a policy spec on top of the default for `p1`.
fn parse_policy(p1: u32, spec: &str) -> Result<BranchPolicy> {
    let mut policy = BranchPolicy::for_p1(p1);
    for token in spec.split([' ', ',']).filter(|t| !t.is_empty()) {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| usage(format!("policy token `{token}` is not key=value")))?;
        let number = |v: &str| -> Result<u64> {
            v.parse().map_err(|_| usage(format!("bad number `{v}` in `{token}`")))
        };
        match key {
            "case" => policy.case = parse_case(value)?,
            "alt" => policy.alt_case = Some(parse_case(value)?),
            "n1" => {
                policy.n1 = match value {
                    "single" => N1Policy::Single,
                    w => match w.strip_prefix("window") {
                        Some(n) => N1Policy::Window(number(n)? as u32),
                        None => bail!(usage(format!("bad n1 policy `{w}`"))),
                    },
                }
            }
            "split" => {
                let parts: Vec<&str> = value.split('/').collect();
                let [k, not_same, leaf] = parts[..] else {
                    bail!(usage(format!("split needs K/CASE/LEAF, got `{value}`")));
                };
                let same = if let Some(n0) = leaf.strip_prefix("b2:") {
                    SameLeaf::B2 { n0: number(n0)? }
                } else if let Some(c) = leaf.strip_prefix("case") {
                    SameLeaf::Case(parse_case(c)?)
                } else {
                    bail!(usage(format!("bad split leaf `{leaf}`")));
                };
                policy.split = Some(Split {
                    k: number(k)? as u32,
                    not_same: parse_case(not_same)?,
                    same,
                });
            }
            "b2" => {
                let (n0, mu) = match value.split_once('@') {
                    Some((n0, mu)) => (
                        n0,
                        Some(mu.parse().map_err(|_| usage(format!("bad mu `{mu}`")))?),
                    ),
                    None => (value, None),
                };
                policy.b2 = Some(B2Spec {
                    n0: number(n0)?,
                    mu,
                });
            }
            "filter" => {
                policy.filter = match value {
                    "default" => Some(FilterConfig::default()),
                    "none" => None,
                    other => bail!(usage(format!("bad filter `{other}`"))),
                }
            }
            "horizon" => policy.horizon = number(value)? as u32,
            other => bail!(usage(format!("unknown policy key `{other}`"))),
        }
    }
    Ok(policy)
}
