mod report;
mod suites;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use groupoid_fourier::algebra::{i_norm, i_norm_r, i_norm_s};
use groupoid_fourier::duality::EXHAUSTIVE_PAIRS_LIMIT;
use groupoid_fourier::groupoid::{cyclic_table, symmetric_table};
use groupoid_fourier::io::{groupoid_to_string, parse_function_for, parse_groupoid};
use groupoid_fourier::norms::{
    ag_norm_bounds, bg_norm, pair_matrix, reevaluate, schur_cb_norm, NormCertificate, Witness,
};
use groupoid_fourier::regular::reduced_norm;
use groupoid_fourier::{bisection::enumerate_bisections, ArrowFunction, FiniteGroupoid};

use report::{Report, Status};
use suites::{Context, SUITES};

/// Slack for the ordering `sup ≤ cb ≤ bg ≤ ag upper`, relative to `sup`.
const CHAIN_SLACK: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "groupoid-fourier", version, about = "Fourier algebra computations on finite groupoids")]
struct Cli {
    /// Seed for every randomized suite.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance for identities, reconstructions and positivity verdicts.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Write a groupoid file.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
        /// Comma-separated unit weights applied to the result.
        #[arg(long, global = true, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Run verification suites on a groupoid.
    Check {
        groupoid: PathBuf,
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Compute a norm of a function with its certificate.
    Norm {
        groupoid: PathBuf,
        function: PathBuf,
        #[arg(value_enum)]
        which: Which,
    },
    /// Enumerate bisections and check the round trip through module maps.
    Duality { groupoid: PathBuf },
    /// Every suite, plus all norms of a function if one is given.
    Report {
        groupoid: PathBuf,
        function: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BuildKind {
    /// The pair groupoid on n points.
    Pair { n: usize },
    /// A group given as Z<m>, S<k> or a JSON Cayley table file.
    Group { spec: String },
    /// A disjoint union of groups, one per unit.
    Bundle {
        #[arg(required = true)]
        specs: Vec<String>,
    },
    /// The product with the pair groupoid on two points.
    ProductI2 { groupoid: PathBuf },
    /// A group acting on points; the action is rows `p0,p1,..` separated by `;`,
    /// one row per group element.
    Transformation {
        group: String,
        #[arg(long)]
        action: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Axioms,
    Algebra,
    RegularRep,
    Positivity,
    Norms,
    Duality,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Bg,
    Cb,
    Ag,
    Reduced,
    I,
}

/// Failures that end the run with exit status 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Usage> {
    let ctx = Context {
        seed: cli.seed,
        tol: cli.tol,
    };
    let report = match &cli.command {
        Command::Build { kind, weights } => {
            let mut g = build(kind)?;
            if let Some(w) = weights {
                g = g.with_unit_weights(w)?;
            }
            emit(cli, &groupoid_to_string(&g))?;
            return Ok(ExitCode::SUCCESS);
        }
        Command::Check { groupoid, suite } => {
            let g = load_groupoid(groupoid)?;
            let name = SUITES.get(*suite as usize).copied().unwrap_or("all");
            let mut report = Report::new(format!("check {name}"), cli.seed, &g);
            for s in selected(*suite) {
                suites::run(s, &g, &ctx, &mut report);
            }
            report
        }
        Command::Norm {
            groupoid,
            function,
            which,
        } => {
            let g = load_groupoid(groupoid)?;
            let phi = load_function(&g, function)?;
            if *which == Which::Cb && g.pair_layout().is_none() {
                return Err(Usage("unsupported: cb exact only on pair groupoids".into()));
            }
            let mut report = Report::new(format!("norm {}", which_name(*which)), cli.seed, &g);
            norm(&g, &phi, *which, &mut report)?;
            report
        }
        Command::Duality { groupoid } => {
            let g = load_groupoid(groupoid)?;
            let mut report = Report::new("duality".into(), cli.seed, &g);
            suites::run("duality", &g, &ctx, &mut report);
            bisection_table(&g, &mut report);
            report
        }
        Command::Report { groupoid, function } => {
            let g = load_groupoid(groupoid)?;
            let phi = function.as_ref().map(|f| load_function(&g, f)).transpose()?;
            let mut report = Report::new("report".into(), cli.seed, &g);
            for s in SUITES {
                suites::run(s, &g, &ctx, &mut report);
            }
            if let Some(phi) = phi {
                for which in [Which::I, Which::Reduced, Which::Bg, Which::Ag] {
                    norm(&g, &phi, which, &mut report)?;
                }
                if g.pair_layout().is_some() {
                    norm(&g, &phi, Which::Cb, &mut report)?;
                }
            }
            report
        }
    };
    let text = match cli.format {
        Format::Human => report.human(),
        Format::Machine => report.machine(),
    };
    emit(cli, &text)?;
    Ok(if report.failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn selected(suite: Suite) -> Vec<&'static str> {
    match suite {
        Suite::All => SUITES.to_vec(),
        s => vec![SUITES[s as usize]],
    }
}

fn which_name(w: Which) -> &'static str {
    match w {
        Which::Bg => "bg",
        Which::Cb => "cb",
        Which::Ag => "ag",
        Which::Reduced => "reduced",
        Which::I => "i",
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Usage> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Usage> {
    std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn load_groupoid(path: &Path) -> Result<FiniteGroupoid, Usage> {
    Ok(parse_groupoid(&read(path)?)?)
}

fn load_function(g: &FiniteGroupoid, path: &Path) -> Result<ArrowFunction, Usage> {
    Ok(parse_function_for(g, &read(path)?)?)
}

fn group_table(spec: &str) -> Result<Vec<Vec<usize>>, Usage> {
    let order = |s: &str| s.parse::<usize>().ok().filter(|&k| k >= 1);
    if let Some(m) = spec.strip_prefix('Z').and_then(order) {
        return Ok(cyclic_table(m));
    }
    if let Some(k) = spec.strip_prefix('S').and_then(order).filter(|&k| k <= 5) {
        return Ok(symmetric_table(k));
    }
    let text = read(Path::new(spec))?;
    Ok(serde_json::from_str(&text)?)
}

fn build(kind: &BuildKind) -> Result<FiniteGroupoid, Usage> {
    Ok(match kind {
        BuildKind::Pair { n } => {
            if *n == 0 {
                return Err(Usage("pair groupoid needs at least one point".into()));
            }
            FiniteGroupoid::pair(*n)
        }
        BuildKind::Group { spec } => FiniteGroupoid::group(&group_table(spec)?)?,
        BuildKind::Bundle { specs } => {
            let tables = specs.iter().map(|s| group_table(s)).collect::<Result<Vec<_>, _>>()?;
            FiniteGroupoid::group_bundle(&tables)?
        }
        BuildKind::ProductI2 { groupoid } => load_groupoid(groupoid)?.product_with_i2(),
        BuildKind::Transformation { group, action } => {
            let rows = action
                .split(';')
                .map(|row| row.split(',').map(|p| p.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            FiniteGroupoid::transformation(&group_table(group)?, &rows)?
        }
    })
}

fn describe(g: &FiniteGroupoid, phi: &ArrowFunction, cert: &NormCertificate) -> String {
    let witness = match &cert.witness {
        Witness::None => "no witness".to_string(),
        Witness::SdpPoint { lower_bound, .. } => format!("sdp point, dual bound {lower_bound:e}"),
        Witness::Completion { .. } => "positive completion on G x I2".to_string(),
        Witness::SchurFactors { f, .. } => format!("Gram factors of length {}", f.first().map_or(0, |v| v.len())),
        Witness::Factorization(pairs) => format!("{} coefficient terms", pairs.len()),
        Witness::Sup { arrow } => format!("largest value at arrow {arrow}"),
        Witness::Bound(inner) => format!("bound from {} certificate", format!("{:?}", inner.kind).to_lowercase()),
    };
    let check = match reevaluate(g, phi, cert) {
        Some(v) => format!(", re-evaluates to {v:e}"),
        None => String::new(),
    };
    format!("{}: {witness}{check}", format!("{:?}", cert.kind).to_lowercase())
}

fn norm(g: &FiniteGroupoid, phi: &ArrowFunction, which: Which, report: &mut Report) -> Result<(), Usage> {
    let suite = "norm";
    let sup = phi.max_abs();
    match which {
        Which::I => {
            report.info(suite, "I,r", i_norm_r(g, phi), None);
            report.info(suite, "I,s", i_norm_s(g, phi), None);
            report.info(suite, "I", i_norm(g, phi), None);
        }
        Which::Reduced => report.info(suite, "reduced", reduced_norm(g, phi), None),
        Which::Bg | Which::Cb | Which::Ag => {
            report.info(suite, "sup", sup, None);
            let cb = match pair_matrix(g, phi) {
                Some(a) => Some(schur_cb_norm(&a)?),
                None => None,
            };
            let bg = bg_norm(g, phi)?;
            let (lo, hi) = ag_norm_bounds(g, phi)?;
            match which {
                Which::Cb => {
                    let cb = cb.as_ref().expect("checked by the caller");
                    report.info(suite, "cb", cb.value, Some(describe(g, phi, cb)));
                }
                Which::Bg => report.info(suite, "bg", bg.value, Some(describe(g, phi, &bg))),
                _ => {
                    report.info(suite, "ag lower", lo.value, Some(describe(g, phi, &lo)));
                    report.info(suite, "ag upper", hi.value, Some(describe(g, phi, &hi)));
                }
            }
            let mut chain = vec![("sup", sup)];
            if let Some(cb) = &cb {
                chain.push(("cb", cb.value));
            }
            chain.push(("bg", bg.value));
            chain.push(("ag upper", hi.value));
            let violation = chain.windows(2).map(|w| w[0].1 - w[1].1).fold(0.0, f64::max);
            let names = chain.iter().map(|c| c.0).collect::<Vec<_>>().join(" <= ");
            let tol = CHAIN_SLACK * sup.max(1.0);
            let status = if violation <= tol { Status::Pass } else { Status::Fail };
            report.push(suite, "chain", status, violation, tol, Some(names));
        }
    }
    Ok(())
}

fn bisection_table(g: &FiniteGroupoid, report: &mut Report) {
    let gamma = enumerate_bisections(g);
    if gamma.len() > EXHAUSTIVE_PAIRS_LIMIT {
        return;
    }
    for (i, a) in gamma.iter().enumerate() {
        let row: Vec<String> = gamma
            .iter()
            .map(|b| {
                let ab = a.product(g, b);
                gamma.iter().position(|c| *c == ab).map_or("?".into(), |k| k.to_string())
            })
            .collect();
        report.info(
            "duality",
            &format!("bisection {i}"),
            i as f64,
            Some(format!("arrows {:?}, products {}", a.picks(), row.join(" "))),
        );
    }
}
