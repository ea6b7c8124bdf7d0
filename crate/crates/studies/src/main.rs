use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use latinterp::basis::SmoothedBasis;
use latinterp::convop::{inverse_kernel, ConvolutionOperator};
use latinterp::lattice::io::read_csv;
use latinterp::lattice::{DeformationField, LatticeDomain};
use latinterp::quasi::{build_dual, DegreeKind};
use latinterp_studies::report::{emit, to_csv, to_json, Tabular};
use latinterp_studies::{
    run_convergence, run_counterexample, run_equivalence, run_reproduction, run_smoothness_measure,
    BasisChoice, CatalogName, ConvergenceStudy, EquivalenceStudy, InterpolantKind, Result,
    SmoothnessInput, StudyError,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "latinterp",
    version,
    about = "Lattice interpolants: operators, dual bases and studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The convolution operator: multiplier and inverse kernel.
    #[command(subcommand)]
    Convop(ConvopCmd),
    /// The dual basis and polynomial reproduction.
    #[command(subcommand)]
    Quasi(QuasiCmd),
    /// Numerical studies with pass/fail verdicts.
    #[command(subcommand)]
    Study(StudyCmd),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "q1")]
    basis: String,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Output file; `.csv` selects CSV, anything else JSON. Default: JSON on stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ConvopCmd {
    /// Fourier multiplier m̂ on the DFT grid, as CSV.
    Multiplier {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 64)]
        extent: usize,
    },
    /// Inverse kernel g truncated to |ξ|∞ ≤ R, with its tail bound.
    Kernel {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 8)]
        radius: i64,
    },
}

#[derive(Subcommand)]
enum QuasiCmd {
    /// Index set, coefficients and Gram condition of the dual basis.
    Dual {
        #[command(flatten)]
        common: Common,
    },
    /// Reproduction residuals for all monomials up to a degree.
    Reproduce {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        /// Count degree per variable (multi-cubics) instead of in total.
        #[arg(long)]
        per_variable: bool,
    },
}

#[derive(Subcommand)]
enum StudyCmd {
    Convergence {
        #[command(flatten)]
        common: Common,
        /// bar | smooth | quasi
        #[arg(long, default_value = "smooth")]
        interpolant: String,
        /// trig | bump | cubic
        #[arg(long, default_value = "trig")]
        function: String,
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long, default_value = "2")]
        p: String,
        /// Sites per axis at each rung.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
        ladder: Vec<usize>,
        #[arg(long)]
        quad_degree: Option<usize>,
    },
    Equivalence {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,inf")]
        p: Vec<String>,
        #[arg(long, default_value_t = 160)]
        draws: usize,
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[arg(long)]
        extent: Option<usize>,
    },
    Counterexample {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Smoothness {
        #[command(flatten)]
        common: Common,
        /// Lattice function in the CSV format of `latinterp::lattice::io`.
        #[arg(long)]
        input: PathBuf,
        /// Far-field gradient A (row-major, comma separated): treats the
        /// input as the displacement of y = A·ξ + u.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        gradient: Option<Vec<f64>>,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value = "2")]
        p: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        focus: Option<Vec<i64>>,
        #[arg(long)]
        quad_degree: Option<usize>,
    },
}

fn parse_p(s: &str) -> Result<f64> {
    match s {
        "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| StudyError::Config(format!("bad exponent '{s}'"))),
    }
}

#[derive(Serialize)]
struct MultiplierTable {
    extent: Vec<usize>,
    min_multiplier: f64,
    frequencies: Vec<Vec<i64>>,
    multiplier: Vec<f64>,
}

impl Tabular for MultiplierTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["frequency", "multiplier"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.frequencies
            .iter()
            .zip(&self.multiplier)
            .map(|(k, m)| {
                vec![
                    k.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    m.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Serialize)]
struct KernelTable {
    kernel: latinterp::convop::InverseKernel,
    sites: Vec<Vec<i64>>,
}

impl Tabular for KernelTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["site", "g"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.sites
            .iter()
            .zip(&self.kernel.values)
            .map(|(s, g)| {
                vec![
                    s.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    g.to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Serialize)]
struct DualTable(latinterp::quasi::DualSummary);

impl Tabular for DualTable {
    fn header(&self) -> Vec<&'static str> {
        vec!["site", "coefficient"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0
            .coefficients
            .iter()
            .map(|(s, a)| {
                vec![
                    s.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    a.to_string(),
                ]
            })
            .collect()
    }
}

/// Multiplier tables default to CSV on stdout.
fn emit_table<B: Serialize + Tabular>(
    study: &str,
    body: &B,
    out: Option<&std::path::Path>,
    csv_default: bool,
) -> Result<()> {
    match out {
        None if csv_default => print!("{}", to_csv(body)?),
        None => print!("{}", to_json(study, true, body)?),
        Some(_) => emit(study, true, body, out)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Convop(ConvopCmd::Multiplier { common, extent }) => {
            let basis: BasisChoice = common.basis.parse()?;
            let dom = LatticeDomain::cube(common.dim, extent)?;
            let op = ConvolutionOperator::new(&basis.nodal(common.dim)?, dom.clone())?;
            let table = MultiplierTable {
                extent: dom.extent().to_vec(),
                min_multiplier: op.min_multiplier(),
                frequencies: dom.sites().collect(),
                multiplier: op.multiplier().to_vec(),
            };
            emit_table("convop-multiplier", &table, common.out.as_deref(), true)?;
            Ok(true)
        }
        Command::Convop(ConvopCmd::Kernel { common, radius }) => {
            let basis: BasisChoice = common.basis.parse()?;
            let d = common.dim;
            // The kernel is computed on its own large box; this one only carries the basis.
            let op = ConvolutionOperator::new(&basis.nodal(d)?, LatticeDomain::cube(d, 16)?)?;
            let kernel = inverse_kernel(&op, radius)?;
            let side = (2 * radius + 1) as usize;
            let sites = (0..side.pow(d as u32))
                .map(|mut flat| {
                    let mut s = vec![0i64; d];
                    for slot in s.iter_mut().rev() {
                        *slot = (flat % side) as i64 - radius;
                        flat /= side;
                    }
                    s
                })
                .collect();
            emit_table(
                "convop-kernel",
                &KernelTable { kernel, sites },
                common.out.as_deref(),
                false,
            )?;
            Ok(true)
        }
        Command::Quasi(QuasiCmd::Dual { common }) => {
            let basis: BasisChoice = common.basis.parse()?;
            let dual = build_dual(SmoothedBasis::new(basis.nodal(common.dim)?))?;
            let summary = dual.summary()?;
            let ok = summary.max_biorthogonality_residual <= 1e-9;
            emit("quasi-dual", ok, &DualTable(summary), common.out.as_deref())?;
            Ok(ok)
        }
        Command::Quasi(QuasiCmd::Reproduce {
            common,
            degree,
            per_variable,
        }) => {
            let kind = if per_variable {
                DegreeKind::PerVariable
            } else {
                DegreeKind::Total
            };
            let r = run_reproduction(common.dim, degree, kind)?;
            emit("quasi-reproduce", r.passed, &r, common.out.as_deref())?;
            Ok(r.passed)
        }
        Command::Study(StudyCmd::Convergence {
            common,
            interpolant,
            function,
            j,
            p,
            ladder,
            quad_degree,
        }) => {
            let kind: InterpolantKind = interpolant.parse()?;
            let function: CatalogName = function.parse()?;
            let mut study = ConvergenceStudy::new(kind, function, common.dim, j, parse_p(&p)?);
            study.basis = common.basis.parse()?;
            study.ladder = ladder;
            study.quad_degree = quad_degree;
            let r = run_convergence(&study)?;
            emit("convergence", r.passed, &r, common.out.as_deref())?;
            Ok(r.passed)
        }
        Command::Study(StudyCmd::Equivalence {
            common,
            p,
            draws,
            seed,
            extent,
        }) => {
            let mut study = EquivalenceStudy::new(common.basis.parse()?, common.dim);
            study.p_list = p.iter().map(|s| parse_p(s)).collect::<Result<_>>()?;
            study.draws = draws;
            study.seed = seed;
            if let Some(n) = extent {
                study.extent = n;
            }
            let r = run_equivalence(&study)?;
            emit("equivalence", r.passed, &r, common.out.as_deref())?;
            Ok(r.passed)
        }
        Command::Study(StudyCmd::Counterexample { out }) => {
            let r = run_counterexample()?;
            emit("counterexample", r.passed, &r, out.as_deref())?;
            Ok(r.passed)
        }
        Command::Study(StudyCmd::Smoothness {
            common,
            input,
            gradient,
            k,
            p,
            focus,
            quad_degree,
        }) => {
            let u = read_csv::<f64, _>(std::io::BufReader::new(std::fs::File::open(&input)?))?;
            let input = match gradient {
                Some(a) => SmoothnessInput::Deformation(DeformationField::new(a, u)?),
                None => SmoothnessInput::Lattice(u),
            };
            let r = run_smoothness_measure(
                &input,
                common.basis.parse()?,
                k,
                parse_p(&p)?,
                quad_degree,
                focus.as_deref(),
            )?;
            emit("smoothness", true, &r, common.out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("latinterp: a hard assertion failed (see report)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("latinterp: {e}");
            ExitCode::from(2)
        }
    }
}
