use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use decoh::channels::{
    BlochGenerator, BlochVector, DensityMatrix2, LindbladGenerator, QubitChannel,
};
use decoh::entanglement::{
    choi_of_channel, disentanglement_time, holevo_form_depolarizing, ppt_verdict,
    verify_holevo_form,
};
use decoh::linalg::ComplexMatrix;
use decoh::stochastic::{compare_to_analytic, run_ensemble, state_from_bloch, SSEConfig, Z_FAIL};
use thiserror::Error;

use crate::spec_file::{parse_generator_spec, SpecParseError};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(i32)]
pub enum Exit {
    Success = 0,
    Usage = 1,
    Numerical = 2,
    NotFound = 3,
    HolevoInapplicable = 4,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Spec {
        path: PathBuf,
        source: SpecParseError,
    },
    #[error("{0}")]
    Numerical(#[from] decoh::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit(&self) -> Exit {
        match self {
            CliError::Usage(_) | CliError::Spec { .. } => Exit::Usage,
            CliError::Numerical(_) | CliError::Io { .. } => Exit::Numerical,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "decoh",
    version,
    about = "Qubit decoherence and entanglement-breaking analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate the first time the channel becomes entanglement-breaking.
    Disentangle(DisentangleArgs),
    /// Tabulate Bloch contraction, Choi and PPT data over a uniform time grid.
    Sweep(SweepArgs),
    /// Print the six-outcome measure-and-prepare form of the depolarizer.
    Holevo(HolevoArgs),
    /// Average random-field trajectories and compare with exponential decay.
    Montecarlo(MonteCarloArgs),
    /// Apply the channel at one time to one Bloch vector.
    Evolve(EvolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltinChannel {
    Depolarizing,
    Dephasing,
    DephasingLiteral,
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    /// Built-in channel.
    #[arg(
        long,
        value_enum,
        conflicts_with = "spec",
        required_unless_present = "spec"
    )]
    pub channel: Option<BuiltinChannel>,
    /// Generator file (H/J lines) instead of a built-in channel.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Decoherence time scale.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Dephasing rate; defaults to 1/tau.
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DisentangleArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Search horizon; defaults to 20·tau.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Last grid time; defaults to 20·tau.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 300)]
    pub steps: usize,
    /// Output CSV path; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HolevoArgs {
    #[arg(long)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Random states used to check the decomposition against the channel.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "+x")]
    PlusX,
    #[value(name = "-x")]
    MinusX,
    #[value(name = "+y")]
    PlusY,
    #[value(name = "-y")]
    MinusY,
    #[value(name = "+z")]
    PlusZ,
    #[value(name = "-z")]
    MinusZ,
}

impl Axis {
    fn bloch(self) -> BlochVector {
        match self {
            Axis::PlusX => BlochVector::new(1.0, 0.0, 0.0),
            Axis::MinusX => BlochVector::new(-1.0, 0.0, 0.0),
            Axis::PlusY => BlochVector::new(0.0, 1.0, 0.0),
            Axis::MinusY => BlochVector::new(0.0, -1.0, 0.0),
            Axis::PlusZ => BlochVector::new(0.0, 0.0, 1.0),
            Axis::MinusZ => BlochVector::new(0.0, 0.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct MonteCarloArgs {
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Time step; defaults to tau/1000.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time; defaults to 3·tau.
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub n_traj: usize,
    #[arg(long, default_value_t = 2002)]
    pub seed: u64,
    #[arg(long, default_value_t = decoh::stochastic::DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Initial pure state, as a Bloch-sphere axis.
    #[arg(long, value_enum, default_value = "+z", allow_hyphen_values = true)]
    pub initial: Axis,
    /// Output CSV path; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long)]
    pub t: f64,
    /// Initial Bloch vector r1,r2,r3.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0,0,1"
    )]
    pub bloch: Vec<f64>,
}

/// Where the channel comes from, resolved from the command-line flags.
#[derive(Debug, Clone)]
pub enum ChannelSource {
    Depolarizing { tau: f64 },
    Dephasing { gamma: f64 },
    DephasingLiteral { tau: f64 },
    Generator(LindbladGenerator),
}

impl ChannelSource {
    pub fn from_args(args: &ChannelArgs) -> Result<Self, CliError> {
        if !(args.tau > 0.0 && args.tau.is_finite()) {
            return Err(CliError::Usage(format!(
                "--tau must be finite and > 0, got {}",
                args.tau
            )));
        }
        if let Some(path) = &args.spec {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let gen = parse_generator_spec(&text).map_err(|source| CliError::Spec {
                path: path.clone(),
                source,
            })?;
            return Ok(Self::Generator(gen));
        }
        Ok(match args.channel {
            Some(BuiltinChannel::Depolarizing) => Self::Depolarizing { tau: args.tau },
            Some(BuiltinChannel::Dephasing) => {
                let gamma = args.gamma.unwrap_or(1.0 / args.tau);
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(CliError::Usage(format!(
                        "--gamma must be finite and > 0, got {gamma}"
                    )));
                }
                Self::Dephasing { gamma }
            }
            Some(BuiltinChannel::DephasingLiteral) => Self::DephasingLiteral { tau: args.tau },
            None => {
                return Err(CliError::Usage(
                    "one of --channel or --spec is required".into(),
                ))
            }
        })
    }

    pub fn generator(&self) -> Result<BlochGenerator, CliError> {
        let gen = match self {
            Self::Depolarizing { tau } => LindbladGenerator::depolarizing(*tau)?,
            Self::Dephasing { gamma } => LindbladGenerator::dephasing(*gamma)?,
            Self::DephasingLiteral { tau } => LindbladGenerator::dephasing_literal(*tau)?,
            Self::Generator(g) => g.clone(),
        };
        Ok(gen.to_bloch())
    }

    /// Closed form for built-ins, `exp(g·t)` for generator files.
    pub fn channel(&self, t: f64) -> Result<QubitChannel, CliError> {
        Ok(match self {
            Self::Depolarizing { tau } => QubitChannel::depolarizing(t, *tau)?,
            Self::Dephasing { gamma } => QubitChannel::dephasing(t, *gamma)?,
            Self::DephasingLiteral { tau } => QubitChannel::dephasing_literal(t, *tau)?,
            Self::Generator(g) => QubitChannel::from_generator(&g.to_bloch(), t)?,
        })
    }
}

/// CSV float: 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn check_time_arg(name: &str, x: f64) -> Result<(), CliError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(CliError::Usage(format!(
            "{name} must be finite and > 0, got {x}"
        )));
    }
    Ok(())
}

fn write_output(path: Option<&Path>, body: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, body).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => out
            .write_all(body.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Exit, CliError> {
    match &cli.command {
        Command::Disentangle(a) => cmd_disentangle(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Holevo(a) => cmd_holevo(a, out),
        Command::Montecarlo(a) => cmd_montecarlo(a, out),
        Command::Evolve(a) => cmd_evolve(a, out),
    }
}

pub fn cmd_disentangle(args: &DisentangleArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let source = ChannelSource::from_args(&args.channel)?;
    let tau = args.channel.tau;
    let t_max = args.t_max.unwrap_or(20.0 * tau);
    check_time_arg("--t-max", t_max)?;
    check_time_arg("--tol", args.tol)?;
    let g = source.generator()?;
    let mut text = String::new();
    let code = match disentanglement_time(&g, t_max, args.tol)? {
        Some(t) => {
            writeln!(text, "t* = {t:.12}").unwrap();
            writeln!(text, "t*/tau = {:.12}", t / tau).unwrap();
            if let ChannelSource::Depolarizing { .. } = source {
                writeln!(text, "tau*ln(3) = {:.12}", tau * 3f64.ln()).unwrap();
            }
            Exit::Success
        }
        None => {
            writeln!(
                text,
                "not found: channel is still entangling at t_max = {t_max}"
            )
            .unwrap();
            Exit::NotFound
        }
    };
    emit(out, &text)?;
    Ok(code)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub bloch_norm: f64,
    pub choi_min_eig: f64,
    pub pt_min_eig: f64,
    pub negativity: f64,
    pub is_eb: bool,
}

pub const SWEEP_HEADER: &str = "t,bloch_norm,choi_min_eig,pt_min_eig,negativity,is_eb";

impl SweepRow {
    pub fn at(source: &ChannelSource, t: f64) -> Result<Self, CliError> {
        let ch = source.channel(t)?;
        let choi = choi_of_channel(&ch)?;
        let verdict = ppt_verdict(choi.matrix())?;
        Ok(Self {
            t,
            bloch_norm: ch.axis_bloch_norm(),
            choi_min_eig: choi.min_eigenvalue()?,
            pt_min_eig: verdict.min_pt_eigenvalue,
            negativity: verdict.negativity,
            is_eb: verdict.is_entanglement_breaking,
        })
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            fmt_float(self.t),
            fmt_float(self.bloch_norm),
            fmt_float(self.choi_min_eig),
            fmt_float(self.pt_min_eig),
            fmt_float(self.negativity),
            u8::from(self.is_eb)
        )
    }
}

pub fn sweep_rows(
    source: &ChannelSource,
    t_max: f64,
    steps: usize,
) -> Result<Vec<SweepRow>, CliError> {
    (0..steps)
        .map(|i| SweepRow::at(source, t_max * i as f64 / (steps - 1) as f64))
        .collect()
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let source = ChannelSource::from_args(&args.channel)?;
    let t_max = args.t_max.unwrap_or(20.0 * args.channel.tau);
    check_time_arg("--t-max", t_max)?;
    if args.steps < 2 {
        return Err(CliError::Usage(format!(
            "--steps must be >= 2, got {}",
            args.steps
        )));
    }
    let mut body = String::from(SWEEP_HEADER);
    body.push('\n');
    for row in sweep_rows(&source, t_max, args.steps)? {
        body.push_str(&row.csv());
        body.push('\n');
    }
    write_output(args.out.as_deref(), &body, out)?;
    Ok(Exit::Success)
}

fn fmt_matrix(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.dim() {
        s.push_str("    [");
        for j in 0..m.dim() {
            let z = m[(i, j)];
            if j > 0 {
                s.push_str(", ");
            }
            write!(s, "{:+.6}{:+.6}i", z.re, z.im).unwrap();
        }
        s.push_str("]\n");
    }
    s
}

pub fn cmd_holevo(args: &HolevoArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    check_time_arg("--tau", args.tau)?;
    if !(args.t >= 0.0 && args.t.is_finite()) {
        return Err(CliError::Usage(format!(
            "--t must be finite and >= 0, got {}",
            args.t
        )));
    }
    let form = match holevo_form_depolarizing(args.t, args.tau) {
        Ok(f) => f,
        Err(decoh::Error::HolevoStatesDoNotExist { coefficient }) => {
            let threshold = args.tau * 3f64.ln();
            emit(
                out,
                &format!(
                    "inapplicable: the six prepared states do not exist below t = tau*ln(3) = {threshold:.12} \
                     (3*exp(-t/tau) = {coefficient:.12} > 1)\n"
                ),
            )?;
            return Ok(Exit::HolevoInapplicable);
        }
        Err(e) => return Err(e.into()),
    };
    let ch = QubitChannel::depolarizing(args.t, args.tau)?;
    let residual = verify_holevo_form(&form, &ch, args.samples)?;

    let mut text = String::new();
    let labels = ["+1", "-1", "+2", "-2", "+3", "-3"];
    for (label, e) in labels.iter().zip(form.entries()) {
        let purity = e.output_state.bloch().norm();
        writeln!(text, "outcome {label}:").unwrap();
        writeln!(text, "  P =").unwrap();
        text.push_str(&fmt_matrix(&e.povm_element));
        writeln!(
            text,
            "  rho = (Bloch norm {purity:.12}{})",
            if (purity - 1.0).abs() < 1e-9 {
                ", pure"
            } else {
                ""
            }
        )
        .unwrap();
        text.push_str(&fmt_matrix(e.output_state.matrix()));
    }
    writeln!(
        text,
        "POVM completeness defect = {:e}",
        form.completeness_defect()
    )
    .unwrap();
    writeln!(
        text,
        "residual = {residual:e} over {} random states",
        args.samples
    )
    .unwrap();
    emit(out, &text)?;
    Ok(if residual <= 1e-12 {
        Exit::Success
    } else {
        Exit::Numerical
    })
}

pub const MONTECARLO_HEADER: &str =
    "t,mean_r1,mean_r2,mean_r3,stderr_r1,stderr_r2,stderr_r3,analytic_norm";

pub fn cmd_montecarlo(args: &MonteCarloArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let tau = args.tau;
    let initial = args.initial.bloch();
    let psi = state_from_bloch(&initial)?;
    let cfg = SSEConfig::new(
        tau,
        args.dt.unwrap_or(tau / 1000.0),
        args.t_final.unwrap_or(3.0 * tau),
        args.n_traj,
        args.seed,
        psi,
    )
    .and_then(|c| c.with_samples(args.samples))?;
    let res = run_ensemble(&cfg)?;

    let mut body = String::from(MONTECARLO_HEADER);
    body.push('\n');
    for (k, &t) in res.times.iter().enumerate() {
        let m = res.mean_bloch[k].0;
        let se = res.stderr.as_ref().map_or([f64::NAN; 3], |s| s[k]);
        let analytic = (-t / tau).exp() * initial.norm();
        let fields: Vec<String> = std::iter::once(t)
            .chain(m)
            .chain(se)
            .chain(std::iter::once(analytic))
            .map(fmt_float)
            .collect();
        body.push_str(&fields.join(","));
        body.push('\n');
    }
    write_output(args.out.as_deref(), &body, out)?;

    let report = compare_to_analytic(&res, tau)?;
    let max_z = report.max_abs_z();
    let mut summary = format!(
        "trajectories = {}, seed = {}\nmax |z| = {max_z:.4}\n",
        cfg.n_traj, cfg.seed
    );
    if report.flagged() {
        summary.push_str("flag: max |z| between 3 and 4\n");
    }
    if args.out.is_some() {
        emit(out, &summary)?;
    } else {
        eprint!("{summary}");
    }
    Ok(if max_z < Z_FAIL {
        Exit::Success
    } else {
        Exit::Numerical
    })
}

pub fn cmd_evolve(args: &EvolveArgs, out: &mut dyn Write) -> Result<Exit, CliError> {
    let source = ChannelSource::from_args(&args.channel)?;
    if !(args.t >= 0.0 && args.t.is_finite()) {
        return Err(CliError::Usage(format!(
            "--t must be finite and >= 0, got {}",
            args.t
        )));
    }
    let [r1, r2, r3] = args.bloch[..] else {
        return Err(CliError::Usage(format!(
            "--bloch takes 3 values, got {}",
            args.bloch.len()
        )));
    };
    let r = BlochVector::new(r1, r2, r3);
    let rho = DensityMatrix2::from_bloch(&r)?;
    let ch = source.channel(args.t)?;
    let next = ch.apply(&rho)?;
    let rb = next.bloch().0;
    let mut text = String::new();
    writeln!(
        text,
        "bloch = ({:.12}, {:.12}, {:.12})",
        rb[0], rb[1], rb[2]
    )
    .unwrap();
    writeln!(text, "rho =").unwrap();
    text.push_str(&fmt_matrix(next.matrix()));
    emit(out, &text)?;
    Ok(Exit::Success)
}
