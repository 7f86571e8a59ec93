//! Command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::{residual_slope, SnrSweep};
use crate::error::{Error, Result};
use crate::model::{classify, BcAntennas, Channel, CsitQuality, IcAntennas, IcCase};
use crate::oracle::{grid_max_d2_ic2, grid_max_st_bc, grid_max_sum_bc, grid_max_sum_ic1, GridSpec};
use crate::power::{
    bc_dof_tuple, bc_optimal_exponents, bc_st_dof_tuple, ic1_dof_tuple, ic1_optimal,
    ic1_st_dof_tuple, ic2_dof_caps, ic2_optimal, Ic2Branch, PowerPolicy,
};
use crate::ratesim::{pool_from_env, st_sweep, sweep_and_fit, SweepResult};
use crate::region::{fmt_sig, round_sig, verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Deviation allowed between closed forms and the grid oracle.
pub const VERIFY_TOL: f64 = 0.02;

#[derive(Debug, Parser)]
#[command(name = "dof-atlas", version, about = "DoF regions and rate-splitting schemes for two-user MIMO BC/IC with imperfect CSIT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Achievable and outer DoF regions with an optimality verdict.
    Region(Common),
    /// Optimal power exponents and the resulting DoF tuple.
    Alloc {
        #[command(flatten)]
        common: Common,
        /// DoF of Rx1's common message (IC with M1 <= N2).
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
    },
    /// Compare the closed forms with the exhaustive grid oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0025)]
        grid_step: f64,
    },
    /// Monte Carlo rates over an SNR sweep with fitted DoF slopes.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        mc: MonteCarlo,
        /// Power exponents `A1,A2` or `A1,A2,A2'`; defaults to the optimal policy.
        #[arg(long, value_delimiter = ',')]
        policy: Option<Vec<f64>>,
        /// Space-time fraction of `(alpha2, 1)` slots.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        lambda: f64,
    },
    /// Fitted slope of the ZF residual interference against log2 P.
    SweepResidual {
        /// CSIT quality exponent.
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        mc: MonteCarlo,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ChannelKind {
    Bc,
    Ic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum)]
    channel: ChannelKind,
    /// `M,N1,N2` (bc) or `M1,M2,N1,N2` (ic).
    #[arg(long, value_delimiter = ',', required = true)]
    antennas: Vec<u32>,
    /// `alpha1,alpha2`.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MonteCarlo {
    /// `lo:hi:step` in dB.
    #[arg(long, default_value = "30:60:5")]
    snr_db: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

/// A configuration in normalized user order plus the caller's labelling.
struct Setup {
    channel: Channel,
    alpha: CsitQuality,
    swapped: bool,
}

impl Common {
    fn setup(&self) -> Result<Setup> {
        let channel = match (self.channel, &self.antennas[..]) {
            (ChannelKind::Bc, &[tx, rx1, rx2]) => Channel::Bc(BcAntennas { tx, rx1, rx2 }.normalize()?),
            (ChannelKind::Ic, &[tx1, tx2, rx1, rx2]) => {
                Channel::Ic(IcAntennas { tx1, tx2, rx1, rx2 }.normalize()?)
            }
            _ => return Err(Error::AntennaCount(self.antennas.clone())),
        };
        let [a1, a2] = self.alpha[..] else {
            return Err(Error::Shape(format!(
                "--alpha takes two values, got {}",
                self.alpha.len()
            )));
        };
        let swapped = channel.swapped();
        let alpha = if swapped {
            CsitQuality::new(a2, a1)?
        } else {
            CsitQuality::new(a1, a2)?
        };
        Ok(Setup {
            channel,
            alpha,
            swapped,
        })
    }
}

impl Setup {
    fn header(&self) -> Value {
        json!({
            "channel": match self.channel { Channel::Bc(_) => "bc", Channel::Ic(_) => "ic" },
            "antennas": self.channel.antennas(),
            "alpha": [self.alpha.alpha1(), self.alpha.alpha2()],
            "users_swapped": self.swapped,
        })
    }
}

/// Numbers rounded to 12 significant digits, recursively.
fn rounded(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => json!(round_sig(n.as_f64().unwrap())),
        Value::Array(items) => Value::Array(items.into_iter().map(rounded).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn to_value(x: impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn merge(mut head: Value, body: Value) -> Value {
    if let (Value::Object(h), Value::Object(b)) = (&mut head, body) {
        h.extend(b);
    }
    head
}

/// Where the machine-readable artifact goes and what stdout shows.
struct Sink<'a, W: Write> {
    stdout: &'a mut W,
    out: Option<PathBuf>,
}

impl<W: Write> Sink<'_, W> {
    fn emit(&mut self, artifact: &[u8], summary: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                let mut file = BufWriter::new(File::create(path)?);
                file.write_all(artifact)?;
                file.flush()?;
                writeln!(self.stdout, "{summary}")?;
                writeln!(self.stdout, "wrote {}", path.display())?;
            }
            None => self.stdout.write_all(artifact)?,
        }
        Ok(())
    }
}

fn json_bytes(value: &Value) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&rounded(value.clone()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T, W>(args: I, stdout: &mut W, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(rendered.as_bytes())
            } else {
                stdout.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let pool = match pool_from_env() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_INVALID;
        }
    };
    let mut buffer = Vec::new();
    let result = match &pool {
        Some(pool) => pool.install(|| dispatch(cli.command, &mut buffer)),
        None => dispatch(cli.command, &mut buffer),
    };
    if let Err(e) = stdout.write_all(&buffer).and_then(|_| stdout.flush()) {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_INVALID;
    }
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY_FAILED,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INVALID
        }
    }
}

/// `Ok(false)` signals a verification failure.
fn dispatch<W: Write>(command: Command, stdout: &mut W) -> Result<bool> {
    match command {
        Command::Region(common) => {
            let setup = common.setup()?;
            region_cmd(&setup, common.format, Sink { stdout, out: common.out })?;
            Ok(true)
        }
        Command::Alloc { common, lambda } => {
            let setup = common.setup()?;
            let report = merge(setup.header(), alloc_report(&setup, lambda)?);
            let mut sink = Sink { stdout, out: common.out };
            sink.emit(&json_bytes(&report)?, "allocation computed")?;
            Ok(true)
        }
        Command::Verify { common, grid_step } => {
            let setup = common.setup()?;
            let grid = GridSpec::new(grid_step)?;
            let report = verify_report(&setup, grid)?;
            let pass = report["pass"].as_bool().unwrap_or(false);
            let summary = format!(
                "max deviation {} (tolerance {VERIFY_TOL}): {}",
                fmt_sig(report["max_deviation"].as_f64().unwrap_or(f64::NAN)),
                if pass { "PASS" } else { "FAIL" }
            );
            let report = merge(setup.header(), report);
            let mut sink = Sink { stdout, out: common.out };
            sink.emit(&json_bytes(&report)?, &summary)?;
            Ok(pass)
        }
        Command::Simulate {
            common,
            mc,
            policy,
            rho,
            lambda,
        } => {
            let setup = common.setup()?;
            let sweep = SnrSweep::parse(&mc.snr_db)?;
            let result = simulate(&setup, &sweep, &mc, policy.as_deref(), rho, lambda)?;
            let summary = result
                .estimate
                .messages
                .iter()
                .map(|m| format!("{} slope {:.3} (predicted {:.3})", m.message_id, m.slope, m.predicted))
                .collect::<Vec<_>>()
                .join("\n");
            let artifact = match common.format {
                Format::Csv => result.csv_string()?.into_bytes(),
                Format::Json => json_bytes(&merge(setup.header(), to_value(&result)?))?,
            };
            let mut sink = Sink { stdout, out: common.out };
            sink.emit(&artifact, &summary)?;
            Ok(true)
        }
        Command::SweepResidual {
            alpha,
            mc,
            format,
            out,
        } => {
            let sweep = SnrSweep::parse(&mc.snr_db)?;
            let fit = residual_slope(alpha, &sweep, mc.trials, mc.seed)?;
            let artifact = match format {
                Format::Json => json_bytes(&to_value(&fit)?)?,
                Format::Csv => {
                    let mut buf = Vec::new();
                    fit.write_csv(&mut buf)?;
                    buf
                }
            };
            let summary = format!("slope {:.4} (expected {})", fit.fit.slope, -alpha);
            Sink { stdout, out }.emit(&artifact, &summary)?;
            Ok(true)
        }
    }
}

fn region_cmd<W: Write>(setup: &Setup, format: Format, mut sink: Sink<'_, W>) -> Result<()> {
    let mut v = verdict(&setup.channel, setup.alpha);
    if setup.swapped {
        v.achievable = v.achievable.swap_users();
        v.outer = v.outer.swap_users();
    }
    let summary = format!(
        "{} vertices, optimal: {:?} ({})",
        v.achievable.vertices.len(),
        v.optimal,
        v.rationale
    );
    let artifact = match format {
        Format::Json => json_bytes(&merge(setup.header(), to_value(&v)?))?,
        Format::Csv => {
            let mut buf = Vec::new();
            v.achievable.write_csv(&mut buf)?;
            buf
        }
    };
    sink.emit(&artifact, &summary)
}

fn alloc_report(setup: &Setup, lambda: f64) -> Result<Value> {
    let (channel, alpha) = (&setup.channel, setup.alpha);
    let regime = classify(channel, alpha);
    Ok(match channel {
        Channel::Bc(bc) => {
            let policy = bc_optimal_exponents(bc, alpha);
            let tuple = bc_dof_tuple(bc, alpha, policy.a1, policy.a2)?;
            let space_time = bc_st_dof_tuple(bc, alpha).ok();
            json!({
                "regime": regime,
                "policy": policy,
                "tuple": tuple,
                "sum_dof": tuple.sum(),
                "space_time": space_time.map(|(st, t)| json!({"fraction": st, "tuple": t, "sum_dof": t.sum()})),
            })
        }
        Channel::Ic(ic) => match ic.case() {
            IcCase::One => {
                let (policy, st) = ic1_optimal(ic, alpha)?;
                let tuple = ic1_dof_tuple(ic, alpha, policy.a1, policy.a2)?;
                let space_time = match st {
                    Some(_) => {
                        let (st, t) = ic1_st_dof_tuple(ic, alpha)?;
                        Some(json!({"fraction": st, "tuple": t, "sum_dof": t.sum()}))
                    }
                    None => None,
                };
                json!({
                    "regime": regime,
                    "policy": policy,
                    "tuple": tuple,
                    "sum_dof": tuple.sum(),
                    "space_time": space_time,
                })
            }
            IcCase::Two => {
                let solution = ic2_optimal(ic, alpha, lambda)?;
                let a2p = solution.policy.a2p.expect("Case II policy carries A2'");
                let caps = ic2_dof_caps(ic, alpha, solution.policy.a2, a2p)?;
                json!({
                    "regime": regime,
                    "lambda": lambda,
                    "branch": solution.branch,
                    "policy": solution.policy,
                    "d2": solution.d2,
                    "caps": caps,
                })
            }
        },
    })
}

#[derive(Serialize)]
struct Check {
    name: String,
    closed_form: f64,
    oracle: f64,
    deviation: f64,
}

impl Check {
    fn new(name: impl Into<String>, closed_form: f64, oracle: f64) -> Self {
        Self {
            name: name.into(),
            closed_form,
            oracle,
            deviation: (closed_form - oracle).abs(),
        }
    }
}

fn verify_report(setup: &Setup, grid: GridSpec) -> Result<Value> {
    let (channel, alpha) = (&setup.channel, setup.alpha);
    let mut checks = Vec::new();
    let mut branches: Vec<Ic2Branch> = Vec::new();
    match channel {
        Channel::Bc(bc) => {
            let policy = bc_optimal_exponents(bc, alpha);
            let closed = bc_dof_tuple(bc, alpha, policy.a1, policy.a2)?.sum();
            checks.push(Check::new("sum_dof", closed, grid_max_sum_bc(bc, alpha, grid).value));
            if let Ok((_, st)) = bc_st_dof_tuple(bc, alpha) {
                let oracle = grid_max_st_bc(bc, alpha, grid)?.value;
                checks.push(Check::new("space_time_sum_dof", st.sum(), oracle));
            }
        }
        Channel::Ic(ic) => match ic.case() {
            IcCase::One => {
                let oracle = grid_max_sum_ic1(ic, alpha, grid)?.value;
                match ic1_optimal(ic, alpha)? {
                    (policy, None) => {
                        let closed = ic1_dof_tuple(ic, alpha, policy.a1, policy.a2)?.sum();
                        checks.push(Check::new("sum_dof", closed, oracle));
                    }
                    // Only a lower bound: time sharing may beat every single slot.
                    (_, Some(_)) => {
                        let st = ic1_st_dof_tuple(ic, alpha)?.1.sum();
                        checks.push(Check {
                            name: "space_time_sum_dof_vs_single_slot".into(),
                            closed_form: st,
                            oracle,
                            deviation: (oracle - st).max(0.0),
                        });
                    }
                }
            }
            IcCase::Two => {
                let rx1_eff = ic.derived_dims().expect("Case II").rx1_eff as f64;
                for i in 0..=10 {
                    let lambda = rx1_eff * i as f64 / 10.0;
                    let solution = ic2_optimal(ic, alpha, lambda)?;
                    if !branches.contains(&solution.branch) {
                        branches.push(solution.branch);
                    }
                    if let Some(best) = grid_max_d2_ic2(ic, alpha, lambda, grid)? {
                        checks.push(Check::new(format!("d2(lambda={lambda})"), solution.d2, best.d2));
                    }
                }
                branches.sort();
            }
        },
    }
    let max_deviation = checks.iter().map(|c| c.deviation).fold(0.0, f64::max);
    Ok(json!({
        "grid_step": grid.step(),
        "tolerance": VERIFY_TOL,
        "checks": checks,
        "branch_coverage": branches,
        "max_deviation": max_deviation,
        "pass": max_deviation <= VERIFY_TOL,
    }))
}

fn simulate(
    setup: &Setup,
    sweep: &SnrSweep,
    mc: &MonteCarlo,
    policy: Option<&[f64]>,
    rho: Option<f64>,
    lambda: f64,
) -> Result<SweepResult> {
    let (channel, alpha) = (&setup.channel, setup.alpha);
    if let Some(rho) = rho {
        return st_sweep(channel, alpha, rho, sweep, mc.trials, mc.seed);
    }
    let policy = match policy {
        Some(&[a1, a2]) => PowerPolicy::two_exponent(alpha, a1, a2)?,
        Some(&[_, a2, a2p]) => PowerPolicy::case2(alpha, a2, a2p)?,
        Some(other) => {
            return Err(Error::Shape(format!(
                "--policy takes 2 or 3 values, got {}",
                other.len()
            )))
        }
        None => match channel {
            Channel::Bc(bc) => bc_optimal_exponents(bc, alpha),
            Channel::Ic(ic) => match ic.case() {
                IcCase::One => ic1_optimal(ic, alpha)?.0,
                IcCase::Two => ic2_optimal(ic, alpha, lambda)?.policy,
            },
        },
    };
    sweep_and_fit(channel, alpha, &policy, sweep, mc.trials, mc.seed)
}
