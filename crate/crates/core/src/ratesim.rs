//! Monte Carlo evaluation of the receivers' MAC rate constraints, SNR sweeps
//! and DoF slope fitting.

use std::io::Write;

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{
    draw_channels_with, fit_line, make_csit, trial_rng, CMat, ChannelSet, ClassRole,
    PrecoderBundle, SnrSweep,
};
use crate::error::{Error, Result};
use crate::model::{phi_bc, phi_ic, Channel, CsitQuality, IcCase};
use crate::power::{bc_dof_tuple, ic1_dof_tuple, ic2_dof_caps, PowerPolicy};
use crate::region::fmt_sig;

/// Eigenvalue floor of the log-determinants.
const EIG_FLOOR: f64 = 1e-12;

pub const THREADS_ENV: &str = "DOF_ATLAS_THREADS";

/// Worker pool capped by `DOF_ATLAS_THREADS`; `None` when unset.
pub fn pool_from_env() -> Result<Option<rayon::ThreadPool>> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Threads(format!("{THREADS_ENV}={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| Error::Threads(e.to_string()))
}

/// Covariances seen by one receiver: its own common message, the other
/// common message, its private streams and the interference plus noise.
#[derive(Clone, Debug)]
pub struct CovarianceStack {
    pub q_own_common: CMat,
    pub q_other_common: CMat,
    pub q_own: CMat,
    pub q_eta: CMat,
}

/// Per-transmitter factor bringing the total transmit power to exactly `P`.
fn power_scales(bundle: &PrecoderBundle, power: f64) -> Vec<f64> {
    (0..bundle.transmit_count())
        .map(|tx| {
            let total: f64 = bundle
                .classes
                .iter()
                .filter(|c| c.tx == tx && c.is_on())
                .map(|c| power.powf(c.exponent.unwrap()) * c.columns.norm_squared())
                .sum();
            if total > 0.0 {
                power / total
            } else {
                1.0
            }
        })
        .collect()
}

pub fn build_covariances(
    channels: &ChannelSet,
    bundle: &PrecoderBundle,
    power: f64,
    rx: usize,
) -> Result<CovarianceStack> {
    let n = channels.link(rx, 0).ncols();
    let zero = || CMat::zeros(n, n);
    let mut stack = CovarianceStack {
        q_own_common: zero(),
        q_other_common: zero(),
        q_own: zero(),
        q_eta: CMat::identity(n, n),
    };
    let scales = power_scales(bundle, power);
    for class in bundle.classes.iter().filter(|c| c.is_on()) {
        let h = channels.link(rx, class.tx);
        if h.nrows() != class.columns.nrows() {
            return Err(Error::Shape(format!(
                "precoder {} has {} rows, link has {}",
                class.name,
                class.columns.nrows(),
                h.nrows()
            )));
        }
        let gain = (scales[class.tx] * power.powf(class.exponent.unwrap())).sqrt();
        let received = h.adjoint() * &class.columns * Complex::from(gain);
        let q = &received * received.adjoint();
        let target = match class.role {
            ClassRole::Common { owner: None } => &mut stack.q_own_common,
            ClassRole::Common { owner: Some(k) } if k == rx => &mut stack.q_own_common,
            ClassRole::Common { .. } => &mut stack.q_other_common,
            ClassRole::Private { rx: k } if k == rx => &mut stack.q_own,
            ClassRole::Private { .. } => &mut stack.q_eta,
        };
        *target += q;
    }
    Ok(stack)
}

/// `log2 det` of the Hermitian part of `a` with eigenvalues floored.
pub fn log2_det(a: &CMat) -> Result<f64> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let hermitian = (a + a.adjoint()) * Complex::from(0.5);
    Ok(SymmetricEigen::new(hermitian)
        .eigenvalues
        .iter()
        .map(|&l| l.max(EIG_FLOOR).log2())
        .sum())
}

/// The four MAC constraints at one receiver, in bits per channel use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ReceiverRates {
    pub own_common: f64,
    pub other_common: f64,
    pub common_sum: f64,
    pub private: f64,
}

impl ReceiverRates {
    fn weighted(self, w: f64) -> Self {
        Self {
            own_common: w * self.own_common,
            other_common: w * self.other_common,
            common_sum: w * self.common_sum,
            private: w * self.private,
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            own_common: self.own_common + o.own_common,
            other_common: self.other_common + o.other_common,
            common_sum: self.common_sum + o.common_sum,
            private: self.private + o.private,
        }
    }
}

pub fn rate_point(stack: &CovarianceStack) -> Result<ReceiverRates> {
    let interference = &stack.q_own + &stack.q_eta;
    let base = log2_det(&interference)?;
    Ok(ReceiverRates {
        own_common: log2_det(&(&stack.q_own_common + &interference))? - base,
        other_common: log2_det(&(&stack.q_other_common + &interference))? - base,
        common_sum: log2_det(&(&stack.q_own_common + &stack.q_other_common + &interference))? - base,
        private: base - log2_det(&stack.q_eta)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatePoint {
    pub power: f64,
    pub rx: [ReceiverRates; 2],
}

pub fn evaluate(channels: &ChannelSet, bundle: &PrecoderBundle, power: f64) -> Result<RatePoint> {
    let rate = |rx| rate_point(&build_covariances(channels, bundle, power, rx)?);
    Ok(RatePoint {
        power,
        rx: [rate(0)?, rate(1)?],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MessageId {
    #[serde(rename = "dc")]
    Dc,
    #[serde(rename = "dp1")]
    Dp1,
    #[serde(rename = "dp2")]
    Dp2,
    /// Both common messages' DoF assigned to receiver 1.
    #[serde(rename = "dc_to_rx1")]
    DcToRx1,
    #[serde(rename = "dc_to_rx2")]
    DcToRx2,
}

impl MessageId {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Dc => "dc",
            Self::Dp1 => "dp1",
            Self::Dp2 => "dp2",
            Self::DcToRx1 => "dc_to_rx1",
            Self::DcToRx2 => "dc_to_rx2",
        }
    }

    pub fn for_channel(channel: &Channel) -> &'static [MessageId] {
        match channel {
            Channel::Bc(_) => &[Self::Dc, Self::Dp1, Self::Dp2],
            Channel::Ic(_) => &[Self::Dp1, Self::Dp2, Self::DcToRx1, Self::DcToRx2],
        }
    }
}

impl std::fmt::Display for MessageId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Message rates supported by a rate point. Interference-channel common
/// rates are the two extreme splits of the common-message region.
pub fn message_rates(channel: &Channel, point: &RatePoint) -> Vec<f64> {
    let [r1, r2] = point.rx;
    match channel {
        Channel::Bc(_) => vec![r1.own_common.min(r2.own_common), r1.private, r2.private],
        Channel::Ic(_) => {
            let sum = r1.common_sum.min(r2.common_sum);
            vec![
                r1.private,
                r2.private,
                sum.min(r1.own_common).min(r2.other_common),
                sum.min(r1.other_common).min(r2.own_common),
            ]
        }
    }
}

/// Closed-form DoF of each message under `policy`.
pub fn predicted_dof(channel: &Channel, alpha: CsitQuality, policy: &PowerPolicy) -> Result<Vec<f64>> {
    Ok(match channel {
        Channel::Bc(bc) => {
            let t = bc_dof_tuple(bc, alpha, policy.a1, policy.a2)?;
            vec![t.dc, t.dp1, t.dp2]
        }
        Channel::Ic(ic) => match ic.case() {
            IcCase::One => {
                let t = ic1_dof_tuple(ic, alpha, policy.a1, policy.a2)?;
                let sum = t.common_sum();
                vec![t.dp1, t.dp2, sum, sum.min(t.rx2_dc2).max(0.0)]
            }
            IcCase::Two => {
                let a2p = policy.a2p.ok_or(Error::Regime {
                    op: "predicted_dof",
                    need: "a Case II policy with A2'",
                })?;
                let c = ic2_dof_caps(ic, alpha, policy.a2, a2p)?;
                let sum = c.rx1_common.min(c.rx2_sum);
                vec![
                    0.0,
                    c.dp2,
                    sum.min(c.rx2_dc1).max(0.0),
                    sum.min(c.rx2_dc2).max(0.0),
                ]
            }
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MessageSlope {
    pub message_id: MessageId,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub predicted: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: u32,
    pub den: u32,
}

impl Fraction {
    /// Closest `p/q` to `x` in `[0, 1]` with `q <= max_den`; smaller `q` wins ties.
    pub fn approximate(x: f64, max_den: u32) -> Self {
        (1..=max_den)
            .map(|den| {
                let num = (x * den as f64).round().clamp(0.0, den as f64) as u32;
                Self { num, den }
            })
            .min_by(|a, b| (a.value() - x).abs().total_cmp(&(b.value() - x).abs()))
            .expect("max_den >= 1")
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub window_db: (f64, f64),
    pub points: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Fraction>,
    pub messages: Vec<MessageSlope>,
}

impl SlopeEstimate {
    pub fn slope(&self, id: MessageId) -> Option<f64> {
        self.messages.iter().find(|m| m.message_id == id).map(|m| m.slope)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub p_db: f64,
    pub message_id: MessageId,
    pub mean_rate_bits: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub estimate: SlopeEstimate,
    pub rows: Vec<RateRow>,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["P_db", "message_id", "mean_rate_bits", "stderr"])?;
        for r in &self.rows {
            writer.write_record([
                fmt_sig(r.p_db),
                r.message_id.to_string(),
                fmt_sig(r.mean_rate_bits),
                fmt_sig(r.stderr),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }
}

pub const MIN_TRIALS: usize = 100;

struct Slot {
    policy: PowerPolicy,
    weight: f64,
}

fn check_policy(channel: &Channel, alpha: CsitQuality, policy: &PowerPolicy) -> Result<()> {
    match (channel, policy.a2p) {
        (Channel::Ic(ic), Some(a2p)) if ic.case() == IcCase::Two => {
            PowerPolicy::case2(alpha, policy.a2, a2p).map(|_| ())
        }
        (Channel::Ic(ic), None) if ic.case() == IcCase::Two => Err(Error::Regime {
            op: "sweep_and_fit",
            need: "a Case II policy with A2'",
        }),
        _ => PowerPolicy::two_exponent(alpha, policy.a1, policy.a2).map(|_| ()),
    }
}

/// Rows per SNR point, one column per message.
type Table = Vec<Vec<f64>>;

fn run(
    channel: &Channel,
    alpha: CsitQuality,
    slots: &[Slot],
    sweep: &SnrSweep,
    trials: usize,
    seed: u64,
) -> Result<(Table, Table)> {
    if trials < MIN_TRIALS {
        return Err(Error::Sweep(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let powers = sweep.powers();
    let per_trial: Vec<Vec<Vec<f64>>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut mixed = vec![[ReceiverRates::default(); 2]; powers.len()];
            for slot in slots {
                let channels = draw_channels_with(channel, &mut rng);
                for (acc, &p) in mixed.iter_mut().zip(&powers) {
                    let csit = make_csit(&channels, alpha, p, &mut rng)?;
                    let bundle = PrecoderBundle::build(channel, &csit, alpha, &slot.policy)?;
                    let point = evaluate(&channels, &bundle, p)?;
                    for (a, r) in acc.iter_mut().zip(point.rx) {
                        *a = a.add(r.weighted(slot.weight));
                    }
                }
            }
            Ok(mixed
                .into_iter()
                .zip(&powers)
                .map(|(rx, &power)| message_rates(channel, &RatePoint { power, rx }))
                .collect())
        })
        .collect::<Result<_>>()?;

    let messages = MessageId::for_channel(channel).len();
    let n = trials as f64;
    let mut means = vec![vec![0.0; messages]; powers.len()];
    let mut stderrs = vec![vec![0.0; messages]; powers.len()];
    for (pi, (mean_row, err_row)) in means.iter_mut().zip(&mut stderrs).enumerate() {
        for m in 0..messages {
            let mean = per_trial.iter().map(|t| t[pi][m]).sum::<f64>() / n;
            let var = per_trial.iter().map(|t| (t[pi][m] - mean).powi(2)).sum::<f64>() / (n - 1.0);
            mean_row[m] = mean;
            err_row[m] = (var / n).sqrt();
        }
    }
    Ok((means, stderrs))
}

fn assemble(
    channel: &Channel,
    sweep: &SnrSweep,
    trials: usize,
    seed: u64,
    rho: Option<Fraction>,
    predicted: Vec<f64>,
    (means, stderrs): (Vec<Vec<f64>>, Vec<Vec<f64>>),
) -> SweepResult {
    let ids = MessageId::for_channel(channel);
    let x = sweep.log2_powers();
    let messages = ids
        .iter()
        .enumerate()
        .map(|(m, &message_id)| {
            let y: Vec<f64> = means.iter().map(|row| row[m]).collect();
            let fit = fit_line(&x, &y);
            MessageSlope {
                message_id,
                slope: fit.slope,
                intercept: fit.intercept,
                residual_rms: fit.residual_rms,
                predicted: predicted[m],
            }
        })
        .collect();
    let rows = sweep
        .db()
        .iter()
        .enumerate()
        .flat_map(|(pi, &p_db)| {
            let (means, stderrs) = (&means, &stderrs);
            ids.iter().enumerate().map(move |(m, &message_id)| RateRow {
                p_db,
                message_id,
                mean_rate_bits: means[pi][m],
                stderr: stderrs[pi][m],
            })
        })
        .collect();
    let db = sweep.db();
    SweepResult {
        estimate: SlopeEstimate {
            window_db: (db[0], db[db.len() - 1]),
            points: db.len(),
            trials,
            seed,
            rho,
            messages,
        },
        rows,
    }
}

/// Trial-averaged message rates over `sweep` under a fixed policy, with
/// per-message slopes against `log2 P`.
pub fn sweep_and_fit(
    channel: &Channel,
    alpha: CsitQuality,
    policy: &PowerPolicy,
    sweep: &SnrSweep,
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    check_policy(channel, alpha, policy)?;
    let predicted = predicted_dof(channel, alpha, policy)?;
    let slots = [Slot {
        policy: *policy,
        weight: 1.0,
    }];
    let stats = run(channel, alpha, &slots, sweep, trials, seed)?;
    Ok(assemble(channel, sweep, trials, seed, None, predicted, stats))
}

/// Space-time scheme: a fraction `rho` of slots uses `(alpha2, 1)` and the
/// rest `(alpha2, alpha1)`; the receivers' constraints are averaged over
/// the slot types before the message rates are taken.
pub fn st_sweep(
    channel: &Channel,
    alpha: CsitQuality,
    rho: f64,
    sweep: &SnrSweep,
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    let phi = match channel {
        Channel::Bc(bc) => phi_bc(bc, alpha),
        Channel::Ic(ic) => phi_ic(ic, alpha)?,
    };
    if phi < 0.0 {
        return Err(Error::Regime {
            op: "st_sweep",
            need: "Phi >= 0",
        });
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::ExponentRange {
            name: "rho",
            value: rho,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let fraction = Fraction::approximate(rho, 100);
    let weight = fraction.value();
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let hi = PowerPolicy::two_exponent(alpha, a2, 1.0)?;
    let lo = PowerPolicy::two_exponent(alpha, a2, a1)?;
    let slots: Vec<Slot> = [
        Slot {
            policy: hi,
            weight,
        },
        Slot {
            policy: lo,
            weight: 1.0 - weight,
        },
    ]
    .into_iter()
    .filter(|s| s.weight > 0.0)
    .collect();
    let p_hi = predicted_dof(channel, alpha, &hi)?;
    let p_lo = predicted_dof(channel, alpha, &lo)?;
    let mut predicted: Vec<f64> = p_hi
        .iter()
        .zip(&p_lo)
        .map(|(h, l)| weight * h + (1.0 - weight) * l)
        .collect();
    match channel {
        Channel::Bc(bc) => {
            predicted[0] = crate::power::bc_st_dof_tuple_at(bc, alpha, weight)?.dc;
        }
        Channel::Ic(ic) => {
            let mix = |f: fn(&crate::power::Ic1DofTuple) -> f64| -> Result<f64> {
                let h = ic1_dof_tuple(ic, alpha, a2, 1.0)?;
                let l = ic1_dof_tuple(ic, alpha, a2, a1)?;
                Ok(weight * f(&h) + (1.0 - weight) * f(&l))
            };
            let sum = mix(|t| t.rx1_common)?.min(mix(|t| t.rx2_common)?).max(0.0);
            predicted[2] = sum;
            predicted[3] = sum.min(mix(|t| t.rx2_dc2)?).max(0.0);
        }
    }
    let stats = run(channel, alpha, &slots, sweep, trials, seed)?;
    Ok(assemble(channel, sweep, trials, seed, Some(fraction), predicted, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_channels, trial_rng};
    use crate::model::{Bc, Ic};

    fn q(a1: f64, a2: f64) -> CsitQuality {
        CsitQuality::new(a1, a2).unwrap()
    }

    fn setup(channel: &Channel, alpha: CsitQuality, policy: PowerPolicy, p: f64) -> (ChannelSet, PrecoderBundle) {
        let chans = draw_channels(channel, 21);
        let csit = make_csit(&chans, alpha, p, &mut trial_rng(21, 1)).unwrap();
        let bundle = PrecoderBundle::build(channel, &csit, alpha, &policy).unwrap();
        (chans, bundle)
    }

    fn policy(a1: f64, a2: f64) -> PowerPolicy {
        PowerPolicy { a1, a2, a2p: None }
    }

    #[test]
    fn zero_exponent_private_class_is_silent() {
        let bc = Channel::Bc(Bc::new(4, 2, 3).unwrap());
        let (chans, bundle) = setup(&bc, q(0.0, 0.0), policy(0.0, 1.0), 1e3);
        let stack = build_covariances(&chans, &bundle, 1e3, 0).unwrap();
        assert_eq!(stack.q_own.norm(), 0.0);
        let r = rate_point(&stack).unwrap();
        assert!(r.private.abs() < 1e-12);
    }

    #[test]
    fn rates_are_ordered_and_nonnegative() {
        let ic = Channel::Ic(Ic::new(4, 3, 2, 3).unwrap());
        let (chans, bundle) = setup(&ic, q(0.5, 0.5), policy(0.5, 1.0), 1e4);
        let point = evaluate(&chans, &bundle, 1e4).unwrap();
        for r in point.rx {
            assert!(r.private >= -1e-9 && r.own_common >= -1e-9 && r.other_common >= -1e-9);
            assert!(r.common_sum >= r.own_common.max(r.other_common) - 1e-9);
        }
    }

    #[test]
    fn unit_power_rates_are_small() {
        let bc = Channel::Bc(Bc::new(4, 2, 3).unwrap());
        let chans = draw_channels(&bc, 3);
        let csit = make_csit(&chans, q(0.5, 0.5), 1.0 + 1e-9, &mut trial_rng(3, 0)).unwrap();
        let bundle = PrecoderBundle::build(&bc, &csit, q(0.5, 0.5), &policy(0.5, 1.0)).unwrap();
        let point = evaluate(&chans, &bundle, 1.0 + 1e-9).unwrap();
        for r in point.rx {
            assert!(r.common_sum < 20.0 && r.private < 20.0);
        }
    }

    #[test]
    fn transmit_power_is_normalized() {
        let bc = Channel::Bc(Bc::new(4, 2, 3).unwrap());
        let p = 1e5;
        let (_, bundle) = setup(&bc, q(0.9, 0.6), policy(0.6, 0.8), p);
        let scale = power_scales(&bundle, p)[0];
        let total: f64 = bundle
            .classes
            .iter()
            .filter(|c| c.is_on())
            .map(|c| scale * p.powf(c.exponent.unwrap()) * c.columns.norm_squared())
            .sum();
        assert!((total / p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn case2_rx1_interference_spectrum() {
        // (2,4,1,3): tau = 0, mu1 = 1, mu2 = 2, no subspace streams, xi = 1.
        let ic = Ic::new(2, 4, 1, 3).unwrap();
        let channel = Channel::Ic(ic);
        let p = 2f64.powi(50);
        let alpha = q(0.4, 0.0);
        let pol = PowerPolicy::case2(alpha, 0.2, 0.8).unwrap();
        let (chans, bundle) = setup(&channel, alpha, pol, p);
        let stack = build_covariances(&chans, &bundle, p, 0).unwrap();
        let eta = stack.q_eta.clone() - CMat::identity(1, 1);
        let exponent = eta[(0, 0)].re.log2() / 50.0;
        assert!((exponent - 0.4).abs() < 0.1, "{exponent}");
    }

    #[test]
    fn fractions() {
        assert_eq!(Fraction::approximate(2.0 / 3.0, 100), Fraction { num: 2, den: 3 });
        assert_eq!(Fraction::approximate(0.375, 100), Fraction { num: 3, den: 8 });
        assert_eq!(Fraction::approximate(1.0, 100), Fraction { num: 1, den: 1 });
        assert_eq!(Fraction::approximate(0.0, 100).value(), 0.0);
    }

    #[test]
    fn sweeps_need_enough_trials() {
        let bc = Channel::Bc(Bc::new(4, 2, 3).unwrap());
        let sweep = SnrSweep::parse("30:60:10").unwrap();
        assert!(sweep_and_fit(&bc, q(0.9, 0.6), &policy(0.6, 0.8), &sweep, 10, 1).is_err());
        assert!(st_sweep(&bc, q(0.9, 0.6), 0.5, &sweep, 100, 1).is_err());
    }

    #[test]
    fn predicted_values() {
        let bc = Channel::Bc(Bc::new(4, 2, 3).unwrap());
        let p = predicted_dof(&bc, q(0.9, 0.6), &policy(0.6, 0.8)).unwrap();
        for (got, want) in p.iter().zip([1.4, 0.6, 1.6]) {
            assert!((got - want).abs() < 1e-12);
        }
        let ic = Channel::Ic(Ic::new(4, 3, 2, 3).unwrap());
        let p = predicted_dof(&ic, q(0.5, 0.5), &policy(0.5, 1.0)).unwrap();
        for (got, want) in p.iter().zip([0.0, 2.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }
}
