//! Random channels, the imperfect-CSIT error model, ZF and subspace precoders,
//! the Case II row transformations and residual-interference scaling.

use std::io::Write;

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Bc, Channel, CsitQuality, Ic, IcCase};
use crate::power::PowerPolicy;
use crate::region::fmt_sig;

pub type CMat = DMatrix<Complex64>;

/// Relative singular-value threshold separating range from null space.
const RANK_TOL: f64 = 1e-9;

/// Exponents at or below this switch a private class off.
const OFF_TOL: f64 = 1e-12;

/// Generator for trial `trial` of a run seeded with `seed`. Every trial owns
/// its stream, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `rows x cols` matrix of i.i.d. `CN(0, variance)` entries.
pub fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize, variance: f64) -> CMat {
    let scale = (variance / 2.0).sqrt();
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(scale * re, scale * im)
    })
}

/// Channel matrices; `y_k = H^H s` at each receiver. Interference-channel
/// blocks are indexed `[k][j]` for transmitter `j` to receiver `k`, with
/// shape `Mj x Nk`.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelSet {
    Bc { h: [CMat; 2] },
    Ic { h: [[CMat; 2]; 2] },
}

impl ChannelSet {
    /// Matrix seen by receiver `rx` from transmitter `tx` (the broadcast
    /// transmitter is shared).
    pub fn link(&self, rx: usize, tx: usize) -> &CMat {
        match self {
            Self::Bc { h } => &h[rx],
            Self::Ic { h } => &h[rx][tx],
        }
    }

    pub fn blocks(&self) -> Vec<(String, &CMat)> {
        match self {
            Self::Bc { h } => vec![("H1".into(), &h[0]), ("H2".into(), &h[1])],
            Self::Ic { h } => (0..2)
                .flat_map(|k| (0..2).map(move |j| (format!("H{}{}", k + 1, j + 1), &h[k][j])))
                .collect(),
        }
    }

    fn map(&self, mut f: impl FnMut(usize, &CMat) -> CMat) -> Self {
        match self {
            Self::Bc { h } => Self::Bc {
                h: [f(0, &h[0]), f(1, &h[1])],
            },
            Self::Ic { h } => Self::Ic {
                h: [
                    [f(0, &h[0][0]), f(0, &h[0][1])],
                    [f(1, &h[1][0]), f(1, &h[1][1])],
                ],
            },
        }
    }

    /// Column-major complex entries as little-endian `f64` pairs after a
    /// one-line JSON header describing the blocks.
    pub fn dump(&self, mut out: impl Write) -> Result<()> {
        let blocks = self.blocks();
        let header = serde_json::json!({
            "layout": "column-major complex128 little-endian",
            "matrices": blocks
                .iter()
                .map(|(name, m)| serde_json::json!({"name": name, "rows": m.nrows(), "cols": m.ncols()}))
                .collect::<Vec<_>>(),
        });
        writeln!(out, "{header}")?;
        for (_, m) in blocks {
            for z in m.iter() {
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }
}

fn tx_count(channel: &Channel, tx: usize) -> usize {
    match channel {
        Channel::Bc(bc) => bc.tx() as usize,
        Channel::Ic(ic) => [ic.tx1(), ic.tx2()][tx] as usize,
    }
}

fn rx_count(channel: &Channel, rx: usize) -> usize {
    match channel {
        Channel::Bc(bc) => [bc.rx1(), bc.rx2()][rx] as usize,
        Channel::Ic(ic) => [ic.rx1(), ic.rx2()][rx] as usize,
    }
}

pub fn draw_channels_with(channel: &Channel, rng: &mut ChaCha8Rng) -> ChannelSet {
    let block = |rng: &mut ChaCha8Rng, rx, tx| {
        gaussian(rng, tx_count(channel, tx), rx_count(channel, rx), 1.0)
    };
    match channel {
        Channel::Bc(_) => {
            let h1 = block(rng, 0, 0);
            let h2 = block(rng, 1, 0);
            ChannelSet::Bc { h: [h1, h2] }
        }
        Channel::Ic(_) => {
            let h11 = block(rng, 0, 0);
            let h12 = block(rng, 0, 1);
            let h21 = block(rng, 1, 0);
            let h22 = block(rng, 1, 1);
            ChannelSet::Ic {
                h: [[h11, h12], [h21, h22]],
            }
        }
    }
}

pub fn draw_channels(channel: &Channel, seed: u64) -> ChannelSet {
    draw_channels_with(channel, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Transmitter-side estimates; every link into receiver `k` carries an
/// error of variance `P^-alpha_k` per entry.
#[derive(Clone, Debug, PartialEq)]
pub struct CsitSet {
    pub estimate: ChannelSet,
    pub error_variance: [f64; 2],
}

pub fn make_csit(
    channels: &ChannelSet,
    alpha: CsitQuality,
    power: f64,
    rng: &mut ChaCha8Rng,
) -> Result<CsitSet> {
    if power.is_nan() || power <= 1.0 {
        return Err(Error::Power(power));
    }
    let error_variance = [power.powf(-alpha.alpha1()), power.powf(-alpha.alpha2())];
    let estimate = channels.map(|rx, h| {
        let e = gaussian(rng, h.nrows(), h.ncols(), error_variance[rx]);
        h - e
    });
    Ok(CsitSet {
        estimate,
        error_variance,
    })
}

/// Left singular vectors of `h` ordered by decreasing singular value, padded
/// to a full unitary basis, and the numerical rank.
fn left_basis(h: &CMat) -> Result<(CMat, usize)> {
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let rows = h.nrows();
    let mut square = CMat::zeros(rows, rows.max(h.ncols()));
    square.view_mut((0, 0), h.shape()).copy_from(h);
    let svd = SVD::new(square, true, false);
    let u = svd.u.expect("requested U");
    let sigma = svd.singular_values;
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let top = sigma[order[0]];
    let rank = order
        .iter()
        .filter(|&&i| sigma[i] > RANK_TOL * top && top > 0.0)
        .count();
    let basis = CMat::from_fn(rows, rows, |r, c| u[(r, order[c])]);
    Ok((basis, rank))
}

/// `streams` orthonormal columns `v` with `estimate^H v = 0`.
pub fn zf_precoder(estimate: &CMat, streams: usize) -> Result<CMat> {
    let (basis, rank) = left_basis(estimate)?;
    let available = estimate.nrows() - rank;
    if streams > available {
        return Err(Error::NullSpace {
            available,
            requested: streams,
        });
    }
    Ok(basis.columns(rank, streams).into_owned())
}

/// Orthonormal basis of the column space of `estimate`, strongest first.
pub fn range_basis(estimate: &CMat) -> Result<CMat> {
    let (basis, rank) = left_basis(estimate)?;
    Ok(basis.columns(0, rank).into_owned())
}

/// `streams` orthonormal columns inside the column space of `estimate` and
/// orthogonal to every column of `avoid`.
pub fn subspace_precoder(estimate: &CMat, avoid: &CMat, streams: usize) -> Result<CMat> {
    let range = range_basis(estimate)?;
    if avoid.ncols() == 0 {
        if streams > range.ncols() {
            return Err(Error::NullSpace {
                available: range.ncols(),
                requested: streams,
            });
        }
        return Ok(range.columns(0, streams).into_owned());
    }
    let overlap = range.adjoint() * avoid;
    let coefficients = zf_precoder(&overlap, streams)?;
    Ok(range * coefficients)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassRole {
    /// Common message of receiver `owner`; `None` for the single broadcast
    /// common message.
    Common { owner: Option<usize> },
    Private { rx: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClassKind {
    Common,
    ZeroForcing,
    Subspace,
}

/// One group of streams sharing a precoder family and power level.
#[derive(Clone, Debug)]
pub struct PrecodedClass {
    pub name: &'static str,
    pub tx: usize,
    pub role: ClassRole,
    pub kind: ClassKind,
    /// Power per stream is `P^exponent`; `None` marks a class that is not
    /// transmitted.
    pub exponent: Option<f64>,
    pub columns: CMat,
}

impl PrecodedClass {
    pub fn is_on(&self) -> bool {
        self.exponent.is_some() && self.columns.ncols() > 0
    }
}

#[derive(Clone, Debug)]
pub struct PrecoderBundle {
    pub classes: Vec<PrecodedClass>,
}

fn private_exponent(exponent: f64) -> Option<f64> {
    (exponent > OFF_TOL).then_some(exponent)
}

fn common(tx: usize, owner: Option<usize>, antennas: usize) -> PrecodedClass {
    PrecodedClass {
        name: "c",
        tx,
        role: ClassRole::Common { owner },
        kind: ClassKind::Common,
        exponent: Some(1.0),
        columns: CMat::identity(antennas, antennas),
    }
}

fn private(
    name: &'static str,
    tx: usize,
    rx: usize,
    kind: ClassKind,
    exponent: f64,
    columns: CMat,
) -> PrecodedClass {
    PrecodedClass {
        name,
        tx,
        role: ClassRole::Private { rx },
        kind,
        exponent: private_exponent(exponent),
        columns,
    }
}

impl PrecoderBundle {
    /// Precoders of the rate-splitting scheme for `channel` built from the
    /// estimates in `csit`.
    pub fn build(
        channel: &Channel,
        csit: &CsitSet,
        alpha: CsitQuality,
        policy: &PowerPolicy,
    ) -> Result<Self> {
        match (channel, &csit.estimate) {
            (Channel::Bc(bc), ChannelSet::Bc { h }) => bc_bundle(bc, h, alpha, policy),
            (Channel::Ic(ic), ChannelSet::Ic { h }) => match ic.case() {
                IcCase::One => ic1_bundle(ic, h, alpha, policy),
                IcCase::Two => ic2_bundle(ic, h, alpha, policy),
            },
            _ => Err(Error::Shape("channel set does not match the configuration".into())),
        }
    }

    pub fn transmit_count(&self) -> usize {
        self.classes.iter().map(|c| c.tx + 1).max().unwrap_or(0)
    }

    /// Smallest singular value of the stacked active private columns of
    /// transmitter `tx`, relative to the largest.
    pub fn conditioning(&self, tx: usize) -> f64 {
        let cols: Vec<&CMat> = self
            .classes
            .iter()
            .filter(|c| c.tx == tx && c.kind != ClassKind::Common && c.columns.ncols() > 0)
            .map(|c| &c.columns)
            .collect();
        let Some(first) = cols.first() else {
            return 1.0;
        };
        let total: usize = cols.iter().map(|c| c.ncols()).sum();
        let mut stacked = CMat::zeros(first.nrows(), total);
        let mut at = 0;
        for c in cols {
            stacked.columns_mut(at, c.ncols()).copy_from(c);
            at += c.ncols();
        }
        let sigma = stacked.singular_values();
        let hi = sigma.max();
        if hi == 0.0 {
            0.0
        } else {
            sigma.min() / hi
        }
    }
}

fn bc_bundle(bc: &Bc, est: &[CMat; 2], alpha: CsitQuality, policy: &PowerPolicy) -> Result<PrecoderBundle> {
    let m = bc.tx() as usize;
    let (s1, s2, _) = bc.spans();
    let (s1, s2) = (s1 as usize, s2 as usize);
    let v1 = zf_precoder(&est[1], m - s2)?;
    let v21 = zf_precoder(&est[0], m - s1)?;
    let v22 = subspace_precoder(&est[1], &v21, s1 + s2 - m)?;
    let mut sub = private("V2(2)", 0, 1, ClassKind::Subspace, policy.a2 - alpha.alpha1(), v22);
    if policy.a2 < alpha.alpha1() {
        sub.exponent = None;
    }
    Ok(PrecoderBundle {
        classes: vec![
            common(0, None, m),
            private("V1", 0, 0, ClassKind::ZeroForcing, policy.a1, v1),
            private("V2(1)", 0, 1, ClassKind::ZeroForcing, policy.a2, v21),
            sub,
        ],
    })
}

fn ic1_bundle(ic: &Ic, est: &[[CMat; 2]; 2], alpha: CsitQuality, policy: &PowerPolicy) -> Result<PrecoderBundle> {
    let (m1, m2, n1, n2) = (ic.tx1() as usize, ic.tx2() as usize, ic.rx1() as usize, ic.rx2() as usize);
    let n2p = m2.min(n2);
    let v1 = zf_precoder(&est[1][0], m1 - n2)?;
    let v21 = zf_precoder(&est[0][1], m2 - n1)?;
    let v22 = subspace_precoder(&est[1][1], &v21, n1 + n2p - m2)?;
    let mut sub = private("V2(2)", 1, 1, ClassKind::Subspace, policy.a2 - alpha.alpha1(), v22);
    if policy.a2 < alpha.alpha1() {
        sub.exponent = None;
    }
    Ok(PrecoderBundle {
        classes: vec![
            common(0, Some(0), m1),
            common(1, Some(1), m2),
            private("V1", 0, 0, ClassKind::ZeroForcing, policy.a1, v1),
            private("V2(1)", 1, 1, ClassKind::ZeroForcing, policy.a2, v21),
            sub,
        ],
    })
}

fn ic2_bundle(ic: &Ic, est: &[[CMat; 2]; 2], alpha: CsitQuality, policy: &PowerPolicy) -> Result<PrecoderBundle> {
    let dims = ic.derived_dims().expect("Case II has derived dims");
    let a2p = policy.a2p.ok_or(Error::Regime {
        op: "PrecoderBundle::build",
        need: "a Case II policy with A2'",
    })?;
    let (m1, m2) = (ic.tx1() as usize, ic.tx2() as usize);
    let [tau, mu1, mu2, delta1, delta2] = [
        dims.full_power,
        dims.zf_clear,
        dims.zf_overlap,
        dims.sub_clear,
        dims.sub_overlap,
    ]
    .map(|d| d as usize);
    let zf = zf_precoder(&est[0][1], mu1 + mu2)?;
    let sub = subspace_precoder(&est[1][1], &zf, tau + delta1 + delta2)?;
    let a1 = alpha.alpha1();
    let mut weak = private(
        "V2(5)",
        1,
        1,
        ClassKind::Subspace,
        policy.a2 - a1,
        sub.columns(tau + delta1, delta2).into_owned(),
    );
    if policy.a2 < a1 {
        weak.exponent = None;
    }
    Ok(PrecoderBundle {
        classes: vec![
            common(0, Some(0), m1),
            common(1, Some(1), m2),
            private("V2(1)", 1, 1, ClassKind::Subspace, 1.0, sub.columns(0, tau).into_owned()),
            private("V2(2)", 1, 1, ClassKind::ZeroForcing, a2p, zf.columns(0, mu1).into_owned()),
            private("V2(3)", 1, 1, ClassKind::ZeroForcing, policy.a2, zf.columns(mu1, mu2).into_owned()),
            private(
                "V2(4)",
                1,
                1,
                ClassKind::Subspace,
                a2p - a1,
                sub.columns(tau, delta1).into_owned(),
            ),
            weak,
        ],
    })
}

/// Invertible row transformations of the Case II receivers: `t1 * H11^H`
/// has `N1 - N1'` leading zero rows, `t2 * H21^H` has `N2 - M1` trailing zero
/// rows and `t2 * H22^H` has `N2 - N2'` leading zero rows.
#[derive(Clone, Debug)]
pub struct RowTransformPair {
    pub t1: CMat,
    pub t2: CMat,
    pub h11_bar: CMat,
    pub h12_bar: CMat,
    pub h21_bar: CMat,
    pub h22_bar: CMat,
}

impl RowTransformPair {
    /// Rows where the transformed `H21^H` and `H22^H` are both nonzero.
    pub fn overlap_dim(&self, tol: f64) -> usize {
        let live = |m: &CMat, r: usize| m.row(r).norm() > tol;
        (0..self.t2.nrows())
            .filter(|&r| live(&self.h21_bar, r) && live(&self.h22_bar, r))
            .count()
    }
}

/// `k` orthonormal rows `y` with `y * x = 0`.
fn left_null_rows(x: &CMat, k: usize) -> Result<CMat> {
    Ok(zf_precoder(x, k)?.adjoint())
}

/// Rows `y` completing `rows` to a basis of the row space, orthonormal to it.
fn complete_rows(rows: &CMat, n: usize) -> Result<CMat> {
    let needed = n - rows.nrows();
    if rows.nrows() == 0 {
        return Ok(CMat::identity(n, n));
    }
    left_null_rows(&rows.adjoint(), needed)
}

fn stack(blocks: &[&CMat], cols: usize) -> CMat {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(total, cols);
    let mut at = 0;
    for b in blocks {
        out.rows_mut(at, b.nrows()).copy_from(b);
        at += b.nrows();
    }
    out
}

pub fn row_transform(ic: &Ic, channels: &ChannelSet) -> Result<RowTransformPair> {
    let ChannelSet::Ic { h } = channels else {
        return Err(Error::Regime {
            op: "row_transform",
            need: "an interference channel",
        });
    };
    if ic.tx1() > ic.rx2() {
        return Err(Error::Regime {
            op: "row_transform",
            need: "M1 <= N2",
        });
    }
    let (m1, m2, n1, n2) = (ic.tx1() as usize, ic.tx2() as usize, ic.rx1() as usize, ic.rx2() as usize);
    let n1p = m1.min(n1);
    let n2p = m2.min(n2);
    let hh = |k: usize, j: usize| h[k][j].adjoint();

    // Rx1: leading rows annihilate H11^H, the rest complete the basis.
    let h11 = hh(0, 0);
    let lead1 = left_null_rows(&h11, n1 - n1p)?;
    let rest1 = complete_rows(&lead1, n1)?;
    let t1 = stack(&[&lead1, &rest1.rows(0, n1p).into_owned()], n1);

    // Rx2: trailing rows annihilate H21^H, leading rows annihilate H22^H.
    let trail2 = left_null_rows(&hh(1, 0), n2 - m1)?;
    let lead2 = left_null_rows(&hh(1, 1), n2 - n2p)?;
    let fixed = stack(&[&lead2, &trail2], n2);
    let middle = complete_rows(&fixed, n2)?;
    let t2 = stack(&[&lead2, &middle, &trail2], n2);

    for (t, n) in [(&t1, n1), (&t2, n2)] {
        let sigma = t.singular_values();
        if t.nrows() != n || sigma.min() <= RANK_TOL * sigma.max() {
            return Err(Error::Shape("row transformation is singular".into()));
        }
    }
    Ok(RowTransformPair {
        h11_bar: &t1 * h11,
        h12_bar: &t1 * hh(0, 1),
        h21_bar: &t2 * hh(1, 0),
        h22_bar: &t2 * hh(1, 1),
        t1,
        t2,
    })
}

/// SNR points in dB.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnrSweep {
    db: Vec<f64>,
}

impl SnrSweep {
    pub const MIN_POINTS: usize = 4;

    pub fn new(db: Vec<f64>) -> Result<Self> {
        if db.len() < Self::MIN_POINTS {
            return Err(Error::Sweep(format!(
                "need at least {} SNR points, got {}",
                Self::MIN_POINTS,
                db.len()
            )));
        }
        if db.iter().any(|d| !d.is_finite()) || db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Sweep("SNR points must be finite and increasing".into()));
        }
        if db[0] <= 0.0 {
            return Err(Error::Sweep("SNR points must exceed 0 dB".into()));
        }
        Ok(Self { db })
    }

    /// `lo:hi:step` in dB, both ends included when they fall on the grid.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Sweep(format!("{spec:?}: {e}")))?;
        let [lo, hi, step] = parts[..] else {
            return Err(Error::Sweep(format!("{spec:?} is not lo:hi:step")));
        };
        if step.is_nan() || step <= 0.0 || hi < lo {
            return Err(Error::Sweep(format!("{spec:?} needs step > 0 and hi >= lo")));
        }
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        Self::new((0..=n).map(|i| lo + i as f64 * step).collect())
    }

    pub fn db(&self) -> &[f64] {
        &self.db
    }

    pub fn span_db(&self) -> f64 {
        self.db[self.db.len() - 1] - self.db[0]
    }

    pub fn powers(&self) -> Vec<f64> {
        self.db.iter().map(|d| 10f64.powf(d / 10.0)).collect()
    }

    pub fn log2_powers(&self) -> Vec<f64> {
        self.db.iter().map(|d| d / 10.0 * 10f64.log2()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    LineFit {
        slope,
        intercept,
        residual_rms,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub p_db: f64,
    pub mean_power: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualFit {
    pub alpha: f64,
    pub fit: LineFit,
    pub points: Vec<ResidualPoint>,
}

impl ResidualFit {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["P_db", "mean_residual_power"])?;
        for p in &self.points {
            writer.write_record([fmt_sig(p.p_db), fmt_sig(p.mean_power)])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Transmit and receive antennas of the residual-interference probe.
pub const PROBE_SHAPE: (usize, usize) = (4, 3);

/// Slope of `log2 E|h_i^H w|^2` against `log2 P` for a unit ZF precoder `w`
/// built from an estimate with error variance `P^-alpha`.
pub fn residual_slope(alpha: f64, sweep: &SnrSweep, trials: usize, seed: u64) -> Result<ResidualFit> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaRange {
            name: "alpha",
            value: alpha,
        });
    }
    if sweep.span_db() < 30.0 {
        return Err(Error::Sweep(format!(
            "residual sweep spans {} dB, need at least 30",
            sweep.span_db()
        )));
    }
    if trials < 200 {
        return Err(Error::Sweep(format!("need at least 200 trials, got {trials}")));
    }
    let (m, n) = PROBE_SHAPE;
    let powers = sweep.powers();
    let per_trial: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let h = gaussian(&mut rng, m, n, 1.0);
            powers
                .iter()
                .map(|&p| {
                    let est = &h - gaussian(&mut rng, m, n, p.powf(-alpha));
                    let w = zf_precoder(&est, 1)?;
                    Ok((h.adjoint() * w).norm_squared() / n as f64)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let points: Vec<ResidualPoint> = sweep
        .db()
        .iter()
        .enumerate()
        .map(|(i, &p_db)| ResidualPoint {
            p_db,
            mean_power: per_trial.iter().map(|t| t[i]).sum::<f64>() / trials as f64,
        })
        .collect();
    let y: Vec<f64> = points.iter().map(|p| p.mean_power.log2()).collect();
    Ok(ResidualFit {
        alpha,
        fit: fit_line(&sweep.log2_powers(), &y),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Ic;

    fn bc423() -> Channel {
        Channel::Bc(Bc::new(4, 2, 3).unwrap())
    }

    #[test]
    fn draws_are_deterministic_with_expected_shapes() {
        let a = draw_channels(&bc423(), 11);
        assert_eq!(a, draw_channels(&bc423(), 11));
        assert_ne!(a, draw_channels(&bc423(), 12));
        assert_eq!(a.link(0, 0).shape(), (4, 2));
        assert_eq!(a.link(1, 0).shape(), (4, 3));
        let ic = draw_channels(&Channel::Ic(Ic::new(2, 4, 1, 3).unwrap()), 1);
        assert_eq!(ic.link(1, 0).shape(), (2, 3));
        assert_eq!(ic.link(0, 1).shape(), (4, 1));
    }

    #[test]
    fn entries_have_unit_power() {
        let mut rng = trial_rng(5, 0);
        let g = gaussian(&mut rng, 100, 100, 1.0);
        let mean = g.iter().map(|z| z.norm_sqr()).sum::<f64>() / 1e4;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn csit_error_variance() {
        let chans = draw_channels(&bc423(), 3);
        let mut rng = trial_rng(3, 1);
        let alpha = CsitQuality::new(0.5, 0.0).unwrap();
        let csit = make_csit(&chans, alpha, 1e4, &mut rng).unwrap();
        assert_eq!(csit.error_variance, [0.01, 1.0]);
        assert!(make_csit(&chans, alpha, 1.0, &mut rng).is_err());
    }

    #[test]
    fn zf_dimensions() {
        let mut rng = trial_rng(1, 0);
        let h43 = gaussian(&mut rng, 4, 3, 1.0);
        let v = zf_precoder(&h43, 1).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!((h43.adjoint() * &v).norm() < 1e-9);
        let h42 = gaussian(&mut rng, 4, 2, 1.0);
        let v = zf_precoder(&h42, 2).unwrap();
        assert!((v.adjoint() * &v - CMat::identity(2, 2)).norm() < 1e-12);
        assert!((h42.adjoint() * &v).norm() < 1e-9);
        assert!(matches!(
            zf_precoder(&h43, 2),
            Err(Error::NullSpace {
                available: 1,
                requested: 2
            })
        ));
    }

    #[test]
    fn subspace_columns_stay_in_range_and_avoid() {
        let mut rng = trial_rng(2, 0);
        let est = gaussian(&mut rng, 5, 3, 1.0);
        let avoid = zf_precoder(&gaussian(&mut rng, 5, 3, 1.0), 2).unwrap();
        let w = subspace_precoder(&est, &avoid, 1).unwrap();
        let range = range_basis(&est).unwrap();
        let outside = &w - &range * (range.adjoint() * &w);
        assert!(outside.norm() < 1e-9);
        assert!((avoid.adjoint() * &w).norm() < 1e-9);
    }

    #[test]
    fn row_transform_block_pattern() {
        let ic = Ic::new(2, 4, 1, 3).unwrap();
        let chans = draw_channels(&Channel::Ic(ic), 9);
        let rt = row_transform(&ic, &chans).unwrap();
        assert!(rt.h21_bar.row(2).norm() < 1e-9);
        assert!(rt.h21_bar.rows(0, 2).norm() > 1e-3);
        assert_eq!(rt.overlap_dim(1e-9), 2);
        // N1 <= M1: no zero rows in T1 H11^H.
        assert!(rt.h11_bar.row(0).norm() > 1e-3);

        let ic = Ic::new(3, 2, 2, 4).unwrap();
        let rt = row_transform(&ic, &draw_channels(&Channel::Ic(ic), 4)).unwrap();
        assert!(rt.h21_bar.row(3).norm() < 1e-9);
        assert!(rt.h22_bar.rows(0, 2).norm() < 1e-9);
        assert_eq!(rt.overlap_dim(1e-9), 1);
    }

    #[test]
    fn equal_m1_n2_leaves_no_zero_rows() {
        let ic = Ic::new(3, 4, 2, 3).unwrap();
        let rt = row_transform(&ic, &draw_channels(&Channel::Ic(ic), 2)).unwrap();
        assert!((0..3).all(|r| rt.h21_bar.row(r).norm() > 1e-6));
    }

    #[test]
    fn sweep_parsing() {
        let s = SnrSweep::parse("30:60:5").unwrap();
        assert_eq!(s.db(), &[30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0]);
        assert!(SnrSweep::parse("30:40:5").is_err());
        assert!(SnrSweep::parse("30:60").is_err());
        assert!(SnrSweep::parse("60:30:5").is_err());
    }

    #[test]
    fn line_fit_is_exact_on_lines() {
        let f = fit_line(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]);
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!(f.residual_rms < 1e-12);
    }

    #[test]
    fn dump_layout() {
        let chans = draw_channels(&bc423(), 1);
        let mut buf = Vec::new();
        chans.dump(&mut buf).unwrap();
        let split = buf.iter().position(|&b| b == b'\n').unwrap();
        let header: serde_json::Value = serde_json::from_slice(&buf[..split]).unwrap();
        assert_eq!(header["matrices"][1]["cols"], 3);
        assert_eq!(buf.len() - split - 1, (8 + 12) * 16);
        let re = f64::from_le_bytes(buf[split + 1..split + 9].try_into().unwrap());
        assert_eq!(re, chans.link(0, 0)[(0, 0)].re);
    }
}
