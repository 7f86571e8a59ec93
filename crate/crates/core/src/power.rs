//! Power exponents, space-time fractions and DoF tuples of the rate-splitting
//! schemes, plus the closed-form solution of the Case II program.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{phi_bc, phi_ic, Bc, CsitQuality, DerivedDims, Ic, IcCase};
use crate::region::{ic_region, Label, LinearConstraint};

/// Slack allowed when a closed form lands on an interval end.
const EDGE_TOL: f64 = 1e-12;

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_nan() || value < lo - EDGE_TOL || value > hi + EDGE_TOL {
        return Err(Error::ExponentRange {
            name,
            value,
            lo,
            hi,
        });
    }
    Ok(())
}

/// Single-slot power exponents. `a2p` is only used by the Case II scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerPolicy {
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "A2p", skip_serializing_if = "Option::is_none")]
    pub a2p: Option<f64>,
}

impl PowerPolicy {
    /// BC and IC Case I: `A1 in [0, alpha2]`, `A2 in [0, 1]`.
    pub fn two_exponent(alpha: CsitQuality, a1: f64, a2: f64) -> Result<Self> {
        check_range("A1", a1, 0.0, alpha.alpha2())?;
        check_range("A2", a2, 0.0, 1.0)?;
        Ok(Self { a1, a2, a2p: None })
    }

    /// Case II: `A2' in [alpha1, 1]` and `A2 in [0, A2']`; `A1` is unused.
    pub fn case2(alpha: CsitQuality, a2: f64, a2p: f64) -> Result<Self> {
        check_range("A2p", a2p, alpha.alpha1(), 1.0)?;
        check_range("A2", a2, 0.0, a2p)?;
        Ok(Self {
            a1: 0.0,
            a2,
            a2p: Some(a2p),
        })
    }
}

/// Time sharing between the `(A1, A2) = (alpha2, 1)` slot (fraction `rho`)
/// and the `(alpha2, alpha1)` slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpaceTime {
    pub rho: f64,
    /// The raw fraction fell outside `[0, 1]`.
    pub clipped: bool,
}

impl SpaceTime {
    fn clip(raw: f64) -> Self {
        let rho = raw.clamp(0.0, 1.0);
        Self {
            rho,
            clipped: rho != raw,
        }
    }
}

/// Broadcast DoF tuple. `dc_rx1`/`dc_rx2` are the raw common-message caps
/// at each receiver; `dc` is their minimum clipped at zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BcDofTuple {
    pub dc: f64,
    pub dp1: f64,
    pub dp2: f64,
    pub dc_rx1: f64,
    pub dc_rx2: f64,
    pub clipped: bool,
}

impl BcDofTuple {
    fn from_parts(dp1: f64, dp2: f64, dc_rx1: f64, dc_rx2: f64) -> Self {
        let raw = dc_rx1.min(dc_rx2);
        Self {
            dc: pos(raw),
            dp1,
            dp2,
            dc_rx1,
            dc_rx2,
            clipped: raw < 0.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.dc + self.dp1 + self.dp2
    }

    /// Common message entirely for receiver 1, then entirely for receiver 2.
    pub fn extreme_splits(&self) -> [(f64, f64); 2] {
        [
            (self.dc + self.dp1, self.dp2),
            (self.dp1, self.dc + self.dp2),
        ]
    }

    fn mix(rho: f64, hi: &Self, lo: &Self) -> Self {
        let w = |a: f64, b: f64| rho * a + (1.0 - rho) * b;
        Self::from_parts(
            w(hi.dp1, lo.dp1),
            w(hi.dp2, lo.dp2),
            w(hi.dc_rx1, lo.dc_rx1),
            w(hi.dc_rx2, lo.dc_rx2),
        )
    }
}

/// DoF tuple of the broadcast scheme. With `M < N2` the receive dimensions
/// are capped at `M`, which removes the zero-forced streams to receiver 1.
pub fn bc_dof_tuple(bc: &Bc, alpha: CsitQuality, a1: f64, a2: f64) -> Result<BcDofTuple> {
    PowerPolicy::two_exponent(alpha, a1, a2)?;
    Ok(bc_dof_tuple_unchecked(bc, alpha.alpha1(), a1, a2))
}

pub(crate) fn bc_dof_tuple_unchecked(bc: &Bc, alpha1: f64, a1: f64, a2: f64) -> BcDofTuple {
    let (span1, span2, span_all) = bc.spans();
    let leak = pos(a2 - alpha1);
    let zf1 = span_all - span2;
    let zf2 = span_all - span1;
    let shared = span1 + span2 - span_all;
    BcDofTuple::from_parts(
        zf1 * pos(a1 - leak),
        zf2 * a2 + shared * leak,
        span1 - zf1 * a1.max(a2 - alpha1) - shared * leak,
        span2 - zf2 * a2 - shared * leak,
    )
}

/// Sum-DoF maximizing single-slot exponents.
pub fn bc_optimal_exponents(bc: &Bc, alpha: CsitQuality) -> PowerPolicy {
    let (span1, span2, span_all) = bc.spans();
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let best_a2 = if span_all == span1 {
        1.0
    } else {
        let balanced = (span2 - span1 + (span_all - span2) * a2) / (span_all - span1);
        let shifted = if span2 > span1 {
            1.0 - (span_all - span2) / (span2 - span1) * a1
        } else {
            f64::NEG_INFINITY
        };
        balanced.max(shifted).min(1.0)
    };
    PowerPolicy {
        a1: a2,
        a2: best_a2,
        a2p: None,
    }
}

pub fn bc_st_fraction(bc: &Bc, alpha: CsitQuality) -> Result<SpaceTime> {
    if phi_bc(bc, alpha) < 0.0 {
        return Err(Error::Regime {
            op: "bc_st_fraction",
            need: "Phi_BC >= 0",
        });
    }
    let (span1, span2, span_all) = bc.spans();
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let num = (span_all - span1) * (1.0 - a1) - (span_all - span2) * (1.0 - a2);
    let den = (span2 - span1) * (1.0 - a1) + (span_all - span2) * (a2 - pos(a1 + a2 - 1.0));
    Ok(if den > 0.0 {
        SpaceTime::clip(num / den)
    } else {
        balance_fallback(|rho| bc_st_mix(bc, alpha, rho).sum())
    })
}

/// Degenerate balance: both slot types give the same common cap difference
/// sign, so the better endpoint wins.
fn balance_fallback(sum_at: impl Fn(f64) -> f64) -> SpaceTime {
    SpaceTime {
        rho: if sum_at(1.0) >= sum_at(0.0) { 1.0 } else { 0.0 },
        clipped: false,
    }
}

fn bc_st_mix(bc: &Bc, alpha: CsitQuality, rho: f64) -> BcDofTuple {
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let hi = bc_dof_tuple_unchecked(bc, a1, a2, 1.0);
    let lo = bc_dof_tuple_unchecked(bc, a1, a2, a1);
    BcDofTuple::mix(rho, &hi, &lo)
}

/// DoF tuple of the space-time scheme at an arbitrary fraction.
pub fn bc_st_dof_tuple_at(bc: &Bc, alpha: CsitQuality, rho: f64) -> Result<BcDofTuple> {
    check_range("rho", rho, 0.0, 1.0)?;
    Ok(bc_st_mix(bc, alpha, rho))
}

pub fn bc_st_dof_tuple(bc: &Bc, alpha: CsitQuality) -> Result<(SpaceTime, BcDofTuple)> {
    let st = bc_st_fraction(bc, alpha)?;
    Ok((st, bc_st_mix(bc, alpha, st.rho)))
}

/// Interference-channel Case I tuple. The common messages must satisfy
/// `dc1 + dc2 <= min(rx1_common, rx2_common)` and `dc2 <= rx2_dc2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ic1DofTuple {
    pub dp1: f64,
    pub dp2: f64,
    /// Cap on `dc1`, `dc2` and their sum at Rx1.
    pub rx1_common: f64,
    /// Cap on `dc1` and on `dc1 + dc2` at Rx2.
    pub rx2_common: f64,
    /// Cap on `dc2` at Rx2.
    pub rx2_dc2: f64,
}

impl Ic1DofTuple {
    pub fn common_sum(&self) -> f64 {
        pos(self.rx1_common.min(self.rx2_common))
    }

    pub fn sum(&self) -> f64 {
        self.dp1 + self.dp2 + self.common_sum()
    }

    /// `(d1, d2)` with every common DoF assigned to Rx1 (`dc2 = 0`).
    pub fn split_to_rx1(&self) -> (f64, f64) {
        (self.dp1 + self.common_sum(), self.dp2)
    }

    /// `(d1, d2)` with every common DoF assigned to Rx2 (`dc1 = 0`).
    pub fn split_to_rx2(&self) -> (f64, f64) {
        (self.dp1, self.dp2 + pos(self.common_sum().min(self.rx2_dc2)))
    }

    fn mix(rho: f64, hi: &Self, lo: &Self) -> Self {
        let w = |a: f64, b: f64| rho * a + (1.0 - rho) * b;
        Self {
            dp1: w(hi.dp1, lo.dp1),
            dp2: w(hi.dp2, lo.dp2),
            rx1_common: w(hi.rx1_common, lo.rx1_common),
            rx2_common: w(hi.rx2_common, lo.rx2_common),
            rx2_dc2: w(hi.rx2_dc2, lo.rx2_dc2),
        }
    }
}

fn require_case1(ic: &Ic, op: &'static str) -> Result<()> {
    if ic.case() != IcCase::One {
        return Err(Error::Regime {
            op,
            need: "M1 >= N2",
        });
    }
    Ok(())
}

pub fn ic1_dof_tuple(ic: &Ic, alpha: CsitQuality, a1: f64, a2: f64) -> Result<Ic1DofTuple> {
    require_case1(ic, "ic1_dof_tuple")?;
    PowerPolicy::two_exponent(alpha, a1, a2)?;
    Ok(ic1_dof_tuple_unchecked(ic, alpha.alpha1(), a1, a2))
}

fn ic1_dof_tuple_unchecked(ic: &Ic, alpha1: f64, a1: f64, a2: f64) -> Ic1DofTuple {
    let (m1, m2, n1, n2) = ic.reals();
    let rx2_eff = m2.min(n2);
    let leak = pos(a2 - alpha1);
    let zf2 = m2 - n1;
    let sub2 = n1 + rx2_eff - m2;
    Ic1DofTuple {
        dp1: (m1 - n2) * pos(a1 - leak),
        dp2: zf2 * a2 + sub2 * leak,
        rx1_common: n1 - (m1 - n2) * a1.max(a2 - alpha1) - (n1 + n2 - m1) * leak,
        rx2_common: n2 - zf2 * a2 - sub2 * leak,
        rx2_dc2: rx2_eff - zf2 * a2 - sub2 * leak,
    }
}

/// Requires Case I.2 with `Phi_IC > 0` and `(M1-M2)/(M1-N2) alpha1 <= 1 - alpha2`.
pub fn ic1_st_fraction(ic: &Ic, alpha: CsitQuality) -> Result<SpaceTime> {
    require_case1(ic, "ic1_st_fraction")?;
    let (m1, m2, n1, n2) = ic.reals();
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let ratio_ok = m1 == n2 || (m1 - m2) / (m1 - n2) * a1 <= 1.0 - a2;
    if m2 <= n2 || phi_ic(ic, alpha)? <= 0.0 || !ratio_ok {
        return Err(Error::Regime {
            op: "ic1_st_fraction",
            need: "M2 > N2, Phi_IC > 0 and (M1-M2)/(M1-N2) alpha1 <= 1 - alpha2",
        });
    }
    let num = (m2 - n1) * (1.0 - a1) - (m1 - n2) * (1.0 - a2) + m1 - m2;
    let den = (n2 - n1) * (1.0 - a1) + (m1 - n2) * (a2 - pos(a1 + a2 - 1.0));
    Ok(if den > 0.0 {
        SpaceTime::clip(num / den)
    } else {
        balance_fallback(|rho| ic1_st_mix(ic, alpha, rho).sum())
    })
}

fn ic1_st_mix(ic: &Ic, alpha: CsitQuality, rho: f64) -> Ic1DofTuple {
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let hi = ic1_dof_tuple_unchecked(ic, a1, a2, 1.0);
    let lo = ic1_dof_tuple_unchecked(ic, a1, a2, a1);
    Ic1DofTuple::mix(rho, &hi, &lo)
}

pub fn ic1_st_dof_tuple(ic: &Ic, alpha: CsitQuality) -> Result<(SpaceTime, Ic1DofTuple)> {
    let st = ic1_st_fraction(ic, alpha)?;
    Ok((st, ic1_st_mix(ic, alpha, st.rho)))
}

/// Sum-DoF maximizing Case I exponents; `Some` space-time split when time
/// sharing beats every single-slot policy.
pub fn ic1_optimal(ic: &Ic, alpha: CsitQuality) -> Result<(PowerPolicy, Option<SpaceTime>)> {
    require_case1(ic, "ic1_optimal")?;
    let (m1, m2, n1, n2) = ic.reals();
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let policy = |x: f64, y: f64| PowerPolicy {
        a1: x,
        a2: y,
        a2p: None,
    };
    if m2 <= n2 {
        return Ok((policy(a2.min(1.0 - a1), 1.0), None));
    }
    if phi_ic(ic, alpha)? <= 0.0 {
        let balanced = (n2 - n1 + (m1 - n2) * a2) / (m2 - n1);
        return Ok((policy(a2, balanced.min(1.0)), None));
    }
    if m1 > n2 && (m1 - m2) / (m1 - n2) * a1 > 1.0 - a2 {
        return Ok((policy(1.0 - (m1 - m2) / (m1 - n2) * a1, 1.0), None));
    }
    Ok((policy(a2, 1.0), Some(ic1_st_fraction(ic, alpha)?)))
}

/// Case II caps for a given `(A2, A2')`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ic2Caps {
    /// Cap on `dc1`, `dc2` and their sum at Rx1.
    pub rx1_common: f64,
    /// Cap on `dc1` at Rx2.
    pub rx2_dc1: f64,
    /// Cap on `dc2` at Rx2.
    pub rx2_dc2: f64,
    /// Cap on `dc1 + dc2` at Rx2.
    pub rx2_sum: f64,
    pub dp2: f64,
}

fn case2_dims(ic: &Ic, op: &'static str) -> Result<DerivedDims> {
    ic.derived_dims().ok_or(Error::Regime {
        op,
        need: "M1 <= N2",
    })
}

pub fn ic2_dof_caps(ic: &Ic, alpha: CsitQuality, a2: f64, a2p: f64) -> Result<Ic2Caps> {
    let dims = case2_dims(ic, "ic2_dof_caps")?;
    PowerPolicy::case2(alpha, a2, a2p)?;
    Ok(ic2_caps_unchecked(ic, &dims, alpha.alpha1(), a2, a2p))
}

pub(crate) fn ic2_caps_unchecked(
    ic: &Ic,
    dims: &DerivedDims,
    alpha1: f64,
    a2: f64,
    a2p: f64,
) -> Ic2Caps {
    let f = |n: u32| n as f64;
    let leak = pos(a2 - alpha1);
    let rx1_eff = f(dims.rx1_eff);
    let leak_dims = f(dims.rx1_leak);
    let overlap_load = f(dims.zf_overlap) * a2 + f(dims.sub_overlap) * leak;
    let clear_load =
        f(dims.zf_clear) * a2p + f(dims.sub_clear) * (a2p - alpha1) + f(dims.full_power);
    Ic2Caps {
        rx1_common: rx1_eff - leak_dims * (a2p - alpha1) - (rx1_eff - leak_dims) * leak,
        rx2_dc1: ic.tx1() as f64 - overlap_load,
        rx2_dc2: f(dims.rx2_eff) - overlap_load - clear_load,
        rx2_sum: ic.rx2() as f64 - overlap_load - clear_load,
        dp2: overlap_load + clear_load,
    }
}

/// Objective of the Case II program at `(A2, A2')` for `dc1 = lambda`;
/// `None` when `lambda` violates a decodability constraint.
pub fn ic2_program_value(
    ic: &Ic,
    dims: &DerivedDims,
    alpha1: f64,
    lambda: f64,
    a2: f64,
    a2p: f64,
) -> Option<f64> {
    let caps = ic2_caps_unchecked(ic, dims, alpha1, a2, a2p);
    if lambda > caps.rx1_common + EDGE_TOL || lambda > caps.rx2_dc1 + EDGE_TOL {
        return None;
    }
    let dc2 = (caps.rx1_common - lambda).min(caps.rx2_dc2.min(caps.rx2_sum - lambda));
    Some(dc2 + caps.dp2)
}

/// Solution branches of the Case II program. `FullPower` and `Reduced`
/// cover `M2 <= N2`; `A` to `F` cover `M2 > N2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Ic2Branch {
    A,
    B,
    C,
    D,
    E,
    F,
    FullPower,
    Reduced,
}

impl Ic2Branch {
    pub const LETTERED: [Ic2Branch; 6] = [
        Ic2Branch::A,
        Ic2Branch::B,
        Ic2Branch::C,
        Ic2Branch::D,
        Ic2Branch::E,
        Ic2Branch::F,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ic2Solution {
    pub branch: Ic2Branch,
    pub policy: PowerPolicy,
    pub d2: f64,
}

/// Branches valid at this `alpha1`, ordered by increasing `lambda`, each
/// with the upper end of its `lambda` interval.
fn case2_branch_order(ic: &Ic, dims: &DerivedDims, a1: f64) -> Vec<(Ic2Branch, f64)> {
    let f = |n: u32| n as f64;
    let (m1, rx1_eff, xi) = (ic.tx1() as f64, f(dims.rx1_eff), f(dims.rx1_leak));
    let (overlap, sub_overlap) = (f(dims.zf_overlap), f(dims.sub_overlap));
    if ic.tx2() <= ic.rx2() {
        return vec![
            (Ic2Branch::FullPower, rx1_eff * a1),
            (Ic2Branch::Reduced, rx1_eff),
        ];
    }
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { f64::INFINITY };
    let low = ratio(m1 - rx1_eff, overlap);
    let high = ratio(m1 - rx1_eff + xi, overlap + xi);
    let e_end = ratio((overlap * rx1_eff + sub_overlap * xi) * a1, m1 - rx1_eff + xi);
    let d_end = ratio(rx1_eff * overlap * a1, m1 - rx1_eff);
    let f_end = sub_overlap * a1;
    use Ic2Branch::*;
    if a1 <= low {
        vec![(F, f_end), (E, e_end), (D, d_end), (C, rx1_eff)]
    } else if a1 <= high {
        vec![(F, f_end), (E, e_end), (D, m1 - overlap * a1), (A, rx1_eff)]
    } else {
        vec![
            (F, f_end),
            (E, m1 - overlap * a1),
            (B, rx1_eff - xi * (1.0 - a1)),
            (A, rx1_eff),
        ]
    }
}

/// Maximum `d2 = dc2 + dp2` for `dc1 = lambda` and the exponents reaching it.
pub fn ic2_optimal(ic: &Ic, alpha: CsitQuality, lambda: f64) -> Result<Ic2Solution> {
    let dims = case2_dims(ic, "ic2_optimal")?;
    let f = |n: u32| n as f64;
    let rx1_eff = f(dims.rx1_eff);
    if !(0.0..=rx1_eff).contains(&lambda) {
        return Err(Error::LambdaRange {
            value: lambda,
            max: rx1_eff,
        });
    }
    let a1 = alpha.alpha1();
    let (m1, m2, n1, n2) = ic.reals();
    let rx2_eff = f(dims.rx2_eff);
    let (xi, clear, overlap, sub_overlap) = (
        f(dims.rx1_leak),
        f(dims.zf_clear),
        f(dims.zf_overlap),
        f(dims.sub_overlap),
    );
    let order = case2_branch_order(ic, &dims, a1);
    let branch = order
        .iter()
        .find(|(_, end)| lambda <= end + EDGE_TOL)
        .unwrap_or_else(|| order.last().expect("non-empty order"))
        .0;

    // mu1/xi and the A2' offset vanish together when xi = 0
    let per_leak = |x: f64| if xi > 0.0 { x / xi } else { 0.0 };
    let equal = |a: f64| (a, a);
    let ((a2, a2p), d2) = match branch {
        Ic2Branch::FullPower => ((1.0, 1.0), rx2_eff - lambda),
        Ic2Branch::Reduced => (
            equal((rx1_eff - lambda + rx1_eff * a1) / rx1_eff),
            m2 + (m2 - n1) * a1 - (m2 - n1 + rx1_eff) / rx1_eff * lambda,
        ),
        Ic2Branch::F => ((1.0, 1.0), n2 - lambda),
        Ic2Branch::E => (((m1 - lambda + sub_overlap * a1) / m1, 1.0), n2 - lambda),
        Ic2Branch::D => {
            let spill = m1 - rx1_eff + xi;
            let a2 = (m1 - lambda + sub_overlap * a1) / m1;
            let a2p = if xi > 0.0 {
                1.0 - spill / (m1 * xi) * lambda + (overlap * rx1_eff + sub_overlap * xi) / (m1 * xi) * a1
            } else {
                1.0
            };
            let d2 = n2 + (1.0 + overlap * per_leak(rx1_eff - xi) / m1) * clear * a1
                - (1.0 + per_leak(spill) / m1 * clear) * lambda;
            ((a2, a2p), d2)
        }
        Ic2Branch::C => (
            equal((rx1_eff - lambda + rx1_eff * a1) / rx1_eff),
            n2 + (clear + overlap) * a1 - (n2 - n1 + rx1_eff) / rx1_eff * lambda,
        ),
        Ic2Branch::B => (((m1 - lambda) / overlap, 1.0), n2 - lambda),
        Ic2Branch::A => {
            let a2p = if xi > 0.0 {
                a1 + (rx1_eff - lambda) / xi
            } else {
                1.0
            };
            (
                ((m1 - lambda) / overlap, a2p),
                n2.max(m1 + n1) + clear * a1 - (1.0 + per_leak(clear)) * lambda,
            )
        }
    };
    Ok(Ic2Solution {
        branch,
        policy: PowerPolicy {
            a1: 0.0,
            a2,
            a2p: Some(a2p),
        },
        d2,
    })
}

/// The region constraint on which `(lambda, d2(lambda))` of `branch` lies.
pub fn ic2_constraint_line(
    ic: &Ic,
    alpha: CsitQuality,
    branch: Ic2Branch,
) -> Result<LinearConstraint> {
    let dims = case2_dims(ic, "ic2_constraint_line")?;
    let valid = case2_branch_order(ic, &dims, alpha.alpha1());
    if !valid.iter().any(|(b, _)| *b == branch) {
        return Err(Error::Regime {
            op: "ic2_constraint_line",
            need: "a branch valid for this alpha1",
        });
    }
    let wide = ic.rx2() >= ic.tx1() + ic.rx1();
    let label = match branch {
        Ic2Branch::C | Ic2Branch::Reduced => Label::L2,
        Ic2Branch::D if wide => Label::L3,
        Ic2Branch::D => Label::L4,
        Ic2Branch::A if wide => Label::L3,
        Ic2Branch::A => Label::L5,
        Ic2Branch::B | Ic2Branch::E | Ic2Branch::F | Ic2Branch::FullPower => Label::L1,
    };
    Ok(*ic_region(ic, alpha)
        .constraint(label)
        .expect("mapped constraint exists in this regime"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(a1: f64, a2: f64) -> CsitQuality {
        CsitQuality::new(a1, a2).unwrap()
    }

    fn bc423() -> Bc {
        Bc::new(4, 2, 3).unwrap()
    }

    #[test]
    fn bc_tuples_at_known_policies() {
        let t = bc_dof_tuple(&bc423(), q(0.0, 0.0), 0.0, 1.0).unwrap();
        assert_eq!((t.dc, t.dp1, t.dp2), (0.0, 0.0, 3.0));

        let t = bc_dof_tuple(&bc423(), q(1.0, 1.0), 1.0, 1.0).unwrap();
        assert_eq!((t.dc, t.dp1, t.dp2), (1.0, 2.0 - 1.0, 2.0));
        assert_abs_diff_eq!(t.sum(), 4.0);

        let t = bc_dof_tuple(&bc423(), q(0.7, 0.6), 0.6, 0.8).unwrap();
        assert_abs_diff_eq!(t.dp1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(t.dp2, 1.7, epsilon = 1e-12);
        assert_abs_diff_eq!(t.dc, 1.3, epsilon = 1e-12);
    }

    #[test]
    fn bc_tuple_rejects_out_of_range_exponents() {
        assert!(matches!(
            bc_dof_tuple(&bc423(), q(0.5, 0.3), 0.4, 0.5),
            Err(Error::ExponentRange { name: "A1", .. })
        ));
        assert!(bc_dof_tuple(&bc423(), q(0.5, 0.3), 0.1, 1.5).is_err());
    }

    #[test]
    fn bc_optimal_exponent_examples() {
        assert_abs_diff_eq!(bc_optimal_exponents(&bc423(), q(0.9, 0.6)).a2, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(bc_optimal_exponents(&bc423(), q(0.1, 0.2)).a2, 0.9, epsilon = 1e-12);
        let p = bc_optimal_exponents(&bc423(), q(0.9, 0.6));
        let t = bc_dof_tuple(&bc423(), q(0.9, 0.6), p.a1, p.a2).unwrap();
        assert_abs_diff_eq!(t.dc, 1.4, epsilon = 1e-12);
        assert_abs_diff_eq!(t.dp1, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(t.dp2, 1.6, epsilon = 1e-12);
    }

    #[test]
    fn bc_space_time_examples() {
        let st = bc_st_fraction(&bc423(), q(0.3, 0.2)).unwrap();
        assert_abs_diff_eq!(st.rho, 2.0 / 3.0, epsilon = 1e-12);
        let st = bc_st_fraction(&bc423(), q(0.6, 0.5)).unwrap();
        assert_abs_diff_eq!(st.rho, 0.375, epsilon = 1e-12);

        let (_, t) = bc_st_dof_tuple(&bc423(), q(0.3, 0.2)).unwrap();
        assert_abs_diff_eq!(t.sum(), 3.0 + 0.06 / 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(t.dc_rx1, t.dc_rx2, epsilon = 1e-12);
        let (_, t) = bc_st_dof_tuple(&bc423(), q(0.6, 0.5)).unwrap();
        assert_abs_diff_eq!(t.sum(), 3.35, epsilon = 1e-12);

        assert!(bc_st_fraction(&bc423(), q(0.9, 0.6)).is_err());
    }

    #[test]
    fn bc_space_time_at_phi_zero_uses_one_slot_type() {
        let alpha = q(0.8, 0.6);
        assert_abs_diff_eq!(phi_bc(&bc423(), alpha), 0.0, epsilon = 1e-12);
        let st = bc_st_fraction(&bc423(), alpha).unwrap();
        assert_abs_diff_eq!(st.rho, 0.0, epsilon = 1e-12);
        let (_, t) = bc_st_dof_tuple(&bc423(), alpha).unwrap();
        let p = bc_optimal_exponents(&bc423(), alpha);
        let single = bc_dof_tuple(&bc423(), alpha, p.a1, p.a2).unwrap();
        assert_abs_diff_eq!(t.sum(), single.sum(), epsilon = 1e-12);
    }

    #[test]
    fn ic1_corner_points_of_case_one_one() {
        let ic = Ic::new(4, 3, 2, 3).unwrap();
        let t = ic1_dof_tuple(&ic, q(0.5, 0.5), 0.5, 1.0).unwrap();
        assert_eq!(t.split_to_rx1(), (1.0, 2.0));
        assert_eq!(t.split_to_rx2(), (0.0, 3.0));

        let t = ic1_dof_tuple(&ic, q(0.5, 0.5), 0.0, 0.0).unwrap();
        assert_eq!((t.dp1, t.dp2), (0.0, 0.0));
        assert_eq!((t.rx1_common, t.rx2_dc2), (2.0, 3.0));
    }

    #[test]
    fn ic1_space_time_fraction() {
        let ic = Ic::new(4, 4, 2, 3).unwrap();
        let st = ic1_st_fraction(&ic, q(0.3, 0.2)).unwrap();
        assert_abs_diff_eq!(st.rho, 2.0 / 3.0, epsilon = 1e-12);
        let bc = bc_st_fraction(&bc423(), q(0.3, 0.2)).unwrap();
        assert_abs_diff_eq!(st.rho, bc.rho, epsilon = 1e-12);
        let (_, t) = ic1_st_dof_tuple(&ic, q(0.3, 0.2)).unwrap();
        assert_abs_diff_eq!(t.rx1_common, t.rx2_common, epsilon = 1e-12);
        assert!(ic1_st_fraction(&Ic::new(4, 3, 2, 3).unwrap(), q(0.3, 0.2)).is_err());
    }

    #[test]
    fn ic2_caps_worked_example() {
        let ic = Ic::new(2, 4, 1, 3).unwrap();
        let caps = ic2_dof_caps(&ic, q(0.4, 0.3), 0.7, 0.8).unwrap();
        assert_abs_diff_eq!(caps.rx1_common, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(caps.rx2_dc1, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(caps.dp2, 2.2, epsilon = 1e-12);

        let caps = ic2_dof_caps(&ic, q(0.4, 0.3), 0.4, 0.4).unwrap();
        assert_abs_diff_eq!(caps.rx1_common, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(caps.rx2_dc1, 2.0 - 2.0 * 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(caps.dp2, 3.0 * 0.4, epsilon = 1e-12);
        assert!(ic2_dof_caps(&ic, q(0.4, 0.3), 0.9, 0.8).is_err());
    }

    #[test]
    fn ic2_caps_reduce_to_case_one_at_m1_equal_n2() {
        let ic = Ic::new(3, 4, 2, 3).unwrap();
        let alpha = q(0.4, 0.3);
        for (a2, a1) in [(0.2, 0.1), (0.7, 0.3), (1.0, 0.0f64)] {
            let two = ic2_dof_caps(&ic, alpha, a2, 1.0).unwrap();
            let one = ic1_dof_tuple(&ic, alpha, a1.min(0.3), a2).unwrap();
            assert_abs_diff_eq!(two.dp2, one.dp2, epsilon = 1e-12);
            assert_abs_diff_eq!(two.rx2_sum, one.rx2_common, epsilon = 1e-12);
            assert_abs_diff_eq!(two.rx2_dc2, one.rx2_dc2, epsilon = 1e-12);
        }
    }

    #[test]
    fn ic2_optimal_examples() {
        let ic = Ic::new(3, 3, 2, 4).unwrap();
        let s = ic2_optimal(&ic, q(0.5, 0.0), 0.5).unwrap();
        assert_eq!(s.branch, Ic2Branch::FullPower);
        assert_eq!((s.policy.a2, s.policy.a2p), (1.0, Some(1.0)));
        assert_abs_diff_eq!(s.d2, 2.5);

        let ic = Ic::new(2, 4, 1, 3).unwrap();
        let s = ic2_optimal(&ic, q(0.4, 0.3), 0.6).unwrap();
        assert_eq!(s.branch, Ic2Branch::D);
        assert_abs_diff_eq!(s.policy.a2, 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(s.policy.a2p.unwrap(), 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(s.d2, 2.2, epsilon = 1e-12);

        let s = ic2_optimal(&ic, q(0.4, 0.3), 0.9).unwrap();
        assert_eq!(s.branch, Ic2Branch::C);
        assert_abs_diff_eq!(s.policy.a2, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.d2, 1.5, epsilon = 1e-12);

        assert!(matches!(
            ic2_optimal(&ic, q(0.4, 0.3), 1.5),
            Err(Error::LambdaRange { .. })
        ));
    }

    #[test]
    fn ic2_solution_is_feasible_and_matches_program() {
        let ic = Ic::new(2, 4, 1, 3).unwrap();
        let dims = ic.derived_dims().unwrap();
        for lambda in [0.0, 0.3, 0.6, 0.9, 1.0] {
            let s = ic2_optimal(&ic, q(0.4, 0.3), lambda).unwrap();
            let a2p = s.policy.a2p.unwrap();
            PowerPolicy::case2(q(0.4, 0.3), s.policy.a2, a2p).unwrap();
            let v = ic2_program_value(&ic, &dims, 0.4, lambda, s.policy.a2, a2p).unwrap();
            assert_abs_diff_eq!(v, s.d2, epsilon = 1e-9);
        }
    }

    #[test]
    fn ic2_constraint_lines() {
        let tie = Ic::new(2, 4, 1, 3).unwrap();
        let alpha = q(0.4, 0.3);
        assert_eq!(ic2_constraint_line(&tie, alpha, Ic2Branch::D).unwrap().label, Label::L3);
        let ic = Ic::new(3, 5, 2, 4).unwrap();
        assert_eq!(ic2_constraint_line(&ic, alpha, Ic2Branch::E).unwrap().label, Label::L1);
        assert_eq!(ic2_constraint_line(&ic, alpha, Ic2Branch::D).unwrap().label, Label::L4);
        assert!(ic2_constraint_line(&ic, alpha, Ic2Branch::B).is_err());
        let high = q(0.9, 0.3);
        assert_eq!(ic2_constraint_line(&ic, high, Ic2Branch::A).unwrap().label, Label::L5);

        let wide = Ic::new(2, 5, 1, 4).unwrap();
        assert_eq!(ic2_constraint_line(&wide, alpha, Ic2Branch::D).unwrap().label, Label::L3);
    }
}
