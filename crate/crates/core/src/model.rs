//! Antenna configurations, CSIT qualities, derived stream counts and regime
//! classification shared by every other module.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// CSIT quality exponents: the estimation error of the channel to receiver k
/// decays as `P^-alpha_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CsitQuality {
    alpha1: f64,
    alpha2: f64,
}

impl CsitQuality {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        for (name, value) in [("alpha1", alpha1), ("alpha2", alpha2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::AlphaRange { name, value });
            }
        }
        Ok(Self { alpha1, alpha2 })
    }

    pub fn alpha1(self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(self) -> f64 {
        self.alpha2
    }
}

/// Raw broadcast-channel antenna counts as supplied by a caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BcAntennas {
    pub tx: u32,
    pub rx1: u32,
    pub rx2: u32,
}

impl BcAntennas {
    /// Orders the receivers so that `rx1 <= rx2` and switches off transmit
    /// antennas beyond `rx1 + rx2`.
    pub fn normalize(self) -> Result<Bc> {
        if [self.tx, self.rx1, self.rx2].contains(&0) {
            return Err(Error::AntennaCount(vec![self.tx, self.rx1, self.rx2]));
        }
        let swapped = self.rx1 > self.rx2;
        let (rx1, rx2) = if swapped {
            (self.rx2, self.rx1)
        } else {
            (self.rx1, self.rx2)
        };
        let tx = self.tx.min(rx1 + rx2);
        Ok(Bc {
            tx,
            rx1,
            rx2,
            swapped,
            clamped: tx != self.tx,
        })
    }
}

/// Normalized `(M, N1, N2)` broadcast channel with `N1 <= N2` and `M <= N1 + N2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bc {
    tx: u32,
    rx1: u32,
    rx2: u32,
    swapped: bool,
    clamped: bool,
}

impl Bc {
    pub fn new(tx: u32, rx1: u32, rx2: u32) -> Result<Self> {
        BcAntennas { tx, rx1, rx2 }.normalize()
    }

    pub fn tx(&self) -> u32 {
        self.tx
    }

    pub fn rx1(&self) -> u32 {
        self.rx1
    }

    pub fn rx2(&self) -> u32 {
        self.rx2
    }

    /// True when the caller's receivers were exchanged to get `N1 <= N2`.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn clamped(&self) -> bool {
        self.clamped
    }

    /// `(min{M,N1}, min{M,N2}, min{M,N1+N2})` as reals.
    pub(crate) fn spans(&self) -> (f64, f64, f64) {
        (
            self.tx.min(self.rx1) as f64,
            self.tx.min(self.rx2) as f64,
            self.tx.min(self.rx1 + self.rx2) as f64,
        )
    }
}

/// Raw interference-channel antenna counts: transmitter k serves receiver k.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IcAntennas {
    pub tx1: u32,
    pub tx2: u32,
    pub rx1: u32,
    pub rx2: u32,
}

impl IcAntennas {
    /// Clamps redundant antennas (`Mk <= N1+N2`, `Nk <= M1+M2`) to a fixed
    /// point, then relabels the pairs so that `N1 <= N2`.
    pub fn normalize(self) -> Result<Ic> {
        let raw = [self.tx1, self.tx2, self.rx1, self.rx2];
        if raw.contains(&0) {
            return Err(Error::AntennaCount(raw.to_vec()));
        }
        let [mut m1, mut m2, mut n1, mut n2] = raw;
        loop {
            let next = [
                m1.min(n1 + n2),
                m2.min(n1 + n2),
                n1.min(m1 + m2),
                n2.min(m1 + m2),
            ];
            if next == [m1, m2, n1, n2] {
                break;
            }
            [m1, m2, n1, n2] = next;
        }
        let clamped = [m1, m2, n1, n2] != raw;
        let swapped = n1 > n2;
        if swapped {
            std::mem::swap(&mut m1, &mut m2);
            std::mem::swap(&mut n1, &mut n2);
        }
        if m2 < n1 {
            return Err(Error::UnsupportedIc([m1, m2, n1, n2]));
        }
        Ok(Ic {
            tx1: m1,
            tx2: m2,
            rx1: n1,
            rx2: n2,
            swapped,
            clamped,
        })
    }
}

/// Which of the two interference-channel schemes applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IcCase {
    /// `M1 >= N2`: Tx1 can zero-force towards Rx2.
    One,
    /// `M1 < N2`: Tx1 occupies only part of Rx2's signal space.
    Two,
}

/// Normalized `(M1, M2, N1, N2)` interference channel with `N1 <= N2`,
/// `M2 >= N1` and no redundant antennas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ic {
    tx1: u32,
    tx2: u32,
    rx1: u32,
    rx2: u32,
    swapped: bool,
    clamped: bool,
}

impl Ic {
    pub fn new(tx1: u32, tx2: u32, rx1: u32, rx2: u32) -> Result<Self> {
        IcAntennas { tx1, tx2, rx1, rx2 }.normalize()
    }

    pub fn tx1(&self) -> u32 {
        self.tx1
    }

    pub fn tx2(&self) -> u32 {
        self.tx2
    }

    pub fn rx1(&self) -> u32 {
        self.rx1
    }

    pub fn rx2(&self) -> u32 {
        self.rx2
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn clamped(&self) -> bool {
        self.clamped
    }

    /// Ties at `M1 = N2` go to Case I.
    pub fn case(&self) -> IcCase {
        if self.tx1 >= self.rx2 {
            IcCase::One
        } else {
            IcCase::Two
        }
    }

    /// Stream bookkeeping of the `M1 <= N2` scheme; `None` when `M1 > N2`.
    pub fn derived_dims(&self) -> Option<DerivedDims> {
        if self.tx1 > self.rx2 {
            return None;
        }
        let (m1, m2, n1, n2) = (
            self.tx1 as i64,
            self.tx2 as i64,
            self.rx1 as i64,
            self.rx2 as i64,
        );
        let rx1_eff = m1.min(n1);
        let rx2_eff = m2.min(n2);
        let full_power = n1 - rx1_eff;
        let zf_clear = (n2 - m1 - full_power).min(m2 - n1);
        let zf_overlap = (rx2_eff - full_power).min(m2 - n1) - zf_clear;
        let sub_clear = n2 - m1 - full_power - zf_clear;
        let sub_overlap = rx2_eff - n2 + m1 - zf_overlap;
        let counts = [
            rx1_eff,
            rx2_eff,
            m1.max(n1),
            full_power,
            zf_clear,
            zf_overlap,
            sub_clear,
            sub_overlap,
            rx1_eff.min(zf_clear + sub_clear),
        ];
        debug_assert!(counts.iter().all(|&c| c >= 0), "{counts:?}");
        let [rx1_eff, rx2_eff, rx1_max, full_power, zf_clear, zf_overlap, sub_clear, sub_overlap, rx1_leak] =
            counts.map(|c| c as u32);
        Some(DerivedDims {
            rx1_eff,
            rx2_eff,
            rx1_max,
            full_power,
            zf_clear,
            zf_overlap,
            sub_clear,
            sub_overlap,
            rx1_leak,
        })
    }
}

/// Stream counts of the `M1 <= N2` interference-channel scheme. All of Rx2's
/// private streams fall in one of the five classes, so
/// `full_power + zf_clear + zf_overlap + sub_clear + sub_overlap = rx2_eff`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DerivedDims {
    /// `min{M1, N1}`
    pub rx1_eff: u32,
    /// `min{M2, N2}`
    pub rx2_eff: u32,
    /// `max{M1, N1}`
    pub rx1_max: u32,
    /// Streams sent at full power, seen by Rx1 outside Tx1's footprint.
    pub full_power: u32,
    /// Zero-forced streams received by Rx2 clear of Tx1 (power `A2'`).
    pub zf_clear: u32,
    /// Zero-forced streams received by Rx2 on top of Tx1 (power `A2`).
    pub zf_overlap: u32,
    /// Subspace streams clear of Tx1 (power `A2' - alpha1`).
    pub sub_clear: u32,
    /// Subspace streams on top of Tx1 (power `(A2 - alpha1)+`).
    pub sub_overlap: u32,
    /// Rx1 dimensions hit at level `A2' - alpha1`: `min{rx1_eff, zf_clear + sub_clear}`.
    pub rx1_leak: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Channel {
    Bc(Bc),
    Ic(Ic),
}

impl Channel {
    pub fn swapped(&self) -> bool {
        match self {
            Channel::Bc(bc) => bc.swapped(),
            Channel::Ic(ic) => ic.swapped(),
        }
    }

    pub fn antennas(&self) -> Vec<u32> {
        match self {
            Channel::Bc(bc) => vec![bc.tx, bc.rx1, bc.rx2],
            Channel::Ic(ic) => vec![ic.tx1, ic.tx2, ic.rx1, ic.rx2],
        }
    }
}

/// Regime discriminant of the broadcast channel; its sign decides whether
/// space-time transmission helps.
pub fn phi_bc(bc: &Bc, alpha: CsitQuality) -> f64 {
    let (span1, span2, span_all) = bc.spans();
    span2 - span1 + (span_all - span2) * alpha.alpha2() - (span_all - span1) * alpha.alpha1()
}

pub fn phi_ic(ic: &Ic, alpha: CsitQuality) -> Result<f64> {
    if ic.case() != IcCase::One {
        return Err(Error::Regime {
            op: "phi_ic",
            need: "M1 >= N2",
        });
    }
    Ok(phi_ic_unchecked(ic, alpha))
}

fn phi_ic_unchecked(ic: &Ic, alpha: CsitQuality) -> f64 {
    let (m1, m2, n1, n2) = ic.reals();
    n2 - n1 + (m1 - n2) * alpha.alpha2() - (m2 - n1) * alpha.alpha1()
}

impl Ic {
    pub(crate) fn reals(&self) -> (f64, f64, f64, f64) {
        (
            self.tx1 as f64,
            self.tx2 as f64,
            self.rx1 as f64,
            self.rx2 as f64,
        )
    }
}

/// Effective CSIT quality of the broadcast sum-DoF line `d1 + d2 <= B + (X - B) alpha0`.
pub fn alpha0_bc(bc: &Bc, alpha: CsitQuality) -> f64 {
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let (span1, span2, span_all) = bc.spans();
    let phi = phi_bc(bc, alpha);
    if phi <= 0.0 {
        return a2;
    }
    if a1 >= 1.0 - a2 {
        return a2 - phi / (span_all - span1);
    }
    let den = (span2 - span1) * (1.0 - a1) + (span_all - span2) * a2;
    if den <= 0.0 {
        return 0.0;
    }
    a1 * a2 * (span_all - span2) / den
}

/// Effective CSIT quality of the Case I interference sum-DoF line.
///
/// When `M1 = N2` the line's alpha0 coefficient `M1 - N2` vanishes and the
/// value is pinned to 0, which keeps the function continuous.
pub fn alpha0_ic(ic: &Ic, alpha: CsitQuality) -> Result<f64> {
    if ic.case() != IcCase::One {
        return Err(Error::Regime {
            op: "alpha0_ic",
            need: "M1 >= N2",
        });
    }
    let (a1, a2) = (alpha.alpha1(), alpha.alpha2());
    let (m1, m2, n1, n2) = ic.reals();
    if m2 <= n2 || m1 == n2 {
        return Ok(0.0);
    }
    let phi = phi_ic_unchecked(ic, alpha);
    if phi <= 0.0 {
        return Ok(a2);
    }
    if (m1 - m2) / (m1 - n2) * a1 >= 1.0 - a2 {
        return Ok((m2 - n2) / (m1 - n2) * a1);
    }
    if a1 >= 1.0 - a2 {
        return Ok(a2 - phi / (m1 - n1));
    }
    let den = (n2 - n1) * (1.0 - a1) + (m1 - n2) * a2;
    if den <= 0.0 {
        return Ok(0.0);
    }
    Ok(a1 * a2 * (m2 - n2) / den)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegimeTag {
    #[serde(rename = "BC_PhiNonPos")]
    BcPhiNonPos,
    #[serde(rename = "BC_PhiPos")]
    BcPhiPos,
    #[serde(rename = "IC_I1")]
    IcI1,
    #[serde(rename = "IC_I2_PhiNonPos")]
    IcI2PhiNonPos,
    #[serde(rename = "IC_I2_PhiPos")]
    IcI2PhiPos,
    #[serde(rename = "IC_II1")]
    IcII1,
    #[serde(rename = "IC_II2a_low")]
    IcII2aLow,
    #[serde(rename = "IC_II2a_high")]
    IcII2aHigh,
    #[serde(rename = "IC_II2b_low")]
    IcII2bLow,
    #[serde(rename = "IC_II2b_mid")]
    IcII2bMid,
    #[serde(rename = "IC_II2b_high")]
    IcII2bHigh,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = serde_json::to_value(self).expect("unit variant serializes");
        write!(f, "{}", name.as_str().unwrap_or_default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Regime {
    pub tag: RegimeTag,
    /// alpha1 breakpoints consulted (Case II.2 only).
    pub thresholds: Vec<f64>,
}

/// Case II.2 alpha1 breakpoints `(M1 - N1')/mu2` and `(N2 - N1)/(mu2 + N2 - N1'')`.
pub(crate) fn case2_breakpoints(ic: &Ic, dims: &DerivedDims) -> (f64, f64) {
    let overlap = dims.zf_overlap as f64;
    let low = (ic.tx1 - dims.rx1_eff) as f64 / overlap;
    let high = (ic.rx2 - ic.rx1) as f64 / (overlap + (ic.rx2 - dims.rx1_max) as f64);
    (low, high)
}

/// Exactly one regime per `(config, alpha)`; ties go to the earlier-listed row.
pub fn classify(channel: &Channel, alpha: CsitQuality) -> Regime {
    let plain = |tag| Regime {
        tag,
        thresholds: Vec::new(),
    };
    match channel {
        Channel::Bc(bc) => plain(if phi_bc(bc, alpha) <= 0.0 {
            RegimeTag::BcPhiNonPos
        } else {
            RegimeTag::BcPhiPos
        }),
        Channel::Ic(ic) => {
            if ic.case() == IcCase::One {
                return plain(if ic.tx2 <= ic.rx2 {
                    RegimeTag::IcI1
                } else if phi_ic_unchecked(ic, alpha) <= 0.0 {
                    RegimeTag::IcI2PhiNonPos
                } else {
                    RegimeTag::IcI2PhiPos
                });
            }
            if ic.tx2 <= ic.rx2 {
                return plain(RegimeTag::IcII1);
            }
            let dims = ic.derived_dims().expect("Case II has derived dims");
            let (low, high) = case2_breakpoints(ic, &dims);
            let a1 = alpha.alpha1();
            if ic.rx1 + ic.tx1 < ic.rx2 {
                Regime {
                    tag: if a1 <= low {
                        RegimeTag::IcII2aLow
                    } else {
                        RegimeTag::IcII2aHigh
                    },
                    thresholds: vec![low],
                }
            } else {
                Regime {
                    tag: if a1 <= low {
                        RegimeTag::IcII2bLow
                    } else if a1 <= high {
                        RegimeTag::IcII2bMid
                    } else {
                        RegimeTag::IcII2bHigh
                    },
                    thresholds: vec![low, high],
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(a1: f64, a2: f64) -> CsitQuality {
        CsitQuality::new(a1, a2).unwrap()
    }

    #[test]
    fn bc_normalization_clamps_and_swaps() {
        let bc = Bc::new(6, 2, 3).unwrap();
        assert_eq!((bc.tx(), bc.rx1(), bc.rx2()), (5, 2, 3));
        assert!(bc.clamped() && !bc.swapped());

        let bc = Bc::new(4, 3, 2).unwrap();
        assert_eq!((bc.tx(), bc.rx1(), bc.rx2()), (4, 2, 3));
        assert!(bc.swapped() && !bc.clamped());
    }

    #[test]
    fn ic_normalization() {
        let ic = Ic::new(4, 3, 2, 3).unwrap();
        assert_eq!((ic.tx1(), ic.tx2(), ic.rx1(), ic.rx2()), (4, 3, 2, 3));
        assert!(!ic.clamped() && !ic.swapped());

        let ic = Ic::new(3, 4, 3, 2).unwrap();
        assert_eq!((ic.tx1(), ic.tx2(), ic.rx1(), ic.rx2()), (4, 3, 2, 3));
        assert!(ic.swapped());

        assert!(matches!(Ic::new(4, 1, 2, 3), Err(Error::UnsupportedIc(_))));
        assert!(matches!(Bc::new(0, 1, 1), Err(Error::AntennaCount(_))));
    }

    #[test]
    fn alpha_outside_unit_interval_is_rejected() {
        assert!(CsitQuality::new(1.2, 0.0).is_err());
        assert!(CsitQuality::new(0.5, -0.1).is_err());
        assert!(CsitQuality::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn derived_dims_of_worked_example() {
        let dims = Ic::new(2, 4, 1, 3).unwrap().derived_dims().unwrap();
        assert_eq!(
            (
                dims.full_power,
                dims.zf_clear,
                dims.zf_overlap,
                dims.sub_clear,
                dims.sub_overlap,
                dims.rx1_leak
            ),
            (0, 1, 2, 0, 0, 1)
        );
        assert!(Ic::new(4, 4, 2, 3).unwrap().derived_dims().is_none());
    }

    #[test]
    fn derived_dims_at_m1_equal_n2() {
        let ic = Ic::new(3, 4, 2, 3).unwrap();
        let dims = ic.derived_dims().unwrap();
        assert_eq!((dims.full_power, dims.zf_clear, dims.sub_clear), (0, 0, 0));
        assert_eq!(dims.zf_overlap, ic.tx2() - ic.rx1());
        assert_eq!(dims.sub_overlap, dims.rx2_eff + ic.rx1() - ic.tx2());
    }

    #[test]
    fn phi_values() {
        let bc = Bc::new(4, 2, 3).unwrap();
        assert_abs_diff_eq!(phi_bc(&bc, q(0.9, 0.6)), -0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(phi_bc(&bc, q(0.3, 0.2)), 0.6, epsilon = 1e-12);
        assert!(phi_bc(&bc, q(1.0, 1.0)) <= 0.0);

        let ic = Ic::new(4, 4, 2, 3).unwrap();
        assert_abs_diff_eq!(phi_ic(&ic, q(0.3, 0.2)).unwrap(), 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(phi_ic(&ic, q(1.0, 1.0)).unwrap(), 0.0, epsilon = 1e-12);
        let ic = Ic::new(5, 5, 2, 3).unwrap();
        assert_abs_diff_eq!(phi_ic(&ic, q(0.5, 0.5)).unwrap(), 0.5, epsilon = 1e-12);
        assert!(phi_ic(&Ic::new(2, 4, 1, 3).unwrap(), q(0.5, 0.5)).is_err());
    }

    #[test]
    fn alpha0_bc_branches() {
        let bc = Bc::new(4, 2, 3).unwrap();
        assert_abs_diff_eq!(alpha0_bc(&bc, q(0.9, 0.6)), 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(alpha0_bc(&bc, q(0.7, 0.6)), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(alpha0_bc(&bc, q(0.3, 0.2)), 0.06 / 0.9, epsilon = 1e-12);
    }

    #[test]
    fn alpha0_ic_branches() {
        let ic = Ic::new(4, 3, 2, 3).unwrap();
        assert_eq!(alpha0_ic(&ic, q(0.4, 0.9)).unwrap(), 0.0);
        let ic = Ic::new(4, 4, 2, 3).unwrap();
        assert_abs_diff_eq!(alpha0_ic(&ic, q(1.0, 1.0)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            alpha0_ic(&ic, q(0.3, 0.2)).unwrap(),
            0.3 * 0.2 / (0.7 + 0.2),
            epsilon = 1e-12
        );
        assert!(alpha0_ic(&Ic::new(2, 4, 1, 3).unwrap(), q(0.2, 0.2)).is_err());
    }

    #[test]
    fn classification_examples() {
        let bc = Channel::Bc(Bc::new(4, 2, 3).unwrap());
        assert_eq!(classify(&bc, q(0.9, 0.6)).tag, RegimeTag::BcPhiNonPos);

        let ic = Channel::Ic(Ic::new(2, 4, 1, 3).unwrap());
        let regime = classify(&ic, q(0.4, 0.0));
        assert_eq!(regime.tag, RegimeTag::IcII2bLow);
        assert_abs_diff_eq!(regime.thresholds[0], 0.5, epsilon = 1e-12);

        let ic = Channel::Ic(Ic::new(3, 3, 2, 4).unwrap());
        for a1 in [0.0, 0.3, 1.0] {
            assert_eq!(classify(&ic, q(a1, 0.5)).tag, RegimeTag::IcII1);
        }
        assert_eq!(RegimeTag::IcII2bLow.to_string(), "IC_II2b_low");
    }

    #[test]
    fn case2_breakpoint_ordering_hides_low_range_when_m1_le_n1() {
        let ic = Ic::new(2, 5, 3, 4).unwrap();
        let dims = ic.derived_dims().unwrap();
        let (low, _) = case2_breakpoints(&ic, &dims);
        assert_eq!(low, 0.0);
    }
}
