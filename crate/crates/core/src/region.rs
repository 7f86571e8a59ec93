//! Achievable and outer-bound DoF regions as labelled half-planes, their
//! corner points and optimality verdicts.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    alpha0_bc, alpha0_ic, classify, phi_bc, Bc, Channel, CsitQuality, Ic, IcCase, RegimeTag,
};

/// Feasibility, tightness and dedup tolerance for corner points.
pub const VERTEX_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    L0,
    L0p,
    L1,
    L2,
    L3,
    L4,
    L5,
    Axis1,
    Axis2,
}

/// `c1*d1 + c2*d2 <= rhs`. The axis constraints `d1 >= 0`, `d2 >= 0` are
/// stored with coefficient -1 and `rhs = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub label: Label,
    pub c1: f64,
    pub c2: f64,
    pub rhs: f64,
    pub active: bool,
}

impl LinearConstraint {
    pub fn new(label: Label, c1: f64, c2: f64, rhs: f64) -> Self {
        Self {
            label,
            c1,
            c2,
            rhs,
            active: true,
        }
    }

    pub fn axis1() -> Self {
        Self::new(Label::Axis1, -1.0, 0.0, 0.0)
    }

    pub fn axis2() -> Self {
        Self::new(Label::Axis2, 0.0, -1.0, 0.0)
    }

    pub fn is_axis(&self) -> bool {
        matches!(self.label, Label::Axis1 | Label::Axis2)
    }

    /// Nonnegative inside the half-plane.
    pub fn slack(&self, d1: f64, d2: f64) -> f64 {
        self.rhs - self.c1 * d1 - self.c2 * d2
    }

    fn inactive(mut self) -> Self {
        self.active = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub d1: f64,
    pub d2: f64,
    /// Constraints holding with equality at this vertex.
    pub labels: Vec<Label>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "AchievableBC")]
    AchievableBc,
    #[serde(rename = "AchievableIC")]
    AchievableIc,
    #[serde(rename = "OuterBC")]
    OuterBc,
    #[serde(rename = "OuterIC")]
    OuterIc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DofRegion {
    pub provenance: Provenance,
    pub constraints: Vec<LinearConstraint>,
    /// Counterclockwise from the origin.
    pub vertices: Vec<Vertex>,
}

impl DofRegion {
    fn build(provenance: Provenance, mut constraints: Vec<LinearConstraint>) -> Self {
        constraints.push(LinearConstraint::axis1());
        constraints.push(LinearConstraint::axis2());
        let vertices =
            corner_points(&constraints).expect("every region carries L0 and L0p so it is bounded");
        Self {
            provenance,
            constraints,
            vertices,
        }
    }

    pub fn constraint(&self, label: Label) -> Option<&LinearConstraint> {
        self.constraints.iter().find(|c| c.label == label)
    }

    /// Boundary points count as contained.
    pub fn contains(&self, d1: f64, d2: f64, tol: f64) -> bool {
        self.constraints.iter().all(|c| c.slack(d1, d2) >= -tol)
    }

    /// Smallest slack of any vertex of `inner` against this region's constraints.
    pub fn min_slack_of(&self, inner: &DofRegion) -> f64 {
        inner
            .vertices
            .iter()
            .flat_map(|v| self.constraints.iter().map(move |c| c.slack(v.d1, v.d2)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `d2` in the region at the given `d1`, or `None` outside `[0, max d1]`.
    pub fn upper_d2(&self, d1: f64) -> Option<f64> {
        if self.constraints.iter().any(|c| c.c2 == 0.0 && c.slack(d1, 0.0) < -VERTEX_TOL) {
            return None;
        }
        self.constraints
            .iter()
            .filter(|c| c.c2 > 0.0)
            .map(|c| (c.rhs - c.c1 * d1) / c.c2)
            .reduce(f64::min)
    }

    /// Largest `d1 + d2` over the region.
    pub fn max_sum(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.d1 + v.d2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Same region with the two users exchanged.
    pub fn swap_users(&self) -> Self {
        let constraints: Vec<_> = self
            .constraints
            .iter()
            .map(|c| LinearConstraint {
                label: match c.label {
                    Label::Axis1 => Label::Axis2,
                    Label::Axis2 => Label::Axis1,
                    other => other,
                },
                c1: c.c2,
                c2: c.c1,
                ..*c
            })
            .collect();
        let vertices = corner_points(&constraints).expect("swapping keeps the region bounded");
        Self {
            provenance: self.provenance,
            constraints,
            vertices,
        }
    }

    /// True when both regions have the same corner points within `tol`.
    pub fn same_vertices(&self, other: &DofRegion, tol: f64) -> bool {
        same_points(&self.vertices, &other.vertices, tol)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["d1", "d2", "labels"])?;
        for v in &self.vertices {
            let labels: Vec<String> = v.labels.iter().map(|l| format!("{l:?}")).collect();
            writer.write_record([fmt_sig(v.d1), fmt_sig(v.d2), labels.join("|")])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// Shortest decimal form of `x` rounded to 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    round_sig(x).to_string()
}

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

/// Equal vertex sets within `tol`, in any order.
pub fn same_points(a: &[Vertex], b: &[Vertex], tol: f64) -> bool {
    let near = |p: &Vertex, q: &Vertex| (p.d1 - q.d1).abs() < tol && (p.d2 - q.d2).abs() < tol;
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| near(p, q)))
        && b.iter().all(|q| a.iter().any(|p| near(p, q)))
}

/// Extreme points of `{c1 d1 + c2 d2 <= rhs}` intersected with the first
/// quadrant, counterclockwise from the origin and tagged with their tight
/// constraints. Axis constraints are added when missing.
pub fn corner_points(constraints: &[LinearConstraint]) -> Result<Vec<Vertex>> {
    let mut all = constraints.to_vec();
    for axis in [LinearConstraint::axis1(), LinearConstraint::axis2()] {
        if !all.iter().any(|c| c.label == axis.label) {
            all.push(axis);
        }
    }
    if !all.iter().any(|c| !c.is_axis() && c.c1 > 0.0) {
        return Err(Error::Unbounded("d1"));
    }
    if !all.iter().any(|c| !c.is_axis() && c.c2 > 0.0) {
        return Err(Error::Unbounded("d2"));
    }

    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            let det = a.c1 * b.c2 - a.c2 * b.c1;
            if det.abs() < 1e-12 {
                continue;
            }
            let d1 = (a.rhs * b.c2 - a.c2 * b.rhs) / det + 0.0;
            let d2 = (a.c1 * b.rhs - a.rhs * b.c1) / det + 0.0;
            let feasible = all.iter().all(|c| c.slack(d1, d2) >= -VERTEX_TOL);
            let fresh = points
                .iter()
                .all(|&(x, y)| (x - d1).hypot(y - d2) >= VERTEX_TOL);
            if feasible && fresh {
                points.push((d1, d2));
            }
        }
    }

    let n = points.len() as f64;
    let (cx, cy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x / n, sy + y / n));
    points.sort_by(|p, q| {
        let angle = |&(x, y): &(f64, f64)| (y - cy).atan2(x - cx);
        angle(p).total_cmp(&angle(q))
    });
    if let Some(start) = points
        .iter()
        .position(|&(x, y)| x.abs() < VERTEX_TOL && y.abs() < VERTEX_TOL)
    {
        points.rotate_left(start);
    }

    Ok(points
        .into_iter()
        .map(|(d1, d2)| {
            let mut labels: Vec<Label> = all
                .iter()
                .filter(|c| c.slack(d1, d2).abs() <= VERTEX_TOL)
                .map(|c| c.label)
                .collect();
            labels.sort();
            labels.dedup();
            Vertex { d1, d2, labels }
        })
        .collect())
}

fn bc_constraints(bc: &Bc, alpha: CsitQuality, sum_quality: f64) -> Vec<LinearConstraint> {
    let (span1, span2, span_all) = bc.spans();
    vec![
        LinearConstraint::new(Label::L0, 1.0, 0.0, span1),
        LinearConstraint::new(Label::L0p, 0.0, 1.0, span2),
        LinearConstraint::new(Label::L1, 1.0, 1.0, span2 + (span_all - span2) * sum_quality),
        LinearConstraint::new(
            Label::L2,
            1.0 / span1,
            1.0 / span2,
            1.0 + (span_all - span1) / span2 * alpha.alpha1(),
        ),
    ]
}

pub fn bc_region(bc: &Bc, alpha: CsitQuality) -> DofRegion {
    let mut constraints = bc_constraints(bc, alpha, alpha0_bc(bc, alpha));
    if phi_bc(bc, alpha) <= 0.0 {
        constraints[3] = constraints[3].inactive();
    }
    DofRegion::build(Provenance::AchievableBc, constraints)
}

pub fn ic_region(ic: &Ic, alpha: CsitQuality) -> DofRegion {
    let a1 = alpha.alpha1();
    let (m1, m2, n1, n2) = ic.reals();
    let rx2_eff = m2.min(n2);
    let tag = classify(&Channel::Ic(*ic), alpha).tag;

    let mut constraints = if ic.case() == IcCase::One {
        let alpha0 = alpha0_ic(ic, alpha).expect("Case I");
        vec![
            LinearConstraint::new(Label::L0, 1.0, 0.0, n1),
            LinearConstraint::new(Label::L0p, 0.0, 1.0, rx2_eff),
            LinearConstraint::new(Label::L1, 1.0, 1.0, rx2_eff + (m1 - n2) * alpha0),
            LinearConstraint::new(
                Label::L2,
                1.0 / n1,
                1.0 / rx2_eff,
                1.0 + (m2 - n1) * a1 / rx2_eff,
            ),
        ]
    } else {
        let dims = ic.derived_dims().expect("Case II");
        let rx1_eff = dims.rx1_eff as f64;
        let rx1_max = dims.rx1_max as f64;
        let overlap = dims.zf_overlap as f64;
        let w2 = rx2_eff - n1 + rx1_eff;
        let mut cs = vec![
            LinearConstraint::new(Label::L0, 1.0, 0.0, rx1_eff),
            LinearConstraint::new(Label::L0p, 0.0, 1.0, rx2_eff),
            LinearConstraint::new(Label::L1, 1.0, 1.0, rx2_eff),
            LinearConstraint::new(
                Label::L2,
                1.0 / rx1_eff,
                1.0 / w2,
                (rx2_eff + (m2 - n1) * a1) / w2,
            ),
        ];
        if m2 >= n2 && n1 + m1 <= n2 {
            let w3 = n2 - rx1_max + rx1_eff;
            cs.push(LinearConstraint::new(
                Label::L3,
                1.0 / rx1_eff,
                1.0 / w3,
                (n2 + (n2 - rx1_max) * a1) / w3,
            ));
        }
        if m2 >= n2 && n1 + m1 >= n2 {
            let w4 = n2 - n1 + m1;
            cs.push(LinearConstraint::new(
                Label::L4,
                1.0 / m1,
                1.0 / w4,
                n2 / w4 + ((n2 - rx1_max) / w4 + overlap * (m1 + n1 - n2) / (m1 * w4)) * a1,
            ));
            cs.push(LinearConstraint::new(
                Label::L5,
                1.0,
                0.5,
                0.5 * (m1 + n1 + (n2 - rx1_max) * a1),
            ));
        }
        cs
    };

    let idle: &[Label] = match tag {
        RegimeTag::IcI2PhiNonPos | RegimeTag::IcII2aHigh | RegimeTag::IcII2bMid => &[Label::L2],
        RegimeTag::IcII2bLow => &[Label::L5],
        RegimeTag::IcII2bHigh => &[Label::L2, Label::L4],
        _ => &[],
    };
    for c in constraints.iter_mut().filter(|c| idle.contains(&c.label)) {
        *c = c.inactive();
    }
    DofRegion::build(Provenance::AchievableIc, constraints)
}

pub fn achievable_region(channel: &Channel, alpha: CsitQuality) -> DofRegion {
    match channel {
        Channel::Bc(bc) => bc_region(bc, alpha),
        Channel::Ic(ic) => ic_region(ic, alpha),
    }
}

/// BC: the achievable constraints with the sum line at `alpha2`. IC: the
/// broadcast bound for cooperating transmitters with `M = M1 + M2`.
pub fn outer_region(channel: &Channel, alpha: CsitQuality) -> DofRegion {
    match channel {
        Channel::Bc(bc) => DofRegion::build(
            Provenance::OuterBc,
            bc_constraints(bc, alpha, alpha.alpha2()),
        ),
        Channel::Ic(ic) => {
            let joint = Bc::new(ic.tx1() + ic.tx2(), ic.rx1(), ic.rx2())
                .expect("normalized IC counts are positive");
            DofRegion::build(
                Provenance::OuterIc,
                bc_constraints(&joint, alpha, alpha.alpha2()),
            )
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Optimality {
    Yes,
    #[serde(rename = "No/Unknown")]
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub achievable: DofRegion,
    pub outer: DofRegion,
    pub optimal: Optimality,
    pub regime: RegimeTag,
    pub rationale: String,
    /// Whether the achievable and outer sum-DoF lines coincide.
    pub sum_tight: bool,
}

pub fn verdict(channel: &Channel, alpha: CsitQuality) -> RegionVerdict {
    let achievable = achievable_region(channel, alpha);
    let outer = outer_region(channel, alpha);
    let regime = classify(channel, alpha).tag;
    let sum_tight = (achievable.max_sum() - outer.max_sum()).abs() < VERTEX_TOL;

    let claimed = match channel {
        Channel::Bc(bc) if bc.tx() <= bc.rx2() => Some("M <= N2: sum DoF min(M, N2) is optimal"),
        Channel::Bc(_) if regime == RegimeTag::BcPhiNonPos => {
            Some("Phi_BC <= 0: achievable sum line meets the outer bound")
        }
        Channel::Ic(_) if regime == RegimeTag::IcI1 => {
            Some("M1 >= N2, M2 <= N2: matches the delayed-plus-imperfect CSIT optimum")
        }
        Channel::Ic(_) if regime == RegimeTag::IcI2PhiNonPos => {
            Some("M1 >= N2, M2 > N2, Phi_IC <= 0: claimed tight against the cooperation bound")
        }
        Channel::Ic(ic)
            if regime == RegimeTag::IcII1 && ic.rx1() <= ic.tx1() && ic.tx1() <= ic.rx2() =>
        {
            Some("N1 <= M1 <= N2, M2 <= N2: matches the delayed-plus-imperfect CSIT optimum")
        }
        _ => None,
    };
    let (optimal, rationale) = match claimed {
        Some(why) => (Optimality::Yes, why.to_string()),
        None if achievable.same_vertices(&outer, VERTEX_TOL) => (
            Optimality::Yes,
            "achievable and outer corner points coincide".to_string(),
        ),
        None => (
            Optimality::Unknown,
            format!("{regime}: outer bound not known to be tight"),
        ),
    };
    RegionVerdict {
        achievable,
        outer,
        optimal,
        regime,
        rationale,
        sum_tight,
    }
}

/// Regions the schemes must reproduce at the CSIT extremes, built by
/// dimension counting alone.
pub mod reference {
    use super::*;

    /// No CSIT. BC: `d1/N1' + d2/N2' <= 1`. IC: hull of the origin,
    /// `(N1', 0)`, `(N1', N1 - N1')` and `(0, N2')`.
    pub fn no_csit(channel: &Channel) -> Vec<Vertex> {
        match channel {
            Channel::Bc(bc) => {
                let (span1, span2, _) = bc.spans();
                corner_points(&[
                    LinearConstraint::new(Label::L0, 1.0, 0.0, span1),
                    LinearConstraint::new(Label::L0p, 0.0, 1.0, span2),
                    LinearConstraint::new(Label::L2, 1.0 / span1, 1.0 / span2, 1.0),
                ])
                .expect("bounded")
            }
            Channel::Ic(ic) => {
                let rx1_eff = ic.tx1().min(ic.rx1()) as f64;
                let rx2_eff = ic.tx2().min(ic.rx2()) as f64;
                let mut points = vec![(0.0, 0.0), (rx1_eff, 0.0)];
                if ic.rx1() as f64 > rx1_eff {
                    points.push((rx1_eff, ic.rx1() as f64 - rx1_eff));
                }
                points.push((0.0, rx2_eff));
                points
                    .into_iter()
                    .map(|(d1, d2)| Vertex {
                        d1,
                        d2,
                        labels: Vec::new(),
                    })
                    .collect()
            }
        }
    }

    /// Perfect-CSIT BC region.
    pub fn perfect_csit_bc(bc: &Bc) -> Vec<Vertex> {
        let (span1, span2, span_all) = bc.spans();
        corner_points(&[
            LinearConstraint::new(Label::L0, 1.0, 0.0, span1),
            LinearConstraint::new(Label::L0p, 0.0, 1.0, span2),
            LinearConstraint::new(Label::L1, 1.0, 1.0, span_all),
        ])
        .expect("bounded")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn q(a1: f64, a2: f64) -> CsitQuality {
        CsitQuality::new(a1, a2).unwrap()
    }

    fn pts(region: &DofRegion) -> Vec<(f64, f64)> {
        region
            .vertices
            .iter()
            .map(|v| (round_sig(v.d1), round_sig(v.d2)))
            .collect()
    }

    fn has_point(region: &DofRegion, d1: f64, d2: f64) -> bool {
        region
            .vertices
            .iter()
            .any(|v| (v.d1 - d1).abs() < 1e-9 && (v.d2 - d2).abs() < 1e-9)
    }

    #[test]
    fn corner_points_of_simple_polygons() {
        let cs = [
            LinearConstraint::new(Label::L0, 1.0, 0.0, 2.0),
            LinearConstraint::new(Label::L0p, 0.0, 1.0, 3.0),
            LinearConstraint::new(Label::L1, 1.0, 1.0, 4.0),
        ];
        let v = corner_points(&cs).unwrap();
        let got: Vec<_> = v.iter().map(|v| (v.d1, v.d2)).collect();
        assert_eq!(got, vec![(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (1.0, 3.0), (0.0, 3.0)]);
        assert_eq!(v[2].labels, vec![Label::L0, Label::L1]);

        let square = corner_points(&cs[..2].iter().map(|c| LinearConstraint { rhs: 1.0, ..*c }).collect::<Vec<_>>()).unwrap();
        assert_eq!(square.len(), 4);

        let mut dup = cs.to_vec();
        dup.push(LinearConstraint::new(Label::L2, 2.0, 2.0, 8.0));
        let with_dup = corner_points(&dup).unwrap();
        assert!(same_points(&v, &with_dup, 1e-9));
        assert_eq!(with_dup[2].labels, vec![Label::L0, Label::L1, Label::L2]);
    }

    #[test]
    fn unbounded_constraint_set_is_rejected() {
        let cs = [LinearConstraint::new(Label::L0, 1.0, 0.0, 2.0)];
        assert!(matches!(corner_points(&cs), Err(Error::Unbounded("d2"))));
    }

    #[test]
    fn bc_423_phi_nonpositive() {
        let bc = Bc::new(4, 2, 3).unwrap();
        let region = bc_region(&bc, q(0.9, 0.6));
        assert_abs_diff_eq!(region.constraint(Label::L1).unwrap().rhs, 3.6, epsilon = 1e-12);
        assert!(has_point(&region, 2.0, 1.6));
        assert!(has_point(&region, 0.6, 3.0));
        assert!(!region.constraint(Label::L2).unwrap().active);
    }

    #[test]
    fn bc_423_extremes() {
        let bc = Bc::new(4, 2, 3).unwrap();
        let none = bc_region(&bc, q(0.0, 0.4));
        assert_eq!(pts(&none), vec![(0.0, 0.0), (2.0, 0.0), (0.0, 3.0)]);
        assert!(same_points(&none.vertices, &reference::no_csit(&Channel::Bc(bc)), 1e-9));
        let full = bc_region(&bc, q(1.0, 1.0));
        assert!(same_points(&full.vertices, &reference::perfect_csit_bc(&bc), 1e-9));
        assert!(has_point(&full, 2.0, 2.0) && has_point(&full, 1.0, 3.0));
    }

    #[test]
    fn ic_case_one_corner_points() {
        let ic = Ic::new(4, 3, 2, 3).unwrap();
        let region = ic_region(&ic, q(0.5, 0.3));
        assert_eq!(pts(&region), vec![(0.0, 0.0), (2.0, 0.0), (2.0, 0.5), (1.0, 2.0), (0.0, 3.0)]);
    }

    #[test]
    fn ic_case_two_one_corner_points() {
        let ic = Ic::new(3, 3, 2, 4).unwrap();
        let region = ic_region(&ic, q(0.5, 0.0));
        assert!(has_point(&region, 1.0, 2.0));
        assert!(has_point(&region, 2.0, 0.5));
    }

    #[test]
    fn outer_bounds() {
        let bc = Channel::Bc(Bc::new(4, 2, 3).unwrap());
        let outer = outer_region(&bc, q(0.9, 0.6));
        assert_abs_diff_eq!(outer.constraint(Label::L1).unwrap().rhs, 3.6, epsilon = 1e-12);

        let ic = Channel::Ic(Ic::new(4, 4, 2, 3).unwrap());
        let outer = outer_region(&ic, q(0.3, 0.2));
        assert_abs_diff_eq!(outer.constraint(Label::L1).unwrap().rhs, 3.0 + 2.0 * 0.2, epsilon = 1e-12);
    }

    #[test]
    fn verdicts() {
        let bc = Channel::Bc(Bc::new(4, 2, 3).unwrap());
        let v = verdict(&bc, q(0.9, 0.6));
        assert_eq!(v.optimal, Optimality::Yes);
        assert!(v.sum_tight);

        let ic = Channel::Ic(Ic::new(4, 4, 2, 3).unwrap());
        assert_eq!(verdict(&ic, q(0.3, 0.2)).optimal, Optimality::Unknown);

        let ic = Channel::Ic(Ic::new(3, 3, 2, 4).unwrap());
        assert_eq!(verdict(&ic, q(0.5, 0.5)).optimal, Optimality::Yes);
    }

    #[test]
    fn swap_users_mirrors_region() {
        let bc = Bc::new(4, 2, 3).unwrap();
        let region = bc_region(&bc, q(0.9, 0.6));
        let swapped = region.swap_users();
        assert!(has_point(&swapped, 3.0, 0.6));
        assert!(has_point(&swapped, 1.6, 2.0));
        assert_eq!(swapped.vertices[0].d1, 0.0);
        assert!(swapped.same_vertices(&swapped.swap_users().swap_users(), 1e-12));
    }

    #[test]
    fn json_round_trip() {
        let region = ic_region(&Ic::new(2, 4, 1, 3).unwrap(), q(0.4, 0.3));
        let text = serde_json::to_string(&region).unwrap();
        let back: DofRegion = serde_json::from_str(&text).unwrap();
        assert_eq!(back, region);
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(fmt_sig(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(round_sig(1e-300), 1e-300);
    }
}
