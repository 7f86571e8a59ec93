//! Exhaustive grid maximizers used as ground truth for the closed forms.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{phi_bc, Bc, CsitQuality, Ic, IcCase};
use crate::power::{bc_dof_tuple_unchecked, bc_st_dof_tuple_at, ic1_dof_tuple, ic2_program_value};

/// Values closer than this count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { step: 1.0 / 400.0 }
    }
}

impl GridSpec {
    pub fn new(step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::ExponentRange {
                name: "grid step",
                value: step,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(Self { step })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Ascending points `lo, lo + step, ...` closed with `hi` itself.
    pub fn axis(&self, lo: f64, hi: f64) -> Vec<f64> {
        if hi <= lo {
            return vec![lo];
        }
        let n = ((hi - lo) / self.step).floor() as usize;
        let mut points: Vec<f64> = (0..=n).map(|i| lo + i as f64 * self.step).collect();
        if hi - points[n] > TIE_TOL {
            points.push(hi);
        } else {
            points[n] = hi;
        }
        points
    }

    /// Certified gap between the grid and true maxima of a piecewise-linear
    /// objective whose slopes are bounded by `lipschitz`.
    pub fn tolerance(&self, lipschitz: f64) -> f64 {
        lipschitz * self.step
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridMax {
    pub a1: f64,
    pub a2: f64,
    pub value: f64,
}

/// Maximum single-slot broadcast sum DoF; ties go to larger `A1`, then larger `A2`.
pub fn grid_max_sum_bc(bc: &Bc, alpha: CsitQuality, grid: GridSpec) -> GridMax {
    let alpha1 = alpha.alpha1();
    scan_two(grid, alpha.alpha2(), |a1, a2| {
        bc_dof_tuple_unchecked(bc, alpha1, a1, a2).sum()
    })
}

/// Maximum Case I sum DoF (common messages pooled); same tie rule.
pub fn grid_max_sum_ic1(ic: &Ic, alpha: CsitQuality, grid: GridSpec) -> Result<GridMax> {
    if ic.case() != IcCase::One {
        return Err(Error::Regime {
            op: "grid_max_sum_ic1",
            need: "M1 >= N2",
        });
    }
    Ok(scan_two(grid, alpha.alpha2(), |a1, a2| {
        ic1_dof_tuple(ic, alpha, a1, a2)
            .expect("grid stays in range")
            .sum()
    }))
}

fn scan_two(grid: GridSpec, a1_max: f64, objective: impl Fn(f64, f64) -> f64 + Sync) -> GridMax {
    let a2_axis = grid.axis(0.0, 1.0);
    grid.axis(0.0, a1_max)
        .par_iter()
        .map(|&a1| {
            a2_axis.iter().fold(
                GridMax {
                    a1,
                    a2: 0.0,
                    value: f64::NEG_INFINITY,
                },
                |best, &a2| {
                    let value = objective(a1, a2);
                    if value >= best.value - TIE_TOL {
                        GridMax { a1, a2, value }
                    } else {
                        best
                    }
                },
            )
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|best, row| if row.value >= best.value - TIE_TOL { row } else { best })
        .expect("grid is non-empty")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridRho {
    pub rho: f64,
    pub value: f64,
}

/// Maximum space-time broadcast sum DoF over `rho`; ties go to larger `rho`.
pub fn grid_max_st_bc(bc: &Bc, alpha: CsitQuality, grid: GridSpec) -> Result<GridRho> {
    if phi_bc(bc, alpha) < 0.0 {
        return Err(Error::Regime {
            op: "grid_max_st_bc",
            need: "Phi_BC >= 0",
        });
    }
    Ok(grid
        .axis(0.0, 1.0)
        .into_iter()
        .map(|rho| GridRho {
            rho,
            value: bc_st_dof_tuple_at(bc, alpha, rho)
                .expect("rho in range")
                .sum(),
        })
        .reduce(|best, next| {
            if next.value >= best.value - TIE_TOL {
                next
            } else {
                best
            }
        })
        .expect("grid is non-empty"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridD2 {
    pub a2: f64,
    pub a2p: f64,
    pub d2: f64,
}

/// Maximum of the Case II program for `dc1 = lambda`, scanning `A2` outer and
/// `A2'` inner in ascending order; the first maximum found is kept.
/// `None` when no grid point can carry `lambda`.
pub fn grid_max_d2_ic2(
    ic: &Ic,
    alpha: CsitQuality,
    lambda: f64,
    grid: GridSpec,
) -> Result<Option<GridD2>> {
    let dims = ic.derived_dims().ok_or(Error::Regime {
        op: "grid_max_d2_ic2",
        need: "M1 <= N2",
    })?;
    let alpha1 = alpha.alpha1();
    let a2p_axis = grid.axis(alpha1, 1.0);
    let rows: Vec<Option<GridD2>> = grid
        .axis(0.0, 1.0)
        .par_iter()
        .map(|&a2| {
            a2p_axis
                .iter()
                .filter(|&&a2p| a2 <= a2p + TIE_TOL)
                .filter_map(|&a2p| {
                    ic2_program_value(ic, &dims, alpha1, lambda, a2, a2p)
                        .map(|d2| GridD2 { a2, a2p, d2 })
                })
                .reduce(|best, next| if next.d2 > best.d2 + TIE_TOL { next } else { best })
        })
        .collect();
    Ok(rows
        .into_iter()
        .flatten()
        .reduce(|best, next| if next.d2 > best.d2 + TIE_TOL { next } else { best }))
}
