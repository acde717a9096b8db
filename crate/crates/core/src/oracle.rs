//! Reference spectra: a finite-difference discretisation of `-β²ψ'' + Vψ = εψ`
//! with Dirichlet ends, solved by Sturm-sequence bisection, and closed-form
//! spectra for the harmonic and tanh² wells.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{BuiltinWell, PhysicalScale, WellDescriptor};

/// Maximum relative eigenvalue shift tolerated when the box grows by half.
pub const BOUNDARY_REL_TOL: f64 = 1e-8;

/// Number of eigenvalues of the symmetric tridiagonal matrix `(diag, off)` below `lambda`.
///
/// `off_sq` holds the squared off-diagonal entries.
pub fn sturm_count(diag: &[f64], off_sq: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut pivot = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let coupling = if i == 0 { 0.0 } else { off_sq[i - 1] / pivot };
        pivot = d - lambda - coupling;
        if pivot == 0.0 {
            pivot = -f64::EPSILON * (d.abs() + lambda.abs()).max(f64::MIN_POSITIVE);
        }
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off_sq: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off_sq[i - 1].sqrt() } else { 0.0 };
        let right = if i + 1 < n { off_sq[i].sqrt() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
pub fn kth_eigenvalue(diag: &[f64], off_sq: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off_sq);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off_sq, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A uniform grid on `[-L, L]` with `points` nodes including both Dirichlet ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdGrid {
    pub half_width: f64,
    pub points: usize,
}

impl FdGrid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Same spacing, half-width scaled by `factor`.
    pub fn widened(&self, factor: f64) -> FdGrid {
        let intervals = ((self.points - 1) as f64 * factor / 2.0).round() as usize * 2;
        FdGrid {
            half_width: self.spacing() * intervals as f64 / 2.0,
            points: intervals + 1,
        }
    }

    /// Spacing halved.
    pub fn refined(&self) -> FdGrid {
        FdGrid {
            half_width: self.half_width,
            points: 2 * self.points - 1,
        }
    }
}

struct Discretisation {
    diag: Vec<f64>,
    off_sq: Vec<f64>,
}

impl Discretisation {
    fn new(well: &WellDescriptor, scale: PhysicalScale, grid: FdGrid) -> Self {
        let h = grid.spacing();
        let kinetic = scale.beta() * scale.beta() / (h * h);
        let interior = grid.points - 2;
        let diag = (1..=interior)
            .map(|j| 2.0 * kinetic + well.value(-grid.half_width + j as f64 * h))
            .collect();
        let off_sq = vec![kinetic * kinetic; interior.saturating_sub(1)];
        Self { diag, off_sq }
    }

    fn count_below(&self, lambda: f64) -> usize {
        sturm_count(&self.diag, &self.off_sq, lambda)
    }

    fn lowest(&self, count: usize) -> Vec<f64> {
        (0..count)
            .map(|k| kth_eigenvalue(&self.diag, &self.off_sq, k))
            .collect()
    }
}

/// Reference eigenvalues with their discretisation-error estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSpectrum {
    /// Richardson-extrapolated eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// `|ε(N) - ε(2N-1)| / 3`, the error of the finer-grid value.
    pub errors: Vec<f64>,
    pub grid: FdGrid,
}

impl OracleSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.eigenvalues.get(n).copied()
    }
}

fn validate_grid(grid: FdGrid) -> Result<()> {
    if grid.points < 501 || grid.points.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "N".into(),
            value: grid.points as f64,
            reason: "must be odd and at least 501",
        });
    }
    if !(grid.half_width.is_finite() && grid.half_width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "L".into(),
            value: grid.half_width,
            reason: "must be positive and finite",
        });
    }
    Ok(())
}

/// Lowest eigenvalues on `grid` and on its refinement, extrapolated.
///
/// For asymptotic wells `m = None` means every level below `U`; confining
/// wells need an explicit `m`.
pub fn fd_spectrum(
    well: &WellDescriptor,
    scale: PhysicalScale,
    grid: FdGrid,
    m: Option<usize>,
) -> Result<OracleSpectrum> {
    validate_grid(grid)?;
    let l = grid.half_width;
    if let Some(u) = well.asymptote() {
        let depth = u - well.v_min();
        let edge = well.value(l).min(well.value(-l));
        if edge < u - 1e-10 * depth {
            return Err(Error::OracleDomainTooSmall {
                half_width: l,
                shift: (u - edge) / depth,
            });
        }
    }

    let coarse = Discretisation::new(well, scale, grid);
    let fine = Discretisation::new(well, scale, grid.refined());
    let count = match (well.asymptote(), m) {
        (Some(u), m) => {
            let bound = fine.count_below(u);
            match m {
                Some(m) if m > bound => {
                    return Err(Error::NoSuchBoundState {
                        n: m - 1,
                        count: bound,
                    })
                }
                Some(m) => m,
                None => bound,
            }
        }
        (None, Some(m)) => m,
        (None, None) => {
            return Err(Error::Config(
                "a confining well needs an explicit oracle level count".into(),
            ))
        }
    };

    let c = coarse.lowest(count);
    let f = fine.lowest(count);

    let wide = Discretisation::new(well, scale, grid.widened(1.5)).lowest(count);
    let level_scale = well.asymptote().map_or(1.0, |u| 1e-3 * (u - well.v_min()));
    let shift = c
        .iter()
        .zip(&wide)
        .map(|(a, b)| (a - b).abs() / a.abs().max(level_scale))
        .fold(0.0, f64::max);
    if shift > BOUNDARY_REL_TOL {
        return Err(Error::OracleDomainTooSmall {
            half_width: l,
            shift,
        });
    }

    let mut eigenvalues = Vec::with_capacity(count);
    let mut errors = Vec::with_capacity(count);
    for (ec, ef) in c.iter().zip(&f) {
        let value = (4.0 * ef - ec) / 3.0;
        let err = (ec - ef).abs() / 3.0;
        if let Some(u) = well.asymptote() {
            if !(value < u - err) {
                break;
            }
        }
        eigenvalues.push(value);
        errors.push(err);
    }
    Ok(OracleSpectrum {
        eigenvalues,
        errors,
        grid,
    })
}

/// [`fd_spectrum`] with the box grown for weakly bound states.
///
/// The half-width becomes at least `10β/√(U - ε_top)` for the highest bound
/// level found on a first pass; the spacing of `base` is kept.
pub fn fd_spectrum_auto(
    well: &WellDescriptor,
    scale: PhysicalScale,
    base: FdGrid,
    m: Option<usize>,
) -> Result<OracleSpectrum> {
    validate_grid(base)?;
    let Some(u) = well.asymptote() else {
        return fd_spectrum(well, scale, base, m);
    };
    let mut grid = base;
    for _ in 0..12 {
        let pass = Discretisation::new(well, scale, grid);
        let bound = pass.count_below(u);
        let wanted = m.unwrap_or(bound).min(bound);
        if bound == 0 || m.is_some_and(|m| m > bound) {
            grid = grid.widened(2.0);
            continue;
        }
        let top = kth_eigenvalue(&pass.diag, &pass.off_sq, wanted - 1);
        let needed = 10.0 * scale.beta() / (u - top).sqrt();
        if needed > grid.half_width {
            grid = grid.widened(needed / grid.half_width * 1.05);
            continue;
        }
        match fd_spectrum(well, scale, grid, m) {
            Err(Error::OracleDomainTooSmall { .. }) => grid = grid.widened(2.0),
            other => return other,
        }
    }
    fd_spectrum(well, scale, grid, m)
}

/// Number of bound levels of the tanh² well: levels exist for `n < s`.
fn tanh2_order(depth: f64, beta: f64) -> f64 {
    0.5 * (-1.0 + (1.0 + 4.0 * depth / (beta * beta)).sqrt())
}

/// Closed-form level `n` for the harmonic and tanh² catalog wells.
pub fn analytic_spectrum(well: &BuiltinWell, scale: PhysicalScale, n: usize) -> Result<f64> {
    let beta = scale.beta();
    match *well {
        BuiltinWell::Harmonic => Ok(beta * (2 * n + 1) as f64),
        BuiltinWell::Tanh2 { depth } => {
            let s = tanh2_order(depth, beta);
            if (n as f64) < s {
                Ok(depth - beta * beta * (s - n as f64).powi(2))
            } else {
                Err(Error::NoSuchBoundState {
                    n,
                    count: s.ceil() as usize,
                })
            }
        }
        other => Err(Error::NoAnalyticSpectrum(other.name().to_string())),
    }
}
