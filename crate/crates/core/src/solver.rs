//! Root solve of `Φ(ε) - δ(ε) = n + ½` per level, spectrum assembly and the
//! class-distance diagnostics `γ = dδ/dn`, `q`, `μ = 1 - q`.

use serde::Serialize;

use crate::correction::{
    compute_q_with, delta1_numeric, improved_delta, pade_delta, simplified_delta1_with,
    CorrectionScheme, QForm,
};
use crate::error::{Error, Result};
use crate::potential::{PhysicalScale, WellDescriptor};
use crate::quadrature::{
    d1_wrt_eps, phase_at_asymptote, phase_integral, EnergyWindow, QuadratureConfig,
};

/// Whether `q` is fixed once per well or re-evaluated at every level.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QMode {
    /// `q` from `δ₁` at the mid-depth reference energy `(V_min + U)/2`.
    #[default]
    PerWell,
    /// `q` from `δ₁` at each energy (diagnostic).
    PerLevel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub quadrature: QuadratureConfig,
    pub q_form: QForm,
    pub q_mode: QMode,
    /// Relative tolerance on `ε`.
    pub rel_tol: f64,
    /// Bound on `|Φ(ε_n) - δ - (n + ½)|` for an accepted level.
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            q_form: QForm::Product,
            q_mode: QMode::PerWell,
            rel_tol: 1e-10,
            residual_tol: 1e-8,
        }
    }
}

/// One solved level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub delta1: Option<f64>,
    pub q: Option<f64>,
    pub mu: Option<f64>,
    pub gamma: Option<f64>,
    pub residual: f64,
    pub bracket: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    NoRootBelowU,
    NMaxReached,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::NoRootBelowU => "no-root-below-U",
            Termination::NMaxReached => "n-max-reached",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub well: String,
    pub params: Vec<(String, f64)>,
    pub scheme: CorrectionScheme,
    pub beta: f64,
    pub levels: Vec<LevelRecord>,
    pub termination: Termination,
}

impl SpectrumReport {
    pub fn count(&self) -> usize {
        self.levels.len()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.eps).collect()
    }
}

/// `δ` at one energy with the ingredients it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEval {
    pub delta: f64,
    pub delta1: Option<f64>,
    pub q: Option<f64>,
}

/// Relative bracket width at which bisection hands over to the secant stage.
const COARSE_REL_WIDTH: f64 = 1e-3;

/// A well, a scheme and the per-well quantities (`Φ(U)`, `q`) they need.
#[derive(Debug, Clone)]
pub struct LevelSolver<'w> {
    well: &'w WellDescriptor,
    scheme: CorrectionScheme,
    scale: PhysicalScale,
    opts: SolverOptions,
    phi_at_u: Option<f64>,
    well_q: Option<f64>,
}

impl<'w> LevelSolver<'w> {
    pub fn new(
        well: &'w WellDescriptor,
        scheme: CorrectionScheme,
        scale: PhysicalScale,
        opts: SolverOptions,
    ) -> Result<Self> {
        opts.quadrature.validate()?;
        let mut solver = Self {
            well,
            scheme,
            scale,
            opts,
            phi_at_u: None,
            well_q: None,
        };
        if scheme.needs_asymptote() {
            let u = well.asymptote().ok_or(Error::InapplicableScheme {
                scheme: scheme.name(),
            })?;
            let phi_u = phase_at_asymptote(well, scale, &opts.quadrature)?;
            let eps_ref = 0.5 * (well.v_min() + u);
            let d1_ref = delta1_numeric(well, eps_ref, scale, &opts.quadrature)?;
            solver.phi_at_u = Some(phi_u);
            solver.well_q = Some(compute_q_with(opts.q_form, d1_ref, phi_u)?);
        }
        Ok(solver)
    }

    pub fn scheme(&self) -> CorrectionScheme {
        self.scheme
    }

    pub fn phi_at_u(&self) -> Option<f64> {
        self.phi_at_u
    }

    /// `q` measured at the reference energy (improved schemes only).
    pub fn well_q(&self) -> Option<f64> {
        self.well_q
    }

    fn cfg(&self) -> &QuadratureConfig {
        &self.opts.quadrature
    }

    pub fn phase(&self, eps: f64) -> Result<f64> {
        phase_integral(self.well, eps, self.scale, self.cfg())
    }

    pub fn delta1(&self, eps: f64) -> Result<f64> {
        delta1_numeric(self.well, eps, self.scale, self.cfg())
    }

    pub fn delta_at(&self, eps: f64) -> Result<DeltaEval> {
        let phi_u = || {
            self.phi_at_u.ok_or(Error::InapplicableScheme {
                scheme: self.scheme.name(),
            })
        };
        Ok(match self.scheme {
            CorrectionScheme::Plain => DeltaEval {
                delta: 0.0,
                delta1: None,
                q: None,
            },
            CorrectionScheme::FirstOrder => {
                let d1 = self.delta1(eps)?;
                DeltaEval {
                    delta: d1,
                    delta1: Some(d1),
                    q: None,
                }
            }
            CorrectionScheme::Pade => {
                let d1 = self.delta1(eps)?;
                DeltaEval {
                    delta: pade_delta(d1),
                    delta1: Some(d1),
                    q: None,
                }
            }
            CorrectionScheme::Improved => {
                let d1 = self.delta1(eps)?;
                let q = match self.opts.q_mode {
                    QMode::PerWell => self.well_q.expect("set in new() for improved schemes"),
                    QMode::PerLevel => compute_q_with(self.opts.q_form, d1, phi_u()?)?,
                };
                DeltaEval {
                    delta: improved_delta(d1, q)?,
                    delta1: Some(d1),
                    q: Some(q),
                }
            }
            CorrectionScheme::ImprovedSimplified => {
                let surrogate = simplified_delta1_with(self.opts.q_form, phi_u()?)?;
                DeltaEval {
                    delta: improved_delta(surrogate, 1.0)?,
                    delta1: None,
                    q: None,
                }
            }
        })
    }

    fn bounds(&self) -> (f64, Option<f64>, f64) {
        let v_min = self.well.v_min();
        match self.well.asymptote() {
            Some(u) => {
                let h0 = 1e-9 * (u - v_min);
                (v_min + h0, Some(u - h0), u - v_min)
            }
            None => (
                v_min + 1e-9 * v_min.abs().max(1.0),
                None,
                v_min.abs().max(1.0),
            ),
        }
    }

    /// Bisection on a monotone map until the bracket is `COARSE_REL_WIDTH` wide
    /// relative to the height above the well bottom.
    fn coarse_bisect<F: Fn(f64) -> Result<f64>>(
        &self,
        g: F,
        mut a: f64,
        mut b: f64,
    ) -> Result<(f64, f64)> {
        let v_min = self.well.v_min();
        while b - a > COARSE_REL_WIDTH * (b - v_min) {
            let mid = 0.5 * (a + b);
            if g(mid)? > 0.0 {
                b = mid;
            } else {
                a = mid;
            }
        }
        Ok((a, b))
    }

    /// Upper bracket for a confining well: grow until `g > 0`.
    fn grow_upper<F: Fn(f64) -> Result<f64>>(&self, g: F, n: usize) -> Result<f64> {
        let v_min = self.well.v_min();
        let mut height = v_min.abs().max(1.0);
        for _ in 0..200 {
            let e = v_min + height;
            if g(e)? > 0.0 {
                return Ok(e);
            }
            height *= 2.0;
        }
        Err(Error::RootNotBracketed {
            n,
            lo: v_min,
            hi: v_min + height,
        })
    }

    pub fn solve_level(&self, n: usize) -> Result<LevelRecord> {
        let target = n as f64 + 0.5;
        let (lo, hi_limit, span) = self.bounds();
        let v_min = self.well.v_min();

        // Coarse stage: δ frozen at a reference energy.
        let delta_c = if self.scheme.is_energy_independent() {
            self.delta_at(lo)?.delta
        } else {
            match self.well.asymptote() {
                Some(u) => self.delta_at(0.5 * (v_min + u))?.delta,
                None => {
                    let plain = |e: f64| Ok(self.phase(e)? - target);
                    let top = self.grow_upper(plain, n)?;
                    let (a, b) = self.coarse_bisect(plain, lo, top)?;
                    self.delta_at(0.5 * (a + b))?.delta
                }
            }
        };
        let g = |e: f64| -> Result<f64> { Ok(self.phase(e)? - delta_c - target) };
        let g_lo = g(lo)?;
        if !(g_lo < 0.0) {
            return Err(Error::RootNotBracketed {
                n,
                lo,
                hi: hi_limit.unwrap_or(f64::INFINITY),
            });
        }
        let hi = match hi_limit {
            Some(h) => {
                if !(g(h)? > 0.0) {
                    return Err(Error::LevelNotFound { n });
                }
                h
            }
            None => self.grow_upper(g, n)?,
        };
        let (mut a, mut b) = self.coarse_bisect(g, lo, hi)?;

        // Fine stage: δ re-evaluated at every probe.
        let f = |e: f64| -> Result<f64> {
            if self.scheme.is_energy_independent() {
                g(e)
            } else {
                Ok(self.phase(e)? - self.delta_at(e)?.delta - target)
            }
        };
        let mut fa = f(a)?;
        let mut fb = f(b)?;
        let mut width = b - a;
        let mut guard = 0;
        while fa > 0.0 || fb < 0.0 {
            guard += 1;
            if guard > 100 {
                return Err(Error::RootNotBracketed { n, lo: a, hi: b });
            }
            if fa > 0.0 {
                if a <= lo {
                    return Err(Error::RootNotBracketed { n, lo: a, hi: b });
                }
                b = a;
                fb = fa;
                a = (a - width).max(lo);
                fa = f(a)?;
            } else {
                if let Some(h) = hi_limit {
                    if b >= h {
                        return Err(Error::LevelNotFound { n });
                    }
                }
                a = b;
                fa = fb;
                b = hi_limit.map_or(b + width, |h| (b + width).min(h));
                fb = f(b)?;
            }
            width *= 2.0;
        }

        // Illinois-modified false position with a bisection safeguard.
        let tol = |e: f64| self.opts.rel_tol * e.abs().max(1e-6 * span);
        let (mut wa, mut wb) = (fa, fb);
        let (mut best, mut f_best) = if fa.abs() < fb.abs() {
            (a, fa)
        } else {
            (b, fb)
        };
        let mut side = 0i8;
        let mut slow_steps = 0;
        // Near the asymptote Φ is steep, so the ε tolerance alone does not pin the residual.
        for _ in 0..300 {
            let at_resolution = b - a <= 4.0 * f64::EPSILON * b.abs().max(a.abs());
            if at_resolution
                || (b - a <= tol(0.5 * (a + b)) && f_best.abs() < 0.1 * self.opts.residual_tol)
            {
                break;
            }
            let before = b - a;
            let mut c = if slow_steps >= 2 {
                0.5 * (a + b)
            } else {
                (a * wb - b * wa) / (wb - wa)
            };
            if !(c > a && c < b) {
                c = 0.5 * (a + b);
            }
            let fc = f(c)?;
            if fc.abs() <= f_best.abs() {
                best = c;
                f_best = fc;
            }
            if fc == 0.0 {
                a = c;
                b = c;
                break;
            }
            if fc > 0.0 {
                b = c;
                wb = fc;
                if side == 1 {
                    wa *= 0.5;
                }
                side = 1;
            } else {
                a = c;
                wa = fc;
                if side == -1 {
                    wb *= 0.5;
                }
                side = -1;
            }
            slow_steps = if b - a > 0.5 * before {
                slow_steps + 1
            } else {
                0
            };
            if slow_steps > 2 {
                slow_steps = 2;
            }
        }
        if b - a > tol(0.5 * (a + b)) {
            return Err(Error::NoConvergence {
                what: "level solve",
                last: b,
                previous: a,
            });
        }

        let eps = best;
        let eval = self.delta_at(eps)?;
        let residual = (self.phase(eps)? - eval.delta - target).abs();
        if !(residual < self.opts.residual_tol) {
            return Err(Error::NoConvergence {
                what: "level residual",
                last: residual,
                previous: self.opts.residual_tol,
            });
        }
        let delta1 = match eval.delta1 {
            Some(d) => Some(d),
            None => self.delta1(eps).ok(),
        };
        let q = if self.scheme.needs_asymptote() {
            match (self.opts.q_mode, eval.q) {
                (QMode::PerLevel, Some(q)) => Some(q),
                (QMode::PerLevel, None) => match (delta1, self.phi_at_u) {
                    (Some(d), Some(p)) => Some(compute_q_with(self.opts.q_form, d, p)?),
                    _ => None,
                },
                (QMode::PerWell, _) => self.well_q,
            }
        } else {
            None
        };
        let mut record = LevelRecord {
            n,
            eps,
            delta: eval.delta,
            delta1,
            q,
            mu: q.map(|q| 1.0 - q),
            gamma: None,
            residual,
            bracket: b - a,
        };
        record.gamma = match self.gamma(&record) {
            Ok(g) => Some(g),
            Err(Error::StencilInfeasible { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(record)
    }

    /// `γ = dδ/dn = (dδ/dε) / (dΦ/dε - dδ/dε)`.
    pub fn gamma(&self, record: &LevelRecord) -> Result<f64> {
        if self.scheme.is_energy_independent() {
            return Ok(0.0);
        }
        let window = EnergyWindow::of(self.well);
        let cfg = self.cfg();
        let d_delta = d1_wrt_eps(|e| Ok(self.delta_at(e)?.delta), record.eps, &window, cfg)?;
        let d_phase = d1_wrt_eps(|e| self.phase(e), record.eps, &window, cfg)?;
        Ok(d_delta / (d_phase - d_delta))
    }

    pub fn spectrum(&self, n_max: usize) -> Result<SpectrumReport> {
        let mut levels: Vec<LevelRecord> = Vec::new();
        let mut termination = Termination::NMaxReached;
        for n in 0..=n_max {
            match self.solve_level(n) {
                Ok(level) => levels.push(level),
                Err(Error::LevelNotFound { .. }) => {
                    termination = Termination::NoRootBelowU;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        Ok(SpectrumReport {
            well: self.well.label().to_string(),
            params: self.well.params().to_vec(),
            scheme: self.scheme,
            beta: self.scale.beta(),
            levels,
            termination,
        })
    }
}

pub fn solve_level(
    well: &WellDescriptor,
    scheme: CorrectionScheme,
    n: usize,
    scale: PhysicalScale,
    opts: &SolverOptions,
) -> Result<LevelRecord> {
    LevelSolver::new(well, scheme, scale, *opts)?.solve_level(n)
}

pub fn spectrum(
    well: &WellDescriptor,
    scheme: CorrectionScheme,
    n_max: usize,
    scale: PhysicalScale,
    opts: &SolverOptions,
) -> Result<SpectrumReport> {
    LevelSolver::new(well, scheme, scale, *opts)?.spectrum(n_max)
}

pub fn gamma(
    well: &WellDescriptor,
    scheme: CorrectionScheme,
    record: &LevelRecord,
    scale: PhysicalScale,
    opts: &SolverOptions,
) -> Result<f64> {
    LevelSolver::new(well, scheme, scale, *opts)?.gamma(record)
}
