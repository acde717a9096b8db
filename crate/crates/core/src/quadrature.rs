//! Turning points, the phase integral, the endpoint-singular slope integral and
//! energy derivatives of converged integrals.
//!
//! Integrals between simple turning points use `x = x_m + x_h cos θ`. Writing
//! `ε - V = (x₊ - x)(x - x₋) r(x)` with `r > 0` shows that both `√(ε-V) dx` and
//! `dx/√(ε-V)` become smooth, even, `π`-periodic functions of `θ`, so the
//! midpoint rule in `θ` converges geometrically.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::potential::{DomainHint, PhysicalScale, WellDescriptor};

/// Relative change between successive node doublings that counts as converged.
pub const QUADRATURE_REL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Initial node count; doubled until converged.
    pub n_nodes: usize,
    /// `κ`: energy stencil step as a fraction of the distance to the nearest admissible edge.
    pub eps_stencil_factor: f64,
    /// Integrand truncation level (relative to its peak) for improper integrals.
    pub tail_tol: f64,
    /// Turning-point tolerance, scaled by `max(1, |ε|)`.
    pub root_tol: f64,
    /// Maximum number of node doublings.
    pub refine_limit: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n_nodes: 64,
            eps_stencil_factor: 1e-2,
            tail_tol: 1e-14,
            root_tol: 1e-12,
            refine_limit: 12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, value: f64, reason: &'static str| {
            Err(Error::InvalidParameter {
                name: name.to_string(),
                value,
                reason,
            })
        };
        if self.n_nodes < 32 {
            return bad("n_nodes", self.n_nodes as f64, "must be at least 32");
        }
        if !(self.eps_stencil_factor > 0.0 && self.eps_stencil_factor < 0.5) {
            return bad(
                "eps_stencil_factor",
                self.eps_stencil_factor,
                "must lie in (0, 0.5)",
            );
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return bad("tail_tol", self.tail_tol, "must lie in (0, 1)");
        }
        if !(self.root_tol > 0.0 && self.root_tol < 1.0) {
            return bad("root_tol", self.root_tol, "must lie in (0, 1)");
        }
        if self.refine_limit == 0 {
            return bad("refine_limit", 0.0, "must be positive");
        }
        Ok(())
    }

    fn root_tol_at(&self, eps: f64) -> f64 {
        self.root_tol * eps.abs().max(1.0)
    }
}

/// Classical turning points at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    pub x_minus: f64,
    pub x_plus: f64,
    pub at_infinity_minus: bool,
    pub at_infinity_plus: bool,
}

impl TurningPoints {
    pub fn is_finite(&self) -> bool {
        !(self.at_infinity_minus || self.at_infinity_plus)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.x_plus + self.x_minus)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.x_plus - self.x_minus)
    }
}

/// The open energy interval on which a well's integrals are defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWindow {
    pub lower: f64,
    pub upper: Option<f64>,
}

impl EnergyWindow {
    pub fn of(well: &WellDescriptor) -> Self {
        Self {
            lower: well.v_min(),
            upper: well.asymptote(),
        }
    }

    /// Distance from `eps` to the nearest edge (only the bottom for confining wells).
    pub fn distance(&self, eps: f64) -> f64 {
        let below = eps - self.lower;
        match self.upper {
            Some(u) => below.min(u - eps),
            None => below,
        }
    }

    pub fn contains(&self, eps: f64) -> bool {
        eps > self.lower && self.upper.is_none_or(|u| eps < u)
    }
}

/// `ε - V(x)`, routed through the well's cancellation-free gap near the asymptote.
fn excess(well: &WellDescriptor, eps: f64, x: f64) -> f64 {
    let v = well.value(x);
    if let Some(u) = well.asymptote() {
        if v > 0.5 * (u + well.v_min()) {
            if let Some(gap) = well.gap_to_asymptote(x) {
                return (eps - u) + gap;
            }
        }
    }
    eps - v
}

pub fn turning_points(
    well: &WellDescriptor,
    eps: f64,
    cfg: &QuadratureConfig,
) -> Result<TurningPoints> {
    let (x0, v_min) = well.minimum();
    if !(eps > v_min) {
        return Err(Error::NoClassicalRegion { eps, v_min });
    }
    let reach = match (well.asymptote(), well.domain_hint()) {
        (Some(u), hint) => {
            let tol = cfg.root_tol_at(eps);
            if eps > u + tol {
                return Err(Error::AboveAsymptote { eps, asymptote: u });
            }
            if (eps - u).abs() <= tol {
                return Ok(TurningPoints {
                    x_minus: f64::NEG_INFINITY,
                    x_plus: f64::INFINITY,
                    at_infinity_minus: true,
                    at_infinity_plus: true,
                });
            }
            match hint {
                DomainHint::Finite(x) => 4.0 * (x + x0.abs()) + 1.0,
                DomainHint::UnboundedGrowth => 1e6,
            }
        }
        (None, _) => 1e150,
    };

    let find = |dir: f64| -> Result<f64> {
        let mut inside = 0.0;
        let mut step = 1e-2 * x0.abs().max(1.0);
        while excess(well, eps, x0 + dir * step) > 0.0 {
            inside = step;
            step *= 2.0;
            if step > reach {
                return Err(Error::TurningPointNotFound { eps });
            }
        }
        let (mut lo, mut hi) = (inside, step);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(well, eps, x0 + dir * mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(x0 + dir * 0.5 * (lo + hi))
    };

    Ok(TurningPoints {
        x_minus: find(-1.0)?,
        x_plus: find(1.0)?,
        at_infinity_minus: false,
        at_infinity_plus: false,
    })
}

/// Midpoint rule for `∫₀^π f(θ) dθ` with `n` nodes.
pub(crate) fn theta_midpoint<F: Fn(f64) -> f64>(f: &F, n: usize) -> f64 {
    let h = PI / n as f64;
    (0..n).map(|k| f((k as f64 + 0.5) * h)).sum::<f64>() * h
}

fn converge<R: Fn(usize) -> f64>(
    rule: R,
    cfg: &QuadratureConfig,
    what: &'static str,
) -> Result<f64> {
    let mut n = cfg.n_nodes;
    let mut previous = rule(n);
    let mut last = previous;
    for _ in 0..cfg.refine_limit {
        n *= 2;
        last = rule(n);
        if (last - previous).abs() <= QUADRATURE_REL_TOL * last.abs() || last == previous {
            return Ok(last);
        }
        if !last.is_finite() {
            break;
        }
        previous = last;
    }
    Err(Error::NoConvergence {
        what,
        last,
        previous,
    })
}

/// `Φ(ε) = (1/πβ) ∫ √(ε - V) dx` between the turning points.
pub fn phase_integral(
    well: &WellDescriptor,
    eps: f64,
    scale: PhysicalScale,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if eps == well.v_min() {
        return Ok(0.0);
    }
    let tp = turning_points(well, eps, cfg)?;
    if !tp.is_finite() {
        return phase_at_asymptote(well, scale, cfg);
    }
    let (xm, xh) = (tp.midpoint(), tp.half_width());
    let integrand = |theta: f64| {
        let x = xm + xh * theta.cos();
        xh * theta.sin() * excess(well, eps, x).max(0.0).sqrt()
    };
    let action = converge(|n| theta_midpoint(&integrand, n), cfg, "phase integral")?;
    Ok(action / (PI * scale.beta()))
}

/// `Φ(U)`: the classical region is the whole line and the integrand is `√(U - V)`.
pub fn phase_at_asymptote(
    well: &WellDescriptor,
    scale: PhysicalScale,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let u = well.asymptote().ok_or(Error::InapplicableScheme {
        scheme: "asymptotic phase",
    })?;
    let (x0, v_min) = well.minimum();
    let peak = (u - v_min).sqrt();
    let g = |x: f64| well.gap_to_asymptote(x).unwrap_or(0.0).max(0.0).sqrt();
    let cut = cfg.tail_tol * peak;

    let mut reach = 1.0f64;
    while g(x0 + reach) >= cut || g(x0 - reach) >= cut {
        reach *= 2.0;
        if reach > 1e6 {
            return Err(Error::DivergentPhaseAtAsymptote);
        }
    }

    let trapezoid = |half: f64, n: usize| {
        let h = 2.0 * half / n as f64;
        let interior: f64 = (1..n).map(|k| g(x0 - half + k as f64 * h)).sum();
        (interior + 0.5 * (g(x0 - half) + g(x0 + half))) * h
    };
    let inner = converge(|n| trapezoid(reach, n), cfg, "asymptotic phase integral")?;
    let outer = converge(
        |n| trapezoid(2.0 * reach, 2 * n),
        cfg,
        "asymptotic phase integral",
    )?;
    if (outer - inner).abs() > 1e-9 * outer.abs() {
        return Err(Error::DivergentPhaseAtAsymptote);
    }
    Ok(outer / (PI * scale.beta()))
}

/// `I(ε) = ∫ (dV/dx)² / √(ε - V) dx` between the turning points.
///
/// In `θ` the integrand is `V'(x)² x_h sin θ / √(ε - V)`, whose limit at a simple
/// turning point is `|V'|^{3/2} √(2 x_h)`.
pub fn singular_integral(well: &WellDescriptor, eps: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if eps == well.v_min() {
        return Ok(0.0);
    }
    let tp = turning_points(well, eps, cfg)?;
    if !tp.is_finite() {
        return Err(Error::UnboundedRegion { eps });
    }
    let (xm, xh) = (tp.midpoint(), tp.half_width());
    let slope_plus = well.derivative(tp.x_plus);
    let slope_minus = well.derivative(tp.x_minus);
    let floor = 1e-10 * (eps - well.v_min());
    for (x, slope, sign) in [
        (tp.x_plus, slope_plus, 1.0),
        (tp.x_minus, slope_minus, -1.0),
    ] {
        if !(sign * slope * xh > floor) {
            return Err(Error::DegenerateTurningPoint { x, slope });
        }
    }
    let limit_plus = slope_plus.abs().powf(1.5) * (2.0 * xh).sqrt();
    let limit_minus = slope_minus.abs().powf(1.5) * (2.0 * xh).sqrt();

    let integrand = |theta: f64| {
        let c = theta.cos();
        let x = xm + xh * c;
        let ex = excess(well, eps, x);
        if ex > 0.0 {
            let d = well.derivative(x);
            d * d * xh * theta.sin() / ex.sqrt()
        } else if c > 0.0 {
            limit_plus
        } else {
            limit_minus
        }
    };
    converge(|n| theta_midpoint(&integrand, n), cfg, "singular integral")
}

/// Second energy derivative with its two raw estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondDerivative {
    /// Richardson-extrapolated value.
    pub value: f64,
    /// Five-point estimate with step `h`.
    pub coarse: f64,
    /// Five-point estimate with step `h/2`.
    pub fine: f64,
    pub step: f64,
}

fn stencil_step(eps: f64, window: &EnergyWindow, cfg: &QuadratureConfig) -> Result<f64> {
    let dist = window.distance(eps);
    let step = cfg.eps_stencil_factor * dist;
    let fits = dist > 0.0
        && step > 0.0
        && eps - 2.0 * step > window.lower
        && window.upper.is_none_or(|u| eps + 2.0 * step < u);
    if !fits {
        return Err(Error::StencilInfeasible { eps, step });
    }
    Ok(step)
}

/// Below this ratio of near-edge to far-edge distance the second derivative
/// switches to a one-sided stencil pointing away from the near edge.
const ONE_SIDED_RATIO: f64 = 1e-2;

/// `d²f/dε²` at steps `h` and `h/2`, followed by one Richardson step.
///
/// Normally the five-point central difference with `h = κ · distance to the
/// nearest window edge`. When `ε` hugs one edge the central step would be too
/// small for the difference to survive rounding, so the five-point one-sided
/// formula is used instead, with `h` set by the distance to the far edge.
pub fn d2_wrt_eps<F>(
    mut f: F,
    eps: f64,
    window: &EnergyWindow,
    cfg: &QuadratureConfig,
) -> Result<SecondDerivative>
where
    F: FnMut(f64) -> Result<f64>,
{
    let below = eps - window.lower;
    let above = window.upper.map_or(f64::INFINITY, |u| u - eps);
    let one_sided = below > 0.0
        && above > 0.0
        && above.is_finite()
        && below.min(above) < ONE_SIDED_RATIO * below.max(above);
    if !one_sided {
        let h = stencil_step(eps, window, cfg)?;
        let centre = f(eps)?;
        let mut five_point = |step: f64| -> Result<f64> {
            let (p1, m1) = (f(eps + step)?, f(eps - step)?);
            let (p2, m2) = (f(eps + 2.0 * step)?, f(eps - 2.0 * step)?);
            Ok((-p2 + 16.0 * p1 - 30.0 * centre + 16.0 * m1 - m2) / (12.0 * step * step))
        };
        let coarse = five_point(h)?;
        let fine = five_point(0.5 * h)?;
        return Ok(SecondDerivative {
            value: fine + (fine - coarse) / 15.0,
            coarse,
            fine,
            step: h,
        });
    }

    // Signed step pointing into the wide side; the formula is third order.
    let h = if below > above {
        -cfg.eps_stencil_factor * below
    } else {
        cfg.eps_stencil_factor * above
    };
    let centre = f(eps)?;
    let mut one_side = |step: f64| -> Result<f64> {
        let mut v = [centre, 0.0, 0.0, 0.0, 0.0];
        for (k, slot) in v.iter_mut().enumerate().skip(1) {
            *slot = f(eps + k as f64 * step)?;
        }
        Ok(
            (35.0 * v[0] - 104.0 * v[1] + 114.0 * v[2] - 56.0 * v[3] + 11.0 * v[4])
                / (12.0 * step * step),
        )
    };
    let coarse = one_side(h)?;
    let fine = one_side(0.5 * h)?;
    Ok(SecondDerivative {
        value: fine + (fine - coarse) / 7.0,
        coarse,
        fine,
        step: h.abs(),
    })
}

/// `df/dε` by the fourth-order central difference with the same step rule as [`d2_wrt_eps`].
pub fn d1_wrt_eps<F>(
    mut f: F,
    eps: f64,
    window: &EnergyWindow,
    cfg: &QuadratureConfig,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let h = stencil_step(eps, window, cfg)?;
    let (p1, m1) = (f(eps + h)?, f(eps - h)?);
    let (p2, m2) = (f(eps + 2.0 * h)?, f(eps - 2.0 * h)?);
    Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::make_builtin;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn b1() -> PhysicalScale {
        PhysicalScale::default()
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        let bad = QuadratureConfig {
            n_nodes: 16,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig {
            eps_stencil_factor: 0.6,
            ..cfg()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn harmonic_turning_points() {
        let w = make_builtin("harmonic", &[]).unwrap();
        let tp = turning_points(&w, 4.0, &cfg()).unwrap();
        assert!((tp.x_plus - 2.0).abs() < 1e-14);
        assert!((tp.x_minus + 2.0).abs() < 1e-14);
        assert!(tp.is_finite());
    }

    #[test]
    fn tanh2_turning_points() {
        let w = make_builtin("tanh2", &[("U", 12.0)]).unwrap();
        let tp = turning_points(&w, 3.0, &cfg()).unwrap();
        let exact = 0.5f64.atanh();
        assert!((exact - 0.5493061).abs() < 1e-7);
        assert!((tp.x_plus - exact).abs() < 1e-14);
        assert!((tp.x_minus + exact).abs() < 1e-14);
        for k in 1..50 {
            let x = tp.x_minus + (tp.x_plus - tp.x_minus) * k as f64 / 50.0;
            assert!(w.value(x) < 3.0);
        }
        let top = turning_points(&w, 12.0, &cfg()).unwrap();
        assert!(top.at_infinity_minus && top.at_infinity_plus);
    }

    #[test]
    fn turning_point_errors() {
        let w = make_builtin("tanh2", &[("U", 12.0)]).unwrap();
        assert!(matches!(
            turning_points(&w, 0.0, &cfg()),
            Err(Error::NoClassicalRegion { .. })
        ));
        assert!(matches!(
            turning_points(&w, 12.5, &cfg()),
            Err(Error::AboveAsymptote { .. })
        ));
    }

    #[test]
    fn harmonic_phase_is_half_energy() {
        let w = make_builtin("harmonic", &[]).unwrap();
        for eps in [0.1, 1.0, 3.0, 17.0] {
            let phi = phase_integral(&w, eps, b1(), &cfg()).unwrap();
            assert!(
                (phi - eps / 2.0).abs() < 1e-13 * eps.max(1.0),
                "{eps}: {phi}"
            );
        }
        let beta = PhysicalScale::new(0.5).unwrap();
        assert!((phase_integral(&w, 3.0, beta, &cfg()).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(phase_integral(&w, 0.0, b1(), &cfg()).unwrap(), 0.0);
    }

    #[test]
    fn tanh2_phase_matches_closed_form() {
        // ∫ √(ε - U tanh²x) dx = π(√U - √(U - ε))
        let w = make_builtin("tanh2", &[("U", 12.0)]).unwrap();
        for eps in [0.5, 3.0, 8.0, 11.0, 11.99] {
            let phi = phase_integral(&w, eps, b1(), &cfg()).unwrap();
            let exact = 12f64.sqrt() - (12.0 - eps).sqrt();
            assert!((phi - exact).abs() < 1e-11, "{eps}: {phi} vs {exact}");
        }
        let at_u = phase_integral(&w, 12.0, b1(), &cfg()).unwrap();
        assert!((at_u - 12f64.sqrt()).abs() < 1e-10, "{at_u}");
        assert!((at_u - 3.4641016).abs() < 1e-7);
    }

    #[test]
    fn gauss_phase_at_asymptote() {
        // ∫ √U exp(-x²/2w²) dx = √U w √(2π)
        let w = make_builtin("gauss", &[("U", 1.0), ("w", 1.5)]).unwrap();
        let phi = phase_at_asymptote(&w, b1(), &cfg()).unwrap();
        let exact = 1.5 * (2.0 * PI).sqrt() / PI;
        assert!((phi - exact).abs() < 1e-12);
        let confining = make_builtin("quartic", &[]).unwrap();
        assert!(phase_at_asymptote(&confining, b1(), &cfg()).is_err());
    }

    #[test]
    fn phase_is_monotone_and_vanishes_at_bottom() {
        let wells = [
            (make_builtin("harmonic", &[]).unwrap(), 20.0),
            (make_builtin("quartic", &[]).unwrap(), 20.0),
            (make_builtin("tanh2", &[("U", 12.0)]).unwrap(), 12.0),
            (
                make_builtin("gauss", &[("U", 1.0), ("w", 1.0)]).unwrap(),
                1.0,
            ),
        ];
        for (w, top) in &wells {
            let mut last = 0.0;
            for k in 1..=20 {
                let eps = top * k as f64 / 20.0 * (1.0 - 1e-9);
                let phi = phase_integral(w, eps, b1(), &cfg()).unwrap();
                assert!(phi > last, "{} not increasing at {eps}", w.label());
                last = phi;
            }
            // Φ ~ ε^{3/4} for the quartic, ~ε for the rest
            let near = phase_integral(w, 1e-8 * top, b1(), &cfg()).unwrap();
            let nearer = phase_integral(w, 1e-12 * top, b1(), &cfg()).unwrap();
            assert!(near > 0.0 && near < 1e-4, "{}: {near}", w.label());
            assert!(nearer < near / 50.0, "{}: {nearer} vs {near}", w.label());
        }
    }

    #[test]
    fn node_doubling_converges_geometrically() {
        let w = make_builtin("gauss", &[("U", 1.0), ("w", 1.0)]).unwrap();
        let tp = turning_points(&w, 0.5, &cfg()).unwrap();
        let (xm, xh) = (tp.midpoint(), tp.half_width());
        let f = |t: f64| xh * t.sin() * (0.5 - w.value(xm + xh * t.cos())).max(0.0).sqrt();
        let est: Vec<f64> = [4, 8, 16, 32]
            .iter()
            .map(|&n| theta_midpoint(&f, n))
            .collect();
        let d1 = (est[1] - est[0]).abs();
        let d2 = (est[2] - est[1]).abs();
        let d3 = (est[3] - est[2]).abs();
        assert!(d1 >= 4.0 * d2 && d2 >= 4.0 * d3, "{d1:e} {d2:e} {d3:e}");
    }

    #[test]
    fn harmonic_singular_integral() {
        let w = make_builtin("harmonic", &[]).unwrap();
        let i = singular_integral(&w, 1.0, &cfg()).unwrap();
        assert!((i - 2.0 * PI).abs() < 1e-12, "{i}");
        let tiny = singular_integral(&w, 1e-10, &cfg()).unwrap();
        assert!(tiny.abs() < 1e-8);
    }

    #[test]
    fn tanh2_singular_integral_closed_form() {
        // I(ε) = 2π√U ε - (3π/2) ε²/√U for V = U tanh²x
        let w = make_builtin("tanh2", &[("U", 12.0)]).unwrap();
        let su = 12f64.sqrt();
        for eps in [1.0, 3.0, 9.0] {
            let i = singular_integral(&w, eps, &cfg()).unwrap();
            let exact = 2.0 * PI * su * eps - 1.5 * PI * eps * eps / su;
            assert!((i - exact).abs() < 1e-11 * exact, "{eps}: {i} vs {exact}");
        }
    }

    #[test]
    fn singular_integral_rejects_degenerate_and_unbounded() {
        let w = make_builtin("tanh2", &[("U", 12.0)]).unwrap();
        assert!(matches!(
            singular_integral(&w, 12.0, &cfg()),
            Err(Error::UnboundedRegion { .. })
        ));
    }

    #[test]
    fn second_derivative_of_polynomials() {
        let window = EnergyWindow {
            lower: 0.0,
            upper: None,
        };
        let sq = d2_wrt_eps(|e| Ok(e * e), 1.3, &window, &cfg()).unwrap();
        assert!((sq.value - 2.0).abs() < 1e-9);
        let cube = d2_wrt_eps(|e| Ok(e * e * e), 1.0, &window, &cfg()).unwrap();
        assert!((cube.value - 6.0).abs() < 1e-8);
        assert!((cube.coarse - 6.0).abs() < 1e-8 && (cube.fine - 6.0).abs() < 1e-8);
        let d = d1_wrt_eps(|e| Ok(e * e * e), 2.0, &window, &cfg()).unwrap();
        assert!((d - 12.0).abs() < 1e-9);
    }

    #[test]
    fn one_sided_stencil_near_an_edge() {
        let window = EnergyWindow {
            lower: 0.0,
            upper: Some(1.0),
        };
        let f = |e: f64| Ok((2.0 * e).sin());
        for eps in [1.0 - 1e-9, 1e-9, 0.995, 0.004] {
            let d = d2_wrt_eps(f, eps, &window, &cfg()).unwrap();
            let exact = -4.0 * (2.0 * eps).sin();
            assert!(
                (d.value - exact).abs() < 1e-7,
                "{eps}: {} vs {exact}",
                d.value
            );
            assert!(d.step > 1e-3);
        }
        let centred = d2_wrt_eps(f, 0.5, &window, &cfg()).unwrap();
        assert!((centred.step - 5e-3).abs() < 1e-15);
    }

    #[test]
    fn second_derivative_stencil_errors() {
        let window = EnergyWindow {
            lower: 0.0,
            upper: Some(1.0),
        };
        assert!(matches!(
            d2_wrt_eps(Ok, 1.0, &window, &cfg()),
            Err(Error::StencilInfeasible { .. })
        ));
        assert!(matches!(
            d2_wrt_eps(Ok, -0.5, &window, &cfg()),
            Err(Error::StencilInfeasible { .. })
        ));
    }
}
