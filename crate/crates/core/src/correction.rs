//! Level shifts `δ` added to `n + ½` in the quantization condition.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PhysicalScale, WellDescriptor};
use crate::quadrature::{d2_wrt_eps, singular_integral, EnergyWindow, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionScheme {
    /// `δ = 0`
    Plain,
    /// `δ = δ₁`
    FirstOrder,
    /// `δ = 2δ₁ / (1 + √(1 + 16δ₁²))`
    Pade,
    /// `δ = 2δ₁ / (q + √((2 - q)² + 16δ₁²))`, `q = -8δ₁Φ(U)`
    Improved,
    /// The improved form with `q = 1` and `δ₁` replaced by `-1/(8Φ(U))`.
    ImprovedSimplified,
}

impl CorrectionScheme {
    pub const ALL: [CorrectionScheme; 5] = [
        CorrectionScheme::Plain,
        CorrectionScheme::FirstOrder,
        CorrectionScheme::Pade,
        CorrectionScheme::Improved,
        CorrectionScheme::ImprovedSimplified,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CorrectionScheme::Plain => "plain",
            CorrectionScheme::FirstOrder => "first-order",
            CorrectionScheme::Pade => "pade",
            CorrectionScheme::Improved => "improved",
            CorrectionScheme::ImprovedSimplified => "improved-simplified",
        }
    }

    /// Schemes built on the asymptote `U` (they need `Φ(U)`).
    pub fn needs_asymptote(&self) -> bool {
        matches!(
            self,
            CorrectionScheme::Improved | CorrectionScheme::ImprovedSimplified
        )
    }

    /// Schemes whose `δ` does not depend on the energy.
    pub fn is_energy_independent(&self) -> bool {
        matches!(
            self,
            CorrectionScheme::Plain | CorrectionScheme::ImprovedSimplified
        )
    }
}

impl fmt::Display for CorrectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorrectionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        CorrectionScheme::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .or(match key.as_str() {
                "simplified" => Some(CorrectionScheme::ImprovedSimplified),
                "first" | "firstorder" => Some(CorrectionScheme::FirstOrder),
                _ => None,
            })
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

/// How `q` is formed from `δ₁` and `Φ(U)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QForm {
    /// `q = -8 δ₁ Φ(U)`; gives `q = 1` on the solvable class.
    #[default]
    Product,
    /// `q = -8 Φ(U) / δ₁`, kept to expose the alternative reading.
    Quotient,
}

impl FromStr for QForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "product" => Ok(QForm::Product),
            "quotient" => Ok(QForm::Quotient),
            other => Err(Error::Config(format!(
                "unknown q form `{other}` (expected product or quotient)"
            ))),
        }
    }
}

/// Inputs to a scheme's `δ` at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DeltaInputs {
    pub delta1: f64,
    pub phi_at_u: Option<f64>,
    pub q: Option<f64>,
}

/// `δ₁` with the two raw stencil estimates it was extrapolated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delta1Estimate {
    pub value: f64,
    pub coarse: f64,
    pub fine: f64,
}

/// `δ₁ = (β/24π) d²I/dε²`, differentiating the converged `I(ε)` values.
pub fn delta1_estimate(
    well: &WellDescriptor,
    eps: f64,
    scale: PhysicalScale,
    cfg: &QuadratureConfig,
) -> Result<Delta1Estimate> {
    let window = EnergyWindow::of(well);
    let d2 = d2_wrt_eps(|e| singular_integral(well, e, cfg), eps, &window, cfg)?;
    let factor = scale.beta() / (24.0 * PI);
    Ok(Delta1Estimate {
        value: factor * d2.value,
        coarse: factor * d2.coarse,
        fine: factor * d2.fine,
    })
}

pub fn delta1_numeric(
    well: &WellDescriptor,
    eps: f64,
    scale: PhysicalScale,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    Ok(delta1_estimate(well, eps, scale, cfg)?.value)
}

/// `2δ₁ / (1 + √(1 + 16δ₁²))`. The denominator is at least 2, so `|δ| < ½`.
pub fn pade_delta(delta1: f64) -> f64 {
    2.0 * delta1 / (1.0 + (1.0 + 16.0 * delta1 * delta1).sqrt())
}

/// `q = -8 δ₁ Φ(U)`.
pub fn compute_q(delta1: f64, phi_at_u: f64) -> f64 {
    -8.0 * delta1 * phi_at_u
}

pub fn compute_q_with(form: QForm, delta1: f64, phi_at_u: f64) -> Result<f64> {
    match form {
        QForm::Product => Ok(compute_q(delta1, phi_at_u)),
        QForm::Quotient => {
            if delta1 == 0.0 {
                return Err(Error::ZeroDenominator {
                    delta1,
                    q: f64::NAN,
                });
            }
            Ok(-8.0 * phi_at_u / delta1)
        }
    }
}

/// `2δ₁ / (q + √((2 - q)² + 16δ₁²))`.
///
/// For finite real inputs the denominator is at least 2; the error path only
/// catches non-finite input.
pub fn improved_delta(delta1: f64, q: f64) -> Result<f64> {
    let denom = q + ((2.0 - q).powi(2) + 16.0 * delta1 * delta1).sqrt();
    if !(denom.is_finite() && denom > 0.0) {
        return Err(Error::ZeroDenominator { delta1, q });
    }
    Ok(2.0 * delta1 / denom)
}

/// The `δ₁` surrogate obtained by setting `q = 1` in the product form: `-1/(8Φ(U))`.
pub fn simplified_delta1(phi_at_u: f64) -> Result<f64> {
    simplified_delta1_with(QForm::Product, phi_at_u)
}

pub fn simplified_delta1_with(form: QForm, phi_at_u: f64) -> Result<f64> {
    if phi_at_u == 0.0 || !phi_at_u.is_finite() {
        return Err(Error::ZeroPhaseAtAsymptote);
    }
    Ok(match form {
        QForm::Product => -1.0 / (8.0 * phi_at_u),
        QForm::Quotient => -8.0 * phi_at_u,
    })
}

/// The shift applied by `scheme`. The improved scheme uses `inputs.q` when
/// present and otherwise forms the product `q` from `δ₁` and `Φ(U)`.
pub fn delta(scheme: CorrectionScheme, inputs: &DeltaInputs) -> Result<f64> {
    let phi = || -> Result<f64> {
        match inputs.phi_at_u {
            Some(p) if p.is_finite() => Ok(p),
            _ => Err(Error::InapplicableScheme {
                scheme: scheme.name(),
            }),
        }
    };
    match scheme {
        CorrectionScheme::Plain => Ok(0.0),
        CorrectionScheme::FirstOrder => Ok(inputs.delta1),
        CorrectionScheme::Pade => Ok(pade_delta(inputs.delta1)),
        CorrectionScheme::Improved => {
            let q = match inputs.q {
                Some(q) => q,
                None => compute_q(inputs.delta1, phi()?),
            };
            improved_delta(inputs.delta1, q)
        }
        CorrectionScheme::ImprovedSimplified => improved_delta(simplified_delta1(phi()?)?, 1.0),
    }
}
