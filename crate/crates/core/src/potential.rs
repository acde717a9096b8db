//! Potential wells: the built-in catalog and wells generated from an
//! auxiliary function `s(x)` with `V = A²s² + Bs + C` and `ds/dx = a₂s² + a₁s + a₀`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A real function of one real variable, shareable across threads.
pub type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative distance to the asymptote that defines the truncation edge of an asymptotic well.
pub const TAIL_REL_TOL: f64 = 1e-12;

/// The quantum scale `β` with `β² = ħ²/2m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalScale {
    beta: f64,
}

impl PhysicalScale {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beta".into(),
                value: beta,
                reason: "must be positive and finite",
            });
        }
        Ok(Self { beta })
    }

    pub fn from_hbar_and_mass(hbar: f64, mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mass".into(),
                value: mass,
                reason: "must be positive and finite",
            });
        }
        Self::new((hbar * hbar / (2.0 * mass)).sqrt())
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }
}

impl Default for PhysicalScale {
    fn default() -> Self {
        Self { beta: 1.0 }
    }
}

/// Where a well's interesting region ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainHint {
    /// Outside `[-X, X]` (relative to the origin) the well is within tail tolerance of its asymptote.
    Finite(f64),
    /// Confining well; brackets grow on demand.
    UnboundedGrowth,
}

/// Catalog entries with closed-form potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinWell {
    /// `V = x²`
    Harmonic,
    /// `V = U tanh²x`
    Tanh2 { depth: f64 },
    /// `V = U (1 - exp(-x²/w²))`
    Gauss { depth: f64, width: f64 },
    /// `V = x⁴`
    Quartic,
}

impl BuiltinWell {
    pub const NAMES: [&'static str; 4] = ["harmonic", "tanh2", "gauss", "quartic"];

    /// Parses a catalog id and its named parameters (`U`, `w`).
    pub fn from_name(name: &str, params: &[(&str, f64)]) -> Result<Self> {
        let allowed: &[&str] = match name {
            "harmonic" | "quartic" => &[],
            "tanh2" => &["U"],
            "gauss" => &["U", "w"],
            other => return Err(Error::UnknownWell(other.to_string())),
        };
        for (key, _) in params {
            if !allowed.contains(key) {
                return Err(Error::Config(format!(
                    "well `{name}` has no parameter `{key}`"
                )));
            }
        }
        let lookup = |key: &str| -> Result<f64> {
            let value = params
                .iter()
                .rev()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| {
                    Error::Config(format!("well `{name}` requires parameter `{key}`"))
                })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name: key.to_string(),
                    value,
                    reason: "must be positive and finite",
                });
            }
            Ok(value)
        };
        Ok(match name {
            "harmonic" => BuiltinWell::Harmonic,
            "quartic" => BuiltinWell::Quartic,
            "tanh2" => BuiltinWell::Tanh2 {
                depth: lookup("U")?,
            },
            _ => BuiltinWell::Gauss {
                depth: lookup("U")?,
                width: lookup("w")?,
            },
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinWell::Harmonic => "harmonic",
            BuiltinWell::Tanh2 { .. } => "tanh2",
            BuiltinWell::Gauss { .. } => "gauss",
            BuiltinWell::Quartic => "quartic",
        }
    }

    pub fn params(&self) -> Vec<(String, f64)> {
        match *self {
            BuiltinWell::Harmonic | BuiltinWell::Quartic => Vec::new(),
            BuiltinWell::Tanh2 { depth } => vec![("U".into(), depth)],
            BuiltinWell::Gauss { depth, width } => vec![("U".into(), depth), ("w".into(), width)],
        }
    }

    pub fn well(&self) -> WellDescriptor {
        let (value, derivative, gap, asymptote): (RealMap, RealMap, Option<RealMap>, Option<f64>) =
            match *self {
                BuiltinWell::Harmonic => (Arc::new(|x| x * x), Arc::new(|x| 2.0 * x), None, None),
                BuiltinWell::Quartic => (
                    Arc::new(|x| x * x * x * x),
                    Arc::new(|x| 4.0 * x * x * x),
                    None,
                    None,
                ),
                BuiltinWell::Tanh2 { depth } => (
                    Arc::new(move |x: f64| depth * x.tanh().powi(2)),
                    Arc::new(move |x: f64| {
                        let sech = 1.0 / x.cosh();
                        2.0 * depth * x.tanh() * sech * sech
                    }),
                    Some(Arc::new(move |x: f64| depth / x.cosh().powi(2))),
                    Some(depth),
                ),
                BuiltinWell::Gauss { depth, width } => {
                    let w2 = width * width;
                    (
                        Arc::new(move |x: f64| -depth * (-x * x / w2).exp_m1()),
                        Arc::new(move |x: f64| 2.0 * depth * x / w2 * (-x * x / w2).exp()),
                        Some(Arc::new(move |x: f64| depth * (-x * x / w2).exp())),
                        Some(depth),
                    )
                }
            };
        let mut well = WellDescriptor {
            label: self.name().to_string(),
            params: self.params(),
            value,
            derivative,
            gap,
            x_min: 0.0,
            v_min: 0.0,
            asymptote,
            domain_hint: DomainHint::UnboundedGrowth,
            builtin: Some(*self),
        };
        if let Some(u) = asymptote {
            well.domain_hint = DomainHint::Finite(tail_edge(&well, u, 1e6));
        }
        well
    }
}

/// Builds a catalog well by name.
pub fn make_builtin(name: &str, params: &[(&str, f64)]) -> Result<WellDescriptor> {
    Ok(BuiltinWell::from_name(name, params)?.well())
}

/// An evaluatable one-dimensional potential well.
#[derive(Clone)]
pub struct WellDescriptor {
    label: String,
    params: Vec<(String, f64)>,
    value: RealMap,
    derivative: RealMap,
    gap: Option<RealMap>,
    x_min: f64,
    v_min: f64,
    asymptote: Option<f64>,
    domain_hint: DomainHint,
    builtin: Option<BuiltinWell>,
}

impl fmt::Debug for WellDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WellDescriptor")
            .field("label", &self.label)
            .field("params", &self.params)
            .field("minimum", &(self.x_min, self.v_min))
            .field("asymptote", &self.asymptote)
            .field("domain_hint", &self.domain_hint)
            .finish()
    }
}

impl WellDescriptor {
    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    /// `U - V(x)`, evaluated without cancellation when the well supplies a closed form.
    /// Falls back to `-V(x)` relative to zero for confining wells.
    pub fn gap_to_asymptote(&self, x: f64) -> Option<f64> {
        let u = self.asymptote?;
        Some(match &self.gap {
            Some(g) => g(x),
            None => u - self.value(x),
        })
    }

    /// `(x_min, V_min)`.
    pub fn minimum(&self) -> (f64, f64) {
        (self.x_min, self.v_min)
    }

    pub fn v_min(&self) -> f64 {
        self.v_min
    }

    pub fn asymptote(&self) -> Option<f64> {
        self.asymptote
    }

    pub fn domain_hint(&self) -> DomainHint {
        self.domain_hint
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn builtin(&self) -> Option<BuiltinWell> {
        self.builtin
    }
}

/// Smallest `X` such that `U - V(±X) < TAIL_REL_TOL · U`, assuming monotone tails.
fn tail_edge(well: &WellDescriptor, u: f64, cap: f64) -> f64 {
    let tol = TAIL_REL_TOL * u.abs().max(f64::MIN_POSITIVE);
    let outside = |x: f64| {
        let g = well.gap_to_asymptote(x).unwrap_or(0.0);
        let h = well.gap_to_asymptote(-x).unwrap_or(0.0);
        g.max(h) < tol
    };
    let mut hi = 1.0;
    while !outside(hi) {
        hi *= 2.0;
        if hi >= cap {
            return cap;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if outside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Coefficients of a well in the exactly solvable class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeClassSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    /// `s(0)`.
    pub s0: f64,
}

impl ShapeClassSpec {
    /// `ds/dx` as a function of `s`.
    #[inline]
    pub fn sigma(&self, s: f64) -> f64 {
        (self.a2 * s + self.a1) * s + self.a0
    }

    #[inline]
    pub fn potential_of(&self, s: f64) -> f64 {
        (self.a * self.a * s + self.b) * s + self.c
    }

    /// `dV/dx = (2A²s + B)·σ(s)`.
    #[inline]
    pub fn slope_of(&self, s: f64) -> f64 {
        (2.0 * self.a * self.a * s + self.b) * self.sigma(s)
    }

    /// Real roots of `σ(s)`, ascending.
    pub fn sigma_roots(&self) -> Vec<f64> {
        let (a, b, c) = (self.a2, self.a1, self.a0);
        if a == 0.0 {
            if b == 0.0 {
                return Vec::new();
            }
            return vec![-c / b];
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let sq = disc.sqrt();
        let q = -0.5 * (b + b.signum() * sq);
        let mut roots = if q == 0.0 {
            vec![0.0]
        } else {
            vec![q / a, c / q]
        };
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        roots
    }
}

fn rk4_step(spec: &ShapeClassSpec, s: f64, h: f64) -> f64 {
    let k1 = spec.sigma(s);
    let k2 = spec.sigma(s + 0.5 * h * k1);
    let k3 = spec.sigma(s + 0.5 * h * k2);
    let k4 = spec.sigma(s + h * k3);
    s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

const BLOW_UP: f64 = 1e12;

/// Tabulated `s(x)` on a uniform grid `[-R, R]`, with cubic Hermite interpolation between nodes.
#[derive(Debug)]
struct AuxTable {
    spec: ShapeClassSpec,
    half_width: f64,
    step: f64,
    /// Nodes at `x_j = -R + j·step`.
    s: Vec<f64>,
}

impl AuxTable {
    fn integrate(spec: ShapeClassSpec, half_width: f64, steps_per_side: usize) -> Result<Self> {
        let step = half_width / steps_per_side as f64;
        let mut s = vec![0.0; 2 * steps_per_side + 1];
        s[steps_per_side] = spec.s0;
        for dir in [1.0, -1.0] {
            let mut cur = spec.s0;
            for k in 1..=steps_per_side {
                cur = rk4_step(&spec, cur, dir * step);
                if !cur.is_finite() || cur.abs() > BLOW_UP {
                    return Err(Error::AuxiliaryBlowUp {
                        x: dir * k as f64 * step,
                    });
                }
                let idx = if dir > 0.0 {
                    steps_per_side + k
                } else {
                    steps_per_side - k
                };
                s[idx] = cur;
            }
        }
        Ok(Self {
            spec,
            half_width,
            step,
            s,
        })
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.s.len() - 1;
        let r = self.half_width;
        if x > r || x < -r {
            // Continue from the nearest edge with the table step.
            let (mut cur, edge) = if x > r {
                (self.s[n], r)
            } else {
                (self.s[0], -r)
            };
            let dir = if x > r { 1.0 } else { -1.0 };
            let mut remaining = (x - edge).abs();
            while remaining > 0.0 {
                let h = remaining.min(self.step);
                cur = rk4_step(&self.spec, cur, dir * h);
                remaining -= h;
                if !cur.is_finite() {
                    break;
                }
            }
            return cur;
        }
        let t = (x + r) / self.step;
        let j = (t.floor() as usize).min(n - 1);
        let u = t - j as f64;
        let (s0, s1) = (self.s[j], self.s[j + 1]);
        let (d0, d1) = (
            self.step * self.spec.sigma(s0),
            self.step * self.spec.sigma(s1),
        );
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * s0
            + (u3 - 2.0 * u2 + u) * d0
            + (-2.0 * u3 + 3.0 * u2) * s1
            + (u3 - u2) * d1
    }
}

/// `d = r - s(x)` on one side of the origin, where `s → r` at that end.
///
/// Since `σ` is quadratic, `d' = σ'(r)·d - a₂·d²` exactly; integrating `d`
/// itself keeps full relative precision once `s` has rounded onto `r`.
#[derive(Debug)]
struct TailTable {
    root: f64,
    slope: f64,
    a2: f64,
    /// Signed step; nodes at `x_j = j·step`.
    step: f64,
    d: Vec<f64>,
}

impl TailTable {
    fn rate(&self, d: f64) -> f64 {
        self.slope * d - self.a2 * d * d
    }

    fn rk4(&self, d: f64, h: f64) -> f64 {
        let k1 = self.rate(d);
        let k2 = self.rate(d + 0.5 * h * k1);
        let k3 = self.rate(d + 0.5 * h * k2);
        let k4 = self.rate(d + h * k3);
        d + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }

    fn integrate(spec: &ShapeClassSpec, root: f64, step: f64, nodes: usize) -> Self {
        let mut table = Self {
            root,
            slope: spec.a1 + 2.0 * spec.a2 * root,
            a2: spec.a2,
            step,
            d: Vec::with_capacity(nodes + 1),
        };
        let mut cur = root - spec.s0;
        table.d.push(cur);
        for _ in 0..nodes {
            cur = table.rk4(cur, step);
            table.d.push(cur);
        }
        table
    }

    /// `d` at `x`, which must lie on this table's side of the origin.
    fn eval(&self, x: f64) -> f64 {
        let n = self.d.len() - 1;
        let t = x / self.step;
        if t >= n as f64 {
            // Past the table the quadratic term is negligible and the decay is exponential.
            let mut cur = self.d[n];
            let mut remaining = x - n as f64 * self.step;
            while remaining.abs() > 0.0 {
                if (self.a2 * cur).abs() <= 1e-13 * self.slope.abs() {
                    return cur * (self.slope * remaining).exp();
                }
                let h = if remaining.abs() < self.step.abs() {
                    remaining
                } else {
                    self.step
                };
                cur = self.rk4(cur, h);
                remaining -= h;
            }
            return cur;
        }
        let j = (t.max(0.0).floor() as usize).min(n - 1);
        let u = t - j as f64;
        let (d0, d1) = (self.d[j], self.d[j + 1]);
        let (m0, m1) = (self.step * self.rate(d0), self.step * self.rate(d1));
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * d0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * d1
            + (u3 - u2) * m1
    }
}

/// Builds a well from shape-class coefficients by integrating the auxiliary
/// function over `[-half_width, half_width]`.
///
/// The integration step is halved until halving changes `V` at shared nodes by
/// less than `1e-13` relative to `max|V|`, or until it stops helping once
/// below `1e-9`. An asymptote is declared when
/// `V(±R/2)` agree and `V(R)` agrees with `V(R/2)` to `1e-9` relative.
pub fn from_shape_class(spec: ShapeClassSpec, half_width: f64) -> Result<WellDescriptor> {
    if spec.a == 0.0 || !spec.a.is_finite() {
        return Err(Error::ZeroShapeAmplitude);
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidParameter {
            name: "half_width".into(),
            value: half_width,
            reason: "must be positive and finite",
        });
    }

    let mut steps = ((half_width / 0.02).ceil() as usize).max(16);
    let mut table = AuxTable::integrate(spec, half_width, steps)?;
    let mut last_diff = f64::INFINITY;
    loop {
        let finer = AuxTable::integrate(spec, half_width, 2 * steps)?;
        let mut max_v = 0.0f64;
        let mut max_diff = 0.0f64;
        for (j, &s) in table.s.iter().enumerate() {
            let v = spec.potential_of(s);
            max_v = max_v.max(v.abs());
            max_diff = max_diff.max((v - spec.potential_of(finer.s[2 * j])).abs());
        }
        table = finer;
        steps *= 2;
        let scale = max_v.max(f64::MIN_POSITIVE);
        // Past the rounding floor halving stops paying; accept a flat plateau.
        let plateau = max_diff > 0.5 * last_diff && max_diff <= 1e-9 * scale;
        if max_diff <= 1e-13 * scale || plateau {
            break;
        }
        last_diff = max_diff;
        if steps > (1 << 24) {
            return Err(Error::NoConvergence {
                what: "auxiliary-function integration",
                last: max_diff,
                previous: max_v,
            });
        }
    }
    let table = Arc::new(table);

    let (j_min, _) = table
        .s
        .iter()
        .enumerate()
        .map(|(j, &s)| (j, spec.potential_of(s)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("table is non-empty");
    if j_min == 0 || j_min == table.s.len() - 1 {
        return Err(Error::NotAWell { half_width });
    }

    let value: RealMap = {
        let t = Arc::clone(&table);
        Arc::new(move |x| spec.potential_of(t.eval(x)))
    };
    let derivative: RealMap = {
        let t = Arc::clone(&table);
        Arc::new(move |x| spec.slope_of(t.eval(x)))
    };

    // Refine the minimum by bisection on the slope around the best node.
    let node_x = |j: usize| -half_width + j as f64 * table.step;
    let (mut lo, mut hi) = (node_x(j_min - 1), node_x(j_min + 1));
    if derivative(lo) < 0.0 && derivative(hi) > 0.0 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if derivative(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    } else {
        lo = node_x(j_min);
        hi = lo;
    }
    let x_min = 0.5 * (lo + hi);
    let v_min = value(x_min);

    let edge = 0.5 * half_width;
    let (v_edge, v_neg, v_far) = (value(edge), value(-edge), value(half_width));
    let scale = v_edge.abs().max((v_edge - v_min).abs());
    let symmetric = (v_edge - v_neg).abs() < 1e-9 * scale;
    let settled = (v_far - v_edge).abs() < 1e-9 * scale;
    let nearest_root = |target: f64| {
        spec.sigma_roots()
            .into_iter()
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
    };
    let roots = if symmetric && settled && v_edge > v_min {
        nearest_root(table.eval(half_width)).zip(nearest_root(table.eval(-half_width)))
    } else {
        None
    };
    let asymptote = roots.map(|(r_plus, _)| spec.potential_of(r_plus));

    let gap: Option<RealMap> = roots.map(|(r_plus, r_minus)| {
        let nodes = (table.s.len() - 1) / 2;
        let plus = TailTable::integrate(&spec, r_plus, table.step, nodes);
        let minus = TailTable::integrate(&spec, r_minus, -table.step, nodes);
        Arc::new(move |x: f64| {
            let side = if x >= 0.0 { &plus } else { &minus };
            let d = side.eval(x);
            d * (spec.a * spec.a * (2.0 * side.root - d) + spec.b)
        }) as RealMap
    });

    let mut well = WellDescriptor {
        label: "shape-class".into(),
        params: vec![
            ("A".into(), spec.a),
            ("B".into(), spec.b),
            ("C".into(), spec.c),
            ("a0".into(), spec.a0),
            ("a1".into(), spec.a1),
            ("a2".into(), spec.a2),
            ("s0".into(), spec.s0),
        ],
        value,
        derivative,
        gap,
        x_min,
        v_min,
        asymptote,
        domain_hint: DomainHint::UnboundedGrowth,
        builtin: None,
    };
    if let Some(u) = well.asymptote {
        well.domain_hint =
            DomainHint::Finite(tail_edge(&well, u - v_min, half_width) + x_min.abs());
    }
    Ok(well)
}

/// `δ₁ = β a₂ / (8A)`, constant in energy on the solvable class.
pub fn closed_form_delta1(spec: &ShapeClassSpec, scale: PhysicalScale) -> Result<f64> {
    if spec.a == 0.0 {
        return Err(Error::ZeroShapeAmplitude);
    }
    Ok(scale.beta() * spec.a2 / (8.0 * spec.a))
}
