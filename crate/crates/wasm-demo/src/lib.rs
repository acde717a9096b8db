//! Browser bindings. Every export returns a JSON string; the `*_json`
//! functions are the same operations callable from native code and tests.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use semiclassical::correction::{improved_delta, pade_delta, CorrectionScheme};
use semiclassical::oracle::{fd_spectrum_auto, FdGrid};
use semiclassical::potential::{make_builtin, PhysicalScale, WellDescriptor};
use semiclassical::solver::{LevelSolver, SolverOptions};

const PROFILE_SAMPLES: usize = 241;

#[derive(Serialize)]
struct SchemeLevels {
    scheme: &'static str,
    levels: Vec<f64>,
    q: Option<f64>,
    error: Option<String>,
}

#[derive(Serialize)]
struct WellView {
    x: Vec<f64>,
    v: Vec<f64>,
    asymptote: Option<f64>,
    oracle: Vec<f64>,
    schemes: Vec<SchemeLevels>,
}

#[derive(Serialize)]
struct Curves {
    delta1: Vec<f64>,
    first_order: Vec<f64>,
    pade: Vec<f64>,
    improved: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct ScanPoint {
    depth: f64,
    oracle: Option<f64>,
    schemes: Vec<(&'static str, Option<f64>)>,
}

fn parse_params(json: &str) -> Result<Vec<(String, f64)>, String> {
    if json.trim().is_empty() {
        return Ok(Vec::new());
    }
    let map: std::collections::BTreeMap<String, f64> =
        serde_json::from_str(json).map_err(|e| format!("parameters: {e}"))?;
    Ok(map.into_iter().collect())
}

fn build(name: &str, params_json: &str) -> Result<WellDescriptor, String> {
    let params = parse_params(params_json)?;
    let refs: Vec<(&str, f64)> = params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    make_builtin(name, &refs).map_err(|e| e.to_string())
}

/// Half-width that shows the well up to `ceiling`.
fn plot_half_width(well: &WellDescriptor, ceiling: f64) -> f64 {
    let (x0, _) = well.minimum();
    let mut l = 0.5;
    while l < 200.0 && (well.value(x0 + l) < ceiling || well.value(x0 - l) < ceiling) {
        l *= 1.1;
    }
    l
}

pub fn solve_well_json(
    name: &str,
    params_json: &str,
    beta: f64,
    n_max: usize,
) -> Result<String, String> {
    let well = build(name, params_json)?;
    let scale = PhysicalScale::new(beta).map_err(|e| e.to_string())?;
    let n_max = n_max.min(40);

    let schemes: Vec<SchemeLevels> = CorrectionScheme::ALL
        .iter()
        .map(|&scheme| {
            let solved = LevelSolver::new(&well, scheme, scale, SolverOptions::default())
                .and_then(|s| Ok((s.well_q(), s.spectrum(n_max)?)));
            match solved {
                Ok((q, report)) => SchemeLevels {
                    scheme: scheme.name(),
                    levels: report.energies(),
                    q,
                    error: None,
                },
                Err(e) => SchemeLevels {
                    scheme: scheme.name(),
                    levels: Vec::new(),
                    q: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let top = schemes
        .iter()
        .flat_map(|s| s.levels.iter().copied())
        .fold(well.v_min() + 1.0, f64::max);
    let ceiling = match well.asymptote() {
        Some(u) => well.v_min() + 0.995 * (u - well.v_min()),
        None => well.v_min() + 1.3 * (top - well.v_min()),
    };
    let l = plot_half_width(&well, ceiling);
    let x0 = well.minimum().0;
    let x: Vec<f64> = (0..PROFILE_SAMPLES)
        .map(|i| x0 - l + 2.0 * l * i as f64 / (PROFILE_SAMPLES - 1) as f64)
        .collect();
    let v = x.iter().map(|&x| well.value(x)).collect();

    let (grid, m) = match well.asymptote() {
        Some(_) => (
            FdGrid {
                half_width: 15.0 * beta.max(1.0),
                points: 2001,
            },
            None,
        ),
        None => {
            let count = schemes
                .iter()
                .map(|s| s.levels.len())
                .max()
                .unwrap_or(1)
                .max(1);
            (
                FdGrid {
                    half_width: 2.0 * l,
                    points: 2001,
                },
                Some(count),
            )
        }
    };
    let oracle = fd_spectrum_auto(&well, scale, grid, m)
        .map(|s| s.eigenvalues)
        .unwrap_or_default();

    let view = WellView {
        x,
        v,
        asymptote: well.asymptote(),
        oracle,
        schemes,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

pub fn shift_curves_json(q: f64, t_max: f64, samples: usize) -> Result<String, String> {
    if t_max.is_nan() || t_max <= 0.0 || samples < 2 {
        return Err("need t_max > 0 and at least two samples".into());
    }
    let delta1: Vec<f64> = (0..samples)
        .map(|i| -t_max + 2.0 * t_max * i as f64 / (samples - 1) as f64)
        .collect();
    let curves = Curves {
        first_order: delta1.clone(),
        pade: delta1.iter().map(|&t| pade_delta(t)).collect(),
        improved: delta1.iter().map(|&t| improved_delta(t, q).ok()).collect(),
        delta1,
    };
    serde_json::to_string(&curves).map_err(|e| e.to_string())
}

pub fn shallow_scan_json(depths_json: &str, width: f64) -> Result<String, String> {
    let depths: Vec<f64> = serde_json::from_str(depths_json).map_err(|e| format!("depths: {e}"))?;
    let scale = PhysicalScale::default();
    let schemes = [
        CorrectionScheme::Plain,
        CorrectionScheme::Pade,
        CorrectionScheme::Improved,
        CorrectionScheme::ImprovedSimplified,
    ];
    let mut points = Vec::with_capacity(depths.len());
    for depth in depths {
        let well =
            make_builtin("gauss", &[("U", depth), ("w", width)]).map_err(|e| e.to_string())?;
        let oracle = fd_spectrum_auto(
            &well,
            scale,
            FdGrid {
                half_width: 15.0,
                points: 2001,
            },
            Some(1),
        )
        .ok()
        .and_then(|s| s.get(0));
        let schemes = schemes
            .iter()
            .map(|&scheme| {
                let eps = LevelSolver::new(&well, scheme, scale, SolverOptions::default())
                    .and_then(|s| s.solve_level(0))
                    .ok()
                    .map(|l| l.eps);
                (scheme.name(), eps)
            })
            .collect();
        points.push(ScanPoint {
            depth,
            oracle,
            schemes,
        });
    }
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn solve_well(
    name: &str,
    params_json: &str,
    beta: f64,
    n_max: usize,
) -> Result<String, JsValue> {
    solve_well_json(name, params_json, beta, n_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn shift_curves(q: f64, t_max: f64, samples: usize) -> Result<String, JsValue> {
    shift_curves_json(q, t_max, samples).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn shallow_scan(depths_json: &str, width: f64) -> Result<String, JsValue> {
    shallow_scan_json(depths_json, width).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn tanh2_view() {
        let doc: Value =
            serde_json::from_str(&solve_well_json("tanh2", r#"{"U": 12}"#, 1.0, 10).unwrap())
                .unwrap();
        assert_eq!(doc["x"].as_array().unwrap().len(), PROFILE_SAMPLES);
        let pade = doc["schemes"]
            .as_array()
            .unwrap()
            .iter()
            .find(|s| s["scheme"] == "pade")
            .unwrap();
        let levels: Vec<f64> = pade["levels"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .collect();
        assert_eq!(levels.len(), 3);
        assert!((levels[2] - 11.0).abs() < 1e-6);
        let oracle = doc["oracle"].as_array().unwrap();
        assert_eq!(oracle.len(), 3);
        assert!((oracle[0].as_f64().unwrap() - 3.0).abs() < 1e-4);
    }

    #[test]
    fn inapplicable_schemes_carry_a_message() {
        let doc: Value =
            serde_json::from_str(&solve_well_json("harmonic", "", 1.0, 3).unwrap()).unwrap();
        let improved = doc["schemes"]
            .as_array()
            .unwrap()
            .iter()
            .find(|s| s["scheme"] == "improved")
            .unwrap();
        assert!(improved["error"].as_str().unwrap().contains("no asymptote"));
        assert_eq!(doc["oracle"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn bad_input_is_reported() {
        assert!(solve_well_json("nope", "", 1.0, 3).is_err());
        assert!(solve_well_json("tanh2", "{U:", 1.0, 3).is_err());
        assert!(shift_curves_json(1.0, -1.0, 10).is_err());
        assert!(shallow_scan_json("[0.5,", 1.0).is_err());
    }

    #[test]
    fn curves_with_unit_q_coincide() {
        let doc: Value = serde_json::from_str(&shift_curves_json(1.0, 5.0, 21).unwrap()).unwrap();
        for (p, i) in doc["pade"]
            .as_array()
            .unwrap()
            .iter()
            .zip(doc["improved"].as_array().unwrap())
        {
            assert!((p.as_f64().unwrap() - i.as_f64().unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn shallow_scan_points() {
        let doc: Value =
            serde_json::from_str(&shallow_scan_json("[1.0, 0.5]", 1.0).unwrap()).unwrap();
        let points = doc.as_array().unwrap();
        assert_eq!(points.len(), 2);
        let improved = &points[0]["schemes"][2];
        assert_eq!(improved[0], "improved");
        assert!((improved[1].as_f64().unwrap() - 0.6315).abs() < 1e-3);
        assert!((points[0]["oracle"].as_f64().unwrap() - 0.646).abs() < 1e-3);
    }
}
