//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so every criterion is reported even when an
//! earlier one fails. The process exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use semiclassical::cli::{cmd_compare, RunConfig};
use semiclassical::correction::{
    compute_q_with, delta1_numeric, improved_delta, pade_delta, CorrectionScheme, QForm,
};
use semiclassical::oracle::{analytic_spectrum, fd_spectrum, fd_spectrum_auto, FdGrid};
use semiclassical::potential::{make_builtin, BuiltinWell, PhysicalScale, WellDescriptor};
use semiclassical::quadrature::{phase_at_asymptote, QuadratureConfig};
use semiclassical::solver::{LevelSolver, SolverOptions};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn unit() -> PhysicalScale {
    PhysicalScale::default()
}

fn tanh2(u: f64) -> WellDescriptor {
    make_builtin("tanh2", &[("U", u)]).unwrap()
}

fn gauss(u: f64) -> WellDescriptor {
    make_builtin("gauss", &[("U", u), ("w", 1.0)]).unwrap()
}

fn solver(well: &WellDescriptor, scheme: CorrectionScheme) -> LevelSolver<'_> {
    LevelSolver::new(well, scheme, unit(), SolverOptions::default()).unwrap()
}

fn ground(well: &WellDescriptor, scheme: CorrectionScheme) -> f64 {
    solver(well, scheme).solve_level(0).unwrap().eps
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact_levels_of_tanh2() -> Outcome {
    let well = tanh2(12.0);
    let report = solver(&well, CorrectionScheme::Pade).spectrum(20).unwrap();
    let eps = report.energies();
    let oracle = fd_spectrum_auto(
        &well,
        unit(),
        FdGrid {
            half_width: 15.0,
            points: 4001,
        },
        None,
    )
    .unwrap();
    let mut worst = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut oracle_ok = oracle.len() == 3;
    for (n, exact) in [3.0, 8.0, 11.0].into_iter().enumerate() {
        worst = worst.max(eps.get(n).map_or(f64::INFINITY, |e| (e - exact).abs()));
        let gap = (oracle.eigenvalues[n] - exact).abs();
        worst_oracle = worst_oracle.max(gap);
        oracle_ok &= gap <= oracle.errors[n].max(1e-9);
    }
    verdict(
        eps.len() == 3 && worst <= 1e-6 && oracle_ok,
        format!(
            "{} levels, max |eps - exact| = {worst:.2e} (tol 1e-6); oracle max gap {worst_oracle:.2e}",
            eps.len()
        ),
    )
}

fn plain_harmonic() -> Outcome {
    let well = make_builtin("harmonic", &[]).unwrap();
    let s = solver(&well, CorrectionScheme::Plain);
    let mut worst = 0.0f64;
    for n in 0..=4 {
        let e = s.solve_level(n).unwrap().eps;
        worst = worst.max((e - (2 * n + 1) as f64).abs());
    }
    verdict(
        worst <= 1e-9,
        format!("max |eps_n - (2n+1)| = {worst:.2e} for n <= 4 (tol 1e-9)"),
    )
}

fn first_correction_constant() -> Outcome {
    let u = 12.0;
    let well = tanh2(u);
    let target = -1.0 / (8.0 * u.sqrt());
    let cfg = QuadratureConfig::default();
    let values: Vec<f64> = [0.25, 0.5, 0.75]
        .iter()
        .map(|f| delta1_numeric(&well, f * u, unit(), &cfg).unwrap())
        .collect();
    let worst = values
        .iter()
        .map(|v| (v - target).abs())
        .fold(0.0, f64::max);
    let spread = values.iter().cloned().fold(f64::MIN, f64::max)
        - values.iter().cloned().fold(f64::MAX, f64::min);
    verdict(
        worst <= 1e-6 && spread <= 1e-6,
        format!("delta1 = {values:.9?}, target {target:.9}, max dev {worst:.2e}, spread {spread:.2e} (tol 1e-6)"),
    )
}

fn limit_suites() -> Outcome {
    let mut small_worst = 0.0f64;
    for k in 0..=60 {
        let t = 10f64.powf(-9.0 + 6.0 * k as f64 / 60.0);
        for t in [t, -t] {
            small_worst = small_worst.max((pade_delta(t) - t).abs() / (8.0 * t.abs().powi(3)));
        }
    }
    let small_ok = small_worst <= 1.0;

    let large_dev = [100.0f64, -100.0]
        .iter()
        .map(|&t| (pade_delta(t) - (t.signum() / 2.0 + 1.0 / (8.0 * t))).abs())
        .fold(0.0, f64::max);
    let large_ok = large_dev <= 1e-4;

    let (d1, phi_u) = (-1e4, 0.01);
    let q = -8.0 * d1 * phi_u;
    let shallow = improved_delta(d1, q).unwrap();
    let shallow_dev = (shallow - (-0.5 + phi_u)).abs();
    let shallow_ok = shallow_dev <= 1e-5;

    let mark = |ok: bool| if ok { "ok" } else { "fail" };
    verdict(
        small_ok && large_ok && shallow_ok,
        format!(
            "small t: max |pade-t|/(8|t|^3) = {small_worst:.3} [{}]; |t|=100: dev from sgn/2+1/(8t) = {large_dev:.2e} (tol 1e-4) [{}]; \
             improved(-1e4, q={q}) = {shallow:.7} vs -0.49, dev {shallow_dev:.2e} (tol 1e-5) [{}]",
            mark(small_ok),
            mark(large_ok),
            mark(shallow_ok)
        ),
    )
}

fn q_is_one_on_tanh2() -> Outcome {
    let cfg = QuadratureConfig::default();
    let mut product_worst = 0.0f64;
    let mut quotient_worst = 0.0f64;
    let mut quotient_vals = Vec::new();
    for u in [1.0, 12.0, 100.0] {
        let well = tanh2(u);
        let phi_u = phase_at_asymptote(&well, unit(), &cfg).unwrap();
        let d1 = delta1_numeric(&well, 0.5 * u, unit(), &cfg).unwrap();
        let product = compute_q_with(QForm::Product, d1, phi_u).unwrap();
        let quotient = compute_q_with(QForm::Quotient, d1, phi_u).unwrap();
        product_worst = product_worst.max((product - 1.0).abs());
        quotient_worst = quotient_worst.max((quotient / (64.0 * u) - 1.0).abs());
        quotient_vals.push(quotient);
    }
    verdict(
        product_worst <= 1e-4 && quotient_worst <= 1e-4,
        format!(
            "product form max |q-1| = {product_worst:.2e} (tol 1e-4); quotient form gives {quotient_vals:.4?} = 64U (rel dev {quotient_worst:.1e})"
        ),
    )
}

fn shallow_well() -> Outcome {
    let shallow = gauss(0.02);
    let oracle = fd_spectrum_auto(
        &shallow,
        unit(),
        FdGrid {
            half_width: 15.0,
            points: 4001,
        },
        None,
    )
    .unwrap();
    let eps0 = ground(&shallow, CorrectionScheme::Improved);
    let deeper = ground(&gauss(0.5), CorrectionScheme::Improved);
    let ratio_shallow = (0.02 - eps0) / 0.02;
    let ratio_deeper = (0.5 - deeper) / 0.5;
    verdict(
        oracle.len() == 1 && eps0 > 0.0 && eps0 < 0.02 && ratio_shallow < ratio_deeper,
        format!(
            "oracle bound states {} (eps0 {:.6e}); improved eps0 {eps0:.6e}; (U-eps0)/U = {ratio_shallow:.4} at U=0.02 vs {ratio_deeper:.4} at U=0.5",
            oracle.len(),
            oracle.get(0).unwrap_or(f64::NAN)
        ),
    )
}

fn improvement_ordering() -> Outcome {
    let well = gauss(1.0);
    let oracle = fd_spectrum_auto(
        &well,
        unit(),
        FdGrid {
            half_width: 15.0,
            points: 4001,
        },
        None,
    )
    .unwrap();
    let reference = oracle.eigenvalues[0];
    let err = |s| (ground(&well, s) - reference).abs();
    let plain = err(CorrectionScheme::Plain);
    let pade = err(CorrectionScheme::Pade);
    let improved = err(CorrectionScheme::Improved);
    verdict(
        improved <= plain && pade <= plain,
        format!(
            "|err| plain {plain:.4e}, pade {pade:.4e}, improved {improved:.4e} (improved {} pade, recorded only)",
            if improved <= pade { "<=" } else { ">" }
        ),
    )
}

fn diagnostics_vanish() -> Outcome {
    let well = tanh2(12.0);
    let mut gamma_worst = 0.0f64;
    let mut mu_worst = 0.0f64;
    for scheme in [CorrectionScheme::Improved, CorrectionScheme::Pade] {
        for level in solver(&well, scheme).spectrum(20).unwrap().levels {
            gamma_worst = gamma_worst.max(level.gamma.map_or(f64::INFINITY, f64::abs));
            if scheme == CorrectionScheme::Improved {
                mu_worst = mu_worst.max(level.mu.map_or(f64::INFINITY, f64::abs));
            }
        }
    }
    let g = gauss(1.0);
    let level = solver(&g, CorrectionScheme::Improved)
        .solve_level(0)
        .unwrap();
    let (mu_g, gamma_g) = (level.mu.unwrap(), level.gamma.unwrap());
    verdict(
        gamma_worst < 5e-5 && mu_worst < 1e-4 && mu_g.abs() > 1e-3 && gamma_g.abs() > 1e-3,
        format!(
            "tanh2 max |gamma| {gamma_worst:.2e} (tol 5e-5), max |mu| {mu_worst:.2e} (tol 1e-4); gauss U=1 n=0: mu {mu_g:.6}, gamma {gamma_g:.6}"
        ),
    )
}

fn oracle_self_consistency() -> Outcome {
    let cases: [(BuiltinWell, FdGrid, usize); 2] = [
        (
            BuiltinWell::Harmonic,
            FdGrid {
                half_width: 8.0,
                points: 2001,
            },
            4,
        ),
        (
            BuiltinWell::Tanh2 { depth: 12.0 },
            FdGrid {
                half_width: 15.0,
                points: 2001,
            },
            3,
        ),
    ];
    let mut ok = true;
    let mut worst_ratio = f64::INFINITY;
    let mut worst_excess = 0.0f64;
    for (builtin, grid, m) in cases {
        let well = builtin.well();
        let coarse = fd_spectrum(&well, unit(), grid, Some(m)).unwrap();
        let fine = fd_spectrum(&well, unit(), grid.refined(), Some(m)).unwrap();
        for n in 0..m {
            let exact = analytic_spectrum(&builtin, unit(), n).unwrap();
            for s in [&coarse, &fine] {
                let gap = (s.eigenvalues[n] - exact).abs();
                worst_excess = worst_excess.max(gap / s.errors[n]);
                ok &= gap <= s.errors[n];
            }
            let ratio = coarse.errors[n] / fine.errors[n];
            worst_ratio = worst_ratio.min(ratio);
            ok &= ratio >= 3.5;
        }
    }
    verdict(
        ok,
        format!("max |fd - exact| / estimate = {worst_excess:.2e} (must be <= 1); min estimate shrink per doubling {worst_ratio:.3} (must be >= 3.5)"),
    )
}

fn determinism() -> Outcome {
    let cfg = RunConfig::from_toml_str(
        "well = \"gauss\"\nschemes = [\"plain\", \"pade\", \"improved\"]\nn_max = 4\n[params]\nU = 2.0\nw = 1.0\n",
    )
    .unwrap();
    let a = cmd_compare(&cfg).unwrap().to_csv();
    let b = cmd_compare(&cfg).unwrap().to_csv();

    let run = || {
        Command::new(env!("CARGO_BIN_EXE_semiclassical"))
            .args([
                "compare", "--well", "tanh2", "--param", "U=12", "--scheme", "pade", "--scheme",
                "improved",
            ])
            .output()
            .unwrap()
    };
    let (p, r) = (run(), run());
    let process_ok = p.status.success() && p.stdout == r.stdout && !p.stdout.is_empty();
    verdict(
        a == b && process_ok,
        format!(
            "library CSV {} bytes identical: {}; binary CSV {} bytes identical: {}",
            a.len(),
            a == b,
            p.stdout.len(),
            process_ok
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "exact levels on tanh2 with the two-point shift",
            exact_levels_of_tanh2,
        ),
        (
            "plain quantisation is exact for the harmonic well",
            plain_harmonic,
        ),
        (
            "numeric first correction matches the closed form",
            first_correction_constant,
        ),
        ("limits of the shift formulas", limit_suites),
        ("q = 1 on tanh2 for every depth", q_is_one_on_tanh2),
        ("a bound state exists in a shallow well", shallow_well),
        (
            "corrections improve on plain quantisation",
            improvement_ordering,
        ),
        (
            "class-distance diagnostics vanish on tanh2",
            diagnostics_vanish,
        ),
        (
            "finite-difference oracle self-consistency",
            oracle_self_consistency,
        ),
        ("compare output is deterministic", determinism),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag} {title} ({secs:.2}s): {detail}",
            i + 1
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
