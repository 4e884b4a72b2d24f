//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::{connection_by_quadrature, rel_l2, rng, schrodinger_levels_extrapolated};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde_json::Value;
use wigneton::cli::{run, RunOptions};
use wigneton::compress::{assemble_1d_operator, connection_coefficients, to_nonstandard_form, Axis, OperatorKind};
use wigneton::galerkin::{
    assemble_stationary, propagate, solve_stationary, Grid, PropagateOptions, Scheme, StationaryOptions, WignerField,
};
use wigneton::pattern::{analyze, wigner_transform, Classification, Thresholds};
use wigneton::symbol::{star_product, Hamiltonian, PolySymbol};
use wigneton::wavelet::{daubechies_filters, dwt_forward, dwt_inverse};

/// Levels of `p²/2 + q⁴` (ħ = 1) from the Sturm-bisection oracle.
const QUARTIC_LEVELS: [f64; 3] = [0.66798626, 2.39364402, 4.69679539];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn star_algebra() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let hbar = [0.1, 1.0, 2.0][k % 3];
        let f = common::random_poly(&mut r, 4);
        let g = common::random_poly(&mut r, 4);
        let h = common::random_poly(&mut r, 4);
        let left = star_product(&star_product(&f, &g, hbar), &h, hbar);
        let right = star_product(&f, &star_product(&g, &h, hbar), hbar);
        worst = worst.max(left.max_abs_diff(&right));
    }
    let mut canon = 0.0f64;
    for hbar in [0.1, 1.0, 2.0] {
        let (q, p) = (PolySymbol::q(), PolySymbol::p());
        let c = &star_product(&q, &p, hbar) - &star_product(&p, &q, hbar);
        canon = canon.max(c.max_abs_diff(&PolySymbol::constant(Complex64::new(0.0, hbar))));
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        worst < 1e-12 && canon < 1e-14 && secs < 5.0,
        format!("associativity error {worst:.2e}, commutator error {canon:.2e}, {secs:.2}s"),
    )
}

fn dwt_reconstruction() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let (mut rec, mut parseval) = (0.0f64, 0.0f64);
    for genus in (2..=12).step_by(2) {
        let b = daubechies_filters(genus).map_err(|e| e.to_string())?;
        for len in [64, 128, 256, 512, 1024] {
            let x: Vec<f64> = (0..len).map(|_| r.random_range(-1.0..1.0)).collect();
            let e: f64 = x.iter().map(|v| v * v).sum();
            for levels in 1..=5 {
                let mra = dwt_forward(&x, &b, levels).map_err(|e| e.to_string())?;
                rec = rec.max(rel_l2(&dwt_inverse(&mra, &b), &x));
                parseval = parseval.max((mra.energy() - e).abs() / e);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(
        rec < 1e-12 && parseval < 1e-10 && secs < 10.0,
        format!("reconstruction {rec:.2e}, Parseval {parseval:.2e}, {secs:.2}s"),
    )
}

fn connection_tables() -> Outcome {
    let (mut sum_rule, mut table) = (0.0f64, 0.0f64);
    for genus in [4, 6, 8, 10] {
        let b = daubechies_filters(genus).map_err(|e| e.to_string())?;
        let t = connection_coefficients(&b, 0, 1).map_err(|e| e.to_string())?;
        sum_rule = sum_rule.max((t.moment(1) + 1.0).abs());
        for (l, oracle) in connection_by_quadrature(&b, 1, 12) {
            table = table.max((t.get(l) - oracle).abs());
        }
    }
    ensure(sum_rule < 1e-10 && table < 1e-6, format!("sum rule {sum_rule:.2e}, quadrature {table:.2e}"))
}

fn harmonic_stationary() -> Outcome {
    let start = Instant::now();
    let b = daubechies_filters(8).map_err(|e| e.to_string())?;
    let grid = Grid::square(4.5, 64).map_err(|e| e.to_string())?;
    let h = Hamiltonian::harmonic(1.0, 1.0).map_err(|e| e.to_string())?;
    let ops = assemble_stationary(&h, &b, &grid).map_err(|e| e.to_string())?;
    let res = solve_stationary(&ops, 5, &StationaryOptions::default()).map_err(|e| e.to_string())?;
    let errors: Vec<f64> = res.eigenvalues.iter().enumerate().map(|(n, e)| (e - (n as f64 + 0.5)).abs()).collect();
    let worst_err = errors.iter().copied().fold(0.0, f64::max);
    let worst_res = res.residuals.iter().chain(&res.imag_residuals).copied().fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    ensure(
        res.eigenvalues.len() == 5 && worst_err < 1e-4 && worst_res < 1e-6 && secs < 60.0,
        format!(
            "errors [{}], largest residual {worst_res:.2e}, {secs:.1}s",
            errors.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn quartic_stationary() -> Outcome {
    let oracle = schrodinger_levels_extrapolated(|x| x.powi(4), 8.0, 2048, 1.0, 3);
    let drift = oracle.iter().zip(QUARTIC_LEVELS).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if drift > 1e-7 {
        return Err(format!("oracle {oracle:?} departs from the recorded levels"));
    }
    let b = daubechies_filters(8).map_err(|e| e.to_string())?;
    let grid = Grid::new((-3.0, 3.0), (-5.0, 5.0), (64, 64)).map_err(|e| e.to_string())?;
    let h = Hamiltonian::new(PolySymbol::from_real_terms(&[(2, 0, 0.5), (0, 4, 1.0)]), 1.0).map_err(|e| e.to_string())?;
    let ops = assemble_stationary(&h, &b, &grid).map_err(|e| e.to_string())?;
    let res = solve_stationary(&ops, 3, &StationaryOptions::default()).map_err(|e| e.to_string())?;
    let rel: Vec<f64> = res.eigenvalues.iter().zip(&oracle).map(|(e, o)| (e - o).abs() / o).collect();
    ensure(
        rel.len() == 3 && rel.iter().all(|&r| r < 1e-3),
        format!("relative errors [{}]", rel.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(", ")),
    )
}

fn coherent_return() -> Outcome {
    let b = daubechies_filters(8).map_err(|e| e.to_string())?;
    let grid = Grid::square(8.0, 64).map_err(|e| e.to_string())?;
    let w0 = WignerField::from_fn(grid, 1.0, |q, p| (-(q - 1.0).powi(2) - p * p).exp() / PI).map_err(|e| e.to_string())?;
    let h = Hamiltonian::harmonic(1.0, 1.0).map_err(|e| e.to_string())?;
    let opts = PropagateOptions::new(TAU, TAU / 2000.0, Scheme::ImplicitMidpoint).with_stride(usize::MAX);
    let traj = propagate(&w0, &h, &b, &opts).map_err(|e| e.to_string())?;
    let err = traj.last().relative_l2_error(&w0).map_err(|e| e.to_string())?;
    ensure(
        err < 1e-3 && traj.max_mass_drift < 1e-8,
        format!("return error {err:.2e}, mass drift {:.2e}", traj.max_mass_drift),
    )
}

fn gaussian(x: f64, q0: f64, sigma: f64) -> Complex64 {
    Complex64::from((2.0 * PI * sigma * sigma).powf(-0.25) * (-(x - q0).powi(2) / (4.0 * sigma * sigma)).exp())
}

fn wigner_marginals() -> Outcome {
    let hbar = 1.0;
    let axis = Axis::new(-8.0, 8.0, 128).map_err(|e| e.to_string())?;
    let psi: Vec<Complex64> = axis.nodes().iter().map(|&x| gaussian(x, -2.5, 0.7) + gaussian(x, 2.5, 0.7)).collect();
    let wt = wigner_transform(&psi, axis, hbar).map_err(|e| e.to_string())?;
    let n = wt.input_norm;
    let q_err = psi
        .iter()
        .zip(wt.field.q_marginal())
        .map(|(z, m)| (z.norm_sqr() / n - m).abs())
        .fold(0.0, f64::max);
    let nodes = axis.nodes();
    let p_err = wt
        .field
        .p_marginal()
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let p = wt.field.grid.p.node(k);
            let s: Complex64 = nodes.iter().zip(&psi).map(|(&q, z)| z * Complex64::from_polar(1.0, -p * q / hbar)).sum();
            ((s * axis.step()).norm_sqr() / (2.0 * PI * hbar) / n - m).abs()
        })
        .fold(0.0, f64::max);
    let bound = wt.field.max_abs() - 1.0 / (PI * hbar);
    let excited = |q: f64, p: f64| -(1.0 - 2.0 * (q * q + p * p)) * (-(q * q + p * p)).exp() / PI;
    let neg = |n: usize| -> Result<f64, String> {
        let grid = Grid::square(6.0, n).map_err(|e| e.to_string())?;
        Ok(WignerField::from_fn(grid, 1.0, excited).map_err(|e| e.to_string())?.negativity_volume())
    };
    let (n64, n128) = (neg(64)?, neg(128)?);
    let change = (n64 - n128).abs() / n128;
    ensure(
        q_err < 1e-6 && p_err < 1e-6 && bound <= 1e-6 && n64 > 0.1 && change < 0.05,
        format!(
            "marginal errors {q_err:.1e}/{p_err:.1e}, max|W| − 1/πħ = {bound:.1e}, negativity {n64:.4} → {n128:.4}"
        ),
    )
}

fn compression() -> Outcome {
    let b = daubechies_filters(8).map_err(|e| e.to_string())?;
    let axis = Axis::new(0.0, 1.0, 1024).map_err(|e| e.to_string())?;
    let dense = assemble_1d_operator(&OperatorKind::Derivative(1), &b, &axis).map_err(|e| e.to_string())?;
    let (ns, stats) = to_nonstandard_form(&dense, &b, 6)
        .and_then(|m| m.threshold_compress(1e-8))
        .map_err(|e| e.to_string())?;
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut v: Vec<f64> = (0..1024).map(|_| r.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let exact = &dense * DVector::from_column_slice(&v);
        let approx = ns.apply(&v).map_err(|e| e.to_string())?;
        let err = approx.iter().zip(exact.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        worst = worst.max(err);
    }
    ensure(
        stats.retained_fraction <= 0.05 && worst < 1e-6,
        format!("retained {:.4}, apply error {worst:.2e}", stats.retained_fraction),
    )
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_to(config: &Path, out: &Path) -> Result<(), String> {
    let opts = RunOptions { config_path: config.to_path_buf(), task: None, out: Some(out.to_path_buf()), seed: None };
    run(&opts).map(|_| ()).map_err(|e| format!("{}: {e}", config.display()))
}

fn pattern_classes() -> Outcome {
    let th = Thresholds::default();
    let b = daubechies_filters(8).map_err(|e| e.to_string())?;
    let grid = Grid::square(4.5, 64).map_err(|e| e.to_string())?;
    let h = Hamiltonian::harmonic(1.0, 1.0).map_err(|e| e.to_string())?;
    let ops = assemble_stationary(&h, &b, &grid).map_err(|e| e.to_string())?;
    let res = solve_stationary(&ops, 1, &StationaryOptions::default()).map_err(|e| e.to_string())?;
    let ground = analyze(&res.modes[0], &b, 3, &th).map_err(|e| e.to_string())?;

    let mut r = rng(0x5eed);
    let grid = Grid::square(6.0, 64).map_err(|e| e.to_string())?;
    let values: Vec<f64> = (0..grid.len()).map(|_| r.random_range(-1.0..1.0)).collect();
    let noise = WignerField::new(grid, values, 1.0, 0.0).map_err(|e| e.to_string())?;
    let noise = analyze(&noise, &b, 3, &th).map_err(|e| e.to_string())?;

    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_to(&configs().join("kicked_quartic_analyze.json"), tmp.path())?;
    let report: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("pattern_report.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let last = report["reports"].as_array().and_then(|r| r.last()).ok_or("empty trajectory report")?;
    let kicked = last["classification"].as_str().unwrap_or("missing").to_string();
    ensure(
        ground.classification == Classification::LocalizedWaveleton
            && noise.classification == Classification::Chaotic
            && kicked != "localized_waveleton",
        format!(
            "ground {:?} (top {:.3}), noise {:?} (entropy {:.3} of {:.3}), kicked quartic at t={} {kicked} (top {:.3}, radius {:.2}, negativity {:.3})",
            ground.classification,
            ground.top_level_fraction,
            noise.classification,
            noise.scale_entropy,
            (noise.n_levels() as f64).ln(),
            last["time"],
            last["top_level_fraction"].as_f64().unwrap_or(f64::NAN),
            last["localization_radius"].as_f64().unwrap_or(f64::NAN),
            last["negativity_volume"].as_f64().unwrap_or(f64::NAN),
        ),
    )
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files: Vec<PathBuf> = fs::read_dir(configs())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut payloads = 0;
    for cfg in &files {
        let stem = cfg.file_stem().unwrap().to_string_lossy().to_string();
        let dirs = [tmp.path().join(format!("{stem}_a")), tmp.path().join(format!("{stem}_b"))];
        for d in &dirs {
            run_to(cfg, d)?;
        }
        let read = |d: &Path, name: &str| fs::read(d.join(name)).map_err(|e| e.to_string());
        if read(&dirs[0], "manifest.json")? != read(&dirs[1], "manifest.json")? {
            return Err(format!("{stem}: manifests differ"));
        }
        for entry in fs::read_dir(&dirs[0]).map_err(|e| e.to_string())? {
            let name = entry.map_err(|e| e.to_string())?.file_name().to_string_lossy().to_string();
            if name.ends_with(".f64") {
                if read(&dirs[0], &name)? != read(&dirs[1], &name)? {
                    return Err(format!("{stem}: {name} differs"));
                }
                payloads += 1;
            }
        }
    }
    Ok(format!("{} configs, {payloads} payloads identical", files.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("star-product algebra", star_algebra),
        ("DWT reconstruction", dwt_reconstruction),
        ("connection coefficients", connection_tables),
        ("harmonic stargenvalues", harmonic_stationary),
        ("quartic stargenvalues", quartic_stationary),
        ("coherent-state return", coherent_return),
        ("Wigner marginals", wigner_marginals),
        ("operator sparsity", compression),
        ("pattern classes", pattern_classes),
        ("determinism", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed.push(k + 1);
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{secs:.1}s]", k + 1);
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
