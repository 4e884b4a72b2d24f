use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{Format, OperatorSpec, RunConfig, Task};
use super::state::StateSpec;
use super::{CliError, ErrorKind};
use crate::compress::{assemble_1d_operator, to_nonstandard_form, OperatorKind};
use crate::galerkin::{assemble_stationary, propagate, solve_stationary, PropagateOptions, Scheme, WignerField};
use crate::io::{plot_data, read_field, write_field_files, ArtifactWriter, FieldHeader, Manifest};
use crate::pattern::{analyze, analyze_trajectory, wigner_transform};
use crate::wavelet::{mra_components, wavelet_packet_best_basis, PacketNode};

/// Seed used when none is given on the command line.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub config_path: PathBuf,
    /// Task named on the command line; must match the config's.
    pub task: Option<Task>,
    /// Overrides `output.dir`.
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub manifest: Manifest,
}

/// Reads the config at `opts.config_path` and executes it.
///
/// A relative `output.dir` or state file path resolves against the config
/// file's directory; `--out` resolves against the working directory.
pub fn run(opts: &RunOptions) -> Result<RunSummary, CliError> {
    let text = fs::read_to_string(&opts.config_path).map_err(|e| CliError {
        kind: ErrorKind::Io,
        field: None,
        message: format!("cannot read config {}: {e}", opts.config_path.display()),
    })?;
    let config = RunConfig::from_json(&text)?;
    if let Some(task) = opts.task {
        if task != config.task {
            return Err(CliError::config(
                Some("task".into()),
                format!("command line asks for {task}, config is for {}", config.task),
            ));
        }
    }
    let base = opts.config_path.parent().unwrap_or(Path::new("")).to_path_buf();
    let dir = match &opts.out {
        Some(out) => out.clone(),
        None => base.join(&config.output.dir),
    };
    let manifest = run_config(&config, &base, &dir, opts.seed)?;
    Ok(RunSummary { dir, manifest })
}

/// Executes a validated config, writing every artifact into `dir`.
pub fn run_config(config: &RunConfig, base: &Path, dir: &Path, seed: Option<u64>) -> Result<Manifest, CliError> {
    config.validate()?;
    let mut ctx = Context {
        config,
        base,
        seed: seed.unwrap_or(DEFAULT_SEED),
        seed_override: seed,
        writer: ArtifactWriter::new(dir)?,
    };
    match config.task {
        Task::SolveStationary => ctx.solve_stationary()?,
        Task::Evolve => ctx.evolve()?,
        Task::WignerTransform => ctx.wigner()?,
        Task::DemoMra => ctx.demo_mra()?,
        Task::CompressOperator => ctx.compress()?,
        Task::Analyze => ctx.analyze()?,
    }
    let seed = ctx.seed;
    Ok(ctx.writer.finish(config.task.name(), seed)?)
}

struct Context<'a> {
    config: &'a RunConfig,
    base: &'a Path,
    seed: u64,
    seed_override: Option<u64>,
    writer: ArtifactWriter,
}

#[derive(Serialize)]
struct FieldJson<'a> {
    #[serde(flatten)]
    header: FieldHeader,
    values: &'a [f64],
}

#[derive(Serialize)]
struct Eigenvalues<'a> {
    values: &'a [f64],
    residuals: &'a [f64],
    imag_residuals: &'a [f64],
    flagged: &'a [bool],
    cluster_sizes: &'a [usize],
    eigenpairs_computed: usize,
}

#[derive(Serialize)]
struct TrajectoryInfo {
    scheme: Scheme,
    steps: usize,
    dt: f64,
    times: Vec<f64>,
    masses: Vec<f64>,
    max_mass_drift: f64,
    max_linear_residual: f64,
    kicks_applied: usize,
}

#[derive(Serialize)]
struct WignerInfo {
    renormalized: bool,
    input_norm: f64,
    mass: f64,
    max_abs: f64,
    pure_state_bound: f64,
    negativity_volume: f64,
}

#[derive(Serialize)]
struct PacketInfo {
    level: usize,
    band: usize,
    frequency_interval: (f64, f64),
}

#[derive(Serialize)]
struct MraInfo {
    length: usize,
    coarse_level: usize,
    fine_level: usize,
    columns: Vec<String>,
    component_energies: Vec<f64>,
    best_basis: Vec<PacketInfo>,
    best_basis_cost: f64,
}

#[derive(Serialize)]
struct CompressionInfo {
    operator: OperatorSpec,
    levels: usize,
    retained_fraction: f64,
    retained_entries: usize,
    epsilon: f64,
    dense_dim: usize,
    /// Largest error over the sampled unit vectors.
    apply_error_estimate: f64,
    /// Sum of the Frobenius norms of the dropped entries.
    apply_error_bound: f64,
    samples: usize,
}

impl Context<'_> {
    fn emit_field(&mut self, stem: &str, field: &WignerField) -> Result<(), CliError> {
        let formats = &self.config.output.formats;
        write_field_files(
            &mut self.writer,
            stem,
            field,
            formats.contains(&Format::F64),
            formats.contains(&Format::Csv),
        )?;
        if formats.contains(&Format::Json) {
            let doc = FieldJson { header: FieldHeader::of(field), values: &field.values };
            self.writer.write_json(&format!("{stem}.field.json"), &doc)?;
        }
        self.writer.write(&format!("{stem}.dat"), plot_data(field).as_bytes())?;
        Ok(())
    }

    fn hbar(&self) -> f64 {
        self.config.hamiltonian.as_ref().map_or(1.0, |h| h.hbar)
    }

    /// The initial field of evolve and analyze runs.
    fn initial_field(&self) -> Result<WignerField, CliError> {
        let state = self.config.params.state.as_ref().expect("validated state");
        let field = match state {
            StateSpec::Field { path } => {
                let field = read_field(&self.base.join(path))?;
                if let Some(grid) = self.config.grid()? {
                    if grid != field.grid {
                        return Err(CliError::config(Some("grid".into()), "differs from the grid of params.state.path"));
                    }
                }
                field
            }
            _ => state.wigner_field(&self.config.grid()?.expect("validated grid"), self.hbar(), self.seed)?,
        };
        let depth = self.config.levels.fine;
        if depth > field.grid.max_levels() {
            return Err(CliError::config(
                Some("levels.fine".into()),
                format!("field grid supports at most level {}, got {depth}", field.grid.max_levels()),
            ));
        }
        Ok(field)
    }

    fn propagate_opts(&self) -> PropagateOptions {
        let p = &self.config.params;
        PropagateOptions::new(p.t_end.expect("validated"), p.dt.expect("validated"), self.config.scheme())
            .with_stride(p.stride.unwrap_or(usize::MAX))
    }

    fn solve_stationary(&mut self) -> Result<(), CliError> {
        let h = self.config.hamiltonian()?.expect("validated");
        let grid = self.config.grid()?.expect("validated");
        let basis = self.config.basis()?;
        let mut opts = self.config.params.solver.unwrap_or_default();
        if let Some(seed) = self.seed_override {
            opts.seed = seed;
        }
        let ops = assemble_stationary(&h, &basis, &grid)?;
        let res = solve_stationary(&ops, self.config.params.n_modes.unwrap_or(5), &opts)?;
        for (k, mode) in res.modes.iter().enumerate() {
            self.emit_field(&format!("mode_{k}"), mode)?;
        }
        let doc = Eigenvalues {
            values: &res.eigenvalues,
            residuals: &res.residuals,
            imag_residuals: &res.imag_residuals,
            flagged: &res.flagged,
            cluster_sizes: &res.cluster_sizes,
            eigenpairs_computed: res.eigenpairs_computed,
        };
        self.writer.write_json("eigenvalues.json", &doc)?;
        Ok(())
    }

    fn evolve(&mut self) -> Result<(), CliError> {
        let h = self.config.hamiltonian()?.expect("validated");
        let basis = self.config.basis()?;
        let w0 = self.initial_field()?;
        let traj = propagate(&w0, &h, &basis, &self.propagate_opts())?;
        for (k, frame) in traj.frames.iter().enumerate() {
            self.emit_field(&format!("frame_{k:04}"), frame)?;
        }
        let info = TrajectoryInfo {
            scheme: self.config.scheme(),
            steps: traj.steps,
            dt: traj.dt,
            times: traj.frames.iter().map(|f| f.time).collect(),
            masses: traj.frames.iter().map(WignerField::mass).collect(),
            max_mass_drift: traj.max_mass_drift,
            max_linear_residual: traj.max_linear_residual,
            kicks_applied: traj.kicks_applied,
        };
        self.writer.write_json("trajectory.json", &info)?;
        Ok(())
    }

    fn wigner(&mut self) -> Result<(), CliError> {
        let grid = self.config.grid()?.expect("validated");
        let hbar = self.hbar();
        let state = self.config.params.state.as_ref().expect("validated");
        let psi = state.wavefunction(&grid.q, hbar).expect("validated wavefunction state");
        let wt = wigner_transform(&psi, grid.q, hbar)?;
        self.emit_field("wigner", &wt.field)?;
        let info = WignerInfo {
            renormalized: wt.renormalized,
            input_norm: wt.input_norm,
            mass: wt.field.mass(),
            max_abs: wt.field.max_abs(),
            pure_state_bound: 1.0 / (std::f64::consts::PI * hbar),
            negativity_volume: wt.field.negativity_volume(),
        };
        self.writer.write_json("wigner.json", &info)?;
        Ok(())
    }

    fn demo_mra(&mut self) -> Result<(), CliError> {
        let basis = self.config.basis()?;
        let levels = self.config.levels;
        let signal = self.config.demo_signal().generate()?;
        let comps = mra_components(&signal, &basis, levels.coarse)?;
        let mut columns = vec!["x".to_string(), "signal".to_string(), format!("approx_{}", levels.coarse)];
        columns.extend((levels.coarse..levels.fine).map(|l| format!("detail_{l}")));
        let n = signal.len();
        let mut csv = columns.join(",");
        csv.push('\n');
        for i in 0..n {
            write!(csv, "{},{}", i as f64 / n as f64, signal[i]).unwrap();
            for c in &comps {
                write!(csv, ",{}", c[i]).unwrap();
            }
            csv.push('\n');
        }
        self.writer.write("mra.csv", csv.as_bytes())?;
        let tree = wavelet_packet_best_basis(&signal, &basis, levels.depth())?;
        let info = MraInfo {
            length: n,
            coarse_level: levels.coarse,
            fine_level: levels.fine,
            columns,
            component_energies: comps.iter().map(|c| c.iter().map(|v| v * v).sum()).collect(),
            best_basis: tree
                .selected
                .iter()
                .map(|&PacketNode { level, band }| PacketInfo {
                    level,
                    band,
                    frequency_interval: PacketNode { level, band }.frequency_interval(),
                })
                .collect(),
            best_basis_cost: tree.cost,
        };
        self.writer.write_json("mra.json", &info)?;
        Ok(())
    }

    fn compress(&mut self) -> Result<(), CliError> {
        let basis = self.config.basis()?;
        let p = &self.config.params;
        let spec = p.operator.clone().unwrap_or(OperatorSpec::Derivative { order: 1 });
        let kind = match spec {
            OperatorSpec::Derivative { order } => OperatorKind::Derivative(order),
            OperatorSpec::MultiplyByX => OperatorKind::MultiplyByX,
        };
        let axis = self.config.operator_axis();
        let dense = assemble_1d_operator(&kind, &basis, &axis)?;
        let levels = self.config.levels.depth();
        let eps = p.epsilon.unwrap_or(1e-8);
        let (compressed, stats) = to_nonstandard_form(&dense, &basis, levels)?.threshold_compress(eps)?;
        let samples = p.samples.unwrap_or(100);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let mut v: Vec<f64> = (0..axis.points).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            let approx = compressed.apply(&v)?;
            let exact = &dense * nalgebra::DVector::from_column_slice(&v);
            let err = approx.iter().zip(exact.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(err);
        }
        let info = CompressionInfo {
            operator: spec,
            levels,
            retained_fraction: stats.retained_fraction,
            retained_entries: compressed.nnz(),
            epsilon: stats.epsilon,
            dense_dim: stats.dense_dim,
            apply_error_estimate: worst,
            apply_error_bound: stats.max_apply_error_bound,
            samples,
        };
        self.writer.write_json("compression.json", &info)?;
        Ok(())
    }

    fn analyze(&mut self) -> Result<(), CliError> {
        let basis = self.config.basis()?;
        let thresholds = self.config.params.thresholds.unwrap_or_default();
        let depth = self.config.levels.depth();
        let w0 = self.initial_field()?;
        if self.config.params.t_end.is_some() {
            let h = self.config.hamiltonian()?.expect("validated");
            let traj = propagate(&w0, &h, &basis, &self.propagate_opts())?;
            let report = analyze_trajectory(&traj.frames, &basis, depth, &thresholds)?;
            self.emit_field("final", traj.last())?;
            self.writer.write_json("pattern_report.json", &report)?;
        } else {
            let report = analyze(&w0, &basis, depth, &thresholds)?;
            self.emit_field("field", &w0)?;
            self.writer.write_json("pattern_report.json", &report)?;
        }
        Ok(())
    }
}
