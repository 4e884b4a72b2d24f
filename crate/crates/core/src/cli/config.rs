use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::state::StateSpec;
use super::CliError;
use crate::compress::Axis;
use crate::galerkin::{Grid, Scheme, StationaryOptions};
use crate::pattern::Thresholds;
use crate::symbol::{Hamiltonian, Kick, PolySymbol};
use crate::wavelet::{wavelet_basis, DemoSignal, WaveletBasis, WaveletFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    SolveStationary,
    Evolve,
    WignerTransform,
    DemoMra,
    CompressOperator,
    Analyze,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::SolveStationary => "solve-stationary",
            Task::Evolve => "evolve",
            Task::WignerTransform => "wigner-transform",
            Task::DemoMra => "demo-mra",
            Task::CompressOperator => "compress-operator",
            Task::Analyze => "analyze",
        }
    }

    /// Keys of `params` this task reads.
    fn params(self) -> &'static [&'static str] {
        match self {
            Task::SolveStationary => &["n_modes", "solver"],
            Task::Evolve => &["state", "t_end", "dt", "scheme", "stride"],
            Task::WignerTransform => &["state"],
            Task::DemoMra => &["signal"],
            Task::CompressOperator => &["operator", "epsilon", "samples", "domain"],
            Task::Analyze => &["state", "t_end", "dt", "scheme", "stride", "thresholds"],
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `[i, j, coeff]` means `coeff · p^i q^j`.
pub type Term = (u32, u32, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KickConfig {
    pub period: f64,
    pub symbol: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub terms: Vec<Term>,
    pub hbar: f64,
    #[serde(default)]
    pub kicks: Vec<KickConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisConfig {
    pub family: WaveletFamily,
    pub genus: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelsConfig {
    pub coarse: usize,
    pub fine: usize,
}

impl LevelsConfig {
    /// Number of decomposition steps between the two levels.
    pub fn depth(&self) -> usize {
        self.fine - self.coarse
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub q: [f64; 2],
    pub p: [f64; 2],
    pub points: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Derivative { order: usize },
    MultiplyByX,
}

/// Task-specific parameters. Each task accepts only its own keys.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub n_modes: Option<usize>,
    pub solver: Option<StationaryOptions>,
    pub state: Option<StateSpec>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub scheme: Option<Scheme>,
    pub stride: Option<usize>,
    pub signal: Option<DemoSignal>,
    pub operator: Option<OperatorSpec>,
    pub epsilon: Option<f64>,
    pub samples: Option<usize>,
    pub domain: Option<[f64; 2]>,
    pub thresholds: Option<Thresholds>,
}

impl Params {
    fn present(&self) -> Vec<&'static str> {
        let flags = [
            ("n_modes", self.n_modes.is_some()),
            ("solver", self.solver.is_some()),
            ("state", self.state.is_some()),
            ("t_end", self.t_end.is_some()),
            ("dt", self.dt.is_some()),
            ("scheme", self.scheme.is_some()),
            ("stride", self.stride.is_some()),
            ("signal", self.signal.is_some()),
            ("operator", self.operator.is_some()),
            ("epsilon", self.epsilon.is_some()),
            ("samples", self.samples.is_some()),
            ("domain", self.domain.is_some()),
            ("thresholds", self.thresholds.is_some()),
        ];
        flags.into_iter().filter(|f| f.1).map(|f| f.0).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    F64,
    Json,
}

fn default_formats() -> BTreeSet<Format> {
    [Format::F64].into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Representations written for every field.
    #[serde(default = "default_formats")]
    pub formats: BTreeSet<Format>,
}

/// A declarative run: one task, its inputs and where to put the results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub hamiltonian: Option<HamiltonianConfig>,
    pub basis: BasisConfig,
    pub levels: LevelsConfig,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub params: Params,
    pub output: OutputConfig,
}

fn config_err(field: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::config(Some(field.into()), message)
}

fn positive(field: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(config_err(field, format!("must be positive and finite, got {x}"))),
        _ => Ok(()),
    }
}

fn symbol(terms: &[Term], field: &str) -> Result<PolySymbol, CliError> {
    for (k, &(i, j, c)) in terms.iter().enumerate() {
        if !c.is_finite() {
            return Err(config_err(format!("{field}[{k}]"), format!("coefficient must be finite, got {c}")));
        }
        if u64::from(i) + u64::from(j) > 16 {
            return Err(config_err(format!("{field}[{k}]"), format!("degree {} exceeds 16", u64::from(i) + u64::from(j))));
        }
    }
    Ok(PolySymbol::from_real_terms(terms))
}

impl RunConfig {
    /// Parses and validates a config. Every failure is a config error that
    /// names the offending field.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = (path != ".").then_some(path);
            CliError::config(field, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Checks everything that can be checked without running numerics.
    pub fn validate(&self) -> Result<(), CliError> {
        let allowed = self.task.params();
        if let Some(extra) = self.params.present().into_iter().find(|k| !allowed.contains(k)) {
            return Err(config_err(format!("params.{extra}"), format!("not used by task {}", self.task)));
        }
        self.basis()?;
        let LevelsConfig { coarse, fine } = self.levels;
        if coarse >= fine {
            return Err(config_err("levels.coarse", format!("must be below levels.fine = {fine}, got {coarse}")));
        }
        if fine > 20 {
            return Err(config_err("levels.fine", format!("must be at most 20, got {fine}")));
        }
        if self.output.formats.is_empty() {
            return Err(config_err("output.formats", "must name at least one of csv, f64, json"));
        }
        if let Some(g) = &self.grid {
            let grid = self.grid()?.expect("grid present");
            let top = grid.max_levels();
            if fine > top {
                return Err(config_err(
                    "levels.fine",
                    format!("grid points {:?} support at most level {top}, got {fine}", g.points),
                ));
            }
        }
        if let Some(h) = &self.hamiltonian {
            positive("hamiltonian.hbar", Some(h.hbar))?;
        }
        self.hamiltonian()?;
        let p = &self.params;
        positive("params.t_end", p.t_end)?;
        positive("params.dt", p.dt)?;
        positive("params.epsilon", p.epsilon)?;
        if p.stride == Some(0) {
            return Err(config_err("params.stride", "must be at least 1"));
        }
        if p.n_modes == Some(0) {
            return Err(config_err("params.n_modes", "must be at least 1"));
        }
        if p.samples == Some(0) {
            return Err(config_err("params.samples", "must be at least 1"));
        }
        if let Some(d) = p.domain {
            if !(d[0].is_finite() && d[1].is_finite() && d[1] > d[0]) {
                return Err(config_err("params.domain", format!("need finite min < max, got {d:?}")));
            }
        }
        if let Some(s) = &p.state {
            s.validate()?;
        }
        match self.task {
            Task::SolveStationary => {
                let h = self.require_hamiltonian()?;
                if h.is_kicked() {
                    return Err(config_err("hamiltonian.kicks", "stationary problems need a time-independent Hamiltonian"));
                }
                self.require_grid()?;
            }
            Task::Evolve => {
                self.require_hamiltonian()?;
                self.require_state()?;
                self.require(p.t_end, "params.t_end")?;
                self.require(p.dt, "params.dt")?;
                self.require_field_grid()?;
            }
            Task::WignerTransform => {
                self.require_hamiltonian()?;
                self.require_grid()?;
                if !self.require_state()?.has_wavefunction() {
                    return Err(config_err("params.state.kind", "wigner-transform needs a wavefunction state"));
                }
            }
            Task::DemoMra => {
                let len = self.demo_signal().length();
                if len != 1 << fine {
                    return Err(config_err("params.signal.length", format!("must equal 2^levels.fine = {}, got {len}", 1 << fine)));
                }
                self.demo_signal().validate().map_err(|e| config_err("params.signal", e.to_string()))?;
            }
            Task::CompressOperator => {
                if let Some(OperatorSpec::Derivative { order }) = p.operator {
                    if order == 0 {
                        return Err(config_err("params.operator.order", "must be at least 1"));
                    }
                }
            }
            Task::Analyze => {
                self.require_state()?;
                if p.t_end.is_some() || p.dt.is_some() {
                    self.require_hamiltonian()?;
                    self.require(p.t_end, "params.t_end")?;
                    self.require(p.dt, "params.dt")?;
                }
                self.require_field_grid()?;
            }
        }
        Ok(())
    }

    fn require<T: Copy>(&self, v: Option<T>, field: &str) -> Result<T, CliError> {
        v.ok_or_else(|| config_err(field, format!("required by task {}", self.task)))
    }

    fn require_hamiltonian(&self) -> Result<Hamiltonian, CliError> {
        self.hamiltonian()?.ok_or_else(|| config_err("hamiltonian", format!("required by task {}", self.task)))
    }

    fn require_grid(&self) -> Result<Grid, CliError> {
        self.grid()?.ok_or_else(|| config_err("grid", format!("required by task {}", self.task)))
    }

    fn require_state(&self) -> Result<&StateSpec, CliError> {
        self.params.state.as_ref().ok_or_else(|| config_err("params.state", format!("required by task {}", self.task)))
    }

    /// States read from a file carry their own grid; all others need `grid`.
    fn require_field_grid(&self) -> Result<(), CliError> {
        if !matches!(self.params.state, Some(StateSpec::Field { .. })) {
            self.require_grid()?;
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<WaveletBasis, CliError> {
        wavelet_basis(self.basis.family, self.basis.genus).map_err(|e| config_err("basis.genus", e.to_string()))
    }

    pub fn grid(&self) -> Result<Option<Grid>, CliError> {
        let Some(g) = &self.grid else { return Ok(None) };
        for (k, &n) in g.points.iter().enumerate() {
            if n < 4 || !n.is_power_of_two() {
                return Err(config_err(format!("grid.points[{k}]"), format!("must be a power of two and at least 4, got {n}")));
            }
        }
        for (name, r) in [("grid.q", g.q), ("grid.p", g.p)] {
            if !(r[0].is_finite() && r[1].is_finite() && r[1] > r[0]) {
                return Err(config_err(name, format!("need finite min < max, got {r:?}")));
            }
        }
        let grid = Grid::new((g.q[0], g.q[1]), (g.p[0], g.p[1]), (g.points[0], g.points[1]))
            .map_err(|e| config_err("grid", e.to_string()))?;
        Ok(Some(grid))
    }

    pub fn hamiltonian(&self) -> Result<Option<Hamiltonian>, CliError> {
        let Some(h) = &self.hamiltonian else { return Ok(None) };
        let base = symbol(&h.terms, "hamiltonian.terms")?;
        let mut kicks = Vec::with_capacity(h.kicks.len());
        for (k, kc) in h.kicks.iter().enumerate() {
            positive(&format!("hamiltonian.kicks[{k}].period"), Some(kc.period))?;
            let symbol = symbol(&kc.symbol, &format!("hamiltonian.kicks[{k}].symbol"))?;
            kicks.push(Kick { period: kc.period, symbol });
        }
        Hamiltonian::with_kicks(base, kicks, h.hbar)
            .map(Some)
            .map_err(|e| config_err("hamiltonian", e.to_string()))
    }

    /// The configured signal, or a Riemann–Weierstrass signal of length `2^fine`.
    pub fn demo_signal(&self) -> DemoSignal {
        self.params.signal.clone().unwrap_or_else(|| DemoSignal::riemann_weierstrass(1 << self.levels.fine))
    }

    /// Axis of the compressed operator: `params.domain` (default `[0, 1)`)
    /// with `2^fine` points.
    pub fn operator_axis(&self) -> Axis {
        let d = self.params.domain.unwrap_or([0.0, 1.0]);
        Axis::new(d[0], d[1], 1 << self.levels.fine).expect("validated domain")
    }

    pub fn scheme(&self) -> Scheme {
        self.params.scheme.unwrap_or_default()
    }
}
