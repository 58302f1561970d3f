//! Experiment sweeps over the θ-parameterized product-state family with
//! optional noise, and their serialization.
//!
//! A sweep is deterministic given its base seed: rotation angles come from
//! the stream "angles", the noise draw for grid point `i`, trial `t` from
//! the stream "noise/i/t". Identical configs therefore produce
//! byte-identical output files.

use std::fmt;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::ensembles::{mix_noise, random_angles, theta_family_on, theta_qubit, SeededSource};
use crate::error::{Error, Result};
use crate::games::{
    bipartite_report, tripartite_report, BoundVariant, GameInstance, GameKind, RotationEnsemble,
};
use crate::linalg::CMatrix;
use crate::qstate::{tensor, DensityMatrix, Generator, PureState, SubsystemLayout};

const GAP_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Uniform,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AngleSource {
    Random,
    Explicit(Vec<f64>),
}

/// Generator preset or an explicit Hermitian matrix given as [re, im] pairs.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    PauliX,
    PauliZ,
    Explicit(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoisePlacement {
    /// Noise mixed into each single-party factor, then tensored: the state
    /// stays a product.
    BeforeTensor,
    /// Noise mixed into the tensored state: generically non-product.
    AfterTensor,
}

impl NoisePlacement {
    pub fn as_str(&self) -> &'static str {
        match self {
            NoisePlacement::BeforeTensor => "before",
            NoisePlacement::AfterTensor => "after",
        }
    }
}

impl std::str::FromStr for NoisePlacement {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "before" => Ok(NoisePlacement::BeforeTensor),
            "after" => Ok(NoisePlacement::AfterTensor),
            other => Err(Error::Config(format!(
                "noise placement must be `before` or `after`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub game: GameKind,
    /// (A, B1, B2) dimensions for the tripartite game, (A, B) for the
    /// bipartite one. The θ family needs every dimension to be 1 or 2.
    pub dims: Vec<usize>,
    pub num_rotations: usize,
    pub distribution: Distribution,
    pub angles: AngleSource,
    pub generator: GeneratorSpec,
    pub theta_start: f64,
    pub theta_stop: f64,
    pub theta_steps: usize,
    pub noise_eps: f64,
    pub noise_placement: NoisePlacement,
    pub trials: usize,
    pub seed: u64,
}

impl SweepConfig {
    /// Rejects invalid fields by name before any computation starts.
    pub fn validate(&self) -> Result<()> {
        let expected_dims = match self.game {
            GameKind::Tripartite => 3,
            GameKind::Bipartite => 2,
        };
        if self.dims.len() != expected_dims {
            return Err(Error::Config(format!(
                "dims: {} game needs {expected_dims} dimensions, got {}",
                self.game.as_str(),
                self.dims.len()
            )));
        }
        if self.dims.iter().any(|&d| d < 1) {
            return Err(Error::Config("dims: every dimension must be >= 1".into()));
        }
        if self.dims.iter().any(|&d| d > 2) {
            return Err(Error::Config(
                "dims: the theta state family is qubit-based; dimensions must be 1 or 2".into(),
            ));
        }
        if self.num_rotations < 1 {
            return Err(Error::Config("num-rotations: need at least one".into()));
        }
        if let Distribution::Explicit(p) = &self.distribution {
            if p.len() != self.num_rotations {
                return Err(Error::Config(format!(
                    "dist: {} probabilities for {} rotations",
                    p.len(),
                    self.num_rotations
                )));
            }
            if p.iter().any(|&x| x < 0.0) {
                return Err(Error::Config("dist: probabilities must be >= 0".into()));
            }
            let total: f64 = p.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!("dist: probabilities sum to {total}")));
            }
        }
        if let AngleSource::Explicit(a) = &self.angles {
            if a.len() != self.num_rotations {
                return Err(Error::Config(format!(
                    "angles: {} angles for {} rotations",
                    a.len(),
                    self.num_rotations
                )));
            }
        }
        let generator = self.generator()?;
        if generator.dim() != self.dims[0] {
            return Err(Error::Config(format!(
                "generator: dimension {} does not match A dimension {}",
                generator.dim(),
                self.dims[0]
            )));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.theta_start)
            || !(0.0..=std::f64::consts::PI).contains(&self.theta_stop)
            || self.theta_start > self.theta_stop
        {
            return Err(Error::Config(
                "theta grid: need 0 <= start <= stop <= pi".into(),
            ));
        }
        if self.theta_steps < 1 {
            return Err(Error::Config("theta-steps: need at least one".into()));
        }
        if !(0.0..=1.0).contains(&self.noise_eps) {
            return Err(Error::Config("noise-eps: must lie in [0, 1]".into()));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials: need at least one per point".into()));
        }
        Ok(())
    }

    pub fn generator(&self) -> Result<Generator> {
        match &self.generator {
            GeneratorSpec::PauliX => {
                if self.dims[0] != 2 {
                    return Err(Error::Config(
                        "generator: pauli-x needs a qubit A".into(),
                    ));
                }
                Ok(Generator::pauli_x("A"))
            }
            GeneratorSpec::PauliZ => {
                if self.dims[0] != 2 {
                    return Err(Error::Config(
                        "generator: pauli-z needs a qubit A".into(),
                    ));
                }
                Ok(Generator::pauli_z("A"))
            }
            GeneratorSpec::Explicit(rows) => {
                let g = parse_complex_matrix(rows)?;
                Generator::new("A", g)
            }
        }
    }

    pub fn layout(&self) -> Result<SubsystemLayout> {
        let labels: Vec<&str> = match self.game {
            GameKind::Tripartite => vec!["A", "B1", "B2"],
            GameKind::Bipartite => vec!["A", "B"],
        };
        SubsystemLayout::new(labels.into_iter().zip(self.dims.iter().copied()))
    }

    pub fn theta_grid(&self) -> Vec<f64> {
        if self.theta_steps == 1 {
            return vec![self.theta_start];
        }
        let step = (self.theta_stop - self.theta_start) / (self.theta_steps - 1) as f64;
        (0..self.theta_steps)
            .map(|i| self.theta_start + i as f64 * step)
            .collect()
    }

    fn resolve_angles(&self) -> Result<Vec<f64>> {
        match &self.angles {
            AngleSource::Explicit(a) => Ok(a.clone()),
            AngleSource::Random => {
                let mut src = SeededSource::new(self.seed, "angles");
                random_angles(self.num_rotations, &mut src)
            }
        }
    }

    fn ensemble(&self, angles: Vec<f64>) -> Result<RotationEnsemble> {
        match &self.distribution {
            Distribution::Uniform => RotationEnsemble::uniform(angles),
            Distribution::Explicit(p) => RotationEnsemble::new(angles, p.clone()),
        }
    }

    fn is_uniform_dist(&self) -> bool {
        match &self.distribution {
            Distribution::Uniform => true,
            Distribution::Explicit(p) => {
                let q = 1.0 / p.len() as f64;
                p.iter().all(|&x| (x - q).abs() <= 1e-12)
            }
        }
    }

    fn state_at(&self, theta: f64, point: usize, trial: usize) -> Result<DensityMatrix> {
        let layout = self.layout()?;
        if self.noise_eps == 0.0 {
            return theta_family_on(theta, &layout);
        }
        let mut source = SeededSource::new(self.seed, &format!("noise/{point}/{trial}"));
        match self.noise_placement {
            NoisePlacement::AfterTensor => {
                let base = theta_family_on(theta, &layout)?;
                mix_noise(&base, self.noise_eps, &mut source)
            }
            NoisePlacement::BeforeTensor => {
                let qubit = theta_qubit(theta)?;
                let mut factors = Vec::new();
                for (label, dim) in layout.parts() {
                    let part_layout = SubsystemLayout::new([(label.clone(), *dim)])?;
                    let factor = if *dim == 1 {
                        DensityMatrix::maximally_mixed(part_layout)
                    } else {
                        let pure =
                            PureState::new(part_layout, qubit.clone())?.to_density();
                        mix_noise(&pure, self.noise_eps, &mut source)?
                    };
                    factors.push(factor);
                }
                let refs: Vec<&DensityMatrix> = factors.iter().collect();
                tensor(&refs)
            }
        }
    }

    /// The bound variants every row of this sweep reports, in column order.
    /// At most one baseline column is emitted; the special trivial-B1 bound
    /// dominates the log|R| one whenever both hypotheses hold.
    pub fn variants(&self) -> Vec<BoundVariant> {
        match self.game {
            GameKind::Tripartite => {
                let mut v = vec![
                    BoundVariant::Thm1,
                    BoundVariant::Thm1First,
                    BoundVariant::Thm1Second,
                ];
                if self.dims[1] == 1 {
                    v.push(BoundVariant::ColesBipartiteSpecial);
                } else if self.is_uniform_dist() {
                    v.push(BoundVariant::ColesTripartite);
                }
                v
            }
            GameKind::Bipartite => vec![BoundVariant::Thm2],
        }
    }

    pub fn term_names(&self) -> Vec<&'static str> {
        match self.game {
            GameKind::Tripartite => vec![
                "s_r_given_ab1_kappa",
                "s_a_given_b2_omega",
                "s_r_kappa",
                "d_kappa_ab1_omega_ab1",
                "i_a_b1_omega",
                "i_b1_b2_rho",
                "s_a_given_b1b2_rho",
            ],
            GameKind::Bipartite => vec![
                "s_r_given_ab_kappa",
                "s_a_given_b_omega",
                "s_r_kappa",
                "d_kappa_a_omega_a",
                "s_a_given_b_rho",
            ],
        }
    }
}

fn parse_complex_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(
            "generator: matrix must be square and non-empty".into(),
        ));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// One grid point: term and bound means over trials, worst-case gaps.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub theta: f64,
    pub lhs: f64,
    pub rhs: Vec<(BoundVariant, f64)>,
    pub gaps: Vec<(BoundVariant, f64)>,
    pub terms: Vec<(&'static str, f64)>,
}

impl SweepRow {
    pub fn rhs(&self, v: BoundVariant) -> Option<f64> {
        self.rhs.iter().find(|(w, _)| *w == v).map(|&(_, x)| x)
    }

    pub fn gap(&self, v: BoundVariant) -> Option<f64> {
        self.gaps.iter().find(|(w, _)| *w == v).map(|&(_, x)| x)
    }
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub kind: GameKind,
    pub variants: Vec<BoundVariant>,
    pub term_names: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
}

/// Runs the sweep: one row per grid point, trials averaged within a point
/// (means of terms and bounds, worst-case gaps). Deterministic given the
/// base seed.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    let angles = config.resolve_angles()?;
    let generator = config.generator()?;
    let variants = config.variants();
    let term_names = config.term_names();

    let mut rows = Vec::with_capacity(config.theta_steps);
    for (point, &theta) in config.theta_grid().iter().enumerate() {
        let mut lhs_mean = 0.0;
        let mut rhs_mean = vec![0.0; variants.len()];
        let mut gap_min = vec![f64::INFINITY; variants.len()];
        let mut term_mean = vec![0.0; term_names.len()];
        for trial in 0..config.trials {
            let rho = config.state_at(theta, point, trial)?;
            let game = GameInstance::new(rho, generator.clone(), config.ensemble(angles.clone())?)?;
            let report = match config.game {
                GameKind::Tripartite => tripartite_report(&game)?,
                GameKind::Bipartite => bipartite_report(&game)?,
            };
            lhs_mean += report.lhs;
            for (i, &v) in variants.iter().enumerate() {
                let rhs = report.rhs(v).ok_or_else(|| {
                    Error::Config(format!("bound variant {} missing from report", v.key()))
                })?;
                rhs_mean[i] += rhs;
                gap_min[i] = gap_min[i].min(report.lhs - rhs);
            }
            for (i, name) in term_names.iter().enumerate() {
                term_mean[i] += report.term(name).unwrap_or(f64::NAN);
            }
        }
        let t = config.trials as f64;
        rows.push(SweepRow {
            theta,
            lhs: lhs_mean / t,
            rhs: variants
                .iter()
                .zip(&rhs_mean)
                .map(|(&v, &x)| (v, x / t))
                .collect(),
            gaps: variants
                .iter()
                .zip(&gap_min)
                .map(|(&v, &g)| (v, g))
                .collect(),
            terms: term_names
                .iter()
                .zip(&term_mean)
                .map(|(&n, &x)| (n, x / t))
                .collect(),
        });
    }
    Ok(SweepTable {
        kind: config.game,
        variants,
        term_names,
        rows,
    })
}

/// Named built-in configurations for the reference sweeps.
pub fn preset(name: &str) -> Result<SweepConfig> {
    let base = SweepConfig {
        game: GameKind::Tripartite,
        dims: vec![2, 1, 2],
        num_rotations: 6,
        distribution: Distribution::Uniform,
        angles: AngleSource::Random,
        generator: GeneratorSpec::PauliX,
        theta_start: 0.0,
        theta_stop: std::f64::consts::PI,
        theta_steps: 50,
        noise_eps: 0.0,
        noise_placement: NoisePlacement::AfterTensor,
        trials: 1,
        seed: DEFAULT_SEED,
    };
    match name {
        // Pure product state, trivial B1: the main bound is tight everywhere.
        "fig3a" => Ok(base),
        // Mixed non-product state, trivial B1.
        "fig3b" => Ok(SweepConfig {
            noise_eps: 0.1,
            ..base
        }),
        // Split memory |B1| = |B2| = 2 with noise; compared against log|R|.
        "fig4" => Ok(SweepConfig {
            dims: vec![2, 2, 2],
            noise_eps: 0.1,
            ..base
        }),
        // Bipartite game with noise.
        "fig5" => Ok(SweepConfig {
            game: GameKind::Bipartite,
            dims: vec![2, 2],
            noise_eps: 0.1,
            ..base
        }),
        other => Err(Error::Config(format!(
            "unknown preset `{other}` (expected one of {})",
            preset_names().join(", ")
        ))),
    }
}

pub fn preset_names() -> Vec<&'static str> {
    vec!["fig3a", "fig3b", "fig4", "fig5"]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!(
                "format must be `csv` or `json`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Column key of a variant; both baselines share the `coles` column.
fn column_key(v: BoundVariant) -> &'static str {
    match v {
        BoundVariant::Thm1 => "thm1",
        BoundVariant::Thm1First => "thm1_first",
        BoundVariant::Thm1Second => "thm1_second",
        BoundVariant::ColesTripartite | BoundVariant::ColesBipartiteSpecial => "coles",
        BoundVariant::Thm2 => "thm2",
    }
}

/// 12 significant digits; exceeds every tolerance used here while keeping
/// the files diff-able.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

fn validate_rows(table: &SweepTable) -> Result<()> {
    for row in &table.rows {
        for &(v, gap) in &row.gaps {
            if gap < -GAP_TOL {
                return Err(Error::BoundViolated {
                    context: format!("sweep row theta={} variant {}", row.theta, v.key()),
                    gap,
                    tolerance: GAP_TOL,
                });
            }
        }
    }
    Ok(())
}

/// Writes the table. Every row is re-checked against the gap invariant
/// before any output is produced.
pub fn serialize(table: &SweepTable, format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    validate_rows(table)?;
    match format {
        OutputFormat::Csv => write_csv(table, out),
        OutputFormat::Json => write_json(table, out),
    }
}

pub fn serialize_to_path(table: &SweepTable, format: OutputFormat, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    serialize(table, format, &mut file)
}

fn header_keys(table: &SweepTable) -> Vec<String> {
    let mut keys = vec!["theta".to_string(), "lhs".to_string()];
    for &v in &table.variants {
        keys.push(format!("rhs_{}", column_key(v)));
    }
    for &v in &table.variants {
        keys.push(format!("gap_{}", column_key(v)));
    }
    for name in &table.term_names {
        keys.push(name.to_string());
    }
    keys
}

fn row_values(row: &SweepRow) -> Vec<f64> {
    let mut values = vec![row.theta, row.lhs];
    values.extend(row.rhs.iter().map(|&(_, x)| x));
    values.extend(row.gaps.iter().map(|&(_, x)| x));
    values.extend(row.terms.iter().map(|&(_, x)| x));
    values
}

fn write_csv(table: &SweepTable, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{}", header_keys(table).join(","))?;
    for row in &table.rows {
        let line: Vec<String> = row_values(row).iter().map(|&x| format_value(x)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

fn write_json(table: &SweepTable, out: &mut dyn Write) -> Result<()> {
    let keys = header_keys(table);
    writeln!(out, "[")?;
    for (i, row) in table.rows.iter().enumerate() {
        let fields: Vec<String> = keys
            .iter()
            .zip(row_values(row))
            .map(|(k, x)| format!("\"{k}\": {}", format_value(x)))
            .collect();
        let comma = if i + 1 < table.rows.len() { "," } else { "" };
        writeln!(out, "  {{{}}}{comma}", fields.join(", "))?;
    }
    writeln!(out, "]")?;
    Ok(())
}
