//! Run configuration: a TOML file whose every key is optional, validated on
//! load. Command-line flags override file values.

use serde::{Deserialize, Serialize};

use crate::analysis::{AnharmonicSettings, FlipMode, GateSettings, VarianceState};
use crate::error::{Error, Result};
use crate::gate::{pulse_train, ConditionThresholds};
use crate::trap::{calcium_coulomb_constant, TrapSpec, COMMENSURATE_EXPONENT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapConfig {
    pub exponent: f64,
    /// Coulomb constant in natural units; the ⁴⁰Ca⁺ value when absent.
    pub coulomb: Option<f64>,
    pub mass: f64,
    /// Confinement strength; chosen for ν_c = 1 when absent.
    pub stiffness: Option<f64>,
}

impl Default for TrapConfig {
    fn default() -> Self {
        Self { exponent: COMMENSURATE_EXPONENT, coulomb: None, mass: 1.0, stiffness: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    /// Effective Lamb-Dicke parameter; exclusive with `eta_single`.
    pub eta: Option<f64>,
    /// Single-pulse Lamb-Dicke parameter of a pulse train.
    pub eta_single: Option<f64>,
    pub n_pulses: u32,
    pub n_bar_c: f64,
    pub n_cycles: u32,
    pub flip: FlipMode,
    pub t1_fraction: f64,
    pub margin: f64,
    pub dims: Option<[usize; 2]>,
    pub drop_tol: f64,
    pub check_convergence: bool,
    pub convergence_tol: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        let g = GateSettings::default();
        Self {
            eta: None,
            eta_single: None,
            n_pulses: 1,
            n_bar_c: g.n_bar_c,
            n_cycles: g.n_cycles,
            flip: g.flip,
            t1_fraction: g.t1_fraction,
            margin: g.thresholds.margin,
            dims: None,
            drop_tol: g.drop_tol,
            check_convergence: false,
            convergence_tol: g.convergence_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub eta: Vec<f64>,
    pub n_bar_c: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { eta: vec![2.0, 4.0, 7.0], n_bar_c: vec![0.0, 0.5, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnharmonicConfig {
    pub enabled: bool,
    /// Highest Taylor order kept; 0 disables the correction.
    pub order: u32,
    pub quadrature_points: usize,
    pub variance_state: VarianceState,
    /// Factor applied to every coefficient.
    pub scale: f64,
    pub full_dynamics: bool,
}

impl Default for AnharmonicConfig {
    fn default() -> Self {
        let a = AnharmonicSettings::default();
        Self {
            enabled: true,
            order: a.order,
            quadrature_points: a.quadrature_points,
            variance_state: a.variance_state,
            scale: 1.0,
            full_dynamics: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeparationConfig {
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self { samples: 64, tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Directory for output files; standard output when absent.
    pub dir: Option<String>,
    pub format: OutputFormat,
    pub precision: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, format: OutputFormat::Csv, precision: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub trap: TrapConfig,
    pub gate: GateConfig,
    pub scan: ScanConfig,
    pub anharmonic: AnharmonicConfig,
    pub separation: SeparationConfig,
    pub output: OutputConfig,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::Config(format!("{name} must be nonnegative and finite, got {v}")));
    }
    Ok(())
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.trap.exponent > 1.0) || !self.trap.exponent.is_finite() {
            return Err(Error::Config(format!("trap.exponent must exceed 1, got {}", self.trap.exponent)));
        }
        positive("trap.mass", self.trap.mass)?;
        if let Some(c) = self.trap.coulomb {
            positive("trap.coulomb", c)?;
        }
        if let Some(k) = self.trap.stiffness {
            positive("trap.stiffness", k)?;
        }
        let g = &self.gate;
        if g.eta.is_some() && g.eta_single.is_some() {
            return Err(Error::Config("gate.eta and gate.eta_single are mutually exclusive".into()));
        }
        if let Some(e) = g.eta {
            nonnegative("gate.eta", e)?;
        }
        if let Some(e) = g.eta_single {
            nonnegative("gate.eta_single", e)?;
        }
        if g.n_pulses == 0 {
            return Err(Error::Config("gate.n_pulses must be at least 1".into()));
        }
        if g.eta_single.is_none() && g.n_pulses != 1 && g.eta.is_some() {
            return Err(Error::Config("gate.n_pulses needs gate.eta_single".into()));
        }
        nonnegative("gate.n_bar_c", g.n_bar_c)?;
        if g.n_cycles == 0 {
            return Err(Error::Config("gate.n_cycles must be at least 1".into()));
        }
        positive("gate.t1_fraction", g.t1_fraction)?;
        positive("gate.margin", g.margin)?;
        nonnegative("gate.drop_tol", g.drop_tol)?;
        positive("gate.convergence_tol", g.convergence_tol)?;
        if let Some([c, r]) = g.dims {
            if c < 2 || r < 2 {
                return Err(Error::Config(format!("gate.dims must be at least 2, got [{c}, {r}]")));
            }
        }
        for e in &self.scan.eta {
            nonnegative("scan.eta entry", *e)?;
        }
        for n in &self.scan.n_bar_c {
            nonnegative("scan.n_bar_c entry", *n)?;
        }
        let a = &self.anharmonic;
        if a.order != 0 && !(3..=6).contains(&a.order) {
            return Err(Error::Config(format!("anharmonic.order must be 0 or 3..=6, got {}", a.order)));
        }
        if a.quadrature_points < 64 {
            return Err(Error::Config("anharmonic.quadrature_points must be at least 64".into()));
        }
        if !a.scale.is_finite() {
            return Err(Error::Config("anharmonic.scale must be finite".into()));
        }
        if self.separation.samples < 2 {
            return Err(Error::Config("separation.samples must be at least 2".into()));
        }
        positive("separation.tolerance", self.separation.tolerance)?;
        if !(1..=17).contains(&self.output.precision) {
            return Err(Error::Config("output.precision must be in 1..=17".into()));
        }
        Ok(())
    }

    /// Effective Lamb-Dicke parameter, from a pulse train when configured.
    pub fn eta_effective(&self) -> Result<f64> {
        match (self.gate.eta, self.gate.eta_single) {
            (_, Some(single)) => pulse_train(single, self.gate.n_pulses),
            (Some(eta), None) => Ok(eta),
            (None, None) => Ok(GateSettings::default().eta),
        }
    }

    pub fn trap_spec(&self) -> Result<TrapSpec> {
        let t = &self.trap;
        let coulomb = t.coulomb.unwrap_or_else(calcium_coulomb_constant);
        let eta = self.eta_effective()?;
        match t.stiffness {
            Some(k) => TrapSpec::new(t.exponent, k, coulomb, t.mass, eta),
            None => TrapSpec::with_unit_com_frequency(t.exponent, coulomb, t.mass, eta),
        }
    }

    pub fn gate_settings(&self) -> Result<GateSettings> {
        let g = &self.gate;
        let a = &self.anharmonic;
        Ok(GateSettings {
            eta: self.eta_effective()?,
            n_pulses: g.n_pulses,
            n_bar_c: g.n_bar_c,
            n_cycles: g.n_cycles,
            flip: g.flip,
            t1_fraction: g.t1_fraction,
            thresholds: ConditionThresholds { margin: g.margin, ..ConditionThresholds::default() },
            dims: g.dims.map(|[c, r]| (c, r)),
            drop_tol: g.drop_tol,
            anharmonic: (a.enabled && a.order > 0).then_some(AnharmonicSettings {
                order: a.order,
                quadrature_points: a.quadrature_points,
                variance_state: a.variance_state,
                scale: a.scale,
                full_dynamics: a.full_dynamics,
            }),
            check_convergence: g.check_convergence,
            convergence_tol: g.convergence_tol,
        })
    }

    /// Cartesian product of the scan grids, η slowest.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        self.scan.eta.iter().flat_map(|&e| self.scan.n_bar_c.iter().map(move |&n| (e, n))).collect()
    }

    /// Short digest of everything that affects computed values.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        #[derive(Serialize)]
        struct Hashed<'a> {
            trap: &'a TrapConfig,
            gate: &'a GateConfig,
            anharmonic: &'a AnharmonicConfig,
            separation: &'a SeparationConfig,
            precision: usize,
        }
        let payload = serde_json::to_string(&Hashed {
            trap: &self.trap,
            gate: &self.gate,
            anharmonic: &self.anharmonic,
            separation: &self.separation,
            precision: self.output.precision,
        })
        .expect("config serializes");
        Sha256::digest(payload.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
