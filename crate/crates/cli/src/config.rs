//! TOML run configuration.
//!
//! ```toml
//! equation = "left"          # complex | left | right
//! hbar = 1.0
//! mass = 1.0
//! cos_omega0 = 1.0           # or "aligned"
//! branch = -1
//! root_sign = 1
//!
//! [energy]
//! e0 = 0.0
//! e1 = 3.0
//!
//! [[regions]]
//! v0 = 1.0
//! w0 = 2.23606797749979
//!
//! [sweep]
//! parameter = "energy.e1"
//! from = 3.0
//! to = 4.0
//! steps = 5
//! ```

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context};
use qhparticle_core::scattering::{MatchingPhases, StepPotential};
use qhparticle_core::{Complex, ComplexEnergy, Domain, PhysicalConstants, QuaternionicPotential, Sign};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationKind {
    Complex,
    Left,
    Right,
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquationKind::Complex => "complex",
            EquationKind::Left => "left",
            EquationKind::Right => "right",
        })
    }
}

/// `cos(Omega0)` as a number, or `"aligned"` to pick `+/-1` from the sign
/// the dispersion relation requires.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Orientation {
    Fixed(f64),
    Named(OrientationName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationName {
    Aligned,
}

impl Default for Orientation {
    fn default() -> Self {
        Orientation::Fixed(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    #[serde(default)]
    pub v0: f64,
    #[serde(default)]
    pub v1: f64,
    #[serde(default)]
    pub w0: f64,
    #[serde(default)]
    pub w1: f64,
}

impl RegionConfig {
    pub fn potential(&self) -> QuaternionicPotential {
        QuaternionicPotential::new(self.v0, self.v1, self.w0, self.w1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyConfig {
    #[serde(default)]
    pub e0: f64,
    #[serde(default)]
    pub e1: f64,
}

impl EnergyConfig {
    pub fn energy(&self) -> ComplexEnergy {
        ComplexEnergy::new(self.e0, self.e1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasesConfig {
    #[serde(default)]
    pub phi0: f64,
    #[serde(default)]
    pub xi0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub a: f64,
    pub b: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { a: 0.0, b: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepConfig {
    /// Parses `name=from:to:steps`.
    pub fn parse(spec: &str) -> anyhow::Result<Self> {
        let (name, range) = spec
            .split_once('=')
            .with_context(|| format!("sweep `{spec}`: expected name=from:to:steps"))?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            bail!("sweep `{spec}`: expected name=from:to:steps");
        }
        Ok(Self {
            parameter: name.trim().to_string(),
            from: parts[0]
                .trim()
                .parse()
                .with_context(|| format!("sweep `{spec}`: bad `from`"))?,
            to: parts[1]
                .trim()
                .parse()
                .with_context(|| format!("sweep `{spec}`: bad `to`"))?,
            steps: parts[2]
                .trim()
                .parse()
                .with_context(|| format!("sweep `{spec}`: bad `steps`"))?,
        })
    }
}

/// Amplitudes as `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeConfig {
    /// `A0` of the incident (or only) wave.
    #[serde(default = "one")]
    pub a0: [f64; 2],
    /// `j`-component weights of regions I and II for non-interacting
    /// scattering.
    #[serde(default = "one")]
    pub a_cal: [f64; 2],
    #[serde(default = "one")]
    pub b_cal: [f64; 2],
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

impl Default for AmplitudeConfig {
    fn default() -> Self {
        Self {
            a0: one(),
            a_cal: one(),
            b_cal: one(),
        }
    }
}

pub fn complex(v: [f64; 2]) -> Complex {
    Complex::new(v[0], v[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Multiplies every wave number before the oracle checks; anything but 1
    /// is a deliberately inconsistent fixture.
    #[serde(default = "unit_scale")]
    pub k_scale: f64,
}

fn unit_scale() -> f64 {
    1.0
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { k_scale: 1.0 }
    }
}

fn default_hbar() -> f64 {
    1.0
}

fn default_sign() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: EquationKind,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default = "default_hbar")]
    pub mass: f64,
    #[serde(default)]
    pub cos_omega0: Orientation,
    #[serde(default = "default_sign")]
    pub branch: f64,
    /// Branch of region II in scattering; defaults to `branch`.
    pub branch_ii: Option<f64>,
    #[serde(default = "default_sign")]
    pub root_sign: f64,
    #[serde(default)]
    pub energy: EnergyConfig,
    /// Energy of the `j` component for the non-interacting left equation.
    pub energy_cal: Option<EnergyConfig>,
    pub regions: Vec<RegionConfig>,
    #[serde(default)]
    pub phases: PhasesConfig,
    #[serde(default)]
    pub domain: DomainConfig,
    #[serde(default)]
    pub amplitudes: AmplitudeConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub verify: VerifyConfig,
}

/// Names accepted by `--sweep` and `[sweep] parameter`.
pub const SWEEP_PARAMETERS: &[&str] = &[
    "hbar",
    "mass",
    "cos_omega0",
    "energy.e0",
    "energy.e1",
    "energy_cal.e0",
    "energy_cal.e1",
    "regions.0.v0",
    "regions.0.v1",
    "regions.0.w0",
    "regions.0.w1",
    "regions.1.v0",
    "regions.1.v1",
    "regions.1.w0",
    "regions.1.w1",
    "phases.phi0",
    "phases.xi0",
    "domain.a",
    "domain.b",
];

fn sign_field(name: &str, v: f64) -> anyhow::Result<Sign> {
    Sign::from_f64(v).with_context(|| format!("`{name}` must be 1 or -1, got {v}"))
}

impl RunConfig {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.constants()?;
        if self.regions.is_empty() || self.regions.len() > 2 {
            bail!("`regions` must list 1 or 2 regions, got {}", self.regions.len());
        }
        sign_field("branch", self.branch)?;
        sign_field("root_sign", self.root_sign)?;
        if let Some(b) = self.branch_ii {
            sign_field("branch_ii", b)?;
        }
        if let Orientation::Fixed(c) = self.cos_omega0 {
            if !(-1.0..=1.0).contains(&c) {
                bail!("`cos_omega0` must lie in [-1, 1], got {c}");
            }
        }
        Domain::new(self.domain.a, self.domain.b).context("`domain`")?;
        if !self.verify.k_scale.is_finite() {
            bail!("`verify.k_scale` must be finite");
        }
        if let Some(s) = &self.sweep {
            if s.steps < 1 {
                bail!("`sweep.steps` must be at least 1");
            }
            if !SWEEP_PARAMETERS.contains(&s.parameter.as_str()) {
                bail!(
                    "`sweep.parameter` = `{}` is not one of: {}",
                    s.parameter,
                    SWEEP_PARAMETERS.join(", ")
                );
            }
            if s.parameter.starts_with("regions.1") && self.regions.len() < 2 {
                bail!("`sweep.parameter` = `{}` needs two regions", s.parameter);
            }
        }
        Ok(())
    }

    pub fn constants(&self) -> anyhow::Result<PhysicalConstants> {
        PhysicalConstants::new(self.hbar, self.mass).context("`hbar` and `mass` must be positive")
    }

    pub fn branch(&self) -> Sign {
        Sign::from_f64(self.branch).unwrap_or_default()
    }

    pub fn branch_ii(&self) -> Sign {
        self.branch_ii.and_then(Sign::from_f64).unwrap_or(self.branch())
    }

    pub fn root_sign(&self) -> Sign {
        Sign::from_f64(self.root_sign).unwrap_or_default()
    }

    pub fn energy_cal(&self) -> ComplexEnergy {
        self.energy_cal.unwrap_or(self.energy).energy()
    }

    pub fn domain(&self) -> anyhow::Result<Domain> {
        Ok(Domain::new(self.domain.a, self.domain.b)?)
    }

    pub fn phases(&self) -> MatchingPhases {
        MatchingPhases::new(self.phases.phi0, self.phases.xi0)
    }

    pub fn potential(&self) -> QuaternionicPotential {
        self.regions[0].potential()
    }

    pub fn step(&self) -> anyhow::Result<StepPotential> {
        if self.regions.len() != 2 {
            bail!("scattering needs exactly 2 `regions`, got {}", self.regions.len());
        }
        Ok(StepPotential::new(
            self.regions[0].potential(),
            self.regions[1].potential(),
        ))
    }

    /// Copy with `parameter` set to `value`.
    pub fn with_parameter(&self, parameter: &str, value: f64) -> anyhow::Result<Self> {
        let mut c = self.clone();
        match parameter {
            "hbar" => c.hbar = value,
            "mass" => c.mass = value,
            "cos_omega0" => c.cos_omega0 = Orientation::Fixed(value),
            "energy.e0" => c.energy.e0 = value,
            "energy.e1" => c.energy.e1 = value,
            "energy_cal.e0" => c.energy_cal.get_or_insert(self.energy).e0 = value,
            "energy_cal.e1" => c.energy_cal.get_or_insert(self.energy).e1 = value,
            "phases.phi0" => c.phases.phi0 = value,
            "phases.xi0" => c.phases.xi0 = value,
            "domain.a" => c.domain.a = value,
            "domain.b" => c.domain.b = value,
            other => {
                let rest = other
                    .strip_prefix("regions.")
                    .with_context(|| format!("unknown sweep parameter `{other}`"))?;
                let (idx, field) = rest
                    .split_once('.')
                    .with_context(|| format!("unknown sweep parameter `{other}`"))?;
                let idx: usize = idx
                    .parse()
                    .with_context(|| format!("unknown sweep parameter `{other}`"))?;
                let region = c
                    .regions
                    .get_mut(idx)
                    .with_context(|| format!("sweep parameter `{other}`: no region {idx}"))?;
                match field {
                    "v0" => region.v0 = value,
                    "v1" => region.v1 = value,
                    "w0" => region.w0 = value,
                    "w1" => region.w1 = value,
                    _ => bail!("unknown sweep parameter `{other}`"),
                }
            }
        }
        c.validate()?;
        Ok(c)
    }
}
