//! Study configuration: flat `key = value` files with `#` comments.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use friedrichs_core::discretization::SchemeOptions;
use friedrichs_core::model::Stabilization;
use friedrichs_core::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelId {
    ScalarDar,
    VectorDar,
    Induction,
}

impl ModelId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::ScalarDar => "scalar-dar",
            ModelId::VectorDar => "vector-dar",
            ModelId::Induction => "induction",
        }
    }
}

impl FromStr for ModelId {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar-dar" | "scalar" => Ok(ModelId::ScalarDar),
            "vector-dar" | "vector" => Ok(ModelId::VectorDar),
            "induction" => Ok(ModelId::Induction),
            _ => bail!("unknown model `{s}` (expected scalar-dar, vector-dar or induction)"),
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where meshes come from. The refinement list indexes generated families
/// by subdivisions per axis and file lists by position.
#[derive(Clone, Debug, PartialEq)]
pub enum MeshFamily {
    Cart,
    Tet,
    /// Clipped Voronoi cells of jittered BCC seeds.
    Voronoi,
    Files(Vec<PathBuf>),
}

impl MeshFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MeshFamily::Cart => "cart",
            MeshFamily::Tet => "tet",
            MeshFamily::Voronoi => "voro",
            MeshFamily::Files(_) => "files",
        }
    }
}

impl FromStr for MeshFamily {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cart" => Ok(MeshFamily::Cart),
            "tet" | "simplicial" => Ok(MeshFamily::Tet),
            "voro" | "voronoi" => Ok(MeshFamily::Voronoi),
            _ => {
                let files: Vec<PathBuf> = split_list(s).map(PathBuf::from).collect();
                if files.is_empty() {
                    bail!("empty mesh family");
                }
                Ok(MeshFamily::Files(files))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SolverChoice {
    /// Sparse LU up to [`StudyConfig::direct_limit`] unknowns, BiCGSTAB above.
    #[default]
    Auto,
    Direct,
    Bicgstab,
}

impl FromStr for SolverChoice {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SolverChoice::Auto),
            "direct" | "lu" => Ok(SolverChoice::Direct),
            "bicgstab" | "iterative" => Ok(SolverChoice::Bicgstab),
            _ => bail!("unknown solver `{s}` (expected auto, direct or bicgstab)"),
        }
    }
}

pub fn parse_stabilizer(s: &str) -> Result<Stabilization> {
    match s {
        "paper" | "penalty" => Ok(Stabilization::Penalty),
        "upwind" => Ok(Stabilization::Upwind),
        _ => bail!("unknown stabilizer `{s}` (expected paper or upwind)"),
    }
}

pub fn stabilizer_name(s: Stabilization) -> &'static str {
    match s {
        Stabilization::Penalty => "paper",
        Stabilization::Upwind => "upwind",
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty())
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    split_list(s)
        .map(|t| t.parse::<T>().map_err(|e| anyhow!("`{t}`: {e}")))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub model: ModelId,
    pub mesh_family: MeshFamily,
    pub dim: usize,
    pub degrees: Vec<usize>,
    pub refinements: Vec<usize>,
    pub stabilizer: Stabilization,
    pub solver: SolverChoice,
    /// Largest system handed to the sparse LU under [`SolverChoice::Auto`].
    pub direct_limit: usize,
    pub tolerance: f64,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Seed displacement for the Voronoi family, relative to the spacing.
    pub jitter: f64,
    /// Random field pairs per identity check.
    pub pairs: usize,
    pub check_conservation: bool,
    /// Floor on the weight of the `h_T`-scaled jump term.
    pub jump_floor: f64,
    /// Quadrature exactness degree; the scheme default when unset.
    pub quad_degree: Option<usize>,
    pub rm: Vec<f64>,
    pub radius: f64,
    pub lambda: f64,
    pub sigma_mu: f64,
    pub b0: Vec3,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            model: ModelId::ScalarDar,
            mesh_family: MeshFamily::Tet,
            dim: 3,
            degrees: vec![0, 1],
            refinements: vec![2, 4, 8],
            stabilizer: Stabilization::Penalty,
            solver: SolverChoice::Auto,
            direct_limit: 45_000,
            tolerance: 1e-10,
            out: None,
            seed: 42,
            jitter: 0.1,
            pairs: 10,
            check_conservation: true,
            jump_floor: SchemeOptions::new(0).jump_floor,
            quad_degree: None,
            rm: vec![0.0, 0.1, 0.5],
            radius: 0.3,
            lambda: 100.0,
            sigma_mu: 1.0,
            b0: Vec3::new(1.0, 0.0, 0.0),
        }
    }
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => bail!("expected a boolean, found `{s}`"),
    }
}

fn num<T: FromStr>(v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| anyhow!("`{v}`: {e}"))
}

impl StudyConfig {
    /// Set one key; dashes and underscores in keys are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim().replace('_', "-").as_str() {
            "model" => self.model = v.parse()?,
            "mesh-family" | "mesh" => self.mesh_family = v.parse()?,
            "dim" | "dimension" => self.dim = num(v)?,
            "degrees" => self.degrees = parse_list(v)?,
            "refinements" => self.refinements = parse_list(v)?,
            "stabilizer" => self.stabilizer = parse_stabilizer(v)?,
            "solver" => self.solver = v.parse()?,
            "direct-limit" => self.direct_limit = num(v)?,
            "tolerance" => self.tolerance = num(v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "seed" => self.seed = num(v)?,
            "jitter" => self.jitter = num(v)?,
            "pairs" => self.pairs = num(v)?,
            "check-conservation" => self.check_conservation = parse_bool(v)?,
            "jump-floor" => self.jump_floor = num(v)?,
            "quad-degree" => self.quad_degree = Some(num(v)?),
            "rm" => self.rm = parse_list(v)?,
            "radius" => self.radius = num(v)?,
            "lambda" => self.lambda = num(v)?,
            "sigma-mu" => self.sigma_mu = num(v)?,
            "b0" => {
                let c: Vec<f64> = parse_list(v)?;
                if c.len() != 3 {
                    bail!("b0 needs three components");
                }
                self.b0 = Vec3::new(c[0], c[1], c[2]);
            }
            other => bail!("unknown key `{other}`"),
        }
        Ok(())
    }

    /// Apply a `key = value` text on top of the current values.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
            self.set(k, v).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = StudyConfig::default();
        c.merge_text(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_text(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.degrees.is_empty() {
            bail!("degree list is empty");
        }
        if self.refinements.is_empty() && !matches!(self.mesh_family, MeshFamily::Files(_)) {
            bail!("refinement list is empty");
        }
        if self.dim != 2 && self.dim != 3 {
            bail!("dimension must be 2 or 3");
        }
        if self.model != ModelId::ScalarDar && self.dim != 3 {
            bail!("{} is three-dimensional", self.model);
        }
        if self.mesh_family == MeshFamily::Voronoi && self.dim != 3 {
            bail!("the Voronoi family is three-dimensional");
        }
        if self.refinements.contains(&0) {
            bail!("refinements must be positive");
        }
        if let MeshFamily::Files(f) = &self.mesh_family {
            if let Some(&r) = self.refinements.iter().find(|&&r| r > f.len()) {
                bail!("refinement {r} exceeds the {} listed mesh files", f.len());
            }
        }
        if self.model == ModelId::Induction {
            if self.rm.is_empty() {
                bail!("Rm list is empty");
            }
            if !(self.sigma_mu > 0.0 && self.lambda > 0.0 && self.radius > 0.0 && self.radius < 0.5) {
                bail!("induction needs σμ > 0, λ > 0 and 0 < R < 1/2");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = StudyConfig::from_text(
            "# study\nmodel = vector-dar\nmesh_family = cart  # trailing\ndegrees = 0, 2\nrefinements = 1 2\nstabilizer = upwind\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(c.model, ModelId::VectorDar);
        assert_eq!(c.mesh_family, MeshFamily::Cart);
        assert_eq!(c.degrees, vec![0, 2]);
        assert_eq!(c.refinements, vec![1, 2]);
        assert_eq!(c.stabilizer, Stabilization::Upwind);
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(StudyConfig::from_text("degrees =").is_err());
        assert!(StudyConfig::from_text("colour = red").is_err());
        assert!(StudyConfig::from_text("model").is_err());
        assert!(StudyConfig::from_text("solver = cholesky").is_err());
    }

    #[test]
    fn file_family_is_a_list() {
        let c = StudyConfig::from_text("mesh-family = a.mesh, b.mesh\nrefinements = 1,2").unwrap();
        assert_eq!(c.mesh_family, MeshFamily::Files(vec!["a.mesh".into(), "b.mesh".into()]));
        assert!(StudyConfig::from_text("mesh-family = a.mesh\nrefinements = 2").is_err());
    }
}
