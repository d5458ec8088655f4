use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::assembly::Discretization;
use super::mesh::{side_tag, Point, TriMesh};
use super::solver::SymbolicCache;
use crate::error::{Error, Result};

/// Boundary or volume data: a constant or a function of position and time.
#[derive(Clone)]
pub enum Data<T> {
    Constant(T),
    Field(Arc<dyn Fn(Point, f64) -> T + Send + Sync>),
}

impl<T: Copy> Data<T> {
    pub fn at(&self, x: Point, t: f64) -> T {
        match self {
            Data::Constant(v) => *v,
            Data::Field(f) => f(x, t),
        }
    }

    pub fn field(f: impl Fn(Point, f64) -> T + Send + Sync + 'static) -> Self {
        Data::Field(Arc::new(f))
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Data::Constant(_))
    }
}

impl<T: fmt::Debug> fmt::Debug for Data<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Data::Constant(v) => write!(f, "Constant({v:?})"),
            Data::Field(_) => write!(f, "Field(..)"),
        }
    }
}

/// Which displacement components an edge constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// Both components.
    Clamped,
    /// u·n only (axis-aligned edges).
    FixNormal,
    /// u·τ only (axis-aligned edges).
    FixTangential,
}

#[derive(Clone, Debug)]
pub struct DisplacementBc {
    pub tag: String,
    pub kind: Constraint,
    pub value: Data<[f64; 2]>,
}

#[derive(Clone, Debug)]
pub struct PressureBc {
    pub tag: String,
    pub value: Data<f64>,
}

#[derive(Clone, Debug)]
pub struct Traction {
    pub tag: String,
    /// Total-stress traction (σ - αpI)n.
    pub value: Data<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    pub at: Point,
    pub magnitude: f64,
}

/// A deterministic Biot problem up to its coefficients.
#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    disc: Arc<Discretization>,
    pub displacement: Vec<DisplacementBc>,
    pub pressure: Vec<PressureBc>,
    pub traction: Vec<Traction>,
    pub point_sources: Vec<PointSource>,
    pub body_force: Option<Data<[f64; 2]>>,
    pub source: Option<Data<f64>>,
    /// φ₀, the initial fluid content.
    pub initial_fluid_content: Option<Data<f64>>,
    pub t_final: f64,
    pub steps: usize,
    /// Adds ∫p = 0 through a Lagrange multiplier.
    pub zero_mean_pressure: bool,
    /// Removes rigid motions (two translations, one rotation) through multipliers.
    pub rigid_motion: bool,
    pub(crate) symbolic: Mutex<SymbolicCache>,
}

impl Clone for Scenario {
    fn clone(&self) -> Self {
        Scenario {
            name: self.name.clone(),
            disc: self.disc.clone(),
            displacement: self.displacement.clone(),
            pressure: self.pressure.clone(),
            traction: self.traction.clone(),
            point_sources: self.point_sources.clone(),
            body_force: self.body_force.clone(),
            source: self.source.clone(),
            initial_fluid_content: self.initial_fluid_content.clone(),
            t_final: self.t_final,
            steps: self.steps,
            zero_mean_pressure: self.zero_mean_pressure,
            rigid_motion: self.rigid_motion,
            symbolic: Mutex::new(SymbolicCache::default()),
        }
    }
}

impl Scenario {
    /// Empty problem on `mesh`: no data, natural boundary conditions everywhere.
    pub fn new(name: &str, mesh: TriMesh, t_final: f64, steps: usize) -> Self {
        Scenario::on(name, Arc::new(Discretization::new(mesh)), t_final, steps)
    }

    /// Same as [`Scenario::new`] but reuses assembled unit blocks.
    pub fn on(name: &str, disc: Arc<Discretization>, t_final: f64, steps: usize) -> Self {
        Scenario {
            name: name.to_string(),
            disc,
            displacement: Vec::new(),
            pressure: Vec::new(),
            traction: Vec::new(),
            point_sources: Vec::new(),
            body_force: None,
            source: None,
            initial_fluid_content: None,
            t_final,
            steps,
            zero_mean_pressure: false,
            rigid_motion: false,
            symbolic: Mutex::new(SymbolicCache::default()),
        }
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn shared_discretization(&self) -> Arc<Discretization> {
        self.disc.clone()
    }

    pub fn mesh(&self) -> &TriMesh {
        self.disc.mesh()
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn with_displacement(mut self, tag: &str, kind: Constraint) -> Self {
        self.displacement.push(DisplacementBc {
            tag: tag.into(),
            kind,
            value: Data::Constant([0.0; 2]),
        });
        self
    }

    pub fn with_pressure(mut self, tag: &str, value: f64) -> Self {
        self.pressure.push(PressureBc {
            tag: tag.into(),
            value: Data::Constant(value),
        });
        self
    }

    pub fn with_traction(mut self, tag: &str, value: [f64; 2]) -> Self {
        self.traction.push(Traction {
            tag: tag.into(),
            value: Data::Constant(value),
        });
        self
    }

    pub fn with_point_source(mut self, at: Point, magnitude: f64) -> Self {
        self.point_sources.push(PointSource { at, magnitude });
        self
    }

    /// Checks tags and time parameters.
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0) || self.steps == 0 {
            return Err(Error::InvalidInput(format!(
                "scenario '{}' needs t_final > 0 and steps >= 1",
                self.name
            )));
        }
        let tags = self.mesh().tags();
        let all = self
            .displacement
            .iter()
            .map(|b| &b.tag)
            .chain(self.pressure.iter().map(|b| &b.tag))
            .chain(self.traction.iter().map(|b| &b.tag));
        for tag in all {
            if !tags.contains(tag) {
                return Err(Error::InvalidInput(format!(
                    "scenario '{}' refers to unknown boundary tag '{tag}' (mesh has {tags:?})",
                    self.name
                )));
            }
        }
        Ok(())
    }

    /// Whether loads and boundary values are independent of time.
    pub fn is_steady(&self) -> bool {
        self.displacement.iter().all(|b| b.value.is_constant())
            && self.pressure.iter().all(|b| b.value.is_constant())
            && self.traction.iter().all(|b| b.value.is_constant())
            && self.body_force.as_ref().is_none_or(Data::is_constant)
            && self.source.as_ref().is_none_or(Data::is_constant)
    }

    /// Multiplies every pressure boundary value by `s`.
    pub fn scale_pressure_bcs(&mut self, s: f64) {
        for bc in &mut self.pressure {
            bc.value = match &bc.value {
                Data::Constant(v) => Data::Constant(s * v),
                Data::Field(f) => {
                    let f = f.clone();
                    Data::field(move |x, t| s * f(x, t))
                }
            };
        }
    }

    /// Point injection on the unit square: g = 10 δ(x - (0.25, 0.25)),
    /// u·τ = 0 and p = 0 on the whole boundary, 10 steps to t = 1.
    pub fn injection(cells: usize) -> Result<Self> {
        let mesh = TriMesh::unit_square(cells)?;
        let mut s = Scenario::new("injection", mesh, 1.0, 10);
        for side in ["bottom", "right", "top", "left"] {
            s = s.with_displacement(side, Constraint::FixTangential).with_pressure(side, 0.0);
        }
        Ok(s.with_point_source([0.25, 0.25], 10.0))
    }

    /// Footing on the unit square: traction (0, -5) on 0.3 ≤ x₁ ≤ 0.7 of the top,
    /// rest of the top traction-free, other sides clamped, p = 0 everywhere on
    /// the boundary; 2 steps to t = 0.2. `cells` must be a multiple of 10.
    pub fn footing(cells: usize) -> Result<Self> {
        if cells == 0 || !cells.is_multiple_of(10) {
            return Err(Error::InvalidInput(format!(
                "footing mesh needs a multiple of 10 cells per side, got {cells}"
            )));
        }
        let mesh = TriMesh::structured(
            [0.0, 1.0],
            [0.0, 1.0],
            cells,
            cells,
            |_, _| true,
            |_, _| true,
            |m| {
                let t = side_tag(m);
                if t == "top" && m[0] > 0.3 && m[0] < 0.7 {
                    "load".into()
                } else {
                    t
                }
            },
        )?;
        let mut s = Scenario::new("footing", mesh, 0.2, 2);
        for side in ["bottom", "left", "right"] {
            s = s.with_displacement(side, Constraint::Clamped);
        }
        for side in ["bottom", "left", "right", "top", "load"] {
            s = s.with_pressure(side, 0.0);
        }
        Ok(s.with_traction("load", [0.0, -5.0]))
    }

    /// Injection-extraction on [0, 4] × [0, 1] (km) with two rectangular wells.
    ///
    /// The mesh is mirror-symmetric about x₁ = 2 when the holes are. Wells and
    /// bottom clamped, top free, sides u·n = 0; p = -1e-4 (left well) and 1e-4
    /// (right well), no flux elsewhere; 10 steps to t = 1 (day).
    pub fn injection_extraction(cells_per_km: usize, holes: [[f64; 4]; 2]) -> Result<Self> {
        let n = cells_per_km;
        let h = 1.0 / n as f64;
        for hole in &holes {
            for v in hole {
                if ((v / h).round() - v / h).abs() > 1e-9 {
                    return Err(Error::Mesh(format!("hole {hole:?} is not aligned with a {h} grid")));
                }
            }
        }
        let inside = |x: f64, y: f64, r: &[f64; 4], tol: f64| x >= r[0] - tol && x <= r[1] + tol && y >= r[2] - tol && y <= r[3] + tol;
        let mesh = TriMesh::structured(
            [0.0, 4.0],
            [0.0, 1.0],
            4 * n,
            n,
            |i, _| (i as f64 + 0.5) * h < 2.0,
            |i, j| {
                let (x, y) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                !holes.iter().any(|r| inside(x, y, r, 0.0))
            },
            |m| {
                const EPS: f64 = 1e-9;
                if inside(m[0], m[1], &holes[0], EPS) {
                    "well1"
                } else if inside(m[0], m[1], &holes[1], EPS) {
                    "well2"
                } else if m[1] < EPS {
                    "bottom"
                } else if m[1] > 1.0 - EPS {
                    "top"
                } else if m[0] < EPS {
                    "left"
                } else {
                    "right"
                }
                .into()
            },
        )?;
        let s = Scenario::new("injection-extraction", mesh, 1.0, 10)
            .with_displacement("well1", Constraint::Clamped)
            .with_displacement("well2", Constraint::Clamped)
            .with_displacement("bottom", Constraint::Clamped)
            .with_displacement("left", Constraint::FixNormal)
            .with_displacement("right", Constraint::FixNormal)
            .with_pressure("well1", -1e-4)
            .with_pressure("well2", 1e-4);
        Ok(s)
    }

    pub const DEFAULT_WELLS: [[f64; 4]; 2] = [[0.9, 1.1, 0.4, 0.6], [2.9, 3.1, 0.4, 0.6]];
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplacementBcConfig {
    pub tag: String,
    pub kind: Option<Constraint>,
    #[serde(default)]
    pub value: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureBcConfig {
    pub tag: String,
    pub value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TractionConfig {
    pub tag: String,
    pub value: [f64; 2],
}

/// Scenario section of a campaign config.
///
/// With a `preset`, non-empty lists replace the preset's list of the same kind
/// and scalar fields override. Without a preset, `mesh` is required.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub preset: Option<String>,
    pub mesh: Option<PathBuf>,
    pub cells: Option<usize>,
    pub t_final: Option<f64>,
    pub steps: Option<usize>,
    #[serde(default)]
    pub displacement: Vec<DisplacementBcConfig>,
    #[serde(default)]
    pub pressure: Vec<PressureBcConfig>,
    #[serde(default)]
    pub traction: Vec<TractionConfig>,
    #[serde(default)]
    pub point_source: Vec<PointSource>,
    pub wells: Option<[[f64; 4]; 2]>,
    #[serde(default)]
    pub zero_mean_pressure: bool,
    #[serde(default)]
    pub rigid_motion: bool,
}

impl ScenarioConfig {
    /// Builds the scenario; relative mesh paths resolve against `base`.
    pub fn build(&self, base: &Path) -> Result<Scenario> {
        let mut s = match (self.preset.as_deref(), &self.mesh) {
            (Some("injection"), None) => Scenario::injection(self.cells.unwrap_or(16))?,
            (Some("footing"), None) => Scenario::footing(self.cells.unwrap_or(20))?,
            (Some("injection-extraction"), None) => {
                Scenario::injection_extraction(self.cells.unwrap_or(10), self.wells.unwrap_or(Scenario::DEFAULT_WELLS))?
            }
            (Some(other), None) => return Err(Error::InvalidInput(format!("unknown scenario preset '{other}'"))),
            (None, Some(path)) => {
                let path = if path.is_absolute() { path.clone() } else { base.join(path) };
                Scenario::new("custom", TriMesh::read(&path)?, 1.0, 1)
            }
            (Some(_), Some(_)) => return Err(Error::InvalidInput("give either a preset or a mesh, not both".into())),
            (None, None) => return Err(Error::InvalidInput("scenario needs a preset or a mesh".into())),
        };
        if let Some(t) = self.t_final {
            s.t_final = t;
        }
        if let Some(n) = self.steps {
            s.steps = n;
        }
        if !self.displacement.is_empty() {
            s.displacement = self
                .displacement
                .iter()
                .map(|b| DisplacementBc {
                    tag: b.tag.clone(),
                    kind: b.kind.unwrap_or(Constraint::Clamped),
                    value: Data::Constant(b.value.unwrap_or([0.0; 2])),
                })
                .collect();
        }
        if !self.pressure.is_empty() {
            s.pressure = self
                .pressure
                .iter()
                .map(|b| PressureBc {
                    tag: b.tag.clone(),
                    value: Data::Constant(b.value),
                })
                .collect();
        }
        if !self.traction.is_empty() {
            s.traction = self
                .traction
                .iter()
                .map(|b| Traction {
                    tag: b.tag.clone(),
                    value: Data::Constant(b.value),
                })
                .collect();
        }
        if !self.point_source.is_empty() {
            s.point_sources = self.point_source.clone();
        }
        s.zero_mean_pressure |= self.zero_mean_pressure;
        s.rigid_motion |= self.rigid_motion;
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        Scenario::injection(8).unwrap().validate().unwrap();
        Scenario::footing(10).unwrap().validate().unwrap();
        let ie = Scenario::injection_extraction(10, Scenario::DEFAULT_WELLS).unwrap();
        ie.validate().unwrap();
        assert!(ie.mesh().n_triangles() <= 2000);
        assert_eq!(ie.mesh().tagged("well1").len(), 8);
        assert!(Scenario::footing(12).is_err());
        assert!(Scenario::injection_extraction(10, [[0.95, 1.1, 0.4, 0.6], [2.9, 3.05, 0.4, 0.6]]).is_err());
    }

    #[test]
    fn footing_load_edge_length() {
        let s = Scenario::footing(10).unwrap();
        let len: f64 = s
            .mesh()
            .tagged("load")
            .iter()
            .map(|(b, _)| {
                let [a, c] = s.mesh().boundary()[*b].vertices;
                let (p, q) = (s.mesh().vertices()[a], s.mesh().vertices()[c]);
                (p[0] - q[0]).hypot(p[1] - q[1])
            })
            .sum();
        assert!((len - 0.4).abs() < 1e-12);
    }

    #[test]
    fn config_overrides_and_errors() {
        let cfg: ScenarioConfig = toml::from_str(
            r#"
            preset = "injection"
            cells = 4
            steps = 3
            point_source = [{ at = [0.5, 0.5], magnitude = 2.0 }]
            "#,
        )
        .unwrap();
        let s = cfg.build(Path::new(".")).unwrap();
        assert_eq!(s.steps, 3);
        assert_eq!(
            s.point_sources,
            vec![PointSource {
                at: [0.5, 0.5],
                magnitude: 2.0
            }]
        );
        let bad: ScenarioConfig = toml::from_str("preset = \"footing\"\npressure = [{ tag = \"nowhere\", value = 1.0 }]").unwrap();
        assert!(bad.build(Path::new(".")).is_err());
        assert!(toml::from_str::<ScenarioConfig>("preset = \"injection\"\ncolour = 3").is_err());
    }

    #[test]
    fn mesh_file_config() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("sq.mesh"), TriMesh::unit_square(2).unwrap().to_text()).unwrap();
        let cfg: ScenarioConfig = toml::from_str(
            r#"
            mesh = "sq.mesh"
            t_final = 0.5
            steps = 2
            displacement = [{ tag = "bottom", kind = "clamped" }]
            pressure = [{ tag = "top", value = 1.0 }]
            traction = [{ tag = "top", value = [0.0, -1.0] }]
            "#,
        )
        .unwrap();
        let s = cfg.build(dir.path()).unwrap();
        assert_eq!(s.dt(), 0.25);
        assert_eq!(s.traction.len(), 1);
    }
}
