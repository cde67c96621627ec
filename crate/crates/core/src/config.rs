//! Run configuration: a strict TOML schema (unknown keys are errors), a
//! validation pass that reports every violation at once, and the named
//! experiment presets.

use serde::Deserialize;

use crate::grid::Grid;
use crate::pml::{LogBase, PmlOrder};
use crate::{Error, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    domain: DomainSpec,
    material: MaterialSection,
    source: SourceSection,
    boundary: BoundarySection,
    pml: Option<PmlSection>,
    time: TimeSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub n_x: usize,
    pub n_y: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialSection {
    kind: MaterialKind,
    rho: Option<f64>,
    mu: Option<f64>,
    interface_x: Option<f64>,
    rho_left: Option<f64>,
    mu_left: Option<f64>,
    rho_right: Option<f64>,
    mu_right: Option<f64>,
    rho_file: Option<String>,
    mu_file: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum MaterialKind {
    Constant,
    CosineModulated,
    VerticalInterface,
    Raster,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceSection {
    kind: SourceKind,
    center: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SourceKind {
    None,
    Manufactured,
    GaussianPulse,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundarySection {
    kind: BoundaryKind,
    value: Option<DirichletValue>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum BoundaryKind {
    Dirichlet,
    Pml,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirichletValue {
    Manufactured,
    Zero,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct PmlSection {
    #[serde(default = "default_order")]
    order: u32,
    #[serde(default = "default_width")]
    width_cells: usize,
    #[serde(rename = "R", default = "default_r")]
    r: f64,
    #[serde(default = "default_m")]
    m: u32,
    #[serde(default)]
    log_base: LogBaseSpec,
}

fn default_order() -> u32 {
    2
}
fn default_width() -> usize {
    15
}
fn default_r() -> f64 {
    1e-4
}
fn default_m() -> u32 {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum LogBaseSpec {
    #[default]
    Natural,
    Ten,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeSection {
    rule: TauRuleKind,
    factor: Option<f64>,
    final_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
enum TauRuleKind {
    #[serde(rename = "factor")]
    Factor,
    #[serde(rename = "h-over-4c")]
    HOver4C,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(default)]
    snapshot_every: usize,
    #[serde(default = "default_directory")]
    directory: String,
    #[serde(default)]
    workers: usize,
}

fn default_directory() -> String {
    "out".to_string()
}

impl Default for OutputSection {
    fn default() -> OutputSection {
        OutputSection { snapshot_every: 0, directory: default_directory(), workers: 0 }
    }
}

/// Validated, fully typed run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub material: Material,
    pub source: Source,
    pub boundary: Boundary,
    pub tau_rule: TauRule,
    pub final_time: f64,
    pub output: OutputParams,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Material {
    Constant { rho: f64, mu: f64 },
    /// rho = 1 with mu = 1 + (1/2) cos(2 pi x) cos(2 pi y) at cell centers.
    CosineModulated,
    VerticalInterface { interface_x: f64, left: (f64, f64), right: (f64, f64) },
    Raster { rho_file: String, mu_file: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    None,
    Manufactured,
    GaussianPulse { center: (f64, f64) },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Dirichlet(DirichletValue),
    Pml(PmlParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmlParams {
    pub order: PmlOrder,
    pub width_cells: usize,
    pub r: f64,
    pub m: u32,
    pub log_base: LogBase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRule {
    /// tau = factor * h.
    Factor(f64),
    /// tau = h / (4 c_max).
    HOver4C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputParams {
    /// Steps between snapshots; 0 requests ten snapshots spread over the run.
    pub snapshot_every: usize,
    pub directory: String,
    /// Worker threads; 0 uses the machine's available parallelism.
    pub workers: usize,
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        let d = &self.domain;
        Grid::new(d.x_min, d.x_max, d.y_min, d.y_max, d.n_x, d.n_y)
    }

    /// Same run at a different resolution (square grids), for refinement
    /// studies.
    pub fn with_resolution(&self, n: usize) -> RunConfig {
        let mut c = self.clone();
        c.domain.n_x = n;
        c.domain.n_y = n;
        c
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
    validate(raw)
}

fn validate(raw: RawConfig) -> Result<RunConfig> {
    let mut problems = Vec::new();

    let d = raw.domain;
    match Grid::new(d.x_min, d.x_max, d.y_min, d.y_max, d.n_x, d.n_y) {
        Ok(_) => {}
        Err(Error::Config(p)) => problems.extend(p),
        Err(e) => problems.push(e.to_string()),
    }

    check_material(&raw.material, &mut problems);
    check_source(&raw.source, &mut problems);
    check_boundary(&raw.boundary, raw.pml.as_ref(), &mut problems);
    check_time(&raw.time, &mut problems);
    if raw.output.directory.is_empty() {
        problems.push("output: directory must not be empty".to_string());
    }

    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }

    let m = raw.material;
    let material = match m.kind {
        MaterialKind::Constant => {
            Material::Constant { rho: m.rho.unwrap(), mu: m.mu.unwrap() }
        }
        MaterialKind::CosineModulated => Material::CosineModulated,
        MaterialKind::VerticalInterface => Material::VerticalInterface {
            interface_x: m.interface_x.unwrap(),
            left: (m.rho_left.unwrap(), m.mu_left.unwrap()),
            right: (m.rho_right.unwrap(), m.mu_right.unwrap()),
        },
        MaterialKind::Raster => {
            Material::Raster { rho_file: m.rho_file.unwrap(), mu_file: m.mu_file.unwrap() }
        }
    };
    let source = match raw.source.kind {
        SourceKind::None => Source::None,
        SourceKind::Manufactured => Source::Manufactured,
        SourceKind::GaussianPulse => {
            let c = raw.source.center.unwrap_or([0.0, 0.0]);
            Source::GaussianPulse { center: (c[0], c[1]) }
        }
    };
    let boundary = match raw.boundary.kind {
        BoundaryKind::Dirichlet => Boundary::Dirichlet(raw.boundary.value.unwrap()),
        BoundaryKind::Pml => {
            let p = raw.pml.unwrap();
            Boundary::Pml(PmlParams {
                order: if p.order == 1 { PmlOrder::First } else { PmlOrder::Second },
                width_cells: p.width_cells,
                r: p.r,
                m: p.m,
                log_base: match p.log_base {
                    LogBaseSpec::Natural => LogBase::Natural,
                    LogBaseSpec::Ten => LogBase::Ten,
                },
            })
        }
    };
    let tau_rule = match raw.time.rule {
        TauRuleKind::Factor => TauRule::Factor(raw.time.factor.unwrap()),
        TauRuleKind::HOver4C => TauRule::HOver4C,
    };

    Ok(RunConfig {
        domain: d,
        material,
        source,
        boundary,
        tau_rule,
        final_time: raw.time.final_time,
        output: OutputParams {
            snapshot_every: raw.output.snapshot_every,
            directory: raw.output.directory,
            workers: raw.output.workers,
        },
    })
}

fn check_material(m: &MaterialSection, problems: &mut Vec<String>) {
    let fields: [(&str, bool); 9] = [
        ("rho", m.rho.is_some()),
        ("mu", m.mu.is_some()),
        ("interface_x", m.interface_x.is_some()),
        ("rho_left", m.rho_left.is_some()),
        ("mu_left", m.mu_left.is_some()),
        ("rho_right", m.rho_right.is_some()),
        ("mu_right", m.mu_right.is_some()),
        ("rho_file", m.rho_file.is_some()),
        ("mu_file", m.mu_file.is_some()),
    ];
    let (kind, allowed): (&str, &[&str]) = match m.kind {
        MaterialKind::Constant => ("constant", &["rho", "mu"]),
        MaterialKind::CosineModulated => ("cosine-modulated", &[]),
        MaterialKind::VerticalInterface => (
            "vertical-interface",
            &["interface_x", "rho_left", "mu_left", "rho_right", "mu_right"],
        ),
        MaterialKind::Raster => ("raster", &["rho_file", "mu_file"]),
    };
    for (name, present) in fields {
        if present && !allowed.contains(&name) {
            problems.push(format!("material: {name} does not apply to kind {kind:?}"));
        }
        if !present && allowed.contains(&name) {
            problems.push(format!("material: kind {kind:?} requires {name}"));
        }
    }
    let positive = |v: Option<f64>, name: &str, problems: &mut Vec<String>| {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("material: {name} must be positive and finite, got {v}"));
            }
        }
    };
    positive(m.rho, "rho", problems);
    positive(m.mu, "mu", problems);
    positive(m.rho_left, "rho_left", problems);
    positive(m.mu_left, "mu_left", problems);
    positive(m.rho_right, "rho_right", problems);
    positive(m.mu_right, "mu_right", problems);
    if let Some(x) = m.interface_x {
        if !x.is_finite() {
            problems.push(format!("material: interface_x must be finite, got {x}"));
        }
    }
    for (name, file) in [("rho_file", &m.rho_file), ("mu_file", &m.mu_file)] {
        if let Some(f) = file {
            if f.is_empty() {
                problems.push(format!("material: {name} must not be empty"));
            }
        }
    }
}

fn check_source(s: &SourceSection, problems: &mut Vec<String>) {
    if let Some(c) = s.center {
        if s.kind != SourceKind::GaussianPulse {
            problems.push("source: center applies only to kind \"gaussian-pulse\"".to_string());
        }
        if !(c[0].is_finite() && c[1].is_finite()) {
            problems.push(format!("source: center must be finite, got [{}, {}]", c[0], c[1]));
        }
    }
}

fn check_boundary(b: &BoundarySection, pml: Option<&PmlSection>, problems: &mut Vec<String>) {
    match b.kind {
        BoundaryKind::Dirichlet => {
            if b.value.is_none() {
                problems.push(
                    "boundary: kind \"dirichlet\" requires value (\"manufactured\" or \"zero\")"
                        .to_string(),
                );
            }
            if pml.is_some() {
                problems
                    .push("pml: section applies only to boundary kind \"pml\"".to_string());
            }
        }
        BoundaryKind::Pml => {
            if b.value.is_some() {
                problems.push("boundary: value applies only to kind \"dirichlet\"".to_string());
            }
            match pml {
                None => problems
                    .push("boundary: kind \"pml\" requires a [pml] section".to_string()),
                Some(p) => {
                    if p.order != 1 && p.order != 2 {
                        problems.push(format!("pml: order must be 1 or 2, got {}", p.order));
                    }
                    if p.width_cells < 1 {
                        problems.push(format!(
                            "pml: width_cells must be >= 1, got {}",
                            p.width_cells
                        ));
                    }
                    if !(p.r > 0.0 && p.r < 1.0) {
                        problems.push(format!(
                            "pml: R must lie strictly inside (0, 1), got {}",
                            p.r
                        ));
                    }
                }
            }
        }
    }
}

fn check_time(t: &TimeSection, problems: &mut Vec<String>) {
    match t.rule {
        TauRuleKind::Factor => match t.factor {
            None => problems.push("time: rule \"factor\" requires factor".to_string()),
            Some(f) => {
                if !(f.is_finite() && f > 0.0) {
                    problems.push(format!("time: factor must be positive and finite, got {f}"));
                }
            }
        },
        TauRuleKind::HOver4C => {
            if t.factor.is_some() {
                problems.push("time: factor applies only to rule \"factor\"".to_string());
            }
        }
    }
    if !(t.final_time.is_finite() && t.final_time >= 0.0) {
        problems.push(format!(
            "time: final_time must be non-negative and finite, got {}",
            t.final_time
        ));
    }
}

pub const PRESET_NAMES: [&str; 8] = [
    "example1",
    "example2",
    "example3",
    "example3-scaled",
    "example4",
    "example4-scaled",
    "example5",
    "example5-scaled",
];

/// TOML text of a named preset, if the name is known.
pub fn preset(name: &str) -> Option<&'static str> {
    let text = match name {
        "example1" => {
            "# Homogeneous unit square, oscillatory exact boundary data.\n\
             [domain]\nx_min = 0.0\nx_max = 1.0\ny_min = 0.0\ny_max = 1.0\nn_x = 64\nn_y = 64\n\n\
             [material]\nkind = \"constant\"\nrho = 1.0\nmu = 1.0\n\n\
             [source]\nkind = \"none\"\n\n\
             [boundary]\nkind = \"dirichlet\"\nvalue = \"manufactured\"\n\n\
             [time]\nrule = \"factor\"\nfactor = 0.1\nfinal_time = 1.0\n"
        }
        "example2" => {
            "# Smoothly varying stiffness with the matching forcing term.\n\
             [domain]\nx_min = 0.0\nx_max = 1.0\ny_min = 0.0\ny_max = 1.0\nn_x = 64\nn_y = 64\n\n\
             [material]\nkind = \"cosine-modulated\"\n\n\
             [source]\nkind = \"manufactured\"\n\n\
             [boundary]\nkind = \"dirichlet\"\nvalue = \"manufactured\"\n\n\
             [time]\nrule = \"factor\"\nfactor = 0.1\nfinal_time = 1.0\n"
        }
        "example3" => {
            "# Vertical impedance interface, pulse launched at the origin.\n\
             [domain]\nx_min = -50.0\nx_max = 50.0\ny_min = -50.0\ny_max = 50.0\nn_x = 400\nn_y = 400\n\n\
             [material]\nkind = \"vertical-interface\"\ninterface_x = 25.0\n\
             rho_left = 1.0\nmu_left = 1.0\nrho_right = 2.0\nmu_right = 2.0\n\n\
             [source]\nkind = \"gaussian-pulse\"\ncenter = [0.0, 0.0]\n\n\
             [boundary]\nkind = \"dirichlet\"\nvalue = \"zero\"\n\n\
             [time]\nrule = \"factor\"\nfactor = 0.1\nfinal_time = 30.0\n"
        }
        "example3-scaled" => {
            "# Interface run shrunk to a refinement-study-friendly domain.\n\
             [domain]\nx_min = -10.0\nx_max = 10.0\ny_min = -10.0\ny_max = 10.0\nn_x = 128\nn_y = 128\n\n\
             [material]\nkind = \"vertical-interface\"\ninterface_x = 2.5\n\
             rho_left = 1.0\nmu_left = 1.0\nrho_right = 2.0\nmu_right = 2.0\n\n\
             [source]\nkind = \"gaussian-pulse\"\ncenter = [0.0, 0.0]\n\n\
             [boundary]\nkind = \"dirichlet\"\nvalue = \"zero\"\n\n\
             [time]\nrule = \"factor\"\nfactor = 0.01\nfinal_time = 5.0\n"
        }
        "example4" => {
            "# Free-space pulse surrounded by absorbing layers.\n\
             [domain]\nx_min = -50.0\nx_max = 50.0\ny_min = -50.0\ny_max = 50.0\nn_x = 400\nn_y = 400\n\n\
             [material]\nkind = \"constant\"\nrho = 1.0\nmu = 1.0\n\n\
             [source]\nkind = \"gaussian-pulse\"\ncenter = [0.0, 0.0]\n\n\
             [boundary]\nkind = \"pml\"\n\n\
             [pml]\norder = 2\nwidth_cells = 15\nR = 1.0e-4\nm = 4\nlog_base = \"natural\"\n\n\
             [time]\nrule = \"h-over-4c\"\nfinal_time = 30.0\n"
        }
        "example4-scaled" => {
            "# Absorption run on the small domain used by the acceptance suite.\n\
             [domain]\nx_min = -10.0\nx_max = 10.0\ny_min = -10.0\ny_max = 10.0\nn_x = 400\nn_y = 400\n\n\
             [material]\nkind = \"constant\"\nrho = 1.0\nmu = 1.0\n\n\
             [source]\nkind = \"gaussian-pulse\"\ncenter = [0.0, 0.0]\n\n\
             [boundary]\nkind = \"pml\"\n\n\
             [pml]\norder = 2\nwidth_cells = 15\nR = 1.0e-4\nm = 4\nlog_base = \"natural\"\n\n\
             [time]\nrule = \"h-over-4c\"\nfinal_time = 30.0\n"
        }
        "example5" => {
            "# Interface plus absorbing layers: reflected and transmitted fronts decay.\n\
             [domain]\nx_min = -50.0\nx_max = 50.0\ny_min = -50.0\ny_max = 50.0\nn_x = 400\nn_y = 400\n\n\
             [material]\nkind = \"vertical-interface\"\ninterface_x = 25.0\n\
             rho_left = 1.0\nmu_left = 1.0\nrho_right = 2.0\nmu_right = 2.0\n\n\
             [source]\nkind = \"gaussian-pulse\"\ncenter = [0.0, 0.0]\n\n\
             [boundary]\nkind = \"pml\"\n\n\
             [pml]\norder = 2\nwidth_cells = 15\nR = 1.0e-4\nm = 4\nlog_base = \"natural\"\n\n\
             [time]\nrule = \"h-over-4c\"\nfinal_time = 30.0\n"
        }
        "example5-scaled" => {
            "# Scaled interface-plus-layers run.\n\
             [domain]\nx_min = -10.0\nx_max = 10.0\ny_min = -10.0\ny_max = 10.0\nn_x = 400\nn_y = 400\n\n\
             [material]\nkind = \"vertical-interface\"\ninterface_x = 2.5\n\
             rho_left = 1.0\nmu_left = 1.0\nrho_right = 2.0\nmu_right = 2.0\n\n\
             [source]\nkind = \"gaussian-pulse\"\ncenter = [0.0, 0.0]\n\n\
             [boundary]\nkind = \"pml\"\n\n\
             [pml]\norder = 2\nwidth_cells = 15\nR = 1.0e-4\nm = 4\nlog_base = \"natural\"\n\n\
             [time]\nrule = \"h-over-4c\"\nfinal_time = 30.0\n"
        }
        _ => return None,
    };
    Some(text)
}
