//! Flat key-value job configuration.
//!
//! The format is one `key = value` per line with `#` comments, chosen over
//! nested formats for diff-friendliness in regression tests. Writing a config
//! and reading it back yields an identical [`JobConfig`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{CliError, Result};
use isonet::quat::Quaternion;

/// Surface family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Bubbleton,
    CmcBubbleton,
    Torus,
    Revolution,
    CustomDarboux,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Bubbleton => "bubbleton",
            Family::CmcBubbleton => "cmc-bubbleton",
            Family::Torus => "torus",
            Family::Revolution => "revolution",
            Family::CustomDarboux => "custom-darboux",
        }
    }

    fn from_tag(tag: &str, line: usize) -> Result<Self> {
        match tag {
            "bubbleton" => Ok(Family::Bubbleton),
            "cmc-bubbleton" => Ok(Family::CmcBubbleton),
            "torus" => Ok(Family::Torus),
            "revolution" => Ok(Family::Revolution),
            "custom-darboux" => Ok(Family::CustomDarboux),
            other => Err(CliError::Parse {
                line,
                message: format!("unknown family '{other}'"),
            }),
        }
    }
}

/// Sign branch of the cmc initial constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmcBranch {
    Plus,
    Minus,
}

/// Vertex projection applied on export.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// Coordinates are the three imaginary parts; the real part must vanish.
    None,
    /// Stereographic projection of the unit 3-sphere from the pole -1.
    Stereographic,
}

/// A fully parsed generation/verification job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub family: Family,
    // cylinder-type families
    pub subdivisions: u32,
    pub profile_step: i32,
    pub cover: u32,
    pub mode: u32,
    pub n_min: i64,
    pub n_max: i64,
    pub c2: Complex64,
    pub cmc_branch: CmcBranch,
    // torus family
    pub m_subdiv: u32,
    pub n_subdiv: u32,
    pub cover1: u32,
    pub cover2: u32,
    pub mode1: u32,
    pub mode2: u32,
    pub c_real: f64,
    pub root_index: usize,
    pub c_plus: Option<Quaternion>,
    pub c_minus: Option<Quaternion>,
    // revolution / custom transform
    pub p_profile: Vec<f64>,
    pub q_profile: Vec<f64>,
    pub nu: Option<f64>,
    pub init_a: Quaternion,
    pub init_b: Quaternion,
    pub base_m: usize,
    pub base_n: usize,
    // output and verification
    pub tolerance: f64,
    pub projection: Projection,
    pub base_obj: Option<PathBuf>,
    pub transform_obj: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
    pub ply: bool,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            family: Family::Bubbleton,
            subdivisions: 40,
            profile_step: 5,
            cover: 1,
            mode: 2,
            n_min: -15,
            n_max: 15,
            c2: Complex64::new(-10.0, 0.0),
            cmc_branch: CmcBranch::Plus,
            m_subdiv: 40,
            n_subdiv: 40,
            cover1: 3,
            cover2: 3,
            mode1: 4,
            mode2: 2,
            c_real: 0.45,
            root_index: 0,
            c_plus: None,
            c_minus: None,
            p_profile: Vec::new(),
            q_profile: Vec::new(),
            nu: None,
            init_a: Quaternion::J,
            init_b: Quaternion::ONE,
            base_m: 0,
            base_n: 0,
            tolerance: 1e-9,
            projection: Projection::None,
            base_obj: None,
            transform_obj: None,
            report_json: None,
            ply: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.trim().parse().map_err(|_| CliError::Parse {
        line,
        message: format!("invalid value '{value}' for key '{key}'"),
    })
}

fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|item| parse_num::<f64>(key, item, line))
        .collect()
}

fn parse_quat(key: &str, value: &str, line: usize) -> Result<Quaternion> {
    let parts = parse_list(key, value, line)?;
    if parts.len() != 4 {
        return Err(CliError::Parse {
            line,
            message: format!("key '{key}' needs four comma-separated components"),
        });
    }
    Ok(Quaternion::new(parts[0], parts[1], parts[2], parts[3]))
}

fn fmt_quat(q: &Quaternion) -> String {
    format!("{},{},{},{}", q.w, q.x, q.y, q.z)
}

fn fmt_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<JobConfig> {
        let mut pairs: BTreeMap<String, (String, usize)> = BTreeMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(CliError::Parse {
                    line,
                    message: format!("expected 'key = value', got '{content}'"),
                });
            };
            pairs.insert(key.trim().to_owned(), (value.trim().to_owned(), line));
        }
        let Some((family_tag, family_line)) = pairs.remove("family") else {
            return Err(CliError::Config(
                "config is missing the 'family' key".into(),
            ));
        };
        let mut config = JobConfig {
            family: Family::from_tag(&family_tag, family_line)?,
            ..JobConfig::default()
        };
        for (key, (value, line)) in pairs {
            match key.as_str() {
                "subdivisions" => config.subdivisions = parse_num(&key, &value, line)?,
                "profile_step" => config.profile_step = parse_num(&key, &value, line)?,
                "cover" => config.cover = parse_num(&key, &value, line)?,
                "mode" => config.mode = parse_num(&key, &value, line)?,
                "n_min" => config.n_min = parse_num(&key, &value, line)?,
                "n_max" => config.n_max = parse_num(&key, &value, line)?,
                "c2_re" => config.c2.re = parse_num(&key, &value, line)?,
                "c2_im" => config.c2.im = parse_num(&key, &value, line)?,
                "cmc_branch" => {
                    config.cmc_branch = match value.as_str() {
                        "plus" => CmcBranch::Plus,
                        "minus" => CmcBranch::Minus,
                        other => {
                            return Err(CliError::Parse {
                                line,
                                message: format!("cmc_branch must be plus|minus, got '{other}'"),
                            })
                        }
                    }
                }
                "m_subdiv" => config.m_subdiv = parse_num(&key, &value, line)?,
                "n_subdiv" => config.n_subdiv = parse_num(&key, &value, line)?,
                "cover1" => config.cover1 = parse_num(&key, &value, line)?,
                "cover2" => config.cover2 = parse_num(&key, &value, line)?,
                "mode1" => config.mode1 = parse_num(&key, &value, line)?,
                "mode2" => config.mode2 = parse_num(&key, &value, line)?,
                "c_real" => config.c_real = parse_num(&key, &value, line)?,
                "root_index" => config.root_index = parse_num(&key, &value, line)?,
                "c_plus" => config.c_plus = Some(parse_quat(&key, &value, line)?),
                "c_minus" => config.c_minus = Some(parse_quat(&key, &value, line)?),
                "p_profile" => config.p_profile = parse_list(&key, &value, line)?,
                "q_profile" => config.q_profile = parse_list(&key, &value, line)?,
                "nu" => config.nu = Some(parse_num(&key, &value, line)?),
                "init_a" => config.init_a = parse_quat(&key, &value, line)?,
                "init_b" => config.init_b = parse_quat(&key, &value, line)?,
                "base_m" => config.base_m = parse_num(&key, &value, line)?,
                "base_n" => config.base_n = parse_num(&key, &value, line)?,
                "tolerance" => config.tolerance = parse_num(&key, &value, line)?,
                "projection" => {
                    config.projection = match value.as_str() {
                        "none" => Projection::None,
                        "stereographic" => Projection::Stereographic,
                        other => {
                            return Err(CliError::Parse {
                                line,
                                message: format!(
                                    "projection must be none|stereographic, got '{other}'"
                                ),
                            })
                        }
                    }
                }
                "base_obj" => config.base_obj = Some(PathBuf::from(value)),
                "transform_obj" => config.transform_obj = Some(PathBuf::from(value)),
                "report_json" => config.report_json = Some(PathBuf::from(value)),
                "ply" => config.ply = parse_num(&key, &value, line)?,
                other => {
                    return Err(CliError::Parse {
                        line,
                        message: format!("unknown key '{other}'"),
                    })
                }
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<JobConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Serialises in a fixed key order; `parse(write())` round-trips exactly.
    pub fn write(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "family = {}", self.family.tag());
        match self.family {
            Family::Bubbleton | Family::CmcBubbleton => {
                let _ = writeln!(out, "subdivisions = {}", self.subdivisions);
                let _ = writeln!(out, "profile_step = {}", self.profile_step);
                let _ = writeln!(out, "cover = {}", self.cover);
                let _ = writeln!(out, "mode = {}", self.mode);
                let _ = writeln!(out, "n_min = {}", self.n_min);
                let _ = writeln!(out, "n_max = {}", self.n_max);
                if self.family == Family::Bubbleton {
                    let _ = writeln!(out, "c2_re = {}", self.c2.re);
                    let _ = writeln!(out, "c2_im = {}", self.c2.im);
                } else {
                    let branch = match self.cmc_branch {
                        CmcBranch::Plus => "plus",
                        CmcBranch::Minus => "minus",
                    };
                    let _ = writeln!(out, "cmc_branch = {branch}");
                }
            }
            Family::Torus => {
                let _ = writeln!(out, "m_subdiv = {}", self.m_subdiv);
                let _ = writeln!(out, "n_subdiv = {}", self.n_subdiv);
                let _ = writeln!(out, "cover1 = {}", self.cover1);
                let _ = writeln!(out, "cover2 = {}", self.cover2);
                let _ = writeln!(out, "mode1 = {}", self.mode1);
                let _ = writeln!(out, "mode2 = {}", self.mode2);
                match (self.c_plus, self.c_minus) {
                    (Some(cp), Some(cm)) => {
                        let _ = writeln!(out, "c_plus = {}", fmt_quat(&cp));
                        let _ = writeln!(out, "c_minus = {}", fmt_quat(&cm));
                    }
                    _ => {
                        let _ = writeln!(out, "c_real = {}", self.c_real);
                        let _ = writeln!(out, "root_index = {}", self.root_index);
                    }
                }
            }
            Family::Revolution | Family::CustomDarboux => {
                let _ = writeln!(out, "subdivisions = {}", self.subdivisions);
                let _ = writeln!(out, "cover = {}", self.cover);
                let _ = writeln!(out, "p_profile = {}", fmt_list(&self.p_profile));
                let _ = writeln!(out, "q_profile = {}", fmt_list(&self.q_profile));
                if self.family == Family::CustomDarboux {
                    if let Some(nu) = self.nu {
                        let _ = writeln!(out, "nu = {nu}");
                    }
                    let _ = writeln!(out, "init_a = {}", fmt_quat(&self.init_a));
                    let _ = writeln!(out, "init_b = {}", fmt_quat(&self.init_b));
                    let _ = writeln!(out, "base_m = {}", self.base_m);
                    let _ = writeln!(out, "base_n = {}", self.base_n);
                }
            }
        }
        let _ = writeln!(out, "tolerance = {}", self.tolerance);
        let projection = match self.projection {
            Projection::None => "none",
            Projection::Stereographic => "stereographic",
        };
        let _ = writeln!(out, "projection = {projection}");
        if let Some(path) = &self.base_obj {
            let _ = writeln!(out, "base_obj = {}", path.display());
        }
        if let Some(path) = &self.transform_obj {
            let _ = writeln!(out, "transform_obj = {}", path.display());
        }
        if let Some(path) = &self.report_json {
            let _ = writeln!(out, "report_json = {}", path.display());
        }
        if self.ply {
            let _ = writeln!(out, "ply = true");
        }
        out
    }
}
