//! Quad-mesh export (OBJ, optional PLY) and OBJ parsing.
//!
//! Vertices are written in row-major order with m fastest, faces in the fixed
//! quad orientation `(i, j, k, l) = ((m,n), (m+1,n), (m+1,n+1), (m,n+1))` with
//! 1-based indices. Periodic directions close the mesh by index wrap-around:
//! the duplicated seam vertices are dropped and faces wrap. Output is
//! deterministic (fixed 15-decimal formatting) and written atomically via a
//! temp-file rename.

use std::io::Write;
use std::path::Path;

use crate::config::Projection;
use crate::error::{CliError, Result};
use isonet::net::IsothermicNet;
use isonet::quat::Quaternion;

/// Vertex positions and quad faces of a net after projection and seam
/// removal.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 4]>,
}

impl QuadMesh {
    /// Projects the net to R^3 and closes periodic seams.
    pub fn from_net(net: &IsothermicNet, projection: Projection) -> Result<QuadMesh> {
        let (mc, nc) = (net.domain().m_count(), net.domain().n_count());
        // emit exactly one period of vertices in each periodic direction
        let cols = net.domain().period_m().map_or(mc, |p| p.min(mc));
        let rows = net.domain().period_n().map_or(nc, |p| p.min(nc));
        let mut vertices = Vec::with_capacity(cols * rows);
        for n in 0..rows {
            for m in 0..cols {
                vertices.push(project(net.point(m, n), projection, m, n)?);
            }
        }
        let quad_m = if net.domain().period_m().is_some() {
            cols
        } else {
            cols - 1
        };
        let quad_n = if net.domain().period_n().is_some() {
            rows
        } else {
            rows - 1
        };
        let index = |m: usize, n: usize| (n % rows) * cols + (m % cols);
        let mut faces = Vec::with_capacity(quad_m * quad_n);
        for n in 0..quad_n {
            for m in 0..quad_m {
                faces.push([
                    index(m, n),
                    index(m + 1, n),
                    index(m + 1, n + 1),
                    index(m, n + 1),
                ]);
            }
        }
        Ok(QuadMesh { vertices, faces })
    }

    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("v {:.15} {:.15} {:.15}\n", v[0], v[1], v[2]));
        }
        for f in &self.faces {
            out.push_str(&format!(
                "f {} {} {} {}\n",
                f[0] + 1,
                f[1] + 1,
                f[2] + 1,
                f[3] + 1
            ));
        }
        out
    }

    pub fn to_ply(&self) -> String {
        let mut out = String::new();
        out.push_str("ply\nformat ascii 1.0\n");
        out.push_str(&format!("element vertex {}\n", self.vertices.len()));
        out.push_str("property double x\nproperty double y\nproperty double z\n");
        out.push_str(&format!("element face {}\n", self.faces.len()));
        out.push_str("property list uchar int vertex_indices\nend_header\n");
        for v in &self.vertices {
            out.push_str(&format!("{:.15} {:.15} {:.15}\n", v[0], v[1], v[2]));
        }
        for f in &self.faces {
            out.push_str(&format!("4 {} {} {} {}\n", f[0], f[1], f[2], f[3]));
        }
        out
    }

    /// Parses the `v`/`f` lines of an OBJ file. Fails with a line-numbered
    /// error on malformed input, non-quad faces, bad indices, or an empty
    /// mesh.
    pub fn parse_obj(text: &str) -> Result<QuadMesh> {
        let mut vertices = Vec::new();
        let mut faces: Vec<[usize; 4]> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let mut fields = content.split_whitespace();
            match fields.next() {
                Some("v") => {
                    let coords: Vec<f64> = fields
                        .map(|t| {
                            t.parse().map_err(|_| CliError::Parse {
                                line,
                                message: format!("invalid vertex coordinate '{t}'"),
                            })
                        })
                        .collect::<Result<_>>()?;
                    if coords.len() != 3 {
                        return Err(CliError::Parse {
                            line,
                            message: format!("vertex needs 3 coordinates, got {}", coords.len()),
                        });
                    }
                    vertices.push([coords[0], coords[1], coords[2]]);
                }
                Some("f") => {
                    let ids: Vec<usize> =
                        fields
                            .map(|t| {
                                // tolerate the v/vt/vn syntax by taking the first field
                                let first = t.split('/').next().unwrap_or(t);
                                first.parse::<usize>().ok().filter(|&i| i >= 1).ok_or(
                                    CliError::Parse {
                                        line,
                                        message: format!("invalid face index '{t}'"),
                                    },
                                )
                            })
                            .collect::<Result<_>>()?;
                    if ids.len() != 4 {
                        return Err(CliError::Parse {
                            line,
                            message: format!("expected a quad face, got {} indices", ids.len()),
                        });
                    }
                    faces.push([ids[0] - 1, ids[1] - 1, ids[2] - 1, ids[3] - 1]);
                }
                // ignore normals, texture coordinates, groups, materials
                Some(_) => {}
                None => {}
            }
        }
        if vertices.is_empty() {
            return Err(CliError::Parse {
                line: text.lines().count().max(1),
                message: "mesh contains no vertices".into(),
            });
        }
        for (fi, face) in faces.iter().enumerate() {
            for &id in face {
                if id >= vertices.len() {
                    return Err(CliError::Parse {
                        line: 0,
                        message: format!("face {fi} references missing vertex {}", id + 1),
                    });
                }
            }
        }
        Ok(QuadMesh { vertices, faces })
    }

    /// Vertex as a purely imaginary quaternion.
    pub fn vertex_quat(&self, index: usize) -> Quaternion {
        let [x, y, z] = self.vertices[index];
        Quaternion::new(0.0, x, y, z)
    }
}

fn project(point: Quaternion, projection: Projection, m: usize, n: usize) -> Result<[f64; 3]> {
    match projection {
        Projection::None => {
            if point.w.abs() >= 1e-9 {
                return Err(CliError::NonImaginaryVertex { m, n, w: point.w });
            }
            Ok([point.x, point.y, point.z])
        }
        Projection::Stereographic => {
            let denom = 1.0 + point.w;
            if denom <= 1e-9 {
                return Err(CliError::PoleHit { m, n });
            }
            Ok([point.x / denom, point.y / denom, point.z / denom])
        }
    }
}

/// Inverse of the stereographic projection from -1: recovers the unit-sphere
/// point whose projection is `y`.
pub fn stereographic_lift(y: [f64; 3]) -> Quaternion {
    let t = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    let w = (1.0 - t) / (1.0 + t);
    let scale = 2.0 / (1.0 + t);
    Quaternion::new(w, y[0] * scale, y[1] * scale, y[2] * scale)
}

/// Writes `content` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(d) = dir {
        std::fs::create_dir_all(d)?;
    }
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name()
                .map(|n| n.to_string_lossy())
                .unwrap_or_default()
        )),
        None => std::path::PathBuf::from(format!(
            ".{}.tmp",
            path.file_name()
                .map(|n| n.to_string_lossy())
                .unwrap_or_default()
        )),
    };
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(content.as_bytes())?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
