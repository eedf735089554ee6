//! The on-disk instance format: a JSON document with a schema version,
//! vertex records carrying construction and layout coordinates, a sorted
//! edge list and the terminal pairs. Serialization is deterministic and
//! round-trips losslessly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use linkage_core::{
    grid_certificate, ControlKind, DppInstance, Graph, GridCertificate, Origin, VertexId,
    VertexInfo,
};

pub const INSTANCE_SCHEMA: &str = "dpp-instance/1";

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{location}: {message}")]
    Malformed { location: String, message: String },
}

fn malformed(location: impl Into<String>, message: impl Into<String>) -> FileError {
    FileError::Malformed {
        location: location.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: VertexId,
    pub level: usize,
    pub index: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema: String,
    pub name: String,
    pub kind: String,
    pub k: usize,
    pub p: Option<usize>,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<(VertexId, VertexId)>,
    pub terminals: Vec<(VertexId, VertexId)>,
}

impl InstanceFile {
    /// Builds the file image of an instance. Family instances get their
    /// layout coordinates from the grid certificate; controls and custom
    /// instances reuse (level, index).
    pub fn from_instance(inst: &DppInstance) -> Result<Self, FileError> {
        let n = inst.graph.vertex_count();
        let coords: Vec<(usize, usize)> = match inst.origin {
            Origin::Family { .. } => {
                let cert = grid_certificate(inst)
                    .map_err(|e| malformed("instance", e.to_string()))?;
                let pos = cert.positions(n);
                (0..n)
                    .map(|v| pos[v].expect("family certificates are bijective"))
                    .collect()
            }
            _ => inst.info.iter().map(|i| (i.level, i.index)).collect(),
        };
        let vertices = (0..n)
            .map(|v| VertexRecord {
                id: v,
                level: inst.info[v].level,
                index: inst.info[v].index,
                row: coords[v].0,
                col: coords[v].1,
            })
            .collect();
        let (kind, p) = match inst.origin {
            Origin::Family { p, .. } => ("family".to_string(), Some(p)),
            Origin::Control(_) => ("control".to_string(), None),
            Origin::Custom => ("custom".to_string(), None),
        };
        Ok(InstanceFile {
            schema: INSTANCE_SCHEMA.to_string(),
            name: inst.name.clone(),
            kind,
            k: inst.terminals.len(),
            p,
            vertices,
            edges: inst.graph.edges(),
            terminals: inst.terminals.clone(),
        })
    }

    /// Deterministic serialization: pretty JSON plus a final newline.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut s = serde_json::to_string_pretty(self).expect("instance files always serialize");
        s.push('\n');
        s.into_bytes()
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, FileError> {
        let file: InstanceFile = serde_json::from_slice(bytes)?;
        file.validate()?;
        Ok(file)
    }

    /// Structural validation with the location of the first violation.
    pub fn validate(&self) -> Result<(), FileError> {
        if self.schema != INSTANCE_SCHEMA {
            return Err(malformed(
                "schema",
                format!("expected '{INSTANCE_SCHEMA}', found '{}'", self.schema),
            ));
        }
        let n = self.vertices.len();
        for (i, rec) in self.vertices.iter().enumerate() {
            if rec.id != i {
                return Err(malformed(
                    format!("vertices[{i}]"),
                    format!("ids must be dense and ordered, expected {i}, found {}", rec.id),
                ));
            }
            if rec.level == 0 || rec.index == 0 || rec.row == 0 || rec.col == 0 {
                return Err(malformed(
                    format!("vertices[{i}]"),
                    "level, index, row and col are 1-based",
                ));
            }
        }
        for (i, w) in self.vertices.windows(2).enumerate() {
            if (w[0].level, w[0].index) >= (w[1].level, w[1].index) {
                return Err(malformed(
                    format!("vertices[{}]", i + 1),
                    "vertex records must be sorted by (level, index)",
                ));
            }
        }
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u >= v {
                return Err(malformed(
                    format!("edges[{i}]"),
                    "edges must list the smaller id first",
                ));
            }
            if v >= n {
                return Err(malformed(
                    format!("edges[{i}]"),
                    format!("vertex {v} out of range"),
                ));
            }
        }
        for (i, w) in self.edges.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(malformed(
                    format!("edges[{}]", i + 1),
                    "edge list must be sorted and duplicate-free",
                ));
            }
        }
        if self.terminals.len() != self.k {
            return Err(malformed(
                "terminals",
                format!("k = {} but {} pairs listed", self.k, self.terminals.len()),
            ));
        }
        if self.terminals.is_empty() {
            return Err(malformed("terminals", "at least one pair is required"));
        }
        for (i, &(s, t)) in self.terminals.iter().enumerate() {
            if s >= n || t >= n {
                return Err(malformed(
                    format!("terminals[{i}]"),
                    "terminal out of range",
                ));
            }
        }
        match self.kind.as_str() {
            "family" => {
                if self.p.is_none() {
                    return Err(malformed("p", "family instances must carry p"));
                }
            }
            "control" | "custom" => {}
            other => {
                return Err(malformed(
                    "kind",
                    format!("unknown kind '{other}' (family, control or custom)"),
                ));
            }
        }
        Ok(())
    }

    /// Reconstructs the instance. The graph constructor reports loops and
    /// duplicates; everything else was validated already.
    pub fn to_instance(&self) -> Result<DppInstance, FileError> {
        let graph = Graph::new(self.vertices.len(), &self.edges)
            .map_err(|e| malformed("edges", e.to_string()))?;
        let info = self
            .vertices
            .iter()
            .map(|r| VertexInfo {
                level: r.level,
                index: r.index,
            })
            .collect();
        let origin = match self.kind.as_str() {
            "family" => Origin::Family {
                k: self.k,
                p: self.p.expect("validated"),
            },
            "control" => match self.name.as_str() {
                "grid-one-pair" => Origin::Control(ControlKind::GridOnePair),
                "grid-two-pair-loose" => Origin::Control(ControlKind::GridTwoPairLoose),
                "path-infeasible" => Origin::Control(ControlKind::PathInfeasible),
                _ => Origin::Custom,
            },
            _ => Origin::Custom,
        };
        let inst = DppInstance {
            name: self.name.clone(),
            graph,
            terminals: self.terminals.clone(),
            info,
            origin,
        };
        if let Origin::Family { k, p } = origin {
            check_family_shape(&inst, k, p)?;
        }
        Ok(inst)
    }

    /// Rebuilds the layout certificate from the stored row/col pairs,
    /// when they form a complete injective table.
    pub fn certificate(&self) -> Result<GridCertificate, FileError> {
        let rows = self.vertices.iter().map(|r| r.row).max().unwrap_or(0);
        let cols = self.vertices.iter().map(|r| r.col).max().unwrap_or(0);
        if rows * cols != self.vertices.len() {
            return Err(malformed(
                "vertices",
                format!(
                    "layout coordinates do not tile a {rows} x {cols} grid with {} vertices",
                    self.vertices.len()
                ),
            ));
        }
        let mut cells = vec![usize::MAX; rows * cols];
        for (i, rec) in self.vertices.iter().enumerate() {
            let slot = (rec.row - 1) * cols + (rec.col - 1);
            if cells[slot] != usize::MAX {
                return Err(malformed(
                    format!("vertices[{i}]"),
                    format!("cell ({}, {}) is claimed twice", rec.row, rec.col),
                ));
            }
            cells[slot] = rec.id;
        }
        GridCertificate::new(rows, cols, cells).map_err(|e| malformed("vertices", e.to_string()))
    }
}

/// A family file must actually look like a generated instance: level
/// sizes halve, terminals are row ends. Catches mislabeled files before
/// canonical-linkage arithmetic silently misfires.
fn check_family_shape(inst: &DppInstance, k: usize, p: usize) -> Result<(), FileError> {
    if k == 0 || p == 0 {
        return Err(malformed("k", "family parameters must be positive"));
    }
    if k >= 32 {
        return Err(malformed("k", "family depth out of range"));
    }
    let mut offset = 0usize;
    for j in 1..=k {
        let len = p
            .checked_shl((k - j) as u32)
            .filter(|l| *l > 0)
            .ok_or_else(|| malformed("p", "family dimensions overflow"))?;
        for i in 0..len {
            let rec = inst
                .info
                .get(offset + i)
                .ok_or_else(|| malformed("vertices", "fewer vertices than the family shape"))?;
            if rec.level != j || rec.index != i + 1 {
                return Err(malformed(
                    format!("vertices[{}]", offset + i),
                    format!("expected level {j} index {}, found level {} index {}",
                        i + 1, rec.level, rec.index),
                ));
            }
        }
        let pair = inst
            .terminals
            .get(j - 1)
            .ok_or_else(|| malformed("terminals", "missing pair for a level"))?;
        if *pair != (offset, offset + len - 1) {
            return Err(malformed(
                format!("terminals[{}]", j - 1),
                "terminals must be the ends of their level",
            ));
        }
        offset += len;
    }
    if offset != inst.graph.vertex_count() {
        return Err(malformed(
            "vertices",
            "vertex count differs from the family shape",
        ));
    }
    Ok(())
}
