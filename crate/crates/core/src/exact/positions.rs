use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub(crate) fn distance(a: &Vec3, b: &Vec3) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Positions of frozen atoms in metres. No two atoms coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomPositions(Vec<Vec3>);

impl AtomPositions {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidGeometry(format!("atom {i} has a non-finite coordinate")));
        }
        // Coincident means bit-identical coordinates; sorting finds them in
        // O(M log M), which matters for large sampled clouds.
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            points[a]
                .partial_cmp(&points[b])
                .expect("coordinates are finite")
        });
        for w in order.windows(2) {
            if distance(&points[w[0]], &points[w[1]]) == 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "atoms {} and {} coincide",
                    w[0].min(w[1]),
                    w[0].max(w[1])
                )));
            }
        }
        Ok(AtomPositions(points))
    }

    /// Parse a whitespace-separated table: one atom per line, three
    /// coordinates in metres. `#` starts a comment.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line,
                    column: None,
                    msg: format!("expected 3 coordinates, found {}", fields.len()),
                });
            }
            let mut p = [0.0; 3];
            for (k, f) in fields.iter().enumerate() {
                p[k] = f.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    column: Some(k + 1),
                    msg: format!("`{f}`: {e}"),
                })?;
            }
            points.push(p);
        }
        if points.is_empty() {
            return Err(Error::Parse {
                line: 0,
                column: None,
                msg: "no atom positions found".into(),
            });
        }
        Self::new(points)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse_table(&std::fs::read_to_string(path)?)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("# x_m y_m z_m\n");
        for p in &self.0 {
            let _ = writeln!(out, "{} {} {}", p[0], p[1], p[2]);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Vec3] {
        &self.0
    }

    pub fn min_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.0.iter().enumerate() {
            for b in &self.0[i + 1..] {
                best = best.min(distance(a, b));
            }
        }
        best
    }
}
