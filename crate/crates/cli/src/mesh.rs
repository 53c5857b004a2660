//! Structured-grid meshes and their OBJ / CSV serializations.

use std::io::{self, BufRead, Write};

use normsurf_core::Vec3;

/// One emitted vertex with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub u: f64,
    pub v: f64,
    pub point: Vec3,
    /// `None` when the analytic formula's preconditions fail here.
    pub h_analytic: Option<f64>,
    pub h_numeric: Option<f64>,
}

/// Triangulated mesh over a `rows x cols` parameter grid.
///
/// Clipped grid points are absent; a cell is triangulated only when all four
/// of its corners were emitted.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub rows: usize,
    pub cols: usize,
    pub vertices: Vec<Vertex>,
    /// Zero-based vertex indices.
    pub faces: Vec<[usize; 3]>,
}

impl SurfaceMesh {
    /// Builds a mesh from a row-major grid (`grid[r * cols + c]`).
    pub fn from_grid(rows: usize, cols: usize, grid: Vec<Option<Vertex>>) -> Self {
        assert_eq!(grid.len(), rows * cols, "grid length must be rows * cols");
        let mut index = vec![usize::MAX; grid.len()];
        let mut vertices = Vec::new();
        for (k, cell) in grid.into_iter().enumerate() {
            if let Some(vx) = cell {
                index[k] = vertices.len();
                vertices.push(vx);
            }
        }
        let mut faces = Vec::new();
        for r in 0..rows.saturating_sub(1) {
            for c in 0..cols.saturating_sub(1) {
                let a = index[r * cols + c];
                let b = index[r * cols + c + 1];
                let d = index[(r + 1) * cols + c];
                let e = index[(r + 1) * cols + c + 1];
                if [a, b, d, e].contains(&usize::MAX) {
                    continue;
                }
                faces.push([a, b, e]);
                faces.push([a, e, d]);
            }
        }
        Self { rows, cols, vertices, faces }
    }

    pub fn max_abs_h_analytic(&self) -> Option<f64> {
        max_abs(self.vertices.iter().filter_map(|v| v.h_analytic))
    }

    pub fn max_abs_h_numeric(&self) -> Option<f64> {
        max_abs(self.vertices.iter().filter_map(|v| v.h_numeric))
    }

    pub fn skipped(&self) -> usize {
        self.vertices.iter().filter(|v| v.h_analytic.is_none()).count()
    }

    pub fn write_obj<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# grid {} x {}", self.rows, self.cols)?;
        for vx in &self.vertices {
            let p = vx.point;
            writeln!(w, "v {:.16e} {:.16e} {:.16e}", p.x1, p.x2, p.x3)?;
        }
        for f in &self.faces {
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        w.flush()
    }

    /// One row per vertex; `H` is the analytic value, empty when skipped.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "u,v,x1,x2,x3,H")?;
        for vx in &self.vertices {
            let p = vx.point;
            let h = vx.h_analytic.map(|h| format!("{h:.16e}")).unwrap_or_default();
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{h}", vx.u, vx.v, p.x1, p.x2, p.x3)?;
        }
        w.flush()
    }
}

fn max_abs(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.map(f64::abs).reduce(f64::max)
}

/// A row read back from a CSV mesh file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub u: f64,
    pub v: f64,
    pub point: Vec3,
    pub h: Option<f64>,
}

/// Parses the CSV written by [`SurfaceMesh::write_csv`].
pub fn read_csv<R: BufRead>(r: R) -> io::Result<Vec<CsvRow>> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = r.lines();
    match lines.next().transpose()? {
        Some(h) if h.trim() == "u,v,x1,x2,x3,H" => {}
        other => return Err(bad(format!("unexpected header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(format!("line {}: expected 6 fields", n + 2)));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("line {}: {e}", n + 2)));
        let h = if fields[5].is_empty() { None } else { Some(num(fields[5])?) };
        rows.push(CsvRow {
            u: num(fields[0])?,
            v: num(fields[1])?,
            point: Vec3::new(num(fields[2])?, num(fields[3])?, num(fields[4])?),
            h,
        });
    }
    Ok(rows)
}
