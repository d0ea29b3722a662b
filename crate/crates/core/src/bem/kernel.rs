use std::f64::consts::PI;
use std::ops::Range;

use faer::MatRef;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Panel, SurfaceMesh};

/// Minimum centroid separation accepted by the assembler (nm).
pub const MIN_CENTROID_DISTANCE: f64 = 1e-9;

/// How the collocation matrix is completed beyond the raw point kernel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelScheme {
    /// Raw centroid collocation: zero diagonal, every off-diagonal entry is
    /// the point kernel.
    PointCollocation,
    /// Point kernel plus the two solid-angle identities of the double layer:
    /// each body's rows sum to `−2π` (the self-panel term is fixed by the
    /// diagonal), and each cross-body block annihilates the constant vector
    /// of its source body (rank-one, area-weighted correction).
    #[default]
    GaussClosure,
}

impl KernelScheme {
    pub fn tag(&self) -> &'static str {
        match self {
            KernelScheme::PointCollocation => "point",
            KernelScheme::GaussClosure => "closure",
        }
    }
}

/// Double-layer kernel `n_j · (r_i − r_j) / |r_i − r_j|³ · Δs_j`.
#[inline]
pub fn kernel_entry(target: &Panel, source: &Panel) -> f64 {
    let d = target.centroid - source.centroid;
    let r2 = d.norm_squared();
    source.normal.get().dot(d) * source.area / (r2 * r2.sqrt())
}

/// Dense, frequency-independent `N × N` kernel of a set of bodies.
///
/// Stored column-major; body `b` occupies rows and columns `blocks[b]`.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    n: usize,
    data: Vec<f64>,
    blocks: Vec<Range<usize>>,
    scheme: KernelScheme,
}

impl KernelMatrix {
    /// Builds a kernel from raw column-major data (mainly for tests).
    pub fn from_column_major(
        n: usize,
        data: Vec<f64>,
        blocks: Vec<Range<usize>>,
        scheme: KernelScheme,
    ) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidConfiguration(format!(
                "kernel data has {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        let mut next = 0;
        for b in &blocks {
            if b.start != next || b.end <= b.start {
                return Err(Error::InvalidConfiguration(
                    "kernel blocks must be contiguous, non-empty and ordered".into(),
                ));
            }
            next = b.end;
        }
        if next != n {
            return Err(Error::InvalidConfiguration(
                "kernel blocks must cover all rows".into(),
            ));
        }
        Ok(Self {
            n,
            data,
            blocks,
            scheme,
        })
    }

    pub fn from_fn(
        n: usize,
        blocks: Vec<Range<usize>>,
        f: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                data[j * n + i] = f(i, j);
            }
        }
        Self::from_column_major(n, data, blocks, KernelScheme::PointCollocation)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }

    pub fn scheme(&self) -> KernelScheme {
        self.scheme
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n + i]
    }

    pub fn as_mat(&self) -> MatRef<'_, f64> {
        MatRef::from_column_major_slice(&self.data, self.n, self.n)
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Diagonal block of body `b` as a single-body kernel.
    pub fn block(&self, b: usize) -> KernelMatrix {
        let r = self.blocks[b].clone();
        let m = r.len();
        let mut data = Vec::with_capacity(m * m);
        for j in r.clone() {
            data.extend_from_slice(&self.data[j * self.n + r.start..j * self.n + r.end]);
        }
        KernelMatrix {
            n: m,
            data,
            blocks: vec![0..m],
            scheme: self.scheme,
        }
    }

    /// Sets every cross-body entry to zero.
    pub fn zero_cross_blocks(&mut self) {
        let n = self.n;
        for (bj, cols) in self.blocks.iter().enumerate() {
            for j in cols.clone() {
                for (bi, rows) in self.blocks.iter().enumerate() {
                    if bi != bj {
                        self.data[j * n + rows.start..j * n + rows.end].fill(0.0);
                    }
                }
            }
        }
    }

    /// True when every cross-body entry is exactly zero, in which case the
    /// determinant factorises over bodies.
    pub fn cross_blocks_vanish(&self) -> bool {
        let n = self.n;
        self.blocks.iter().enumerate().all(|(bj, cols)| {
            cols.clone().all(|j| {
                self.blocks.iter().enumerate().all(|(bi, rows)| {
                    bi == bj || self.data[j * n + rows.start..j * n + rows.end].iter().all(|&v| v == 0.0)
                })
            })
        })
    }
}

/// Columns per assembly work item.
const COLUMN_GROUP: usize = 64;

/// Writes column `j` of the point kernel and returns the closest centroid
/// pair it saw as (distance², row).
fn fill_column(panels: &[Panel], j: usize, col: &mut [f64]) -> (f64, usize) {
    let source = &panels[j];
    let mut nearest = (f64::INFINITY, usize::MAX);
    for (i, (target, out)) in panels.iter().zip(col.iter_mut()).enumerate() {
        if i == j {
            continue;
        }
        let d = target.centroid - source.centroid;
        let r2 = d.norm_squared();
        if r2 < nearest.0 {
            nearest = (r2, i);
        }
        *out = source.normal.get().dot(d) * source.area / (r2 * r2.sqrt());
    }
    nearest
}

/// Assembles the kernel with the default [`KernelScheme`].
pub fn assemble_kernel(meshes: &[SurfaceMesh]) -> Result<KernelMatrix> {
    assemble_kernel_with(meshes, KernelScheme::default())
}

pub fn assemble_kernel_with(meshes: &[SurfaceMesh], scheme: KernelScheme) -> Result<KernelMatrix> {
    let mut panels: Vec<Panel> = Vec::new();
    let mut body_of: Vec<usize> = Vec::new();
    let mut blocks = Vec::with_capacity(meshes.len());
    for (b, mesh) in meshes.iter().enumerate() {
        let start = panels.len();
        panels.extend_from_slice(mesh.panels());
        body_of.extend(std::iter::repeat_n(b, mesh.len()));
        blocks.push(start..panels.len());
    }
    let n = panels.len();
    if n < 2 {
        return Err(Error::InvalidGeometry(format!(
            "kernel needs at least 2 panels, got {n}"
        )));
    }

    // Columns are filled in fixed groups that never straddle two bodies. A
    // group also sums its rows while the columns are still in cache, so the
    // closure needs no second sweep over the matrix. Partial sums are
    // combined in group order, which keeps the result independent of the
    // thread count.
    let groups: Vec<(usize, Range<usize>)> = blocks
        .iter()
        .enumerate()
        .flat_map(|(b, cols)| {
            cols.clone()
                .step_by(COLUMN_GROUP)
                .map(move |j| (b, j..(j + COLUMN_GROUP).min(cols.end)))
        })
        .collect();
    let with_sums = scheme == KernelScheme::GaussClosure;
    let mut data = vec![0.0; n * n];
    let mut slabs = Vec::with_capacity(groups.len());
    let mut rest = data.as_mut_slice();
    for (_, cols) in &groups {
        let (slab, tail) = rest.split_at_mut(cols.len() * n);
        slabs.push(slab);
        rest = tail;
    }
    let filled: Vec<(Vec<(f64, usize)>, Vec<f64>)> = slabs
        .into_par_iter()
        .zip(&groups)
        .map(|(slab, (_, cols))| {
            let mut sums = if with_sums { vec![0.0; n] } else { Vec::new() };
            let nearest = slab
                .chunks_mut(n)
                .zip(cols.clone())
                .map(|(col, j)| {
                    let nearest = fill_column(&panels, j, col);
                    if with_sums {
                        for (s, v) in sums.iter_mut().zip(col.iter()) {
                            *s += v;
                        }
                    }
                    nearest
                })
                .collect();
            (nearest, sums)
        })
        .collect();
    let closest: Vec<(f64, usize)> = filled.iter().flat_map(|(c, _)| c.iter().copied()).collect();

    for (j, &(r2, i)) in closest.iter().enumerate() {
        let dist = r2.sqrt();
        if dist < MIN_CENTROID_DISTANCE {
            let (bi, bj) = (body_of[i], body_of[j]);
            if bi != bj {
                return Err(Error::GeometryOverlap {
                    body_a: bi.min(bj),
                    body_b: bi.max(bj),
                    distance: dist,
                });
            }
            return Err(Error::InvalidGeometry(format!(
                "panels {i} and {j} of body {bi} have coincident centroids"
            )));
        }
    }

    if with_sums {
        // Row sums per (source body, target row).
        let mut row_sums = vec![0.0; n * blocks.len()];
        for ((b, _), (_, sums)) in groups.iter().zip(&filled) {
            for (acc, v) in row_sums[b * n..(b + 1) * n].iter_mut().zip(sums) {
                *acc += v;
            }
        }
        apply_gauss_closure(n, &mut data, &blocks, &panels, &row_sums);
    }

    Ok(KernelMatrix {
        n,
        data,
        blocks,
        scheme,
    })
}

fn apply_gauss_closure(
    n: usize,
    data: &mut [f64],
    blocks: &[Range<usize>],
    panels: &[Panel],
    row_sums: &[f64],
) {
    for (b, range) in blocks.iter().enumerate() {
        for i in range.clone() {
            data[i * n + i] = -2.0 * PI - row_sums[b * n + i];
        }
    }
    for (b, cols) in blocks.iter().enumerate() {
        let area: f64 = cols.clone().map(|j| panels[j].area).sum();
        for j in cols.clone() {
            let w = panels[j].area / area;
            for (a, rows) in blocks.iter().enumerate() {
                if a == b {
                    continue;
                }
                for i in rows.clone() {
                    data[j * n + i] -= row_sums[b * n + i] * w;
                }
            }
        }
    }
}
