//! Grid-based approximation of Pareto critical sets, connected-component
//! clustering and point-cloud comparison by Hausdorff distance.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::dataset::DataSet;
use crate::error::{Error, Result};
use crate::objective::ObjectiveVector;

/// Default cap on the number of grid nodes per scan.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// Axis-aligned box with a per-axis node count.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub bounds: Vec<(f64, f64)>,
    pub resolution: Vec<usize>,
}

impl GridSpec {
    pub fn new(bounds: Vec<(f64, f64)>, resolution: Vec<usize>) -> Result<Self> {
        if bounds.is_empty() || bounds.len() != resolution.len() {
            return Err(Error::InvalidArgument(
                "grid bounds and resolution must be nonempty and agree in length".into(),
            ));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidArgument(format!(
                    "grid axis {i} is empty: [{lo}, {hi}]"
                )));
            }
            if resolution[i] < 2 {
                return Err(Error::InvalidArgument(format!(
                    "grid axis {i} needs at least 2 nodes"
                )));
            }
        }
        Ok(Self { bounds, resolution })
    }

    /// Same node count on every axis.
    pub fn square(bounds: Vec<(f64, f64)>, resolution: usize) -> Result<Self> {
        let axes = bounds.len();
        Self::new(bounds, vec![resolution; axes])
    }

    pub fn node_count(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Largest spacing over all axes.
    pub fn max_spacing(&self) -> f64 {
        self.bounds
            .iter()
            .zip(&self.resolution)
            .map(|(&(lo, hi), &r)| (hi - lo) / (r - 1) as f64)
            .fold(0.0, f64::max)
    }

    fn node(&self, mut index: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.bounds.len()];
        for axis in 0..self.bounds.len() {
            let r = self.resolution[axis];
            let i = index % r;
            index /= r;
            let (lo, hi) = self.bounds[axis];
            x[axis] = lo + i as f64 * (hi - lo) / (r - 1) as f64;
        }
        x
    }
}

/// One retained grid node: position, minimizing KKT vector and residual.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub alpha: Vec<f64>,
    pub residual: f64,
}

/// Grid nodes whose best KKT residual is at most the tolerance.
#[derive(Debug, Clone)]
pub struct CriticalPointCloud {
    pub points: Vec<CriticalPoint>,
    pub grid: GridSpec,
    pub tolerance: f64,
}

impl CriticalPointCloud {
    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| p.x.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Evaluate the best simplex-constrained residual at every grid node and
/// keep the nodes at or below `tol`. Deterministic for fixed inputs.
pub fn grid_scan(
    f: &ObjectiveVector,
    grid: &GridSpec,
    tol: f64,
    node_budget: usize,
) -> Result<CriticalPointCloud> {
    if grid.bounds.len() != f.n() {
        return Err(Error::DimensionMismatch {
            context: "grid dimension vs objective",
            expected: f.n(),
            found: grid.bounds.len(),
        });
    }
    let nodes = grid.node_count();
    if nodes > node_budget {
        return Err(Error::GridBudgetExceeded {
            nodes,
            budget: node_budget,
        });
    }
    let points: Vec<CriticalPoint> = (0..nodes)
        .into_par_iter()
        .filter_map(|i| {
            let x = grid.node(i);
            let (alpha, residual) = f.best_alpha(&x).ok()?;
            (residual <= tol).then_some(CriticalPoint { x, alpha, residual })
        })
        .collect();
    Ok(CriticalPointCloud {
        points,
        grid: grid.clone(),
        tolerance: tol,
    })
}

/// Cluster labels for a point cloud, produced by single linkage.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    /// `labels[i]` is the component id of point `i`; ids are dense and
    /// numbered by first appearance.
    pub labels: Vec<usize>,
    pub radius: f64,
    pub component_count: usize,
}

impl ComponentLabeling {
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.component_count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        let mut root = i;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut walk = i;
        while self.parent[walk] != root {
            let next = self.parent[walk];
            self.parent[walk] = root;
            walk = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[rb.max(ra)] = rb.min(ra);
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Single-linkage connected components: two points within `radius` of each
/// other (transitively) share a label. Uses spatial hashing so clouds of
/// ~10^5 grid points stay affordable.
pub fn cluster_components(points: &[Vec<f64>], radius: f64) -> Result<ComponentLabeling> {
    if radius <= 0.0 {
        return Err(Error::InvalidArgument(
            "linking radius must be positive".into(),
        ));
    }
    let n = points.len();
    let mut uf = UnionFind::new(n);
    if n > 0 {
        let dim = points[0].len();
        let cell = radius;
        let key = |p: &[f64]| -> Vec<i64> { p.iter().map(|v| (v / cell).floor() as i64).collect() };
        let mut bins: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            bins.entry(key(p)).or_default().push(i);
        }
        let r2 = radius * radius;
        let mut offsets = vec![vec![0i64; dim]];
        for axis in 0..dim {
            let mut extended = Vec::new();
            for off in &offsets {
                for delta in [-1i64, 0, 1] {
                    let mut o = off.clone();
                    o[axis] = delta;
                    extended.push(o);
                }
            }
            offsets = extended;
        }
        for (i, p) in points.iter().enumerate() {
            let base = key(p);
            for off in &offsets {
                let neighbor: Vec<i64> = base.iter().zip(off).map(|(b, o)| b + o).collect();
                if let Some(candidates) = bins.get(&neighbor) {
                    for &j in candidates {
                        if j > i && squared_distance(p, &points[j]) <= r2 {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }
    let mut id_of_root: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let root = uf.find(i);
        let next = id_of_root.len();
        let id = *id_of_root.entry(root).or_insert(next);
        labels.push(id);
    }
    Ok(ComponentLabeling {
        labels,
        radius,
        component_count: id_of_root.len(),
    })
}

/// Keep only the clusters that come within `radius` of some data point.
/// Clusters are formed with a linking radius of twice the grid spacing, so
/// adjacent nodes on a continuous critical manifold stay connected.
pub fn filter_near_data(
    cloud: &CriticalPointCloud,
    data: &DataSet,
    radius: f64,
) -> Result<CriticalPointCloud> {
    if radius <= 0.0 {
        return Err(Error::InvalidArgument(
            "filter radius must be positive".into(),
        ));
    }
    let positions = cloud.positions();
    let labeling = cluster_components(&positions, 2.0 * cloud.grid.max_spacing())?;
    let r2 = radius * radius;
    let mut keep = vec![false; labeling.component_count];
    for (i, p) in positions.iter().enumerate() {
        if keep[labeling.labels[i]] {
            continue;
        }
        if data
            .points()
            .iter()
            .any(|d| squared_distance(p, &d.x) <= r2)
        {
            keep[labeling.labels[i]] = true;
        }
    }
    let points: Vec<CriticalPoint> = cloud
        .points
        .iter()
        .enumerate()
        .filter(|(i, _)| keep[labeling.labels[*i]])
        .map(|(_, p)| p.clone())
        .collect();
    Ok(CriticalPointCloud {
        points,
        grid: cloud.grid.clone(),
        tolerance: cloud.tolerance,
    })
}

/// Symmetric Hausdorff distance between two nonempty point lists, by brute
/// force with the classical early-exit pruning on the inner minimum.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyPointSet {
            context: "hausdorff distance",
        });
    }
    Ok(directed_hausdorff_sq(a, b)
        .max(directed_hausdorff_sq(b, a))
        .sqrt())
}

fn directed_hausdorff_sq(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut sup = 0.0f64;
    for p in a {
        let mut best = f64::INFINITY;
        for q in b {
            let d = squared_distance(p, q);
            if d < best {
                best = d;
                if best <= sup {
                    break; // cannot raise the supremum
                }
            }
        }
        if best > sup {
            sup = best;
        }
    }
    sup
}

/// Write a cloud CSV: `x_1..x_n, alpha_1..alpha_k, residual, component_label`.
pub fn save_cloud(
    cloud: &CriticalPointCloud,
    labeling: &ComponentLabeling,
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    for (p, &label) in cloud.points.iter().zip(&labeling.labels) {
        let fields: Vec<String> = p
            .x
            .iter()
            .chain(p.alpha.iter())
            .map(|v| format!("{v}"))
            .chain([format!("{}", p.residual), format!("{label}")])
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read back a cloud CSV with known dimensions.
pub fn load_cloud_positions(path: &Path, n: usize, k: usize) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != n + k + 2 {
            return Err(Error::MalformedRow {
                row: lineno + 1,
                detail: format!("expected {} columns, found {}", n + k + 2, fields.len()),
            });
        }
        let x: std::result::Result<Vec<f64>, _> =
            fields[..n].iter().map(|f| f.trim().parse()).collect();
        out.push(x.map_err(|_| Error::MalformedRow {
            row: lineno + 1,
            detail: "cannot parse coordinate".into(),
        })?);
    }
    Ok(out)
}
