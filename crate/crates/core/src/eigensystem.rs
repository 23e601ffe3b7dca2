//! Kernels, their eigenpairs, and the quadrature used for inner products.
//!
//! Grid functions are plain `Vec<f64>` / `&[f64]` holding one value per
//! quadrature node. Every [`EigenSystem`] carries the grid its eigenfunctions
//! are tabulated on, and [`project`] / [`reconstruct`] work against it.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Default number of Simpson nodes on `[0, 1]`.
pub const DEFAULT_GRID_SIZE: usize = 513;
/// Default number of eigenpairs kept when expansions are truncated.
pub const DEFAULT_N_MAX: usize = 64;

const WEIGHT_SUM_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;
const MIN_EIGENVALUE: f64 = 1e-14;
const DEGENERACY_RTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Simpson,
    Trapezoid,
    Custom,
}

/// Nodes and weights discretizing the `L²(a, b)` inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
    a: f64,
    b: f64,
    rule: QuadratureRule,
}

impl QuadratureGrid {
    /// Builds a grid from explicit nodes and weights.
    pub fn new(points: Vec<f64>, weights: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        Self::with_rule(points, weights, a, b, QuadratureRule::Custom)
    }

    fn with_rule(
        points: Vec<f64>,
        weights: Vec<f64>,
        a: f64,
        b: f64,
        rule: QuadratureRule,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Grid(format!("interval [{a}, {b}] is empty")));
        }
        if points.len() != weights.len() {
            return Err(Error::Grid(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.len() < 3 {
            return Err(Error::Grid("at least 3 nodes are required".into()));
        }
        if points.iter().any(|&x| !(a..=b).contains(&x)) {
            return Err(Error::Grid(format!("nodes must lie in [{a}, {b}]")));
        }
        if points.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Grid("nodes must be strictly increasing".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - (b - a)).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Grid(format!(
                "weights sum to {total}, expected {}",
                b - a
            )));
        }
        Ok(QuadratureGrid {
            points,
            weights,
            a,
            b,
            rule,
        })
    }

    /// Composite Simpson rule on `n` uniform nodes (`n` odd).
    pub fn simpson(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::Grid(format!(
                "Simpson rule needs an odd node count >= 3, got {n}"
            )));
        }
        let points = uniform_points(a, b, n);
        let h = (b - a) / (n - 1) as f64;
        let weights = (0..n)
            .map(|i| {
                let m = if i == 0 || i == n - 1 {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                m * h / 3.0
            })
            .collect();
        Self::with_rule(points, weights, a, b, QuadratureRule::Simpson)
    }

    /// Composite trapezoid rule on `n` uniform nodes.
    pub fn trapezoid(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Grid(format!("need at least 3 nodes, got {n}")));
        }
        let points = uniform_points(a, b, n);
        let h = (b - a) / (n - 1) as f64;
        let weights = (0..n)
            .map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h })
            .collect();
        Self::with_rule(points, weights, a, b, QuadratureRule::Trapezoid)
    }

    /// Simpson grid on `[0, 1]`.
    pub fn unit(n: usize) -> Result<Self> {
        Self::simpson(0.0, 1.0, n)
    }

    /// Trapezoid weights on arbitrary increasing nodes spanning `[a, b]`.
    pub fn trapezoid_on(points: Vec<f64>) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::Grid(format!("need at least 3 nodes, got {n}")));
        }
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = points[i + 1] - points[i];
            weights[i] += h / 2.0;
            weights[i + 1] += h / 2.0;
        }
        let (a, b) = (points[0], points[n - 1]);
        Self::with_rule(points, weights, a, b, QuadratureRule::Trapezoid)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|&x| f(x)).collect()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.len());
        debug_assert_eq!(g.len(), self.len());
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (x, y))| w * x * y)
            .sum()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner(f, f).sqrt()
    }

    /// The same rule on every other node, with the node indices kept.
    ///
    /// Only uniform Simpson (node count `4m + 1`) and trapezoid (odd node
    /// count) grids can be coarsened.
    pub fn coarsen(&self) -> Result<(QuadratureGrid, Vec<usize>)> {
        let n = self.len();
        let coarse_n = n.div_ceil(2);
        let grid = match self.rule {
            QuadratureRule::Simpson if (n - 1).is_multiple_of(4) => {
                QuadratureGrid::simpson(self.a, self.b, coarse_n)?
            }
            QuadratureRule::Trapezoid if n % 2 == 1 && self.is_uniform() => {
                QuadratureGrid::trapezoid(self.a, self.b, coarse_n)?
            }
            _ => {
                return Err(Error::Grid(format!(
                    "{:?} grid with {n} nodes cannot be coarsened",
                    self.rule
                )))
            }
        };
        Ok((grid, (0..n).step_by(2).collect()))
    }

    fn is_uniform(&self) -> bool {
        let h = (self.b - self.a) / (self.len() - 1) as f64;
        self.points
            .windows(2)
            .all(|p| ((p[1] - p[0]) - h).abs() <= 1e-9 * h)
    }
}

fn uniform_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + i as f64 * h })
        .collect()
}

/// The Green's-function kernel of `-d²/dx²` on `[0, 1]` with Dirichlet ends.
pub fn sample_kernel_eval(x: f64, y: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
        return Err(Error::Domain(format!(
            "sample kernel is defined on [0,1]^2, got ({x}, {y})"
        )));
    }
    Ok(if y <= x { (1.0 - x) * y } else { x * (1.0 - y) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenKind {
    AnalyticSampleKernel,
    NumericTabulated,
}

/// Eigenvalues `λ_1 > λ_2 > … > 0` and eigenfunctions tabulated on a grid.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    kind: EigenKind,
    eigenvalues: Vec<f64>,
    grid: QuadratureGrid,
    // row k-1 holds ψ_k at every grid node
    table: Vec<f64>,
}

impl EigenSystem {
    pub fn kind(&self) -> EigenKind {
        self.kind
    }

    /// Number of available eigenpairs.
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.count() {
            Err(Error::Index {
                index: k,
                max: self.count(),
            })
        } else {
            Ok(())
        }
    }

    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        Ok(self.eigenvalues[k - 1])
    }

    /// `ψ_k` at the grid nodes.
    pub fn basis(&self, k: usize) -> Result<&[f64]> {
        self.check_index(k)?;
        let n = self.grid.len();
        Ok(&self.table[(k - 1) * n..k * n])
    }

    /// `ψ_k(x)`. Numeric eigenfunctions are linearly interpolated between
    /// grid nodes.
    pub fn eigenfunction(&self, k: usize, x: f64) -> Result<f64> {
        self.check_index(k)?;
        if !(self.grid.a..=self.grid.b).contains(&x) {
            return Err(Error::Domain(format!(
                "x = {x} outside [{}, {}]",
                self.grid.a, self.grid.b
            )));
        }
        match self.kind {
            EigenKind::AnalyticSampleKernel => Ok(analytic_psi(k, x)),
            EigenKind::NumericTabulated => {
                let pts = self.grid.points();
                let values = self.basis(k)?;
                let j = pts.partition_point(|&p| p <= x).clamp(1, pts.len() - 1);
                let t = (x - pts[j - 1]) / (pts[j] - pts[j - 1]);
                Ok(values[j - 1] + t * (values[j] - values[j - 1]))
            }
        }
    }
}

fn analytic_psi(k: usize, x: f64) -> f64 {
    SQRT_2 * (k as f64 * PI * x).sin()
}

fn analytic_lambda(k: usize) -> f64 {
    let kp = k as f64 * PI;
    1.0 / (kp * kp)
}

/// Closed-form eigensystem of the sample kernel on the default grid.
pub fn analytic_eigensystem(n_max: usize) -> Result<EigenSystem> {
    analytic_eigensystem_on(QuadratureGrid::unit(DEFAULT_GRID_SIZE)?, n_max)
}

/// `λ_k = 1/(k²π²)`, `ψ_k(x) = √2 sin(kπx)` tabulated on `grid`.
pub fn analytic_eigensystem_on(grid: QuadratureGrid, n_max: usize) -> Result<EigenSystem> {
    if n_max == 0 {
        return Err(Error::Parameter("n_max must be at least 1".into()));
    }
    if grid.a() != 0.0 || grid.b() != 1.0 {
        return Err(Error::Grid("the sample kernel lives on [0, 1]".into()));
    }
    let mut table = Vec::with_capacity(n_max * grid.len());
    for k in 1..=n_max {
        table.extend(grid.points().iter().map(|&x| analytic_psi(k, x)));
    }
    Ok(EigenSystem {
        kind: EigenKind::AnalyticSampleKernel,
        eigenvalues: (1..=n_max).map(analytic_lambda).collect(),
        grid,
        table,
    })
}

/// A real symmetric kernel tabulated on a quadrature grid.
#[derive(Debug, Clone)]
pub struct TabulatedKernel {
    grid: QuadratureGrid,
    values: Vec<f64>,
}

impl TabulatedKernel {
    /// `values` is row-major, `values[i * n + j] = K(x_i, x_j)`.
    pub fn new(grid: QuadratureGrid, values: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if values.len() != n * n {
            return Err(Error::Parameter(format!(
                "kernel table has {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!(
                "non-finite kernel value at ({}, {})",
                bad / n,
                bad % n
            )));
        }
        for i in 0..n {
            for j in i + 1..n {
                let diff = (values[i * n + j] - values[j * n + i]).abs();
                if diff > SYMMETRY_TOL {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(TabulatedKernel { grid, values })
    }

    pub fn from_fn(grid: QuadratureGrid, k: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let pts = grid.points();
        let values = pts
            .iter()
            .flat_map(|&x| pts.iter().map(move |&y| (x, y)))
            .map(|(x, y)| k(x, y))
            .collect();
        Self::new(grid, values)
    }

    /// The sample kernel tabulated on `grid` (which must lie in `[0, 1]`).
    pub fn sample(grid: QuadratureGrid) -> Result<Self> {
        if grid.a() < 0.0 || grid.b() > 1.0 {
            return Err(Error::Grid("the sample kernel lives on [0, 1]".into()));
        }
        Self::from_fn(grid, |x, y| {
            sample_kernel_eval(x, y).expect("nodes checked to lie in [0, 1]")
        })
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.len() + j]
    }

    /// Quadrature approximation of `∫ K(x_i, y) f(y) dy` at every node.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.grid.len();
        check_len(f, n)?;
        let w = self.grid.weights();
        Ok((0..n)
            .map(|i| {
                let row = &self.values[i * n..(i + 1) * n];
                row.iter().zip(w).zip(f).map(|((k, w), f)| k * w * f).sum()
            })
            .collect())
    }

    /// The kernel restricted to every other node of a coarsenable grid.
    pub fn coarsen(&self) -> Result<TabulatedKernel> {
        let (grid, idx) = self.grid.coarsen()?;
        let values = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Ok(TabulatedKernel { grid, values })
    }

    /// Reads a long-form CSV with header `x,y,value`.
    ///
    /// The distinct `x` values become the nodes. Uniform node sets of odd size
    /// get Simpson weights, anything else trapezoid weights.
    pub fn load_long_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
        let headers = reader.headers().map_err(|e| Error::parse(path, e))?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["x", "y", "value"] {
            return Err(Error::parse(path, "expected header \"x,y,value\""));
        }
        let mut triples = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::parse(path, e))?;
            let field = |i: usize| -> Result<f64> {
                rec[i]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse(path, format!("{}: {e}", &rec[i])))
            };
            triples.push((field(0)?, field(1)?, field(2)?));
        }
        let mut xs: Vec<f64> = triples.iter().map(|t| t.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let n = xs.len();
        if triples.len() != n * n {
            return Err(Error::parse(
                path,
                format!("{} rows do not form a {n}x{n} table", triples.len()),
            ));
        }
        let locate = |v: f64| -> Result<usize> {
            xs.binary_search_by(|p| p.total_cmp(&v))
                .map_err(|_| Error::parse(path, format!("y = {v} is not one of the x nodes")))
        };
        let mut values = vec![f64::NAN; n * n];
        for (x, y, v) in triples {
            values[locate(x)? * n + locate(y)?] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::parse(path, "missing (x, y) combinations"));
        }
        let grid = grid_for_nodes(xs)?;
        Self::new(grid, values)
    }

    /// Reads a dense headerless matrix CSV plus a sidecar grid CSV with header
    /// `x,weight`.
    pub fn load_dense_csv(matrix: impl AsRef<Path>, grid: impl AsRef<Path>) -> Result<Self> {
        let gpath = grid.as_ref();
        let mut reader = csv::Reader::from_path(gpath).map_err(|e| Error::parse(gpath, e))?;
        let headers = reader.headers().map_err(|e| Error::parse(gpath, e))?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["x", "weight"] {
            return Err(Error::parse(gpath, "expected header \"x,weight\""));
        }
        let (mut points, mut weights) = (Vec::new(), Vec::new());
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::parse(gpath, e))?;
            let x: f64 = rec[0].trim().parse().map_err(|e| Error::parse(gpath, e))?;
            let w: f64 = rec[1].trim().parse().map_err(|e| Error::parse(gpath, e))?;
            points.push(x);
            weights.push(w);
        }
        let (a, b) = match (points.first(), points.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(Error::parse(gpath, "empty grid")),
        };
        let grid = QuadratureGrid::new(points, weights, a, b)?;

        let mpath = matrix.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(mpath)
            .map_err(|e| Error::parse(mpath, e))?;
        let mut values = Vec::with_capacity(grid.len() * grid.len());
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::parse(mpath, e))?;
            if rec.len() != grid.len() {
                return Err(Error::parse(
                    mpath,
                    format!("row has {} columns, grid has {} nodes", rec.len(), grid.len()),
                ));
            }
            for field in rec.iter() {
                values.push(field.trim().parse().map_err(|e| Error::parse(mpath, e))?);
            }
        }
        Self::new(grid, values)
    }
}

fn grid_for_nodes(xs: Vec<f64>) -> Result<QuadratureGrid> {
    let n = xs.len();
    if n < 3 {
        return Err(Error::Grid(format!("need at least 3 nodes, got {n}")));
    }
    let (a, b) = (xs[0], xs[n - 1]);
    let h = (b - a) / (n - 1) as f64;
    let uniform = xs
        .windows(2)
        .all(|p| ((p[1] - p[0]) - h).abs() <= 1e-9 * h);
    if uniform && n % 2 == 1 {
        QuadratureGrid::simpson(a, b, n)
    } else {
        QuadratureGrid::trapezoid_on(xs)
    }
}

/// Nyström discretization: the `n_max` leading eigenpairs of `W^½ K W^½`.
pub fn numeric_eigensystem(kernel: &TabulatedKernel, n_max: usize) -> Result<EigenSystem> {
    let grid = kernel.grid().clone();
    let n = grid.len();
    if n_max == 0 || n_max > n {
        return Err(Error::Parameter(format!(
            "n_max must be in 1..={n}, got {n_max}"
        )));
    }
    if grid.weights().iter().any(|&w| w <= 0.0) {
        return Err(Error::Grid("Nyström needs strictly positive weights".into()));
    }
    let sqrt_w: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| sqrt_w[i] * kernel.get(i, j) * sqrt_w[j]);
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric QR iteration did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    let eigenvalues: Vec<f64> = order[..n_max].iter().map(|&i| eig.eigenvalues[i]).collect();
    for (idx, &value) in eigenvalues.iter().enumerate() {
        if value <= MIN_EIGENVALUE {
            return Err(Error::RankDeficient {
                index: idx + 1,
                value,
            });
        }
    }
    // The last kept eigenvalue must also be separated from the first dropped one.
    let checked = n_max.min(n - 1);
    for idx in 0..checked {
        let (hi, lo) = (eig.eigenvalues[order[idx]], eig.eigenvalues[order[idx + 1]]);
        if hi - lo <= DEGENERACY_RTOL * hi.abs() {
            return Err(Error::Degenerate {
                index: idx + 1,
                value: hi,
            });
        }
    }

    let mut table = Vec::with_capacity(n_max * n);
    for &col in &order[..n_max] {
        let v = eig.eigenvectors.column(col);
        let mut psi: Vec<f64> = (0..n).map(|i| v[i] / sqrt_w[i]).collect();
        let scale = psi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        if let Some(first) = psi.iter().find(|p| p.abs() > 1e-10 * scale) {
            if *first < 0.0 {
                psi.iter_mut().for_each(|p| *p = -*p);
            }
        }
        table.extend(psi);
    }

    Ok(EigenSystem {
        kind: EigenKind::NumericTabulated,
        eigenvalues,
        grid,
        table,
    })
}

/// Nyström eigenvalues improved by one Richardson step over the grid and its
/// every-other-node subgrid, assuming an `O(h²)` leading error (kernels with a
/// derivative jump on the diagonal).
pub fn numeric_eigenvalues_extrapolated(
    kernel: &TabulatedKernel,
    n_max: usize,
) -> Result<Vec<f64>> {
    let fine = numeric_eigensystem(kernel, n_max)?;
    let coarse = numeric_eigensystem(&kernel.coarsen()?, n_max)?;
    Ok(fine
        .eigenvalues()
        .iter()
        .zip(coarse.eigenvalues())
        .map(|(f, c)| (4.0 * f - c) / 3.0)
        .collect())
}

fn check_len(f: &[f64], n: usize) -> Result<()> {
    if f.len() != n {
        return Err(Error::Domain(format!(
            "grid function has {} samples, grid has {n} nodes",
            f.len()
        )));
    }
    Ok(())
}

/// Quadrature approximation of `(f, ψ_k)`.
pub fn project(f: &[f64], es: &EigenSystem, k: usize) -> Result<f64> {
    check_len(f, es.grid().len())?;
    Ok(es.grid().inner(f, es.basis(k)?))
}

/// `(f, ψ_k)` for `k = 1..=n`.
pub fn project_all(f: &[f64], es: &EigenSystem, n: usize) -> Result<Vec<f64>> {
    check_len(f, es.grid().len())?;
    if n > es.count() {
        return Err(Error::Index {
            index: n,
            max: es.count(),
        });
    }
    let wf: Vec<f64> = es
        .grid()
        .weights()
        .iter()
        .zip(f)
        .map(|(w, f)| w * f)
        .collect();
    (1..=n)
        .map(|k| Ok(es.basis(k)?.iter().zip(&wf).map(|(p, w)| p * w).sum()))
        .collect()
}

/// `Σ c_k ψ_k` sampled on `grid`.
pub fn reconstruct(
    coeffs: &[(usize, f64)],
    es: &EigenSystem,
    grid: &QuadratureGrid,
) -> Result<Vec<f64>> {
    for &(k, _) in coeffs {
        es.check_index(k)?;
    }
    let mut out = vec![0.0; grid.len()];
    if grid == es.grid() {
        for &(k, c) in coeffs {
            if c == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(es.basis(k)?) {
                *o += c * p;
            }
        }
    } else {
        for (o, &x) in out.iter_mut().zip(grid.points()) {
            for &(k, c) in coeffs {
                *o += c * es.eigenfunction(k, x)?;
            }
        }
    }
    Ok(out)
}

/// Reconstruction from a dense coefficient vector indexed from `k = 1`.
pub fn reconstruct_dense(coeffs: &[f64], es: &EigenSystem) -> Result<Vec<f64>> {
    let pairs: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| (i + 1, c))
        .collect();
    reconstruct(&pairs, es, es.grid())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn sample_kernel_values() {
        assert_eq!(sample_kernel_eval(0.5, 0.5).unwrap(), 0.25);
        assert_eq!(sample_kernel_eval(0.25, 0.75).unwrap(), 0.0625);
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(sample_kernel_eval(x, 0.0).unwrap(), 0.0);
        }
        assert_eq!(
            sample_kernel_eval(0.2, 0.7).unwrap(),
            sample_kernel_eval(0.7, 0.2).unwrap()
        );
        assert!(matches!(
            sample_kernel_eval(1.5, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(sample_kernel_eval(0.5, -0.1).is_err());
    }

    #[test]
    fn grid_invariants() {
        let g = QuadratureGrid::unit(513).unwrap();
        assert!(close(g.weights().iter().sum::<f64>(), 1.0, 1e-12));
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(*g.points().last().unwrap(), 1.0);
        assert!(QuadratureGrid::simpson(0.0, 1.0, 4).is_err());
        assert!(QuadratureGrid::new(vec![0.0, 0.5], vec![0.5, 0.5], 0.0, 1.0).is_err());
        assert!(QuadratureGrid::new(vec![0.0, 0.6, 0.5], vec![0.3; 3], 0.0, 1.0).is_err());
        assert!(
            QuadratureGrid::new(vec![0.0, 0.5, 1.0], vec![0.25, 0.5, 0.3], 0.0, 1.0).is_err()
        );
        assert!(
            QuadratureGrid::new(vec![0.0, 0.5, 1.0], vec![0.25, 0.5, 0.25], 0.0, 1.0).is_ok()
        );
    }

    #[test]
    fn analytic_values() {
        let es = analytic_eigensystem(13).unwrap();
        assert!(close(es.eigenvalue(1).unwrap(), 0.1013211836, 1e-10));
        assert!(close(es.eigenfunction(1, 0.5).unwrap(), SQRT_2, 1e-15));
        assert!(close(
            es.eigenvalue(13).unwrap(),
            1.0 / (169.0 * PI * PI),
            1e-18
        ));
        assert!(close(es.eigenvalue(13).unwrap(), 5.994e-4, 5e-7));
        assert!(analytic_eigensystem(0).is_err());
        assert!(matches!(
            es.eigenvalue(14),
            Err(Error::Index { index: 14, max: 13 })
        ));
    }

    #[test]
    fn projection_examples() {
        let es = analytic_eigensystem(8).unwrap();
        let psi2 = es.basis(2).unwrap().to_vec();
        assert!(close(project(&psi2, &es, 2).unwrap(), 1.0, 1e-8));
        assert!(close(project(&psi2, &es, 5).unwrap(), 0.0, 1e-8));
        assert!(project(&psi2, &es, 9).is_err());
        assert!(project(&psi2, &es, 0).is_err());

        // ∫ x(1-x) √2 sin(πx) dx = 4√2/π³, evaluated in closed form.
        let f = es.grid().sample(|x| x * (1.0 - x));
        let expected = 4.0 * SQRT_2 / PI.powi(3);
        assert!(close(project(&f, &es, 1).unwrap(), expected, 1e-9));
        assert!(close(expected, 0.182442, 1e-6));
    }

    #[test]
    fn reconstruction_examples() {
        let es = analytic_eigensystem(8).unwrap();
        let grid = es.grid().clone();
        let one = reconstruct(&[(1, 1.0)], &es, &grid).unwrap();
        for (v, &x) in one.iter().zip(grid.points()) {
            assert!(close(*v, SQRT_2 * (PI * x).sin(), 1e-15));
        }
        assert!(reconstruct(&[], &es, &grid).unwrap().iter().all(|&v| v == 0.0));
        assert!(reconstruct(&[(9, 1.0)], &es, &grid).is_err());

        let f: Vec<f64> = es
            .basis(1)
            .unwrap()
            .iter()
            .zip(es.basis(4).unwrap())
            .map(|(a, b)| a + 0.5 * b)
            .collect();
        let c = project_all(&f, &es, 8).unwrap();
        let back = reconstruct_dense(&c, &es).unwrap();
        let diff: Vec<f64> = back.iter().zip(&f).map(|(a, b)| a - b).collect();
        assert!(grid.norm(&diff) < 1e-8);

        // off-grid evaluation uses the closed form
        let other = QuadratureGrid::unit(101).unwrap();
        let r = reconstruct(&[(3, 2.0)], &es, &other).unwrap();
        assert!(close(r[50], 2.0 * SQRT_2 * (1.5 * PI).sin(), 1e-12));
    }

    #[test]
    fn numeric_matches_analytic_leading_eigenvalue() {
        let kernel = TabulatedKernel::sample(QuadratureGrid::unit(401).unwrap()).unwrap();
        let es = numeric_eigensystem(&kernel, 12).unwrap();
        assert_eq!(es.kind(), EigenKind::NumericTabulated);
        assert!(close(es.eigenvalue(1).unwrap(), 1.0 / (PI * PI), 1e-6));
        assert!(es.eigenvalues().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn numeric_eigenvalues_extrapolated_reach_1e5() {
        let kernel = TabulatedKernel::sample(QuadratureGrid::unit(401).unwrap()).unwrap();
        let lam = numeric_eigenvalues_extrapolated(&kernel, 10).unwrap();
        for (i, l) in lam.iter().enumerate() {
            let exact = analytic_lambda(i + 1);
            assert!(((l - exact) / exact).abs() < 1e-5, "k={} {l} {exact}", i + 1);
        }
    }

    #[test]
    fn numeric_eigenfunction_sign_and_shape() {
        // Trapezoid-weighted Nyström of this kernel has the discrete sine
        // vectors as exact eigenvectors.
        let grid = QuadratureGrid::trapezoid(0.0, 1.0, 401).unwrap();
        let kernel = TabulatedKernel::sample(grid.clone()).unwrap();
        let es = numeric_eigensystem(&kernel, 4).unwrap();
        let psi3 = es.basis(3).unwrap();
        for (v, &x) in psi3.iter().zip(grid.points()) {
            assert!(close(*v, SQRT_2 * (3.0 * PI * x).sin(), 1e-5));
        }

        // Simpson weighting: O(h²) eigenfunction error from the diagonal kink.
        let err = |n: usize| {
            let grid = QuadratureGrid::unit(n).unwrap();
            let es = numeric_eigensystem(&TabulatedKernel::sample(grid.clone()).unwrap(), 3)
                .unwrap();
            es.basis(3)
                .unwrap()
                .iter()
                .zip(grid.points())
                .map(|(v, &x)| (v - SQRT_2 * (3.0 * PI * x).sin()).abs())
                .fold(0.0, f64::max)
        };
        let (e201, e401) = (err(201), err(401));
        assert!(e401 < 1e-4, "{e401}");
        assert!(e201 / e401 > 3.5 && e201 / e401 < 4.5, "{e201} {e401}");
    }

    #[test]
    fn numeric_rejects_asymmetric_and_rank_deficient() {
        let grid = QuadratureGrid::unit(11).unwrap();
        let n = grid.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 2.0 + i as f64;
        }
        values[3 * n + 5] += 1e-6;
        assert!(matches!(
            TabulatedKernel::new(grid.clone(), values),
            Err(Error::NotSymmetric { i: 3, j: 5, .. })
        ));

        // rank one
        let k = TabulatedKernel::from_fn(grid.clone(), |x, y| x * y).unwrap();
        assert!(numeric_eigensystem(&k, 1).is_ok());
        assert!(matches!(
            numeric_eigensystem(&k, 2),
            Err(Error::RankDeficient { index: 2, .. }) | Err(Error::Degenerate { .. })
        ));

        // c·I has every eigenvalue repeated
        let id = TabulatedKernel::from_fn(grid, |x, y| if x == y { 1.0 } else { 0.0 }).unwrap();
        assert!(matches!(
            numeric_eigensystem(&id, 2),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn numeric_off_grid_interpolates() {
        let kernel = TabulatedKernel::sample(QuadratureGrid::unit(201).unwrap()).unwrap();
        let es = numeric_eigensystem(&kernel, 2).unwrap();
        let v = es.eigenfunction(1, 0.5025).unwrap();
        assert!(close(v, SQRT_2 * (PI * 0.5025).sin(), 1e-3));
        assert!(es.eigenfunction(1, 1.2).is_err());
    }

    #[test]
    fn coarsen_requires_compatible_grid() {
        assert!(QuadratureGrid::unit(11).unwrap().coarsen().is_err());
        let (g, idx) = QuadratureGrid::unit(9).unwrap().coarsen().unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(idx, vec![0, 2, 4, 6, 8]);
    }
}
