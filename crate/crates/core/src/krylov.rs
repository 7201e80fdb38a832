//! Krylov solvers for the singular Laplacian system.
//!
//! Two kernel treatments are offered: deflation, which keeps every residual
//! orthogonal to the constant vector, and the rank-1 update
//! `A + (1/n) 1 1^T`, which turns the problem into an SPD one. Both can be
//! driven by plain preconditioned CG or by the flexible (generalized) CG
//! recurrence that tolerates nonlinear preconditioners.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AsmgError, Result};
use crate::sparse::{axpy, dot, mean, norm2, project_out_constant, SymSparseMatrix};

/// Symmetric linear operator.
pub trait Operator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl Operator for SymSparseMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec(x, y)
    }
}

/// `A + (1/n) 1 1^T`, applied as a sparse product plus a scalar correction.
pub struct Rank1Updated<'a>(pub &'a SymSparseMatrix);

impl Operator for Rank1Updated<'_> {
    fn dim(&self) -> usize {
        self.0.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.matvec(x, y);
        let m = mean(x);
        y.iter_mut().for_each(|v| *v += m);
    }
}

/// Residual-to-correction map. Implementations need not be linear.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()>;

    /// Whether `apply` is a fixed linear map.
    fn is_linear(&self) -> bool {
        true
    }
}

pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.copy_from_slice(r);
        Ok(())
    }
}

/// Diagonal scaling; zero diagonal entries pass the residual through.
pub struct Jacobi {
    inv_diag: Vec<f64>,
}

impl Jacobi {
    pub fn new(a: &SymSparseMatrix) -> Self {
        Self {
            inv_diag: a
                .diagonal()
                .into_iter()
                .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
                .collect(),
        }
    }
}

impl Preconditioner for Jacobi {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        z.iter_mut()
            .zip(r.iter().zip(&self.inv_diag))
            .for_each(|(z, (r, d))| *z = r * d);
        Ok(())
    }
}

impl<P: Preconditioner + ?Sized> Preconditioner for &P {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        (**self).apply(r, z)
    }

    fn is_linear(&self) -> bool {
        (**self).is_linear()
    }
}

/// Preconditioner for the rank-1 updated system: the wrapped map acts on
/// the complement of the constants and the constant direction, where the
/// updated matrix has eigenvalue 1, is inverted exactly.
struct Rank1Precond<'a, P: ?Sized>(&'a P);

impl<P: Preconditioner + ?Sized> Preconditioner for Rank1Precond<'_, P> {
    fn apply(&self, r: &[f64], z: &mut [f64]) -> Result<()> {
        let m = mean(r);
        let pr: Vec<f64> = r.iter().map(|v| v - m).collect();
        self.0.apply(&pr, z)?;
        project_out_constant(z);
        z.iter_mut().for_each(|v| *v += m);
        Ok(())
    }

    fn is_linear(&self) -> bool {
        self.0.is_linear()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelMode {
    Deflate,
    Rank1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OuterMethod {
    /// GCG when the preconditioner is nonlinear, PCG otherwise.
    Auto,
    Pcg,
    /// Flexible CG keeping `window` previous search directions.
    Gcg { window: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveParams {
    /// Relative residual target `|r_k| / |r_0|`.
    pub tol: f64,
    pub max_iters: usize,
    pub kernel: KernelMode,
    pub outer: OuterMethod,
}

impl Default for SolveParams {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 500,
            kernel: KernelMode::Deflate,
            outer: OuterMethod::Auto,
        }
    }
}

pub const OUTER_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// `|r_k| / |r_0|` for `k = 0..=iterations`.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Dofs per level of the preconditioner, when one was used.
    pub cdof: Vec<usize>,
    pub wall_time_s: f64,
    /// `|P(b - A u)| / |P(b - A u_0)|` recomputed from the returned
    /// solution, `P` the projection onto mean-free vectors.
    pub true_relative_residual: f64,
}

impl SolveReport {
    pub fn final_relative_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }
}

/// Seeded uniform start vector in `[-1, 1]` with its mean removed.
pub fn random_start(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    project_out_constant(&mut x);
    x
}

fn check_rhs(b: &[f64]) -> Vec<f64> {
    let mut b = b.to_vec();
    let m = mean(&b);
    if m.abs() * (b.len() as f64).sqrt() > 1e-12 * norm2(&b) {
        log_warn(&format!(
            "right-hand side has a kernel component (mean {m:e}); projecting it out"
        ));
    }
    project_out_constant(&mut b);
    b
}

fn log_warn(msg: &str) {
    eprintln!("warning: {msg}");
}

/// Solves `A u = b` with residuals kept orthogonal to the constants. `x`
/// holds the start vector on entry and the mean-free solution on exit.
pub fn deflated_pcg<P: Preconditioner + ?Sized>(
    a: &SymSparseMatrix,
    b: &[f64],
    x: &mut [f64],
    precond: &P,
    params: &SolveParams,
) -> Result<SolveReport> {
    check_dims(a.n(), b.len(), x.len())?;
    let start = Instant::now();
    let b = check_rhs(b);
    project_out_constant(x);
    let r0 = deflated_residual_norm(a, &b, x);
    let mut report = run_outer(a, &b, x, precond, params, true)?;
    project_out_constant(x);
    report.true_relative_residual = relative(deflated_residual_norm(a, &b, x), r0);
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Solves `(A + (1/n) 1 1^T) v = b` and returns `u = v - mean(v)` in `x`.
pub fn rank1_pcg<P: Preconditioner + ?Sized>(
    a: &SymSparseMatrix,
    b: &[f64],
    x: &mut [f64],
    precond: &P,
    params: &SolveParams,
) -> Result<SolveReport> {
    check_dims(a.n(), b.len(), x.len())?;
    let start = Instant::now();
    let op = Rank1Updated(a);
    let pre = Rank1Precond(precond);
    let r0 = deflated_residual_norm(a, b, x);
    let mut report = run_outer(&op, b, x, &pre, params, false)?;
    project_out_constant(x);
    report.true_relative_residual = relative(deflated_residual_norm(a, b, x), r0);
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Dispatches on `params.kernel`.
pub fn solve<P: Preconditioner + ?Sized>(
    a: &SymSparseMatrix,
    b: &[f64],
    x: &mut [f64],
    precond: &P,
    params: &SolveParams,
) -> Result<SolveReport> {
    match params.kernel {
        KernelMode::Deflate => deflated_pcg(a, b, x, precond, params),
        KernelMode::Rank1 => rank1_pcg(a, b, x, precond, params),
    }
}

/// `|P(b - A x)|`.
pub fn deflated_residual_norm(a: &SymSparseMatrix, b: &[f64], x: &[f64]) -> f64 {
    let mut r = a.mul_vec(x);
    r.iter_mut().zip(b).for_each(|(r, b)| *r = b - *r);
    project_out_constant(&mut r);
    norm2(&r)
}

fn relative(r: f64, r0: f64) -> f64 {
    if r0 == 0.0 {
        r
    } else {
        r / r0
    }
}

fn check_dims(n: usize, b: usize, x: usize) -> Result<()> {
    for (found, context) in [(b, "right-hand side length"), (x, "start vector length")] {
        if found != n {
            return Err(AsmgError::DimensionMismatch {
                context,
                expected: n,
                found,
            });
        }
    }
    Ok(())
}

fn run_outer<O: Operator + ?Sized, P: Preconditioner + ?Sized>(
    op: &O,
    b: &[f64],
    x: &mut [f64],
    precond: &P,
    params: &SolveParams,
    deflate: bool,
) -> Result<SolveReport> {
    if !(params.tol > 0.0) {
        return Err(AsmgError::InvalidConfig(format!("tolerance {} must be positive", params.tol)));
    }
    let window = match params.outer {
        OuterMethod::Pcg => None,
        OuterMethod::Gcg { window } => Some(window.max(1)),
        OuterMethod::Auto if precond.is_linear() => None,
        OuterMethod::Auto => Some(OUTER_WINDOW),
    };
    let stop = Stop::Tolerance {
        tol: params.tol,
        max_iters: params.max_iters,
    };
    let (iterations, history, converged) = match window {
        None => pcg_core(op, b, x, precond, stop, deflate)?,
        Some(w) => gcg_core(op, b, x, precond, w, stop, deflate)?,
    };
    Ok(SolveReport {
        iterations,
        residual_history: history,
        converged,
        cdof: Vec::new(),
        wall_time_s: 0.0,
        true_relative_residual: f64::NAN,
    })
}

#[derive(Debug, Clone, Copy)]
enum Stop {
    Tolerance { tol: f64, max_iters: usize },
    Fixed(usize),
}

impl Stop {
    fn max_iters(self) -> usize {
        match self {
            Stop::Tolerance { max_iters, .. } => max_iters,
            Stop::Fixed(k) => k,
        }
    }

    fn done(self, rel: f64) -> bool {
        match self {
            Stop::Tolerance { tol, .. } => rel <= tol,
            Stop::Fixed(_) => rel == 0.0,
        }
    }
}

fn finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(AsmgError::NonFinite(0))
    }
}

fn pcg_core<O: Operator + ?Sized, P: Preconditioner + ?Sized>(
    op: &O,
    b: &[f64],
    x: &mut [f64],
    precond: &P,
    stop: Stop,
    deflate: bool,
) -> Result<(usize, Vec<f64>, bool)> {
    let n = op.dim();
    let mut r = vec![0.0; n];
    op.apply(x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, b)| *r = b - *r);
    if deflate {
        project_out_constant(&mut r);
    }
    let r0 = norm2(&r);
    let mut history = vec![1.0];
    if r0 == 0.0 {
        return Ok((0, vec![0.0], true));
    }
    let mut z = vec![0.0; n];
    let mut q = vec![0.0; n];
    precond.apply(&r, &mut z)?;
    if deflate {
        project_out_constant(&mut z);
    }
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=stop.max_iters() {
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            finite(&q)?;
            return Ok((it - 1, history, false));
        }
        let alpha = rz / pq;
        axpy(alpha, &p, x);
        axpy(-alpha, &q, &mut r);
        if deflate {
            project_out_constant(&mut r);
        }
        let rel = norm2(&r) / r0;
        if !rel.is_finite() {
            return Err(AsmgError::NonFinite(0));
        }
        history.push(rel);
        if stop.done(rel) {
            return Ok((it, history, true));
        }
        precond.apply(&r, &mut z)?;
        if deflate {
            project_out_constant(&mut z);
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(p, z)| *p = z + beta * *p);
    }
    Ok((stop.max_iters(), history, false))
}

/// Flexible CG: each new direction is the preconditioned residual
/// A-orthogonalized against the last `window` directions.
fn gcg_core<O: Operator + ?Sized, P: Preconditioner + ?Sized>(
    op: &O,
    b: &[f64],
    x: &mut [f64],
    precond: &P,
    window: usize,
    stop: Stop,
    deflate: bool,
) -> Result<(usize, Vec<f64>, bool)> {
    let n = op.dim();
    let mut r = vec![0.0; n];
    op.apply(x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, b)| *r = b - *r);
    if deflate {
        project_out_constant(&mut r);
    }
    let r0 = norm2(&r);
    let mut history = vec![1.0];
    if r0 == 0.0 {
        return Ok((0, vec![0.0], true));
    }
    // (p_j, A p_j, p_j^T A p_j)
    let mut dirs: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> =
        std::collections::VecDeque::with_capacity(window);
    let mut z = vec![0.0; n];
    for it in 1..=stop.max_iters() {
        precond.apply(&r, &mut z)?;
        if deflate {
            project_out_constant(&mut z);
        }
        let mut p = z.clone();
        for (pj, qj, dj) in &dirs {
            let c = dot(&z, qj) / dj;
            axpy(-c, pj, &mut p);
        }
        let mut q = vec![0.0; n];
        op.apply(&p, &mut q);
        let mut pq = dot(&p, &q);
        if !(pq > f64::EPSILON * dot(&p, &p).max(f64::MIN_POSITIVE)) {
            // orthogonalization broke down: take a plain preconditioned
            // steepest descent step instead
            p.copy_from_slice(&z);
            op.apply(&p, &mut q);
            pq = dot(&p, &q);
            dirs.clear();
            if !(pq > 0.0) {
                finite(&q)?;
                return Ok((it - 1, history, false));
            }
        }
        let alpha = dot(&p, &r) / pq;
        axpy(alpha, &p, x);
        axpy(-alpha, &q, &mut r);
        if deflate {
            project_out_constant(&mut r);
        }
        let rel = norm2(&r) / r0;
        if !rel.is_finite() {
            return Err(AsmgError::NonFinite(0));
        }
        history.push(rel);
        if stop.done(rel) {
            return Ok((it, history, true));
        }
        if dirs.len() == window {
            dirs.pop_front();
        }
        dirs.push_back((p, q, pq));
    }
    let converged = matches!(stop, Stop::Fixed(_));
    Ok((stop.max_iters(), history, converged))
}

/// `iters` steps of generalized CG from a zero start, with every new
/// direction orthogonalized against all previous ones. Used as the
/// nonlinear coarse-level corrector; when `deflate` is set all vectors are
/// kept mean free.
pub fn gcg_solve<O: Operator + ?Sized, P: Preconditioner + ?Sized>(
    op: &O,
    b: &[f64],
    precond: &P,
    iters: usize,
    deflate: bool,
) -> Result<Vec<f64>> {
    let mut x = vec![0.0; op.dim()];
    gcg_core(op, b, &mut x, precond, iters.max(1), Stop::Fixed(iters), deflate)?;
    Ok(x)
}

/// Generalized CG run to a relative residual tolerance.
pub fn gcg_solve_tol<O: Operator + ?Sized, P: Preconditioner + ?Sized>(
    op: &O,
    b: &[f64],
    x: &mut [f64],
    precond: &P,
    window: usize,
    tol: f64,
    max_iters: usize,
    deflate: bool,
) -> Result<SolveReport> {
    let start = Instant::now();
    let (iterations, residual_history, converged) = gcg_core(
        op,
        b,
        x,
        precond,
        window,
        Stop::Tolerance { tol, max_iters },
        deflate,
    )?;
    Ok(SolveReport {
        iterations,
        residual_history,
        converged,
        cdof: Vec::new(),
        wall_time_s: start.elapsed().as_secs_f64(),
        true_relative_residual: f64::NAN,
    })
}

/// Plain PCG on an SPD operator; returns the iterate after each step.
pub fn pcg_iterates<O: Operator + ?Sized, P: Preconditioner + ?Sized>(
    op: &O,
    b: &[f64],
    precond: &P,
    steps: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for k in 1..=steps {
        let mut x = vec![0.0; op.dim()];
        pcg_core(op, b, &mut x, precond, Stop::Fixed(k), false)?;
        out.push(x);
    }
    Ok(out)
}

/// Flexible CG iterates with the given window, for comparison with
/// [`pcg_iterates`].
pub fn gcg_iterates<O: Operator + ?Sized, P: Preconditioner + ?Sized>(
    op: &O,
    b: &[f64],
    precond: &P,
    window: usize,
    steps: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for k in 1..=steps {
        let mut x = vec![0.0; op.dim()];
        gcg_core(op, b, &mut x, precond, window, Stop::Fixed(k), false)?;
        out.push(x);
    }
    Ok(out)
}
