//! Runs the DYS operator on concrete diagonal quadratic instances. For these
//! the operator is an exact diagonal linear map whose entries are real
//! evaluations of the symbol polynomial, which makes the symbol reduction
//! machine-checkable and provides empirical lower bounds on Lipschitz
//! constants.

use num_complex::Complex64;

use crate::classes::{AlgoParams, FunctionClassParams, Smoothness};
use crate::error::Error;
use crate::symbol::zeta_dys;
use crate::util::l2_dist;

/// Diagonal quadratic x -> 1/2 sum c_i x_i^2 + sum b_i x_i with c_i >= 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSpec {
    curvatures: Vec<f64>,
    linear: Vec<f64>,
}

impl QuadraticSpec {
    pub fn new(curvatures: Vec<f64>, linear: Vec<f64>) -> Result<Self, Error> {
        if curvatures.len() != linear.len() {
            return Err(Error::DimensionMismatch(format!(
                "curvatures has {} entries but linear has {}",
                curvatures.len(),
                linear.len()
            )));
        }
        if curvatures.is_empty() {
            return Err(Error::InvalidQuadratic("need at least one coordinate".into()));
        }
        for (i, &c) in curvatures.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::InvalidQuadratic(format!(
                    "curvature {i} must be finite and >= 0, got {c}"
                )));
            }
        }
        for (i, &b) in linear.iter().enumerate() {
            if !b.is_finite() {
                return Err(Error::InvalidQuadratic(format!(
                    "linear coefficient {i} must be finite, got {b}"
                )));
            }
        }
        Ok(QuadraticSpec { curvatures, linear })
    }

    pub fn homogeneous(curvatures: Vec<f64>) -> Result<Self, Error> {
        let n = curvatures.len();
        Self::new(curvatures, vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.curvatures.len()
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn is_homogeneous(&self) -> bool {
        self.linear.iter().all(|&b| b == 0.0)
    }

    /// True iff every curvature lies in [mu, L] of the class.
    pub fn in_class(&self, cls: &FunctionClassParams) -> bool {
        let hi = match cls.l() {
            Smoothness::Finite(l) => l,
            Smoothness::Infinite => f64::INFINITY,
        };
        self.curvatures.iter().all(|&c| c >= cls.mu() && c <= hi)
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        self.check_dim(x)?;
        Ok(x.iter()
            .zip(&self.curvatures)
            .zip(&self.linear)
            .map(|((&x, &c), &b)| c * x + b)
            .collect())
    }

    /// Componentwise (x_i - alpha*b_i)/(1 + alpha*c_i), the unique minimizer
    /// of alpha*q(y) + 1/2 |x - y|^2.
    pub fn prox(&self, alpha: f64, x: &[f64]) -> Result<Vec<f64>, Error> {
        self.check_dim(x)?;
        Ok(x.iter()
            .zip(&self.curvatures)
            .zip(&self.linear)
            .map(|((&x, &c), &b)| (x - alpha * b) / (1.0 + alpha * c))
            .collect())
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), Error> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector has {} entries; instance dimension is {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// A concrete three-function problem instance plus iteration parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DysInstance {
    f: QuadraticSpec,
    g: QuadraticSpec,
    h: QuadraticSpec,
    params: AlgoParams,
}

impl DysInstance {
    pub fn new(
        f: QuadraticSpec,
        g: QuadraticSpec,
        h: QuadraticSpec,
        params: AlgoParams,
    ) -> Result<Self, Error> {
        if f.dim() != g.dim() || f.dim() != h.dim() {
            return Err(Error::DimensionMismatch(format!(
                "f, g, h have dimensions {}, {}, {}",
                f.dim(),
                g.dim(),
                h.dim()
            )));
        }
        Ok(DysInstance { f, g, h, params })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn f(&self) -> &QuadraticSpec {
        &self.f
    }

    pub fn g(&self) -> &QuadraticSpec {
        &self.g
    }

    pub fn h(&self) -> &QuadraticSpec {
        &self.h
    }

    pub fn params(&self) -> &AlgoParams {
        &self.params
    }

    /// One operator application:
    /// u = prox_g(z); v = prox_f(2u - z - alpha*grad_h(u)); z - lambda*u + lambda*v.
    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>, Error> {
        let alpha = self.params.alpha();
        let lambda = self.params.lambda();
        let u = self.g.prox(alpha, z)?;
        let grad = self.h.gradient(&u)?;
        let w: Vec<f64> = u
            .iter()
            .zip(z)
            .zip(&grad)
            .map(|((&u, &z), &gh)| 2.0 * u - z - alpha * gh)
            .collect();
        let v = self.f.prox(alpha, &w)?;
        Ok(z.iter()
            .zip(&u)
            .zip(&v)
            .map(|((&z, &u), &v)| z - lambda * u + lambda * v)
            .collect())
    }

    /// For homogeneous instances the operator is diagonal linear; entry i is
    /// the symbol evaluated at the real triple
    /// (1/(1 + alpha c_f,i), 1/(1 + alpha c_g,i), c_h,i).
    pub fn linear_map_diag(&self) -> Result<Vec<f64>, Error> {
        if !(self.f.is_homogeneous() && self.g.is_homogeneous() && self.h.is_homogeneous()) {
            return Err(Error::NonHomogeneousInstance);
        }
        let alpha = self.params.alpha();
        Ok((0..self.dim())
            .map(|i| {
                let z_f = Complex64::new(1.0 / (1.0 + alpha * self.f.curvatures[i]), 0.0);
                let z_g = Complex64::new(1.0 / (1.0 + alpha * self.g.curvatures[i]), 0.0);
                let z_h = Complex64::new(self.h.curvatures[i], 0.0);
                zeta_dys(z_f, z_g, z_h, &self.params).re
            })
            .collect())
    }

    /// Operator norm of the diagonal linear map (homogeneous instances).
    pub fn operator_norm(&self) -> Result<f64, Error> {
        Ok(self
            .linear_map_diag()?
            .iter()
            .fold(0.0f64, |acc, &t| acc.max(t.abs())))
    }
}

/// Curvature-grid resolution for the empirical sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// grid points strictly between mu and L (endpoints always included)
    pub interior_points: usize,
    /// stand-in upper curvature for classes with unbounded smoothness
    pub infinite_cap: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            interior_points: 9,
            infinite_cap: 1e4,
        }
    }
}

fn curvature_grid(cls: &FunctionClassParams, cfg: &SweepConfig) -> Vec<f64> {
    let lo = cls.mu();
    let hi = match cls.l() {
        Smoothness::Finite(l) => l,
        Smoothness::Infinite => cfg.infinite_cap.max(lo),
    };
    if hi == lo {
        return vec![lo];
    }
    let segments = (cfg.interior_points + 1) as f64;
    (0..=cfg.interior_points + 1)
        .map(|t| lo + (hi - lo) * (t as f64) / segments)
        .collect()
}

/// Best (largest) operator gain realized by 1-D diagonal quadratics whose
/// curvatures sweep the class intervals; a lower bound on the class-tight
/// Lipschitz constant, realized only on real SRG points. Also returns the
/// achieving instance.
pub fn empirical_lipschitz(
    f_cls: &FunctionClassParams,
    g_cls: &FunctionClassParams,
    h_cls: &FunctionClassParams,
    params: &AlgoParams,
    cfg: &SweepConfig,
) -> (f64, DysInstance) {
    assert!(
        h_cls.l().is_finite(),
        "empirical sweep needs a finite L_h (gradient evaluations)"
    );
    let alpha = params.alpha();
    let grid_f = curvature_grid(f_cls, cfg);
    let grid_g = curvature_grid(g_cls, cfg);
    let grid_h = curvature_grid(h_cls, cfg);
    let mut best = f64::NEG_INFINITY;
    let mut arg = (grid_f[0], grid_g[0], grid_h[0]);
    for &c_f in &grid_f {
        let z_f = Complex64::new(1.0 / (1.0 + alpha * c_f), 0.0);
        for &c_g in &grid_g {
            let z_g = Complex64::new(1.0 / (1.0 + alpha * c_g), 0.0);
            for &c_h in &grid_h {
                let t = zeta_dys(z_f, z_g, Complex64::new(c_h, 0.0), params).re.abs();
                if t > best {
                    best = t;
                    arg = (c_f, c_g, c_h);
                }
            }
        }
    }
    let witness = DysInstance::new(
        QuadraticSpec::homogeneous(vec![arg.0]).expect("curvature grids are valid"),
        QuadraticSpec::homogeneous(vec![arg.1]).expect("curvature grids are valid"),
        QuadraticSpec::homogeneous(vec![arg.2]).expect("curvature grids are valid"),
        *params,
    )
    .expect("1-D dims agree");
    (best, witness)
}

/// Trace of a fixed-point run with a companion trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationLog {
    /// z_0 .. z_iters (length iters + 1)
    pub iterates: Vec<Vec<f64>>,
    /// |z_{k+1} - z_k| for each step (length iters)
    pub residuals: Vec<f64>,
    /// |T z_k - T w_k| / |z_k - w_k| per step; 0 when the trajectories have
    /// already merged (length iters)
    pub pair_ratios: Vec<f64>,
}

/// Runs iters steps of z -> T z alongside a companion trajectory started at
/// w0, logging step residuals and pairwise contraction ratios.
pub fn run_iteration(
    inst: &DysInstance,
    z0: &[f64],
    w0: &[f64],
    iters: usize,
) -> Result<IterationLog, Error> {
    assert!(iters >= 1, "need at least one step");
    let mut z = z0.to_vec();
    let mut w = w0.to_vec();
    let mut log = IterationLog {
        iterates: vec![z.clone()],
        residuals: Vec::with_capacity(iters),
        pair_ratios: Vec::with_capacity(iters),
    };
    for _ in 0..iters {
        let zn = inst.apply(&z)?;
        let wn = inst.apply(&w)?;
        log.residuals.push(l2_dist(&zn, &z));
        let den = l2_dist(&z, &w);
        let num = l2_dist(&zn, &wn);
        log.pair_ratios.push(if den == 0.0 { 0.0 } else { num / den });
        z = zn;
        w = wn;
        log.iterates.push(z.clone());
    }
    Ok(log)
}
