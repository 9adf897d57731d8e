//! Function-class geometry: the classes F(mu, L) of mu-strongly convex,
//! L-smooth convex functions, and the circles their scaled subdifferential
//! graphs trace in the complex plane (resolvent and gradient images).

use num_complex::Complex64;
use std::f64::consts::TAU;
use std::fmt;

use crate::error::Error;

/// Smoothness bound of a function class: a finite curvature cap or none.
/// Kept as an explicit variant so the "anything/infinity = 0" conventions
/// live in one place instead of leaking float infinities into formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    Finite(f64),
    Infinite,
}

impl Smoothness {
    pub fn from_f64(l: f64) -> Self {
        if l.is_infinite() && l > 0.0 {
            Smoothness::Infinite
        } else {
            Smoothness::Finite(l)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Smoothness::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Smoothness::Finite(l) => Some(l),
            Smoothness::Infinite => None,
        }
    }

    /// 1/(1 + alpha*L) with the convention that an infinite L gives 0.
    pub fn inv1p(self, alpha: f64) -> f64 {
        match self {
            Smoothness::Finite(l) => 1.0 / (1.0 + alpha * l),
            Smoothness::Infinite => 0.0,
        }
    }

    /// (2L + mu_h) / (1 + alpha*L)^2 with the convention inf/inf^2 = 0.
    pub(crate) fn curvature_gain(self, alpha: f64, mu_h: f64) -> f64 {
        match self {
            Smoothness::Finite(l) => {
                let t = 1.0 + alpha * l;
                (2.0 * l + mu_h) / (t * t)
            }
            Smoothness::Infinite => 0.0,
        }
    }
}

impl fmt::Display for Smoothness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothness::Finite(l) => write!(f, "{l}"),
            Smoothness::Infinite => write!(f, "inf"),
        }
    }
}

/// Parameters (mu, L) of a function class F(mu, L). Invariant: 0 <= mu <= L;
/// mu == L is the degenerate class whose circles collapse to points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionClassParams {
    mu: f64,
    l: Smoothness,
}

impl FunctionClassParams {
    pub fn new(mu: f64, l: Smoothness) -> Result<Self, Error> {
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::InvalidClass(format!(
                "mu must be finite and >= 0, got mu = {mu}"
            )));
        }
        if let Smoothness::Finite(lv) = l {
            if !lv.is_finite() || !(lv >= mu) {
                return Err(Error::InvalidClass(format!(
                    "L must satisfy mu <= L, got mu = {mu}, L = {lv}"
                )));
            }
        }
        Ok(Self { mu, l })
    }

    /// Class with a finite L; `l` may still be `f64::INFINITY`, which routes
    /// to the unbounded-smoothness variant.
    pub fn from_bounds(mu: f64, l: f64) -> Result<Self, Error> {
        Self::new(mu, Smoothness::from_f64(l))
    }

    pub fn nonsmooth(mu: f64) -> Result<Self, Error> {
        Self::new(mu, Smoothness::Infinite)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn l(&self) -> Smoothness {
        self.l
    }
}

/// A circle in the complex plane with real center, the only kind that
/// appears as an SRG boundary here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleSpec {
    center: f64,
    radius: f64,
}

impl CircleSpec {
    pub fn new(center: f64, radius: f64) -> Result<Self, Error> {
        if !center.is_finite() || !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidCircle(format!(
                "need finite center and radius >= 0, got center = {center}, radius = {radius}"
            )));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn leftmost(&self) -> f64 {
        self.center - self.radius
    }

    pub fn rightmost(&self) -> f64 {
        self.center + self.radius
    }

    /// Boundary point center + radius*e^{i phi}.
    pub fn point_at(&self, phi: f64) -> Complex64 {
        Complex64::new(
            self.center + self.radius * phi.cos(),
            self.radius * phi.sin(),
        )
    }

    /// n boundary points at angles 2*pi*k/n, k = 0..n-1, in that order.
    /// A radius-0 circle yields n copies of the center.
    pub fn sample_boundary(&self, n: usize) -> Vec<Complex64> {
        assert!(n >= 1, "need at least one sample");
        (0..n)
            .map(|k| self.point_at(TAU * (k as f64) / (n as f64)))
            .collect()
    }
}

/// Stepsize alpha and averaging parameter lambda of the splitting iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgoParams {
    alpha: f64,
    lambda: f64,
}

impl AlgoParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self, Error> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha must be finite and > 0, got alpha = {alpha}"
            )));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "lambda must be finite and > 0, got lambda = {lambda}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Circle traced by the resolvent values 1/(1 + alpha*c) as the curvature c
/// runs over [mu, L]: center (hi + lo)/2 and radius (hi - lo)/2 where
/// hi = 1/(1 + alpha*mu) and lo = 1/(1 + alpha*L) (0 for infinite L).
pub fn resolvent_srg(cls: &FunctionClassParams, alpha: f64) -> CircleSpec {
    assert!(alpha.is_finite() && alpha > 0.0, "alpha must be positive");
    let hi = 1.0 / (1.0 + alpha * cls.mu());
    let lo = cls.l().inv1p(alpha);
    CircleSpec {
        center: 0.5 * (hi + lo),
        radius: 0.5 * (hi - lo),
    }
}

/// Circle spanned by the gradient slopes of the class: center (mu + L)/2,
/// radius (L - mu)/2 on the real axis. Only defined for finite L.
pub fn gradient_srg(cls: &FunctionClassParams) -> Result<CircleSpec, Error> {
    match cls.l() {
        Smoothness::Finite(l) => Ok(CircleSpec {
            center: 0.5 * (cls.mu() + l),
            radius: 0.5 * (l - cls.mu()),
        }),
        Smoothness::Infinite => Err(Error::InfiniteSmoothness),
    }
}
