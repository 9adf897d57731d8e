//! Closed-form contraction factors for the DYS operator over class triples,
//! their comparison predicates, and the numerically r-optimized bound.
//!
//! Every rate is computed in squared form and rooted once at the boundary;
//! out-of-hypothesis inputs yield flagged results (valid = false with the
//! violated condition named), never panics.

use std::fmt;

use crate::classes::{resolvent_srg, AlgoParams, CircleSpec, FunctionClassParams};
use crate::golden::golden_section_min;
use crate::symbol::circle_quadratic_max;

/// Identifies which certified bound a result carries. The variants double as
/// stable row labels in serialized tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateName {
    Theorem1RhoF,
    Theorem1RhoG,
    Theorem2Rho,
    Corollary1New,
    CondatOld,
    Prop2Case1Old,
    Prop2Case1New,
    Prop2Case2Old,
    Prop2Case2New,
    Prop2Case3Old,
    Prop2Case3New,
    ROptimized,
}

impl RateName {
    pub const ALL: [RateName; 12] = [
        RateName::Theorem1RhoF,
        RateName::Theorem1RhoG,
        RateName::Theorem2Rho,
        RateName::Corollary1New,
        RateName::CondatOld,
        RateName::Prop2Case1Old,
        RateName::Prop2Case1New,
        RateName::Prop2Case2Old,
        RateName::Prop2Case2New,
        RateName::Prop2Case3Old,
        RateName::Prop2Case3New,
        RateName::ROptimized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RateName::Theorem1RhoF => "theorem1_rho_f",
            RateName::Theorem1RhoG => "theorem1_rho_g",
            RateName::Theorem2Rho => "theorem2_rho",
            RateName::Corollary1New => "corollary1_new",
            RateName::CondatOld => "condat_old",
            RateName::Prop2Case1Old => "prop2_case1_old",
            RateName::Prop2Case1New => "prop2_case1_new",
            RateName::Prop2Case2Old => "prop2_case2_old",
            RateName::Prop2Case2New => "prop2_case2_new",
            RateName::Prop2Case3Old => "prop2_case3_old",
            RateName::Prop2Case3New => "prop2_case3_new",
            RateName::ROptimized => "r_optimized",
        }
    }
}

impl fmt::Display for RateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Intermediate quantities backing a rate, for inspection and serialization.
/// Fields are populated only where the formula defines them.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RateBreakdown {
    pub c_f: Option<f64>,
    pub c_g: Option<f64>,
    pub r_f: Option<f64>,
    pub r_g: Option<f64>,
    pub d: Option<f64>,
    pub theta: Option<f64>,
    pub nu_f: Option<f64>,
    pub nu_g: Option<f64>,
    pub xi: Option<f64>,
    pub r: Option<f64>,
}

/// A named contraction factor: either a finite rho with valid = true, or
/// valid = false and a note naming the violated hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub name: RateName,
    pub rho: Option<f64>,
    pub valid: bool,
    pub condition_note: String,
    pub breakdown: RateBreakdown,
}

impl RateResult {
    fn from_sq(
        name: RateName,
        rho_sq: f64,
        note: impl Into<String>,
        breakdown: RateBreakdown,
    ) -> Self {
        assert!(
            rho_sq >= -1e-12 && rho_sq.is_finite(),
            "squared rate for {name} out of range: {rho_sq}"
        );
        RateResult {
            name,
            rho: Some(rho_sq.max(0.0).sqrt()),
            valid: true,
            condition_note: note.into(),
            breakdown,
        }
    }

    fn invalid(name: RateName, note: impl Into<String>, breakdown: RateBreakdown) -> Self {
        RateResult {
            name,
            rho: None,
            valid: false,
            condition_note: note.into(),
            breakdown,
        }
    }
}

/// d = max(|2 - lambda - alpha*mu_h|, |2 - lambda - alpha*L_h|): how far the
/// averaged reflected-gradient factor sits from a contraction.
fn contraction_defect(mu_h: f64, l_h: f64, alpha: f64, lambda: f64) -> f64 {
    let a = (2.0 - lambda - alpha * mu_h).abs();
    let b = (2.0 - lambda - alpha * l_h).abs();
    a.max(b)
}

/// One-sided bound: anchored on `own` (the circle whose center condition
/// lambda < 1/C must hold), maximized over the other class's resolvent
/// endpoints.
fn one_sided_bound(
    name: RateName,
    own: &CircleSpec,
    own_label: &str,
    other: &FunctionClassParams,
    d: f64,
    alpha: f64,
    lambda: f64,
    breakdown: RateBreakdown,
) -> RateResult {
    let c = own.center();
    let r = own.radius();
    let inv_c = 1.0 / c;
    if !(lambda < inv_c) {
        return RateResult::invalid(
            name,
            format!("requires lambda < 1/{own_label} (lambda = {lambda}; 1/{own_label} = {inv_c})"),
            breakdown,
        );
    }
    let lead = 1.0 - lambda * (c * c - r * r) / c;
    let coef = lambda * d * d / (inv_c - lambda);
    let entry = |z: f64| {
        let t = 1.0 - lambda * z;
        t * t + coef * z * z
    };
    let z_hi = 1.0 / (1.0 + alpha * other.mu());
    let z_lo = other.l().inv1p(alpha);
    let rho_sq = lead * entry(z_hi).max(entry(z_lo));
    RateResult::from_sq(
        name,
        rho_sq,
        format!("lambda < 1/{own_label} holds (lambda = {lambda}; 1/{own_label} = {inv_c})"),
        breakdown,
    )
}

/// The pair of one-sided Lipschitz bounds (rho_f anchored on f's circle,
/// rho_g on g's). Each is valid iff lambda < 1/C for its own circle; h must
/// be smooth for d to exist.
pub fn theorem1_rates(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
) -> (RateResult, RateResult) {
    let alpha = params.alpha();
    let lambda = params.lambda();
    let cf = resolvent_srg(f, alpha);
    let cg = resolvent_srg(g, alpha);
    let mut breakdown = RateBreakdown {
        c_f: Some(cf.center()),
        c_g: Some(cg.center()),
        r_f: Some(cf.radius()),
        r_g: Some(cg.radius()),
        ..RateBreakdown::default()
    };
    let Some(l_h) = h.l().finite() else {
        return (
            RateResult::invalid(RateName::Theorem1RhoF, "requires finite L_h", breakdown),
            RateResult::invalid(RateName::Theorem1RhoG, "requires finite L_h", breakdown),
        );
    };
    let d = contraction_defect(h.mu(), l_h, alpha, lambda);
    breakdown.d = Some(d);
    let rho_f = one_sided_bound(
        RateName::Theorem1RhoF,
        &cf,
        "C_f",
        g,
        d,
        alpha,
        lambda,
        breakdown,
    );
    let rho_g = one_sided_bound(
        RateName::Theorem1RhoG,
        &cg,
        "C_g",
        f,
        d,
        alpha,
        lambda,
        breakdown,
    );
    (rho_f, rho_g)
}

/// nu = min( (2 mu + mu_h)/(1 + alpha*mu)^2, (2 L + mu_h)/(1 + alpha*L)^2 ),
/// the second entry 0 for infinite L.
fn curvature_nu(cls: &FunctionClassParams, alpha: f64, mu_h: f64) -> f64 {
    let t = 1.0 + alpha * cls.mu();
    let at_mu = (2.0 * cls.mu() + mu_h) / (t * t);
    let at_l = cls.l().curvature_gain(alpha, mu_h);
    at_mu.min(at_l)
}

/// The symmetric two-sided contraction bound
/// rho^2 = 1 - lambda*theta + lambda*sqrt((theta - alpha*nu_f)(theta - alpha*nu_g)),
/// valid iff lambda < 2 - alpha*(mu_h + L_h)/2.
pub fn theorem2_rate(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
) -> RateResult {
    let alpha = params.alpha();
    let lambda = params.lambda();
    let Some(l_h) = h.l().finite() else {
        return RateResult::invalid(
            RateName::Theorem2Rho,
            "requires finite L_h",
            RateBreakdown::default(),
        );
    };
    let curv_sum = h.mu() + l_h;
    let cap = 2.0 - alpha * curv_sum / 2.0;
    if !(lambda < cap) {
        return RateResult::invalid(
            RateName::Theorem2Rho,
            format!(
                "requires lambda < 2 - alpha*(mu_h + L_h)/2 (lambda = {lambda}; bound = {cap})"
            ),
            RateBreakdown::default(),
        );
    }
    let theta = 2.0 / (4.0 - alpha * curv_sum);
    let nu_f = curvature_nu(f, alpha, h.mu());
    let nu_g = curvature_nu(g, alpha, h.mu());
    let rad_f = theta - alpha * nu_f;
    let rad_g = theta - alpha * nu_g;
    assert!(
        rad_f >= -1e-12 && rad_g >= -1e-12,
        "radicand factors must be nonnegative; got {rad_f} and {rad_g}"
    );
    // the assertion enforces nonnegativity; the clamp only shields sqrt from
    // the tolerated sub-epsilon noise
    let rho_sq = 1.0 - lambda * theta + lambda * (rad_f.max(0.0) * rad_g.max(0.0)).sqrt();
    RateResult::from_sq(
        RateName::Theorem2Rho,
        rho_sq,
        format!("lambda < 2 - alpha*(mu_h + L_h)/2 holds (lambda = {lambda}; bound = {cap})"),
        RateBreakdown {
            theta: Some(theta),
            nu_f: Some(nu_f),
            nu_g: Some(nu_g),
            ..RateBreakdown::default()
        },
    )
}

/// The unrelaxed two-prox-one-gradient comparison setting: mu_f = 0 with
/// finite L_f, nonsmooth g, smooth h, lambda = 1, alpha in (0, 2/L_h), and
/// at least one of mu_g, mu_h strictly positive.
struct TwoProxSetting {
    l_f: f64,
    mu_g: f64,
    mu_h: f64,
    l_h: f64,
}

fn two_prox_setting(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    alpha: f64,
) -> Result<TwoProxSetting, String> {
    if f.mu() != 0.0 {
        return Err(format!("requires mu_f = 0 (got mu_f = {})", f.mu()));
    }
    let Some(l_f) = f.l().finite() else {
        return Err("requires finite L_f".into());
    };
    if g.l().is_finite() {
        return Err(format!("requires L_g = inf (got L_g = {})", g.l()));
    }
    let Some(l_h) = h.l().finite() else {
        return Err("requires finite L_h".into());
    };
    if !(g.mu() > 0.0 || h.mu() > 0.0) {
        return Err("requires mu_g > 0 or mu_h > 0".into());
    }
    if !(alpha.is_finite() && alpha > 0.0 && alpha < 2.0 / l_h) {
        return Err(format!(
            "requires alpha in (0; 2/L_h) (alpha = {alpha}; 2/L_h = {})",
            2.0 / l_h
        ));
    }
    Ok(TwoProxSetting {
        l_f,
        mu_g: g.mu(),
        mu_h: h.mu(),
        l_h,
    })
}

/// The sharpened rate for the two-prox setting (lambda fixed at 1):
/// rho_new^2 = max( d^2/(1 + 2 alpha mu_g),
///                  (alpha^2 L_f^2 + d^2/(1 + 2 alpha mu_g)) / (1 + alpha L_f)^2 )
/// with d = max(|1 - alpha*mu_h|, |1 - alpha*L_h|).
pub fn corollary1_rate(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    alpha: f64,
) -> RateResult {
    let s = match two_prox_setting(f, g, h, alpha) {
        Ok(s) => s,
        Err(note) => return RateResult::invalid(RateName::Corollary1New, note, RateBreakdown::default()),
    };
    let d = contraction_defect(s.mu_h, s.l_h, alpha, 1.0);
    let shrunk = d * d / (1.0 + 2.0 * alpha * s.mu_g);
    let t = 1.0 + alpha * s.l_f;
    let rho_sq = shrunk.max((alpha * alpha * s.l_f * s.l_f + shrunk) / (t * t));
    RateResult::from_sq(
        RateName::Corollary1New,
        rho_sq,
        "two-prox setting holds (lambda = 1)",
        RateBreakdown {
            d: Some(d),
            ..RateBreakdown::default()
        },
    )
}

/// The predecessor rate for the same setting:
/// rho_old^2 = max( (1 - alpha*mu_h)^2/(1 + alpha*mu_g),
///                  (1 - alpha*L_h)^2/(1 + alpha*mu_g),
///                  alpha L_f/(alpha L_f + 2) ).
pub fn condat_rate(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    alpha: f64,
) -> RateResult {
    let s = match two_prox_setting(f, g, h, alpha) {
        Ok(s) => s,
        Err(note) => return RateResult::invalid(RateName::CondatOld, note, RateBreakdown::default()),
    };
    let den = 1.0 + alpha * s.mu_g;
    let t_mu = 1.0 - alpha * s.mu_h;
    let t_l = 1.0 - alpha * s.l_h;
    let rho_sq = (t_mu * t_mu / den)
        .max(t_l * t_l / den)
        .max(alpha * s.l_f / (alpha * s.l_f + 2.0));
    RateResult::from_sq(
        RateName::CondatOld,
        rho_sq,
        "two-prox setting holds (lambda = 1)",
        RateBreakdown::default(),
    )
}

/// The three specializations in which the sharpened relaxed rate is compared
/// against its predecessor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prop2Case {
    /// f strongly convex and smooth; g nonsmooth with mu_g = 0; mu_h = 0.
    Case1,
    /// mu_f = 0 with finite L_f; g strongly convex nonsmooth; mu_h = 0.
    Case2,
    /// mu_f = mu_g = 0; h strongly convex and smooth.
    Case3,
}

/// Both rates of a comparison pair plus whether the stated strictness
/// condition holds for these inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop2Comparison {
    pub old: RateResult,
    pub new: RateResult,
    pub strict_expected: bool,
}

fn prop2_names(case: Prop2Case) -> (RateName, RateName) {
    match case {
        Prop2Case::Case1 => (RateName::Prop2Case1Old, RateName::Prop2Case1New),
        Prop2Case::Case2 => (RateName::Prop2Case2Old, RateName::Prop2Case2New),
        Prop2Case::Case3 => (RateName::Prop2Case3Old, RateName::Prop2Case3New),
    }
}

fn prop2_invalid(case: Prop2Case, note: &str) -> Prop2Comparison {
    let (old_name, new_name) = prop2_names(case);
    Prop2Comparison {
        old: RateResult::invalid(old_name, note, RateBreakdown::default()),
        new: RateResult::invalid(new_name, note, RateBreakdown::default()),
        strict_expected: false,
    }
}

/// Old/new relaxed-rate pair for one comparison case. Shared hypotheses:
/// finite L_f and L_h, nonsmooth g, alpha*L_h < 4, lambda < 2 - alpha*L_h/2,
/// plus the per-case zero-curvature constraints.
pub fn prop2_rates(
    case: Prop2Case,
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
) -> Prop2Comparison {
    let alpha = params.alpha();
    let lambda = params.lambda();
    let (old_name, new_name) = prop2_names(case);

    let Some(l_h) = h.l().finite() else {
        return prop2_invalid(case, "requires finite L_h");
    };
    let Some(l_f) = f.l().finite() else {
        return prop2_invalid(case, "requires finite L_f");
    };
    if g.l().is_finite() {
        return prop2_invalid(case, &format!("requires L_g = inf (got L_g = {})", g.l()));
    }
    if !(alpha * l_h < 4.0) {
        return prop2_invalid(
            case,
            &format!("requires alpha*L_h < 4 (alpha*L_h = {})", alpha * l_h),
        );
    }
    let cap = 2.0 - alpha * l_h / 2.0;
    if !(lambda < cap) {
        return prop2_invalid(
            case,
            &format!("requires lambda < 2 - alpha*L_h/2 (lambda = {lambda}; bound = {cap})"),
        );
    }
    let zero_ok = match case {
        Prop2Case::Case1 => g.mu() == 0.0 && h.mu() == 0.0,
        Prop2Case::Case2 => f.mu() == 0.0 && h.mu() == 0.0,
        Prop2Case::Case3 => f.mu() == 0.0 && g.mu() == 0.0,
    };
    if !zero_ok {
        let need = match case {
            Prop2Case::Case1 => "mu_g = 0 and mu_h = 0",
            Prop2Case::Case2 => "mu_f = 0 and mu_h = 0",
            Prop2Case::Case3 => "mu_f = 0 and mu_g = 0",
        };
        return prop2_invalid(
            case,
            &format!(
                "requires {need} (got mu_f = {}; mu_g = {}; mu_h = {})",
                f.mu(),
                g.mu(),
                h.mu()
            ),
        );
    }

    let note = format!("case hypotheses hold (lambda = {lambda}; bound = {cap})");
    match case {
        Prop2Case::Case1 => {
            let mu_f = f.mu();
            let theta1 = 2.0 / (4.0 - alpha * l_h);
            let nu_old = 2.0 * mu_f / (alpha * alpha * l_f * l_f + 2.0 * alpha * mu_f + 1.0);
            let t_mu = 1.0 + alpha * mu_f;
            let t_l = 1.0 + alpha * l_f;
            let nu_new = (2.0 * mu_f / (t_mu * t_mu)).min(2.0 * l_f / (t_l * t_l));
            let sq = |nu: f64| {
                let rad = theta1 * (theta1 - alpha * nu);
                assert!(rad >= -1e-12, "radicand must be nonnegative; got {rad}");
                1.0 - lambda * theta1 + lambda * rad.max(0.0).sqrt()
            };
            let breakdown = RateBreakdown {
                theta: Some(theta1),
                ..RateBreakdown::default()
            };
            Prop2Comparison {
                old: RateResult::from_sq(old_name, sq(nu_old), note.clone(), breakdown),
                new: RateResult::from_sq(new_name, sq(nu_new), note, breakdown),
                strict_expected: mu_f > 0.0,
            }
        }
        Prop2Case::Case2 => {
            let mu_g = g.mu();
            let den = 2.0 - lambda + 2.0 * alpha * mu_g;
            let t_l = 1.0 + alpha * l_f;
            let shared = ((2.0 - lambda) * (mu_g + l_f) + 2.0 * alpha * mu_g * l_f)
                / (t_l * t_l * den);
            let al2 = alpha * alpha * l_f * l_f;
            let first_old = (2.0 - lambda) * mu_g / ((1.0 + al2) * den);
            let first_new = (2.0 - lambda) * mu_g / den;
            let sq = |first: f64| 1.0 - 2.0 * lambda * alpha * first.min(shared);
            let strict =
                (2.0 - lambda) * (1.0 - 2.0 * alpha * mu_g + al2) + 2.0 * alpha * mu_g * (1.0 + al2)
                    > 0.0
                    && mu_g > 0.0;
            Prop2Comparison {
                old: RateResult::from_sq(old_name, sq(first_old), note.clone(), RateBreakdown::default()),
                new: RateResult::from_sq(new_name, sq(first_new), note, RateBreakdown::default()),
                strict_expected: strict,
            }
        }
        Prop2Case::Case3 => {
            let mu_h = h.mu();
            let two_s = 2.0 * (2.0 - lambda);
            let damp = |c: f64| c * (1.0 - alpha * c / two_s);
            let xi = damp(mu_h).min(damp(l_h));
            let t_l = 1.0 + alpha * l_f;
            let al2 = alpha * alpha * l_f * l_f;
            let mu_damped_by_l = mu_h * (1.0 - alpha * l_h / two_s);
            let min_old = (mu_damped_by_l / (1.0 + al2)).min((l_f + mu_damped_by_l) / (t_l * t_l));
            let min_new = xi.min((l_f + xi) / (t_l * t_l));
            let sq = |m: f64| 1.0 - 2.0 * lambda * alpha * m;
            let new_breakdown = RateBreakdown {
                xi: Some(xi),
                ..RateBreakdown::default()
            };
            Prop2Comparison {
                old: RateResult::from_sq(old_name, sq(min_old), note.clone(), RateBreakdown::default()),
                new: RateResult::from_sq(new_name, sq(min_new), note, new_breakdown),
                strict_expected: mu_h > 0.0,
            }
        }
    }
}

/// Search bracket and tolerance for the r-optimized bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RSearchConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub rel_tol: f64,
}

impl Default for RSearchConfig {
    fn default() -> Self {
        RSearchConfig {
            r_min: 1e-6,
            r_max: 1e6,
            rel_tol: 1e-10,
        }
    }
}

/// The split bound at a fixed coupling weight r > 0:
/// rho(r)^2 = max_{z on f-circle endpoints} (|1 - lambda z|^2 + lambda (d/r) z^2)
///          * max_{z on g-circle endpoints} (|1 - lambda z|^2 + lambda d r z^2).
/// None when L_h is infinite (no defect d exists).
pub fn r_split_bound_sq(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    r: f64,
) -> Option<f64> {
    assert!(r.is_finite() && r > 0.0, "coupling weight must be positive");
    let alpha = params.alpha();
    let lambda = params.lambda();
    let l_h = h.l().finite()?;
    let cf = resolvent_srg(f, alpha);
    let cg = resolvent_srg(g, alpha);
    let d = contraction_defect(h.mu(), l_h, alpha, lambda);
    // |1 - lambda z|^2 == lambda^2 |z - 1/lambda|^2, which is the quadratic
    // the endpoint maximizer handles
    let lam_sq = lambda * lambda;
    let inv_lambda = 1.0 / lambda;
    let (_, m_f) = circle_quadratic_max(lam_sq, lambda * d / r, inv_lambda, &cf);
    let (_, m_g) = circle_quadratic_max(lam_sq, lambda * d * r, inv_lambda, &cg);
    Some(m_f * m_g)
}

/// Minimizes the split bound over r > 0 (golden section on log r, plus the
/// two r values that reproduce the fixed-r one-sided bounds, so the result
/// never loses to those).
pub fn r_optimized_rate(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    cfg: &RSearchConfig,
) -> RateResult {
    assert!(
        cfg.r_min > 0.0 && cfg.r_min < cfg.r_max && cfg.rel_tol > 0.0,
        "bad search bracket"
    );
    let alpha = params.alpha();
    let lambda = params.lambda();
    let Some(l_h) = h.l().finite() else {
        return RateResult::invalid(RateName::ROptimized, "requires finite L_h", RateBreakdown::default());
    };
    let cf = resolvent_srg(f, alpha);
    let cg = resolvent_srg(g, alpha);
    let d = contraction_defect(h.mu(), l_h, alpha, lambda);
    let mut breakdown = RateBreakdown {
        c_f: Some(cf.center()),
        c_g: Some(cg.center()),
        r_f: Some(cf.radius()),
        r_g: Some(cg.radius()),
        d: Some(d),
        ..RateBreakdown::default()
    };

    let objective = |r: f64| -> f64 {
        r_split_bound_sq(f, g, h, params, r).expect("L_h already checked finite")
    };

    if d == 0.0 {
        let rho_sq = objective(cfg.r_min);
        breakdown.r = Some(cfg.r_min);
        return RateResult::from_sq(
            RateName::ROptimized,
            rho_sq,
            "d = 0; bound independent of r; reporting the bracket endpoint",
            breakdown,
        );
    }

    let (t_star, mut best) = golden_section_min(
        |t| objective(t.exp()),
        cfg.r_min.ln(),
        cfg.r_max.ln(),
        cfg.rel_tol,
    );
    let mut best_r = t_star.exp();
    let inv_cf = 1.0 / cf.center();
    if lambda < inv_cf {
        let cand = d / (inv_cf - lambda);
        if cand.is_finite() && cand > 0.0 {
            let v = objective(cand);
            if v < best {
                best = v;
                best_r = cand;
            }
        }
    }
    let inv_cg = 1.0 / cg.center();
    if lambda < inv_cg {
        let cand = (inv_cg - lambda) / d;
        if cand.is_finite() && cand > 0.0 {
            let v = objective(cand);
            if v < best {
                best = v;
                best_r = cand;
            }
        }
    }
    breakdown.r = Some(best_r);
    RateResult::from_sq(
        RateName::ROptimized,
        best,
        format!(
            "minimized over r in [{}; {}] (golden section on log r)",
            cfg.r_min, cfg.r_max
        ),
        breakdown,
    )
}

/// Every certified bound evaluated on one class triple, in `RateName::ALL`
/// order. Rates whose hypotheses fail come back flagged, never dropped. The
/// two lambda = 1 rates are gated on the configured lambda.
pub fn compare_all(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
) -> Vec<RateResult> {
    let (t1f, t1g) = theorem1_rates(f, g, h, params);
    let t2 = theorem2_rate(f, g, h, params);
    let (coro, condat) = if params.lambda() == 1.0 {
        (
            corollary1_rate(f, g, h, params.alpha()),
            condat_rate(f, g, h, params.alpha()),
        )
    } else {
        let note = format!("requires lambda = 1 (lambda = {})", params.lambda());
        (
            RateResult::invalid(RateName::Corollary1New, note.clone(), RateBreakdown::default()),
            RateResult::invalid(RateName::CondatOld, note, RateBreakdown::default()),
        )
    };
    let p1 = prop2_rates(Prop2Case::Case1, f, g, h, params);
    let p2 = prop2_rates(Prop2Case::Case2, f, g, h, params);
    let p3 = prop2_rates(Prop2Case::Case3, f, g, h, params);
    let ropt = r_optimized_rate(f, g, h, params, &RSearchConfig::default());
    vec![
        t1f, t1g, t2, coro, condat, p1.old, p1.new, p2.old, p2.new, p3.old, p3.new, ropt,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::estimate_sup_modulus;

    fn cls(mu: f64, l: f64) -> FunctionClassParams {
        FunctionClassParams::from_bounds(mu, l).unwrap()
    }

    fn algo(alpha: f64, lambda: f64) -> AlgoParams {
        AlgoParams::new(alpha, lambda).unwrap()
    }

    fn fig1() -> (FunctionClassParams, FunctionClassParams, FunctionClassParams, AlgoParams) {
        (cls(0.7, 1.5), cls(2.0, 3.0), cls(0.8, 1.3), algo(0.9, 1.0))
    }

    #[test]
    fn one_sided_reference_values() {
        let (f, g, h, p) = fig1();
        let (rf, rg) = theorem1_rates(&f, &g, &h, &p);
        assert!(rf.valid && rg.valid);
        assert!((rf.rho.unwrap() - 0.51768254782595347).abs() < 1e-14);
        assert!((rg.rho.unwrap() - 0.48266291968190594).abs() < 1e-14);
        let b = rf.breakdown;
        assert!((b.c_f.unwrap() - 0.5195144237044772).abs() < 1e-15);
        assert!((b.r_f.unwrap() - 0.093982508810860205).abs() < 1e-15);
        assert!((b.c_g.unwrap() - 0.31370656370656369).abs() < 1e-15);
        assert!((b.r_g.unwrap() - 0.043436293436293461).abs() < 1e-15);
        assert!((b.d.unwrap() - 0.28).abs() < 1e-15);
    }

    #[test]
    fn one_sided_invalid_when_lambda_large() {
        let (f, g, h, _) = fig1();
        // 1/C_f ~ 1.925, 1/C_g ~ 3.188
        let (rf, rg) = theorem1_rates(&f, &g, &h, &algo(0.9, 3.5));
        assert!(!rf.valid && !rg.valid);
        assert!(rf.condition_note.contains("lambda < 1/C_f"));
        assert!(rg.condition_note.contains("lambda < 1/C_g"));
        assert!(rf.rho.is_none());
    }

    #[test]
    fn one_sided_nonexpansive_family() {
        // mu_f = mu_g = 0, L infinite, lambda = 1, alpha*L_h < 2: the bound
        // collapses to exactly 1, matching plain nonexpansiveness.
        let f = cls(0.0, f64::INFINITY);
        let g = cls(0.0, f64::INFINITY);
        let h = cls(0.0, 2.0);
        let (rf, rg) = theorem1_rates(&f, &g, &h, &algo(0.7, 1.0));
        assert_eq!(rf.rho.unwrap(), 1.0);
        assert_eq!(rg.rho.unwrap(), 1.0);
        let sup = estimate_sup_modulus(&f, &g, &h, &algo(0.7, 1.0), 64)
            .unwrap()
            .sup_modulus;
        assert!(sup <= 1.0 + 1e-9);
        assert!(sup > 1.0 - 2e-3);
    }

    #[test]
    fn vanishing_relaxation_limits() {
        let (f, g, h, _) = fig1();
        let p = algo(0.9, 1e-12);
        let (rf, rg) = theorem1_rates(&f, &g, &h, &p);
        assert!((rf.rho.unwrap() - 1.0).abs() < 1e-9);
        assert!((rg.rho.unwrap() - 1.0).abs() < 1e-9);
        let r2 = theorem2_rate(&f, &g, &h, &p);
        assert!((r2.rho.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_sided_reference_values() {
        let (f, g, h, p) = fig1();
        let r = theorem2_rate(&f, &g, &h, &p);
        assert!(r.valid);
        assert!((r.rho.unwrap() - 0.67660611280579619).abs() < 1e-14);
        let b = r.breakdown;
        assert!((b.theta.unwrap() - 0.94786729857819907).abs() < 1e-15);
        assert!((b.nu_f.unwrap() - 0.68809416025350822).abs() < 1e-15);
        assert!((b.nu_g.unwrap() - 0.49671292914536153).abs() < 1e-15);
    }

    #[test]
    fn two_sided_nonexpansive_degenerate() {
        let r = theorem2_rate(
            &cls(0.0, f64::INFINITY),
            &cls(0.0, f64::INFINITY),
            &cls(0.0, 0.0),
            &algo(1.0, 1.0),
        );
        // theta = 1/2, nu = 0 on both sides: rho = 1 exactly
        assert_eq!(r.rho.unwrap(), 1.0);
        assert_eq!(r.breakdown.theta.unwrap(), 0.5);
    }

    #[test]
    fn two_sided_gate() {
        let r = theorem2_rate(&cls(0.0, 1.0), &cls(0.0, 1.0), &cls(1.1, 1.1), &algo(2.0, 0.1));
        assert!(!r.valid);
        assert!(r.condition_note.contains("lambda"));
        let r = theorem2_rate(&cls(0.0, 1.0), &cls(0.0, 1.0), &cls(0.0, f64::INFINITY), &algo(0.5, 1.0));
        assert!(!r.valid && r.condition_note.contains("L_h"));
    }

    #[test]
    fn two_prox_worked_pair() {
        // the worked comparison: old^2 = 2/3 vs new^2 = 1/2
        let f = cls(0.0, 1.0);
        let g = cls(1.0, f64::INFINITY);
        let h = cls(0.0, 1.0);
        let new = corollary1_rate(&f, &g, &h, 0.5);
        let old = condat_rate(&f, &g, &h, 0.5);
        let new_sq = new.rho.unwrap().powi(2);
        let old_sq = old.rho.unwrap().powi(2);
        assert!((new_sq - 0.5).abs() < 1e-15);
        assert!((old_sq - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(new.breakdown.d.unwrap(), 1.0);
    }

    #[test]
    fn two_prox_vanishing_defect() {
        // alpha = 1/L_h with degenerate h: d = 0, the smooth-f term alone
        let f = cls(0.0, 1.0);
        let g = cls(0.0, f64::INFINITY);
        let h = cls(2.0, 2.0);
        let new = corollary1_rate(&f, &g, &h, 0.5);
        assert_eq!(new.breakdown.d.unwrap(), 0.0);
        assert!((new.rho.unwrap().powi(2) - 1.0 / 9.0).abs() < 1e-15);
        let old = condat_rate(&f, &g, &h, 0.5);
        assert!((old.rho.unwrap().powi(2) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn two_prox_reference_h_values() {
        let new = corollary1_rate(&cls(0.0, 1.5), &cls(2.0, f64::INFINITY), &cls(0.8, 1.3), 0.9);
        assert!(new.valid);
        assert!((new.rho.unwrap() - 0.57714796171932492).abs() < 1e-14);
        let old = condat_rate(&cls(0.0, 1.5), &cls(2.0, f64::INFINITY), &cls(0.8, 1.3), 0.9);
        assert!((old.rho.unwrap().powi(2) - 0.40298507462686567).abs() < 1e-15);
    }

    #[test]
    fn two_prox_gates() {
        let ok_g = cls(1.0, f64::INFINITY);
        let ok_h = cls(0.0, 1.0);
        let r = corollary1_rate(&cls(0.1, 1.0), &ok_g, &ok_h, 0.5);
        assert!(!r.valid && r.condition_note.contains("mu_f"));
        let r = condat_rate(&cls(0.0, f64::INFINITY), &ok_g, &ok_h, 0.5);
        assert!(!r.valid && r.condition_note.contains("L_f"));
        let r = corollary1_rate(&cls(0.0, 1.0), &cls(1.0, 2.0), &ok_h, 0.5);
        assert!(!r.valid && r.condition_note.contains("L_g"));
        let r = corollary1_rate(&cls(0.0, 1.0), &cls(0.0, f64::INFINITY), &ok_h, 0.5);
        assert!(!r.valid && r.condition_note.contains("mu_g > 0 or mu_h > 0"));
        let r = condat_rate(&cls(0.0, 1.0), &ok_g, &ok_h, 2.5);
        assert!(!r.valid && r.condition_note.contains("alpha"));
    }

    #[test]
    fn relaxed_case2_worked_values() {
        let cmp = prop2_rates(
            Prop2Case::Case2,
            &cls(0.0, 1.0),
            &cls(1.0, f64::INFINITY),
            &cls(0.0, 1.0),
            &algo(0.5, 1.0),
        );
        assert!(cmp.old.valid && cmp.new.valid);
        assert!((cmp.old.rho.unwrap().powi(2) - 0.6).abs() < 1e-15);
        assert!((cmp.new.rho.unwrap().powi(2) - 0.5).abs() < 1e-15);
        assert!(cmp.strict_expected);
    }

    #[test]
    fn relaxed_equality_boundaries() {
        // case 1 at mu_f = 0: identical formulas
        let cmp = prop2_rates(
            Prop2Case::Case1,
            &cls(0.0, 2.0),
            &cls(0.0, f64::INFINITY),
            &cls(0.0, 1.5),
            &algo(0.6, 0.9),
        );
        assert_eq!(cmp.old.rho, cmp.new.rho);
        assert!(!cmp.strict_expected);

        // case 2 at mu_g = 0
        let cmp = prop2_rates(
            Prop2Case::Case2,
            &cls(0.0, 2.0),
            &cls(0.0, f64::INFINITY),
            &cls(0.0, 1.5),
            &algo(0.6, 0.9),
        );
        assert_eq!(cmp.old.rho, cmp.new.rho);
        assert!(!cmp.strict_expected);

        // case 3 at mu_h = 0
        let cmp = prop2_rates(
            Prop2Case::Case3,
            &cls(0.0, 2.0),
            &cls(0.0, f64::INFINITY),
            &cls(0.0, 1.5),
            &algo(0.6, 0.9),
        );
        assert_eq!(cmp.old.rho, cmp.new.rho);
        assert!(!cmp.strict_expected);
    }

    #[test]
    fn relaxed_strictness() {
        let p = algo(0.5, 1.2);
        let cmp = prop2_rates(
            Prop2Case::Case1,
            &cls(0.4, 2.0),
            &cls(0.0, f64::INFINITY),
            &cls(0.0, 1.5),
            &p,
        );
        assert!(cmp.strict_expected);
        assert!(cmp.new.rho.unwrap() < cmp.old.rho.unwrap());

        let cmp = prop2_rates(
            Prop2Case::Case3,
            &cls(0.0, 2.0),
            &cls(0.0, f64::INFINITY),
            &cls(0.7, 1.5),
            &p,
        );
        assert!(cmp.strict_expected);
        assert!(cmp.new.rho.unwrap() < cmp.old.rho.unwrap());
    }

    #[test]
    fn relaxed_gates() {
        let f = cls(0.0, 1.0);
        let g = cls(0.0, f64::INFINITY);
        let h = cls(0.0, 1.0);
        let cmp = prop2_rates(Prop2Case::Case1, &f, &g, &h, &algo(0.5, 1.9));
        assert!(!cmp.old.valid && cmp.old.condition_note.contains("lambda"));
        let cmp = prop2_rates(Prop2Case::Case2, &f, &g, &cls(0.0, 9.0), &algo(0.5, 0.5));
        assert!(!cmp.old.valid && cmp.old.condition_note.contains("alpha*L_h"));
        let cmp = prop2_rates(Prop2Case::Case1, &cls(0.0, f64::INFINITY), &g, &h, &algo(0.5, 0.5));
        assert!(!cmp.new.valid && cmp.new.condition_note.contains("L_f"));
        let cmp = prop2_rates(Prop2Case::Case3, &f, &cls(0.1, f64::INFINITY), &h, &algo(0.5, 0.5));
        assert!(!cmp.new.valid && cmp.new.condition_note.contains("mu_g"));
    }

    #[test]
    fn r_search_touches_reference_cloud() {
        let (f, g, h, p) = fig1();
        let r = r_optimized_rate(&f, &g, &h, &p, &RSearchConfig::default());
        assert!(r.valid);
        let rho = r.rho.unwrap();
        assert!((rho - 0.45140885566417494).abs() < 1e-12);
        assert!((r.breakdown.r.unwrap() - 2.0).abs() < 1e-3);
        let (rf, rg) = theorem1_rates(&f, &g, &h, &p);
        assert!(rho <= rf.rho.unwrap().min(rg.rho.unwrap()) + 1e-12);
    }

    #[test]
    fn r_search_flat_objective() {
        // lambda = 1, degenerate h with alpha*mu_h = 1 makes d = 0 exactly
        let f = cls(0.0, 1.0);
        let g = cls(0.0, f64::INFINITY);
        let h = cls(2.0, 2.0);
        let p = algo(0.5, 1.0);
        let r = r_optimized_rate(&f, &g, &h, &p, &RSearchConfig::default());
        assert_eq!(r.breakdown.d.unwrap(), 0.0);
        assert_eq!(r.breakdown.r.unwrap(), 1e-6);
        assert!(r.condition_note.contains("independent of r"));
        // with d = 0 both factors lose their coupling term:
        // max |1-z|^2 over each circle times each other
        let cf = resolvent_srg(&f, 0.5);
        let cg = resolvent_srg(&g, 0.5);
        let m = |c: &CircleSpec| {
            let lo = (1.0 - c.leftmost()) * (1.0 - c.leftmost());
            let hi = (1.0 - c.rightmost()) * (1.0 - c.rightmost());
            lo.max(hi)
        };
        assert!((r.rho.unwrap().powi(2) - m(&cf) * m(&cg)).abs() < 1e-15);
    }

    #[test]
    fn full_table_reference_params() {
        let (f, g, h, p) = fig1();
        let table = compare_all(&f, &g, &h, &p);
        assert_eq!(table.len(), 12);
        for (row, name) in table.iter().zip(RateName::ALL) {
            assert_eq!(row.name, name);
        }
        let by = |n: RateName| table.iter().find(|r| r.name == n).unwrap();
        assert!(by(RateName::Theorem1RhoF).valid);
        assert!(by(RateName::Theorem1RhoG).valid);
        assert!(by(RateName::Theorem2Rho).valid);
        assert!(by(RateName::ROptimized).valid);
        assert!(!by(RateName::Corollary1New).valid);
        assert!(by(RateName::Corollary1New).condition_note.contains("mu_f"));
        assert!(!by(RateName::Prop2Case1Old).valid);
    }

    #[test]
    fn full_table_two_prox_setting() {
        let table = compare_all(
            &cls(0.0, 1.0),
            &cls(1.0, f64::INFINITY),
            &cls(0.0, 1.0),
            &algo(0.5, 1.0),
        );
        let by = |n: RateName| table.iter().find(|r| r.name == n).unwrap();
        assert!(by(RateName::Corollary1New).valid);
        assert!(by(RateName::CondatOld).valid);
        // lambda != 1 gates the same rows off
        let table = compare_all(
            &cls(0.0, 1.0),
            &cls(1.0, f64::INFINITY),
            &cls(0.0, 1.0),
            &algo(0.5, 0.9),
        );
        let by = |n: RateName| table.iter().find(|r| r.name == n).unwrap();
        assert!(!by(RateName::Corollary1New).valid);
        assert!(by(RateName::CondatOld).condition_note.contains("lambda = 1"));
    }

    #[test]
    fn full_table_infinite_l_h() {
        let table = compare_all(
            &cls(0.0, 1.0),
            &cls(0.0, 1.0),
            &cls(0.0, f64::INFINITY),
            &algo(0.5, 1.0),
        );
        assert_eq!(table.len(), 12);
        assert!(table.iter().all(|r| !r.valid));
    }
}
