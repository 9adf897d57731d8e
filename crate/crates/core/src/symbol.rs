//! The DYS symbol polynomial and sampled sup-modulus estimation over SRG
//! boundary circles.
//!
//! For operator classes whose graphs fill the three circles, the tight
//! Lipschitz constant of the splitting operator equals sup |zeta| over the
//! product of the circle boundaries; sampling a uniform angular grid gives a
//! deterministic lower estimate of that sup.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::classes::{gradient_srg, resolvent_srg, AlgoParams, CircleSpec, FunctionClassParams};
use crate::error::Error;

/// The symbol polynomial
/// `zeta(z_f, z_g, z_h) = 1 - lambda*z_g + lambda*z_f*(2 z_g - 1 - alpha*z_h*z_g)`.
/// Its modulus over the circle product is the quantity every rate bounds.
pub fn zeta_dys(z_f: Complex64, z_g: Complex64, z_h: Complex64, params: &AlgoParams) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let lambda = params.lambda();
    let alpha = params.alpha();
    one - lambda * z_g + lambda * z_f * (2.0 * z_g - one - alpha * z_h * z_g)
}

/// One evaluated grid point: the three circle points and the symbol value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPoint {
    pub z_f: Complex64,
    pub z_g: Complex64,
    pub z_h: Complex64,
    pub value: Complex64,
    pub modulus: f64,
}

impl SymbolPoint {
    fn new(z_f: Complex64, z_g: Complex64, z_h: Complex64, value: Complex64) -> Self {
        SymbolPoint {
            z_f,
            z_g,
            z_h,
            value,
            modulus: value.norm_sqr().sqrt(),
        }
    }
}

/// Sampled lower estimate of sup |zeta| with the grid point attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEstimate {
    pub sup_modulus: f64,
    pub argmax: SymbolPoint,
    pub grid_n: usize,
}

/// The three boundary circles a class triple induces: resolvent circles for
/// f and g (scaled by alpha), gradient circle for h (needs finite L_h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCircles {
    pub f: CircleSpec,
    pub g: CircleSpec,
    pub h: CircleSpec,
}

pub fn boundary_circles(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
) -> Result<BoundaryCircles, Error> {
    Ok(BoundaryCircles {
        f: resolvent_srg(f, params.alpha()),
        g: resolvent_srg(g, params.alpha()),
        h: gradient_srg(h)?,
    })
}

/// Visits all grid_n^3 boundary triples in row-major order (phi_f outer,
/// phi_g middle, phi_h inner), angles 2*pi*k/grid_n. The hoisted factors
/// reproduce `zeta_dys`'s operation sequence bit for bit, so every visited
/// value equals the plain evaluation exactly.
fn scan_grid(
    circles: &BoundaryCircles,
    params: &AlgoParams,
    grid_n: usize,
    mut visit: impl FnMut(usize, Complex64, Complex64, Complex64, Complex64),
) {
    assert!(grid_n >= 1, "need at least one angle per circle");
    let pf = circles.f.sample_boundary(grid_n);
    let pg = circles.g.sample_boundary(grid_n);
    let ph = circles.h.sample_boundary(grid_n);
    scan_points(&pf, &pg, &ph, params, &mut visit);
}

fn scan_points(
    pf: &[Complex64],
    pg: &[Complex64],
    ph: &[Complex64],
    params: &AlgoParams,
    visit: &mut impl FnMut(usize, Complex64, Complex64, Complex64, Complex64),
) {
    let one = Complex64::new(1.0, 0.0);
    let lambda = params.lambda();
    let alpha = params.alpha();
    let ah: Vec<Complex64> = ph.iter().map(|&z_h| alpha * z_h).collect();
    let mut flat = 0usize;
    for &z_f in pf {
        let lzf = lambda * z_f;
        for &z_g in pg {
            let t1 = one - lambda * z_g;
            let a = 2.0 * z_g - one;
            for (&z_h, &ahk) in ph.iter().zip(&ah) {
                let value = t1 + lzf * (a - ahk * z_g);
                visit(flat, z_f, z_g, z_h, value);
                flat += 1;
            }
        }
    }
}

struct MaxTracker {
    best_sq: f64,
    best: Option<SymbolPoint>,
}

impl MaxTracker {
    fn new() -> Self {
        MaxTracker {
            best_sq: f64::NEG_INFINITY,
            best: None,
        }
    }

    // strictly-greater update: ties keep the earliest (lowest flat index)
    #[inline]
    fn offer(&mut self, z_f: Complex64, z_g: Complex64, z_h: Complex64, value: Complex64) {
        let m2 = value.norm_sqr();
        if m2 > self.best_sq {
            self.best_sq = m2;
            self.best = Some(SymbolPoint::new(z_f, z_g, z_h, value));
        }
    }
}

/// Max |zeta| over the grid_n^3 uniform boundary grid. A lower bound on the
/// true sup; nondecreasing under grid doubling because the angle set is
/// nested (2*pi*k/n == 2*pi*(2k)/(2n) exactly in floating point).
pub fn estimate_sup_modulus(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    grid_n: usize,
) -> Result<SupEstimate, Error> {
    let circles = boundary_circles(f, g, h, params)?;
    let mut tracker = MaxTracker::new();
    scan_grid(&circles, params, grid_n, |_, z_f, z_g, z_h, value| {
        tracker.offer(z_f, z_g, z_h, value);
    });
    let argmax = tracker.best.expect("grid_n >= 1 guarantees a point");
    Ok(SupEstimate {
        sup_modulus: argmax.modulus,
        argmax,
        grid_n,
    })
}

/// `estimate_sup_modulus` plus one local refinement pass: a 64^3 grid over
/// the +-one-step angular box around the coarse argmax. Deterministic, never
/// below the plain estimate.
pub fn estimate_sup_modulus_refined(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    grid_n: usize,
) -> Result<SupEstimate, Error> {
    const LOCAL: usize = 64;
    let circles = boundary_circles(f, g, h, params)?;
    let mut tracker = MaxTracker::new();
    let mut best_flat = 0usize;
    scan_grid(&circles, params, grid_n, |flat, z_f, z_g, z_h, value| {
        let m2 = value.norm_sqr();
        if m2 > tracker.best_sq {
            best_flat = flat;
        }
        tracker.offer(z_f, z_g, z_h, value);
    });

    let k = best_flat % grid_n;
    let j = (best_flat / grid_n) % grid_n;
    let i = best_flat / (grid_n * grid_n);
    let step = TAU / grid_n as f64;
    let local_axis = |circle: &CircleSpec, idx: usize| -> Vec<Complex64> {
        let phi_c = TAU * (idx as f64) / (grid_n as f64);
        (0..LOCAL)
            .map(|t| {
                let phi = phi_c - step + 2.0 * step * (t as f64) / ((LOCAL - 1) as f64);
                circle.point_at(phi)
            })
            .collect()
    };
    let pf = local_axis(&circles.f, i);
    let pg = local_axis(&circles.g, j);
    let ph = local_axis(&circles.h, k);
    scan_points(&pf, &pg, &ph, params, &mut |_, z_f, z_g, z_h, value| {
        tracker.offer(z_f, z_g, z_h, value);
    });

    let argmax = tracker.best.expect("nonempty grids");
    Ok(SupEstimate {
        sup_modulus: argmax.modulus,
        argmax,
        grid_n,
    })
}

/// Streams every grid point in the deterministic scan order without
/// materializing the cloud; `visit` receives the flat row-major index
/// (phi_f outer, phi_g middle, phi_h inner).
pub fn for_each_symbol_point(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    grid_n: usize,
    mut visit: impl FnMut(usize, &SymbolPoint),
) -> Result<(), Error> {
    let circles = boundary_circles(f, g, h, params)?;
    scan_grid(&circles, params, grid_n, |flat, z_f, z_g, z_h, value| {
        visit(flat, &SymbolPoint::new(z_f, z_g, z_h, value));
    });
    Ok(())
}

/// The full evaluated cloud, grid_n^3 points in scan order. Materializes
/// everything; prefer `for_each_symbol_point` for large grids.
pub fn export_symbol_cloud(
    f: &FunctionClassParams,
    g: &FunctionClassParams,
    h: &FunctionClassParams,
    params: &AlgoParams,
    grid_n: usize,
) -> Result<Vec<SymbolPoint>, Error> {
    let mut cloud = Vec::with_capacity(grid_n.saturating_mul(grid_n).saturating_mul(grid_n));
    for_each_symbol_point(f, g, h, params, grid_n, |_, p| cloud.push(*p))?;
    Ok(cloud)
}

/// Maximizes k|z - b|^2 + l|z|^2 over a real-centered circle boundary. The
/// maximum sits at a real-axis endpoint z = c - r or z = c + r; ties go to
/// c + r. Returns (endpoint, value).
pub fn circle_quadratic_max(k: f64, l: f64, b: f64, circle: &CircleSpec) -> (f64, f64) {
    assert!(
        k >= 0.0 && l >= 0.0 && k + l > 0.0,
        "need k, l >= 0 and not both zero"
    );
    let obj = |z: f64| k * (z - b) * (z - b) + l * z * z;
    let lo = circle.leftmost();
    let hi = circle.rightmost();
    let (v_lo, v_hi) = (obj(lo), obj(hi));
    if v_hi >= v_lo {
        (hi, v_hi)
    } else {
        (lo, v_lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cls(mu: f64, l: f64) -> FunctionClassParams {
        FunctionClassParams::from_bounds(mu, l).unwrap()
    }

    fn algo(alpha: f64, lambda: f64) -> AlgoParams {
        AlgoParams::new(alpha, lambda).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// expanded form 1 - lambda z_f - lambda z_g + lambda (2 - alpha z_h) z_f z_g
    fn zeta_expanded(z_f: Complex64, z_g: Complex64, z_h: Complex64, p: &AlgoParams) -> Complex64 {
        let one = c(1.0, 0.0);
        let two = c(2.0, 0.0);
        one - p.lambda() * z_f - p.lambda() * z_g
            + p.lambda() * (two - p.alpha() * z_h) * z_f * z_g
    }

    #[test]
    fn zeta_point_values() {
        let p = algo(0.9, 1.0);
        assert!((zeta_dys(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), &p) - c(1.0, 0.0)).norm() == 0.0);
        assert!((zeta_dys(c(0.0, 0.0), c(0.0, 0.0), c(3.0, -1.0), &p) - c(1.0, 0.0)).norm() == 0.0);
        let p = algo(1.0, 1.0);
        let v = zeta_dys(c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0), &p);
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn factored_matches_expanded(
            zf in (-2.0f64..2.0, -2.0f64..2.0),
            zg in (-2.0f64..2.0, -2.0f64..2.0),
            zh in (-2.0f64..2.0, -2.0f64..2.0),
            alpha in 0.05f64..2.0,
            lambda in 0.05f64..2.0,
        ) {
            let p = algo(alpha, lambda);
            let (zf, zg, zh) = (c(zf.0, zf.1), c(zg.0, zg.1), c(zh.0, zh.1));
            let a = zeta_dys(zf, zg, zh, &p);
            let b = zeta_expanded(zf, zg, zh, &p);
            prop_assert!((a - b).norm() <= 1e-14 * (1.0 + a.norm()));
        }

        #[test]
        fn conjugate_symmetry(
            zf in (-2.0f64..2.0, -2.0f64..2.0),
            zg in (-2.0f64..2.0, -2.0f64..2.0),
            zh in (-2.0f64..2.0, -2.0f64..2.0),
            alpha in 0.05f64..2.0,
            lambda in 0.05f64..2.0,
        ) {
            let p = algo(alpha, lambda);
            let (zf, zg, zh) = (c(zf.0, zf.1), c(zg.0, zg.1), c(zh.0, zh.1));
            let m = zeta_dys(zf, zg, zh, &p).norm_sqr().sqrt();
            let mc = zeta_dys(zf.conj(), zg.conj(), zh.conj(), &p).norm_sqr().sqrt();
            prop_assert!((m - mc).abs() <= 1e-12 * (1.0 + m));
        }
    }

    #[test]
    fn nonexpansive_drs_sup_is_one() {
        // mu_f = mu_g = 0, L_f = L_g = inf, h degenerate zero: the operator
        // is an unrelaxed reflected-resolvent average, exactly nonexpansive.
        let est = estimate_sup_modulus(
            &cls(0.0, f64::INFINITY),
            &cls(0.0, f64::INFINITY),
            &cls(0.0, 0.0),
            &algo(1.0, 1.0),
            64,
        )
        .unwrap();
        assert!((est.sup_modulus - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_sample_grid_hits_rightmost_points() {
        let (f, g, h) = (cls(0.7, 1.5), cls(2.0, 3.0), cls(0.8, 1.3));
        let p = algo(0.9, 1.0);
        let est = estimate_sup_modulus(&f, &g, &h, &p, 1).unwrap();
        let circles = boundary_circles(&f, &g, &h, &p).unwrap();
        let v = zeta_dys(
            circles.f.point_at(0.0),
            circles.g.point_at(0.0),
            circles.h.point_at(0.0),
            &p,
        );
        assert_eq!(est.sup_modulus, v.norm_sqr().sqrt());
    }

    #[test]
    fn reference_params_sup_estimate() {
        let est = estimate_sup_modulus(&cls(0.7, 1.5), &cls(2.0, 3.0), &cls(0.8, 1.3), &algo(0.9, 1.0), 64)
            .unwrap();
        assert!((est.sup_modulus - 0.45140885566417488).abs() < 1e-13);
        assert_eq!(est.sup_modulus, est.argmax.modulus);
        assert_eq!(est.grid_n, 64);
    }

    #[test]
    fn infinite_l_h_is_an_error() {
        let r = estimate_sup_modulus(
            &cls(0.0, 1.0),
            &cls(0.0, 1.0),
            &cls(0.0, f64::INFINITY),
            &algo(0.5, 1.0),
            8,
        );
        assert!(matches!(r, Err(Error::InfiniteSmoothness)));
    }

    #[test]
    fn cloud_matches_estimate_exactly() {
        let (f, g, h) = (cls(0.7, 1.5), cls(2.0, 3.0), cls(0.8, 1.3));
        let p = algo(0.9, 1.0);
        let est = estimate_sup_modulus(&f, &g, &h, &p, 16).unwrap();
        let cloud = export_symbol_cloud(&f, &g, &h, &p, 16).unwrap();
        assert_eq!(cloud.len(), 16 * 16 * 16);
        let max = cloud
            .iter()
            .map(|pt| pt.modulus)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max, est.sup_modulus); // bitwise: same kernel, same order
    }

    #[test]
    fn cloud_points_sit_on_their_circles() {
        let (f, g, h) = (cls(0.5, 2.0), cls(0.0, f64::INFINITY), cls(0.3, 1.1));
        let p = algo(0.7, 0.8);
        let circles = boundary_circles(&f, &g, &h, &p).unwrap();
        for pt in export_symbol_cloud(&f, &g, &h, &p, 7).unwrap() {
            let on = |z: Complex64, circle: &CircleSpec| {
                ((z - c(circle.center(), 0.0)).norm() - circle.radius()).abs() < 1e-12
            };
            assert!(on(pt.z_f, &circles.f));
            assert!(on(pt.z_g, &circles.g));
            assert!(on(pt.z_h, &circles.h));
            assert!((pt.modulus - pt.value.norm_sqr().sqrt()).abs() == 0.0);
        }
    }

    #[test]
    fn degenerate_circles_give_identical_points() {
        let cloud = export_symbol_cloud(
            &cls(1.0, 1.0),
            &cls(2.0, 2.0),
            &cls(0.5, 0.5),
            &algo(0.5, 1.0),
            3,
        )
        .unwrap();
        assert!(cloud.iter().all(|p| p.value == cloud[0].value));
    }

    #[test]
    fn grid_doubling_never_decreases_estimate() {
        let (f, g, h) = (cls(0.2, 4.0), cls(1.0, f64::INFINITY), cls(0.1, 2.5));
        let p = algo(0.4, 1.1);
        let mut prev = 0.0;
        for n in [8usize, 16, 32, 64] {
            let est = estimate_sup_modulus(&f, &g, &h, &p, n).unwrap().sup_modulus;
            assert!(est >= prev, "grid {n}: {est} < {prev}");
            prev = est;
        }
    }

    #[test]
    fn refinement_never_decreases_estimate() {
        let (f, g, h) = (cls(0.7, 1.5), cls(2.0, 3.0), cls(0.8, 1.3));
        let p = algo(0.9, 1.0);
        let plain = estimate_sup_modulus(&f, &g, &h, &p, 32).unwrap();
        let refined = estimate_sup_modulus_refined(&f, &g, &h, &p, 32).unwrap();
        assert!(refined.sup_modulus >= plain.sup_modulus);
        // local box spans one coarse step; it cannot beat the next-finer
        // nested grid by much, and must stay a lower bound of the truth
        let fine = estimate_sup_modulus(&f, &g, &h, &p, 512).unwrap();
        assert!(refined.sup_modulus <= fine.sup_modulus + 1e-9);
    }

    #[test]
    fn quadratic_circle_max_endpoints() {
        let circ = |c0, r| CircleSpec::new(c0, r).unwrap();
        assert_eq!(circle_quadratic_max(1.0, 0.0, 0.0, &circ(2.0, 1.0)), (3.0, 9.0));
        assert_eq!(
            circle_quadratic_max(1.0, 1.0, 10.0, &circ(0.0, 1.0)),
            (-1.0, 122.0)
        );
        let (z, _) = circle_quadratic_max(0.0, 1.0, -7.0, &circ(1.5, 0.25));
        assert_eq!(z, 1.75);
        // tie on a radius-0 circle resolves to center + radius
        let (z, v) = circle_quadratic_max(1.0, 2.0, 0.5, &circ(1.0, 0.0));
        assert_eq!((z, v), (1.0, 1.0 * 0.25 + 2.0));
    }

    proptest! {
        #[test]
        fn endpoint_beats_angular_sweep(
            k in 0.0f64..5.0,
            l in 0.01f64..5.0,
            b in -5.0f64..5.0,
            center in -2.0f64..2.0,
            radius in 0.0f64..2.0,
        ) {
            let circle = CircleSpec::new(center, radius).unwrap();
            let (_, best) = circle_quadratic_max(k, l, b, &circle);
            let bc = c(b, 0.0);
            for t in 0..64 {
                let z = circle.point_at(TAU * t as f64 / 64.0);
                let v = k * (z - bc).norm_sqr() + l * z.norm_sqr();
                prop_assert!(best >= v - 1e-10 * (1.0 + v.abs()));
            }
        }
    }
}
