//! One-dimensional golden-section minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimize `f` on [a, b] by golden-section search down to an interval of
/// relative width `rel_tol`; returns (argmin, min). Exact only for unimodal
/// objectives; on a flat or multimodal objective it still converges to a
/// point, which callers must cross-check if they care.
pub fn golden_section_min(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> (f64, f64) {
    assert!(a < b && rel_tol > 0.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    // 200 iterations shrink the interval by phi^200 ~ 1e-42; the tolerance
    // check is the real exit, this is a backstop.
    for _ in 0..200 {
        let scale = 1.0_f64.max(a.abs()).max(b.abs());
        if (b - a).abs() <= rel_tol * scale {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}
