//! Adaptive Simpson quadrature with exclusion of non-finite points.

/// Result of [`adaptive_simpson`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Total width of sub-panels dropped because the integrand was not
    /// finite there.
    pub excluded_width: f64,
}

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Panels whose integrand is not finite are bisected down to `min_width`
/// and then dropped; their total width is reported.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    min_width: f64,
) -> Quadrature {
    let mut out = Quadrature { value: 0.0, excluded_width: 0.0 };
    if b <= a {
        return out;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    recurse(&mut f, a, b, fa, fm, fb, tol, min_width, MAX_DEPTH, &mut out);
    out
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    tol: f64,
    min_width: f64,
    depth: u32,
    out: &mut Quadrature,
) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let finite = fa.is_finite() && fm.is_finite() && fb.is_finite() && flm.is_finite() && frm.is_finite();

    if !finite {
        if b - a <= min_width || depth == 0 {
            out.excluded_width += b - a;
        } else {
            recurse(f, a, m, fa, flm, fm, tol * 0.5, min_width, depth - 1, out);
            recurse(f, m, b, fm, frm, fb, tol * 0.5, min_width, depth - 1, out);
        }
        return;
    }

    let whole = simpson(a, b, fa, fm, fb);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || b - a <= min_width {
        out.value += left + right + delta / 15.0;
    } else {
        recurse(f, a, m, fa, flm, fm, tol * 0.5, min_width, depth - 1, out);
        recurse(f, m, b, fm, frm, fb, tol * 0.5, min_width, depth - 1, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 1e-14);
        assert!((q.value - 0.0).abs() < 1e-13);
        assert_eq!(q.excluded_width, 0.0);
    }

    #[test]
    fn oscillatory_integrand() {
        let q = adaptive_simpson(f64::sin, 0.0, PI, 1e-12, 1e-14);
        assert!((q.value - 2.0).abs() < 1e-11);
    }

    #[test]
    fn singular_point_is_excluded() {
        // The pole at the midpoint is skipped in a small neighbourhood; the
        // rest of the integrand is integrated normally.
        let q = adaptive_simpson(
            |x| if x == 0.5 { f64::INFINITY } else { 1.0 },
            0.0,
            1.0,
            1e-10,
            1e-8,
        );
        assert!(q.excluded_width > 0.0 && q.excluded_width < 3e-8);
        assert!((q.value + q.excluded_width - 1.0).abs() < 1e-9);
    }
}
