//! One-dimensional root finding and maximization.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Outcome of a bracketing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
    pub width: f64,
}

/// Brent's method for a root of `f` in `[a, b]`, assuming a sign change.
///
/// Stops when the bracket is narrower than `xtol` or an exact zero is hit.
/// Returns `None` if `f(a)` and `f(b)` have the same strict sign.
pub fn brent_root(f: impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64, max_iter: usize) -> Option<Bracketed> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(Bracketed { x: a, fx: 0.0, iterations: 0, width: 0.0 });
    }
    if fb == 0.0 {
        return Some(Bracketed { x: b, fx: 0.0, iterations: 0, width: 0.0 });
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            break;
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Some(Bracketed { x: b, fx: fb, iterations, width: (c - b).abs() })
}

/// Golden-section search for a maximizer of `f` on `[a, b]`.
///
/// Shrinks the bracket until it is narrower than `xtol`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64, max_iter: usize) -> Bracketed {
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    while b - a > xtol && iterations < max_iter {
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let (x, fx) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Bracketed { x, fx, iterations, width: b - a }
}
