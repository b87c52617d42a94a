use crate::{CMat, CVec, Complex64};

/// Spectral norm estimated by power iteration on `A†A` with the default
/// budget (20 iterations, relative tolerance 1e-6).
pub fn spectral_norm(a: &CMat) -> f64 {
    spectral_norm_with(a, 20, 1e-6)
}

/// Deterministic start vector with no special alignment to lattice or
/// Landau eigenvectors.
fn start_vector(n: usize) -> CVec {
    let v = CVec::from_fn(n, |k, _| {
        let x = k as f64 + 1.0;
        Complex64::new(1.0 + 0.37 * (0.61 * x).sin(), 0.23 * (1.3 * x).cos())
    });
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

pub fn spectral_norm_with(a: &CMat, iters: usize, tol: f64) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let mut v = start_vector(a.ncols());
    let mut sigma = 0.0f64;
    for _ in 0..iters.max(1) {
        let w = a * &v;
        let s = w.norm();
        if s == 0.0 {
            break;
        }
        let z = a.adjoint() * &w;
        let zn = z.norm();
        if zn == 0.0 {
            sigma = sigma.max(s);
            break;
        }
        v = z / Complex64::new(zn, 0.0);
        let converged = (s - sigma).abs() <= tol * s;
        sigma = s;
        if converged {
            break;
        }
    }
    sigma.max((a * &v).norm())
}

/// `‖a − b‖ / ‖scale‖`, or the absolute difference when `scale` vanishes.
pub fn relative_defect(a: &CMat, b: &CMat, scale: f64) -> f64 {
    let d = spectral_norm(&(a - b));
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}
