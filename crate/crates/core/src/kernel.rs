//! Legendre-polynomial smoothing kernels.
//!
//! For a smoothness order `β > 1`, let `l` be the largest integer strictly
//! below `β`. The kernel is the weighted sum
//!
//! ```text
//! K_β(r) = Σ_{m=0}^{l} p'_m(0) p_m(r),     p_m(r) = √(2m+1) L_m(r),
//! ```
//!
//! with `L_m` the Legendre polynomials. The `p_m` are orthonormal with
//! respect to the uniform distribution on `[-1, 1]`, which gives the moment
//! identities `E[K(r)] = 0`, `E[r K(r)] = 1`, and `E[r^j K(r)] = 0` for
//! `2 ≤ j ≤ l`. Because even-order Legendre polynomials have vanishing
//! derivative at 0, every even coefficient is zero and the kernel is odd.
//!
//! All expectations in this module are over `r ~ Uniform[-1, 1]` (density
//! 1/2), and the derived constants `κ_β = E[|r|^β |K(r)|]` and
//! `κ = E[K(r)²]` follow the same convention; the schedules and bounds in
//! [`crate::optimizer`] consume them in that form.

use crate::error::Error;
use crate::quad;
use crate::Result;

/// Legendre polynomial `L_m(r)` by the Bonnet recurrence
/// `(m+1) L_{m+1} = (2m+1) r L_m - m L_{m-1}`, `L_0 = 1`, `L_1 = r`.
pub fn legendre(m: u32, r: f64) -> f64 {
    debug_assert!(r.abs() <= 1.0 + 1e-12, "Legendre argument out of [-1, 1]");
    match m {
        0 => 1.0,
        1 => r,
        _ => {
            let mut prev = 1.0;
            let mut cur = r;
            for k in 1..m {
                let kf = f64::from(k);
                let next = ((2.0 * kf + 1.0) * r * cur - kf * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Derivative of the orthonormal polynomial `p_m = √(2m+1) L_m` at zero.
///
/// Uses the identity `L'_m(0) = m L_{m-1}(0)`; zero for even `m`.
pub fn legendre_deriv_at_zero(m: u32) -> f64 {
    if m.is_multiple_of(2) {
        return 0.0;
    }
    f64::from(2 * m + 1).sqrt() * f64::from(m) * legendre(m - 1, 0.0)
}

/// Largest integer strictly below `beta` (`beta = 3 → 2`, `beta = 3.5 → 3`).
pub fn order_below(beta: f64) -> u32 {
    debug_assert!(beta > 1.0);
    let floor = beta.floor();
    let l = if floor == beta { floor - 1.0 } else { floor };
    l as u32
}

/// A smoothing kernel for a fixed smoothness order, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    beta: f64,
    order: u32,
    coefficients: Vec<f64>,
    kappa_beta: f64,
    kappa: f64,
}

impl KernelSpec {
    /// Builds the kernel for `beta` with the default quadrature order
    /// `2l + 8`.
    pub fn for_beta(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 1.0 {
            return Err(Error::InvalidBeta(beta));
        }
        let l = order_below(beta) as usize;
        build_kernel(beta, 2 * l + 8)
    }

    /// Smoothness order the kernel was built for.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Highest polynomial order `l` (largest integer strictly below β).
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Weights `c_m = p'_m(0)`, dense over `m = 0..=l` (even entries zero).
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `κ_β = E[|r|^β |K(r)|]`.
    pub fn kappa_beta(&self) -> f64 {
        self.kappa_beta
    }

    /// `κ = E[K(r)²]`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Evaluates `K(r) = Σ_m c_m √(2m+1) L_m(r)` with a single pass of the
    /// Legendre recurrence.
    pub fn eval(&self, r: f64) -> f64 {
        debug_assert!(r.abs() <= 1.0 + 1e-12, "kernel argument out of [-1, 1]");
        let mut total = 0.0;
        let mut prev = 1.0; // L_{m-1}
        let mut cur = r; // L_m for m = 1
        for (m, &c) in self.coefficients.iter().enumerate() {
            let lm = match m {
                0 => 1.0,
                1 => cur,
                _ => {
                    let kf = (m - 1) as f64;
                    let next = ((2.0 * kf + 1.0) * r * cur - kf * prev) / (kf + 1.0);
                    prev = cur;
                    cur = next;
                    cur
                }
            };
            if c != 0.0 {
                total += c * ((2 * m + 1) as f64).sqrt() * lm;
            }
        }
        total
    }

    /// `E[r^j K(r)]` for `r ~ Uniform[-1, 1]` by Gauss-Legendre quadrature;
    /// exact up to round-off for `j ≤ l`.
    pub fn moment(&self, j: u32) -> f64 {
        kernel_moment(self, j)
    }

    /// Negative-control fixture: a copy with coefficient `index` scaled by
    /// `factor`, deliberately breaking the moment conditions.
    #[doc(hidden)]
    pub fn with_scaled_coefficient(&self, index: usize, factor: f64) -> KernelSpec {
        let mut corrupted = self.clone();
        corrupted.coefficients[index] *= factor;
        corrupted
    }
}

/// Constructs the kernel for `beta`, computing the coefficients and the
/// constants `κ_β`, `κ`. `quadrature_order` must integrate degree-`2l`
/// polynomials exactly (i.e. be at least `l + 1`); the moment conditions
/// then hold by construction up to round-off.
pub fn build_kernel(beta: f64, quadrature_order: usize) -> Result<KernelSpec> {
    if !beta.is_finite() || beta <= 1.0 {
        return Err(Error::InvalidBeta(beta));
    }
    let order = order_below(beta);
    if quadrature_order < order as usize + 1 {
        return Err(Error::InvalidConfig(format!(
            "quadrature order {quadrature_order} cannot integrate degree-{} polynomials exactly",
            2 * order
        )));
    }
    let coefficients: Vec<f64> = (0..=order).map(legendre_deriv_at_zero).collect();
    let mut spec = KernelSpec {
        beta,
        order,
        coefficients,
        kappa_beta: 0.0,
        kappa: 0.0,
    };
    let (kappa_beta, kappa) = kernel_constants(&spec);
    spec.kappa_beta = kappa_beta;
    spec.kappa = kappa;
    Ok(spec)
}

/// `E[r^j K(r)]` for `r ~ Uniform[-1, 1]`.
pub fn kernel_moment(spec: &KernelSpec, j: u32) -> f64 {
    // exactness needs 2·order > j + l; the +8 headroom keeps it cheap to call
    // with any small j
    let order = (j as usize + spec.order as usize) / 2 + 8;
    0.5 * quad::integrate(|r| r.powi(j as i32) * spec.eval(r), -1.0, 1.0, order)
}

/// `(κ_β, κ)` under the uniform-expectation convention.
///
/// `κ` is a polynomial moment and comes from a fixed rule. The integrand of
/// `κ_β` is non-smooth at the kernel's sign changes (and at 0 for fractional
/// β), so the domain is split at the kernel roots and each smooth piece is
/// integrated adaptively.
pub fn kernel_constants(spec: &KernelSpec) -> (f64, f64) {
    let poly_order = spec.order as usize + 2;
    let kappa = 0.5 * quad::integrate(|r| spec.eval(r) * spec.eval(r), -1.0, 1.0, poly_order);

    // |r|^β |K(r)| is even, so E[·] = ∫_0^1 r^β |K(r)| dr
    let mut kappa_beta = 0.0;
    let mut pieces = kernel_roots_unit_interval(spec);
    pieces.push(1.0);
    let mut left = 0.0;
    for right in pieces {
        if right - left < 1e-14 {
            left = right;
            continue;
        }
        let sign = spec.eval(0.5 * (left + right)).signum();
        kappa_beta +=
            quad::integrate_adaptive(|r| r.powf(spec.beta) * sign * spec.eval(r), left, right, 1e-14)
                .abs();
        left = right;
    }
    (kappa_beta, kappa)
}

/// Roots of the kernel in `(0, 1)`, by sign-scan and bisection. The root at
/// 0 (the kernel is odd) is not reported.
fn kernel_roots_unit_interval(spec: &KernelSpec) -> Vec<f64> {
    const GRID: usize = 4096;
    let mut roots = Vec::new();
    let mut prev_r = 1.0 / GRID as f64;
    let mut prev_v = spec.eval(prev_r);
    for i in 2..=GRID {
        let r = i as f64 / GRID as f64;
        let v = spec.eval(r);
        if prev_v == 0.0 {
            roots.push(prev_r);
        } else if prev_v.signum() != v.signum() && v != 0.0 {
            let (mut a, mut b, mut fa) = (prev_r, r, prev_v);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let fm = spec.eval(mid);
                if fm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if fa.signum() == fm.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_r = r;
        prev_v = v;
    }
    roots
}
