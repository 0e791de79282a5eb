//! Gauss-Legendre quadrature on finite intervals.
//!
//! An `n`-node rule integrates polynomials of degree `2n - 1` exactly, which
//! is what the kernel moment computations rely on. Nodes are the roots of the
//! Legendre polynomial `P_n`, found by Newton iteration from the classical
//! cosine initial guess; weights are `2 / ((1 - x²) P'_n(x)²)`.

/// Legendre polynomial value and derivative at `x` via the three-term
/// recurrence `(k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}`.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    // P'_n(x) = n (x P_n - P_{n-1}) / (x² - 1), valid for |x| < 1
    let dp = n as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, dp)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// nodes in ascending order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // the cosine guesses enumerate the positive roots from the right
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `∫_a^b f(x) dx` with a fixed `order`-point rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    fixed_panel(&f, a, b, &nodes, &weights)
}

fn fixed_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let mid = 0.5 * (a + b);
    let scale = 0.5 * (b - a);
    let mut total = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        total += w * f(mid + scale * x);
    }
    total * scale
}

/// Adaptive bisection with a 16-point rule per panel, accepting a panel when
/// the whole-panel and split-panel estimates agree to `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(16);
    adaptive_panel(&f, a, b, tol, &nodes, &weights, 0)
}

fn adaptive_panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    nodes: &[f64],
    weights: &[f64],
    depth: u32,
) -> f64 {
    let whole = fixed_panel(f, a, b, nodes, weights);
    let mid = 0.5 * (a + b);
    let left = fixed_panel(f, a, mid, nodes, weights);
    let right = fixed_panel(f, mid, b, nodes, weights);
    let split = left + right;
    if (whole - split).abs() <= tol || depth >= 48 {
        split
    } else {
        adaptive_panel(f, a, mid, 0.5 * tol, nodes, weights, depth + 1)
            + adaptive_panel(f, mid, b, 0.5 * tol, nodes, weights, depth + 1)
    }
}
