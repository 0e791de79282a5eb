//! Small dense-vector helpers. Problems here are low-dimensional, so plain
//! slices beat pulling in a matrix library.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `x += s * d`, in place.
pub fn add_scaled(x: &mut [f64], s: f64, d: &[f64]) {
    debug_assert_eq!(x.len(), d.len());
    for (xi, di) in x.iter_mut().zip(d) {
        *xi += s * di;
    }
}

/// `base + s * d` as a new vector.
pub fn offset(base: &[f64], s: f64, d: &[f64]) -> Vec<f64> {
    debug_assert_eq!(base.len(), d.len());
    base.iter().zip(d).map(|(b, di)| b + s * di).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a = [1.0, 2.0, 2.0];
        assert_eq!(dot(&a, &a), 9.0);
        assert_eq!(norm(&a), 3.0);
        assert_eq!(dist(&a, &[1.0, 2.0, 2.0]), 0.0);
        let mut x = vec![1.0, 1.0, 1.0];
        add_scaled(&mut x, 2.0, &a);
        assert_eq!(x, vec![3.0, 5.0, 5.0]);
        assert_eq!(offset(&a, -1.0, &a), vec![0.0, 0.0, 0.0]);
    }
}
