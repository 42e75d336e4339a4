//! Probability-simplex helpers: Euclidean projection, Dirichlet draws and
//! regular grids.

use rand::Rng;

/// Euclidean projection of `v` onto `{x : x >= 0, sum x = 1}` (sort-based).
pub fn project(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite input"));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - theta).max(0.0)).collect();
    // absorb rounding so the block sums to one to machine precision
    let s: f64 = x.iter().sum();
    if s > 0.0 {
        x.iter_mut().for_each(|xi| *xi /= s);
    } else {
        x = vec![1.0 / v.len() as f64; v.len()];
    }
    x
}

/// Symmetric Dirichlet draw with concentration one.
pub fn dirichlet_ones<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    if s > 0.0 {
        w.iter_mut().for_each(|x| *x /= s);
    } else {
        w = vec![1.0 / dim as f64; dim];
    }
    w
}

pub fn vertex(dim: usize, at: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[at] = 1.0;
    v
}

/// Number of points `k/steps` on the `dim`-simplex: C(steps + dim - 1, dim - 1).
pub fn grid_size(dim: usize, steps: usize) -> f64 {
    if dim <= 1 {
        return 1.0;
    }
    let mut c = 1.0f64;
    for i in 1..dim {
        c = c * (steps + i) as f64 / i as f64;
    }
    c.round()
}

/// All points of the simplex whose coordinates are multiples of `1/steps`,
/// in lexicographic order of the integer compositions.
pub fn grid_points(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, left: usize, steps: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == dim {
            cur.push(left);
            out.push(cur.iter().map(|&k| k as f64 / steps as f64).collect());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim, left - k, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, steps, steps.max(1), &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_examples() {
        assert_eq!(project(&[0.5, 0.5]), vec![0.5, 0.5]);
        assert_eq!(project(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project(&[0.6, 0.6]);
        assert!((p[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_counts() {
        assert_eq!(grid_points(2, 20).len(), 21);
        assert_eq!(grid_size(3, 20), 231.0);
        assert_eq!(grid_points(3, 20).len(), 231);
        assert_eq!(grid_points(1, 20), vec![vec![1.0]]);
        assert_eq!(grid_points(2, 1), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    proptest! {
        #[test]
        fn projection_lands_on_simplex(v in prop::collection::vec(-5.0f64..5.0, 1..8)) {
            let p = project(&v);
            let s: f64 = p.iter().sum();
            prop_assert!((s - 1.0).abs() <= 1e-12);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
        }

        #[test]
        fn projection_is_idempotent(v in prop::collection::vec(-5.0f64..5.0, 1..8)) {
            let p = project(&v);
            let q = project(&p);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn projection_ignores_constant_shift(v in prop::collection::vec(-5.0f64..5.0, 1..8), c in -3.0f64..3.0) {
            let p = project(&v);
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let q = project(&shifted);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }
}
