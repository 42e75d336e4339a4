/// Smallest-norm point of the convex hull of `vectors`, by Frank-Wolfe with
/// exact line search on the Gram matrix. Empty input gives an empty vector.
pub(crate) fn min_norm_combination(vectors: &[&[f64]]) -> Vec<f64> {
    let k = vectors.len();
    if k == 0 {
        return Vec::new();
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let gram: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| dot(vectors[i], vectors[j])).collect()).collect();
    let start = (0..k).min_by(|&a, &b| gram[a][a].total_cmp(&gram[b][b])).unwrap_or(0);
    let mut lambda = vec![0.0; k];
    lambda[start] = 1.0;
    for _ in 0..500 {
        let g: Vec<f64> = (0..k).map(|i| dot(&gram[i], &lambda)).collect();
        let quad = dot(&g, &lambda);
        let j = (0..k).min_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap_or(0);
        // duality gap of the quadratic over the simplex
        if quad - g[j] <= 1e-15 * quad.max(1e-300) {
            break;
        }
        let denom = quad - 2.0 * g[j] + gram[j][j];
        if denom <= 0.0 {
            break;
        }
        let t = ((quad - g[j]) / denom).clamp(0.0, 1.0);
        lambda.iter_mut().for_each(|l| *l *= 1.0 - t);
        lambda[j] += t;
    }
    let dim = vectors[0].len();
    let mut out = vec![0.0; dim];
    for (l, v) in lambda.iter().zip(vectors) {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += l * x;
        }
    }
    out
}
