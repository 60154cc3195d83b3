use super::QpError;

/// Most points the bounded enumeration will visit.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(x, y)| *x as i128 * *y as i128).sum()
}

/// An integer functional strictly positive on every weight (perceptron
/// updates; terminates for weights in an open half-space).
pub fn positive_functional(weights: &[Vec<i64>]) -> Result<Vec<i64>, QpError> {
    let r = weights.first().map_or(0, Vec::len);
    if weights.iter().any(|w| w.iter().all(|&x| x == 0)) {
        return Err(QpError::Improper);
    }
    let mut xi = vec![0i64; r];
    for _ in 0..10_000 {
        let mut clean = true;
        for w in weights {
            if dot(&xi, w) <= 0 {
                clean = false;
                for (x, wi) in xi.iter_mut().zip(w) {
                    *x += wi;
                }
            }
        }
        if clean {
            return Ok(xi);
        }
    }
    Err(QpError::Improper)
}

/// Number of `j ∈ ℕⁿ` with `μ = k·a + Σ_i (j_i + ½) w_i`.
pub fn vector_partition(weights: &[Vec<i64>], a: &[i64], mu: &[i64], k: i64) -> Result<u64, QpError> {
    let r = mu.len();
    if a.len() != r || weights.iter().any(|w| w.len() != r) {
        return Err(QpError::RankMismatch { expected: r, got: a.len() });
    }
    if weights.iter().flatten().any(|x| x % 2 != 0) {
        return Err(QpError::OddWeight);
    }
    // t = μ − k a − Σ w_i / 2 must equal Σ j_i w_i
    let mut t: Vec<i64> = mu.iter().zip(a).map(|(m, ai)| m - k * ai).collect();
    for w in weights {
        for (ti, wi) in t.iter_mut().zip(w) {
            *ti -= wi / 2;
        }
    }
    if weights.is_empty() {
        return Ok(u64::from(t.iter().all(|&x| x == 0)));
    }
    let xi = positive_functional(weights)?;
    let level = dot(&xi, &t);
    if level < 0 {
        return Ok(0);
    }
    let steps: Vec<i128> = weights.iter().map(|w| dot(&xi, w)).collect();
    let n = weights.len();
    let visits: u128 = steps[..n - 1].iter().map(|s| (level / s + 1) as u128).product();
    if visits > ENUMERATION_LIMIT {
        return Err(QpError::EnumerationTooLarge(visits));
    }
    Ok(count(weights, &steps, &t, level, 0))
}

fn count(weights: &[Vec<i64>], steps: &[i128], rest: &[i64], level: i128, i: usize) -> u64 {
    let n = weights.len();
    if i == n - 1 {
        // rest must be a nonnegative integer multiple of the last weight
        let w = &weights[i];
        let Some(p) = w.iter().position(|&x| x != 0) else { return 0 };
        if rest[p] % w[p] != 0 {
            return 0;
        }
        let j = rest[p] / w[p];
        return u64::from(j >= 0 && rest.iter().zip(w).all(|(x, wi)| *x == j * wi));
    }
    let mut total = 0;
    let max_j = level / steps[i];
    let mut cur = rest.to_vec();
    for j in 0..=max_j {
        total += count(weights, steps, &cur, level - j * steps[i], i + 1);
        for (c, wi) in cur.iter_mut().zip(&weights[i]) {
            *c -= wi;
        }
    }
    total
}
