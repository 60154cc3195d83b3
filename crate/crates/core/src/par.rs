//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the helpers run on the rayon
//! global pool. Results are always collected in input order and reduced
//! sequentially, so parallel and sequential runs produce identical bits.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Whether this request actually runs in parallel in the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Order-preserving map.
pub fn map<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving map over an integer range.
pub fn map_range<U, F>(exec: Exec, range: std::ops::Range<i64>, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(i64) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return range.into_par_iter().map(f).collect();
    }
    let _ = exec;
    range.map(f).collect()
}

/// Compensated (Neumaier) summation; deterministic in the order given.
pub fn sum_c64<I: IntoIterator<Item = Complex64>>(values: I) -> Complex64 {
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for v in values {
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.total(), im.total())
}

pub fn sum_f64<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = Neumaier::default();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_agree_bitwise() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64 * 0.37).sin() * 1e-3).collect();
        let a = sum_f64(map(Exec::Parallel, &xs, |x| x.exp()));
        let b = sum_f64(map(Exec::Sequential, &xs, |x| x.exp()));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum_f64(v), 2.0);
    }
}
