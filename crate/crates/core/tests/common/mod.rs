#![allow(dead_code)]

/// Mean and standard error of the mean.
pub fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Binomial standard error at success probability `p` over `k` events.
pub fn binomial_se(p: f64, k: usize) -> f64 {
    (p * (1.0 - p) / k as f64).sqrt()
}

pub fn sq_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Result line for the acceptance report.
pub fn report(name: &str, ok: bool, detail: &str) {
    println!("{} [PRIMARY] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
}
