/// `n` evenly spaced points from `lo` to `hi` inclusive.
///
/// Points are computed as `lo + (hi - lo) * i / (n - 1)`, so a symmetric
/// grid with odd `n` contains exactly 0.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| {
                    if i == n - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * (i as f64 / last)
                    }
                })
                .collect()
        }
    }
}
