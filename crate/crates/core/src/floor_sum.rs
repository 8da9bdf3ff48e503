//! Floor-quotient sums evaluated in sublinear time.

/// `D(n) = Σ_{k=1..n} floor(n/k)`, which also equals `Σ_{j=1..n} d(j)`.
///
/// Uses the hyperbola identity `D(n) = 2 Σ_{k≤√n} floor(n/k) − ⌊√n⌋²`.
pub fn divisor_summatory(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let r = n.isqrt();
    let head: u64 = (1..=r).map(|k| n / k).sum();
    2 * head - r * r
}

/// Calls `f(q, count)` once for each distinct quotient `q = floor(n/i)`,
/// `1 ≤ i ≤ n`, where `count` is the number of `i` sharing that quotient.
pub fn for_each_quotient(n: u64, mut f: impl FnMut(u64, u64)) {
    let mut i = 1;
    while i <= n {
        let q = n / i;
        let last = n / q;
        f(q, last - i + 1);
        i = last + 1;
    }
}
