//! Special functions and combinatorics shared by the lattice oracle, the
//! state constructors and the phase-space code.

/// n! in double precision. Exact for n ≤ 22, correctly rounded products beyond.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Table of 0!, 1!, …, n!.
pub fn factorial_table(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    table.push(acc);
    for k in 1..=n {
        acc *= k as f64;
        table.push(acc);
    }
    table
}

/// ln n!, summed directly (no overflow for any practical n).
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Exact binomial coefficient, `None` on u128 overflow.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// Binomial coefficient in double precision; exact integer path while it fits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    match binomial_exact(n as u64, k as u64) {
        Some(b) => b as f64,
        None => (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp(),
    }
}

/// Double factorial with the empty-product convention (−1)!! = 0!! = 1.
pub fn double_factorial(m: i64) -> u128 {
    assert!(m >= -1, "double factorial undefined for {m}");
    let mut acc: u128 = 1;
    let mut k = m;
    while k > 1 {
        acc *= k as u128;
        k -= 2;
    }
    acc
}

/// Physicists' Hermite polynomial H_n(y) by the three-term recurrence.
pub fn hermite(n: usize, y: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * y;
    for k in 1..n {
        let next = 2.0 * y * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Laguerre polynomial L_n(u) by the three-term recurrence.
pub fn laguerre(n: usize, u: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 - u;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - u) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Bessel function of the first kind J_n(x) for integer order.
///
/// Miller's backward recurrence from well above max(|n|, |x|), normalised
/// with J_0 + 2 Σ J_{2k} = 1. Negative orders use J_{-n} = (-1)^n J_n.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    if n < 0 {
        let v = bessel_j(-n, x);
        return if n % 2 == 0 { v } else { -v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < 0.0 {
        let v = bessel_j(n, -x);
        return if n % 2 == 0 { v } else { -v };
    }
    let n = n as usize;
    let start = {
        let top = n.max(x.ceil() as usize);
        let m = top + 40 + (40.0 * top as f64).sqrt() as usize;
        m + (m % 2)
    };
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k, arbitrary seed
    let mut target = 0.0;
    let mut norm = 0.0;
    for k in (0..=start).rev() {
        if k == n {
            target = cur;
        }
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            target *= 1e-250;
            norm *= 1e-250;
        }
    }
    target / norm
}
