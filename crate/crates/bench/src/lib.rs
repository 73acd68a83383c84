//! Shared fixtures for the criterion benches.

use lensgeo::GroupElement;

/// Deterministic pseudo-random unit elements (xorshift, no extra deps).
pub fn targets(seed: u64, n: usize) -> Vec<GroupElement> {
    let mut state = seed.max(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = [next(), next(), next(), next()];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if (1e-6..=1.0).contains(&n2) {
            let s = n2.sqrt();
            out.push(GroupElement::from_parts(v[0] / s, v[1] / s, v[2] / s, v[3] / s));
        }
    }
    out
}
