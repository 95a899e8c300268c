//! Random curve generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

fn signed(rng: &mut impl Rng, bound: i64) -> i64 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return c;
        }
    }
}

fn term(c: i64, exps: [u32; 3]) -> String {
    let mut parts = vec![format!("({c})")];
    for (v, e) in ["x", "y", "z"].iter().zip(exps) {
        match e {
            0 => {}
            1 => parts.push(v.to_string()),
            _ => parts.push(format!("{v}^{e}")),
        }
    }
    parts.join("*")
}

fn monomials(d: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=d - a {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

/// A handful of random monomials of degree `d` with small coefficients.
pub fn sparse_form(d: u32, rng: &mut impl Rng) -> String {
    let mut all = monomials(d);
    all.shuffle(rng);
    let n = rng.gen_range(4..=8).min(all.len());
    all[..n]
        .iter()
        .map(|&m| term(signed(rng, 9), m))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A product of random lines and conics of total degree `d`.
pub fn arrangement(d: u32, rng: &mut impl Rng) -> String {
    let mut factors = Vec::new();
    let mut left = d;
    while left > 0 {
        let deg = if left >= 2 && rng.gen_bool(0.3) { 2 } else { 1 };
        let form = monomials(deg)
            .into_iter()
            .map(|m| term(rng.gen_range(-3..=3i64), m))
            .collect::<Vec<_>>()
            .join(" + ");
        factors.push(format!("({form})"));
        left -= deg;
    }
    factors.join("*")
}

/// `z^{d-2} x y + z^{d-3} c_3(x,y) + ... + c_d(x,y)` with random binary
/// forms `c_j`: a node at `[0:0:1]`, generically the only singularity.
pub fn node_at_origin(d: u32, rng: &mut impl Rng) -> String {
    let mut terms = vec![term(1, [1, 1, d - 2])];
    for j in 3..=d {
        for a in 0..=j {
            let c = rng.gen_range(-5..=5i64);
            if c != 0 {
                terms.push(term(c, [a, j - a, d - j]));
            }
        }
    }
    terms.join(" + ")
}

pub const LARGE_EXAMPLE: &str = "(x+y)^2*(x-y)^2*(x+2*y)^2*(x-2*y)^2*(x+3*y)^2*(x-3*y)^2*(x+4*y)^2*(x-4*y)^2*(x+5*y)^2*(x-5*y)^2+z^20";
