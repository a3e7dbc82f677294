//! A direct interpreter for the `for` headers the translator emits, of the
//! form `for([int ]i=START;i<=LIMIT;i=i+STEP){`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForHeader {
    pub start: i64,
    pub limit: i64,
    pub step: i64,
}

pub fn parse_for(text: &str) -> Result<ForHeader, String> {
    let re = Regex::new(
        r"^for\(\s*(?:int\s+)?([A-Za-z_]\w*)\s*=\s*(-?\d+)\s*;\s*(\w+)\s*<=\s*(-?\d+)\s*;\s*(\w+)\s*=\s*(\w+)\s*\+\s*(\d+)\s*\)\s*\{$",
    )
    .expect("valid regex");
    let c = re.captures(text.trim()).ok_or_else(|| format!("not a counted for header: {text}"))?;
    let index = &c[1];
    if &c[3] != index || &c[5] != index || &c[6] != index {
        return Err(format!("header does not use one index variable: {text}"));
    }
    let num = |i: usize| c[i].parse::<i64>().map_err(|e| e.to_string());
    Ok(ForHeader {
        start: num(2)?,
        limit: num(4)?,
        step: num(7)?,
    })
}

/// Runs the loop, counting iterations; gives up after `cap` iterations.
pub fn count_iterations(h: ForHeader, cap: u64) -> Option<u64> {
    let mut i = h.start;
    let mut n = 0;
    while i <= h.limit {
        n += 1;
        if n > cap {
            return None;
        }
        i += h.step;
    }
    Some(n)
}

/// `count` positive (start, limit, step) triples with start ≤ limit ≤ 10_000.
pub fn random_triples(seed: u64, count: usize) -> Vec<(i64, i64, i64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let start = rng.gen_range(1..=1000);
            let limit = rng.gen_range(start..=10_000);
            (start, limit, rng.gen_range(1..=500))
        })
        .collect()
}
