//! Seeded instance generators.
//!
//! All generators use ChaCha8 seeded from a `u64`, so the same arguments give
//! the same instance on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, Value, BIG};

/// Per-agent resampling attempts before `strict` generation gives up.
pub const STRICT_ATTEMPTS: usize = 10_000;

fn check_size(two_n: usize) -> Result<()> {
    if two_n < 2 || two_n % 2 == 1 {
        Err(Error::InvalidParameter(format!("agent count must be even and at least 2, got {two_n}")))
    } else {
        Ok(())
    }
}

fn rows(rng: &mut ChaCha8Rng, agent: usize, two_n: usize, max_h: Value, max_v: Value) -> (Vec<Value>, Vec<Value>) {
    let h = (0..two_n)
        .map(|j| if j == agent { 0 } else { rng.random_range(0..=max_h) })
        .collect();
    let v = (0..two_n / 2).map(|_| rng.random_range(0..=max_v)).collect();
    (h, v)
}

fn distinct_sums(h: &[Value], v: &[Value], agent: usize) -> bool {
    let mut sums: Vec<Value> = (0..h.len())
        .filter(|&j| j != agent)
        .flat_map(|j| v.iter().map(move |&x| h[j] + x))
        .collect();
    sums.sort_unstable();
    sums.windows(2).all(|w| w[0] != w[1])
}

/// Uniform values in `0..=max_h` and `0..=max_v`. With `strict`, each agent's
/// rows are redrawn until all of its (roommate, room) utilities differ.
pub fn gen_random(two_n: usize, max_h: Value, max_v: Value, seed: u64, strict: bool) -> Result<Instance> {
    check_size(two_n)?;
    if max_h > BIG || max_v > BIG {
        return Err(Error::InvalidParameter(format!("values are capped at {BIG}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = Vec::with_capacity(two_n);
    let mut v = Vec::with_capacity(two_n);
    for agent in 0..two_n {
        let mut attempt = 0;
        let (hr, vr) = loop {
            let (hr, vr) = rows(&mut rng, agent, two_n, max_h, max_v);
            if !strict || distinct_sums(&hr, &vr, agent) {
                break (hr, vr);
            }
            attempt += 1;
            if attempt == STRICT_ATTEMPTS {
                return Err(Error::InvalidParameter(format!(
                    "no strict rows for agent {agent} after {STRICT_ATTEMPTS} draws; raise the value ranges"
                )));
            }
        };
        h.push(hr);
        v.push(vr);
    }
    Instance::new(h, v)
}

/// Symmetric 0/1 roommate values with density `density_h` and 0/1 room
/// values with density `density_v`.
pub fn gen_binary_symmetric(two_n: usize, density_h: f64, density_v: f64, seed: u64) -> Result<Instance> {
    check_size(two_n)?;
    for d in [density_h, density_v] {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::InvalidParameter(format!("density {d} is outside [0, 1]")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = vec![vec![0; two_n]; two_n];
    #[allow(clippy::needless_range_loop)]
    for i in 0..two_n {
        for j in i + 1..two_n {
            let x = Value::from(rng.random_bool(density_h));
            h[i][j] = x;
            h[j][i] = x;
        }
    }
    let v = (0..two_n)
        .map(|_| (0..two_n / 2).map(|_| Value::from(rng.random_bool(density_v))).collect())
        .collect();
    Instance::new(h, v)
}

/// Every pair starts together in its own room. Each agent values its
/// starting roommate at 1, everyone else at 0, its own room at 0 and every
/// other room at 2. Every cross-room pair is 2PS blocking, yet no swap is
/// welcome to the roommates left behind.
pub fn gen_cttcr_2ps_family(n: usize) -> Result<(Instance, Assignment)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("family needs at least 2 rooms, got {n}")));
    }
    let two_n = 2 * n;
    let mut h = vec![vec![0; two_n]; two_n];
    let mut v = vec![vec![2; n]; two_n];
    for t in 0..n {
        h[2 * t][2 * t + 1] = 1;
        h[2 * t + 1][2 * t] = 1;
        v[2 * t][t] = 0;
        v[2 * t + 1][t] = 0;
    }
    Ok((Instance::new(h, v)?, Assignment::identity(n)))
}
