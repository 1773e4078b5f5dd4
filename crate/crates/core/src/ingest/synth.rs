//! Seeded graph transforms and generators.
//!
//! Randomness comes from PCG32 (XSH-RR output, 64-bit LCG state, multiplier
//! 6364136223846793005) initialised as the reference `pcg32_srandom(seed, 0)`.
//! A unit draw takes two 32-bit outputs `hi`, `lo` and returns
//! `((hi << 32 | lo) >> 11) / 2^53`, so any PCG32 port reproduces the same
//! graphs from the same seed.

use rand_core::RngCore;
use rand_pcg::Pcg32;

use super::IngestError;
use crate::graph::{GraphError, NodeId, VersionGraph};

#[derive(Debug, Clone)]
pub struct DatasetRng(Pcg32);

impl DatasetRng {
    pub fn new(seed: u64) -> Self {
        Self(Pcg32::new(seed, 0))
    }

    pub fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        let hi = u64::from(self.next_u32());
        let lo = u64::from(self.next_u32());
        ((hi << 32 | lo) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]`, as `lo + floor(unit * (hi - lo + 1))`.
    pub fn integer(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi);
        let span = (hi - lo + 1) as f64;
        lo + ((self.unit() * span) as u64).min(hi - lo)
    }
}

/// Scales every edge's storage by a factor drawn from `[0.3, 1)` (one draw per
/// edge, in edge order) and raises every retrieval cost by 20%, rounding half
/// up. Storage stays within `[ceil(0.3 s), s]`.
pub fn random_compression(g: &VersionGraph, seed: u64) -> Result<VersionGraph, GraphError> {
    let mut rng = DatasetRng::new(seed);
    let mut overflow = false;
    let out = g.map_edge_costs(|_, e| {
        let factor = 0.3 + 0.7 * rng.unit();
        let floor = (u128::from(e.storage) * 3).div_ceil(10) as u64;
        let s = ((e.storage as f64 * factor).round() as u64).clamp(floor, e.storage);
        let r = u64::try_from((u128::from(e.retrieval) * 12 + 5) / 10).unwrap_or_else(|_| {
            overflow = true;
            0
        });
        (s, r)
    });
    if overflow {
        Err(GraphError::Overflow)
    } else {
        Ok(out)
    }
}

/// Erdős–Rényi style graph on the given versions: every unordered pair
/// `u < v`, in lexicographic order, gets one Bernoulli(`p`) draw; on success
/// `delta(u, v, rng)` and then `delta(v, u, rng)` give the `(s, r)` of the
/// two directions.
pub fn er_construction(
    node_costs: &[u64],
    p: f64,
    seed: u64,
    mut delta: impl FnMut(NodeId, NodeId, &mut DatasetRng) -> (u64, u64),
) -> Result<VersionGraph, IngestError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(IngestError::InvalidInput(format!("edge probability {p} is outside [0, 1]")));
    }
    let mut rng = DatasetRng::new(seed);
    let n = node_costs.len();
    let mut g = VersionGraph::new(node_costs.to_vec());
    for u in 0..n {
        for v in u + 1..n {
            if rng.unit() < p {
                for (a, b) in [(u, v), (v, u)] {
                    let (s, r) = delta(a, b, &mut rng);
                    g.add_edge(a, b, s, r).expect("each pair is drawn once");
                }
            }
        }
    }
    Ok(g)
}

/// Default delta model: `s = r`, uniform in `[1, max(1, avg s_v / 10)]`.
pub fn uniform_delta(node_costs: &[u64]) -> impl FnMut(NodeId, NodeId, &mut DatasetRng) -> (u64, u64) {
    let hi = (super::report::mean_half_up(node_costs.iter().copied()) / 10).max(1);
    move |_, _, rng| {
        let d = rng.integer(1, hi);
        (d, d)
    }
}

/// The three-version chain on which LMG is arbitrarily bad: sizes `a, b, c`
/// and, with `eps = b / c`, deltas `A -> B` of cost `(1 - eps) b` and
/// `B -> C` of cost `(1 - eps) c`, each used for storage and retrieval.
/// Needs `b <= c` and `c` dividing `b^2` so both costs are integers.
pub fn adversarial_chain(a: u64, b: u64, c: u64) -> VersionGraph {
    assert!(0 < b && b <= c && (b * b).is_multiple_of(c), "needs 0 < b <= c and c | b^2");
    let ab = b - b * b / c;
    let bc = c - b;
    let mut g = VersionGraph::new(vec![a, b, c]);
    g.add_edge(0, 1, ab, ab).unwrap();
    g.add_edge(1, 2, bc, bc).unwrap();
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pcg32_reference_stream() {
        // pcg32_srandom(42, 54) from the reference demo program
        let mut rng = Pcg32::new(42, 54);
        let first: Vec<u32> = (0..3).map(|_| rng.next_u32()).collect();
        assert_eq!(first, [0xa15c02b7, 0x7b47f409, 0xba1d3330]);
    }

    #[test]
    fn compression_bounds() {
        let mut g = VersionGraph::new(vec![1, 1]);
        g.add_edge(0, 1, 1000, 100).unwrap();
        g.add_edge(1, 0, 1, 5).unwrap();
        for seed in 0..50 {
            let c = random_compression(&g, seed).unwrap();
            let e = c.edge(0, 1).unwrap();
            assert!((300..=1000).contains(&e.storage));
            assert_eq!(e.retrieval, 120);
            let tiny = c.edge(1, 0).unwrap();
            assert_eq!((tiny.storage, tiny.retrieval), (1, 6));
        }
        assert_eq!(random_compression(&g, 9).unwrap(), random_compression(&g, 9).unwrap());
    }

    #[test]
    fn er_extremes() {
        let costs = vec![100; 10];
        assert_eq!(er_construction(&costs, 0.0, 1, uniform_delta(&costs)).unwrap().edge_count(), 0);
        let full = er_construction(&costs, 1.0, 1, uniform_delta(&costs)).unwrap();
        assert_eq!(full.edge_count(), 90);
        assert!(full.edges().iter().all(|e| e.storage == e.retrieval && (1..=10).contains(&e.storage)));
        assert!(er_construction(&costs, 1.5, 1, uniform_delta(&costs)).is_err());
    }

    #[test]
    fn chain_costs() {
        let g = adversarial_chain(1000, 10, 100);
        assert_eq!((g.edge(0, 1).unwrap().storage, g.edge(1, 2).unwrap().storage), (9, 90));
        let g = adversarial_chain(5000, 1000, 100_000);
        assert_eq!((g.edge(0, 1).unwrap().retrieval, g.edge(1, 2).unwrap().retrieval), (990, 99_000));
    }

    #[test]
    fn integer_draws_cover_the_range() {
        let mut rng = DatasetRng::new(3);
        let mut seen = [false; 4];
        for _ in 0..200 {
            seen[(rng.integer(2, 5) - 2) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(rng.integer(7, 7), 7);
    }
}
