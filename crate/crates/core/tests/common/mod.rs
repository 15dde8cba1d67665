use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ggt_core::angle::PiFraction;
use ggt_core::embed::EmbeddingCertificate;
use ggt_core::graph::{smooth_with_paths, MetricGraph, Step};

/// `GGT_SEED` if set, else a fixed seed.
pub fn seed() -> u64 {
    std::env::var("GGT_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_261_018)
}

/// A random target graph and a random sub-graph of it, smoothed, together
/// with the inclusion as a certificate.
pub fn planted(rng: &mut ChaCha8Rng) -> (MetricGraph, MetricGraph, EmbeddingCertificate) {
    let n = rng.gen_range(3..=8);
    let mut dst = MetricGraph::new();
    for i in 0..n {
        dst.add_node(&format!("v{i}")).unwrap();
    }
    for _ in 0..rng.gen_range(n..=2 * n) {
        let u = rng.gen_range(0..n);
        let v = (u + rng.gen_range(1..n)) % n;
        dst.add_arc(u, v, PiFraction::new(rng.gen_range(1..=2), 3)).unwrap();
    }
    loop {
        let keep: Vec<usize> = (0..dst.arc_count()).filter(|_| rng.gen_bool(0.6)).collect();
        if keep.is_empty() {
            continue;
        }
        let mut sub = MetricGraph::new();
        for &a in &keep {
            let arc = dst.arc(a);
            let u = sub.ensure_node(dst.name(arc.u));
            let v = sub.ensure_node(dst.name(arc.v));
            sub.add_arc(u, v, arc.len).unwrap();
        }
        let (src, paths) = smooth_with_paths(&sub);
        let cert = EmbeddingCertificate {
            nodes: (0..src.node_count()).map(|i| dst.node(src.name(i)).unwrap()).collect(),
            paths: paths
                .iter()
                .map(|p| p.iter().map(|s| Step { arc: keep[s.arc], forward: s.forward }).collect())
                .collect(),
        };
        return (src, dst, cert);
    }
}
