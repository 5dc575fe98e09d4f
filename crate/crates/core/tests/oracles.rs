//! Closed forms checked against brute-force enumeration.

use pushpull_core::analytic::{aloha_joint, ns_given_np, nw_given_na, push_success_given, query_pmf, wus_hit_prob};
use pushpull_core::pmf::binomial_coefficient;
use pushpull_core::TrafficConfig;

/// Every one of the `P^k` slot assignments, tallied by (singletons, collided slots).
fn enumerate_aloha(k: u32, p: u32) -> Vec<Vec<f64>> {
    let mut counts = vec![vec![0.0; k as usize + 1]; k as usize + 1];
    let total = (p as u64).pow(k);
    for code in 0..total {
        let mut load = vec![0u32; p as usize];
        let mut c = code;
        for _ in 0..k {
            load[(c % p as u64) as usize] += 1;
            c /= p as u64;
        }
        let s = load.iter().filter(|&&l| l == 1).count();
        let col = load.iter().filter(|&&l| l >= 2).count();
        counts[s][col] += 1.0;
    }
    for row in counts.iter_mut() {
        for x in row.iter_mut() {
            *x /= total as f64;
        }
    }
    counts
}

#[test]
fn aloha_joint_matches_enumeration() {
    for p in 1..=6 {
        for k in 0..=6 {
            let table = aloha_joint(k, p).unwrap();
            let brute = enumerate_aloha(k, p);
            for s in 0..=k {
                for c in 0..=k {
                    let diff = (table.prob(s, c) - brute[s as usize][c as usize]).abs();
                    assert!(diff < 1e-12, "k={k} P={p} s={s} c={c}: {diff}");
                }
            }
            let tagged = if k == 0 { 1.0 } else { table.successes().mean() / k as f64 };
            assert!((tagged - push_success_given(k, p)).abs() < 1e-12);
        }
    }
}

#[test]
fn aloha_rejects_zero_slots() {
    assert!(aloha_joint(3, 0).is_err());
    assert_eq!(ns_given_np(3, 0).get(0), 1.0);
}

/// Nodes `0..i` are alarmed; every ordered choice of `d = min(q, Q)` WuS targets is
/// equally likely, so counting `d`-subsets is enough.
fn enumerate_hits(j: u32, q: u32, i: u32, n: u32, cap: u32) -> f64 {
    let d = q.min(cap);
    let alarmed_mask = (1u32 << i) - 1;
    let mut hits = 0u64;
    let mut total = 0u64;
    for set in 0u32..(1 << n) {
        if set.count_ones() != d {
            continue;
        }
        total += 1;
        if (set & alarmed_mask).count_ones() == j {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

#[test]
fn wus_hits_match_subset_enumeration() {
    for n in 1..=8 {
        for cap in 0..=n + 1 {
            for q in 0..=n {
                for i in 0..=n {
                    for j in 0..=n {
                        let exact = wus_hit_prob(j, q, i, n, cap);
                        let brute = enumerate_hits(j, q, i, n, cap);
                        assert!((exact - brute).abs() < 1e-12, "N={n} Q={cap} q={q} i={i} j={j}");
                    }
                }
            }
        }
    }
}

/// Ordered WuS lists: pick `q` distinct ids in order, serve the first `min(q, Q)`.
#[test]
fn wus_hits_match_ordered_enumeration() {
    fn walk(n: u32, left: u32, used: u32, alarmed: u32, hits: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(hits);
            return;
        }
        for id in 0..n {
            if used & (1 << id) == 0 {
                walk(n, left - 1, used | (1 << id), alarmed, hits + u32::from(id < alarmed), out);
            }
        }
    }
    let (n, i) = (6, 2);
    for q in 0..=n {
        for cap in [0, 1, 3, 6] {
            let mut outcomes = Vec::new();
            walk(n, q.min(cap), 0, i, 0, &mut outcomes);
            for j in 0..=i {
                let freq = outcomes.iter().filter(|&&h| h == j).count() as f64 / outcomes.len() as f64;
                assert!((wus_hit_prob(j, q, i, n, cap) - freq).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn pulled_law_normalizes() {
    let t = TrafficConfig::new(40, 30.0, 30.0, 0.01025).unwrap();
    let nq = query_pmf(&t);
    assert!((nq.total() - 1.0).abs() < 1e-12);
    for cap in 0..=8 {
        for i in 0..=40 {
            let nw = nw_given_na(i, &nq, 40, cap);
            assert!((nw.total() - 1.0).abs() < 1e-9);
            assert!(nw.max_value() == 40 && (i as usize + 1..=40).all(|j| nw.get(j) == 0.0));
        }
    }
}

#[test]
fn binomial_coefficient_row_sums() {
    for n in 0..=40u32 {
        let sum: f64 = (0..=n).map(|k| binomial_coefficient(n, k)).sum();
        assert!((sum / 2f64.powi(n as i32) - 1.0).abs() < 1e-12);
    }
}
