//! Reference implementations used only by tests. They are written
//! independently of the library code paths they check.
#![allow(dead_code)]

use rand::Rng;
use spectrum_auction::auction::{Action, AuctionRule};
use spectrum_auction::rng::RandomStream;

/// Winner and payment of one channel, computed by sorting the bids.
///
/// Ties are resolved by the documented contract: the tied leaders in SU
/// order, one uniform draw from `rng` per tied channel.
pub fn sorted_auction(
    actions: &[Vec<Action>],
    pu_active: &[bool],
    rule: AuctionRule,
    rng: &mut RandomStream,
) -> (Vec<Option<usize>>, Vec<f64>) {
    let mut winners = Vec::new();
    let mut payments = Vec::new();
    for (k, &pu) in pu_active.iter().enumerate() {
        let mut bids: Vec<(f64, usize)> = actions
            .iter()
            .enumerate()
            .filter_map(|(i, row)| row[k].bid().map(|b| (b, i)))
            .collect();
        if pu || bids.is_empty() {
            winners.push(None);
            payments.push(0.0);
            continue;
        }
        // descending by bid, ascending by index
        bids.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let top = bids[0].0;
        let leaders: Vec<usize> = bids.iter().take_while(|b| b.0 == top).map(|b| b.1).collect();
        let winner = if leaders.len() == 1 {
            leaders[0]
        } else {
            leaders[rng.random_range(0..leaders.len())]
        };
        let payment = match rule {
            AuctionRule::FirstPrice => top,
            AuctionRule::SecondPrice => bids.get(1).map_or(0.0, |b| b.0),
        };
        winners.push(Some(winner));
        payments.push(payment);
    }
    (winners, payments)
}

/// Random bid profile; draws from a coarse grid half the time so ties
/// actually happen.
pub fn random_profile(rng: &mut RandomStream, n: usize, k: usize) -> (Vec<Vec<Action>>, Vec<bool>) {
    let coarse = rng.random_bool(0.5);
    let actions = (0..n)
        .map(|_| {
            (0..k)
                .map(|_| {
                    if rng.random_bool(0.3) {
                        Action::StayOut
                    } else if coarse {
                        Action::Bid(f64::from(rng.random_range(0..4u8)))
                    } else {
                        Action::Bid(rng.random_range(0.0..10.0))
                    }
                })
                .collect()
        })
        .collect();
    let pu = (0..k).map(|_| rng.random_bool(0.2)).collect();
    (actions, pu)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &t in &idx[i..=j] {
                r[t] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Kolmogorov-Smirnov distance of `samples` from the unit-mean exponential.
pub fn ks_exponential(mut samples: Vec<f64>) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = 1.0 - (-x).exp();
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
