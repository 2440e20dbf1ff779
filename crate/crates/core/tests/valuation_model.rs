use rand::Rng;
use rand_distr::{Distribution, Exp1};
use spectrum_auction::channel::{pathloss, rate, RadioParams};
use spectrum_auction::rng::{stream, Component};
use spectrum_auction::valuation::{initial_threshold, RayleighRateCdf, UniformCdf, ValuationCdf};

#[test]
fn closed_form_matches_monte_carlo_at_unit_snr() {
    let params = RadioParams {
        tx_power: 1.0,
        noise_power: 1.0,
        ..RadioParams::default()
    };
    let cdf = RayleighRateCdf::new(1.0, &params);
    let expected = 1.0 - (-1.0f64).exp();
    assert!((cdf.cdf(1.0) - expected).abs() < 1e-15);

    let mut rng = stream(21, 0, Component::Fading);
    let n = 1_000_000;
    let below = (0..n)
        .filter(|_| {
            let h: f64 = Exp1.sample(&mut rng);
            rate(1.0, h, &params) <= 1.0
        })
        .count();
    let empirical = below as f64 / n as f64;
    assert!((empirical - expected).abs() <= 1e-3, "{empirical}");
}

#[test]
fn closed_form_matches_empirical_deciles() {
    let params = RadioParams::default();
    let mut rng = stream(22, 0, Component::Fading);
    for distance in [300.0, 1000.0, 1400.0] {
        let gain = pathloss(distance, 3.0).unwrap();
        let cdf = RayleighRateCdf::new(gain, &params);
        let mut rates: Vec<f64> = (0..1_000_000)
            .map(|_| rate(gain, Exp1.sample(&mut rng), &params))
            .collect();
        rates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for d in 1..10 {
            let q = rates[d * rates.len() / 10];
            let err = (cdf.cdf(q) - d as f64 / 10.0).abs();
            assert!(err <= 2e-3, "distance {distance} decile {d}: {err}");
        }
    }
}

#[test]
fn threshold_is_monotone_in_fees() {
    let gain = pathloss(1000.0, 3.0).unwrap();
    let cdf = RayleighRateCdf::new(gain, &RadioParams::default());
    for n in [2, 4, 16] {
        let by_monitor: Vec<f64> = (0..=20)
            .map(|e| initial_threshold(5.0, f64::from(e) * 0.5, n, &cdf).unwrap())
            .collect();
        assert!(by_monitor.windows(2).all(|w| w[0] <= w[1]), "{by_monitor:?}");
        let by_entry: Vec<f64> = (0..=20)
            .map(|c| initial_threshold(f64::from(c) * 0.5, 3.0, n, &cdf).unwrap())
            .collect();
        assert!(by_entry.windows(2).all(|w| w[0] >= w[1]), "{by_entry:?}");
    }
}

#[test]
fn threshold_residuals_on_random_draws() {
    let mut rng = stream(23, 0, Component::Topology);
    let params = RadioParams::default();
    let mut interior = 0;
    for _ in 0..100 {
        let e = rng.random_range(0.0..10.0);
        let c = rng.random_range(0.0..10.0);
        let n = rng.random_range(2..=16usize);
        let target = e / (1.0 + c);
        let check = |cdf: &dyn Fn(f64) -> f64, t: f64, top: f64| {
            if t < top {
                let r = (t * cdf(t).powi(n as i32 - 1) - target).abs();
                assert!(r <= 1e-9, "residual {r} at e={e} c={c} n={n}");
                true
            } else {
                false
            }
        };
        let u = UniformCdf { lo: 0.0, hi: 1.0 };
        let t = initial_threshold(c, e, n, &u).unwrap();
        interior += usize::from(check(&|x| u.cdf(x), t, u.support_max()));

        let gain = pathloss(rng.random_range(200.0..1500.0), 3.0).unwrap();
        let r = RayleighRateCdf::new(gain, &params);
        let t = initial_threshold(c, e, n, &r).unwrap();
        interior += usize::from(check(&|x| r.cdf(x), t, r.support_max()));
    }
    // the Rayleigh draws always have an interior root
    assert!(interior >= 100, "{interior}");
}

#[test]
fn uniform_fixtures() {
    let u = UniformCdf { lo: 0.0, hi: 1.0 };
    // e / (1 + c) = 0.25 and 0.125
    assert!((initial_threshold(3.0, 1.0, 2, &u).unwrap() - 0.5).abs() <= 1e-8);
    assert!((initial_threshold(7.0, 1.0, 3, &u).unwrap() - 0.5).abs() <= 1e-8);
    assert_eq!(initial_threshold(4.0, 0.0, 5, &u).unwrap(), 0.0);
}
