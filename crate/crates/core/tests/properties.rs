use msm_core::analysis::uniform_grid;
use msm_core::kernel::{eval_kernel, KernelPoint};
use msm_core::simulate::{path_from_jumps, sample_jumps, simulate_ensemble, simulate_path};
use msm_core::stats::ks_two_sample;
use msm_core::{HurstFunction, JumpSet, PathContext, PathMode, RngStream, TruncationWindow};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rng_streams_replay(seed in any::<u64>(), stream in any::<u64>()) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream);
        for _ in 0..32 {
            prop_assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn distinct_streams_differ(seed in any::<u64>(), stream in 0u64..1 << 40) {
        let mut a = RngStream::new(seed, stream);
        let mut b = RngStream::new(seed, stream + 1);
        let xa: Vec<u64> = (0..4).map(|_| a.uniform().to_bits()).collect();
        let xb: Vec<u64> = (0..4).map(|_| b.uniform().to_bits()).collect();
        prop_assert_ne!(xa, xb);
    }

    #[test]
    fn hurst_values_stay_in_range(
        lo in 0.05f64..0.6,
        width in 0.0f64..0.35,
        x in -50.0f64..50.0,
        freq in 0.1f64..20.0,
        sum in -1e3f64..1e3,
    ) {
        let hi = lo + width;
        let hs = [
            HurstFunction::sine(lo, hi, freq, 0.3).unwrap(),
            HurstFunction::weierstrass(lo, hi, 0.7, 2.0, 12).unwrap(),
            HurstFunction::piecewise_linear(lo, hi, vec![(-1.0, lo), (0.5, hi), (2.0, lo)]).unwrap(),
            HurstFunction::adapted(lo, hi, 0.0, 1.0).unwrap(),
        ];
        for h in &hs {
            let v = h.eval(x, &PathContext::new(sum));
            prop_assert!(v >= lo && v <= hi, "{} gave {v} outside [{lo}, {hi}]", h.kind_name());
        }
    }

    #[test]
    fn kernel_is_causal(t in -5.0f64..5.0, offset in 1e-6f64..5.0, h in 0.55f64..0.95, alpha in 1.1f64..1.9) {
        // Mass after max(t, 0) never contributes.
        let x = t.max(0.0) + offset;
        let p = KernelPoint { t, x, h_at_x: h, alpha };
        prop_assert_eq!(eval_kernel(&p), 0.0);
    }

    #[test]
    fn lfsm_anchored_at_zero(seed in any::<u64>(), h in 0.6f64..0.95) {
        let w = TruncationWindow::new(-2.0, 1.0, 0.05).unwrap();
        let hurst = HurstFunction::constant(h).unwrap();
        let p = simulate_path(&w, &hurst, 1.5, &[-0.5, 0.0, 0.5], PathMode::Lfsm, seed, 0).unwrap();
        prop_assert_eq!(p.values[1], 0.0);
    }
}

#[test]
fn ensemble_is_reproducible_and_symmetric() {
    let w = TruncationWindow::new(-3.0, 1.0, 0.02).unwrap();
    let hurst = HurstFunction::sine(0.7, 0.9, 1.0, 0.0).unwrap();
    let grid = [0.25, 1.0];
    let a = simulate_ensemble(&w, &hurst, 1.6, &grid, PathMode::ItoMsm, 11, 0, 2000).unwrap();
    let b = simulate_ensemble(&w, &hurst, 1.6, &grid, PathMode::ItoMsm, 11, 0, 2000).unwrap();
    assert_eq!(a, b);
    // X and −X have the same law.
    let x: Vec<f64> = a.iter().map(|p| p.values[1]).collect();
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let ks = ks_two_sample(&x, &neg).unwrap();
    assert!(ks.p_value > 0.01, "{ks:?}");
}

#[test]
fn negated_jumps_negate_the_path() {
    let w = TruncationWindow::new(-2.0, 1.0, 0.05).unwrap();
    let hurst = HurstFunction::weierstrass(0.7, 0.9, 0.8, 2.0, 10).unwrap();
    let grid = uniform_grid(0.0, 1.0, 65);
    let mut rng = RngStream::new(5, 0);
    let jumps = sample_jumps(&w, 1.7, &mut rng).unwrap();
    let x = path_from_jumps(&jumps, &hurst, &grid, PathMode::ItoMsm).unwrap();
    let y = path_from_jumps(&jumps.negated(), &hurst, &grid, PathMode::ItoMsm).unwrap();
    for (a, b) in x.values.iter().zip(&y.values) {
        assert_eq!(*a, -*b);
    }
}

#[test]
fn hand_built_atoms_follow_the_kernel() {
    let w = TruncationWindow::new(-1.0, 1.0, 0.1).unwrap();
    let jumps = JumpSet::from_atoms(vec![-0.5, 0.25], vec![2.0, -1.0], w, 1.5).unwrap();
    let hurst = HurstFunction::constant(0.8).unwrap();
    let p = path_from_jumps(&jumps, &hurst, &[0.5], PathMode::Lfsm).unwrap();
    let e = 0.8 - 1.0 / 1.5;
    let expected = 2.0 * (1.0f64.powf(e) - 0.5f64.powf(e)) - 0.25f64.powf(e);
    assert!((p.values[0] - expected).abs() < 1e-14, "{} vs {expected}", p.values[0]);
}
