//! Property tests over randomized inputs.

use proptest::prelude::*;

use kleinbox_core::config::RunConfig;
use kleinbox_core::dirac::{interface_coefficients, kinematics};
use kleinbox_core::lattice::{build_hamiltonian, eigensolve, ChainSpec};
use kleinbox_core::params::{DiracParams, Geometry};
use kleinbox_core::presets::PresetId;

proptest! {
    #[test]
    fn config_round_trip_any_floats(
        mc2 in 1e-3..1e3f64,
        w in 1e-2..1e4f64,
        f0 in 0.0..1e7f64,
        window in 1e-3..1e3f64,
        a0 in 1e-2..1e3f64,
        sigma in 0.0..50.0f64,
        seed in any::<u64>(),
        permute in any::<bool>(),
    ) {
        let cfg = RunConfig {
            n_left: 15,
            n_right: 15,
            mc2_mhz: mc2,
            hbar_c_mhz_mm: w * a0,
            f0_mhz: f0,
            v0_mhz: 2.0 * mc2 + window,
            a0_mm: a0,
            disorder_sigma_mhz: sigma,
            seed,
            permute,
        };
        let text = RunConfig::parse(&cfg.render()).unwrap();
        prop_assert_eq!(&cfg, &text);
        let json: RunConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(&cfg, &json);
    }

    #[test]
    fn unitarity_across_random_windows(
        mc2 in 0.1..50.0f64,
        extra in 0.5..200.0f64,
        chbar in 10.0..5e4f64,
        frac in 1e-4..(1.0 - 1e-4f64),
    ) {
        let v0 = 2.0 * mc2 + extra;
        let g = Geometry::new(10, 10).unwrap();
        let p = DiracParams::from_geometry(g, mc2, chbar, 0.0, v0, 20.5).unwrap();
        let (lo, hi) = p.klein_window();
        let eps = p.window_margin();
        let e = (lo + eps) + (hi - lo - 2.0 * eps) * frac;
        let kin = kinematics(e, &p).unwrap();
        prop_assert!(kin.xi >= 0.0 && kin.xi < 1.0);
        prop_assert!(kin.zeta >= 0.0 && kin.zeta < 1.0);
        let co = interface_coefficients(&kin);
        prop_assert!((co.r * co.r + co.t * co.t - 1.0).abs() < 1e-12);
        prop_assert!((co.r_left_wall.norm() - 1.0).abs() < 1e-12);
        prop_assert!((co.r_right_wall.norm() - 1.0).abs() < 1e-12);
        prop_assert!(co.r <= 0.0 && co.r > -1.0);
    }

    #[test]
    fn eigensolve_on_random_chains(
        n_left in 1usize..7,
        n_right in 0usize..7,
        w in 5.0..100.0f64,
        gap in 0.5..40.0f64,
        df in 0.0..120.0f64,
        sigma in 0.0..5.0f64,
        seed in any::<u64>(),
    ) {
        let spec = ChainSpec {
            n_left,
            n_right,
            v_mhz: w + gap,
            w_mhz: w,
            onsite_left_mhz: 6713.0,
            onsite_right_mhz: 6713.0 + df,
            disorder_sigma_mhz: sigma,
            seed,
            permute: false,
            disorder_offset: 0,
        };
        let h = build_hamiltonian(&spec).unwrap();
        let eig = eigensolve(&h).unwrap();
        let n = h.n();
        // Sorted, orthonormal, and satisfying the matrix.
        for j in 1..n {
            prop_assert!(eig.frequencies_mhz[j] >= eig.frequencies_mhz[j - 1]);
        }
        let tol = 1e-9 * h.norm_inf();
        for j in 0..n {
            let v = eig.vector(j).unwrap();
            let hv = h.mul_vec(v);
            for (hvi, vi) in hv.iter().zip(v) {
                prop_assert!((hvi - eig.frequencies_mhz[j] * vi).abs() < tol);
            }
            for k in j..n {
                let dot: f64 =
                    v.iter().zip(eig.vector(k).unwrap()).map(|(x, y)| x * y).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-9);
            }
        }
        // Gershgorin bound.
        let lo = spec.onsite_left_mhz.min(spec.onsite_right_mhz)
            - (spec.v_mhz + spec.w_mhz)
            - 6.0 * sigma;
        let hi = spec.onsite_left_mhz.max(spec.onsite_right_mhz)
            + (spec.v_mhz + spec.w_mhz)
            + 6.0 * sigma;
        for &f in &eig.frequencies_mhz {
            prop_assert!(f > lo && f < hi);
        }
    }

    #[test]
    fn preset_determinism_under_any_seed(seed in any::<u64>()) {
        let cfg = RunConfig { seed, ..RunConfig::preset(PresetId::E1) };
        let a = build_hamiltonian(&cfg.chain().unwrap()).unwrap();
        let b = build_hamiltonian(&cfg.chain().unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}
