mod common;

use common::{dense_chain, max_abs_diff, random_taps};
use fdss_core::campaign::papr_samples;
use fdss_core::chain::{FreqSymbols, ModSymbols, SymbolIndices};
use fdss_core::experiment::Comparison;
use fdss_core::filters::{
    check_zero_isi, passband_constant, resample, rrc_taps, vestigial_complete, zero_isi_from_upper,
};
use fdss_core::metrics::{ccdf, db_grid, papr_db, papr_gain_db, snr_loss_db, SweepResult};
use fdss_core::rng::StreamSeed;
use fdss_core::{Chain, Design, FilterRecord, NoiseModel, PolyFilterModel, SystemConfig};
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_cfgs() -> impl Strategy<Value = SystemConfig> {
    (4usize..40, 0usize..6)
        .prop_filter("valid dims", |&(n, se)| 4 * se <= n + 2 * se && se <= n)
        .prop_map(|(n, se)| SystemConfig::new(n, se, 64).unwrap())
}

fn energy(v: &[C]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transforms_are_unitary(cfg in small_cfgs(), seed in any::<u64>()) {
        let chain = Chain::new(cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = chain.map_symbols(&chain.random_symbols(&mut rng)).unwrap();
        let f = chain.dft_spread(&x);
        prop_assert!((energy(&f) - energy(&x)).abs() < 1e-9);
        let back = chain.idft_despread(&f);
        prop_assert!(max_abs_diff(&back, &x) < 1e-12);

        let ext = chain.spectral_extend(&f).unwrap();
        let wave = chain.ofdm_modulate(&ext).unwrap();
        prop_assert!((energy(&wave) - energy(&ext)).abs() < 1e-9);
        let band = chain.receiver_front(&wave).unwrap();
        prop_assert!(max_abs_diff(&band, &ext) < 1e-12);
    }

    #[test]
    fn papr_ignores_where_the_block_sits(cfg in small_cfgs(), seed in any::<u64>(), shift in 0usize..64) {
        let chain = Chain::new(cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taps = random_taps(cfg.n_sc(), &mut rng);
        let s = chain.random_symbols(&mut rng);
        let centred = chain.transmit(&taps, &s).unwrap();
        let shaped: Vec<C> = chain
            .spectral_extend(&chain.dft_spread(&chain.map_symbols(&s).unwrap()))
            .unwrap()
            .iter()
            .zip(taps.iter())
            .map(|(x, &f)| x * f)
            .collect();
        // Same block starting at an arbitrary bin, DC start included.
        let mut grid = vec![C::new(0.0, 0.0); cfg.n_fft];
        for (k, v) in shaped.iter().enumerate() {
            grid[(shift + k) % cfg.n_fft] = *v;
        }
        let moved = chain.grid_to_waveform(&grid);
        prop_assert!((papr_db(&centred).unwrap() - papr_db(&moved).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn mrc_recovers_symbols_exactly(cfg in small_cfgs(), seed in any::<u64>()) {
        let chain = Chain::new(cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taps = random_taps(cfg.n_sc(), &mut rng);
        let s = chain.random_symbols(&mut rng);
        let out = chain.run_chain(&taps, &s, &NoiseModel::noiseless(), &mut rng).unwrap();
        prop_assert!(max_abs_diff(&out.y, &out.x) < 1e-10);
        prop_assert_eq!(out.s_hat, s);
    }

    #[test]
    fn chain_matches_dense_model(cfg in small_cfgs(), seed in any::<u64>(), literal in any::<bool>()) {
        let cfg = if literal { cfg.with_norm_mode(fdss_core::NormMode::Literal) } else { cfg };
        let chain = Chain::new(cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taps = random_taps(cfg.n_sc(), &mut rng);
        let s = chain.random_symbols(&mut rng);
        let t = chain.trace(&taps, &s, &NoiseModel::noiseless(), &mut rng).unwrap();
        let d = dense_chain(&cfg, taps.values(), &s);
        prop_assert!(max_abs_diff(&t.tx, &d.tx) < 1e-10);
        prop_assert!(max_abs_diff(&t.combined, &d.combined) < 1e-10);
        prop_assert!(max_abs_diff(&t.y, &d.y) < 1e-10);
    }

    #[test]
    fn ccdf_is_monotone(samples in prop::collection::vec(0.0f64..12.0, 1..400)) {
        let curve = ccdf(&samples, &db_grid(0.0, 12.0, 0.1));
        prop_assert!(curve.probs.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(curve.probs.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn comparisons_are_antisymmetric(
        a in prop::collection::vec(3.0f64..9.0, 2000),
        shift in -1.5f64..1.5,
        snr_shift in -1.0f64..1.0,
    ) {
        let edges = db_grid(0.0, 14.0, 0.01);
        let b: Vec<f64> = a.iter().map(|v| v + shift).collect();
        let (ca, cb) = (ccdf(&a, &edges), ccdf(&b, &edges));
        let ab = papr_gain_db(&ca, &cb, 0.01).unwrap();
        let ba = papr_gain_db(&cb, &ca, 0.01).unwrap();
        prop_assert!((ab + ba).abs() < 1e-12);

        let snr = db_grid(0.0, 12.0, 0.5);
        let sweep = |off: f64| SweepResult {
            ser: snr.iter().map(|&s| fdss_core::metrics::qpsk_ser(s - off)).collect(),
            snr_db: snr.clone(),
            n_blocks: vec![1; snr.len()],
        };
        let (sa, sb) = (sweep(0.0), sweep(snr_shift));
        let l_ab = snr_loss_db(&sa, &sb, 1e-2).unwrap();
        let l_ba = snr_loss_db(&sb, &sa, 1e-2).unwrap();
        prop_assert!((l_ab + l_ba).abs() < 1e-12);

        let c1 = Comparison::from_levels(6.0, 6.0 - shift, 8.0, 8.0 + snr_shift);
        let c2 = Comparison::from_levels(6.0 - shift, 6.0, 8.0 + snr_shift, 8.0);
        prop_assert_eq!(c1.papr_gain_db, -c2.papr_gain_db);
        prop_assert_eq!(c1.snr_loss_db, -c2.snr_loss_db);
    }

    #[test]
    fn vestigial_filters_are_nyquist(
        frac in prop::collection::vec(0.0f64..=1.0, 1..30),
        n_extra in 0usize..40,
    ) {
        let n_se = frac.len();
        let cfg = SystemConfig::new(2 * n_se + n_extra, n_se, 256).unwrap();
        let c_v = passband_constant(1.0, cfg.n_data);
        let lo = c_v * std::f64::consts::FRAC_1_SQRT_2;
        let upper: Vec<f64> = frac.iter().map(|t| lo + (c_v - lo) * t).collect();
        let lower = vestigial_complete(&upper, c_v).unwrap();
        for k in 0..n_se {
            prop_assert!((lower[k].powi(2) + upper[n_se - 1 - k].powi(2) - c_v * c_v).abs() < 1e-14);
        }
        let taps = zero_isi_from_upper(&upper, &cfg, 1.0).unwrap();
        prop_assert!((taps.energy() - 1.0).abs() < 1e-12);
        prop_assert!(check_zero_isi(&taps, &cfg) < 1e-10);
    }

    #[test]
    fn polynomial_filters_satisfy_tap_invariants(
        coeffs in prop::collection::vec(-3.0f64..3.0, 11),
        design_idx in 0usize..3,
    ) {
        let design = [Design::NonFlat, Design::Flat, Design::ZeroIsi][design_idx];
        let mut coeffs = coeffs;
        coeffs[0] = coeffs[0].abs() + 0.5;
        if design.even_only() {
            for d in (1..coeffs.len()).step_by(2) {
                coeffs[d] = 0.0;
            }
        }
        let model = PolyFilterModel::new(design, coeffs, 1.0).unwrap();
        let cfg = SystemConfig::reference();
        let taps = match model.eval(&cfg) {
            Ok(t) => t,
            Err(e) => {
                // A polynomial that is non-positive everywhere has nothing to normalize.
                prop_assert!(matches!(e, fdss_core::FdssError::DegenerateFilter(_)));
                return Ok(());
            }
        };
        prop_assert!(taps.validate().is_ok());
        let n = taps.len();
        for k in 0..n {
            prop_assert!(taps[k] >= 0.0);
            prop_assert!((taps[k] - taps[n - 1 - k]).abs() <= 1e-12);
        }
        if design == Design::Flat {
            let mid = &taps[2 * cfg.n_se..n - 2 * cfg.n_se];
            prop_assert!(mid.iter().all(|&v| v == mid[0]));
        }
        if design == Design::ZeroIsi {
            prop_assert!(check_zero_isi(&taps, &cfg) < 1e-10);
            let wide = resample(&model, &SystemConfig::wide_extension()).unwrap();
            prop_assert!(check_zero_isi(&wide, &SystemConfig::wide_extension()) < 1e-10);
        }
        let same = resample(&model, &cfg).unwrap();
        prop_assert!(max_abs_diff_f(&same, &taps) < 1e-12);

        let rec = FilterRecord::from_model(&model, &cfg).unwrap();
        let back = FilterRecord::from_json(&rec.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.to_taps(&cfg).unwrap(), taps);
    }
}

fn max_abs_diff_f(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn campaign_results_ignore_thread_count() {
    let cfg = SystemConfig::new(48, 6, 128).unwrap();
    let chain = Chain::new(cfg).unwrap();
    let taps = rrc_taps(&cfg).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = one.install(|| papr_samples(&chain, &taps, 500, StreamSeed::new(9)).unwrap());
    let b = three.install(|| papr_samples(&chain, &taps, 500, StreamSeed::new(9)).unwrap());
    assert_eq!(a, b);
}

#[test]
fn newtypes_deref_to_slices() {
    let s = SymbolIndices(vec![1, 2, 3, 4]);
    assert_eq!(s.len(), 4);
    let m = ModSymbols(vec![C::new(1.0, 0.0)]);
    let f = FreqSymbols(m.0.clone());
    assert_eq!(&f[..], &m[..]);
}
