use hotgate::analysis::{average_fidelity, average_purity, Channel};
use hotgate::cli::{fmt_float, parse_grid, parse_scan_csv, RunConfig};
use hotgate::fock::linalg::{hermitian_expm, unitarity_defect, CMatrix, C64};
use hotgate::fock::{self, FockDim};
use hotgate::gate::{ideal_gate, pulse_train, pulses_for_eta};
use proptest::prelude::*;

fn hermitian4() -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-1.0..1.0_f64, 32).prop_map(|v| {
        let a = CMatrix::from_shape_fn((4, 4), |(i, j)| C64::new(v[4 * i + j], v[16 + 4 * i + j]));
        let ad = a.t().mapv(|z| z.conj());
        (&a + &ad).mapv(|z| z * 0.5)
    })
}

fn unitary4() -> impl Strategy<Value = CMatrix> {
    hermitian4().prop_map(|h| hermitian_expm(&h, 1.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_channel_is_perfect(u in unitary4()) {
        let ch = Channel::from_unitary(&u).unwrap();
        prop_assert!((average_fidelity(&ch, &u).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((average_purity(&ch) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_unitary_channel_bounds(u in unitary4(), v in unitary4(), p in 0.0..1.0_f64) {
        let kraus = [u.mapv(|z| z * p.sqrt()), v.mapv(|z| z * (1.0 - p).sqrt())];
        let ch = Channel::from_kraus(&kraus).unwrap();
        let f = average_fidelity(&ch, &ideal_gate()).unwrap();
        let pur = average_purity(&ch);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&pur));
    }

    #[test]
    fn fidelity_is_invariant_under_common_unitaries(u in unitary4(), v in unitary4(), w in unitary4()) {
        let ch = Channel::from_unitary(&u).unwrap();
        let f = average_fidelity(&ch, &v).unwrap();
        let moved = ch.after_unitary(&w).then_unitary(&w);
        let target = w.dot(&v).dot(&w);
        let g = average_fidelity(&moved, &target).unwrap();
        prop_assert!((f - g).abs() < 1e-12);
    }

    #[test]
    fn displacement_is_unitary(re in -3.0..3.0_f64, im in -3.0..3.0_f64, d in 2usize..40) {
        let m = fock::displacement(C64::new(re, im), FockDim::new(d).unwrap()).unwrap();
        prop_assert!(unitarity_defect(&m, d) < 1e-9);
    }

    #[test]
    fn thermal_weights_normalized_and_decreasing(n_bar in 0.0..20.0_f64, d in 2usize..200) {
        let p = fock::thermal_probabilities(n_bar, FockDim::new(d).unwrap()).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn pulse_count_roundtrip(eta in 0.01..2.0_f64, n in 1u32..200) {
        let total = pulse_train(eta, n).unwrap();
        prop_assert_eq!(pulses_for_eta(eta, total), n);
        prop_assert!(pulse_train(eta, pulses_for_eta(eta, total * 1.001)).unwrap() >= total * 1.001);
    }

    #[test]
    fn grid_list_roundtrip(values in prop::collection::vec(-1e6..1e6_f64, 1..20)) {
        let text = values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",");
        prop_assert_eq!(parse_grid(&text).unwrap(), values);
    }

    #[test]
    fn formatted_floats_keep_digits(x in -1e12..1e12_f64, digits in 1usize..17) {
        let back: f64 = fmt_float(x, digits).parse().unwrap();
        prop_assert!((back - x).abs() <= x.abs() * 10f64.powi(1 - digits as i32));
    }

    #[test]
    fn scan_parser_never_panics(text in "(#[ -~]*\n)?[ -~,\n]{0,200}") {
        let _ = parse_scan_csv(&text);
    }

    #[test]
    fn config_hash_ignores_grid_and_output(
        etas in prop::collection::vec(0.1..10.0_f64, 1..4),
        precision in 3usize..16,
    ) {
        let base = RunConfig::default();
        let mut other = RunConfig::default();
        other.scan.eta = etas;
        other.output.dir = Some("elsewhere".into());
        prop_assert_eq!(base.hash(), other.hash());
        other.output.precision = precision;
        prop_assert_eq!(base.hash() == other.hash(), precision == base.output.precision);
    }

    #[test]
    fn config_rejects_unknown_keys(key in "[a-z]{3,10}") {
        prop_assume!(!["eta", "flip", "dims", "margin"].contains(&key.as_str()));
        let text = format!("[gate]\n{key}_x = 1\n");
        prop_assert!(RunConfig::from_toml_str(&text).is_err());
    }
}
