use polar_bch::bch::{BchCode, BddStatus};
use polar_bch::galois::GaloisField;
use polar_bch::modem;
use polar_bch::polar::{polar_transform, PolarCode, ReliabilityDesign, SclDecoder};
use polar_bch::product::{BitMatrix, LlrMatrix, ProductCodeConfig};
use polar_bch::Bit;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn bits(len: usize) -> impl Strategy<Value = Vec<Bit>> {
    proptest::collection::vec(0u8..2, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bch_corrects_up_to_radius(info in bits(239), errs in proptest::collection::btree_set(0usize..256, 0..=2)) {
        let code = BchCode::new(GaloisField::with_default_poly(8).unwrap(), 2, true).unwrap();
        let c = code.encode(&info).unwrap();
        let mut r = c.clone();
        for &e in &errs {
            r[e] ^= 1;
        }
        let out = code.bdd_decode(&r).unwrap();
        prop_assert_eq!(out.status, BddStatus::Success);
        prop_assert_eq!(out.word, c);
    }

    #[test]
    fn transform_is_an_involution(u in bits(64)) {
        let x = polar_transform(&u).unwrap();
        prop_assert_eq!(polar_transform(&x).unwrap(), u);
    }

    #[test]
    fn systematic_polar_round_trip(k in 1usize..64, seed in any::<u64>()) {
        let code = PolarCode::new(64, k, ReliabilityDesign::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<Bit> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
        let x = code.systematic_encode(&info).unwrap();
        prop_assert!(code.is_codeword(&x));
        prop_assert_eq!(code.extract_info(&x), info);
    }

    #[test]
    fn interleaver_inverts(x in bits(96), rows in prop::sample::select(vec![1usize, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 96])) {
        let cols = 96 / rows;
        let y = modem::interleave(&x, rows, cols).unwrap();
        prop_assert_eq!(modem::deinterleave(&y, rows, cols).unwrap(), x);
    }

    #[test]
    fn small_product_frames_are_codewords(seed in any::<u64>()) {
        let row = PolarCode::new(16, 9, ReliabilityDesign::default()).unwrap();
        let col = BchCode::new(GaloisField::with_default_poly(4).unwrap(), 2, true).unwrap();
        let cfg = ProductCodeConfig::new(polar_bch::product::RowCode::Polar(row), col, 3.0, 10, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info = BitMatrix::from_vec(7, 9, (0..63).map(|_| rng.random_range(0..2u8)).collect()).unwrap();
        let frame = cfg.encode(&info).unwrap();
        prop_assert!(cfg.is_codeword(&frame));
        let r = cfg.hshd_decode(&LlrMatrix::from_bits(&frame, 4.0)).unwrap();
        prop_assert!(r.converged);
        prop_assert_eq!(r.info, info);
    }
}

/// Block error rate over BPSK-AWGN for the given list sizes, on shared noise.
fn polar_bler(n: usize, k: usize, sigma: f64, trials: usize, lists: &[usize]) -> Vec<usize> {
    let code = PolarCode::new(n, k, ReliabilityDesign::default()).unwrap();
    let mut decoders: Vec<SclDecoder> = lists
        .iter()
        .map(|&l| SclDecoder::new(n, l).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let mut errors = vec![0; lists.len()];
    for _ in 0..trials {
        let info: Vec<Bit> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
        let x = code.systematic_encode(&info).unwrap();
        let llrs: Vec<f64> = x
            .iter()
            .map(|&b| {
                let noise: f64 = rng.sample(StandardNormal);
                2.0 * ((1.0 - 2.0 * b as f64) + sigma * noise) / (sigma * sigma)
            })
            .collect();
        for (d, e) in decoders.iter_mut().zip(errors.iter_mut()) {
            if d.decode(&code, &llrs).unwrap().codeword != x {
                *e += 1;
            }
        }
    }
    errors
}

#[test]
fn list_size_does_not_hurt_block_error_rate() {
    let errors = polar_bler(64, 32, 0.75, 4000, &[1, 2, 4, 8]);
    assert!(errors[0] > 50, "{errors:?}");
    for w in errors.windows(2) {
        assert!(w[1] <= w[0], "{errors:?}");
    }
    assert!(errors[3] < errors[0], "{errors:?}");
}

#[test]
fn hard_iterative_decoding_improves_with_snr() {
    let cfg = ProductCodeConfig::bch_bch(2, 10).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut last = f64::INFINITY;
    for snr in [13.4, 13.8, 14.2] {
        let mut errs = 0;
        let mut rng_frames = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..8 {
            let info = BitMatrix::from_vec(
                239,
                239,
                (0..239 * 239).map(|_| rng.random_range(0..2u8)).collect(),
            )
            .unwrap();
            let frame = cfg.encode(&info).unwrap();
            let coded = modem::interleave(frame.as_slice(), 256, 256).unwrap();
            let mut sym = modem::map_16qam(&coded).unwrap();
            modem::add_awgn(&mut sym, snr, &mut rng_frames);
            let llrs =
                modem::demap_16qam(&sym, modem::noise_n0(snr), modem::DemapMode::Exact).unwrap();
            let llrs = LlrMatrix::from_vec(256, 256, modem::deinterleave(&llrs, 256, 256).unwrap())
                .unwrap();
            errs += cfg
                .ibdd_decode(&llrs.hard_decisions())
                .unwrap()
                .info
                .distance(&info);
        }
        let ber = errs as f64 / (8.0 * 239.0 * 239.0);
        assert!(ber <= last, "BER rose to {ber} at {snr} dB");
        last = ber;
    }
    assert_eq!(last, 0.0);
}
