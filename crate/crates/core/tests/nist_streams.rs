use kunie_core::chaos::KeyBundle;
use kunie_core::nist::{run_all, streams_from_keys, NistTest, TestParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn keyed_streams_pass_at_the_binomial_rate() {
    // 100 streams of 10^5 bits; at alpha = 0.01 the lower 99.9% binomial
    // bound on the pass count is 96.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let params = TestParams::default();
    let mut passes = [0usize; 10];
    for _ in 0..100 {
        let k = KeyBundle::random(&mut rng);
        let (x, _) = streams_from_keys(&k, 100_000).unwrap();
        for (i, r) in run_all(&x, &params).unwrap().iter().enumerate() {
            assert!((0.0..=1.0).contains(&r.p_value));
            assert_eq!(r.pass, r.p_value >= 0.01);
            passes[i] += r.pass as usize;
        }
    }
    for (t, p) in NistTest::ALL.iter().zip(passes) {
        println!("{t}: {p}/100");
    }
    for (t, p) in NistTest::ALL.iter().zip(passes) {
        assert!(p >= 96, "{t} passed {p}/100");
    }
}
