use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use poqlab::hamiltonian::XZHamiltonian;
use poqlab::params::{coupled_eta, derive, derive_exact, lemma_p, semi_honest_value, to_f64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn random_tuple(rng: &mut ChaCha8Rng) -> (usize, f64, f64, f64) {
    let n = rng.random_range(1..=8);
    let gamma: f64 = rng.random_range(1e-3..=1.0);
    let alpha = rng.random_range(0.0..=gamma);
    let c = rng.random_range(1.0001..20.0);
    (n, gamma, alpha, c)
}

#[test]
fn worked_p_star() {
    let g = derive(2, 1.0, 0.5, 3.0).unwrap();
    assert_eq!(g.p_star, rat(108, 115_964_116_992));
    assert_eq!(g.p_star, rat(1, 1 << 30));
}

#[test]
fn eta_star_is_half_p_star_times_gamma_plus_alpha() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let (n, gamma, alpha, c) = random_tuple(&mut rng);
        let g = derive(n, gamma, alpha, c).unwrap();
        let ga = &g.gamma + &g.alpha;
        assert_eq!(g.eta_star, &g.p_star * &ga / rat(2, 1));
        assert_eq!(g.semi_honest_value_at_p_star(), BigRational::one() - &g.eta_star);
    }
}

#[test]
fn eta_hat_never_exceeds_eta_star() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for _ in 0..1000 {
        let (n, gamma, alpha, c) = random_tuple(&mut rng);
        let g = derive(n, gamma, alpha, c).unwrap();
        assert!(g.eta_hat <= g.eta_star);
        assert_eq!(g.kappa, BigRational::one() - &g.eta_hat);
    }
}

#[test]
fn constants_are_consistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let (n, gamma, alpha, c) = random_tuple(&mut rng);
        let g = derive(n, gamma, alpha, c).unwrap();
        // p* = 2 / (D n²⁴) and κ = 1 − 1/r(n)
        let n24 = BigRational::from_integer(BigInt::from(n).pow(24));
        assert_eq!(g.p_star, rat(2, 1) / (&g.d * &n24));
        assert_eq!(g.kappa, BigRational::one() - BigRational::one() / g.r().unwrap());
    }
}

#[test]
fn floating_formulas_agree_with_exact() {
    let (n, gamma, alpha, c) = (2usize, 0.8, 0.3, 2.0);
    let g = derive(n, gamma, alpha, c).unwrap();
    let den = 27.0 * (1.0f64 + c).powi(4) * (n as f64).powi(24);
    let eta = 16.0 * (gamma + alpha).powi(4) / den;
    let p = 32.0 * (gamma + alpha).powi(3) / den;
    assert!((to_f64(&g.eta_star) / eta - 1.0).abs() < 1e-12);
    assert!((to_f64(&g.p_star) / p - 1.0).abs() < 1e-12);
    assert!((g.d.to_f64().unwrap() - 27.0 * 81.0 / (16.0 * 1.1f64.powi(3))).abs() < 1e-9);
}

#[test]
fn invalid_inputs_are_named() {
    use poqlab::Error;
    let name = |r| match r {
        Err(Error::InvalidParameter { name, .. }) => name,
        other => panic!("expected a parameter error, got {other:?}"),
    };
    assert_eq!(name(derive(0, 1.0, 0.5, 3.0)), "n");
    assert_eq!(name(derive(2, 1.2, 0.5, 3.0)), "gamma");
    assert_eq!(name(derive(2, 0.4, 0.5, 3.0)), "alpha");
    assert_eq!(name(derive(2, 1.0, 0.5, 0.5)), "C");
    assert_eq!(name(derive(2, 0.0, 0.0, 3.0)), "gamma");
    assert!(derive_exact(2, &rat(0, 1), &rat(0, 1), &rat(3, 1)).is_err());
}

#[test]
fn coupling_inverts_lemma_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let c = rng.random_range(1.5..10.0);
        let eta: f64 = rng.random_range(1e-6..0.99);
        let p = lemma_p(eta, n, c);
        if p >= 1.0 {
            continue;
        }
        let back = coupled_eta(p, n, c).unwrap();
        assert!((back.eta / eta - 1.0).abs() < 1e-12);
        assert!(back.in_regime);
    }
    // n = 2, C = 3, η = 1/2
    let p = lemma_p(0.5, 2, 3.0);
    let direct = 4.0 * 0.5f64.powf(0.75) / (3f64.powf(0.75) * 4.0 * 64.0);
    assert!((p - direct).abs() < 1e-15);
    assert!((p - 0.004076).abs() < 5e-7);
    assert!(!coupled_eta(0.9, 2, 3.0).unwrap().in_regime);
    assert!(coupled_eta(0.0, 2, 3.0).is_err());
}

#[test]
fn semi_honest_formula() {
    let h = XZHamiltonian::from_strs(2, 2, &[(0.5, "XI"), (-1.0, "ZZ")]).unwrap();
    assert!((semi_honest_value(&h, 0.5, -0.5) - (1.0 - 0.5 * (0.75 / 2.0 - 0.25))).abs() < 1e-15);
}
