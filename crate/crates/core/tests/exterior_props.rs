mod common;

use calibkit::exterior::{AltForm, SkewMap};
use calibkit::linalg::permutation_sign;
use calibkit::VectorN;
use common::{normal, random_form, random_skew, rng};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// All permutations of `0..k` with their signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for i in 0..k {
            if !prefix.contains(&i) {
                prefix.push(i);
                go(prefix, k, out);
                prefix.pop();
            }
        }
    }
    let mut all = Vec::new();
    go(&mut Vec::new(), k, &mut all);
    all.into_iter()
        .map(|s| {
            let sign = permutation_sign(&s);
            (s, sign)
        })
        .collect()
}

/// `a(v_1, ..., v_p)` by the full alternating sum over coefficients.
fn eval_oracle(a: &AltForm, vs: &[VectorN]) -> f64 {
    let perms = permutations(a.degree());
    let mut total = 0.0;
    for (idx, c) in a.terms() {
        for (s, sign) in &perms {
            let mut prod = sign * c;
            for (slot, &k) in s.iter().enumerate() {
                prod *= vs[slot][idx[k]];
            }
            total += prod;
        }
    }
    total
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `(a ^ b)(v)` as `1/(p! q!) sum_sigma sgn(sigma) a(v_sigma...) b(v_sigma...)`.
fn wedge_oracle(a: &AltForm, b: &AltForm, vs: &[VectorN]) -> f64 {
    let (p, q) = (a.degree(), b.degree());
    let mut total = 0.0;
    for (s, sign) in permutations(p + q) {
        let left: Vec<VectorN> = s[..p].iter().map(|&i| vs[i].clone()).collect();
        let right: Vec<VectorN> = s[p..].iter().map(|&i| vs[i].clone()).collect();
        total += sign * eval_oracle(a, &left) * eval_oracle(b, &right);
    }
    total / (factorial(p) * factorial(q))
}

fn random_vectors(seed: u64, n: usize, k: usize) -> Vec<VectorN> {
    let mut r = rng(seed);
    (0..k).map(|_| VectorN::from_fn(n, |_, _| normal(&mut r))).collect()
}

fn shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=8).prop_flat_map(|n| (Just(n), 0..=n, any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permuted_queries_pick_up_the_sign((n, p, seed) in shape(), swap in any::<prop::sample::Index>()) {
        let a = random_form(&mut rng(seed), n, p);
        for (idx, c) in a.terms() {
            prop_assert_eq!(a.coeff(&idx), c);
            if p >= 2 {
                let i = swap.index(p - 1);
                let mut t = idx.clone();
                t.swap(i, i + 1);
                prop_assert_eq!(a.coeff(&t), -c);
                t[i] = t[i + 1];
                prop_assert_eq!(a.coeff(&t), 0.0);
            }
        }
    }

    #[test]
    fn evaluation_matches_alternating_sum((n, p, seed) in shape()) {
        prop_assume!(p <= 5);
        let a = random_form(&mut rng(seed), n, p);
        let vs = random_vectors(seed ^ 1, n, p);
        let refs: Vec<&VectorN> = vs.iter().collect();
        let got = a.evaluate_vectors(&refs).unwrap();
        let want = eval_oracle(&a, &vs);
        prop_assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "{} vs {}", got, want);
    }

    #[test]
    fn wedge_matches_antisymmetrization(n in 2usize..=6, p in 0usize..=3, q in 0usize..=3, seed in any::<u64>()) {
        prop_assume!(p + q <= n && p + q <= 5);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, p);
        let b = random_form(&mut r, n, q);
        let vs = random_vectors(seed ^ 2, n, p + q);
        let refs: Vec<&VectorN> = vs.iter().collect();
        let got = a.wedge(&b).unwrap().evaluate_vectors(&refs).unwrap();
        let want = wedge_oracle(&a, &b, &vs);
        prop_assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()), "{} vs {}", got, want);
    }

    #[test]
    fn graded_commutativity(n in 1usize..=8, p in 0usize..=4, q in 0usize..=4, seed in any::<u64>()) {
        prop_assume!(p + q <= n);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, p);
        let b = random_form(&mut r, n, q);
        let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        prop_assert!(ab.approx_eq(&(sign * &ba), 1e-12));
    }

    #[test]
    fn hodge_involution((n, p, seed) in shape()) {
        let a = random_form(&mut rng(seed), n, p);
        let sign = if (p * (n - p)) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(a.hodge_star().hodge_star().approx_eq(&(sign * &a), 1e-12));
    }

    #[test]
    fn metric_compatibility((n, p, seed) in shape()) {
        let mut r = rng(seed);
        let a = random_form(&mut r, n, p);
        let b = random_form(&mut r, n, p);
        let top = a.wedge(&b.hodge_star()).unwrap();
        let all: Vec<usize> = (0..n).collect();
        let inner = a.inner(&b).unwrap();
        prop_assert!((top.coeff(&all) - inner).abs() < 1e-12 * (1.0 + inner.abs()));
    }

    #[test]
    fn action_is_a_derivation(n in 2usize..=7, p in 0usize..=3, q in 0usize..=3, seed in any::<u64>()) {
        prop_assume!(p + q <= n);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, p);
        let b = random_form(&mut r, n, q);
        let theta = random_skew(&mut r, n, 1.0);
        let lhs = a.wedge(&b).unwrap().so_action(&theta).unwrap();
        let rhs = &a.so_action(&theta).unwrap().wedge(&b).unwrap() + &a.wedge(&b.so_action(&theta).unwrap()).unwrap();
        prop_assert!(lhs.approx_eq(&rhs, 1e-10));
    }

    #[test]
    fn action_is_the_derivative_of_rotation(n in 2usize..=7, p in 1usize..=4, seed in any::<u64>()) {
        prop_assume!(p <= n);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, p);
        let theta = random_skew(&mut r, n, 1.0);
        let y = DMatrix::from_fn(n, p, |_, _| normal(&mut r));
        let h = 1e-5;
        let plus = a.evaluate_frame(&(theta.scale(h).exp() * &y)).unwrap();
        let minus = a.evaluate_frame(&(theta.scale(-h).exp() * &y)).unwrap();
        let fd = (plus - minus) / (2.0 * h);
        let exact = a.so_action(&theta).unwrap().evaluate_frame(&y).unwrap();
        prop_assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()), "{} vs {}", fd, exact);
    }
}

#[test]
fn hodge_star_of_basis_forms_uses_the_shuffle_sign() {
    for n in 1..=6 {
        for mask in 0u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let rest: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
            let joined: Vec<usize> = idx.iter().chain(&rest).copied().collect();
            let star = AltForm::basis(n, &idx).unwrap().hodge_star();
            assert_eq!(star.len(), 1);
            assert_eq!(star.coeff(&rest), permutation_sign(&joined), "n = {n}, I = {idx:?}");
        }
    }
}

#[test]
fn rotation_generator_example() {
    let a = AltForm::parse(4, "e12").unwrap();
    let theta = SkewMap::generator(4, 0, 2);
    let got = a.so_action(&theta).unwrap();
    assert!(got.approx_eq(&AltForm::parse(4, "-e23").unwrap(), 0.0), "{got}");
    assert!(a.so_action(&SkewMap::zero(4)).unwrap().is_empty());
}

#[test]
fn wedge_with_a_one_form_example() {
    let phi = calibkit::calibrations::associative_form();
    let e1 = AltForm::basis(7, &[0]).unwrap();
    let w = phi.wedge(&e1).unwrap();
    assert_eq!(w.len(), 4);
    assert_eq!(w.hodge_star().len(), 4);
    for (idx, c) in w.terms() {
        let vs: Vec<VectorN> = idx.iter().map(|&i| calibkit::exterior::unit_vector(7, i)).collect();
        assert!((wedge_oracle(&phi, &e1, &vs) - c).abs() < 1e-12);
    }
}
