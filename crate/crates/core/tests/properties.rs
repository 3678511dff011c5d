use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vpspace_core::algebra::{rat, ExactMatrix, Monomial, Rationals, SparsePoly};
use vpspace_core::annihilator::find_alpha_exact;
use vpspace_core::circuit::{eval, expand, parse_circuit, print_circuit};
use vpspace_core::coeff::{
    arithmetize_qbf, coeff_fn_of_circuit, monotone_split, random_qbf, read_int, stream_add, stream_list_sum, stream_mul,
    stream_sub, CoeffOptions, IntOracle, WorkspaceMeter,
};
use vpspace_core::corpus::{random_poly, random_proj_circuit};
use vpspace_core::detc::{det_circuit, encode_int_matrix};

fn read(o: &vpspace_core::coeff::Oracle) -> BigInt {
    read_int(o.as_ref(), &mut WorkspaceMeter::new()).unwrap()
}

fn expand1(c: &vpspace_core::circuit::Circuit) -> SparsePoly {
    expand(c, 100_000).unwrap().remove(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn streaming_matches_bigint(a in any::<i64>(), b in any::<i64>(), xs in prop::collection::vec(any::<i32>(), 0..9)) {
        let (ba, bb) = (BigInt::from(a), BigInt::from(b));
        let oa = || IntOracle::new(ba.clone());
        let ob = || IntOracle::new(bb.clone());
        prop_assert_eq!(read(&stream_add(oa(), ob())), &ba + &bb);
        prop_assert_eq!(read(&stream_sub(oa(), ob())), &ba - &bb);
        prop_assert_eq!(read(&stream_mul(oa(), ob())), &ba * &bb);
        let want: BigInt = xs.iter().map(|&x| BigInt::from(x)).sum();
        prop_assert_eq!(read(&stream_list_sum(xs.iter().map(|&x| IntOracle::new(x.into())).collect())), want);
    }

    #[test]
    fn poly_text_round_trips(seed in any::<u64>(), n in 1usize..4, d in 0u32..4) {
        let p = random_poly(n, d, 5, &mut ChaCha8Rng::seed_from_u64(seed));
        let t = p.to_text();
        let q = SparsePoly::parse(&t).unwrap();
        prop_assert_eq!(q.to_text(), t);
        prop_assert_eq!(q, p);
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>(), size in 1usize..20) {
        let c = random_proj_circuit(2, 2, size, &mut ChaCha8Rng::seed_from_u64(seed));
        let t = print_circuit(&c);
        prop_assert_eq!(print_circuit(&parse_circuit(&t).unwrap()), t);
    }

    #[test]
    fn monotone_split_is_exact(seed in any::<u64>(), size in 1usize..10) {
        let c = random_proj_circuit(2, 1, size, &mut ChaCha8Rng::seed_from_u64(seed));
        let s = monotone_split(&c).unwrap();
        let side = |x: &Option<vpspace_core::circuit::Circuit>| x.as_ref().map(expand1).unwrap_or_else(|| SparsePoly::zero(3));
        prop_assert_eq!(side(&s.pos).sub(&side(&s.neg)).unwrap(), expand1(&c));
    }

    #[test]
    fn coefficients_match_expansion(seed in any::<u64>(), size in 1usize..8) {
        let c = random_proj_circuit(2, 1, size, &mut ChaCha8Rng::seed_from_u64(seed));
        let f = expand1(&c);
        let cf = coeff_fn_of_circuit(&c, CoeffOptions::default()).unwrap();
        let got = cf.nonzero_coefficients().unwrap();
        prop_assert_eq!(got.len(), f.num_terms());
        for (e, v) in got {
            prop_assert_eq!(f.coeff(&Monomial(e)), num_rational::BigRational::from_integer(v));
        }
    }

    #[test]
    fn qbf_values_are_boolean(seed in any::<u64>(), n in 1usize..7, size in 3usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nq = (seed as usize) % (n + 1);
        let q = random_qbf(n, nq, size, &mut rng);
        let c = arithmetize_qbf(&q);
        for mask in 0u32..1 << n {
            let pt: Vec<_> = (0..n).map(|k| rat((mask >> k & 1) as i64)).collect();
            let v = eval(&c, &Rationals, &pt).unwrap().remove(0);
            prop_assert!(v == rat(0) || v == rat(1));
        }
    }

    #[test]
    fn det_circuit_matches_exact_det(entries in prop::collection::vec(-9i64..=9, 9), n in 1usize..=3) {
        let m: Vec<Vec<i64>> = (0..n).map(|i| entries[i * n..(i + 1) * n].to_vec()).collect();
        let c = det_circuit(&encode_int_matrix(&m).unwrap()).unwrap();
        let want = ExactMatrix::from_i64(&m).exact_det().unwrap();
        prop_assert_eq!(eval(&c, &Rationals, &[]).unwrap().remove(0), want);
    }

    #[test]
    fn rank_extractor_alpha_within_bound(entries in prop::collection::vec(-3i64..=3, 30), n in 1usize..=6, r in 1usize..=5) {
        let r = r.min(n);
        let rows: Vec<Vec<i64>> = (0..n).map(|i| entries[i * 5..i * 5 + r].to_vec()).collect();
        let m = ExactMatrix::from_i64(&rows);
        prop_assume!(m.rank() == r);
        let idx: Vec<u64> = (0..n as u64).collect();
        let alpha = find_alpha_exact(&m, &idx, (n * r) as u64).unwrap();
        prop_assert!(alpha <= (n * r) as u64);
    }
}
