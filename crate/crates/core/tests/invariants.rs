//! Property tests for structural invariants.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use spstab_core::intmatrix::{smith_normal_form, IntMatrix};
use spstab_core::matrix::{det, pfaffian, RingMatrix};
use spstab_core::monoidring::{z0_mul, Z0RElem};
use spstab_core::ring::Ring;
use spstab_core::symplectic::{
    conj_diag, embed, is_symplectic, monoid_act, odd_compose, odd_decompose, transvection, SpElement,
};
use spstab_core::unimodular::{gram, is_normal_form, is_skew_nondegenerate, normal_form, SkewMat};

const RINGS: [&str; 8] = ["2", "2^2", "2^3", "3", "3^2", "5", "7", "11"];

fn ring() -> impl Strategy<Value = Ring> {
    (0..RINGS.len()).prop_map(|i| Ring::parse(RINGS[i]).unwrap())
}

fn entries(len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(any::<u64>(), len)
}

fn square(r: &Ring, k: usize, raw: &[u64]) -> RingMatrix {
    let mut m = RingMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, raw[i * k + j] % r.modulus);
        }
    }
    m
}

fn skew(r: &Ring, k: usize, raw: &[u64]) -> RingMatrix {
    let mut m = RingMatrix::zeros(k, k);
    let mut t = 0;
    for i in 0..k {
        for j in i + 1..k {
            let x = raw[t] % r.modulus;
            t += 1;
            m.set(i, j, x);
            m.set(j, i, r.neg(x));
        }
    }
    m
}

/// Product of transvections along the given vectors.
fn symplectic(r: &Ring, dim: usize, raw: &[u64]) -> RingMatrix {
    let mut g = RingMatrix::identity(dim).scale(1, r);
    for v in raw.chunks(dim) {
        let v: Vec<u64> = v.iter().map(|x| x % r.modulus).collect();
        g = g.mul(&transvection(&v, r), r);
    }
    g
}

fn unit(r: &Ring, x: u64) -> u64 {
    let us: Vec<u64> = r.units().collect();
    us[(x % us.len() as u64) as usize]
}

fn z0(r: &Ring, raw: &[(u64, i8)]) -> Z0RElem {
    Z0RElem::from_terms(raw.iter().map(|&(a, n)| (a % r.modulus, n as i64)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, max_global_rejects: 1 << 20, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn det_is_multiplicative(r in ring(), k in 0usize..6, a in entries(25), b in entries(25)) {
        let (a, b) = (square(&r, k, &a), square(&r, k, &b));
        prop_assert_eq!(det(&a.mul(&b, &r), &r).unwrap(), r.mul(det(&a, &r).unwrap(), det(&b, &r).unwrap()));
    }

    #[test]
    fn pfaffian_squares_to_det(r in ring(), h in 0usize..5, raw in entries(28)) {
        let a = skew(&r, 2 * h, &raw);
        let pf = pfaffian(&a, &r).unwrap();
        prop_assert_eq!(r.mul(pf, pf), det(&a, &r).unwrap());
    }

    #[test]
    fn pfaffian_congruence(r in ring(), h in 0usize..4, raw in entries(15), b in entries(36)) {
        let k = 2 * h;
        let a = skew(&r, k, &raw);
        let b = square(&r, k, &b);
        let c = b.transpose().mul(&a, &r).mul(&b, &r);
        let lhs = pfaffian(&c, &r).unwrap();
        prop_assert_eq!(lhs, r.mul(det(&b, &r).unwrap(), pfaffian(&a, &r).unwrap()));
    }

    #[test]
    fn normal_form_realizes_gram(r in ring(), n in 1usize..3, q in 0usize..6, raw in entries(10)) {
        prop_assume!(q <= 2 * n + 1);
        let a = SkewMat::new(q, raw[..q * q.saturating_sub(1) / 2].iter().map(|x| x % r.modulus).collect(), &r);
        prop_assume!(is_skew_nondegenerate(&a, &r));
        let u = normal_form(&a, n, &r).unwrap();
        prop_assert!(is_normal_form(&u, &r));
        prop_assert_eq!(gram(&u, &r), a.clone());
        for i in 0..q {
            prop_assert_eq!(gram(&u.face(i), &r), a.face(i));
        }
    }

    #[test]
    fn gram_is_sp_invariant(r in ring(), q in 1usize..6, raw in entries(10), g in entries(12)) {
        let n = 2;
        prop_assume!(q <= 2 * n + 1);
        let a = SkewMat::new(q, raw[..q * (q - 1) / 2].iter().map(|x| x % r.modulus).collect(), &r);
        prop_assume!(is_skew_nondegenerate(&a, &r));
        let u = normal_form(&a, n, &r).unwrap();
        let g = symplectic(&r, 2 * n, &g);
        prop_assert!(is_symplectic(&g, &r).unwrap());
        prop_assert_eq!(gram(&u.act(&g, &r), &r), a);
    }

    #[test]
    fn z0_ring_axioms(
        r in ring(),
        x in prop::collection::vec((any::<u64>(), any::<i8>()), 0..5),
        y in prop::collection::vec((any::<u64>(), any::<i8>()), 0..5),
        z in prop::collection::vec((any::<u64>(), any::<i8>()), 0..5),
    ) {
        let (x, y, z) = (z0(&r, &x), z0(&r, &y), z0(&r, &z));
        prop_assert_eq!(z0_mul(&z0_mul(&x, &y, &r), &z, &r), z0_mul(&x, &z0_mul(&y, &z, &r), &r));
        prop_assert_eq!(z0_mul(&x, &y, &r), z0_mul(&y, &x, &r));
        prop_assert_eq!(z0_mul(&x, &y.add(&z), &r), z0_mul(&x, &y, &r).add(&z0_mul(&x, &z, &r)));
        prop_assert_eq!(z0_mul(&x, &Z0RElem::one(), &r), x.clone());
    }

    #[test]
    fn monoid_action_is_multiplicative(r in ring(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>(),
                                       u in entries(2), m in entries(6)) {
        let (a, b) = (a % r.modulus, b % r.modulus);
        let m = SpElement::new(symplectic(&r, 2, &m), &r).unwrap();
        let u: Vec<u64> = u.iter().map(|x| x % r.modulus).collect();
        let g = odd_decompose(&odd_compose(c % r.modulus, &u, &m, &r), &r).unwrap();
        prop_assert_eq!(monoid_act(a, &monoid_act(b, &g, &r), &r), monoid_act(r.mul(a, b), &g, &r));
        prop_assert!(is_symplectic(&monoid_act(a, &g, &r).to_matrix(&r), &r).unwrap());
    }

    #[test]
    fn monoid_action_is_homomorphism_for_units(r in ring(), a in any::<u64>(), c in entries(2),
                                               u in entries(4), m in entries(12)) {
        let a = unit(&r, a);
        let elem = |i: usize| {
            let m = SpElement::new(symplectic(&r, 2, &m[6 * i..6 * i + 6]), &r).unwrap();
            let u: Vec<u64> = u[2 * i..2 * i + 2].iter().map(|x| x % r.modulus).collect();
            odd_decompose(&odd_compose(c[i] % r.modulus, &u, &m, &r), &r).unwrap()
        };
        let (g, h) = (elem(0), elem(1));
        let gh = odd_decompose(&g.to_matrix(&r).mul(&h.to_matrix(&r), &r), &r).unwrap();
        let rhs = monoid_act(a, &g, &r).to_matrix(&r).mul(&monoid_act(a, &h, &r).to_matrix(&r), &r);
        prop_assert_eq!(monoid_act(a, &gh, &r).to_matrix(&r), rhs);
    }

    #[test]
    fn conjugation_and_embedding_are_homomorphisms(r in ring(), a in any::<u64>(), b in any::<u64>(),
                                                   g in entries(12), h in entries(12)) {
        let (a, b) = (unit(&r, a), unit(&r, b));
        let (g, h) = (symplectic(&r, 4, &g), symplectic(&r, 4, &h));
        let gh = g.mul(&h, &r);
        prop_assert_eq!(conj_diag(a, &gh, &r).unwrap(), conj_diag(a, &g, &r).unwrap().mul(&conj_diag(a, &h, &r).unwrap(), &r));
        prop_assert_eq!(conj_diag(a, &conj_diag(b, &g, &r).unwrap(), &r).unwrap(), conj_diag(r.mul(a, b), &g, &r).unwrap());
        let e = |m: &RingMatrix| embed(m, 4, 6, &r).unwrap();
        prop_assert_eq!(e(&gh), e(&g).mul(&e(&h), &r));
        prop_assert!(is_symplectic(&e(&g), &r).unwrap());
        let o = |m: &RingMatrix| embed(m, 4, 5, &r).unwrap();
        prop_assert_eq!(o(&gh), o(&g).mul(&o(&h), &r));
    }

    #[test]
    fn smith_normal_form_is_valid(rows in 0usize..6, cols in 0usize..6, raw in prop::collection::vec(-20i64..20, 36)) {
        let m = IntMatrix::from_rows_i64(&(0..rows).map(|i| raw[i * 6..i * 6 + cols].to_vec()).collect::<Vec<_>>());
        let m = if rows == 0 { IntMatrix::zeros(0, cols) } else { m };
        let s = smith_normal_form(&m);
        prop_assert_eq!(s.u.mul(&m).mul(&s.v), s.d.clone());
        prop_assert!(s.u.mul(&s.u_inv) == IntMatrix::identity(rows));
        prop_assert!(s.v.mul(&s.v_inv) == IntMatrix::identity(cols));
        let diag = s.diagonal();
        for i in 0..rows {
            for j in 0..cols {
                prop_assert!(i == j || s.d.get(i, j).is_zero());
            }
        }
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        prop_assert_eq!(diag.iter().filter(|x| !x.is_zero()).count(), s.rank);
        if rows == cols {
            let prod: BigInt = diag.iter().product();
            prop_assert_eq!(prod.abs(), m.det().abs());
        }
    }
}
