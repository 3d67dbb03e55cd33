//! Invariants checked exhaustively over small ranges, plus proptest sweeps.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use proptest::prelude::*;

use serendipity::basis::{restrict_to_face, FaceRestriction};
use serendipity::coefficients::{coeff_closed_form, coeff_oracle, coefficient_table};
use serendipity::multiindex::{
    face_count, face_of, face_partition, serendipity_dimension, serendipity_set,
};
use serendipity::nodes::hermite_conditions;
use serendipity::polynomial::{univariate_cardinals, CardinalCache};
use serendipity::{FaceIndex, GridCoordinates, GridScheme, MultiIndex, Polynomial, Rational};

const SCHEMES: [GridScheme; 3] = [
    GridScheme::UniformIncreasing,
    GridScheme::SymmetricReordered,
    GridScheme::HermiteMidpoint,
];

/// Brute force over the full cube `{0..=r}^n`, independent of the pruned enumeration.
fn brute_force_set(n: usize, r: u32) -> BTreeSet<MultiIndex> {
    let mut out = BTreeSet::new();
    let side = r as usize + 1;
    for code in 0..side.pow(n as u32) {
        let mut c = code;
        let alpha: MultiIndex = (0..n)
            .map(|_| {
                let v = (c % side) as u32;
                c /= side;
                v
            })
            .collect();
        let sl: u32 = alpha.entries().iter().filter(|&&a| a >= 2).sum();
        if sl <= r {
            out.insert(alpha);
        }
    }
    out
}

#[test]
fn serendipity_set_matches_brute_force_and_formula() {
    for n in 1..=4 {
        for r in 1..=10 {
            let set = serendipity_set(n, r).unwrap();
            assert!(set.is_downward_closed(), "n={n} r={r}");
            assert_eq!(set.members(), &brute_force_set(n, r), "n={n} r={r}");
            assert_eq!(set.len() as u64, serendipity_dimension(n, r).unwrap());
            assert!(set.iter().all(|a| a.max_entry() <= r.max(1)));
        }
    }
}

#[test]
fn face_partition_is_a_partition() {
    for n in 1..=4 {
        let total: u64 = (0..=n).map(|d| face_count(n, d).unwrap()).sum();
        assert_eq!(total, 3u64.pow(n as u32));
        for r in 1..=8 {
            let set = serendipity_set(n, r).unwrap();
            let cells = face_partition(n, r).unwrap();
            let mut union = BTreeSet::new();
            let mut count = 0;
            for (beta, cell) in &cells {
                let d = beta.dim();
                let expected = if r as usize >= 2 * d {
                    serendipity::multiindex::binomial(i64::from(r) - d as i64, d as i64).unwrap()
                } else {
                    0
                };
                assert_eq!(cell.len() as i64, expected, "n={n} r={r} beta={beta}");
                assert!(cell.iter().all(|a| &face_of(a) == beta));
                count += cell.len();
                union.extend(cell.iter().cloned());
            }
            assert_eq!(count, set.len());
            assert_eq!(&union, set.members());
        }
    }
}

#[test]
fn hermite_count_identity() {
    for n in 1..=4 {
        for r in 1..=8 {
            let total: usize = hermite_conditions(n, r)
                .unwrap()
                .iter()
                .map(|c| c.orders.len())
                .sum();
            assert_eq!(total as u64, serendipity_dimension(n, r).unwrap());
        }
    }
}

#[test]
fn node_face_consistency_and_injectivity() {
    for n in 1..=3 {
        for r in 1..=6 {
            let set = serendipity_set(n, r).unwrap();
            for scheme in &SCHEMES {
                let g = GridCoordinates::build(scheme, n, r).unwrap();
                let mut points = BTreeSet::new();
                for alpha in set.iter() {
                    let node = g.node_of(alpha).unwrap();
                    let beta = face_of(alpha);
                    for (x, &b) in node.point.iter().zip(beta.entries()) {
                        match b {
                            0 => assert_eq!(*x, -Rational::one()),
                            1 => assert_eq!(*x, Rational::one()),
                            _ => assert!(*x > -Rational::one() && *x < Rational::one()),
                        }
                    }
                    if *scheme == GridScheme::HermiteMidpoint {
                        let y: Vec<Rational> = beta
                            .midpoint()
                            .into_iter()
                            .map(|v| Rational::from_integer(v.into()))
                            .collect();
                        assert_eq!(node.point, y);
                    } else {
                        assert!(points.insert(node.point.clone()), "duplicate node {alpha}");
                        assert_eq!(g.left_multiplicity(alpha).unwrap(), MultiIndex::zeros(n));
                    }
                }
            }
        }
    }
}

#[test]
fn confluent_delta_property() {
    for scheme in &SCHEMES {
        let g = GridCoordinates::build(scheme, 1, 8).unwrap();
        for a in 0..=8usize {
            let xs = &g.axis(0)[..=a];
            let set = univariate_cardinals(xs).unwrap();
            let mut sum = Polynomial::zero(1);
            for k in 0..=a {
                let l = set.cardinal(k);
                for kp in 0..=a {
                    let rho = xs[..kp].iter().filter(|x| **x == xs[kp]).count() as u32;
                    let v = l
                        .derivative_at(&MultiIndex::from([rho]), &[xs[kp].clone()])
                        .unwrap();
                    let want = if k == kp {
                        Rational::one()
                    } else {
                        Rational::zero()
                    };
                    assert_eq!(v, want, "{scheme} a={a} k={k} k'={kp}");
                }
                // Sum the cardinals weighted by the data of u = 1 (1 for evaluations, 0 for derivatives).
                let rho_k = xs[..k].iter().filter(|x| **x == xs[k]).count();
                if rho_k == 0 {
                    sum = &sum + &l;
                }
            }
            assert_eq!(sum, Polynomial::one(1));
        }
    }
}

#[test]
fn block_partition_of_unity_and_reproduction() {
    for scheme in &SCHEMES {
        let g = GridCoordinates::build(scheme, 2, 4).unwrap();
        let cache = CardinalCache::new(&g).unwrap();
        for alpha in [MultiIndex::from([2, 3]), MultiIndex::from([4, 1])] {
            if *scheme != GridScheme::HermiteMidpoint {
                let mut sum = Polynomial::zero(2);
                for beta in alpha.block_members() {
                    sum = &sum + &cache.block_basis(&beta, &alpha).unwrap();
                }
                assert_eq!(sum, Polynomial::one(2));
            }
            for gamma in alpha.block_members() {
                let u = Polynomial::monomial(gamma.clone(), Rational::one());
                let data = alpha
                    .block_members()
                    .into_iter()
                    .map(|mu| {
                        let v = u.apply_functional(&g.functional(&mu).unwrap()).unwrap();
                        (mu, v)
                    })
                    .collect();
                assert_eq!(cache.block_interpolant(&alpha, &data).unwrap(), u);
            }
        }
    }
}

#[test]
fn coefficient_properties() {
    for n in 1..=4 {
        for r in 1..=9 {
            let set = serendipity_set(n, r).unwrap();
            let boundary = set.boundary_points();
            let table = coefficient_table(n, r).unwrap();
            let mut total = 0;
            for alpha in set.iter() {
                let c = coeff_oracle(&set, alpha).unwrap();
                total += c;
                if c != 0 {
                    assert!(boundary.contains(alpha));
                    assert_eq!(alpha.multiplicity(0), 0);
                }
                assert_eq!(table.get(alpha), c);
                if alpha.multiplicity(0) == 0 {
                    let m1 = alpha.multiplicity(1) as i64;
                    let lemma =
                        i64::from(alpha.superlinear_degree()) > i64::from(r) - (n as i64 + m1);
                    assert_eq!(boundary.contains(alpha), lemma, "n={n} r={r} {alpha}");
                }
                let mut reversed = alpha.entries().to_vec();
                reversed.reverse();
                let mut rotated = alpha.entries().to_vec();
                rotated.rotate_left(1);
                for perm in [reversed, rotated] {
                    let perm = MultiIndex::new(perm);
                    assert_eq!(coeff_oracle(&set, &perm).unwrap(), c);
                }
            }
            assert_eq!(total, 1, "n={n} r={r}");
        }
    }
}

#[test]
fn three_dimensional_restriction_matches_planar_basis() {
    for scheme in &SCHEMES {
        let cube = serendipity::SerendipityBasis::build(3, 4, scheme).unwrap();
        let square = serendipity::SerendipityBasis::build(2, 4, scheme).unwrap();
        let face = FaceIndex::new(vec![2, 0, 2]).unwrap();
        for (alpha, phi) in cube.functions() {
            let FaceRestriction::Polynomial(p) = restrict_to_face(phi, &face).unwrap() else {
                panic!("two-dimensional face");
            };
            if face.closure_contains(alpha) {
                let local = alpha.select(&face.free_axes());
                assert_eq!(&p, square.function(&local).unwrap(), "{scheme} {alpha}");
            } else {
                assert!(p.is_zero());
            }
        }
    }
}

fn multi_index(max_n: usize, max_entry: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_entry, 1..=max_n).prop_map(MultiIndex::new)
}

fn small_poly(n: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (prop::collection::vec(0u32..5, n), -20i64..20, 1i64..6),
        0..6,
    )
    .prop_map(move |terms| {
        Polynomial::from_terms(
            n,
            terms
                .into_iter()
                .map(|(e, p, q)| (MultiIndex::new(e), Rational::new(p.into(), q.into()))),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn superlinear_degree_is_monotone(alpha in multi_index(5, 6), bump in prop::collection::vec(0u32..3, 5)) {
        let beta: MultiIndex = alpha.entries().iter().zip(&bump).map(|(a, b)| a + b).collect();
        prop_assert!(alpha.is_below(&beta));
        prop_assert!(alpha.superlinear_degree() <= beta.superlinear_degree());
    }

    #[test]
    fn superlinear_degree_is_symmetric(alpha in multi_index(5, 6), shift in 0usize..5) {
        let mut v = alpha.entries().to_vec();
        let len = v.len();
        v.rotate_left(shift % len);
        v.reverse();
        prop_assert_eq!(MultiIndex::new(v).superlinear_degree(), alpha.superlinear_degree());
    }

    #[test]
    fn closed_form_agrees_with_oracle(n in 1usize..=4, r in 1u32..=9, pick in 0usize..1000) {
        let set = serendipity_set(n, r).unwrap();
        let alpha = set.iter().nth(pick % set.len()).unwrap();
        prop_assert_eq!(coeff_closed_form(n, r, alpha).unwrap(), coeff_oracle(&set, alpha).unwrap());
    }

    #[test]
    fn derivatives_compose(p in small_poly(2), a in prop::collection::vec(0u32..3, 2), b in prop::collection::vec(0u32..3, 2)) {
        let a = MultiIndex::new(a);
        let b = MultiIndex::new(b);
        let lhs = p.derivative(&a).unwrap().derivative(&b).unwrap();
        let rhs = p.derivative(&a.plus(&b)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_is_linear(p in small_poly(3), q in small_poly(3), rho in prop::collection::vec(0u32..3, 3)) {
        let rho = MultiIndex::new(rho);
        let lhs = (&p + &q).derivative(&rho).unwrap();
        let rhs = &p.derivative(&rho).unwrap() + &q.derivative(&rho).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn float_evaluation_tracks_exact(p in small_poly(2), x in -4i64..4, y in -4i64..4) {
        let exact = p.evaluate(&[Rational::new(x.into(), 4.into()), Rational::new(y.into(), 4.into())]).unwrap();
        let approx = p.evaluate_f64(&[x as f64 / 4.0, y as f64 / 4.0]).unwrap();
        let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
        prop_assert!((exact - approx).abs() <= 1e-9 * (1.0 + exact.abs()));
    }
}

#[test]
fn verify_is_green_on_acceptance_matrix() {
    for scheme in &SCHEMES {
        for n in 1..=3 {
            for r in 1..=6 {
                let report = serendipity::SerendipityBasis::build(n, r, scheme)
                    .unwrap()
                    .verify();
                assert!(report.passed(), "{report}");
            }
        }
    }
}
