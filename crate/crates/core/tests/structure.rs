mod common;

use std::collections::BTreeSet;

use common::{basis_from, blocks, ket, unitary_from};
use ctcog::linalg::{self, Ket};
use ctcog::oracle::{is_distinguishable, is_observable};
use ctcog::substrate::{Attribute, Marginal, State, Substrate, Variable};
use proptest::prelude::*;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

proptest! {
    #[test]
    fn classical_bar_is_involutive(n in 2usize..10, mask in prop::collection::vec(any::<bool>(), 10)) {
        let s = Substrate::classical("s", &labels(n)).unwrap();
        let idx: BTreeSet<usize> = (0..n).filter(|&i| mask[i]).collect();
        prop_assume!(!idx.is_empty());
        let a = Attribute::from_indices(&s, "a", idx).unwrap();
        prop_assert_eq!(a.bar().bar(), a);
    }

    #[test]
    fn quantum_bar_is_involutive(dim in 2usize..5, k in 1usize..4, seed in prop::collection::vec(ket(4), 4)) {
        let k = k.min(dim);
        let gens: Vec<Ket> = seed.iter().take(k).map(|v| v[..dim].to_vec()).collect();
        let s = Substrate::quantum("q", dim).unwrap();
        let Ok(a) = Attribute::span(&s, "a", &gens) else { return Ok(()) };
        let bb = a.bar().bar();
        prop_assert_eq!(bb.size(), a.size());
        for v in a.basis().unwrap() {
            prop_assert!(linalg::norm_sqr(&linalg::residual(v, bb.basis().unwrap())) < 1e-9);
        }
    }

    #[test]
    fn classical_boolean_is_maximal(n in 2usize..10, mask in prop::collection::vec(any::<bool>(), 10)) {
        let s = Substrate::classical("s", &labels(n)).unwrap();
        let idx: BTreeSet<usize> = (0..n).filter(|&i| mask[i]).collect();
        prop_assume!(!idx.is_empty() && idx.len() < n);
        let a = Attribute::from_indices(&s, "a", idx).unwrap();
        let v = Variable::new(&s, "v", vec![a.clone(), a.bar()]).unwrap();
        prop_assert!(v.is_boolean());
        prop_assert!(v.is_maximal());
    }

    #[test]
    fn quantum_boolean_is_maximal(dim in 2usize..5, vs in prop::collection::vec(ket(4), 4), k in 1usize..4) {
        let vs: Vec<Ket> = vs.iter().map(|v| v[..dim].to_vec()).collect();
        let Some(basis) = basis_from(&vs) else { return Ok(()) };
        let k = k.min(dim - 1);
        let s = Substrate::quantum("q", dim).unwrap();
        let a = Attribute::subspace(&s, "a", basis[..k].to_vec()).unwrap();
        let v = Variable::new(&s, "v", vec![a.clone(), a.bar()]).unwrap();
        prop_assert!(v.is_boolean());
        prop_assert!(v.is_maximal());
    }

    #[test]
    fn orthogonal_variables_are_distinguishable(
        dim in 2usize..5,
        vs in prop::collection::vec(ket(4), 4),
        cuts in prop::collection::vec(any::<bool>(), 3),
    ) {
        let vs: Vec<Ket> = vs.iter().map(|v| v[..dim].to_vec()).collect();
        let Some(basis) = basis_from(&vs) else { return Ok(()) };
        let s = Substrate::quantum("q", dim).unwrap();
        let attrs: Vec<Attribute> = blocks(dim, &cuts)
            .iter()
            .enumerate()
            .map(|(i, b)| Attribute::subspace(&s, &format!("a{i}"), b.iter().map(|&j| basis[j].clone()).collect()).unwrap())
            .collect();
        for (i, a) in attrs.iter().enumerate() {
            for b in &attrs[i + 1..] {
                prop_assert!(a.is_orthogonal_to(b));
            }
        }
        let v = Variable::new(&s, "v", attrs).unwrap();
        prop_assert!(is_distinguishable(&v).possible);
        prop_assert!(is_observable(&v).unwrap());
    }

    #[test]
    fn classical_locality(
        n1 in 2usize..6, n2 in 2usize..6,
        map in prop::collection::vec(0usize..6, 6),
        state in 0usize..36,
    ) {
        let a = Substrate::classical("a", &labels(n1)).unwrap();
        let b = Substrate::classical("b", &labels(n2)).unwrap();
        let ab = Substrate::compose(&a, &b).unwrap();
        let local: Vec<usize> = map[..n1].iter().map(|m| m % n1).collect();
        let lifted = ab.lift_map(0, &local).unwrap();
        let s = State::from_index(&ab, state % ab.size()).unwrap();
        let t = s.map_state(&lifted).unwrap();
        prop_assert_eq!(t.marginal(1).unwrap(), s.marginal(1).unwrap());
        let (Marginal::Classical(m0), Marginal::Classical(s0)) = (t.marginal(0).unwrap(), s.marginal(0).unwrap()) else { unreachable!() };
        prop_assert_eq!(m0.index(), Some(local[s0.index().unwrap()]));
    }

    #[test]
    fn quantum_locality(u in prop::collection::vec(ket(2), 2), psi in ket(4)) {
        let Some(u) = unitary_from(&u) else { return Ok(()) };
        let Some(psi) = linalg::normalize(&psi) else { return Ok(()) };
        let q = Substrate::quantum("q", 2).unwrap();
        let qq = Substrate::compose(&q, &q).unwrap();
        let s = State::quantum(&qq, psi).unwrap();
        let t = s.evolve(&qq.lift_operator(0, &u).unwrap()).unwrap();
        let (Marginal::Quantum(before), Marginal::Quantum(after)) = (s.marginal(1).unwrap(), t.marginal(1).unwrap()) else { unreachable!() };
        prop_assert!(before.max_abs_diff(&after) <= 1e-9);
    }
}

#[test]
fn deck_complement_of_five_of_hearts() {
    let mut names = Vec::new();
    for suit in ["hearts", "diamonds", "clubs", "spades"] {
        for v in 1..=13 {
            names.push(format!("{v}-{suit}"));
        }
    }
    let deck = Substrate::classical("deck", &names).unwrap();
    let five = Attribute::classical(&deck, "5-hearts", &["5-hearts"]).unwrap();
    assert_eq!(five.bar().size(), 51);
    assert!(!five
        .bar()
        .contains(&State::classical(&deck, "5-hearts").unwrap())
        .unwrap());
}
