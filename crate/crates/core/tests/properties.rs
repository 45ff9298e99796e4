use std::sync::Arc;

use proptest::prelude::*;
use xmodlab::action::{check_derived_action, semidirect_product, ActionSet};
use xmodlab::algebra::{validate_algebra, AlgebraTables, Signature, Table};
use xmodlab::catalog::{self, Kind};
use xmodlab::groupoid::delta;
use xmodlab::text::Library;

fn group_oracle(n: usize, add: &[usize], neg: &[usize]) -> bool {
    let op = |a: usize, b: usize| add[a * n + b];
    let assoc = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| op(op(a, b), c) == op(a, op(b, c)))));
    let unit = (0..n).all(|a| op(0, a) == a && op(a, 0) == a);
    let inv = (0..n).all(|a| op(a, neg[a]) == 0 && op(neg[a], a) == 0);
    assoc && unit && inv
}

fn tables(n: usize, add: Vec<usize>, neg: Vec<usize>) -> AlgebraTables {
    AlgebraTables {
        name: "t".into(),
        signature: Signature::groups(),
        order: n,
        add: Table::new(n, n, add).unwrap(),
        neg,
        binary: vec![],
        unary: vec![],
    }
}

fn random_tables() -> impl Strategy<Value = (usize, Vec<usize>, Vec<usize>)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(0..n, n * n), prop::collection::vec(0..n, n)))
}

/// A catalog group with its non-zero elements relabelled by `perm`.
fn relabelled(perm_seed: Vec<usize>) -> (usize, Vec<usize>, Vec<usize>) {
    let g = catalog::symmetric3();
    let n = g.order();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut perm = vec![0];
    for s in perm_seed {
        perm.push(rest.remove(s % rest.len()));
    }
    let mut inv = vec![0; n];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    let add = (0..n * n).map(|k| perm[g.add(inv[k / n], inv[k % n])]).collect();
    let neg = (0..n).map(|a| perm[g.neg(inv[a])]).collect();
    (n, add, neg)
}

proptest! {
    #[test]
    fn algebra_validation_matches_axioms((n, add, neg) in random_tables()) {
        let report = validate_algebra(&tables(n, add.clone(), neg.clone())).unwrap();
        prop_assert_eq!(report.is_valid(), group_oracle(n, &add, &neg));
    }

    #[test]
    fn relabelled_groups_validate(seed in prop::collection::vec(0usize..5, 5)) {
        let (n, add, neg) = relabelled(seed);
        prop_assert!(validate_algebra(&tables(n, add, neg)).unwrap().is_valid());
    }

    #[test]
    fn out_of_range_entries_are_errors_not_panics(n in 1usize..4, bad in 4usize..100) {
        let mut add: Vec<usize> = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        add[n * n - 1] = bad;
        prop_assert!(validate_algebra(&tables(n, add, (0..n).collect())).is_err());
    }

    #[test]
    fn derived_actions_on_v4_match_semidirect_product(dot in prop::collection::vec(0usize..4, 8)) {
        let a = Arc::new(catalog::klein_four());
        let b = Arc::new(catalog::cyclic_group(2));
        let act = ActionSet::new("r", b, a, Table::new(2, 4, dot).unwrap(), vec![]).unwrap();
        let (_, semi) = semidirect_product(&act).unwrap();
        prop_assert_eq!(check_derived_action(&act).unwrap().is_valid(), semi.is_valid());
    }

    #[test]
    fn derived_actions_of_z2_on_s3_match_semidirect_product(dot in prop::collection::vec(0usize..6, 12)) {
        let a = Arc::new(catalog::symmetric3());
        let b = Arc::new(catalog::cyclic_group(2));
        let act = ActionSet::new("r", b, a, Table::new(2, 6, dot).unwrap(), vec![]).unwrap();
        let (_, semi) = semidirect_product(&act).unwrap();
        prop_assert_eq!(check_derived_action(&act).unwrap().is_valid(), semi.is_valid());
    }

    #[test]
    fn parser_never_panics(text in "(algebra|order|add|neg|xmod|alpha|action|[0-9 ]{0,8}|[a-z]{1,4}|\n){0,40}") {
        let _ = Library::from_text(&text);
    }

    #[test]
    fn groupoid_laws_hold_in_delta(pick in 0usize..64, a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let names = catalog::names_of(Kind::Xmod);
        let x = catalog::xmod(&names[pick % names.len()]).unwrap();
        let g = delta(&x).unwrap();
        let n = g.c1().order();
        let (d0, d1) = (g.d0(), g.d1());
        let f = a % n;
        // Build a composable chain f, then h after f, then k after h.
        let tail = |t: usize, s: usize| g.c1().elements().filter(|&y| d0.apply(y) == d1.apply(t)).nth(s % n);
        if let Some(h) = tail(f, b).or_else(|| tail(f, 0)) {
            let k = tail(h, c).or_else(|| tail(h, 0)).unwrap();
            let hf = g.compose(h, f).unwrap();
            let kh = g.compose(k, h).unwrap();
            prop_assert_eq!(g.compose(k, hf), g.compose(kh, f));
            prop_assert_eq!(d0.apply(hf), d0.apply(f));
            prop_assert_eq!(d1.apply(hf), d1.apply(h));
        }
        let one_src = g.identity_arrow(d0.apply(f));
        let one_tgt = g.identity_arrow(d1.apply(f));
        prop_assert_eq!(g.compose(f, one_src), Some(f));
        prop_assert_eq!(g.compose(one_tgt, f), Some(f));
        let inv = g.inverse(f);
        prop_assert_eq!(g.compose(inv, f), Some(one_src));
        prop_assert_eq!(g.compose(f, inv), Some(one_tgt));
    }
}
