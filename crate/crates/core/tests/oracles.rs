//! Brute-force oracles for the enumerators and validators.

use std::sync::Arc;

use xmodlab::action::conjugation_action;
use xmodlab::algebra::{automorphism_group, enumerate_morphisms, OmegaAlgebra, DEFAULT_BUDGET};
use xmodlab::catalog::{self, Kind};
use xmodlab::derivation::{check_derivation, enumerate_derivations, whitehead_group};
use xmodlab::xmod::{validate_crossed_module, CrossedModule};

fn all_maps(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(len as u32)).map(move |mut k| {
        let mut v = vec![0; len];
        for slot in v.iter_mut() {
            *slot = k % n;
            k /= n;
        }
        v
    })
}

fn preserves(f: &[usize], s: &OmegaAlgebra, t: &OmegaAlgebra) -> bool {
    let sig = s.signature();
    for x in s.elements() {
        for y in s.elements() {
            if f[s.add(x, y)] != t.add(f[x], f[y]) {
                return false;
            }
            for k in 0..sig.binary_ops().len() {
                if f[s.op(k, x, y)] != t.op(k, f[x], f[y]) {
                    return false;
                }
            }
        }
        for u in 0..sig.unary_ops().len() {
            if f[s.unop(u, x)] != t.unop(u, f[x]) {
                return false;
            }
        }
    }
    true
}

fn morphism_oracle(s: &OmegaAlgebra, t: &OmegaAlgebra) -> Vec<Vec<usize>> {
    all_maps(t.order(), s.order()).filter(|f| preserves(f, s, t)).collect()
}

fn same_signature_pairs() -> Vec<(Arc<OmegaAlgebra>, Arc<OmegaAlgebra>)> {
    let algs: Vec<_> = catalog::names_of(Kind::Algebra)
        .iter()
        .map(|n| catalog::algebra(n).unwrap())
        .filter(|a| a.order() <= 6)
        .collect();
    let mut out = Vec::new();
    for s in &algs {
        for t in &algs {
            if s.signature() == t.signature() && t.order().pow(s.order() as u32) <= 50_000 {
                out.push((s.clone(), t.clone()));
            }
        }
    }
    out
}

#[test]
fn morphism_enumeration_matches_brute_force() {
    let pairs = same_signature_pairs();
    assert!(pairs.len() > 20);
    for (s, t) in pairs {
        let fast: Vec<Vec<usize>> = enumerate_morphisms(&s, &t, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .map(|m| m.map().to_vec())
            .collect();
        let mut slow = morphism_oracle(&s, &t);
        slow.sort();
        assert_eq!(fast, slow, "{} → {}", s.name(), t.name());
    }
}

#[test]
fn automorphism_counts() {
    for (name, count) in [("Z3-group", 2), ("Z4-group", 2), ("Z6-group", 2), ("V4-group", 6), ("S3-group", 6), ("D4-group", 8), ("Q8-group", 24)] {
        let a = catalog::algebra(name).unwrap();
        assert_eq!(automorphism_group(&a, DEFAULT_BUDGET).unwrap().len(), count, "{name}");
    }
    let ring = catalog::algebra("Z4-ring").unwrap();
    assert_eq!(automorphism_group(&ring, DEFAULT_BUDGET).unwrap().len(), 1);
}

fn is_derivation(x: &CrossedModule, d: &[usize]) -> bool {
    let (a, b, act) = (x.a(), x.b(), x.action());
    let sig = b.signature();
    for p in b.elements() {
        for q in b.elements() {
            if d[b.add(p, q)] != a.add(d[p], act.dot(p, d[q])) {
                return false;
            }
            for k in 0..sig.binary_ops().len() {
                let rhs = a.add(a.add(a.op(k, d[p], d[q]), act.star_right(k, d[p], q)), act.star(k, p, d[q]));
                if d[b.op(k, p, q)] != rhs {
                    return false;
                }
            }
        }
        for u in 0..sig.unary_ops().len() {
            if d[b.unop(u, p)] != a.unop(u, d[p]) {
                return false;
            }
        }
    }
    true
}

#[test]
fn derivation_enumeration_matches_brute_force() {
    for name in catalog::names_of(Kind::Xmod) {
        let x = catalog::xmod(&name).unwrap();
        let mut slow: Vec<Vec<usize>> = all_maps(x.a().order(), x.b().order()).filter(|d| is_derivation(&x, d)).collect();
        slow.sort();
        let mut fast: Vec<Vec<usize>> = enumerate_derivations(&x, DEFAULT_BUDGET)
            .unwrap()
            .iter()
            .map(|d| d.table().to_vec())
            .collect();
        fast.sort();
        assert_eq!(fast, slow, "{name}");
        for d in all_maps(x.a().order(), x.b().order()).take(500) {
            let ok = check_derivation(&x, &d).unwrap().is_valid();
            assert_eq!(ok, is_derivation(&x, &d), "{name} {d:?}");
        }
    }
}

#[test]
fn whitehead_group_of_conjugation_xmods() {
    // Regular: θ and σ both bijective.
    for name in ["Z2-conj-xmod", "Z3-conj-xmod", "Z4-conj-xmod", "V4-conj-xmod", "S3-conj-xmod"] {
        let x = catalog::xmod(name).unwrap();
        let a = x.a();
        let regular = all_maps(a.order(), x.b().order())
            .filter(|d| is_derivation(&x, d))
            .filter(|d| {
                let theta: Vec<usize> = a.elements().map(|v| a.add(d[x.alpha().apply(v)], v)).collect();
                let sigma: Vec<usize> = x.b().elements().map(|b| x.b().add(x.alpha().apply(d[b]), b)).collect();
                let bij = |m: &[usize]| {
                    let mut s = m.to_vec();
                    s.sort();
                    s.dedup();
                    s.len() == m.len()
                };
                bij(&theta) && bij(&sigma)
            })
            .count();
        assert_eq!(whitehead_group(&x, DEFAULT_BUDGET).unwrap().elements.len(), regular, "{name}");
    }
}

fn cm_oracle(x_alpha: &[usize], a: &OmegaAlgebra, b: &OmegaAlgebra, dot: impl Fn(usize, usize) -> usize) -> bool {
    let cm1 = b.elements().all(|p| a.elements().all(|v| x_alpha[dot(p, v)] == b.conj(p, x_alpha[v])));
    let cm2 = a.elements().all(|v| a.elements().all(|w| dot(x_alpha[v], w) == a.conj(v, w)));
    cm1 && cm2
}

#[test]
fn crossed_module_validation_matches_brute_force() {
    for name in ["Z2-group", "Z3-group", "Z4-group", "V4-group", "S3-group"] {
        let g = catalog::algebra(name).unwrap();
        let act = conjugation_action(&g);
        let mut valid = 0;
        for f in morphism_oracle(&g, &g) {
            let fast = validate_crossed_module(&f, &act).unwrap().is_valid();
            assert_eq!(fast, cm_oracle(&f, &g, &g, |p, v| act.dot(p, v)), "{name} {f:?}");
            valid += fast as usize;
        }
        // Only maps with α(a) - a central survive; for S3 that is the identity.
        let expected = if g.is_abelian() { morphism_oracle(&g, &g).len() } else { 1 };
        assert_eq!(valid, expected, "{name}");
    }
}

#[test]
fn doubling_on_z4_is_a_crossed_module() {
    let z4 = Arc::new(catalog::cyclic_group(4));
    let act = xmodlab::action::ActionSet::trivial(&z4, &z4).unwrap();
    let alpha: Vec<usize> = (0..4).map(|b| 2 * b % 4).collect();
    assert!(validate_crossed_module(&alpha, &act).unwrap().is_valid());
    assert!(CrossedModule::from_tables("twice", alpha, act).is_ok());
}
