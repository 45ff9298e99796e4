//! Built-in desk-scale algebras, actions, crossed modules and groupoids.
//!
//! Entries are built on demand by name; every payload goes through its
//! module's validator on construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::action::{conjugation_action, ActionSet};
use crate::algebra::{
    direct_product, find_isomorphism, subalgebra, AlgMorphism, AlgebraTables, OmegaAlgebra, Signature, Table,
};
use crate::error::{Error, Result};
use crate::groupoid::{delta, pair_groupoid, roundtrip_groupoid, roundtrip_xmod, InternalGroupoid};
use crate::xmod::CrossedModule;

/// `Z_n` under addition.
pub fn cyclic_group(n: usize) -> OmegaAlgebra {
    OmegaAlgebra::group(format!("Z{n}"), Table::from_fn(n, n, |a, b| (a + b) % n)).expect("cyclic group")
}

/// The one-element group.
pub fn trivial_group() -> OmegaAlgebra {
    OmegaAlgebra::trivial("0", Signature::groups())
}

/// Closure of a set of permutations under composition, sorted
/// lexicographically (so the identity comes first).
fn permutation_group(name: &str, gens: &[Vec<usize>]) -> OmegaAlgebra {
    let degree = gens[0].len();
    let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { (0..degree).map(|i| p[q[i]]).collect() };
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier = vec![(0..degree).collect::<Vec<_>>()];
    while let Some(p) = frontier.pop() {
        if !seen.insert(p.clone()) {
            continue;
        }
        for g in gens {
            frontier.push(compose(g, &p));
        }
    }
    let elements: Vec<Vec<usize>> = seen.into_iter().collect();
    let index: BTreeMap<&Vec<usize>, usize> = elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let n = elements.len();
    let add = Table::from_fn(n, n, |x, y| index[&compose(&elements[x], &elements[y])]);
    OmegaAlgebra::group(name, add).expect("permutation group")
}

/// Klein four-group, `Z2 × Z2` with XOR addition.
pub fn klein_four() -> OmegaAlgebra {
    OmegaAlgebra::group("V4", Table::from_fn(4, 4, |a, b| a ^ b)).expect("klein four")
}

/// Symmetric group on three letters.
pub fn symmetric3() -> OmegaAlgebra {
    permutation_group("S3", &[vec![1, 0, 2], vec![1, 2, 0]])
}

/// Alternating subgroup of [`symmetric3`] as a sorted subset of its indices.
pub fn alternating3_in_s3(s3: &OmegaAlgebra) -> Vec<usize> {
    s3.elements().filter(|&x| x == 0 || s3.element_order(x) == 3).collect()
}

/// Dihedral group of order 8.
pub fn dihedral4() -> OmegaAlgebra {
    permutation_group("D4", &[vec![1, 2, 3, 0], vec![3, 2, 1, 0]])
}

/// Quaternion group; element `2u + s` stands for `(-1)^s u` with `u ∈ {1, i, j, k}`.
pub fn quaternion8() -> OmegaAlgebra {
    // unit products: (index, sign) of u·v
    const UNIT: [[(usize, usize); 4]; 4] = [
        [(0, 0), (1, 0), (2, 0), (3, 0)],
        [(1, 0), (0, 1), (3, 0), (2, 1)],
        [(2, 0), (3, 1), (0, 1), (1, 0)],
        [(3, 0), (2, 0), (1, 1), (0, 1)],
    ];
    let add = Table::from_fn(8, 8, |x, y| {
        let (u, v) = (x / 2, y / 2);
        let (w, s) = UNIT[u][v];
        2 * w + ((x % 2 + y % 2 + s) % 2)
    });
    OmegaAlgebra::group("Q8", add).expect("quaternion group")
}

fn ring(name: String, n: usize, mul: impl Fn(usize, usize) -> usize) -> OmegaAlgebra {
    OmegaAlgebra::new(AlgebraTables {
        name,
        signature: Signature::commutative_ring(),
        order: n,
        add: Table::from_fn(n, n, |a, b| (a + b) % n),
        neg: (0..n).map(|a| (n - a) % n).collect(),
        binary: vec![Table::from_fn(n, n, mul)],
        unary: vec![],
    })
    .expect("ring")
}

/// `Z_n` with the zero multiplication: a ring without identity.
pub fn zero_ring(n: usize) -> OmegaAlgebra {
    ring(format!("Z{n}-zero"), n, |_, _| 0)
}

/// The ring `Z_n`.
pub fn ring_zn(n: usize) -> OmegaAlgebra {
    ring(format!("Z{n}-ring"), n, move |a, b| a * b % n)
}

/// Every group of order at most 8, up to isomorphism, with a display name.
pub fn reference_groups() -> Vec<(&'static str, OmegaAlgebra)> {
    let z2 = cyclic_group(2);
    vec![
        ("trivial", trivial_group()),
        ("Z2", z2.clone()),
        ("Z3", cyclic_group(3)),
        ("Z4", cyclic_group(4)),
        ("Z2xZ2", klein_four()),
        ("Z5", cyclic_group(5)),
        ("Z6", cyclic_group(6)),
        ("S3", symmetric3()),
        ("Z7", cyclic_group(7)),
        ("Z8", cyclic_group(8)),
        ("Z2xZ4", direct_product(&z2, &cyclic_group(4), "Z2xZ4").expect("product")),
        (
            "Z2xZ2xZ2",
            direct_product(&z2, &klein_four(), "Z2xZ2xZ2").expect("product"),
        ),
        ("D4", dihedral4()),
        ("Q8", quaternion8()),
    ]
}

/// Names the isomorphism type of a group of order at most 8.
pub fn identify_group(g: &Arc<OmegaAlgebra>, budget: u64) -> Result<Option<&'static str>> {
    if !g.signature().is_groups() {
        return Ok(None);
    }
    for (name, r) in reference_groups() {
        if r.order() == g.order() && find_isomorphism(&Arc::new(r), g, budget)?.is_some() {
            return Ok(Some(name));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Algebra,
    Action,
    Xmod,
    Groupoid,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Algebra => "algebra",
            Kind::Action => "action",
            Kind::Xmod => "xmod",
            Kind::Groupoid => "groupoid",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Payload {
    Algebra(Arc<OmegaAlgebra>),
    Action(Arc<ActionSet>),
    Xmod(Arc<CrossedModule>),
    Groupoid(Arc<InternalGroupoid>),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: Kind,
    pub payload: Payload,
}

const ALGEBRAS: &[&str] = &[
    "0-group",
    "Z2-group",
    "Z3-group",
    "Z4-group",
    "Z6-group",
    "V4-group",
    "S3-group",
    "D4-group",
    "Q8-group",
    "A3-group",
    "Z2-zero-ring",
    "Z4-zero-ring",
    "Z4-ring",
    "2Z4-ideal",
];

const ACTIONS: &[&str] = &["S3-conj-action", "Z4-ring-conj-action", "Z2-Z2-trivial-action"];

const XMODS: &[&str] = &[
    "Z2-id-trivial",
    "Z3-id-trivial",
    "Z4-id-trivial",
    "Z6-id-trivial",
    "Z2-zero-trivial",
    "Z2-conj-xmod",
    "Z3-conj-xmod",
    "Z4-conj-xmod",
    "V4-conj-xmod",
    "S3-conj-xmod",
    "A3-in-S3",
    "Z4-over-0",
    "0-over-S3",
    "Z2-zero-ring-conj",
    "Z4-ring-conj",
    "2Z4-in-Z4-ring",
];

const PAIR_GROUPOIDS: &[&str] = &["pair-Z3", "pair-V4", "pair-S3"];

/// Every catalog name, algebras first, then actions, crossed modules and groupoids.
pub fn names() -> Vec<(String, Kind)> {
    let mut out: Vec<(String, Kind)> = ALGEBRAS.iter().map(|n| (n.to_string(), Kind::Algebra)).collect();
    out.extend(ACTIONS.iter().map(|n| (n.to_string(), Kind::Action)));
    out.extend(XMODS.iter().map(|n| (n.to_string(), Kind::Xmod)));
    out.extend(XMODS.iter().map(|n| (format!("delta-{n}"), Kind::Groupoid)));
    out.extend(PAIR_GROUPOIDS.iter().map(|n| (n.to_string(), Kind::Groupoid)));
    out
}

/// Names of a single kind.
pub fn names_of(kind: Kind) -> Vec<String> {
    names().into_iter().filter(|(_, k)| *k == kind).map(|(n, _)| n).collect()
}

fn build_algebra(name: &str) -> Result<OmegaAlgebra> {
    let g = match name {
        "0-group" => trivial_group(),
        "Z2-group" => cyclic_group(2),
        "Z3-group" => cyclic_group(3),
        "Z4-group" => cyclic_group(4),
        "Z6-group" => cyclic_group(6),
        "V4-group" => klein_four(),
        "S3-group" => symmetric3(),
        "D4-group" => dihedral4(),
        "Q8-group" => quaternion8(),
        "A3-group" => {
            let s3 = Arc::new(symmetric3());
            let (a3, _) = subalgebra(&s3, &alternating3_in_s3(&s3), "A3")?;
            a3.as_ref().clone()
        }
        "Z2-zero-ring" => zero_ring(2),
        "Z4-zero-ring" => zero_ring(4),
        "Z4-ring" => ring_zn(4),
        "2Z4-ideal" => {
            let (i, _) = subalgebra(&Arc::new(ring_zn(4)), &[0, 2], "2Z4")?;
            i.as_ref().clone()
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(g.renamed(name))
}

/// A catalog algebra by name.
pub fn algebra(name: &str) -> Result<Arc<OmegaAlgebra>> {
    build_algebra(name).map(Arc::new)
}

fn build_action(name: &str) -> Result<ActionSet> {
    Ok(match name {
        "S3-conj-action" => conjugation_action(&algebra("S3-group")?),
        "Z4-ring-conj-action" => conjugation_action(&algebra("Z4-ring")?),
        "Z2-Z2-trivial-action" => {
            let z2 = algebra("Z2-group")?;
            ActionSet::trivial(&z2, &z2)?
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    }
    .renamed(name))
}

/// A catalog crossed module by name.
pub fn xmod(name: &str) -> Result<Arc<CrossedModule>> {
    let id_trivial = |g: &str| -> Result<CrossedModule> {
        CrossedModule::with_trivial_action(name, AlgMorphism::identity(&algebra(g)?))
    };
    let conj = |g: &str| -> Result<CrossedModule> { CrossedModule::conjugation(name, &algebra(g)?) };
    let x = match name {
        "Z2-id-trivial" => id_trivial("Z2-group")?,
        "Z3-id-trivial" => id_trivial("Z3-group")?,
        "Z4-id-trivial" => id_trivial("Z4-group")?,
        "Z6-id-trivial" => id_trivial("Z6-group")?,
        "Z2-zero-trivial" => {
            let z2 = algebra("Z2-group")?;
            CrossedModule::with_trivial_action(name, AlgMorphism::zero(&z2, &z2)?)?
        }
        "Z2-conj-xmod" => conj("Z2-group")?,
        "Z3-conj-xmod" => conj("Z3-group")?,
        "Z4-conj-xmod" => conj("Z4-group")?,
        "V4-conj-xmod" => conj("V4-group")?,
        "S3-conj-xmod" => conj("S3-group")?,
        "Z2-zero-ring-conj" => conj("Z2-zero-ring")?,
        "Z4-ring-conj" => conj("Z4-ring")?,
        "A3-in-S3" => {
            let s3 = algebra("S3-group")?;
            let (a3, inc) = subalgebra(&s3, &alternating3_in_s3(&s3), "A3-group")?;
            restricted_conjugation(name, &s3, a3, inc)?
        }
        "2Z4-in-Z4-ring" => {
            let r = algebra("Z4-ring")?;
            let (i, inc) = subalgebra(&r, &[0, 2], "2Z4-ideal")?;
            restricted_conjugation(name, &r, i, inc)?
        }
        "Z4-over-0" => {
            let z4 = algebra("Z4-group")?;
            CrossedModule::with_trivial_action(name, AlgMorphism::zero(&z4, &algebra("0-group")?)?)?
        }
        "0-over-S3" => {
            let s3 = algebra("S3-group")?;
            CrossedModule::with_trivial_action(name, AlgMorphism::zero(&algebra("0-group")?, &s3)?)?
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(Arc::new(x))
}

/// Inclusion of a normal subalgebra `A ⊆ B` with `b·a = b + a - b`, `b*a` from B.
fn restricted_conjugation(
    name: &str,
    b: &Arc<OmegaAlgebra>,
    a: Arc<OmegaAlgebra>,
    inc: AlgMorphism,
) -> Result<CrossedModule> {
    let mut back = vec![usize::MAX; b.order()];
    for (i, &x) in inc.map().iter().enumerate() {
        back[x] = i;
    }
    let pull = |x: usize| -> Result<usize> {
        match back[x] {
            usize::MAX => Err(Error::NotKernel(format!("`{}` is not normal in `{}`", a.name(), b.name()))),
            i => Ok(i),
        }
    };
    let (nb, na) = (b.order(), a.order());
    let mut dot = Vec::with_capacity(nb * na);
    for x in b.elements() {
        for y in a.elements() {
            dot.push(pull(b.conj(x, inc.apply(y)))?);
        }
    }
    let mut star = Vec::new();
    for k in 0..b.signature().binary_ops().len() {
        let mut t = Vec::with_capacity(nb * na);
        for x in b.elements() {
            for y in a.elements() {
                t.push(pull(b.op(k, x, inc.apply(y)))?);
            }
        }
        star.push(Table::new(nb, na, t)?);
    }
    let act = ActionSet::new(format!("conj({name})"), b.clone(), a, Table::new(nb, na, dot)?, star)?;
    CrossedModule::new(name, inc, act)
}

/// A catalog groupoid by name.
pub fn groupoid(name: &str) -> Result<Arc<InternalGroupoid>> {
    if let Some(x) = name.strip_prefix("delta-") {
        if XMODS.contains(&x) {
            return Ok(Arc::new(delta(xmod(x)?.as_ref())?.renamed(name)));
        }
    }
    let g = match name {
        "pair-Z3" => pair_groupoid(&algebra("Z3-group")?)?,
        "pair-V4" => pair_groupoid(&algebra("V4-group")?)?,
        "pair-S3" => pair_groupoid(&algebra("S3-group")?)?,
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(Arc::new(g.renamed(name)))
}

/// Loads a validated entry by name.
pub fn load(name: &str) -> Result<CatalogEntry> {
    let kind = names()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, k)| k)
        .ok_or_else(|| Error::UnknownName(name.to_string()))?;
    let payload = match kind {
        Kind::Algebra => Payload::Algebra(algebra(name)?),
        Kind::Action => Payload::Action(Arc::new(build_action(name)?)),
        Kind::Xmod => Payload::Xmod(xmod(name)?),
        Kind::Groupoid => Payload::Groupoid(groupoid(name)?),
    };
    Ok(CatalogEntry {
        name: name.to_string(),
        kind,
        payload,
    })
}

/// Loads every entry and round-trips every crossed module and groupoid
/// through δ and θ. Returns one line per entry.
pub fn self_test() -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for (name, _) in names() {
        let entry = load(&name)?;
        let line = match &entry.payload {
            Payload::Algebra(a) => format!("{name}: algebra of order {}", a.order()),
            Payload::Action(a) => {
                let r = crate::action::check_derived_action(a)?;
                if !r.is_valid() {
                    return Err(Error::InternalInconsistency(format!("{name}: {r}")));
                }
                format!("{name}: derived action of {} on {}", a.actor().name(), a.acted().name())
            }
            Payload::Xmod(x) => {
                let m = roundtrip_xmod(x)?;
                format!("{name}: crossed module, θδ-iso {:?}/{:?}", m.f1().map(), m.f0().map())
            }
            Payload::Groupoid(g) => {
                roundtrip_groupoid(g)?;
                format!("{name}: groupoid with |C1| = {}, |C0| = {}", g.c1().order(), g.c0().order())
            }
        };
        lines.push(line);
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_BUDGET;

    #[test]
    fn orders() {
        assert_eq!(symmetric3().order(), 6);
        assert_eq!(dihedral4().order(), 8);
        assert_eq!(quaternion8().order(), 8);
        assert!(!symmetric3().is_abelian());
        assert!(!quaternion8().is_abelian());
    }

    #[test]
    fn quaternion_has_one_involution() {
        let q = quaternion8();
        let involutions = q.elements().filter(|&x| q.element_order(x) == 2).count();
        assert_eq!(involutions, 1);
    }

    #[test]
    fn reference_groups_are_pairwise_distinct() {
        let refs = reference_groups();
        for (i, (n1, g1)) in refs.iter().enumerate() {
            let g1 = Arc::new(g1.clone());
            assert_eq!(identify_group(&g1, DEFAULT_BUDGET).unwrap(), Some(*n1));
            for (_, g2) in &refs[i + 1..] {
                assert!(find_isomorphism(&g1, &Arc::new(g2.clone()), DEFAULT_BUDGET).unwrap().is_none());
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(load("Z5-group"), Err(Error::UnknownName(_))));
        assert!(matches!(load("delta-nothing"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn named_examples() {
        let Payload::Algebra(z4) = load("Z4-group").unwrap().payload else { panic!() };
        assert_eq!(z4.tables().add, cyclic_group(4).tables().add);
        let Payload::Algebra(r) = load("Z2-zero-ring").unwrap().payload else { panic!() };
        assert_eq!(r.signature().binary_ops(), ["mul"]);
        assert_eq!(r.signature().opposite(0), 0);
        assert!(r.tables().binary[0].data().iter().all(|&x| x == 0));
        assert_eq!(load("S3-conj-xmod").unwrap().kind, Kind::Xmod);
    }

    #[test]
    fn small_entries_self_test() {
        for name in ["Z2-zero-trivial", "A3-in-S3", "2Z4-in-Z4-ring", "0-over-S3", "Z4-over-0"] {
            roundtrip_xmod(&xmod(name).unwrap()).unwrap();
        }
    }
}
