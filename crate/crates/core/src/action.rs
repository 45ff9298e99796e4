//! Actions of one algebra on another, the twelve-condition test for derived
//! actions, semidirect products and actions read off split extensions.

use std::sync::Arc;

use crate::algebra::{
    check_range, tuples, AlgMorphism, AlgebraTables, OmegaAlgebra, Table,
};
use crate::error::{Error, Result};
use crate::report::{first_failure, ValidationReport};

/// Interpretation flag for the scope of condition D12.
pub const INTERPRETATION_D12: &str = "I-12";

/// A candidate set of actions of `actor` (B) on `acted` (A).
///
/// `dot[b][a] = b·a`, and for every binary operation `*` the table
/// `star[*][b][a] = b * a`. Products `a * b` are read through the opposite
/// operation: `a * b = b *° a`.
#[derive(Clone, Debug)]
pub struct ActionSet {
    name: String,
    actor: Arc<OmegaAlgebra>,
    acted: Arc<OmegaAlgebra>,
    dot: Table,
    star: Vec<Table>,
}

impl PartialEq for ActionSet {
    fn eq(&self, other: &Self) -> bool {
        self.dot == other.dot
            && self.star == other.star
            && self.actor == other.actor
            && self.acted == other.acted
    }
}

impl Eq for ActionSet {}

impl ActionSet {
    /// Shape-checked constructor; derived-action validity is not required.
    pub fn new(
        name: impl Into<String>,
        actor: Arc<OmegaAlgebra>,
        acted: Arc<OmegaAlgebra>,
        dot: Table,
        star: Vec<Table>,
    ) -> Result<Self> {
        let name = name.into();
        actor.same_signature(&acted)?;
        let (nb, na) = (actor.order(), acted.order());
        let check = |t: &Table, what: &str| -> Result<()> {
            if t.rows() != nb || t.cols() != na {
                return Err(Error::dims(format!("{name}: {what}"), nb * na, t.rows() * t.cols()));
            }
            check_range(t.data().iter().copied().max(), na, &format!("{name}: {what}"))
        };
        check(&dot, "dot")?;
        let ops = actor.signature().binary_ops();
        if star.len() != ops.len() {
            return Err(Error::dims(format!("{name}: star tables"), ops.len(), star.len()));
        }
        for (t, op) in star.iter().zip(ops) {
            check(t, op)?;
        }
        Ok(ActionSet {
            name,
            actor,
            acted,
            dot,
            star,
        })
    }

    /// `b·a = a` and `b * a = 0`.
    pub fn trivial(actor: &Arc<OmegaAlgebra>, acted: &Arc<OmegaAlgebra>) -> Result<Self> {
        let (nb, na) = (actor.order(), acted.order());
        ActionSet::new(
            format!("trivial({},{})", actor.name(), acted.name()),
            actor.clone(),
            acted.clone(),
            Table::from_fn(nb, na, |_, a| a),
            vec![Table::filled(nb, na, 0); actor.signature().binary_ops().len()],
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn actor(&self) -> &Arc<OmegaAlgebra> {
        &self.actor
    }

    pub fn acted(&self) -> &Arc<OmegaAlgebra> {
        &self.acted
    }

    pub fn dot_table(&self) -> &Table {
        &self.dot
    }

    pub fn star_tables(&self) -> &[Table] {
        &self.star
    }

    /// `b·a`
    #[inline]
    pub fn dot(&self, b: usize, a: usize) -> usize {
        self.dot.get(b, a)
    }

    /// `b * a` for the binary operation with index `k`.
    #[inline]
    pub fn star(&self, k: usize, b: usize, a: usize) -> usize {
        self.star[k].get(b, a)
    }

    /// `a * b`, defined as `b *° a`.
    #[inline]
    pub fn star_right(&self, k: usize, a: usize, b: usize) -> usize {
        self.star[self.actor.signature().opposite(k)].get(b, a)
    }
}

/// Conjugation action of an algebra on itself: `x·a = x + a - x`, `x * a` from the algebra.
pub fn conjugation_action(a: &Arc<OmegaAlgebra>) -> ActionSet {
    let n = a.order();
    ActionSet {
        name: format!("conj({})", a.name()),
        actor: a.clone(),
        acted: a.clone(),
        dot: Table::from_fn(n, n, |x, y| a.conj(x, y)),
        star: (0..a.signature().binary_ops().len())
            .map(|k| Table::from_fn(n, n, |x, y| a.op(k, x, y)))
            .collect(),
    }
}

/// Checks conditions D1–D12 for a set of derived actions.
///
/// D12 asks that products commute additively "whenever each side has a
/// sense". Here the products with values in A (`a*a'`, `b*a`, `a*b`) are
/// compared pairwise, and separately those with values in B (`b*b'`); the
/// report carries the [`INTERPRETATION_D12`] note.
pub fn check_derived_action(act: &ActionSet) -> Result<ValidationReport> {
    let a_alg = act.acted.as_ref();
    let b_alg = act.actor.as_ref();
    let (na, nb) = (a_alg.order(), b_alg.order());
    let sig = a_alg.signature();
    let mut r = ValidationReport::new();
    r.notes.push(INTERPRETATION_D12.to_owned());

    first_failure(&mut r, "D1", None, tuples(na, 1), |w| act.dot(0, w[0]) == w[0]);
    first_failure(&mut r, "D2", None, bx(nb, na, 2), |w| {
        let (b, a1, a2) = (w[0], w[1], w[2]);
        act.dot(b, a_alg.add(a1, a2)) == a_alg.add(act.dot(b, a1), act.dot(b, a2))
    });
    first_failure(&mut r, "D3", None, bbx(nb, na, 1), |w| {
        let (b1, b2, a) = (w[0], w[1], w[2]);
        act.dot(b_alg.add(b1, b2), a) == act.dot(b1, act.dot(b2, a))
    });

    for (k, op) in sig.binary_ops().iter().enumerate() {
        let op = Some(op.as_str());
        first_failure(&mut r, "D4", op, bx(nb, na, 2), |w| {
            let (b, a1, a2) = (w[0], w[1], w[2]);
            act.star(k, b, a_alg.add(a1, a2)) == a_alg.add(act.star(k, b, a1), act.star(k, b, a2))
        });
        first_failure(&mut r, "D5", op, bbx(nb, na, 1), |w| {
            let (b1, b2, a) = (w[0], w[1], w[2]);
            act.star(k, b_alg.add(b1, b2), a) == a_alg.add(act.star(k, b1, a), act.star(k, b2, a))
        });
        first_failure(&mut r, "D6", op, bbx(nb, na, 2), |w| {
            let (b1, b2, a1, a2) = (w[0], w[1], w[2], w[3]);
            let p = a_alg.op(k, a1, a2);
            act.dot(b_alg.op(k, b1, b2), p) == p
        });
        first_failure(&mut r, "D7", op, tuples_bbab(nb, na), |w| {
            let (b1, b2, a, b) = (w[0], w[1], w[2], w[3]);
            let p = act.star_right(k, a, b);
            act.dot(b_alg.op(k, b1, b2), p) == p
        });
        first_failure(&mut r, "D8", op, tuples_aba(nb, na), |w| {
            let (a1, b, a2) = (w[0], w[1], w[2]);
            a_alg.op(k, a1, act.dot(b, a2)) == a_alg.op(k, a1, a2)
        });
        first_failure(&mut r, "D9", op, bbx(nb, na, 1), |w| {
            let (b, b1, a) = (w[0], w[1], w[2]);
            act.star(k, b, act.dot(b1, a)) == act.star(k, b, a)
        });
    }

    for (u, uop) in sig.unary_ops().iter().enumerate() {
        first_failure(&mut r, "D10", Some(uop), bx(nb, na, 1), |w| {
            let (b, a) = (w[0], w[1]);
            a_alg.unop(u, act.dot(b, a)) == act.dot(b_alg.unop(u, b), a_alg.unop(u, a))
        });
        for (k, op) in sig.binary_ops().iter().enumerate() {
            first_failure(&mut r, "D11", Some(&format!("{uop},{op}")), tuples_ab(nb, na), |w| {
                let (a, b) = (w[0], w[1]);
                let lhs = a_alg.unop(u, act.star_right(k, a, b));
                lhs == act.star_right(k, a_alg.unop(u, a), b) && lhs == act.star_right(k, a, b_alg.unop(u, b))
            });
        }
    }

    for (k, op) in sig.binary_ops().iter().enumerate() {
        check_d12(act, k, op, &mut r);
    }
    Ok(r)
}

/// Kinds of the factors in a D12 product, used in witness notes.
#[derive(Clone, Copy)]
enum Side {
    A,
    B,
}

fn check_d12(act: &ActionSet, k: usize, op: &str, r: &mut ValidationReport) {
    let a_alg = act.acted.as_ref();
    let b_alg = act.actor.as_ref();
    let (na, nb) = (a_alg.order(), b_alg.order());

    // Distinct product values in A, each with its first (x, y) witness.
    let mut a_values: Vec<Option<(usize, usize, Side, Side)>> = vec![None; na];
    let mut note_a = |v: usize, w: (usize, usize, Side, Side)| {
        if a_values[v].is_none() {
            a_values[v] = Some(w);
        }
    };
    for x in 0..na {
        for y in 0..na {
            note_a(a_alg.op(k, x, y), (x, y, Side::A, Side::A));
        }
        for y in 0..nb {
            note_a(act.star_right(k, x, y), (x, y, Side::A, Side::B));
        }
    }
    for x in 0..nb {
        for y in 0..na {
            note_a(act.star(k, x, y), (x, y, Side::B, Side::A));
        }
    }
    let mut b_values: Vec<Option<(usize, usize, Side, Side)>> = vec![None; nb];
    for x in 0..nb {
        for y in 0..nb {
            let v = b_alg.op(k, x, y);
            if b_values[v].is_none() {
                b_values[v] = Some((x, y, Side::B, Side::B));
            }
        }
    }

    let scan = |values: &[Option<(usize, usize, Side, Side)>], alg: &OmegaAlgebra| {
        let present: Vec<(usize, (usize, usize, Side, Side))> = values
            .iter()
            .enumerate()
            .filter_map(|(v, w)| w.map(|w| (v, w)))
            .collect();
        for (p, wp) in &present {
            for (q, wq) in &present {
                if alg.add(*p, *q) != alg.add(*q, *p) {
                    return Some((*wp, *wq));
                }
            }
        }
        None
    };
    let failure = scan(&a_values, a_alg).or_else(|| scan(&b_values, b_alg));
    if let Some(((x, y, sx, sy), (z, t, sz, st))) = failure {
        let side = |s: Side| match s {
            Side::A => "A",
            Side::B => "B",
        };
        r.push_note(
            "D12",
            Some(op),
            vec![x, y, z, t],
            format!(
                "x∈{} y∈{} z∈{} t∈{}; {}",
                side(sx),
                side(sy),
                side(sz),
                side(st),
                INTERPRETATION_D12
            ),
        );
    }
}

// Witness spaces: b-indices range over |B|, a-indices over |A|.
fn bx(nb: usize, na: usize, a_count: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut bounds = vec![nb];
    bounds.extend(std::iter::repeat_n(na, a_count));
    crate::algebra::tuples_mixed(bounds)
}

fn bbx(nb: usize, na: usize, a_count: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut bounds = vec![nb, nb];
    bounds.extend(std::iter::repeat_n(na, a_count));
    crate::algebra::tuples_mixed(bounds)
}

fn tuples_bbab(nb: usize, na: usize) -> impl Iterator<Item = Vec<usize>> {
    crate::algebra::tuples_mixed(vec![nb, nb, na, nb])
}

fn tuples_aba(nb: usize, na: usize) -> impl Iterator<Item = Vec<usize>> {
    crate::algebra::tuples_mixed(vec![na, nb, na])
}

fn tuples_ab(nb: usize, na: usize) -> impl Iterator<Item = Vec<usize>> {
    crate::algebra::tuples_mixed(vec![na, nb])
}

/// Index of the pair `(a, b)` in a semidirect product with `|B| = nb`.
#[inline]
pub fn pair_index(a: usize, b: usize, nb: usize) -> usize {
    a * nb + b
}

/// Inverse of [`pair_index`].
#[inline]
pub fn unpair(x: usize, nb: usize) -> (usize, usize) {
    (x / nb, x % nb)
}

/// Builds `A ⋊ B` from any candidate action and reports its validity.
///
/// `(a,b) + (a₁,b₁) = (a + b·a₁, b + b₁)`,
/// `(a,b) * (a₁,b₁) = (a*a₁ + a*b₁ + b*a₁, b*b₁)`, unary operations act
/// componentwise. The report is valid exactly when the action is a set of
/// derived actions.
pub fn semidirect_product(act: &ActionSet) -> Result<(AlgebraTables, ValidationReport)> {
    let a_alg = act.acted.as_ref();
    let b_alg = act.actor.as_ref();
    let nb = b_alg.order();
    let n = a_alg.order() * nb;
    let sig = a_alg.signature();
    let pairwise = |f: &dyn Fn(usize, usize, usize, usize) -> (usize, usize)| {
        Table::from_fn(n, n, |x, y| {
            let ((a, b), (a1, b1)) = (unpair(x, nb), unpair(y, nb));
            let (p, q) = f(a, b, a1, b1);
            pair_index(p, q, nb)
        })
    };
    let add = pairwise(&|a, b, a1, b1| (a_alg.add(a, act.dot(b, a1)), b_alg.add(b, b1)));
    let neg = (0..n)
        .map(|x| {
            let (a, b) = unpair(x, nb);
            let nb_ = b_alg.neg(b);
            pair_index(act.dot(nb_, a_alg.neg(a)), nb_, nb)
        })
        .collect();
    let binary = (0..sig.binary_ops().len())
        .map(|k| {
            pairwise(&|a, b, a1, b1| {
                let first = a_alg.add(a_alg.op(k, a, a1), act.star_right(k, a, b1));
                (a_alg.add(first, act.star(k, b, a1)), b_alg.op(k, b, b1))
            })
        })
        .collect();
    let unary = (0..sig.unary_ops().len())
        .map(|u| {
            (0..n)
                .map(|x| {
                    let (a, b) = unpair(x, nb);
                    pair_index(a_alg.unop(u, a), b_alg.unop(u, b), nb)
                })
                .collect()
        })
        .collect();
    let tables = AlgebraTables {
        name: format!("{}⋊{}", a_alg.name(), b_alg.name()),
        signature: sig.clone(),
        order: n,
        add,
        neg,
        binary,
        unary,
    };
    let report = crate::algebra::validate_algebra(&tables)?;
    Ok((tables, report))
}

/// The semidirect product of a set of derived actions as a validated algebra.
pub fn semidirect_algebra(act: &ActionSet) -> Result<Arc<OmegaAlgebra>> {
    let (tables, report) = semidirect_product(act)?;
    if !report.is_valid() {
        return Err(Error::InvalidAlgebra {
            name: tables.name,
            report,
        });
    }
    Ok(Arc::new(OmegaAlgebra::new(tables)?))
}

/// A split extension `A → E → B` with section `s`.
#[derive(Clone, Debug)]
pub struct SplitExtension {
    pub inclusion: AlgMorphism,
    pub projection: AlgMorphism,
    pub section: AlgMorphism,
}

impl SplitExtension {
    /// Checks that `p∘s = 1`, that `p` is onto and that `i` is the kernel of `p`.
    pub fn new(inclusion: AlgMorphism, projection: AlgMorphism, section: AlgMorphism) -> Result<Self> {
        let e = projection.source();
        if inclusion.target() != e || section.target() != e || section.source() != projection.target() {
            return Err(Error::NotComposable("split extension maps do not line up".into()));
        }
        for b in projection.target().elements() {
            if projection.apply(section.apply(b)) != b {
                return Err(Error::NotASection(b));
            }
        }
        if !inclusion.is_injective() {
            return Err(Error::NotKernel("inclusion is not injective".into()));
        }
        let mut image: Vec<usize> = inclusion.map().to_vec();
        image.sort_unstable();
        let kernel: Vec<usize> = e.elements().filter(|&x| projection.apply(x) == 0).collect();
        if image != kernel {
            return Err(Error::NotKernel(format!(
                "image has {} elements, kernel has {}",
                image.len(),
                kernel.len()
            )));
        }
        Ok(SplitExtension {
            inclusion,
            projection,
            section,
        })
    }

    /// `A → A⋊B → B` with `i(a) = (a,0)`, `p(a,b) = b` and `s(b) = (0,b)`.
    pub fn canonical(act: &ActionSet) -> Result<Self> {
        let e = semidirect_algebra(act)?;
        let nb = act.actor.order();
        let inclusion = AlgMorphism::new(
            act.acted.clone(),
            e.clone(),
            act.acted.elements().map(|a| pair_index(a, 0, nb)).collect(),
        )?;
        let projection = AlgMorphism::new(e.clone(), act.actor.clone(), e.elements().map(|x| x % nb).collect())?;
        let section = AlgMorphism::new(act.actor.clone(), e, act.actor.elements().collect())?;
        SplitExtension::new(inclusion, projection, section)
    }

    /// Same extension with another section of the projection.
    pub fn with_section(&self, section: AlgMorphism) -> Result<Self> {
        SplitExtension::new(self.inclusion.clone(), self.projection.clone(), section)
    }
}

/// Derived actions of a split extension: `b·a = s(b) + a - s(b)`, `b*a = s(b)*a`.
pub fn action_from_section(ext: &SplitExtension) -> Result<ActionSet> {
    let e = ext.projection.source();
    let a_alg = ext.inclusion.source();
    let b_alg = ext.projection.target();
    let mut back = vec![usize::MAX; e.order()];
    for (a, &x) in ext.inclusion.map().iter().enumerate() {
        back[x] = a;
    }
    let pull = |x: usize| -> Result<usize> {
        match back[x] {
            usize::MAX => Err(Error::NotKernel(format!("element {x} of E is not in the image of A"))),
            a => Ok(a),
        }
    };
    let (nb, na) = (b_alg.order(), a_alg.order());
    let mut dot = Vec::with_capacity(nb * na);
    for b in 0..nb {
        let sb = ext.section.apply(b);
        for a in 0..na {
            dot.push(pull(e.conj(sb, ext.inclusion.apply(a)))?);
        }
    }
    let mut star = Vec::new();
    for k in 0..e.signature().binary_ops().len() {
        let mut t = Vec::with_capacity(nb * na);
        for b in 0..nb {
            let sb = ext.section.apply(b);
            for a in 0..na {
                t.push(pull(e.op(k, sb, ext.inclusion.apply(a)))?);
            }
        }
        star.push(Table::new(nb, na, t)?);
    }
    ActionSet::new(
        format!("section-action({})", e.name()),
        b_alg.clone(),
        a_alg.clone(),
        Table::new(nb, na, dot)?,
        star,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn z(n: usize) -> Arc<OmegaAlgebra> {
        Arc::new(catalog::cyclic_group(n))
    }

    #[test]
    fn trivial_action_is_derived() {
        let act = ActionSet::trivial(&z(2), &z(2)).unwrap();
        assert!(check_derived_action(&act).unwrap().is_valid());
    }

    #[test]
    fn zero_acting_nontrivially_violates_d1() {
        let dot = Table::from_rows(vec![vec![0, 0], vec![0, 1]], 2).unwrap();
        let act = ActionSet::new("bad", z(2), z(2), dot, vec![]).unwrap();
        let r = check_derived_action(&act).unwrap();
        assert_eq!(r.first("D1").unwrap().witness, vec![1]);
    }

    #[test]
    fn conjugation_is_derived() {
        for g in [catalog::symmetric3(), catalog::dihedral4(), catalog::ring_zn(4)] {
            let g = Arc::new(g);
            assert!(check_derived_action(&conjugation_action(&g)).unwrap().is_valid());
        }
    }

    #[test]
    fn conjugation_on_abelian_is_projection() {
        let act = conjugation_action(&z(4));
        for x in 0..4 {
            for a in 0..4 {
                assert_eq!(act.dot(x, a), a);
            }
        }
    }

    #[test]
    fn trivial_action_gives_direct_product() {
        let act = ActionSet::trivial(&z(2), &z(2)).unwrap();
        let (t, r) = semidirect_product(&act).unwrap();
        assert!(r.is_valid());
        let direct = crate::algebra::direct_product(&z(2), &z(2), "z2xz2").unwrap();
        assert_eq!(t.add, direct.tables().add);
        let v4 = Arc::new(catalog::klein_four());
        let e = Arc::new(OmegaAlgebra::new(t).unwrap());
        assert!(crate::algebra::find_isomorphism(&e, &v4, 1000).unwrap().is_some());
    }

    #[test]
    fn s3_conjugation_semidirect_has_order_36() {
        let s3 = Arc::new(catalog::symmetric3());
        let (t, r) = semidirect_product(&conjugation_action(&s3)).unwrap();
        assert_eq!(t.order, 36);
        assert!(r.is_valid());
    }

    #[test]
    fn canonical_section_recovers_action() {
        let s3 = Arc::new(catalog::symmetric3());
        let act = conjugation_action(&s3);
        let ext = SplitExtension::canonical(&act).unwrap();
        assert_eq!(action_from_section(&ext).unwrap(), act);
    }

    #[test]
    fn direct_product_section_gives_trivial_ring_action() {
        let r2 = Arc::new(catalog::zero_ring(2));
        let act = ActionSet::trivial(&r2, &r2).unwrap();
        let ext = SplitExtension::canonical(&act).unwrap();
        let back = action_from_section(&ext).unwrap();
        assert!(back.dot_table().data().chunks(2).all(|row| row == [0, 1]));
        assert!(back.star_tables()[0].data().iter().all(|&x| x == 0));
    }

    #[test]
    fn bad_section_is_rejected() {
        let act = ActionSet::trivial(&z(2), &z(2)).unwrap();
        let ext = SplitExtension::canonical(&act).unwrap();
        let zero = AlgMorphism::zero(&z(2), ext.projection.source()).unwrap();
        assert!(matches!(ext.with_section(zero), Err(Error::NotASection(1))));
    }
}
