//! Internal groupoids in a category of groups with operations, and the
//! functors `delta` (crossed module → groupoid) and `theta` (groupoid →
//! crossed module) with their round-trip isomorphisms.
//!
//! Composition is never stored. For arrows `a: x → y` and `b: y → z` it is
//! forced to be `b ∘ a = b - ε(y) + a`, and validation checks that this
//! formula is a morphism on the set of composable pairs.

use std::sync::Arc;

use crate::action::{pair_index, semidirect_algebra, unpair, ActionSet};
use crate::algebra::{check_morphism, direct_product, kernel_of, AlgMorphism, OmegaAlgebra, Table};
use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::xmod::{check_xmod_morphism, CrossedModule, XModMorphism};

#[derive(Clone, Debug)]
pub struct InternalGroupoid {
    name: String,
    d0: AlgMorphism,
    d1: AlgMorphism,
    eps: AlgMorphism,
}

impl PartialEq for InternalGroupoid {
    fn eq(&self, other: &Self) -> bool {
        self.d0 == other.d0 && self.d1 == other.d1 && self.eps == other.eps
    }
}

impl Eq for InternalGroupoid {}

/// `b ∘ a = b - ε(d₁a) + a` on raw tables.
fn raw_compose(c1: &OmegaAlgebra, d1: &[usize], eps: &[usize], b: usize, a: usize) -> usize {
    c1.add(c1.sub(b, eps[d1[a]]), a)
}

/// `a⁻¹ = ε(d₁a) - a + ε(d₀a)`.
fn raw_inverse(c1: &OmegaAlgebra, d0: &[usize], d1: &[usize], eps: &[usize], a: usize) -> usize {
    c1.add(c1.sub(eps[d1[a]], a), eps[d0[a]])
}

/// Checks the structure maps, the category laws of the derived composition,
/// the interchange law with every operation, and the inverse formula.
pub fn validate_groupoid(
    c1: &OmegaAlgebra,
    c0: &OmegaAlgebra,
    d0: &[usize],
    d1: &[usize],
    eps: &[usize],
) -> Result<ValidationReport> {
    c1.same_signature(c0)?;
    let mut r = ValidationReport::new();
    r.absorb("d0:", check_morphism(d0, c1, c0)?);
    r.absorb("d1:", check_morphism(d1, c1, c0)?);
    r.absorb("eps:", check_morphism(eps, c0, c1)?);

    if let Some(x) = c0.elements().find(|&x| d0[eps[x]] != x || d1[eps[x]] != x) {
        r.push("eps-section", None, vec![x]);
    }

    let comp = |b: usize, a: usize| raw_compose(c1, d1, eps, b, a);
    let pairs = composable_pairs(c1, d0, d1);

    if let Some(&(b, a)) = pairs.iter().find(|&&(b, a)| {
        let ba = comp(b, a);
        d0[ba] != d0[a] || d1[ba] != d1[b]
    }) {
        r.push("comp-endpoints", None, vec![b, a]);
    }
    if let Some(a) = c1
        .elements()
        .find(|&a| comp(a, eps[d0[a]]) != a || comp(eps[d1[a]], a) != a)
    {
        r.push("comp-identity", None, vec![a]);
    }
    'assoc: for &(b, a) in &pairs {
        for c in c1.elements().filter(|&c| d0[c] == d1[b]) {
            if comp(c, comp(b, a)) != comp(comp(c, b), a) {
                r.push("comp-associativity", None, vec![c, b, a]);
                break 'assoc;
            }
        }
    }

    // Interchange: composition preserves every operation on composable pairs.
    let mut interchange = |rule: &str, op: Option<&str>, f: &dyn Fn(usize, usize) -> usize| {
        for &(b, a) in &pairs {
            for &(b2, a2) in &pairs {
                let (bb, aa) = (f(b, b2), f(a, a2));
                if d0[bb] != d1[aa] {
                    continue;
                }
                if comp(bb, aa) != f(comp(b, a), comp(b2, a2)) {
                    r.push(rule, op, vec![b, a, b2, a2]);
                    return;
                }
            }
        }
    };
    interchange("interchange", Some("+"), &|x, y| c1.add(x, y));
    for (k, op) in c1.signature().binary_ops().iter().enumerate() {
        interchange("interchange", Some(op), &|x, y| c1.op(k, x, y));
    }
    for (u, op) in c1.signature().unary_ops().iter().enumerate() {
        if let Some(&(b, a)) = pairs.iter().find(|&&(b, a)| {
            let (ub, ua) = (c1.unop(u, b), c1.unop(u, a));
            d0[ub] == d1[ua] && comp(ub, ua) != c1.unop(u, comp(b, a))
        }) {
            r.push("interchange-unary", Some(op), vec![b, a]);
        }
    }

    if let Some(a) = c1.elements().find(|&a| {
        let inv = raw_inverse(c1, d0, d1, eps, a);
        d0[inv] != d1[a] || d1[inv] != d0[a] || comp(inv, a) != eps[d0[a]] || comp(a, inv) != eps[d1[a]]
    }) {
        r.push("inverse", None, vec![a]);
    }
    Ok(r)
}

/// Pairs `(b, a)` with `d₁a = d₀b`, in lexicographic order.
fn composable_pairs(c1: &OmegaAlgebra, d0: &[usize], d1: &[usize]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for b in c1.elements() {
        for a in c1.elements() {
            if d1[a] == d0[b] {
                pairs.push((b, a));
            }
        }
    }
    pairs
}

impl InternalGroupoid {
    pub fn new(name: impl Into<String>, d0: AlgMorphism, d1: AlgMorphism, eps: AlgMorphism) -> Result<Self> {
        let (c1, c0) = (d0.source().clone(), d0.target().clone());
        if d1.source() != &c1 || d1.target() != &c0 || eps.source() != &c0 || eps.target() != &c1 {
            return Err(Error::SignatureMismatch("groupoid structure maps do not line up".into()));
        }
        let report = validate_groupoid(&c1, &c0, d0.map(), d1.map(), eps.map())?;
        if !report.is_valid() {
            return Err(Error::InvalidGroupoid(report));
        }
        Ok(InternalGroupoid {
            name: name.into(),
            d0,
            d1,
            eps,
        })
    }

    /// Builds from raw maps, validating everything.
    pub fn from_tables(
        name: impl Into<String>,
        c1: Arc<OmegaAlgebra>,
        c0: Arc<OmegaAlgebra>,
        d0: Vec<usize>,
        d1: Vec<usize>,
        eps: Vec<usize>,
    ) -> Result<Self> {
        let report = validate_groupoid(&c1, &c0, &d0, &d1, &eps)?;
        if !report.is_valid() {
            return Err(Error::InvalidGroupoid(report));
        }
        Ok(InternalGroupoid {
            name: name.into(),
            d0: AlgMorphism::new_unchecked(c1.clone(), c0.clone(), d0),
            d1: AlgMorphism::new_unchecked(c1.clone(), c0.clone(), d1),
            eps: AlgMorphism::new_unchecked(c0, c1, eps),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Object of arrows.
    pub fn c1(&self) -> &Arc<OmegaAlgebra> {
        self.d0.source()
    }

    /// Object of objects.
    pub fn c0(&self) -> &Arc<OmegaAlgebra> {
        self.d0.target()
    }

    pub fn d0(&self) -> &AlgMorphism {
        &self.d0
    }

    pub fn d1(&self) -> &AlgMorphism {
        &self.d1
    }

    pub fn eps(&self) -> &AlgMorphism {
        &self.eps
    }

    /// `b ∘ a` (first `a`, then `b`), defined when `d₁a = d₀b`.
    pub fn compose(&self, b: usize, a: usize) -> Option<usize> {
        (self.d1.apply(a) == self.d0.apply(b)).then(|| raw_compose(self.c1(), self.d1.map(), self.eps.map(), b, a))
    }

    pub fn inverse(&self, a: usize) -> usize {
        raw_inverse(self.c1(), self.d0.map(), self.d1.map(), self.eps.map(), a)
    }

    pub fn identity_arrow(&self, x: usize) -> usize {
        self.eps.apply(x)
    }

    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        composable_pairs(self.c1(), self.d0.map(), self.d1.map())
    }
}

/// The pair groupoid `A × A`: the arrow `(x, y)` runs from `x` to `y`.
pub fn pair_groupoid(a: &Arc<OmegaAlgebra>) -> Result<InternalGroupoid> {
    let n = a.order();
    let c1 = Arc::new(direct_product(a, a, format!("{0}×{0}", a.name()))?);
    let d0 = AlgMorphism::new(c1.clone(), a.clone(), c1.elements().map(|p| p / n).collect())?;
    let d1 = AlgMorphism::new(c1.clone(), a.clone(), c1.elements().map(|p| p % n).collect())?;
    let eps = AlgMorphism::new(a.clone(), c1, a.elements().map(|x| x * n + x).collect())?;
    InternalGroupoid::new(format!("pair({})", a.name()), d0, d1, eps)
}

/// Groupoid of a crossed module: arrows `A⋊B`, objects `B`,
/// `d₀(a,b) = b`, `d₁(a,b) = α(a) + b`, `ε(b) = (0,b)`.
pub fn delta(x: &CrossedModule) -> Result<InternalGroupoid> {
    let c1 = semidirect_algebra(x.action())?;
    let b = x.b().clone();
    let nb = b.order();
    let alpha = x.alpha();
    let d0 = c1.elements().map(|p| unpair(p, nb).1).collect();
    let d1 = c1
        .elements()
        .map(|p| {
            let (a, bb) = unpair(p, nb);
            b.add(alpha.apply(a), bb)
        })
        .collect();
    let eps = b.elements().map(|bb| pair_index(0, bb, nb)).collect();
    InternalGroupoid::from_tables(format!("delta({})", x.name()), c1, b, d0, d1, eps).map_err(|e| match e {
        Error::InvalidGroupoid(r) => Error::InternalInconsistency(format!(
            "delta of a valid crossed module failed groupoid validation: {r}"
        )),
        e => e,
    })
}

/// The composite `(a₁,b₁) ∘ (a,b)` computed by the closed formula
/// `(a₁ + a, b)` for arrows of a delta-image, `(a,b)` first.
pub fn delta_closed_composition(nb: usize, a_alg: &OmegaAlgebra, second: usize, first: usize) -> usize {
    let (a1, _) = unpair(second, nb);
    let (a, b) = unpair(first, nb);
    pair_index(a_alg.add(a1, a), b, nb)
}

/// Crossed module of a groupoid: `(ker d₀, C₀, d₁|ker d₀)` with
/// `x·a = ε(x) + a - ε(x)` and `x * a = ε(x) * a`.
pub fn theta(g: &InternalGroupoid) -> Result<CrossedModule> {
    let (ker, incl) = kernel_of(g.d0())?;
    let c1 = g.c1();
    let c0 = g.c0().clone();
    let mut back = vec![usize::MAX; c1.order()];
    for (k, &x) in incl.map().iter().enumerate() {
        back[x] = k;
    }
    let pull = |x: usize| -> Result<usize> {
        match back[x] {
            usize::MAX => Err(Error::InternalInconsistency(format!(
                "arrow {x} should lie in ker d0"
            ))),
            k => Ok(k),
        }
    };
    let (n0, nk) = (c0.order(), ker.order());
    let mut dot = Vec::with_capacity(n0 * nk);
    for x in 0..n0 {
        for k in 0..nk {
            dot.push(pull(c1.conj(g.eps().apply(x), incl.apply(k)))?);
        }
    }
    let mut star = Vec::new();
    for op in 0..c1.signature().binary_ops().len() {
        let mut t = Vec::with_capacity(n0 * nk);
        for x in 0..n0 {
            for k in 0..nk {
                t.push(pull(c1.op(op, g.eps().apply(x), incl.apply(k)))?);
            }
        }
        star.push(Table::new(n0, nk, t)?);
    }
    let action = ActionSet::new(
        format!("theta-action({})", g.name()),
        c0.clone(),
        ker.clone(),
        Table::new(n0, nk, dot)?,
        star,
    )?;
    let alpha = incl.map().iter().map(|&x| g.d1().apply(x)).collect();
    CrossedModule::from_tables(format!("theta({})", g.name()), alpha, action).map_err(|e| match e {
        Error::InvalidCrossedModule(r) => Error::InternalInconsistency(format!(
            "theta of a valid groupoid failed crossed-module validation: {r}"
        )),
        e => e,
    })
}

/// A functor between internal groupoids whose components are morphisms.
#[derive(Clone, Debug)]
pub struct InternalFunctor {
    source: Arc<InternalGroupoid>,
    target: Arc<InternalGroupoid>,
    f1: AlgMorphism,
    f0: AlgMorphism,
}

impl PartialEq for InternalFunctor {
    fn eq(&self, other: &Self) -> bool {
        self.f1.map() == other.f1.map()
            && self.f0.map() == other.f0.map()
            && self.source == other.source
            && self.target == other.target
    }
}

impl Eq for InternalFunctor {}

/// Checks that `(F₁, F₀)` are morphisms commuting with `d₀`, `d₁`, `ε` and
/// preserving composition.
pub fn check_internal_functor(
    source: &InternalGroupoid,
    target: &InternalGroupoid,
    f1: &[usize],
    f0: &[usize],
) -> Result<ValidationReport> {
    let mut r = ValidationReport::new();
    r.absorb("F1:", check_morphism(f1, source.c1(), target.c1())?);
    r.absorb("F0:", check_morphism(f0, source.c0(), target.c0())?);
    for (rule, s, t) in [("d0-square", source.d0(), target.d0()), ("d1-square", source.d1(), target.d1())] {
        if let Some(a) = source.c1().elements().find(|&a| f0[s.apply(a)] != t.apply(f1[a])) {
            r.push(rule, None, vec![a]);
        }
    }
    if let Some(x) = source.c0().elements().find(|&x| f1[source.eps().apply(x)] != target.eps().apply(f0[x])) {
        r.push("eps-square", None, vec![x]);
    }
    if let Some((b, a)) = source.composable_pairs().into_iter().find(|&(b, a)| {
        let ba = source.compose(b, a).expect("composable");
        target.compose(f1[b], f1[a]) != Some(f1[ba])
    }) {
        r.push("composition", None, vec![b, a]);
    }
    Ok(r)
}

impl InternalFunctor {
    pub fn new(source: Arc<InternalGroupoid>, target: Arc<InternalGroupoid>, f1: Vec<usize>, f0: Vec<usize>) -> Result<Self> {
        let report = check_internal_functor(&source, &target, &f1, &f0)?;
        if !report.is_valid() {
            return Err(Error::InvalidFunctor(report));
        }
        let f1 = AlgMorphism::new_unchecked(source.c1().clone(), target.c1().clone(), f1);
        let f0 = AlgMorphism::new_unchecked(source.c0().clone(), target.c0().clone(), f0);
        Ok(InternalFunctor { source, target, f1, f0 })
    }

    pub fn identity(g: &Arc<InternalGroupoid>) -> Self {
        InternalFunctor {
            source: g.clone(),
            target: g.clone(),
            f1: AlgMorphism::identity(g.c1()),
            f0: AlgMorphism::identity(g.c0()),
        }
    }

    pub fn source(&self) -> &Arc<InternalGroupoid> {
        &self.source
    }

    pub fn target(&self) -> &Arc<InternalGroupoid> {
        &self.target
    }

    pub fn f1(&self) -> &AlgMorphism {
        &self.f1
    }

    pub fn f0(&self) -> &AlgMorphism {
        &self.f0
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &InternalFunctor) -> Result<InternalFunctor> {
        if first.target != self.source {
            return Err(Error::NotComposable("functor endpoints differ".into()));
        }
        let f1 = self.f1.compose(&first.f1)?;
        let f0 = self.f0.compose(&first.f0)?;
        InternalFunctor::new(first.source.clone(), self.target.clone(), f1.map().to_vec(), f0.map().to_vec())
    }

    pub fn is_bijective(&self) -> bool {
        self.f1.is_bijective() && self.f0.is_bijective()
    }
}

/// Image of a crossed-module morphism: `f₁ × f₀` on arrows, `f₀` on objects.
pub fn delta_morphism(
    f: &XModMorphism,
    source: &Arc<InternalGroupoid>,
    target: &Arc<InternalGroupoid>,
) -> Result<InternalFunctor> {
    let nb = f.source().b().order();
    let nd = f.target().b().order();
    let f1 = source
        .c1()
        .elements()
        .map(|p| {
            let (a, b) = unpair(p, nb);
            pair_index(f.f1().apply(a), f.f0().apply(b), nd)
        })
        .collect();
    InternalFunctor::new(source.clone(), target.clone(), f1, f.f0().map().to_vec())
}

/// Canonical isomorphism `x → theta(delta(x))`, `a ↦ (a,0)`, verified both ways.
pub fn roundtrip_xmod(x: &Arc<CrossedModule>) -> Result<XModMorphism> {
    let g = delta(x)?;
    let y = Arc::new(theta(&g)?);
    let nb = x.b().order();
    // ker d0 = {(a,0)} and kernel_of keeps the order of pair indices a·|B|.
    let ker_index: Vec<usize> = {
        let mut idx = vec![usize::MAX; g.c1().order()];
        let mut k = 0;
        for p in g.c1().elements() {
            if g.d0().apply(p) == 0 {
                idx[p] = k;
                k += 1;
            }
        }
        idx
    };
    let f1: Vec<usize> = x.a().elements().map(|a| ker_index[pair_index(a, 0, nb)]).collect();
    let f0: Vec<usize> = x.b().elements().collect();
    let fail = |what: &str, r: ValidationReport| Error::RoundTripFailure(format!("{what}: {r}"));
    let report = check_xmod_morphism(x, &y, &f1, &f0)?;
    if !report.is_valid() {
        return Err(fail("x → theta(delta(x))", report));
    }
    let forward = XModMorphism::new(x.clone(), y, f1, f0)?;
    if !forward.is_bijective() {
        return Err(Error::RoundTripFailure("x → theta(delta(x)) is not bijective".into()));
    }
    match forward.inverse() {
        Some(Ok(_)) => Ok(forward),
        Some(Err(Error::InvalidXModMorphism(r))) => Err(fail("theta(delta(x)) → x", r)),
        Some(Err(e)) => Err(e),
        None => Err(Error::RoundTripFailure("inverse does not exist".into())),
    }
}

/// Canonical isomorphism `g → delta(theta(g))`, `c ↦ (c - ε(d₀c), d₀c)`.
pub fn roundtrip_groupoid(g: &Arc<InternalGroupoid>) -> Result<InternalFunctor> {
    let x = theta(g)?;
    let h = Arc::new(delta(&x)?);
    let n0 = g.c0().order();
    let mut ker_index = vec![usize::MAX; g.c1().order()];
    let mut k = 0;
    for c in g.c1().elements() {
        if g.d0().apply(c) == 0 {
            ker_index[c] = k;
            k += 1;
        }
    }
    let c1 = g.c1();
    let mut f1 = Vec::with_capacity(c1.order());
    for c in c1.elements() {
        let x0 = g.d0().apply(c);
        let kernel_part = c1.sub(c, g.eps().apply(x0));
        let idx = ker_index[kernel_part];
        if idx == usize::MAX {
            return Err(Error::RoundTripFailure(format!("c - ε(d₀c) not in ker d₀ at c = {c}")));
        }
        f1.push(pair_index(idx, x0, n0));
    }
    let f0: Vec<usize> = g.c0().elements().collect();
    let report = check_internal_functor(g, &h, &f1, &f0)?;
    if !report.is_valid() {
        return Err(Error::RoundTripFailure(format!("g → delta(theta(g)): {report}")));
    }
    let forward = InternalFunctor::new(g.clone(), h.clone(), f1, f0)?;
    if !forward.is_bijective() {
        return Err(Error::RoundTripFailure("g → delta(theta(g)) is not bijective".into()));
    }
    let inv1 = forward.f1().inverse().expect("bijective");
    let inv0 = forward.f0().inverse().expect("bijective");
    let back = check_internal_functor(&h, g, inv1.map(), inv0.map())?;
    if !back.is_valid() {
        return Err(Error::RoundTripFailure(format!("delta(theta(g)) → g: {back}")));
    }
    Ok(forward)
}
