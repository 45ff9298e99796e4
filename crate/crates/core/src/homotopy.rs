//! Homotopies of crossed-module morphisms and natural isomorphisms of
//! internal-groupoid functors, with conversions between them and
//! 2-categorical composition.
//!
//! Direction convention: a homotopy `d: f ⇒ g` corresponds to the natural
//! isomorphism whose component `V(b) = (d(b), f₀(b))` is an arrow from
//! `f₀(b)` to `g₀(b)`.

use std::sync::Arc;

use crate::action::{pair_index, unpair};
use crate::algebra::{check_morphism, check_range, tuples, tuples_mixed};
use crate::error::{Error, Result};
use crate::groupoid::{delta, delta_morphism, InternalFunctor, InternalGroupoid};
use crate::report::{first_failure, ValidationReport};
use crate::xmod::{compose_xmod_morphisms, CrossedModule, XModMorphism};

/// A validated homotopy `d: from ⇒ to` with `d: B → C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XModHomotopy {
    from: XModMorphism,
    to: XModMorphism,
    d: Vec<usize>,
}

fn parallel(f: &XModMorphism, g: &XModMorphism) -> Result<()> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::EndpointMismatch(
            "the two crossed-module morphisms are not parallel".into(),
        ));
    }
    Ok(())
}

/// Checks conditions H-i to H-v for `d: f ⇒ g`.
pub fn validate_xmod_homotopy(f: &XModMorphism, g: &XModMorphism, d: &[usize]) -> Result<ValidationReport> {
    parallel(f, g)?;
    let x = f.source();
    let y = f.target();
    let (b_alg, c_alg, dd_alg) = (x.b(), y.a(), y.b());
    if d.len() != b_alg.order() {
        return Err(Error::dims("homotopy table", b_alg.order(), d.len()));
    }
    check_range(d.iter().copied().max(), c_alg.order(), "homotopy table")?;
    let act = y.action();
    let (f1, f0, g1, g0) = (f.f1(), f.f0(), g.f1(), g.f0());
    let gamma = y.alpha();
    let nb = b_alg.order();
    let mut r = ValidationReport::new();

    first_failure(&mut r, "H-i", None, tuples(nb, 2), |w| {
        let (b, b1) = (w[0], w[1]);
        d[b_alg.add(b, b1)] == c_alg.add(d[b], act.dot(f0.apply(b), d[b1]))
    });
    for (k, op) in b_alg.signature().binary_ops().iter().enumerate() {
        first_failure(&mut r, "H-ii", Some(op), tuples(nb, 2), |w| {
            let (b, b1) = (w[0], w[1]);
            let rhs = c_alg.add(
                c_alg.add(c_alg.op(k, d[b], d[b1]), act.star_right(k, d[b], f0.apply(b1))),
                act.star(k, f0.apply(b), d[b1]),
            );
            d[b_alg.op(k, b, b1)] == rhs
        });
    }
    for (u, op) in b_alg.signature().unary_ops().iter().enumerate() {
        first_failure(&mut r, "H-iii", Some(op), tuples(nb, 1), |w| {
            d[b_alg.unop(u, w[0])] == c_alg.unop(u, d[w[0]])
        });
    }
    first_failure(&mut r, "H-iv", None, tuples(nb, 1), |w| {
        let b = w[0];
        gamma.apply(d[b]) == dd_alg.sub(g0.apply(b), f0.apply(b))
    });
    first_failure(&mut r, "H-v", None, tuples(x.a().order(), 1), |w| {
        let a = w[0];
        d[x.alpha().apply(a)] == c_alg.sub(g1.apply(a), f1.apply(a))
    });
    Ok(r)
}

impl XModHomotopy {
    pub fn new(from: XModMorphism, to: XModMorphism, d: Vec<usize>) -> Result<Self> {
        let report = validate_xmod_homotopy(&from, &to, &d)?;
        if !report.is_valid() {
            return Err(Error::InvalidHomotopy(report));
        }
        Ok(XModHomotopy { from, to, d })
    }

    /// The zero homotopy `f ⇒ f`.
    pub fn zero(f: &XModMorphism) -> Self {
        XModHomotopy {
            from: f.clone(),
            to: f.clone(),
            d: vec![0; f.source().b().order()],
        }
    }

    pub fn from(&self) -> &XModMorphism {
        &self.from
    }

    pub fn to(&self) -> &XModMorphism {
        &self.to
    }

    pub fn d(&self) -> &[usize] {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|&c| c == 0)
    }
}

/// A natural isomorphism `η: f ⇒ g` between internal functors with `η: G₀ → H₁`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupoidHomotopy {
    source: InternalFunctor,
    target: InternalFunctor,
    eta: Vec<usize>,
}

/// Checks that `η` is a morphism in the ambient category, that `η(x)` runs
/// from `f₀(x)` to `g₀(x)`, and naturality `g(u) ∘ η(x) = η(y) ∘ f(u)` for
/// every arrow `u: x → y`.
pub fn validate_groupoid_homotopy(f: &InternalFunctor, g: &InternalFunctor, eta: &[usize]) -> Result<ValidationReport> {
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::EndpointMismatch("the two functors are not parallel".into()));
    }
    let (gg, hh) = (f.source(), f.target());
    let mut r = ValidationReport::new();
    r.absorb("eta:", check_morphism(eta, gg.c0(), hh.c1())?);
    if let Some(x) = gg.c0().elements().find(|&x| hh.d0().apply(eta[x]) != f.f0().apply(x)) {
        r.push("eta-source", None, vec![x]);
    }
    if let Some(x) = gg.c0().elements().find(|&x| hh.d1().apply(eta[x]) != g.f0().apply(x)) {
        r.push("eta-target", None, vec![x]);
    }
    if let Some(u) = gg.c1().elements().find(|&u| {
        let (x, y) = (gg.d0().apply(u), gg.d1().apply(u));
        let lhs = hh.compose(g.f1().apply(u), eta[x]);
        let rhs = hh.compose(eta[y], f.f1().apply(u));
        lhs.is_none() || lhs != rhs
    }) {
        r.push("naturality", None, vec![u]);
    }
    Ok(r)
}

impl GroupoidHomotopy {
    pub fn new(source: InternalFunctor, target: InternalFunctor, eta: Vec<usize>) -> Result<Self> {
        let report = validate_groupoid_homotopy(&source, &target, &eta)?;
        if !report.is_valid() {
            return Err(Error::InvalidHomotopy(report));
        }
        Ok(GroupoidHomotopy { source, target, eta })
    }

    pub fn identity(f: &InternalFunctor) -> Self {
        let h = f.target();
        GroupoidHomotopy {
            source: f.clone(),
            target: f.clone(),
            eta: f.f0().map().iter().map(|&y| h.identity_arrow(y)).collect(),
        }
    }

    pub fn source(&self) -> &InternalFunctor {
        &self.source
    }

    pub fn target(&self) -> &InternalFunctor {
        &self.target
    }

    pub fn eta(&self) -> &[usize] {
        &self.eta
    }

    /// Pointwise vertical composite `next ∘ self`.
    pub fn then(&self, next: &GroupoidHomotopy) -> Result<GroupoidHomotopy> {
        if self.target != next.source {
            return Err(Error::NotComposable("natural isomorphisms do not meet".into()));
        }
        let h = self.source.target();
        let eta = self
            .eta
            .iter()
            .zip(&next.eta)
            .map(|(&e1, &e2)| {
                h.compose(e2, e1)
                    .ok_or_else(|| Error::InternalInconsistency("components not composable".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        GroupoidHomotopy::new(self.source.clone(), next.target.clone(), eta)
    }

    /// Pointwise inverse `g ⇒ f`.
    pub fn inverse(&self) -> Result<GroupoidHomotopy> {
        let h = self.source.target();
        let eta = self.eta.iter().map(|&e| h.inverse(e)).collect();
        GroupoidHomotopy::new(self.target.clone(), self.source.clone(), eta)
    }

    /// `η k₀ : f∘k ⇒ g∘k`.
    pub fn whisker_pre(&self, k: &InternalFunctor) -> Result<GroupoidHomotopy> {
        let eta = k.f0().map().iter().map(|&x| self.eta[x]).collect();
        GroupoidHomotopy::new(self.source.compose(k)?, self.target.compose(k)?, eta)
    }

    /// `m₁ η : m∘f ⇒ m∘g`.
    pub fn whisker_post(&self, m: &InternalFunctor) -> Result<GroupoidHomotopy> {
        let eta = self.eta.iter().map(|&e| m.f1().apply(e)).collect();
        GroupoidHomotopy::new(m.compose(&self.source)?, m.compose(&self.target)?, eta)
    }
}

/// The delta-images of the two crossed modules a homotopy lives between.
fn delta_pair(x: &CrossedModule, y: &CrossedModule) -> Result<(Arc<InternalGroupoid>, Arc<InternalGroupoid>)> {
    let g = Arc::new(delta(x)?);
    let h = if x == y { g.clone() } else { Arc::new(delta(y)?) };
    Ok((g, h))
}

/// `V(b) = (d(b), f₀(b))` as a natural isomorphism `δf ⇒ δg`.
pub fn homotopy_to_natural_iso(h: &XModHomotopy) -> Result<GroupoidHomotopy> {
    let (gg, hh) = delta_pair(h.from.source(), h.from.target())?;
    let f = delta_morphism(&h.from, &gg, &hh)?;
    let g = delta_morphism(&h.to, &gg, &hh)?;
    let nd = h.from.target().b().order();
    let eta = h
        .from
        .source()
        .b()
        .elements()
        .map(|b| pair_index(h.d[b], h.from.f0().apply(b), nd))
        .collect();
    GroupoidHomotopy::new(f, g, eta).map_err(|e| match e {
        Error::InvalidHomotopy(r) => {
            Error::InternalInconsistency(format!("valid homotopy gave an invalid natural isomorphism: {r}"))
        }
        e => e,
    })
}

/// Reads `d(b)` off the first component of `η(b)`, for functors that are the
/// delta-images of `f` and `g`.
pub fn natural_iso_to_homotopy(n: &GroupoidHomotopy, f: &XModMorphism, g: &XModMorphism) -> Result<XModHomotopy> {
    parallel(f, g)?;
    let (gg, hh) = delta_pair(f.source(), f.target())?;
    let df = delta_morphism(f, &gg, &hh)?;
    let dg = delta_morphism(g, &gg, &hh)?;
    if n.source != df || n.target != dg {
        return Err(Error::NotDeltaImage(
            "functors are not the delta-images of the given morphisms".into(),
        ));
    }
    let nd = f.target().b().order();
    let d = n.eta.iter().map(|&e| unpair(e, nd).0).collect();
    XModHomotopy::new(f.clone(), g.clone(), d).map_err(|e| match e {
        Error::InvalidHomotopy(r) => {
            Error::InternalInconsistency(format!("valid natural isomorphism gave an invalid homotopy: {r}"))
        }
        e => e,
    })
}

/// Vertical composite `h2 · h1 : f ⇒ k` of `h1: f ⇒ g` and `h2: g ⇒ k`,
/// computed as the pointwise groupoid composite `V₂(b) ∘ V₁(b)`.
pub fn vertical_compose(h2: &XModHomotopy, h1: &XModHomotopy) -> Result<XModHomotopy> {
    if h1.to != h2.from {
        return Err(Error::NotComposable("end of the first homotopy is not the start of the second".into()));
    }
    let v = homotopy_to_natural_iso(h1)?.then(&homotopy_to_natural_iso(h2)?)?;
    natural_iso_to_homotopy(&v, &h1.from, &h2.to)
}

/// Inverse homotopy `g ⇒ f` from the pointwise groupoid inverse.
pub fn inverse_homotopy(h: &XModHomotopy) -> Result<XModHomotopy> {
    let v = homotopy_to_natural_iso(h)?.inverse()?;
    natural_iso_to_homotopy(&v, &h.to, &h.from)
}

/// `h k : f∘k ⇒ g∘k` for `h: f ⇒ g` and a morphism `k` into the source of `f`.
pub fn whisker_pre(h: &XModHomotopy, k: &XModMorphism) -> Result<XModHomotopy> {
    let (w, x) = (k.source(), k.target());
    let y = h.from.target();
    let (gw, gx) = delta_pair(w, x)?;
    let gy = Arc::new(delta(y)?);
    let dk = delta_morphism(k, &gw, &gx)?;
    let v = homotopy_to_natural_iso(h)?;
    // Rebuild the natural isomorphism over the shared groupoid handles.
    let f = delta_morphism(&h.from, &gx, &gy)?;
    let g = delta_morphism(&h.to, &gx, &gy)?;
    let v = GroupoidHomotopy::new(f, g, v.eta)?.whisker_pre(&dk)?;
    natural_iso_to_homotopy(&v, &compose_xmod_morphisms(&h.from, k)?, &compose_xmod_morphisms(&h.to, k)?)
}

/// `m h : m∘f ⇒ m∘g` for `h: f ⇒ g` and a morphism `m` out of the target of `f`.
pub fn whisker_post(m: &XModMorphism, h: &XModHomotopy) -> Result<XModHomotopy> {
    let x = h.from.source();
    let (y, z) = (m.source(), m.target());
    let gx = Arc::new(delta(x)?);
    let (gy, gz) = delta_pair(y, z)?;
    let dm = delta_morphism(m, &gy, &gz)?;
    let f = delta_morphism(&h.from, &gx, &gy)?;
    let g = delta_morphism(&h.to, &gx, &gy)?;
    let v = GroupoidHomotopy::new(f, g, homotopy_to_natural_iso(h)?.eta)?.whisker_post(&dm)?;
    natural_iso_to_homotopy(&v, &compose_xmod_morphisms(m, &h.from)?, &compose_xmod_morphisms(m, &h.to)?)
}

/// Horizontal composite of `h1: f ⇒ g` (X → Y) and `h2: f' ⇒ g'` (Y → Z),
/// a homotopy `f'f ⇒ g'g`, built as `(h2 g) · (f' h1)`.
pub fn horizontal_compose(h2: &XModHomotopy, h1: &XModHomotopy) -> Result<XModHomotopy> {
    let left = whisker_post(&h2.from, h1)?;
    let right = whisker_pre(h2, &h1.to)?;
    vertical_compose(&right, &left)
}

/// Validates `V(b) = (d(b), f₀(b))` as a natural isomorphism `δf ⇒ δg`,
/// without requiring `d` to be a homotopy.
pub fn check_natural_iso_of(f: &XModMorphism, g: &XModMorphism, d: &[usize]) -> Result<ValidationReport> {
    parallel(f, g)?;
    let (x, y) = (f.source(), f.target());
    if d.len() != x.b().order() {
        return Err(Error::dims("homotopy table", x.b().order(), d.len()));
    }
    check_range(d.iter().copied().max(), y.a().order(), "homotopy table")?;
    let (gg, hh) = delta_pair(x, y)?;
    let df = delta_morphism(f, &gg, &hh)?;
    let dg = delta_morphism(g, &gg, &hh)?;
    let nd = y.b().order();
    let eta: Vec<usize> = x.b().elements().map(|b| pair_index(d[b], f.f0().apply(b), nd)).collect();
    validate_groupoid_homotopy(&df, &dg, &eta)
}

/// Enumerates every `d: B → C` and reports, for each, whether the
/// crossed-module conditions and the groupoid conditions agree.
///
/// Returns the number of tables checked and the valid ones.
pub fn equivalence_sweep(f: &XModMorphism, g: &XModMorphism, budget: u64) -> Result<(usize, Vec<Vec<usize>>)> {
    parallel(f, g)?;
    let (x, y) = (f.source(), f.target());
    crate::algebra::check_budget(y.a().order(), x.b().order(), budget)?;
    let (gg, hh) = delta_pair(x, y)?;
    let df = delta_morphism(f, &gg, &hh)?;
    let dg = delta_morphism(g, &gg, &hh)?;
    let nd = y.b().order();
    let mut valid = Vec::new();
    let mut count = 0;
    for d in tuples_mixed(vec![y.a().order(); x.b().order()]) {
        count += 1;
        let xm = validate_xmod_homotopy(f, g, &d)?.is_valid();
        let eta: Vec<usize> = x.b().elements().map(|b| pair_index(d[b], f.f0().apply(b), nd)).collect();
        let gr = validate_groupoid_homotopy(&df, &dg, &eta)?.is_valid();
        if xm != gr {
            return Err(Error::InternalInconsistency(format!(
                "homotopy conditions ({xm}) and natural-isomorphism conditions ({gr}) disagree at d = {d:?}"
            )));
        }
        if xm {
            valid.push(d);
        }
    }
    Ok((count, valid))
}
