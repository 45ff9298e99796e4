//! Derivations of a crossed module, the Whitehead monoid and group.
//!
//! For `d: B → A` the endomorphisms are `θ_d(a) = d(α(a)) + a` and
//! `σ_d(b) = α(d(b)) + b`; composition is
//! `(d₁ ∘ d₂)(b) = d₁(σ_{d₂}(b)) + d₂(b)`, rendered `wcomp` in reports.

use std::sync::{Arc, OnceLock};

use crate::algebra::{check_budget, check_range, propagate, tuples, AlgMorphism, OmegaAlgebra, Table};
use crate::error::{Error, Result};
use crate::report::{first_failure, ValidationReport};
use crate::xmod::{CrossedModule, XModMorphism};

/// Regularity certificate of a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Regularity {
    Unknown,
    /// Invertible; carries the inverse table.
    Regular { inverse: Vec<usize> },
    /// Not invertible; `θ_d` identifies the two listed elements of A.
    Singular { witness: (usize, usize) },
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, Regularity::Regular { .. })
    }
}

#[derive(Clone, Debug)]
pub struct Derivation {
    base: Arc<CrossedModule>,
    d: Vec<usize>,
    theta: Vec<usize>,
    sigma: Vec<usize>,
    regularity: OnceLock<Regularity>,
}

impl PartialEq for Derivation {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.base == other.base
    }
}

impl Eq for Derivation {}

/// Checks the derivation conditions Der-i to Der-iii.
pub fn check_derivation(base: &CrossedModule, d: &[usize]) -> Result<ValidationReport> {
    let (a_alg, b_alg) = (base.a(), base.b());
    if d.len() != b_alg.order() {
        return Err(Error::dims("derivation table", b_alg.order(), d.len()));
    }
    check_range(d.iter().copied().max(), a_alg.order(), "derivation table")?;
    let act = base.action();
    let nb = b_alg.order();
    let mut r = ValidationReport::new();
    first_failure(&mut r, "Der-i", None, tuples(nb, 2), |w| {
        let (b, b1) = (w[0], w[1]);
        d[b_alg.add(b, b1)] == a_alg.add(d[b], act.dot(b, d[b1]))
    });
    for (k, op) in b_alg.signature().binary_ops().iter().enumerate() {
        first_failure(&mut r, "Der-ii", Some(op), tuples(nb, 2), |w| {
            let (b, b1) = (w[0], w[1]);
            let rhs = a_alg.add(
                a_alg.add(a_alg.op(k, d[b], d[b1]), act.star_right(k, d[b], b1)),
                act.star(k, b, d[b1]),
            );
            d[b_alg.op(k, b, b1)] == rhs
        });
    }
    for (u, op) in b_alg.signature().unary_ops().iter().enumerate() {
        first_failure(&mut r, "Der-iii", Some(op), tuples(nb, 1), |w| {
            d[b_alg.unop(u, w[0])] == a_alg.unop(u, d[w[0]])
        });
    }
    Ok(r)
}

impl Derivation {
    pub fn new(base: Arc<CrossedModule>, d: Vec<usize>) -> Result<Self> {
        let report = check_derivation(&base, &d)?;
        if !report.is_valid() {
            return Err(Error::InvalidDerivation(report));
        }
        let derivation = Derivation::unchecked(base, d);
        if !derivation.intertwines() {
            return Err(Error::InternalInconsistency("θ_d ∘ d ≠ d ∘ σ_d".into()));
        }
        Ok(derivation)
    }

    fn unchecked(base: Arc<CrossedModule>, d: Vec<usize>) -> Self {
        let alpha = base.alpha();
        let theta = base.a().elements().map(|a| base.a().add(d[alpha.apply(a)], a)).collect();
        let sigma = base.b().elements().map(|b| base.b().add(alpha.apply(d[b]), b)).collect();
        Derivation {
            base,
            d,
            theta,
            sigma,
            regularity: OnceLock::new(),
        }
    }

    pub fn zero(base: &Arc<CrossedModule>) -> Self {
        Derivation::unchecked(base.clone(), vec![0; base.b().order()])
    }

    pub fn base(&self) -> &Arc<CrossedModule> {
        &self.base
    }

    pub fn table(&self) -> &[usize] {
        &self.d
    }

    #[inline]
    pub fn apply(&self, b: usize) -> usize {
        self.d[b]
    }

    /// `θ_d(a) = d(α(a)) + a`
    pub fn theta(&self) -> &[usize] {
        &self.theta
    }

    /// `σ_d(b) = α(d(b)) + b`
    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn is_zero(&self) -> bool {
        self.d.iter().all(|&a| a == 0)
    }

    /// `θ_d ∘ d = d ∘ σ_d`
    pub fn intertwines(&self) -> bool {
        self.base.b().elements().all(|b| self.theta[self.d[b]] == self.d[self.sigma[b]])
    }

    /// Cached regularity, if already decided.
    pub fn regularity(&self) -> &Regularity {
        self.regularity.get().unwrap_or(&Regularity::Unknown)
    }
}

/// `(θ_d, σ_d)` as an endomorphism of the base crossed module.
pub fn endomorphism_of(d: &Derivation) -> Result<XModMorphism> {
    let x = d.base();
    let report = check_derivation(x, &d.d)?;
    if !report.is_valid() {
        return Err(Error::InvalidDerivation(report));
    }
    AlgMorphism::new(x.a().clone(), x.a().clone(), d.theta.clone())?;
    AlgMorphism::new(x.b().clone(), x.b().clone(), d.sigma.clone())?;
    if !d.intertwines() {
        return Err(Error::InternalInconsistency("θ_d ∘ d ≠ d ∘ σ_d".into()));
    }
    XModMorphism::new(x.clone(), x.clone(), d.theta.clone(), d.sigma.clone())
}

/// All derivations of `base`, in lexicographic order of their tables.
///
/// Values are chosen on a generating set of B and propagated by
/// `d(x + g) = d(x) + x·d(g)`; survivors are re-checked in full.
pub fn enumerate_derivations(base: &Arc<CrossedModule>, budget: u64) -> Result<Vec<Derivation>> {
    let (a_alg, b_alg) = (base.a(), base.b());
    let gens = b_alg.generators();
    check_budget(a_alg.order(), gens.len(), budget)?;
    let act = base.action();
    let mut out = Vec::new();
    for values in tuples(a_alg.order(), gens.len()) {
        let Some(d) = propagate(b_alg, &gens, |x, i, dx| a_alg.add(dx, act.dot(x, values[i]))) else {
            continue;
        };
        if check_derivation(base, &d)?.is_valid() {
            out.push(Derivation::new(base.clone(), d)?);
        }
    }
    out.sort_by(|x, y| x.d.cmp(&y.d));
    Ok(out)
}

/// Whitehead product `d₁ ∘ d₂`, cross-checked against `θ₁(d₂(b)) + d₁(b)`.
pub fn whitehead_compose(d1: &Derivation, d2: &Derivation) -> Result<Derivation> {
    if d1.base != d2.base {
        return Err(Error::BaseMismatch);
    }
    let a_alg = d1.base.a();
    let first: Vec<usize> = d1.base.b().elements().map(|b| a_alg.add(d1.d[d2.sigma[b]], d2.d[b])).collect();
    let second: Vec<usize> = d1.base.b().elements().map(|b| a_alg.add(d1.theta[d2.d[b]], d1.d[b])).collect();
    if first != second {
        return Err(Error::InternalInconsistency(format!(
            "the two forms of the Whitehead product disagree: {first:?} vs {second:?}"
        )));
    }
    let d = Derivation::new(d1.base.clone(), first).map_err(|e| match e {
        Error::InvalidDerivation(r) => Error::InternalInconsistency(format!("product of derivations is not a derivation: {r}")),
        e => e,
    })?;
    let compose = |f: &[usize], g: &[usize]| g.iter().map(|&x| f[x]).collect::<Vec<_>>();
    if d.sigma != compose(&d1.sigma, &d2.sigma) || d.theta != compose(&d1.theta, &d2.theta) {
        return Err(Error::InternalInconsistency("σ or θ is not multiplicative".into()));
    }
    Ok(d)
}

/// The monoid `Der(B, A)` under the Whitehead product.
#[derive(Clone, Debug)]
pub struct WhiteheadMonoid {
    pub elements: Vec<Derivation>,
    /// `table[i][j]` is the index of `elements[i] ∘ elements[j]`.
    pub table: Table,
}

impl WhiteheadMonoid {
    pub fn new(base: &Arc<CrossedModule>, budget: u64) -> Result<Self> {
        let elements = enumerate_derivations(base, budget)?;
        let n = elements.len();
        let mut data = Vec::with_capacity(n * n);
        for x in &elements {
            for y in &elements {
                let p = whitehead_compose(x, y)?;
                let k = elements
                    .binary_search_by(|e| e.d.cmp(&p.d))
                    .map_err(|_| Error::InternalInconsistency("Der(B,A) not closed under wcomp".into()))?;
                data.push(k);
            }
        }
        let table = Table::new(n, n, data)?;
        if !elements.first().is_some_and(Derivation::is_zero) {
            return Err(Error::InternalInconsistency("zero derivation missing".into()));
        }
        let monoid = WhiteheadMonoid { elements, table };
        monoid.check_laws()?;
        Ok(monoid)
    }

    fn check_laws(&self) -> Result<()> {
        let n = self.elements.len();
        let t = &self.table;
        for i in 0..n {
            if t.get(0, i) != i || t.get(i, 0) != i {
                return Err(Error::InternalInconsistency(format!("0 is not neutral for element {i}")));
            }
        }
        for w in tuples(n, 3) {
            if t.get(t.get(w[0], w[1]), w[2]) != t.get(w[0], t.get(w[1], w[2])) {
                return Err(Error::InternalInconsistency(format!("wcomp not associative at {w:?}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, d: &[usize]) -> Option<usize> {
        self.elements.binary_search_by(|e| e.d.as_slice().cmp(d)).ok()
    }

    /// Two-sided inverse of element `i` in the monoid, if any.
    pub fn inverse_of(&self, i: usize) -> Option<usize> {
        (0..self.len()).find(|&j| self.table.get(i, j) == 0 && self.table.get(j, i) == 0)
    }
}

fn bijective(map: &[usize]) -> std::result::Result<(), (usize, usize)> {
    let mut first = vec![usize::MAX; map.len()];
    for (x, &y) in map.iter().enumerate() {
        if first[y] != usize::MAX {
            return Err((first[y], x));
        }
        first[y] = x;
    }
    Ok(())
}

fn invert(map: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; map.len()];
    for (x, &y) in map.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

/// Decides regularity three ways: `θ_d` bijective, `σ_d` bijective, and a
/// monoid inverse in the enumerated `Der(B, A)`. Disagreement is an error.
pub fn is_regular_in(d: &Derivation, monoid: &WhiteheadMonoid) -> Result<Regularity> {
    if let Some(r) = d.regularity.get() {
        return Ok(r.clone());
    }
    let by_theta = bijective(&d.theta);
    let by_sigma = bijective(&d.sigma).is_ok();
    let i = monoid
        .index_of(&d.d)
        .ok_or_else(|| Error::InternalInconsistency("derivation missing from enumeration".into()))?;
    let by_monoid = monoid.inverse_of(i);
    if by_theta.is_ok() != by_sigma || by_sigma != by_monoid.is_some() {
        return Err(Error::InternalInconsistency(format!(
            "regularity criteria disagree for d = {:?}: θ bijective {}, σ bijective {}, monoid unit {}",
            d.d,
            by_theta.is_ok(),
            by_sigma,
            by_monoid.is_some()
        )));
    }
    let verdict = match (by_theta, by_monoid) {
        (Ok(()), Some(j)) => Regularity::Regular {
            inverse: monoid.elements[j].d.clone(),
        },
        (Err(witness), _) => Regularity::Singular { witness },
        (Ok(()), None) => unreachable!("checked above"),
    };
    let _ = d.regularity.set(verdict.clone());
    Ok(verdict)
}

/// Regularity of `d`, enumerating `Der(B, A)` for the monoid cross-check.
pub fn is_regular(d: &Derivation, budget: u64) -> Result<Regularity> {
    let monoid = WhiteheadMonoid::new(d.base(), budget)?;
    is_regular_in(d, &monoid)
}

/// Inverse of a regular derivation, computed as `θ_d⁻¹(-d(b))` and checked
/// against `-d(σ_d⁻¹(b))`.
pub fn invert_derivation(d: &Derivation) -> Result<Derivation> {
    if bijective(&d.theta).is_err() || bijective(&d.sigma).is_err() {
        return Err(Error::NotRegular);
    }
    let a_alg = d.base.a();
    let theta_inv = invert(&d.theta);
    let sigma_inv = invert(&d.sigma);
    let via_theta: Vec<usize> = d.base.b().elements().map(|b| theta_inv[a_alg.neg(d.d[b])]).collect();
    let via_sigma: Vec<usize> = d.base.b().elements().map(|b| a_alg.neg(d.d[sigma_inv[b]])).collect();
    if via_theta != via_sigma {
        return Err(Error::InternalInconsistency(format!(
            "inverse formulas disagree: {via_theta:?} vs {via_sigma:?}"
        )));
    }
    let e = Derivation::new(d.base.clone(), via_theta)?;
    if !whitehead_compose(d, &e)?.is_zero() || !whitehead_compose(&e, d)?.is_zero() {
        return Err(Error::InternalInconsistency("inverse does not compose to 0".into()));
    }
    Ok(e)
}

/// The Whitehead group of regular derivations with its Cayley table.
#[derive(Clone, Debug)]
pub struct WhiteheadGroup {
    pub elements: Vec<Derivation>,
    pub table: Table,
    /// The Cayley table as a validated group; element 0 is the zero derivation.
    pub group: Arc<OmegaAlgebra>,
    /// Size of the ambient monoid `Der(B, A)`.
    pub monoid_order: usize,
}

pub fn whitehead_group(base: &Arc<CrossedModule>, budget: u64) -> Result<WhiteheadGroup> {
    let monoid = WhiteheadMonoid::new(base, budget)?;
    let mut regular = Vec::new();
    for (i, d) in monoid.elements.iter().enumerate() {
        if is_regular_in(d, &monoid)?.is_regular() {
            regular.push(i);
        }
    }
    let n = regular.len();
    let mut data = Vec::with_capacity(n * n);
    for &i in &regular {
        for &j in &regular {
            let k = monoid.table.get(i, j);
            let pos = regular
                .iter()
                .position(|&r| r == k)
                .ok_or_else(|| Error::InternalInconsistency("regular derivations not closed".into()))?;
            data.push(pos);
        }
    }
    let table = Table::new(n, n, data)?;
    let group = OmegaAlgebra::group(format!("D({})", base.name()), table.clone()).map_err(|e| match e {
        Error::InvalidAlgebra { report, .. } => {
            Error::InternalInconsistency(format!("Whitehead group fails the group axioms: {report}"))
        }
        e => e,
    })?;
    Ok(WhiteheadGroup {
        elements: regular.iter().map(|&i| monoid.elements[i].clone()).collect(),
        table,
        group: Arc::new(group),
        monoid_order: monoid.len(),
    })
}

/// Whether `d(b) ∈ ker α` for every `b`.
pub fn kernel_image_predicate(d: &Derivation) -> bool {
    d.d.iter().all(|&a| d.base.alpha().apply(a) == 0)
}
