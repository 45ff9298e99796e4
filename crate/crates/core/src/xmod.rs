//! Crossed modules and their morphisms.

use std::sync::Arc;

use crate::action::{check_derived_action, conjugation_action, pair_index, semidirect_algebra, unpair, ActionSet};
use crate::algebra::{check_morphism, tuples, tuples_mixed, AlgMorphism, OmegaAlgebra};
use crate::error::{Error, Result};
use crate::report::{first_failure, ValidationReport};

/// A crossed module `α: A → B` with a set of derived actions of B on A.
#[derive(Clone, Debug)]
pub struct CrossedModule {
    name: String,
    alpha: AlgMorphism,
    action: ActionSet,
}

impl PartialEq for CrossedModule {
    /// Table equality of boundary and actions; names are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha && self.action == other.action
    }
}

impl Eq for CrossedModule {}

/// Checks a candidate crossed module: the boundary as a morphism, the
/// action conditions D1–D12 and CM1–CM4.
///
/// When the boundary and the action are valid, the semidirect formulation
/// (`(1,α): A⋊A → A⋊B` and `(α,1): A⋊B → B⋊B` are morphisms) is also
/// evaluated; if it disagrees with CM1–CM4 the result is
/// [`Error::InternalInconsistency`].
pub fn validate_crossed_module(alpha: &[usize], action: &ActionSet) -> Result<ValidationReport> {
    let a_alg = action.acted();
    let b_alg = action.actor();
    let mut r = ValidationReport::new();
    let alpha_report = check_morphism(alpha, a_alg, b_alg)?;
    let alpha_ok = alpha_report.is_valid();
    r.absorb("alpha:", alpha_report);
    let action_report = check_derived_action(action)?;
    let action_ok = action_report.is_valid();
    r.absorb("", action_report);

    let cm = cm_report(alpha, action);
    let cm_ok = cm.is_valid();
    r.absorb("", cm);

    if alpha_ok && action_ok {
        let semidirect_ok = semidirect_formulation_holds(alpha, action)?;
        if semidirect_ok != cm_ok {
            return Err(Error::InternalInconsistency(format!(
                "CM1–CM4 verdict {cm_ok} disagrees with semidirect-morphism verdict {semidirect_ok}"
            )));
        }
    }
    Ok(r)
}

fn cm_report(alpha: &[usize], act: &ActionSet) -> ValidationReport {
    let a_alg = act.acted();
    let b_alg = act.actor();
    let (na, nb) = (a_alg.order(), b_alg.order());
    let mut r = ValidationReport::new();
    first_failure(&mut r, "CM1", None, tuples_mixed(vec![nb, na]), |w| {
        let (b, a) = (w[0], w[1]);
        alpha[act.dot(b, a)] == b_alg.conj(b, alpha[a])
    });
    first_failure(&mut r, "CM2", None, tuples(na, 2), |w| {
        let (a, a1) = (w[0], w[1]);
        act.dot(alpha[a], a1) == a_alg.conj(a, a1)
    });
    for (k, op) in a_alg.signature().binary_ops().iter().enumerate() {
        let op = Some(op.as_str());
        first_failure(&mut r, "CM3", op, tuples_mixed(vec![nb, na]), |w| {
            let (b, a) = (w[0], w[1]);
            alpha[act.star(k, b, a)] == b_alg.op(k, b, alpha[a])
                && alpha[act.star_right(k, a, b)] == b_alg.op(k, alpha[a], b)
        });
        first_failure(&mut r, "CM4", op, tuples(na, 2), |w| {
            let (a, a1) = (w[0], w[1]);
            let p = a_alg.op(k, a, a1);
            act.star(k, alpha[a], a1) == p && act.star_right(k, a, alpha[a1]) == p
        });
    }
    r
}

/// Whether `(1_A, α): A⋊A → A⋊B` and `(α, 1_B): A⋊B → B⋊B` are morphisms,
/// both semidirect products on the left and right built from conjugation.
fn semidirect_formulation_holds(alpha: &[usize], act: &ActionSet) -> Result<bool> {
    let a_alg = act.acted();
    let b_alg = act.actor();
    let (na, nb) = (a_alg.order(), b_alg.order());
    let aa = semidirect_algebra(&conjugation_action(a_alg))?;
    let ab = semidirect_algebra(act)?;
    let bb = semidirect_algebra(&conjugation_action(b_alg))?;
    let left: Vec<usize> = aa
        .elements()
        .map(|x| {
            let (a, a1) = unpair(x, na);
            pair_index(a, alpha[a1], nb)
        })
        .collect();
    let right: Vec<usize> = ab
        .elements()
        .map(|x| {
            let (a, b) = unpair(x, nb);
            pair_index(alpha[a], b, nb)
        })
        .collect();
    Ok(check_morphism(&left, &aa, &ab)?.is_valid() && check_morphism(&right, &ab, &bb)?.is_valid())
}

impl CrossedModule {
    pub fn new(name: impl Into<String>, alpha: AlgMorphism, action: ActionSet) -> Result<Self> {
        if alpha.source() != action.acted() || alpha.target() != action.actor() {
            return Err(Error::SignatureMismatch(
                "boundary and action are over different algebras".into(),
            ));
        }
        let report = validate_crossed_module(alpha.map(), &action)?;
        if !report.is_valid() {
            return Err(Error::InvalidCrossedModule(report));
        }
        Ok(CrossedModule {
            name: name.into(),
            alpha,
            action,
        })
    }

    /// Builds from a boundary table, validating everything.
    pub fn from_tables(name: impl Into<String>, alpha: Vec<usize>, action: ActionSet) -> Result<Self> {
        let report = validate_crossed_module(&alpha, &action)?;
        if !report.is_valid() {
            return Err(Error::InvalidCrossedModule(report));
        }
        let alpha = AlgMorphism::new_unchecked(action.acted().clone(), action.actor().clone(), alpha);
        Ok(CrossedModule {
            name: name.into(),
            alpha,
            action,
        })
    }

    /// `(A, A, 1, conjugation)`.
    pub fn conjugation(name: impl Into<String>, a: &Arc<OmegaAlgebra>) -> Result<Self> {
        CrossedModule::new(name, AlgMorphism::identity(a), conjugation_action(a))
    }

    /// `(A, B, α)` with the trivial action.
    pub fn with_trivial_action(name: impl Into<String>, alpha: AlgMorphism) -> Result<Self> {
        let act = ActionSet::trivial(alpha.target(), alpha.source())?;
        CrossedModule::new(name, alpha, act)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The acted-on algebra A.
    pub fn a(&self) -> &Arc<OmegaAlgebra> {
        self.action.acted()
    }

    /// The acting algebra B.
    pub fn b(&self) -> &Arc<OmegaAlgebra> {
        self.action.actor()
    }

    pub fn alpha(&self) -> &AlgMorphism {
        &self.alpha
    }

    pub fn action(&self) -> &ActionSet {
        &self.action
    }
}

/// A validated morphism `(f₁, f₀)` of crossed modules.
#[derive(Clone, Debug)]
pub struct XModMorphism {
    source: Arc<CrossedModule>,
    target: Arc<CrossedModule>,
    f1: AlgMorphism,
    f0: AlgMorphism,
}

impl PartialEq for XModMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.f1.map() == other.f1.map()
            && self.f0.map() == other.f0.map()
            && self.source == other.source
            && self.target == other.target
    }
}

impl Eq for XModMorphism {}

/// Checks `f₀α = α′f₁`, `f₁(b·a) = f₀(b)·f₁(a)` and `f₁(b*a) = f₀(b)*f₁(a)`.
pub fn check_xmod_morphism(
    source: &CrossedModule,
    target: &CrossedModule,
    f1: &[usize],
    f0: &[usize],
) -> Result<ValidationReport> {
    source.a().same_signature(target.a())?;
    let mut r = ValidationReport::new();
    r.absorb("f1:", check_morphism(f1, source.a(), target.a())?);
    r.absorb("f0:", check_morphism(f0, source.b(), target.b())?);
    let (na, nb) = (source.a().order(), source.b().order());
    let (alpha, alpha_t) = (source.alpha(), target.alpha());
    let (act, act_t) = (source.action(), target.action());
    first_failure(&mut r, "XM-i", None, tuples(na, 1), |w| {
        f0[alpha.apply(w[0])] == alpha_t.apply(f1[w[0]])
    });
    first_failure(&mut r, "XM-ii", None, tuples_mixed(vec![nb, na]), |w| {
        let (b, a) = (w[0], w[1]);
        f1[act.dot(b, a)] == act_t.dot(f0[b], f1[a])
    });
    for (k, op) in source.a().signature().binary_ops().iter().enumerate() {
        first_failure(&mut r, "XM-iii", Some(op), tuples_mixed(vec![nb, na]), |w| {
            let (b, a) = (w[0], w[1]);
            f1[act.star(k, b, a)] == act_t.star(k, f0[b], f1[a])
        });
    }
    Ok(r)
}

impl XModMorphism {
    pub fn new(source: Arc<CrossedModule>, target: Arc<CrossedModule>, f1: Vec<usize>, f0: Vec<usize>) -> Result<Self> {
        let report = check_xmod_morphism(&source, &target, &f1, &f0)?;
        if !report.is_valid() {
            return Err(Error::InvalidXModMorphism(report));
        }
        let f1 = AlgMorphism::new_unchecked(source.a().clone(), target.a().clone(), f1);
        let f0 = AlgMorphism::new_unchecked(source.b().clone(), target.b().clone(), f0);
        Ok(XModMorphism { source, target, f1, f0 })
    }

    pub fn identity(x: &Arc<CrossedModule>) -> Self {
        XModMorphism {
            source: x.clone(),
            target: x.clone(),
            f1: AlgMorphism::identity(x.a()),
            f0: AlgMorphism::identity(x.b()),
        }
    }

    pub fn zero(source: &Arc<CrossedModule>, target: &Arc<CrossedModule>) -> Result<Self> {
        XModMorphism::new(
            source.clone(),
            target.clone(),
            vec![0; source.a().order()],
            vec![0; source.b().order()],
        )
    }

    pub fn source(&self) -> &Arc<CrossedModule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CrossedModule> {
        &self.target
    }

    pub fn f1(&self) -> &AlgMorphism {
        &self.f1
    }

    pub fn f0(&self) -> &AlgMorphism {
        &self.f0
    }

    pub fn is_bijective(&self) -> bool {
        self.f1.is_bijective() && self.f0.is_bijective()
    }

    /// Inverse morphism when both components are bijective.
    pub fn inverse(&self) -> Option<Result<XModMorphism>> {
        let (g1, g0) = (self.f1.inverse()?, self.f0.inverse()?);
        Some(XModMorphism::new(
            self.target.clone(),
            self.source.clone(),
            g1.map().to_vec(),
            g0.map().to_vec(),
        ))
    }
}

/// `g ∘ f`, componentwise.
pub fn compose_xmod_morphisms(g: &XModMorphism, f: &XModMorphism) -> Result<XModMorphism> {
    if f.target != g.source {
        return Err(Error::NotComposable(format!(
            "target `{}` differs from source `{}`",
            f.target.name(),
            g.source.name()
        )));
    }
    let f1 = g.f1.compose(&f.f1)?;
    let f0 = g.f0.compose(&f.f0)?;
    XModMorphism::new(f.source.clone(), g.target.clone(), f1.map().to_vec(), f0.map().to_vec())
}

/// A morphism is a covering when its A-component is an isomorphism.
pub fn is_covering(m: &XModMorphism) -> Result<bool> {
    let report = check_xmod_morphism(&m.source, &m.target, m.f1.map(), m.f0.map())?;
    if !report.is_valid() {
        return Err(Error::InvalidXModMorphism(report));
    }
    Ok(m.f1.is_bijective())
}
