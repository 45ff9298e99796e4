//! Derived actions, derived crossed modules and the chain of isomorphic
//! crossed modules generated by a regular derivation.

use std::sync::Arc;

use crate::action::{action_from_section, check_derived_action, pair_index, ActionSet, SplitExtension};
use crate::algebra::{AlgMorphism, Table};
use crate::derivation::{check_derivation, Derivation};
use crate::error::{Error, Result};
use crate::xmod::{check_xmod_morphism, is_covering, CrossedModule, XModMorphism};

fn ensure_valid(d: &Derivation) -> Result<()> {
    let r = check_derivation(d.base(), d.table())?;
    if r.is_valid() {
        Ok(())
    } else {
        Err(Error::InvalidDerivation(r))
    }
}

/// `σ_d⁻¹`, or [`Error::NotRegular`] when `θ_d` or `σ_d` is not a bijection.
pub fn sigma_inverse(d: &Derivation) -> Result<Vec<usize>> {
    let invert = |map: &[usize]| -> Option<Vec<usize>> {
        let mut inv = vec![usize::MAX; map.len()];
        for (x, &y) in map.iter().enumerate() {
            if inv[y] != usize::MAX {
                return None;
            }
            inv[y] = x;
        }
        Some(inv)
    };
    invert(d.theta()).ok_or(Error::NotRegular)?;
    invert(d.sigma()).ok_or(Error::NotRegular)
}

/// `ᵇa = d(b) + b·a - d(b)` and `b *̃ a = d(b)*a + b*a`.
///
/// Cross-checked against the action read off the split extension
/// `A → A⋊B → B` with section `V(b) = (d(b), b)`.
pub fn derived_action_general(d: &Derivation) -> Result<ActionSet> {
    ensure_valid(d)?;
    let x = d.base();
    let (a_alg, b_alg, act) = (x.a(), x.b(), x.action());
    let (na, nb) = (a_alg.order(), b_alg.order());
    let dot = Table::from_fn(nb, na, |b, a| a_alg.conj(d.apply(b), act.dot(b, a)));
    let star = (0..b_alg.signature().binary_ops().len())
        .map(|k| Table::from_fn(nb, na, |b, a| a_alg.add(a_alg.op(k, d.apply(b), a), act.star(k, b, a))))
        .collect();
    let out = ActionSet::new(format!("derived({})", x.name()), b_alg.clone(), a_alg.clone(), dot, star)?;

    let canonical = SplitExtension::canonical(act)?;
    let v = AlgMorphism::new(
        b_alg.clone(),
        canonical.projection.source().clone(),
        b_alg.elements().map(|b| pair_index(d.apply(b), b, nb)).collect(),
    )?;
    let from_section = action_from_section(&canonical.with_section(v)?)?;
    if from_section != out {
        return Err(Error::InternalInconsistency(
            "derived action differs from the action of the section V(b) = (d(b), b)".into(),
        ));
    }
    let report = check_derived_action(&out)?;
    if !report.is_valid() {
        return Err(Error::InternalInconsistency(format!("derived action fails D1–D12: {report}")));
    }
    Ok(out)
}

/// `ᵇa = σ_d(b)·a` and `b *̃ a = σ_d(b)*a`; must agree with the general form.
pub fn derived_action_regular(d: &Derivation) -> Result<ActionSet> {
    ensure_valid(d)?;
    sigma_inverse(d)?;
    let x = d.base();
    let (a_alg, b_alg, act) = (x.a(), x.b(), x.action());
    let (na, nb) = (a_alg.order(), b_alg.order());
    let s = d.sigma();
    let dot = Table::from_fn(nb, na, |b, a| act.dot(s[b], a));
    let star = (0..b_alg.signature().binary_ops().len())
        .map(|k| Table::from_fn(nb, na, |b, a| act.star(k, s[b], a)))
        .collect();
    let out = ActionSet::new(format!("derived({})", x.name()), b_alg.clone(), a_alg.clone(), dot, star)?;
    if out != derived_action_general(d)? {
        return Err(Error::InternalInconsistency(
            "σ_d(b)·a differs from d(b) + b·a - d(b)".into(),
        ));
    }
    Ok(out)
}

/// `(A, B, σ_d⁻¹α)` with the derived action.
pub fn derived_crossed_module(d: &Derivation) -> Result<CrossedModule> {
    let sigma_inv = sigma_inverse(d)?;
    let x = d.base();
    let action = derived_action_regular(d)?;
    let alpha_d: Vec<usize> = x.alpha().map().iter().map(|&b| sigma_inv[b]).collect();
    let name = format!("{}_d", x.name());
    CrossedModule::from_tables(name, alpha_d, action).map_err(|e| match e {
        Error::InvalidCrossedModule(r) => {
            Error::InternalInconsistency(format!("derived crossed module fails validation: {r}"))
        }
        e => e,
    })
}

/// `(1, σ_d⁻¹)` from the base to its derived crossed module; checked to be a
/// bijective covering.
pub fn derived_iso(d: &Derivation) -> Result<XModMorphism> {
    let target = Arc::new(derived_crossed_module(d)?);
    derived_iso_to(d, target)
}

fn derived_iso_to(d: &Derivation, target: Arc<CrossedModule>) -> Result<XModMorphism> {
    let sigma_inv = sigma_inverse(d)?;
    let x = d.base();
    let f1: Vec<usize> = x.a().elements().collect();
    let report = check_xmod_morphism(x, &target, &f1, &sigma_inv)?;
    if !report.is_valid() {
        return Err(Error::InternalInconsistency(format!("(1, σ_d⁻¹) is not a morphism: {report}")));
    }
    let m = XModMorphism::new(x.clone(), target, f1, sigma_inv)?;
    if !m.is_bijective() || !is_covering(&m)? {
        return Err(Error::InternalInconsistency("(1, σ_d⁻¹) is not a bijective covering".into()));
    }
    Ok(m)
}

/// `d' = dσ_d` as a derivation of the derived crossed module.
pub fn transport_derivation(d: &Derivation) -> Result<Derivation> {
    let derived = Arc::new(derived_crossed_module(d)?);
    transport_into(d, derived)
}

fn transport_into(d: &Derivation, derived: Arc<CrossedModule>) -> Result<Derivation> {
    let table: Vec<usize> = d.sigma().iter().map(|&b| d.apply(b)).collect();
    let moved = Derivation::new(derived, table).map_err(|e| match e {
        Error::InvalidDerivation(r) => Error::InternalInconsistency(format!("dσ_d is not a derivation: {r}")),
        e => e,
    })?;
    if moved.theta() != d.theta() {
        return Err(Error::InternalInconsistency("θ_{d'} ≠ θ_d".into()));
    }
    if moved.sigma() != d.sigma() {
        return Err(Error::InternalInconsistency("σ_{d'} ≠ σ_d".into()));
    }
    sigma_inverse(&moved)?;
    Ok(moved)
}

/// One stage of a derived chain.
#[derive(Clone, Debug)]
pub struct ChainStage {
    pub xmod: Arc<CrossedModule>,
    /// The derivation used to build the next stage.
    pub derivation: Derivation,
    /// Isomorphism from the previous stage; the identity for stage 0.
    pub link: XModMorphism,
}

#[derive(Clone, Debug)]
pub struct DerivedChain {
    pub stages: Vec<ChainStage>,
    /// First `k ≥ 1` whose stage equals stage 0 as tables.
    pub period: Option<usize>,
    /// Order of `σ_d` in `Aut(B)`.
    pub sigma_order: usize,
}

pub const DEFAULT_MAX_STAGES: usize = 64;

fn same_tables(x: &CrossedModule, y: &CrossedModule) -> bool {
    x.alpha().map() == y.alpha().map() && x.action() == y.action()
}

/// Iterates `(A,B,α) → (A,B,α_d) → (A,B,α_{d'}) → …` until a stage repeats
/// stage 0 or `max_stages` further stages have been built.
pub fn iterate_chain(d: &Derivation, max_stages: usize) -> Result<DerivedChain> {
    if max_stages == 0 {
        return Err(Error::InternalInconsistency("max_stages must be at least 1".into()));
    }
    let sigma_inv = sigma_inverse(d)?;
    let sigma_order = {
        let s = d.sigma();
        let mut p: Vec<usize> = s.to_vec();
        let mut k = 1;
        while p.iter().enumerate().any(|(i, &v)| i != v) {
            p = p.iter().map(|&v| s[v]).collect();
            k += 1;
        }
        k
    };
    let base = d.base().clone();
    let mut stages = vec![ChainStage {
        xmod: base.clone(),
        derivation: d.clone(),
        link: XModMorphism::identity(&base),
    }];
    let mut expected_alpha: Vec<usize> = base.alpha().map().to_vec();
    let mut period = None;
    for k in 1..=max_stages {
        let prev = &stages[k - 1];
        let xmod = Arc::new(derived_crossed_module(&prev.derivation)?.renamed(format!("{}^({k})", base.name())));
        let link = derived_iso_to(&prev.derivation, xmod.clone())?;
        let derivation = transport_into(&prev.derivation, xmod.clone())?;
        expected_alpha = expected_alpha.iter().map(|&b| sigma_inv[b]).collect();
        if xmod.alpha().map() != expected_alpha.as_slice() {
            return Err(Error::InternalInconsistency(format!("stage {k} boundary is not σ_d^-{k}∘α")));
        }
        let repeats = same_tables(&xmod, &base);
        stages.push(ChainStage { xmod, derivation, link });
        if repeats {
            period = Some(k);
            break;
        }
    }
    if let Some(p) = period {
        if sigma_order % p != 0 {
            return Err(Error::InternalInconsistency(format!(
                "period {p} does not divide ord(σ_d) = {sigma_order}"
            )));
        }
    }
    Ok(DerivedChain {
        stages,
        period,
        sigma_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn zn_id(n: usize) -> Arc<CrossedModule> {
        let z = Arc::new(catalog::cyclic_group(n));
        Arc::new(CrossedModule::with_trivial_action("zn", AlgMorphism::identity(&z)).unwrap())
    }

    fn mult(k: usize, n: usize) -> Vec<usize> {
        (0..n).map(|b| k * b % n).collect()
    }

    #[test]
    fn zero_derivation_changes_nothing() {
        let x = zn_id(4);
        let d = Derivation::zero(&x);
        assert_eq!(&derived_action_general(&d).unwrap(), x.action());
        assert_eq!(&derived_crossed_module(&d).unwrap(), x.as_ref());
        assert_eq!(derived_iso(&d).unwrap(), XModMorphism::identity(&x));
        assert!(transport_derivation(&d).unwrap().is_zero());
        assert_eq!(iterate_chain(&d, DEFAULT_MAX_STAGES).unwrap().period, Some(1));
    }

    #[test]
    fn doubling_on_z4() {
        let x = zn_id(4);
        let d = Derivation::new(x.clone(), mult(2, 4)).unwrap();
        assert_eq!(derived_action_regular(&d).unwrap(), *x.action());
        let y = derived_crossed_module(&d).unwrap();
        assert_eq!(y.alpha().map(), mult(3, 4).as_slice());
        assert_eq!(derived_iso(&d).unwrap().f0().map(), mult(3, 4).as_slice());
        assert_eq!(transport_derivation(&d).unwrap().table(), mult(2, 4).as_slice());
        let chain = iterate_chain(&d, DEFAULT_MAX_STAGES).unwrap();
        assert_eq!(chain.period, Some(2));
        assert_eq!(chain.sigma_order, 2);
        assert_eq!(chain.stages[1].xmod.alpha().map(), mult(3, 4).as_slice());
    }

    #[test]
    fn singular_derivation_has_general_action_only() {
        let x = zn_id(4);
        let d = Derivation::new(x, mult(1, 4)).unwrap();
        assert!(check_derived_action(&derived_action_general(&d).unwrap()).unwrap().is_valid());
        assert!(matches!(derived_action_regular(&d), Err(Error::NotRegular)));
        assert!(matches!(derived_crossed_module(&d), Err(Error::NotRegular)));
        assert!(matches!(iterate_chain(&d, 4), Err(Error::NotRegular)));
    }
}
