//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::Value;
use xmodlab::action::{check_derived_action, semidirect_product, ActionSet};
use xmodlab::algebra::{Table, DEFAULT_BUDGET};
use xmodlab::catalog::{self, Kind};
use xmodlab::derivation::{
    endomorphism_of, enumerate_derivations, invert_derivation, is_regular_in, kernel_image_predicate,
    whitehead_compose, whitehead_group, Derivation, WhiteheadMonoid,
};
use xmodlab::derived::{derived_action_general, derived_action_regular, derived_crossed_module, derived_iso, iterate_chain};
use xmodlab::groupoid::{delta, delta_morphism, roundtrip_groupoid, roundtrip_xmod, InternalFunctor, InternalGroupoid};
use xmodlab::homotopy::validate_xmod_homotopy;
use xmodlab::xmod::{check_xmod_morphism, is_covering, validate_crossed_module, CrossedModule, XModMorphism};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn all_maps(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total).map(move |mut k| {
        let mut v = vec![0; len];
        for slot in v.iter_mut() {
            *slot = k % n;
            k /= n;
        }
        v
    })
}

/// Orzech: D1–D12 hold exactly when the semidirect product is an algebra.
fn c1_orzech() -> Outcome {
    let mut checked = 0usize;
    let mut derived = 0usize;
    for (na, nb) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        let a = Arc::new(catalog::cyclic_group(na));
        let b = Arc::new(catalog::cyclic_group(nb));
        for dot in all_maps(na, na * nb) {
            let act = ActionSet::new("c", b.clone(), a.clone(), Table::new(nb, na, dot).unwrap(), vec![])
                .map_err(|e| e.to_string())?;
            let d = check_derived_action(&act).map_err(|e| e.to_string())?.is_valid();
            let (_, semi) = semidirect_product(&act).map_err(|e| e.to_string())?;
            ensure(d == semi.is_valid(), || format!("disagreement at |A|={na} |B|={nb}: {:?}", act.dot_table()))?;
            checked += 1;
            derived += d as usize;
        }
    }
    ensure(checked == 16 + 729 + 64 + 19_683, || format!("{checked} tables"))?;
    Ok(format!("{checked} dot tables (16 for 2×2, 19,683 for 3×3, plus 3×2 and 2×3), {derived} derived"))
}

fn catalog_xmods() -> Vec<Arc<CrossedModule>> {
    catalog::names_of(Kind::Xmod).iter().map(|n| catalog::xmod(n).unwrap()).collect()
}

fn catalog_groupoids() -> Vec<Arc<InternalGroupoid>> {
    catalog::names_of(Kind::Groupoid).iter().map(|n| catalog::groupoid(n).unwrap()).collect()
}

fn c2_porter() -> Outcome {
    let xs = catalog_xmods();
    ensure(xs.len() >= 6, || "fewer than 6 crossed modules".into())?;
    ensure(xs.iter().any(|x| x.name() == "S3-conj-xmod"), || "S3 conjugation missing".into())?;
    for x in &xs {
        let m = roundtrip_xmod(x).map_err(|e| format!("{}: {e}", x.name()))?;
        let r = check_xmod_morphism(m.source(), m.target(), m.f1().map(), m.f0().map()).unwrap();
        ensure(r.is_valid() && m.is_bijective(), || format!("{}: comparison map is not an iso", x.name()))?;
        ensure(m.source().as_ref() == x.as_ref(), || format!("{}: wrong source", x.name()))?;
    }
    let gs = catalog_groupoids();
    for g in &gs {
        let f = roundtrip_groupoid(g).map_err(|e| format!("{}: {e}", g.name()))?;
        ensure(f.is_bijective(), || format!("{}: comparison functor is not an iso", g.name()))?;
        ensure(f.source().as_ref() == g.as_ref(), || format!("{}: wrong source", g.name()))?;
    }
    Ok(format!("{} crossed modules and {} groupoids", xs.len(), gs.len()))
}

/// Interchange law and inverse formula, evaluated directly from the tables.
fn c3_interchange() -> Outcome {
    let mut largest = 0;
    let mut quads = 0usize;
    for g in catalog_groupoids() {
        let c1 = g.c1();
        let pairs = g.composable_pairs();
        let comp = |b: usize, a: usize| c1.add(c1.sub(b, g.eps().apply(g.d1().apply(a))), a);
        for &(b, a) in &pairs {
            ensure(g.compose(b, a) == Some(comp(b, a)), || format!("{}: composition at {b},{a}", g.name()))?;
        }
        for &(b, a) in &pairs {
            for &(b2, a2) in &pairs {
                quads += 1;
                let lhs = comp(c1.add(b, b2), c1.add(a, a2));
                ensure(lhs == c1.add(comp(b, a), comp(b2, a2)), || {
                    format!("{}: interchange for + at {:?}", g.name(), (b, a, b2, a2))
                })?;
                for k in 0..c1.signature().binary_ops().len() {
                    let lhs = comp(c1.op(k, b, b2), c1.op(k, a, a2));
                    ensure(lhs == c1.op(k, comp(b, a), comp(b2, a2)), || {
                        format!("{}: interchange for op {k} at {:?}", g.name(), (b, a, b2, a2))
                    })?;
                }
            }
        }
        for a in c1.elements() {
            let (x, y) = (g.d0().apply(a), g.d1().apply(a));
            let inv = c1.add(c1.sub(g.eps().apply(y), a), g.eps().apply(x));
            ensure(g.inverse(a) == inv, || format!("{}: inverse formula at {a}", g.name()))?;
            ensure(g.compose(inv, a) == Some(g.eps().apply(x)), || format!("{}: left inverse at {a}", g.name()))?;
            ensure(g.compose(a, inv) == Some(g.eps().apply(y)), || format!("{}: right inverse at {a}", g.name()))?;
        }
        largest = largest.max(c1.order());
    }
    ensure(largest == 36, || format!("largest |C1| is {largest}"))?;
    Ok(format!("{quads} composable quadruples, largest |C1| = {largest}"))
}

/// Naturality of `V(b) = (d(b), f0(b))`, written out on the groupoid tables.
fn is_natural_iso(f: &InternalFunctor, g: &InternalFunctor, eta: &[usize]) -> bool {
    let (src, tgt) = (f.source(), f.target());
    let c0 = src.c0();
    let additive = c0.elements().all(|x| c0.elements().all(|y| eta[c0.add(x, y)] == tgt.c1().add(eta[x], eta[y])));
    let ops = (0..c0.signature().binary_ops().len())
        .all(|k| c0.elements().all(|x| c0.elements().all(|y| eta[c0.op(k, x, y)] == tgt.c1().op(k, eta[x], eta[y]))));
    let ends = c0
        .elements()
        .all(|x| tgt.d0().apply(eta[x]) == f.f0().apply(x) && tgt.d1().apply(eta[x]) == g.f0().apply(x));
    let natural = src.c1().elements().all(|u| {
        let (x, y) = (src.d0().apply(u), src.d1().apply(u));
        tgt.compose(g.f1().apply(u), eta[x]) == tgt.compose(eta[y], f.f1().apply(u))
    });
    additive && ops && ends && natural
}

fn c4_homotopy() -> Outcome {
    let x = catalog::xmod("Z4-id-trivial").unwrap();
    let ders = enumerate_derivations(&x, DEFAULT_BUDGET).unwrap();
    let mut morphisms = vec![XModMorphism::identity(&x)];
    for d in &ders {
        let m = endomorphism_of(d).unwrap();
        if !morphisms.contains(&m) {
            morphisms.push(m);
        }
    }
    ensure(morphisms.len() == 4, || format!("{} distinct morphisms", morphisms.len()))?;
    let gx = Arc::new(delta(&x).unwrap());
    let mut checks = 0;
    let mut homotopies = 0;
    for f in &morphisms {
        for g in &morphisms {
            let df = delta_morphism(f, &gx, &gx).unwrap();
            let dg = delta_morphism(g, &gx, &gx).unwrap();
            for d in all_maps(4, 4) {
                let h = validate_xmod_homotopy(f, g, &d).unwrap().is_valid();
                let eta: Vec<usize> = (0..4).map(|b| d[b] * 4 + f.f0().apply(b)).collect();
                let v = is_natural_iso(&df, &dg, &eta);
                ensure(h == v, || format!("f0 = {:?}, g0 = {:?}, d = {d:?}: {h} vs {v}", f.f0().map(), g.f0().map()))?;
                checks += 1;
                homotopies += h as usize;
            }
        }
    }
    ensure(checks == 16 * 256, || format!("{checks} checks"))?;
    Ok(format!("{checks} (f, g, d) triples over 4 morphisms, {homotopies} homotopies"))
}

fn is_derivation_oracle(x: &CrossedModule, d: &[usize]) -> bool {
    let (a, b, act) = (x.a(), x.b(), x.action());
    b.elements().all(|p| b.elements().all(|q| d[b.add(p, q)] == a.add(d[p], act.dot(p, d[q]))))
}

fn c5_whitehead() -> Outcome {
    let mut lines = Vec::new();
    for (n, order) in [(2, 1), (3, 2), (4, 2), (6, 2)] {
        let x = catalog::xmod(&format!("Z{n}-id-trivial")).unwrap();
        let ders = enumerate_derivations(&x, DEFAULT_BUDGET).unwrap();
        let oracle: Vec<Vec<usize>> = all_maps(n, n).filter(|d| is_derivation_oracle(&x, d)).collect();
        let mut oracle_sorted = oracle.clone();
        oracle_sorted.sort();
        let tables: Vec<Vec<usize>> = ders.iter().map(|d| d.table().to_vec()).collect();
        ensure(ders.len() == n && tables == oracle_sorted, || format!("n = {n}: {tables:?} vs {oracle_sorted:?}"))?;
        // units of the monoid, from the composition formula evaluated here
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> {
            (0..n).map(|b| (p[(q[b] + b) % n] + q[b]) % n).collect()
        };
        let units = oracle
            .iter()
            .filter(|p| oracle.iter().any(|q| compose(p, q).iter().all(|&v| v == 0) && compose(q, p).iter().all(|&v| v == 0)))
            .count();
        let w = whitehead_group(&x, DEFAULT_BUDGET).unwrap();
        ensure(w.elements.len() == order && units == order, || {
            format!("n = {n}: group order {} oracle {units}, expected {order}", w.elements.len())
        })?;
        let monoid = WhiteheadMonoid::new(&x, DEFAULT_BUDGET).unwrap();
        for i in 0..monoid.len() {
            for j in 0..monoid.len() {
                for k in 0..monoid.len() {
                    let t = &monoid.table;
                    ensure(t.get(t.get(i, j), k) == t.get(i, t.get(j, k)), || format!("n = {n}: associativity"))?;
                }
            }
        }
        for d in &monoid.elements {
            let r = is_regular_in(d, &monoid).map_err(|e| e.to_string())?;
            let theta_bij = is_bijection(d.theta());
            let sigma_bij = is_bijection(d.sigma());
            ensure(r.is_regular() == theta_bij && theta_bij == sigma_bij, || format!("n = {n}: criteria differ"))?;
        }
        lines.push(format!("n={n}: {} derivations, group order {}", ders.len(), w.elements.len()));
    }
    Ok(lines.join("; "))
}

fn is_bijection(m: &[usize]) -> bool {
    let mut seen = vec![false; m.len()];
    m.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
}

fn regular_catalog_derivations() -> Vec<Derivation> {
    let mut out = Vec::new();
    for x in catalog_xmods() {
        let monoid = WhiteheadMonoid::new(&x, DEFAULT_BUDGET).unwrap();
        for d in &monoid.elements {
            if is_regular_in(d, &monoid).unwrap().is_regular() {
                out.push(d.clone());
            }
        }
    }
    out
}

fn invert(m: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; m.len()];
    for (i, &v) in m.iter().enumerate() {
        inv[v] = i;
    }
    inv
}

fn c6_inverse() -> Outcome {
    let ders = regular_catalog_derivations();
    for d in &ders {
        let x = d.base();
        let a = x.a();
        let e1: Vec<usize> = x.b().elements().map(|b| invert(d.theta())[a.neg(d.apply(b))]).collect();
        let e2: Vec<usize> = x.b().elements().map(|b| a.neg(d.apply(invert(d.sigma())[b]))).collect();
        ensure(e1 == e2, || format!("{}: {e1:?} vs {e2:?}", x.name()))?;
        let e = invert_derivation(d).map_err(|e| e.to_string())?;
        ensure(e.table() == e1.as_slice(), || format!("{}: library inverse differs", x.name()))?;
        ensure(whitehead_compose(d, &e).unwrap().is_zero(), || format!("{}: d∘e ≠ 0", x.name()))?;
        ensure(whitehead_compose(&e, d).unwrap().is_zero(), || format!("{}: e∘d ≠ 0", x.name()))?;
    }
    Ok(format!("{} regular derivations", ders.len()))
}

fn sigma_order(s: &[usize]) -> usize {
    let mut p = s.to_vec();
    let mut k = 1;
    while p.iter().enumerate().any(|(i, &v)| i != v) {
        p = p.iter().map(|&v| s[v]).collect();
        k += 1;
    }
    k
}

fn c7_derived() -> Outcome {
    let ders = regular_catalog_derivations();
    let mut periods = Vec::new();
    for d in &ders {
        let x = d.base();
        let name = x.name();
        let general = derived_action_general(d).map_err(|e| format!("{name}: {e}"))?;
        let regular = derived_action_regular(d).map_err(|e| format!("{name}: {e}"))?;
        ensure(general == regular, || format!("{name}: actions differ"))?;
        let y = derived_crossed_module(d).map_err(|e| format!("{name}: {e}"))?;
        ensure(validate_crossed_module(y.alpha().map(), y.action()).unwrap().is_valid(), || format!("{name}: α_d invalid"))?;
        let iso = derived_iso(d).map_err(|e| format!("{name}: {e}"))?;
        let r = check_xmod_morphism(iso.source(), iso.target(), iso.f1().map(), iso.f0().map()).unwrap();
        ensure(r.is_valid() && iso.is_bijective() && is_covering(&iso).unwrap(), || format!("{name}: (1, σ⁻¹)"))?;
        let chain = iterate_chain(d, 64).map_err(|e| format!("{name}: {e}"))?;
        let ord = sigma_order(d.sigma());
        let p = chain.period.ok_or_else(|| format!("{name}: no period"))?;
        ensure(ord.is_multiple_of(p), || format!("{name}: period {p}, ord {ord}"))?;
        let mut expected = x.alpha().map().to_vec();
        let sinv = invert(d.sigma());
        for (k, stage) in chain.stages.iter().enumerate() {
            ensure(stage.xmod.alpha().map() == expected.as_slice(), || format!("{name}: stage {k} boundary"))?;
            ensure(validate_crossed_module(stage.xmod.alpha().map(), stage.xmod.action()).unwrap().is_valid(), || {
                format!("{name}: stage {k} invalid")
            })?;
            ensure(stage.link.is_bijective(), || format!("{name}: link {k} not bijective"))?;
            expected = expected.iter().map(|&b| sinv[b]).collect();
        }
        periods.push(p);
    }
    let max = periods.iter().max().copied().unwrap_or(0);
    Ok(format!("{} regular derivations, largest period {max}", ders.len()))
}

fn c8_lemma_probe() -> Outcome {
    let x = catalog::xmod("Z2-zero-trivial").unwrap();
    let flagged: Vec<Derivation> = enumerate_derivations(&x, DEFAULT_BUDGET)
        .unwrap()
        .into_iter()
        .filter(|d| kernel_image_predicate(d) && !d.is_zero())
        .collect();
    ensure(flagged.len() == 1 && flagged[0].table() == [0, 1], || format!("{} flagged", flagged.len()))?;
    let out = run_cli(&["derivations", "--xmod", "Z2-zero-trivial", "--json"]);
    let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let probe = &v["findings"]["kernel_image_probe"];
    ensure(probe["flagged"] == true && probe["counterexamples"][0] == serde_json::json!([0, 1]), || {
        format!("report: {probe}")
    })?;
    Ok("d = [0, 1] on (Z2, Z2, 0, trivial) is a nonzero derivation with image in ker α; reported as flagged".into())
}

fn run_cli(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_xmodlab")).args(args).output().expect("binary runs");
    String::from_utf8(out.stdout).expect("utf-8")
}

fn strip_timing(s: &str) -> Value {
    let mut v: Value = serde_json::from_str(s).unwrap_or(Value::String(s.to_string()));
    if let Some(o) = v.as_object_mut() {
        o.remove("timing_ms");
    }
    v
}

fn full_suite() -> Vec<Value> {
    let mut runs: Vec<Vec<String>> = vec![vec!["catalog".into(), "list".into()]];
    for name in catalog::names_of(Kind::Xmod) {
        for cmd in ["to-groupoid", "roundtrip", "derivations", "whitehead", "derive-chain"] {
            runs.push(vec![cmd.into(), "--xmod".into(), name.clone()]);
        }
        let last = enumerate_derivations(&catalog::xmod(&name).unwrap(), DEFAULT_BUDGET).unwrap().len() - 1;
        runs.push(vec!["derive".into(), "--xmod".into(), name.clone(), "--index".into(), last.to_string()]);
    }
    for name in catalog::names_of(Kind::Groupoid) {
        runs.push(vec!["from-groupoid".into(), "--groupoid".into(), name.clone()]);
        runs.push(vec!["roundtrip".into(), "--groupoid".into(), name.clone()]);
    }
    for (name, _) in catalog::names() {
        runs.push(vec!["catalog".into(), "show".into(), name]);
    }
    runs.iter()
        .map(|r| {
            let mut args: Vec<&str> = r.iter().map(String::as_str).collect();
            args.push("--json");
            strip_timing(&run_cli(&args))
        })
        .collect()
}

fn c9_determinism() -> Outcome {
    let first = full_suite();
    let second = full_suite();
    ensure(first.len() == second.len(), || "run counts differ".into())?;
    for (i, (a, b)) in first.iter().zip(&second).enumerate() {
        ensure(a == b, || format!("report {i} differs"))?;
    }
    let statuses: Vec<&Value> = first.iter().map(|v| &v["status"]).collect();
    let errors = statuses.iter().filter(|s| **s == "error").count();
    ensure(errors == 0, || format!("{errors} reports have status error"))?;
    Ok(format!("{} reports identical across two runs", first.len()))
}

type Criterion = (&'static str, &'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1", "derived actions ⇔ semidirect product", 10, c1_orzech),
        ("2", "δ/θ round trips on the catalog", 30, c2_porter),
        ("3", "interchange law and inverse formula", 60, c3_interchange),
        ("4", "homotopies ⇔ natural isomorphisms", 60, c4_homotopy),
        ("5", "Whitehead structure of (Zn, Zn, id, trivial)", 60, c5_whitehead),
        ("6", "inverse formulas agree", 10, c6_inverse),
        ("7", "derived crossed modules and chains", 30, c7_derived),
        ("8", "kernel-image probe", 1, c8_lemma_probe),
        ("9", "deterministic JSON reports", u64::MAX, c9_determinism),
    ];
    let mut failed = 0;
    for (id, title, limit, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{detail}; took {:.2} s, limit {limit} s", elapsed.as_secs_f64()))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("PASS [{id}] {title} ({:.2} s): {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL [{id}] {title} ({:.2} s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
