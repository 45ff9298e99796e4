//! Finite groups with operations, stored as integer operation tables.
//!
//! Elements of an algebra of order `n` are the indices `0..n`; index 0 is
//! always the additive zero. Besides `+`, `-` and `0` an algebra carries a
//! list of extra binary operations, each paired with its opposite
//! (`a *° b = b * a`), and a list of extra unary operations.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::report::{first_failure, ValidationReport};

/// Names the additive structure owns; extra operations may not reuse them.
pub const RESERVED_NAMES: [&str; 3] = ["+", "-", "0"];

/// Default bound on the number of candidate assignments an enumeration may try.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A dense row-major table of element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Table {
    rows: usize,
    cols: usize,
    data: Vec<usize>,
}

impl Table {
    pub fn new(rows: usize, cols: usize, data: Vec<usize>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims("table", rows * cols, data.len()));
        }
        Ok(Table { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> usize) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Table { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<usize>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::dims("table row", cols, row.len()));
            }
            data.extend(row);
        }
        Ok(Table {
            rows: n,
            cols,
            data,
        })
    }

    pub fn filled(rows: usize, cols: usize, value: usize) -> Self {
        Table {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> usize {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: usize) {
        self.data[r * self.cols + c] = value;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[usize] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    fn max_entry(&self) -> Option<usize> {
        self.data.iter().copied().max()
    }
}

/// Names of the extra operations of a category of groups with operations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Signature {
    binary: Vec<String>,
    opposite: Vec<usize>,
    unary: Vec<String>,
}

impl Signature {
    /// The signature of plain groups: no extra operations.
    pub fn groups() -> Self {
        Signature::default()
    }

    /// One self-opposite multiplication `mul`, as for commutative rings.
    pub fn commutative_ring() -> Self {
        Signature::new(vec![("mul".into(), "mul".into())], vec![]).expect("static signature")
    }

    /// Builds a signature from `(op, opposite)` pairs and unary names.
    pub fn new(binary: Vec<(String, String)>, unary: Vec<String>) -> Result<Self> {
        let names: Vec<String> = binary.iter().map(|(n, _)| n.clone()).collect();
        let mut seen = BTreeSet::new();
        for n in names.iter().chain(unary.iter()) {
            if RESERVED_NAMES.contains(&n.as_str()) {
                return Err(Error::MalformedSignature(format!(
                    "`{n}` is reserved for the group structure"
                )));
            }
            if n.is_empty() || n.chars().any(char::is_whitespace) {
                return Err(Error::MalformedSignature(format!("bad operation name `{n}`")));
            }
            if !seen.insert(n.clone()) {
                return Err(Error::MalformedSignature(format!("duplicate name `{n}`")));
            }
        }
        let mut opposite = Vec::with_capacity(binary.len());
        for (n, opp) in &binary {
            let Some(j) = names.iter().position(|m| m == opp) else {
                return Err(Error::MalformedSignature(format!(
                    "opposite `{opp}` of `{n}` is not a binary operation"
                )));
            };
            opposite.push(j);
        }
        for (i, &j) in opposite.iter().enumerate() {
            if opposite[j] != i {
                return Err(Error::MalformedSignature(format!(
                    "opposite pairing is not an involution at `{}`",
                    names[i]
                )));
            }
        }
        Ok(Signature {
            binary: names,
            opposite,
            unary,
        })
    }

    pub fn binary_ops(&self) -> &[String] {
        &self.binary
    }

    pub fn unary_ops(&self) -> &[String] {
        &self.unary
    }

    pub fn opposite(&self, op: usize) -> usize {
        self.opposite[op]
    }

    pub fn binary_index(&self, name: &str) -> Option<usize> {
        self.binary.iter().position(|n| n == name)
    }

    pub fn unary_index(&self, name: &str) -> Option<usize> {
        self.unary.iter().position(|n| n == name)
    }

    pub fn is_groups(&self) -> bool {
        self.binary.is_empty() && self.unary.is_empty()
    }
}

/// Unvalidated tables of a candidate algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraTables {
    pub name: String,
    pub signature: Signature,
    pub order: usize,
    pub add: Table,
    pub neg: Vec<usize>,
    pub binary: Vec<Table>,
    pub unary: Vec<Vec<usize>>,
}

impl AlgebraTables {
    /// Checks sizes and ranges; this is the malformed-input layer below axiom checking.
    pub fn check_shape(&self) -> Result<()> {
        let n = self.order;
        let name = &self.name;
        if n == 0 {
            return Err(Error::dims(format!("{name}: order"), 1, 0));
        }
        check_square(&self.add, n, &format!("{name}: add"))?;
        check_row(&self.neg, n, n, &format!("{name}: neg"))?;
        if self.binary.len() != self.signature.binary_ops().len() {
            return Err(Error::dims(
                format!("{name}: binary tables"),
                self.signature.binary_ops().len(),
                self.binary.len(),
            ));
        }
        for (t, op) in self.binary.iter().zip(self.signature.binary_ops()) {
            check_square(t, n, &format!("{name}: {op}"))?;
        }
        if self.unary.len() != self.signature.unary_ops().len() {
            return Err(Error::dims(
                format!("{name}: unary tables"),
                self.signature.unary_ops().len(),
                self.unary.len(),
            ));
        }
        for (t, op) in self.unary.iter().zip(self.signature.unary_ops()) {
            check_row(t, n, n, &format!("{name}: {op}"))?;
        }
        Ok(())
    }

    /// Renumbers the carrier so that the additive identity becomes index 0.
    ///
    /// Returns `None` when the addition table has no two-sided identity or it
    /// is already at index 0.
    pub fn with_zero_first(&self) -> Option<AlgebraTables> {
        let n = self.order;
        let e = (0..n).find(|&e| (0..n).all(|a| self.add.get(e, a) == a && self.add.get(a, e) == a))?;
        if e == 0 {
            return None;
        }
        let swap = |x: usize| {
            if x == 0 {
                e
            } else if x == e {
                0
            } else {
                x
            }
        };
        let table2 = |t: &Table| Table::from_fn(n, n, |a, b| swap(t.get(swap(a), swap(b))));
        let table1 = |t: &[usize]| (0..n).map(|a| swap(t[swap(a)])).collect::<Vec<_>>();
        Some(AlgebraTables {
            name: self.name.clone(),
            signature: self.signature.clone(),
            order: n,
            add: table2(&self.add),
            neg: table1(&self.neg),
            binary: self.binary.iter().map(table2).collect(),
            unary: self.unary.iter().map(|t| table1(t)).collect(),
        })
    }
}

fn check_square(t: &Table, n: usize, what: &str) -> Result<()> {
    if t.rows() != n || t.cols() != n {
        return Err(Error::dims(what, n * n, t.rows() * t.cols()));
    }
    check_range(t.max_entry(), n, what)
}

fn check_row(t: &[usize], len: usize, order: usize, what: &str) -> Result<()> {
    if t.len() != len {
        return Err(Error::dims(what, len, t.len()));
    }
    check_range(t.iter().copied().max(), order, what)
}

pub(crate) fn check_range(max: Option<usize>, order: usize, what: &str) -> Result<()> {
    match max {
        Some(v) if v >= order => Err(Error::IndexOutOfRange {
            what: what.to_owned(),
            value: v,
            order,
        }),
        _ => Ok(()),
    }
}

/// Lexicographic iterator over `0..n` tuples of length `k`.
pub(crate) fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    tuples_mixed(vec![n; k])
}

/// Lexicographic iterator over tuples whose i-th entry lies in `0..bounds[i]`.
pub(crate) fn tuples_mixed(bounds: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let empty = bounds.contains(&0);
    let mut next = if empty { None } else { Some(vec![0; bounds.len()]) };
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < bounds[i] {
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

/// Checks every axiom of a group with operations.
///
/// Shape problems are errors; axiom failures are report entries.
pub fn validate_algebra(t: &AlgebraTables) -> Result<ValidationReport> {
    t.check_shape()?;
    let n = t.order;
    let add = |a: usize, b: usize| t.add.get(a, b);
    let mut r = ValidationReport::new();

    first_failure(&mut r, "identity", None, tuples(n, 1), |w| {
        add(0, w[0]) == w[0] && add(w[0], 0) == w[0]
    });
    first_failure(&mut r, "inverse", None, tuples(n, 1), |w| {
        add(w[0], t.neg[w[0]]) == 0 && add(t.neg[w[0]], w[0]) == 0
    });
    first_failure(&mut r, "associativity", None, tuples(n, 3), |w| {
        add(add(w[0], w[1]), w[2]) == add(w[0], add(w[1], w[2]))
    });

    let sig = &t.signature;
    for (k, op) in sig.binary_ops().iter().enumerate() {
        let m = &t.binary[k];
        let opp = &t.binary[sig.opposite(k)];
        first_failure(&mut r, "distributivity", Some(op), tuples(n, 3), |w| {
            m.get(w[0], add(w[1], w[2])) == add(m.get(w[0], w[1]), m.get(w[0], w[2]))
        });
        first_failure(&mut r, "opposite", Some(op), tuples(n, 2), |w| {
            opp.get(w[0], w[1]) == m.get(w[1], w[0])
        });
    }
    for (u, uop) in sig.unary_ops().iter().enumerate() {
        let w1 = &t.unary[u];
        first_failure(&mut r, "unary-additivity", Some(uop), tuples(n, 2), |w| {
            w1[add(w[0], w[1])] == add(w1[w[0]], w1[w[1]])
        });
        for (k, op) in sig.binary_ops().iter().enumerate() {
            let m = &t.binary[k];
            first_failure(
                &mut r,
                "unary-product",
                Some(&format!("{uop},{op}")),
                tuples(n, 2),
                |w| m.get(w1[w[0]], w[1]) == w1[m.get(w[0], w[1])],
            );
        }
    }
    Ok(r)
}

/// A validated finite group with operations.
#[derive(Clone, Debug)]
pub struct OmegaAlgebra {
    tables: AlgebraTables,
}

impl PartialEq for OmegaAlgebra {
    /// Structural equality; the display name is ignored.
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = (&self.tables, &other.tables);
        a.signature == b.signature
            && a.order == b.order
            && a.add == b.add
            && a.neg == b.neg
            && a.binary == b.binary
            && a.unary == b.unary
    }
}

impl Eq for OmegaAlgebra {}

impl fmt::Display for OmegaAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.tables.name, self.tables.order)
    }
}

impl OmegaAlgebra {
    pub fn new(tables: AlgebraTables) -> Result<Self> {
        let report = validate_algebra(&tables)?;
        if !report.is_valid() {
            return Err(Error::InvalidAlgebra {
                name: tables.name,
                report,
            });
        }
        Ok(OmegaAlgebra { tables })
    }

    /// Builds a plain group from its addition table, computing negation.
    pub fn group(name: impl Into<String>, add: Table) -> Result<Self> {
        let n = add.rows();
        let neg = (0..n)
            .map(|a| (0..n).find(|&b| add.get(a, b) == 0).unwrap_or(0))
            .collect();
        OmegaAlgebra::new(AlgebraTables {
            name: name.into(),
            signature: Signature::groups(),
            order: n,
            add,
            neg,
            binary: vec![],
            unary: vec![],
        })
    }

    /// The one-element algebra of the given signature.
    pub fn trivial(name: impl Into<String>, signature: Signature) -> Self {
        let tables = AlgebraTables {
            name: name.into(),
            binary: vec![Table::filled(1, 1, 0); signature.binary_ops().len()],
            unary: vec![vec![0]; signature.unary_ops().len()],
            signature,
            order: 1,
            add: Table::filled(1, 1, 0),
            neg: vec![0],
        };
        OmegaAlgebra { tables }
    }

    pub fn tables(&self) -> &AlgebraTables {
        &self.tables
    }

    pub fn name(&self) -> &str {
        &self.tables.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        let mut tables = self.tables.clone();
        tables.name = name.into();
        OmegaAlgebra { tables }
    }

    pub fn signature(&self) -> &Signature {
        &self.tables.signature
    }

    pub fn order(&self) -> usize {
        self.tables.order
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.tables.order
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.tables.add.get(a, b)
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.tables.neg[a]
    }

    /// `a - b`, i.e. `a + (-b)`.
    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// `x + a - x`.
    #[inline]
    pub fn conj(&self, x: usize, a: usize) -> usize {
        self.sub(self.add(x, a), x)
    }

    #[inline]
    pub fn op(&self, k: usize, a: usize, b: usize) -> usize {
        self.tables.binary[k].get(a, b)
    }

    #[inline]
    pub fn unop(&self, u: usize, a: usize) -> usize {
        self.tables.unary[u][a]
    }

    pub fn is_abelian(&self) -> bool {
        tuples(self.order(), 2).all(|w| self.add(w[0], w[1]) == self.add(w[1], w[0]))
    }

    /// Additive order of an element.
    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.add(x, a);
            k += 1;
        }
        k
    }

    /// Greedy additive generating set: each new generator is the smallest
    /// element outside the subgroup generated so far.
    pub fn generators(&self) -> Vec<usize> {
        let n = self.order();
        let mut gens = Vec::new();
        let mut inside = vec![false; n];
        inside[0] = true;
        for x in 0..n {
            if inside[x] {
                continue;
            }
            gens.push(x);
            let mut queue: VecDeque<usize> = (0..n).filter(|&y| inside[y]).collect();
            while let Some(y) = queue.pop_front() {
                for &g in &gens {
                    let z = self.add(y, g);
                    if !inside[z] {
                        inside[z] = true;
                        queue.push_back(z);
                    }
                }
            }
        }
        gens
    }

    pub fn same_signature(&self, other: &OmegaAlgebra) -> Result<()> {
        if self.signature() != other.signature() {
            return Err(Error::SignatureMismatch(format!(
                "`{}` and `{}` have different operation signatures",
                self.name(),
                other.name()
            )));
        }
        Ok(())
    }
}

/// Direct product `A × B`; the pair `(a, b)` has index `a * |B| + b`.
pub fn direct_product(a: &OmegaAlgebra, b: &OmegaAlgebra, name: impl Into<String>) -> Result<OmegaAlgebra> {
    a.same_signature(b)?;
    let nb = b.order();
    let n = a.order() * nb;
    let split = |x: usize| (x / nb, x % nb);
    let join = |x: usize, y: usize| x * nb + y;
    let pairwise = |f: &dyn Fn(usize, usize, usize, usize) -> usize| {
        Table::from_fn(n, n, |x, y| {
            let ((x1, x2), (y1, y2)) = (split(x), split(y));
            f(x1, x2, y1, y2)
        })
    };
    let add = pairwise(&|x1, x2, y1, y2| join(a.add(x1, y1), b.add(x2, y2)));
    let binary = (0..a.signature().binary_ops().len())
        .map(|k| pairwise(&|x1, x2, y1, y2| join(a.op(k, x1, y1), b.op(k, x2, y2))))
        .collect();
    let unary = (0..a.signature().unary_ops().len())
        .map(|u| {
            (0..n)
                .map(|x| {
                    let (x1, x2) = split(x);
                    join(a.unop(u, x1), b.unop(u, x2))
                })
                .collect()
        })
        .collect();
    OmegaAlgebra::new(AlgebraTables {
        name: name.into(),
        signature: a.signature().clone(),
        order: n,
        add,
        neg: (0..n)
            .map(|x| {
                let (x1, x2) = split(x);
                join(a.neg(x1), b.neg(x2))
            })
            .collect(),
        binary,
        unary,
    })
}

/// Checks that `map` preserves `0`, `+` and every extra operation.
pub fn check_morphism(map: &[usize], source: &OmegaAlgebra, target: &OmegaAlgebra) -> Result<ValidationReport> {
    source.same_signature(target)?;
    if map.len() != source.order() {
        return Err(Error::dims("morphism map", source.order(), map.len()));
    }
    check_range(map.iter().copied().max(), target.order(), "morphism map")?;
    let n = source.order();
    let mut r = ValidationReport::new();
    if map[0] != 0 {
        r.push_note("zero-preservation", None, vec![0], "zero not preserved");
    }
    first_failure(&mut r, "additivity", None, tuples(n, 2), |w| {
        map[source.add(w[0], w[1])] == target.add(map[w[0]], map[w[1]])
    });
    for (k, op) in source.signature().binary_ops().iter().enumerate() {
        first_failure(&mut r, "binary", Some(op), tuples(n, 2), |w| {
            map[source.op(k, w[0], w[1])] == target.op(k, map[w[0]], map[w[1]])
        });
    }
    for (u, op) in source.signature().unary_ops().iter().enumerate() {
        first_failure(&mut r, "unary", Some(op), tuples(n, 1), |w| {
            map[source.unop(u, w[0])] == target.unop(u, map[w[0]])
        });
    }
    Ok(r)
}

/// A validated morphism between two algebras of the same signature.
#[derive(Clone, Debug)]
pub struct AlgMorphism {
    source: Arc<OmegaAlgebra>,
    target: Arc<OmegaAlgebra>,
    map: Vec<usize>,
}

impl PartialEq for AlgMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map && self.source == other.source && self.target == other.target
    }
}

impl Eq for AlgMorphism {}

impl AlgMorphism {
    pub fn new(source: Arc<OmegaAlgebra>, target: Arc<OmegaAlgebra>, map: Vec<usize>) -> Result<Self> {
        let report = check_morphism(&map, &source, &target)?;
        if !report.is_valid() {
            return Err(Error::InvalidMorphism(report));
        }
        Ok(AlgMorphism { source, target, map })
    }

    pub(crate) fn new_unchecked(source: Arc<OmegaAlgebra>, target: Arc<OmegaAlgebra>, map: Vec<usize>) -> Self {
        AlgMorphism { source, target, map }
    }

    pub fn identity(a: &Arc<OmegaAlgebra>) -> Self {
        AlgMorphism {
            source: a.clone(),
            target: a.clone(),
            map: a.elements().collect(),
        }
    }

    pub fn zero(source: &Arc<OmegaAlgebra>, target: &Arc<OmegaAlgebra>) -> Result<Self> {
        source.same_signature(target)?;
        Ok(AlgMorphism {
            source: source.clone(),
            target: target.clone(),
            map: vec![0; source.order()],
        })
    }

    pub fn source(&self) -> &Arc<OmegaAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<OmegaAlgebra> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &AlgMorphism) -> Result<AlgMorphism> {
        if *first.target != *self.source {
            return Err(Error::NotComposable(format!(
                "target `{}` differs from source `{}`",
                first.target.name(),
                self.source.name()
            )));
        }
        Ok(AlgMorphism {
            source: first.source.clone(),
            target: self.target.clone(),
            map: first.map.iter().map(|&x| self.map[x]).collect(),
        })
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target.order()];
        self.map.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.order()];
        for &y in &self.map {
            seen[y] = true;
        }
        seen.into_iter().all(|s| s)
    }

    pub fn is_bijective(&self) -> bool {
        self.source.order() == self.target.order() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<AlgMorphism> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        // The inverse of a bijective morphism of finite Ω-groups is a morphism.
        Some(AlgMorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            map: inv,
        })
    }

    /// First pair `x < y` with equal images, if any.
    pub fn collision(&self) -> Option<(usize, usize)> {
        let mut first = vec![usize::MAX; self.target.order()];
        for (x, &y) in self.map.iter().enumerate() {
            if first[y] != usize::MAX {
                return Some((first[y], x));
            }
            first[y] = x;
        }
        None
    }
}

/// Number of candidate assignments `base^exp`, saturating.
pub(crate) fn candidate_count(base: usize, exp: usize) -> u128 {
    (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX)
}

pub(crate) fn check_budget(base: usize, exp: usize, budget: u64) -> Result<()> {
    let needed = candidate_count(base, exp);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// Extends an assignment on generators along `x + g ↦ step(x, g, value(x))`.
///
/// Returns `None` when two words for the same element disagree.
pub(crate) fn propagate(
    source: &OmegaAlgebra,
    gens: &[usize],
    mut step: impl FnMut(usize, usize, usize) -> usize,
) -> Option<Vec<usize>> {
    let n = source.order();
    let mut value: Vec<Option<usize>> = vec![None; n];
    value[0] = Some(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let vx = value[x].expect("queued elements are assigned");
        for (i, &g) in gens.iter().enumerate() {
            let y = source.add(x, g);
            let vy = step(x, i, vx);
            match value[y] {
                Some(existing) if existing != vy => return None,
                Some(_) => {}
                None => {
                    value[y] = Some(vy);
                    queue.push_back(y);
                }
            }
        }
    }
    value.into_iter().collect()
}

/// All morphisms `source → target`, in lexicographic order of their map tables.
pub fn enumerate_morphisms(
    source: &Arc<OmegaAlgebra>,
    target: &Arc<OmegaAlgebra>,
    budget: u64,
) -> Result<Vec<AlgMorphism>> {
    source.same_signature(target)?;
    let gens = source.generators();
    check_budget(target.order(), gens.len(), budget)?;
    let mut out = Vec::new();
    for images in tuples(target.order(), gens.len()) {
        let Some(map) = propagate(source, &gens, |_, i, vx| target.add(vx, images[i])) else {
            continue;
        };
        if check_morphism(&map, source, target)?.is_valid() {
            out.push(AlgMorphism::new_unchecked(source.clone(), target.clone(), map));
        }
    }
    out.sort_by(|f, g| f.map.cmp(&g.map));
    Ok(out)
}

/// All automorphisms of `a`, verified closed under composition and inverses.
///
/// The identity comes first since it is the lexicographically least bijection.
pub fn automorphism_group(a: &Arc<OmegaAlgebra>, budget: u64) -> Result<Vec<AlgMorphism>> {
    let auts: Vec<AlgMorphism> = enumerate_morphisms(a, a, budget)?
        .into_iter()
        .filter(AlgMorphism::is_bijective)
        .collect();
    let index = |m: &[usize]| auts.iter().position(|f| f.map == m);
    for f in &auts {
        for g in &auts {
            let fg: Vec<usize> = g.map.iter().map(|&x| f.map[x]).collect();
            if index(&fg).is_none() {
                return Err(Error::InternalInconsistency(format!(
                    "automorphisms of `{}` not closed under composition",
                    a.name()
                )));
            }
        }
        let inv = f.inverse().expect("bijective");
        if index(&inv.map).is_none() {
            return Err(Error::InternalInconsistency(format!(
                "automorphisms of `{}` not closed under inverses",
                a.name()
            )));
        }
    }
    Ok(auts)
}

/// Cayley table of composition for a list of endomorphisms closed under composition.
pub fn composition_table(maps: &[AlgMorphism]) -> Result<Table> {
    let mut data = Vec::with_capacity(maps.len() * maps.len());
    for f in maps {
        for g in maps {
            let fg: Vec<usize> = g.map.iter().map(|&x| f.map[x]).collect();
            let k = maps.iter().position(|h| h.map == fg).ok_or_else(|| {
                Error::InternalInconsistency("endomorphism list not closed under composition".into())
            })?;
            data.push(k);
        }
    }
    Table::new(maps.len(), maps.len(), data)
}

/// Builds the subalgebra carried by `subset` (sorted ascending, containing 0)
/// together with its inclusion, checking closure under every operation.
pub fn subalgebra(a: &Arc<OmegaAlgebra>, subset: &[usize], name: impl Into<String>) -> Result<(Arc<OmegaAlgebra>, AlgMorphism)> {
    let name = name.into();
    let mut index = vec![usize::MAX; a.order()];
    for (i, &x) in subset.iter().enumerate() {
        index[x] = i;
    }
    if subset.first() != Some(&0) {
        return Err(Error::InternalInconsistency(format!("`{name}` does not contain 0")));
    }
    let m = subset.len();
    let pull = |x: usize| -> Result<usize> {
        match index[x] {
            usize::MAX => Err(Error::InternalInconsistency(format!(
                "`{name}` is not closed: element {x} escapes"
            ))),
            i => Ok(i),
        }
    };
    let table = |f: &dyn Fn(usize, usize) -> usize| -> Result<Table> {
        let mut data = Vec::with_capacity(m * m);
        for &x in subset {
            for &y in subset {
                data.push(pull(f(x, y))?);
            }
        }
        Table::new(m, m, data)
    };
    let sig = a.signature();
    let add = table(&|x, y| a.add(x, y))?;
    let binary = (0..sig.binary_ops().len())
        .map(|k| table(&|x, y| a.op(k, x, y)))
        .collect::<Result<Vec<_>>>()?;
    let neg = subset.iter().map(|&x| pull(a.neg(x))).collect::<Result<Vec<_>>>()?;
    let unary = (0..sig.unary_ops().len())
        .map(|u| subset.iter().map(|&x| pull(a.unop(u, x))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let sub = Arc::new(OmegaAlgebra::new(AlgebraTables {
        name,
        signature: sig.clone(),
        order: m,
        add,
        neg,
        binary,
        unary,
    })?);
    let inclusion = AlgMorphism::new(sub.clone(), a.clone(), subset.to_vec())?;
    Ok((sub, inclusion))
}

/// Kernel of a morphism with its inclusion; elements keep their relative order.
pub fn kernel_of(f: &AlgMorphism) -> Result<(Arc<OmegaAlgebra>, AlgMorphism)> {
    let subset: Vec<usize> = f.source().elements().filter(|&x| f.apply(x) == 0).collect();
    subalgebra(f.source(), &subset, format!("ker({})", f.source().name()))
}

/// Finds an isomorphism between two algebras, if one exists.
pub fn find_isomorphism(a: &Arc<OmegaAlgebra>, b: &Arc<OmegaAlgebra>, budget: u64) -> Result<Option<AlgMorphism>> {
    if a.order() != b.order() || a.signature() != b.signature() {
        return Ok(None);
    }
    Ok(enumerate_morphisms(a, b, budget)?
        .into_iter()
        .find(AlgMorphism::is_bijective))
}
