//! Line-oriented text formats.
//!
//! A file is a sequence of blocks, each opened by one of the keywords
//! `algebra`, `action`, `xmod`, `groupoid`, `xmorph` or `homotopy`.
//! Blank lines and everything after `#` are ignored. Algebra tables may put
//! the additive identity at any index; such algebras are renumbered so that
//! it becomes 0, and tables of other blocks that refer to them are
//! translated accordingly.
//!
//! ```text
//! algebra Z2            action triv        xmod X          groupoid G
//! order 2               actor Z2           A Z2            C1 E
//! binops 0              acted Z2           B Z2            C0 Z2
//! unops 0               dot                alpha           d0
//! add                   0 1                0 1             ...
//! 0 1                   0 1                action triv
//! 1 0
//! neg                   xmorph f           homotopy h
//! 0 1                   source X           from f
//!                       target X           to f
//!                       f1 / row           d / row
//!                       f0 / row
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::action::ActionSet;
use crate::algebra::{AlgebraTables, OmegaAlgebra, Signature, Table};
use crate::catalog;
use crate::error::{Error, Result};
use crate::groupoid::InternalGroupoid;
use crate::homotopy::XModHomotopy;
use crate::xmod::{CrossedModule, XModMorphism};

const KEYWORDS: [&str; 6] = ["algebra", "action", "xmod", "groupoid", "xmorph", "homotopy"];

/// A table read from a file: consecutive numeric lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawRows {
    pub line: usize,
    pub rows: Vec<Vec<usize>>,
    /// Line number of each row.
    pub row_lines: Vec<usize>,
}

impl RawRows {
    fn row_line(&self, i: usize) -> usize {
        self.row_lines.get(i).copied().unwrap_or(self.line)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NameRef {
    pub line: usize,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawAction {
    pub actor: NameRef,
    pub acted: NameRef,
    pub dot: RawRows,
    pub ops: Vec<(String, RawRows)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawXmod {
    pub a: NameRef,
    pub b: NameRef,
    pub alpha: RawRows,
    pub action: NameRef,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawGroupoid {
    pub c1: NameRef,
    pub c0: NameRef,
    pub d0: RawRows,
    pub d1: RawRows,
    pub eps: RawRows,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawXMorph {
    pub source: NameRef,
    pub target: NameRef,
    pub f1: RawRows,
    pub f0: RawRows,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawHomotopy {
    pub from: NameRef,
    pub to: NameRef,
    pub d: RawRows,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockBody {
    /// Tables exactly as written, before renumbering.
    Algebra(AlgebraTables),
    Action(RawAction),
    Xmod(RawXmod),
    Groupoid(RawGroupoid),
    XMorph(RawXMorph),
    Homotopy(RawHomotopy),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub line: usize,
    pub body: BlockBody,
}

impl Block {
    pub fn keyword(&self) -> &'static str {
        match self.body {
            BlockBody::Algebra(_) => "algebra",
            BlockBody::Action(_) => "action",
            BlockBody::Xmod(_) => "xmod",
            BlockBody::Groupoid(_) => "groupoid",
            BlockBody::XMorph(_) => "xmorph",
            BlockBody::Homotopy(_) => "homotopy",
        }
    }
}

struct Cursor<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        let last = text.lines().count() + 1;
        Cursor { lines, pos: 0, last }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.lines.get(self.pos)
    }

    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.lines.get(self.pos) {
            Some(l) => {
                self.pos += 1;
                Ok(l.clone())
            }
            None => Err(Error::parse(self.last, format!("unexpected end of input, expected {what}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line, toks) = self.next(&format!("`{kw}`"))?;
        if toks[0] != kw {
            return Err(Error::parse(line, format!("expected `{kw}`, found `{}`", toks[0])));
        }
        Ok((line, toks))
    }

    fn keyword_arg(&mut self, kw: &str) -> Result<NameRef> {
        let (line, toks) = self.keyword(kw)?;
        if toks.len() != 2 {
            return Err(Error::parse(line, format!("`{kw}` takes exactly one argument")));
        }
        Ok(NameRef {
            line,
            name: toks[1].to_string(),
        })
    }

    fn keyword_count(&mut self, kw: &str) -> Result<(usize, usize)> {
        let r = self.keyword_arg(kw)?;
        let n = r
            .name
            .parse()
            .map_err(|_| Error::parse(r.line, format!("`{kw}` needs a non-negative integer")))?;
        Ok((r.line, n))
    }

    fn numeric_ahead(&self) -> bool {
        self.peek().is_some_and(|(_, t)| t[0].parse::<usize>().is_ok())
    }

    fn numbers(line: usize, toks: &[&str]) -> Result<Vec<usize>> {
        toks.iter()
            .map(|t| t.parse().map_err(|_| Error::parse(line, format!("`{t}` is not an element index"))))
            .collect()
    }

    /// Consecutive numeric lines following a keyword line.
    fn rows_after(&mut self, kw: &str) -> Result<RawRows> {
        let (line, toks) = self.keyword(kw)?;
        if toks.len() != 1 {
            return Err(Error::parse(line, format!("`{kw}` takes no argument")));
        }
        let (mut rows, mut row_lines) = (Vec::new(), Vec::new());
        while self.numeric_ahead() {
            let (l, t) = self.next("row")?;
            rows.push(Self::numbers(l, &t)?);
            row_lines.push(l);
        }
        Ok(RawRows { line, rows, row_lines })
    }

    /// Exactly `n` rows of `len` entries.
    fn fixed_rows(&mut self, n: usize, len: usize, what: &str) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(n * len);
        for _ in 0..n {
            let (line, toks) = self.next(&format!("a row of `{what}`"))?;
            let row = Self::numbers(line, &toks)?;
            if row.len() != len {
                return Err(Error::parse(line, format!("`{what}` row has {} entries, expected {len}", row.len())));
            }
            out.extend(row);
        }
        Ok(out)
    }

    fn at_block_start(&self) -> bool {
        self.peek().is_some_and(|(_, t)| KEYWORDS.contains(&t[0]))
    }
}

fn parse_algebra_body(c: &mut Cursor, name: &str) -> Result<AlgebraTables> {
    let (oline, n) = c.keyword_count("order")?;
    if n == 0 {
        return Err(Error::parse(oline, "order must be positive"));
    }
    let (bline, k) = c.keyword_count("binops")?;
    let mut binary = Vec::with_capacity(k);
    for _ in 0..k {
        let (line, toks) = c.next("`<op> <opposite>`")?;
        if toks.len() != 2 {
            return Err(Error::parse(line, "expected `<op> <opposite>`"));
        }
        binary.push((toks[0].to_string(), toks[1].to_string()));
    }
    let (uline, m) = c.keyword_count("unops")?;
    let mut unary = Vec::with_capacity(m);
    while unary.len() < m {
        let (_, toks) = c.next("unary operation names")?;
        unary.extend(toks.iter().map(|t| t.to_string()));
    }
    if unary.len() != m {
        return Err(Error::parse(uline, format!("expected {m} unary operation names, found {}", unary.len())));
    }
    let signature = Signature::new(binary, unary).map_err(|e| Error::parse(bline, e.to_string()))?;
    c.keyword("add")?;
    let add = Table::new(n, n, c.fixed_rows(n, n, "add")?)?;
    c.keyword("neg")?;
    let neg = c.fixed_rows(1, n, "neg")?;
    let mut tables = Vec::new();
    for op in signature.binary_ops() {
        c.keyword(op)?;
        tables.push(Table::new(n, n, c.fixed_rows(n, n, op)?)?);
    }
    let mut unary_tables = Vec::new();
    for op in signature.unary_ops() {
        c.keyword(op)?;
        unary_tables.push(c.fixed_rows(1, n, op)?);
    }
    let t = AlgebraTables {
        name: name.to_string(),
        signature,
        order: n,
        add,
        neg,
        binary: tables,
        unary: unary_tables,
    };
    t.check_shape().map_err(|e| Error::parse(oline, e.to_string()))?;
    Ok(t)
}

/// Splits a file into blocks.
pub fn parse_blocks(text: &str) -> Result<Vec<Block>> {
    let mut c = Cursor::new(text);
    let mut out: Vec<Block> = Vec::new();
    while let Some((line, toks)) = c.peek().cloned() {
        let kw = toks[0];
        if !KEYWORDS.contains(&kw) {
            return Err(Error::parse(line, format!("expected a block keyword, found `{kw}`")));
        }
        let name = c.keyword_arg(kw)?.name;
        if out.iter().any(|b| b.name == name && b.keyword() == kw) {
            return Err(Error::parse(line, format!("duplicate {kw} `{name}`")));
        }
        let body = match kw {
            "algebra" => BlockBody::Algebra(parse_algebra_body(&mut c, &name)?),
            "action" => {
                let actor = c.keyword_arg("actor")?;
                let acted = c.keyword_arg("acted")?;
                let dot = c.rows_after("dot")?;
                let mut ops = Vec::new();
                while let Some((l, t)) = c.peek().cloned() {
                    if c.at_block_start() {
                        break;
                    }
                    if t.len() != 1 {
                        return Err(Error::parse(l, "expected an operation name"));
                    }
                    let op = t[0].to_string();
                    ops.push((op.clone(), c.rows_after(&op)?));
                }
                BlockBody::Action(RawAction { actor, acted, dot, ops })
            }
            "xmod" => BlockBody::Xmod(RawXmod {
                a: c.keyword_arg("A")?,
                b: c.keyword_arg("B")?,
                alpha: c.rows_after("alpha")?,
                action: c.keyword_arg("action")?,
            }),
            "groupoid" => BlockBody::Groupoid(RawGroupoid {
                c1: c.keyword_arg("C1")?,
                c0: c.keyword_arg("C0")?,
                d0: c.rows_after("d0")?,
                d1: c.rows_after("d1")?,
                eps: c.rows_after("eps")?,
            }),
            "xmorph" => BlockBody::XMorph(RawXMorph {
                source: c.keyword_arg("source")?,
                target: c.keyword_arg("target")?,
                f1: c.rows_after("f1")?,
                f0: c.rows_after("f0")?,
            }),
            "homotopy" => BlockBody::Homotopy(RawHomotopy {
                from: c.keyword_arg("from")?,
                to: c.keyword_arg("to")?,
                d: c.rows_after("d")?,
            }),
            _ => unreachable!(),
        };
        if let Some((l, t)) = c.peek() {
            if !KEYWORDS.contains(&t[0]) {
                return Err(Error::parse(*l, format!("unexpected `{}` after {kw} `{name}`", t[0])));
            }
        }
        out.push(Block { name, line, body });
    }
    Ok(out)
}

/// Involution exchanging 0 and `zero`.
#[derive(Clone, Copy, Debug)]
struct Swap(usize);

impl Swap {
    fn apply(self, x: usize) -> usize {
        if x == 0 {
            self.0
        } else if x == self.0 {
            0
        } else {
            x
        }
    }
}

/// An algebra as written in a file, after renumbering.
#[derive(Clone, Debug)]
pub struct ParsedAlgebra {
    /// Renumbered tables (unchanged when 0 was already the identity).
    pub tables: AlgebraTables,
    /// Index of the additive identity in the file's numbering.
    pub zero_in_file: usize,
}

fn renumber(raw: &AlgebraTables) -> ParsedAlgebra {
    match raw.with_zero_first() {
        Some(t) => {
            let zero_in_file = (0..raw.order)
                .find(|&e| (0..raw.order).all(|a| raw.add.get(e, a) == a && raw.add.get(a, e) == a))
                .unwrap_or(0);
            ParsedAlgebra { tables: t, zero_in_file }
        }
        None => ParsedAlgebra {
            tables: raw.clone(),
            zero_in_file: 0,
        },
    }
}

/// Blocks from a main file and library files, resolved in that order and
/// then against the catalog.
#[derive(Clone, Debug, Default)]
pub struct Library {
    blocks: Vec<Block>,
}

impl Library {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lib = Library::new();
        lib.add_text(text)?;
        Ok(lib)
    }

    /// Appends the blocks of another source; earlier sources win on name clashes.
    pub fn add_text(&mut self, text: &str) -> Result<()> {
        self.blocks.extend(parse_blocks(text)?);
        Ok(())
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Names of the blocks with a given keyword, in file order.
    pub fn names_of(&self, keyword: &str) -> Vec<String> {
        let mut seen = Vec::new();
        for b in &self.blocks {
            if b.keyword() == keyword && !seen.contains(&b.name) {
                seen.push(b.name.clone());
            }
        }
        seen
    }

    fn find(&self, keyword: &str, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.keyword() == keyword && b.name == name)
    }

    /// Raw algebra tables (renumbered), for validation.
    pub fn algebra_tables(&self, name: &str) -> Result<ParsedAlgebra> {
        if let Some(Block {
            body: BlockBody::Algebra(t),
            ..
        }) = self.find("algebra", name)
        {
            return Ok(renumber(t));
        }
        let a = catalog::algebra(name)?;
        Ok(ParsedAlgebra {
            tables: a.tables().clone(),
            zero_in_file: 0,
        })
    }

    fn algebra_with_swap(&self, r: &NameRef) -> Result<(Arc<OmegaAlgebra>, Swap)> {
        let p = self.algebra_tables(&r.name).map_err(|e| at_line(r.line, e))?;
        let a = OmegaAlgebra::new(p.tables)?;
        Ok((Arc::new(a), Swap(p.zero_in_file)))
    }

    pub fn algebra(&self, name: &str) -> Result<Arc<OmegaAlgebra>> {
        let p = self.algebra_tables(name)?;
        Ok(Arc::new(OmegaAlgebra::new(p.tables)?))
    }

    /// A shape-checked action; derived-action validity is not required.
    pub fn action(&self, name: &str) -> Result<ActionSet> {
        let Some(Block {
            body: BlockBody::Action(raw),
            line,
            ..
        }) = self.find("action", name)
        else {
            return catalog_action(name);
        };
        let (b, sb) = self.algebra_with_swap(&raw.actor)?;
        let (a, sa) = self.algebra_with_swap(&raw.acted)?;
        if b.signature() != a.signature() {
            return Err(Error::parse(*line, "actor and acted algebras have different signatures"));
        }
        let dot = table_rows(&raw.dot, "dot", sb, b.order(), sa, a.order())?;
        let mut by_name: BTreeMap<&str, &RawRows> = BTreeMap::new();
        for (op, rows) in &raw.ops {
            if b.signature().binary_index(op).is_none() {
                return Err(Error::parse(rows.line, format!("`{op}` is not a binary operation of `{}`", b.name())));
            }
            if by_name.insert(op, rows).is_some() {
                return Err(Error::parse(rows.line, format!("duplicate table for `{op}`")));
            }
        }
        let mut star = Vec::new();
        for op in b.signature().binary_ops() {
            let rows = by_name
                .get(op.as_str())
                .ok_or_else(|| Error::parse(*line, format!("missing table for `{op}`")))?;
            star.push(table_rows(rows, op, sb, b.order(), sa, a.order())?);
        }
        ActionSet::new(name, b, a, dot, star)
    }

    /// Boundary table and action of a crossed-module block, unvalidated.
    pub fn xmod_parts(&self, name: &str) -> Result<(Vec<usize>, ActionSet)> {
        let Some(Block {
            body: BlockBody::Xmod(raw),
            ..
        }) = self.find("xmod", name)
        else {
            let x = catalog::xmod(name)?;
            return Ok((x.alpha().map().to_vec(), x.action().clone()));
        };
        let (a, sa) = self.algebra_with_swap(&raw.a)?;
        let (b, sb) = self.algebra_with_swap(&raw.b)?;
        let action = self.action(&raw.action.name).map_err(|e| at_line(raw.action.line, e))?;
        if action.acted() != &a || action.actor() != &b {
            return Err(Error::parse(
                raw.action.line,
                format!("action `{}` is not an action of `{}` on `{}`", raw.action.name, raw.b.name, raw.a.name),
            ));
        }
        let alpha = row(&raw.alpha, "alpha", sa, a.order(), sb, b.order())?;
        Ok((alpha, action))
    }

    pub fn xmod(&self, name: &str) -> Result<Arc<CrossedModule>> {
        if self.find("xmod", name).is_none() {
            return catalog::xmod(name);
        }
        let (alpha, action) = self.xmod_parts(name)?;
        Ok(Arc::new(CrossedModule::from_tables(name, alpha, action)?))
    }

    /// `(C1, C0, d0, d1, eps)` of a groupoid block, unvalidated.
    #[allow(clippy::type_complexity)]
    pub fn groupoid_parts(
        &self,
        name: &str,
    ) -> Result<(Arc<OmegaAlgebra>, Arc<OmegaAlgebra>, Vec<usize>, Vec<usize>, Vec<usize>)> {
        let Some(Block {
            body: BlockBody::Groupoid(raw),
            ..
        }) = self.find("groupoid", name)
        else {
            let g = catalog::groupoid(name)?;
            return Ok((
                g.c1().clone(),
                g.c0().clone(),
                g.d0().map().to_vec(),
                g.d1().map().to_vec(),
                g.eps().map().to_vec(),
            ));
        };
        let (c1, s1) = self.algebra_with_swap(&raw.c1)?;
        let (c0, s0) = self.algebra_with_swap(&raw.c0)?;
        let d0 = row(&raw.d0, "d0", s1, c1.order(), s0, c0.order())?;
        let d1 = row(&raw.d1, "d1", s1, c1.order(), s0, c0.order())?;
        let eps = row(&raw.eps, "eps", s0, c0.order(), s1, c1.order())?;
        Ok((c1, c0, d0, d1, eps))
    }

    pub fn groupoid(&self, name: &str) -> Result<Arc<InternalGroupoid>> {
        if self.find("groupoid", name).is_none() {
            return catalog::groupoid(name);
        }
        let (c1, c0, d0, d1, eps) = self.groupoid_parts(name)?;
        Ok(Arc::new(InternalGroupoid::from_tables(name, c1, c0, d0, d1, eps)?))
    }

    fn xmod_with_swaps(&self, r: &NameRef) -> Result<(Arc<CrossedModule>, Swap, Swap)> {
        let x = self.xmod(&r.name).map_err(|e| at_line(r.line, e))?;
        let swaps = match self.find("xmod", &r.name) {
            Some(Block {
                body: BlockBody::Xmod(raw),
                ..
            }) => (
                Swap(self.algebra_tables(&raw.a.name)?.zero_in_file),
                Swap(self.algebra_tables(&raw.b.name)?.zero_in_file),
            ),
            _ => (Swap(0), Swap(0)),
        };
        Ok((x, swaps.0, swaps.1))
    }

    /// Source, target and component tables of an `xmorph` block, unvalidated.
    #[allow(clippy::type_complexity)]
    pub fn xmorph_parts(
        &self,
        name: &str,
    ) -> Result<(Arc<CrossedModule>, Arc<CrossedModule>, Vec<usize>, Vec<usize>)> {
        let Some(Block {
            body: BlockBody::XMorph(raw),
            ..
        }) = self.find("xmorph", name)
        else {
            return Err(Error::UnknownName(name.to_string()));
        };
        let (s, sa, sb) = self.xmod_with_swaps(&raw.source)?;
        let (t, ta, tb) = self.xmod_with_swaps(&raw.target)?;
        let f1 = row(&raw.f1, "f1", sa, s.a().order(), ta, t.a().order())?;
        let f0 = row(&raw.f0, "f0", sb, s.b().order(), tb, t.b().order())?;
        Ok((s, t, f1, f0))
    }

    pub fn xmorph(&self, name: &str) -> Result<XModMorphism> {
        let (s, t, f1, f0) = self.xmorph_parts(name)?;
        XModMorphism::new(s, t, f1, f0)
    }

    /// Endpoints and the `d` table of a homotopy block, unvalidated.
    pub fn homotopy_parts(&self, name: &str) -> Result<(XModMorphism, XModMorphism, Vec<usize>)> {
        let Some(Block {
            body: BlockBody::Homotopy(raw),
            ..
        }) = self.find("homotopy", name)
        else {
            return Err(Error::UnknownName(name.to_string()));
        };
        let f = self.xmorph(&raw.from.name).map_err(|e| at_line(raw.from.line, e))?;
        let g = self.xmorph(&raw.to.name).map_err(|e| at_line(raw.to.line, e))?;
        let (_, _, sb) = self.xmod_with_swaps(&self.xmorph_source_ref(&raw.from.name))?;
        let (_, ta, _) = self.xmod_with_swaps(&self.xmorph_target_ref(&raw.from.name))?;
        let d = row(&raw.d, "d", sb, f.source().b().order(), ta, f.target().a().order())?;
        Ok((f, g, d))
    }

    pub fn homotopy(&self, name: &str) -> Result<XModHomotopy> {
        let (f, g, d) = self.homotopy_parts(name)?;
        XModHomotopy::new(f, g, d)
    }

    fn xmorph_source_ref(&self, name: &str) -> NameRef {
        match self.find("xmorph", name) {
            Some(Block {
                body: BlockBody::XMorph(raw),
                ..
            }) => raw.source.clone(),
            _ => unreachable!("resolved above"),
        }
    }

    fn xmorph_target_ref(&self, name: &str) -> NameRef {
        match self.find("xmorph", name) {
            Some(Block {
                body: BlockBody::XMorph(raw),
                ..
            }) => raw.target.clone(),
            _ => unreachable!("resolved above"),
        }
    }
}

fn catalog_action(name: &str) -> Result<ActionSet> {
    match catalog::load(name)?.payload {
        catalog::Payload::Action(a) => Ok(a.as_ref().clone()),
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::UnknownName(n) => Error::parse(line, format!("unknown name `{n}`")),
        e => e,
    }
}

/// A single row mapping `from` elements to `to` elements, translated.
fn row(raw: &RawRows, what: &str, sf: Swap, nf: usize, st: Swap, nt: usize) -> Result<Vec<usize>> {
    if raw.rows.len() != 1 {
        return Err(Error::parse(raw.line, format!("`{what}` needs exactly one row, found {}", raw.rows.len())));
    }
    let r = &raw.rows[0];
    if r.len() != nf {
        return Err(Error::parse(raw.row_line(0), format!("`{what}` has {} entries, expected {nf}", r.len())));
    }
    let mut out = vec![0; nf];
    for (x, &y) in r.iter().enumerate() {
        if y >= nt {
            return Err(Error::parse(raw.row_line(0), format!("`{what}` entry {y} out of range 0..{nt}")));
        }
        out[sf.apply(x)] = st.apply(y);
    }
    Ok(out)
}

/// A `|B| × |A|` action table, translated.
fn table_rows(raw: &RawRows, what: &str, sb: Swap, nb: usize, sa: Swap, na: usize) -> Result<Table> {
    if raw.rows.len() != nb {
        return Err(Error::parse(raw.line, format!("`{what}` has {} rows, expected {nb}", raw.rows.len())));
    }
    let mut t = Table::filled(nb, na, 0);
    for (b, r) in raw.rows.iter().enumerate() {
        let line = raw.row_line(b);
        if r.len() != na {
            return Err(Error::parse(line, format!("`{what}` row has {} entries, expected {na}", r.len())));
        }
        for (a, &v) in r.iter().enumerate() {
            if v >= na {
                return Err(Error::parse(line, format!("`{what}` entry {v} out of range 0..{na}")));
            }
            t.set(sb.apply(b), sa.apply(a), sa.apply(v));
        }
    }
    Ok(t)
}

/// A name usable as a single token.
pub fn token(name: &str) -> String {
    let t: String = name.chars().map(|c| if c.is_whitespace() || c == '#' { '_' } else { c }).collect();
    if t.is_empty() {
        "_".into()
    } else {
        t
    }
}

fn write_row(out: &mut String, row: &[usize]) {
    let s: Vec<String> = row.iter().map(usize::to_string).collect();
    out.push_str(&s.join(" "));
    out.push('\n');
}

fn write_table(out: &mut String, t: &Table) {
    for r in 0..t.rows() {
        write_row(out, t.row(r));
    }
}

pub fn write_algebra_as(a: &OmegaAlgebra, name: &str) -> String {
    let t = a.tables();
    let sig = a.signature();
    let mut out = String::new();
    let _ = writeln!(out, "algebra {}", token(name));
    let _ = writeln!(out, "order {}", t.order);
    let _ = writeln!(out, "binops {}", sig.binary_ops().len());
    for (k, op) in sig.binary_ops().iter().enumerate() {
        let _ = writeln!(out, "{op} {}", sig.binary_ops()[sig.opposite(k)]);
    }
    let _ = writeln!(out, "unops {}", sig.unary_ops().len());
    for op in sig.unary_ops() {
        let _ = writeln!(out, "{op}");
    }
    out.push_str("add\n");
    write_table(&mut out, &t.add);
    out.push_str("neg\n");
    write_row(&mut out, &t.neg);
    for (op, tab) in sig.binary_ops().iter().zip(&t.binary) {
        let _ = writeln!(out, "{op}");
        write_table(&mut out, tab);
    }
    for (op, tab) in sig.unary_ops().iter().zip(&t.unary) {
        let _ = writeln!(out, "{op}");
        write_row(&mut out, tab);
    }
    out
}

pub fn write_algebra(a: &OmegaAlgebra) -> String {
    write_algebra_as(a, a.name())
}

/// Collects algebra blocks, giving distinct names to distinct algebras.
#[derive(Default)]
struct AlgebraNames {
    entries: Vec<(Arc<OmegaAlgebra>, String)>,
    text: String,
}

impl AlgebraNames {
    fn name_of(&mut self, a: &Arc<OmegaAlgebra>) -> String {
        if let Some((_, n)) = self.entries.iter().find(|(b, _)| b == a) {
            return n.clone();
        }
        let base = token(a.name());
        let mut name = base.clone();
        let mut k = 2;
        while self.entries.iter().any(|(_, n)| *n == name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.text.push_str(&write_algebra_as(a, &name));
        self.text.push('\n');
        self.entries.push((a.clone(), name.clone()));
        name
    }
}

fn action_block(out: &mut String, act: &ActionSet, name: &str, actor: &str, acted: &str) {
    let _ = writeln!(out, "action {}", token(name));
    let _ = writeln!(out, "actor {actor}");
    let _ = writeln!(out, "acted {acted}");
    out.push_str("dot\n");
    write_table(out, act.dot_table());
    for (op, t) in act.actor().signature().binary_ops().iter().zip(act.star_tables()) {
        let _ = writeln!(out, "{op}");
        write_table(out, t);
    }
}

/// A self-contained file with the action and both algebras.
pub fn write_action(act: &ActionSet) -> String {
    let mut names = AlgebraNames::default();
    let actor = names.name_of(act.actor());
    let acted = names.name_of(act.acted());
    let mut out = names.text;
    action_block(&mut out, act, act.name(), &actor, &acted);
    out
}

fn xmod_blocks(names: &mut AlgebraNames, body: &mut String, x: &CrossedModule, name: &str) {
    let a = names.name_of(x.a());
    let b = names.name_of(x.b());
    let action_name = format!("{}-action", token(name));
    action_block(body, x.action(), &action_name, &b, &a);
    body.push('\n');
    let _ = writeln!(body, "xmod {}", token(name));
    let _ = writeln!(body, "A {a}");
    let _ = writeln!(body, "B {b}");
    body.push_str("alpha\n");
    write_row(body, x.alpha().map());
    let _ = writeln!(body, "action {action_name}");
}

/// A self-contained file with the crossed module, its action and algebras.
pub fn write_xmod(x: &CrossedModule) -> String {
    let mut names = AlgebraNames::default();
    let mut body = String::new();
    xmod_blocks(&mut names, &mut body, x, x.name());
    names.text + &body
}

/// A self-contained file with the groupoid and its algebras.
pub fn write_groupoid(g: &InternalGroupoid) -> String {
    let mut names = AlgebraNames::default();
    let c1 = names.name_of(g.c1());
    let c0 = names.name_of(g.c0());
    let mut out = names.text;
    let _ = writeln!(out, "groupoid {}", token(g.name()));
    let _ = writeln!(out, "C1 {c1}");
    let _ = writeln!(out, "C0 {c0}");
    for (kw, m) in [("d0", g.d0()), ("d1", g.d1()), ("eps", g.eps())] {
        let _ = writeln!(out, "{kw}");
        write_row(&mut out, m.map());
    }
    out
}

/// A self-contained file with a morphism and both crossed modules.
pub fn write_xmorph(m: &XModMorphism, name: &str) -> String {
    let mut names = AlgebraNames::default();
    let mut body = String::new();
    let source = format!("{}-source", token(name));
    let target = format!("{}-target", token(name));
    xmod_blocks(&mut names, &mut body, m.source(), &source);
    body.push('\n');
    if m.source() == m.target() {
        write_xmorph_block(&mut body, m, name, &source, &source);
    } else {
        xmod_blocks(&mut names, &mut body, m.target(), &target);
        body.push('\n');
        write_xmorph_block(&mut body, m, name, &source, &target);
    }
    names.text + &body
}

fn write_xmorph_block(out: &mut String, m: &XModMorphism, name: &str, source: &str, target: &str) {
    let _ = writeln!(out, "xmorph {}", token(name));
    let _ = writeln!(out, "source {source}");
    let _ = writeln!(out, "target {target}");
    out.push_str("f1\n");
    write_row(out, m.f1().map());
    out.push_str("f0\n");
    write_row(out, m.f0().map());
}

/// A homotopy block referring to existing morphism blocks.
pub fn write_homotopy_block(name: &str, from: &str, to: &str, d: &[usize]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "homotopy {}", token(name));
    let _ = writeln!(out, "from {from}");
    let _ = writeln!(out, "to {to}");
    out.push_str("d\n");
    write_row(&mut out, d);
    out
}

/// Parses a space- or comma-separated list of element indices.
pub fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::parse(1, format!("`{t}` is not an element index"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::check_derived_action;
    use crate::algebra::validate_algebra;

    const Z2: &str = "# cyclic group\nalgebra Z2\norder 2\nbinops 0\nunops 0\nadd\n0 1\n1 0\nneg\n0 1\n";

    #[test]
    fn parse_z2() {
        let lib = Library::from_text(Z2).unwrap();
        let a = lib.algebra("Z2").unwrap();
        assert_eq!(a.tables().add, catalog::cyclic_group(2).tables().add);
    }

    #[test]
    fn zero_not_first_is_renumbered() {
        let text = "algebra W\norder 2\nbinops 0\nunops 0\nadd\n1 0\n0 1\nneg\n0 1\n";
        let lib = Library::from_text(text).unwrap();
        let p = lib.algebra_tables("W").unwrap();
        assert_eq!(p.zero_in_file, 1);
        assert!(validate_algebra(&p.tables).unwrap().is_valid());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "algebra Z2\norder 2\nbinops 0\nunops 0\nadd\n0 1\n1\nneg\n0 1\n";
        match parse_blocks(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
        match parse_blocks("algebra Z2\norder x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_blocks("\n\nfoo bar\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn catalog_fallback() {
        let lib = Library::new();
        assert_eq!(lib.xmod("S3-conj-xmod").unwrap(), catalog::xmod("S3-conj-xmod").unwrap());
        assert!(matches!(lib.xmod("nope"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn xmod_round_trip() {
        for name in ["S3-conj-xmod", "Z4-ring-conj", "A3-in-S3", "2Z4-in-Z4-ring", "Z4-over-0"] {
            let x = catalog::xmod(name).unwrap();
            let text = write_xmod(&x);
            let lib = Library::from_text(&text).unwrap();
            assert_eq!(lib.xmod(name).unwrap(), x, "{name}");
        }
    }

    #[test]
    fn groupoid_round_trip() {
        let g = catalog::groupoid("delta-Z3-conj-xmod").unwrap();
        let lib = Library::from_text(&write_groupoid(&g)).unwrap();
        assert_eq!(lib.groupoid(g.name()).unwrap(), g);
    }

    #[test]
    fn action_file_references_catalog_algebras() {
        let text = "action t\nactor Z2-group\nacted Z2-group\ndot\n0 1\n0 1\n";
        let lib = Library::from_text(text).unwrap();
        assert!(check_derived_action(&lib.action("t").unwrap()).unwrap().is_valid());
    }

    #[test]
    fn renumbered_algebra_translates_dependent_tables() {
        // Z2 with the identity written as element 1
        let text = "algebra W\norder 2\nbinops 0\nunops 0\nadd\n1 0\n0 1\nneg\n0 1\n\
                    action t\nactor W\nacted W\ndot\n0 1\n0 1\n\
                    xmod X\nA W\nB W\nalpha\n0 1\naction t\n";
        let lib = Library::from_text(text).unwrap();
        let x = lib.xmod("X").unwrap();
        assert_eq!(x.alpha().map(), &[0, 1]);
        assert!(x.action().dot_table().data().chunks(2).all(|r| r == [0, 1]));
    }

    #[test]
    fn xmorph_and_homotopy_blocks() {
        let x = catalog::xmod("Z4-id-trivial").unwrap();
        let id = XModMorphism::identity(&x);
        let mut text = write_xmorph(&id, "f");
        let endo = XModMorphism::new(x.clone(), x.clone(), vec![0, 3, 2, 1], vec![0, 3, 2, 1]).unwrap();
        text.push_str("\nxmorph g\nsource f-source\ntarget f-source\nf1\n0 3 2 1\nf0\n0 3 2 1\n\n");
        text.push_str(&write_homotopy_block("h", "f", "g", &[0, 2, 0, 2]));
        let lib = Library::from_text(&text).unwrap();
        assert_eq!(lib.xmorph("f").unwrap(), id);
        assert_eq!(lib.xmorph("g").unwrap(), endo);
        assert_eq!(lib.homotopy("h").unwrap().d(), &[0, 2, 0, 2]);
    }

    #[test]
    fn index_list() {
        assert_eq!(parse_index_list("0, 2 0,2").unwrap(), vec![0, 2, 0, 2]);
        assert!(parse_index_list("0 x").is_err());
    }
}
