//! Recursive-descent parser for `.tores` source.

use crate::index::{IndexCtx, IndexSort, IndexSubst, IndexTerm};
use crate::syntax::{Kind, Side, StratType, Term, Type, Unifier};
use crate::{name, Name};
use std::sync::Arc;

use super::lexer::{lex, Span, Tok, Token};

/// Source spans of an AST node and its children, in the child order used by
/// error paths.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpanTree {
    pub span: Span,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    fn leaf(span: Span) -> Self {
        SpanTree { span, children: Vec::new() }
    }

    fn node(span: Span, children: Vec<SpanTree>) -> Self {
        SpanTree { span, children }
    }

    /// Span of the deepest node on `path` that has a recorded span.
    pub fn locate(&self, path: &[u32]) -> Span {
        let mut cur = self;
        for &i in path {
            match cur.children.get(i as usize) {
                Some(c) => cur = c,
                None => break,
            }
        }
        cur.span
    }
}

#[derive(Clone, Debug)]
pub struct Program {
    pub decls: Vec<Decl>,
}

#[derive(Clone, Debug)]
pub struct Decl {
    pub name: Name,
    pub name_span: Span,
    pub span: Span,
    pub body: DeclBody,
}

#[derive(Clone, Debug)]
pub enum DeclBody {
    Type { kind: Kind, kind_span: Span, body: Type, body_spans: SpanTree },
    Def { ty: Type, ty_spans: SpanTree, body: Term, body_spans: SpanTree },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    pub expected: Option<String>,
    pub found: Option<String>,
}

type P<T> = Result<T, ParseError>;

pub fn parse_program(src: &str) -> P<Program> {
    let mut p = Parser::new(src)?;
    let mut decls = Vec::new();
    while p.peek() != &Tok::Eof {
        decls.push(p.decl()?);
    }
    Ok(Program { decls })
}

/// Parses a standalone type, e.g. for tests and the FFI.
pub fn parse_type_str(src: &str) -> P<Type> {
    let mut p = Parser::new(src)?;
    let (t, _) = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_term_str(src: &str) -> P<Term> {
    let mut p = Parser::new(src)?;
    let (t, _) = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

pub fn parse_kind_str(src: &str) -> P<Kind> {
    let mut p = Parser::new(src)?;
    let (k, _) = p.kind()?;
    p.expect_eof()?;
    Ok(k)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

const TERM_BINDERS: &[&str] = &["fn", "rec", "corec", "split", "case", "unpack", "eqelim"];
const TYPE_BINDERS: &[&str] = &["Sig", "Lam", "mu", "nu"];
const PREFIX_OPS: &[&str] = &["inl", "inr", "fold", "out_nu", "inj0", "injs", "out0", "outs", "eqabort", "pack"];

impl Parser {
    fn new(src: &str) -> P<Self> {
        let toks = lex(src).map_err(|e| ParseError {
            span: Span::new(e.offset, e.offset + 1),
            message: e.message,
            expected: None,
            found: None,
        })?;
        Ok(Parser { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn from(&self, start: usize) -> Span {
        Span::new(start, self.prev_end().max(start))
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = self.peek().to_string();
        ParseError {
            span: self.span(),
            message: format!("expected {expected}, found {found}"),
            expected: Some(expected.to_string()),
            found: Some(found),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> P<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error(&format!("`{s}`")))
        }
    }

    fn kw(&mut self, k: &str) -> P<()> {
        if self.is_kw(k) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("`{k}`")))
        }
    }

    fn ident(&mut self) -> P<(Name, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((name(s), sp))
            }
            _ => Err(self.error("an identifier")),
        }
    }

    fn expect_eof(&self) -> P<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    fn decl(&mut self) -> P<Decl> {
        let start = self.span().start;
        if self.is_kw("type") {
            self.bump();
            let (n, name_span) = self.ident()?;
            self.sym(":")?;
            let (kind, kind_span) = self.kind()?;
            self.sym("=")?;
            let (body, body_spans) = self.ty()?;
            Ok(Decl {
                name: n,
                name_span,
                span: self.from(start),
                body: DeclBody::Type { kind, kind_span, body, body_spans },
            })
        } else if self.is_kw("def") {
            self.bump();
            let (n, name_span) = self.ident()?;
            self.sym(":")?;
            let (ty, ty_spans) = self.ty()?;
            self.sym("=")?;
            let (body, body_spans) = self.term()?;
            Ok(Decl {
                name: n,
                name_span,
                span: self.from(start),
                body: DeclBody::Def { ty, ty_spans, body, body_spans },
            })
        } else {
            Err(self.error("`type` or `def`"))
        }
    }

    fn sort(&mut self) -> P<IndexSort> {
        self.kw("nat")?;
        Ok(IndexSort::Nat)
    }

    fn kind(&mut self) -> P<(Kind, Span)> {
        let start = self.span().start;
        if self.eat_sym("*") {
            Ok((Kind::Star, self.from(start)))
        } else if self.is_kw("Pi") {
            self.bump();
            let (u, _) = self.ident()?;
            self.sym(":")?;
            let s = self.sort()?;
            self.sym(".")?;
            let (k, _) = self.kind()?;
            Ok((Kind::Pi(u, s, Arc::new(k)), self.from(start)))
        } else if self.eat_sym("(") {
            let (k, _) = self.kind()?;
            self.sym(")")?;
            Ok((k, self.from(start)))
        } else {
            Err(self.error("a kind"))
        }
    }

    // Index terms.

    fn index(&mut self) -> P<(IndexTerm, Span)> {
        let start = self.span().start;
        if self.is_kw("suc") {
            self.bump();
            let (m, _) = self.index()?;
            return Ok((IndexTerm::suc(m), self.from(start)));
        }
        self.index_atom()
    }

    fn index_atom(&mut self) -> P<(IndexTerm, Span)> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok((IndexTerm::nat(n), self.from(start)))
            }
            Tok::Ident(s) => {
                self.bump();
                Ok((IndexTerm::var(s), self.from(start)))
            }
            Tok::Sym("(") => {
                self.bump();
                let (m, _) = self.index()?;
                self.sym(")")?;
                Ok((m, self.from(start)))
            }
            _ => Err(self.error("an index term")),
        }
    }

    fn starts_index_atom(&self) -> bool {
        matches!(self.peek(), Tok::Num(_) | Tok::Ident(_) | Tok::Sym("("))
    }

    // Types.

    fn ty(&mut self) -> P<(Type, SpanTree)> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Kw("Sig") => {
                self.bump();
                let (u, _) = self.ident()?;
                self.sym(":")?;
                let sort = self.sort()?;
                self.sym(".")?;
                let (body, bt) = self.ty()?;
                Ok((Type::Sigma { var: u, sort, body: Arc::new(body) }, SpanTree::node(self.from(start), vec![bt])))
            }
            Tok::Kw("Lam") => {
                self.bump();
                let (u, _) = self.ident()?;
                self.sym(".")?;
                let (body, bt) = self.ty()?;
                Ok((Type::Lam(u, Arc::new(body)), SpanTree::node(self.from(start), vec![bt])))
            }
            Tok::Kw(k @ ("mu" | "nu")) => {
                self.bump();
                let (x, _) = self.ident()?;
                self.sym(":")?;
                let (kind, _) = self.kind()?;
                self.sym(".")?;
                let (body, bt) = self.ty()?;
                let body = Arc::new(body);
                let t = if k == "mu" { Type::Mu { var: x, kind, body } } else { Type::Nu { var: x, kind, body } };
                Ok((t, SpanTree::node(self.from(start), vec![bt])))
            }
            Tok::Sym("(") if self.binder_arrow_ahead() => {
                self.bump();
                let mut binders = Vec::new();
                if !self.is_sym("|") {
                    loop {
                        let (u, _) = self.ident()?;
                        self.sym(":")?;
                        binders.push((u, self.sort()?));
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.sym("|")?;
                let (dom, dt) = self.ty()?;
                self.sym(")")?;
                self.sym("->")?;
                let (cod, ct) = self.ty()?;
                Ok((
                    Type::Arrow { binders, dom: Arc::new(dom), cod: Arc::new(cod) },
                    SpanTree::node(self.from(start), vec![dt, ct]),
                ))
            }
            _ => {
                let (dom, dt) = self.ty_sum()?;
                if self.eat_sym("->") {
                    let (cod, ct) = self.ty()?;
                    Ok((Type::fun(dom, cod), SpanTree::node(self.from(start), vec![dt, ct])))
                } else {
                    Ok((dom, dt))
                }
            }
        }
    }

    /// `(` followed by `|` or `IDENT :` opens an indexed function type.
    fn binder_arrow_ahead(&self) -> bool {
        matches!(self.peek_at(1), Tok::Sym("|"))
            || (matches!(self.peek_at(1), Tok::Ident(_)) && matches!(self.peek_at(2), Tok::Sym(":")))
    }

    fn starts_type_binder(&self) -> bool {
        matches!(self.peek(), Tok::Kw(k) if TYPE_BINDERS.contains(k))
    }

    fn ty_sum(&mut self) -> P<(Type, SpanTree)> {
        let start = self.span().start;
        let (mut acc, mut at) = self.ty_prod()?;
        while self.eat_sym("+") {
            let (rhs, rt) = if self.starts_type_binder() { self.ty()? } else { self.ty_prod()? };
            acc = Type::sum(acc, rhs);
            at = SpanTree::node(self.from(start), vec![at, rt]);
        }
        Ok((acc, at))
    }

    fn ty_prod(&mut self) -> P<(Type, SpanTree)> {
        let start = self.span().start;
        let (mut acc, mut at) = self.ty_app()?;
        while self.eat_sym("*") {
            let (rhs, rt) = if self.starts_type_binder() { self.ty()? } else { self.ty_app()? };
            acc = Type::prod(acc, rhs);
            at = SpanTree::node(self.from(start), vec![at, rt]);
        }
        Ok((acc, at))
    }

    fn try_eq(&mut self) -> Option<P<(Type, SpanTree)>> {
        let save = self.pos;
        let start = self.span().start;
        let (m, ms) = match self.index() {
            Ok(x) => x,
            Err(_) => {
                self.pos = save;
                return None;
            }
        };
        if !self.eat_sym("==") {
            self.pos = save;
            return None;
        }
        Some(self.index().map(|(n, ns)| {
            (Type::Eq(m, n), SpanTree::node(self.from(start), vec![SpanTree::leaf(ms), SpanTree::leaf(ns)]))
        }))
    }

    fn ty_app(&mut self) -> P<(Type, SpanTree)> {
        if let Some(eq) = self.try_eq() {
            return eq;
        }
        let start = self.span().start;
        let (mut acc, mut at) = self.ty_atom()?;
        while self.starts_index_atom() {
            let (m, ms) = self.index_atom()?;
            acc = Type::app(acc, m);
            at = SpanTree::node(self.from(start), vec![at, SpanTree::leaf(ms)]);
        }
        Ok((acc, at))
    }

    fn ty_atom(&mut self) -> P<(Type, SpanTree)> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Kw("unit") => {
                self.bump();
                Ok((Type::Unit, SpanTree::leaf(self.from(start))))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok((Type::var(x), SpanTree::leaf(self.from(start))))
            }
            Tok::Sym("(") => {
                self.bump();
                let (t, tt) = self.ty()?;
                self.sym(")")?;
                // Keep the children but widen the span to include the parentheses.
                Ok((t, SpanTree::node(self.from(start), tt.children)))
            }
            Tok::Kw("Rec") => {
                self.bump();
                let kind = if self.eat_sym("*") {
                    Kind::Star
                } else if self.eat_sym("(") {
                    let (k, _) = self.kind()?;
                    self.sym(")")?;
                    k
                } else {
                    return Err(self.error("a kind"));
                };
                self.sym("(")?;
                match self.peek() {
                    Tok::Num(0) => {
                        self.bump();
                    }
                    _ => return Err(self.error("`0`")),
                }
                self.sym("=>")?;
                let (zero, zt) = self.ty()?;
                self.sym("|")?;
                self.kw("suc")?;
                let (ivar, _) = self.ident()?;
                self.sym(",")?;
                let (tvar, _) = self.ident()?;
                self.sym("=>")?;
                let (suc, st) = self.ty()?;
                self.sym(")")?;
                Ok((
                    Type::Rec(Arc::new(StratType { kind, zero, ivar, tvar, suc })),
                    SpanTree::node(self.from(start), vec![zt, st]),
                ))
            }
            _ => Err(self.error("a type")),
        }
    }

    // Terms.

    fn term(&mut self) -> P<(Term, SpanTree)> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Kw("fn") => {
                self.bump();
                let (ivars, x) = if self.eat_sym("(") {
                    let mut ivars = Vec::new();
                    if !self.is_sym("|") {
                        loop {
                            ivars.push(self.ident()?.0);
                            if !self.eat_sym(",") {
                                break;
                            }
                        }
                    }
                    self.sym("|")?;
                    let (x, _) = self.ident()?;
                    self.sym(")")?;
                    (ivars, x)
                } else {
                    (Vec::new(), self.ident()?.0)
                };
                self.sym("=>")?;
                let (body, bt) = self.term()?;
                Ok((Term::lam(&ivars, x, body), SpanTree::node(self.from(start), vec![bt])))
            }
            Tok::Kw(k @ ("rec" | "corec")) => {
                self.bump();
                let (f, _) = self.ident()?;
                self.sym("=>")?;
                let (body, bt) = self.term()?;
                let t = if k == "rec" { Term::rec(f, body) } else { Term::corec(f, body) };
                Ok((t, SpanTree::node(self.from(start), vec![bt])))
            }
            Tok::Kw(k @ ("split" | "unpack")) => {
                self.bump();
                let (s, stree) = self.term_prefix()?;
                self.kw("as")?;
                self.sym("(")?;
                let (a, _) = self.ident()?;
                self.sym(",")?;
                let (b, _) = self.ident()?;
                self.sym(")")?;
                self.kw("in")?;
                let (body, bt) = self.term()?;
                let t = if k == "split" { Term::split(s, a, b, body) } else { Term::unpack(s, a, b, body) };
                Ok((t, SpanTree::node(self.from(start), vec![stree, bt])))
            }
            Tok::Kw("case") => {
                self.bump();
                let (s, stree) = self.term_prefix()?;
                self.kw("of")?;
                self.kw("inl")?;
                let (x, _) = self.ident()?;
                self.sym("=>")?;
                let (l, lt) = self.term()?;
                self.sym("|")?;
                self.kw("inr")?;
                let (y, _) = self.ident()?;
                self.sym("=>")?;
                let (r, rt) = self.term()?;
                Ok((Term::case(s, x, l, y, r), SpanTree::node(self.from(start), vec![stree, lt, rt])))
            }
            Tok::Kw("eqelim") => {
                self.bump();
                let (s, stree) = self.term_prefix()?;
                let unifier = if self.is_kw("with") {
                    self.bump();
                    Some(self.unifier()?)
                } else {
                    None
                };
                self.kw("in")?;
                let (body, bt) = self.term()?;
                Ok((Term::eqelim(s, unifier, body), SpanTree::node(self.from(start), vec![stree, bt])))
            }
            _ => self.term_prefix(),
        }
    }

    fn unifier(&mut self) -> P<Unifier> {
        self.sym("(")?;
        let mut ctx = IndexCtx::new();
        if !self.is_sym("|") {
            loop {
                let (u, _) = self.ident()?;
                self.sym(":")?;
                let s = self.sort()?;
                ctx.push(u, s);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.sym("|")?;
        self.sym("[")?;
        let mut subst = IndexSubst::new();
        if !self.is_sym("]") {
            loop {
                let (m, _) = self.index()?;
                self.sym("/")?;
                let (u, _) = self.ident()?;
                subst.push(m, u);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.sym("]")?;
        self.sym(")")?;
        Ok(Unifier { ctx, subst })
    }

    fn starts_term_binder(&self) -> bool {
        matches!(self.peek(), Tok::Kw(k) if TERM_BINDERS.contains(k))
    }

    fn prefix_operand(&mut self) -> P<(Term, SpanTree)> {
        if self.starts_term_binder() {
            self.term()
        } else {
            self.term_prefix()
        }
    }

    fn term_prefix(&mut self) -> P<(Term, SpanTree)> {
        let start = self.span().start;
        let op = match self.peek() {
            Tok::Kw(k) if PREFIX_OPS.contains(k) => *k,
            _ => return self.term_app(),
        };
        self.bump();
        if op == "pack" {
            self.sym("[")?;
            let (m, _) = self.index()?;
            self.sym("]")?;
            let (t, tt) = self.prefix_operand()?;
            return Ok((Term::pack(m, t), SpanTree::node(self.from(start), vec![tt])));
        }
        let (t, tt) = self.prefix_operand()?;
        let t = match op {
            "inl" => Term::inj(Side::Left, t),
            "inr" => Term::inj(Side::Right, t),
            "fold" => Term::fold(t),
            "out_nu" => Term::out_nu(t),
            "inj0" => Term::inj_zero(t),
            "injs" => Term::inj_suc(t),
            "out0" => Term::out_zero(t),
            "outs" => Term::out_suc(t),
            _ => Term::eqabort(t),
        };
        Ok((t, SpanTree::node(self.from(start), vec![tt])))
    }

    fn starts_term_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Sym("<") | Tok::Sym("(") | Tok::Kw("refl") | Tok::Kw("ind"))
    }

    fn term_app(&mut self) -> P<(Term, SpanTree)> {
        let start = self.span().start;
        let (mut acc, mut at) = self.term_atom()?;
        loop {
            let spine = if self.eat_sym("[") {
                let mut spine = Vec::new();
                if !self.is_sym("]") {
                    loop {
                        spine.push(self.index()?.0);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.sym("]")?;
                spine
            } else if self.starts_term_atom() {
                Vec::new()
            } else {
                break;
            };
            let (arg, argt) = self.term_atom()?;
            acc = Term::app(acc, spine, arg);
            at = SpanTree::node(self.from(start), vec![at, argt]);
        }
        Ok((acc, at))
    }

    fn term_atom(&mut self) -> P<(Term, SpanTree)> {
        let start = self.span().start;
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok((Term::var(x), SpanTree::leaf(self.from(start))))
            }
            Tok::Kw("refl") => {
                self.bump();
                Ok((Term::Refl, SpanTree::leaf(self.from(start))))
            }
            Tok::Sym("<") => {
                self.bump();
                if self.eat_sym(">") {
                    return Ok((Term::Unit, SpanTree::leaf(self.from(start))));
                }
                let (a, att) = self.term()?;
                self.sym(",")?;
                let (b, btt) = self.term()?;
                self.sym(">")?;
                Ok((Term::pair(a, b), SpanTree::node(self.from(start), vec![att, btt])))
            }
            Tok::Sym("(") => {
                self.bump();
                let (t, tt) = self.term()?;
                if self.eat_sym(":") {
                    let (ty, tyt) = self.ty()?;
                    self.sym(")")?;
                    return Ok((Term::annot(t, ty), SpanTree::node(self.from(start), vec![tt, tyt])));
                }
                self.sym(")")?;
                Ok((t, SpanTree::node(self.from(start), tt.children)))
            }
            Tok::Kw("ind") => {
                self.bump();
                self.sym("(")?;
                match self.peek() {
                    Tok::Num(0) => {
                        self.bump();
                    }
                    _ => return Err(self.error("`0`")),
                }
                self.sym("=>")?;
                let (zero, zt) = self.term()?;
                self.sym("|")?;
                self.kw("suc")?;
                let (u, _) = self.ident()?;
                self.sym(",")?;
                let (f, _) = self.ident()?;
                self.sym("=>")?;
                let (suc, st) = self.term()?;
                self.sym(")")?;
                Ok((Term::ind(zero, u, f, suc), SpanTree::node(self.from(start), vec![zt, st])))
            }
            _ => Err(self.error("a term")),
        }
    }
}
