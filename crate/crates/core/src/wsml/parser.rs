//! Recursive-descent parser for WSML documents and logical expressions.

use std::fmt;

use super::ast::*;
use super::lexer::{tokenize, LexError, Position, Token, TokenKind};

/// Constructs the parser recognizes but refuses.
const UNSUPPORTED_WORDS: &[&str] = &["implies", "impliedBy", "equivalent", "forAll", "exists"];
const UNSUPPORTED_PUNCT: &[&str] = &[":-", "!-", ":=:"];

/// Keywords that start a top-level item or capability section.
const ITEM_KEYWORDS: &[&str] = &[
    "namespace",
    "ontology",
    "importsOntology",
    "concept",
    "instance",
    "relation",
    "axiom",
    "capability",
    "sharedVariables",
    "precondition",
    "postcondition",
    "assumption",
    "effect",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub pos: Position,
    /// What would have been accepted at `pos`. Empty for non-grammar errors.
    pub expected: Vec<String>,
    /// Offending token, or `end of input`.
    pub found: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.message)
    }
}

impl ParseError {
    pub fn is_unsupported(&self) -> bool {
        self.message.starts_with("unsupported construct")
    }
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError { pos: e.pos, expected: Vec::new(), found: String::new(), message: e.message }
    }
}

type PResult<T> = Result<T, ParseError>;

pub fn parse_document(text: &str) -> PResult<Document> {
    parse_document_with_positions(text).map(|(doc, _)| doc)
}

/// Like [`parse_document`], also returning the start position of every item.
pub fn parse_document_with_positions(text: &str) -> PResult<(Document, Vec<Position>)> {
    let mut p = Parser::new(text)?;
    let mut positions = Vec::new();
    let doc = p.document(&mut positions)?;
    p.expect_end()?;
    Ok((doc, positions))
}

/// Reads only the optional namespace block and the `ontology` declaration.
/// Returns the declared name, or `None` when the document does not start
/// with an ontology header.
pub fn parse_header(text: &str) -> PResult<(Option<NamespaceDecl>, Option<Ident>)> {
    let mut p = Parser::new(text)?;
    let ns = if p.eat_keyword("namespace") { Some(p.namespace_body()?) } else { None };
    if !p.eat_keyword("ontology") {
        return Ok((ns, None));
    }
    let name = if p.at_ident() { Some(p.ident()?) } else { None };
    Ok((ns, name))
}

/// Parses a standalone logical expression. The closing `.` is optional.
pub fn parse_logical_expression(text: &str) -> PResult<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.eat_punct(".");
    p.expect_end()?;
    Ok(e)
}

fn end_position(text: &str) -> Position {
    let mut line = 1;
    let mut column = 1;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    Position { offset: text.len(), line, column }
}

struct Parser {
    toks: Vec<Token>,
    idx: usize,
    eof: Position,
}

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        Ok(Parser { toks: tokenize(text)?, idx: 0, eof: end_position(text) })
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.idx)
    }

    fn pos(&self) -> Position {
        self.peek().map(|t| t.pos).unwrap_or(self.eof)
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let found = self.peek().map(|t| t.to_string()).unwrap_or_else(|| "end of input".into());
        let message = if expected.is_empty() {
            format!("unexpected {found}")
        } else {
            format!("expected {}, found {found}", expected.join(" or "))
        };
        ParseError {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
            message,
        }
    }

    fn unsupported(&self, tok: &Token) -> ParseError {
        ParseError {
            pos: tok.pos,
            expected: Vec::new(),
            found: tok.lexeme.clone(),
            message: format!("unsupported construct '{}'", tok.lexeme),
        }
    }

    fn check_unsupported(&self) -> PResult<()> {
        if let Some(t) = self.peek() {
            let bad = (t.kind == TokenKind::Keyword && UNSUPPORTED_WORDS.contains(&t.lexeme.as_str()))
                || (t.kind == TokenKind::Punct && UNSUPPORTED_PUNCT.contains(&t.lexeme.as_str()));
            if bad {
                return Err(self.unsupported(t));
            }
        }
        Ok(())
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(&[kw]))
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.check_unsupported()?;
            Err(self.error(&[&format!("'{p}'")]))
        }
    }

    fn expect_end(&self) -> PResult<()> {
        if self.peek().is_none() {
            Ok(())
        } else {
            self.check_unsupported()?;
            Err(self.error(&["end of input"]))
        }
    }

    fn at_item_start(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Keyword && ITEM_KEYWORDS.contains(&t.lexeme.as_str()))
    }

    // ---- names -------------------------------------------------------------

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(|t| {
            matches!(t.kind, TokenKind::Identifier | TokenKind::QName | TokenKind::IriLiteral)
        })
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let s = t.lexeme.clone();
                self.idx += 1;
                Ok(Ident::Bare(s))
            }
            Some(t) if t.kind == TokenKind::QName => {
                let (prefix, local) = split_qname(&t.lexeme);
                let id = Ident::qname(prefix, local);
                self.idx += 1;
                Ok(id)
            }
            Some(t) if t.kind == TokenKind::IriLiteral => {
                let s = t.lexeme.clone();
                self.idx += 1;
                Ok(Ident::Iri(s))
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// `name` or `{a, b, ...}`
    fn ident_set(&mut self) -> PResult<Vec<Ident>> {
        if self.eat_punct("{") {
            let mut out = vec![self.ident()?];
            while self.eat_punct(",") {
                out.push(self.ident()?);
            }
            self.expect_punct("}")?;
            Ok(out)
        } else {
            Ok(vec![self.ident()?])
        }
    }

    fn term_set(&mut self) -> PResult<Vec<Term>> {
        if self.eat_punct("{") {
            let mut out = vec![self.term()?];
            while self.eat_punct(",") {
                out.push(self.term()?);
            }
            self.expect_punct("}")?;
            Ok(out)
        } else {
            Ok(vec![self.term()?])
        }
    }

    // ---- documents ---------------------------------------------------------

    fn document(&mut self, positions: &mut Vec<Position>) -> PResult<Document> {
        let mut doc = Document::default();
        if self.eat_keyword("namespace") {
            doc.namespace = Some(self.namespace_body()?);
        }
        while self.peek().is_some() {
            positions.push(self.pos());
            doc.items.push(self.item()?);
        }
        Ok(doc)
    }

    fn namespace_body(&mut self) -> PResult<NamespaceDecl> {
        let mut ns = NamespaceDecl::default();
        let braced = self.eat_punct("{");
        loop {
            match self.peek() {
                Some(t) if t.kind == TokenKind::IriLiteral => {
                    if ns.default.is_some() {
                        return Err(self.error(&["prefix"]));
                    }
                    ns.default = Some(t.lexeme.clone());
                    self.idx += 1;
                }
                Some(t) if t.kind == TokenKind::Identifier && braced => {
                    let prefix = t.lexeme.clone();
                    self.idx += 1;
                    match self.peek() {
                        Some(t) if t.kind == TokenKind::IriLiteral => {
                            ns.prefixes.push((prefix, t.lexeme.clone()));
                            self.idx += 1;
                        }
                        _ => return Err(self.error(&["IRI"])),
                    }
                }
                _ => return Err(self.error(&["IRI", "prefix"])),
            }
            if !braced || !self.eat_punct(",") {
                break;
            }
        }
        if braced {
            self.expect_punct("}")?;
        }
        Ok(ns)
    }

    fn item(&mut self) -> PResult<Item> {
        self.check_unsupported()?;
        let Some(t) = self.peek() else { return Err(self.error(&["definition"])) };
        if t.kind != TokenKind::Keyword {
            return Err(self.error(&["definition"]));
        }
        match t.lexeme.as_str() {
            "ontology" => {
                self.idx += 1;
                let name = if self.at_ident() { Some(self.ident()?) } else { None };
                let nfp = self.opt_nfp()?;
                Ok(Item::Ontology { name, nfp })
            }
            "importsOntology" => {
                self.idx += 1;
                Ok(Item::Imports(self.ident_set()?))
            }
            "concept" => self.concept().map(Item::Concept),
            "instance" => self.instance().map(Item::Instance),
            "relation" => self.relation().map(Item::Relation),
            "axiom" => self.axiom().map(Item::Axiom),
            "capability" => self.capability().map(Item::Capability),
            _ => Err(self.error(&["definition"])),
        }
    }

    fn opt_nfp(&mut self) -> PResult<Option<Nfp>> {
        let (style, end) = if self.eat_keyword("nfp") {
            (NfpStyle::Short, "endnfp")
        } else if self.eat_keyword("nonFunctionalProperties") {
            (NfpStyle::Long, "endNonFunctionalProperties")
        } else {
            return Ok(None);
        };
        let mut props = Vec::new();
        while !self.eat_keyword(end) {
            if !self.at_ident() {
                return Err(self.error(&[end, "property"]));
            }
            let name = self.ident()?;
            self.expect_keyword("hasValue")?;
            let values = self.term_set()?;
            props.push(AttrValue { name, values });
            self.eat_punct(",");
        }
        Ok(Some(Nfp { style, props }))
    }

    fn constraint_kind(&mut self) -> Option<ConstraintKind> {
        if self.eat_keyword("ofType") {
            Some(ConstraintKind::OfType)
        } else if self.eat_keyword("impliesType") {
            Some(ConstraintKind::ImpliesType)
        } else {
            None
        }
    }

    fn concept(&mut self) -> PResult<ConceptDecl> {
        self.expect_keyword("concept")?;
        let name = self.ident()?;
        let supers = if self.eat_keyword("subConceptOf") { self.ident_set()? } else { Vec::new() };
        let nfp = self.opt_nfp()?;
        let mut attributes = Vec::new();
        while self.at_ident() {
            let attr = self.ident()?;
            let Some(kind) = self.constraint_kind() else {
                return Err(self.error(&["ofType", "impliesType"]));
            };
            let types = self.ident_set()?;
            attributes.push(AttributeDecl { name: attr, kind, types });
        }
        Ok(ConceptDecl { name, supers, nfp, attributes })
    }

    fn instance(&mut self) -> PResult<InstanceDecl> {
        self.expect_keyword("instance")?;
        let name = self.ident()?;
        let member_of = if self.eat_keyword("memberOf") { self.ident_set()? } else { Vec::new() };
        let nfp = self.opt_nfp()?;
        let mut values = Vec::new();
        while self.at_ident() {
            let attr = self.ident()?;
            self.expect_keyword("hasValue")?;
            values.push(AttrValue { name: attr, values: self.term_set()? });
        }
        Ok(InstanceDecl { name, member_of, nfp, values })
    }

    fn relation(&mut self) -> PResult<RelationDecl> {
        self.expect_keyword("relation")?;
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat_punct("(") {
            loop {
                let pname = match self.peek() {
                    Some(t) if t.kind == TokenKind::Identifier => {
                        let s = t.lexeme.clone();
                        self.idx += 1;
                        Some(s)
                    }
                    _ => None,
                };
                let Some(kind) = self.constraint_kind() else {
                    return Err(self.error(&["ofType", "impliesType"]));
                };
                let types = self.ident_set()?;
                params.push(ParamDecl { name: pname, kind, types });
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        let super_relation = if self.eat_keyword("subRelationOf") { Some(self.ident()?) } else { None };
        let nfp = self.opt_nfp()?;
        Ok(RelationDecl { name, params, super_relation, nfp })
    }

    /// Body after `definedBy`: an expression, or nothing before `.` / the next item.
    fn defined_by_body(&mut self) -> PResult<Option<Expr>> {
        self.expect_keyword("definedBy")?;
        if self.eat_punct(".") || self.peek().is_none() || self.at_item_start() {
            return Ok(None);
        }
        let e = self.expr()?;
        self.eat_punct(".");
        Ok(Some(e))
    }

    fn axiom(&mut self) -> PResult<AxiomDecl> {
        self.expect_keyword("axiom")?;
        let name = self.ident()?;
        let nfp = self.opt_nfp()?;
        let body = self.defined_by_body()?;
        Ok(AxiomDecl { name, nfp, body })
    }

    fn capability(&mut self) -> PResult<CapabilityDecl> {
        self.expect_keyword("capability")?;
        let name = if self.at_ident() { Some(self.ident()?) } else { None };
        let nfp = self.opt_nfp()?;
        let mut imports = Vec::new();
        if self.eat_keyword("importsOntology") {
            imports = self.ident_set()?;
        }
        let mut shared_variables = Vec::new();
        if self.eat_keyword("sharedVariables") {
            let braced = self.eat_punct("{");
            loop {
                match self.peek() {
                    Some(t) if t.kind == TokenKind::Variable => {
                        shared_variables.push(t.lexeme.clone());
                        self.idx += 1;
                    }
                    _ => return Err(self.error(&["variable"])),
                }
                if !braced || !self.eat_punct(",") {
                    break;
                }
            }
            if braced {
                self.expect_punct("}")?;
            }
        }
        let mut sections = Vec::new();
        while let Some(kind) = self.peek().and_then(|t| {
            SectionKind::ALL.into_iter().find(|k| t.is_keyword(k.keyword()))
        }) {
            self.idx += 1;
            let sname = if self.at_ident() { Some(self.ident()?) } else { None };
            let snfp = self.opt_nfp()?;
            let body = self.defined_by_body()?;
            sections.push(CapabilitySection { kind, name: sname, nfp: snfp, body });
        }
        Ok(CapabilityDecl { name, nfp, imports, shared_variables, sections })
    }

    // ---- expressions -------------------------------------------------------

    fn expr(&mut self) -> PResult<Expr> {
        let first = self.conjunction()?;
        let mut items = vec![first];
        while self.eat_keyword("or") {
            items.push(self.conjunction()?);
        }
        self.check_unsupported()?;
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Disjunction(items) })
    }

    fn conjunction(&mut self) -> PResult<Expr> {
        let first = self.unary()?;
        let mut items = vec![first];
        while self.eat_keyword("and") {
            items.push(self.unary()?);
        }
        self.check_unsupported()?;
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Conjunction(items) })
    }

    fn unary(&mut self) -> PResult<Expr> {
        self.check_unsupported()?;
        if let Some(flavor) = self
            .peek()
            .filter(|t| t.kind == TokenKind::Keyword)
            .and_then(|t| NegFlavor::from_keyword(&t.lexeme))
        {
            self.idx += 1;
            let operand = self.unary()?;
            return Ok(Expr::negation(flavor, operand));
        }
        if self.eat_punct("(") {
            let inner = self.expr()?;
            self.expect_punct(")")?;
            return Ok(Expr::group(inner));
        }
        self.atom()
    }

    fn attr_list(&mut self) -> PResult<Vec<AttrValue>> {
        self.expect_punct("[")?;
        let mut attrs = Vec::new();
        loop {
            let name = self.ident()?;
            self.expect_keyword("hasValue")?;
            let values = self.term_set()?;
            attrs.push(AttrValue { name, values });
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct("]")?;
        Ok(attrs)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.pos();
        let subject = match self.term() {
            Ok(t) => t,
            Err(_) => {
                return Err(self.error(&["expression"]));
            }
        };
        self.check_unsupported()?;
        if self.eat_keyword("memberOf") {
            let member_of = self.term_set()?;
            let attrs = if self.at_punct("[") { self.attr_list()? } else { Vec::new() };
            return Ok(Expr::Molecule(Molecule {
                subject,
                member_of,
                attrs,
                layout: MoleculeLayout::MemberOfFirst,
            }));
        }
        if self.at_punct("[") {
            let attrs = self.attr_list()?;
            let (member_of, layout) = if self.eat_keyword("memberOf") {
                (self.term_set()?, MoleculeLayout::AttributesFirst)
            } else {
                (Vec::new(), MoleculeLayout::MemberOfFirst)
            };
            return Ok(Expr::Molecule(Molecule { subject, member_of, attrs, layout }));
        }
        if self.eat_punct("=") {
            let right = self.term()?;
            return Ok(Expr::Equality { left: subject, right });
        }
        if self.eat_punct("!=") {
            let right = self.term()?;
            return Ok(Expr::Inequality { left: subject, right });
        }
        match subject {
            Term::Func { name, args } => Ok(Expr::RelationApplication { name, args }),
            _ => {
                let mut e = self.error(&["memberOf", "'['", "'='", "'!='"]);
                if self.peek().is_none() {
                    e.pos = e.pos.max(start);
                }
                Err(e)
            }
        }
    }

    fn args(&mut self) -> PResult<Vec<Term>> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn term(&mut self) -> PResult<Term> {
        self.check_unsupported()?;
        let Some(t) = self.peek() else { return Err(self.error(&["term"])) };
        match t.kind {
            TokenKind::Variable => {
                let v = t.lexeme.clone();
                self.idx += 1;
                Ok(Term::Var(v))
            }
            TokenKind::AnonVariable => {
                self.idx += 1;
                Ok(Term::Anon)
            }
            TokenKind::String => {
                let s = t.lexeme.clone();
                self.idx += 1;
                Ok(Term::Str(s))
            }
            TokenKind::Number => {
                let s = t.lexeme.clone();
                self.idx += 1;
                Ok(Term::Num(s))
            }
            TokenKind::DataCtor => {
                let ctor = t.lexeme.clone();
                self.idx += 1;
                let args = self.args()?;
                Ok(Term::Data { ctor, args })
            }
            TokenKind::Identifier | TokenKind::QName | TokenKind::IriLiteral => {
                let name = self.ident()?;
                if self.at_punct("(") {
                    let args = self.args()?;
                    Ok(Term::Func { name, args })
                } else {
                    Ok(Term::Ident(name))
                }
            }
            _ => Err(self.error(&["term"])),
        }
    }
}

fn split_qname(lexeme: &str) -> (&str, &str) {
    let i = lexeme.find(['#', ':']).expect("qname token has a separator");
    (&lexeme[..i], &lexeme[i + 1..])
}
