//! Serializers for the WSML syntax trees.
//!
//! [`serialize_expression`] and [`serialize_document`] produce compact
//! canonical text that reparses to the same tree. [`pretty_expression`] is the
//! indented layout used for generated axioms.

use std::fmt::Write as _;

use super::ast::*;

pub fn ident(i: &Ident) -> String {
    match i {
        Ident::Bare(s) => s.clone(),
        Ident::QName { prefix, local } => format!("{prefix}:{local}"),
        Ident::Iri(s) => format!("_\"{s}\""),
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn term(t: &Term) -> String {
    match t {
        Term::Var(v) => v.clone(),
        Term::Anon => "?#".into(),
        Term::Ident(i) => ident(i),
        Term::Str(s) => quote(s),
        Term::Num(n) => n.clone(),
        Term::Data { ctor, args } => {
            let a: Vec<_> = args.iter().map(term).collect();
            format!("{ctor}({})", a.join(","))
        }
        Term::Func { name, args } => {
            let a: Vec<_> = args.iter().map(term).collect();
            format!("{}({})", ident(name), a.join(", "))
        }
    }
}

fn set<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    if items.len() == 1 {
        f(&items[0])
    } else {
        let parts: Vec<_> = items.iter().map(f).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

fn attr_value(a: &AttrValue) -> String {
    format!("{} hasValue {}", ident(&a.name), set(&a.values, term))
}

fn molecule_compact(m: &Molecule) -> String {
    let subj = term(&m.subject);
    let member = (!m.member_of.is_empty()).then(|| format!(" memberOf {}", set(&m.member_of, term)));
    let attrs = (!m.attrs.is_empty()).then(|| {
        let parts: Vec<_> = m.attrs.iter().map(attr_value).collect();
        format!("[{}]", parts.join(", "))
    });
    match m.layout {
        MoleculeLayout::AttributesFirst => {
            format!("{subj}{}{}", attrs.unwrap_or_default(), member.unwrap_or_default())
        }
        MoleculeLayout::MemberOfFirst => {
            let attrs = attrs.map(|a| format!(" {a}"));
            format!("{subj}{}{}", member.unwrap_or_default(), attrs.unwrap_or_default())
        }
    }
}

fn expr_compact(e: &Expr) -> String {
    match e {
        Expr::Molecule(m) => molecule_compact(m),
        Expr::Conjunction(xs) => xs.iter().map(expr_compact).collect::<Vec<_>>().join(" and "),
        Expr::Disjunction(xs) => xs.iter().map(expr_compact).collect::<Vec<_>>().join(" or "),
        Expr::Negation { flavor, operand } => format!("{} {}", flavor.keyword(), expr_compact(operand)),
        Expr::Equality { left, right } => format!("{} = {}", term(left), term(right)),
        Expr::Inequality { left, right } => format!("{} != {}", term(left), term(right)),
        Expr::RelationApplication { name, args } => term(&Term::Func { name: name.clone(), args: args.clone() }),
        Expr::Grouping(inner) => format!("( {} )", expr_compact(inner)),
    }
}

/// Compact single-line form, always terminated by `.`.
pub fn serialize_expression(e: &Expr) -> String {
    format!("{}.", expr_compact(e))
}

/// Indented multi-line layout; the result carries no trailing period.
pub fn pretty_expression(e: &Expr) -> String {
    match e {
        Expr::Molecule(m) if m.attrs.is_empty() || m.layout == MoleculeLayout::AttributesFirst => {
            molecule_compact(m)
        }
        Expr::Molecule(m) => {
            let mut s = term(&m.subject);
            if !m.member_of.is_empty() {
                let _ = write!(s, " memberOf {}", set(&m.member_of, term));
            }
            s.push_str("\n[\n");
            let parts: Vec<_> = m.attrs.iter().map(|a| format!("  {}", attr_value(a))).collect();
            s.push_str(&parts.join(",\n"));
            s.push_str("\n]");
            s
        }
        Expr::Conjunction(xs) => xs.iter().map(pretty_expression).collect::<Vec<_>>().join(" and\n"),
        Expr::Disjunction(xs) => xs.iter().map(pretty_expression).collect::<Vec<_>>().join("\nor\n"),
        Expr::Negation { flavor, operand } => format!("{} {}", flavor.keyword(), pretty_expression(operand)),
        Expr::Grouping(inner) => format!("(\n{}\n)", indent(&pretty_expression(inner), 2)),
        other => expr_compact(other),
    }
}

/// Prefixes every non-empty line with `n` spaces.
pub fn indent(text: &str, n: usize) -> String {
    let pad = " ".repeat(n);
    text.lines()
        .map(|l| if l.is_empty() { String::new() } else { format!("{pad}{l}") })
        .collect::<Vec<_>>()
        .join("\n")
}

fn nfp(out: &mut String, n: &Nfp, pad: &str) {
    let (open, close) = match n.style {
        NfpStyle::Long => ("nonFunctionalProperties", "endNonFunctionalProperties"),
        NfpStyle::Short => ("nfp", "endnfp"),
    };
    let _ = writeln!(out, "{pad}{open}");
    for p in &n.props {
        let _ = writeln!(out, "{pad}  {}", attr_value(p));
    }
    let _ = writeln!(out, "{pad}{close}");
}

fn body(out: &mut String, b: &Option<Expr>, pad: &str) {
    let _ = writeln!(out, "{pad}definedBy");
    match b {
        Some(e) => {
            let _ = writeln!(out, "{}.", indent(&pretty_expression(e), pad.len() + 2));
        }
        None => {
            let _ = writeln!(out, "{pad}.");
        }
    }
}

pub fn serialize_document(doc: &Document) -> String {
    let mut out = String::new();
    if let Some(ns) = &doc.namespace {
        let mut parts = Vec::new();
        if let Some(d) = &ns.default {
            parts.push(format!("_\"{d}\""));
        }
        for (p, iri) in &ns.prefixes {
            parts.push(format!("{p} _\"{iri}\""));
        }
        let _ = writeln!(out, "namespace {{ {} }}\n", parts.join(",\n  "));
    }
    for item in &doc.items {
        match item {
            Item::Ontology { name, nfp: n } => {
                out.push_str("ontology");
                if let Some(name) = name {
                    let _ = write!(out, " {}", ident(name));
                }
                out.push('\n');
                if let Some(n) = n {
                    nfp(&mut out, n, "  ");
                }
            }
            Item::Imports(xs) => {
                let _ = writeln!(out, "importsOntology {}", set(xs, ident));
            }
            Item::Concept(c) => {
                let _ = write!(out, "concept {}", ident(&c.name));
                if !c.supers.is_empty() {
                    let _ = write!(out, " subConceptOf {}", set(&c.supers, ident));
                }
                out.push('\n');
                if let Some(n) = &c.nfp {
                    nfp(&mut out, n, "  ");
                }
                for a in &c.attributes {
                    let _ = writeln!(out, "  {} {} {}", ident(&a.name), a.kind.keyword(), set(&a.types, ident));
                }
            }
            Item::Instance(i) => {
                let _ = write!(out, "instance {}", ident(&i.name));
                if !i.member_of.is_empty() {
                    let _ = write!(out, " memberOf {}", set(&i.member_of, ident));
                }
                out.push('\n');
                if let Some(n) = &i.nfp {
                    nfp(&mut out, n, "  ");
                }
                for v in &i.values {
                    let _ = writeln!(out, "  {}", attr_value(v));
                }
            }
            Item::Relation(r) => {
                let _ = write!(out, "relation {}", ident(&r.name));
                if !r.params.is_empty() {
                    let ps: Vec<_> = r
                        .params
                        .iter()
                        .map(|p| {
                            let head = p.name.as_ref().map(|n| format!("{n} ")).unwrap_or_default();
                            format!("{head}{} {}", p.kind.keyword(), set(&p.types, ident))
                        })
                        .collect();
                    let _ = write!(out, " ({})", ps.join(", "));
                }
                if let Some(s) = &r.super_relation {
                    let _ = write!(out, "\n  subRelationOf {}", ident(s));
                }
                out.push('\n');
                if let Some(n) = &r.nfp {
                    nfp(&mut out, n, "  ");
                }
            }
            Item::Axiom(a) => {
                let _ = writeln!(out, "axiom {}", ident(&a.name));
                if let Some(n) = &a.nfp {
                    nfp(&mut out, n, "  ");
                }
                body(&mut out, &a.body, "  ");
            }
            Item::Capability(c) => {
                out.push_str("capability");
                if let Some(name) = &c.name {
                    let _ = write!(out, " {}", ident(name));
                }
                out.push('\n');
                if let Some(n) = &c.nfp {
                    nfp(&mut out, n, "  ");
                }
                if !c.imports.is_empty() {
                    let _ = writeln!(out, "  importsOntology {}", set(&c.imports, ident));
                }
                if !c.shared_variables.is_empty() {
                    let _ = writeln!(out, "  sharedVariables {}", set(&c.shared_variables, |v| v.clone()));
                }
                for s in &c.sections {
                    let _ = write!(out, "  {}", s.kind.keyword());
                    if let Some(name) = &s.name {
                        let _ = write!(out, " {}", ident(name));
                    }
                    out.push('\n');
                    if let Some(n) = &s.nfp {
                        nfp(&mut out, n, "    ");
                    }
                    body(&mut out, &s.body, "    ");
                }
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_document, parse_logical_expression};
    use super::*;

    #[test]
    fn negation_of_grouped_molecule() {
        let e = Expr::negation(
            NegFlavor::Not,
            Expr::group(Expr::Molecule(Molecule {
                subject: Term::var("?x"),
                member_of: vec![Term::Ident(Ident::bare("C"))],
                attrs: vec![],
                layout: MoleculeLayout::MemberOfFirst,
            })),
        );
        assert_eq!(serialize_expression(&e), "not ( ?x memberOf C ).");
        assert_eq!(parse_logical_expression(&serialize_expression(&e)).unwrap(), e);
    }

    #[test]
    fn qnames_normalize_to_colon() {
        let e = parse_logical_expression("?x[dc#title hasValue loc#austria]").unwrap();
        assert_eq!(serialize_expression(&e), "?x [dc:title hasValue loc:austria].");
    }

    #[test]
    fn pretty_layout() {
        let e = parse_logical_expression(
            "?i memberOf itinerary[trip hasValue ?t] and ( ?t memberOf trip ) and ( ?e = innsbruckHbf )",
        )
        .unwrap();
        let text = pretty_expression(&e);
        assert_eq!(
            text,
            "?i memberOf itinerary\n[\n  trip hasValue ?t\n] and\n(\n  ?t memberOf trip\n) and\n(\n  ?e = innsbruckHbf\n)"
        );
        assert_eq!(parse_logical_expression(&text).unwrap(), e);
    }

    #[test]
    fn strings_escape() {
        let e = parse_logical_expression(r#"?x = "a \"b\" \\ c""#).unwrap();
        assert_eq!(parse_logical_expression(&serialize_expression(&e)).unwrap(), e);
    }

    #[test]
    fn document_round_trip() {
        let src = "namespace { _\"http://e.org/o#\", dc _\"http://purl.org/dc/elements/1.1#\" }\n\
            ontology _\"http://e.org/o\"\n\
            importsOntology {_\"http://e.org/a\", _\"http://e.org/b\"}\n\
            concept A subConceptOf {B, C} nfp dc#title hasValue \"t\" endnfp x ofType _string\n\
            instance i memberOf A x hasValue {1, -2.5} d hasValue _date(2001,1,2)\n\
            relation r (p ofType A, impliesType {A, B}) subRelationOf s\n\
            axiom ax nonFunctionalProperties dc#description hasValue \"d\" endNonFunctionalProperties definedBy ?x memberOf A or not ?x[x hasValue \"s\"].\n\
            axiom empty definedBy .\n\
            capability sharedVariables {?a, ?b} precondition definedBy ?a memberOf A. effect e1 definedBy ?b memberOf B.";
        let doc = parse_document(src).unwrap();
        let text = serialize_document(&doc);
        assert_eq!(parse_document(&text).unwrap(), doc, "{text}");
    }
}
