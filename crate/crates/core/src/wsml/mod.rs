//! The WSML subset: tokens, syntax trees, parsing and serialization.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::*;
pub use lexer::{tokenize, LexError, Position, Token, TokenKind};
pub use parser::{parse_document, parse_document_with_positions, parse_header, parse_logical_expression, ParseError};
pub use printer::{pretty_expression, serialize_document, serialize_expression};

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn name() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["a", "trip", "Human", "station", "произлиза-от", "_float", "x1"])
            .prop_map(str::to_string)
    }

    fn ident() -> impl Strategy<Value = Ident> {
        prop_oneof![
            name().prop_map(Ident::Bare),
            (prop::sample::select(vec!["loc", "dc", "xsd"]), name())
                .prop_map(|(p, l)| Ident::qname(p, l)),
            name().prop_map(|l| Ident::Iri(format!("http://e.org/o#{l}"))),
        ]
    }

    /// A bare `_name(` lexes as a data constructor, so function names avoid it.
    fn func_ident() -> impl Strategy<Value = Ident> {
        ident().prop_filter("not a data constructor", |i| !matches!(i, Ident::Bare(s) if s.starts_with('_')))
    }

    fn leaf_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            (0u8..5).prop_map(|i| Term::Var(format!("?v{i}"))),
            Just(Term::Anon),
            ident().prop_map(Term::Ident),
            "[a-z \"\\\\é\n]{0,8}".prop_map(Term::Str),
            prop::sample::select(vec!["0", "42", "-3", "2.5", "+7"]).prop_map(|s| Term::Num(s.into())),
            (1u32..2100, 1u32..13, 1u32..29).prop_map(|(y, m, d)| Term::Data {
                ctor: "_date".into(),
                args: vec![y, m, d].into_iter().map(|n| Term::Num(n.to_string())).collect(),
            }),
        ]
    }

    fn term() -> impl Strategy<Value = Term> {
        leaf_term().prop_recursive(2, 6, 3, |inner| {
            (func_ident(), prop::collection::vec(inner, 0..3)).prop_map(|(name, args)| Term::Func { name, args })
        })
    }

    fn atom() -> impl Strategy<Value = Expr> {
        let attr = (ident(), prop::collection::vec(term(), 1..3)).prop_map(|(name, values)| AttrValue { name, values });
        let molecule = (
            term(),
            prop::collection::vec(term(), 0..3),
            prop::collection::vec(attr, 0..3),
            any::<bool>(),
        )
            .prop_filter("molecule needs memberOf or attributes", |(_, m, a, _)| !m.is_empty() || !a.is_empty())
            .prop_map(|(subject, member_of, attrs, attrs_first)| {
                let layout = if attrs_first && !member_of.is_empty() && !attrs.is_empty() {
                    MoleculeLayout::AttributesFirst
                } else {
                    MoleculeLayout::MemberOfFirst
                };
                Expr::Molecule(Molecule { subject, member_of, attrs, layout })
            });
        prop_oneof![
            3 => molecule,
            1 => (term(), term()).prop_map(|(left, right)| Expr::Equality { left, right }),
            1 => (term(), term()).prop_map(|(left, right)| Expr::Inequality { left, right }),
            1 => (func_ident(), prop::collection::vec(term(), 0..4))
                .prop_map(|(name, args)| Expr::RelationApplication { name, args }),
        ]
    }

    /// Wraps children in explicit groups wherever precedence would otherwise
    /// reshape the tree on reparse.
    fn canonical(e: Expr) -> Expr {
        fn wrap_if(e: Expr, f: impl Fn(&Expr) -> bool) -> Expr {
            if f(&e) {
                Expr::group(e)
            } else {
                e
            }
        }
        match e {
            Expr::Conjunction(xs) => Expr::Conjunction(
                xs.into_iter()
                    .map(canonical)
                    .map(|x| wrap_if(x, |x| matches!(x, Expr::Conjunction(_) | Expr::Disjunction(_))))
                    .collect(),
            ),
            Expr::Disjunction(xs) => Expr::Disjunction(
                xs.into_iter().map(canonical).map(|x| wrap_if(x, |x| matches!(x, Expr::Disjunction(_)))).collect(),
            ),
            Expr::Negation { flavor, operand } => Expr::negation(
                flavor,
                wrap_if(canonical(*operand), |x| matches!(x, Expr::Conjunction(_) | Expr::Disjunction(_))),
            ),
            Expr::Grouping(inner) => Expr::group(canonical(*inner)),
            other => other,
        }
    }

    fn expr() -> impl Strategy<Value = Expr> {
        atom()
            .prop_recursive(6, 48, 4, |inner| {
                prop_oneof![
                    prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Conjunction),
                    prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Disjunction),
                    (prop::sample::select(vec![NegFlavor::Not, NegFlavor::Naf, NegFlavor::Neg]), inner.clone())
                        .prop_map(|(f, e)| Expr::negation(f, e)),
                    inner.prop_map(Expr::group),
                ]
            })
            .prop_map(canonical)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn expression_round_trip(e in expr()) {
            let text = serialize_expression(&e);
            prop_assert_eq!(parse_logical_expression(&text).unwrap(), e.clone());
            let pretty = pretty_expression(&e);
            prop_assert_eq!(parse_logical_expression(&pretty).unwrap(), e);
        }

        #[test]
        fn tokenizer_is_total(s in "\\PC{0,40}") {
            // Either a full stream with increasing positions, or a single error.
            match tokenize(&s) {
                Ok(toks) => prop_assert!(toks.windows(2).all(|w| w[0].pos.offset < w[1].pos.offset)),
                Err(e) => prop_assert!(e.pos.offset <= s.len()),
            }
        }

        #[test]
        fn error_positions_in_bounds(s in "[?a-z \\[\\]().=,{}]{0,30}") {
            if let Err(e) = parse_logical_expression(&s) {
                prop_assert!(e.pos.offset <= s.len());
            }
        }
    }
}
