//! Lexical checks for built-in datatype values and their WSML term form.

use chrono::{NaiveDate, NaiveDateTime};

use crate::iri::{Iri, XSD_NS};
use crate::wsml::{Ident, Term};

fn local(datatype: &Iri) -> Option<&str> {
    datatype.as_str().strip_prefix(XSD_NS)
}

fn is_integer(v: &str) -> bool {
    let digits = v.strip_prefix(['+', '-']).unwrap_or(v);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn is_decimal(v: &str) -> bool {
    let body = v.strip_prefix(['+', '-']).unwrap_or(v);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    (!int.is_empty() || !frac.is_empty()) && all_digits(int) && all_digits(frac) && !body.ends_with('.')
}

/// Whether `value` is a lexically valid literal of `datatype`. Unknown
/// built-ins accept any text.
pub fn is_valid_literal(datatype: &Iri, value: &str) -> bool {
    match local(datatype) {
        Some("integer") => is_integer(value),
        Some("dayOfMonth") => value.parse::<u32>().is_ok_and(|d| (1..=31).contains(&d)) && is_integer(value),
        Some("float") | Some("decimal") => is_decimal(value),
        Some("boolean") => value == "true" || value == "false",
        Some("date") => NaiveDate::parse_from_str(value, "%Y-%m-%d").is_ok(),
        Some("dateTime") => NaiveDateTime::parse_from_str(value, "%Y-%m-%dT%H:%M:%S").is_ok(),
        Some("builtin") => false,
        _ => true,
    }
}

/// A valid sample value, used when probing literal operations.
pub fn sample_literal(datatype: &Iri) -> &'static str {
    match local(datatype) {
        Some("integer") | Some("dayOfMonth") => "1",
        Some("float") | Some("decimal") => "1.5",
        Some("boolean") => "true",
        Some("date") => "2006-05-01",
        Some("dateTime") => "2006-05-01T10:30:00",
        _ => "text",
    }
}

fn num(n: u32) -> Term {
    Term::Num(n.to_string())
}

/// The WSML term for a validated literal.
pub fn literal_term(datatype: &Iri, value: &str) -> Term {
    let data = |ctor: &str, args: Vec<Term>| Term::Data { ctor: format!("_{ctor}"), args };
    match local(datatype) {
        Some("integer") | Some("dayOfMonth") | Some("float") | Some("decimal") => Term::Num(value.to_string()),
        Some("boolean") => data("boolean", vec![Term::Str(value.to_string())]),
        Some("date") => match NaiveDate::parse_from_str(value, "%Y-%m-%d") {
            Ok(d) => {
                use chrono::Datelike;
                data("date", vec![Term::Num(d.year().to_string()), num(d.month()), num(d.day())])
            }
            Err(_) => Term::Str(value.to_string()),
        },
        Some("dateTime") => match NaiveDateTime::parse_from_str(value, "%Y-%m-%dT%H:%M:%S") {
            Ok(t) => {
                use chrono::{Datelike, Timelike};
                data(
                    "dateTime",
                    vec![
                        Term::Num(t.year().to_string()),
                        num(t.month()),
                        num(t.day()),
                        num(t.hour()),
                        num(t.minute()),
                        num(t.second()),
                    ],
                )
            }
            Err(_) => Term::Str(value.to_string()),
        },
        Some(_) => Term::Str(value.to_string()),
        None => Term::Ident(Ident::Iri(value.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexical_shapes() {
        let f = Iri::xsd("float");
        assert!(is_valid_literal(&f, "3.5"));
        assert!(is_valid_literal(&f, "-2"));
        assert!(!is_valid_literal(&f, "3."));
        assert!(!is_valid_literal(&f, "abc"));
        assert!(!is_valid_literal(&Iri::xsd("integer"), "abc"));
        assert!(is_valid_literal(&Iri::xsd("integer"), "+42"));
        assert!(!is_valid_literal(&Iri::xsd("dayOfMonth"), "32"));
        assert!(is_valid_literal(&Iri::xsd("date"), "2006-02-28"));
        assert!(!is_valid_literal(&Iri::xsd("date"), "2006-02-30"));
        assert!(is_valid_literal(&Iri::xsd("string"), "Петър Иванов"));
    }

    #[test]
    fn samples_are_valid() {
        for t in ["integer", "dayOfMonth", "float", "decimal", "boolean", "date", "dateTime", "string"] {
            let dt = Iri::xsd(t);
            assert!(is_valid_literal(&dt, sample_literal(&dt)), "{t}");
        }
    }

    #[test]
    fn date_terms_use_constructor_form() {
        let t = literal_term(&Iri::xsd("date"), "2006-01-09");
        assert_eq!(crate::wsml::printer::term(&t), "_date(2006,1,9)");
    }
}
