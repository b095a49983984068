//! Tokenizer for the frame-style WSML subset.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Location of a token or diagnostic inside a source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Position {
    /// Byte offset from the start of the input.
    pub offset: usize,
    /// 1-based line.
    pub line: usize,
    /// 1-based column, counted in characters.
    pub column: usize,
}

impl Position {
    pub const START: Position = Position { offset: 0, line: 1, column: 1 };
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    /// `prefix#local` or `prefix:local`; the lexeme keeps the source separator.
    QName,
    /// `?name`
    Variable,
    /// `?#`
    AnonVariable,
    /// `_"http://..."`; the lexeme is the IRI without quotes.
    IriLiteral,
    /// Double-quoted string; the lexeme is the unescaped content.
    String,
    Number,
    Punct,
    /// `_date`, `_dateTime`, ... immediately followed by `(`.
    DataCtor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub pos: Position,
}

impl Token {
    pub fn is_keyword(&self, kw: &str) -> bool {
        self.kind == TokenKind::Keyword && self.lexeme == kw
    }

    pub fn is_punct(&self, p: &str) -> bool {
        self.kind == TokenKind::Punct && self.lexeme == p
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::String => write!(f, "\"{}\"", self.lexeme),
            TokenKind::IriLiteral => write!(f, "_\"{}\"", self.lexeme),
            _ => f.write_str(&self.lexeme),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct LexError {
    pub pos: Position,
    pub message: String,
}

/// Every word the lexer classifies as a keyword. The logical connectives past
/// `neg` are recognized so the parser can reject them with a precise message.
pub const KEYWORDS: &[&str] = &[
    "namespace",
    "ontology",
    "importsOntology",
    "usesMediator",
    "concept",
    "subConceptOf",
    "nfp",
    "endnfp",
    "nonFunctionalProperties",
    "endNonFunctionalProperties",
    "ofType",
    "impliesType",
    "instance",
    "memberOf",
    "hasValue",
    "relation",
    "subRelationOf",
    "axiom",
    "definedBy",
    "capability",
    "sharedVariables",
    "precondition",
    "postcondition",
    "assumption",
    "effect",
    "and",
    "or",
    "not",
    "naf",
    "neg",
    "implies",
    "impliedBy",
    "equivalent",
    "forAll",
    "exists",
];

/// Tokenize `text`. Whitespace and comments (`/* */`, `//`) are skipped.
pub fn tokenize(text: &str) -> Result<Vec<Token>, LexError> {
    Lexer::new(text).run()
}

/// Characters allowed after the first character of a name.
pub(crate) fn is_name_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

pub(crate) fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

struct Lexer<'a> {
    src: &'a str,
    chars: Vec<(usize, char)>,
    idx: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().collect(), idx: 0, line: 1, column: 1 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).map(|&(_, c)| c)
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.idx + n).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.idx).map(|&(o, _)| o).unwrap_or(self.src.len())
    }

    fn pos(&self) -> Position {
        Position { offset: self.offset(), line: self.line, column: self.column }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, pos: Position, message: impl Into<String>) -> LexError {
        LexError { pos, message: message.into() }
    }

    fn run(mut self) -> Result<Vec<Token>, LexError> {
        let mut out = Vec::new();
        while let Some(tok) = self.next_token()? {
            out.push(tok);
        }
        Ok(out)
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match (self.peek(), self.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('*')) => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(), self.peek_at(1)) {
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => return Err(self.error(start, "unterminated comment")),
                        }
                    }
                }
                (Some('/'), Some('/')) => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn take_name(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if is_name_continue(c) {
                s.push(c);
                self.bump();
            } else if c == '-' && self.peek_at(1).is_some_and(is_name_continue) && !s.is_empty() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn take_quoted(&mut self, start: Position) -> Result<String, LexError> {
        // opening quote already consumed
        let mut s = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(c @ ('"' | '\\')) => s.push(c),
                    Some(c) => {
                        s.push('\\');
                        s.push(c);
                    }
                    None => return Err(self.error(start, "unterminated string")),
                },
                Some(c) => s.push(c),
                None => return Err(self.error(start, "unterminated string")),
            }
        }
    }

    fn take_number(&mut self) -> String {
        let mut s = String::new();
        if let Some(c @ ('-' | '+')) = self.peek() {
            s.push(c);
            self.bump();
        }
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            s.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                s.push(c);
                self.bump();
            }
        }
        s
    }

    fn next_token(&mut self) -> Result<Option<Token>, LexError> {
        self.skip_trivia()?;
        let pos = self.pos();
        let Some(c) = self.peek() else { return Ok(None) };
        let tok = |kind, lexeme: String| Ok(Some(Token { kind, lexeme, pos }));

        if c == '?' {
            self.bump();
            if self.peek() == Some('#') {
                self.bump();
                return tok(TokenKind::AnonVariable, "?#".into());
            }
            if !self.peek().is_some_and(is_name_start) {
                return Err(self.error(pos, "expected variable name after '?'"));
            }
            let name = self.take_name();
            return tok(TokenKind::Variable, format!("?{name}"));
        }
        if c == '"' {
            self.bump();
            let s = self.take_quoted(pos)?;
            return tok(TokenKind::String, s);
        }
        if c == '_' && self.peek_at(1) == Some('"') {
            self.bump();
            self.bump();
            let s = self.take_quoted(pos)?;
            return tok(TokenKind::IriLiteral, s);
        }
        if c.is_ascii_digit()
            || (matches!(c, '-' | '+') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
        {
            let n = self.take_number();
            return tok(TokenKind::Number, n);
        }
        if is_name_start(c) {
            let name = self.take_name();
            // qualified name: prefix followed by '#' or ':' and a name character
            if let Some(sep @ ('#' | ':')) = self.peek() {
                if self.peek_at(1).is_some_and(is_name_start) {
                    self.bump();
                    let local = self.take_name();
                    return tok(TokenKind::QName, format!("{name}{sep}{local}"));
                }
            }
            if name.starts_with('_') && name.len() > 1 && self.peek() == Some('(') {
                return tok(TokenKind::DataCtor, name);
            }
            if KEYWORDS.contains(&name.as_str()) {
                return tok(TokenKind::Keyword, name);
            }
            return tok(TokenKind::Identifier, name);
        }

        const MULTI: &[&str] = &[":=:", ":-", "!-", "!="];
        for m in MULTI {
            let len = m.chars().count();
            if (0..len).all(|i| self.peek_at(i) == m.chars().nth(i)) {
                for _ in 0..len {
                    self.bump();
                }
                return tok(TokenKind::Punct, (*m).to_string());
            }
        }
        if "()[]{},.=/".contains(c) {
            self.bump();
            return tok(TokenKind::Punct, c.to_string());
        }
        Err(self.error(pos, format!("unexpected character '{c}'")))
    }
}
