//! Tokenizer for the extended SQL dialect.
//!
//! Unquoted identifiers are case-insensitive and case-folded to upper case;
//! double-quoted identifiers are case-sensitive and may contain any Unicode
//! character. String constants are single-quoted. Edge arrows are composite
//! tokens. `--` starts a line comment.

use chrono::NaiveDate;

use crate::error::EngineError;
use crate::values::parse_date_dmy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Create,
    Match,
    Type,
    Under,
    Where,
    Set,
    Delete,
    NodeType,
    EdgeType,
    As,
    Null,
    Date,
    Order,
    Name,
    And,
    Or,
    Not,
    True,
    False,
}

impl Keyword {
    pub fn from_folded(s: &str) -> Option<Keyword> {
        Some(match s {
            "CREATE" => Keyword::Create,
            "MATCH" => Keyword::Match,
            "TYPE" => Keyword::Type,
            "UNDER" => Keyword::Under,
            "WHERE" => Keyword::Where,
            "SET" => Keyword::Set,
            "DELETE" => Keyword::Delete,
            "NODETYPE" => Keyword::NodeType,
            "EDGETYPE" => Keyword::EdgeType,
            "AS" => Keyword::As,
            "NULL" => Keyword::Null,
            "DATE" => Keyword::Date,
            "ORDER" => Keyword::Order,
            "NAME" => Keyword::Name,
            "AND" => Keyword::And,
            "OR" => Keyword::Or,
            "NOT" => Keyword::Not,
            "TRUE" => Keyword::True,
            "FALSE" => Keyword::False,
            _ => return None,
        })
    }

    pub fn text(self) -> &'static str {
        match self {
            Keyword::Create => "CREATE",
            Keyword::Match => "MATCH",
            Keyword::Type => "TYPE",
            Keyword::Under => "UNDER",
            Keyword::Where => "WHERE",
            Keyword::Set => "SET",
            Keyword::Delete => "DELETE",
            Keyword::NodeType => "NODETYPE",
            Keyword::EdgeType => "EDGETYPE",
            Keyword::As => "AS",
            Keyword::Null => "NULL",
            Keyword::Date => "DATE",
            Keyword::Order => "ORDER",
            Keyword::Name => "NAME",
            Keyword::And => "AND",
            Keyword::Or => "OR",
            Keyword::Not => "NOT",
            Keyword::True => "TRUE",
            Keyword::False => "FALSE",
        }
    }
}

/// Returns true when a label or identifier string needs no double quotes.
pub fn is_bare_identifier(s: &str) -> bool {
    if let Some(rest) = s.strip_prefix('&') {
        return !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit());
    }
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() || c == '_' => {}
        _ => return false,
    }
    if !chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_') {
        return false;
    }
    Keyword::from_folded(s).is_none()
}

/// Case-folding applied to unquoted identifiers.
pub fn fold_ident(s: &str) -> String {
    s.to_uppercase()
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    /// Unquoted identifier, already case-folded.
    Ident(String),
    /// Double-quoted identifier, case preserved.
    QuotedIdent(String),
    /// System-style name: `&` followed by digits.
    AnonName(String),
    Str(String),
    Num(i64),
    DateLit(NaiveDate),
    Keyword(Keyword),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Dot,
    Semicolon,
    /// `-[`
    EdgeOpenRight,
    /// `]->`
    EdgeCloseRight,
    /// `<-[`
    EdgeOpenLeft,
    /// `]-`
    EdgeCloseLeft,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier {}", s),
            TokenKind::QuotedIdent(s) => format!("identifier \"{}\"", s),
            TokenKind::AnonName(s) => format!("identifier {}", s),
            TokenKind::Str(_) => "string constant".to_string(),
            TokenKind::Num(n) => format!("number {}", n),
            TokenKind::DateLit(_) => "date literal".to_string(),
            TokenKind::Keyword(k) => k.text().to_string(),
            TokenKind::LParen => "'('".to_string(),
            TokenKind::RParen => "')'".to_string(),
            TokenKind::LBrace => "'{'".to_string(),
            TokenKind::RBrace => "'}'".to_string(),
            TokenKind::LBracket => "'['".to_string(),
            TokenKind::RBracket => "']'".to_string(),
            TokenKind::Colon => "':'".to_string(),
            TokenKind::Comma => "','".to_string(),
            TokenKind::Dot => "'.'".to_string(),
            TokenKind::Semicolon => "';'".to_string(),
            TokenKind::EdgeOpenRight => "'-['".to_string(),
            TokenKind::EdgeCloseRight => "']->'".to_string(),
            TokenKind::EdgeOpenLeft => "'<-['".to_string(),
            TokenKind::EdgeCloseLeft => "']-'".to_string(),
            TokenKind::Eq => "'='".to_string(),
            TokenKind::Ne => "'<>'".to_string(),
            TokenKind::Lt => "'<'".to_string(),
            TokenKind::Le => "'<='".to_string(),
            TokenKind::Gt => "'>'".to_string(),
            TokenKind::Ge => "'>='".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub column: u32,
    /// Line on which the token ends; differs from `line` only for multi-line
    /// quoted strings and identifiers.
    pub end_line: u32,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(source: &'a str) -> Self {
        Lexer {
            chars: source.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: u32, column: u32, message: impl Into<String>) -> EngineError {
        EngineError::syntax(line, column, message)
    }

    /// Reads the body of a quoted run, with the quote character doubled to
    /// escape itself. The opening quote has already been consumed.
    fn quoted_body(&mut self, quote: char, line: u32, column: u32) -> Result<String, EngineError> {
        let mut text = String::new();
        loop {
            match self.bump() {
                None => {
                    let what = if quote == '\'' { "string constant" } else { "quoted identifier" };
                    return Err(self.error(line, column, format!("unterminated {}", what)));
                }
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        text.push(quote);
                    } else {
                        return Ok(text);
                    }
                }
                Some(c) => text.push(c),
            }
        }
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, EngineError> {
    let mut lx = Lexer::new(source);
    let mut tokens = Vec::new();

    while let Some(c) = lx.peek() {
        let (line, column) = (lx.line, lx.column);
        let mut push = |kind: TokenKind, lx: &Lexer| {
            tokens.push(Token {
                kind,
                line,
                column,
                end_line: lx.line,
            });
        };
        match c {
            c if c.is_whitespace() => {
                lx.bump();
            }
            '-' => {
                lx.bump();
                match lx.peek() {
                    Some('-') => {
                        // line comment
                        while let Some(c) = lx.peek() {
                            if c == '\n' {
                                break;
                            }
                            lx.bump();
                        }
                    }
                    Some('[') => {
                        lx.bump();
                        push(TokenKind::EdgeOpenRight, &lx);
                    }
                    Some(d) if d.is_ascii_digit() => {
                        let n = read_number(&mut lx, line, column)?;
                        push(TokenKind::Num(-n), &lx);
                    }
                    _ => return Err(lx.error(line, column, "unexpected character '-'")),
                }
            }
            '<' => {
                lx.bump();
                match lx.peek() {
                    Some('-') => {
                        lx.bump();
                        match lx.peek() {
                            Some('[') => {
                                lx.bump();
                                push(TokenKind::EdgeOpenLeft, &lx);
                            }
                            _ => {
                                return Err(lx.error(line, column, "expected '<-[' edge opener"))
                            }
                        }
                    }
                    Some('=') => {
                        lx.bump();
                        push(TokenKind::Le, &lx);
                    }
                    Some('>') => {
                        lx.bump();
                        push(TokenKind::Ne, &lx);
                    }
                    _ => push(TokenKind::Lt, &lx),
                }
            }
            ']' => {
                lx.bump();
                if lx.peek() == Some('-') {
                    lx.bump();
                    if lx.peek() == Some('>') {
                        lx.bump();
                        push(TokenKind::EdgeCloseRight, &lx);
                    } else {
                        push(TokenKind::EdgeCloseLeft, &lx);
                    }
                } else {
                    push(TokenKind::RBracket, &lx);
                }
            }
            '>' => {
                lx.bump();
                if lx.peek() == Some('=') {
                    lx.bump();
                    push(TokenKind::Ge, &lx);
                } else {
                    push(TokenKind::Gt, &lx);
                }
            }
            '=' => {
                lx.bump();
                push(TokenKind::Eq, &lx);
            }
            '(' => {
                lx.bump();
                push(TokenKind::LParen, &lx);
            }
            ')' => {
                lx.bump();
                push(TokenKind::RParen, &lx);
            }
            '{' => {
                lx.bump();
                push(TokenKind::LBrace, &lx);
            }
            '}' => {
                lx.bump();
                push(TokenKind::RBrace, &lx);
            }
            '[' => {
                lx.bump();
                push(TokenKind::LBracket, &lx);
            }
            ':' => {
                lx.bump();
                push(TokenKind::Colon, &lx);
            }
            ',' => {
                lx.bump();
                push(TokenKind::Comma, &lx);
            }
            '.' => {
                lx.bump();
                push(TokenKind::Dot, &lx);
            }
            ';' => {
                lx.bump();
                push(TokenKind::Semicolon, &lx);
            }
            '\'' => {
                lx.bump();
                let text = lx.quoted_body('\'', line, column)?;
                push(TokenKind::Str(text), &lx);
            }
            '"' => {
                lx.bump();
                let text = lx.quoted_body('"', line, column)?;
                push(TokenKind::QuotedIdent(text), &lx);
            }
            '&' => {
                lx.bump();
                let mut digits = String::new();
                while let Some(d) = lx.peek() {
                    if d.is_ascii_digit() {
                        digits.push(d);
                        lx.bump();
                    } else {
                        break;
                    }
                }
                if digits.is_empty() {
                    return Err(lx.error(line, column, "expected digits after '&'"));
                }
                push(TokenKind::AnonName(format!("&{}", digits)), &lx);
            }
            c if c.is_ascii_digit() => {
                let n = read_number(&mut lx, line, column)?;
                push(TokenKind::Num(n), &lx);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(c) = lx.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        word.push(c);
                        lx.bump();
                    } else {
                        break;
                    }
                }
                let folded = fold_ident(&word);
                if folded == "DATE" && lx.peek() == Some('\'') {
                    lx.bump();
                    let text = lx.quoted_body('\'', line, column)?;
                    let date = parse_date_dmy(&text).map_err(|e| {
                        lx.error(line, column, e.to_string())
                    })?;
                    push(TokenKind::DateLit(date), &lx);
                } else if let Some(kw) = Keyword::from_folded(&folded) {
                    push(TokenKind::Keyword(kw), &lx);
                } else {
                    push(TokenKind::Ident(folded), &lx);
                }
            }
            other => {
                return Err(lx.error(line, column, format!("illegal character {:?}", other)));
            }
        }
    }

    Ok(tokens)
}

fn read_number(lx: &mut Lexer, line: u32, column: u32) -> Result<i64, EngineError> {
    let mut digits = String::new();
    while let Some(d) = lx.peek() {
        if d.is_ascii_digit() {
            digits.push(d);
            lx.bump();
        } else {
            break;
        }
    }
    digits
        .parse::<i64>()
        .map_err(|_| lx.error(line, column, format!("number {} out of range", digits)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(source: &str) -> Vec<TokenKind> {
        tokenize(source).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn first_create_line_tokens() {
        assert_eq!(
            kinds("(Joe:Customer {"),
            vec![
                TokenKind::LParen,
                TokenKind::Ident("JOE".into()),
                TokenKind::Colon,
                TokenKind::Ident("CUSTOMER".into()),
                TokenKind::LBrace,
            ]
        );
    }

    #[test]
    fn edge_with_date_doc_tokens() {
        let toks = kinds("-[:Ordered {\"Date\":date'22/11/2002'} ]->");
        assert_eq!(
            toks,
            vec![
                TokenKind::EdgeOpenRight,
                TokenKind::Colon,
                TokenKind::Ident("ORDERED".into()),
                TokenKind::LBrace,
                TokenKind::QuotedIdent("Date".into()),
                TokenKind::Colon,
                TokenKind::DateLit(parse_date_dmy("22/11/2002").unwrap()),
                TokenKind::RBrace,
                TokenKind::EdgeCloseRight,
            ]
        );
    }

    #[test]
    fn unterminated_string_reports_position() {
        let err = tokenize("'unclosed").unwrap_err();
        match err {
            EngineError::Syntax { line, column, message } => {
                assert_eq!((line, column), (1, 1));
                assert!(message.contains("unterminated"));
            }
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn leftward_arrow_and_anon_names() {
        assert_eq!(
            kinds("(a)<-[&2:E]-(b)"),
            vec![
                TokenKind::LParen,
                TokenKind::Ident("A".into()),
                TokenKind::RParen,
                TokenKind::EdgeOpenLeft,
                TokenKind::AnonName("&2".into()),
                TokenKind::Colon,
                TokenKind::Ident("E".into()),
                TokenKind::EdgeCloseLeft,
                TokenKind::LParen,
                TokenKind::Ident("B".into()),
                TokenKind::RParen,
            ]
        );
    }

    #[test]
    fn comparison_operators_and_numbers() {
        assert_eq!(
            kinds("a.QTY >= -3 AND b <> 'x''y'"),
            vec![
                TokenKind::Ident("A".into()),
                TokenKind::Dot,
                TokenKind::Ident("QTY".into()),
                TokenKind::Ge,
                TokenKind::Num(-3),
                TokenKind::Keyword(Keyword::And),
                TokenKind::Ident("B".into()),
                TokenKind::Ne,
                TokenKind::Str("x'y".into()),
            ]
        );
    }

    #[test]
    fn keywords_are_reserved_and_comments_skipped() {
        assert_eq!(
            kinds("CREATE -- a comment\n \"Order\""),
            vec![
                TokenKind::Keyword(Keyword::Create),
                TokenKind::QuotedIdent("Order".into()),
            ]
        );
    }

    #[test]
    fn bare_identifier_predicate() {
        assert!(is_bare_identifier("CUSTOMER"));
        assert!(is_bare_identifier("&12"));
        assert!(is_bare_identifier("A_1"));
        assert!(!is_bare_identifier("Order"));
        assert!(!is_bare_identifier("ORDER")); // reserved
        assert!(!is_bare_identifier("16/50x100"));
        assert!(!is_bare_identifier(""));
    }
}
