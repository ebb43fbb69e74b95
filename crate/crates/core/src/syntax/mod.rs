//! Tokenizer, AST, and recursive-descent parser for the graph SQL dialect.

pub mod ast;
pub mod parser;
pub mod token;

pub use ast::{
    CmpOp, CreateTypeStmt, DeleteStmt, Direction, Doc, DocValue, EdgeItem, Expr, MatchStmt,
    NodeItem, Path, SetStmt, Statement, TypeKindClause,
};
pub use token::{fold_ident, is_bare_identifier, tokenize, Keyword, Token, TokenKind};

use crate::error::EngineError;
use crate::values::{Literal, SimpleKind};

/// Parses a single statement from source text.
pub fn parse_statement(source: &str) -> Result<Statement, EngineError> {
    let tokens = tokenize(source)?;
    parser::Parser::new(tokens).parse_statement()
}

/// Parses a boolean expression (CHECK constraint bodies).
pub fn parse_expression(source: &str) -> Result<Expr, EngineError> {
    let tokens = tokenize(source)?;
    parser::Parser::new(tokens).parse_expression()
}

/// The scalar kind a literal implies when inferring a property column.
pub fn infer_property_kind(literal: &Literal) -> Option<SimpleKind> {
    literal.kind()
}

/// Splits script text into statements.
///
/// A statement ends at a top-level semicolon, or before a top-level keyword
/// (CREATE, MATCH, SET, DELETE) that is separated from the previous token by
/// at least one blank line. Both rules are token-aware, so semicolons and
/// blank lines inside string constants do not split.
pub fn split_statements(source: &str) -> Result<Vec<String>, EngineError> {
    let tokens = tokenize(source)?;
    let mut boundaries: Vec<usize> = Vec::new(); // indices into `tokens`: statement starts here
    for (i, tok) in tokens.iter().enumerate() {
        if i == 0 {
            continue;
        }
        let starts_statement = matches!(
            tok.kind,
            TokenKind::Keyword(Keyword::Create)
                | TokenKind::Keyword(Keyword::Match)
                | TokenKind::Keyword(Keyword::Set)
                | TokenKind::Keyword(Keyword::Delete)
        );
        let prev = &tokens[i - 1];
        let after_semicolon = prev.kind == TokenKind::Semicolon;
        let after_blank_line = tok.line >= prev.end_line + 2;
        if after_semicolon || (starts_statement && after_blank_line) {
            boundaries.push(i);
        }
    }

    // Map token ranges back to source text by line/column.
    let lines: Vec<&str> = source.split('\n').collect();
    let offset_of = |line: u32, column: u32| -> usize {
        let mut offset = 0;
        for l in lines.iter().take(line as usize - 1) {
            offset += l.len() + 1;
        }
        let line_text = lines.get(line as usize - 1).copied().unwrap_or("");
        offset
            + line_text
                .chars()
                .take(column as usize - 1)
                .map(|c| c.len_utf8())
                .sum::<usize>()
    };

    let mut statements = Vec::new();
    let mut start_idx = 0;
    let flush = |from: usize, to: usize, statements: &mut Vec<String>| {
        let first = match tokens[from..to]
            .iter()
            .find(|t| t.kind != TokenKind::Semicolon)
        {
            Some(t) => t,
            None => return,
        };
        let begin = offset_of(first.line, first.column);
        let end = if to < tokens.len() {
            offset_of(tokens[to].line, tokens[to].column)
        } else {
            source.len()
        };
        let text = source[begin..end].trim().trim_end_matches(';').trim();
        statements.push(text.to_string());
    };
    for boundary in boundaries {
        flush(start_idx, boundary, &mut statements);
        start_idx = boundary;
    }
    flush(start_idx, tokens.len(), &mut statements);
    Ok(statements)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_on_semicolons() {
        let stmts = split_statements("CREATE (a:T); CREATE (b:T);\nMATCH (x)").unwrap();
        assert_eq!(stmts.len(), 3);
        assert_eq!(stmts[0], "CREATE (a:T)");
        assert_eq!(stmts[2], "MATCH (x)");
    }

    #[test]
    fn split_on_blank_line_before_keyword() {
        let stmts = split_statements("CREATE (a:T)\n\nCREATE (b:T)").unwrap();
        assert_eq!(stmts.len(), 2);
    }

    #[test]
    fn no_split_without_separator() {
        let worked = "CREATE\n  (Joe:Customer {X: 1}),\n  (Joe)-[:E]->(B:U)";
        let stmts = split_statements(worked).unwrap();
        assert_eq!(stmts.len(), 1);
    }

    #[test]
    fn semicolon_inside_string_does_not_split() {
        let stmts = split_statements("CREATE (a:T {X: 'a;b'})").unwrap();
        assert_eq!(stmts.len(), 1);
    }

    #[test]
    fn empty_and_comment_only_input() {
        assert!(split_statements("").unwrap().is_empty());
        assert!(split_statements("-- nothing here\n").unwrap().is_empty());
    }
}
