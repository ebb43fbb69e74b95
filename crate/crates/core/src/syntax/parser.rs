//! Recursive-descent parser for the graph-extended SQL dialect.

use super::ast::*;
use super::token::{Keyword, Token, TokenKind};
use crate::error::EngineError;
use crate::values::Literal;

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Position one past the last token, for errors at end of input.
    end: (u32, u32),
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        let end = tokens
            .last()
            .map(|t| (t.end_line, t.column + 1))
            .unwrap_or((1, 1));
        Parser {
            tokens,
            pos: 0,
            end,
        }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (u32, u32) {
        self.tokens
            .get(self.pos)
            .map(|t| (t.line, t.column))
            .unwrap_or(self.end)
    }

    fn error(&self, expected: &str) -> EngineError {
        let (line, column) = self.here();
        let found = match self.peek() {
            Some(kind) => kind.describe(),
            None => "end of input".to_string(),
        };
        EngineError::syntax(line, column, format!("expected {}, found {}", expected, found))
    }

    fn eat(&mut self, kind: &TokenKind, expected: &str) -> Result<(), EngineError> {
        if self.peek() == Some(kind) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(kw))
    }

    /// An identifier in any of its three lexical forms.
    fn ident(&mut self, expected: &str) -> Result<String, EngineError> {
        match self.peek() {
            Some(TokenKind::Ident(_)) | Some(TokenKind::QuotedIdent(_))
            | Some(TokenKind::AnonName(_)) => {
                let tok = self.bump().unwrap();
                Ok(match tok.kind {
                    TokenKind::Ident(s) | TokenKind::QuotedIdent(s) | TokenKind::AnonName(s) => s,
                    _ => unreachable!(),
                })
            }
            _ => Err(self.error(expected)),
        }
    }

    /// Parses exactly one statement and requires the input to end there.
    pub fn parse_statement(mut self) -> Result<Statement, EngineError> {
        let stmt = self.statement()?;
        if self.peek() == Some(&TokenKind::Semicolon) {
            self.bump();
        }
        if self.peek().is_some() {
            return Err(self.error("end of statement"));
        }
        Ok(stmt)
    }

    /// Parses a bare expression (used for CHECK constraint bodies).
    pub fn parse_expression(mut self) -> Result<Expr, EngineError> {
        let expr = self.expression()?;
        if self.peek().is_some() {
            return Err(self.error("end of expression"));
        }
        Ok(expr)
    }

    fn statement(&mut self) -> Result<Statement, EngineError> {
        match self.peek() {
            Some(TokenKind::Keyword(Keyword::Create)) => {
                self.bump();
                if self.at_keyword(Keyword::Type) {
                    self.bump();
                    self.create_type()
                } else {
                    Ok(Statement::CreateGraph(self.paths()?))
                }
            }
            Some(TokenKind::Keyword(Keyword::Match)) => {
                self.bump();
                self.match_stmt()
            }
            Some(TokenKind::Keyword(Keyword::Set)) => {
                self.bump();
                self.set_stmt()
            }
            Some(TokenKind::Keyword(Keyword::Delete)) => {
                self.bump();
                let target = self.ident("identifier to delete")?;
                Ok(Statement::Delete(DeleteStmt { target }))
            }
            _ => Err(self.error("CREATE, MATCH, SET, or DELETE")),
        }
    }

    fn paths(&mut self) -> Result<Vec<Path>, EngineError> {
        let mut paths = vec![self.path()?];
        while self.peek() == Some(&TokenKind::Comma) {
            self.bump();
            paths.push(self.path()?);
        }
        Ok(paths)
    }

    fn path(&mut self) -> Result<Path, EngineError> {
        let start = self.node_item()?;
        let mut segments = Vec::new();
        loop {
            let direction = match self.peek() {
                Some(TokenKind::EdgeOpenRight) => Direction::Rightward,
                Some(TokenKind::EdgeOpenLeft) => Direction::Leftward,
                _ => break,
            };
            self.bump();
            let mut edge = self.edge_item(direction)?;
            let close = match direction {
                Direction::Rightward => TokenKind::EdgeCloseRight,
                Direction::Leftward => TokenKind::EdgeCloseLeft,
            };
            self.eat(&close, close.describe().as_str())?;
            edge.direction = direction;
            let node = self.node_item()?;
            segments.push((edge, node));
        }
        Ok(Path { start, segments })
    }

    fn node_item(&mut self) -> Result<NodeItem, EngineError> {
        self.eat(&TokenKind::LParen, "'('")?;
        let id = match self.peek() {
            Some(TokenKind::Ident(_)) | Some(TokenKind::QuotedIdent(_))
            | Some(TokenKind::AnonName(_)) => Some(self.ident("identifier")?),
            Some(TokenKind::Colon) | Some(TokenKind::LBrace) => None,
            _ => return Err(self.error("NewG or id")),
        };
        let mut labels = Vec::new();
        while self.peek() == Some(&TokenKind::Colon) {
            self.bump();
            labels.push(self.ident("label")?);
            if labels.len() > 2 {
                let (line, column) = self.here();
                return Err(EngineError::syntax(
                    line,
                    column,
                    "at most two labels are allowed on a node",
                ));
            }
        }
        let doc = if self.peek() == Some(&TokenKind::LBrace) {
            Some(self.doc()?)
        } else {
            None
        };
        if id.is_none() && labels.is_empty() && doc.is_none() {
            return Err(self.error("NewG or id"));
        }
        self.eat(&TokenKind::RParen, "')'")?;
        Ok(NodeItem { id, labels, doc })
    }

    fn edge_item(&mut self, direction: Direction) -> Result<EdgeItem, EngineError> {
        let id = match self.peek() {
            Some(TokenKind::Ident(_)) | Some(TokenKind::QuotedIdent(_))
            | Some(TokenKind::AnonName(_)) => Some(self.ident("identifier")?),
            _ => None,
        };
        let label = if self.peek() == Some(&TokenKind::Colon) {
            self.bump();
            Some(self.ident("edge label")?)
        } else {
            None
        };
        let doc = if self.peek() == Some(&TokenKind::LBrace) {
            Some(self.doc()?)
        } else {
            None
        };
        if id.is_none() && label.is_none() && doc.is_none() {
            return Err(self.error("edge NewG"));
        }
        Ok(EdgeItem {
            direction,
            id,
            label,
            doc,
        })
    }

    fn doc(&mut self) -> Result<Doc, EngineError> {
        self.eat(&TokenKind::LBrace, "'{'")?;
        let mut entries: Vec<(String, DocValue)> = Vec::new();
        if self.peek() != Some(&TokenKind::RBrace) {
            loop {
                let key = self.ident("doc key")?;
                if entries.iter().any(|(k, _)| *k == key) {
                    return Err(EngineError::DuplicateDocKey(key));
                }
                self.eat(&TokenKind::Colon, "':'")?;
                let value = self.doc_value()?;
                entries.push((key, value));
                if self.peek() == Some(&TokenKind::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.eat(&TokenKind::RBrace, "'}'")?;
        Ok(Doc { entries })
    }

    fn doc_value(&mut self) -> Result<DocValue, EngineError> {
        match self.peek() {
            Some(TokenKind::LBracket) => {
                self.bump();
                let mut items = Vec::new();
                if self.peek() != Some(&TokenKind::RBracket) {
                    loop {
                        items.push(self.doc_value()?);
                        if self.peek() == Some(&TokenKind::Comma) {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.eat(&TokenKind::RBracket, "']'")?;
                Ok(DocValue::Array(items))
            }
            Some(TokenKind::Ident(_)) | Some(TokenKind::QuotedIdent(_)) => {
                Ok(DocValue::Ident(self.ident("identifier")?))
            }
            _ => Ok(DocValue::Literal(self.literal()?)),
        }
    }

    fn literal(&mut self) -> Result<Literal, EngineError> {
        match self.peek() {
            Some(TokenKind::Str(_)) => match self.bump().unwrap().kind {
                TokenKind::Str(s) => Ok(Literal::Str(s)),
                _ => unreachable!(),
            },
            Some(TokenKind::Num(_)) => match self.bump().unwrap().kind {
                TokenKind::Num(n) => Ok(Literal::Num(n)),
                _ => unreachable!(),
            },
            Some(TokenKind::DateLit(_)) => match self.bump().unwrap().kind {
                TokenKind::DateLit(d) => Ok(Literal::Date(d)),
                _ => unreachable!(),
            },
            Some(TokenKind::Keyword(Keyword::Null)) => {
                self.bump();
                Ok(Literal::Null)
            }
            Some(TokenKind::Keyword(Keyword::True)) => {
                self.bump();
                Ok(Literal::Bool(true))
            }
            Some(TokenKind::Keyword(Keyword::False)) => {
                self.bump();
                Ok(Literal::Bool(false))
            }
            _ => Err(self.error("literal value")),
        }
    }

    fn create_type(&mut self) -> Result<Statement, EngineError> {
        let label = self.ident("type label")?;
        let mut columns = Vec::new();
        if self.at_keyword(Keyword::As) {
            self.bump();
            self.eat(&TokenKind::LParen, "'('")?;
            loop {
                let name = self.ident("column name")?;
                let type_name = self.type_name()?;
                columns.push((name, type_name));
                if self.peek() == Some(&TokenKind::Comma) {
                    self.bump();
                } else {
                    break;
                }
            }
            self.eat(&TokenKind::RParen, "')'")?;
        }
        let kind = match self.peek() {
            Some(TokenKind::Keyword(Keyword::NodeType)) => {
                self.bump();
                TypeKindClause::Node
            }
            Some(TokenKind::Keyword(Keyword::EdgeType)) => {
                self.bump();
                self.eat(&TokenKind::LParen, "'('")?;
                let leaving = self.ident("leaving node type")?;
                self.eat(&TokenKind::Comma, "','")?;
                let arriving = self.ident("arriving node type")?;
                self.eat(&TokenKind::RParen, "')'")?;
                TypeKindClause::Edge { leaving, arriving }
            }
            Some(TokenKind::Keyword(Keyword::Under)) => {
                self.bump();
                TypeKindClause::Under(self.ident("supertype label")?)
            }
            _ => return Err(self.error("NODETYPE, EDGETYPE, or UNDER")),
        };
        let doc = if self.peek() == Some(&TokenKind::LBrace) {
            Some(self.doc()?)
        } else {
            None
        };
        Ok(Statement::CreateType(CreateTypeStmt {
            label,
            columns,
            kind,
            doc,
        }))
    }

    /// A column type name; DATE is a keyword but valid here.
    fn type_name(&mut self) -> Result<String, EngineError> {
        if self.at_keyword(Keyword::Date) {
            self.bump();
            return Ok("DATE".to_string());
        }
        self.ident("type name")
    }

    fn match_stmt(&mut self) -> Result<Statement, EngineError> {
        let paths = self.paths()?;
        let where_clause = if self.at_keyword(Keyword::Where) {
            self.bump();
            Some(self.expression()?)
        } else {
            None
        };
        let trailing = match self.peek() {
            Some(TokenKind::Keyword(Keyword::Set))
            | Some(TokenKind::Keyword(Keyword::Delete)) => Some(Box::new(self.statement()?)),
            Some(TokenKind::Keyword(Keyword::Create)) => {
                let stmt = self.statement()?;
                if matches!(stmt, Statement::CreateType(_)) {
                    let (line, column) = self.here();
                    return Err(EngineError::syntax(
                        line,
                        column,
                        "CREATE TYPE cannot follow MATCH",
                    ));
                }
                Some(Box::new(stmt))
            }
            _ => None,
        };
        Ok(Statement::Match(MatchStmt {
            paths,
            where_clause,
            trailing,
        }))
    }

    fn set_stmt(&mut self) -> Result<Statement, EngineError> {
        let target = self.ident("target identifier")?;
        self.eat(&TokenKind::Dot, "'.'")?;
        let property = self.ident("property name")?;
        self.eat(&TokenKind::Eq, "'='")?;
        let value = self.expression()?;
        Ok(Statement::Set(SetStmt {
            target,
            property,
            value,
        }))
    }

    // Expression grammar: OR < AND < NOT < comparison < atom.

    fn expression(&mut self) -> Result<Expr, EngineError> {
        let mut left = self.and_expr()?;
        while self.at_keyword(Keyword::Or) {
            self.bump();
            let right = self.and_expr()?;
            left = Expr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_expr(&mut self) -> Result<Expr, EngineError> {
        let mut left = self.not_expr()?;
        while self.at_keyword(Keyword::And) {
            self.bump();
            let right = self.not_expr()?;
            left = Expr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn not_expr(&mut self) -> Result<Expr, EngineError> {
        if self.at_keyword(Keyword::Not) {
            self.bump();
            let inner = self.not_expr()?;
            return Ok(Expr::Not(Box::new(inner)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, EngineError> {
        let left = self.atom()?;
        let op = match self.peek() {
            Some(TokenKind::Eq) => Some(CmpOp::Eq),
            Some(TokenKind::Ne) => Some(CmpOp::Ne),
            Some(TokenKind::Lt) => Some(CmpOp::Lt),
            Some(TokenKind::Le) => Some(CmpOp::Le),
            Some(TokenKind::Gt) => Some(CmpOp::Gt),
            Some(TokenKind::Ge) => Some(CmpOp::Ge),
            _ => None,
        };
        match op {
            Some(op) => {
                self.bump();
                let right = self.atom()?;
                Ok(Expr::Compare(Box::new(left), op, Box::new(right)))
            }
            None => Ok(left),
        }
    }

    fn atom(&mut self) -> Result<Expr, EngineError> {
        match self.peek() {
            Some(TokenKind::LParen) => {
                self.bump();
                let inner = self.expression()?;
                self.eat(&TokenKind::RParen, "')'")?;
                Ok(inner)
            }
            Some(TokenKind::Ident(_)) | Some(TokenKind::QuotedIdent(_))
            | Some(TokenKind::AnonName(_)) => {
                let base = self.ident("identifier")?;
                if self.peek() == Some(&TokenKind::Dot) {
                    self.bump();
                    let prop = self.ident("property name")?;
                    Ok(Expr::Property(base, prop))
                } else {
                    Ok(Expr::Ident(base))
                }
            }
            _ => Ok(Expr::Literal(self.literal()?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse_statement;
    use super::*;

    fn parse(source: &str) -> Statement {
        parse_statement(source).unwrap()
    }

    const WORKED_EXAMPLE: &str = r#"CREATE
  (Joe:Customer {"Name":'Joe Edwards', Address:'10 Station Rd.'}),
  (Joe)-[:Ordered {"Date":date'22/11/2002'} ]->(Ord201:"Order")-[:Item {Qty: 5}]->("16/50x100" :WoodScrew),
  (Ord201)-[:Item {Qty: 5}]->("Fiber 12cm":WallPlug),
  (Ord201)-[:Item {Qty: 1}]->("500ml" :RubberGlue)"#;

    #[test]
    fn worked_example_has_four_paths() {
        match parse(WORKED_EXAMPLE) {
            Statement::CreateGraph(paths) => {
                assert_eq!(paths.len(), 4);
                assert_eq!(paths[0].segments.len(), 0);
                assert_eq!(paths[1].segments.len(), 2);
                assert_eq!(paths[2].segments.len(), 1);
                assert_eq!(paths[3].segments.len(), 1);
                let first = &paths[0].start;
                assert_eq!(first.id.as_deref(), Some("JOE"));
                assert_eq!(first.labels, vec!["CUSTOMER".to_string()]);
                let doc = first.doc.as_ref().unwrap();
                assert_eq!(doc.entries[0].0, "Name");
                assert_eq!(doc.entries[1].0, "ADDRESS");
                let (edge, node) = &paths[1].segments[0];
                assert_eq!(edge.label.as_deref(), Some("ORDERED"));
                assert_eq!(edge.direction, Direction::Rightward);
                assert_eq!(node.id.as_deref(), Some("ORD201"));
                assert_eq!(node.labels, vec!["Order".to_string()]);
            }
            other => panic!("expected CreateGraph, got {:?}", other),
        }
    }

    #[test]
    fn match_without_trailing_statement() {
        match parse("MATCH (c:CUSTOMER)-[:ORDERED]->(o)") {
            Statement::Match(m) => {
                assert_eq!(m.paths.len(), 1);
                assert!(m.where_clause.is_none());
                assert!(m.trailing.is_none());
            }
            other => panic!("expected Match, got {:?}", other),
        }
    }

    #[test]
    fn match_with_where_and_set() {
        match parse("MATCH (o:\"Order\")-[i:ITEM]->(p) WHERE i.QTY > 1 SET i.QTY = 2") {
            Statement::Match(m) => {
                let cond = m.where_clause.unwrap();
                assert_eq!(
                    cond,
                    Expr::Compare(
                        Box::new(Expr::Property("I".into(), "QTY".into())),
                        CmpOp::Gt,
                        Box::new(Expr::Literal(Literal::Num(1))),
                    )
                );
                match *m.trailing.unwrap() {
                    Statement::Set(set) => {
                        assert_eq!(set.target, "I");
                        assert_eq!(set.property, "QTY");
                    }
                    other => panic!("expected Set, got {:?}", other),
                }
            }
            other => panic!("expected Match, got {:?}", other),
        }
    }

    #[test]
    fn dangling_create_is_a_syntax_error() {
        let err = parse_statement("CREATE (").unwrap_err();
        match err {
            EngineError::Syntax { message, .. } => assert!(message.contains("NewG or id")),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn doc_keys_fold_and_reject_duplicates() {
        let stmt = parse("CREATE (x:T {\"Name\":'Joe Edwards', Address:'10 Station Rd.'})");
        match stmt {
            Statement::CreateGraph(paths) => {
                let doc = paths[0].start.doc.as_ref().unwrap();
                assert_eq!(doc.entries[0].0, "Name");
                assert_eq!(doc.entries[1].0, "ADDRESS");
            }
            _ => unreachable!(),
        }
        let err = parse_statement("CREATE (x:T {Qty: 5, Qty: 6})").unwrap_err();
        assert_eq!(err, EngineError::DuplicateDocKey("QTY".into()));
    }

    #[test]
    fn case_folding_yields_identical_asts() {
        assert_eq!(
            parse_statement("create (a:customer)").unwrap(),
            parse_statement("CREATE (A:CUSTOMER)").unwrap()
        );
        assert_ne!(
            parse_statement("CREATE (A:\"Customer\")").unwrap(),
            parse_statement("CREATE (A:CUSTOMER)").unwrap()
        );
    }

    #[test]
    fn create_type_forms() {
        match parse("CREATE TYPE CUSTOMER as (\"Name\" char, ADDRESS char) NodeType") {
            Statement::CreateType(t) => {
                assert_eq!(t.label, "CUSTOMER");
                assert_eq!(
                    t.columns,
                    vec![
                        ("Name".to_string(), "CHAR".to_string()),
                        ("ADDRESS".to_string(), "CHAR".to_string())
                    ]
                );
                assert_eq!(t.kind, TypeKindClause::Node);
            }
            other => panic!("expected CreateType, got {:?}", other),
        }
        match parse("CREATE TYPE ORDERED as (\"Date\" date) EdgeType(CUSTOMER,\"Order\")") {
            Statement::CreateType(t) => {
                assert_eq!(
                    t.kind,
                    TypeKindClause::Edge {
                        leaving: "CUSTOMER".into(),
                        arriving: "Order".into()
                    }
                );
                assert_eq!(t.columns, vec![("Date".to_string(), "DATE".to_string())]);
            }
            other => panic!("expected CreateType, got {:?}", other),
        }
        match parse("CREATE TYPE WoodScrew UNDER &1") {
            Statement::CreateType(t) => {
                assert_eq!(t.label, "WOODSCREW");
                assert_eq!(t.kind, TypeKindClause::Under("&1".into()));
            }
            other => panic!("expected CreateType, got {:?}", other),
        }
    }

    #[test]
    fn three_labels_rejected() {
        let err = parse_statement("CREATE (x:A:B:C)").unwrap_err();
        match err {
            EngineError::Syntax { message, .. } => {
                assert!(message.contains("at most two labels"))
            }
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn leftward_edges_parse() {
        match parse("MATCH (a)<-[e:E]-(b)") {
            Statement::Match(m) => {
                let (edge, _) = &m.paths[0].segments[0];
                assert_eq!(edge.direction, Direction::Leftward);
                assert_eq!(edge.id.as_deref(), Some("E"));
            }
            other => panic!("expected Match, got {:?}", other),
        }
    }

    #[test]
    fn errors_carry_positions_inside_input() {
        let source = "MATCH (a:\nMISSING PAREN";
        let err = parse_statement(source).unwrap_err();
        match err {
            EngineError::Syntax { line, .. } => assert!((1..=2).contains(&line)),
            other => panic!("expected syntax error, got {:?}", other),
        }
    }

    #[test]
    fn render_parse_round_trip_on_corpus() {
        let corpus = [
            WORKED_EXAMPLE,
            "MATCH (c:CUSTOMER)",
            "MATCH (o:\"Order\")-[i:ITEM]->(p) WHERE i.QTY > 1",
            "MATCH (a)<-[e:E]-(b:T {X: 5}) DELETE e",
            "MATCH (a:T) CREATE (a)-[:E2 {W: date'01/02/2003'}]->(:U {V: 'x'})",
            "CREATE TYPE ORDERED as (\"Date\" date) EdgeType(CUSTOMER,\"Order\") {MULTIPLICITY: [[0, '*'], [0, 1]]}",
            "CREATE TYPE ITEM as (QTY int) EDGETYPE(\"Order\", &1) {CHECK: 'QTY > 0'}",
            "SET JOE.\"Name\" = NULL",
            "DELETE \"16/50x100\"",
            "MATCH (x) WHERE NOT (x.A = 1 OR x.B <> 'y') AND x.C <= date'05/06/2007'",
        ];
        for source in corpus {
            let ast = parse_statement(source).unwrap();
            let rendered = ast.render();
            let reparsed = parse_statement(&rendered)
                .unwrap_or_else(|e| panic!("re-parse of {:?} failed: {}", rendered, e));
            assert_eq!(ast, reparsed, "round trip differs for {:?}", source);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_ident() -> impl Strategy<Value = String> {
            prop_oneof![
                "[A-Z][A-Z0-9_]{0,6}",
                "[a-zA-Z0-9 /.''\"-]{1,10}",
                (1u32..40).prop_map(|n| format!("&{}", n)),
            ]
            .prop_filter("order/name/date are reserved", |s| {
                super::super::super::token::Keyword::from_folded(s).is_none()
            })
        }

        fn arb_literal() -> impl Strategy<Value = Literal> {
            prop_oneof![
                any::<i32>().prop_map(|n| Literal::Num(n as i64)),
                "[a-z '\"{}:,\\]\\[]{0,8}".prop_map(Literal::Str),
                (1i32..9999, 1u32..13, 1u32..28).prop_map(|(y, m, d)| {
                    Literal::Date(chrono::NaiveDate::from_ymd_opt(y, m, d).unwrap())
                }),
                Just(Literal::Bool(true)),
                Just(Literal::Null),
            ]
        }

        fn arb_doc() -> impl Strategy<Value = Doc> {
            proptest::collection::vec((arb_ident(), arb_literal()), 0..3).prop_map(|pairs| {
                let mut entries: Vec<(String, DocValue)> = Vec::new();
                for (k, v) in pairs {
                    if !entries.iter().any(|(existing, _)| *existing == k) {
                        entries.push((k, DocValue::Literal(v)));
                    }
                }
                Doc { entries }
            })
        }

        fn arb_node() -> impl Strategy<Value = NodeItem> {
            (
                proptest::option::of(arb_ident()),
                proptest::collection::vec(arb_ident(), 0..2),
                proptest::option::of(arb_doc()),
            )
                .prop_filter_map("node must have id, label, or doc", |(id, labels, doc)| {
                    if id.is_none() && labels.is_empty() && doc.is_none() {
                        None
                    } else {
                        Some(NodeItem { id, labels, doc })
                    }
                })
        }

        fn arb_path() -> impl Strategy<Value = Path> {
            (
                arb_node(),
                proptest::collection::vec(
                    (
                        proptest::option::of(arb_ident()),
                        proptest::option::of(arb_ident()),
                        proptest::option::of(arb_doc()),
                        any::<bool>(),
                        arb_node(),
                    ),
                    0..2,
                ),
            )
                .prop_filter_map("edge must be nonempty", |(start, segs)| {
                    let mut segments = Vec::new();
                    for (id, label, doc, rightward, node) in segs {
                        if id.is_none() && label.is_none() && doc.is_none() {
                            return None;
                        }
                        let direction = if rightward {
                            Direction::Rightward
                        } else {
                            Direction::Leftward
                        };
                        segments.push((
                            EdgeItem {
                                direction,
                                id,
                                label,
                                doc,
                            },
                            node,
                        ));
                    }
                    Some(Path { start, segments })
                })
        }

        proptest! {
            #[test]
            fn render_parse_round_trip(paths in proptest::collection::vec(arb_path(), 1..3)) {
                let stmt = Statement::CreateGraph(paths);
                let rendered = stmt.render();
                let reparsed = parse_statement(&rendered)
                    .unwrap_or_else(|e| panic!("re-parse of {:?} failed: {}", rendered, e));
                prop_assert_eq!(stmt, reparsed);
            }
        }
    }
}
