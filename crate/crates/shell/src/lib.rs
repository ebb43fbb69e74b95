//! Command-line front end for the grel engine: statement execution with
//! rendered results and diagnostics, a script runner, and an interactive
//! REPL. The shell-level words DUMP, SCHEMA, and GRAPHS sit outside the SQL
//! dialect.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, IsTerminal, Write};
use std::path::Path;

use grel_core::matcher::MatchResult;
use grel_core::syntax::split_statements;
use grel_core::{Engine, EngineError, StatementOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Repl,
    Script,
}

#[derive(Debug, Clone)]
pub struct SessionConfig {
    pub echo: bool,
    pub stop_on_error: bool,
}

impl SessionConfig {
    /// Defaults per mode: scripts stop on the first error, the REPL keeps
    /// going.
    pub fn for_mode(mode: Mode) -> Self {
        SessionConfig {
            echo: false,
            stop_on_error: mode == Mode::Script,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    fn prefix(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub position: Option<(u32, u32)>,
}

impl Diagnostic {
    fn render(&self) -> String {
        match self.position {
            Some((line, column)) => format!(
                "{}: {} (line {}, column {})",
                self.severity.prefix(),
                self.message,
                line,
                column
            ),
            None => format!("{}: {}", self.severity.prefix(), self.message),
        }
    }
}

/// One executed statement or shell command, with its rendered output.
#[derive(Debug, Clone)]
pub struct StatementReport {
    pub text: String,
    pub ok: bool,
    pub output: String,
    pub diagnostics: Vec<Diagnostic>,
}

fn diagnostics_of(errors: &[EngineError]) -> Vec<Diagnostic> {
    errors
        .iter()
        .map(|e| {
            let position = match e {
                EngineError::Syntax { line, column, .. } => Some((*line, *column)),
                _ => None,
            };
            Diagnostic {
                severity: Severity::Error,
                message: match e {
                    EngineError::Syntax { message, .. } => message.clone(),
                    other => other.to_string(),
                },
                position,
            }
        })
        .collect()
}

/// Runs one already-split statement and renders its outcome.
pub fn run_statement(engine: &mut Engine, text: &str) -> StatementReport {
    match engine.execute(text) {
        Ok(StatementOutcome::Rows(result)) => StatementReport {
            text: text.to_string(),
            ok: true,
            output: render_match(&result),
            diagnostics: Vec::new(),
        },
        Ok(StatementOutcome::Committed(report)) => {
            let mut parts = Vec::new();
            if !report.tables_created.is_empty() {
                parts.push(format!("{} type(s) created", report.tables_created.len()));
            }
            if let Some(matched) = report.rows_matched {
                parts.push(format!("{} row(s) matched", matched));
            }
            if report.rows_inserted > 0 {
                parts.push(format!("{} row(s) inserted", report.rows_inserted));
            }
            if report.rows_updated > 0 {
                parts.push(format!("{} row(s) updated", report.rows_updated));
            }
            if report.rows_deleted > 0 {
                parts.push(format!("{} row(s) deleted", report.rows_deleted));
            }
            let summary = if parts.is_empty() {
                "ok".to_string()
            } else {
                format!("ok: {}", parts.join(", "))
            };
            let diagnostics = report
                .diagnostics
                .iter()
                .map(|d| Diagnostic {
                    severity: Severity::Info,
                    message: d.message.clone(),
                    position: None,
                })
                .collect();
            StatementReport {
                text: text.to_string(),
                ok: true,
                output: summary,
                diagnostics,
            }
        }
        Err(errors) => StatementReport {
            text: text.to_string(),
            ok: false,
            output: String::new(),
            diagnostics: diagnostics_of(&errors),
        },
    }
}

/// Renders a MATCH default result as a column-aligned table.
pub fn render_match(result: &MatchResult) -> String {
    if result.rows.is_empty() {
        return "(no rows)".to_string();
    }
    let cells: Vec<Vec<String>> = result
        .rows
        .iter()
        .map(|row| row.iter().map(|b| b.render()).collect())
        .collect();
    let mut widths: Vec<usize> = result.columns.iter().map(|c| c.len()).collect();
    for row in &cells {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    if !result.columns.is_empty() {
        let header: Vec<String> = result
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect();
        out.push_str(header.join(" | ").trim_end());
        out.push('\n');
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        out.push_str(&rule.join("-+-"));
        out.push('\n');
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, cell)| format!("{:<width$}", cell, width = widths[i]))
                .collect();
            out.push_str(line.join(" | ").trim_end());
            out.push('\n');
        }
    }
    let n = result.rows.len();
    out.push_str(&format!("({} row{})", n, if n == 1 { "" } else { "s" }));
    out
}

/// A line that is a shell-level command rather than a statement.
fn shell_command(line: &str) -> Option<&'static str> {
    let word = line.trim().trim_end_matches(';').trim();
    ["DUMP", "SCHEMA", "GRAPHS", "HELP", "EXIT", "QUIT"].into_iter().find(|&command| word.eq_ignore_ascii_case(command)).map(|v| v as _)
}

fn run_command(engine: &Engine, command: &str) -> String {
    match command {
        "DUMP" => engine.dump(),
        "SCHEMA" => engine.export_schema(),
        "GRAPHS" => engine.state().graphs.render_listing(),
        "HELP" => "statements: CREATE, CREATE TYPE, MATCH, SET, DELETE\n\
                   commands: DUMP, SCHEMA, GRAPHS, HELP, EXIT\n"
            .to_string(),
        _ => String::new(),
    }
}

enum Piece {
    Command(&'static str),
    Text(String),
}

/// Splits source into shell commands (full lines) and statement text blocks.
fn split_pieces(source: &str) -> Vec<Piece> {
    let mut pieces = Vec::new();
    let mut block = String::new();
    for line in source.lines() {
        if let Some(command) = shell_command(line) {
            if !block.trim().is_empty() {
                pieces.push(Piece::Text(std::mem::take(&mut block)));
            } else {
                block.clear();
            }
            pieces.push(Piece::Command(command));
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    if !block.trim().is_empty() {
        pieces.push(Piece::Text(block));
    }
    pieces
}

/// Executes a block of source text: splits statements, runs each in order,
/// and reports per-statement results. Stops early on error when configured.
pub fn run_text(engine: &mut Engine, source: &str, config: &SessionConfig) -> Vec<StatementReport> {
    let mut reports = Vec::new();
    'pieces: for piece in split_pieces(source) {
        match piece {
            Piece::Command(command) => {
                reports.push(StatementReport {
                    text: command.to_string(),
                    ok: true,
                    output: run_command(engine, command),
                    diagnostics: Vec::new(),
                });
            }
            Piece::Text(text) => {
                let statements = match split_statements(&text) {
                    Ok(s) => s,
                    Err(e) => {
                        reports.push(StatementReport {
                            text: text.trim().to_string(),
                            ok: false,
                            output: String::new(),
                            diagnostics: diagnostics_of(&[e]),
                        });
                        if config.stop_on_error {
                            break 'pieces;
                        }
                        continue;
                    }
                };
                for statement in statements {
                    let report = run_statement(engine, &statement);
                    let failed = !report.ok;
                    reports.push(report);
                    if failed && config.stop_on_error {
                        break 'pieces;
                    }
                }
            }
        }
    }
    reports
}

pub fn print_report(out: &mut impl Write, report: &StatementReport, echo: bool) {
    if echo {
        let _ = writeln!(out, "> {}", report.text);
    }
    if !report.output.is_empty() {
        let _ = writeln!(out, "{}", report.output.trim_end());
    }
    for diagnostic in &report.diagnostics {
        let _ = writeln!(out, "{}", diagnostic.render());
    }
}

/// Runs a script file. Exit status: 0 on success, 1 when any statement
/// failed, 2 on file errors.
pub fn run_script(
    engine: &mut Engine,
    path: &Path,
    config: &SessionConfig,
    out: &mut impl Write,
) -> i32 {
    let source = match fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(out, "error: cannot read {}: {}", path.display(), e);
            return 2;
        }
    };
    let reports = run_text(engine, &source, config);
    let mut failed = false;
    for report in &reports {
        print_report(out, report, config.echo);
        failed |= !report.ok;
    }
    if failed {
        1
    } else {
        0
    }
}

/// Interactive loop over stdin. A statement runs when a line ends with a
/// semicolon or an empty line flushes the buffer; shell commands run
/// immediately.
pub fn repl(
    engine: &mut Engine,
    config: &SessionConfig,
    input: &mut impl BufRead,
    out: &mut impl Write,
) -> i32 {
    let interactive = std::io::stdin().is_terminal();
    let mut buffer = String::new();
    let mut failed = false;
    loop {
        if interactive {
            let prompt = if buffer.trim().is_empty() { "grel> " } else { "  ..> " };
            let _ = write!(out, "{}", prompt);
            let _ = out.flush();
        }
        let mut line = String::new();
        match input.read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => {
                let _ = writeln!(out, "error: {}", e);
                return 2;
            }
        }
        let trimmed = line.trim();
        if buffer.trim().is_empty() {
            if let Some(command) = shell_command(trimmed) {
                if command == "EXIT" || command == "QUIT" {
                    return if failed { 1 } else { 0 };
                }
                let output = run_command(engine, command);
                if !output.is_empty() {
                    let _ = write!(out, "{}", output);
                    if !output.ends_with('\n') {
                        let _ = writeln!(out);
                    }
                }
                continue;
            }
        }
        buffer.push_str(&line);
        let flush_now = trimmed.ends_with(';') || (trimmed.is_empty() && !buffer.trim().is_empty());
        if flush_now {
            let source = std::mem::take(&mut buffer);
            for report in run_text(engine, &source, config) {
                print_report(out, &report, config.echo);
                if !report.ok {
                    failed = true;
                    if config.stop_on_error {
                        return 1;
                    }
                }
            }
        }
    }
    if !buffer.trim().is_empty() {
        for report in run_text(engine, &buffer, config) {
            print_report(out, &report, config.echo);
            failed |= !report.ok;
        }
    }
    if failed {
        1
    } else {
        0
    }
}

/// Accepted statements of a transcript, for replay-style checks.
pub fn accepted_statements(reports: &[StatementReport]) -> Vec<String> {
    let shell_words: HashMap<&str, ()> =
        ["DUMP", "SCHEMA", "GRAPHS", "HELP"].iter().map(|w| (*w, ())).collect();
    reports
        .iter()
        .filter(|r| r.ok && !shell_words.contains_key(r.text.as_str()))
        .map(|r| r.text.clone())
        .collect()
}
