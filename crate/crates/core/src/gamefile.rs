//! Textual game descriptions: a small s-expression format for extensive-form
//! trees (with optional information sets) and normal-form payoff tables.
//!
//! Perfect-information trees are written with `:owner`/`:moves` nodes, which
//! parse into singleton information sets with generated labels; shared sets
//! are declared up front in an `(infosets ...)` block and referenced with
//! `:infoset`. Rewards accept integer, fraction and decimal literals, all
//! kept exact.
//!
//! ```text
//! (game (players p1 p2)
//!   (infosets (h :owner p2 :moves (L R)))
//!   (tree
//!     (node :owner p1 :moves (L R)
//!       (node :infoset h (leaf 1 4) (leaf 0 0))
//!       (node :infoset h (leaf 5 2) (leaf 0 2)))))
//! ```

use crate::exform::{occurring_sets, IETree, InfoSet, InfoSetTable};
use crate::rational::Rat;
use crate::space::FinSpace;
use crate::space::PlayerId;
use crate::translate::NormalFormGame;
use std::collections::{HashMap, HashSet};
use std::fmt;

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagCode {
    LexError,
    ParseError,
    BadNumber,
    DuplicatePlayer,
    DuplicateInfoset,
    DuplicateMove,
    DuplicateActionDecl,
    MissingActionDecl,
    UnknownPlayer,
    UnknownInfoset,
    UnknownAction,
    ChildCountMismatch,
    RewardCountMismatch,
    PayoffCountMismatch,
    PayoffRowDuplicate,
    PayoffRowMissing,
    UnusedInfoset,
    UnusedPlayer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    pub span: Option<Span>,
    pub message: String,
}

impl Diagnostic {
    fn error(code: DiagCode, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Error, code, span: Some(span), message: message.into() }
    }

    fn warning(code: DiagCode, span: Option<Span>, message: impl Into<String>) -> Diagnostic {
        Diagnostic { severity: Severity::Warning, code, span, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.span {
            Some(span) => write!(
                f,
                "{tag}[{:?}] at {}:{}: {}",
                self.code, span.start.line, span.start.col, self.message
            ),
            None => write!(f, "{tag}[{:?}]: {}", self.code, self.message),
        }
    }
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct GameDoc {
    pub players: Vec<String>,
    pub body: GameBody,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GameBody {
    Extensive(ExtensiveDoc),
    NormalForm(NormalFormDoc),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensiveDoc {
    pub table: InfoSetTable,
    /// Move labels per information set, aligned with the table.
    pub move_labels: Vec<Vec<String>>,
    /// True for sets synthesized from `:owner` nodes; they print back as
    /// `:owner` forms rather than declarations.
    pub generated: Vec<bool>,
    pub tree: IETree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormDoc {
    /// Action labels per player, aligned with the players list.
    pub action_labels: Vec<Vec<String>>,
    /// One utility vector per action profile, in canonical profile order
    /// (first player's action most significant).
    pub payoffs: Vec<Vec<Rat>>,
}

impl GameDoc {
    pub fn player_ids(&self) -> Vec<PlayerId> {
        self.players.iter().map(PlayerId::name).collect()
    }
}

impl NormalFormDoc {
    pub fn to_game(&self, players: &[PlayerId]) -> NormalFormGame {
        let sizes: Vec<u64> = self.action_labels.iter().map(|a| a.len() as u64).collect();
        let payoffs = self.payoffs.clone();
        let ids = players.to_vec();
        let labels = self.action_labels.clone();
        NormalFormGame::new(
            players.to_vec(),
            sizes.iter().map(|&n| FinSpace::Range(n)).collect(),
            move |profile| {
                let mut rank = 0usize;
                for (i, p) in ids.iter().enumerate() {
                    let idx = profile.player_component(p).as_index() as usize;
                    rank = rank * labels[i].len() + idx;
                }
                payoffs[rank].clone()
            },
        )
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen,
    RParen,
    Atom(String),
    Keyword(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    span: Span,
}

struct Lexer<'a> {
    text: &'a str,
    bytes: &'a [u8],
    offset: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer { text, bytes: text.as_bytes(), offset: 0, line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col, offset: self.offset }
    }

    fn bump(&mut self) {
        if self.bytes[self.offset] == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        self.offset += 1;
        // skip UTF-8 continuation bytes without advancing the column
        while self.offset < self.bytes.len() && (self.bytes[self.offset] & 0xC0) == 0x80 {
            self.offset += 1;
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, Diagnostic> {
        let mut out = Vec::new();
        while self.offset < self.bytes.len() {
            let c = self.bytes[self.offset];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => self.bump(),
                b';' => {
                    while self.offset < self.bytes.len() && self.bytes[self.offset] != b'\n' {
                        self.bump();
                    }
                }
                b'(' => {
                    let start = self.pos();
                    self.bump();
                    out.push(Spanned { token: Token::LParen, span: Span { start, end: self.pos() } });
                }
                b')' => {
                    let start = self.pos();
                    self.bump();
                    out.push(Spanned { token: Token::RParen, span: Span { start, end: self.pos() } });
                }
                _ => {
                    let start = self.pos();
                    let from = self.offset;
                    while self.offset < self.bytes.len()
                        && !matches!(
                            self.bytes[self.offset],
                            b' ' | b'\t' | b'\r' | b'\n' | b'(' | b')' | b';'
                        )
                    {
                        self.bump();
                    }
                    let word = &self.text[from..self.offset];
                    let span = Span { start, end: self.pos() };
                    let token = if let Some(rest) = word.strip_prefix(':') {
                        if !is_identifier(rest) {
                            return Err(Diagnostic::error(
                                DiagCode::LexError,
                                span,
                                format!("malformed keyword `{word}`"),
                            ));
                        }
                        Token::Keyword(rest.to_string())
                    } else if is_identifier(word) || looks_numeric(word) {
                        Token::Atom(word.to_string())
                    } else {
                        return Err(Diagnostic::error(
                            DiagCode::LexError,
                            span,
                            format!("unexpected token `{word}`"),
                        ));
                    };
                    out.push(Spanned { token, span });
                }
            }
        }
        Ok(out)
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn looks_numeric(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    body.chars().next().is_some_and(|c| c.is_ascii_digit())
}

// ---------------------------------------------------------------------------
// S-expressions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum SExpr {
    List(Vec<SExpr>, Span),
    Atom(String, Span),
    Keyword(String, Span),
}

impl SExpr {
    fn span(&self) -> Span {
        match self {
            SExpr::List(_, s) | SExpr::Atom(_, s) | SExpr::Keyword(_, s) => *s,
        }
    }
}

fn read_sexpr(tokens: &[Spanned], at: &mut usize) -> Result<SExpr, Diagnostic> {
    let Some(first) = tokens.get(*at) else {
        let dummy = Pos { line: 1, col: 1, offset: 0 };
        return Err(Diagnostic::error(
            DiagCode::ParseError,
            Span { start: dummy, end: dummy },
            "unexpected end of input",
        ));
    };
    match &first.token {
        Token::LParen => {
            let start = first.span.start;
            *at += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*at) {
                    Some(t) if t.token == Token::RParen => {
                        let end = t.span.end;
                        *at += 1;
                        return Ok(SExpr::List(items, Span { start, end }));
                    }
                    Some(_) => items.push(read_sexpr(tokens, at)?),
                    None => {
                        return Err(Diagnostic::error(
                            DiagCode::ParseError,
                            first.span,
                            "unclosed parenthesis",
                        ))
                    }
                }
            }
        }
        Token::RParen => {
            Err(Diagnostic::error(DiagCode::ParseError, first.span, "unexpected `)`"))
        }
        Token::Atom(s) => {
            *at += 1;
            Ok(SExpr::Atom(s.clone(), first.span))
        }
        Token::Keyword(s) => {
            *at += 1;
            Ok(SExpr::Keyword(s.clone(), first.span))
        }
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

/// Parses and validates a document. On success the parse returns the document
/// together with non-fatal warnings; on failure, the error diagnostics (all
/// carrying spans).
pub fn parse(text: &str) -> Result<(GameDoc, Vec<Diagnostic>), Vec<Diagnostic>> {
    let tokens = Lexer::new(text).tokens().map_err(|d| vec![d])?;
    let mut at = 0;
    let root = read_sexpr(&tokens, &mut at).map_err(|d| vec![d])?;
    if at != tokens.len() {
        return Err(vec![Diagnostic::error(
            DiagCode::ParseError,
            tokens[at].span,
            "trailing input after the document",
        )]);
    }
    Parser::default().document(&root)
}

#[derive(Default)]
struct Parser {
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

impl Parser {
    fn fail(mut self, code: DiagCode, span: Span, message: impl Into<String>) -> Vec<Diagnostic> {
        self.errors.push(Diagnostic::error(code, span, message));
        self.errors
    }

    fn document(self, root: &SExpr) -> Result<(GameDoc, Vec<Diagnostic>), Vec<Diagnostic>> {
        let SExpr::List(items, span) = root else {
            return Err(self.fail(
                DiagCode::ParseError,
                root.span(),
                "expected a parenthesized document",
            ));
        };
        match items.first() {
            Some(SExpr::Atom(head, _)) if head == "game" => self.ext_game(items, *span),
            Some(SExpr::Atom(head, _)) if head == "normal-form" => self.nf_game(items, *span),
            _ => Err(self.fail(
                DiagCode::ParseError,
                *span,
                "document must start with `game` or `normal-form`",
            )),
        }
    }

    fn players(&mut self, expr: &SExpr) -> Result<Vec<String>, ()> {
        let SExpr::List(items, span) = expr else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                expr.span(),
                "expected `(players ...)`",
            ));
            return Err(());
        };
        match items.first() {
            Some(SExpr::Atom(head, _)) if head == "players" => {}
            _ => {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *span,
                    "expected `(players ...)`",
                ));
                return Err(());
            }
        }
        let mut names = Vec::new();
        let mut seen = HashSet::new();
        for item in &items[1..] {
            let SExpr::Atom(name, span) = item else {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    item.span(),
                    "player names must be identifiers",
                ));
                return Err(());
            };
            if !is_identifier(name) {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *span,
                    format!("`{name}` is not a valid identifier"),
                ));
                return Err(());
            }
            if !seen.insert(name.clone()) {
                self.errors.push(Diagnostic::error(
                    DiagCode::DuplicatePlayer,
                    *span,
                    format!("player `{name}` declared twice"),
                ));
                return Err(());
            }
            names.push(name.clone());
        }
        if names.is_empty() {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                *span,
                "at least one player is required",
            ));
            return Err(());
        }
        Ok(names)
    }

    fn ext_game(
        mut self,
        items: &[SExpr],
        span: Span,
    ) -> Result<(GameDoc, Vec<Diagnostic>), Vec<Diagnostic>> {
        if !(3..=4).contains(&items.len()) {
            return Err(self.fail(
                DiagCode::ParseError,
                span,
                "expected `(game (players ...) (infosets ...)? (tree ...))`",
            ));
        }
        let players = match self.players(&items[1]) {
            Ok(p) => p,
            Err(()) => return Err(self.errors),
        };
        let mut builder = ExtBuilder {
            players: players.clone(),
            sets: Vec::new(),
            move_labels: Vec::new(),
            generated: Vec::new(),
            by_label: HashMap::new(),
            generated_counter: 0,
        };
        let tree_expr = if items.len() == 4 {
            if self.infoset_block(&items[2], &mut builder).is_err() {
                return Err(self.errors);
            }
            &items[3]
        } else {
            &items[2]
        };
        let tree = match self.tree(tree_expr, &mut builder) {
            Ok(t) => t,
            Err(()) => return Err(self.errors),
        };
        let table = InfoSetTable::new(builder.sets);
        let doc = ExtensiveDoc {
            table,
            move_labels: builder.move_labels,
            generated: builder.generated,
            tree,
        };
        // pathological-but-allowed shapes produce warnings
        let occurring: HashSet<usize> = occurring_sets(&doc.tree).into_iter().collect();
        for (idx, set) in doc.table.sets().iter().enumerate() {
            if !occurring.contains(&idx) && !doc.generated[idx] {
                self.warnings.push(Diagnostic::warning(
                    DiagCode::UnusedInfoset,
                    None,
                    format!("information set `{}` is declared but never used", set.label),
                ));
            }
        }
        for name in &players {
            let id = PlayerId::name(name);
            let plays = occurring.iter().any(|&s| doc.table.owner(s) == &id);
            if !plays {
                self.warnings.push(Diagnostic::warning(
                    DiagCode::UnusedPlayer,
                    None,
                    format!("player `{name}` never plays"),
                ));
            }
        }
        Ok((GameDoc { players, body: GameBody::Extensive(doc) }, self.warnings))
    }

    fn infoset_block(&mut self, expr: &SExpr, builder: &mut ExtBuilder) -> Result<(), ()> {
        let SExpr::List(items, span) = expr else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                expr.span(),
                "expected `(infosets ...)`",
            ));
            return Err(());
        };
        match items.first() {
            Some(SExpr::Atom(head, _)) if head == "infosets" => {}
            _ => {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *span,
                    "expected `(infosets ...)`",
                ));
                return Err(());
            }
        }
        for decl in &items[1..] {
            self.infoset_decl(decl, builder)?;
        }
        Ok(())
    }

    fn infoset_decl(&mut self, expr: &SExpr, builder: &mut ExtBuilder) -> Result<(), ()> {
        let SExpr::List(items, span) = expr else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                expr.span(),
                "expected `(NAME :owner PLAYER :moves (MOVE ...))`",
            ));
            return Err(());
        };
        if items.len() != 5 {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                *span,
                "expected `(NAME :owner PLAYER :moves (MOVE ...))`",
            ));
            return Err(());
        }
        let (SExpr::Atom(label, label_span), SExpr::Keyword(k1, _), SExpr::Atom(owner, owner_span), SExpr::Keyword(k2, _)) =
            (&items[0], &items[1], &items[2], &items[3])
        else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                *span,
                "expected `(NAME :owner PLAYER :moves (MOVE ...))`",
            ));
            return Err(());
        };
        if k1 != "owner" || k2 != "moves" {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                *span,
                "expected `:owner` and `:moves`",
            ));
            return Err(());
        }
        let moves = self.move_list(&items[4])?;
        if builder.by_label.contains_key(label) {
            self.errors.push(Diagnostic::error(
                DiagCode::DuplicateInfoset,
                *label_span,
                format!("information set `{label}` declared twice"),
            ));
            return Err(());
        }
        if !builder.players.contains(owner) {
            self.errors.push(Diagnostic::error(
                DiagCode::UnknownPlayer,
                *owner_span,
                format!("information set owner `{owner}` is not a declared player"),
            ));
            return Err(());
        }
        builder.declare(label.clone(), owner.clone(), moves, false);
        Ok(())
    }

    fn move_list(&mut self, expr: &SExpr) -> Result<Vec<String>, ()> {
        let SExpr::List(items, span) = expr else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                expr.span(),
                "expected a move list `(m1 m2 ...)`",
            ));
            return Err(());
        };
        let mut moves = Vec::new();
        let mut seen = HashSet::new();
        for item in items {
            let SExpr::Atom(label, span) = item else {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    item.span(),
                    "move labels must be identifiers",
                ));
                return Err(());
            };
            if !is_identifier(label) {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *span,
                    format!("`{label}` is not a valid identifier"),
                ));
                return Err(());
            }
            if !seen.insert(label.clone()) {
                self.errors.push(Diagnostic::error(
                    DiagCode::DuplicateMove,
                    *span,
                    format!("move `{label}` listed twice"),
                ));
                return Err(());
            }
            moves.push(label.clone());
        }
        if moves.is_empty() {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                *span,
                "at least one move is required",
            ));
            return Err(());
        }
        Ok(moves)
    }

    fn tree(&mut self, expr: &SExpr, builder: &mut ExtBuilder) -> Result<IETree, ()> {
        let SExpr::List(items, span) = expr else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                expr.span(),
                "expected `(tree ...)`",
            ));
            return Err(());
        };
        match items.first() {
            Some(SExpr::Atom(head, _)) if head == "tree" && items.len() == 2 => {
                self.tree_node(&items[1], builder)
            }
            _ => {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *span,
                    "expected `(tree NODE)`",
                ));
                Err(())
            }
        }
    }

    fn tree_node(&mut self, expr: &SExpr, builder: &mut ExtBuilder) -> Result<IETree, ()> {
        let SExpr::List(items, span) = expr else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                expr.span(),
                "expected `(leaf ...)` or `(node ...)`",
            ));
            return Err(());
        };
        match items.first() {
            Some(SExpr::Atom(head, _)) if head == "leaf" => {
                let mut rewards = Vec::new();
                for item in &items[1..] {
                    let SExpr::Atom(text, span) = item else {
                        self.errors.push(Diagnostic::error(
                            DiagCode::BadNumber,
                            item.span(),
                            "leaf entries must be numbers",
                        ));
                        return Err(());
                    };
                    let Some(value) = Rat::parse(text) else {
                        self.errors.push(Diagnostic::error(
                            DiagCode::BadNumber,
                            *span,
                            format!("`{text}` is not a number"),
                        ));
                        return Err(());
                    };
                    rewards.push(value);
                }
                if rewards.len() != builder.players.len() {
                    self.errors.push(Diagnostic::error(
                        DiagCode::RewardCountMismatch,
                        *span,
                        format!(
                            "leaf has {} rewards but the game has {} players",
                            rewards.len(),
                            builder.players.len()
                        ),
                    ));
                    return Err(());
                }
                Ok(IETree::Leaf(rewards))
            }
            Some(SExpr::Atom(head, _)) if head == "node" => self.inner_node(items, *span, builder),
            _ => {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *span,
                    "expected `(leaf ...)` or `(node ...)`",
                ));
                Err(())
            }
        }
    }

    fn inner_node(
        &mut self,
        items: &[SExpr],
        span: Span,
        builder: &mut ExtBuilder,
    ) -> Result<IETree, ()> {
        // (node :owner P :moves (...) CHILD+) or (node :infoset I CHILD+)
        let (set, children_from) = match items.get(1) {
            Some(SExpr::Keyword(k, _)) if k == "owner" => {
                let (Some(SExpr::Atom(owner, owner_span)), Some(SExpr::Keyword(k2, _))) =
                    (items.get(2), items.get(3))
                else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::ParseError,
                        span,
                        "expected `(node :owner PLAYER :moves (...) CHILD...)`",
                    ));
                    return Err(());
                };
                if k2 != "moves" {
                    self.errors.push(Diagnostic::error(
                        DiagCode::ParseError,
                        span,
                        "expected `:moves` after the owner",
                    ));
                    return Err(());
                }
                let Some(moves_expr) = items.get(4) else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::ParseError,
                        span,
                        "missing move list",
                    ));
                    return Err(());
                };
                if !builder.players.contains(owner) {
                    self.errors.push(Diagnostic::error(
                        DiagCode::UnknownPlayer,
                        *owner_span,
                        format!("node owner `{owner}` is not a declared player"),
                    ));
                    return Err(());
                }
                let moves = self.move_list(moves_expr)?;
                let label = builder.fresh_label();
                let set = builder.declare(label, owner.clone(), moves, true);
                (set, 5)
            }
            Some(SExpr::Keyword(k, _)) if k == "infoset" => {
                let Some(SExpr::Atom(label, label_span)) = items.get(2) else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::ParseError,
                        span,
                        "expected `(node :infoset NAME CHILD...)`",
                    ));
                    return Err(());
                };
                let Some(&set) = builder.by_label.get(label) else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::UnknownInfoset,
                        *label_span,
                        format!("information set `{label}` is not declared"),
                    ));
                    return Err(());
                };
                (set, 3)
            }
            _ => {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    span,
                    "node needs `:owner`/`:moves` or `:infoset`",
                ));
                return Err(());
            }
        };
        let children_exprs = &items[children_from..];
        let arity = builder.sets[set].arity as usize;
        if children_exprs.len() != arity {
            self.errors.push(Diagnostic::error(
                DiagCode::ChildCountMismatch,
                span,
                format!(
                    "node declares {arity} moves but has {} children",
                    children_exprs.len()
                ),
            ));
            return Err(());
        }
        let children = children_exprs
            .iter()
            .map(|c| self.tree_node(c, builder))
            .collect::<Result<Vec<_>, ()>>()?;
        Ok(IETree::Node { set, children })
    }

    fn nf_game(
        mut self,
        items: &[SExpr],
        span: Span,
    ) -> Result<(GameDoc, Vec<Diagnostic>), Vec<Diagnostic>> {
        if items.len() != 4 {
            return Err(self.fail(
                DiagCode::ParseError,
                span,
                "expected `(normal-form (players ...) (actions ...) (payoffs ...))`",
            ));
        }
        let players = match self.players(&items[1]) {
            Ok(p) => p,
            Err(()) => return Err(self.errors),
        };
        let action_labels = match self.actions_block(&items[2], &players) {
            Ok(a) => a,
            Err(()) => return Err(self.errors),
        };
        let payoffs = match self.payoff_block(&items[3], &players, &action_labels) {
            Ok(p) => p,
            Err(()) => return Err(self.errors),
        };
        let doc = NormalFormDoc { action_labels, payoffs };
        Ok((GameDoc { players, body: GameBody::NormalForm(doc) }, self.warnings))
    }

    fn actions_block(
        &mut self,
        expr: &SExpr,
        players: &[String],
    ) -> Result<Vec<Vec<String>>, ()> {
        let SExpr::List(items, span) = expr else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                expr.span(),
                "expected `(actions ...)`",
            ));
            return Err(());
        };
        match items.first() {
            Some(SExpr::Atom(head, _)) if head == "actions" => {}
            _ => {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *span,
                    "expected `(actions ...)`",
                ));
                return Err(());
            }
        }
        let mut per_player: Vec<Option<Vec<String>>> = vec![None; players.len()];
        for decl in &items[1..] {
            let SExpr::List(entries, decl_span) = decl else {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    decl.span(),
                    "expected `(PLAYER ACTION ...)`",
                ));
                return Err(());
            };
            let Some(SExpr::Atom(who, who_span)) = entries.first() else {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *decl_span,
                    "expected `(PLAYER ACTION ...)`",
                ));
                return Err(());
            };
            let Some(idx) = players.iter().position(|p| p == who) else {
                self.errors.push(Diagnostic::error(
                    DiagCode::UnknownPlayer,
                    *who_span,
                    format!("`{who}` is not a declared player"),
                ));
                return Err(());
            };
            if per_player[idx].is_some() {
                self.errors.push(Diagnostic::error(
                    DiagCode::DuplicateActionDecl,
                    *who_span,
                    format!("actions for `{who}` declared twice"),
                ));
                return Err(());
            }
            let mut labels = Vec::new();
            let mut seen = HashSet::new();
            for entry in &entries[1..] {
                let SExpr::Atom(label, span) = entry else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::ParseError,
                        entry.span(),
                        "action labels must be identifiers",
                    ));
                    return Err(());
                };
                if !seen.insert(label.clone()) {
                    self.errors.push(Diagnostic::error(
                        DiagCode::DuplicateMove,
                        *span,
                        format!("action `{label}` listed twice"),
                    ));
                    return Err(());
                }
                labels.push(label.clone());
            }
            if labels.is_empty() {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *decl_span,
                    "each player needs at least one action",
                ));
                return Err(());
            }
            per_player[idx] = Some(labels);
        }
        let mut out = Vec::new();
        for (i, labels) in per_player.into_iter().enumerate() {
            match labels {
                Some(l) => out.push(l),
                None => {
                    self.errors.push(Diagnostic::error(
                        DiagCode::MissingActionDecl,
                        *span,
                        format!("no actions declared for `{}`", players[i]),
                    ));
                    return Err(());
                }
            }
        }
        Ok(out)
    }

    fn payoff_block(
        &mut self,
        expr: &SExpr,
        players: &[String],
        actions: &[Vec<String>],
    ) -> Result<Vec<Vec<Rat>>, ()> {
        let SExpr::List(items, span) = expr else {
            self.errors.push(Diagnostic::error(
                DiagCode::ParseError,
                expr.span(),
                "expected `(payoffs ...)`",
            ));
            return Err(());
        };
        match items.first() {
            Some(SExpr::Atom(head, _)) if head == "payoffs" => {}
            _ => {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *span,
                    "expected `(payoffs ...)`",
                ));
                return Err(());
            }
        }
        let total: usize = actions.iter().map(|a| a.len()).product();
        let mut rows: Vec<Option<Vec<Rat>>> = vec![None; total];
        for row in &items[1..] {
            let SExpr::List(entries, row_span) = row else {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    row.span(),
                    "expected `((ACTION ...) NUMBER ...)`",
                ));
                return Err(());
            };
            let Some(SExpr::List(profile, profile_span)) = entries.first() else {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *row_span,
                    "payoff row must start with an action profile",
                ));
                return Err(());
            };
            if profile.len() != players.len() {
                self.errors.push(Diagnostic::error(
                    DiagCode::ParseError,
                    *profile_span,
                    format!(
                        "profile lists {} actions but the game has {} players",
                        profile.len(),
                        players.len()
                    ),
                ));
                return Err(());
            }
            let mut rank = 0usize;
            for (i, entry) in profile.iter().enumerate() {
                let SExpr::Atom(label, span) = entry else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::ParseError,
                        entry.span(),
                        "profile entries must be action labels",
                    ));
                    return Err(());
                };
                let Some(idx) = actions[i].iter().position(|a| a == label) else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::UnknownAction,
                        *span,
                        format!("`{label}` is not an action of `{}`", players[i]),
                    ));
                    return Err(());
                };
                rank = rank * actions[i].len() + idx;
            }
            let mut values = Vec::new();
            for entry in &entries[1..] {
                let SExpr::Atom(text, span) = entry else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::BadNumber,
                        entry.span(),
                        "payoffs must be numbers",
                    ));
                    return Err(());
                };
                let Some(value) = Rat::parse(text) else {
                    self.errors.push(Diagnostic::error(
                        DiagCode::BadNumber,
                        *span,
                        format!("`{text}` is not a number"),
                    ));
                    return Err(());
                };
                values.push(value);
            }
            if values.len() != players.len() {
                self.errors.push(Diagnostic::error(
                    DiagCode::PayoffCountMismatch,
                    *row_span,
                    format!(
                        "row has {} payoffs but the game has {} players",
                        values.len(),
                        players.len()
                    ),
                ));
                return Err(());
            }
            if rows[rank].is_some() {
                self.errors.push(Diagnostic::error(
                    DiagCode::PayoffRowDuplicate,
                    *row_span,
                    "this action profile already has a payoff row",
                ));
                return Err(());
            }
            rows[rank] = Some(values);
        }
        let mut out = Vec::with_capacity(total);
        for (rank, row) in rows.into_iter().enumerate() {
            match row {
                Some(r) => out.push(r),
                None => {
                    self.errors.push(Diagnostic::error(
                        DiagCode::PayoffRowMissing,
                        *span,
                        format!("missing payoff row for {}", profile_name(actions, rank)),
                    ));
                    return Err(());
                }
            }
        }
        Ok(out)
    }
}

fn profile_name(actions: &[Vec<String>], rank: usize) -> String {
    let mut indices = vec![0usize; actions.len()];
    let mut rest = rank;
    for i in (0..actions.len()).rev() {
        indices[i] = rest % actions[i].len();
        rest /= actions[i].len();
    }
    let labels: Vec<&str> = indices
        .iter()
        .enumerate()
        .map(|(i, &idx)| actions[i][idx].as_str())
        .collect();
    format!("({})", labels.join(" "))
}

struct ExtBuilder {
    players: Vec<String>,
    sets: Vec<InfoSet>,
    move_labels: Vec<Vec<String>>,
    generated: Vec<bool>,
    by_label: HashMap<String, usize>,
    generated_counter: usize,
}

impl ExtBuilder {
    fn declare(
        &mut self,
        label: String,
        owner: String,
        moves: Vec<String>,
        generated: bool,
    ) -> usize {
        let idx = self.sets.len();
        self.by_label.insert(label.clone(), idx);
        self.sets.push(InfoSet {
            label,
            owner: PlayerId::name(owner),
            arity: moves.len() as u64,
        });
        self.move_labels.push(moves);
        self.generated.push(generated);
        idx
    }

    /// Deterministic fresh labels for `:owner` nodes, skipping clashes with
    /// declared set names so reprinting and reparsing reproduces them.
    fn fresh_label(&mut self) -> String {
        loop {
            let candidate = format!("_n{}", self.generated_counter);
            self.generated_counter += 1;
            if !self.by_label.contains_key(&candidate) {
                return candidate;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Validation of constructed documents
// ---------------------------------------------------------------------------

/// Structural checks on a document, useful for documents built in code; the
/// parser already enforces all of these with source spans. Warnings flag
/// declared-but-unused information sets and players who never play.
pub fn validate(doc: &GameDoc) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = HashSet::new();
    for name in &doc.players {
        if !seen.insert(name) {
            diags.push(Diagnostic {
                severity: Severity::Error,
                code: DiagCode::DuplicatePlayer,
                span: None,
                message: format!("player `{name}` declared twice"),
            });
        }
    }
    match &doc.body {
        GameBody::Extensive(ext) => validate_ext(doc, ext, &mut diags),
        GameBody::NormalForm(nf) => validate_nf(doc, nf, &mut diags),
    }
    diags
}

fn validate_ext(doc: &GameDoc, ext: &ExtensiveDoc, diags: &mut Vec<Diagnostic>) {
    let error = |code, message: String| Diagnostic {
        severity: Severity::Error,
        code,
        span: None,
        message,
    };
    if ext.move_labels.len() != ext.table.len() || ext.generated.len() != ext.table.len() {
        diags.push(error(
            DiagCode::ParseError,
            "label tables are not aligned with the information sets".into(),
        ));
        return;
    }
    for (idx, set) in ext.table.sets().iter().enumerate() {
        if !doc.players.iter().any(|p| PlayerId::name(p) == set.owner) {
            diags.push(error(
                DiagCode::UnknownPlayer,
                format!("information set `{}` is owned by an unknown player", set.label),
            ));
        }
        if ext.move_labels[idx].len() as u64 != set.arity {
            diags.push(error(
                DiagCode::ChildCountMismatch,
                format!("information set `{}` has mismatched move labels", set.label),
            ));
        }
    }
    validate_tree(&ext.tree, ext, doc.players.len(), diags);

    let occurring: HashSet<usize> = occurring_sets(&ext.tree).into_iter().collect();
    for (idx, set) in ext.table.sets().iter().enumerate() {
        if !occurring.contains(&idx) && !ext.generated[idx] {
            diags.push(Diagnostic::warning(
                DiagCode::UnusedInfoset,
                None,
                format!("information set `{}` is declared but never used", set.label),
            ));
        }
    }
    for name in &doc.players {
        let id = PlayerId::name(name);
        if !occurring.iter().any(|&s| ext.table.owner(s) == &id) {
            diags.push(Diagnostic::warning(
                DiagCode::UnusedPlayer,
                None,
                format!("player `{name}` never plays"),
            ));
        }
    }
}

fn validate_tree(
    tree: &IETree,
    ext: &ExtensiveDoc,
    player_count: usize,
    diags: &mut Vec<Diagnostic>,
) {
    match tree {
        IETree::Leaf(rewards) => {
            if rewards.len() != player_count {
                diags.push(Diagnostic {
                    severity: Severity::Error,
                    code: DiagCode::RewardCountMismatch,
                    span: None,
                    message: format!(
                        "leaf has {} rewards but the game has {player_count} players",
                        rewards.len()
                    ),
                });
            }
        }
        IETree::Node { set, children } => {
            if *set >= ext.table.len() {
                diags.push(Diagnostic {
                    severity: Severity::Error,
                    code: DiagCode::UnknownInfoset,
                    span: None,
                    message: format!("node references unknown information set {set}"),
                });
                return;
            }
            if children.len() as u64 != ext.table.arity(*set) {
                diags.push(Diagnostic {
                    severity: Severity::Error,
                    code: DiagCode::ChildCountMismatch,
                    span: None,
                    message: format!(
                        "node in `{}` has {} children but arity {}",
                        ext.table.get(*set).label,
                        children.len(),
                        ext.table.arity(*set)
                    ),
                });
            }
            for child in children {
                validate_tree(child, ext, player_count, diags);
            }
        }
    }
}

fn validate_nf(doc: &GameDoc, nf: &NormalFormDoc, diags: &mut Vec<Diagnostic>) {
    if nf.action_labels.len() != doc.players.len() {
        diags.push(Diagnostic {
            severity: Severity::Error,
            code: DiagCode::MissingActionDecl,
            span: None,
            message: "action table is not aligned with the players".into(),
        });
        return;
    }
    let total: usize = nf.action_labels.iter().map(|a| a.len()).product();
    if nf.payoffs.len() != total {
        diags.push(Diagnostic {
            severity: Severity::Error,
            code: DiagCode::PayoffRowMissing,
            span: None,
            message: format!("expected {total} payoff rows, found {}", nf.payoffs.len()),
        });
    }
    for row in &nf.payoffs {
        if row.len() != doc.players.len() {
            diags.push(Diagnostic {
                severity: Severity::Error,
                code: DiagCode::PayoffCountMismatch,
                span: None,
                message: "payoff row has the wrong number of entries".into(),
            });
        }
    }
}

// ---------------------------------------------------------------------------
// Printer
// ---------------------------------------------------------------------------

/// Canonical textual form; parsing it back yields a structurally equal
/// document.
pub fn print(doc: &GameDoc) -> String {
    match &doc.body {
        GameBody::Extensive(ext) => print_ext(doc, ext),
        GameBody::NormalForm(nf) => print_nf(doc, nf),
    }
}

fn print_ext(doc: &GameDoc, ext: &ExtensiveDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!("(game (players {})", doc.players.join(" ")));
    let declared: Vec<usize> = (0..ext.table.len()).filter(|&i| !ext.generated[i]).collect();
    if !declared.is_empty() {
        out.push_str("\n  (infosets");
        for idx in declared {
            let set = ext.table.get(idx);
            out.push_str(&format!(
                "\n    ({} :owner {} :moves ({}))",
                set.label,
                set.owner,
                ext.move_labels[idx].join(" ")
            ));
        }
        out.push(')');
    }
    out.push_str("\n  (tree\n");
    print_tree(&ext.tree, ext, 2, &mut out);
    out.push_str("))\n");
    out
}

fn print_tree(tree: &IETree, ext: &ExtensiveDoc, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match tree {
        IETree::Leaf(rewards) => {
            let entries: Vec<String> = rewards.iter().map(|r| r.to_string()).collect();
            out.push_str(&format!("{pad}(leaf {})", entries.join(" ")));
        }
        IETree::Node { set, children } => {
            let info = ext.table.get(*set);
            if ext.generated[*set] {
                out.push_str(&format!(
                    "{pad}(node :owner {} :moves ({})",
                    info.owner,
                    ext.move_labels[*set].join(" ")
                ));
            } else {
                out.push_str(&format!("{pad}(node :infoset {}", info.label));
            }
            for child in children {
                out.push('\n');
                print_tree(child, ext, depth + 1, out);
            }
            out.push(')');
        }
    }
}

fn print_nf(doc: &GameDoc, nf: &NormalFormDoc) -> String {
    let mut out = String::new();
    out.push_str(&format!("(normal-form (players {})\n", doc.players.join(" ")));
    out.push_str("  (actions");
    for (player, labels) in doc.players.iter().zip(&nf.action_labels) {
        out.push_str(&format!(" ({player} {})", labels.join(" ")));
    }
    out.push_str(")\n  (payoffs");
    for (rank, row) in nf.payoffs.iter().enumerate() {
        let profile = profile_name(&nf.action_labels, rank);
        let values: Vec<String> = row.iter().map(|r| r.to_string()).collect();
        out.push_str(&format!("\n    ({} {})", profile, values.join(" ")));
    }
    out.push_str("))\n");
    out
}
