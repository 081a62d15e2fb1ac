//! Concrete syntax. The printer emits ASCII with minimal parentheses; the
//! parser also accepts the usual Unicode symbols as aliases.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, ParseError, SourceSpan};
use crate::formula::{Coalition, Formula, PrefKind};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    LParen,
    RParen,
    Comma,
    Dot,
    Bang,
    Amp,
    Bar,
    Arrow,
    DArrow,
    LAngle,
    RAngle,
    LBrack,
    RBrack,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            t => format!("`{}`", t.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::LAngle => "<<",
            Tok::RAngle => ">>",
            Tok::LBrack => "[[",
            Tok::RBrack => "]]",
            _ => "",
        }
    }
}

const KEYWORDS: &[&str] = &[
    "X", "Y", "F", "G", "H", "O", "A", "E", "I", "U", "S", "true", "false", "exists", "forall",
    "lt", "nl", "init",
];

/// True when `name` can be printed as an atom and parsed back.
pub fn is_valid_atom(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&name)
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let rest = &text[i..];
        let fixed: &[(&str, Tok)] = &[
            ("<->", Tok::DArrow),
            ("->", Tok::Arrow),
            ("<<", Tok::LAngle),
            (">>", Tok::RAngle),
            ("[[", Tok::LBrack),
            ("]]", Tok::RBrack),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            (",", Tok::Comma),
            (".", Tok::Dot),
            ("!", Tok::Bang),
            ("&", Tok::Amp),
            ("|", Tok::Bar),
            ("¬", Tok::Bang),
            ("∧", Tok::Amp),
            ("∨", Tok::Bar),
            ("→", Tok::Arrow),
            ("⇒", Tok::Arrow),
            ("↔", Tok::DArrow),
            ("⇔", Tok::DArrow),
            ("⟨⟨", Tok::LAngle),
            ("⟩⟩", Tok::RAngle),
            ("⟦", Tok::LBrack),
            ("⟧", Tok::RBrack),
        ];
        if let Some((s, t)) = fixed.iter().find(|(s, _)| rest.starts_with(s)) {
            out.push((t.clone(), SourceSpan::new(i, i + s.len())));
            for _ in 0..s.chars().count() {
                it.next();
            }
            continue;
        }
        let alias = match c {
            '⊤' => Some("true"),
            '⊥' => Some("false"),
            '◇' => Some("F"),
            '□' => Some("G"),
            '○' => Some("X"),
            '⧫' => Some("O"),
            '⊟' => Some("H"),
            '∀' => Some("A"),
            '∃' => Some("E"),
            _ => None,
        };
        if let Some(a) = alias {
            it.next();
            out.push((Tok::Ident(a.to_string()), SourceSpan::new(i, i + c.len_utf8())));
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                it.next();
            }
            let span = SourceSpan::new(i, end);
            let n = text[i..end].parse::<u32>().map_err(|_| ParseError {
                span,
                expected: BTreeSet::from(["player index".to_string()]),
                found: format!("`{}`", &text[i..end]),
            })?;
            out.push((Tok::Num(n), span));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                end = j + 1;
                it.next();
            }
            out.push((Tok::Ident(text[i..end].to_string()), SourceSpan::new(i, end)));
            continue;
        }
        return Err(ParseError {
            span: SourceSpan::new(i, i + c.len_utf8()),
            expected: BTreeSet::from(["formula".to_string()]),
            found: format!("`{c}`"),
        });
    }
    out.push((Tok::Eof, SourceSpan::new(text.len(), text.len())));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    agents: u32,
}

fn expected_formula() -> BTreeSet<String> {
    [
        "identifier", "true", "false", "I", "!", "(", "X", "Y", "F", "G", "H", "O", "A", "E", "<<",
        "[[", "exists", "forall", "lt", "nl", "init",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: BTreeSet<String>) -> Result<T, Error> {
        Err(Error::Syntax(ParseError { span: self.span(), expected, found: self.peek().describe() }))
    }

    fn expect(&mut self, t: Tok) -> Result<(), Error> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(BTreeSet::from([format!("`{}`", t.text())]))
        }
    }

    fn is_ident(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn player(&mut self) -> Result<u32, Error> {
        match *self.peek() {
            Tok::Num(n) => {
                if n == 0 || n > self.agents {
                    return Err(Error::UnknownPlayer { player: n, agents: self.agents });
                }
                self.bump();
                Ok(n)
            }
            _ => self.fail(BTreeSet::from(["player index".to_string()])),
        }
    }

    fn players(&mut self, close: Tok) -> Result<Coalition, Error> {
        let mut v = Vec::new();
        if *self.peek() != close {
            v.push(self.player()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                v.push(self.player()?);
            }
        }
        self.expect(close)?;
        Ok(Coalition::new(v))
    }

    /// Lowest level: `<->`, left associative.
    fn iff(&mut self) -> Result<Formula, Error> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, Error> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, Error> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, Error> {
        let mut lhs = self.binary_temporal()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.binary_temporal()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn binary_temporal(&mut self) -> Result<Formula, Error> {
        let lhs = self.unary()?;
        if self.is_ident("U") || self.is_ident("S") {
            let until = self.is_ident("U");
            self.bump();
            let rhs = self.binary_temporal()?;
            return Ok(if until { Formula::until(lhs, rhs) } else { Formula::since(lhs, rhs) });
        }
        Ok(lhs)
    }

    fn quantifier(&mut self, exists: bool) -> Result<Formula, Error> {
        let var = match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                s
            }
            _ => return self.fail(BTreeSet::from(["identifier".to_string()])),
        };
        self.expect(Tok::Dot)?;
        let body = self.iff()?;
        Ok(if exists { Formula::exists(var, body) } else { Formula::forall(var, body) })
    }

    fn unary(&mut self) -> Result<Formula, Error> {
        let tok = self.peek().clone();
        match tok {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LAngle => {
                self.bump();
                let c = self.players(Tok::RAngle)?;
                Ok(Formula::ability(c, self.unary()?))
            }
            Tok::LBrack => {
                self.bump();
                let c = self.players(Tok::RBrack)?;
                Ok(Formula::dual(c, self.unary()?))
            }
            Tok::Ident(name) => {
                // `E p. phi` / `A p. phi` arise from the Unicode quantifier aliases.
                if (name == "E" || name == "A")
                    && matches!(self.peek_at(1), Tok::Ident(v) if !KEYWORDS.contains(&v.as_str()))
                    && *self.peek_at(2) == Tok::Dot
                {
                    self.bump();
                    return self.quantifier(name == "E");
                }
                self.bump();
                let un = |f: fn(Formula) -> Formula, p: &mut Parser| -> Result<Formula, Error> {
                    Ok(f(p.unary()?))
                };
                match name.as_str() {
                    "true" => Ok(Formula::True),
                    "false" => Ok(Formula::False),
                    "I" => Ok(Formula::Init),
                    "X" => un(Formula::next, self),
                    "Y" => un(Formula::yesterday, self),
                    "F" => un(Formula::eventually, self),
                    "G" => un(Formula::always, self),
                    "H" => un(Formula::historically, self),
                    "O" => un(Formula::once, self),
                    "A" => un(Formula::all_paths, self),
                    "E" => un(Formula::some_path, self),
                    "exists" => self.quantifier(true),
                    "forall" => self.quantifier(false),
                    "lt" | "nl" => {
                        self.expect(Tok::LParen)?;
                        let player = self.player()?;
                        self.expect(Tok::Comma)?;
                        let a = self.iff()?;
                        self.expect(Tok::Comma)?;
                        let b = self.iff()?;
                        self.expect(Tok::RParen)?;
                        let kind = if name == "lt" { PrefKind::Less } else { PrefKind::NotLess };
                        Ok(Formula::pref(kind, player, a, b))
                    }
                    "init" => {
                        self.expect(Tok::LParen)?;
                        let a = self.iff()?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::at_origin(a))
                    }
                    "U" | "S" => {
                        self.pos -= 1;
                        self.fail(expected_formula())
                    }
                    _ => Ok(Formula::Atom(name)),
                }
            }
            _ => self.fail(expected_formula()),
        }
    }
}

/// Parses a formula over players `1..=agents`.
pub fn parse(text: &str, agents: u32) -> Result<Formula, Error> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, agents };
    let f = p.iff()?;
    if *p.peek() != Tok::Eof {
        let mut exp: BTreeSet<String> =
            ["&", "|", "->", "<->", "U", "S"].iter().map(|s| format!("`{s}`")).collect();
        exp.insert("end of input".to_string());
        return p.fail(exp);
    }
    Ok(f)
}

// Binding strength, higher binds tighter.
const P_QUANT: u8 = 0;
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_TEMP: u8 = 5;

fn prec(f: &Formula) -> u8 {
    use Formula::*;
    match f {
        Exists(..) | Forall(..) => P_QUANT,
        Iff(..) => P_IFF,
        Implies(..) => P_IMP,
        Or(..) => P_OR,
        And(..) => P_AND,
        Until(..) | Since(..) => P_TEMP,
        _ => 6,
    }
}

fn coalition_list(c: &Coalition) -> String {
    c.players().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

/// `min`: weakest binding allowed without parentheses. `open`: nothing of
/// this context follows on the right, so a quantifier may extend freely.
fn write_formula(out: &mut String, f: &Formula, min: u8, open: bool) {
    use Formula::*;
    let p = prec(f);
    let needs = if p == P_QUANT { !open } else { p < min };
    if needs {
        out.push('(');
        write_formula(out, f, 0, true);
        out.push(')');
        return;
    }
    let bin = |out: &mut String, a: &Formula, op: &str, b: &Formula, right_assoc: bool| {
        let (lmin, rmin) = if right_assoc { (p + 1, p) } else { (p, p + 1) };
        write_formula(out, a, lmin, false);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write_formula(out, b, rmin, open);
    };
    match f {
        False => out.push_str("false"),
        True => out.push_str("true"),
        Init => out.push('I'),
        Atom(a) => out.push_str(a),
        Not(a) => {
            out.push('!');
            write_formula(out, a, 6, open);
        }
        And(a, b) => bin(out, a, "&", b, false),
        Or(a, b) => bin(out, a, "|", b, false),
        Implies(a, b) => bin(out, a, "->", b, true),
        Iff(a, b) => bin(out, a, "<->", b, false),
        Until(a, b) => bin(out, a, "U", b, true),
        Since(a, b) => bin(out, a, "S", b, true),
        Next(a) | Yesterday(a) | Eventually(a) | Always(a) | Once(a) | Historically(a) => {
            let op = match f {
                Next(_) => "X",
                Yesterday(_) => "Y",
                Eventually(_) => "F",
                Always(_) => "G",
                Once(_) => "O",
                _ => "H",
            };
            out.push_str(op);
            out.push(' ');
            write_formula(out, a, 6, open);
        }
        Ability(c, a) | Dual(c, a) => {
            let dual = matches!(f, Dual(..));
            if c.is_empty() {
                out.push_str(if dual { "E " } else { "A " });
            } else if dual {
                out.push_str(&format!("[[{}]] ", coalition_list(c)));
            } else {
                out.push_str(&format!("<<{}>> ", coalition_list(c)));
            }
            write_formula(out, a, 6, open);
        }
        Exists(v, a) | Forall(v, a) => {
            out.push_str(if matches!(f, Exists(..)) { "exists " } else { "forall " });
            out.push_str(v);
            out.push_str(". ");
            write_formula(out, a, 0, open);
        }
        Pref { kind, player, lhs, rhs } => {
            out.push_str(match kind {
                PrefKind::Less => "lt(",
                PrefKind::NotLess => "nl(",
            });
            out.push_str(&format!("{player}, "));
            write_formula(out, lhs, 0, true);
            out.push_str(", ");
            write_formula(out, rhs, 0, true);
            out.push(')');
        }
        AtOrigin(a) => {
            out.push_str("init(");
            write_formula(out, a, 0, true);
            out.push(')');
        }
    }
}

/// Renders `f` in the ASCII syntax accepted by [`parse`].
pub fn print(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, 0, true);
    s
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}
