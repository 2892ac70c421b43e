//! Parser for the `.conn` connection language.
//!
//! ```text
//! document := stmt* | conn ';'?
//! stmt     := name '=' conn ';'
//! conn     := term ('(+)' term)*
//! term     := 'El(' 'rho=' expr ',' 'phi=' expr ',' 'R=' jordan ')' | 'Reg(' 'R=' jordan ')'
//! jordan   := '[' (block (',' block)*)? ']'
//! block    := '(' eig ':' int ')'
//! eig      := 'res:' expr | expr
//! expr     := sums, products, quotients and integer powers of numbers,
//!             zeta(N), i, root(expr, m), the series variable and O(var^k)
//! ```
//! `#` starts a comment running to the end of the line.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::connection::{ElementaryConnection, FormalConnection, JordanBlock, RamificationMap, RegularPart, VAR};
use crate::exactfield::{FieldElement, Rational};
use crate::series::{working_window, LaurentSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Syntax => "syntax error",
            ErrorKind::Semantic => "semantic error",
        };
        write!(f, "{}:{}: {kind}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

pub type Result<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
    DirectSum,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let step = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            step(1, &mut i, &mut col);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Num(s.parse().unwrap()), line: l0, col: c0 });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: l0, col: c0 });
        } else if c == '(' && chars.get(i + 1) == Some(&'+') && chars.get(i + 2) == Some(&')') {
            step(3, &mut i, &mut col);
            out.push(Token { tok: Tok::DirectSum, line: l0, col: c0 });
        } else if "()[],:;=*/+-^".contains(c) {
            step(1, &mut i, &mut col);
            out.push(Token { tok: Tok::Sym(c), line: l0, col: c0 });
        } else {
            return Err(ParseError {
                kind: ErrorKind::Syntax,
                line,
                col,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

const RESERVED: &[&str] = &["zeta", "root", "i", "O", "res", "El", "Reg", "rho", "phi", "R"];

/// A named connection with the position where its definition starts.
#[derive(Debug, Clone)]
pub struct Statement {
    pub name: Option<String>,
    pub conn: FormalConnection,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Default)]
pub struct ParsedDocument {
    pub statements: Vec<Statement>,
}

impl ParsedDocument {
    pub fn get(&self, name: &str) -> Option<&FormalConnection> {
        self.statements.iter().find(|s| s.name.as_deref() == Some(name)).map(|s| &s.conn)
    }

    /// The last connection of the document.
    pub fn last(&self) -> Option<&FormalConnection> {
        self.statements.last().map(|s| &s.conn)
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Series variable seen in the current connection term.
    var: Option<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(&self, t: &Token, kind: ErrorKind, message: impl Into<String>) -> ParseError {
        ParseError { kind, line: t.line, col: t.col, message: message.into() }
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        self.err_at(self.peek(), ErrorKind::Syntax, message)
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::DirectSum => "`(+)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<Token> {
        if self.peek().tok == Tok::Sym(c) {
            Ok(self.next())
        } else {
            Err(self.syntax(format!("expected `{c}`, found {}", Self::describe(&self.peek().tok))))
        }
    }

    fn expect_ident(&mut self, word: &str) -> Result<Token> {
        if self.peek().tok == Tok::Ident(word.into()) {
            Ok(self.next())
        } else {
            Err(self.syntax(format!("expected `{word}`, found {}", Self::describe(&self.peek().tok))))
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat_sym('-');
        let t = self.next();
        match &t.tok {
            Tok::Num(n) => {
                let v = n.to_i64().ok_or_else(|| self.err_at(&t, ErrorKind::Semantic, "integer out of range"))?;
                Ok(if neg { -v } else { v })
            }
            other => Err(self.err_at(&t, ErrorKind::Syntax, format!("expected an integer, found {}", Self::describe(other)))),
        }
    }

    fn document(&mut self) -> Result<ParsedDocument> {
        let mut doc = ParsedDocument::default();
        let named = matches!(self.peek_at(0), Tok::Ident(s) if !RESERVED.contains(&s.as_str()))
            && self.peek_at(1) == &Tok::Sym('=');
        if !named {
            let t = self.peek().clone();
            let conn = self.conn()?;
            self.eat_sym(';');
            doc.statements.push(Statement { name: None, conn, line: t.line, col: t.col });
        } else {
            while self.peek().tok != Tok::Eof {
                let t = self.next();
                let name = match &t.tok {
                    Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => s.clone(),
                    other => {
                        return Err(self.err_at(&t, ErrorKind::Syntax, format!("expected a name, found {}", Self::describe(other))))
                    }
                };
                if doc.get(&name).is_some() {
                    return Err(self.err_at(&t, ErrorKind::Semantic, format!("`{name}` defined twice")));
                }
                self.expect_sym('=')?;
                let conn = self.conn()?;
                self.expect_sym(';')?;
                doc.statements.push(Statement { name: Some(name), conn, line: t.line, col: t.col });
            }
        }
        if self.peek().tok != Tok::Eof {
            return Err(self.syntax(format!("unexpected {}", Self::describe(&self.peek().tok))));
        }
        Ok(doc)
    }

    fn conn(&mut self) -> Result<FormalConnection> {
        let mut summands = vec![self.term()?];
        while self.peek().tok == Tok::DirectSum {
            self.next();
            summands.push(self.term()?);
        }
        Ok(FormalConnection::new(summands))
    }

    fn term(&mut self) -> Result<ElementaryConnection> {
        self.var = None;
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == "El" => {
                self.expect_sym('(')?;
                self.expect_ident("rho")?;
                self.expect_sym('=')?;
                let rho_at = self.peek().clone();
                let rho = self.expr()?;
                self.expect_sym(',')?;
                self.expect_ident("phi")?;
                self.expect_sym('=')?;
                let phi_at = self.peek().clone();
                let phi = self.expr()?;
                self.expect_sym(',')?;
                self.expect_ident("R")?;
                self.expect_sym('=')?;
                let reg = self.jordan()?;
                self.expect_sym(')')?;
                let rho = RamificationMap::new(rho)
                    .map_err(|e| self.err_at(&rho_at, ErrorKind::Semantic, format!("rho: {e}")))?;
                ElementaryConnection::new(rho, &phi, reg)
                    .map_err(|e| self.err_at(&phi_at, ErrorKind::Semantic, format!("phi: {e}")))
            }
            Tok::Ident(s) if s == "Reg" => {
                self.expect_sym('(')?;
                self.expect_ident("R")?;
                self.expect_sym('=')?;
                let reg = self.jordan()?;
                self.expect_sym(')')?;
                Ok(ElementaryConnection::regular(reg))
            }
            other => Err(self.err_at(&t, ErrorKind::Syntax, format!("expected `El(` or `Reg(`, found {}", Self::describe(other)))),
        }
    }

    fn jordan(&mut self) -> Result<RegularPart> {
        self.expect_sym('[')?;
        let mut blocks = Vec::new();
        if !self.eat_sym(']') {
            loop {
                self.expect_sym('(')?;
                let at = self.peek().clone();
                let eig = self.eigenvalue()?;
                if eig.is_zero() {
                    return Err(self.err_at(&at, ErrorKind::Semantic, "eigenvalue must be nonzero"));
                }
                self.expect_sym(':')?;
                let size_at = self.peek().clone();
                let size = self.int()?;
                if size < 1 {
                    return Err(self.err_at(&size_at, ErrorKind::Semantic, "block size must be positive"));
                }
                self.expect_sym(')')?;
                blocks.push(JordanBlock::new(eig, size as usize));
                if self.eat_sym(']') {
                    break;
                }
                self.expect_sym(',')?;
            }
        }
        RegularPart::new(blocks).map_err(|e| self.syntax(e.to_string()))
    }

    fn eigenvalue(&mut self) -> Result<FieldElement> {
        if self.peek().tok == Tok::Ident("res".into()) && self.peek_at(1) == &Tok::Sym(':') {
            self.next();
            self.next();
            let at = self.peek().clone();
            let r = self.scalar_expr()?;
            let r = r
                .to_rational()
                .ok_or_else(|| self.err_at(&at, ErrorKind::Semantic, "residue must be rational"))?;
            return Ok(FieldElement::exp_two_pi_i(&r));
        }
        self.scalar_expr()
    }

    fn scalar_expr(&mut self) -> Result<FieldElement> {
        let at = self.peek().clone();
        let s = self.expr()?;
        as_scalar(&s).ok_or_else(|| self.err_at(&at, ErrorKind::Semantic, "expected a scalar"))
    }

    fn expr(&mut self) -> Result<LaurentSeries> {
        let mut acc = self.product()?;
        loop {
            if self.eat_sym('+') {
                acc = acc.add(&self.product()?);
            } else if self.eat_sym('-') {
                acc = acc.sub(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<LaurentSeries> {
        let mut acc = self.unary()?;
        loop {
            if self.eat_sym('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.peek().tok == Tok::Sym('/') {
                let t = self.next();
                let d = self.unary()?;
                if d.is_exact_zero() {
                    return Err(self.err_at(&t, ErrorKind::Semantic, "division by zero"));
                }
                acc = acc
                    .div(&d, working_window(1, 1))
                    .map_err(|e| self.err_at(&t, ErrorKind::Semantic, e.to_string()))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<LaurentSeries> {
        if self.eat_sym('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<LaurentSeries> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Sym('^') {
            return Ok(base);
        }
        let t = self.next();
        let k = self.int()?;
        if let Some(c) = as_scalar(&base) {
            let v = c.pow(k).map_err(|e| self.err_at(&t, ErrorKind::Semantic, e.to_string()))?;
            return Ok(LaurentSeries::constant(VAR, v));
        }
        base.pow(k, working_window(1, 1)).map_err(|e| self.err_at(&t, ErrorKind::Semantic, e.to_string()))
    }

    fn atom(&mut self) -> Result<LaurentSeries> {
        let t = self.next();
        let constant = |c: FieldElement| LaurentSeries::constant(VAR, c);
        match &t.tok {
            Tok::Num(n) => Ok(constant(FieldElement::rational(Rational::from_integer(n.clone())))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(s) if s == "zeta" => {
                self.expect_sym('(')?;
                let at = self.peek().clone();
                let n = self.int()?;
                self.expect_sym(')')?;
                if n < 1 {
                    return Err(self.err_at(&at, ErrorKind::Semantic, "zeta order must be positive"));
                }
                Ok(constant(FieldElement::zeta(n as u64)))
            }
            Tok::Ident(s) if s == "i" => Ok(constant(FieldElement::zeta(4))),
            Tok::Ident(s) if s == "root" => {
                self.expect_sym('(')?;
                let x = self.scalar_expr()?;
                self.expect_sym(',')?;
                let at = self.peek().clone();
                let m = self.int()?;
                self.expect_sym(')')?;
                if m < 1 {
                    return Err(self.err_at(&at, ErrorKind::Semantic, "root degree must be positive"));
                }
                let r = x.adjoin_root(m as usize).map_err(|e| self.err_at(&t, ErrorKind::Semantic, e.to_string()))?;
                Ok(constant(r))
            }
            Tok::Ident(s) if s == "O" => {
                self.expect_sym('(')?;
                self.variable()?;
                self.expect_sym('^')?;
                let k = self.int()?;
                self.expect_sym(')')?;
                Ok(LaurentSeries::big_o(VAR, k))
            }
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                self.pos -= 1;
                self.variable()?;
                Ok(LaurentSeries::variable(VAR))
            }
            other => Err(self.err_at(&t, ErrorKind::Syntax, format!("unexpected {}", Self::describe(other)))),
        }
    }

    fn variable(&mut self) -> Result<()> {
        let t = self.next();
        let Tok::Ident(name) = &t.tok else {
            return Err(self.err_at(&t, ErrorKind::Syntax, "expected the series variable"));
        };
        if RESERVED.contains(&name.as_str()) {
            return Err(self.err_at(&t, ErrorKind::Syntax, format!("`{name}` is reserved")));
        }
        match &self.var {
            Some(v) if v != name => {
                Err(self.err_at(&t, ErrorKind::Semantic, format!("variable `{name}` mixed with `{v}`")))
            }
            Some(_) => Ok(()),
            None => {
                self.var = Some(name.clone());
                Ok(())
            }
        }
    }
}

fn as_scalar(s: &LaurentSeries) -> Option<FieldElement> {
    if !s.is_exact() {
        return None;
    }
    match s.valuation() {
        None => Some(FieldElement::zero()),
        Some(0) if s.degree() == Some(0) => Some(s.coeff(0)),
        _ => None,
    }
}

pub fn parse(text: &str) -> Result<ParsedDocument> {
    let mut p = Parser { toks: lex(text)?, pos: 0, var: None };
    p.document()
}

/// Parses a single connection expression.
pub fn parse_connection(text: &str) -> Result<FormalConnection> {
    let doc = parse(text)?;
    match doc.statements.len() {
        1 => Ok(doc.statements.into_iter().next().unwrap().conn),
        n => Err(ParseError {
            kind: ErrorKind::Semantic,
            line: 1,
            col: 1,
            message: format!("expected one connection, found {n}"),
        }),
    }
}

pub fn parse_jordan(text: &str) -> Result<RegularPart> {
    let mut p = Parser { toks: lex(text)?, pos: 0, var: None };
    let j = p.jordan()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.syntax("trailing input after Jordan data"));
    }
    Ok(j)
}

pub fn parse_scalar(text: &str) -> Result<FieldElement> {
    let mut p = Parser { toks: lex(text)?, pos: 0, var: None };
    let s = p.scalar_expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.syntax("trailing input after scalar"));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_form_reparses() {
        let m = parse_connection("El(rho=2*u^2, phi=u^-3 + 1/2*u^-1, R=[(res:1/3:2), (-1:1)]) (+) Reg(R=[(i:1)])")
            .unwrap()
            .canonicalize()
            .unwrap();
        let again = parse_connection(&m.to_string()).unwrap();
        assert_eq!(again.to_string(), m.to_string());
    }

    #[test]
    fn named_statements() {
        let doc = parse("a = Reg(R=[(1:1)]);\n# note\nb = El(rho=u, phi=u^-1, R=[(2:1)]);").unwrap();
        assert_eq!(doc.statements.len(), 2);
        assert!(doc.get("a").is_some());
        assert_eq!(doc.last().unwrap().summands[0].q(), 1);
    }

    #[test]
    fn scalars() {
        let z = parse_scalar("zeta(3)^2 + zeta(3) + 1").unwrap();
        assert!(z.is_zero());
        let r = parse_scalar("root(2, 2)*root(2, 2)").unwrap();
        assert_eq!(r, FieldElement::from_int(2));
        assert_eq!(parse_scalar("i*i").unwrap(), FieldElement::from_int(-1));
    }

    #[test]
    fn residue_sugar() {
        let r = parse_jordan("[(res:1/2:1)]").unwrap();
        assert_eq!(r.blocks()[0].eigenvalue, FieldElement::from_int(-1));
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_connection("El(rho=u^0, phi=0, R=[(1:1)])").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        assert_eq!((e.line, e.col), (1, 8));
        let e = parse("x = El(rho=u, phi=u^-1, R=[(1:1)])\ny = Reg(R=[(1:1)]);").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Syntax);
        assert_eq!(e.line, 2);
        assert!(parse_jordan("[(0:1)]").is_err());
        assert!(parse_jordan("[(1:0)]").is_err());
        assert!(parse_connection("El(rho=u, phi=t^-1, R=[(1:1)])").is_err());
        assert!(parse_connection("El(rho=u, phi=u^-1 $, R=[(1:1)])").is_err());
    }

    mod props {
        use super::*;
        use crate::connection::{ElementaryConnection, FormalConnection, RegularPart};
        use crate::series::LaurentSeries;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = FieldElement> {
            (-4i64..=4, 1i64..=3, 0usize..3, 0i64..4).prop_filter_map("nonzero", |(n, d, kind, k)| {
                let base = FieldElement::from_ratio(n, d);
                let x = match kind {
                    0 => base,
                    1 => base * FieldElement::zeta_pow(3, k),
                    _ => base * FieldElement::zeta_pow(4, k),
                };
                (!x.is_zero()).then_some(x)
            })
        }

        fn summand() -> impl Strategy<Value = ElementaryConnection> {
            (1usize..=3, 0i64..=4, scalar(), proptest::collection::vec(scalar(), 1..4), 1usize..=2, scalar())
                .prop_filter_map("minimal", |(p, q, c, coeffs, size, eig)| {
                    let mut phi = LaurentSeries::zero("u");
                    for (i, a) in coeffs.iter().enumerate() {
                        let k = q - i as i64;
                        if k >= 1 {
                            phi = phi.add(&LaurentSeries::monomial("u", a.clone(), -k));
                        }
                    }
                    let reg = RegularPart::from_pairs([(eig, size)]).ok()?;
                    let el = ElementaryConnection::monomial(c, p, &phi, reg).ok()?;
                    el.is_minimal().then_some(el)
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn print_parse_is_identity_on_canonical_forms(v in proptest::collection::vec(summand(), 1..4)) {
                let c = FormalConnection::new(v).canonicalize().unwrap();
                let back = parse_connection(&c.to_string()).unwrap();
                prop_assert_eq!(back.summands.len(), c.summands.len());
                for (x, y) in back.summands.iter().zip(&c.summands) {
                    prop_assert!(x.same_presentation(y), "{} vs {}", x, y);
                }
            }
        }
    }
}
