//! Recursive-descent parser for the OpenQASM 2.0 subset.

use super::{Circuit, GateKind, Instruction};
use thiserror::Error;

/// Parse failure with source position (1-based line and column).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Arrow,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(x) => format!("number `{x}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
        }
    }
}

struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if let Some(ch) = c {
                if ch == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
            }
            '/' => {
                bump!();
                if chars.peek() == Some(&'/') {
                    while let Some(&ch) = chars.peek() {
                        if ch == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    toks.push(Token {
                        tok: Tok::Slash,
                        line: tline,
                        col: tcol,
                    });
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some('\n') | None => {
                            return err(tline, tcol, "unterminated string literal")
                        }
                        Some(ch) => s.push(ch),
                    }
                }
                toks.push(Token {
                    tok: Tok::Str(s),
                    line: tline,
                    col: tcol,
                });
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'>') {
                    bump!();
                    toks.push(Token {
                        tok: Tok::Arrow,
                        line: tline,
                        col: tcol,
                    });
                } else {
                    toks.push(Token {
                        tok: Tok::Minus,
                        line: tline,
                        col: tcol,
                    });
                }
            }
            '(' | ')' | '[' | ']' | '{' | '}' | ',' | ';' | '+' | '*' | '^' => {
                bump!();
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '+' => Tok::Plus,
                    '*' => Tok::Star,
                    _ => Tok::Caret,
                };
                toks.push(Token {
                    tok,
                    line: tline,
                    col: tcol,
                });
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let mut s = String::new();
                let mut saw_digit = false;
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_digit() {
                        saw_digit = true;
                        s.push(ch);
                        bump!();
                    } else if ch == '.' && !s.contains('.') {
                        s.push(ch);
                        bump!();
                    } else {
                        break;
                    }
                }
                // Optional exponent part.
                if matches!(chars.peek(), Some('e') | Some('E')) && saw_digit {
                    let mut tail = String::from("e");
                    bump!();
                    if matches!(chars.peek(), Some('+') | Some('-')) {
                        tail.push(*chars.peek().unwrap());
                        bump!();
                    }
                    let mut exp_digits = false;
                    while let Some(&ch) = chars.peek() {
                        if ch.is_ascii_digit() {
                            exp_digits = true;
                            tail.push(ch);
                            bump!();
                        } else {
                            break;
                        }
                    }
                    if !exp_digits {
                        return err(tline, tcol, "malformed exponent in number literal");
                    }
                    s.push_str(&tail);
                }
                if !saw_digit {
                    return err(tline, tcol, "malformed number literal");
                }
                let value: f64 = s
                    .parse()
                    .map_err(|_| ParseError {
                        line: tline,
                        col: tcol,
                        msg: format!("malformed number literal `{s}`"),
                    })?;
                toks.push(Token {
                    tok: Tok::Number(value),
                    line: tline,
                    col: tcol,
                });
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        s.push(ch);
                        bump!();
                    } else {
                        break;
                    }
                }
                toks.push(Token {
                    tok: Tok::Ident(s),
                    line: tline,
                    col: tcol,
                });
            }
            _ => return err(line, col, format!("unexpected character `{c}`")),
        }
    }
    Ok(toks)
}

struct Reg {
    name: String,
    size: usize,
    offset: usize,
}

/// An operand: either one resolved flat index or a whole register.
enum Operand {
    One(usize),
    Whole { offset: usize, size: usize },
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: Vec<Reg>,
    cregs: Vec<Reg>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn eof_pos(&self) -> (usize, usize) {
        self.toks
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1))
    }

    fn next(&mut self, what: &str) -> Result<&Token, ParseError> {
        let (l, c) = self.eof_pos();
        match self.toks.get(self.pos) {
            Some(_) => {
                self.pos += 1;
                Ok(&self.toks[self.pos - 1])
            }
            None => err(l, c, format!("unexpected end of input, expected {what}")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let want = tok.describe();
        let t = self.next(&want)?;
        if t.tok == tok {
            Ok(())
        } else {
            let (l, c, d) = (t.line, t.col, t.tok.describe());
            err(l, c, format!("expected {want}, found {d}"))
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        let t = self.next(what)?;
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.line, t.col)),
            other => {
                let (l, c, d) = (t.line, t.col, other.describe());
                err(l, c, format!("expected {what}, found {d}"))
            }
        }
    }

    fn expect_uint(&mut self, what: &str) -> Result<usize, ParseError> {
        let t = self.next(what)?;
        match t.tok {
            Tok::Number(x) if x >= 0.0 && x.fract() == 0.0 && x <= usize::MAX as f64 => {
                Ok(x as usize)
            }
            ref other => {
                let (l, c, d) = (t.line, t.col, other.describe());
                err(l, c, format!("expected {what}, found {d}"))
            }
        }
    }

    fn lookup<'a>(
        regs: &'a [Reg],
        kind: &str,
        name: &str,
        line: usize,
        col: usize,
    ) -> Result<&'a Reg, ParseError> {
        regs.iter().find(|r| r.name == name).ok_or(ParseError {
            line,
            col,
            msg: format!("unknown {kind} register `{name}`"),
        })
    }

    /// Parses `name` or `name[idx]`, resolving against `regs`.
    fn operand(&mut self, regs_kind: &str) -> Result<(Operand, usize, usize), ParseError> {
        let (name, line, col) = self.expect_ident(&format!("a {regs_kind} register operand"))?;
        let regs = if regs_kind == "quantum" {
            &self.qregs
        } else {
            &self.cregs
        };
        let reg = Self::lookup(regs, regs_kind, &name, line, col)?;
        let (offset, size) = (reg.offset, reg.size);
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::LBracket)) {
            self.expect(Tok::LBracket)?;
            let idx_tok_pos = self
                .peek()
                .map(|t| (t.line, t.col))
                .unwrap_or_else(|| self.eof_pos());
            let idx = self.expect_uint("a register index")?;
            self.expect(Tok::RBracket)?;
            if idx >= size {
                return err(
                    idx_tok_pos.0,
                    idx_tok_pos.1,
                    format!("index {idx} out of range for register `{name}[{size}]`"),
                );
            }
            Ok((Operand::One(offset + idx), line, col))
        } else {
            Ok((Operand::Whole { offset, size }, line, col))
        }
    }

    // ---- angle expressions -------------------------------------------------

    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut v = self.term()?;
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    v += self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> Result<f64, ParseError> {
        let mut v = self.unary()?;
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Star) => {
                    self.pos += 1;
                    v *= self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    v /= self.unary()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ParseError> {
        match self.peek().map(|t| &t.tok) {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<f64, ParseError> {
        let base = self.primary()?;
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Caret)) {
            self.pos += 1;
            let exp = self.unary()?;
            Ok(base.powf(exp))
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<f64, ParseError> {
        let t = self.next("an angle expression")?;
        let (line, col) = (t.line, t.col);
        match t.tok.clone() {
            Tok::Number(x) => Ok(x),
            Tok::LParen => {
                let v = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(v)
            }
            Tok::Ident(name) => match name.as_str() {
                "pi" => Ok(std::f64::consts::PI),
                "sin" | "cos" | "tan" | "exp" | "ln" | "sqrt" => {
                    self.expect(Tok::LParen)?;
                    let v = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(match name.as_str() {
                        "sin" => v.sin(),
                        "cos" => v.cos(),
                        "tan" => v.tan(),
                        "exp" => v.exp(),
                        "ln" => v.ln(),
                        _ => v.sqrt(),
                    })
                }
                _ => err(line, col, format!("unknown identifier `{name}` in expression")),
            },
            other => err(
                line,
                col,
                format!("expected an angle expression, found {}", other.describe()),
            ),
        }
    }

    // ---- statements --------------------------------------------------------

    fn reg_decl(&mut self, quantum: bool) -> Result<(), ParseError> {
        let (name, line, col) = self.expect_ident("a register name")?;
        self.expect(Tok::LBracket)?;
        let size = self.expect_uint("a register size")?;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        if size == 0 {
            return err(line, col, format!("register `{name}` must have size >= 1"));
        }
        if self
            .qregs
            .iter()
            .chain(self.cregs.iter())
            .any(|r| r.name == name)
        {
            return err(line, col, format!("register `{name}` is already declared"));
        }
        let regs = if quantum { &mut self.qregs } else { &mut self.cregs };
        let offset = regs.iter().map(|r| r.size).sum();
        regs.push(Reg { name, size, offset });
        Ok(())
    }

    fn gate_stmt(
        &mut self,
        kind: GateKind,
        line: usize,
        col: usize,
        out: &mut Vec<Instruction>,
    ) -> Result<(), ParseError> {
        let mut angles = Vec::new();
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::LParen)) {
            self.pos += 1;
            if !matches!(self.peek().map(|t| &t.tok), Some(Tok::RParen)) {
                angles.push(self.expr()?);
                while matches!(self.peek().map(|t| &t.tok), Some(Tok::Comma)) {
                    self.pos += 1;
                    angles.push(self.expr()?);
                }
            }
            self.expect(Tok::RParen)?;
        }
        if angles.len() != kind.n_angles() {
            return err(
                line,
                col,
                format!(
                    "gate `{}` takes {} angle parameter(s), got {}",
                    kind.name(),
                    kind.n_angles(),
                    angles.len()
                ),
            );
        }
        if let Some(bad) = angles.iter().find(|a| !a.is_finite()) {
            return err(line, col, format!("angle expression evaluates to {bad}"));
        }

        let mut ops = Vec::new();
        loop {
            let (op, l, c) = self.operand("quantum")?;
            ops.push((op, l, c));
            if matches!(self.peek().map(|t| &t.tok), Some(Tok::Comma)) {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        if ops.len() != kind.n_qubits() {
            return err(
                line,
                col,
                format!(
                    "gate `{}` acts on {} qubit(s), got {} operand(s)",
                    kind.name(),
                    kind.n_qubits(),
                    ops.len()
                ),
            );
        }

        // Either every operand is indexed, or every operand is a whole
        // register of one common size (standard broadcast).
        let all_one = ops.iter().all(|(o, _, _)| matches!(o, Operand::One(_)));
        let all_whole = ops.iter().all(|(o, _, _)| matches!(o, Operand::Whole { .. }));
        let applications: Vec<Vec<usize>> = if all_one {
            vec![ops
                .iter()
                .map(|(o, _, _)| match o {
                    Operand::One(i) => *i,
                    Operand::Whole { .. } => unreachable!(),
                })
                .collect()]
        } else if all_whole {
            let sizes: Vec<usize> = ops
                .iter()
                .map(|(o, _, _)| match o {
                    Operand::Whole { size, .. } => *size,
                    Operand::One(_) => unreachable!(),
                })
                .collect();
            if sizes.windows(2).any(|w| w[0] != w[1]) {
                return err(line, col, "broadcast registers must have equal sizes");
            }
            (0..sizes[0])
                .map(|k| {
                    ops.iter()
                        .map(|(o, _, _)| match o {
                            Operand::Whole { offset, .. } => offset + k,
                            Operand::One(_) => unreachable!(),
                        })
                        .collect()
                })
                .collect()
        } else {
            return err(
                line,
                col,
                "mixing indexed and whole-register operands is not supported",
            );
        };

        for qubits in applications {
            if qubits.len() == 2 && qubits[0] == qubits[1] {
                return err(
                    line,
                    col,
                    format!("gate `{}` needs distinct qubits", kind.name()),
                );
            }
            out.push(Instruction::Gate {
                kind,
                angles: angles.clone(),
                qubits,
            });
        }
        Ok(())
    }

    fn measure_stmt(&mut self, out: &mut Vec<Instruction>) -> Result<(), ParseError> {
        let (q, ql, qc) = self.operand("quantum")?;
        self.expect(Tok::Arrow)?;
        let (c, ..) = self.operand("classical")?;
        self.expect(Tok::Semi)?;
        match (q, c) {
            (Operand::One(qubit), Operand::One(clbit)) => {
                out.push(Instruction::Measure { qubit, clbit });
            }
            (
                Operand::Whole {
                    offset: qo,
                    size: qs,
                },
                Operand::Whole {
                    offset: co,
                    size: cs,
                },
            ) => {
                if qs != cs {
                    return err(ql, qc, "measured registers must have equal sizes");
                }
                for k in 0..qs {
                    out.push(Instruction::Measure {
                        qubit: qo + k,
                        clbit: co + k,
                    });
                }
            }
            _ => {
                return err(
                    ql,
                    qc,
                    "mixing indexed and whole-register operands is not supported",
                )
            }
        }
        Ok(())
    }

    fn parse_program(&mut self) -> Result<Circuit, ParseError> {
        // Header: OPENQASM 2.0;
        let (kw, l, c) = self.expect_ident("the `OPENQASM 2.0;` header")?;
        if kw != "OPENQASM" {
            return err(l, c, "program must start with `OPENQASM 2.0;`");
        }
        let t = self.next("a version number")?;
        match t.tok {
            Tok::Number(v) if v == 2.0 => {}
            ref other => {
                let (l, c) = (t.line, t.col);
                let d = other.describe();
                return err(l, c, format!("unsupported OpenQASM version {d}, expected 2.0"));
            }
        }
        self.expect(Tok::Semi)?;

        let mut out = Vec::new();
        while self.peek().is_some() {
            let (name, line, col) = self.expect_ident("a statement")?;
            match name.as_str() {
                "include" => {
                    let t = self.next("an include path string")?;
                    let path = match &t.tok {
                        Tok::Str(s) => s.clone(),
                        other => {
                            let (l, c, d) = (t.line, t.col, other.describe());
                            return err(l, c, format!("expected an include path string, found {d}"));
                        }
                    };
                    self.expect(Tok::Semi)?;
                    if path != "qelib1.inc" {
                        return err(
                            line,
                            col,
                            format!(
                                "cannot include `{path}`: only single-file programs are supported \
                                 (`qelib1.inc` is accepted and ignored)"
                            ),
                        );
                    }
                }
                "qreg" => self.reg_decl(true)?,
                "creg" => self.reg_decl(false)?,
                "measure" => self.measure_stmt(&mut out)?,
                "reset" => {
                    let (op, ..) = self.operand("quantum")?;
                    self.expect(Tok::Semi)?;
                    match op {
                        Operand::One(qubit) => out.push(Instruction::Reset { qubit }),
                        Operand::Whole { offset, size } => {
                            for k in 0..size {
                                out.push(Instruction::Reset { qubit: offset + k });
                            }
                        }
                    }
                }
                "barrier" => {
                    let mut qubits = Vec::new();
                    loop {
                        let (op, ..) = self.operand("quantum")?;
                        match op {
                            Operand::One(q) => qubits.push(q),
                            Operand::Whole { offset, size } => {
                                qubits.extend(offset..offset + size)
                            }
                        }
                        if matches!(self.peek().map(|t| &t.tok), Some(Tok::Comma)) {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::Semi)?;
                    out.push(Instruction::Barrier { qubits });
                }
                "gate" | "opaque" => {
                    return err(line, col, format!("`{name}` definitions are not supported"))
                }
                "if" => return err(line, col, "classical control (`if`) is not supported"),
                other => match GateKind::from_name(other) {
                    Some(kind) => self.gate_stmt(kind, line, col, &mut out)?,
                    None => {
                        return err(line, col, format!("unknown gate or statement `{other}`"))
                    }
                },
            }
        }

        let n_qubits: usize = self.qregs.iter().map(|r| r.size).sum();
        let n_clbits: usize = self.cregs.iter().map(|r| r.size).sum();
        if n_qubits == 0 {
            let (l, c) = self.eof_pos();
            return err(l, c, "program declares no qubits");
        }
        Ok(Circuit {
            n_qubits,
            n_clbits,
            instructions: out,
        })
    }
}

pub(super) fn parse(src: &str) -> Result<Circuit, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        qregs: Vec::new(),
        cregs: Vec::new(),
    };
    p.parse_program()
}
