use crate::dsl::ast::{BinOp, Expr, FrameDecl, Program, PulseAxis, PulseTarget, Statement};
use crate::dsl::{ParseError, ParseErrorKind};
use crate::spin::SpinSystem;

/// Parses program text without resolving it against a spin system.
pub fn parse(text: &str) -> Result<Program, ParseError> {
    parse_checked(text, None)
}

/// Parses and, when `sys` is given, checks spin names and evaluates every
/// expression so diagnostics point at the offending token.
pub(crate) fn parse_checked(text: &str, sys: Option<&SpinSystem>) -> Result<Program, ParseError> {
    let mut statements = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = Line::new(i + 1, raw, sys);
        if let Some(s) = line.statement()? {
            statements.push(s);
        }
    }
    Ok(Program { statements })
}

/// A whitespace-delimited token with its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    code: &'a str,
    sys: Option<&'a SpinSystem>,
}

impl<'a> Line<'a> {
    fn new(number: usize, raw: &'a str, sys: Option<&'a SpinSystem>) -> Self {
        let code = raw.split('#').next().unwrap_or("");
        Line { number, code, sys }
    }

    fn err(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError::new(self.number, col, kind)
    }

    fn syntax(&self, col: usize, msg: impl Into<String>) -> ParseError {
        self.err(col, ParseErrorKind::Syntax(msg.into()))
    }

    fn tokens(&self) -> Vec<Token<'a>> {
        let mut out = Vec::new();
        let mut start: Option<(usize, usize)> = None;
        let mut col = 0;
        for (byte, ch) in self.code.char_indices() {
            col += 1;
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some((byte, col)),
                (true, Some((b, c))) => {
                    out.push(Token { text: &self.code[b..byte], col: c });
                    start = None;
                }
                _ => {}
            }
        }
        if let Some((b, c)) = start {
            out.push(Token { text: &self.code[b..], col: c });
        }
        out
    }

    /// Text after the first token, with its column.
    fn rest_after(&self, first: &Token<'a>) -> Token<'a> {
        let byte = self.code.find(first.text).unwrap_or(0) + first.text.len();
        let rest = &self.code[byte..];
        let trimmed = rest.trim_start();
        let col = self.code[..byte].chars().count() + rest.chars().count() - trimmed.chars().count() + 1;
        Token { text: trimmed.trim_end(), col }
    }

    fn statement(&self) -> Result<Option<Statement>, ParseError> {
        let tokens = self.tokens();
        let Some(kw) = tokens.first() else {
            return Ok(None);
        };
        let args = &tokens[1..];
        let end_col = self.code.chars().count() + 1;
        let s = match kw.text {
            "system" => {
                let rest = self.rest_after(kw);
                if rest.text.is_empty() {
                    return Err(self.syntax(end_col, "system needs a file path"));
                }
                Statement::System(rest.text.to_string())
            }
            "pulse" => self.pulse(args, end_col)?,
            "delay" => {
                let rest = self.rest_after(kw);
                if rest.text.is_empty() {
                    return Err(self.syntax(end_col, "delay needs an expression"));
                }
                let e = self.expr(rest)?;
                self.check_duration(&e, rest.col, true)?;
                Statement::Delay(e)
            }
            "frame" => self.frame(args, end_col)?,
            "acquire" => {
                if args.len() != 3 {
                    return Err(self.syntax(
                        args.get(3).map_or(end_col, |t| t.col),
                        "expected: acquire <spins> <duration> <dt>",
                    ));
                }
                let spins = self.spin_list(args[0])?;
                let duration = self.expr(args[1])?;
                let dt = self.expr(args[2])?;
                self.check_duration(&duration, args[1].col, false)?;
                self.check_duration(&dt, args[2].col, false)?;
                Statement::Acquire { spins: spins.into_iter().map(|(s, _)| s).collect(), duration, dt }
            }
            other => return Err(self.err(kw.col, ParseErrorKind::UnknownKeyword(other.to_string()))),
        };
        Ok(Some(s))
    }

    fn pulse(&self, args: &[Token<'a>], end_col: usize) -> Result<Statement, ParseError> {
        let targets = match args {
            [list] => {
                // per-spin form: B:x90,C:x-90
                let mut targets = Vec::new();
                for item in split_commas(*list) {
                    let Some(colon) = item.text.find(':') else {
                        return Err(self.syntax(end_col, "expected an angle such as y90"));
                    };
                    let spin = Token { text: &item.text[..colon], col: item.col };
                    let angle_col = item.col + item.text[..=colon].chars().count();
                    let angle = Token { text: &item.text[colon + 1..], col: angle_col };
                    self.check_spin(spin)?;
                    let (axis, degrees) = self.angle(angle)?;
                    targets.push(PulseTarget { spin: spin.text.to_string(), axis, degrees });
                }
                targets
            }
            [list, angle] => {
                let spins = self.spin_list(*list)?;
                let (axis, degrees) = self.angle(*angle)?;
                spins.into_iter().map(|(spin, _)| PulseTarget { spin, axis, degrees }).collect()
            }
            [] => return Err(self.syntax(end_col, "pulse needs spins and an angle")),
            [_, _, extra, ..] => return Err(self.syntax(extra.col, "unexpected token after pulse angle")),
        };
        for (i, t) in targets.iter().enumerate() {
            if targets[..i].iter().any(|u| u.spin == t.spin) {
                return Err(self.syntax(args[0].col, format!("spin {} pulsed twice in one statement", t.spin)));
            }
        }
        Ok(Statement::Pulse(targets))
    }

    fn frame(&self, args: &[Token<'a>], end_col: usize) -> Result<Statement, ParseError> {
        let decl = match args {
            [kind] if kind.text == "resonant" => FrameDecl::Resonant,
            [kind, label] if kind.text == "uncouple" => {
                self.check_spin(*label)?;
                FrameDecl::Uncouple(label.text.to_string())
            }
            [kind, list] if kind.text == "offsets" => {
                let mut items = Vec::new();
                for item in split_commas(*list) {
                    let Some(eq) = item.text.find('=') else {
                        return Err(self.syntax(item.col, "expected <spin>=<Hz>"));
                    };
                    let spin = Token { text: &item.text[..eq], col: item.col };
                    self.check_spin(spin)?;
                    let value_col = item.col + item.text[..=eq].chars().count();
                    let hz: f64 = item.text[eq + 1..]
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite())
                        .ok_or_else(|| self.syntax(value_col, format!("bad offset '{}'", &item.text[eq + 1..])))?;
                    if items.iter().any(|(s, _): &(String, f64)| s == spin.text) {
                        return Err(self.syntax(item.col, format!("offset for {} given twice", spin.text)));
                    }
                    items.push((spin.text.to_string(), hz));
                }
                FrameDecl::Offsets(items)
            }
            [] => return Err(self.syntax(end_col, "frame needs resonant, uncouple <spin> or offsets <list>")),
            [kind, ..] if !matches!(kind.text, "resonant" | "uncouple" | "offsets") => {
                return Err(self.err(kind.col, ParseErrorKind::UnknownKeyword(kind.text.to_string())))
            }
            [kind, ..] => return Err(self.syntax(kind.col, format!("malformed frame {} statement", kind.text))),
        };
        Ok(Statement::Frame(decl))
    }

    fn check_spin(&self, t: Token<'_>) -> Result<(), ParseError> {
        if t.text.is_empty() || !t.text.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(self.syntax(t.col, format!("bad spin name '{}'", t.text)));
        }
        if let Some(sys) = self.sys {
            if sys.index_of(t.text).is_err() {
                return Err(self.err(t.col, ParseErrorKind::UnknownSpin(t.text.to_string())));
            }
        }
        Ok(())
    }

    fn spin_list(&self, t: Token<'_>) -> Result<Vec<(String, usize)>, ParseError> {
        split_commas(t)
            .into_iter()
            .map(|s| {
                self.check_spin(s)?;
                Ok((s.text.to_string(), s.col))
            })
            .collect()
    }

    /// `y90`, `y-90`, `-y90`, `x180`.
    fn angle(&self, t: Token<'_>) -> Result<(PulseAxis, f64), ParseError> {
        let bad = || self.err(t.col, ParseErrorKind::MalformedAngle(t.text.to_string()));
        let (outer, rest) = match t.text.strip_prefix('-') {
            Some(r) => (-1.0, r),
            None => (1.0, t.text.strip_prefix('+').unwrap_or(t.text)),
        };
        let mut chars = rest.chars();
        let axis = match chars.next() {
            Some('x' | 'X') => PulseAxis::X,
            Some('y' | 'Y') => PulseAxis::Y,
            _ => return Err(bad()),
        };
        let number = chars.as_str();
        if number.is_empty() || number.starts_with("--") || number.starts_with("+-") {
            return Err(bad());
        }
        let degrees: f64 = number.parse().map_err(|_| bad())?;
        let degrees = outer * degrees;
        if !degrees.is_finite() || degrees == 0.0 || degrees.abs() > 360.0 {
            return Err(bad());
        }
        Ok((axis, degrees))
    }

    fn expr(&self, t: Token<'_>) -> Result<Expr, ParseError> {
        let mut p = ExprParser { chars: t.text.chars().collect(), pos: 0, col: t.col, line: self };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(self.syntax(p.column(), format!("unexpected '{}'", p.chars[p.pos])));
        }
        Ok(e)
    }

    /// Evaluates `e` when a system is available. Delays may be zero;
    /// acquisition parameters must be positive.
    fn check_duration(&self, e: &Expr, col: usize, allow_zero: bool) -> Result<(), ParseError> {
        let Some(sys) = self.sys else {
            return Ok(());
        };
        let v = evaluate(e, sys).map_err(|msg| self.syntax(col, msg))?;
        if v < 0.0 || (!allow_zero && v == 0.0) {
            return Err(self.err(col, ParseErrorKind::NegativeDelay(v)));
        }
        Ok(())
    }
}

fn split_commas(t: Token<'_>) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut col = t.col;
    for part in t.text.split(',') {
        out.push(Token { text: part, col });
        col += part.chars().count() + 1;
    }
    out
}

struct ExprParser<'l, 'a> {
    chars: Vec<char>,
    pos: usize,
    col: usize,
    line: &'l Line<'a>,
}

impl ExprParser<'_, '_> {
    fn column(&self) -> usize {
        self.col + self.pos
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.line.syntax(self.column(), format!("expected '{c}'")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.product()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(e),
            };
            self.pos += 1;
            e = Expr::binary(op, e, self.product()?);
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(e),
            };
            self.pos += 1;
            e = Expr::binary(op, e, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('J') => {
                self.pos += 1;
                self.expect('[')?;
                let a = self.name()?;
                self.expect(',')?;
                let b = self.name()?;
                self.expect(']')?;
                Ok(Expr::Coupling(a, b))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) => Err(self.line.syntax(self.column(), format!("unexpected '{c}'"))),
            None => Err(self.line.syntax(self.column(), "expression ends early")),
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        let tok = Token { text: &name, col: self.col + start };
        self.line.check_spin(tok)?;
        Ok(name)
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.chars.len() && p.chars[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            digits(self);
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Expr::Num)
            .map_err(|_| self.line.syntax(self.col + start, format!("bad number '{text}'")))
    }
}

/// Value of an expression; couplings in Hz.
pub fn evaluate(e: &Expr, sys: &SpinSystem) -> Result<f64, String> {
    let v = match e {
        Expr::Num(v) => *v,
        Expr::Coupling(a, b) => {
            let i = sys.index_of(a).map_err(|_| format!("unknown spin {a}"))?;
            let j = sys.index_of(b).map_err(|_| format!("unknown spin {b}"))?;
            if i == j {
                return Err(format!("J[{a},{b}] couples a spin to itself"));
            }
            sys.coupling_hz(i, j)
        }
        Expr::Neg(x) => -evaluate(x, sys)?,
        Expr::Binary(op, l, r) => {
            let (l, r) = (evaluate(l, sys)?, evaluate(r, sys)?);
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err("division by zero".into());
                    }
                    l / r
                }
            }
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expression is not finite ({v})"))
    }
}
