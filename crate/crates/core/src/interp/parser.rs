use super::ast::{BinOp, Expr, Stmt, Target, UnOp};
use super::lexer::{tokenize, Tok};
use super::InterpError;

const KEYWORDS: &[&str] = &["if", "elseif", "else", "end", "while", "for", "break", "continue", "return", "function"];

pub(crate) struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    // Nesting depth of `(...)` argument lists; `end` there means "last index".
    arg_depth: usize,
}

fn syntax(msg: impl Into<String>) -> InterpError {
    InterpError::Syntax(msg.into())
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, InterpError> {
        Ok(Self { toks: tokenize(src)?, pos: 0, arg_depth: 0 })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<(), InterpError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(syntax(format!("expected {tok:?}, found {}", self.describe())))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            None => "end of line".to_string(),
            Some(t) => format!("{t:?}"),
        }
    }

    fn peek_keyword(&self) -> Option<&str> {
        match self.peek() {
            Some(Tok::Ident(s)) if KEYWORDS.contains(&s.as_str()) => Some(s.as_str()),
            _ => None,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Some(Tok::Comma | Tok::Semi | Tok::Newline)) {
            self.pos += 1;
        }
    }

    /// Parses a whole statement sequence. With `allow_closing_end`, one
    /// unmatched top-level `end` (a function file's closing `end`) is accepted
    /// as long as nothing but separators follows it.
    pub(crate) fn parse_program(&mut self, allow_closing_end: bool) -> Result<Vec<Stmt>, InterpError> {
        let mut stmts = Vec::new();
        loop {
            self.skip_separators();
            if self.at_end() {
                return Ok(stmts);
            }
            if let Some(kw) = self.peek_keyword() {
                if kw == "end" && allow_closing_end {
                    self.bump();
                    self.skip_separators();
                    if !self.at_end() {
                        return Err(syntax("statements after the closing `end`"));
                    }
                    return Ok(stmts);
                }
                if matches!(kw, "end" | "else" | "elseif") {
                    return Err(syntax(format!("unexpected `{kw}`")));
                }
            }
            stmts.push(self.parse_statement()?);
        }
    }

    fn parse_block(&mut self, terminators: &[&str]) -> Result<Vec<Stmt>, InterpError> {
        let mut stmts = Vec::new();
        loop {
            self.skip_separators();
            if self.at_end() {
                return Err(syntax("missing `end`"));
            }
            if let Some(kw) = self.peek_keyword() {
                if terminators.contains(&kw) {
                    return Ok(stmts);
                }
            }
            stmts.push(self.parse_statement()?);
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), InterpError> {
        if self.peek_keyword() == Some(kw) {
            self.bump();
            Ok(())
        } else {
            Err(syntax(format!("expected `{kw}`, found {}", self.describe())))
        }
    }

    fn parse_statement(&mut self) -> Result<Stmt, InterpError> {
        match self.peek_keyword() {
            Some("if") => return self.parse_if(),
            Some("while") => {
                self.bump();
                let cond = self.parse_expr()?;
                let body = self.parse_block(&["end"])?;
                self.expect_keyword("end")?;
                return Ok(Stmt::While(cond, body));
            }
            Some("for") => {
                self.bump();
                let var = match self.bump() {
                    Some(Tok::Ident(v)) => v,
                    _ => return Err(syntax("expected a loop variable after `for`")),
                };
                self.expect(&Tok::Assign)?;
                let iter = self.parse_expr()?;
                let body = self.parse_block(&["end"])?;
                self.expect_keyword("end")?;
                return Ok(Stmt::For(var, iter, body));
            }
            Some("break") => {
                self.bump();
                return Ok(Stmt::Break);
            }
            Some("continue") => {
                self.bump();
                return Ok(Stmt::Continue);
            }
            Some("return") => {
                self.bump();
                return Ok(Stmt::Return);
            }
            Some(kw) => return Err(syntax(format!("unexpected `{kw}`"))),
            None => {}
        }

        let lhs = self.parse_expr()?;
        if self.eat(&Tok::Assign) {
            let rhs = self.parse_expr()?;
            let stmt = match lhs {
                Expr::Ident(name) => Stmt::Assign(Target::Var(name), rhs),
                Expr::Call(name, mut args) if args.len() == 1 => {
                    Stmt::Assign(Target::Index(name, Box::new(args.remove(0))), rhs)
                }
                Expr::Matrix(rows) if rows.len() == 1 => {
                    let targets = rows
                        .into_iter()
                        .next()
                        .unwrap()
                        .into_iter()
                        .map(|e| match e {
                            Expr::Ident(n) => Ok(Some(n)),
                            Expr::Placeholder => Ok(None),
                            _ => Err(syntax("output list may only hold names and `~`")),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Stmt::MultiAssign(targets, rhs)
                }
                _ => return Err(syntax("invalid assignment target")),
            };
            self.end_of_statement()?;
            return Ok(stmt);
        }
        self.end_of_statement()?;
        // `answer('fmt', ...)` is shorthand for `answer = sprintf('fmt', ...)`.
        Ok(match lhs {
            Expr::Call(name, args) if name == "answer" => {
                Stmt::Assign(Target::Var("answer".to_string()), Expr::Call("sprintf".to_string(), args))
            }
            e => Stmt::Expr(e),
        })
    }

    fn end_of_statement(&mut self) -> Result<(), InterpError> {
        match self.peek() {
            None | Some(Tok::Comma | Tok::Semi | Tok::Newline) => Ok(()),
            Some(Tok::Ident(s)) if KEYWORDS.contains(&s.as_str()) => Ok(()),
            _ => Err(syntax(format!("unexpected {} after statement", self.describe()))),
        }
    }

    fn parse_if(&mut self) -> Result<Stmt, InterpError> {
        self.bump();
        let mut branches = Vec::new();
        let cond = self.parse_expr()?;
        let body = self.parse_block(&["elseif", "else", "end"])?;
        branches.push((cond, body));
        let mut otherwise = None;
        loop {
            match self.peek_keyword() {
                Some("elseif") => {
                    self.bump();
                    let cond = self.parse_expr()?;
                    let body = self.parse_block(&["elseif", "else", "end"])?;
                    branches.push((cond, body));
                }
                Some("else") => {
                    self.bump();
                    otherwise = Some(self.parse_block(&["end"])?);
                }
                Some("end") => {
                    self.bump();
                    return Ok(Stmt::If(branches, otherwise));
                }
                _ => return Err(syntax("missing `end` for `if`")),
            }
        }
    }

    pub(crate) fn parse_expr(&mut self) -> Result<Expr, InterpError> {
        self.parse_oror()
    }

    fn parse_binary_level(
        &mut self,
        next: fn(&mut Self) -> Result<Expr, InterpError>,
        ops: &[(Tok, BinOp)],
    ) -> Result<Expr, InterpError> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (tok, op) in ops {
                if self.peek() == Some(tok) {
                    self.bump();
                    let rhs = next(self)?;
                    lhs = Expr::Binary(*op, Box::new(lhs), Box::new(rhs));
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn parse_oror(&mut self) -> Result<Expr, InterpError> {
        self.parse_binary_level(Self::parse_andand, &[(Tok::OrOr, BinOp::OrOr)])
    }

    fn parse_andand(&mut self) -> Result<Expr, InterpError> {
        self.parse_binary_level(Self::parse_or, &[(Tok::AndAnd, BinOp::AndAnd)])
    }

    fn parse_or(&mut self) -> Result<Expr, InterpError> {
        self.parse_binary_level(Self::parse_and, &[(Tok::Or, BinOp::Or)])
    }

    fn parse_and(&mut self) -> Result<Expr, InterpError> {
        self.parse_binary_level(Self::parse_cmp, &[(Tok::And, BinOp::And)])
    }

    fn parse_cmp(&mut self) -> Result<Expr, InterpError> {
        self.parse_binary_level(
            Self::parse_range,
            &[
                (Tok::Eq, BinOp::Eq),
                (Tok::Ne, BinOp::Ne),
                (Tok::Le, BinOp::Le),
                (Tok::Ge, BinOp::Ge),
                (Tok::Lt, BinOp::Lt),
                (Tok::Gt, BinOp::Gt),
            ],
        )
    }

    fn parse_range(&mut self) -> Result<Expr, InterpError> {
        let first = self.parse_additive()?;
        if !self.eat(&Tok::Colon) {
            return Ok(first);
        }
        let second = self.parse_additive()?;
        if self.eat(&Tok::Colon) {
            let third = self.parse_additive()?;
            Ok(Expr::Range(Box::new(first), Some(Box::new(second)), Box::new(third)))
        } else {
            Ok(Expr::Range(Box::new(first), None, Box::new(second)))
        }
    }

    fn parse_additive(&mut self) -> Result<Expr, InterpError> {
        self.parse_binary_level(Self::parse_mult, &[(Tok::Plus, BinOp::Add), (Tok::Minus, BinOp::Sub)])
    }

    fn parse_mult(&mut self) -> Result<Expr, InterpError> {
        self.parse_binary_level(
            Self::parse_unary,
            &[
                (Tok::Star, BinOp::MatMul),
                (Tok::Slash, BinOp::Div),
                (Tok::DotStar, BinOp::ElemMul),
                (Tok::DotSlash, BinOp::ElemDiv),
            ],
        )
    }

    fn parse_unary(&mut self) -> Result<Expr, InterpError> {
        let op = match self.peek() {
            Some(Tok::Minus) => UnOp::Neg,
            Some(Tok::Plus) => UnOp::Plus,
            Some(Tok::Not) => UnOp::Not,
            _ => return self.parse_power(),
        };
        self.bump();
        let operand = self.parse_unary()?;
        Ok(Expr::Unary(op, Box::new(operand)))
    }

    fn parse_power(&mut self) -> Result<Expr, InterpError> {
        let mut base = self.parse_postfix()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Caret) => BinOp::Pow,
                Some(Tok::DotCaret) => BinOp::ElemPow,
                _ => return Ok(base),
            };
            self.bump();
            let exponent = self.parse_power_operand()?;
            base = Expr::Binary(op, Box::new(base), Box::new(exponent));
        }
    }

    fn parse_power_operand(&mut self) -> Result<Expr, InterpError> {
        let op = match self.peek() {
            Some(Tok::Minus) => UnOp::Neg,
            Some(Tok::Plus) => UnOp::Plus,
            Some(Tok::Not) => UnOp::Not,
            _ => return self.parse_postfix(),
        };
        self.bump();
        Ok(Expr::Unary(op, Box::new(self.parse_power_operand()?)))
    }

    fn parse_postfix(&mut self) -> Result<Expr, InterpError> {
        let mut e = self.parse_primary()?;
        while self.eat(&Tok::Transpose) {
            e = Expr::Transpose(Box::new(e));
        }
        Ok(e)
    }

    fn parse_args(&mut self) -> Result<Vec<Expr>, InterpError> {
        self.arg_depth += 1;
        let args = self.parse_args_inner();
        self.arg_depth -= 1;
        args
    }

    fn parse_args_inner(&mut self) -> Result<Vec<Expr>, InterpError> {
        let mut args = Vec::new();
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if self.eat(&Tok::RParen) {
                return Ok(args);
            }
            self.expect(&Tok::Comma)?;
        }
    }

    fn parse_primary(&mut self) -> Result<Expr, InterpError> {
        match self.bump() {
            Some(Tok::Num(n)) => Ok(Expr::Num(n)),
            Some(Tok::Str(s)) => Ok(Expr::Str(s)),
            Some(Tok::Ident(name)) => {
                if name == "end" && self.arg_depth > 0 {
                    return Ok(Expr::Ident(name));
                }
                if KEYWORDS.contains(&name.as_str()) {
                    return Err(syntax(format!("unexpected `{name}` in expression")));
                }
                if self.eat(&Tok::LParen) {
                    let args = self.parse_args()?;
                    Ok(Expr::Call(name, args))
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::LBracket) => self.parse_matrix(),
            Some(t) => Err(syntax(format!("unexpected {t:?} in expression"))),
            None => Err(syntax("unexpected end of line in expression")),
        }
    }

    fn parse_matrix(&mut self) -> Result<Expr, InterpError> {
        let mut rows: Vec<Vec<Expr>> = vec![Vec::new()];
        loop {
            match self.peek() {
                Some(Tok::RBracket) => {
                    self.bump();
                    break;
                }
                Some(Tok::Comma) => {
                    self.bump();
                }
                Some(Tok::Semi | Tok::Newline) => {
                    self.bump();
                    if !rows.last().unwrap().is_empty() {
                        rows.push(Vec::new());
                    }
                }
                Some(Tok::Not) if matches!(self.peek_at(1), Some(Tok::Comma | Tok::RBracket)) => {
                    self.bump();
                    rows.last_mut().unwrap().push(Expr::Placeholder);
                }
                None => return Err(syntax("missing `]`")),
                _ => {
                    let e = self.parse_expr()?;
                    rows.last_mut().unwrap().push(e);
                }
            }
        }
        if rows.last().is_some_and(Vec::is_empty) && rows.len() > 1 {
            rows.pop();
        }
        Ok(Expr::Matrix(rows))
    }
}

pub(crate) fn parse_statements(src: &str) -> Result<Vec<Stmt>, InterpError> {
    Parser::new(src)?.parse_program(false)
}

pub(crate) fn parse_expression(src: &str) -> Result<Expr, InterpError> {
    let mut p = Parser::new(src)?;
    let e = p.parse_expr()?;
    if !p.at_end() {
        return Err(syntax(format!("unexpected {} after expression", p.describe())));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn answer_command_is_rewritten() {
        let stmts = parse_statements("answer('$%d$',c);").unwrap();
        assert_eq!(
            stmts,
            vec![Stmt::Assign(
                Target::Var("answer".into()),
                Expr::Call("sprintf".into(), vec![Expr::Str("$%d$".into()), Expr::Ident("c".into())])
            )]
        );
    }

    #[test]
    fn single_line_control_flow() {
        let stmts = parse_statements("if ~b, x=x+1; end").unwrap();
        assert!(matches!(&stmts[0], Stmt::If(branches, None) if branches.len() == 1));
        let stmts = parse_statements("for i=1:3, for j=1:2, s=s+i*j; end; end").unwrap();
        assert!(matches!(&stmts[0], Stmt::For(v, _, body) if v == "i" && body.len() == 1));
        let stmts = parse_statements("while a==b, b=1+randi(7); end").unwrap();
        assert!(matches!(&stmts[0], Stmt::While(..)));
    }

    #[test]
    fn multi_output_with_placeholder() {
        let stmts = parse_statements("[~,r]=DART(fh,g,p);").unwrap();
        assert!(matches!(&stmts[0], Stmt::MultiAssign(t, _) if t == &vec![None, Some("r".into())]));
    }

    #[test]
    fn precedence() {
        // -2^2 is -(2^2)
        let e = parse_expression("-2^2").unwrap();
        assert!(matches!(e, Expr::Unary(UnOp::Neg, _)));
        // 2^-1 parses
        parse_expression("2^-1").unwrap();
        // range binds looser than arithmetic
        let e = parse_expression("1:n-1").unwrap();
        assert!(matches!(e, Expr::Range(_, None, _)));
    }

    #[test]
    fn errors() {
        assert!(parse_statements("if a, b=1;").is_err());
        assert!(parse_statements("x = ;").is_err());
        assert!(parse_statements("1 = x;").is_err());
        assert!(parse_statements("end").is_err());
    }
}
