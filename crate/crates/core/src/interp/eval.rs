use std::sync::Arc;

use super::ast::{BinOp, Expr, Stmt, Target, UnOp};
use super::builtins::{call_builtin, is_builtin};
use super::env::Environment;
use super::functions::FunctionDef;
use super::parser::{parse_expression, parse_statements};
use super::value::{broadcast, compare, mat_mul, transpose, Value};
use super::{InterpError, LOOP_BUDGET, MAX_CALL_DEPTH};
use crate::rng::RandomStream;

/// An error raised by one line of a statement list.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {}: {source}", .index + 1)]
pub struct LineError {
    /// 0-based position of the failing line in the input slice.
    pub index: usize,
    pub source: InterpError,
}

enum Flow {
    Normal,
    Break,
    Continue,
    Return,
}

struct Machine<'r> {
    rng: &'r mut RandomStream,
    depth: usize,
    // Lengths of the values currently being indexed, for `end`.
    end_stack: Vec<usize>,
}

/// Runs each line as one or more statements, in order.
pub fn execute_statements<S: AsRef<str>>(
    lines: &[S],
    env: &mut Environment,
    rng: &mut RandomStream,
) -> Result<(), LineError> {
    for (index, line) in lines.iter().enumerate() {
        execute_line(line.as_ref(), env, rng).map_err(|source| LineError { index, source })?;
    }
    Ok(())
}

pub fn execute_line(line: &str, env: &mut Environment, rng: &mut RandomStream) -> Result<(), InterpError> {
    let stmts = parse_statements(line)?;
    let mut m = Machine { rng, depth: 0, end_stack: Vec::new() };
    match m.exec_block(&stmts, env)? {
        Flow::Normal | Flow::Return => Ok(()),
        Flow::Break | Flow::Continue => Err(InterpError::Syntax("`break` or `continue` outside a loop".into())),
    }
}

pub fn eval_expr(expr: &str, env: &Environment, rng: &mut RandomStream) -> Result<Value, InterpError> {
    let e = parse_expression(expr)?;
    Machine { rng, depth: 0, end_stack: Vec::new() }.eval(&e, env)
}

/// Calls a builtin or user function and returns its first `nargout` outputs.
pub fn call_function(
    name: &str,
    args: &[Value],
    nargout: usize,
    env: &Environment,
    rng: &mut RandomStream,
) -> Result<Vec<Value>, InterpError> {
    Machine { rng, depth: 0, end_stack: Vec::new() }.call(name, args, nargout, env)
}

fn range_values(start: f64, step: f64, stop: f64) -> Vec<f64> {
    if step == 0.0 || !start.is_finite() || !stop.is_finite() || !step.is_finite() {
        return Vec::new();
    }
    let span = (stop - start) / step;
    if span < -1e-10 {
        return Vec::new();
    }
    let count = (span + 1e-10).floor() as usize + 1;
    (0..count).map(|i| start + i as f64 * step).collect()
}

fn index_of(name: &str, x: f64, len: usize) -> Result<usize, InterpError> {
    if x.fract() != 0.0 || x < 1.0 || x as usize > len {
        return Err(InterpError::IndexOutOfRange { name: name.to_string(), index: x.to_string(), len });
    }
    Ok(x as usize - 1)
}

fn logical(op: BinOp, a: &Value, b: &Value) -> Result<Value, InterpError> {
    let f = |x: f64, y: f64| {
        let (p, q) = (x != 0.0 && !x.is_nan(), y != 0.0 && !y.is_nan());
        f64::from(u8::from(if op == BinOp::And { p && q } else { p || q }))
    };
    Ok(match broadcast(op.symbol(), a, b, f)? {
        Value::Num(x) => Value::Bool(x != 0.0),
        v => v,
    })
}

impl Machine<'_> {
    fn exec_block(&mut self, stmts: &[Stmt], env: &mut Environment) -> Result<Flow, InterpError> {
        for s in stmts {
            match self.exec(s, env)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn exec(&mut self, stmt: &Stmt, env: &mut Environment) -> Result<Flow, InterpError> {
        match stmt {
            Stmt::Assign(Target::Var(name), e) => {
                let v = self.eval(e, env)?;
                env.set(name.clone(), v);
            }
            Stmt::Assign(Target::Index(name, idx), e) => {
                let v = self.eval(e, env)?.scalar()?;
                let current = env.get(name).cloned();
                let len = current.as_ref().map_or(0, Value::len);
                self.end_stack.push(len);
                let i = self.eval(idx, env);
                self.end_stack.pop();
                let i = i?.scalar()?;
                if i.fract() != 0.0 || i < 1.0 {
                    return Err(InterpError::IndexOutOfRange { name: name.clone(), index: i.to_string(), len });
                }
                let (mut data, column) = match current {
                    None => (Vec::new(), false),
                    Some(Value::Str(_)) => {
                        return Err(InterpError::TypeError(format!("cannot assign a number into string `{name}`")))
                    }
                    Some(other) => (other.numbers()?, other.is_column()),
                };
                let i = i as usize;
                if data.len() < i {
                    data.resize(i, 0.0);
                }
                data[i - 1] = v;
                env.set(name.clone(), Value::vector(data, column));
            }
            Stmt::MultiAssign(targets, e) => {
                let outs = match e {
                    Expr::Call(name, args) if env.get(name).is_none() => {
                        let args = args.iter().map(|a| self.eval(a, env)).collect::<Result<Vec<_>, _>>()?;
                        self.call(name, &args, targets.len(), env)?
                    }
                    Expr::Ident(name) if env.get(name).is_none() => self.call(name, &[], targets.len(), env)?,
                    other => vec![self.eval(other, env)?],
                };
                if outs.len() < targets.len() {
                    return Err(InterpError::TypeError(format!(
                        "{} output(s) requested but only {} produced",
                        targets.len(),
                        outs.len()
                    )));
                }
                for (t, v) in targets.iter().zip(outs) {
                    if let Some(name) = t {
                        env.set(name.clone(), v);
                    }
                }
            }
            Stmt::Expr(e) => {
                // A bare call may legitimately return nothing.
                match e {
                    Expr::Call(name, args) if env.get(name).is_none() => {
                        let args = args.iter().map(|a| self.eval(a, env)).collect::<Result<Vec<_>, _>>()?;
                        self.call(name, &args, 0, env)?;
                    }
                    Expr::Ident(name) if env.get(name).is_none() => {
                        self.call(name, &[], 0, env)?;
                    }
                    other => {
                        self.eval(other, env)?;
                    }
                }
            }
            Stmt::If(branches, otherwise) => {
                for (cond, body) in branches {
                    if self.eval(cond, env)?.truthy() {
                        return self.exec_block(body, env);
                    }
                }
                if let Some(body) = otherwise {
                    return self.exec_block(body, env);
                }
            }
            Stmt::While(cond, body) => {
                let mut iterations: u64 = 0;
                while self.eval(cond, env)?.truthy() {
                    iterations += 1;
                    if iterations > LOOP_BUDGET {
                        return Err(InterpError::LoopBudgetExceeded);
                    }
                    match self.exec_block(body, env)? {
                        Flow::Break => break,
                        Flow::Return => return Ok(Flow::Return),
                        Flow::Normal | Flow::Continue => {}
                    }
                }
            }
            Stmt::For(var, iter, body) => {
                let items: Vec<Value> = match iter {
                    Expr::Range(start, step, stop) => {
                        let (a, s, b) = self.range_parts(start, step.as_deref(), stop, env)?;
                        range_values(a, s, b).into_iter().map(Value::Num).collect()
                    }
                    other => match self.eval(other, env)? {
                        Value::Vec { data, .. } => data.into_iter().map(Value::Num).collect(),
                        Value::Str(s) => s.chars().map(|c| Value::Str(c.to_string())).collect(),
                        v => vec![v],
                    },
                };
                for item in items {
                    env.set(var.clone(), item);
                    match self.exec_block(body, env)? {
                        Flow::Break => break,
                        Flow::Return => return Ok(Flow::Return),
                        Flow::Normal | Flow::Continue => {}
                    }
                }
            }
            Stmt::Break => return Ok(Flow::Break),
            Stmt::Continue => return Ok(Flow::Continue),
            Stmt::Return => return Ok(Flow::Return),
        }
        Ok(Flow::Normal)
    }

    fn range_parts(
        &mut self,
        start: &Expr,
        step: Option<&Expr>,
        stop: &Expr,
        env: &Environment,
    ) -> Result<(f64, f64, f64), InterpError> {
        let a = self.eval(start, env)?.scalar()?;
        let s = match step {
            Some(s) => self.eval(s, env)?.scalar()?,
            None => 1.0,
        };
        let b = self.eval(stop, env)?.scalar()?;
        Ok((a, s, b))
    }

    fn eval(&mut self, e: &Expr, env: &Environment) -> Result<Value, InterpError> {
        match e {
            Expr::Num(x) => Ok(Value::Num(*x)),
            Expr::Str(s) => Ok(Value::Str(s.clone())),
            Expr::Ident(name) => {
                if let Some(v) = env.get(name) {
                    return Ok(v.clone());
                }
                if name == "end" {
                    if let Some(&len) = self.end_stack.last() {
                        return Ok(Value::Num(len as f64));
                    }
                }
                if is_builtin(name) || env.functions().get(name).is_some() {
                    return self.call_one(name, &[], env);
                }
                Err(InterpError::UndefinedVariable(name.clone()))
            }
            Expr::Call(name, args) => {
                if let Some(v) = env.get(name) {
                    return self.index(name, v, args, env);
                }
                let args = args.iter().map(|a| self.eval(a, env)).collect::<Result<Vec<_>, _>>()?;
                self.call_one(name, &args, env)
            }
            Expr::Matrix(rows) => self.matrix(rows, env),
            Expr::Unary(op, inner) => {
                let v = self.eval(inner, env)?;
                match op {
                    UnOp::Plus => {
                        v.numbers()?;
                        Ok(v)
                    }
                    UnOp::Neg => match v {
                        Value::Vec { data, column } => {
                            Ok(Value::Vec { data: data.iter().map(|x| -x).collect(), column })
                        }
                        other => Ok(Value::Num(-other.scalar()?)),
                    },
                    UnOp::Not => match v {
                        Value::Vec { data, column } => Ok(Value::Vec {
                            data: data.iter().map(|x| f64::from(u8::from(*x == 0.0))).collect(),
                            column,
                        }),
                        other => Ok(Value::Bool(!other.truthy())),
                    },
                }
            }
            Expr::Binary(op, a, b) => self.binary(*op, a, b, env),
            Expr::Range(start, step, stop) => {
                let (a, s, b) = self.range_parts(start, step.as_deref(), stop, env)?;
                let data = range_values(a, s, b);
                if data.is_empty() {
                    return Err(InterpError::EmptyVector(format!("{a}:{s}:{b}")));
                }
                Ok(Value::vector(data, false))
            }
            Expr::Transpose(inner) => Ok(transpose(self.eval(inner, env)?)),
            Expr::Placeholder => Err(InterpError::Syntax("`~` is only allowed in an output list".into())),
        }
    }

    fn binary(&mut self, op: BinOp, a: &Expr, b: &Expr, env: &Environment) -> Result<Value, InterpError> {
        if matches!(op, BinOp::AndAnd | BinOp::OrOr) {
            let lhs = self.eval(a, env)?.truthy();
            let short = if op == BinOp::AndAnd { !lhs } else { lhs };
            if short {
                return Ok(Value::Bool(lhs));
            }
            return Ok(Value::Bool(self.eval(b, env)?.truthy()));
        }
        let x = self.eval(a, env)?;
        let y = self.eval(b, env)?;
        let sym = op.symbol();
        match op {
            BinOp::Add => broadcast(sym, &x, &y, |p, q| p + q),
            BinOp::Sub => broadcast(sym, &x, &y, |p, q| p - q),
            BinOp::ElemMul => broadcast(sym, &x, &y, |p, q| p * q),
            BinOp::ElemDiv => broadcast(sym, &x, &y, |p, q| p / q),
            BinOp::ElemPow => broadcast(sym, &x, &y, f64::powf),
            BinOp::MatMul => mat_mul(&x, &y),
            BinOp::Div => {
                if matches!(y, Value::Vec { .. }) {
                    return Err(InterpError::TypeError("division by a vector; use `./`".into()));
                }
                broadcast(sym, &x, &y, |p, q| p / q)
            }
            BinOp::Pow => {
                if matches!(x, Value::Vec { .. }) || matches!(y, Value::Vec { .. }) {
                    return Err(InterpError::TypeError("`^` needs scalars; use `.^`".into()));
                }
                Ok(Value::Num(x.scalar()?.powf(y.scalar()?)))
            }
            BinOp::Eq => compare("==", &x, &y, |p, q| p == q),
            BinOp::Ne => compare("~=", &x, &y, |p, q| p != q),
            BinOp::Lt => compare(sym, &x, &y, |p, q| p < q),
            BinOp::Le => compare(sym, &x, &y, |p, q| p <= q),
            BinOp::Gt => compare(sym, &x, &y, |p, q| p > q),
            BinOp::Ge => compare(sym, &x, &y, |p, q| p >= q),
            BinOp::And | BinOp::Or => logical(op, &x, &y),
            BinOp::AndAnd | BinOp::OrOr => unreachable!("handled above"),
        }
    }

    fn index(&mut self, name: &str, v: &Value, args: &[Expr], env: &Environment) -> Result<Value, InterpError> {
        let idx = match args {
            [i] => i,
            [r, c] => {
                // `v(1,k)` on a row or `v(k,1)` on a column.
                self.end_stack.push(1);
                let r_val = self.eval(r, env);
                self.end_stack.pop();
                if r_val?.scalar()? == 1.0 && !v.is_column() {
                    c
                } else {
                    return Err(InterpError::TypeError(format!("`{name}` is a vector; use a single index")));
                }
            }
            _ => return Err(InterpError::TypeError(format!("`{name}` is a vector; use a single index"))),
        };
        let len = v.len();
        self.end_stack.push(len);
        let i = self.eval(idx, env);
        self.end_stack.pop();
        let positions: Vec<usize> =
            i?.numbers()?.into_iter().map(|x| index_of(name, x, len)).collect::<Result<_, _>>()?;
        match v {
            Value::Str(s) => {
                let chars: Vec<char> = s.chars().collect();
                Ok(Value::Str(positions.iter().map(|&p| chars[p]).collect()))
            }
            Value::Vec { data, column } => Ok(Value::vector(positions.iter().map(|&p| data[p]).collect(), *column)),
            scalar => {
                let x = scalar.clone();
                Ok(if positions.len() == 1 {
                    x
                } else {
                    Value::row(positions.iter().map(|_| x.scalar().unwrap_or(0.0)).collect())
                })
            }
        }
    }

    fn matrix(&mut self, rows: &[Vec<Expr>], env: &Environment) -> Result<Value, InterpError> {
        let mut row_values = Vec::new();
        for row in rows {
            let vals = row.iter().map(|e| self.eval(e, env)).collect::<Result<Vec<_>, _>>()?;
            if vals.is_empty() {
                continue;
            }
            if vals.iter().any(|v| matches!(v, Value::Str(_))) {
                let mut s = String::new();
                for v in &vals {
                    match v {
                        Value::Str(t) => s.push_str(t),
                        _ => return Err(InterpError::TypeError("cannot concatenate numbers with strings".into())),
                    }
                }
                row_values.push(Value::Str(s));
                continue;
            }
            let mut data = Vec::new();
            for v in &vals {
                if v.is_column() {
                    return Err(InterpError::TypeError("cannot place a column vector in a row".into()));
                }
                data.extend(v.numbers()?);
            }
            row_values.push(Value::vector(data, false));
        }
        match row_values.len() {
            0 => Err(InterpError::EmptyVector("[]".into())),
            1 => Ok(row_values.pop().unwrap()),
            _ => {
                let mut data = Vec::new();
                for v in &row_values {
                    if matches!(v, Value::Str(_)) || (matches!(v, Value::Vec { .. }) && !v.is_column()) {
                        return Err(InterpError::TypeError("matrices are not supported; only vectors".into()));
                    }
                    data.extend(v.numbers()?);
                }
                Ok(Value::vector(data, true))
            }
        }
    }

    fn call_one(&mut self, name: &str, args: &[Value], env: &Environment) -> Result<Value, InterpError> {
        self.call(name, args, 1, env)?
            .into_iter()
            .next()
            .ok_or_else(|| InterpError::TypeError(format!("`{name}` returns no value")))
    }

    fn call(
        &mut self,
        name: &str,
        args: &[Value],
        nargout: usize,
        env: &Environment,
    ) -> Result<Vec<Value>, InterpError> {
        if name == "exist" {
            let [Value::Str(target)] = args else {
                return Err(InterpError::TypeError("`exist` needs a name string".into()));
            };
            let code = if env.get(target).is_some() {
                1.0
            } else if env.functions().get(target).is_some() {
                2.0
            } else if is_builtin(target) {
                5.0
            } else {
                0.0
            };
            return Ok(vec![Value::Num(code)]);
        }
        if let Some(def) = env.functions().get(name) {
            return self.call_user(&def, args, nargout, env);
        }
        match call_builtin(name, args, nargout, self.rng) {
            Some(result) => result,
            None => Err(InterpError::UndefinedFunction(name.to_string())),
        }
    }

    fn call_user(
        &mut self,
        def: &Arc<FunctionDef>,
        args: &[Value],
        nargout: usize,
        env: &Environment,
    ) -> Result<Vec<Value>, InterpError> {
        if args.len() > def.input_names.len() {
            return Err(InterpError::BadArity {
                name: def.name.clone(),
                expected: format!("at most {}", def.input_names.len()),
                got: args.len(),
            });
        }
        if self.depth >= MAX_CALL_DEPTH {
            return Err(InterpError::RecursionLimit);
        }
        let mut local = Environment::new(Arc::clone(&env.functions));
        for (name, v) in def.input_names.iter().zip(args) {
            local.set(name.clone(), v.clone());
        }
        self.depth += 1;
        let saved_ends = std::mem::take(&mut self.end_stack);
        let result = self.exec_block(&def.body, &mut local);
        self.end_stack = saved_ends;
        self.depth -= 1;
        match result? {
            Flow::Normal | Flow::Return => {}
            Flow::Break | Flow::Continue => {
                return Err(InterpError::Syntax("`break` or `continue` outside a loop".into()))
            }
        }
        let wanted = nargout.min(def.output_names.len());
        let wanted = if nargout == 0 { 0 } else { wanted.max(1).min(def.output_names.len()) };
        def.output_names[..wanted]
            .iter()
            .map(|o| {
                local
                    .vars
                    .remove(o)
                    .ok_or_else(|| InterpError::MissingOutput { function: def.name.clone(), output: o.clone() })
            })
            .collect()
    }
}
