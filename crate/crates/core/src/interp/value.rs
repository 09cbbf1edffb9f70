use std::fmt;

use super::InterpError;
use crate::expand::render_number;

/// A runtime value.
///
/// Vectors are never empty and are rows unless `column` is set. Booleans only
/// come out of comparisons and logical operators; numeric contexts read them
/// as 0/1.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Vec { data: Vec<f64>, column: bool },
    Str(String),
    Bool(bool),
}

impl Value {
    pub fn row(data: Vec<f64>) -> Value {
        Value::vector(data, false)
    }

    /// Builds a vector, collapsing a single element to a scalar.
    pub fn vector(data: Vec<f64>, column: bool) -> Value {
        if data.len() == 1 {
            Value::Num(data[0])
        } else {
            Value::Vec { data, column }
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Num(_) => "number",
            Value::Vec { .. } => "vector",
            Value::Str(_) => "string",
            Value::Bool(_) => "boolean",
        }
    }

    /// Numeric elements, with booleans read as 0/1. Strings are a type error.
    pub fn numbers(&self) -> Result<Vec<f64>, InterpError> {
        match self {
            Value::Num(x) => Ok(vec![*x]),
            Value::Bool(b) => Ok(vec![f64::from(u8::from(*b))]),
            Value::Vec { data, .. } => Ok(data.clone()),
            Value::Str(_) => Err(InterpError::TypeError("a string cannot be used as a number".to_string())),
        }
    }

    pub fn scalar(&self) -> Result<f64, InterpError> {
        match self {
            Value::Num(x) => Ok(*x),
            Value::Bool(b) => Ok(f64::from(u8::from(*b))),
            other => Err(InterpError::TypeError(format!("expected a scalar, found a {}", other.type_name()))),
        }
    }

    pub fn is_column(&self) -> bool {
        matches!(self, Value::Vec { column: true, .. })
    }

    pub fn len(&self) -> usize {
        match self {
            Value::Vec { data, .. } => data.len(),
            Value::Str(s) => s.chars().count(),
            _ => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Truth value used by `if`, `while`, `&&` and `||`.
    pub fn truthy(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            Value::Num(x) => *x != 0.0 && !x.is_nan(),
            Value::Vec { data, .. } => data.iter().all(|x| *x != 0.0 && !x.is_nan()),
            Value::Str(s) => !s.is_empty(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) => f.write_str(&render_scalar(*x)),
            Value::Bool(b) => write!(f, "{}", u8::from(*b)),
            Value::Str(s) => f.write_str(s),
            Value::Vec { data, .. } => {
                let parts: Vec<String> = data.iter().map(|x| render_scalar(*x)).collect();
                f.write_str(&parts.join(" "))
            }
        }
    }
}

pub(crate) fn render_scalar(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "Inf" } else { "-Inf" }.to_string()
    } else {
        render_number(x)
    }
}

fn shape_error(op: &str, a: &Value, b: &Value) -> InterpError {
    InterpError::TypeError(format!(
        "`{op}` needs matching vector sizes (got {} of length {} and {} of length {})",
        a.type_name(),
        a.len(),
        b.type_name(),
        b.len()
    ))
}

/// Elementwise combination with scalar broadcast.
pub(crate) fn broadcast(op: &str, a: &Value, b: &Value, f: impl Fn(f64, f64) -> f64) -> Result<Value, InterpError> {
    let (xs, ys) = (a.numbers()?, b.numbers()?);
    let a_scalar = !matches!(a, Value::Vec { .. });
    let b_scalar = !matches!(b, Value::Vec { .. });
    match (a_scalar, b_scalar) {
        (true, true) => Ok(Value::Num(f(xs[0], ys[0]))),
        (true, false) => Ok(Value::vector(ys.iter().map(|y| f(xs[0], *y)).collect(), b.is_column())),
        (false, true) => Ok(Value::vector(xs.iter().map(|x| f(*x, ys[0])).collect(), a.is_column())),
        (false, false) => {
            if xs.len() != ys.len() || a.is_column() != b.is_column() {
                return Err(shape_error(op, a, b));
            }
            Ok(Value::vector(xs.iter().zip(&ys).map(|(x, y)| f(*x, *y)).collect(), a.is_column()))
        }
    }
}

/// Comparison: scalars give a boolean, vectors give a 0/1 vector. Two strings
/// compare as whole strings under `==` and `~=`.
pub(crate) fn compare(op: &str, a: &Value, b: &Value, f: impl Fn(f64, f64) -> bool) -> Result<Value, InterpError> {
    if let (Value::Str(x), Value::Str(y)) = (a, b) {
        return match op {
            "==" => Ok(Value::Bool(x == y)),
            "~=" => Ok(Value::Bool(x != y)),
            _ => Err(InterpError::TypeError(format!("cannot compare strings with `{op}`"))),
        };
    }
    let out = broadcast(op, a, b, |x, y| f64::from(u8::from(f(x, y))))?;
    Ok(match out {
        Value::Num(x) => Value::Bool(x != 0.0),
        v => v,
    })
}

/// Matrix product restricted to what vectors allow: scalar scaling and the
/// row-times-column inner product.
pub(crate) fn mat_mul(a: &Value, b: &Value) -> Result<Value, InterpError> {
    match (a, b) {
        (Value::Vec { data: x, column: false }, Value::Vec { data: y, column: true }) => {
            if x.len() != y.len() {
                return Err(shape_error("*", a, b));
            }
            Ok(Value::Num(x.iter().zip(y).map(|(p, q)| p * q).sum()))
        }
        (Value::Vec { .. }, Value::Vec { .. }) => Err(shape_error("*", a, b)),
        _ => broadcast("*", a, b, |x, y| x * y),
    }
}

pub(crate) fn transpose(v: Value) -> Value {
    match v {
        Value::Vec { data, column } => Value::Vec { data, column: !column },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_product() {
        let a = Value::row(vec![8.0, 4.0, -7.0]);
        let b = transpose(Value::row(vec![2.0, -6.0, 9.0]));
        assert_eq!(mat_mul(&a, &b).unwrap(), Value::Num(-71.0));
    }

    #[test]
    fn row_times_row_is_an_error() {
        let a = Value::row(vec![1.0, 2.0]);
        assert!(mat_mul(&a, &a).is_err());
    }

    #[test]
    fn broadcast_scalar() {
        let v = Value::row(vec![1.0, 2.0, 3.0]);
        let out = broadcast("-", &v, &Value::Num(10.0), |x, y| x - y).unwrap();
        assert_eq!(out, Value::row(vec![-9.0, -8.0, -7.0]));
    }

    #[test]
    fn bools_are_numbers_in_arithmetic() {
        let out = broadcast("+", &Value::Bool(true), &Value::Num(1.0), |x, y| x + y).unwrap();
        assert_eq!(out, Value::Num(2.0));
    }

    #[test]
    fn strings_are_not_numbers() {
        assert!(broadcast("+", &Value::Str("a".into()), &Value::Num(1.0), |x, y| x + y).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Value::Num(122.0).to_string(), "122");
        assert_eq!(Value::Num(f64::INFINITY).to_string(), "Inf");
        assert_eq!(Value::row(vec![1.0, 2.5]).to_string(), "1 2.5");
    }
}
