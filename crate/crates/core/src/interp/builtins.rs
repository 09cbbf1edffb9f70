use super::format::format_string;
use super::value::{broadcast, render_scalar, Value};
use super::InterpError;
use crate::rng::RandomStream;

const NAMES: &[&str] = &[
    "rand",
    "randi",
    "randperm",
    "floor",
    "ceil",
    "round",
    "fix",
    "sqrt",
    "abs",
    "exp",
    "log",
    "log10",
    "sin",
    "cos",
    "tan",
    "pi",
    "Inf",
    "inf",
    "NaN",
    "nan",
    "mod",
    "rem",
    "gcd",
    "lcm",
    "nchoosek",
    "factorial",
    "isprime",
    "sort",
    "length",
    "numel",
    "sum",
    "prod",
    "cumsum",
    "mean",
    "min",
    "max",
    "any",
    "all",
    "normcdf",
    "sprintf",
    "num2str",
    "error",
    "zeros",
    "ones",
    "true",
    "false",
    "fliplr",
    "isempty",
    "strcmp",
];

pub(crate) fn is_builtin(name: &str) -> bool {
    NAMES.contains(&name)
}

fn arity(name: &str, expected: &str, got: usize) -> InterpError {
    InterpError::BadArity { name: name.to_string(), expected: expected.to_string(), got }
}

fn map1(v: &Value, f: impl Fn(f64) -> f64) -> Result<Value, InterpError> {
    match v {
        Value::Vec { data, column } => Ok(Value::vector(data.iter().map(|x| f(*x)).collect(), *column)),
        other => Ok(Value::Num(f(other.scalar()?))),
    }
}

fn int_arg(name: &str, v: &Value) -> Result<i64, InterpError> {
    let x = v.scalar()?;
    if x.fract() != 0.0 || !x.is_finite() {
        return Err(InterpError::TypeError(format!("`{name}` needs an integer argument, got {v}")));
    }
    Ok(x as i64)
}

/// Vector shape from `(n)`, `(1,k)` or `(k,1)`; matrices are not supported.
fn shape(name: &str, args: &[Value]) -> Result<(usize, bool), InterpError> {
    let dims: Vec<i64> = args.iter().map(|a| int_arg(name, a)).collect::<Result<_, _>>()?;
    let bad = || InterpError::TypeError(format!("`{name}` can only build scalars and vectors"));
    match dims.as_slice() {
        [] | [1] => Ok((1, false)),
        [1, k] if *k >= 1 => Ok((*k as usize, false)),
        [k, 1] if *k >= 1 => Ok((*k as usize, true)),
        [r, c] if *r < 1 || *c < 1 => Err(InterpError::EmptyVector(name.to_string())),
        _ => Err(bad()),
    }
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Binomial coefficient, exact while it fits in 128 bits.
pub(crate) fn nchoosek(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        match acc.checked_mul(u128::from(n - i)) {
            Some(m) => acc = m / u128::from(i + 1),
            None => {
                let mut r = acc as f64;
                for j in i..k {
                    r = r * (n - j) as f64 / (j + 1) as f64;
                }
                return r.round();
            }
        }
    }
    acc as f64
}

/// Standard normal distribution function, optionally shifted and scaled.
pub(crate) fn normcdf(x: f64, mu: f64, sigma: f64) -> f64 {
    0.5 * libm::erfc(-(x - mu) / (sigma * std::f64::consts::SQRT_2))
}

fn is_prime(x: f64) -> bool {
    if x < 2.0 || x.fract() != 0.0 || !x.is_finite() {
        return false;
    }
    let n = x as u64;
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn bools(v: &Value, f: impl Fn(f64) -> bool) -> Result<Value, InterpError> {
    match v {
        Value::Vec { data, column } => {
            Ok(Value::vector(data.iter().map(|x| f64::from(u8::from(f(*x)))).collect(), *column))
        }
        other => Ok(Value::Bool(f(other.scalar()?))),
    }
}

fn num2str(v: &Value) -> String {
    match v {
        Value::Str(s) => s.clone(),
        Value::Vec { data, .. } => data.iter().map(|x| num2str(&Value::Num(*x))).collect::<Vec<_>>().join("  "),
        other => {
            let x = other.scalar().unwrap_or(f64::NAN);
            if !x.is_finite() || x.fract() == 0.0 {
                render_scalar(x)
            } else {
                let digits = (x.abs().log10().floor().max(0.0) as usize) + 5;
                format_string(&format!("%.{digits}g"), &[Value::Num(x)]).unwrap_or_else(|_| render_scalar(x))
            }
        }
    }
}

fn extreme(name: &str, args: &[Value], nargout: usize, want_max: bool) -> Result<Vec<Value>, InterpError> {
    let better = |a: f64, b: f64| if want_max { a > b } else { a < b };
    match args {
        [v] => {
            let data = v.numbers()?;
            let mut best = 0;
            for (i, x) in data.iter().enumerate() {
                if x.is_nan() {
                    continue;
                }
                if data[best].is_nan() || better(*x, data[best]) {
                    best = i;
                }
            }
            let mut out = vec![Value::Num(data[best])];
            if nargout > 1 {
                out.push(Value::Num((best + 1) as f64));
            }
            Ok(out)
        }
        [a, b] => Ok(vec![broadcast(name, a, b, |x, y| if better(y, x) { y } else { x })?]),
        _ => Err(arity(name, "1 or 2", args.len())),
    }
}

/// Calls builtin `name`. Returns `None` when no such builtin exists.
pub(crate) fn call_builtin(
    name: &str,
    args: &[Value],
    nargout: usize,
    rng: &mut RandomStream,
) -> Option<Result<Vec<Value>, InterpError>> {
    if !is_builtin(name) {
        return None;
    }
    Some(dispatch(name, args, nargout, rng))
}

fn one(v: Value) -> Result<Vec<Value>, InterpError> {
    Ok(vec![v])
}

fn dispatch(name: &str, args: &[Value], nargout: usize, rng: &mut RandomStream) -> Result<Vec<Value>, InterpError> {
    let n = args.len();
    let unary = |f: fn(f64) -> f64| -> Result<Vec<Value>, InterpError> {
        match args {
            [v] => one(map1(v, f)?),
            _ => Err(arity(name, "1", n)),
        }
    };
    match name {
        "pi" => one(Value::Num(std::f64::consts::PI)),
        "Inf" | "inf" => one(Value::Num(f64::INFINITY)),
        "NaN" | "nan" => one(Value::Num(f64::NAN)),
        "true" => one(Value::Bool(true)),
        "false" => one(Value::Bool(false)),
        "rand" => {
            let (len, column) = shape(name, args)?;
            one(Value::vector((0..len).map(|_| rng.uniform()).collect(), column))
        }
        "randi" => {
            let Some((limit, dims)) = args.split_first() else {
                return Err(arity(name, "1 to 3", 0));
            };
            let first = *limit.numbers()?.first().ok_or_else(|| InterpError::EmptyVector(name.into()))?;
            if first.fract() != 0.0 || first < 1.0 {
                return Err(InterpError::TypeError(format!("`randi` needs a positive integer limit, got {first}")));
            }
            let (len, column) = shape(name, dims)?;
            let draws = (0..len).map(|_| (1 + rng.below(first as usize)) as f64).collect();
            one(Value::vector(draws, column))
        }
        "randperm" => {
            let [k] = args else { return Err(arity(name, "1", n)) };
            let k = int_arg(name, k)?;
            if k < 1 {
                return Err(InterpError::EmptyVector(name.into()));
            }
            let mut p: Vec<f64> = (1..=k).map(|i| i as f64).collect();
            rng.shuffle(&mut p);
            one(Value::row(p))
        }
        "floor" => unary(f64::floor),
        "ceil" => unary(f64::ceil),
        "round" => unary(f64::round),
        "fix" => unary(f64::trunc),
        "sqrt" => unary(f64::sqrt),
        "abs" => unary(f64::abs),
        "exp" => unary(f64::exp),
        "log" => unary(f64::ln),
        "log10" => unary(f64::log10),
        "sin" => unary(f64::sin),
        "cos" => unary(f64::cos),
        "tan" => unary(f64::tan),
        "factorial" => {
            unary(|x| if x < 0.0 || x.fract() != 0.0 { f64::NAN } else { (1..=x as u64).map(|i| i as f64).product() })
        }
        "mod" | "rem" => {
            let [a, b] = args else { return Err(arity(name, "2", n)) };
            let floor_mod = name == "mod";
            one(broadcast(name, a, b, |x, y| {
                if y == 0.0 {
                    if floor_mod {
                        x
                    } else {
                        f64::NAN
                    }
                } else if floor_mod {
                    x - (x / y).floor() * y
                } else {
                    x - (x / y).trunc() * y
                }
            })?)
        }
        "gcd" | "lcm" => {
            let [a, b] = args else { return Err(arity(name, "2", n)) };
            for v in [a, b] {
                if v.numbers()?.iter().any(|x| x.fract() != 0.0) {
                    return Err(InterpError::TypeError(format!("`{name}` needs integers")));
                }
            }
            let lcm = name == "lcm";
            one(broadcast(name, a, b, |x, y| {
                let g = gcd(x as i64, y as i64);
                if !lcm {
                    g as f64
                } else if g == 0 {
                    0.0
                } else {
                    ((x as i64 / g) * y as i64).abs() as f64
                }
            })?)
        }
        "nchoosek" => {
            let [a, b] = args else { return Err(arity(name, "2", n)) };
            let (nn, kk) = (int_arg(name, a)?, int_arg(name, b)?);
            if nn < 0 || kk < 0 {
                return Err(InterpError::TypeError("`nchoosek` needs non-negative integers".into()));
            }
            one(Value::Num(nchoosek(nn as u64, kk as u64)))
        }
        "isprime" => match args {
            [v] => one(bools(v, is_prime)?),
            _ => Err(arity(name, "1", n)),
        },
        "sort" => {
            let (v, descend) = match args {
                [v] => (v, false),
                [v, Value::Str(mode)] if mode == "ascend" || mode == "descend" => (v, mode == "descend"),
                [_, _] => return Err(InterpError::TypeError("`sort` mode must be 'ascend' or 'descend'".into())),
                _ => return Err(arity(name, "1 or 2", n)),
            };
            if let Value::Str(s) = v {
                let mut cs: Vec<char> = s.chars().collect();
                cs.sort_unstable();
                if descend {
                    cs.reverse();
                }
                return one(Value::Str(cs.into_iter().collect()));
            }
            let data = v.numbers()?;
            let mut idx: Vec<usize> = (0..data.len()).collect();
            idx.sort_by(|&i, &j| {
                let ord = data[i].total_cmp(&data[j]);
                if descend {
                    ord.reverse()
                } else {
                    ord
                }
            });
            let sorted = Value::vector(idx.iter().map(|&i| data[i]).collect(), v.is_column());
            let mut out = vec![sorted];
            if nargout > 1 {
                out.push(Value::vector(idx.iter().map(|&i| (i + 1) as f64).collect(), v.is_column()));
            }
            Ok(out)
        }
        "length" | "numel" => match args {
            [v] => one(Value::Num(v.len() as f64)),
            _ => Err(arity(name, "1", n)),
        },
        "isempty" => match args {
            [v] => one(Value::Bool(v.is_empty())),
            _ => Err(arity(name, "1", n)),
        },
        "sum" | "prod" | "mean" | "any" | "all" => {
            let [v] = args else { return Err(arity(name, "1", n)) };
            let data = v.numbers()?;
            one(match name {
                "sum" => Value::Num(data.iter().sum()),
                "prod" => Value::Num(data.iter().product()),
                "mean" => Value::Num(data.iter().sum::<f64>() / data.len() as f64),
                "any" => Value::Bool(data.iter().any(|x| *x != 0.0 && !x.is_nan())),
                _ => Value::Bool(data.iter().all(|x| *x != 0.0)),
            })
        }
        "cumsum" => {
            let [v] = args else { return Err(arity(name, "1", n)) };
            let mut acc = 0.0;
            let data = v.numbers()?.into_iter().map(|x| {
                acc += x;
                acc
            });
            one(Value::vector(data.collect(), v.is_column()))
        }
        "min" => extreme(name, args, nargout, false),
        "max" => extreme(name, args, nargout, true),
        "fliplr" => {
            let [v] = args else { return Err(arity(name, "1", n)) };
            match v {
                Value::Str(s) => one(Value::Str(s.chars().rev().collect())),
                Value::Vec { data, column } => {
                    one(Value::Vec { data: data.iter().rev().copied().collect(), column: *column })
                }
                other => one(other.clone()),
            }
        }
        "normcdf" => {
            let (mu, sigma) = match args {
                [_] => (0.0, 1.0),
                [_, m] => (m.scalar()?, 1.0),
                [_, m, s] => (m.scalar()?, s.scalar()?),
                _ => return Err(arity(name, "1 to 3", n)),
            };
            one(map1(&args[0], |x| normcdf(x, mu, sigma))?)
        }
        "sprintf" | "error" => {
            let Some((Value::Str(fmt), rest)) = args.split_first() else {
                return Err(InterpError::TypeError(format!("`{name}` needs a format string first")));
            };
            let text = format_string(fmt, rest)?;
            if name == "error" {
                Err(InterpError::UserError(text))
            } else {
                one(Value::Str(text))
            }
        }
        "num2str" => match args {
            [v] => one(Value::Str(num2str(v))),
            [v, Value::Str(fmt)] => one(Value::Str(format_string(fmt, std::slice::from_ref(v))?)),
            _ => Err(arity(name, "1 or 2", n)),
        },
        "strcmp" => match args {
            [Value::Str(a), Value::Str(b)] => one(Value::Bool(a == b)),
            [_, _] => one(Value::Bool(false)),
            _ => Err(arity(name, "2", n)),
        },
        "zeros" | "ones" => {
            let (len, column) = shape(name, args)?;
            let fill = if name == "ones" { 1.0 } else { 0.0 };
            one(Value::vector(vec![fill; len], column))
        }
        _ => unreachable!("`{name}` is listed as a builtin but has no implementation"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(name: &str, args: &[Value]) -> Value {
        let mut rng = RandomStream::new(1);
        call_builtin(name, args, 1, &mut rng).unwrap().unwrap().remove(0)
    }

    #[test]
    fn every_listed_name_dispatches() {
        let mut rng = RandomStream::new(0);
        for name in NAMES {
            // Wrong arities must come back as errors, never as a panic.
            let _ = call_builtin(name, &[], 1, &mut rng);
            let _ = call_builtin(name, &[Value::Num(3.0)], 1, &mut rng);
        }
    }

    #[test]
    fn modulo_follows_floor_division() {
        assert_eq!(call("mod", &[Value::Num(10.0), Value::Num(10.0)]), Value::Num(0.0));
        assert_eq!(call("mod", &[Value::Num(-7.0), Value::Num(3.0)]), Value::Num(2.0));
        assert_eq!(call("rem", &[Value::Num(-7.0), Value::Num(3.0)]), Value::Num(-1.0));
        assert_eq!(call("mod", &[Value::Num(5.0), Value::Num(0.0)]), Value::Num(5.0));
    }

    #[test]
    fn binomials() {
        assert_eq!(nchoosek(8, 3), 56.0);
        assert_eq!(nchoosek(5, 7), 0.0);
        assert_eq!(nchoosek(60, 30), 118264581564861424.0);
    }

    #[test]
    fn normal_cdf_symmetry() {
        assert_eq!(normcdf(0.0, 0.0, 1.0), 0.5);
        assert!((normcdf(1.96, 0.0, 1.0) - 0.9750021048517795).abs() < 1e-12);
    }

    #[test]
    fn randi_respects_limit_and_shape() {
        let mut rng = RandomStream::new(5);
        let v = call_builtin("randi", &[Value::Num(6.0), Value::Num(1.0), Value::Num(50.0)], 1, &mut rng)
            .unwrap()
            .unwrap()
            .remove(0);
        let data = v.numbers().unwrap();
        assert_eq!(data.len(), 50);
        assert!(data.iter().all(|x| (1.0..=6.0).contains(x) && x.fract() == 0.0));
        let col = call_builtin("randi", &[Value::row(vec![9.0, 2.0]), Value::Num(3.0), Value::Num(1.0)], 1, &mut rng)
            .unwrap()
            .unwrap()
            .remove(0);
        assert!(col.is_column());
        assert!(col.numbers().unwrap().iter().all(|x| (1.0..=9.0).contains(x)));
    }

    #[test]
    fn sort_with_indices() {
        let mut rng = RandomStream::new(0);
        let out = call_builtin("sort", &[Value::row(vec![3.0, 1.0, 2.0])], 2, &mut rng).unwrap().unwrap();
        assert_eq!(out[0], Value::row(vec![1.0, 2.0, 3.0]));
        assert_eq!(out[1], Value::row(vec![2.0, 3.0, 1.0]));
    }

    #[test]
    fn min_max() {
        let mut rng = RandomStream::new(0);
        let out = call_builtin("max", &[Value::row(vec![3.0, 9.0, 2.0])], 2, &mut rng).unwrap().unwrap();
        assert_eq!(out, vec![Value::Num(9.0), Value::Num(2.0)]);
        assert_eq!(call("min", &[Value::Num(4.0), Value::Num(-1.0)]), Value::Num(-1.0));
    }

    #[test]
    fn number_to_string() {
        assert_eq!(call("num2str", &[Value::Num(std::f64::consts::PI)]), Value::Str("3.1416".into()));
        assert_eq!(call("num2str", &[Value::Num(42.0)]), Value::Str("42".into()));
    }

    #[test]
    fn primes() {
        assert_eq!(call("isprime", &[Value::Num(13.0)]), Value::Bool(true));
        assert_eq!(call("isprime", &[Value::Num(91.0)]), Value::Bool(false));
    }
}
