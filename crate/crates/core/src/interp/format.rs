use super::value::{render_scalar, Value};
use super::InterpError;

#[derive(Debug, Clone, PartialEq)]
enum Arg {
    Num(f64),
    Str(String),
}

#[derive(Debug, Default, Clone, Copy)]
struct Spec {
    left: bool,
    plus: bool,
    space: bool,
    zero: bool,
    alt: bool,
    width: usize,
    precision: Option<usize>,
    conv: char,
}

enum Piece {
    Lit(String),
    Directive(Spec),
}

/// `sprintf` semantics: backslash escapes are processed and every directive
/// consumes one argument element. Vectors contribute one element per entry.
pub fn format_string(fmt: &str, args: &[Value]) -> Result<String, InterpError> {
    format_impl(fmt, args, true)
}

/// Directive substitution without escape processing, for LaTeX text where
/// `\\` and `\n...` must reach the output untouched. `\%` stays literal.
pub fn format_text(fmt: &str, args: &[Value]) -> Result<String, InterpError> {
    format_impl(fmt, args, false)
}

fn flatten(args: &[Value]) -> Vec<Arg> {
    let mut out = Vec::new();
    for a in args {
        match a {
            Value::Num(x) => out.push(Arg::Num(*x)),
            Value::Bool(b) => out.push(Arg::Num(f64::from(u8::from(*b)))),
            Value::Vec { data, .. } => out.extend(data.iter().map(|x| Arg::Num(*x))),
            Value::Str(s) => out.push(Arg::Str(s.clone())),
        }
    }
    out
}

fn parse_pieces(fmt: &str, escapes: bool) -> Result<Vec<Piece>, InterpError> {
    let chars: Vec<char> = fmt.chars().collect();
    let mut pieces = Vec::new();
    let mut lit = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if escapes && c == '\\' {
            match chars.get(i + 1) {
                Some('\\') => lit.push('\\'),
                Some('n') => lit.push('\n'),
                Some('t') => lit.push('\t'),
                Some(&other) => {
                    lit.push('\\');
                    lit.push(other);
                }
                None => lit.push('\\'),
            }
            i += 2;
            continue;
        }
        if c != '%' {
            lit.push(c);
            i += 1;
            continue;
        }
        if !escapes && lit.chars().rev().take_while(|&b| b == '\\').count() % 2 == 1 {
            lit.push('%');
            i += 1;
            continue;
        }
        if chars.get(i + 1) == Some(&'%') {
            lit.push('%');
            i += 2;
            continue;
        }
        let start = i;
        i += 1;
        let mut spec = Spec::default();
        while let Some(&f) = chars.get(i) {
            match f {
                '-' => spec.left = true,
                '+' => spec.plus = true,
                ' ' => spec.space = true,
                '0' => spec.zero = true,
                '#' => spec.alt = true,
                _ => break,
            }
            i += 1;
        }
        while let Some(d) = chars.get(i).and_then(|c| c.to_digit(10)) {
            spec.width = spec.width * 10 + d as usize;
            i += 1;
        }
        if chars.get(i) == Some(&'.') {
            i += 1;
            let mut p = 0;
            while let Some(d) = chars.get(i).and_then(|c| c.to_digit(10)) {
                p = p * 10 + d as usize;
                i += 1;
            }
            spec.precision = Some(p);
        }
        match chars.get(i) {
            Some(&conv @ ('d' | 'i' | 'u' | 'f' | 'e' | 'g' | 's' | 'c')) => {
                spec.conv = conv;
                i += 1;
            }
            _ => {
                let end = (i + 1).min(chars.len());
                return Err(InterpError::BadDirective(chars[start..end].iter().collect()));
            }
        }
        if !lit.is_empty() {
            pieces.push(Piece::Lit(std::mem::take(&mut lit)));
        }
        pieces.push(Piece::Directive(spec));
    }
    if !lit.is_empty() {
        pieces.push(Piece::Lit(lit));
    }
    Ok(pieces)
}

fn format_impl(fmt: &str, args: &[Value], escapes: bool) -> Result<String, InterpError> {
    let pieces = parse_pieces(fmt, escapes)?;
    let args = flatten(args);
    let directives = pieces.iter().filter(|p| matches!(p, Piece::Directive(_))).count();
    if directives != args.len() {
        return Err(InterpError::ArgCountMismatch { directives, args: args.len() });
    }
    let mut out = String::new();
    let mut next = args.into_iter();
    for piece in pieces {
        match piece {
            Piece::Lit(s) => out.push_str(&s),
            Piece::Directive(spec) => {
                let arg = next.next().expect("argument count checked");
                out.push_str(&render_directive(&spec, arg)?);
            }
        }
    }
    Ok(out)
}

fn render_directive(spec: &Spec, arg: Arg) -> Result<String, InterpError> {
    let body = match (spec.conv, arg) {
        ('s', Arg::Str(s)) => truncate(s, spec.precision),
        ('s', Arg::Num(x)) => truncate(render_scalar(x), spec.precision),
        ('c', Arg::Str(s)) => s,
        ('c', Arg::Num(x)) => char::from_u32(x as u32)
            .map(String::from)
            .ok_or_else(|| InterpError::TypeError(format!("{x} is not a character code")))?,
        (_, Arg::Str(s)) => {
            return Err(InterpError::TypeError(format!("`%{}` needs a number, got the string '{s}'", spec.conv)))
        }
        (conv, Arg::Num(x)) => return Ok(pad(spec, sign(spec, x, number_body(conv, spec, x)), true)),
    };
    Ok(pad(spec, body, false))
}

fn truncate(s: String, precision: Option<usize>) -> String {
    match precision {
        Some(p) => s.chars().take(p).collect(),
        None => s,
    }
}

fn number_body(conv: char, spec: &Spec, x: f64) -> String {
    if !x.is_finite() {
        return render_scalar(x.abs());
    }
    let a = x.abs();
    match conv {
        'd' | 'i' | 'u' => format!("{:.0}", a.round()),
        'f' => format!("{:.*}", spec.precision.unwrap_or(6), a),
        'e' => exp_notation(a, spec.precision.unwrap_or(6)),
        _ => general(a, spec.precision.unwrap_or(6), spec.alt),
    }
}

/// C-style `%e`: at least two exponent digits and an explicit sign.
fn exp_notation(a: f64, precision: usize) -> String {
    let s = format!("{:.*e}", precision, a);
    let (mantissa, exp) = s.split_once('e').expect("Rust exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn strip_trailing_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn general(a: f64, precision: usize, alt: bool) -> String {
    let p = precision.max(1);
    if a == 0.0 {
        return if alt { format!("{:.*}", p - 1, 0.0) } else { "0".to_string() };
    }
    let probe = format!("{:.*e}", p - 1, a);
    let exp: i32 = probe.split_once('e').unwrap().1.parse().unwrap();
    if exp < -4 || exp >= p as i32 {
        let s = exp_notation(a, p - 1);
        if alt {
            return s;
        }
        let (mantissa, tail) = s.split_once('e').unwrap();
        format!("{}e{tail}", strip_trailing_zeros(mantissa))
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, a);
        if alt {
            s
        } else {
            strip_trailing_zeros(&s)
        }
    }
}

fn sign(spec: &Spec, x: f64, body: String) -> String {
    let integer = matches!(spec.conv, 'd' | 'i' | 'u');
    let negative = x < 0.0 && !(integer && x.round() == 0.0);
    if negative {
        format!("-{body}")
    } else if spec.plus {
        format!("+{body}")
    } else if spec.space {
        format!(" {body}")
    } else {
        body
    }
}

fn pad(spec: &Spec, body: String, numeric: bool) -> String {
    let len = body.chars().count();
    if len >= spec.width {
        return body;
    }
    let fill = spec.width - len;
    if spec.left {
        format!("{body}{}", " ".repeat(fill))
    } else if spec.zero && numeric && body.chars().any(|c| c.is_ascii_digit()) {
        let split = body.find(|c: char| c.is_ascii_digit()).unwrap_or(0);
        let (sign, digits) = body.split_at(split);
        format!("{sign}{}{digits}", "0".repeat(fill))
    } else {
        format!("{}{body}", " ".repeat(fill))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(fmt: &str, args: &[Value]) -> String {
        format_string(fmt, args).unwrap()
    }

    #[test]
    fn fixed_precision() {
        assert_eq!(f("%6.4f", &[Value::Num(0.50215)]), "0.5021");
        assert_eq!(f("%.5f", &[Value::Num(0.5206559)]), "0.52066");
        assert_eq!(f("%8.3f|", &[Value::Num(-1.5)]), "  -1.500|");
        assert_eq!(f("%-6.1f|", &[Value::Num(2.0)]), "2.0   |");
        assert_eq!(f("%06.2f", &[Value::Num(-3.14259)]), "-03.14");
    }

    #[test]
    fn integer_directive_rounds() {
        assert_eq!(f("%d", &[Value::Num(0.0)]), "0");
        assert_eq!(f("%d", &[Value::Num(2.5)]), "3");
        assert_eq!(f("%d", &[Value::Num(-2.5)]), "-3");
        assert_eq!(f("%d", &[Value::Num(-0.2)]), "0");
        assert_eq!(f("%+d", &[Value::Num(7.0)]), "+7");
        assert_eq!(f("%3d|", &[Value::Num(7.0)]), "  7|");
        assert_eq!(f("%d", &[Value::Bool(true)]), "1");
    }

    #[test]
    fn double_backslash_reaches_latex_as_one() {
        let args = [Value::Num(108.0), Value::Num(101.0), Value::Num(7.0)];
        assert_eq!(f("$\\\\congruent{%d}{%d}{%d}$", &args), "$\\congruent{108}{101}{7}$");
        assert_eq!(f("a\\nb", &[]), "a\nb");
        assert_eq!(f("\\frac", &[]), "\\frac");
    }

    #[test]
    fn text_mode_leaves_backslashes_alone() {
        let out = format_text("$%d\\%$ of \\\\ %s", &[Value::Num(5.0), Value::Str("x".into())]).unwrap();
        assert_eq!(out, "$5\\%$ of \\\\ x");
    }

    #[test]
    fn general_format() {
        assert_eq!(f("%g", &[Value::Num(0.0001)]), "0.0001");
        assert_eq!(f("%g", &[Value::Num(0.00001)]), "1e-05");
        assert_eq!(f("%g", &[Value::Num(123456.0)]), "123456");
        assert_eq!(f("%g", &[Value::Num(1234567.0)]), "1.23457e+06");
        assert_eq!(f("%g", &[Value::Num(2.5)]), "2.5");
        assert_eq!(f("%.3g", &[Value::Num(3.14259)]), "3.14");
        assert_eq!(f("%e", &[Value::Num(1234.5)]), "1.234500e+03");
    }

    #[test]
    fn strings_and_chars() {
        assert_eq!(f("%s!", &[Value::Str("hi".into())]), "hi!");
        assert_eq!(f("%5s", &[Value::Str("ab".into())]), "   ab");
        assert_eq!(f("%c", &[Value::Num(65.0)]), "A");
        assert_eq!(f("%s", &[Value::Num(2.5)]), "2.5");
        assert_eq!(f("100%%", &[]), "100%");
    }

    #[test]
    fn vectors_are_flattened() {
        assert_eq!(f("%d-%d-%d", &[Value::row(vec![1.0, 2.0, 3.0])]), "1-2-3");
    }

    #[test]
    fn argument_count_must_match() {
        assert!(matches!(
            format_string("%d and %d", &[Value::Num(1.0)]),
            Err(InterpError::ArgCountMismatch { directives: 2, args: 1 })
        ));
        assert!(matches!(
            format_string("%d", &[Value::Num(1.0), Value::Num(2.0)]),
            Err(InterpError::ArgCountMismatch { directives: 1, args: 2 })
        ));
    }

    #[test]
    fn bad_directive() {
        assert!(matches!(format_string("%q", &[Value::Num(1.0)]), Err(InterpError::BadDirective(_))));
        assert!(matches!(format_string("50%", &[]), Err(InterpError::BadDirective(_))));
        assert!(format_string("%d", &[Value::Str("x".into())]).is_err());
    }
}
