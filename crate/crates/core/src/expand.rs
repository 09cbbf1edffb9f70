//! The curly-bracket randomization operator and the `!=` / `!<` multiple
//! assignment operators.
//!
//! Both run as a textual pass over each command-part line before the line is
//! handed to the interpreter: `{3,3,7,7,7}` is replaced by the literal text of
//! one element drawn from the (duplicate-preserving) list, innermost and
//! leftmost pair first. A line is expanded once per execution of its block,
//! so a loop body that contains `{...}` re-runs the same drawn literal.

use thiserror::Error;

use crate::rng::RandomStream;

/// Attempts allowed when drawing distinct values for `!=` / `!<`.
pub const DISTINCT_DRAW_ATTEMPTS: usize = 1000;
const MAX_RANGE_LEN: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpandError {
    #[error("empty curly-bracket list")]
    EmptyList,
    #[error("malformed curly-bracket item `{0}`")]
    MalformedItem(String),
    #[error("range `{0}` is empty")]
    EmptyRange(String),
    #[error("unbalanced curly brackets")]
    UnbalancedBraces,
    #[error("need {needed} distinct values but the list has {available}")]
    NotEnoughDistinctValues { needed: usize, available: usize },
    #[error("malformed multiple assignment: {0}")]
    MalformedMultiAssign(String),
}

impl ExpandError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::EmptyList => "EmptyList",
            Self::MalformedItem(_) => "MalformedItem",
            Self::EmptyRange(_) => "EmptyRange",
            Self::UnbalancedBraces => "UnbalancedBraces",
            Self::NotEnoughDistinctValues { .. } => "NotEnoughDistinctValues",
            Self::MalformedMultiAssign(_) => "MalformedMultiAssign",
        }
    }
}

/// One element of a curly list.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    Num(f64),
    Str(String),
}

impl Atom {
    /// Source text for the atom: numbers without exponent or trailing zeros,
    /// strings single-quoted.
    pub fn render(&self) -> String {
        match self {
            Atom::Num(x) => render_number(*x),
            Atom::Str(s) => format!("'{}'", s.replace('\'', "''")),
        }
    }

    fn sort_key_cmp(&self, other: &Atom) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (Atom::Num(a), Atom::Num(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            (Atom::Str(a), Atom::Str(b)) => a.cmp(b),
            (Atom::Num(_), Atom::Str(_)) => Ordering::Less,
            (Atom::Str(_), Atom::Num(_)) => Ordering::Greater,
        }
    }
}

/// Renders a number the way it should appear in source text.
pub fn render_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        // Display for f64 is shortest-round-trip and never uses an exponent.
        format!("{x}")
    }
}

/// The expanded multiset inside one pair of curly brackets.
#[derive(Debug, Clone, PartialEq)]
pub struct CurlyList {
    pub elements: Vec<Atom>,
}

impl CurlyList {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn distinct(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::new();
        for e in &self.elements {
            if !out.contains(e) {
                out.push(e.clone());
            }
        }
        out
    }

    pub fn draw(&self, rng: &mut RandomStream) -> &Atom {
        &self.elements[rng.below(self.elements.len())]
    }
}

/// Whether a single quote following `prev` (with `before_prev` before that)
/// opens a string literal rather than being a transpose operator.
pub(crate) fn quote_opens_string(prev: Option<char>, before_prev: Option<char>) -> bool {
    match prev {
        None => true,
        Some(c) if c.is_alphanumeric() || c == '_' => false,
        Some(')' | ']' | '}' | '\'') => false,
        Some('.') => before_prev == Some('.'),
        Some(_) => true,
    }
}

/// Marks every char that belongs to a single-quoted string literal
/// (quotes included).
pub(crate) fn string_mask(chars: &[char]) -> Vec<bool> {
    let mut mask = vec![false; chars.len()];
    let mut i = 0;
    while i < chars.len() {
        let prev = if i > 0 { Some(chars[i - 1]) } else { None };
        let before_prev = if i > 1 { Some(chars[i - 2]) } else { None };
        if chars[i] == '\'' && quote_opens_string(prev, before_prev) {
            mask[i] = true;
            i += 1;
            while i < chars.len() {
                mask[i] = true;
                if chars[i] == '\'' {
                    if chars.get(i + 1) == Some(&'\'') {
                        mask[i + 1] = true;
                        i += 2;
                        continue;
                    }
                    break;
                }
                i += 1;
            }
        }
        i += 1;
    }
    mask
}

/// Splits on commas outside quotes and brackets.
fn split_items(body: &str) -> Vec<String> {
    let chars: Vec<char> = body.chars().collect();
    let mask = string_mask(&chars);
    let mut items = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for (i, &c) in chars.iter().enumerate() {
        if !mask[i] {
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                ',' if depth == 0 => {
                    items.push(std::mem::take(&mut cur));
                    continue;
                }
                _ => {}
            }
        }
        cur.push(c);
    }
    items.push(cur);
    items
}

/// Reads a quoted literal at the start of `s`, returning its content and the rest.
fn take_quoted(s: &str) -> Option<(String, &str)> {
    let mut chars = s.char_indices();
    if chars.next()?.1 != '\'' {
        return None;
    }
    let mut out = String::new();
    let bytes = s.as_bytes();
    let mut iter = s[1..].char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if c == '\'' {
            if bytes.get(1 + i + 1) == Some(&b'\'') {
                out.push('\'');
                iter.next();
                continue;
            }
            return Some((out, &s[1 + i + 1..]));
        }
        out.push(c);
    }
    None
}

fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if t.is_empty() || !t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')) {
        return None;
    }
    t.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn expand_numeric(item: &str, out: &mut Vec<Atom>) -> Result<(), ExpandError> {
    let malformed = || ExpandError::MalformedItem(item.trim().to_string());
    let parts: Vec<&str> = item.split(':').collect();
    let nums = parts.iter().map(|p| parse_number(p).ok_or_else(malformed)).collect::<Result<Vec<f64>, _>>()?;
    let (start, step, stop) = match nums.as_slice() {
        [x] => {
            out.push(Atom::Num(*x));
            return Ok(());
        }
        [a, b] => (*a, 1.0, *b),
        [a, s, b] => (*a, *s, *b),
        _ => return Err(malformed()),
    };
    if step == 0.0 {
        return Err(malformed());
    }
    let span = (stop - start) / step;
    if span < -1e-10 {
        return Err(ExpandError::EmptyRange(item.trim().to_string()));
    }
    let count = (span + 1e-10).floor() as usize + 1;
    if count > MAX_RANGE_LEN {
        return Err(malformed());
    }
    out.extend((0..count).map(|i| Atom::Num(start + i as f64 * step)));
    Ok(())
}

fn expand_quoted(item: &str, out: &mut Vec<Atom>) -> Result<(), ExpandError> {
    let malformed = || ExpandError::MalformedItem(item.to_string());
    let (first, rest) = take_quoted(item).ok_or_else(malformed)?;
    let rest = rest.trim();
    if rest.is_empty() {
        out.push(Atom::Str(first));
        return Ok(());
    }
    let rest = rest.strip_prefix("..").ok_or_else(malformed)?.trim();
    let (last, tail) = take_quoted(rest).ok_or_else(malformed)?;
    if !tail.trim().is_empty() {
        return Err(malformed());
    }
    let (mut a, mut b) = (first.chars(), last.chars());
    let (lo, hi) = match (a.next(), a.next(), b.next(), b.next()) {
        (Some(lo), None, Some(hi), None) => (lo, hi),
        _ => return Err(malformed()),
    };
    if lo > hi {
        return Err(ExpandError::EmptyRange(item.to_string()));
    }
    out.extend((lo..=hi).map(|c| Atom::Str(c.to_string())));
    Ok(())
}

/// Parses the text strictly between one `{` and its matching `}`.
///
/// A list whose only item is a multi-character string stands for the
/// characters of that string, so `{'abcxyz'}` draws single letters.
pub fn parse_curly_list(body: &str) -> Result<CurlyList, ExpandError> {
    if body.trim().is_empty() {
        return Err(ExpandError::EmptyList);
    }
    let items = split_items(body);
    let mut elements = Vec::new();
    for raw in &items {
        let item = raw.trim();
        if item.is_empty() {
            return Err(ExpandError::MalformedItem(raw.clone()));
        }
        if item.starts_with('\'') {
            expand_quoted(item, &mut elements)?;
        } else {
            expand_numeric(item, &mut elements)?;
        }
    }
    if let [Atom::Str(s)] = elements.as_slice() {
        if s.chars().count() > 1 {
            elements = s.chars().map(|c| Atom::Str(c.to_string())).collect();
        }
    }
    Ok(CurlyList { elements })
}

fn check_balanced(chars: &[char], mask: &[bool]) -> Result<(), ExpandError> {
    let mut depth = 0i32;
    for (i, &c) in chars.iter().enumerate() {
        if mask[i] {
            continue;
        }
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return Err(ExpandError::UnbalancedBraces);
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(ExpandError::UnbalancedBraces);
    }
    Ok(())
}

/// Replaces every curly-bracket pair in `line` by a drawn element, innermost
/// and leftmost pair first. Lines without braces are returned unchanged
/// without touching the stream.
pub fn expand_line(line: &str, rng: &mut RandomStream) -> Result<String, ExpandError> {
    let mut chars: Vec<char> = line.chars().collect();
    check_balanced(&chars, &string_mask(&chars))?;
    loop {
        let mask = string_mask(&chars);
        let close = chars.iter().enumerate().position(|(i, &c)| c == '}' && !mask[i]);
        let Some(close) = close else {
            return Ok(chars.into_iter().collect());
        };
        let open = (0..close).rev().find(|&i| chars[i] == '{' && !mask[i]).ok_or(ExpandError::UnbalancedBraces)?;
        let body: String = chars[open + 1..close].iter().collect();
        let list = parse_curly_list(&body)?;
        let rendered = list.draw(rng).render();
        chars.splice(open..=close, rendered.chars());
    }
}

/// Position and kind of a `!=` / `!<` operator outside string literals.
fn find_multi_op(chars: &[char], mask: &[bool]) -> Option<(usize, bool)> {
    (0..chars.len().saturating_sub(1)).find_map(|i| {
        if mask[i] || chars[i] != '!' {
            return None;
        }
        match chars[i + 1] {
            '=' => Some((i, false)),
            '<' => Some((i, true)),
            _ => None,
        }
    })
}

/// Whether the line is a multiple assignment: a list of names, `!=` or `!<`,
/// then a curly list. A comparison such as `if a!=b` does not qualify.
pub fn is_multi_assign(line: &str) -> bool {
    let chars: Vec<char> = line.chars().collect();
    let Some((op, _)) = find_multi_op(&chars, &string_mask(&chars)) else {
        return false;
    };
    let lhs: String = chars[..op].iter().collect();
    let rhs: String = chars[op + 2..].iter().collect();
    lhs.split(',').all(|n| is_identifier(n.trim())) && rhs.trim_start().starts_with('{')
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Expands `v1,...,vn != {list};` (distinct values in draw order) or
/// `v1,...,vn !< {list};` (distinct values sorted ascending) into plain
/// assignments.
pub fn expand_multi_assign(line: &str, rng: &mut RandomStream) -> Result<String, ExpandError> {
    let chars: Vec<char> = line.chars().collect();
    let mask = string_mask(&chars);
    let malformed = |why: &str| ExpandError::MalformedMultiAssign(format!("{why} in `{}`", line.trim()));
    let (op, sorted) = find_multi_op(&chars, &mask).ok_or_else(|| malformed("no `!=` or `!<`"))?;

    let lhs: String = chars[..op].iter().collect();
    let names: Vec<&str> = lhs.split(',').map(str::trim).collect();
    if names.iter().any(|n| !is_identifier(n)) {
        return Err(malformed("expected a comma-separated list of variable names"));
    }

    let rhs: String = chars[op + 2..].iter().collect();
    let rhs = rhs.trim();
    let inner = rhs.strip_prefix('{').ok_or_else(|| malformed("expected `{` after the operator"))?;
    let inner_chars: Vec<char> = inner.chars().collect();
    let inner_mask = string_mask(&inner_chars);
    let close = inner_chars
        .iter()
        .enumerate()
        .position(|(i, &c)| (c == '}' || c == '{') && !inner_mask[i])
        .ok_or(ExpandError::UnbalancedBraces)?;
    if inner_chars[close] == '{' {
        return Err(malformed("nested curly brackets"));
    }
    let body: String = inner_chars[..close].iter().collect();
    let tail: String = inner_chars[close + 1..].iter().collect();
    let tail = tail.trim();
    if !(tail.is_empty() || tail == ";") {
        return Err(malformed("only one pair of curly brackets is allowed on the right"));
    }

    let list = parse_curly_list(&body)?;
    let needed = names.len();
    let available = list.distinct().len();
    if available < needed {
        return Err(ExpandError::NotEnoughDistinctValues { needed, available });
    }
    let mut chosen: Vec<Atom> = Vec::with_capacity(needed);
    let mut attempts = 0;
    while chosen.len() < needed {
        if attempts == DISTINCT_DRAW_ATTEMPTS {
            return Err(ExpandError::NotEnoughDistinctValues { needed, available });
        }
        attempts += 1;
        let candidate = list.draw(rng);
        if !chosen.contains(candidate) {
            chosen.push(candidate.clone());
        }
    }
    if sorted {
        chosen.sort_by(Atom::sort_key_cmp);
    }
    let indent: String = line.chars().take_while(|c| c.is_whitespace()).collect();
    let stmts: Vec<String> = names.iter().zip(&chosen).map(|(n, v)| format!("{n} = {};", v.render())).collect();
    Ok(format!("{indent}{}", stmts.join(" ")))
}

/// Applies whichever randomization operator the line uses.
pub fn preprocess_line(line: &str, rng: &mut RandomStream) -> Result<String, ExpandError> {
    if is_multi_assign(line) {
        expand_multi_assign(line, rng)
    } else {
        expand_line(line, rng)
    }
}
