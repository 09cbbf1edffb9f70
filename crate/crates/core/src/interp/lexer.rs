use super::InterpError;
use crate::expand::quote_opens_string;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(f64),
    Str(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    DotStar,
    DotSlash,
    DotCaret,
    Transpose,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Not,
    AndAnd,
    OrOr,
    And,
    Or,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Assign,
    Colon,
    Newline,
}

fn ends_value(t: &Tok) -> bool {
    matches!(t, Tok::Num(_) | Tok::Str(_) | Tok::Ident(_) | Tok::RParen | Tok::RBracket | Tok::Transpose)
}

/// Inside `[...]`, whitespace between two values separates elements, so
/// `[1 -2]` has two elements while `[1 - 2]` has one.
fn starts_element(chars: &[char], i: usize) -> bool {
    let c = chars[i];
    let next = chars.get(i + 1).copied();
    if c.is_ascii_alphanumeric() || c == '_' || c == '(' || c == '[' || c == '\'' {
        return true;
    }
    if c == '.' {
        return next.is_some_and(|n| n.is_ascii_digit());
    }
    if c == '~' {
        return next != Some('=');
    }
    if c == '-' || c == '+' {
        return next.is_some_and(|n| !n.is_whitespace() && n != '=');
    }
    false
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Tok>, InterpError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks: Vec<Tok> = Vec::new();
    // Bracket stack: true for `[`, false for `(`.
    let mut brackets: Vec<bool> = Vec::new();
    let mut i = 0;
    let syntax = |msg: String| InterpError::Syntax(msg);

    while i < chars.len() {
        let c = chars[i];
        if c == ' ' || c == '\t' || c == '\r' {
            let start = i;
            while i < chars.len() && matches!(chars[i], ' ' | '\t' | '\r') {
                i += 1;
            }
            if brackets.last() == Some(&true)
                && i < chars.len()
                && toks.last().is_some_and(ends_value)
                && starts_element(&chars, i)
                && start > 0
            {
                toks.push(Tok::Comma);
            }
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '\n' {
            toks.push(Tok::Newline);
            i += 1;
            continue;
        }
        if c == '.' && chars.get(i + 1) == Some(&'.') && chars.get(i + 2) == Some(&'.') {
            // continuation: skip to end of line including the newline
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                // `1:3` never reaches here, but `2.^x` must not eat the dot
                if chars[i] == '.' && matches!(chars.get(i + 1), Some('*' | '/' | '^' | '\'')) {
                    break;
                }
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse::<f64>().map_err(|_| syntax(format!("bad number `{text}`")))?;
            toks.push(Tok::Num(n));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Ident(chars[start..i].iter().collect()));
            continue;
        }
        if c == '\'' {
            let prev = if i > 0 { Some(chars[i - 1]) } else { None };
            let before = if i > 1 { Some(chars[i - 2]) } else { None };
            if quote_opens_string(prev, before) {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => return Err(syntax("unterminated string".into())),
                        Some('\'') if chars.get(i + 1) == Some(&'\'') => {
                            s.push('\'');
                            i += 2;
                        }
                        Some('\'') => {
                            i += 1;
                            break;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                toks.push(Tok::Str(s));
            } else {
                toks.push(Tok::Transpose);
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('.', Some('*')) => (Tok::DotStar, 2),
            ('.', Some('/')) => (Tok::DotSlash, 2),
            ('.', Some('^')) => (Tok::DotCaret, 2),
            ('.', Some('\'')) => (Tok::Transpose, 2),
            ('=', Some('=')) => (Tok::Eq, 2),
            ('~', Some('=')) | ('!', Some('=')) => (Tok::Ne, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('^', _) => (Tok::Caret, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('~', _) | ('!', _) => (Tok::Not, 1),
            ('&', _) => (Tok::And, 1),
            ('|', _) => (Tok::Or, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            (',', _) => (Tok::Comma, 1),
            (';', _) => (Tok::Semi, 1),
            ('=', _) => (Tok::Assign, 1),
            (':', _) => (Tok::Colon, 1),
            _ => return Err(syntax(format!("unexpected character `{c}`"))),
        };
        match tok {
            Tok::LParen => brackets.push(false),
            Tok::LBracket => brackets.push(true),
            Tok::RParen | Tok::RBracket => {
                brackets.pop();
            }
            _ => {}
        }
        toks.push(tok);
        i += width;
    }
    Ok(toks)
}
