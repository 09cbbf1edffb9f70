use std::collections::HashMap;
use std::sync::Arc;

use super::ast::Stmt;
use super::parser::Parser;
use super::InterpError;

/// A user function loaded from a `.m` file.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub output_names: Vec<String>,
    pub input_names: Vec<String>,
    pub(crate) body: Vec<Stmt>,
}

#[derive(Debug, Clone, Default)]
pub struct FunctionRegistry {
    defs: HashMap<String, Arc<FunctionDef>>,
}

fn is_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn name_list(s: &str) -> Result<Vec<String>, InterpError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|n| {
            let n = n.trim();
            if is_name(n) {
                Ok(n.to_string())
            } else {
                Err(InterpError::Syntax(format!("bad name `{n}` in function header")))
            }
        })
        .collect()
}

/// Parses `function [o1,o2] = name(a1,a2)`, `function o = name(...)` or
/// `function name` into (outputs, name, inputs).
fn parse_header(line: &str) -> Result<(Vec<String>, String, Vec<String>), InterpError> {
    let bad = || InterpError::Syntax(format!("malformed function header `{}`", line.trim()));
    let rest = line.trim().strip_prefix("function").ok_or_else(bad)?;
    if !rest.starts_with(|c: char| c.is_whitespace() || c == '[') {
        return Err(bad());
    }
    let rest = rest.trim().trim_end_matches(';').trim_end();
    let (outputs, rest) = match rest.split_once('=') {
        Some((lhs, rhs)) => {
            let lhs = lhs.trim();
            let outs = match lhs.strip_prefix('[') {
                Some(inner) => name_list(inner.strip_suffix(']').ok_or_else(bad)?)?,
                None => name_list(lhs)?,
            };
            (outs, rhs.trim())
        }
        None => (Vec::new(), rest),
    };
    let (name, inputs) = match rest.split_once('(') {
        Some((name, args)) => {
            let args = args.trim_end().strip_suffix(')').ok_or_else(bad)?;
            (name.trim(), name_list(args)?)
        }
        None => (rest.trim(), Vec::new()),
    };
    if !is_name(name) {
        return Err(bad());
    }
    Ok((outputs, name.to_string(), inputs))
}

impl FunctionDef {
    /// Parses the text of a function file. Leading blank and comment lines
    /// before the header are skipped.
    pub fn parse(text: &str) -> Result<Self, InterpError> {
        let mut lines = text.lines();
        let header = loop {
            match lines.next() {
                None => return Err(InterpError::Syntax("missing function header".into())),
                Some(l) if l.trim().is_empty() || l.trim_start().starts_with('%') => continue,
                Some(l) => break l,
            }
        };
        let (output_names, name, input_names) = parse_header(header)?;
        let rest: Vec<&str> = lines.collect();
        let body = Parser::new(&rest.join("\n"))?.parse_program(true)?;
        Ok(Self { name, output_names, input_names, body })
    }
}

impl FunctionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, def: FunctionDef) {
        self.defs.insert(def.name.clone(), Arc::new(def));
    }

    pub fn get(&self, name: &str) -> Option<Arc<FunctionDef>> {
        self.defs.get(name).cloned()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_forms() {
        let (o, n, i) = parse_header("function [s,b]=GetEvenInteger").unwrap();
        assert_eq!((o, n.as_str(), i), (vec!["s".to_string(), "b".to_string()], "GetEvenInteger", vec![]));
        let (o, n, i) = parse_header("function s = Convert_to_base(x, b)").unwrap();
        assert_eq!((o, n.as_str(), i.len()), (vec!["s".to_string()], "Convert_to_base", 2));
        let (o, n, _) = parse_header("function show").unwrap();
        assert!(o.is_empty());
        assert_eq!(n, "show");
        assert!(parse_header("functional x").is_err());
        assert!(parse_header("function [a,b = f(x)").is_err());
    }

    #[test]
    fn trailing_end_is_optional() {
        let with_end = FunctionDef::parse("function y = f(x)\ny = x + 1;\nend\n").unwrap();
        let without = FunctionDef::parse("function y = f(x)\ny = x + 1;\n").unwrap();
        assert_eq!(with_end.body, without.body);
        let nested = FunctionDef::parse("function y = f(x)\nif x > 0\n y = 1;\nelse\n y = 2;\nend\nend").unwrap();
        assert_eq!(nested.body.len(), 1);
    }
}
