//! Interpreter for the MATLAB-like subset used in command parts, top-file
//! scripts and Utils function files.

mod ast;
mod builtins;
mod env;
mod eval;
mod format;
mod functions;
mod lexer;
mod parser;
mod value;

pub use env::{Config, Environment};
pub use eval::{call_function, eval_expr, execute_line, execute_statements, LineError};
pub use format::{format_string, format_text};
pub use functions::{FunctionDef, FunctionRegistry};
pub use value::Value;

/// Nesting limit for user function calls.
pub const MAX_CALL_DEPTH: usize = 64;
/// Iteration cap for a single `while` loop.
pub const LOOP_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InterpError {
    #[error("undefined variable `{0}`")]
    UndefinedVariable(String),
    #[error("undefined function `{0}`")]
    UndefinedFunction(String),
    #[error("type error: {0}")]
    TypeError(String),
    #[error("`while` loop exceeded {LOOP_BUDGET} iterations")]
    LoopBudgetExceeded,
    #[error("index {index} out of range for `{name}` of length {len}")]
    IndexOutOfRange { name: String, index: String, len: usize },
    #[error("format has {directives} directive(s) but {args} argument(s) were given")]
    ArgCountMismatch { directives: usize, args: usize },
    #[error("bad format directive `{0}`")]
    BadDirective(String),
    #[error("function `{function}` did not assign its output `{output}`")]
    MissingOutput { function: String, output: String },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("function calls nested deeper than {MAX_CALL_DEPTH}")]
    RecursionLimit,
    #[error("{0}")]
    UserError(String),
    #[error("`{0}` produced an empty vector")]
    EmptyVector(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    BadArity { name: String, expected: String, got: usize },
}

impl InterpError {
    pub fn code(&self) -> &'static str {
        match self {
            InterpError::UndefinedVariable(_) => "UndefinedVariable",
            InterpError::UndefinedFunction(_) => "UndefinedFunction",
            InterpError::TypeError(_) => "TypeError",
            InterpError::LoopBudgetExceeded => "LoopBudgetExceeded",
            InterpError::IndexOutOfRange { .. } => "IndexOutOfRange",
            InterpError::ArgCountMismatch { .. } => "ArgCountMismatch",
            InterpError::BadDirective(_) => "BadDirective",
            InterpError::MissingOutput { .. } => "MissingOutput",
            InterpError::Syntax(_) => "SyntaxError",
            InterpError::RecursionLimit => "RecursionLimit",
            InterpError::UserError(_) => "UserError",
            InterpError::EmptyVector(_) => "EmptyVector",
            InterpError::BadConfig(_) => "BadConfig",
            InterpError::BadArity { .. } => "BadArity",
        }
    }
}
