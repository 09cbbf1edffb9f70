//! Question engines: turn a parsed problem body into a rendered question with
//! its options and correct answer.

mod counting;
mod ir;
mod volume;

pub use counting::{build_question_g, build_question_h, build_question_t};
pub use ir::{build_question_ir, parity_options, R_OPTIONS};
pub use volume::{estimate_volume, VolumeEstimate, VOLUME_WARN_THRESHOLD};

use crate::blocks::{BlockKind, ProblemBody, SecondArg};
use crate::expand::{preprocess_line, ExpandError};
use crate::interp::{eval_expr, execute_line, format_text, Environment, InterpError};
use crate::rng::RandomStream;

/// Attempts allowed per option slot (or statement slot) before giving up on
/// finding a value distinct from those already kept.
pub const DISTINCT_RETRIES: usize = 100;

/// A fully rendered question.
#[derive(Debug, Clone, PartialEq)]
pub struct QuestionInstance {
    pub type_letter: char,
    pub stem: String,
    /// Listed statements for T/G/H, empty otherwise.
    pub statements: Vec<String>,
    /// Truth of each listed statement, parallel to `statements`.
    pub truths: Vec<bool>,
    /// Empty for V, where the author typesets the options in the stem.
    pub options: Vec<String>,
    pub correct_index: usize,
    pub marks: Vec<u32>,
}

impl QuestionInstance {
    pub fn correct_letter(&self) -> char {
        option_letter(self.correct_index)
    }
}

pub fn option_letter(index: usize) -> char {
    char::from(b'A' + index as u8)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("{source}")]
    Expand { line: usize, source: ExpandError },
    #[error("{source}")]
    Interp { line: usize, source: InterpError },
    #[error(
        "{source}; note that a text-part line starting with `%` is a comment and is dropped, \
         so a directive at the start of a line is lost"
    )]
    Stem { line: usize, source: InterpError },
    #[error("bad parameter `{param}`: {source}")]
    Param { line: usize, param: String, source: InterpError },
    #[error("the command part never assigned `answer`")]
    MissingAnswer { line: usize },
    #[error("found only {} distinct answer(s) of {needed} after {DISTINCT_RETRIES} attempts: [{}]", .found.len(), .found.join(", "))]
    DistractorExhausted { line: usize, needed: usize, found: Vec<String> },
    #[error("type R answer `{answer}` contains no digit to vary")]
    NonDigitAnswerTail { line: usize, answer: String },
    #[error("type R questions always have 5 options, but {nalt} were requested")]
    RNAltAnsUnsupported { line: usize, nalt: usize },
    #[error("cannot list {k} statements from a bank of {available}")]
    KTooLarge { line: usize, k: usize, available: usize },
    #[error("{nalt} options requested but counts only range over 0..{k}")]
    NAltAnsTooLargeForK { line: usize, nalt: usize, k: usize },
    #[error("statement bank lists `{statement}` more than once")]
    DuplicateBankStatement { line: usize, statement: String },
    #[error("generator `{name}` must return a statement string and a truth value: {reason}")]
    BadGeneratorSignature { line: usize, name: String, reason: String },
    #[error("found only {} distinct statement(s) of {k} after {DISTINCT_RETRIES} attempts", .found.len())]
    DuplicateStatementExhausted { line: usize, k: usize, found: Vec<String> },
    #[error("the command part must assign both `out` and `tf`")]
    MissingOutOrTf { line: usize },
    #[error("answer letter `{letter}` is not in A..H")]
    BadAnswerLetter { line: usize, letter: char },
}

impl EngineError {
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::Expand { source, .. } => source.code(),
            EngineError::Interp { source, .. } | EngineError::Stem { source, .. } => source.code(),
            EngineError::Param { source, .. } => source.code(),
            EngineError::MissingAnswer { .. } => "MissingAnswer",
            EngineError::DistractorExhausted { .. } => "DistractorExhausted",
            EngineError::NonDigitAnswerTail { .. } => "NonDigitAnswerTail",
            EngineError::RNAltAnsUnsupported { .. } => "RNAltAnsUnsupported",
            EngineError::KTooLarge { .. } => "KTooLarge",
            EngineError::NAltAnsTooLargeForK { .. } => "NAltAnsTooLargeForK",
            EngineError::DuplicateBankStatement { .. } => "DuplicateBankStatement",
            EngineError::BadGeneratorSignature { .. } => "BadGeneratorSignature",
            EngineError::DuplicateStatementExhausted { .. } => "DuplicateStatementExhausted",
            EngineError::MissingOutOrTf { .. } => "MissingOutOrTf",
            EngineError::BadAnswerLetter { .. } => "BadAnswerLetter",
        }
    }

    /// 1-based source line the error is attributed to.
    pub fn line(&self) -> usize {
        match self {
            EngineError::Expand { line, .. }
            | EngineError::Interp { line, .. }
            | EngineError::Stem { line, .. }
            | EngineError::Param { line, .. }
            | EngineError::MissingAnswer { line }
            | EngineError::DistractorExhausted { line, .. }
            | EngineError::NonDigitAnswerTail { line, .. }
            | EngineError::RNAltAnsUnsupported { line, .. }
            | EngineError::KTooLarge { line, .. }
            | EngineError::NAltAnsTooLargeForK { line, .. }
            | EngineError::DuplicateBankStatement { line, .. }
            | EngineError::BadGeneratorSignature { line, .. }
            | EngineError::DuplicateStatementExhausted { line, .. }
            | EngineError::MissingOutOrTf { line }
            | EngineError::BadAnswerLetter { line, .. } => *line,
        }
    }
}

/// Effective option count: the at-line override, else the configured value.
pub fn effective_nalt(body: &ProblemBody, env: &Environment) -> usize {
    body.at.nalt_override.unwrap_or(env.config.nalt_ans)
}

/// Builds one question of the body's kind.
pub fn build_question(
    body: &ProblemBody,
    env: &Environment,
    rng: &mut RandomStream,
) -> Result<QuestionInstance, EngineError> {
    let nalt = effective_nalt(body, env);
    match body.kind {
        BlockKind::ProblemI | BlockKind::ProblemR => build_question_ir(body, env, rng, nalt),
        BlockKind::ProblemT => build_question_t(body, rng, nalt),
        BlockKind::ProblemG => build_question_g(body, env, rng, nalt),
        BlockKind::ProblemH => build_question_h(body, env, rng, nalt),
        BlockKind::ProblemV => build_question_v(body),
        other => unreachable!("{other} blocks are not questions"),
    }
}

/// Text part without its `%` comment lines.
pub(crate) fn stem_text(text_lines: &[String]) -> String {
    text_lines.iter().filter(|l| !l.starts_with('%')).cloned().collect::<Vec<_>>().join("\n")
}

/// Drops `%` comment lines, evaluates the parameters in order and fills the
/// stem's percent directives with them.
pub fn render_stem(
    text_lines: &[String],
    params: &[String],
    env: &Environment,
    rng: &mut RandomStream,
    at_line_no: usize,
) -> Result<String, EngineError> {
    let text = stem_text(text_lines);
    let values = params
        .iter()
        .map(|p| {
            eval_expr(p, env, rng).map_err(|source| EngineError::Param { line: at_line_no, param: p.clone(), source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    format_text(&text, &values).map_err(|source| EngineError::Stem { line: at_line_no, source })
}

/// Expands every line first, then executes them in order on `env`.
/// `line_nos` gives the source line of each entry for error reports.
pub fn expand_and_execute<S: AsRef<str>>(
    lines: &[S],
    line_nos: &[usize],
    env: &mut Environment,
    rng: &mut RandomStream,
) -> Result<(), EngineError> {
    let mut expanded = Vec::with_capacity(lines.len());
    for (line, &no) in lines.iter().zip(line_nos) {
        expanded.push(preprocess_line(line.as_ref(), rng).map_err(|source| EngineError::Expand { line: no, source })?);
    }
    for (line, &no) in expanded.iter().zip(line_nos) {
        execute_line(line, env, rng).map_err(|source| EngineError::Interp { line: no, source })?;
    }
    Ok(())
}

/// Runs the command part on a scratch copy of the student environment. The
/// student environment itself is never modified.
pub(crate) fn run_command_part(
    body: &ProblemBody,
    env: &Environment,
    rng: &mut RandomStream,
) -> Result<Environment, EngineError> {
    let mut scratch = env.clone();
    for name in ["answer", "out", "tf"] {
        scratch.vars.remove(name);
    }
    expand_and_execute(&body.command_lines, &body.command_line_nos, &mut scratch, rng)?;
    Ok(scratch)
}

pub fn build_question_v(body: &ProblemBody) -> Result<QuestionInstance, EngineError> {
    let letter = match body.at.second_arg {
        SecondArg::Letter(c) => c,
        _ => unreachable!("V at-lines carry a letter"),
    };
    if !('A'..='H').contains(&letter) {
        return Err(EngineError::BadAnswerLetter { line: body.at_line_no, letter });
    }
    Ok(QuestionInstance {
        type_letter: 'V',
        stem: stem_text(&body.text_lines),
        statements: Vec::new(),
        truths: Vec::new(),
        options: Vec::new(),
        correct_index: (letter as u8 - b'A') as usize,
        marks: body.at.marks.clone(),
    })
}
