//! Types T, G and H: list k statements and ask how many are true.

use super::{run_command_part, stem_text, EngineError, QuestionInstance, DISTINCT_RETRIES};
use crate::blocks::ProblemBody;
use crate::interp::{call_function, Environment, Value};
use crate::rng::RandomStream;

fn count_of(body: &ProblemBody) -> usize {
    body.at.count().expect("T/G/H at-lines carry a count")
}

/// Options are the true count plus `nalt - 1` other counts from `0..=k`,
/// drawn without replacement, all shuffled.
fn count_options(true_count: usize, k: usize, nalt: usize, rng: &mut RandomStream) -> (Vec<String>, usize) {
    let others: Vec<usize> = (0..=k).filter(|&c| c != true_count).collect();
    let mut values = vec![true_count];
    values.extend(rng.sample_indices(others.len(), nalt - 1).into_iter().map(|i| others[i]));
    rng.shuffle(&mut values);
    let correct_index = values.iter().position(|&v| v == true_count).expect("true count kept");
    (values.iter().map(usize::to_string).collect(), correct_index)
}

fn check_nalt(body: &ProblemBody, k: usize, nalt: usize) -> Result<(), EngineError> {
    if nalt > k + 1 {
        return Err(EngineError::NAltAnsTooLargeForK { line: body.at_line_no, nalt, k });
    }
    Ok(())
}

fn instance(
    body: &ProblemBody,
    statements: Vec<String>,
    truths: Vec<bool>,
    nalt: usize,
    rng: &mut RandomStream,
) -> QuestionInstance {
    let k = statements.len();
    let true_count = truths.iter().filter(|t| **t).count();
    let (options, correct_index) = count_options(true_count, k, nalt, rng);
    QuestionInstance {
        type_letter: body.kind.letter().expect("problem kind"),
        stem: stem_text(&body.text_lines),
        statements,
        truths,
        options,
        correct_index,
        marks: body.at.marks.clone(),
    }
}

/// Collects `k` distinct statements from `next`, retrying duplicates.
fn collect_distinct(
    body: &ProblemBody,
    k: usize,
    mut next: impl FnMut() -> Result<(String, bool), EngineError>,
) -> Result<(Vec<String>, Vec<bool>), EngineError> {
    let mut statements: Vec<String> = Vec::with_capacity(k);
    let mut truths = Vec::with_capacity(k);
    while statements.len() < k {
        let mut attempts = 0;
        loop {
            if attempts == DISTINCT_RETRIES {
                return Err(EngineError::DuplicateStatementExhausted { line: body.at_line_no, k, found: statements });
            }
            attempts += 1;
            let (s, t) = next()?;
            if !statements.contains(&s) {
                statements.push(s);
                truths.push(t);
                break;
            }
        }
    }
    Ok((statements, truths))
}

/// Type T: sample k statements from the false and true banks.
pub fn build_question_t(
    body: &ProblemBody,
    rng: &mut RandomStream,
    nalt: usize,
) -> Result<QuestionInstance, EngineError> {
    let k = count_of(body);
    let bank: Vec<(&String, bool)> = body
        .false_statements
        .iter()
        .map(|s| (s, false))
        .chain(body.true_statements.iter().map(|s| (s, true)))
        .collect();
    for (i, (s, _)) in bank.iter().enumerate() {
        if bank[..i].iter().any(|(t, _)| t == s) {
            return Err(EngineError::DuplicateBankStatement { line: body.at_line_no, statement: (*s).clone() });
        }
    }
    if k > bank.len() {
        return Err(EngineError::KTooLarge { line: body.at_line_no, k, available: bank.len() });
    }
    check_nalt(body, k, nalt)?;
    let picks = rng.sample_indices(bank.len(), k);
    let statements = picks.iter().map(|&i| bank[i].0.clone()).collect();
    let truths = picks.iter().map(|&i| bank[i].1).collect();
    Ok(instance(body, statements, truths, nalt, rng))
}

/// Type G: call the named generator k times.
pub fn build_question_g(
    body: &ProblemBody,
    env: &Environment,
    rng: &mut RandomStream,
    nalt: usize,
) -> Result<QuestionInstance, EngineError> {
    let k = count_of(body);
    check_nalt(body, k, nalt)?;
    let name = body.generator_name().expect("G body names a generator").to_string();
    let line = body.command_line_nos.first().copied().unwrap_or(body.at_line_no);
    let (statements, truths) = collect_distinct(body, k, || {
        let outs = call_function(&name, &[], 2, env, rng).map_err(|source| EngineError::Interp { line, source })?;
        let bad = |reason: &str| EngineError::BadGeneratorSignature { line, name: name.clone(), reason: reason.into() };
        match outs.as_slice() {
            [Value::Str(s), t] => Ok((s.clone(), t.truthy())),
            [_, _] => Err(bad("the first output is not a string")),
            _ => Err(bad("it returned fewer than two outputs")),
        }
    })?;
    Ok(instance(body, statements, truths, nalt, rng))
}

/// Type H: run the command part k times, each contributing `out` and `tf`.
pub fn build_question_h(
    body: &ProblemBody,
    env: &Environment,
    rng: &mut RandomStream,
    nalt: usize,
) -> Result<QuestionInstance, EngineError> {
    let k = count_of(body);
    check_nalt(body, k, nalt)?;
    let (statements, truths) = collect_distinct(body, k, || {
        let scratch = run_command_part(body, env, rng)?;
        match (scratch.out(), scratch.tf()) {
            (Some(out), Some(tf)) => Ok((out, tf)),
            _ => Err(EngineError::MissingOutOrTf { line: body.at_line_no }),
        }
    })?;
    Ok(instance(body, statements, truths, nalt, rng))
}
