use super::{render_stem, run_command_part, EngineError, QuestionInstance, DISTINCT_RETRIES};
use crate::blocks::{BlockKind, ProblemBody};
use crate::interp::Environment;
use crate::rng::RandomStream;

/// Option count a type R question always has: one per digit of a parity class.
pub const R_OPTIONS: usize = 5;

fn answer_of(body: &ProblemBody, scratch: &Environment) -> Result<String, EngineError> {
    scratch.answer().ok_or(EngineError::MissingAnswer { line: body.at_line_no })
}

/// Type I and R questions.
///
/// Type I reruns the command part to harvest distinct wrong answers and then
/// shuffles. Type R varies the last digit of the correct answer over its
/// parity class and keeps the options in ascending order.
pub fn build_question_ir(
    body: &ProblemBody,
    env: &Environment,
    rng: &mut RandomStream,
    nalt: usize,
) -> Result<QuestionInstance, EngineError> {
    let line = body.at_line_no;
    if body.kind == BlockKind::ProblemR && nalt != R_OPTIONS {
        return Err(EngineError::RNAltAnsUnsupported { line, nalt });
    }
    let scratch = run_command_part(body, env, rng)?;
    let correct = answer_of(body, &scratch)?;
    let stem = render_stem(&body.text_lines, body.at.params(), &scratch, rng, line)?;

    let (options, correct_index) = if body.kind == BlockKind::ProblemR {
        parity_options(&correct).ok_or_else(|| EngineError::NonDigitAnswerTail { line, answer: correct.clone() })?
    } else {
        let mut options = vec![correct];
        while options.len() < nalt {
            let mut attempts = 0;
            loop {
                if attempts == DISTINCT_RETRIES {
                    return Err(EngineError::DistractorExhausted { line, needed: nalt, found: options });
                }
                attempts += 1;
                let rerun = run_command_part(body, env, rng)?;
                let candidate = answer_of(body, &rerun)?;
                if !options.contains(&candidate) {
                    options.push(candidate);
                    break;
                }
            }
        }
        let mut order: Vec<usize> = (0..options.len()).collect();
        rng.shuffle(&mut order);
        let correct_index = order.iter().position(|&i| i == 0).expect("correct answer kept");
        (order.into_iter().map(|i| options[i].clone()).collect(), correct_index)
    };

    Ok(QuestionInstance {
        type_letter: body.kind.letter().expect("problem kind"),
        stem,
        statements: Vec::new(),
        truths: Vec::new(),
        options,
        correct_index,
        marks: body.at.marks.clone(),
    })
}

/// The five strings obtained by replacing the last digit of `answer` with
/// each digit of the same parity, ascending, and the position of the
/// original. Characters after the last digit (such as a closing `$`) are kept.
pub fn parity_options(answer: &str) -> Option<(Vec<String>, usize)> {
    let (pos, digit) = answer.char_indices().rev().find(|(_, c)| c.is_ascii_digit())?;
    let d = digit.to_digit(10).expect("ascii digit");
    let (head, tail) = (&answer[..pos], &answer[pos + 1..]);
    let class: Vec<u32> = (0..10).filter(|x| x % 2 == d % 2).collect();
    let options = class.iter().map(|x| format!("{head}{x}{tail}")).collect();
    Some((options, (d / 2) as usize))
}

#[cfg(test)]
mod tests {
    use super::super::test_util::body;
    use super::*;

    #[test]
    fn parity_classes() {
        let (opts, idx) = parity_options("$0.52066$").unwrap();
        assert_eq!(opts, ["$0.52060$", "$0.52062$", "$0.52064$", "$0.52066$", "$0.52068$"]);
        assert_eq!(idx, 3);
        let (opts, idx) = parity_options("0.4985").unwrap();
        assert_eq!(opts, ["0.4981", "0.4983", "0.4985", "0.4987", "0.4989"]);
        assert_eq!(idx, 2);
        assert!(parity_options("$x$").is_none());
    }

    #[test]
    fn type_i_sum() {
        let b = body("<<problemI;\n  a={10:99};\n  b={10:99};\n  c=a+b;\n  answer('$%d$',c);\n@2; a,b;\nFind the sum of numbers $%d$ and $%d.$\n>>\n");
        let env = Environment::default();
        for seed in 0..20 {
            let mut rng = RandomStream::new(seed);
            let q = build_question_ir(&b, &env, &mut rng, 5).unwrap();
            assert_eq!(q.options.len(), 5);
            let mut sorted = q.options.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), 5);
            // the stem's numbers must add up to the correct option
            let nums: Vec<i64> = q.stem.split('$').filter_map(|s| s.trim_end_matches('.').parse().ok()).collect();
            assert_eq!(format!("${}$", nums[0] + nums[1]), q.options[q.correct_index]);
        }
    }

    #[test]
    fn constant_answer_cannot_yield_distractors() {
        let b = body("<<problemI;\n  answer('7');\n@1;;\nQ\n>>\n");
        let mut rng = RandomStream::new(0);
        let err = build_question_ir(&b, &Environment::default(), &mut rng, 5).unwrap_err();
        assert_eq!(err.code(), "DistractorExhausted");
    }

    #[test]
    fn missing_answer() {
        let b = body("<<problemI;\n  x=1;\n@1;;\nQ\n>>\n");
        let mut rng = RandomStream::new(0);
        let err = build_question_ir(&b, &Environment::default(), &mut rng, 5).unwrap_err();
        assert_eq!(err, EngineError::MissingAnswer { line: 3 });
    }

    #[test]
    fn type_r_rejects_other_option_counts_and_digitless_answers() {
        let b = body("<<problemR;\n  answer('$%.2f$', 0.5);\n@1;;\nQ\n>>\n");
        let mut rng = RandomStream::new(0);
        assert_eq!(
            build_question_ir(&b, &Environment::default(), &mut rng, 4).unwrap_err().code(),
            "RNAltAnsUnsupported"
        );
        let q = build_question_ir(&b, &Environment::default(), &mut rng, 5).unwrap();
        assert_eq!(q.correct_letter(), 'A');
        let b = body("<<problemR;\n  answer('none');\n@1;;\nQ\n>>\n");
        assert_eq!(
            build_question_ir(&b, &Environment::default(), &mut rng, 5).unwrap_err().code(),
            "NonDigitAnswerTail"
        );
    }
}
