use std::collections::HashSet;

use super::{render_stem, run_command_part, EngineError};
use crate::blocks::ProblemBody;
use crate::interp::Environment;
use crate::rng::RandomStream;

/// Answer volumes below this are flagged as too easy to share between students.
pub const VOLUME_WARN_THRESHOLD: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolumeEstimate {
    pub samples: usize,
    pub distinct_stems: usize,
    pub distinct_answers: usize,
}

impl VolumeEstimate {
    pub fn warn(&self) -> bool {
        self.distinct_answers < VOLUME_WARN_THRESHOLD
    }
}

/// Monte Carlo estimate of how many different questions and answers an
/// I/R block can produce.
pub fn estimate_volume(
    body: &ProblemBody,
    env: &Environment,
    samples: usize,
    rng: &mut RandomStream,
) -> Result<VolumeEstimate, EngineError> {
    let mut stems = HashSet::new();
    let mut answers = HashSet::new();
    for _ in 0..samples {
        let scratch = run_command_part(body, env, rng)?;
        let answer = scratch.answer().ok_or(EngineError::MissingAnswer { line: body.at_line_no })?;
        stems.insert(render_stem(&body.text_lines, body.at.params(), &scratch, rng, body.at_line_no)?);
        answers.insert(answer);
    }
    Ok(VolumeEstimate { samples, distinct_stems: stems.len(), distinct_answers: answers.len() })
}
