//! LaTeX serialization of questions and assignments, plus the answer key
//! appended after `\end{document}`.

use std::fmt;
use std::str::FromStr;

use crate::engines::{option_letter, QuestionInstance};

pub const KEY_PREFIX: &str = "%%SPIKE-KEY";
pub const BEGIN_DOCUMENT: &str = "\\begin{document}";
pub const END_DOCUMENT: &str = "\\end{document}";

/// Marking record for one question of one student.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyRecord {
    pub student_id: String,
    pub question_number: usize,
    pub type_letter: char,
    pub marks: Vec<u32>,
    pub correct_letter: char,
}

impl fmt::Display for KeyRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let marks: Vec<String> = self.marks.iter().map(u32::to_string).collect();
        write!(
            f,
            "{KEY_PREFIX} sid={} q={} type={} marks={} correct={}",
            self.student_id,
            self.question_number,
            self.type_letter,
            marks.join(","),
            self.correct_letter
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed key line `{0}`")]
pub struct KeyParseError(pub String);

impl FromStr for KeyRecord {
    type Err = KeyParseError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let bad = || KeyParseError(line.to_string());
        let rest = line.strip_prefix(KEY_PREFIX).ok_or_else(bad)?;
        let fields: Vec<&str> = rest.split_whitespace().collect();
        let [sid, q, ty, marks, correct] = fields.as_slice() else {
            return Err(bad());
        };
        let value =
            |field: &str, key: &str| field.strip_prefix(key).and_then(|v| v.strip_prefix('=')).map(str::to_string);
        let single = |s: String| {
            let mut cs = s.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Some(c),
                _ => None,
            }
        };
        Ok(KeyRecord {
            student_id: value(sid, "sid").filter(|s| !s.is_empty()).ok_or_else(bad)?,
            question_number: value(q, "q").and_then(|v| v.parse().ok()).ok_or_else(bad)?,
            type_letter: value(ty, "type").and_then(single).ok_or_else(bad)?,
            marks: value(marks, "marks")
                .ok_or_else(bad)?
                .split(',')
                .map(|m| m.parse().map_err(|_| bad()))
                .collect::<Result<_, _>>()?,
            correct_letter: value(correct, "correct").and_then(single).ok_or_else(bad)?,
        })
    }
}

impl KeyRecord {
    pub fn for_question(student_id: &str, question_number: usize, q: &QuestionInstance) -> Self {
        Self {
            student_id: student_id.to_string(),
            question_number,
            type_letter: q.type_letter,
            marks: q.marks.clone(),
            correct_letter: q.correct_letter(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmitError {
    #[error("the LaTeX header must contain exactly one `\\begin{{document}}` (found {0})")]
    NoDocumentEnv(usize),
}

impl EmitError {
    pub fn code(&self) -> &'static str {
        "NoDocumentEnv"
    }
}

/// `\problA{L}{n1}` through `\problD{L}{n1}{n2}{n3}{n4}` by number of marks.
pub fn problem_header(correct: char, marks: &[u32]) -> String {
    let variant = char::from(b'A' + marks.len().clamp(1, 4) as u8 - 1);
    let args: String = marks.iter().map(|m| format!("{{{m}}}")).collect();
    format!("\\probl{variant}{{{correct}}}{args}")
}

/// Renders one question. Every line ends with a newline.
pub fn emit_question_latex(q: &QuestionInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!("\\problemtype{{{}}}\n", q.type_letter));
    out.push_str(&problem_header(q.correct_letter(), &q.marks));
    out.push('\n');
    if !q.stem.is_empty() {
        out.push_str(&q.stem);
        out.push('\n');
    }
    match q.type_letter {
        'V' => {}
        'T' | 'G' | 'H' => {
            out.push_str("\n\\begin{enumerate}\n");
            for s in &q.statements {
                out.push_str(&format!("\\item {s}\n"));
            }
            out.push_str("\\end{enumerate}\n\n");
            for (i, opt) in q.options.iter().enumerate() {
                out.push_str(&format!(" ({}) \\ {opt} \\quad\n", option_letter(i)));
            }
        }
        _ => {
            out.push_str("\n\\medskip\\noindent\n");
            for (i, opt) in q.options.iter().enumerate() {
                out.push_str(&format!("({}) \\ {opt} \\quad\n", option_letter(i)));
            }
        }
    }
    out
}

/// Header, each student's blocks, `\end{document}`, then one key line per
/// record. Blocks are separated by a blank line.
pub fn emit_assignment_file(
    header_latex: &str,
    per_student: &[(String, Vec<String>)],
    keys: &[KeyRecord],
) -> Result<String, EmitError> {
    let begins = header_latex.lines().filter(|l| l.trim_start().starts_with(BEGIN_DOCUMENT)).count();
    if begins != 1 {
        return Err(EmitError::NoDocumentEnv(begins));
    }
    let mut out = String::from(header_latex);
    if !out.ends_with('\n') {
        out.push('\n');
    }
    for (id, blocks) in per_student {
        out.push_str(&format!("\n\\studentheader{{{id}}}\n"));
        for block in blocks {
            out.push('\n');
            out.push_str(block);
            if !block.ends_with('\n') {
                out.push('\n');
            }
        }
    }
    out.push('\n');
    out.push_str(END_DOCUMENT);
    out.push('\n');
    for k in keys {
        out.push_str(&k.to_string());
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn question(letter: char, marks: Vec<u32>) -> QuestionInstance {
        QuestionInstance {
            type_letter: letter,
            stem: "Stem".into(),
            statements: vec![],
            truths: vec![],
            options: vec!["1".into(), "2".into()],
            correct_index: 1,
            marks,
        }
    }

    #[test]
    fn header_arity() {
        assert_eq!(problem_header('D', &[2]), "\\problA{D}{2}");
        assert_eq!(problem_header('C', &[1, 4]), "\\problB{C}{1}{4}");
        assert_eq!(problem_header('E', &[2, 2, 1]), "\\problC{E}{2}{2}{1}");
        assert_eq!(problem_header('A', &[1, 0, 3, 2]), "\\problD{A}{1}{0}{3}{2}");
    }

    #[test]
    fn counting_layout() {
        let mut q = question('T', vec![2]);
        q.statements = vec!["Cat".into(), "Cow".into()];
        q.truths = vec![true, false];
        let text = emit_question_latex(&q);
        assert_eq!(
            text,
            "\\problemtype{T}\n\\problA{B}{2}\nStem\n\n\\begin{enumerate}\n\\item Cat\n\\item Cow\n\\end{enumerate}\n\n (A) \\ 1 \\quad\n (B) \\ 2 \\quad\n"
        );
    }

    #[test]
    fn verbatim_layout() {
        let mut q = question('V', vec![2, 1]);
        q.options.clear();
        q.correct_index = 3;
        assert_eq!(emit_question_latex(&q), "\\problemtype{V}\n\\problB{D}{2}{1}\nStem\n");
    }

    #[test]
    fn key_line_round_trip() {
        let k = KeyRecord {
            student_id: "2006280".into(),
            question_number: 1,
            type_letter: 'I',
            marks: vec![2],
            correct_letter: 'D',
        };
        assert_eq!(k.to_string(), "%%SPIKE-KEY sid=2006280 q=1 type=I marks=2 correct=D");
        assert_eq!(k.to_string().parse::<KeyRecord>().unwrap(), k);
        let multi = KeyRecord { marks: vec![2, 2, 1], ..k };
        assert_eq!(multi.to_string().parse::<KeyRecord>().unwrap(), multi);
        assert!("%%SPIKE-KEY sid=1 q=x type=I marks=2 correct=D".parse::<KeyRecord>().is_err());
        assert!("% comment".parse::<KeyRecord>().is_err());
    }

    #[test]
    fn assignment_file() {
        let header = "\\documentclass{article}\n\\begin{document}\n";
        let students = vec![
            ("1".to_string(), vec!["Intro".to_string(), "Q".to_string()]),
            ("2".to_string(), vec!["Intro".to_string(), "Q".to_string()]),
        ];
        let keys: Vec<KeyRecord> = ["1", "2"]
            .iter()
            .map(|id| KeyRecord {
                student_id: id.to_string(),
                question_number: 1,
                type_letter: 'I',
                marks: vec![1],
                correct_letter: 'A',
            })
            .collect();
        let text = emit_assignment_file(header, &students, &keys).unwrap();
        let (body, tail) = text.split_once("\\end{document}\n").unwrap();
        assert!(body.starts_with(header));
        assert_eq!(body.matches("\\studentheader").count(), 2);
        let tail: Vec<&str> = tail.lines().collect();
        assert_eq!(tail.len(), 2);
        assert!(tail.iter().all(|l| l.starts_with(KEY_PREFIX)));
        assert!(tail.iter().all(|l| l.contains(" q=1 ")));
    }

    #[test]
    fn header_needs_one_document_env() {
        assert_eq!(emit_assignment_file("\\documentclass{x}\n", &[], &[]), Err(EmitError::NoDocumentEnv(0)));
        let twice = "\\begin{document}\n\\begin{document}\n";
        assert_eq!(emit_assignment_file(twice, &[], &[]), Err(EmitError::NoDocumentEnv(2)));
    }
}
