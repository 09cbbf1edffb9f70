//! Spike source files: block segmentation, at-line parsing and problem-body
//! splitting.
//!
//! A block opens with `<<kind;` and closes with `>>`, both at column 1.
//! Anything between blocks is discarded. Problem blocks carry an at-line
//! (`@marks; arg; [nalt;]`) separating the command part from the stem.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("block opened here is never closed with `>>`")]
    UnterminatedBlock { line: usize },
    #[error("unknown block kind `{kind}`")]
    UnknownBlockKind { line: usize, kind: String },
    #[error("`<<` at column 1 inside the block opened at line {open_line}")]
    NestedBlock { line: usize, open_line: usize },
    #[error("malformed block header `{header}` (expected `<<kind;`)")]
    MalformedHeader { line: usize, header: String },
    #[error("bad marks `{text}` (expected 1 to 4 non-negative integers)")]
    BadMarks { line: usize, text: String },
    #[error("bad second at-line argument `{text}`: {reason}")]
    BadSecondArg { line: usize, text: String, reason: &'static str },
    #[error("bad alternative-answer count `{text}` (expected an integer in 2..8)")]
    BadNAltOverride { line: usize, text: String },
    #[error("unexpected extra at-line field `{text}`")]
    ExtraAtLineField { line: usize, text: String },
    #[error("problem block has no at-line")]
    MissingAtLine { line: usize },
    #[error("second at-line in one block (first at line {first})")]
    MultipleAtLines { line: usize, first: usize },
    #[error("type T block has no seven-dash line separating false and true statements")]
    MissingSevenDashes { line: usize },
    #[error("type T block has an empty {which} statement bank")]
    EmptyStatementBank { line: usize, which: &'static str },
    #[error("type G block needs exactly one generator name before the at-line")]
    BadGeneratorLine { line: usize },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnterminatedBlock { .. } => "UnterminatedBlock",
            Self::UnknownBlockKind { .. } => "UnknownBlockKind",
            Self::NestedBlock { .. } => "NestedBlock",
            Self::MalformedHeader { .. } => "MalformedHeader",
            Self::BadMarks { .. } => "BadMarks",
            Self::BadSecondArg { .. } => "BadSecondArg",
            Self::BadNAltOverride { .. } => "BadNAltOverride",
            Self::ExtraAtLineField { .. } => "ExtraAtLineField",
            Self::MissingAtLine { .. } => "MissingAtLine",
            Self::MultipleAtLines { .. } => "MultipleAtLines",
            Self::MissingSevenDashes { .. } => "MissingSevenDashes",
            Self::EmptyStatementBank { .. } => "EmptyStatementBank",
            Self::BadGeneratorLine { .. } => "BadGeneratorLine",
        }
    }

    pub fn line(&self) -> usize {
        match *self {
            Self::UnterminatedBlock { line }
            | Self::UnknownBlockKind { line, .. }
            | Self::NestedBlock { line, .. }
            | Self::MalformedHeader { line, .. }
            | Self::BadMarks { line, .. }
            | Self::BadSecondArg { line, .. }
            | Self::BadNAltOverride { line, .. }
            | Self::ExtraAtLineField { line, .. }
            | Self::MissingAtLine { line }
            | Self::MultipleAtLines { line, .. }
            | Self::MissingSevenDashes { line }
            | Self::EmptyStatementBank { line, .. }
            | Self::BadGeneratorLine { line } => line,
        }
    }
}

/// A source file split into lines. Line `n` (1-based) is `lines[n - 1]`;
/// CR before LF is dropped.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: PathBuf,
    pub lines: Vec<String>,
}

impl SourceFile {
    pub fn from_text(path: impl AsRef<Path>, text: &str) -> Self {
        let lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l).to_string()).collect();
        Self { path: path.as_ref().to_path_buf(), lines }
    }

    pub fn line(&self, n: usize) -> &str {
        &self.lines[n - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Text,
    Data,
    ProblemI,
    ProblemR,
    ProblemT,
    ProblemG,
    ProblemH,
    ProblemV,
    ProblemZ,
}

impl BlockKind {
    pub fn from_identifier(ident: &str) -> Option<Self> {
        Some(match ident {
            "text" => Self::Text,
            "data" => Self::Data,
            "problemI" => Self::ProblemI,
            "problemR" => Self::ProblemR,
            "problemT" => Self::ProblemT,
            "problemG" => Self::ProblemG,
            "problemH" => Self::ProblemH,
            "problemV" => Self::ProblemV,
            "problemZ" => Self::ProblemZ,
            _ => return None,
        })
    }

    pub fn identifier(self) -> &'static str {
        match self {
            Self::Text => "text",
            Self::Data => "data",
            Self::ProblemI => "problemI",
            Self::ProblemR => "problemR",
            Self::ProblemT => "problemT",
            Self::ProblemG => "problemG",
            Self::ProblemH => "problemH",
            Self::ProblemV => "problemV",
            Self::ProblemZ => "problemZ",
        }
    }

    pub fn is_problem(self) -> bool {
        !matches!(self, Self::Text | Self::Data)
    }

    /// Question letter for problem kinds (Z included).
    pub fn letter(self) -> Option<char> {
        Some(match self {
            Self::ProblemI => 'I',
            Self::ProblemR => 'R',
            Self::ProblemT => 'T',
            Self::ProblemG => 'G',
            Self::ProblemH => 'H',
            Self::ProblemV => 'V',
            Self::ProblemZ => 'Z',
            Self::Text | Self::Data => return None,
        })
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.identifier())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    /// Raw header line (`<<kind;` plus anything trailing).
    pub header: String,
    pub body_lines: Vec<String>,
    /// Raw terminator line, starting with `>>`.
    pub terminator: String,
    /// Line number of the header.
    pub start_line: usize,
    /// Line number of the terminator.
    pub end_line: usize,
}

impl Block {
    /// Line number of `body_lines[i]`.
    pub fn body_line_no(&self, i: usize) -> usize {
        self.start_line + 1 + i
    }
}

fn parse_header(line: &str, line_no: usize) -> Result<BlockKind, ParseError> {
    let rest = &line[2..];
    let malformed = || ParseError::MalformedHeader { line: line_no, header: line.to_string() };
    let (ident, after) = rest.split_once(';').ok_or_else(malformed)?;
    if !after.trim().is_empty() {
        return Err(malformed());
    }
    let ident = ident.trim();
    if ident.is_empty() || !ident.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(malformed());
    }
    BlockKind::from_identifier(ident)
        .ok_or_else(|| ParseError::UnknownBlockKind { line: line_no, kind: ident.to_string() })
}

/// Splits a source file into its blocks, in source order.
pub fn parse_spike_file(src: &SourceFile) -> Result<Vec<Block>, ParseError> {
    let mut blocks = Vec::new();
    let mut open: Option<(BlockKind, String, usize, Vec<String>)> = None;

    for (idx, line) in src.lines.iter().enumerate() {
        let line_no = idx + 1;
        match open.take() {
            None => {
                if line.starts_with("<<") {
                    let kind = parse_header(line, line_no)?;
                    open = Some((kind, line.clone(), line_no, Vec::new()));
                }
            }
            Some((kind, header, start, mut body)) => {
                if line.starts_with(">>") {
                    blocks.push(Block {
                        kind,
                        header,
                        body_lines: body,
                        terminator: line.clone(),
                        start_line: start,
                        end_line: line_no,
                    });
                } else if line.starts_with("<<") {
                    return Err(ParseError::NestedBlock { line: line_no, open_line: start });
                } else {
                    body.push(line.clone());
                    open = Some((kind, header, start, body));
                }
            }
        }
    }
    if let Some((_, _, start, _)) = open {
        return Err(ParseError::UnterminatedBlock { line: start });
    }
    Ok(blocks)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SecondArg {
    /// Stem parameter expressions (I, R).
    Params(Vec<String>),
    /// Number of statements per question (T, G, H).
    Count(usize),
    /// Correct answer letter (V).
    Letter(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtLine {
    pub marks: Vec<u32>,
    pub second_arg: SecondArg,
    pub nalt_override: Option<usize>,
}

impl AtLine {
    pub fn params(&self) -> &[String] {
        match &self.second_arg {
            SecondArg::Params(p) => p,
            _ => &[],
        }
    }

    pub fn count(&self) -> Option<usize> {
        match self.second_arg {
            SecondArg::Count(k) => Some(k),
            _ => None,
        }
    }
}

/// Splits `text` on commas that are not nested in brackets or quotes.
pub(crate) fn split_top_level_commas(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mask = crate::expand::string_mask(&chars);
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if !mask[i] {
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push(std::mem::take(&mut cur));
                    continue;
                }
                _ => {}
            }
        }
        cur.push(c);
    }
    parts.push(cur);
    parts
}

/// Parses an at-line such as `@3,2; ss,p;  2;` for a problem block of `kind`.
pub fn parse_at_line(line: &str, kind: BlockKind, line_no: usize) -> Result<AtLine, ParseError> {
    let text = line.trim_start();
    let text = text.strip_prefix('@').unwrap_or(text);
    let fields: Vec<&str> = text.split(';').collect();

    let marks_text = fields[0].trim();
    let bad_marks = || ParseError::BadMarks { line: line_no, text: marks_text.to_string() };
    let marks = marks_text
        .split(',')
        .map(|m| m.trim().parse::<u32>().map_err(|_| bad_marks()))
        .collect::<Result<Vec<_>, _>>()?;
    if marks.is_empty() || marks.len() > 4 {
        return Err(bad_marks());
    }

    let second = fields.get(1).map(|s| s.trim()).unwrap_or("");
    let bad_second = |reason| ParseError::BadSecondArg { line: line_no, text: second.to_string(), reason };
    let second_arg = match kind {
        BlockKind::ProblemI | BlockKind::ProblemR => {
            if second.is_empty() {
                SecondArg::Params(Vec::new())
            } else {
                let params: Vec<String> = split_top_level_commas(second).iter().map(|p| p.trim().to_string()).collect();
                if params.iter().any(|p| p.is_empty()) {
                    return Err(bad_second("empty parameter expression"));
                }
                SecondArg::Params(params)
            }
        }
        BlockKind::ProblemT | BlockKind::ProblemG | BlockKind::ProblemH => match second.parse::<usize>() {
            Ok(k) if k > 0 => SecondArg::Count(k),
            _ => return Err(bad_second("expected a positive statement count")),
        },
        BlockKind::ProblemV | BlockKind::ProblemZ => {
            let mut chars = second.chars();
            match (chars.next(), chars.next()) {
                (Some(c @ 'A'..='H'), None) => SecondArg::Letter(c),
                _ => return Err(bad_second("expected a single answer letter A..H")),
            }
        }
        BlockKind::Text | BlockKind::Data => {
            return Err(bad_second("text and data blocks have no at-line"));
        }
    };

    let nalt_override = match fields.get(2).map(|s| s.trim()) {
        None | Some("") => None,
        Some(t) => match t.parse::<usize>() {
            Ok(n) if (2..=8).contains(&n) => Some(n),
            _ => return Err(ParseError::BadNAltOverride { line: line_no, text: t.to_string() }),
        },
    };
    if let Some(extra) = fields.iter().skip(3).map(|s| s.trim()).find(|s| !s.is_empty()) {
        return Err(ParseError::ExtraAtLineField { line: line_no, text: extra.to_string() });
    }

    Ok(AtLine { marks, second_arg, nalt_override })
}

fn is_at_line(line: &str) -> bool {
    line.trim_start().starts_with('@')
}

pub(crate) fn is_seven_dash_line(line: &str) -> bool {
    line.starts_with("-------")
}

/// A problem block split into its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemBody {
    pub kind: BlockKind,
    /// Statement lines (I/R/H); the generator name for G; empty for T and V.
    pub command_lines: Vec<String>,
    /// Source line number of each entry in `command_lines`.
    pub command_line_nos: Vec<usize>,
    pub at: AtLine,
    pub at_line_no: usize,
    pub text_lines: Vec<String>,
    pub false_statements: Vec<String>,
    pub true_statements: Vec<String>,
}

impl ProblemBody {
    pub fn generator_name(&self) -> Option<&str> {
        match self.kind {
            BlockKind::ProblemG => self.command_lines.first().map(String::as_str),
            _ => None,
        }
    }
}

fn bank_lines(lines: &[String]) -> Vec<String> {
    lines.iter().filter(|l| !l.starts_with('%') && !l.trim().is_empty()).map(|l| l.trim_end().to_string()).collect()
}

/// Splits a problem block into command part, at-line and stem.
pub fn split_problem_body(block: &Block) -> Result<ProblemBody, ParseError> {
    let kind = block.kind;
    debug_assert!(kind.is_problem() && kind != BlockKind::ProblemZ);

    let mut at_idx: Option<usize> = None;
    for (i, line) in block.body_lines.iter().enumerate() {
        if is_at_line(line) {
            if let Some(first) = at_idx {
                return Err(ParseError::MultipleAtLines {
                    line: block.body_line_no(i),
                    first: block.body_line_no(first),
                });
            }
            at_idx = Some(i);
        }
    }
    let at_idx = at_idx.ok_or(ParseError::MissingAtLine { line: block.start_line })?;
    let at_line_no = block.body_line_no(at_idx);
    let at = parse_at_line(&block.body_lines[at_idx], kind, at_line_no)?;

    let before = &block.body_lines[..at_idx];
    let text_lines = block.body_lines[at_idx + 1..].to_vec();

    let mut body = ProblemBody {
        kind,
        command_lines: Vec::new(),
        command_line_nos: Vec::new(),
        at,
        at_line_no,
        text_lines,
        false_statements: Vec::new(),
        true_statements: Vec::new(),
    };

    match kind {
        BlockKind::ProblemI | BlockKind::ProblemR | BlockKind::ProblemH => {
            body.command_lines = before.to_vec();
            body.command_line_nos = (0..at_idx).map(|i| block.body_line_no(i)).collect();
        }
        BlockKind::ProblemG => {
            let names: Vec<(usize, &String)> = before
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'))
                .collect();
            match names.as_slice() {
                [(i, name)] => {
                    let name = name.trim().trim_end_matches(';').trim();
                    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                        return Err(ParseError::BadGeneratorLine { line: block.body_line_no(*i) });
                    }
                    body.command_lines = vec![name.to_string()];
                    body.command_line_nos = vec![block.body_line_no(*i)];
                }
                _ => return Err(ParseError::BadGeneratorLine { line: block.start_line }),
            }
        }
        BlockKind::ProblemT => {
            let dash = before
                .iter()
                .position(|l| is_seven_dash_line(l))
                .ok_or(ParseError::MissingSevenDashes { line: block.start_line })?;
            body.false_statements = bank_lines(&before[..dash]);
            body.true_statements = bank_lines(&before[dash + 1..]);
            if body.false_statements.is_empty() {
                return Err(ParseError::EmptyStatementBank { line: block.start_line, which: "false" });
            }
            if body.true_statements.is_empty() {
                return Err(ParseError::EmptyStatementBank { line: block.start_line, which: "true" });
            }
        }
        BlockKind::ProblemV => {}
        BlockKind::Text | BlockKind::Data | BlockKind::ProblemZ => unreachable!(),
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(text: &str) -> SourceFile {
        SourceFile::from_text("test.spk", text)
    }

    const TWO_BLOCKS: &str = "\
<<data;
  p={7,11,13};
  g=randi(p-1,1,3);
  sg=PolyToLaTeXDesc(g);
>>

<<problemI;
  f=randi(p-1,1,2);
  answer('$%s$', sf);
@2,0; sf,sg,sh,sg,p,sg;
Find the product of elements $%s$ and $%s$.
>>
";

    #[test]
    fn two_block_source() {
        let blocks = parse_spike_file(&src(TWO_BLOCKS)).unwrap();
        let kinds: Vec<_> = blocks.iter().map(|b| b.kind).collect();
        assert_eq!(kinds, vec![BlockKind::Data, BlockKind::ProblemI]);
        assert_eq!(blocks[0].body_lines.len(), 3);
        assert_eq!(blocks[1].start_line, 7);
    }

    #[test]
    fn empty_file_has_no_blocks() {
        assert!(parse_spike_file(&src("")).unwrap().is_empty());
    }

    #[test]
    fn problem_z_is_kept_as_its_own_kind() {
        let text = "<<problemI;\n@1;\nA\n>>\n<<problemZ;\nwhatever\n>>\n<<problemI;\n@1;\nB\n>>\n";
        let kinds: Vec<_> = parse_spike_file(&src(text)).unwrap().iter().map(|b| b.kind).collect();
        assert_eq!(kinds, vec![BlockKind::ProblemI, BlockKind::ProblemZ, BlockKind::ProblemI]);
    }

    #[test]
    fn brackets_off_column_one_are_text() {
        let text = " <<text;\nfoo\n<<text;\n a << b >> c\n >>\n>>\n";
        let blocks = parse_spike_file(&src(text)).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].body_lines, vec![" a << b >> c", " >>"]);
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse_spike_file(&src("\n<<data;\nx=1;\n")), Err(ParseError::UnterminatedBlock { line: 2 }));
        assert!(matches!(
            parse_spike_file(&src("<<problemQ;\n>>\n")),
            Err(ParseError::UnknownBlockKind { line: 1, .. })
        ));
        assert_eq!(
            parse_spike_file(&src("<<data;\n<<text;\n>>\n")),
            Err(ParseError::NestedBlock { line: 2, open_line: 1 })
        );
        assert!(matches!(parse_spike_file(&src("<<data\n>>\n")), Err(ParseError::MalformedHeader { line: 1, .. })));
    }

    #[test]
    fn header_allows_trailing_spaces_and_crlf() {
        let blocks = parse_spike_file(&src("<<text;   \r\nhello\r\n>>;\r\n")).unwrap();
        assert_eq!(blocks[0].kind, BlockKind::Text);
        assert_eq!(blocks[0].body_lines, vec!["hello"]);
        assert_eq!(blocks[0].terminator, ">>;");
    }

    #[test]
    fn at_line_sum_example() {
        let at = parse_at_line("@2; a,b;", BlockKind::ProblemI, 1).unwrap();
        assert_eq!(at.marks, vec![2]);
        assert_eq!(at.params(), ["a", "b"]);
        assert_eq!(at.nalt_override, None);
    }

    #[test]
    fn at_line_with_override() {
        let at = parse_at_line("@3,2; ss,p;  2;", BlockKind::ProblemI, 1).unwrap();
        assert_eq!(at.marks, vec![3, 2]);
        assert_eq!(at.params(), ["ss", "p"]);
        assert_eq!(at.nalt_override, Some(2));
    }

    #[test]
    fn at_line_verbatim_letter() {
        let at = parse_at_line("@2,1; D;", BlockKind::ProblemV, 1).unwrap();
        assert_eq!(at.marks, vec![2, 1]);
        assert_eq!(at.second_arg, SecondArg::Letter('D'));
    }

    #[test]
    fn at_line_params_keep_calls_together() {
        let at = parse_at_line("@1,4; a(1),a(2), f(x,y), 'p,q';", BlockKind::ProblemI, 1).unwrap();
        assert_eq!(at.params(), ["a(1)", "a(2)", "f(x,y)", "'p,q'"]);
    }

    #[test]
    fn at_line_errors() {
        let k = BlockKind::ProblemI;
        assert!(matches!(parse_at_line("@; a;", k, 3), Err(ParseError::BadMarks { line: 3, .. })));
        assert!(matches!(parse_at_line("@1,2,3,4,5; a;", k, 1), Err(ParseError::BadMarks { .. })));
        assert!(matches!(parse_at_line("@-1; a;", k, 1), Err(ParseError::BadMarks { .. })));
        assert!(matches!(parse_at_line("@1.5; a;", k, 1), Err(ParseError::BadMarks { .. })));
        assert!(matches!(parse_at_line("@1; 0;", BlockKind::ProblemT, 1), Err(ParseError::BadSecondArg { .. })));
        assert!(matches!(parse_at_line("@1; Q;", BlockKind::ProblemV, 1), Err(ParseError::BadSecondArg { .. })));
        assert!(matches!(parse_at_line("@1; a; 9;", k, 1), Err(ParseError::BadNAltOverride { .. })));
        assert!(matches!(parse_at_line("@1; a; 1;", k, 1), Err(ParseError::BadNAltOverride { .. })));
        assert!(matches!(parse_at_line("@1; a; 3; x;", k, 1), Err(ParseError::ExtraAtLineField { .. })));
    }

    #[test]
    fn zero_marks_are_legal() {
        let at = parse_at_line("@0; a;", BlockKind::ProblemI, 1).unwrap();
        assert_eq!(at.marks, vec![0]);
    }

    const CARNIVORES: &str = "\
<<problemT;
Antelope
Zebra
Giraffe
Rabbit
Hippopotamus
Elephant
-------
Tiger
Wolf
Lion
Cheetah
Bobcat
Cat
Coyote
@2; 4;
How many of the following animals are carnivores?
>>
";

    #[test]
    fn carnivore_bank() {
        let blocks = parse_spike_file(&src(CARNIVORES)).unwrap();
        let body = split_problem_body(&blocks[0]).unwrap();
        assert_eq!(body.false_statements.len(), 6);
        assert_eq!(body.true_statements.len(), 7);
        assert_eq!(body.at.count(), Some(4));
        assert_eq!(body.at.marks, vec![2]);
        assert_eq!(body.text_lines, vec!["How many of the following animals are carnivores?"]);
    }

    #[test]
    fn bank_drops_percent_lines_and_accepts_long_dash_rows() {
        let text = "<<problemT;\nA\n%B\nC\n------------------------\n%D\nE\n@1; 2;\nQ?\n>>\n";
        let blocks = parse_spike_file(&src(text)).unwrap();
        let body = split_problem_body(&blocks[0]).unwrap();
        assert_eq!(body.false_statements, vec!["A", "C"]);
        assert_eq!(body.true_statements, vec!["E"]);
    }

    #[test]
    fn verbatim_body_has_no_command_part() {
        let text = "<<problemV;\n@2,1; D;\nWhich is a metal?\n\n (A) \\ $O$ \\quad\n>>\n";
        let blocks = parse_spike_file(&src(text)).unwrap();
        let body = split_problem_body(&blocks[0]).unwrap();
        assert!(body.command_lines.is_empty());
        assert_eq!(body.text_lines, vec!["Which is a metal?", "", " (A) \\ $O$ \\quad"]);
    }

    #[test]
    fn command_and_text_split() {
        let blocks = parse_spike_file(&src(TWO_BLOCKS)).unwrap();
        let body = split_problem_body(&blocks[1]).unwrap();
        assert_eq!(body.command_lines.len(), 2);
        assert_eq!(body.command_line_nos, vec![8, 9]);
        assert_eq!(body.at_line_no, 10);
        assert_eq!(body.text_lines.len(), 1);
    }

    #[test]
    fn at_sign_inside_stem_is_inert() {
        let text = "<<problemV;\n@1; A;\nMail me at x@y.org\n>>\n";
        let blocks = parse_spike_file(&src(text)).unwrap();
        assert!(split_problem_body(&blocks[0]).is_ok());
    }

    #[test]
    fn body_errors() {
        let missing = "<<problemI;\na=1;\nstem\n>>\n";
        let b = parse_spike_file(&src(missing)).unwrap();
        assert_eq!(split_problem_body(&b[0]), Err(ParseError::MissingAtLine { line: 1 }));

        let twice = "<<problemI;\n@1; a;\n  @2; b;\n>>\n";
        let b = parse_spike_file(&src(twice)).unwrap();
        assert_eq!(split_problem_body(&b[0]), Err(ParseError::MultipleAtLines { line: 3, first: 2 }));

        let nodash = "<<problemT;\nA\nB\n@1; 1;\nQ\n>>\n";
        let b = parse_spike_file(&src(nodash)).unwrap();
        assert_eq!(split_problem_body(&b[0]), Err(ParseError::MissingSevenDashes { line: 1 }));

        let two_gens = "<<problemG;\nFoo\nBar\n@1; 2;\nQ\n>>\n";
        let b = parse_spike_file(&src(two_gens)).unwrap();
        assert!(matches!(split_problem_body(&b[0]), Err(ParseError::BadGeneratorLine { .. })));
    }

    #[test]
    fn generator_name_is_trimmed() {
        let text = "<<problemG;\n GetEvenInteger\n@1; 5;\nHow many are even?\n>>\n";
        let b = parse_spike_file(&src(text)).unwrap();
        let body = split_problem_body(&b[0]).unwrap();
        assert_eq!(body.generator_name(), Some("GetEvenInteger"));
    }
}
