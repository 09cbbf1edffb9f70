//! Project files on disk and the per-student assignment cycle.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::blocks::{
    is_seven_dash_line, parse_spike_file, split_problem_body, Block, BlockKind, ParseError, ProblemBody, SourceFile,
};
use crate::emit::{emit_assignment_file, emit_question_latex, EmitError, KeyRecord, BEGIN_DOCUMENT, END_DOCUMENT};
use crate::engines::{build_question, estimate_volume, expand_and_execute, EngineError, VolumeEstimate};
use crate::interp::{Environment, FunctionDef, FunctionRegistry, InterpError};
use crate::rng::RandomStream;

pub const DOCUMENT_CLASS: &str = "\\documentclass";
/// Default look of the per-student separator; a top-file may define its own.
pub const STUDENT_HEADER_MACRO: &str =
    "\\providecommand{\\studentheader}[1]{\\newpage\\noindent Student ID: #1\\par\\bigskip}";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectLayout {
    pub root: PathBuf,
    pub topic: String,
    pub assignment: u32,
}

impl ProjectLayout {
    pub fn new(root: impl Into<PathBuf>, topic: impl Into<String>, assignment: u32) -> Self {
        Self { root: root.into(), topic: topic.into(), assignment }
    }

    fn topic_dir(&self) -> PathBuf {
        self.root.join(&self.topic)
    }

    pub fn spk_path(&self) -> PathBuf {
        self.topic_dir().join(format!("{}A{}.spk", self.topic, self.assignment))
    }

    pub fn roster_path(&self) -> PathBuf {
        self.topic_dir().join(format!("{}.txt", self.topic))
    }

    pub fn topfile_path(&self) -> PathBuf {
        self.root.join("topfile.tex")
    }

    pub fn output_path(&self) -> PathBuf {
        self.topic_dir().join(format!("{}A{}.tex", self.topic, self.assignment))
    }

    pub fn utils_dir(&self) -> PathBuf {
        self.root.join("Utils")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProjectError {
    #[error("cannot read or write: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("refusing to overwrite the existing output file")]
    OutputExists { path: PathBuf },
    #[error("roster has no seven-dash line ending the list of student IDs")]
    MissingSentinel { path: PathBuf },
    #[error("top-file has no line starting with `\\documentclass`")]
    NoDocumentClass { path: PathBuf },
    #[error("top-file has no `\\begin{{document}}` line")]
    NoBeginDocument { path: PathBuf },
    #[error("{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("function file: {source}")]
    FunctionFile { path: PathBuf, source: InterpError },
    #[error("top-file script: {source}")]
    Script { path: PathBuf, source: Box<EngineError> },
    #[error("{}{source}", context(.student.as_deref(), *.block))]
    Block { path: PathBuf, student: Option<String>, block: usize, source: Box<EngineError> },
    #[error("{source}")]
    Emit { path: PathBuf, source: EmitError },
    #[error("block {block} is a {kind} block; volume estimates need a problemI or problemR block")]
    NotAnIRBlock { path: PathBuf, block: usize, line: usize, kind: BlockKind },
    #[error("there is no block {block}; the file has {count}")]
    NoSuchBlock { path: PathBuf, block: usize, count: usize },
}

fn context(student: Option<&str>, block: usize) -> String {
    match student {
        Some(id) => format!("student {id}, block {block}: "),
        None => format!("block {block}: "),
    }
}

impl ProjectError {
    pub fn code(&self) -> &'static str {
        match self {
            ProjectError::Io { .. } => "IoError",
            ProjectError::OutputExists { .. } => "OutputExists",
            ProjectError::MissingSentinel { .. } => "MissingSentinel",
            ProjectError::NoDocumentClass { .. } => "NoDocumentClass",
            ProjectError::NoBeginDocument { .. } => "NoBeginDocument",
            ProjectError::Parse { source, .. } => source.code(),
            ProjectError::FunctionFile { source, .. } => source.code(),
            ProjectError::Script { source, .. } | ProjectError::Block { source, .. } => source.code(),
            ProjectError::Emit { source, .. } => source.code(),
            ProjectError::NotAnIRBlock { .. } => "NotAnIRBlock",
            ProjectError::NoSuchBlock { .. } => "NoSuchBlock",
        }
    }

    pub fn path(&self) -> &Path {
        match self {
            ProjectError::Io { path, .. }
            | ProjectError::OutputExists { path }
            | ProjectError::MissingSentinel { path }
            | ProjectError::NoDocumentClass { path }
            | ProjectError::NoBeginDocument { path }
            | ProjectError::Parse { path, .. }
            | ProjectError::FunctionFile { path, .. }
            | ProjectError::Script { path, .. }
            | ProjectError::Block { path, .. }
            | ProjectError::Emit { path, .. }
            | ProjectError::NotAnIRBlock { path, .. }
            | ProjectError::NoSuchBlock { path, .. } => path,
        }
    }

    /// 1-based line, or 0 when the error concerns the file as a whole.
    pub fn line(&self) -> usize {
        match self {
            ProjectError::Parse { source, .. } => source.line(),
            ProjectError::Script { source, .. } | ProjectError::Block { source, .. } => source.line(),
            ProjectError::NotAnIRBlock { line, .. } => *line,
            _ => 0,
        }
    }

    /// Problems reading or writing files, as opposed to problems in their content.
    pub fn is_io(&self) -> bool {
        matches!(self, ProjectError::Io { .. } | ProjectError::OutputExists { .. })
    }

    /// Single-line `file:line: code: message` form.
    pub fn diagnostic(&self) -> String {
        format!("{}:{}: {}: {}", self.path().display(), self.line(), self.code(), self)
    }
}

fn read(path: &Path) -> Result<String, ProjectError> {
    fs::read_to_string(path).map_err(|source| ProjectError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Roster {
    pub student_ids: Vec<String>,
}

/// IDs are the non-blank lines before the first seven-dash line. Returns
/// `None` when there is no such line.
pub fn parse_roster(text: &str) -> Option<Roster> {
    let mut student_ids = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if is_seven_dash_line(line) {
            return Some(Roster { student_ids });
        }
        if !line.is_empty() {
            student_ids.push(line.to_string());
        }
    }
    None
}

pub fn load_roster(path: &Path) -> Result<Roster, ProjectError> {
    parse_roster(&read(path)?).ok_or_else(|| ProjectError::MissingSentinel { path: path.to_path_buf() })
}

/// Top-file split at its `\documentclass` line.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TopFile {
    /// Script statements; `script_lines[i]` is line `i + 1` of the file.
    pub script_lines: Vec<String>,
    pub latex_lines: Vec<String>,
}

pub fn parse_topfile(text: &str) -> Option<TopFile> {
    let lines: Vec<String> = SourceFile::from_text("", text).lines;
    let split = lines.iter().position(|l| l.starts_with(DOCUMENT_CLASS))?;
    Some(TopFile { script_lines: lines[..split].to_vec(), latex_lines: lines[split..].to_vec() })
}

pub fn load_topfile(path: &Path) -> Result<TopFile, ProjectError> {
    parse_topfile(&read(path)?).ok_or_else(|| ProjectError::NoDocumentClass { path: path.to_path_buf() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("no `\\begin{{document}}` line")]
pub struct NoBeginDocument;

/// Inserts `\topiccode` and `\NAss` definitions right before `\begin{document}`.
pub fn inject_doc_macros(latex_lines: &[String], topic_code: &str, n: u32) -> Result<String, NoBeginDocument> {
    let at = latex_lines.iter().position(|l| l.trim_start().starts_with(BEGIN_DOCUMENT)).ok_or(NoBeginDocument)?;
    let mut out = Vec::with_capacity(latex_lines.len() + 2);
    out.extend(latex_lines[..at].iter().cloned());
    out.push(format!("\\newcommand{{\\topiccode}}{{{topic_code}}}"));
    out.push(format!("\\newcommand{{\\NAss}}{{{n}}}"));
    out.extend(latex_lines[at..].iter().cloned());
    let mut text = out.join("\n");
    text.push('\n');
    Ok(text)
}

/// Loads every `*.m` file in `dir`, registering each under its file name.
/// A missing directory yields an empty registry.
pub fn load_functions(dir: &Path) -> Result<FunctionRegistry, ProjectError> {
    let mut registry = FunctionRegistry::new();
    let entries = match fs::read_dir(dir) {
        Ok(entries) => entries,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(registry),
        Err(source) => return Err(ProjectError::Io { path: dir.to_path_buf(), source }),
    };
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| ProjectError::Io { path: dir.to_path_buf(), source })?;
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "m") && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    for path in paths {
        let text = read(&path)?;
        let mut def =
            FunctionDef::parse(&text).map_err(|source| ProjectError::FunctionFile { path: path.clone(), source })?;
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            def.name = stem.to_string();
        }
        registry.insert(def);
    }
    Ok(registry)
}

/// Everything needed to compile one assignment except the roster.
#[derive(Debug, Clone)]
pub struct Project {
    pub layout: ProjectLayout,
    pub topfile: TopFile,
    pub source: SourceFile,
    pub blocks: Vec<Block>,
    pub functions: Arc<FunctionRegistry>,
}

impl Project {
    pub fn load(layout: ProjectLayout) -> Result<Self, ProjectError> {
        let topfile = load_topfile(&layout.topfile_path())?;
        Self::load_with_topfile(layout, topfile)
    }

    /// Like [`Project::load`], but a missing top-file is treated as empty.
    pub fn load_lenient(layout: ProjectLayout) -> Result<Self, ProjectError> {
        let path = layout.topfile_path();
        let topfile = if path.exists() { load_topfile(&path)? } else { TopFile::default() };
        Self::load_with_topfile(layout, topfile)
    }

    fn load_with_topfile(layout: ProjectLayout, topfile: TopFile) -> Result<Self, ProjectError> {
        let spk = layout.spk_path();
        let source = SourceFile::from_text(&spk, &read(&spk)?);
        let blocks = parse_spike_file(&source).map_err(|source| ProjectError::Parse { path: spk.clone(), source })?;
        let functions = Arc::new(load_functions(&layout.utils_dir())?);
        Ok(Self { layout, topfile, source, blocks, functions })
    }

    fn spk(&self) -> PathBuf {
        self.layout.spk_path()
    }

    /// Runs the top-file script once and returns the resulting environment,
    /// with the spike variables read back into its config.
    pub fn run_topfile_script(&self) -> Result<Environment, ProjectError> {
        let path = self.layout.topfile_path();
        let mut env = Environment::new(Arc::clone(&self.functions));
        env.publish_config();
        let nos: Vec<usize> = (1..=self.topfile.script_lines.len()).collect();
        let mut rng = RandomStream::new(0);
        expand_and_execute(&self.topfile.script_lines, &nos, &mut env, &mut rng)
            .map_err(|source| ProjectError::Script { path: path.clone(), source: Box::new(source) })?;
        env.sync_config().map_err(|source| ProjectError::Script {
            path,
            source: Box::new(EngineError::Interp { line: nos.last().copied().unwrap_or(0), source }),
        })?;
        Ok(env)
    }

    fn prepare(&self, index: usize) -> Result<Step, ProjectError> {
        let block = &self.blocks[index];
        Ok(match block.kind {
            BlockKind::Text => Step::Text(block.body_lines.join("\n")),
            BlockKind::Data => {
                let nos = (0..block.body_lines.len()).map(|i| block.body_line_no(i)).collect();
                Step::Data { lines: block.body_lines.clone(), nos }
            }
            BlockKind::ProblemZ => Step::Skip,
            _ => Step::Problem(
                split_problem_body(block).map_err(|source| ProjectError::Parse { path: self.spk(), source })?,
            ),
        })
    }

    fn run_data(
        &self,
        step_lines: &[String],
        nos: &[usize],
        env: &mut Environment,
        rng: &mut RandomStream,
        student: Option<&str>,
        block: usize,
    ) -> Result<(), ProjectError> {
        expand_and_execute(step_lines, nos, env, rng).map_err(|source| ProjectError::Block {
            path: self.spk(),
            student: student.map(str::to_string),
            block,
            source: Box::new(source),
        })?;
        env.sync_config().map_err(|source| ProjectError::Block {
            path: self.spk(),
            student: student.map(str::to_string),
            block,
            source: Box::new(EngineError::Interp { line: self.blocks[block - 1].start_line, source }),
        })
    }
}

enum Step {
    Text(String),
    Data { lines: Vec<String>, nos: Vec<usize> },
    Problem(ProblemBody),
    Skip,
}

/// A compiled assignment file and its answer key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub text: String,
    pub keys: Vec<KeyRecord>,
    pub students: usize,
}

/// Runs the whole source once per student and assembles the output file.
///
/// The top-file script runs once. Every student starts from a copy of the
/// environment it left behind, with spike variables carried over from the
/// previous student. The random stream is seeded from `seed_override`, else
/// from `rseed`.
pub fn run_assignment_cycle(
    project: &Project,
    roster: &Roster,
    seed_override: Option<u64>,
) -> Result<Assignment, ProjectError> {
    let base = project.run_topfile_script()?;
    let steps = (0..project.blocks.len()).map(|i| project.prepare(i)).collect::<Result<Vec<_>, _>>()?;
    let mut rng = RandomStream::new(seed_override.unwrap_or(base.config.rseed));
    let mut config = base.config.clone();
    let mut per_student = Vec::with_capacity(roster.student_ids.len());
    let mut keys = Vec::new();

    for id in &roster.student_ids {
        let mut env = base.clone();
        env.config = config.clone();
        env.publish_config();
        let mut rendered = Vec::new();
        let mut question_number = 0;
        for (i, step) in steps.iter().enumerate() {
            let block = i + 1;
            match step {
                Step::Text(text) => rendered.push(text.clone()),
                Step::Data { lines, nos } => project.run_data(lines, nos, &mut env, &mut rng, Some(id), block)?,
                Step::Skip => {}
                Step::Problem(body) => {
                    for _ in 0..env.config.n_repeat {
                        let q = build_question(body, &env, &mut rng).map_err(|source| ProjectError::Block {
                            path: project.spk(),
                            student: Some(id.clone()),
                            block,
                            source: Box::new(source),
                        })?;
                        question_number += 1;
                        keys.push(KeyRecord::for_question(id, question_number, &q));
                        rendered.push(emit_question_latex(&q));
                    }
                }
            }
        }
        config = env.config.clone();
        per_student.push((id.clone(), rendered));
    }

    let header = assignment_header(project)?;
    let text = emit_assignment_file(&header, &per_student, &keys)
        .map_err(|source| ProjectError::Emit { path: project.layout.topfile_path(), source })?;
    Ok(Assignment { text, keys, students: per_student.len() })
}

/// The top-file's LaTeX part up to `\end{document}`, with the document macros
/// and the default per-student header definition injected.
fn assignment_header(project: &Project) -> Result<String, ProjectError> {
    let path = project.layout.topfile_path();
    let mut latex: Vec<String> =
        project.topfile.latex_lines.iter().take_while(|l| !l.trim_start().starts_with(END_DOCUMENT)).cloned().collect();
    if let Some(at) = latex.iter().position(|l| l.trim_start().starts_with(BEGIN_DOCUMENT)) {
        latex.insert(at, STUDENT_HEADER_MACRO.to_string());
    }
    inject_doc_macros(&latex, &project.layout.topic, project.layout.assignment)
        .map_err(|_| ProjectError::NoBeginDocument { path })
}

/// Outcome of dry-running one block.
#[derive(Debug)]
pub struct BlockReport {
    pub index: usize,
    pub kind: BlockKind,
    pub line: usize,
    pub result: Result<(), ProjectError>,
}

/// Splits and dry-runs every block once for a single anonymous student, with
/// a throwaway random stream. Later blocks still run after a failure.
pub fn check_blocks(project: &Project) -> Result<Vec<BlockReport>, ProjectError> {
    let mut env = project.run_topfile_script()?;
    let mut rng = RandomStream::new(0);
    let mut reports = Vec::with_capacity(project.blocks.len());
    for (i, block) in project.blocks.iter().enumerate() {
        let index = i + 1;
        let result = project.prepare(i).and_then(|step| match step {
            Step::Text(_) | Step::Skip => Ok(()),
            Step::Data { lines, nos } => project.run_data(&lines, &nos, &mut env, &mut rng, None, index),
            Step::Problem(body) => build_question(&body, &env, &mut rng).map(|_| ()).map_err(|source| {
                ProjectError::Block { path: project.spk(), student: None, block: index, source: Box::new(source) }
            }),
        });
        reports.push(BlockReport { index, kind: block.kind, line: block.start_line, result });
    }
    Ok(reports)
}

/// Estimates the volume of I/R block `index` (1-based over all blocks), after
/// running the top-file script and every data block before it.
pub fn block_volume(
    project: &Project,
    index: usize,
    samples: usize,
    seed_override: Option<u64>,
) -> Result<VolumeEstimate, ProjectError> {
    let count = project.blocks.len();
    if index == 0 || index > count {
        return Err(ProjectError::NoSuchBlock { path: project.spk(), block: index, count });
    }
    let target = &project.blocks[index - 1];
    if !matches!(target.kind, BlockKind::ProblemI | BlockKind::ProblemR) {
        return Err(ProjectError::NotAnIRBlock {
            path: project.spk(),
            block: index,
            line: target.start_line,
            kind: target.kind,
        });
    }
    let mut env = project.run_topfile_script()?;
    let mut rng = RandomStream::new(seed_override.unwrap_or(env.config.rseed));
    for i in 0..index - 1 {
        if let Step::Data { lines, nos } = project.prepare(i)? {
            project.run_data(&lines, &nos, &mut env, &mut rng, None, i + 1)?;
        }
    }
    let Step::Problem(body) = project.prepare(index - 1)? else {
        unreachable!("I/R blocks prepare to problems");
    };
    estimate_volume(&body, &env, samples, &mut rng).map_err(|source| ProjectError::Block {
        path: project.spk(),
        student: None,
        block: index,
        source: Box::new(source),
    })
}

/// Writes `text` to `path`, refusing to replace an existing file when
/// `no_clobber` is set.
pub fn write_output(path: &Path, text: &str, no_clobber: bool) -> Result<(), ProjectError> {
    if no_clobber && path.exists() {
        return Err(ProjectError::OutputExists { path: path.to_path_buf() });
    }
    fs::write(path, text).map_err(|source| ProjectError::Io { path: path.to_path_buf(), source })
}
