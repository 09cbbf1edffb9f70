//! Command-line front end: `generate`, `check` and `volume`.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::engines::VOLUME_WARN_THRESHOLD;
use crate::project::{
    block_volume, check_blocks, load_roster, run_assignment_cycle, write_output, Project, ProjectError, ProjectLayout,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "quizforge", version, about = "Compile randomized multiple-choice assignments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile `<topic>A<N>.spk` into `<topic>A<N>.tex` for every student.
    Generate(CliConfig),
    /// Parse and dry-run every block without writing anything.
    Check(CliConfig),
    /// Estimate how many distinct stems and answers an I/R block produces.
    Volume {
        #[command(flatten)]
        config: CliConfig,
        /// 1-based index of the block among all blocks of the file.
        #[arg(long)]
        block: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CliConfig {
    /// Project root holding `topfile.tex`, `Utils/` and one directory per topic.
    #[arg(long, env = "QUIZFORGE_ROOT", default_value = ".")]
    pub root: PathBuf,
    #[arg(long)]
    pub topic: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub assignment: u32,
    /// Overrides the top-file's `rseed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Keep only the first N students of the roster.
    #[arg(long)]
    pub max_students: Option<usize>,
    /// Refuse to overwrite an existing output file.
    #[arg(long)]
    pub no_clobber: bool,
}

impl CliConfig {
    fn layout(&self) -> ProjectLayout {
        ProjectLayout::new(&self.root, &self.topic, self.assignment)
    }
}

fn fail(err: &ProjectError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "{}", err.diagnostic());
    if err.is_io() {
        EXIT_IO
    } else {
        EXIT_SEMANTIC
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match cli.command {
        Command::Generate(cfg) => cmd_generate(&cfg, stdout, stderr),
        Command::Check(cfg) => cmd_check(&cfg, stdout, stderr),
        Command::Volume { config, block, samples } => cmd_volume(&config, block, samples, stdout, stderr),
    }
}

pub fn cmd_generate(cfg: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let started = Instant::now();
    let layout = cfg.layout();
    let result = (|| {
        let mut roster = load_roster(&layout.roster_path())?;
        if let Some(max) = cfg.max_students {
            roster.student_ids.truncate(max);
        }
        let project = Project::load(layout.clone())?;
        let assignment = run_assignment_cycle(&project, &roster, cfg.seed)?;
        write_output(&layout.output_path(), &assignment.text, cfg.no_clobber)?;
        Ok(assignment)
    })();
    match result {
        Ok(a) => {
            let _ = writeln!(
                stdout,
                "wrote {}: {} students, {} questions, {:.3} s",
                layout.output_path().display(),
                a.students,
                a.keys.len(),
                started.elapsed().as_secs_f64()
            );
            EXIT_OK
        }
        Err(e) => fail(&e, stderr),
    }
}

pub fn cmd_check(cfg: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let reports = match Project::load_lenient(cfg.layout()).and_then(|p| check_blocks(&p)) {
        Ok(r) => r,
        Err(e) => return fail(&e, stderr),
    };
    let mut failed = false;
    for r in &reports {
        match &r.result {
            Ok(()) => {
                let _ = writeln!(stdout, "block {} ({}) at line {}: OK", r.index, r.kind, r.line);
            }
            Err(e) => {
                failed = true;
                let _ = writeln!(stderr, "{}", e.diagnostic());
            }
        }
    }
    if failed {
        EXIT_SEMANTIC
    } else {
        EXIT_OK
    }
}

pub fn cmd_volume(
    cfg: &CliConfig,
    block: usize,
    samples: usize,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let v = match Project::load_lenient(cfg.layout()).and_then(|p| block_volume(&p, block, samples, cfg.seed)) {
        Ok(v) => v,
        Err(e) => return fail(&e, stderr),
    };
    let _ = writeln!(stdout, "samples {}", v.samples);
    let _ = writeln!(stdout, "distinct_stems {}", v.distinct_stems);
    let _ = writeln!(stdout, "distinct_answers {}", v.distinct_answers);
    if v.warn() {
        let _ = writeln!(stdout, "WARN answer volume {} is below {VOLUME_WARN_THRESHOLD}", v.distinct_answers);
    }
    EXIT_OK
}
