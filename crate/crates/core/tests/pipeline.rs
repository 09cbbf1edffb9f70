mod common;

use std::fs;

use common::*;
use quizforge::emit::{KeyRecord, KEY_PREFIX};
use quizforge::engines::build_question_ir;
use quizforge::interp::Environment;
use quizforge::project::{
    block_volume, check_blocks, load_roster, run_assignment_cycle, Assignment, Project, ProjectError, ProjectLayout,
    Roster,
};
use quizforge::rng::RandomStream;

fn cycle(dir: &tempfile::TempDir, seed: Option<u64>) -> Result<Assignment, ProjectError> {
    let layout = ProjectLayout::new(dir.path(), "T", 1);
    let roster = load_roster(&layout.roster_path())?;
    run_assignment_cycle(&Project::load(layout)?, &roster, seed)
}

fn keys_of(text: &str) -> Vec<KeyRecord> {
    let (_, tail) = text.split_once("\\end{document}\n").expect("document end");
    tail.lines().map(|l| l.parse().expect("key line")).collect()
}

#[test]
fn sample_project_four_assignments() {
    let layout = ProjectLayout::new(sample_project(), "MATH2712", 3);
    let roster = load_roster(&layout.roster_path()).unwrap();
    assert_eq!(roster.student_ids, ["2006280", "2032971", "2062720", "2084704"]);
    let a = run_assignment_cycle(&Project::load(layout).unwrap(), &roster, None).unwrap();
    assert_eq!(a.students, 4);
    assert_eq!(a.text.matches("\\studentheader{").count(), 4);
    assert_eq!(keys_of(&a.text), a.keys);
    for id in &roster.student_ids {
        let numbers: Vec<usize> = a.keys.iter().filter(|k| &k.student_id == id).map(|k| k.question_number).collect();
        assert_eq!(numbers, (1..=11).collect::<Vec<_>>());
    }
    assert!(a.text.contains("\\newcommand{\\topiccode}{MATH2712}\n\\newcommand{\\NAss}{3}\n\\begin{document}"));
    assert!(!a.text.contains("This question is not ready yet"));
}

#[test]
fn one_question_four_students() {
    let dir = scratch_project(&["a", "b", "c", "d"], SUM_BLOCK);
    let a = cycle(&dir, None).unwrap();
    assert_eq!(a.keys.len(), 4);
    assert_eq!(a.text.matches("\\problemtype{I}").count(), 4);
}

#[test]
fn empty_roster() {
    let dir = scratch_project(&[], SUM_BLOCK);
    let a = cycle(&dir, None).unwrap();
    assert!(a.keys.is_empty());
    assert!(a.text.ends_with("\\end{document}\n"));
    assert!(!a.text.contains("\\studentheader{"));
}

#[test]
fn text_blocks_copied_verbatim() {
    let dir = scratch_project(&["1"], "<<text;\n\\bigskip\n\\noindent {\\bf The Central Limit Theorem}\n>>\n");
    let a = cycle(&dir, None).unwrap();
    assert!(a.text.contains("\\studentheader{1}\n\n\\bigskip\n\\noindent {\\bf The Central Limit Theorem}\n"));
}

#[test]
fn config_persists_until_changed() {
    let spk = format!("{SUM_BLOCK}<<data;\n  NAltAns = 3;\n>>\n{SUM_BLOCK}");
    let dir = scratch_project(&["1", "2"], &spk);
    let a = cycle(&dir, None).unwrap();
    let options_per_question: Vec<usize> =
        a.text.split("\\problemtype{I}").skip(1).map(|q| q.lines().filter(|l| l.starts_with('(')).count()).collect();
    // The second student's first question already sees the carried value.
    assert_eq!(options_per_question, [5, 3, 3, 3]);
}

#[test]
fn nrepeat_repeats_each_question() {
    let spk = format!("<<data;\n  NRepeat = 3;\n>>\n{SUM_BLOCK}");
    let dir = scratch_project(&["1"], &spk);
    let a = cycle(&dir, None).unwrap();
    assert_eq!(a.keys.iter().map(|k| k.question_number).collect::<Vec<_>>(), [1, 2, 3]);
}

#[test]
fn seed_from_topfile_and_override() {
    let dir = scratch_project(&["1", "2"], SUM_BLOCK);
    let by_rseed = cycle(&dir, None).unwrap();
    assert_eq!(cycle(&dir, Some(2712)).unwrap().text, by_rseed.text);
    assert_ne!(cycle(&dir, Some(1)).unwrap().text, by_rseed.text);
}

#[test]
fn isolation_violation_would_fail() {
    let spk = "<<data;\n  if exist('seen'), error('leaked'); end\n  seen = 1;\n>>\n";
    let dir = scratch_project(&["1", "2"], spk);
    assert!(cycle(&dir, None).is_ok());
    // Sanity check that `exist` sees variables within one run.
    let dir = scratch_project(&["1"], "<<data;\n  seen = 1;\n  if exist('seen'), error('visible'); end\n>>\n");
    assert_eq!(cycle(&dir, None).unwrap_err().code(), "UserError");
}

#[test]
fn runtime_error_is_annotated() {
    let spk = format!("{SUM_BLOCK}<<problemI;\n  answer('%d', undefined_thing);\n@1;;\nQ\n>>\n");
    let dir = scratch_project(&["2006280"], &spk);
    let err = cycle(&dir, None).unwrap_err();
    assert_eq!(err.code(), "UndefinedVariable");
    assert_eq!(err.line(), 10);
    let d = err.diagnostic();
    assert!(d.contains("TA1.spk:10: UndefinedVariable: student 2006280, block 2: "), "{d}");
}

#[test]
fn roster_errors() {
    let dir = scratch_project(&["1"], SUM_BLOCK);
    let path = dir.path().join("T/T.txt");
    fs::write(&path, "1\n2\n").unwrap();
    assert_eq!(load_roster(&path).unwrap_err().code(), "MissingSentinel");
    fs::remove_file(&path).unwrap();
    let err = load_roster(&path).unwrap_err();
    assert!(err.is_io());
    assert!(err.diagnostic().contains("T.txt"));
}

#[test]
fn topfile_errors() {
    let dir = scratch_project(&["1"], SUM_BLOCK);
    let layout = ProjectLayout::new(dir.path(), "T", 1);
    fs::write(layout.topfile_path(), "rseed = 1;\n").unwrap();
    assert_eq!(Project::load(layout.clone()).unwrap_err().code(), "NoDocumentClass");
    fs::write(layout.topfile_path(), "\\documentclass{article}\n\\end{document}\n").unwrap();
    let project = Project::load(layout).unwrap();
    let err = run_assignment_cycle(&project, &Roster { student_ids: vec!["1".into()] }, None).unwrap_err();
    assert_eq!(err.code(), "NoBeginDocument");
}

#[test]
fn bad_config_in_data_block() {
    let dir = scratch_project(&["1"], "<<data;\n  NAltAns = 9;\n>>\n");
    assert_eq!(cycle(&dir, None).unwrap_err().code(), "BadConfig");
}

#[test]
fn check_reports_each_block() {
    let spk = format!(
        "{SUM_BLOCK}<<problemI;\n  a={{1:6}};\n  answer('%d',a);\nno at-line here\n>>\n<<problemI;\n  a={{1:6}};\n  b={{1:6}};\n  c=a+b;\n  answer('$%d$',c);\n@2,0; a,b;\nFind the sum of numbers\n%d and %d.\n>>\n"
    );
    let dir = scratch_project(&[], &spk);
    let project = Project::load_lenient(ProjectLayout::new(dir.path(), "T", 1)).unwrap();
    let reports = check_blocks(&project).unwrap();
    assert_eq!(reports.len(), 3);
    assert!(reports[0].result.is_ok());
    let missing = reports[1].result.as_ref().unwrap_err();
    assert_eq!((missing.code(), missing.line()), ("MissingAtLine", 9));
    let comment = reports[2].result.as_ref().unwrap_err();
    assert_eq!(comment.code(), "ArgCountMismatch");
    assert!(comment.to_string().contains('%'), "{comment}");
}

#[test]
fn dice_volume_through_project() {
    let dir = scratch_project(&[], &format!("<<text;\nx\n>>\n{DICE_BLOCK}"));
    let project = Project::load(ProjectLayout::new(dir.path(), "T", 1)).unwrap();
    let v = block_volume(&project, 2, 10_000, None).unwrap();
    assert_eq!((v.distinct_stems, v.distinct_answers), (36, 11));
    assert!(v.warn());
    let v = block_volume(&project, 2, 1, None).unwrap();
    assert_eq!((v.distinct_stems, v.distinct_answers), (1, 1));
    assert_eq!(block_volume(&project, 1, 10, None).unwrap_err().code(), "NotAnIRBlock");
    assert_eq!(block_volume(&project, 3, 10, None).unwrap_err().code(), "NoSuchBlock");
}

#[test]
fn two_digit_sum_answer_volume() {
    // Every pair sum of 10..=99 is reachable.
    let oracle: std::collections::BTreeSet<u32> = (10..=99).flat_map(|a| (10..=99).map(move |b| a + b)).collect();
    let v = quizforge::engines::estimate_volume(
        &body(SUM_BLOCK),
        &Environment::default(),
        200_000,
        &mut RandomStream::new(5),
    )
    .unwrap();
    assert_eq!(v.distinct_answers, oracle.len());
    assert_eq!(oracle.len(), 179);
    assert!(v.warn());
}

#[test]
fn data_block_runs_before_later_volume_blocks() {
    let spk = "<<data;\n  b = 4;\n>>\n<<problemI;\n  x={1000:1099};\n  y=Convert_to_base(x,b);\n  answer('%s',y);\n@1; x;\n%d\n>>\n";
    let dir = scratch_project(&[], &spk.replace("\n%d\n", "\nConvert %d\n"));
    let project = Project::load(ProjectLayout::new(dir.path(), "T", 1)).unwrap();
    let v = block_volume(&project, 2, 5_000, None).unwrap();
    assert_eq!(v.distinct_answers, 100);
}

#[test]
fn key_lines_follow_document_end() {
    let dir = scratch_project(&["1", "2"], &format!("{SUM_BLOCK}{CARNIVORES}"));
    let a = cycle(&dir, None).unwrap();
    let (body, tail) = a.text.split_once("\\end{document}\n").unwrap();
    assert!(!body.contains(KEY_PREFIX));
    assert_eq!(tail.lines().count(), 4);
    let types: Vec<char> = a.keys.iter().map(|k| k.type_letter).collect();
    assert_eq!(types, ['I', 'T', 'I', 'T']);
}

#[test]
fn key_letters_match_emitted_options() {
    let dir = scratch_project(&["1", "2", "3"], SUM_BLOCK);
    let a = cycle(&dir, Some(11)).unwrap();
    let questions: Vec<&str> = a.text.split("\\problemtype{I}").skip(1).collect();
    for (q, key) in questions.iter().zip(&a.keys) {
        let ab = integers_in(q.lines().nth(2).unwrap());
        let sum = ab[0] + ab[1];
        let line = q.lines().find(|l| l.starts_with(&format!("({})", key.correct_letter))).unwrap();
        assert_eq!(integers_in(line), [sum]);
    }
}

#[test]
fn engines_see_post_script_environment() {
    let b = body("<<problemI;\n  answer('%s', duedate);\n@1;;\nQ\n>>\n");
    let dir = scratch_project(&[], "");
    let project = Project::load(ProjectLayout::new(dir.path(), "T", 1)).unwrap();
    let env = project.run_topfile_script().unwrap();
    assert_eq!(env.config.rseed, 2712);
    let err = build_question_ir(&b, &env, &mut RandomStream::new(0), 5).unwrap_err();
    // A constant answer cannot yield distinct distractors.
    assert_eq!(err.code(), "DistractorExhausted");
}
