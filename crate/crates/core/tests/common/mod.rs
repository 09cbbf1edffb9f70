#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use quizforge::blocks::{parse_spike_file, split_problem_body, ProblemBody, SourceFile};
use quizforge::interp::{Environment, FunctionRegistry};
use quizforge::project::load_functions;

pub const SUM_BLOCK: &str = "<<problemI;\n  a={10:99};\n  b={10:99};\n  c=a+b;\n  answer('$%d$',c);\n@2; a,b;\nFind the sum of numbers $%d$ and $%d.$\n>>\n";

pub const DICE_BLOCK: &str = "<<problemI;\n  a={1:6};\n  b={1:6};\n  c=a+b;\n  answer('$%d$',c);\n@2,0; a,b;\nFind the sum of numbers %d and %d.\n>>\n";

pub const CARNIVORES: &str = "<<problemT;\nHippopotamus\nRabbit\nZebra\nElephant\nGiraffe\nCow\n-------\nCheetah\nCat\nCoyote\nLion\nTiger\nWolf\nDog\n@2; 4;\nHow many of the following animals are carnivores?\n>>\n";

pub const CARNIVORE_NAMES: [&str; 7] = ["Cheetah", "Cat", "Coyote", "Lion", "Tiger", "Wolf", "Dog"];

pub const EVEN_BLOCK: &str = "<<problemG;\n GetEvenInteger\n@1; 5;\nHow many of the following integers are even?\n>>\n";

pub const CONGRUENCE_H_BLOCK: &str = "<<problemH;\n  [a,b,n,tf]=GetCongruentInts;\n  out=sprintf('$\\\\congruent{%d}{%d}{%d}$',a,b,n);\n@1;  4;\nHow many of the following statements are true?\n>>\n";

pub fn sample_project() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../sample_project")
}

pub fn sample_functions() -> Arc<FunctionRegistry> {
    Arc::new(load_functions(&sample_project().join("Utils")).expect("sample Utils load"))
}

pub fn sample_env() -> Environment {
    Environment::new(sample_functions())
}

pub fn body(src: &str) -> ProblemBody {
    let file = SourceFile::from_text("t.spk", src);
    let blocks = parse_spike_file(&file).expect("fixture parses");
    split_problem_body(&blocks[0]).expect("fixture splits")
}

/// Numbers in `s` that are maximal runs of ASCII digits.
pub fn integers_in(s: &str) -> Vec<i64> {
    s.split(|c: char| !c.is_ascii_digit()).filter(|t| !t.is_empty()).map(|t| t.parse().unwrap()).collect()
}

/// A project directory with the sample top-file and Utils, plus the given
/// roster and spike source for topic `T`, assignment 1.
pub fn scratch_project(roster: &[&str], spk: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    fs::copy(sample_project().join("topfile.tex"), root.join("topfile.tex")).unwrap();
    fs::create_dir(root.join("Utils")).unwrap();
    for entry in fs::read_dir(sample_project().join("Utils")).unwrap() {
        let path = entry.unwrap().path();
        fs::copy(&path, root.join("Utils").join(path.file_name().unwrap())).unwrap();
    }
    fs::create_dir(root.join("T")).unwrap();
    let mut ids: String = roster.iter().map(|id| format!("{id}\n")).collect();
    ids.push_str("-------\n");
    fs::write(root.join("T/T.txt"), ids).unwrap();
    fs::write(root.join("T/TA1.spk"), spk).unwrap();
    dir
}

/// Copy of the sample project in a fresh temporary directory.
pub fn sample_copy() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_tree(&sample_project(), dir.path());
    dir
}

fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for entry in fs::read_dir(from).unwrap() {
        let path = entry.unwrap().path();
        let target = to.join(path.file_name().unwrap());
        if path.is_dir() {
            copy_tree(&path, &target);
        } else if path.extension().is_none_or(|e| e != "tex") || path.file_name().unwrap() == "topfile.tex" {
            fs::copy(&path, &target).unwrap();
        }
    }
}
