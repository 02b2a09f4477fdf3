//! Shared loading for the examples: a CSV named on the command line, or the
//! bundled WDBC file when no argument is given.

use std::path::PathBuf;

use gnb::data::{default_missing, prepare, ClassJoin};
use gnb::{DiscreteTable, DiscretizationSpec};

#[allow(dead_code)]
pub struct Loaded {
    pub table: DiscreteTable,
    pub spec: DiscretizationSpec,
    pub positive: Option<String>,
}

/// `[csv] [class column] [positive label] [join]`
pub fn load() -> Loaded {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (path, class, positive, join) = match args.as_slice() {
        [] => (bundled("wdbc.csv"), "diagnosis".to_string(), Some("M".to_string()), None),
        [p, c, rest @ ..] => (PathBuf::from(p), c.clone(), rest.first().cloned(), rest.get(1).cloned()),
        _ => {
            eprintln!("usage: <csv> <class column> [positive label] [join, e.g. 1,2,3,4=1]");
            std::process::exit(1);
        }
    };
    let join = join.map(|j| ClassJoin::parse(&j).unwrap_or_else(|e| fail(e)));
    let (table, spec) = prepare(&path, &class, &default_missing(), join.as_ref()).unwrap_or_else(|e| fail(e));
    Loaded { table, spec, positive }
}

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn fail(e: impl std::fmt::Display) -> ! {
    eprintln!("error: {e}");
    std::process::exit(2);
}

#[allow(dead_code)]
pub fn name(t: &DiscreteTable, c: usize) -> &str {
    &t.column_names[c]
}
