//! Write a small synthetic corpus with ground truth to a directory.

use std::path::PathBuf;

use tablegrid::synth::{corpus, write_corpus};

fn main() -> tablegrid::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("tablegrid_corpus"));
    let specs = corpus(6, 7);
    for s in &specs {
        println!("{}x{} {:?}", s.n_rows, s.n_cols, s.border_style);
    }
    let paths = write_corpus(&out, &specs)?;
    println!("{} pages -> {}", paths.len(), out.display());
    Ok(())
}
