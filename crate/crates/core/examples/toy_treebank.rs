//! Write a seeded synthetic treebank as train/dev/test CoNLL-U files.
//!
//! cargo run --example toy_treebank -- OUT_DIR [TRAIN_SIZE]

#[path = "../tests/common/mod.rs"]
mod common;

use std::path::PathBuf;

fn main() -> std::io::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "toy".into()));
    let train: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    std::fs::create_dir_all(&out)?;
    for (name, count, seed) in [("train", train, 11), ("dev", train / 5, 12), ("test", train / 5, 13)] {
        let path = out.join(format!("toy-{name}.conllu"));
        std::fs::write(
            &path,
            depbench::conllu::write_conllu(&common::synthetic_treebank(count.max(1), seed)),
        )?;
        println!("{}", path.display());
    }
    Ok(())
}
