//! End to end: synthesise pages, run the pipeline, score the output.

use tablegrid::eval::{evaluate_dirs, EvalReport};
use tablegrid::pipeline::{list_images, run_pipeline, PipelineConfig};
use tablegrid::synth::{corpus, write_corpus};

fn main() -> tablegrid::Result<()> {
    let root = std::env::temp_dir().join("tablegrid_pipeline_example");
    let pages_dir = root.join("pages");
    write_corpus(&pages_dir, &corpus(12, 3))?;

    let cfg = PipelineConfig { output_dir: root.join("out"), jobs: 2, ..PipelineConfig::default() };
    let manifest = run_pipeline(&list_images(&pages_dir)?, &cfg)?;
    println!("config {}: {} pages, {} failed", &manifest.config_hash[..12], manifest.pages.len(), manifest.n_failed);

    let (report, _) = evaluate_dirs(&cfg.output_dir, &pages_dir)?;
    print!("{}", EvalReport::table([("pipeline", &report)]));
    Ok(())
}
