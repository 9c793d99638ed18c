//! Central-difference check of each trainer on one task sequence; the CSV of
//! the last check goes to stdout.

use seqnet::harness::{gradcheck, ExperimentConfig, TaskKind, Trainer};

fn main() -> seqnet::Result<()> {
    let mut last = None;
    for (trainer, blocks) in [
        (Trainer::FfnnBp, 1),
        (Trainer::RnnBptt, 1),
        (Trainer::RnnRtrl, 1),
        (Trainer::GruBptt, 1),
        (Trainer::Lstm, 1),
        (Trainer::Lstm, 2),
    ] {
        let cfg = ExperimentConfig {
            trainer,
            blocks,
            task: TaskKind::Counting,
            lag: 8,
            hidden: 2,
            init_scale: 1.0,
            tolerance: 1e-5,
            ..ExperimentConfig::default()
        };
        let r = gradcheck(&cfg, 4)?;
        println!(
            "{trainer:<9} blocks {blocks}: {} values, max rel error {:.2e} {}",
            r.entries.len(),
            r.max_rel_err,
            if r.pass { "ok" } else { "(truncated gradient)" }
        );
        last = Some(r);
    }
    if let Some(r) = last {
        print!("{}", r.to_csv());
    }
    Ok(())
}
