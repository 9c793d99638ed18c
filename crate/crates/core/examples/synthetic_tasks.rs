//! Prints one sequence of each task, then the same seed again to show
//! reproducibility.

use seqnet::harness::{gen_task, task_csv, TaskKind, TaskSpec};

fn main() -> seqnet::Result<()> {
    for kind in [TaskKind::Latch, TaskKind::TemporalOrder, TaskKind::Counting] {
        let spec = TaskSpec::new(kind, 7, 0.1, 2, 99);
        let samples = gen_task(&spec)?;
        println!(
            "# {kind}, classes {:?}",
            samples.iter().map(|s| s.class).collect::<Vec<_>>()
        );
        print!("{}", task_csv(&samples));
        assert_eq!(samples, gen_task(&spec)?);
    }
    Ok(())
}
