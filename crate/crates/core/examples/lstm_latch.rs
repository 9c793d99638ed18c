//! Trains two memory blocks to carry a cue across a noisy 50-step gap, then
//! shows a trained network holding its cell state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqnet::harness::{run_single, ExperimentConfig, TaskKind, TaskSpec, Trainer};
use seqnet::lstm::{Lstm, LstmConfig};
use seqnet::topology::LstmLayout;
use seqnet::{NetworkSpec, Params};

fn main() -> seqnet::Result<()> {
    let cfg = ExperimentConfig {
        task: TaskKind::Latch,
        lag: 50,
        sequences: 500,
        epochs: 30,
        trainer: Trainer::Lstm,
        blocks: 2,
        learning_rate: 1.0,
        forget_bias: 8.0,
        target_accuracy: 0.99,
        ..ExperimentConfig::default()
    };
    let r = run_single(&cfg, 0)?;
    print!("{}", r.metrics_csv);
    println!(
        "accuracy {} after {} sequences",
        r.accuracy, r.presentations
    );

    let spec = NetworkSpec::from_text(&r.checkpoint)?;
    let net = Lstm::compile(&spec)?;
    let params = Params::from_spec(&spec);
    let task = TaskSpec::new(TaskKind::Latch, 50, 0.2, 1, 5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sample = task.sample_class(1, &mut rng);
    let states = net.run(&params, &sample.inputs)?;
    let cell = net.cell_units()[0];
    for t in [1, 10, 25, 51] {
        println!("t = {t:>2}: cell state {:+.4}", states[t].s[cell]);
    }

    // Direct use of the trainer on a layout built by hand.
    let mut spec = LstmLayout::new(1, 1, 1, 1).build();
    spec.randomize(&mut rng, 0.5);
    let net = Lstm::compile(&spec)?;
    let mut p = Params::from_spec(&spec);
    let xs = vec![vec![1.0], vec![0.0], vec![0.0]];
    let ts = vec![vec![None], vec![None], vec![Some(1.0)]];
    let lc = LstmConfig {
        learning_rate: 5.0,
        ..LstmConfig::default()
    };
    for k in 0..=2000 {
        let rep = net.train_sequence(&mut p, &xs, &ts, &lc)?;
        if k % 500 == 0 {
            println!("sequence error {:.5}", rep.error);
        }
    }
    Ok(())
}
