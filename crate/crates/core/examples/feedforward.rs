//! Perceptron on a separable problem, then a 2-2-1 network on XOR.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqnet::ffnn::{perceptron_train, FeedForward, Sample, TrainConfig};
use seqnet::{NetworkSpec, Params};

fn main() -> seqnet::Result<()> {
    let and = [
        Sample::new([0.0, 0.0], [-1.0]),
        Sample::new([0.0, 1.0], [-1.0]),
        Sample::new([1.0, 0.0], [-1.0]),
        Sample::new([1.0, 1.0], [1.0]),
    ];
    let p = perceptron_train(&and, &TrainConfig::default())?;
    println!(
        "perceptron on AND: converged {} after {} epochs, w = {:?}, b = {}",
        p.converged, p.epochs, p.weights, p.bias
    );

    let xor = [
        Sample::new([0.0, 0.0], [0.0]),
        Sample::new([0.0, 1.0], [1.0]),
        Sample::new([1.0, 0.0], [1.0]),
        Sample::new([1.0, 1.0], [0.0]),
    ];
    let mut spec = NetworkSpec::feed_forward(&[2, 2, 1]);
    spec.randomize(&mut ChaCha8Rng::seed_from_u64(1), 0.1);
    let net = FeedForward::compile(&spec)?;
    let mut params = Params::from_spec(&spec);
    let cfg = TrainConfig {
        learning_rate: 2.0,
        max_epochs: 20_000,
        stop_tolerance: 0.01,
        batch: false,
    };
    let report = net.train(&mut params, &xor, &cfg)?;
    println!(
        "xor: error {:.4} after {} epochs",
        report.error, report.epochs
    );
    for s in &xor {
        let y = net.output_values(&net.forward(&params, &s.input)?)[0];
        println!("  {:?} -> {y:.3}", s.input);
    }
    Ok(())
}
