//! Backpropagation through time and real-time recurrent learning compute the
//! same epoch gradient; this prints both for a small fully recurrent net.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqnet::rnn::{RecurrentNet, RtrlConfig};
use seqnet::{NetworkSpec, Params};

fn main() -> seqnet::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut spec = NetworkSpec::fully_recurrent(1, 2, 1);
    spec.randomize(&mut rng, 1.0);
    let net = RecurrentNet::compile(&spec)?;
    let params = Params::from_spec(&spec);

    let steps = 12;
    let inputs: Vec<Vec<f64>> = (0..steps)
        .map(|_| vec![rng.random_range(-1.0..1.0)])
        .collect();
    let rows: Vec<Vec<Option<f64>>> = (0..steps).map(|t| vec![Some((t % 2) as f64)]).collect();
    let targets = net.output_targets(&rows)?;

    let trace = net.run(&params, &inputs, &targets)?;
    let bptt = net.bptt(&params, &trace, 0.5)?;
    let cfg = RtrlConfig {
        learning_rate: 0.5,
        ..RtrlConfig::default()
    };
    let rtrl = net.rtrl(&params, &inputs, &targets, &cfg)?;
    println!("epoch error {:.6}", trace.total_error());
    for (k, (a, b)) in bptt.weights.iter().zip(&rtrl.weights).enumerate() {
        println!("w{k:<2} bptt {a:+.12} rtrl {b:+.12}");
    }
    println!("max difference {:.2e}", bptt.max_abs_diff(&rtrl));

    // Online RTRL changes the weights while the sequence runs.
    let online = RtrlConfig {
        online: true,
        ..cfg
    };
    let d = net.rtrl(&params, &inputs, &targets, &online)?;
    println!(
        "online total change differs by {:.2e}",
        d.max_abs_diff(&rtrl)
    );
    Ok(())
}
