//! Error flow through a single self-connected unit, and the decay curve of a
//! random recurrent net written as CSV on stdout.

use seqnet::harness::{vanish_probe, ExperimentConfig};
use seqnet::rnn::RecurrentNet;
use seqnet::vanish::error_flow_factor;
use seqnet::{Activation, Delay, NetworkSpec, Params, UnitRole};

fn self_loop(act: Activation, w: f64, bias: f64) -> NetworkSpec {
    let mut s = NetworkSpec::default();
    let i = s.add_unit(UnitRole::Input, Activation::Identity, 0.0);
    let o = s.add_unit(UnitRole::Output, act, bias);
    s.connect(o, o, w, Delay::One);
    s.connect(i, o, 1.0, Delay::Zero);
    s
}

fn main() -> seqnet::Result<()> {
    for (name, act, w, bias, x0) in [
        ("logistic, w = 1", Activation::LOGISTIC, 1.0, -0.5, 0.5),
        ("logistic, w = 4", Activation::LOGISTIC, 4.0, -2.0, 1.5),
        ("identity, w = 1", Activation::Identity, 1.0, 0.0, 1.0),
    ] {
        let spec = self_loop(act, w, bias);
        let net = RecurrentNet::compile(&spec)?;
        let p = Params::from_spec(&spec);
        let mut xs = vec![vec![0.0]; 11];
        xs[0][0] = x0;
        let trace = net.run(&p, &xs, &[])?;
        let r = error_flow_factor(&net, &p, &trace, 1, 1, 1, 11)?;
        println!("{name}: 10-step factor {:.4e} ({})", r.factor, r.regime);
    }

    let cfg = ExperimentConfig {
        hidden: 3,
        lag: 30,
        init_scale: 1.0,
        ..ExperimentConfig::default()
    };
    let r = vanish_probe(&cfg, 0)?;
    print!("{}", r.curve_csv());
    Ok(())
}
