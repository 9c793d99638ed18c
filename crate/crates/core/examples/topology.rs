//! Builds a memory-block network, checks it, and round-trips it through the
//! text format.

use seqnet::topology::LstmLayout;
use seqnet::{Activation, Delay, NetworkSpec, UnitRole};

fn main() -> seqnet::Result<()> {
    let spec = LstmLayout::new(2, 3, 2, 1).build();
    spec.ensure_valid()?;
    let cc = spec.count_connections()?;
    println!(
        "{} units, {} connections; per-step terms: block {}, input {}, output {}",
        spec.units.len(),
        spec.connections.len(),
        cc.block_internal,
        cc.input_side,
        cc.output_side
    );

    let text = spec.to_text();
    assert_eq!(NetworkSpec::from_text(&text)?, spec);
    println!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));

    // An undelayed self-loop has no evaluation order.
    let mut bad = NetworkSpec::default();
    let x = bad.add_unit(UnitRole::Input, Activation::Identity, 0.0);
    let h = bad.add_unit(UnitRole::Output, Activation::LOGISTIC, 0.0);
    bad.connect(x, h, 1.0, Delay::Zero);
    bad.connect(h, h, 1.0, Delay::Zero);
    for v in bad.validate() {
        println!("rejected: {v}");
    }

    for a in [
        Activation::LOGISTIC,
        Activation::CellInput,
        Activation::CellOutput,
    ] {
        println!(
            "{a:?}: f(0) = {}, f'(0) = {}",
            a.apply(0.0),
            a.derivative(0.0)
        );
    }
    Ok(())
}
