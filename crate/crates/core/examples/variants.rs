//! GRU layer steps and training, plus the grid, multidimensional and stacked
//! LSTM forward passes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqnet::variants::{
    grid_block, multidim_step, stacked_step, Gru, GruParams, GruShape, MultidimWeights,
    TransformWeights,
};

fn main() -> seqnet::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let shape = GruShape {
        inputs: 1,
        units: 4,
        outputs: 1,
    };
    let mut p = GruParams::random(shape, &mut rng, 0.5);
    // Target: the input from two steps back.
    let xs: Vec<Vec<f64>> = (0..30).map(|t| vec![((t * 7) % 5) as f64 / 4.0]).collect();
    let ts: Vec<Vec<Option<f64>>> = (0..30)
        .map(|t| vec![(t >= 2).then(|| xs[t - 2][0])])
        .collect();
    for epoch in 0..=400 {
        if epoch % 100 == 0 {
            let e = Gru::sequence_error(&Gru::run(&p, &xs)?, &ts);
            println!("gru epoch {epoch}: error {e:.4}");
        }
        let d = Gru::bptt(&p, &xs, &ts, 0.5)?;
        p.add_scaled(&d, 1.0);
    }

    let w = [
        TransformWeights::random(2, 5, &mut rng, 1.0),
        TransformWeights::random(3, 5, &mut rng, 1.0),
    ];
    let (hs, ms) = grid_block(
        &[vec![0.1, -0.2], vec![0.3, 0.0, 0.5]],
        &[vec![0.0, 1.0], vec![0.5, -0.5, 0.0]],
        &w,
    )?;
    println!("grid block: h = {hs:?}\n            m = {ms:?}");

    let md = MultidimWeights::random(2, 4, 3, &mut rng, 1.0);
    let (h, m) = multidim_step(
        &md,
        &[0.2, 0.1, -0.4, 0.3],
        &[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]],
    )?;
    println!("three predecessors merged: h = {h:?}, m = {m:?}");

    let layers = [
        TransformWeights::random(3, 2 + 3, &mut rng, 1.0),
        TransformWeights::random(2, 3 + 2, &mut rng, 1.0),
    ];
    let (hs, _) = stacked_step(
        &layers,
        &[0.5, -0.5],
        &[vec![0.0; 3], vec![0.0; 2]],
        &[vec![0.0; 3], vec![0.0; 2]],
    )?;
    println!("stacked top layer: {:?}", hs[1]);
    Ok(())
}
