use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seqnet::gradcheck::{compare, fd_gradient};
use seqnet::lstm::{update_cell_state, Lstm, LstmConfig};
use seqnet::topology::{Block, Connection, LstmLayout, Unit};
use seqnet::{Activation, NetworkSpec, Params, UnitId, UnitRole};

fn random_lstm(layout: &LstmLayout, seed: u64, scale: f64) -> NetworkSpec {
    let mut spec = layout.build();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    spec.randomize(&mut rng, scale);
    for u in spec.units.iter_mut() {
        if matches!(
            u.role,
            UnitRole::Cell(_) | UnitRole::Hidden | UnitRole::Output
        ) {
            u.bias = rng.random_range(-0.5..0.5);
        }
    }
    spec
}

fn sequence(steps: usize, width: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..steps)
        .map(|_| (0..width).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

fn targets(steps: usize, outputs: usize, every: usize) -> Vec<Vec<Option<f64>>> {
    (0..steps)
        .map(|t| {
            (0..outputs)
                .map(|o| ((t + 1) % every == 0).then_some(((t + o) % 3) as f64 * 0.4 + 0.1))
                .collect()
        })
        .collect()
}

fn fd(net: &Lstm, p: &Params, xs: &[Vec<f64>], ts: &[Vec<Option<f64>>]) -> Vec<f64> {
    let loss = |flat: &[f64]| {
        let mut q = p.clone();
        q.set_flat(flat);
        net.sequence_error(&net.run(&q, xs).unwrap(), ts)
    };
    fd_gradient(loss, &p.to_flat(), 1e-5).unwrap()
}

fn neg(v: Vec<f64>) -> Vec<f64> {
    v.into_iter().map(|x| -x).collect()
}

fn sigma(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[test]
fn forward_matches_hand_evaluation() {
    // Two inputs, one block of one cell with all three gates, one output.
    let spec = random_lstm(&LstmLayout::new(2, 1, 1, 1), 4, 1.0);
    let xs = sequence(3, 2, 4);
    let w = |src: usize, dst: usize| {
        spec.connections
            .iter()
            .find(|c| c.src.0 == src && c.dst.0 == dst)
            .map_or(0.0, |c| c.weight)
    };
    let b = |u: usize| spec.units[u].bias;
    // Units: 0,1 inputs; 2 cell; 3 input gate; 4 output gate; 5 forget gate; 6 output.
    let (mut s, mut yc) = (0.0, 0.0);
    let mut expected = Vec::new();
    for x in &xs {
        let net = |u: usize| w(0, u) * x[0] + w(1, u) * x[1] + w(2, u) * yc + b(u);
        let y_in = sigma(net(3));
        let y_out = sigma(net(4));
        let y_phi = sigma(net(5));
        let g = 4.0 * sigma(net(2)) - 2.0;
        s = s * y_phi + y_in * g;
        yc = y_out * (2.0 * sigma(s) - 1.0);
        expected.push((s, yc, sigma(w(2, 6) * yc + b(6))));
    }
    let net = Lstm::compile(&spec).unwrap();
    let states = net.run(&Params::from_spec(&spec), &xs).unwrap();
    for (t, (s, yc, y)) in expected.into_iter().enumerate() {
        let st = &states[t + 1];
        assert!((st.s[2] - s).abs() < 1e-14);
        assert!((st.y[2] - yc).abs() < 1e-14);
        assert!((st.y[6] - y).abs() < 1e-14);
    }
}

#[test]
fn truncation_is_exact_without_cross_recurrence() {
    let layouts = [
        LstmLayout::new(2, 1, 1, 1).recurrent(false),
        LstmLayout::new(1, 1, 2, 2).recurrent(false),
        LstmLayout::new(2, 1, 1, 1)
            .recurrent(false)
            .forget_gates(false),
        LstmLayout::new(1, 1, 2, 1).recurrent(false).hidden(2),
    ];
    for (i, layout) in layouts.iter().enumerate() {
        for seed in 0..5 {
            let spec = random_lstm(layout, seed, 1.0);
            let net = Lstm::compile(&spec).unwrap();
            let p = Params::from_spec(&spec);
            let xs = sequence(8, layout.inputs, seed);
            let ts = targets(8, layout.outputs, 2);
            let hybrid = neg(net.gradient(&p, &xs, &ts).unwrap().to_flat());
            let r = compare(&hybrid, &fd(&net, &p, &xs, &ts), 1e-5).unwrap();
            assert!(r.pass, "layout {i} seed {seed}: {}", r.max_rel_err);
        }
    }
}

#[test]
fn truncated_gradient_points_downhill_on_recurrent_blocks() {
    let layout = LstmLayout::new(2, 2, 1, 1);
    let mut positive = 0;
    let mut inexact = 0;
    for seed in 0..100 {
        let spec = random_lstm(&layout, seed, 1.0);
        let net = Lstm::compile(&spec).unwrap();
        let p = Params::from_spec(&spec);
        let xs = sequence(6, 2, seed);
        let ts = targets(6, 1, 1);
        let hybrid = neg(net.gradient(&p, &xs, &ts).unwrap().to_flat());
        let full = fd(&net, &p, &xs, &ts);
        let dot: f64 = hybrid.iter().zip(&full).map(|(a, b)| a * b).sum();
        if dot > 0.0 {
            positive += 1;
        }
        if !compare(&hybrid, &full, 1e-5).unwrap().pass {
            inexact += 1;
        }
    }
    assert!(positive >= 95, "{positive} of 100");
    assert!(inexact > 0);
}

#[test]
fn cell_error_recursion_gives_the_same_changes() {
    for seed in 0..5 {
        let spec = random_lstm(&LstmLayout::new(2, 2, 2, 2), seed, 1.0);
        let net = Lstm::compile(&spec).unwrap();
        let p = Params::from_spec(&spec);
        let xs = sequence(10, 2, seed);
        let ts = targets(10, 2, 3);
        let a = net.gradient(&p, &xs, &ts).unwrap();
        let b = net.gradient_from_cell_errors(&p, &xs, &ts).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }
}

#[test]
fn perfect_targets_change_nothing() {
    let spec = random_lstm(&LstmLayout::new(1, 2, 1, 2), 8, 1.0);
    let net = Lstm::compile(&spec).unwrap();
    let p = Params::from_spec(&spec);
    let xs = sequence(5, 1, 8);
    let states = net.run(&p, &xs).unwrap();
    let ts: Vec<Vec<Option<f64>>> = states[1..]
        .iter()
        .map(|st| net.output_values(st).into_iter().map(Some).collect())
        .collect();
    assert!(net.gradient(&p, &xs, &ts).unwrap().is_zero());
    let ind = net.individual_errors(&p, &states, &ts).unwrap();
    assert!(ind.local.iter().all(|s| s.eps.iter().all(|&e| e == 0.0)));
    assert!(ind.cell.iter().flatten().all(|&e| e == 0.0));
}

#[test]
fn zero_learning_rate_keeps_weights() {
    let spec = random_lstm(&LstmLayout::new(1, 2, 1, 1), 2, 1.0);
    let net = Lstm::compile(&spec).unwrap();
    let p0 = Params::from_spec(&spec);
    let mut p = p0.clone();
    for online in [false, true] {
        let cfg = LstmConfig {
            learning_rate: 0.0,
            online,
            ..Default::default()
        };
        for seed in 0..20 {
            net.train_sequence(&mut p, &sequence(7, 1, seed), &targets(7, 1, 1), &cfg)
                .unwrap();
        }
    }
    assert_eq!(p, p0);
}

#[test]
fn forget_bias_is_frozen_by_default() {
    let spec = random_lstm(&LstmLayout::new(1, 1, 1, 1), 6, 1.0);
    let net = Lstm::compile(&spec).unwrap();
    let mut p = Params::from_spec(&spec);
    let f = 4;
    assert_eq!(spec.units[f].role, UnitRole::ForgetGate(0));
    let cfg = LstmConfig::default();
    net.train_sequence(&mut p, &sequence(4, 1, 6), &targets(4, 1, 1), &cfg)
        .unwrap();
    assert_eq!(p.biases[f], 1.0);
    let cfg = LstmConfig {
        train_forget_bias: true,
        ..cfg
    };
    net.train_sequence(&mut p, &sequence(4, 1, 6), &targets(4, 1, 1), &cfg)
        .unwrap();
    assert_ne!(p.biases[f], 1.0);
}

#[test]
fn carousel_holds_state_for_ten_thousand_steps() {
    let mut spec = random_lstm(&LstmLayout::new(2, 1, 1, 1), 3, 1.0);
    // Saturated gates: forget exactly 1, input exactly 0.
    spec.units[3].bias = -1000.0;
    spec.units[5].bias = 1000.0;
    let net = Lstm::compile(&spec).unwrap();
    let p = Params::from_spec(&spec);
    let c = net.cell_units()[0];
    let mut st = net.initial_state();
    st.s[c] = 3.2;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..10_000 {
        let x = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        st = net.forward_step(&p, &st, &x).unwrap();
        let (y_in, _, y_phi) = net.gates(&st, 0);
        assert_eq!((y_in, y_phi), (0.0, 1.0));
        assert_eq!(st.s[c].to_bits(), 3.2f64.to_bits());
    }
}

/// Removes every forget gate, renumbering the remaining units.
fn strip_forget_gates(spec: &NetworkSpec) -> (NetworkSpec, Vec<Option<usize>>) {
    let mut map = Vec::new();
    let mut next = 0;
    for u in &spec.units {
        if matches!(u.role, UnitRole::ForgetGate(_)) {
            map.push(None);
        } else {
            map.push(Some(next));
            next += 1;
        }
    }
    let id = |u: UnitId| UnitId(map[u.0].unwrap());
    let units = spec
        .units
        .iter()
        .filter(|u| map[u.id.0].is_some())
        .map(|u| Unit {
            id: id(u.id),
            ..u.clone()
        })
        .collect();
    let connections = spec
        .connections
        .iter()
        .filter(|c| map[c.src.0].is_some() && map[c.dst.0].is_some())
        .map(|c| Connection {
            src: id(c.src),
            dst: id(c.dst),
            ..c.clone()
        })
        .collect();
    let blocks = spec
        .blocks
        .iter()
        .map(|b| Block {
            id: b.id,
            cells: b.cells.iter().map(|&c| id(c)).collect(),
            input_gate: id(b.input_gate),
            output_gate: id(b.output_gate),
            forget_gate: None,
        })
        .collect();
    (
        NetworkSpec {
            units,
            connections,
            blocks,
        },
        map,
    )
}

#[test]
fn missing_forget_gate_equals_forget_gate_fixed_at_one() {
    let mut with = random_lstm(&LstmLayout::new(2, 2, 2, 1), 12, 1.0);
    for u in with.units.iter_mut() {
        if matches!(u.role, UnitRole::ForgetGate(_)) {
            u.bias = 1000.0;
        }
    }
    for c in with.connections.iter_mut() {
        if matches!(with.units[c.dst.0].role, UnitRole::ForgetGate(_)) {
            c.weight = 0.0;
        }
    }
    let (without, map) = strip_forget_gates(&with);
    let a = Lstm::compile(&with).unwrap();
    let b = Lstm::compile(&without).unwrap();
    let xs = sequence(20, 2, 12);
    let sa = a.run(&Params::from_spec(&with), &xs).unwrap();
    let sb = b.run(&Params::from_spec(&without), &xs).unwrap();
    for (x, y) in sa.iter().zip(&sb) {
        assert_eq!(x.forget, y.forget);
        for (old, new) in map.iter().enumerate() {
            if let Some(new) = *new {
                assert_eq!(x.y[old].to_bits(), y.y[new].to_bits());
                assert_eq!(x.s[old].to_bits(), y.s[new].to_bits());
                assert_eq!(x.net[old].to_bits(), y.net[new].to_bits());
            }
        }
    }
}

#[test]
fn cell_state_reduces_without_forgetting() {
    for (s, y_in, g) in [(0.3, 0.2, -1.7), (-4.0, 0.9, 1.99), (0.0, 0.5, 0.0)] {
        assert_eq!(update_cell_state(s, 1.0, y_in, g), s + y_in * g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn activations_stay_in_range(
        blocks in 1usize..4,
        cells in 1usize..3,
        hidden in 0usize..2,
        seed in any::<u64>(),
        steps in 1usize..30,
    ) {
        let layout = LstmLayout::new(2, blocks, cells, 2).hidden(hidden);
        let spec = random_lstm(&layout, seed, 1.5);
        let net = Lstm::compile(&spec).unwrap();
        let states = net.run(&Params::from_spec(&spec), &sequence(steps, 2, seed)).unwrap();
        for st in &states[1..] {
            for u in &spec.units {
                let i = u.id.0;
                match u.role {
                    UnitRole::InputGate(_) | UnitRole::OutputGate(_) | UnitRole::ForgetGate(_) => {
                        prop_assert!(st.y[i] > 0.0 && st.y[i] < 1.0);
                    }
                    UnitRole::Cell(b) => {
                        let g = Activation::CellInput.apply(st.net[i]);
                        prop_assert!(g > -2.0 && g < 2.0);
                        let h = Activation::CellOutput.apply(st.s[i]);
                        prop_assert!(h > -1.0 && h < 1.0);
                        let (_, y_out, _) = net.gates(st, b);
                        prop_assert!(st.y[i].abs() < y_out);
                    }
                    _ => {}
                }
            }
        }
    }
}
