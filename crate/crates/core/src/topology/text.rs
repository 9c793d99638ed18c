//! Line-oriented text form of a [`NetworkSpec`].
//!
//! ```text
//! # seqnet network v1
//! unit id=0 role=input act=identity bias=0
//! unit id=1 role=cell:0 act=cell_input bias=0
//! connection src=0 dst=1 delay=0 weight=0.25
//! block id=0 cells=1 input_gate=2 output_gate=3 forget_gate=4
//! ```
//!
//! Fields are `key=value` tokens separated by spaces. Reals use the shortest
//! representation that parses back to the same `f64`, so a write/read cycle is
//! bit-exact. `forget_gate=-` marks a block without one. Blank lines and lines
//! starting with `#` are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Block, Connection, Delay, NetworkSpec, Unit, UnitId, UnitRole};
use crate::error::{Error, Result};

pub const HEADER: &str = "# seqnet network v1";

fn role_str(r: UnitRole) -> String {
    match r {
        UnitRole::Input => "input".into(),
        UnitRole::Hidden => "hidden".into(),
        UnitRole::Output => "output".into(),
        UnitRole::GruUnit => "gru".into(),
        UnitRole::Cell(b) => format!("cell:{b}"),
        UnitRole::InputGate(b) => format!("input_gate:{b}"),
        UnitRole::OutputGate(b) => format!("output_gate:{b}"),
        UnitRole::ForgetGate(b) => format!("forget_gate:{b}"),
    }
}

fn parse_role(s: &str) -> std::result::Result<UnitRole, String> {
    let (name, block) = match s.split_once(':') {
        Some((n, b)) => (n, Some(b.parse::<usize>().map_err(|e| e.to_string())?)),
        None => (s, None),
    };
    Ok(match (name, block) {
        ("input", None) => UnitRole::Input,
        ("hidden", None) => UnitRole::Hidden,
        ("output", None) => UnitRole::Output,
        ("gru", None) => UnitRole::GruUnit,
        ("cell", Some(b)) => UnitRole::Cell(b),
        ("input_gate", Some(b)) => UnitRole::InputGate(b),
        ("output_gate", Some(b)) => UnitRole::OutputGate(b),
        ("forget_gate", Some(b)) => UnitRole::ForgetGate(b),
        _ => return Err(format!("unknown role `{s}`")),
    })
}

fn join_ids(ids: &[UnitId]) -> String {
    ids.iter()
        .map(|i| i.0.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

struct Fields<'a> {
    line: usize,
    map: HashMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn new(line: usize, tokens: impl Iterator<Item = &'a str>) -> Result<Self> {
        let mut map = HashMap::new();
        for t in tokens {
            let (k, v) = t.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected key=value, got `{t}`"),
            })?;
            if map.insert(k, v).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("duplicate field `{k}`"),
                });
            }
        }
        Ok(Fields { line, map })
    }

    fn raw(&self, key: &str) -> Result<&'a str> {
        self.map.get(key).copied().ok_or_else(|| Error::Parse {
            line: self.line,
            msg: format!("missing field `{key}`"),
        })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key)?;
        raw.parse().map_err(|e: T::Err| Error::Parse {
            line: self.line,
            msg: format!("field `{key}`: {e}"),
        })
    }

    fn ids(&self, key: &str) -> Result<Vec<UnitId>> {
        let raw = self.raw(key)?;
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|p| {
                p.parse().map(UnitId).map_err(|_| Error::Parse {
                    line: self.line,
                    msg: format!("field `{key}`: bad unit id `{p}`"),
                })
            })
            .collect()
    }
}

impl NetworkSpec {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(HEADER);
        out.push('\n');
        for u in &self.units {
            let _ = writeln!(
                out,
                "unit id={} role={} act={} bias={}",
                u.id,
                role_str(u.role),
                u.activation,
                u.bias
            );
        }
        for c in &self.connections {
            let _ = writeln!(
                out,
                "connection src={} dst={} delay={} weight={}",
                c.src,
                c.dst,
                c.delay.steps(),
                c.weight
            );
        }
        for b in &self.blocks {
            let forget = b.forget_gate.map_or("-".to_string(), |f| f.0.to_string());
            let _ = writeln!(
                out,
                "block id={} cells={} input_gate={} output_gate={} forget_gate={}",
                b.id,
                join_ids(&b.cells),
                b.input_gate,
                b.output_gate,
                forget
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<NetworkSpec> {
        let mut spec = NetworkSpec::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let kind = tokens.next().unwrap_or_default();
            let f = Fields::new(line_no, tokens)?;
            let perr = |msg: String| Error::Parse { line: line_no, msg };
            match kind {
                "unit" => spec.units.push(Unit {
                    id: UnitId(f.get("id")?),
                    role: parse_role(f.raw("role")?).map_err(perr)?,
                    activation: f.raw("act")?.parse().map_err(perr)?,
                    bias: f.get("bias")?,
                }),
                "connection" => {
                    let delay = match f.raw("delay")? {
                        "0" => Delay::Zero,
                        "1" => Delay::One,
                        d => return Err(perr(format!("delay must be 0 or 1, got `{d}`"))),
                    };
                    spec.connections.push(Connection {
                        src: UnitId(f.get("src")?),
                        dst: UnitId(f.get("dst")?),
                        weight: f.get("weight")?,
                        delay,
                    });
                }
                "block" => {
                    let forget = match f.raw("forget_gate")? {
                        "-" => None,
                        v => Some(UnitId(
                            v.parse()
                                .map_err(|_| perr(format!("bad forget_gate `{v}`")))?,
                        )),
                    };
                    spec.blocks.push(Block {
                        id: f.get("id")?,
                        cells: f.ids("cells")?,
                        input_gate: UnitId(f.get("input_gate")?),
                        output_gate: UnitId(f.get("output_gate")?),
                        forget_gate: forget,
                    });
                }
                other => return Err(perr(format!("unknown record `{other}`"))),
            }
        }
        Ok(spec)
    }
}
