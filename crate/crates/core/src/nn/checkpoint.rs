//! Text checkpoint format for [`Network`] parameters.
//!
//! ```text
//! balmse-network 1
//! layers <L>
//! layer <in> <out> <tanh|identity>
//! <out lines of <in> weights, row-major>
//! <one line of <out> biases>
//! ...
//! ```
//!
//! Values use Rust's shortest round-trip float formatting, so a write/parse
//! cycle reproduces every bit.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::network::{Activation, Layer, Network};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const MAGIC: &str = "balmse-network 1";

fn write_values(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{v:?}");
    }
    out.push('\n');
}

pub fn write_network(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "layers {}", net.layers().len());
    for l in net.layers() {
        let _ = writeln!(
            out,
            "layer {} {} {}",
            l.input_width(),
            l.output_width(),
            l.activation.name()
        );
        for r in 0..l.output_width() {
            write_values(&mut out, l.weights.row(r));
        }
        write_values(&mut out, &l.bias);
    }
    out
}

fn parse_values(line: Option<&str>, expected: usize) -> Result<Vec<f64>> {
    let line = line.ok_or_else(|| Error::Parse("checkpoint truncated".into()))?;
    let values = line
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| Error::Parse(format!("bad value `{tok}`"))))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} values on a line, found {}",
            values.len()
        )));
    }
    Ok(values)
}

pub fn parse_network(text: &str) -> Result<Network> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(MAGIC) {
        return Err(Error::Parse("not a network checkpoint".into()));
    }
    let count: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("layers "))
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| Error::Parse("missing layer count".into()))?;
    let mut layers = Vec::with_capacity(count);
    for _ in 0..count {
        let head: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Parse("checkpoint truncated".into()))?
            .split_whitespace()
            .collect();
        let (fan_in, fan_out, act) = match head.as_slice() {
            ["layer", i, o, a] => (
                i.parse::<usize>().map_err(|_| Error::Parse("bad layer width".into()))?,
                o.parse::<usize>().map_err(|_| Error::Parse("bad layer width".into()))?,
                match *a {
                    "tanh" => Activation::Tanh,
                    "identity" => Activation::Identity,
                    other => return Err(Error::Parse(format!("unknown activation `{other}`"))),
                },
            ),
            _ => return Err(Error::Parse("malformed layer header".into())),
        };
        let mut w = Vec::with_capacity(fan_in * fan_out);
        for _ in 0..fan_out {
            w.extend(parse_values(lines.next(), fan_in)?);
        }
        let bias = parse_values(lines.next(), fan_out)?;
        layers.push(Layer {
            weights: Matrix::from_vec(fan_out, fan_in, w)?,
            bias,
            activation: act,
        });
    }
    Network::from_layers(layers)
}
