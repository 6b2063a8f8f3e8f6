//! Model files: one JSON header line, then each network in the core text
//! format behind a `network <name>` line.

use balmse_core::nn::{parse_network, write_network, Network};
use balmse_core::tabular::Schema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const FORMAT: &str = "balmse-model";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub kind: String,
    pub seed: u64,
    pub loss: String,
    /// SHA-256 of the training schema's sidecar text.
    pub schema_hash: String,
    pub config: serde_json::Value,
    pub networks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub header: Header,
    pub networks: Vec<Network>,
}

pub fn schema_hash(schema: &Schema) -> String {
    Sha256::digest(schema.to_sidecar().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Checkpoint {
    pub fn to_text(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for (name, net) in self.header.networks.iter().zip(&self.networks) {
            out.push_str(&format!("network {name}\n"));
            out.push_str(&write_network(net));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| CliError::Core(balmse_core::Error::Parse(m));
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let header: Header = serde_json::from_str(first).map_err(|e| bad(format!("checkpoint header: {e}")))?;
        if header.format != FORMAT {
            return Err(bad(format!("unknown checkpoint format `{}`", header.format)));
        }
        let mut sections: Vec<(String, String)> = Vec::new();
        for line in rest.lines() {
            if let Some(name) = line.strip_prefix("network ") {
                sections.push((name.trim().to_string(), String::new()));
            } else if let Some((_, body)) = sections.last_mut() {
                body.push_str(line);
                body.push('\n');
            } else if !line.trim().is_empty() {
                return Err(bad("data before the first network section".into()));
            }
        }
        let names: Vec<&String> = sections.iter().map(|s| &s.0).collect();
        if names != header.networks.iter().collect::<Vec<_>>() {
            return Err(bad(format!("header lists {:?}, file holds {names:?}", header.networks)));
        }
        let networks = sections.iter().map(|(_, body)| parse_network(body)).collect::<Result<_, _>>()?;
        Ok(Self { header, networks })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use balmse_core::nn::{init_network, Activation};
    use balmse_core::tabular::Column;

    #[test]
    fn round_trip_is_exact() {
        let a = init_network(&[5, 3, 2], &[Activation::Tanh, Activation::Identity], 4).unwrap();
        let b = init_network(&[2, 5], &[Activation::Tanh], 5).unwrap();
        let schema = Schema::new(vec![Column::numeric("x")], None).unwrap();
        let c = Checkpoint {
            header: Header {
                format: FORMAT.into(),
                kind: "autoencoder".into(),
                seed: 9,
                loss: "balanced".into(),
                schema_hash: schema_hash(&schema),
                config: serde_json::json!({"epochs": 10}),
                networks: vec!["encoder".into(), "decoder".into()],
            },
            networks: vec![a, b],
        };
        let text = c.to_text();
        assert_eq!(Checkpoint::parse(&text).unwrap(), c);
        assert_eq!(c.header.schema_hash.len(), 64);
        assert!(Checkpoint::parse(&text.replace("network decoder", "network other")).is_err());
    }
}
