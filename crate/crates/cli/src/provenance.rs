//! Provenance stamped on every artifact.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub struct Provenance {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config_sha256: String,
    pub invocation: String,
}

impl Provenance {
    /// `args` excludes the program name. `--threads` does not affect outputs
    /// and is left out of both the hash and the invocation; input file
    /// contents are hashed in.
    pub fn new(
        command: &'static str,
        seed: Option<u64>,
        args: &[String],
        inputs: &[Vec<u8>],
    ) -> Self {
        let mut kept = Vec::with_capacity(args.len());
        let mut skip = false;
        for a in args {
            if skip {
                skip = false;
            } else if a == "--threads" {
                skip = true;
            } else if !a.starts_with("--threads=") {
                kept.push(a);
            }
        }
        let mut h = Sha256::new();
        for a in &kept {
            h.update(a.as_bytes());
            h.update([0]);
        }
        for bytes in inputs {
            h.update(Sha256::digest(bytes));
        }
        let invocation = std::iter::once("wiretap".to_string())
            .chain(kept.iter().map(|a| quote(a)))
            .collect::<Vec<_>>()
            .join(" ");
        Provenance {
            command,
            seed,
            config_sha256: format!("{:x}", h.finalize()),
            invocation,
        }
    }

    pub fn csv_header(&self, extra: &[(&str, String)]) -> String {
        let mut out = format!(
            "# wiretap {}\n# command: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command
        );
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed: {seed}\n"));
        }
        out.push_str(&format!("# config-sha256: {}\n", self.config_sha256));
        out.push_str(&format!("# invocation: {}\n", self.invocation));
        for (k, v) in extra {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out
    }

    pub fn json(&self) -> Value {
        json!({
            "tool": "wiretap",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "config_sha256": self.config_sha256,
            "invocation": self.invocation,
        })
    }
}

fn quote(a: &str) -> String {
    let plain = !a.is_empty()
        && a.chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_./:=,+@%".contains(c));
    if plain {
        a.to_string()
    } else {
        format!("'{}'", a.replace('\'', r"'\''"))
    }
}
