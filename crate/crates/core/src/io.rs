//! Bridge files.
//!
//! ```json
//! { "algA": "Z2aff", "algB": "Z2aff", "rho": "|0|1|", "sigma": "|0|1|",
//!   "quads": [[0, 0, 0, 0], [0, 1, 0, 1]] }
//! ```
//!
//! Quadruples are written in lexicographic order.

use serde::{Deserialize, Serialize};

use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::relation::{Quad, QuadRel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeFile {
    #[serde(rename = "algA")]
    pub alg_a: String,
    #[serde(rename = "algB")]
    pub alg_b: String,
    pub rho: String,
    pub sigma: String,
    pub quads: Vec<Quad>,
}

impl BridgeFile {
    pub fn new(alg_a: &str, rho: &Congruence, alg_b: &str, sigma: &Congruence, t: &QuadRel) -> Self {
        BridgeFile {
            alg_a: alg_a.to_string(),
            alg_b: alg_b.to_string(),
            rho: rho.to_string(),
            sigma: sigma.to_string(),
            quads: t.quads().collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bridge file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bridge file serializes")
    }

    pub fn congruences(&self) -> Result<(Congruence, Congruence)> {
        Ok((Congruence::parse(&self.rho)?, Congruence::parse(&self.sigma)?))
    }

    /// The relation, given the universe sizes of the two algebras.
    pub fn relation(&self, na: usize, nb: usize) -> Result<QuadRel> {
        QuadRel::from_quads(na, nb, self.quads.iter().copied())
    }
}
