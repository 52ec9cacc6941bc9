use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Truth table of a k-input gate. `outputs[i]` is G(i) with the input bits of
/// `i` read big-endian (x₁ is the most significant bit), so the label string
/// lists G(0…0), …, G(1…1) in order, e.g. AND is "0001".
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateTable {
    k: u32,
    outputs: Vec<bool>,
}

pub const MAX_INPUT_BITS: u32 = 10;

impl GateTable {
    pub fn new(k: u32, outputs: Vec<bool>) -> Result<Self> {
        if k == 0 || k > MAX_INPUT_BITS {
            return Err(Error::invalid(format!("gate arity {k} out of range 1..={MAX_INPUT_BITS}")));
        }
        if outputs.len() != 1 << k {
            return Err(Error::invalid(format!(
                "a {k}-input table needs {} outputs, got {}",
                1 << k,
                outputs.len()
            )));
        }
        Ok(Self { k, outputs })
    }

    /// Table whose label, read as a binary number, equals `index`.
    pub fn from_index(k: u32, index: usize) -> Result<Self> {
        let lines = 1usize << k;
        if k > 5 || index >= 1usize << lines {
            return Err(Error::invalid(format!("table index {index} out of range for k={k}")));
        }
        let outputs = (0..lines).map(|i| (index >> (lines - 1 - i)) & 1 == 1).collect();
        Self::new(k, outputs)
    }

    /// Inverse of [`GateTable::from_index`].
    pub fn index(&self) -> usize {
        self.outputs.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    /// All 2^{2^k} tables in label order.
    pub fn all(k: u32) -> Result<Vec<GateTable>> {
        if k == 0 || k > 4 {
            return Err(Error::invalid(format!("enumerating all tables needs 1 <= k <= 4, got {k}")));
        }
        (0..1usize << (1 << k)).map(|i| Self::from_index(k, i)).collect()
    }

    pub fn and() -> Self {
        Self::new(2, vec![false, false, false, true]).expect("static table")
    }

    pub fn or() -> Self {
        Self::new(2, vec![false, true, true, true]).expect("static table")
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn lines(&self) -> usize {
        self.outputs.len()
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn eval(&self, input: usize) -> bool {
        self.outputs[input]
    }

    /// Evaluates on bits given most-significant first.
    pub fn eval_bits(&self, bits: &[bool]) -> Result<bool> {
        Ok(self.outputs[self.input_index(bits)?])
    }

    pub fn input_index(&self, bits: &[bool]) -> Result<usize> {
        if bits.len() != self.k as usize {
            return Err(Error::invalid(format!(
                "gate takes {} input bits, got {}",
                self.k,
                bits.len()
            )));
        }
        Ok(bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize))
    }

    /// Every output flipped: the gate followed by a NOT.
    pub fn negated(&self) -> Self {
        Self {
            k: self.k,
            outputs: self.outputs.iter().map(|b| !b).collect(),
        }
    }

    /// Conditionally negated table, `G ⊕ pad`.
    pub fn padded(&self, pad: bool) -> Self {
        if pad {
            self.negated()
        } else {
            self.clone()
        }
    }

    /// G'(x) = G(x ⊕ mask): the gate preceded by NOTs on the masked inputs.
    pub fn with_input_flips(&self, mask: usize) -> Self {
        Self {
            k: self.k,
            outputs: (0..self.lines()).map(|x| self.outputs[x ^ mask]).collect(),
        }
    }

    pub fn hamming_distance(&self, other: &Self) -> usize {
        assert_eq!(self.k, other.k, "arity mismatch");
        self.outputs.iter().zip(&other.outputs).filter(|(a, b)| a != b).count()
    }

    pub fn label(&self) -> String {
        self.outputs.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for GateTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for GateTable {
    type Err = Error;

    /// Parses a label such as "0100"; the length fixes k.
    fn from_str(s: &str) -> Result<Self> {
        let outputs = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("bad truth-table character {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let n = outputs.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid(format!("truth-table label {s:?} must have 2^k characters")));
        }
        Self::new(n.trailing_zeros(), outputs)
    }
}

impl Serialize for GateTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for GateTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Bits of `index` over `width` positions, most significant first.
pub fn bits_of(index: usize, width: usize) -> Vec<bool> {
    (0..width).map(|i| (index >> (width - 1 - i)) & 1 == 1).collect()
}
