use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64, I, ONE, ZERO};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::identity(2),
            Pauli::X => ComplexMatrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
            Pauli::Y => ComplexMatrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
            Pauli::Z => ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]]),
        }
    }

    pub fn is_identity(self) -> bool {
        self == Pauli::I
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Signed tensor product of single-qubit Pauli letters, leftmost letter on
/// the most significant qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    negative: bool,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self {
            negative: false,
            letters,
        }
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|p| !p.is_identity()).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Two strings anti-commute iff an odd number of positions carry
    /// distinct non-identity letters.
    pub fn anticommutes(&self, other: &Self) -> bool {
        assert_eq!(self.num_qubits(), other.num_qubits(), "qubit count mismatch");
        let clashes = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| !a.is_identity() && !b.is_identity() && a != b)
            .count();
        clashes % 2 == 1
    }

    pub fn materialize(&self) -> ComplexMatrix {
        let m = self
            .letters
            .iter()
            .fold(ComplexMatrix::identity(1), |acc, p| acc.kron(&p.matrix()));
        if self.negative {
            m.scale(C64::new(-1.0, 0.0))
        } else {
            m
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        if body.is_empty() {
            return Err(Error::invalid("empty Pauli string"));
        }
        let letters = body
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::invalid(format!("bad Pauli letter {c:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { negative, letters })
    }
}

/// 2^k pairwise anti-commuting Pauli strings.
///
/// With `xz_only = false` the family lives on 2^{k-1} qubits: for site `j`
/// the pair `I^{⊗j} Z Y^{⊗(m-1-j)}` and `I^{⊗j} X Y^{⊗(m-1-j)}`. With
/// `xz_only = true` only I, X and Z appear and the family lives on 2^k - 1
/// qubits, built recursively as `{B ⊗ I ⊗ Z} ∪ {I ⊗ C ⊗ X}` over two copies
/// of the (k-1)-family followed by a selector qubit.
pub fn anticommuting_family(k: u32, xz_only: bool) -> Result<Vec<PauliString>> {
    if k == 0 {
        return Err(Error::invalid("anti-commuting family needs k >= 1"));
    }
    if k > 10 {
        return Err(Error::invalid(format!("k = {k} is too large")));
    }
    Ok(if xz_only { xz_family(k) } else { chain_family(k) })
}

fn chain_family(k: u32) -> Vec<PauliString> {
    let m = 1usize << (k - 1);
    let mut out = Vec::with_capacity(2 * m);
    for site in 0..m {
        for head in [Pauli::Z, Pauli::X] {
            let mut letters = vec![Pauli::I; m];
            letters[site] = head;
            for l in letters.iter_mut().skip(site + 1) {
                *l = Pauli::Y;
            }
            out.push(PauliString::new(letters));
        }
    }
    out
}

fn xz_family(k: u32) -> Vec<PauliString> {
    if k == 1 {
        return vec![
            PauliString::new(vec![Pauli::Z]),
            PauliString::new(vec![Pauli::X]),
        ];
    }
    let sub = xz_family(k - 1);
    let block = sub[0].num_qubits();
    let idle = vec![Pauli::I; block];
    let mut out = Vec::with_capacity(2 * sub.len());
    for b in &sub {
        let mut letters = b.letters.clone();
        letters.extend_from_slice(&idle);
        letters.push(Pauli::Z);
        out.push(PauliString::new(letters));
    }
    for c in &sub {
        let mut letters = idle.clone();
        letters.extend_from_slice(&c.letters);
        letters.push(Pauli::X);
        out.push(PauliString::new(letters));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::matrix::kron;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn materialize_examples() {
        assert_eq!(ps("Z").materialize(), ComplexMatrix::diag(&[1.0, -1.0]));
        let minus_x = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        assert!(ps("-X").materialize().max_abs_diff(&minus_x) < 1e-15);
    }

    #[test]
    fn xiz_maps_000_to_100() {
        let m = ps("XIZ").materialize();
        let mut e0 = vec![ZERO; 8];
        e0[0] = ONE;
        let out = m.apply(&e0);
        for (i, a) in out.iter().enumerate() {
            let expected = if i == 4 { ONE } else { ZERO };
            assert!((a - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_matches_materialized_string() {
        let direct = kron(&[Pauli::X.matrix(), Pauli::I.matrix(), Pauli::Z.matrix()]).unwrap();
        assert!(direct.max_abs_diff(&ps("XIZ").materialize()) < 1e-15);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
        assert_eq!(ps("+ZZ").to_string(), "ZZ");
        assert_eq!(ps("-XY").to_string(), "-XY");
    }

    #[test]
    fn k1_family_is_z_then_x() {
        for xz in [false, true] {
            let fam = anticommuting_family(1, xz).unwrap();
            let names: Vec<String> = fam.iter().map(|p| p.to_string()).collect();
            assert_eq!(names, ["Z", "X"]);
        }
    }

    #[test]
    fn k2_families_match_scheme_assignments() {
        let xz: Vec<String> = anticommuting_family(2, true).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(xz, ["ZIZ", "XIZ", "IZX", "IXX"]);
        let chain: Vec<String> = anticommuting_family(2, false).unwrap().iter().map(|p| p.to_string()).collect();
        assert_eq!(chain, ["ZY", "XY", "IZ", "IX"]);
    }

    #[test]
    fn k0_rejected() {
        assert!(anticommuting_family(0, false).is_err());
    }

    #[test]
    fn family_sizes_and_pairwise_anticommutation() {
        for k in 1..=4u32 {
            for xz in [false, true] {
                let fam = anticommuting_family(k, xz).unwrap();
                assert_eq!(fam.len(), 1 << k);
                let qubits = if xz { (1usize << k) - 1 } else { 1usize << (k - 1) };
                assert!(fam.iter().all(|p| p.num_qubits() == qubits));
                if xz {
                    assert!(fam.iter().all(|p| !p.letters().contains(&Pauli::Y)));
                }
                for i in 0..fam.len() {
                    for j in i + 1..fam.len() {
                        assert!(fam[i].anticommutes(&fam[j]), "k={k} {} {}", fam[i], fam[j]);
                    }
                }
            }
        }
    }

    #[test]
    fn k3_general_family_matrix_anticommutator_vanishes() {
        let fam = anticommuting_family(3, false).unwrap();
        assert_eq!(fam[0].num_qubits(), 4);
        let mats: Vec<_> = fam.iter().map(|p| p.materialize()).collect();
        let mut pairs = 0;
        for i in 0..mats.len() {
            for j in i + 1..mats.len() {
                let ac = &(&mats[i] * &mats[j]) + &(&mats[j] * &mats[i]);
                assert!(ac.max_abs() < 1e-12);
                pairs += 1;
            }
        }
        assert_eq!(pairs, 28);
    }
}
