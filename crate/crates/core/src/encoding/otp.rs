//! Shippable gate one-time programs and their measurement semantics.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::general::{encode_general, ObservableAssignment};
use super::states::{elliptical_rows, g1_state, linear_rows, product_state, PureState};
use super::table::GateTable;
use crate::error::{Error, Result};
use crate::qmath::{anticommuting_family, eig_hermitian, ComplexMatrix, Pauli, PauliString, C64};

/// Largest Hilbert-space dimension the general encoder will diagonalize.
pub const GENERAL_DIM_CAP: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Single-qubit conjugate coding, k = 1.
    G1,
    /// Three photons, X/Z measurements only, k = 2.
    LinearG2,
    /// Two photons including an elliptical state, k = 2.
    EllipticalG2,
    /// Maximum-entropy encoding for any k, shipped as one joint register.
    General,
}

impl Scheme {
    /// Fixed arity, or `None` for the general scheme.
    pub fn fixed_k(self) -> Option<u32> {
        match self {
            Scheme::G1 => Some(1),
            Scheme::LinearG2 | Scheme::EllipticalG2 => Some(2),
            Scheme::General => None,
        }
    }

    /// Observable assignment used to decode a k-input gate.
    pub fn assignment(self, k: u32) -> Result<ObservableAssignment> {
        self.check_k(k)?;
        let family = match self {
            Scheme::LinearG2 => anticommuting_family(2, true)?,
            _ => anticommuting_family(k, false)?,
        };
        ObservableAssignment::new(family)
    }

    fn check_k(self, k: u32) -> Result<()> {
        match self.fixed_k() {
            Some(fixed) if fixed != k => Err(Error::invalid(format!(
                "{self} scheme encodes k = {fixed} gates, got k = {k}"
            ))),
            _ if k == 0 => Err(Error::invalid("gate arity must be at least 1")),
            _ => Ok(()),
        }
    }

    /// Physical registers shipped per copy and the qubit count of each.
    pub fn photon_layout(self, k: u32) -> Result<Vec<usize>> {
        self.check_k(k)?;
        Ok(match self {
            Scheme::G1 => vec![1],
            Scheme::LinearG2 => vec![1, 1, 1],
            Scheme::EllipticalG2 => vec![1, 1],
            Scheme::General => vec![1usize << (k - 1)],
        })
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::G1 => "g1",
            Scheme::LinearG2 => "linear",
            Scheme::EllipticalG2 => "elliptical",
            Scheme::General => "general",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g1" => Ok(Scheme::G1),
            "linear" | "linear_g2" => Ok(Scheme::LinearG2),
            "elliptical" | "elliptical_g2" => Ok(Scheme::EllipticalG2),
            "general" => Ok(Scheme::General),
            other => Err(Error::invalid(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Which qubits Bob measures, in which basis, and which outcomes he XORs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub bases: Vec<Option<Pauli>>,
    pub parity_set: Vec<usize>,
}

impl MeasurementPlan {
    pub fn from_observable(obs: &PauliString) -> Self {
        let bases: Vec<_> = obs
            .letters()
            .iter()
            .map(|&p| (!p.is_identity()).then_some(p))
            .collect();
        let parity_set = (0..bases.len()).filter(|&q| bases[q].is_some()).collect();
        Self { bases, parity_set }
    }

    pub fn num_qubits(&self) -> usize {
        self.bases.len()
    }

    /// XOR of the parity-set outcome bits.
    pub fn parity(&self, outcomes: &[Option<bool>]) -> bool {
        self.parity_set
            .iter()
            .fold(false, |acc, &q| acc ^ outcomes[q].unwrap_or(false))
    }
}

/// Bob's measurement for `input_bits` (most significant first).
pub fn measurement_plan(scheme: Scheme, input_bits: &[bool]) -> Result<MeasurementPlan> {
    let k = input_bits.len() as u32;
    let assignment = scheme.assignment(k)?;
    let index = input_bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize);
    Ok(MeasurementPlan::from_observable(assignment.observable(index)))
}

/// Born-rule measurement of a sequence of registers. Plan qubits are numbered
/// across registers in order; each measured qubit collapses its register.
/// Returns one outcome per plan qubit (`true` for the −1 eigenvalue).
pub fn measure_registers<R: Rng + ?Sized>(
    registers: &[PureState],
    plan: &MeasurementPlan,
    rng: &mut R,
) -> Result<Vec<Option<bool>>> {
    let total: usize = registers.iter().map(|r| r.num_qubits()).sum();
    if total != plan.num_qubits() {
        return Err(Error::invalid(format!(
            "plan covers {} qubits but {} were supplied",
            plan.num_qubits(),
            total
        )));
    }
    let mut outcomes = vec![None; total];
    let mut offset = 0;
    for reg in registers {
        let n = reg.num_qubits();
        let mut state = reg.clone();
        for local in 0..n {
            if let Some(basis) = plan.bases[offset + local] {
                let (bit, collapsed) = measure_qubit(&state, local, basis, rng);
                outcomes[offset + local] = Some(bit);
                state = collapsed;
            }
        }
        offset += n;
    }
    Ok(outcomes)
}

fn measure_qubit<R: Rng + ?Sized>(state: &PureState, qubit: usize, basis: Pauli, rng: &mut R) -> (bool, PureState) {
    let mut flipped = state.clone();
    flipped.apply_pauli(qubit, basis);
    let e = state.inner(&flipped).re.clamp(-1.0, 1.0);
    let minus = rng.random::<f64>() < 0.5 * (1.0 - e);
    let sign = if minus { -1.0 } else { 1.0 };
    let amps: Vec<C64> = state
        .amplitudes()
        .iter()
        .zip(flipped.amplitudes())
        .map(|(a, b)| a + b * sign)
        .collect();
    // A zero-probability branch cannot be drawn except through rounding.
    let collapsed = PureState::normalized(amps).unwrap_or_else(|_| state.clone());
    (minus, collapsed)
}

/// Representative register lists whose uniform mixture encodes `table`.
pub fn representatives(scheme: Scheme, table: &GateTable) -> Result<Vec<Vec<PureState>>> {
    scheme.check_k(table.k())?;
    match scheme {
        Scheme::G1 => Ok(vec![vec![g1_state(table)?]]),
        Scheme::LinearG2 => linear_rows(table),
        Scheme::EllipticalG2 => elliptical_rows(table),
        Scheme::General => general_representatives(table),
    }
}

/// ρ_G has a flat spectrum on its support (half the register dimension), so
/// its eigenvectors there form a uniform pure-state decomposition.
fn general_representatives(table: &GateTable) -> Result<Vec<Vec<PureState>>> {
    let k = table.k();
    let dim = 1usize << (1usize << (k.min(5) - 1));
    if k > 4 || dim > GENERAL_DIM_CAP {
        return Err(Error::ResourceLimit {
            dim: if k > 4 { usize::MAX } else { dim },
            cap: GENERAL_DIM_CAP,
        });
    }
    let rho = encode_general(table, &Scheme::General.assignment(k)?)?;
    let eig = eig_hermitian(&rho)?;
    (0..dim / 2)
        .map(|j| Ok(vec![PureState::normalized(eig.vector(j))?]))
        .collect()
}

/// Uniform mixture over representatives, as a density matrix.
pub fn mixture_density(scheme: Scheme, table: &GateTable) -> Result<ComplexMatrix> {
    let reps = representatives(scheme, table)?;
    let w = 1.0 / reps.len() as f64;
    let dim = product_state(&reps[0]).dim();
    Ok(reps.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, row| {
        &acc + &product_state(row).density().scale_real(w)
    }))
}

/// Exact per-input probability of reading the correct line.
pub fn success_probability(scheme: Scheme, table: &GateTable) -> Result<Vec<f64>> {
    success_probability_with_fidelity(scheme, table, 1.0)
}

/// As [`success_probability`] with every qubit replaced by a uniformly random
/// Pauli image with probability `1 − fidelity`, which shrinks an observable
/// expectation by `fidelity^{weight}`.
pub fn success_probability_with_fidelity(scheme: Scheme, table: &GateTable, fidelity: f64) -> Result<Vec<f64>> {
    check_fidelity(fidelity)?;
    let reps = representatives(scheme, table)?;
    let states: Vec<PureState> = reps.iter().map(|r| product_state(r)).collect();
    let assignment = scheme.assignment(table.k())?;
    Ok((0..table.lines())
        .map(|i| {
            let sigma = assignment.observable(i);
            let m = sigma.materialize();
            let e = states.iter().map(|s| s.expectation(&m)).sum::<f64>() / states.len() as f64;
            let sign = if table.eval(i) { -1.0 } else { 1.0 };
            0.5 * (1.0 + sign * e * fidelity.powi(sigma.weight() as i32))
        })
        .collect())
}

pub(crate) fn check_fidelity(fidelity: f64) -> Result<()> {
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::invalid(format!("fidelity {fidelity} outside (0, 1]")));
    }
    Ok(())
}

/// Outcome of one OTP measurement, before the pad is removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub plan: MeasurementPlan,
    pub outcomes: Vec<Option<bool>>,
    pub raw: bool,
}

/// One encoded copy of a gate: the physical registers encode `table ⊕ pad`.
#[derive(Debug, Clone)]
pub struct GateOtp {
    scheme: Scheme,
    registers: Vec<PureState>,
    table: GateTable,
    representative_index: usize,
    pad: bool,
    consumed: bool,
}

impl GateOtp {
    /// Unpadded encoding with a uniformly sampled representative.
    pub fn encode<R: Rng + ?Sized>(scheme: Scheme, table: &GateTable, rng: &mut R) -> Result<Self> {
        Self::encode_padded(scheme, table, false, rng)
    }

    pub fn encode_padded<R: Rng + ?Sized>(scheme: Scheme, table: &GateTable, pad: bool, rng: &mut R) -> Result<Self> {
        let reps = representatives(scheme, &table.padded(pad))?;
        let representative_index = rng.random_range(0..reps.len());
        let registers = reps.into_iter().nth(representative_index).expect("index in range");
        Ok(Self {
            scheme,
            registers,
            table: table.clone(),
            representative_index,
            pad,
            consumed: false,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Logical table (before padding).
    pub fn table(&self) -> &GateTable {
        &self.table
    }

    /// Table actually carried by the registers.
    pub fn encoded_table(&self) -> GateTable {
        self.table.padded(self.pad)
    }

    pub fn registers(&self) -> &[PureState] {
        &self.registers
    }

    pub fn num_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.num_qubits()).sum()
    }

    pub fn representative_index(&self) -> usize {
        self.representative_index
    }

    pub fn pad(&self) -> bool {
        self.pad
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Replaces the registers for transport; the OTP is consumed.
    pub fn take_registers(&mut self) -> Result<Vec<PureState>> {
        self.consume()?;
        Ok(std::mem::take(&mut self.registers))
    }

    /// Preparation noise: each qubit independently, with probability
    /// `1 − fidelity`, receives a uniformly random Pauli (identity included).
    pub fn apply_noise<R: Rng + ?Sized>(&mut self, fidelity: f64, rng: &mut R) -> Result<()> {
        check_fidelity(fidelity)?;
        if fidelity == 1.0 {
            return Ok(());
        }
        for reg in &mut self.registers {
            for q in 0..reg.num_qubits() {
                if rng.random::<f64>() >= fidelity {
                    let p = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)];
                    reg.apply_pauli(q, p);
                }
            }
        }
        Ok(())
    }

    /// Measures per the plan for `input_bits` and consumes the OTP. The
    /// returned `raw` bit still carries the pad.
    pub fn measure<R: Rng + ?Sized>(&mut self, input_bits: &[bool], rng: &mut R) -> Result<MeasurementRecord> {
        if self.consumed {
            return Err(Error::AlreadyConsumed);
        }
        if input_bits.len() != self.table.k() as usize {
            return Err(Error::invalid(format!(
                "gate takes {} input bits, got {}",
                self.table.k(),
                input_bits.len()
            )));
        }
        let plan = measurement_plan(self.scheme, input_bits)?;
        let outcomes = measure_registers(&self.registers, &plan, rng)?;
        self.consumed = true;
        let raw = plan.parity(&outcomes);
        Ok(MeasurementRecord { plan, outcomes, raw })
    }

    /// Decoded gate output: measured parity XOR pad.
    pub fn evaluate<R: Rng + ?Sized>(&mut self, input_bits: &[bool], rng: &mut R) -> Result<bool> {
        Ok(self.measure(input_bits, rng)?.raw ^ self.pad)
    }

    fn consume(&mut self) -> Result<()> {
        if self.consumed {
            return Err(Error::AlreadyConsumed);
        }
        self.consumed = true;
        Ok(())
    }
}

/// Convenience wrapper matching the free-function form of evaluation.
pub fn evaluate_otp<R: Rng + ?Sized>(otp: &mut GateOtp, input_bits: &[bool], rng: &mut R) -> Result<bool> {
    otp.evaluate(input_bits, rng)
}

pub fn encode_linear_g2<R: Rng + ?Sized>(table: &GateTable, rng: &mut R) -> Result<GateOtp> {
    GateOtp::encode(Scheme::LinearG2, table, rng)
}

pub fn encode_elliptical_g2<R: Rng + ?Sized>(table: &GateTable, rng: &mut R) -> Result<GateOtp> {
    GateOtp::encode(Scheme::EllipticalG2, table, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::states::{G1Gate, LINEAR_TABLE};
    use crate::qmath::trace_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn plans_match_documented_rules() {
        let p = measurement_plan(Scheme::G1, &[true]).unwrap();
        assert_eq!(p.bases, vec![Some(Pauli::X)]);
        let p = measurement_plan(Scheme::LinearG2, &[false, true]).unwrap();
        assert_eq!(p.bases, vec![Some(Pauli::X), None, Some(Pauli::Z)]);
        assert_eq!(p.parity_set, vec![0, 2]);
        let p = measurement_plan(Scheme::EllipticalG2, &[true, false]).unwrap();
        assert_eq!(p.bases, vec![None, Some(Pauli::Z)]);
        assert_eq!(p.parity_set, vec![1]);
        let p = measurement_plan(Scheme::EllipticalG2, &[false, true]).unwrap();
        assert_eq!(p.bases, vec![Some(Pauli::X), Some(Pauli::Y)]);
        assert!(measurement_plan(Scheme::LinearG2, &[true]).is_err());
    }

    #[test]
    fn linear_rule_in_closed_form() {
        // Independent check of the linear plan against the linear photon table: for photons
        // (a, b, c) the output on input x₁x₂ is a_{x₂}⊕c_{x₁} if x₁ = 0,
        // else b_{x₂}⊕c_{x₁}.
        for (idx, rows) in LINEAR_TABLE.iter().enumerate() {
            let t = GateTable::from_index(2, idx).unwrap();
            for row in rows {
                let [a, b, c] = row.map(|g: G1Gate| g.table());
                for x in 0..4 {
                    let (x1, x2) = (x >> 1, x & 1);
                    let first = if x1 == 0 { &a } else { &b };
                    assert_eq!(first.eval(x2) ^ c.eval(x1), t.eval(x), "gate {t} row {row:?}");
                }
            }
        }
    }

    #[test]
    fn mixtures_equal_max_entropy_states() {
        for t in GateTable::all(2).unwrap() {
            for s in [Scheme::LinearG2, Scheme::EllipticalG2, Scheme::General] {
                let mix = mixture_density(s, &t).unwrap();
                let rho = encode_general(&t, &s.assignment(2).unwrap()).unwrap();
                assert!(trace_distance(&mix, &rho).unwrap() < 1e-12, "{s} {t}");
            }
        }
        for k in [1, 3] {
            let a = Scheme::General.assignment(k).unwrap();
            for t in GateTable::all(k).unwrap().iter().step_by(7) {
                let mix = mixture_density(Scheme::General, t).unwrap();
                assert!(trace_distance(&mix, &encode_general(t, &a).unwrap()).unwrap() < 1e-12, "{t}");
            }
        }
    }

    #[test]
    fn exact_success_values() {
        let p1 = 0.5 + 0.5 * std::f64::consts::FRAC_1_SQRT_2;
        for g in G1Gate::ALL {
            for p in success_probability(Scheme::G1, &g.table()).unwrap() {
                assert!((p - p1).abs() < 1e-12);
            }
        }
        for t in GateTable::all(2).unwrap() {
            for s in [Scheme::LinearG2, Scheme::EllipticalG2] {
                for p in success_probability(s, &t).unwrap() {
                    assert!((p - 0.75).abs() < 1e-12);
                }
            }
        }
        let t3 = GateTable::from_index(3, 0b1001_0110).unwrap();
        for p in success_probability(Scheme::General, &t3).unwrap() {
            assert!((p - 0.676_776_695_296_636_9).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_shrinks_expectation_by_weight() {
        let t = GateTable::and();
        let lin = success_probability_with_fidelity(Scheme::LinearG2, &t, 0.9).unwrap();
        for p in lin {
            assert!((p - (0.5 + 0.25 * 0.81)).abs() < 1e-12);
        }
        let ell = success_probability_with_fidelity(Scheme::EllipticalG2, &t, 0.9).unwrap();
        assert!((ell[0] - (0.5 + 0.25 * 0.81)).abs() < 1e-12);
        assert!((ell[2] - (0.5 + 0.25 * 0.9)).abs() < 1e-12);
        assert!(success_probability_with_fidelity(Scheme::G1, &"01".parse().unwrap(), 0.0).is_err());
    }

    #[test]
    fn reuse_is_rejected() {
        let mut r = rng(1);
        let mut otp = encode_linear_g2(&GateTable::and(), &mut r).unwrap();
        otp.evaluate(&[true, true], &mut r).unwrap();
        assert!(matches!(otp.evaluate(&[true, true], &mut r), Err(Error::AlreadyConsumed)));
    }

    #[test]
    fn pad_flips_output_on_identical_streams() {
        let t = GateTable::or();
        for seed in 0..50 {
            let mut a = GateOtp::encode_padded(Scheme::EllipticalG2, &t, false, &mut rng(seed)).unwrap();
            let mut b = a.clone();
            b.pad = true;
            let oa = a.evaluate(&[false, true], &mut rng(seed + 1000)).unwrap();
            let ob = b.evaluate(&[false, true], &mut rng(seed + 1000)).unwrap();
            assert_ne!(oa, ob);
        }
    }

    #[test]
    fn pad_average_is_maximally_mixed() {
        for s in [Scheme::G1, Scheme::LinearG2, Scheme::EllipticalG2] {
            let k = s.fixed_k().unwrap();
            for t in GateTable::all(k).unwrap() {
                let a = mixture_density(s, &t).unwrap();
                let b = mixture_density(s, &t.negated()).unwrap();
                let avg = (&a + &b).scale_real(0.5);
                let dim = avg.rows();
                let mm = ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64);
                assert!(trace_distance(&avg, &mm).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn elliptical_row_sampling_is_uniform() {
        let mut r = rng(7);
        let mut counts = [0usize; 4];
        for _ in 0..4000 {
            counts[encode_linear_g2(&"0000".parse().unwrap(), &mut r).unwrap().representative_index()] += 1;
        }
        for c in counts {
            assert!((c as f64 / 4000.0 - 0.25).abs() < 0.03);
        }
    }

    #[test]
    fn scheme_parse_and_arity() {
        assert_eq!("linear".parse::<Scheme>().unwrap(), Scheme::LinearG2);
        assert!("quantum".parse::<Scheme>().is_err());
        assert!(GateOtp::encode(Scheme::G1, &GateTable::and(), &mut rng(0)).is_err());
        assert_eq!(Scheme::General.photon_layout(3).unwrap(), vec![4]);
    }
}
