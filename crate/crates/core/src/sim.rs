//! Exact bit-level simulation of permutation circuits.
//!
//! Every gate kind in the IR maps computational basis states to computational
//! basis states, so a circuit is fully characterised by its action on bit
//! strings. By linearity, a lookup circuit that maps `|x>|0>` to `|x>|f(x)>`
//! for every basis address `x` (with dirty qubits restored for every dirty
//! basis state) implements the lookup on arbitrary superpositions too.
//!
//! [`simulate`] runs one basis state. [`simulate_lanes`] runs 64 basis states
//! at once, one per bit of a `u64` word, which is what the verifiers use.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, GateKind, QubitRef, RegId, Role};
use crate::error::SimError;
use crate::qrom::{LookupTable, QromPlan};

/// A complete assignment of bits to the qubits of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitState {
    bits: Vec<bool>,
}

impl BitState {
    pub fn zeros(circuit: &Circuit) -> Self {
        BitState {
            bits: vec![false; circuit.num_qubits()],
        }
    }

    pub fn get(&self, circuit: &Circuit, q: QubitRef) -> bool {
        self.bits[circuit.flat_index(q)]
    }

    pub fn set(&mut self, circuit: &Circuit, q: QubitRef, value: bool) {
        self.bits[circuit.flat_index(q)] = value;
    }

    /// Writes `value` into a register, bit 0 at offset 0. Registers wider than
    /// 64 qubits take the remaining bits as 0.
    pub fn set_register(&mut self, circuit: &Circuit, reg: RegId, value: u64) {
        for q in circuit.qubits(reg) {
            let bit = q.offset < 64 && (value >> q.offset) & 1 == 1;
            self.set(circuit, q, bit);
        }
    }

    pub fn register_value(&self, circuit: &Circuit, reg: RegId) -> u64 {
        circuit
            .qubits(reg)
            .into_iter()
            .filter(|q| q.offset < 64 && self.get(circuit, *q))
            .fold(0, |acc, q| acc | 1 << q.offset)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Gate list lowered to flat qubit indices.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    ops: Vec<(GateKind, [usize; 3])>,
    labels: Vec<String>,
}

impl CompiledCircuit {
    pub fn new(circuit: &Circuit) -> Self {
        let ops = circuit
            .gates()
            .iter()
            .map(|g| {
                let mut idx = [0usize; 3];
                for (slot, q) in idx.iter_mut().zip(&g.operands) {
                    *slot = circuit.flat_index(*q);
                }
                (g.kind, idx)
            })
            .collect();
        let mut labels = Vec::with_capacity(circuit.num_qubits());
        for reg in circuit.registers() {
            for o in 0..reg.size {
                labels.push(format!("{}[{}]", reg.name, o));
            }
        }
        CompiledCircuit { ops, labels }
    }

    pub fn num_qubits(&self) -> usize {
        self.labels.len()
    }
}

/// 64 basis states simulated side by side: bit `lane` of `words[i]` is the
/// value of flat qubit `i` in lane `lane`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaneState {
    pub words: Vec<u64>,
}

impl LaneState {
    pub fn zeros(circuit: &Circuit) -> Self {
        LaneState {
            words: vec![0; circuit.num_qubits()],
        }
    }

    pub fn set_bit(&mut self, flat: usize, lane: usize, value: bool) {
        let mask = 1u64 << lane;
        if value {
            self.words[flat] |= mask;
        } else {
            self.words[flat] &= !mask;
        }
    }

    pub fn bit(&self, flat: usize, lane: usize) -> bool {
        (self.words[flat] >> lane) & 1 == 1
    }

    pub fn set_register(&mut self, circuit: &Circuit, reg: RegId, lane: usize, value: u64) {
        for q in circuit.qubits(reg) {
            let bit = q.offset < 64 && (value >> q.offset) & 1 == 1;
            self.set_bit(circuit.flat_index(q), lane, bit);
        }
    }

    pub fn register_value(&self, circuit: &Circuit, reg: RegId, lane: usize) -> u64 {
        circuit
            .qubits(reg)
            .into_iter()
            .filter(|q| q.offset < 64 && self.bit(circuit.flat_index(*q), lane))
            .fold(0, |acc, q| acc | 1 << q.offset)
    }
}

/// Runs `circuit` on one basis state.
pub fn simulate(circuit: &Circuit, initial: &BitState) -> Result<BitState, SimError> {
    let compiled = CompiledCircuit::new(circuit);
    let mut lanes = LaneState {
        words: initial.bits.iter().map(|&b| b as u64).collect(),
    };
    simulate_lanes(&compiled, &mut lanes, 1)?;
    Ok(BitState {
        bits: lanes.words.iter().map(|w| w & 1 == 1).collect(),
    })
}

/// Runs a compiled circuit on all 64 lanes. Temporary-AND checks only look at
/// lanes set in `active`.
pub fn simulate_lanes(
    circuit: &CompiledCircuit,
    state: &mut LaneState,
    active: u64,
) -> Result<(), SimError> {
    if state.words.len() != circuit.num_qubits() {
        return Err(SimError::StateSize {
            expected: circuit.num_qubits(),
            got: state.words.len(),
        });
    }
    let w = &mut state.words;
    for (index, &(kind, [a, b, t])) in circuit.ops.iter().enumerate() {
        match kind {
            GateKind::X => w[a] = !w[a],
            GateKind::Cnot => w[b] ^= w[a],
            GateKind::Toffoli => w[t] ^= w[a] & w[b],
            GateKind::Cswap => {
                let m = w[a] & (w[b] ^ w[t]);
                w[b] ^= m;
                w[t] ^= m;
            }
            GateKind::TempAnd => {
                if w[t] & active != 0 {
                    return Err(SimError::TempAndDirtyTarget {
                        gate: index,
                        qubit: circuit.labels[t].clone(),
                    });
                }
                w[t] ^= w[a] & w[b];
            }
            GateKind::TempAndUncompute => {
                w[t] ^= w[a] & w[b];
                if w[t] & active != 0 {
                    return Err(SimError::UncomputeLeftOne {
                        gate: index,
                        qubit: circuit.labels[t].clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// One failed lookup case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationFailure {
    pub address: u64,
    /// Initial dirty bits, flattened over all dirty registers.
    pub dirty_pattern: Vec<bool>,
    /// Observed value of each output register.
    pub observed_output: Vec<u64>,
    /// Final dirty bits.
    pub observed_dirty: Vec<bool>,
    pub diagnostics: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub cases_run: u64,
    pub failures: Vec<VerificationFailure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies a circuit built for `table` under `plan`.
///
/// See [`verify_lookup`]; the plan is only checked for consistency with the
/// table.
pub fn verify_qrom(
    circuit: &Circuit,
    table: &LookupTable,
    plan: &QromPlan,
    dirty_trials: usize,
    seed: u64,
) -> Result<VerificationReport, crate::Error> {
    if plan.n != table.len() as u64 || plan.b != table.bit_width() {
        return Err(crate::error::ParamError::new(format!(
            "plan is for N={}, b={} but table has N={}, b={}",
            plan.n,
            plan.b,
            table.len(),
            table.bit_width()
        ))
        .into());
    }
    Ok(verify_lookup(circuit, &[table], dirty_trials, seed, true)?)
}

struct Layout {
    control: Option<usize>,
    address: Vec<usize>,
    outputs: Vec<Vec<usize>>,
    dirty: Vec<usize>,
    scratch: Vec<usize>,
}

fn flat_of(circuit: &Circuit, role: Role) -> Vec<usize> {
    circuit
        .registers_with_role(role)
        .flat_map(|r| circuit.qubits(r))
        .map(|q| circuit.flat_index(q))
        .collect()
}

impl Layout {
    fn of(circuit: &Circuit) -> Self {
        // address bits: r (low) then q (high)
        let mut address = flat_of(circuit, Role::AddressR);
        address.extend(flat_of(circuit, Role::AddressQ));
        let outputs = circuit
            .registers_with_role(Role::Output)
            .map(|r| {
                circuit
                    .qubits(r)
                    .into_iter()
                    .map(|q| circuit.flat_index(q))
                    .collect()
            })
            .collect();
        let mut scratch = flat_of(circuit, Role::Work);
        scratch.extend(flat_of(circuit, Role::Temp));
        Layout {
            control: flat_of(circuit, Role::Control).first().copied(),
            address,
            outputs,
            dirty: flat_of(circuit, Role::Dirty),
            scratch,
        }
    }
}

/// Exhaustively checks a (possibly multi-output) lookup circuit.
///
/// For every address `x < N` and `dirty_trials` seeded pseudorandom dirty
/// patterns: output register `i` must equal `tables[i][x]`, dirty qubits must
/// be restored, address and control unchanged, and work/temp qubits 0. With
/// `control_on = false` the control line is held at 0 and every output must
/// stay 0 instead. Circuits without a control register ignore `control_on`.
pub fn verify_lookup(
    circuit: &Circuit,
    tables: &[&LookupTable],
    dirty_trials: usize,
    seed: u64,
    control_on: bool,
) -> Result<VerificationReport, SimError> {
    let layout = Layout::of(circuit);
    let compiled = CompiledCircuit::new(circuit);
    let n = tables.first().map_or(0, |t| t.len() as u64);
    assert_eq!(
        layout.outputs.len(),
        tables.len(),
        "one output register per table"
    );
    let control_value = control_on || layout.control.is_none();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trials = dirty_trials.max(1);

    let cases: Vec<(u64, Vec<bool>)> = (0..n)
        .flat_map(|x| (0..trials).map(move |_| x))
        .map(|x| (x, layout.dirty.iter().map(|_| rng.gen()).collect()))
        .collect();

    let mut report = VerificationReport::default();
    for batch in cases.chunks(64) {
        let mut state = LaneState::zeros(circuit);
        for (lane, (x, phi)) in batch.iter().enumerate() {
            if let Some(c) = layout.control {
                state.set_bit(c, lane, control_on);
            }
            for (i, &a) in layout.address.iter().enumerate() {
                state.set_bit(a, lane, (x >> i) & 1 == 1);
            }
            for (&d, &v) in layout.dirty.iter().zip(phi) {
                state.set_bit(d, lane, v);
            }
        }
        let active = if batch.len() == 64 {
            u64::MAX
        } else {
            (1u64 << batch.len()) - 1
        };
        simulate_lanes(&compiled, &mut state, active)?;

        for (lane, (x, phi)) in batch.iter().enumerate() {
            report.cases_run += 1;
            let mut problems = Vec::new();
            let observed_output: Vec<u64> = layout
                .outputs
                .iter()
                .map(|bits| {
                    bits.iter()
                        .enumerate()
                        .filter(|(i, &f)| *i < 64 && state.bit(f, lane))
                        .fold(0u64, |acc, (i, _)| acc | 1 << i)
                })
                .collect();
            for (i, (table, got)) in tables.iter().zip(&observed_output).enumerate() {
                let want = if control_value { table.get(*x) } else { 0 };
                if *got != want {
                    problems.push(format!("output {i}: expected {want:#x}, got {got:#x}"));
                }
            }
            let observed_dirty: Vec<bool> =
                layout.dirty.iter().map(|&d| state.bit(d, lane)).collect();
            if &observed_dirty != phi {
                let changed = phi
                    .iter()
                    .zip(&observed_dirty)
                    .filter(|(a, b)| a != b)
                    .count();
                problems.push(format!("{changed} dirty qubit(s) not restored"));
            }
            let addr_ok = layout
                .address
                .iter()
                .enumerate()
                .all(|(i, &a)| state.bit(a, lane) == ((x >> i) & 1 == 1));
            if !addr_ok {
                problems.push("address register modified".into());
            }
            if let Some(c) = layout.control {
                if state.bit(c, lane) != control_on {
                    problems.push("control modified".into());
                }
            }
            let busy = layout
                .scratch
                .iter()
                .filter(|&&s| state.bit(s, lane))
                .count();
            if busy > 0 {
                problems.push(format!("{busy} work/temp qubit(s) left at 1"));
            }
            if !problems.is_empty() {
                report.failures.push(VerificationFailure {
                    address: *x,
                    dirty_pattern: phi.clone(),
                    observed_output,
                    observed_dirty,
                    diagnostics: problems.join("; "),
                });
            }
        }
    }
    Ok(report)
}
