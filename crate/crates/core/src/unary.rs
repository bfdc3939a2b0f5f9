//! Sawtooth unary iteration.
//!
//! Walks the values of an index register over a contiguous range `[lo, hi)`
//! and, for each value `v` in ascending order, hands the caller a select wire
//! that is 1 exactly when the index register holds `v`. The iteration is a
//! segment tree over the bits of the index register, most significant bit
//! first:
//!
//! * a node whose range covers both halves splits on its bit. With a select
//!   wire `w` this costs one temporary AND (`w & !b`), flipped to `w & b` by a
//!   CNOT from `w`; at the root of an uncontrolled iteration the bit itself is
//!   the select wire and the split is free;
//! * a node whose range lies entirely in its upper half must still exclude the
//!   lower half, which costs one temporary AND (free at the uncontrolled root);
//! * a node whose range lies entirely in its lower half skips its bit: values
//!   at or above `hi` are outside the promise and may activate a window.
//!
//! Values below `lo` never activate a window. Every temporary AND is
//! uncomputed, so work qubits return to 0 for every index value.
//!
//! Costs: a controlled iteration over `[0, L)` uses `L - 1` Toffolis and
//! `ceil(log2 L)` work qubits. An uncontrolled iteration over `[1, 2^k)` uses
//! `2^k - 2` Toffolis and `k - 1` work qubits, and over `[0, L)` uses
//! `max(L - 2, 0)`.

use crate::circuit::{Circuit, Gate, QubitRef, RegId};
use crate::error::{Result, UnaryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationSpec {
    pub index: RegId,
    pub lo: u64,
    pub hi: u64,
}

impl IterationSpec {
    pub fn new(index: RegId, lo: u64, hi: u64) -> Self {
        IterationSpec { index, lo, hi }
    }
}

/// One step of a unary iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationWindow {
    pub index_value: u64,
    /// Wire that is 1 iff the index register holds `index_value`. `None` means
    /// the window is unconditionally active (uncontrolled, single value).
    pub select: Option<QubitRef>,
}

/// Static cost of an iteration shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterationCost {
    pub toffolis: u64,
    pub work_qubits: usize,
}

fn check_range(bits: usize, lo: u64, hi: u64) -> Result<(), UnaryError> {
    if lo >= hi {
        return Err(UnaryError::EmptyRange { lo, hi });
    }
    if bits >= 64 || hi > 1u64 << bits {
        return Err(UnaryError::RangeTooWide { hi, bits });
    }
    Ok(())
}

/// Scaffolding cost of iterating `[lo, hi)` over a `bits`-wide index register,
/// without any emitter gates.
pub fn iteration_cost(
    bits: usize,
    lo: u64,
    hi: u64,
    controlled: bool,
) -> Result<IterationCost, UnaryError> {
    check_range(bits, lo, hi)?;
    let (depth, toffolis) = shape(lo, hi, 0, bits, controlled);
    Ok(IterationCost {
        toffolis,
        work_qubits: depth,
    })
}

// Returns (ancilla depth, toffolis) for the subtree at `base` of height `k`.
fn shape(lo: u64, hi: u64, base: u64, k: usize, wired: bool) -> (usize, u64) {
    if k == 0 {
        return (0, 0);
    }
    let mid = base + (1u64 << (k - 1));
    let start = lo.max(base);
    let end = hi.min(base + (1u64 << k));
    match (start < mid, end > mid) {
        (true, false) => shape(lo, hi, base, k - 1, wired),
        (false, true) => {
            let (d, t) = shape(lo, hi, mid, k - 1, true);
            if wired {
                (d + 1, t + 1)
            } else {
                (d, t)
            }
        }
        (true, true) => {
            let (dl, tl) = shape(lo, hi, base, k - 1, true);
            let (dr, tr) = shape(lo, hi, mid, k - 1, true);
            if wired {
                (1 + dl.max(dr), 1 + tl + tr)
            } else {
                (dl.max(dr), tl + tr)
            }
        }
        (false, false) => unreachable!("subtree ranges are non-empty"),
    }
}

/// Emits a unary iteration over `spec`, calling `emitter` once per index value
/// in ascending order.
///
/// With `control = Some(c)` every window is additionally conditioned on `c`.
/// `work` must hold at least [`iteration_cost`]`.work_qubits` clean qubits;
/// they are left at 0.
pub fn emit_unary_iteration<F>(
    circuit: &mut Circuit,
    spec: &IterationSpec,
    control: Option<QubitRef>,
    work: &[QubitRef],
    mut emitter: F,
) -> Result<()>
where
    F: FnMut(&mut Circuit, IterationWindow) -> Result<()>,
{
    let bits = circuit.register(spec.index).size;
    let cost = iteration_cost(bits, spec.lo, spec.hi, control.is_some())?;
    if cost.work_qubits > work.len() {
        return Err(UnaryError::InsufficientWork {
            needed: cost.work_qubits,
            available: work.len(),
        }
        .into());
    }
    let mut walker = Walker {
        spec: *spec,
        work,
        emitter: &mut emitter,
    };
    walker.walk(circuit, 0, bits, control, 0)
}

struct Walker<'a, F> {
    spec: IterationSpec,
    work: &'a [QubitRef],
    emitter: &'a mut F,
}

impl<F> Walker<'_, F>
where
    F: FnMut(&mut Circuit, IterationWindow) -> Result<()>,
{
    fn walk(
        &mut self,
        c: &mut Circuit,
        base: u64,
        k: usize,
        wire: Option<QubitRef>,
        depth: usize,
    ) -> Result<()> {
        if k == 0 {
            return (self.emitter)(
                c,
                IterationWindow {
                    index_value: base,
                    select: wire,
                },
            );
        }
        let IterationSpec { index, lo, hi } = self.spec;
        let mid = base + (1u64 << (k - 1));
        let start = lo.max(base);
        let end = hi.min(base + (1u64 << k));
        let bit = QubitRef::new(index, k - 1);
        match (start < mid, end > mid, wire) {
            (true, false, _) => self.walk(c, base, k - 1, wire, depth),
            (false, true, None) => self.walk(c, mid, k - 1, Some(bit), depth),
            (false, true, Some(w)) => {
                let a = self.work[depth];
                c.push(Gate::temp_and(w, bit, a))?;
                self.walk(c, mid, k - 1, Some(a), depth + 1)?;
                c.push(Gate::temp_and_uncompute(w, bit, a))?;
                Ok(())
            }
            (true, true, None) => {
                c.push(Gate::x(bit))?;
                self.walk(c, base, k - 1, Some(bit), depth)?;
                c.push(Gate::x(bit))?;
                self.walk(c, mid, k - 1, Some(bit), depth)
            }
            (true, true, Some(w)) => {
                let a = self.work[depth];
                c.push(Gate::x(bit))?;
                c.push(Gate::temp_and(w, bit, a))?;
                c.push(Gate::x(bit))?;
                self.walk(c, base, k - 1, Some(a), depth + 1)?;
                // w & !b  ->  w & b
                c.push(Gate::cnot(w, a))?;
                self.walk(c, mid, k - 1, Some(a), depth + 1)?;
                c.push(Gate::temp_and_uncompute(w, bit, a))?;
                Ok(())
            }
            (false, false, _) => unreachable!("subtree ranges are non-empty"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{RegisterSpec, Role};
    use crate::sim::{simulate_lanes, CompiledCircuit, LaneState};

    fn ceil_log2(x: u64) -> usize {
        (64 - (x.max(1) - 1).leading_zeros()) as usize
    }

    /// Builds an iteration over an `n`-bit index with one probe qubit per
    /// window value; returns the circuit and ids.
    fn probe_circuit(n: usize, lo: u64, hi: u64, controlled: bool) -> (Circuit, Vec<u64>) {
        let cost = iteration_cost(n, lo, hi, controlled).unwrap();
        let mut regs = vec![
            RegisterSpec::new("idx", n, Role::AddressQ),
            RegisterSpec::new("probe", (hi - lo) as usize, Role::Output),
            RegisterSpec::new("ctrl", 1, Role::Control),
        ];
        if cost.work_qubits > 0 {
            regs.push(RegisterSpec::new("work", cost.work_qubits, Role::Work));
        }
        let mut c = Circuit::new(regs).unwrap();
        let idx = c.register_id("idx").unwrap();
        let probe = c.register_id("probe").unwrap();
        let ctrl = QubitRef::new(c.register_id("ctrl").unwrap(), 0);
        let work = c
            .register_id("work")
            .map(|w| c.qubits(w))
            .unwrap_or_default();
        let mut seen = Vec::new();
        emit_unary_iteration(
            &mut c,
            &IterationSpec::new(idx, lo, hi),
            controlled.then_some(ctrl),
            &work,
            |c, w| {
                seen.push(w.index_value);
                let t = QubitRef::new(probe, (w.index_value - lo) as usize);
                match w.select {
                    Some(s) => c.push(Gate::cnot(s, t))?,
                    None => c.push(Gate::x(t))?,
                }
                Ok(())
            },
        )
        .unwrap();
        (c, seen)
    }

    #[test]
    fn single_value_uncontrolled_is_free() {
        let mut c = Circuit::new([RegisterSpec::new("idx", 3, Role::AddressQ)]).unwrap();
        let idx = c.register_id("idx").unwrap();
        let mut windows = Vec::new();
        emit_unary_iteration(&mut c, &IterationSpec::new(idx, 0, 1), None, &[], |_, w| {
            windows.push(w);
            Ok(())
        })
        .unwrap();
        assert_eq!(
            windows,
            vec![IterationWindow {
                index_value: 0,
                select: None
            }]
        );
        assert_eq!(c.count_resources().toffoli, 0);
    }

    #[test]
    fn q_and_r_iteration_costs() {
        // 16 q values under a control, r over {1, 2, 3} uncontrolled
        assert_eq!(iteration_cost(4, 0, 16, true).unwrap().toffolis, 15);
        assert_eq!(iteration_cost(4, 0, 16, true).unwrap().work_qubits, 4);
        assert_eq!(iteration_cost(2, 1, 4, false).unwrap().toffolis, 2);
        assert_eq!(iteration_cost(2, 1, 4, false).unwrap().work_qubits, 1);
        // lambda = 2: the r qubit itself is the select wire
        assert_eq!(
            iteration_cost(1, 1, 2, false).unwrap(),
            IterationCost {
                toffolis: 0,
                work_qubits: 0
            }
        );
    }

    #[test]
    fn controlled_cost_is_range_minus_one() {
        for len in 1..=64u64 {
            let n = ceil_log2(len).max(1);
            for extra in 0..2 {
                let cost = iteration_cost(n + extra, 0, len, true).unwrap();
                assert_eq!(cost.toffolis, len - 1, "len {len}");
                assert!(cost.work_qubits <= ceil_log2(len), "len {len}");
                let (c, _) = probe_circuit(n + extra, 0, len, true);
                assert_eq!(c.count_resources().toffoli, len - 1);
            }
        }
    }

    #[test]
    fn uncontrolled_costs() {
        for k in 1..=7 {
            let cost = iteration_cost(k, 1, 1 << k, false).unwrap();
            assert_eq!(cost.toffolis, (1u64 << k) - 2);
            assert_eq!(cost.work_qubits, k - 1);
        }
        for len in 1..=64u64 {
            let n = ceil_log2(len).max(1);
            let cost = iteration_cost(n, 0, len, false).unwrap();
            assert_eq!(cost.toffolis, len.saturating_sub(2), "len {len}");
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(matches!(
            iteration_cost(3, 4, 4, false),
            Err(UnaryError::EmptyRange { .. })
        ));
        assert!(matches!(
            iteration_cost(3, 0, 9, false),
            Err(UnaryError::RangeTooWide { .. })
        ));
        let mut c = Circuit::new([RegisterSpec::new("idx", 4, Role::AddressQ)]).unwrap();
        let idx = c.register_id("idx").unwrap();
        let ctrl_less = emit_unary_iteration(
            &mut c,
            &IterationSpec::new(idx, 0, 16),
            None,
            &[],
            |_, _| Ok(()),
        );
        assert!(ctrl_less.is_err());
    }

    /// Every index value in [0, hi) activates exactly the matching window,
    /// nothing activates when the control is off, and work qubits always end
    /// at 0. Exhaustive over registers of up to 6 qubits.
    #[test]
    fn windows_are_exact_exhaustive() {
        for n in 1..=6usize {
            let size = 1u64 << n;
            for lo in 0..size {
                for hi in lo + 1..=size {
                    for controlled in [false, true] {
                        check_windows(n, lo, hi, controlled);
                    }
                }
            }
        }
    }

    fn check_windows(n: usize, lo: u64, hi: u64, controlled: bool) {
        let (c, seen) = probe_circuit(n, lo, hi, controlled);
        assert_eq!(seen, (lo..hi).collect::<Vec<_>>());
        c.validate().unwrap();
        let expected = iteration_cost(n, lo, hi, controlled).unwrap().toffolis;
        assert_eq!(c.count_resources().toffoli, expected);

        let compiled = CompiledCircuit::new(&c);
        let idx = c.register_id("idx").unwrap();
        let probe = c.register_id("probe").unwrap();
        let ctrl = c.register_id("ctrl").unwrap();
        let lanes = 1u64 << n;
        let active = if lanes == 64 {
            u64::MAX
        } else {
            (1u64 << lanes) - 1
        };
        for ctrl_on in [true, false] {
            if !controlled && !ctrl_on {
                continue;
            }
            let mut state = LaneState::zeros(&c);
            for lane in 0..lanes {
                state.set_register(&c, idx, lane as usize, lane);
                state.set_register(&c, ctrl, lane as usize, ctrl_on as u64);
            }
            simulate_lanes(&compiled, &mut state, active).unwrap();
            for lane in 0..lanes as usize {
                let index = lane as u64;
                assert_eq!(state.register_value(&c, idx, lane), index);
                if let Some(w) = c.register_id("work") {
                    assert_eq!(
                        state.register_value(&c, w, lane),
                        0,
                        "work dirty n={n} [{lo},{hi})"
                    );
                }
                if index >= hi {
                    continue;
                }
                let got = state.register_value(&c, probe, lane);
                let want = if ctrl_on && index >= lo {
                    1u64 << (index - lo)
                } else {
                    0
                };
                assert_eq!(
                    got, want,
                    "n={n} [{lo},{hi}) ctrl={controlled}/{ctrl_on} index={index}"
                );
            }
        }
    }
}
