//! Dirty-ancilla table lookup with multiplexed copies and bit packets.
//!
//! The address is split as `x = q * lambda + r`. The `b` output bits are
//! loaded in packets of `mu` bits. For each packet a Select over `q` writes
//! the packet of `f(q * lambda)` straight into the output and XOR-masks
//! `lambda - 1` dirty registers with the differences
//! `c[q*lambda + l] = f(q*lambda + l) ^ f(q*lambda)`; a Copy over `r` then adds
//! dirty register `r` into the output, leaving `f(x) ^ phi_r` there. Later
//! Selects load the XOR of consecutive packets' differences so each dirty
//! register holds only the current packet's mask. A final unload returns the
//! dirty registers to `phi`, and a last Copy removes `phi_r` from every packet
//! using one temporary AND per dirty bit.

mod build;
mod schedule;

pub use build::{
    build_qrom, build_sequential_qroms, emit_copy, emit_restore, emit_select, emit_unload,
    LookupLayout, SequentialSpec,
};
pub use schedule::{compute_sequential_schedule, compute_xor_schedule, XorSchedule};

pub use crate::table::LookupTable;

use crate::error::ParamError;
use crate::unary::iteration_cost;

pub(crate) fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        (64 - (x - 1).leading_zeros()) as usize
    }
}

pub(crate) fn check_lambda(n: u64, lambda: u64) -> Result<(), ParamError> {
    if !lambda.is_power_of_two() {
        return Err(ParamError::new(format!(
            "lambda must be a power of two, got {lambda}"
        )));
    }
    if lambda <= 1 || lambda >= n {
        return Err(ParamError::new(format!(
            "lambda must satisfy 1 < lambda < N, got lambda={lambda}, N={n}"
        )));
    }
    Ok(())
}

/// Validated parameters of a bit-packet lookup together with its register
/// sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QromPlan {
    pub n: u64,
    pub b: usize,
    pub lambda: u64,
    pub mu: usize,
    num_packets: usize,
    q_range: u64,
    q_bits: usize,
    r_bits: usize,
    work_qubits: usize,
    temp_qubits: usize,
}

/// Checks the parameter bounds and derives the register layout.
pub fn plan_qrom(n: u64, b: usize, lambda: u64, mu: usize) -> Result<QromPlan, ParamError> {
    if b == 0 || b > 64 {
        return Err(ParamError::new(format!("b must be in 1..=64, got {b}")));
    }
    check_lambda(n, lambda)?;
    if mu == 0 || mu > b {
        return Err(ParamError::new(format!(
            "mu must satisfy 1 <= mu <= b, got mu={mu}, b={b}"
        )));
    }
    let q_range = n.div_ceil(lambda);
    let r_bits = lambda.trailing_zeros() as usize;
    let q_bits = ceil_log2(n) - r_bits;
    let work_qubits = ceil_log2(q_range).max(r_bits);

    let select_work = iteration_cost(q_bits, 0, q_range, true)
        .expect("q range fits the q register")
        .work_qubits;
    let copy_work = iteration_cost(r_bits, 1, lambda, false)
        .expect("r range fits the r register")
        .work_qubits;
    debug_assert!(select_work <= work_qubits);
    // the restore copy needs one more clean qubit for its temporary ANDs
    let temp_qubits = usize::from(copy_work + 1 > work_qubits);

    Ok(QromPlan {
        n,
        b,
        lambda,
        mu,
        num_packets: b.div_ceil(mu),
        q_range,
        q_bits,
        r_bits,
        work_qubits,
        temp_qubits,
    })
}

impl QromPlan {
    /// Number of packets, `ceil(b / mu)`.
    pub fn num_packets(&self) -> usize {
        self.num_packets
    }

    pub fn packet_size(&self, p: usize) -> usize {
        let start = p * self.mu;
        self.mu.min(self.b.saturating_sub(start))
    }

    pub fn packet_sizes(&self) -> Vec<usize> {
        (0..self.num_packets).map(|p| self.packet_size(p)).collect()
    }

    /// Number of `q` values, `ceil(N / lambda)`.
    pub fn q_range(&self) -> u64 {
        self.q_range
    }

    pub fn q_bits(&self) -> usize {
        self.q_bits
    }

    pub fn r_bits(&self) -> usize {
        self.r_bits
    }

    pub fn address_bits(&self) -> usize {
        self.q_bits + self.r_bits
    }

    /// `mu * (lambda - 1)`.
    pub fn dirty_qubits(&self) -> usize {
        self.mu * (self.lambda as usize - 1)
    }

    /// `max(ceil(log2 ceil(N / lambda)), log2 lambda)`.
    pub fn work_qubits(&self) -> usize {
        self.work_qubits
    }

    /// Extra clean qubit for the restore's temporary ANDs, needed only when no
    /// work qubit is idle during the `r` iteration.
    pub fn temp_qubits(&self) -> usize {
        self.temp_qubits
    }

    /// Toffoli count of the synthesized circuit, from the plan alone.
    pub fn toffoli_count(&self) -> u64 {
        let alpha = self.num_packets as u64;
        let (b, mu) = (self.b as u64, self.mu as u64);
        (alpha + 1) * (self.q_range + self.lambda - 3) + (self.lambda - 1) * (b + mu)
    }
}
