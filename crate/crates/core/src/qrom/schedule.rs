use crate::error::ParamError;
use crate::table::{low_mask, LookupTable};

use super::{check_lambda, QromPlan};

/// Classical data each Select writes, per `q` block.
///
/// Values are packed little-endian into `u64`s: bit `j` of a packet value
/// belongs to bit `j` of that packet's output slice or dirty register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorSchedule {
    q_range: u64,
    lambda: u64,
    width: usize,
    packet_sizes: Vec<usize>,
    direct: Vec<u64>,
    delta: Vec<u64>,
    unload: Vec<u64>,
}

impl XorSchedule {
    /// `packet(p, x)` returns the packet-`p` bits of `f(x)` for `x < n`.
    fn build(
        n: u64,
        lambda: u64,
        width: usize,
        packet_sizes: Vec<usize>,
        packet: impl Fn(usize, u64) -> u64,
    ) -> Self {
        let q_range = n.div_ceil(lambda);
        let alpha = packet_sizes.len();
        let dirty_regs = (lambda - 1) as usize;
        let mut direct = Vec::with_capacity(q_range as usize * alpha);
        let mut delta = Vec::with_capacity(q_range as usize * alpha * dirty_regs);
        let mut unload = Vec::with_capacity(q_range as usize * dirty_regs);

        // c[q*lambda + l] restricted to packet p; padded addresses load nothing
        let diff = |q: u64, l: u64, p: usize| -> u64 {
            let base = q * lambda;
            if base + l >= n {
                0
            } else {
                packet(p, base + l) ^ packet(p, base)
            }
        };
        for q in 0..q_range {
            for p in 0..alpha {
                direct.push(packet(p, q * lambda));
                for l in 1..lambda {
                    let prev = if p == 0 { 0 } else { diff(q, l, p - 1) };
                    delta.push(prev ^ diff(q, l, p));
                }
            }
            for l in 1..lambda {
                unload.push(diff(q, l, alpha - 1));
            }
        }
        XorSchedule {
            q_range,
            lambda,
            width,
            packet_sizes,
            direct,
            delta,
            unload,
        }
    }

    pub fn q_range(&self) -> u64 {
        self.q_range
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    /// Width of each dirty register.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn num_packets(&self) -> usize {
        self.packet_sizes.len()
    }

    pub fn packet_sizes(&self) -> &[usize] {
        &self.packet_sizes
    }

    /// Packet `p` of `f(q * lambda)`, written directly into the output.
    pub fn direct_bits(&self, q: u64, p: usize) -> u64 {
        self.direct[q as usize * self.num_packets() + p]
    }

    /// Mask XORed into dirty register `l` (1-based) by Select `p`: the packet-0
    /// difference for `p = 0`, otherwise the XOR of the differences of packets
    /// `p - 1` and `p`.
    pub fn delta_bits(&self, q: u64, p: usize, l: u64) -> u64 {
        let regs = (self.lambda - 1) as usize;
        self.delta[(q as usize * self.num_packets() + p) * regs + (l as usize - 1)]
    }

    /// Mask XORed into dirty register `l` by the final unload: the last
    /// packet's difference.
    pub fn unload_bits(&self, q: u64, l: u64) -> u64 {
        self.unload[q as usize * (self.lambda - 1) as usize + (l as usize - 1)]
    }
}

/// XOR schedule of a bit-packet lookup.
pub fn compute_xor_schedule(
    table: &LookupTable,
    plan: &QromPlan,
) -> Result<XorSchedule, ParamError> {
    if table.len() as u64 != plan.n || table.bit_width() != plan.b {
        return Err(ParamError::new(format!(
            "table is N={}, b={} but plan is N={}, b={}",
            table.len(),
            table.bit_width(),
            plan.n,
            plan.b
        )));
    }
    let mu = plan.mu;
    let sizes = plan.packet_sizes();
    let masks: Vec<u64> = sizes.iter().map(|&s| low_mask(s)).collect();
    Ok(XorSchedule::build(
        plan.n,
        plan.lambda,
        mu,
        sizes.clone(),
        |p, x| (table.get(x) >> (p * mu)) & masks[p],
    ))
}

/// XOR schedule for back-to-back lookups of several equally shaped tables;
/// table `t` plays the role of packet `t`.
pub fn compute_sequential_schedule(
    tables: &[LookupTable],
    lambda: u64,
) -> Result<XorSchedule, ParamError> {
    let first = tables
        .first()
        .ok_or_else(|| ParamError::new("need at least one table"))?;
    let (n, b) = (first.len() as u64, first.bit_width());
    if let Some(t) = tables
        .iter()
        .find(|t| t.len() as u64 != n || t.bit_width() != b)
    {
        return Err(ParamError::new(format!(
            "tables must share N and b: N={n}, b={b} vs N={}, b={}",
            t.len(),
            t.bit_width()
        )));
    }
    check_lambda(n, lambda)?;
    Ok(XorSchedule::build(
        n,
        lambda,
        b,
        vec![b; tables.len()],
        |t, x| tables[t].get(x),
    ))
}
