//! Prior-art lookup circuits, used as differential references.

use crate::circuit::{Circuit, Gate, QubitRef, RegId, RegisterSpec, Role};
use crate::error::{ParamError, Result};
use crate::qrom::{ceil_log2, check_lambda};
use crate::table::LookupTable;
use crate::unary::{emit_unary_iteration, IterationSpec};

/// Multiplexed swap over `lambda` slots of `width` bits, controlled on the
/// bits of `r`. Brings slot `r` to slot 0 using `width * (lambda - 1)` CSWAPs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SwapNetworkPlan {
    pub lambda: u64,
    pub width: usize,
}

impl SwapNetworkPlan {
    pub fn new(lambda: u64, width: usize) -> Result<Self, ParamError> {
        if lambda < 2 || !lambda.is_power_of_two() {
            return Err(ParamError::new(format!(
                "lambda must be a power of two >= 2, got {lambda}"
            )));
        }
        if width == 0 {
            return Err(ParamError::new("swap width must be positive"));
        }
        Ok(SwapNetworkPlan { lambda, width })
    }

    pub fn cswap_count(&self) -> u64 {
        self.width as u64 * (self.lambda - 1)
    }

    /// `(r bit, slot a, slot b)` triples, most significant layer first.
    fn layers(&self) -> Vec<(usize, u64, u64)> {
        let bits = self.lambda.trailing_zeros() as usize;
        (0..bits)
            .rev()
            .flat_map(|k| (0..1u64 << k).map(move |j| (k, j, j + (1 << k))))
            .collect()
    }

    pub fn emit(&self, c: &mut Circuit, r: RegId, slots: RegId, inverse: bool) -> Result<()> {
        let mut layers = self.layers();
        if inverse {
            layers.reverse();
        }
        let w = self.width;
        for (k, a, b) in layers {
            let ctl = QubitRef::new(r, k);
            for i in 0..w {
                let qa = QubitRef::new(slots, a as usize * w + i);
                let qb = QubitRef::new(slots, b as usize * w + i);
                c.push(Gate::cswap(ctl, qa, qb))?;
            }
        }
        Ok(())
    }
}

/// One controlled unary iteration over every address, writing `f(x)` with
/// CNOTs. `N - 1` Toffolis.
///
/// Registers are `ctrl, x, out` plus `work` when `N > 1`.
pub fn build_plain_qrom(table: &LookupTable) -> Result<Circuit> {
    let n = table.len() as u64;
    let addr_bits = ceil_log2(n).max(1);
    let mut regs = vec![
        RegisterSpec::new("ctrl", 1, Role::Control),
        RegisterSpec::new("x", addr_bits, Role::AddressQ),
        RegisterSpec::new("out", table.bit_width(), Role::Output),
    ];
    if ceil_log2(n) > 0 {
        regs.push(RegisterSpec::new("work", ceil_log2(n), Role::Work));
    }
    let mut c = Circuit::new(regs)?;
    let ctrl = QubitRef::new(c.register_id("ctrl").expect("ctrl"), 0);
    let x = c.register_id("x").expect("x");
    let out = c.qubits(c.register_id("out").expect("out"));
    let work = c
        .register_id("work")
        .map(|w| c.qubits(w))
        .unwrap_or_default();
    emit_unary_iteration(
        &mut c,
        &IterationSpec::new(x, 0, n),
        Some(ctrl),
        &work,
        |c, w| {
            let sel = w
                .select
                .expect("controlled windows always have a select wire");
            let value = table.get(w.index_value);
            for (j, &t) in out.iter().enumerate() {
                if (value >> j) & 1 == 1 {
                    c.push(Gate::cnot(sel, t))?;
                }
            }
            Ok(())
        },
    )?;
    Ok(c)
}

/// Dirty-ancilla SelectSwap lookup:
/// `Sel, Swap, copy, Swap^-1, Sel, Swap, copy, Swap^-1`.
///
/// Uses `lambda` dirty slots of `b` bits; Toffoli count
/// `2 (ceil(N / lambda) - 1) + 4 b (lambda - 1)`. Registers are
/// `ctrl, q, r, out, dirty, work`.
pub fn build_selectswap_dirty(table: &LookupTable, lambda: u64) -> Result<Circuit> {
    let n = table.len() as u64;
    check_lambda(n, lambda)?;
    let b = table.bit_width();
    let swap = SwapNetworkPlan::new(lambda, b)?;
    let r_bits = lambda.trailing_zeros() as usize;
    let q_range = n.div_ceil(lambda);
    let mut c = Circuit::new([
        RegisterSpec::new("ctrl", 1, Role::Control),
        RegisterSpec::new("q", ceil_log2(n) - r_bits, Role::AddressQ),
        RegisterSpec::new("r", r_bits, Role::AddressR),
        RegisterSpec::new("out", b, Role::Output),
        RegisterSpec::new("dirty", b * lambda as usize, Role::Dirty),
        RegisterSpec::new("work", ceil_log2(q_range).max(1), Role::Work),
    ])?;
    let id = |c: &Circuit, name: &str| c.register_id(name).expect("register just added");
    let ctrl = QubitRef::new(id(&c, "ctrl"), 0);
    let (q, r, out, dirty) = (id(&c, "q"), id(&c, "r"), id(&c, "out"), id(&c, "dirty"));
    let work = c.qubits(id(&c, "work"));

    let select = |c: &mut Circuit| {
        emit_unary_iteration(
            c,
            &IterationSpec::new(q, 0, q_range),
            Some(ctrl),
            &work,
            |c, w| {
                let sel = w
                    .select
                    .expect("controlled windows always have a select wire");
                for slot in 0..lambda {
                    let value = table.get(w.index_value * lambda + slot);
                    for j in (0..b).filter(|j| (value >> j) & 1 == 1) {
                        c.push(Gate::cnot(sel, QubitRef::new(dirty, slot as usize * b + j)))?;
                    }
                }
                Ok(())
            },
        )
    };
    let copy = |c: &mut Circuit| -> Result<()> {
        for j in 0..b {
            c.push(Gate::cnot(QubitRef::new(dirty, j), QubitRef::new(out, j)))?;
        }
        Ok(())
    };
    for _ in 0..2 {
        select(&mut c)?;
        swap.emit(&mut c, r, dirty, false)?;
        copy(&mut c)?;
        swap.emit(&mut c, r, dirty, true)?;
    }
    Ok(c)
}
