use crate::circuit::{Circuit, Gate, QubitRef, RegId, RegisterSpec, Role};
use crate::error::{ParamError, Result};
use crate::table::LookupTable;
use crate::unary::{emit_unary_iteration, iteration_cost, IterationSpec, IterationWindow};

use super::{ceil_log2, compute_sequential_schedule, compute_xor_schedule, QromPlan, XorSchedule};

/// Where a lookup circuit keeps each of its pieces.
///
/// Dirty register `l` (1-based) occupies dirty qubits
/// `[(l - 1) * width, l * width)`. `packet_outputs[p][j]` is the output qubit
/// fed by bit `j` of every dirty register during Copy `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupLayout {
    pub control: QubitRef,
    pub q: RegId,
    pub r: RegId,
    pub dirty: RegId,
    pub work: Vec<QubitRef>,
    /// Target of the restore's temporary ANDs.
    pub temp: QubitRef,
    pub packet_outputs: Vec<Vec<QubitRef>>,
    pub width: usize,
    pub lambda: u64,
    pub q_range: u64,
}

impl LookupLayout {
    fn dirty_bit(&self, l: u64, j: usize) -> QubitRef {
        QubitRef::new(self.dirty, (l as usize - 1) * self.width + j)
    }

    fn select_wire(w: IterationWindow) -> Result<QubitRef> {
        w.select
            .ok_or_else(|| ParamError::new("iteration produced an unconditional window").into())
    }

    fn check_packet(&self, p: usize) -> Result<()> {
        if p >= self.packet_outputs.len() {
            return Err(ParamError::new(format!(
                "packet {p} out of range 0..{}",
                self.packet_outputs.len()
            ))
            .into());
        }
        Ok(())
    }

    fn copy_work(&self, c: &Circuit) -> Result<&[QubitRef]> {
        let bits = c.register(self.r).size;
        let needed = iteration_cost(bits, 1, self.lambda, false)?.work_qubits;
        Ok(&self.work[..needed.min(self.work.len())])
    }

    // Controlled q iteration writing `bits(q)` into output/dirty via CNOTs.
    fn emit_q_pass(
        &self,
        c: &mut Circuit,
        mut loads: impl FnMut(u64) -> (Vec<QubitRef>, Vec<(u64, u64)>),
    ) -> Result<()> {
        let spec = IterationSpec::new(self.q, 0, self.q_range);
        emit_unary_iteration(c, &spec, Some(self.control), &self.work, |c, w| {
            let sel = Self::select_wire(w)?;
            let (direct, masks) = loads(w.index_value);
            for t in direct {
                c.push(Gate::cnot(sel, t))?;
            }
            for (l, mask) in masks {
                for j in (0..self.width).filter(|j| (mask >> j) & 1 == 1) {
                    c.push(Gate::cnot(sel, self.dirty_bit(l, j)))?;
                }
            }
            Ok(())
        })
    }
}

/// Select `p`: loads packet `p` of `f(q * lambda)` into its output slice and
/// the packet deltas into the dirty registers.
pub fn emit_select(
    c: &mut Circuit,
    layout: &LookupLayout,
    schedule: &XorSchedule,
    p: usize,
) -> Result<()> {
    layout.check_packet(p)?;
    let outs = &layout.packet_outputs[p];
    layout.emit_q_pass(c, |q| {
        let direct = schedule.direct_bits(q, p);
        let targets = outs
            .iter()
            .enumerate()
            .filter(|(j, _)| (direct >> j) & 1 == 1)
            .map(|(_, &t)| t)
            .collect();
        let masks = (1..layout.lambda)
            .map(|l| (l, schedule.delta_bits(q, p, l)))
            .collect();
        (targets, masks)
    })
}

/// Copy `p`: adds dirty register `r` into output slice `p`.
pub fn emit_copy(c: &mut Circuit, layout: &LookupLayout, p: usize) -> Result<()> {
    layout.check_packet(p)?;
    let outs = &layout.packet_outputs[p];
    let work = layout.copy_work(c)?;
    let spec = IterationSpec::new(layout.r, 1, layout.lambda);
    emit_unary_iteration(c, &spec, None, work, |c, w| {
        let sel = LookupLayout::select_wire(w)?;
        for (j, &t) in outs.iter().enumerate() {
            c.push(Gate::toffoli(sel, layout.dirty_bit(w.index_value, j), t))?;
        }
        Ok(())
    })
}

/// Sel dagger: removes the last packet's differences from the dirty registers.
pub fn emit_unload(c: &mut Circuit, layout: &LookupLayout, schedule: &XorSchedule) -> Result<()> {
    layout.emit_q_pass(c, |q| {
        let masks = (1..layout.lambda)
            .map(|l| (l, schedule.unload_bits(q, l)))
            .collect();
        (Vec::new(), masks)
    })
}

/// Unload, then cancel `phi_r` from every packet of the output. Each dirty
/// bit `j` is ANDed with the `r` window once and fanned out to bit `j` of
/// every packet.
pub fn emit_restore(c: &mut Circuit, layout: &LookupLayout, schedule: &XorSchedule) -> Result<()> {
    emit_unload(c, layout, schedule)?;
    let work = layout.copy_work(c)?;
    if work.contains(&layout.temp) {
        return Err(ParamError::new("restore temp overlaps the copy work qubits").into());
    }
    let spec = IterationSpec::new(layout.r, 1, layout.lambda);
    emit_unary_iteration(c, &spec, None, work, |c, w| {
        let sel = LookupLayout::select_wire(w)?;
        for j in 0..layout.width {
            let d = layout.dirty_bit(w.index_value, j);
            c.push(Gate::temp_and(sel, d, layout.temp))?;
            for outs in &layout.packet_outputs {
                if let Some(&t) = outs.get(j) {
                    c.push(Gate::cnot(layout.temp, t))?;
                }
            }
            c.push(Gate::temp_and_uncompute(sel, d, layout.temp))?;
        }
        Ok(())
    })
}

struct Shape {
    q_bits: usize,
    r_bits: usize,
    width: usize,
    lambda: u64,
    q_range: u64,
    work: usize,
    temp: usize,
}

// Registers: ctrl, q, r, outputs..., dirty, work [, temp]. `packets` maps
// the output registers to per-packet output qubits.
fn allocate(
    shape: &Shape,
    outputs: &[(String, usize)],
    packets: impl FnOnce(&Circuit, &[RegId]) -> Vec<Vec<QubitRef>>,
) -> Result<(Circuit, LookupLayout)> {
    let mut regs = vec![
        RegisterSpec::new("ctrl", 1, Role::Control),
        RegisterSpec::new("q", shape.q_bits, Role::AddressQ),
        RegisterSpec::new("r", shape.r_bits, Role::AddressR),
    ];
    regs.extend(
        outputs
            .iter()
            .map(|(name, size)| RegisterSpec::new(name.clone(), *size, Role::Output)),
    );
    regs.push(RegisterSpec::new(
        "dirty",
        shape.width * (shape.lambda as usize - 1),
        Role::Dirty,
    ));
    regs.push(RegisterSpec::new("work", shape.work, Role::Work));
    if shape.temp > 0 {
        regs.push(RegisterSpec::new("temp", shape.temp, Role::Temp));
    }
    let c = Circuit::new(regs)?;
    let id = |name: &str| c.register_id(name).expect("register just added");
    let outs: Vec<RegId> = outputs.iter().map(|(name, _)| id(name)).collect();
    let work = c.qubits(id("work"));
    let copy_work = iteration_cost(shape.r_bits, 1, shape.lambda, false)?.work_qubits;
    let temp = match c.register_id("temp") {
        Some(t) => QubitRef::new(t, 0),
        None => work[copy_work],
    };
    let layout = LookupLayout {
        control: QubitRef::new(id("ctrl"), 0),
        q: id("q"),
        r: id("r"),
        dirty: id("dirty"),
        work,
        temp,
        packet_outputs: packets(&c, &outs),
        width: shape.width,
        lambda: shape.lambda,
        q_range: shape.q_range,
    };
    Ok((c, layout))
}

fn shape_for(n: u64, lambda: u64, width: usize) -> Result<Shape> {
    super::check_lambda(n, lambda)?;
    let r_bits = lambda.trailing_zeros() as usize;
    let q_range = n.div_ceil(lambda);
    let work = ceil_log2(q_range).max(r_bits);
    let copy_work = iteration_cost(r_bits, 1, lambda, false)?.work_qubits;
    Ok(Shape {
        q_bits: ceil_log2(n) - r_bits,
        r_bits,
        width,
        lambda,
        q_range,
        work,
        temp: usize::from(copy_work + 1 > work),
    })
}

/// Builds the full bit-packet lookup: `Sel_p, Copy_p` for every packet, then
/// the restore.
///
/// Register order is `ctrl, q, r, out, dirty, work` (plus `temp` when no work
/// qubit is free during the `r` iteration). `ctrl` must be 1 for a plain
/// lookup; with `ctrl = 0` the circuit acts as identity on the output.
pub fn build_qrom(table: &LookupTable, plan: &QromPlan) -> Result<Circuit> {
    let schedule = compute_xor_schedule(table, plan)?;
    let shape = Shape {
        q_bits: plan.q_bits(),
        r_bits: plan.r_bits(),
        width: plan.mu,
        lambda: plan.lambda,
        q_range: plan.q_range(),
        work: plan.work_qubits(),
        temp: plan.temp_qubits(),
    };
    let mu = plan.mu;
    let (mut c, layout) = allocate(&shape, &[("out".into(), plan.b)], |c, outs| {
        c.qubits(outs[0])
            .chunks(mu)
            .map(<[QubitRef]>::to_vec)
            .collect()
    })?;
    emit_all(&mut c, &layout, &schedule)?;
    Ok(c)
}

fn emit_all(c: &mut Circuit, layout: &LookupLayout, schedule: &XorSchedule) -> Result<()> {
    for p in 0..layout.packet_outputs.len() {
        emit_select(c, layout, schedule, p)?;
        emit_copy(c, layout, p)?;
    }
    emit_restore(c, layout, schedule)
}

/// Back-to-back lookups of `m` tables sharing `N` and `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialSpec {
    pub tables: Vec<LookupTable>,
    pub lambda: u64,
}

/// Builds `m` lookups into fresh output registers `out0 .. out{m-1}`, sharing
/// one set of `b * (lambda - 1)` dirty qubits: `m` Select/Copy rounds and a
/// single restore.
pub fn build_sequential_qroms(spec: &SequentialSpec) -> Result<Circuit> {
    let schedule = compute_sequential_schedule(&spec.tables, spec.lambda)?;
    let first = &spec.tables[0];
    let (n, b) = (first.len() as u64, first.bit_width());
    let shape = shape_for(n, spec.lambda, b)?;
    let names: Vec<(String, usize)> = (0..spec.tables.len())
        .map(|t| (format!("out{t}"), b))
        .collect();
    let (mut c, layout) = allocate(&shape, &names, |c, outs| {
        outs.iter().map(|&o| c.qubits(o)).collect()
    })?;
    emit_all(&mut c, &layout, &schedule)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::qrom::plan_qrom;
    use crate::sim::{verify_lookup, verify_qrom};

    fn table(n: usize, b: usize, seed: u64) -> LookupTable {
        let mask = crate::table::low_mask(b);
        let entries = (0..n as u64)
            .map(|x| (x.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ seed).rotate_left(17) & mask)
            .collect();
        LookupTable::new(b, entries).unwrap()
    }

    fn toffolis(n: usize, b: usize, lambda: u64, mu: usize) -> u64 {
        let plan = plan_qrom(n as u64, b, lambda, mu).unwrap();
        build_qrom(&table(n, b, 1), &plan)
            .unwrap()
            .count_resources()
            .toffoli
    }

    #[test]
    fn reference_counts() {
        assert_eq!(toffolis(64, 8, 4, 8), 82);
        assert_eq!(toffolis(64, 8, 4, 2), 115);
        assert_eq!(toffolis(100, 5, 4, 2), 125);
    }

    #[test]
    fn counts_match_plan_on_grid() {
        for n in [5usize, 12, 33, 64] {
            for b in [1usize, 3, 5] {
                for lambda in [2u64, 4, 8] {
                    if lambda >= n as u64 {
                        continue;
                    }
                    for mu in 1..=b {
                        let plan = plan_qrom(n as u64, b, lambda, mu).unwrap();
                        let c = build_qrom(&table(n, b, 7), &plan).unwrap();
                        c.validate().unwrap();
                        assert_eq!(
                            c.count_resources().toffoli,
                            plan.toffoli_count(),
                            "{n} {b} {lambda} {mu}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn register_sizes_follow_plan() {
        let plan = plan_qrom(64, 8, 4, 2).unwrap();
        let c = build_qrom(&table(64, 8, 0), &plan).unwrap();
        let est = c.count_resources();
        assert_eq!(est.dirty_qubits, 6);
        assert_eq!(c.role_size(Role::Work), 4);
        assert_eq!(c.role_size(Role::Temp), 0);
        assert_eq!(est.total_qubits, 1 + 6 + 8 + 6 + 4);
    }

    #[test]
    fn functional_small() {
        let t = LookupTable::new(2, vec![0, 1, 2, 3, 0, 1, 2, 3]).unwrap();
        let plan = plan_qrom(8, 2, 4, 1).unwrap();
        let c = build_qrom(&t, &plan).unwrap();
        let report = verify_qrom(&c, &t, &plan, 8, 3).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
        let off = verify_lookup(&c, &[&t], 4, 3, false).unwrap();
        assert!(off.passed(), "{:?}", off.failures.first());
    }

    #[test]
    fn functional_non_power_of_two() {
        let t = table(100, 5, 9);
        let plan = plan_qrom(100, 5, 4, 2).unwrap();
        let c = build_qrom(&t, &plan).unwrap();
        assert!(verify_qrom(&c, &t, &plan, 10, 0).unwrap().passed());
    }

    #[test]
    fn constant_table_emits_no_dirty_cnots() {
        let t = LookupTable::new(4, vec![0; 32]).unwrap();
        let plan = plan_qrom(32, 4, 4, 2).unwrap();
        let c = build_qrom(&t, &plan).unwrap();
        let dirty = c.register_id("dirty").unwrap();
        let out = c.register_id("out").unwrap();
        let cnots = |reg| {
            c.gates()
                .iter()
                .filter(|g| g.kind == GateKind::Cnot && g.target().register == reg)
                .count()
        };
        assert_eq!(cnots(dirty), 0);
        // only the restore fan-out writes the output
        assert_eq!(cnots(out), 3 * 4);
    }

    #[test]
    fn copy_with_lambda_two_uses_r_directly() {
        let t = table(16, 3, 2);
        let plan = plan_qrom(16, 3, 2, 3).unwrap();
        let c = build_qrom(&t, &plan).unwrap();
        let r = c.register_id("r").unwrap();
        let copy_toffolis = c
            .gates()
            .iter()
            .filter(|g| g.kind == GateKind::Toffoli && g.operands[0].register == r)
            .count();
        assert_eq!(copy_toffolis, 3);
    }

    #[test]
    fn sequential_counts_and_function() {
        let tables = vec![table(64, 4, 1), table(64, 4, 2)];
        let spec = SequentialSpec {
            tables: tables.clone(),
            lambda: 4,
        };
        let c = build_sequential_qroms(&spec).unwrap();
        assert_eq!(c.count_resources().toffoli, 87);
        let refs: Vec<&LookupTable> = tables.iter().collect();
        assert!(verify_lookup(&c, &refs, 3, 5, true).unwrap().passed());

        let single = SequentialSpec {
            tables: vec![tables[0].clone()],
            lambda: 4,
        };
        let plan = plan_qrom(64, 4, 4, 4).unwrap();
        assert_eq!(
            build_sequential_qroms(&single)
                .unwrap()
                .count_resources()
                .toffoli,
            build_qrom(&tables[0], &plan)
                .unwrap()
                .count_resources()
                .toffoli
        );
    }

    #[test]
    fn rejects_bad_packet() {
        let t = table(16, 4, 0);
        let plan = plan_qrom(16, 4, 4, 2).unwrap();
        let mut c = build_qrom(&t, &plan).unwrap();
        let schedule = compute_xor_schedule(&t, &plan).unwrap();
        let id = |c: &Circuit, n: &str| c.register_id(n).unwrap();
        let layout = LookupLayout {
            control: QubitRef::new(id(&c, "ctrl"), 0),
            q: id(&c, "q"),
            r: id(&c, "r"),
            dirty: id(&c, "dirty"),
            work: c.qubits(id(&c, "work")),
            temp: QubitRef::new(id(&c, "work"), 1),
            packet_outputs: c
                .qubits(id(&c, "out"))
                .chunks(2)
                .map(<[QubitRef]>::to_vec)
                .collect(),
            width: 2,
            lambda: 4,
            q_range: 4,
        };
        assert!(emit_select(&mut c, &layout, &schedule, 2).is_err());
        assert!(emit_copy(&mut c, &layout, 5).is_err());
    }
}
