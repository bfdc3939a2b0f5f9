//! Flat gate-list intermediate representation for reversible circuits.
//!
//! A [`Circuit`] is a list of named registers, each carrying a [`Role`], and an
//! ordered list of [`Gate`]s over qubits of those registers. Every gate kind is
//! a computational-basis permutation, so the IR can be simulated exactly on
//! bit strings (see [`crate::sim`]).
//!
//! The text format produced by [`Circuit::serialize`] is line based:
//!
//! ```text
//! REGISTER q 4 address_q
//! REGISTER out 8 output
//! TOFFOLI q 0 q 1 out 3
//! ```
//!
//! Targets come last. `#` starts a comment that runs to the end of the line.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::CircuitError;

/// Role of a register. Cleanliness is a property of the role, not of
/// individual qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Enable line of a controlled lookup. Input; the lookup acts when it is 1.
    Control,
    /// High part `q` of the address `x = q * lambda + r`.
    AddressQ,
    /// Low part `r` of the address.
    AddressR,
    /// Clean output register, starts at 0 and ends holding the looked-up data.
    Output,
    /// Borrowed qubits in an arbitrary state that must be returned unchanged.
    Dirty,
    /// Clean scratch qubits (unary-iteration ancillas).
    Work,
    /// Clean scratch qubit for temporary ANDs when no work qubit is idle.
    Temp,
}

impl Role {
    pub const ALL: [Role; 7] = [
        Role::Control,
        Role::AddressQ,
        Role::AddressR,
        Role::Output,
        Role::Dirty,
        Role::Work,
        Role::Temp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Control => "control",
            Role::AddressQ => "address_q",
            Role::AddressR => "address_r",
            Role::Output => "output",
            Role::Dirty => "dirty",
            Role::Work => "work",
            Role::Temp => "temp",
        }
    }

    /// Clean registers must start, and (except outputs) end, in all-zero.
    pub fn is_clean(self) -> bool {
        matches!(self, Role::Output | Role::Work | Role::Temp)
    }

    /// Inputs are read but never modified by a lookup circuit.
    pub fn is_input(self) -> bool {
        matches!(self, Role::Control | Role::AddressQ | Role::AddressR)
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown register role `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterSpec {
    pub name: String,
    pub size: usize,
    pub role: Role,
}

impl RegisterSpec {
    pub fn new(name: impl Into<String>, size: usize, role: Role) -> Self {
        RegisterSpec {
            name: name.into(),
            size,
            role,
        }
    }
}

/// Index of a register inside the circuit that declared it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegId(pub usize);

/// A single qubit: register plus offset within the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitRef {
    pub register: RegId,
    pub offset: usize,
}

impl QubitRef {
    pub fn new(register: RegId, offset: usize) -> Self {
        QubitRef { register, offset }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    Cnot,
    Toffoli,
    /// Controlled swap; operands are `(control, a, b)`.
    Cswap,
    /// Compute `target = c1 & c2` into a target known to be 0.
    TempAnd,
    /// Uncompute a temporary AND; the target must end at 0.
    TempAndUncompute,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::X,
        GateKind::Cnot,
        GateKind::Toffoli,
        GateKind::Cswap,
        GateKind::TempAnd,
        GateKind::TempAndUncompute,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::X => 1,
            GateKind::Cnot => 2,
            GateKind::Toffoli
            | GateKind::Cswap
            | GateKind::TempAnd
            | GateKind::TempAndUncompute => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Cnot => "CNOT",
            GateKind::Toffoli => "TOFFOLI",
            GateKind::Cswap => "CSWAP",
            GateKind::TempAnd => "TEMP_AND",
            GateKind::TempAndUncompute => "TEMP_AND_UNCOMPUTE",
        }
    }

    /// The kind of the gate that undoes this one.
    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::TempAnd => GateKind::TempAndUncompute,
            GateKind::TempAndUncompute => GateKind::TempAnd,
            k => k,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown gate kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    /// Controls first, targets last.
    pub operands: SmallVec<[QubitRef; 3]>,
}

impl Gate {
    pub fn new(kind: GateKind, operands: &[QubitRef]) -> Self {
        Gate {
            kind,
            operands: SmallVec::from_slice(operands),
        }
    }

    pub fn x(t: QubitRef) -> Self {
        Gate::new(GateKind::X, &[t])
    }

    pub fn cnot(c: QubitRef, t: QubitRef) -> Self {
        Gate::new(GateKind::Cnot, &[c, t])
    }

    pub fn toffoli(c1: QubitRef, c2: QubitRef, t: QubitRef) -> Self {
        Gate::new(GateKind::Toffoli, &[c1, c2, t])
    }

    pub fn cswap(c: QubitRef, a: QubitRef, b: QubitRef) -> Self {
        Gate::new(GateKind::Cswap, &[c, a, b])
    }

    pub fn temp_and(c1: QubitRef, c2: QubitRef, t: QubitRef) -> Self {
        Gate::new(GateKind::TempAnd, &[c1, c2, t])
    }

    pub fn temp_and_uncompute(c1: QubitRef, c2: QubitRef, t: QubitRef) -> Self {
        Gate::new(GateKind::TempAndUncompute, &[c1, c2, t])
    }

    pub fn target(&self) -> QubitRef {
        *self
            .operands
            .last()
            .expect("gates have at least one operand")
    }
}

/// Exact gate and qubit counts of a circuit.
///
/// `toffoli` counts TOFFOLI, CSWAP and TEMP_AND gates once each; uncomputing a
/// temporary AND is measurement based and costs nothing. `cnot` includes the
/// two CNOTs of every expanded CSWAP.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ResourceEstimate {
    pub toffoli: u64,
    pub temp_and: u64,
    pub cnot: u64,
    pub x: u64,
    pub clean_qubits: u64,
    pub dirty_qubits: u64,
    pub total_qubits: u64,
}

/// Ordered gate list over named registers.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    registers: Vec<RegisterSpec>,
    starts: Vec<usize>,
    by_name: HashMap<String, RegId>,
    gates: Vec<Gate>,
    num_qubits: usize,
}

impl Circuit {
    /// Creates an empty circuit over `registers`.
    pub fn new(registers: impl IntoIterator<Item = RegisterSpec>) -> Result<Self, CircuitError> {
        let mut circuit = Circuit::default();
        for spec in registers {
            circuit.add_register(spec)?;
        }
        Ok(circuit)
    }

    pub fn add_register(&mut self, spec: RegisterSpec) -> Result<RegId, CircuitError> {
        if spec.size == 0 {
            return Err(CircuitError::EmptyRegister(spec.name));
        }
        if self.by_name.contains_key(&spec.name) {
            return Err(CircuitError::DuplicateRegister(spec.name));
        }
        let id = RegId(self.registers.len());
        self.by_name.insert(spec.name.clone(), id);
        self.starts.push(self.num_qubits);
        self.num_qubits += spec.size;
        self.registers.push(spec);
        Ok(id)
    }

    pub fn registers(&self) -> &[RegisterSpec] {
        &self.registers
    }

    pub fn register(&self, id: RegId) -> &RegisterSpec {
        &self.registers[id.0]
    }

    pub fn register_id(&self, name: &str) -> Option<RegId> {
        self.by_name.get(name).copied()
    }

    /// Registers with the given role, in declaration order.
    pub fn registers_with_role(&self, role: Role) -> impl Iterator<Item = RegId> + '_ {
        self.registers
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.role == role)
            .map(|(i, _)| RegId(i))
    }

    /// All qubits of a register, lowest offset first.
    pub fn qubits(&self, id: RegId) -> Vec<QubitRef> {
        (0..self.registers[id.0].size)
            .map(|o| QubitRef::new(id, o))
            .collect()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Flat index of a qubit, registers laid out in declaration order.
    pub fn flat_index(&self, q: QubitRef) -> usize {
        self.starts[q.register.0] + q.offset
    }

    fn check_qubit(&self, q: QubitRef) -> Result<(), CircuitError> {
        let reg = self
            .registers
            .get(q.register.0)
            .ok_or(CircuitError::UnknownRegisterId(q.register.0))?;
        if q.offset >= reg.size {
            return Err(CircuitError::OutOfBounds {
                register: reg.name.clone(),
                offset: q.offset,
                size: reg.size,
            });
        }
        Ok(())
    }

    pub fn check_gate(&self, gate: &Gate) -> Result<(), CircuitError> {
        if gate.operands.len() != gate.kind.arity() {
            return Err(CircuitError::Arity {
                kind: gate.kind.as_str(),
                expected: gate.kind.arity(),
                got: gate.operands.len(),
            });
        }
        for (i, q) in gate.operands.iter().enumerate() {
            self.check_qubit(*q)?;
            if gate.operands[..i].contains(q) {
                return Err(CircuitError::DuplicateOperand {
                    kind: gate.kind.as_str(),
                    qubit: self.describe(*q),
                });
            }
        }
        Ok(())
    }

    /// Appends a gate after validating arity, bounds and operand distinctness.
    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        self.check_gate(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Full-circuit validation, including TEMP_AND / TEMP_AND_UNCOMPUTE balance
    /// per target qubit.
    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut open = vec![false; self.num_qubits];
        for (index, gate) in self.gates.iter().enumerate() {
            self.check_gate(gate)?;
            let t = self.flat_index(gate.target());
            match gate.kind {
                GateKind::TempAnd => {
                    if open[t] {
                        return Err(CircuitError::TempAndReopened {
                            gate: index,
                            qubit: self.describe(gate.target()),
                        });
                    }
                    open[t] = true;
                }
                GateKind::TempAndUncompute => {
                    if !open[t] {
                        return Err(CircuitError::TempAndNotOpen {
                            gate: index,
                            qubit: self.describe(gate.target()),
                        });
                    }
                    open[t] = false;
                }
                _ => {}
            }
        }
        if let Some(t) = open.iter().position(|&o| o) {
            return Err(CircuitError::TempAndLeftOpen(
                self.describe(self.unflatten(t)),
            ));
        }
        Ok(())
    }

    fn unflatten(&self, flat: usize) -> QubitRef {
        let reg = self.starts.partition_point(|&s| s <= flat) - 1;
        QubitRef::new(RegId(reg), flat - self.starts[reg])
    }

    /// `name[offset]` for diagnostics.
    pub fn describe(&self, q: QubitRef) -> String {
        match self.registers.get(q.register.0) {
            Some(r) => format!("{}[{}]", r.name, q.offset),
            None => format!("#{}[{}]", q.register.0, q.offset),
        }
    }

    pub fn count_resources(&self) -> ResourceEstimate {
        let mut est = ResourceEstimate::default();
        for gate in &self.gates {
            match gate.kind {
                GateKind::X => est.x += 1,
                GateKind::Cnot => est.cnot += 1,
                GateKind::Toffoli => est.toffoli += 1,
                GateKind::Cswap => {
                    est.toffoli += 1;
                    est.cnot += 2;
                }
                GateKind::TempAnd => {
                    est.toffoli += 1;
                    est.temp_and += 1;
                }
                GateKind::TempAndUncompute => {}
            }
        }
        for reg in &self.registers {
            let size = reg.size as u64;
            est.total_qubits += size;
            if reg.role.is_clean() {
                est.clean_qubits += size;
            } else if reg.role == Role::Dirty {
                est.dirty_qubits += size;
            }
        }
        est
    }

    /// Sum of register sizes with the given role.
    pub fn role_size(&self, role: Role) -> usize {
        self.registers
            .iter()
            .filter(|r| r.role == role)
            .map(|r| r.size)
            .sum()
    }

    /// The inverse circuit: gates reversed, temporary ANDs swapped with their
    /// uncomputations.
    pub fn inverse(&self) -> Circuit {
        let mut inv = self.clone();
        inv.gates = self
            .gates
            .iter()
            .rev()
            .map(|g| Gate {
                kind: g.kind.inverse(),
                operands: g.operands.clone(),
            })
            .collect();
        inv
    }

    pub fn serialize(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for reg in &self.registers {
            writeln!(out, "REGISTER {} {} {}", reg.name, reg.size, reg.role).unwrap();
        }
        for gate in &self.gates {
            out.push_str(gate.kind.as_str());
            for q in &gate.operands {
                write!(out, " {} {}", self.registers[q.register.0].name, q.offset).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
        let mut circuit = Circuit::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |message: String| CircuitError::Parse {
                line: line_no,
                message,
            };
            let mut tokens = line.split_whitespace();
            let head = tokens.next().expect("non-empty line has a token");
            if head == "REGISTER" {
                let fields: Vec<&str> = tokens.collect();
                let [name, size, role] = fields[..] else {
                    return Err(at("expected `REGISTER <name> <size> <role>`".into()));
                };
                let size: usize = size
                    .parse()
                    .map_err(|_| at(format!("invalid register size `{size}`")))?;
                let role: Role = role.parse().map_err(at)?;
                circuit
                    .add_register(RegisterSpec::new(name, size, role))
                    .map_err(|e| at(e.to_string()))?;
                continue;
            }
            let kind: GateKind = head.parse().map_err(at)?;
            let fields: Vec<&str> = tokens.collect();
            if !fields.len().is_multiple_of(2) {
                return Err(at("operands must be `<register> <index>` pairs".into()));
            }
            let mut operands = SmallVec::new();
            for pair in fields.chunks(2) {
                let register = circuit
                    .register_id(pair[0])
                    .ok_or_else(|| at(format!("unknown register `{}`", pair[0])))?;
                let offset: usize = pair[1]
                    .parse()
                    .map_err(|_| at(format!("invalid qubit index `{}`", pair[1])))?;
                operands.push(QubitRef::new(register, offset));
            }
            circuit
                .push(Gate { kind, operands })
                .map_err(|e| at(e.to_string()))?;
        }
        Ok(circuit)
    }
}

impl fmt::Display for ResourceEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "toffoli={} temp_and={} cnot={} x={} clean={} dirty={} total={}",
            self.toffoli,
            self.temp_and,
            self.cnot,
            self.x,
            self.clean_qubits,
            self.dirty_qubits,
            self.total_qubits
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regs(specs: &[(&str, usize, Role)]) -> Circuit {
        Circuit::new(specs.iter().map(|(n, s, r)| RegisterSpec::new(*n, *s, *r))).unwrap()
    }

    #[test]
    fn empty_circuit() {
        let c = regs(&[("q", 2, Role::AddressQ)]);
        assert_eq!(c.num_qubits(), 2);
        assert!(c.gates().is_empty());
        let est = c.count_resources();
        assert_eq!((est.toffoli, est.cnot, est.x, est.temp_and), (0, 0, 0, 0));
        assert_eq!(est.total_qubits, 2);
    }

    #[test]
    fn rejects_duplicate_and_empty_registers() {
        let dup = Circuit::new([
            RegisterSpec::new("q", 1, Role::AddressQ),
            RegisterSpec::new("q", 2, Role::Work),
        ]);
        assert!(matches!(dup, Err(CircuitError::DuplicateRegister(n)) if n == "q"));
        let empty = Circuit::new([RegisterSpec::new("w", 0, Role::Work)]);
        assert!(matches!(empty, Err(CircuitError::EmptyRegister(_))));
    }

    #[test]
    fn qrom_sized_register_total() {
        // address 6 + output 8 + dirty mu*(lambda-1) = 6 + work 4
        let c = regs(&[
            ("q", 4, Role::AddressQ),
            ("r", 2, Role::AddressR),
            ("out", 8, Role::Output),
            ("dirty", 6, Role::Dirty),
            ("work", 4, Role::Work),
        ]);
        assert_eq!(c.count_resources().total_qubits, 24);
        assert_eq!(c.count_resources().clean_qubits, 12);
        assert_eq!(c.count_resources().dirty_qubits, 6);
    }

    #[test]
    fn append_and_validate() {
        let mut c = regs(&[("a", 2, Role::Work), ("out", 1, Role::Output)]);
        let a0 = QubitRef::new(RegId(0), 0);
        let a1 = QubitRef::new(RegId(0), 1);
        let o = QubitRef::new(RegId(1), 0);
        c.push(Gate::x(o)).unwrap();
        assert_eq!(c.gates().len(), 1);

        let err = c.push(Gate::toffoli(a0, a0, o)).unwrap_err();
        assert!(matches!(err, CircuitError::DuplicateOperand { .. }));
        let err = c.push(Gate::new(GateKind::Toffoli, &[a0, o])).unwrap_err();
        assert!(matches!(
            err,
            CircuitError::Arity {
                expected: 3,
                got: 2,
                ..
            }
        ));
        let err = c.push(Gate::x(QubitRef::new(RegId(1), 1))).unwrap_err();
        assert!(matches!(err, CircuitError::OutOfBounds { .. }));

        c.push(Gate::temp_and(a0, o, a1)).unwrap();
        assert!(matches!(
            c.validate(),
            Err(CircuitError::TempAndLeftOpen(_))
        ));
        c.push(Gate::temp_and_uncompute(a0, o, a1)).unwrap();
        c.validate().unwrap();
    }

    #[test]
    fn uncompute_without_compute_is_invalid() {
        let mut c = regs(&[("a", 3, Role::Work)]);
        let q = |i| QubitRef::new(RegId(0), i);
        c.push(Gate::temp_and_uncompute(q(0), q(1), q(2))).unwrap();
        assert!(matches!(
            c.validate(),
            Err(CircuitError::TempAndNotOpen { .. })
        ));
    }

    #[test]
    fn costing_convention() {
        let mut c = regs(&[("a", 4, Role::Work)]);
        let q = |i| QubitRef::new(RegId(0), i);
        c.push(Gate::toffoli(q(0), q(1), q(2))).unwrap();
        c.push(Gate::temp_and(q(0), q(1), q(3))).unwrap();
        c.push(Gate::temp_and_uncompute(q(0), q(1), q(3))).unwrap();
        assert_eq!(c.count_resources().toffoli, 2);
        assert_eq!(c.count_resources().temp_and, 1);
        c.push(Gate::cswap(q(0), q(1), q(2))).unwrap();
        let est = c.count_resources();
        assert_eq!(est.toffoli, 3);
        assert_eq!(est.cnot, 2);
    }

    #[test]
    fn serialize_format() {
        let mut c = regs(&[
            ("a", 1, Role::Work),
            ("b", 2, Role::Work),
            ("c", 3, Role::Output),
        ]);
        assert_eq!(
            c.serialize(),
            "REGISTER a 1 work\nREGISTER b 2 work\nREGISTER c 3 output\n"
        );
        c.push(Gate::toffoli(
            QubitRef::new(RegId(0), 0),
            QubitRef::new(RegId(1), 1),
            QubitRef::new(RegId(2), 2),
        ))
        .unwrap();
        assert!(c.serialize().ends_with("TOFFOLI a 0 b 1 c 2\n"));
        assert_eq!(Circuit::parse(&c.serialize()).unwrap(), c);
    }

    #[test]
    fn single_register_header_only() {
        let c = regs(&[("q", 3, Role::AddressQ)]);
        assert_eq!(c.serialize(), "REGISTER q 3 address_q\n");
    }

    #[test]
    fn parse_errors_report_lines() {
        let text = "REGISTER a 2 work\nREGISTER b 2 work\n# comment\nTOFFOLI a 0 a 0 b 1\n";
        match Circuit::parse(text) {
            Err(CircuitError::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("duplicate"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "REGISTER a 3 work\nFREDKIN2 a 0 a 1 a 2\n";
        assert!(matches!(
            Circuit::parse(text),
            Err(CircuitError::Parse { line: 2, .. })
        ));
        let text = "REGISTER a 3 work\nCNOT a 0 z 1\n";
        assert!(matches!(
            Circuit::parse(text),
            Err(CircuitError::Parse { line: 2, .. })
        ));
        let text = "REGISTER a 3 work\nCNOT a 0\n";
        assert!(matches!(
            Circuit::parse(text),
            Err(CircuitError::Parse { line: 2, .. })
        ));
        let text = "REGISTER a 3 wizard\n";
        assert!(matches!(
            Circuit::parse(text),
            Err(CircuitError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn parse_tolerates_comments_and_blank_lines() {
        let text = "# header\nREGISTER a 2 work   # two qubits\n\nX a 1 # flip\n";
        let c = Circuit::parse(text).unwrap();
        assert_eq!(c.gates().len(), 1);
        assert_eq!(c.count_resources().x, 1);
    }

    #[test]
    fn inverse_swaps_temp_and_kinds() {
        let mut c = regs(&[("a", 3, Role::Work)]);
        let q = |i| QubitRef::new(RegId(0), i);
        c.push(Gate::temp_and(q(0), q(1), q(2))).unwrap();
        c.push(Gate::cnot(q(2), q(0))).unwrap();
        c.push(Gate::temp_and_uncompute(q(0), q(1), q(2))).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.gates()[0].kind, GateKind::TempAnd);
        assert_eq!(inv.gates()[2].kind, GateKind::TempAndUncompute);
        inv.validate().unwrap();
    }
}
