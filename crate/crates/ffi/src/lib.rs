//! C ABI for the `qrom` library.
//!
//! Tables and circuits are opaque heap handles owned by the caller and
//! released with `qrom_table_free` / `qrom_circuit_free`. Every fallible call
//! returns a [`QromStatus`]; on failure, `qrom_last_error` gives a message
//! for the calling thread. Strings returned by the library are freed with
//! `qrom_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qrom::baselines::{build_plain_qrom, build_selectswap_dirty};
use qrom::cost::{cost_bit_packet, optimize_parameters, CostBreakdown};
use qrom::error::TableError;
use qrom::sim::verify_lookup;
use qrom::{
    build_qrom, build_sequential_qroms, plan_qrom, Circuit, Error, LookupTable, SequentialSpec,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QromStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParams = 2,
    ParseError = 3,
    VerificationFailed = 4,
    Internal = 5,
}

/// Lookup data. Opaque.
pub struct QromTable(LookupTable);

/// Gate-level circuit. Opaque.
pub struct QromCircuit(Circuit);

/// Exact gate and qubit counts of a circuit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QromResources {
    pub toffoli: u64,
    pub temp_and: u64,
    pub cnot: u64,
    pub x: u64,
    pub clean_qubits: u64,
    pub dirty_qubits: u64,
    pub total_qubits: u64,
}

/// Closed-form cost of one construction.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QromCost {
    pub toffoli_total: u64,
    pub select_toffoli: u64,
    pub copy_toffoli: u64,
    pub dirty_qubits: u64,
    pub clean_work_qubits: u64,
    pub output_qubits: u64,
}

/// Parameters chosen by `qrom_optimize`. `lambda` and `mu` are 0 when no
/// pair fits the budget; `cost` then holds the plain circuit's count.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QromOptimum {
    pub lambda: u64,
    pub mu: u64,
    pub feasible: bool,
    pub cost: QromCost,
}

/// Outcome of `qrom_verify`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QromVerifyReport {
    pub cases_run: u64,
    pub failures: u64,
    /// Address of the first failing case, or `UINT64_MAX`.
    pub first_failure_address: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

type Fallible = Result<(), (QromStatus, String)>;

fn status_of(e: &Error) -> QromStatus {
    match e {
        Error::Param(_) | Error::Unary(_) | Error::Table(TableError::Invalid(_)) => {
            QromStatus::InvalidParams
        }
        Error::Table(_) | Error::Circuit(_) => QromStatus::ParseError,
        Error::Sim(_) => QromStatus::VerificationFailed,
    }
}

fn fail(e: impl Into<Error>) -> (QromStatus, String) {
    let e = e.into();
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (QromStatus, String) {
    (QromStatus::NullPointer, format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Fallible) -> QromStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QromStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            QromStatus::Internal
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, (QromStatus, String)> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn put<T>(out: *mut T, value: T, name: &str) -> Fallible {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (QromStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (QromStatus::ParseError, format!("{name} is not valid UTF-8")))
}

fn circuit_handle(c: Circuit) -> *mut QromCircuit {
    Box::into_raw(Box::new(QromCircuit(c)))
}

fn to_cost(c: &CostBreakdown) -> QromCost {
    QromCost {
        toffoli_total: c.toffoli_total,
        select_toffoli: c.select_toffoli,
        copy_toffoli: c.copy_toffoli,
        dirty_qubits: c.dirty_qubits,
        clean_work_qubits: c.clean_work_qubits,
        output_qubits: c.output_qubits,
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qrom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a table from `n` entries of `bit_width` bits.
///
/// # Safety
/// `entries` must point to `n` readable `uint64_t`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_table_new(
    entries: *const u64,
    n: usize,
    bit_width: u32,
    out: *mut *mut QromTable,
) -> QromStatus {
    guard(|| {
        if entries.is_null() {
            return Err(null("entries"));
        }
        let data = std::slice::from_raw_parts(entries, n).to_vec();
        let table = LookupTable::new(bit_width as usize, data).map_err(fail)?;
        put(out, Box::into_raw(Box::new(QromTable(table))), "out")
    })
}

/// Parses a table in the text format (`N b` header, then `N` values).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_table_parse(
    text: *const c_char,
    out: *mut *mut QromTable,
) -> QromStatus {
    guard(|| {
        let table = LookupTable::parse(read_str(text, "text")?).map_err(fail)?;
        put(out, Box::into_raw(Box::new(QromTable(table))), "out")
    })
}

/// # Safety
/// `table` must be NULL or a handle from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn qrom_table_free(table: *mut QromTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Builds the bit-packet lookup circuit for `table`.
///
/// # Safety
/// `table` must be a live table handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_build(
    table: *const QromTable,
    lambda: u64,
    mu: u32,
    out: *mut *mut QromCircuit,
) -> QromStatus {
    guard(|| {
        let t = &deref(table, "table")?.0;
        let plan = plan_qrom(t.len() as u64, t.bit_width(), lambda, mu as usize).map_err(fail)?;
        let c = build_qrom(t, &plan).map_err(fail)?;
        put(out, circuit_handle(c), "out")
    })
}

/// Builds `count` back-to-back lookups sharing one dirty register set.
///
/// # Safety
/// `tables` must point to `count` live table handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_build_sequential(
    tables: *const *const QromTable,
    count: usize,
    lambda: u64,
    out: *mut *mut QromCircuit,
) -> QromStatus {
    guard(|| {
        let list = collect_tables(tables, count)?;
        let spec = SequentialSpec {
            tables: list.into_iter().cloned().collect(),
            lambda,
        };
        let c = build_sequential_qroms(&spec).map_err(fail)?;
        put(out, circuit_handle(c), "out")
    })
}

/// Builds the dirty-ancilla SelectSwap baseline.
///
/// # Safety
/// `table` must be a live table handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_build_selectswap(
    table: *const QromTable,
    lambda: u64,
    out: *mut *mut QromCircuit,
) -> QromStatus {
    guard(|| {
        let c = build_selectswap_dirty(&deref(table, "table")?.0, lambda).map_err(fail)?;
        put(out, circuit_handle(c), "out")
    })
}

/// Builds the plain unary-iteration lookup.
///
/// # Safety
/// `table` must be a live table handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_build_plain(
    table: *const QromTable,
    out: *mut *mut QromCircuit,
) -> QromStatus {
    guard(|| {
        let c = build_plain_qrom(&deref(table, "table")?.0).map_err(fail)?;
        put(out, circuit_handle(c), "out")
    })
}

/// # Safety
/// `circuit` must be NULL or a handle from this library that is not used
/// again.
#[no_mangle]
pub unsafe extern "C" fn qrom_circuit_free(circuit: *mut QromCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// # Safety
/// `circuit` must be a live circuit handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_circuit_resources(
    circuit: *const QromCircuit,
    out: *mut QromResources,
) -> QromStatus {
    guard(|| {
        let e = deref(circuit, "circuit")?.0.count_resources();
        let r = QromResources {
            toffoli: e.toffoli,
            temp_and: e.temp_and,
            cnot: e.cnot,
            x: e.x,
            clean_qubits: e.clean_qubits,
            dirty_qubits: e.dirty_qubits,
            total_qubits: e.total_qubits,
        };
        put(out, r, "out")
    })
}

/// Serializes a circuit to the gate-list text format. Free the result with
/// `qrom_string_free`.
///
/// # Safety
/// `circuit` must be a live circuit handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_circuit_serialize(
    circuit: *const QromCircuit,
    out: *mut *mut c_char,
) -> QromStatus {
    guard(|| {
        let text = deref(circuit, "circuit")?.0.serialize();
        let c = CString::new(text).map_err(|_| {
            (
                QromStatus::Internal,
                "serialized text has a NUL".to_string(),
            )
        })?;
        put(out, c.into_raw(), "out")
    })
}

/// Parses and validates a gate-list text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_circuit_parse(
    text: *const c_char,
    out: *mut *mut QromCircuit,
) -> QromStatus {
    guard(|| {
        let c = Circuit::parse(read_str(text, "text")?).map_err(fail)?;
        c.validate().map_err(fail)?;
        put(out, circuit_handle(c), "out")
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not used again.
#[no_mangle]
pub unsafe extern "C" fn qrom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn collect_tables<'a>(
    tables: *const *const QromTable,
    count: usize,
) -> Result<Vec<&'a LookupTable>, (QromStatus, String)> {
    if tables.is_null() {
        return Err(null("tables"));
    }
    if count == 0 {
        return Err((QromStatus::InvalidParams, "need at least one table".into()));
    }
    std::slice::from_raw_parts(tables, count)
        .iter()
        .map(|&t| deref(t, "tables[i]").map(|t| &t.0))
        .collect()
}

/// Simulates every address of the tables with `trials` seeded dirty patterns
/// each. Output register `i` is checked against `tables[i]`. Returns
/// `QROM_STATUS_VERIFICATION_FAILED` when any case fails; `out` is filled
/// either way.
///
/// # Safety
/// `circuit` must be a live handle, `tables` must point to `count` live table
/// handles, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_verify(
    circuit: *const QromCircuit,
    tables: *const *const QromTable,
    count: usize,
    trials: u32,
    seed: u64,
    out: *mut QromVerifyReport,
) -> QromStatus {
    guard(|| {
        let c = &deref(circuit, "circuit")?.0;
        let list = collect_tables(tables, count)?;
        let outputs = c.registers_with_role(qrom::Role::Output).count();
        if outputs != list.len() {
            return Err((
                QromStatus::InvalidParams,
                format!(
                    "circuit has {outputs} output registers, {} tables given",
                    list.len()
                ),
            ));
        }
        let report = verify_lookup(c, &list, trials as usize, seed, true).map_err(fail)?;
        let summary = QromVerifyReport {
            cases_run: report.cases_run,
            failures: report.failures.len() as u64,
            first_failure_address: report.failures.first().map_or(u64::MAX, |f| f.address),
        };
        put(out, summary, "out")?;
        match report.failures.first() {
            None => Ok(()),
            Some(f) => Err((
                QromStatus::VerificationFailed,
                format!("x={}: {}", f.address, f.diagnostics),
            )),
        }
    })
}

/// Closed-form bit-packet lookup cost.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_cost_bit_packet(
    n: u64,
    b: u64,
    lambda: u64,
    mu: u64,
    out: *mut QromCost,
) -> QromStatus {
    guard(|| {
        let c = cost_bit_packet(n, b, lambda, mu).map_err(fail)?;
        put(out, to_cost(&c), "out")
    })
}

/// Cheapest `(lambda, mu)` with `mu * (lambda - 1) <= dirty_budget`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qrom_optimize(
    n: u64,
    b: u64,
    dirty_budget: u64,
    out: *mut QromOptimum,
) -> QromStatus {
    guard(|| {
        let r = optimize_parameters(n, b, dirty_budget).map_err(fail)?;
        let opt = QromOptimum {
            lambda: r.lambda,
            mu: r.mu,
            feasible: r.feasible,
            cost: to_cost(&r.cost),
        };
        put(out, opt, "out")
    })
}
