//! C ABI over the `qpde` solver.
//!
//! Every fallible function returns a [`QpdeStatus`]; on failure a message is
//! available from [`qpde_last_error_message`] on the same thread. Objects are
//! opaque handles created by `*_new`/`*_from_*`/`qpde_run` style functions
//! and released with the matching `*_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qpde::pipeline::{self, RunOutput};
use qpde::qubo::{brute_force_ground_state, encode_qubo};
use qpde::{BitWeighting, Error, MarchingSystem, QuboInstance, RunConfig, SolverMode};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpdeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Rejected configuration or malformed input text.
    Config = 3,
    /// Singular system, non-finite objective or similar.
    Numerical = 4,
    /// Too many binary variables to enumerate or simulate.
    Capacity = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpdeSolverMode {
    Classical = 0,
    Qaoa = 1,
    BruteForce = 2,
}

/// Which temperature field of a run to read.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpdeField {
    /// Field produced by the configured solver.
    Solver = 0,
    Classical = 1,
}

/// Run configuration.
pub struct QpdeConfig(RunConfig);

/// Finished run: both fields and the comparison report.
pub struct QpdeRun(RunOutput);

/// Binarized least-squares objective.
pub struct QpdeQubo(QuboInstance);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(QpdeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.root() {
            Error::Capacity { .. } => QpdeStatus::Capacity,
            Error::Dimension(_) | Error::Encoding(_) => QpdeStatus::InvalidArgument,
            _ if e.is_config() => QpdeStatus::Config,
            _ if e.is_io() => QpdeStatus::Io,
            _ => QpdeStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QpdeStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            QpdeStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            QpdeStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(QpdeStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(QpdeStatus::InvalidArgument, message.into())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qpde_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. Valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn qpde_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qpde_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Default configuration: 5×5 channel, 5 integer bits, brute-force route.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qpde_config_default(out: *mut *mut QpdeConfig) -> QpdeStatus {
    guard(|| {
        put(
            out,
            Box::into_raw(Box::new(QpdeConfig(RunConfig::default()))),
            "out",
        )
    })
}

/// Parses and validates a JSON configuration; omitted keys take defaults.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qpde_config_from_json(
    json: *const c_char,
    out: *mut *mut QpdeConfig,
) -> QpdeStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| invalid("json is not UTF-8"))?;
        let config = RunConfig::from_json(text)?;
        put(out, Box::into_raw(Box::new(QpdeConfig(config))), "out")
    })
}

/// # Safety
/// `config` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn qpde_config_set_mode(
    config: *mut QpdeConfig,
    mode: QpdeSolverMode,
) -> QpdeStatus {
    guard(|| {
        let config = config.as_mut().ok_or_else(|| null("config"))?;
        config.0.solver_mode = match mode {
            QpdeSolverMode::Classical => SolverMode::Classical,
            QpdeSolverMode::Qaoa => SolverMode::Qaoa,
            QpdeSolverMode::BruteForce => SolverMode::BruteForce,
        };
        Ok(())
    })
}

/// # Safety
/// `config` must be a live configuration handle.
#[no_mangle]
pub unsafe extern "C" fn qpde_config_set_seed(config: *mut QpdeConfig, seed: u64) -> QpdeStatus {
    guard(|| {
        config.as_mut().ok_or_else(|| null("config"))?.0.seed = seed;
        Ok(())
    })
}

/// Releases a configuration. NULL is ignored.
///
/// # Safety
/// `config` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qpde_config_free(config: *mut QpdeConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Marches the configured problem and compares it with the classical field.
///
/// # Safety
/// `config` must be a live configuration handle; `out` valid for a pointer
/// write.
#[no_mangle]
pub unsafe extern "C" fn qpde_run(config: *const QpdeConfig, out: *mut *mut QpdeRun) -> QpdeStatus {
    guard(|| {
        let config = deref(config, "config")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let output = pipeline::run(&config.0)?;
        put(out, Box::into_raw(Box::new(QpdeRun(output))), "out")
    })
}

/// Mesh size of a run: `x_nodes` columns of `y_nodes` values.
///
/// # Safety
/// `run` must be a live run handle; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn qpde_run_dims(
    run: *const QpdeRun,
    x_nodes: *mut usize,
    y_nodes: *mut usize,
) -> QpdeStatus {
    guard(|| {
        let mesh = deref(run, "run")?.0.field.mesh;
        put(x_nodes, mesh.x_nodes(), "x_nodes")?;
        put(y_nodes, mesh.y_nodes(), "y_nodes")
    })
}

/// Copies a field into `buffer`, x-major: `buffer[i * y_nodes + j]` is the
/// temperature at column `i`, node `j`. `len` must equal
/// `x_nodes * y_nodes`.
///
/// # Safety
/// `run` must be a live run handle; `buffer` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qpde_run_field(
    run: *const QpdeRun,
    which: QpdeField,
    buffer: *mut f64,
    len: usize,
) -> QpdeStatus {
    guard(|| {
        let out = &deref(run, "run")?.0;
        let field = match which {
            QpdeField::Solver => &out.field,
            QpdeField::Classical => &out.classical,
        };
        let need = field.mesh.x_nodes() * field.mesh.y_nodes();
        if len != need {
            return Err(invalid(format!(
                "buffer holds {len} values, field has {need}"
            )));
        }
        let buffer = slice_mut(buffer, len, "buffer")?;
        for (dst, src) in buffer.iter_mut().zip(field.grid.iter().flatten()) {
            *dst = *src;
        }
        Ok(())
    })
}

/// Largest `|solver − classical|` over the whole field.
///
/// # Safety
/// `run` must be a live run handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qpde_run_max_deviation(run: *const QpdeRun, out: *mut f64) -> QpdeStatus {
    guard(|| put(out, deref(run, "run")?.0.report.field_max_deviation, "out"))
}

/// Releases a run. NULL is ignored.
///
/// # Safety
/// `run` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qpde_run_free(run: *mut QpdeRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Binarizes `‖A·s − b‖²` with `s_i = Σ_r 2^exponents[r] q_{i,r}`.
///
/// `a` is row-major `n × n`, `b` has `n` entries, `exponents` has `r`
/// strictly increasing entries.
///
/// # Safety
/// Arrays must be valid for the stated lengths; `out` valid for a pointer
/// write.
#[no_mangle]
pub unsafe extern "C" fn qpde_qubo_encode(
    a: *const f64,
    b: *const f64,
    n: usize,
    exponents: *const i32,
    r: usize,
    out: *mut *mut QpdeQubo,
) -> QpdeStatus {
    guard(|| {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let len = n.checked_mul(n).ok_or_else(|| invalid("n too large"))?;
        let a = slice(a, len, "a")?;
        let b = slice(b, n, "b")?;
        let exponents = slice(exponents, r, "exponents")?;
        let rows: Vec<Vec<f64>> = a.chunks(n).map(<[f64]>::to_vec).collect();
        let system = MarchingSystem::from_dense(&rows, b.to_vec())?;
        let weighting = BitWeighting::new(exponents.to_vec())?;
        let qubo = encode_qubo(&system, &weighting)?;
        put(out, Box::into_raw(Box::new(QpdeQubo(qubo))), "out")
    })
}

/// Builds a QUBO from its text form (`n offset` header, `i i c` and
/// `i j c` lines).
///
/// # Safety
/// `text` must be NUL-terminated; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qpde_qubo_from_text(
    text: *const c_char,
    out: *mut *mut QpdeQubo,
) -> QpdeStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| invalid("text is not UTF-8"))?;
        let qubo = QuboInstance::from_text(text)?;
        put(out, Box::into_raw(Box::new(QpdeQubo(qubo))), "out")
    })
}

/// # Safety
/// `qubo` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qpde_qubo_num_vars(qubo: *const QpdeQubo, out: *mut usize) -> QpdeStatus {
    guard(|| put(out, deref(qubo, "qubo")?.0.num_vars(), "out"))
}

fn bits_from_bytes(bytes: &[u8]) -> Result<Vec<bool>, Failure> {
    bytes
        .iter()
        .map(|&b| match b {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(invalid(format!("bit value {other} is not 0 or 1"))),
        })
        .collect()
}

/// Energy of one assignment; `bits` holds `len == num_vars` bytes of 0 or 1.
///
/// # Safety
/// `qubo` must be a live handle; `bits` valid for `len` reads; `out` valid
/// for a write.
#[no_mangle]
pub unsafe extern "C" fn qpde_qubo_energy(
    qubo: *const QpdeQubo,
    bits: *const u8,
    len: usize,
    out: *mut f64,
) -> QpdeStatus {
    guard(|| {
        let q = &deref(qubo, "qubo")?.0;
        if len != q.num_vars() {
            return Err(invalid(format!(
                "{len} bits for {} variables",
                q.num_vars()
            )));
        }
        let bits = bits_from_bytes(slice(bits, len, "bits")?)?;
        put(out, q.energy(&bits), "out")
    })
}

/// Exhaustive minimum. Writes the lowest-index minimizing assignment into
/// `bits` (`len == num_vars` bytes) and its energy into `energy`.
///
/// # Safety
/// `qubo` must be a live handle; `bits` valid for `len` writes; `energy`
/// valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qpde_qubo_ground_state(
    qubo: *const QpdeQubo,
    bits: *mut u8,
    len: usize,
    energy: *mut f64,
) -> QpdeStatus {
    guard(|| {
        let q = &deref(qubo, "qubo")?.0;
        if len != q.num_vars() {
            return Err(invalid(format!(
                "{len} bits for {} variables",
                q.num_vars()
            )));
        }
        let dst = slice_mut(bits, len, "bits")?;
        if energy.is_null() {
            return Err(null("energy"));
        }
        let (ground, e) = brute_force_ground_state(q)?;
        for (d, g) in dst.iter_mut().zip(ground) {
            *d = u8::from(g);
        }
        put(energy, e, "energy")
    })
}

/// Text form of the QUBO; release with [`qpde_string_free`].
///
/// # Safety
/// `qubo` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn qpde_qubo_to_text(
    qubo: *const QpdeQubo,
    out: *mut *mut c_char,
) -> QpdeStatus {
    guard(|| {
        let text = deref(qubo, "qubo")?.0.to_text();
        let c = CString::new(text).map_err(|_| invalid("text contains NUL"))?;
        put(out, c.into_raw(), "out")
    })
}

/// Releases a QUBO. NULL is ignored.
///
/// # Safety
/// `qubo` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn qpde_qubo_free(qubo: *mut QpdeQubo) {
    if !qubo.is_null() {
        drop(Box::from_raw(qubo));
    }
}
