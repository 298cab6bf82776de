//! C interface to the stratnet library.
//!
//! Networks and parameter sets are opaque handles created and freed by this
//! library. Every fallible function returns a `StnStatus`; on failure a
//! description is available from `stn_last_error` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use stratnet::inference::{
    conditional_p_value, locally_best_statistic, DeltaSource, Reference, TauChoice, TestOptions, TestStatisticSpec,
    DEFAULT_PILOT_STEPS,
};
use stratnet::model::{mle_null, simulate_alternative, NuisanceParams, StrategicSpec};
use stratnet::rng::substream;
use stratnet::sampler::{markov_draw, ChainConfig};
use stratnet::{reciprocity_index, transitivity_index, AdjacencyMatrix, Error, GroupAssignment};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    Io = 4,
    EnumerationCap = 5,
    Separation = 6,
    NoConvergence = 7,
    FrozenChain = 8,
    NoFixedPoint = 9,
    Unsupported = 10,
    Internal = 11,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StnSpec {
    Reciprocity = 0,
    Transitivity = 1,
    CustomerProduct = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StnReference {
    DensityOnly = 0,
    DegreeOnly = 1,
    DegreeAndCrosslink = 2,
    Enumerated = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StnStatistic {
    LocallyBest = 0,
    TransitivityIndex = 1,
    ReciprocityIndex = 2,
}

/// A directed network with its node groups.
pub struct StnNetwork {
    d: AdjacencyMatrix,
    g: GroupAssignment,
}

/// Nuisance parameters of the null model.
pub struct StnParams {
    p: NuisanceParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> StnStatus {
    match e {
        Error::InvalidInput(_) => StnStatus::InvalidInput,
        Error::Parse { .. } => StnStatus::Parse,
        Error::Io { .. } => StnStatus::Io,
        Error::EnumerationCap { .. } => StnStatus::EnumerationCap,
        Error::Separation(_) => StnStatus::Separation,
        Error::NoConvergence(_) => StnStatus::NoConvergence,
        Error::FrozenChain(_) => StnStatus::FrozenChain,
        Error::NoFixedPoint => StnStatus::NoFixedPoint,
        Error::Unsupported(_) => StnStatus::Unsupported,
        Error::Corrupted(_) => StnStatus::Internal,
    }
}

struct Failure(StnStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null_arg(name: &str) -> Failure {
    Failure(StnStatus::NullPointer, format!("`{name}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> StnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            StnStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            StnStatus::Internal
        }
    }
}

unsafe fn slice_or_empty<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null_arg(name))
    } else {
        Ok(slice::from_raw_parts(p, len))
    }
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        Ok(&mut [])
    } else if p.is_null() {
        Err(null_arg(name))
    } else {
        Ok(slice::from_raw_parts_mut(p, len))
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null_arg(name))
}

unsafe fn write_out<T>(p: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null_arg(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null_arg("out"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

fn spec_of(s: StnSpec) -> StrategicSpec {
    match s {
        StnSpec::Reciprocity => StrategicSpec::reciprocity(),
        StnSpec::Transitivity => StrategicSpec::transitivity(),
        StnSpec::CustomerProduct => StrategicSpec::customer_product(),
    }
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn stn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn stn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a network from `n_edges` arcs `sources[e] -> targets[e]` over
/// `n_nodes` zero-based nodes. `groups` may be NULL (one group) or hold
/// `n_nodes` entries below `n_groups`.
///
/// # Safety
/// Array arguments must point to at least the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn stn_network_new(
    n_nodes: usize,
    sources: *const u32,
    targets: *const u32,
    n_edges: usize,
    groups: *const u32,
    n_groups: usize,
    out: *mut *mut StnNetwork,
) -> StnStatus {
    guard(|| {
        let s = slice_or_empty(sources, n_edges, "sources")?;
        let t = slice_or_empty(targets, n_edges, "targets")?;
        let edges: Vec<(usize, usize)> = s.iter().zip(t).map(|(&a, &b)| (a as usize, b as usize)).collect();
        let (d, _) = AdjacencyMatrix::from_edge_list(&edges, n_nodes)?;
        let g = if groups.is_null() {
            GroupAssignment::single(n_nodes)
        } else {
            let gs = slice_or_empty(groups, n_nodes, "groups")?;
            GroupAssignment::new(gs.iter().map(|&x| x as usize).collect(), n_groups)?
        };
        write_handle(out, StnNetwork { d, g })
    })
}

/// # Safety
/// `net` must be NULL or a handle from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn stn_network_free(net: *mut StnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// # Safety
/// `net` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn stn_network_n_nodes(net: *const StnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.d.n_nodes())
}

/// # Safety
/// `net` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn stn_network_arc_count(net: *const StnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.d.arc_count())
}

/// Copies up to `capacity` arcs in row-major order and stores the total
/// arc count in `n_written`.
///
/// # Safety
/// `sources` and `targets` must hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn stn_network_edges(
    net: *const StnNetwork,
    sources: *mut u32,
    targets: *mut u32,
    capacity: usize,
    n_written: *mut usize,
) -> StnStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let s = slice_mut(sources, capacity, "sources")?;
        let t = slice_mut(targets, capacity, "targets")?;
        let edges = net.d.to_edge_list();
        for (k, (i, j)) in edges.iter().take(capacity).enumerate() {
            s[k] = *i as u32;
            t[k] = *j as u32;
        }
        write_out(n_written, edges.len(), "n_written")
    })
}

/// # Safety
/// `out_degrees` and `in_degrees` must hold `n_nodes` elements.
#[no_mangle]
pub unsafe extern "C" fn stn_network_degrees(
    net: *const StnNetwork,
    out_degrees: *mut u32,
    in_degrees: *mut u32,
) -> StnStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let n = net.d.n_nodes();
        let o = slice_mut(out_degrees, n, "out_degrees")?;
        let i = slice_mut(in_degrees, n, "in_degrees")?;
        for v in 0..n {
            o[v] = net.d.out_degree(v) as u32;
            i[v] = net.d.in_degree(v) as u32;
        }
        Ok(())
    })
}

/// Reciprocity or transitivity index; NaN when undefined.
///
/// # Safety
/// `net` must be a valid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stn_network_index(net: *const StnNetwork, statistic: StnStatistic, out: *mut f64) -> StnStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let v = match statistic {
            StnStatistic::TransitivityIndex => transitivity_index(&net.d),
            StnStatistic::ReciprocityIndex => reciprocity_index(&net.d),
            StnStatistic::LocallyBest => {
                return Err(Failure(StnStatus::InvalidInput, "use stn_locally_best for the locally best statistic".into()))
            }
        };
        write_out(out, v, "out")
    })
}

/// Parameters from `lambda` (row-major `n_groups` x `n_groups`), `a` and
/// `b` (`n_nodes` each).
///
/// # Safety
/// Arrays must hold the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn stn_params_new(
    n_nodes: usize,
    n_groups: usize,
    lambda: *const f64,
    a: *const f64,
    b: *const f64,
    out: *mut *mut StnParams,
) -> StnStatus {
    guard(|| {
        let l = slice_or_empty(lambda, n_groups * n_groups, "lambda")?;
        let rows = l.chunks(n_groups.max(1)).map(|r| r.to_vec()).collect();
        let p = NuisanceParams::new(rows, slice_or_empty(a, n_nodes, "a")?.to_vec(), slice_or_empty(b, n_nodes, "b")?.to_vec())?;
        write_handle(out, StnParams { p })
    })
}

/// # Safety
/// `params` must be NULL or a handle from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn stn_params_free(params: *mut StnParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Copies the parameters out; each array may be NULL to skip it.
///
/// # Safety
/// Non-NULL arrays must hold `n_groups * n_groups`, `n_nodes` and
/// `n_nodes` elements respectively.
#[no_mangle]
pub unsafe extern "C" fn stn_params_get(
    params: *const StnParams,
    lambda: *mut f64,
    a: *mut f64,
    b: *mut f64,
) -> StnStatus {
    guard(|| {
        let p = &deref(params, "params")?.p;
        let (n, k) = (p.n_nodes(), p.n_groups());
        if !lambda.is_null() {
            let dst = slice_mut(lambda, k * k, "lambda")?;
            for (r, row) in p.lambda_rows().iter().enumerate() {
                dst[r * k..(r + 1) * k].copy_from_slice(row);
            }
        }
        if !a.is_null() {
            slice_mut(a, n, "a")?.copy_from_slice(&p.a);
        }
        if !b.is_null() {
            slice_mut(b, n, "b")?.copy_from_slice(&p.b);
        }
        Ok(())
    })
}

/// Null-model maximum likelihood estimate.
///
/// # Safety
/// `net` must be a valid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stn_fit_null(net: *const StnNetwork, out: *mut *mut StnParams) -> StnStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let fit = mle_null(&net.d, &net.g)?;
        write_handle(out, StnParams { p: fit.params })
    })
}

/// # Safety
/// Handles must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stn_locally_best(
    net: *const StnNetwork,
    params: *const StnParams,
    spec: StnSpec,
    out: *mut f64,
) -> StnStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let p = &deref(params, "params")?.p;
        p.check_dims(net.d.n_nodes(), &net.g)?;
        write_out(out, locally_best_statistic(&net.d, &net.g, p, &spec_of(spec)), "out")
    })
}

/// One draw from the degree-preserving chain after `tau` steps.
/// `reference` must be `DegreeOnly` or `DegreeAndCrosslink`.
///
/// # Safety
/// `net` must be a valid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stn_sample(
    net: *const StnNetwork,
    reference: StnReference,
    tau: usize,
    q: f64,
    seed: u64,
    out: *mut *mut StnNetwork,
) -> StnStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let g = match reference {
            StnReference::DegreeOnly => GroupAssignment::single(net.d.n_nodes()),
            StnReference::DegreeAndCrosslink => net.g.clone(),
            _ => return Err(Failure(StnStatus::InvalidInput, "sampling needs a chain reference".into())),
        };
        let cfg = ChainConfig::new(tau, q, seed)?;
        let d = markov_draw(&net.d, &g, &cfg, &mut substream(seed, &[0]))?;
        write_handle(out, StnNetwork { d, g: net.g.clone() })
    })
}

/// Least dense pure-strategy equilibrium for the groups of `like`.
///
/// # Safety
/// Handles must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn stn_simulate(
    params: *const StnParams,
    like: *const StnNetwork,
    gamma: f64,
    spec: StnSpec,
    seed: u64,
    out: *mut *mut StnNetwork,
) -> StnStatus {
    guard(|| {
        let p = &deref(params, "params")?.p;
        let g = deref(like, "like")?.g.clone();
        let d = simulate_alternative(gamma, p, &spec_of(spec), &g, &mut substream(seed, &[0]))?;
        write_handle(out, StnNetwork { d, g })
    })
}

/// Conditional test. `params` may be NULL to fit the null model;
/// `tau == 0` chooses the chain length from a pilot run.
///
/// # Safety
/// `net` must be a valid handle, `params` NULL or valid, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn stn_test(
    net: *const StnNetwork,
    statistic: StnStatistic,
    spec: StnSpec,
    params: *const StnParams,
    reference: StnReference,
    draws: usize,
    tau: usize,
    q: f64,
    seed: u64,
    observed: *mut f64,
    p_value: *mut f64,
) -> StnStatus {
    guard(|| {
        let net = deref(net, "net")?;
        let stat = match statistic {
            StnStatistic::TransitivityIndex => TestStatisticSpec::transitivity_index(),
            StnStatistic::ReciprocityIndex => TestStatisticSpec::reciprocity_index(),
            StnStatistic::LocallyBest => {
                let source = match params.as_ref() {
                    Some(p) => DeltaSource::Provided(p.p.clone()),
                    None => DeltaSource::Fitted,
                };
                TestStatisticSpec::locally_best(spec_of(spec), source)
            }
        };
        let reference = match reference {
            StnReference::DensityOnly => Reference::DensityOnly,
            StnReference::DegreeOnly => Reference::DegreeOnly,
            StnReference::DegreeAndCrosslink => Reference::DegreeAndCrosslink,
            StnReference::Enumerated => Reference::Enumerated,
        };
        let tau = if tau == 0 { TauChoice::Auto { r: 10.0, pilot_steps: DEFAULT_PILOT_STEPS } } else { TauChoice::Fixed(tau) };
        let r = conditional_p_value(&net.d, &net.g, &stat, &TestOptions { reference, draws, tau, q, seed })?;
        write_out(observed, r.observed, "observed")?;
        write_out(p_value, r.p_value, "p_value")
    })
}
