//! C ABI for the BLER-bound evaluator: an opaque handle configured once,
//! then queried per SNR point. Status codes instead of panics; all outputs
//! through caller-provided pointers. The header is generated by cbindgen
//! into `include/spinal.h`.

use std::ffi::c_char;

use spinal::bounds::{BoundEngine, BoundKind, ThetaPartition};
use spinal::channel::{FadingModel, NoiseSpec};
use spinal::codec::{CodeParams, Flavor};
use spinal::pattern::TransmissionPattern;

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    LengthMismatch = 3,
}

/// Constellation flavor.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinalFlavor {
    Real = 0,
    Complex = 1,
}

/// Fading family. Parameters not used by a family (m, kfactor) are ignored.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinalFamily {
    Awgn = 0,
    Rayleigh = 1,
    Nakagami = 2,
    Rician = 3,
}

/// Which BLER upper bound to evaluate.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinalBoundKind {
    Gallager = 0,
    Refined = 1,
}

/// Opaque evaluator: code parameters, fading model, transmission pattern,
/// and theta resolution. Create with `spinal_evaluator_new`, release with
/// `spinal_evaluator_free`.
pub struct SpinalEvaluator {
    params: CodeParams,
    model: FadingModel,
    pattern: TransmissionPattern,
    partition: ThetaPartition,
}

impl SpinalEvaluator {
    fn bound(&self, kind: SpinalBoundKind, snr_db: f64) -> Result<spinal::BlerBoundReport, ()> {
        let noise = NoiseSpec::from_snr_db(snr_db, self.model.omega()).map_err(|_| ())?;
        let engine =
            BoundEngine::new(&self.params, &self.model, &noise, Some(&self.partition))
                .map_err(|_| ())?;
        let kind = match kind {
            SpinalBoundKind::Gallager => BoundKind::Gallager,
            SpinalBoundKind::Refined => BoundKind::Refined,
        };
        engine.evaluate(kind, &self.pattern).map_err(|_| ())
    }
}

/// Creates an evaluator for one code/channel/pattern configuration.
///
/// `ells` points to `ells_len` per-spine symbol counts; `ells_len` must
/// equal n/k. `m` is read only for the Nakagami family, `kfactor` only for
/// Rician, `omega` for every fading family (ignored by AWGN).
///
/// # Safety
/// `ells` must point to `ells_len` readable u32 values and `out` must be a
/// valid pointer; on `SPINAL_STATUS_OK` the caller owns the handle written
/// to `out` and must release it with `spinal_evaluator_free`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn spinal_evaluator_new(
    n: u32,
    k: u32,
    c: u32,
    v: u32,
    flavor: SpinalFlavor,
    family: SpinalFamily,
    omega: f64,
    m: f64,
    kfactor: f64,
    theta_n: u32,
    ells: *const u32,
    ells_len: usize,
    out: *mut *mut SpinalEvaluator,
) -> SpinalStatus {
    if out.is_null() || ells.is_null() {
        return SpinalStatus::NullPointer;
    }
    let flavor = match flavor {
        SpinalFlavor::Real => Flavor::Real,
        SpinalFlavor::Complex => Flavor::Complex,
    };
    let params = match CodeParams::new(n, k, c, v, flavor) {
        Ok(p) => p,
        Err(_) => return SpinalStatus::InvalidArgument,
    };
    if ells_len != params.segments() {
        return SpinalStatus::LengthMismatch;
    }
    let ells = std::slice::from_raw_parts(ells, ells_len).to_vec();
    let pattern = match TransmissionPattern::new(ells) {
        Ok(p) => p,
        Err(_) => return SpinalStatus::InvalidArgument,
    };
    if pattern.first_empty_tail().is_some() {
        return SpinalStatus::InvalidArgument;
    }
    let model = match family {
        SpinalFamily::Awgn => Ok(FadingModel::awgn(flavor)),
        SpinalFamily::Rayleigh => FadingModel::rayleigh(omega, flavor),
        SpinalFamily::Nakagami => FadingModel::nakagami(omega, m, flavor),
        SpinalFamily::Rician => FadingModel::rician(omega, kfactor, flavor),
    };
    let model = match model {
        Ok(m) => m,
        Err(_) => return SpinalStatus::InvalidArgument,
    };
    if theta_n == 0 {
        return SpinalStatus::InvalidArgument;
    }
    let evaluator = Box::new(SpinalEvaluator {
        params,
        model,
        pattern,
        partition: ThetaPartition::uniform(theta_n as usize),
    });
    out.write(Box::into_raw(evaluator));
    SpinalStatus::Ok
}

/// Releases an evaluator created by `spinal_evaluator_new`. Null is a no-op.
///
/// # Safety
/// `evaluator` must be a handle returned by `spinal_evaluator_new` that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn spinal_evaluator_free(evaluator: *mut SpinalEvaluator) {
    if !evaluator.is_null() {
        drop(Box::from_raw(evaluator));
    }
}

/// Number of segments n/k, the length required of epsilon output buffers.
///
/// # Safety
/// `evaluator` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinal_evaluator_segments(
    evaluator: *const SpinalEvaluator,
    out: *mut usize,
) -> SpinalStatus {
    if evaluator.is_null() || out.is_null() {
        return SpinalStatus::NullPointer;
    }
    out.write((*evaluator).params.segments());
    SpinalStatus::Ok
}

/// Evaluates the BLER upper bound P_e at one SNR point (dB, with
/// SNR = omega / sigma^2 under the unit-energy constellation).
///
/// # Safety
/// `evaluator` must be a live handle and `out_pe` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spinal_bler_bound(
    evaluator: *const SpinalEvaluator,
    kind: SpinalBoundKind,
    snr_db: f64,
    out_pe: *mut f64,
) -> SpinalStatus {
    if evaluator.is_null() || out_pe.is_null() {
        return SpinalStatus::NullPointer;
    }
    match (*evaluator).bound(kind, snr_db) {
        Ok(report) => {
            out_pe.write(report.p_e);
            SpinalStatus::Ok
        }
        Err(()) => SpinalStatus::InvalidArgument,
    }
}

/// Writes the per-segment error terms eps_1..eps_{n/k} into `out`.
/// `out_len` must equal the segment count.
///
/// # Safety
/// `evaluator` must be a live handle and `out` must point to `out_len`
/// writable f64 values.
#[no_mangle]
pub unsafe extern "C" fn spinal_bler_epsilons(
    evaluator: *const SpinalEvaluator,
    kind: SpinalBoundKind,
    snr_db: f64,
    out: *mut f64,
    out_len: usize,
) -> SpinalStatus {
    if evaluator.is_null() || out.is_null() {
        return SpinalStatus::NullPointer;
    }
    let segments = (*evaluator).params.segments();
    if out_len != segments {
        return SpinalStatus::LengthMismatch;
    }
    match (*evaluator).bound(kind, snr_db) {
        Ok(report) => {
            std::ptr::copy_nonoverlapping(report.epsilons.as_ptr(), out, segments);
            SpinalStatus::Ok
        }
        Err(()) => SpinalStatus::InvalidArgument,
    }
}

/// Q(x) via Craig's finite-interval formula.
#[no_mangle]
pub extern "C" fn spinal_craig_q(x: f64) -> f64 {
    spinal::craig_q(x)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn spinal_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_is_nul_terminated() {
        let p = spinal_version();
        assert!(!p.is_null());
        let s = unsafe { std::ffi::CStr::from_ptr(p) };
        assert_eq!(s.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
