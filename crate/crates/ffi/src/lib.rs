//! C interface to the `acstark` library.
//!
//! Species and chains are opaque handles created and freed through this API.
//! Every fallible call returns an [`AcsStatus`]; on failure a description is
//! available from [`acs_last_error`] on the same thread. Choice arguments
//! (polarization, shift mode, beam placement) are plain integers checked
//! against the `ACS_*` constants.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use acstark::atomic_data::{builtin_species, load_species_file, IonSpecies, QubitKind};
use acstark::beam::{kappa, optimal_offset, Polarization};
use acstark::chain::{equilibrium_positions, ChainGeometry, TrapConfig};
use acstark::constants::omega_from_wavelength;
use acstark::stark::{psi, required_power, zeeman_optimum, BeamPlacement, ShiftMode};
use acstark::Error;

pub const ACS_POLARIZATION_LINEAR_PI: u32 = 0;
pub const ACS_POLARIZATION_SIGMA_PLUS: u32 = 1;
pub const ACS_POLARIZATION_SIGMA_MINUS: u32 = 2;

pub const ACS_MODE_COARSE: u32 = 0;
pub const ACS_MODE_FINE: u32 = 1;

pub const ACS_PLACEMENT_HALF_WAIST: u32 = 0;
pub const ACS_PLACEMENT_OPTIMAL: u32 = 1;
pub const ACS_PLACEMENT_FIXED: u32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    NotFound = 5,
    Configuration = 6,
    Domain = 7,
    Regime = 8,
    Infeasible = 9,
    Singular = 10,
    Numeric = 11,
    Io = 12,
    BufferTooSmall = 13,
    Panic = 14,
}

impl From<&Error> for AcsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse { .. } => AcsStatus::Parse,
            Error::Validation(_) | Error::Index { .. } => AcsStatus::InvalidArgument,
            Error::NotFound { .. } => AcsStatus::NotFound,
            Error::Configuration(_) => AcsStatus::Configuration,
            Error::Domain(_) => AcsStatus::Domain,
            Error::Regime(_) | Error::LambDicke { .. } => AcsStatus::Regime,
            Error::Infeasible { .. } => AcsStatus::Infeasible,
            Error::Singular(_) => AcsStatus::Singular,
            Error::Numeric { .. } => AcsStatus::Numeric,
            Error::Io(_) => AcsStatus::Io,
        }
    }
}

/// Opaque species handle.
pub struct AcsSpecies(IonSpecies);

/// Opaque chain handle: equilibrium positions and modes of a linear chain.
pub struct AcsChain(ChainGeometry);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AcsPowerResult {
    /// W
    pub power: f64,
    /// W/m^2
    pub peak_intensity: f64,
    /// m
    pub center_offset: f64,
    /// rad/s per W/m^2
    pub psi: f64,
    pub kappa: f64,
    /// 1/s
    pub total_scatter: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AcsZeemanResult {
    /// m
    pub wavelength: f64,
    /// W
    pub power: f64,
    /// 1/s
    pub total_scatter: f64,
    /// rad/s per W/m^2
    pub psi: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: AcsStatus, message: impl Into<String>) -> AcsStatus {
    set_error(message.into());
    status
}

fn guard<F: FnOnce() -> Result<(), AcsStatus>>(body: F) -> AcsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => AcsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(AcsStatus::Panic, "internal panic"),
    }
}

fn lib<T>(r: acstark::Result<T>) -> Result<T, AcsStatus> {
    r.map_err(|e| fail(AcsStatus::from(&e), e.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, AcsStatus> {
    if p.is_null() {
        return Err(fail(AcsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(AcsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, AcsStatus> {
    p.as_ref().ok_or_else(|| fail(AcsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, AcsStatus> {
    p.as_mut().ok_or_else(|| fail(AcsStatus::NullPointer, format!("{what} is null")))
}

fn polarization(code: u32) -> Result<Polarization, AcsStatus> {
    match code {
        ACS_POLARIZATION_LINEAR_PI => Ok(Polarization::LinearPi),
        ACS_POLARIZATION_SIGMA_PLUS => Ok(Polarization::SigmaPlus),
        ACS_POLARIZATION_SIGMA_MINUS => Ok(Polarization::SigmaMinus),
        _ => Err(fail(AcsStatus::InvalidArgument, format!("unknown polarization {code}"))),
    }
}

fn shift_mode(code: u32) -> Result<ShiftMode, AcsStatus> {
    match code {
        ACS_MODE_COARSE => Ok(ShiftMode::Coarse),
        ACS_MODE_FINE => Ok(ShiftMode::Fine),
        _ => Err(fail(AcsStatus::InvalidArgument, format!("unknown shift mode {code}"))),
    }
}

fn placement(code: u32, offset: f64) -> Result<BeamPlacement, AcsStatus> {
    match code {
        ACS_PLACEMENT_HALF_WAIST => Ok(BeamPlacement::HalfWaist),
        ACS_PLACEMENT_OPTIMAL => Ok(BeamPlacement::Optimal),
        ACS_PLACEMENT_FIXED => Ok(BeamPlacement::Fixed(offset)),
        _ => Err(fail(AcsStatus::InvalidArgument, format!("unknown placement {code}"))),
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next API call on the same thread.
#[no_mangle]
pub extern "C" fn acs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn acs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Look up a built-in species by name (case-insensitive), e.g. "Ca40+".
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_species_builtin(name: *const c_char, out_species: *mut *mut AcsSpecies) -> AcsStatus {
    guard(|| {
        let slot = out(out_species, "out_species")?;
        let s = lib(builtin_species(str_arg(name, "name")?))?;
        *slot = Box::into_raw(Box::new(AcsSpecies(s)));
        Ok(())
    })
}

/// Load a species from a TOML data file. `name` may be NULL when the file
/// holds a single species.
///
/// # Safety
/// `path` must be a valid NUL-terminated string, `name` NULL or valid, and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn acs_species_load(
    path: *const c_char,
    name: *const c_char,
    out_species: *mut *mut AcsSpecies,
) -> AcsStatus {
    guard(|| {
        let slot = out(out_species, "out_species")?;
        let path = str_arg(path, "path")?;
        let name = if name.is_null() { None } else { Some(str_arg(name, "name")?) };
        let all = lib(load_species_file(Path::new(path)))?;
        let chosen = match name {
            Some(n) => all.into_iter().find(|s| s.name.eq_ignore_ascii_case(n)),
            None if all.len() == 1 => all.into_iter().next(),
            None => return Err(fail(AcsStatus::InvalidArgument, "file holds several species; pass a name")),
        };
        let s = chosen.ok_or_else(|| fail(AcsStatus::NotFound, "species not found in file"))?;
        *slot = Box::into_raw(Box::new(AcsSpecies(s)));
        Ok(())
    })
}

/// Switch the species to the ground-state Zeeman qubit.
///
/// # Safety
/// `species` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn acs_species_use_zeeman_qubit(species: *mut AcsSpecies) -> AcsStatus {
    guard(|| {
        let s = out(species, "species")?;
        s.0 = lib(s.0.clone().with_qubit_kind(QubitKind::ZeemanGround))?;
        Ok(())
    })
}

/// # Safety
/// `species` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acs_species_free(species: *mut AcsSpecies) {
    if !species.is_null() {
        drop(Box::from_raw(species));
    }
}

/// Ion mass in kg.
///
/// # Safety
/// `species` must be a live handle and `out_mass` valid.
#[no_mangle]
pub unsafe extern "C" fn acs_species_mass(species: *const AcsSpecies, out_mass: *mut f64) -> AcsStatus {
    guard(|| {
        *out(out_mass, "out_mass")? = handle(species, "species")?.0.mass();
        Ok(())
    })
}

/// Shift per unit intensity (rad/s per W/m^2) of the optical qubit at a
/// vacuum wavelength in m.
///
/// # Safety
/// `species` must be a live handle and `out_psi` valid.
#[no_mangle]
pub unsafe extern "C" fn acs_psi(
    species: *const AcsSpecies,
    wavelength: f64,
    polarization_code: u32,
    mode_code: u32,
    out_psi: *mut f64,
) -> AcsStatus {
    guard(|| {
        let slot = out(out_psi, "out_psi")?;
        let s = handle(species, "species")?;
        let r = lib(psi(&s.0, omega_from_wavelength(wavelength), polarization(polarization_code)?, shift_mode(mode_code)?))?;
        *slot = r.psi;
        Ok(())
    })
}

/// Equilibrium chain of `n_ions` ions at axial frequency `omega_z` (rad/s).
///
/// # Safety
/// `species` must be a live handle and `out_chain` valid.
#[no_mangle]
pub unsafe extern "C" fn acs_chain_new(
    species: *const AcsSpecies,
    omega_z: f64,
    n_ions: usize,
    out_chain: *mut *mut AcsChain,
) -> AcsStatus {
    guard(|| {
        let slot = out(out_chain, "out_chain")?;
        let s = handle(species, "species")?;
        let trap = lib(TrapConfig::new(&s.0, omega_z, n_ions))?;
        let g = lib(equilibrium_positions(&trap))?;
        *slot = Box::into_raw(Box::new(AcsChain(g)));
        Ok(())
    })
}

/// # Safety
/// `chain` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acs_chain_free(chain: *mut AcsChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of ions, or 0 for a NULL handle.
///
/// # Safety
/// `chain` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn acs_chain_len(chain: *const AcsChain) -> usize {
    chain.as_ref().map_or(0, |c| c.0.n_ions())
}

unsafe fn copy_out(values: &[f64], buffer: *mut f64, len: usize) -> Result<(), AcsStatus> {
    if buffer.is_null() {
        return Err(fail(AcsStatus::NullPointer, "buffer is null"));
    }
    if len < values.len() {
        return Err(fail(
            AcsStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buffer, values.len());
    Ok(())
}

/// Copy ion positions (m, ascending) into `buffer`, which must hold at least
/// `acs_chain_len` values.
///
/// # Safety
/// `chain` must be a live handle and `buffer` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn acs_chain_positions(chain: *const AcsChain, buffer: *mut f64, len: usize) -> AcsStatus {
    guard(|| copy_out(&handle(chain, "chain")?.0.positions, buffer, len))
}

/// Copy axial mode frequencies (rad/s, ascending) into `buffer`.
///
/// # Safety
/// `chain` must be a live handle and `buffer` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn acs_chain_mode_frequencies(chain: *const AcsChain, buffer: *mut f64, len: usize) -> AcsStatus {
    guard(|| copy_out(&handle(chain, "chain")?.0.mode_frequencies, buffer, len))
}

/// Copy the participation vector of mode `mode` (one entry per ion).
///
/// # Safety
/// `chain` must be a live handle and `buffer` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn acs_chain_mode_vector(chain: *const AcsChain, mode: usize, buffer: *mut f64, len: usize) -> AcsStatus {
    guard(|| {
        let g = &handle(chain, "chain")?.0;
        let v = g.mode_vectors.get(mode).ok_or_else(|| {
            fail(AcsStatus::InvalidArgument, format!("mode {mode} out of range for {} modes", g.mode_vectors.len()))
        })?;
        copy_out(v, buffer, len)
    })
}

/// Smallest neighbour spacing, m. Fails for a single ion.
///
/// # Safety
/// `chain` must be a live handle and `out_spacing` valid.
#[no_mangle]
pub unsafe extern "C" fn acs_chain_spacing(chain: *const AcsChain, out_spacing: *mut f64) -> AcsStatus {
    guard(|| {
        let slot = out(out_spacing, "out_spacing")?;
        *slot = lib(handle(chain, "chain")?.0.delta_z())?;
        Ok(())
    })
}

/// Geometry factor `kappa` for ion spacing `delta_z` and waist `waist` (m).
///
/// # Safety
/// `out_kappa` must be valid.
#[no_mangle]
pub unsafe extern "C" fn acs_kappa(delta_z: f64, waist: f64, out_kappa: *mut f64) -> AcsStatus {
    guard(|| {
        let slot = out(out_kappa, "out_kappa")?;
        if !(delta_z > 0.0 && waist > 0.0 && delta_z.is_finite() && waist.is_finite()) {
            return Err(fail(AcsStatus::InvalidArgument, "spacing and waist must be positive"));
        }
        *slot = kappa(delta_z, waist);
        Ok(())
    })
}

/// Beam offset maximising the two-ion intensity difference, m.
///
/// # Safety
/// `out_offset` must be valid.
#[no_mangle]
pub unsafe extern "C" fn acs_optimal_offset(delta_z: f64, waist: f64, out_offset: *mut f64) -> AcsStatus {
    guard(|| {
        let slot = out(out_offset, "out_offset")?;
        if !(delta_z > 0.0 && waist > 0.0 && delta_z.is_finite() && waist.is_finite()) {
            return Err(fail(AcsStatus::InvalidArgument, "spacing and waist must be positive"));
        }
        *slot = optimal_offset(delta_z, waist);
        Ok(())
    })
}

/// Beam power giving splitting `target_e` (J) between the closest ion pair.
/// `offset` is used only with `ACS_PLACEMENT_FIXED`.
///
/// # Safety
/// Handles must be live and `out_result` valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn acs_required_power(
    species: *const AcsSpecies,
    chain: *const AcsChain,
    waist: f64,
    wavelength: f64,
    target_e: f64,
    mode_code: u32,
    placement_code: u32,
    offset: f64,
    polarization_code: u32,
    out_result: *mut AcsPowerResult,
) -> AcsStatus {
    guard(|| {
        let slot = out(out_result, "out_result")?;
        let s = handle(species, "species")?;
        let g = handle(chain, "chain")?;
        let sol = lib(required_power(
            &s.0,
            &g.0,
            waist,
            wavelength,
            target_e,
            shift_mode(mode_code)?,
            placement(placement_code, offset)?,
            polarization(polarization_code)?,
        ))?;
        *slot = AcsPowerResult {
            power: sol.power,
            peak_intensity: sol.peak_intensity,
            center_offset: sol.beam.center_offset,
            psi: sol.response.psi,
            kappa: sol.kappa,
            total_scatter: sol.profile.total_scatter,
        };
        Ok(())
    })
}

/// Scattering-optimal wavelength between the fine-structure resonances for
/// a Zeeman qubit (see [`acs_species_use_zeeman_qubit`]).
///
/// # Safety
/// Handles must be live and `out_result` valid.
#[no_mangle]
pub unsafe extern "C" fn acs_zeeman_optimum(
    species: *const AcsSpecies,
    chain: *const AcsChain,
    waist: f64,
    target_e: f64,
    polarization_code: u32,
    placement_code: u32,
    offset: f64,
    out_result: *mut AcsZeemanResult,
) -> AcsStatus {
    guard(|| {
        let slot = out(out_result, "out_result")?;
        let s = handle(species, "species")?;
        let g = handle(chain, "chain")?;
        let z = lib(zeeman_optimum(
            &s.0,
            &g.0,
            waist,
            target_e,
            polarization(polarization_code)?,
            placement(placement_code, offset)?,
        ))?;
        *slot = AcsZeemanResult { wavelength: z.wavelength, power: z.power, total_scatter: z.total_scatter, psi: z.response.psi };
        Ok(())
    })
}
