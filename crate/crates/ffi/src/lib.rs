//! C interface to treecast.
//!
//! Models are opaque `TcModel` handles created by `tc_model_create` or
//! `tc_model_from_json` and released with `tc_model_free`. Every fallible
//! function returns a `TcStatus`; on failure `tc_last_error_message` describes
//! the most recent error on the calling thread. Strings returned through
//! out-parameters are owned by the caller and must be freed with
//! `tc_string_free`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;
use treecast::autopilot::{create_model, describe_model, forecast, ForecastModel, Method, ModelOptions, TrendPolicy};
use treecast::cart::TreeParams;
use treecast::io::{model_from_json, model_to_json};
use treecast::{mase, Error, LagSet, TimeSeries};

pub const TC_METHOD_REGRESSION_TREE: u32 = 0;
pub const TC_METHOD_BAGGING: u32 = 1;
pub const TC_METHOD_RANDOM_FOREST: u32 = 2;

pub const TC_TREND_NONE: u32 = 0;
pub const TC_TREND_ADDITIVE: u32 = 1;
pub const TC_TREND_MULTIPLICATIVE: u32 = 2;
pub const TC_TREND_DIFFERENCES: u32 = 3;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed model JSON or other input data.
    InputError = 3,
    /// Fitting or forecasting failed.
    ModelError = 4,
    Panic = 5,
}

/// Model settings. Zero in a numeric field selects the library default;
/// `lags` may be null to select lags automatically.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TcModelOptions {
    pub method: u32,
    pub trend: u32,
    pub transform_features: bool,
    pub lags: *const usize,
    pub n_lags: usize,
    pub seed: u64,
    pub n_trees: usize,
    pub mtry: usize,
    pub min_split: usize,
    /// Differencing order for `TC_TREND_DIFFERENCES`; negative estimates it.
    pub n_diff: i32,
}

/// Opaque fitted model.
pub struct TcModel {
    inner: ForecastModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: TcStatus, message: &str) -> TcStatus {
    set_error(message);
    status
}

fn from_error(e: Error) -> TcStatus {
    let status = if e.is_input_error() {
        TcStatus::InputError
    } else {
        TcStatus::ModelError
    };
    fail(status, &e.to_string())
}

fn guard(f: impl FnOnce() -> TcStatus) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == TcStatus::Ok {
                set_error("");
            }
            status
        }
        Err(_) => fail(TcStatus::Panic, "internal panic"),
    }
}

fn write_string(out: *mut *mut c_char, s: String) -> TcStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null before calling.
            unsafe { *out = c.into_raw() };
            TcStatus::Ok
        }
        Err(_) => fail(TcStatus::ModelError, "string contains a NUL byte"),
    }
}

/// Default options: regression tree, additive trend on features and
/// targets, automatic lags, seed 0.
#[no_mangle]
pub extern "C" fn tc_model_options_default() -> TcModelOptions {
    TcModelOptions {
        method: TC_METHOD_REGRESSION_TREE,
        trend: TC_TREND_ADDITIVE,
        transform_features: true,
        lags: ptr::null(),
        n_lags: 0,
        seed: 0,
        n_trees: 0,
        mtry: 0,
        min_split: 0,
        n_diff: -1,
    }
}

unsafe fn convert_options(o: &TcModelOptions) -> Result<(Method, ModelOptions), String> {
    let method = match o.method {
        TC_METHOD_REGRESSION_TREE => Method::RegressionTree,
        TC_METHOD_BAGGING => Method::Bagging,
        TC_METHOD_RANDOM_FOREST => Method::RandomForest,
        other => return Err(format!("unknown method {other}")),
    };
    let tf = o.transform_features;
    let trend = match o.trend {
        TC_TREND_NONE => TrendPolicy::None,
        TC_TREND_ADDITIVE => TrendPolicy::Additive { transform_features: tf },
        TC_TREND_MULTIPLICATIVE => TrendPolicy::Multiplicative { transform_features: tf },
        TC_TREND_DIFFERENCES => TrendPolicy::Differences {
            n_diff: usize::try_from(o.n_diff).ok(),
        },
        other => return Err(format!("unknown trend {other}")),
    };
    let lags = if o.lags.is_null() {
        None
    } else {
        // SAFETY: the caller promises `n_lags` readable elements at `lags`.
        let slice = std::slice::from_raw_parts(o.lags, o.n_lags);
        Some(LagSet::new(slice.to_vec()).map_err(|e| e.to_string())?)
    };
    let tree_params = (o.min_split > 0).then(|| {
        let base = if method == Method::RegressionTree {
            TreeParams::default()
        } else {
            TreeParams::deep()
        };
        TreeParams {
            cp: base.cp,
            max_depth: base.max_depth,
            ..TreeParams::with_min_split(o.min_split)
        }
    });
    let options = ModelOptions {
        lags,
        trend,
        tree_params,
        n_trees: (o.n_trees > 0).then_some(o.n_trees),
        mtry: (o.mtry > 0).then_some(o.mtry),
        seed: o.seed,
    };
    Ok((method, options))
}

/// Fits a model to `n` observations with the given seasonal frequency.
/// `options` may be null for the defaults.
///
/// # Safety
/// `values` must point to `n` readable doubles, `options` must be null or
/// valid, and `out` must be a valid location for the handle.
#[no_mangle]
pub unsafe extern "C" fn tc_model_create(
    values: *const f64,
    n: usize,
    frequency: usize,
    options: *const TcModelOptions,
    out: *mut *mut TcModel,
) -> TcStatus {
    guard(|| {
        if values.is_null() || out.is_null() {
            return fail(TcStatus::NullPointer, "null argument");
        }
        let opts = if options.is_null() {
            tc_model_options_default()
        } else {
            *options
        };
        let (method, model_options) = match convert_options(&opts) {
            Ok(v) => v,
            Err(msg) => return fail(TcStatus::InvalidArgument, &msg),
        };
        let data = std::slice::from_raw_parts(values, n).to_vec();
        let series = match TimeSeries::with_frequency(data, frequency) {
            Ok(s) => s,
            Err(e) => return fail(TcStatus::InvalidArgument, &e.to_string()),
        };
        match create_model(&series, method, &model_options) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(TcModel { inner }));
                TcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Writes `h` forecasts into `out_values`.
///
/// # Safety
/// `model` must be a live handle and `out_values` must have room for `h` doubles.
#[no_mangle]
pub unsafe extern "C" fn tc_model_forecast(model: *const TcModel, h: usize, out_values: *mut f64) -> TcStatus {
    guard(|| {
        if model.is_null() || out_values.is_null() {
            return fail(TcStatus::NullPointer, "null argument");
        }
        match forecast(&(*model).inner, h) {
            Ok(f) => {
                ptr::copy_nonoverlapping(f.values.as_ptr(), out_values, h);
                TcStatus::Ok
            }
            Err(e @ Error::InvalidParams(_)) => fail(TcStatus::InvalidArgument, &e.to_string()),
            Err(e) => from_error(e),
        }
    })
}

/// Multi-line model summary; free it with `tc_string_free`.
///
/// # Safety
/// `model` must be a live handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn tc_model_describe(model: *const TcModel, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(TcStatus::NullPointer, "null argument");
        }
        write_string(out, describe_model(&(*model).inner))
    })
}

/// Serializes a model to JSON; free the string with `tc_string_free`.
///
/// # Safety
/// `model` must be a live handle and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn tc_model_to_json(model: *const TcModel, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(TcStatus::NullPointer, "null argument");
        }
        write_string(out, model_to_json(&(*model).inner))
    })
}

/// Restores a model saved with `tc_model_to_json` or the command-line tool.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid location.
#[no_mangle]
pub unsafe extern "C" fn tc_model_from_json(json: *const c_char, out: *mut *mut TcModel) -> TcStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(TcStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(json).to_str() else {
            return fail(TcStatus::InputError, "model JSON is not UTF-8");
        };
        match model_from_json(text) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(TcModel { inner }));
                TcStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a model; null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_model_free(model: *mut TcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Mean absolute scaled error of `forecast` against `actuals`, scaled by the
/// in-sample seasonal naive error of `train`.
///
/// # Safety
/// `train` must hold `n_train` doubles, `actuals` and `forecast` `h` doubles
/// each, and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn tc_mase(
    train: *const f64,
    n_train: usize,
    frequency: usize,
    actuals: *const f64,
    forecast: *const f64,
    h: usize,
    out: *mut f64,
) -> TcStatus {
    guard(|| {
        if train.is_null() || actuals.is_null() || forecast.is_null() || out.is_null() {
            return fail(TcStatus::NullPointer, "null argument");
        }
        let series = match TimeSeries::with_frequency(std::slice::from_raw_parts(train, n_train).to_vec(), frequency) {
            Ok(s) => s,
            Err(e) => return fail(TcStatus::InvalidArgument, &e.to_string()),
        };
        let actuals = std::slice::from_raw_parts(actuals, h);
        let forecast = std::slice::from_raw_parts(forecast, h);
        match mase(&series, actuals, forecast) {
            Ok(v) => {
                *out = v;
                TcStatus::Ok
            }
            Err(e) => fail(TcStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn tc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn options_convert() {
        let lags = [1usize, 2, 3];
        let o = TcModelOptions {
            lags: lags.as_ptr(),
            n_lags: 3,
            trend: TC_TREND_NONE,
            ..tc_model_options_default()
        };
        let (method, opts) = unsafe { convert_options(&o) }.unwrap();
        assert_eq!(method, Method::RegressionTree);
        assert_eq!(opts.trend, TrendPolicy::None);
        assert_eq!(opts.lags.unwrap().as_slice(), &[1, 2, 3]);
        let bad = TcModelOptions {
            method: 9,
            ..tc_model_options_default()
        };
        assert!(unsafe { convert_options(&bad) }.is_err());
    }
}
