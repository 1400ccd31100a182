#ifndef TREECAST_H
#define TREECAST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TC_METHOD_REGRESSION_TREE 0

#define TC_METHOD_BAGGING 1

#define TC_METHOD_RANDOM_FOREST 2

#define TC_TREND_NONE 0

#define TC_TREND_ADDITIVE 1

#define TC_TREND_MULTIPLICATIVE 2

#define TC_TREND_DIFFERENCES 3

typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_ARGUMENT = 2,
  /*
   Malformed model JSON or other input data.
   */
  TC_STATUS_INPUT_ERROR = 3,
  /*
   Fitting or forecasting failed.
   */
  TC_STATUS_MODEL_ERROR = 4,
  TC_STATUS_PANIC = 5,
} TcStatus;

/*
 Opaque fitted model.
 */
typedef struct TcModel TcModel;

/*
 Model settings. Zero in a numeric field selects the library default;
 `lags` may be null to select lags automatically.
 */
typedef struct TcModelOptions {
  uint32_t method;
  uint32_t trend;
  bool transform_features;
  const size_t *lags;
  size_t n_lags;
  uint64_t seed;
  size_t n_trees;
  size_t mtry;
  size_t min_split;
  /*
   Differencing order for `TC_TREND_DIFFERENCES`; negative estimates it.
   */
  int32_t n_diff;
} TcModelOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Default options: regression tree, additive trend on features and
 targets, automatic lags, seed 0.
 */
struct TcModelOptions tc_model_options_default(void);

/*
 Fits a model to `n` observations with the given seasonal frequency.
 `options` may be null for the defaults.

 # Safety
 `values` must point to `n` readable doubles, `options` must be null or
 valid, and `out` must be a valid location for the handle.
 */
enum TcStatus tc_model_create(const double *values,
                              size_t n,
                              size_t frequency,
                              const struct TcModelOptions *options,
                              struct TcModel **out);

/*
 Writes `h` forecasts into `out_values`.

 # Safety
 `model` must be a live handle and `out_values` must have room for `h` doubles.
 */
enum TcStatus tc_model_forecast(const struct TcModel *model, size_t h, double *out_values);

/*
 Multi-line model summary; free it with `tc_string_free`.

 # Safety
 `model` must be a live handle and `out` a valid location.
 */
enum TcStatus tc_model_describe(const struct TcModel *model, char **out);

/*
 Serializes a model to JSON; free the string with `tc_string_free`.

 # Safety
 `model` must be a live handle and `out` a valid location.
 */
enum TcStatus tc_model_to_json(const struct TcModel *model, char **out);

/*
 Restores a model saved with `tc_model_to_json` or the command-line tool.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid location.
 */
enum TcStatus tc_model_from_json(const char *json, struct TcModel **out);

/*
 Releases a model; null is ignored.

 # Safety
 `model` must be null or a handle not yet freed.
 */
void tc_model_free(struct TcModel *model);

/*
 Releases a string returned by this library; null is ignored.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void tc_string_free(char *s);

/*
 Mean absolute scaled error of `forecast` against `actuals`, scaled by the
 in-sample seasonal naive error of `train`.

 # Safety
 `train` must hold `n_train` doubles, `actuals` and `forecast` `h` doubles
 each, and `out` must be valid.
 */
enum TcStatus tc_mase(const double *train,
                      size_t n_train,
                      size_t frequency,
                      const double *actuals,
                      const double *forecast,
                      size_t h,
                      double *out);

/*
 Message for the last failed call on this thread, or an empty string.
 The pointer stays valid until the next call into this library on the
 same thread.
 */
const char *tc_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TREECAST_H */
