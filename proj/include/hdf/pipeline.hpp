#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hdf/frame.hpp"
#include "hdf/lasso.hpp"
#include "hdf/ocmt.hpp"
#include "hdf/transform.hpp"

namespace hdf {

enum class MethodTag { AR2, ARX, Lasso, Ar2Lasso, ArxLasso, Ar2Ocmt, ArxOcmt };

MethodTag parse_method_tag(const std::string& s);
std::string method_tag_name(MethodTag tag);
bool method_uses_lasso(MethodTag tag);
bool method_uses_ocmt(MethodTag tag);

/// One forecasting model: a tag, its pre-selected (never penalized, never
/// tested) active-set columns, and tuning parameters for the selection stage.
struct MethodSpec {
    MethodTag tag = MethodTag::AR2;
    std::string name;                           // display name; defaults from the tag
    std::vector<std::string> preselected;       // active-set column names; empty for plain Lasso
    OcmtConfig ocmt;
    CvParams cv;

    std::string display_name() const { return name.empty() ? method_tag_name(tag) : name; }
};

struct ForecastRecord {
    std::string method;
    int horizon = 0;
    Quarter window_end{};
    Quarter target{};           // window_end + horizon
    double forecast = 0.0;
    bool has_forecast = false;
    double realization = 0.0;
    bool has_realization = false;
    std::string error;          // nonempty when the cell failed
};

/// Per-cell selection audit entry; OCMT cells carry t-ratios and the critical
/// value, Lasso cells the CV penalty and coefficients.
struct SelectionLogEntry {
    std::string method;
    int horizon = 0;
    Quarter window_end{};
    bool is_ocmt = false;
    SelectionResult ocmt;                                  // when is_ocmt
    double lambda = 0.0;                                   // when !is_ocmt
    std::vector<std::pair<std::string, double>> selected;  // name -> coef, for lasso
    std::vector<std::string> preselected;

    std::string to_json() const;
};

/// Regression sample for one (horizon, window) cell: rows are quarters t with
/// t + h <= end and every requested column observed; y holds the target at
/// t + h, Z and X the time-t values.
struct DirectDataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd Z;                  // no intercept column
    Eigen::MatrixXd X;
    std::vector<std::string> z_names;
    std::vector<std::string> x_names;
    Quarter first_t{};                  // calendar quarter of row 0
    int rows = 0;
};

DirectDataset build_direct_dataset(const SeriesFrame& frame, const std::string& target, int h,
                                   const std::vector<std::string>& z_names, const ActiveSet& active,
                                   Quarter end, Quarter sample_start);

/// Time-t regressor values for the named active-set columns.
Eigen::VectorXd active_row(const ActiveSet& active, const std::vector<std::string>& names, Quarter t);

struct RecursiveResult {
    std::vector<ForecastRecord> records;       // canonical order: method, horizon, window
    std::vector<SelectionLogEntry> logs;
    std::vector<std::string> errors;           // one line per failed cell
};

/// Expanding-window direct forecasting. For each horizon h the selection /
/// estimation windows start at `sample_start` and end at eval_start - h,
/// eval_start - h + 1, ..., eval_end; each window yields a forecast for
/// window_end + h. Targets beyond the frame are emitted without realizations
/// and are excluded from RMSFE.
RecursiveResult run_recursive(const SeriesFrame& frame, const std::string& target,
                              const std::vector<std::string>& active_names,
                              const std::vector<MethodSpec>& methods, const std::vector<int>& horizons,
                              Quarter eval_start, Quarter eval_end, Quarter sample_start, unsigned jobs = 1);

/// Root mean square forecast error over records that carry realizations.
double rmsfe(const std::vector<ForecastRecord>& records);

struct EvalCell {
    double rmsfe = 0.0;
    int realized = 0;       // records entering the RMSFE
    int forecasts = 0;      // all emitted forecasts, including unrealized tails
};

/// RMSFE per (method, horizon) over realized targets inside [eval_start, eval_end].
std::map<std::pair<std::string, int>, EvalCell> evaluate_records(const std::vector<ForecastRecord>& records,
                                                                 Quarter eval_start, Quarter eval_end);

/// Count of windows in which each variable was selected, per (method, horizon).
std::map<std::pair<std::string, int>, std::map<std::string, int>> selection_frequency(
    const std::vector<SelectionLogEntry>& logs);

void write_forecasts_csv(const std::vector<ForecastRecord>& records, const std::string& path,
                         const std::string& comment);
std::vector<ForecastRecord> read_forecasts_csv(const std::string& path);
void write_selection_log(const std::vector<SelectionLogEntry>& logs, const std::string& path,
                         const std::string& config_hash, std::uint64_t seed);
void write_eval_report(const std::map<std::pair<std::string, int>, EvalCell>& cells,
                       const std::vector<int>& horizons, const std::string& path, const std::string& comment);

}  // namespace hdf
