#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hdf/frame.hpp"

namespace hdf {

/// Four-quarter log rate of change in per cent per annum:
/// 100*(ln p_t - ln p_{t-4}). The first four entries become missing.
Series rate4(const Series& p);

/// Four-quarter average: mean of x_t..x_{t-3}.
Series avg4(const Series& x);

/// Four-quarter change x_t - x_{t-4}.
Series change4(const Series& x);

/// First difference x_t - x_{t-1}.
Series diff1(const Series& x);

/// Natural log, elementwise; input must be positive where observed.
Series log_series(const Series& x);

/// Deviation from a trailing moving average: x_t - P^{-1} sum_{p=1..P} x_{t-p}.
Series gap(const Series& x, int P);

/// Weighted cross-section aggregate: sum_j w_j * series_j, pointwise.
/// Weights must be nonnegative and sum to 1 within 1e-10; series must share
/// the calendar grid.
Series star(const std::vector<Series>& values, const std::vector<double>& weights);

enum class TransformKind { Rate4, Avg4, Change4, Diff1, Gap, Star, Log };

TransformKind parse_transform_kind(const std::string& s);
std::string transform_kind_name(TransformKind k);

/// One step of a transform recipe. `sources`/`weights` are used by Star,
/// `P` by Gap; everything else reads `sources[0]`.
struct TransformSpec {
    TransformKind kind = TransformKind::Diff1;
    std::vector<std::string> sources;
    std::string output;
    int P = 0;
    std::vector<double> weights;

    void validate() const;
};

/// Applies each spec in order, adding (or replacing) the output column.
/// Later specs may consume earlier outputs.
SeriesFrame apply_recipe(const SeriesFrame& frame, const std::vector<TransformSpec>& recipe);

/// Ordered covariate matrix: for the j-th level name, column 2j is the level
/// and column 2j+1 its first difference named "D" + level name.
struct ActiveSet {
    Quarter start;
    std::vector<std::string> names;  // 2 * levels.size()
    Eigen::MatrixXd values;          // length x names.size(), NaN warm-up heads

    int length() const { return static_cast<int>(values.rows()); }
    int k() const { return static_cast<int>(values.cols()); }
    int column_index(const std::string& name) const;  // -1 if absent
    /// First row index at which every column is observed.
    int first_balanced_row() const;
};

ActiveSet build_active_set(const SeriesFrame& levels, const std::vector<std::string>& names);

}  // namespace hdf
