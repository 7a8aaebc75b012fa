#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hdf/frame.hpp"
#include "hdf/regress.hpp"

namespace hdf {

/// Inverse standard normal CDF, accurate to better than 1e-9 (rational
/// initial guess polished by Newton steps on erfc).
double inverse_normal_cdf(double p);

/// Multiple-testing critical value  c_p(K, delta) = Phi^{-1}(1 - p / (2 K^delta)).
double critical_value(double p, int K, double delta);

struct OcmtConfig {
    double p = 0.05;       // nominal size
    double delta = 1.0;    // testing exponent, conventionally in [1, 1.5]
    int num_pcs = 1;       // principal components used as selection-stage controls; 0 = plain OCMT
    int hac_lags = 0;      // 0 = classical t-ratios
};

struct CandidateStat {
    std::string name;
    double t = 0.0;
    bool selected = false;
    bool skipped = false;   // collinear with the controls, never selected
};

/// Outcome of one selection pass over an active set.
struct SelectionResult {
    std::string method;
    std::vector<std::string> preselected;
    std::vector<std::string> selected;       // ordered by |t| descending
    std::vector<CandidateStat> stats;        // in candidate order
    double critical_value = 0.0;
    double delta = 0.0;
    Quarter window_end{};
    int horizon = 0;

    std::string to_json() const;
};

/// One-covariate-at-a-time multiple testing with factor filtering. For each
/// candidate x_j, y is regressed on [1, Z, PCs, x_j] and x_j's t-ratio is
/// compared to critical_value(p, K, delta) with K the number of candidates.
/// The PCs come from the standardized candidate matrix and act only as
/// selection-stage controls. Candidates that are collinear with the controls
/// (residual variance below 1e-12 after projection) are skipped.
SelectionResult gocmt_select(const Eigen::VectorXd& y, const Eigen::MatrixXd& Z, const Eigen::MatrixXd& X,
                             const std::vector<std::string>& x_names, const OcmtConfig& cfg);

/// Second-step multivariate regression of y on [1, Z, X_selected]; this fit
/// produces the forecasts.
OlsFit final_regression(const Eigen::VectorXd& y, const Eigen::MatrixXd& Z, const Eigen::MatrixXd& X_sel,
                        int hac_lags = 0, const std::vector<std::string>& names = {});

}  // namespace hdf
