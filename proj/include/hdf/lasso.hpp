#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hdf/regress.hpp"

namespace hdf {

/// sign(z) * max(|z| - gamma, 0).
double soft_threshold(double z, double gamma);

/// Solution of the l1-penalized least-squares problem
///   (1/2T) sum_t (y_t - c - x_t'beta)^2 + lambda * ||beta||_1.
/// beta_std lives on the scale of the matrix handed to the solver; beta_raw
/// is mapped back to the caller's natural units when a standardization was
/// involved (identical to beta_std otherwise). Predictions are
/// intercept + x_raw . beta_raw.
struct LassoFit {
    double intercept = 0.0;
    Eigen::VectorXd beta_std;
    Eigen::VectorXd beta_raw;
    std::vector<int> support;  // indices with beta != 0
    double lambda = 0.0;
    double objective = 0.0;
    int sweeps = 0;
};

struct LassoOptions {
    double tol = 1e-8;     // max coefficient change per sweep
    int max_sweeps = 10000;
};

/// Cyclic coordinate descent on a standardized design (columns mean 0,
/// x'x/T = 1; flagged constant columns are skipped). Coordinates are visited
/// in column order for determinism. Throws on non-finite input and on
/// non-convergence, reporting the sweep count.
LassoFit lasso_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_std, double lambda,
                   const LassoOptions& opts = {});

/// Standardizes internally and reports coefficients in natural units.
LassoFit lasso_fit_raw(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double lambda,
                       const LassoOptions& opts = {});

/// Smallest lambda with an all-zero solution: max_j |x_j'y| / T on a
/// standardized design.
double lambda_max(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_std);

/// Descending fits along `lambdas` with warm starts.
std::vector<LassoFit> lasso_path(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_std,
                                 const std::vector<double>& lambdas, const LassoOptions& opts = {});

/// Strictly decreasing geometric grid from lambda_max down to
/// ratio * lambda_max.
std::vector<double> lambda_grid(double lmax, int size, double ratio);

struct CvParams {
    int folds = 10;
    int grid_size = 100;
    double grid_ratio = 1e-3;
};

/// Cross-validation record: the grid, each fold's MSE curve and minimizer,
/// and the final penalty (arithmetic mean of the fold minimizers).
struct CvResult {
    std::vector<double> grid;                       // descending
    std::vector<std::vector<double>> fold_mse;      // folds x grid
    std::vector<double> fold_lambda;                // per-fold minimizer
    std::vector<std::pair<int, int>> fold_ranges;   // [begin, end) row index per fold
    double lambda = 0.0;                            // mean of fold_lambda

    std::string to_json() const;
};

/// Contiguous, ordered, gap-free blocks covering [0, T); the first T mod M
/// blocks get one extra row.
std::vector<std::pair<int, int>> cv_blocks(int T, int M);

/// Picks each fold's minimizing grid point (ties resolved toward the larger
/// lambda, i.e. the earlier grid entry) and averages them.
CvResult assemble_cv(const std::vector<double>& grid, std::vector<std::vector<double>> fold_mse,
                     std::vector<std::pair<int, int>> fold_ranges);

/// Blocked time-series cross-validation: time order kept within contiguous
/// folds, no gaps; each fold is scored on a path fit to the remaining folds;
/// the returned penalty is the mean of the per-fold minimizers. Inputs are in
/// natural units; each training set is standardized in-sample.
CvResult cv_lambda(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const CvParams& params = {},
                   unsigned jobs = 1);

/// Lasso with unpenalized pre-selected regressors Z (intercept column
/// included by the caller). Stage 1 projects Z out of y and X and
/// restandardizes the projected X; stage 2 runs the Lasso; the Z coefficients
/// are then recovered as (Z'Z)^{-1} Z'(y - X beta). The fit's beta_raw is on
/// X's natural scale and its intercept is 0: predictions are
/// z'delta + x'beta_raw.
std::pair<Eigen::VectorXd, LassoFit> partialled_lasso(const Eigen::VectorXd& y, const Eigen::MatrixXd& Z,
                                                      const Eigen::MatrixXd& X, double lambda,
                                                      const LassoOptions& opts = {});

}  // namespace hdf
