#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hdf {

/// Per-column location/scale used to map between natural and standardized
/// units. Scale is the root mean square deviation with divisor T. Columns
/// with zero deviation are flagged constant and left unscaled.
struct Standardization {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;            // 0 for constant columns
    std::vector<bool> constant;

    bool any_constant() const {
        for (bool c : constant)
            if (c) return true;
        return false;
    }
};

/// Centers each column and divides by its RMS deviation so that retained
/// columns have mean 0 and x'x/T = 1. Constant columns are centered (to zero)
/// and flagged; an all-constant matrix is a degenerate-input error.
std::pair<Eigen::MatrixXd, Standardization> standardize(const Eigen::MatrixXd& X);

/// Least-squares fit of y on [1, X].
struct OlsFit {
    Eigen::VectorXd coef;        // [intercept, slopes...]
    Eigen::VectorXd se;
    Eigen::VectorXd tstat;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    double sigma2 = 0.0;         // RSS / (T - ncoef)
    double r2 = 0.0;
    int T = 0;
    int n_regressors = 0;        // excluding intercept
    int hac_lags = 0;

    /// Point prediction from a regressor vector (intercept excluded).
    double predict(const Eigen::VectorXd& x) const;
};

/// OLS with intercept, solved by QR of the design matrix. Rank deficiency
/// (smallest singular value below 1e-10 of the largest) raises an error
/// naming the offending columns. t-ratios use the classical variance when
/// hac_lags == 0 and Newey-West with Bartlett weights otherwise.
OlsFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int hac_lags = 0,
           const std::vector<std::string>& names = {});

/// M_Z * A = A - Z (Z'Z)^{-1} Z' A. Empty Z returns A unchanged; Z must be
/// full column rank.
Eigen::MatrixXd residualize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Z);
Eigen::VectorXd residualize(const Eigen::VectorXd& a, const Eigen::MatrixXd& Z);

/// Horizontal concatenation helper used to assemble designs.
Eigen::MatrixXd hcat(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace hdf
