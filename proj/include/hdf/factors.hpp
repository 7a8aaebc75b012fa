#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hdf {

/// Principal-component factor model of a standardized panel.
/// Scores are orthogonal (scores'scores/T diagonal); eigenvalues are the full
/// spectrum of the sample correlation matrix, non-increasing; the loading sign
/// is fixed so each column's largest-magnitude entry is positive.
struct FactorModel {
    Eigen::MatrixXd scores;       // T x m
    Eigen::MatrixXd loadings;     // K x m
    Eigen::VectorXd eigenvalues;  // min(T, K) values, descending
    int num_factors = 0;
};

/// Top-m principal components of X'X/T. X must be standardized; when K > T
/// the T x T dual problem is solved instead, with identical results.
FactorModel pca(const Eigen::MatrixXd& X_std, int m);

enum class FactorCriterion { Fixed, EigenRatio, Kaiser };

FactorCriterion parse_factor_criterion(const std::string& s);

/// Fixed -> m_fixed; EigenRatio -> argmax_j l_j/l_{j+1} over the top half of
/// the spectrum; Kaiser -> count of eigenvalues above 1.
int choose_num_factors(const Eigen::VectorXd& eigenvalues, FactorCriterion method, int m_fixed = 1);

/// Country-level PCs, then PCs of the stacked country scores. All panels must
/// share the calendar span (equal row counts); panels are standardized
/// internally, as is the stacked score matrix before the second stage.
std::pair<std::vector<FactorModel>, FactorModel> hierarchical_global_factors(
    const std::vector<Eigen::MatrixXd>& country_panels, int m_local, int m_global);

}  // namespace hdf
