#include "hdf/factors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hdf/regress.hpp"

namespace hdf {

namespace {

void fix_signs(Eigen::MatrixXd& loadings, Eigen::MatrixXd& scores) {
    for (Eigen::Index c = 0; c < loadings.cols(); ++c) {
        Eigen::Index imax = 0;
        loadings.col(c).cwiseAbs().maxCoeff(&imax);
        if (loadings(imax, c) < 0.0) {
            loadings.col(c) = -loadings.col(c);
            scores.col(c) = -scores.col(c);
        }
    }
}

}  // namespace

FactorModel pca(const Eigen::MatrixXd& X_std, int m) {
    const Eigen::Index T = X_std.rows(), K = X_std.cols();
    if (T < 1 || K < 1) throw std::invalid_argument("pca: empty matrix");
    const Eigen::Index n = std::min(T, K);
    if (m < 1 || m > n)
        throw std::invalid_argument("pca: m=" + std::to_string(m) + " outside 1..min(T,K)=" + std::to_string(n));
    if (!X_std.allFinite()) throw std::domain_error("pca: non-finite input");

    FactorModel model;
    model.num_factors = m;
    model.eigenvalues.resize(n);

    if (K <= T) {
        Eigen::MatrixXd C = X_std.transpose() * X_std / static_cast<double>(T);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
        if (es.info() != Eigen::Success) throw std::runtime_error("pca: eigendecomposition failed");
        // Eigen returns ascending order; flip.
        for (Eigen::Index i = 0; i < n; ++i) model.eigenvalues(i) = std::max(0.0, es.eigenvalues()(n - 1 - i));
        model.loadings.resize(K, m);
        for (int c = 0; c < m; ++c) model.loadings.col(c) = es.eigenvectors().col(K - 1 - c);
        model.scores = X_std * model.loadings;
    } else {
        // Dual: eigenvectors u of XX'/T give loadings X'u / sqrt(T*l).
        Eigen::MatrixXd D = X_std * X_std.transpose() / static_cast<double>(T);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
        if (es.info() != Eigen::Success) throw std::runtime_error("pca: eigendecomposition failed");
        for (Eigen::Index i = 0; i < n; ++i) model.eigenvalues(i) = std::max(0.0, es.eigenvalues()(n - 1 - i));
        model.loadings.resize(K, m);
        for (int c = 0; c < m; ++c) {
            const double l = model.eigenvalues(c);
            if (l <= 0.0)
                throw std::runtime_error("pca: requested component " + std::to_string(c + 1) +
                                         " has zero eigenvalue");
            model.loadings.col(c) = X_std.transpose() * es.eigenvectors().col(T - 1 - c) /
                                    std::sqrt(l * static_cast<double>(T));
        }
        model.scores = X_std * model.loadings;
    }
    fix_signs(model.loadings, model.scores);
    return model;
}

FactorCriterion parse_factor_criterion(const std::string& s) {
    if (s == "fixed") return FactorCriterion::Fixed;
    if (s == "eigen_ratio") return FactorCriterion::EigenRatio;
    if (s == "kaiser") return FactorCriterion::Kaiser;
    throw std::invalid_argument("unknown factor criterion '" + s + "'");
}

int choose_num_factors(const Eigen::VectorXd& eigenvalues, FactorCriterion method, int m_fixed) {
    const Eigen::Index n = eigenvalues.size();
    if (n < 1) throw std::invalid_argument("choose_num_factors: no eigenvalues");
    switch (method) {
        case FactorCriterion::Fixed:
            if (m_fixed < 1) throw std::invalid_argument("choose_num_factors: fixed m must be >= 1");
            return m_fixed;
        case FactorCriterion::Kaiser: {
            int count = 0;
            for (Eigen::Index i = 0; i < n; ++i)
                if (eigenvalues(i) > 1.0) ++count;
            return std::max(count, 1);
        }
        case FactorCriterion::EigenRatio: {
            // Search the top half of the spectrum; a zero successor means the
            // data is exactly that rank.
            const Eigen::Index jmax = std::max<Eigen::Index>(1, n / 2);
            int best = 1;
            double best_ratio = -1.0;
            for (Eigen::Index j = 1; j <= jmax && j < n; ++j) {
                const double denom = eigenvalues(j);
                const double ratio = denom > 0.0 ? eigenvalues(j - 1) / denom
                                                 : std::numeric_limits<double>::infinity();
                if (ratio > best_ratio) {
                    best_ratio = ratio;
                    best = static_cast<int>(j);
                }
            }
            return best;
        }
    }
    throw std::logic_error("unreachable");
}

std::pair<std::vector<FactorModel>, FactorModel> hierarchical_global_factors(
    const std::vector<Eigen::MatrixXd>& country_panels, int m_local, int m_global) {
    if (country_panels.empty()) throw std::invalid_argument("hierarchical_global_factors: no panels");
    const Eigen::Index T = country_panels.front().rows();
    for (const auto& panel : country_panels)
        if (panel.rows() != T)
            throw std::invalid_argument("hierarchical_global_factors: panels do not share the calendar span");

    std::vector<FactorModel> locals;
    locals.reserve(country_panels.size());
    Eigen::MatrixXd stacked(T, static_cast<Eigen::Index>(country_panels.size()) * m_local);
    for (std::size_t i = 0; i < country_panels.size(); ++i) {
        auto [Xs, st] = standardize(country_panels[i]);
        locals.push_back(pca(Xs, m_local));
        stacked.middleCols(static_cast<Eigen::Index>(i) * m_local, m_local) = locals.back().scores;
    }
    auto [Ss, st2] = standardize(stacked);
    FactorModel global = pca(Ss, m_global);
    return {std::move(locals), std::move(global)};
}

}  // namespace hdf
