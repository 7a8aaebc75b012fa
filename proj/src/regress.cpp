#include "hdf/regress.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hdf {

namespace {

constexpr double kRankTol = 1e-10;  // relative singular-value cutoff

std::string column_label(int j, const std::vector<std::string>& names) {
    // j indexes the design including the leading intercept column.
    if (j == 0) return "intercept";
    int k = j - 1;
    if (k < static_cast<int>(names.size())) return names[static_cast<std::size_t>(k)];
    return "column " + std::to_string(k);
}

}  // namespace

std::pair<Eigen::MatrixXd, Standardization> standardize(const Eigen::MatrixXd& X) {
    const Eigen::Index T = X.rows(), K = X.cols();
    if (T < 1 || K < 1) throw std::invalid_argument("standardize: empty matrix");
    Standardization s;
    s.mean.resize(K);
    s.scale.resize(K);
    s.constant.assign(static_cast<std::size_t>(K), false);
    Eigen::MatrixXd out(T, K);
    int n_constant = 0;
    for (Eigen::Index j = 0; j < K; ++j) {
        double m = X.col(j).mean();
        Eigen::VectorXd centered = X.col(j).array() - m;
        double scale = std::sqrt(centered.squaredNorm() / static_cast<double>(T));
        s.mean(j) = m;
        if (scale <= 0.0 || !std::isfinite(scale)) {
            s.scale(j) = 0.0;
            s.constant[static_cast<std::size_t>(j)] = true;
            ++n_constant;
            out.col(j).setZero();
        } else {
            s.scale(j) = scale;
            out.col(j) = centered / scale;
        }
    }
    if (n_constant == K) throw std::runtime_error("standardize: every column is constant");
    return {std::move(out), std::move(s)};
}

double OlsFit::predict(const Eigen::VectorXd& x) const {
    if (x.size() != n_regressors)
        throw std::invalid_argument("OlsFit::predict: expected " + std::to_string(n_regressors) +
                                    " regressors, got " + std::to_string(x.size()));
    return coef(0) + coef.tail(n_regressors).dot(x);
}

OlsFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, int hac_lags,
           const std::vector<std::string>& names) {
    const Eigen::Index T = y.size();
    const Eigen::Index k = X.cols() + 1;  // with intercept
    if (X.rows() != 0 && X.rows() != T) throw std::invalid_argument("ols: y and X row counts differ");
    if (T <= k) throw std::invalid_argument("ols: T=" + std::to_string(T) + " too small for " + std::to_string(k) + " coefficients");
    if (!y.allFinite() || !X.allFinite()) throw std::domain_error("ols: non-finite input");
    if (hac_lags < 0) throw std::invalid_argument("ols: hac_lags must be >= 0");

    Eigen::MatrixXd D(T, k);
    D.col(0).setOnes();
    if (X.cols() > 0) D.rightCols(X.cols()) = X;

    // Rank check on the design; offending columns identified by QR pivots.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(D);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < kRankTol * sv(0)) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pqr(D);
        pqr.setThreshold(kRankTol);
        Eigen::Index rank = pqr.rank();
        std::string offenders;
        const auto& perm = pqr.colsPermutation().indices();
        for (Eigen::Index i = rank; i < k; ++i) {
            if (!offenders.empty()) offenders += ", ";
            offenders += column_label(static_cast<int>(perm(i)), names);
        }
        throw std::runtime_error("ols: collinear design (rank " + std::to_string(rank) + " of " +
                                 std::to_string(k) + "); offending: " + (offenders.empty() ? "?" : offenders));
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(D);
    OlsFit fit;
    fit.coef = qr.solve(y);
    fit.fitted = D * fit.coef;
    fit.residuals = y - fit.fitted;
    fit.T = static_cast<int>(T);
    fit.n_regressors = static_cast<int>(X.cols());
    fit.hac_lags = hac_lags;

    const double rss = fit.residuals.squaredNorm();
    fit.sigma2 = rss / static_cast<double>(T - k);
    const double tss = (y.array() - y.mean()).square().sum();
    fit.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;

    // (D'D)^{-1} = R^{-1} R^{-T} from the QR factor.
    Eigen::MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd DtDinv = Rinv * Rinv.transpose();

    Eigen::MatrixXd V;
    if (hac_lags == 0) {
        V = fit.sigma2 * DtDinv;
    } else {
        // Newey-West: S = sum_t g_t g_t' + sum_l w_l sum_t (g_t g_{t-l}' + g_{t-l} g_t')
        // with g_t = d_t u_t and Bartlett weights w_l = 1 - l/(L+1).
        Eigen::MatrixXd G = D.array().colwise() * fit.residuals.array();
        Eigen::MatrixXd S = G.transpose() * G;
        const int L = std::min<int>(hac_lags, static_cast<int>(T) - 1);
        for (int l = 1; l <= L; ++l) {
            double w = 1.0 - static_cast<double>(l) / (L + 1);
            Eigen::MatrixXd C = G.bottomRows(T - l).transpose() * G.topRows(T - l);
            S += w * (C + C.transpose());
        }
        S *= static_cast<double>(T) / static_cast<double>(T - k);  // small-sample dof scaling
        V = DtDinv * S * DtDinv;
    }

    fit.se = V.diagonal().cwiseMax(0.0).cwiseSqrt();
    fit.tstat.resize(k);
    for (Eigen::Index j = 0; j < k; ++j)
        fit.tstat(j) = fit.se(j) > 0.0 ? fit.coef(j) / fit.se(j) : std::numeric_limits<double>::infinity();
    return fit;
}

Eigen::MatrixXd residualize(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Z) {
    if (Z.cols() == 0) return A;
    if (A.rows() != Z.rows()) throw std::invalid_argument("residualize: row counts differ");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Z);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < kRankTol * sv(0))
        throw std::runtime_error("residualize: Z is rank deficient");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
    return A - Z * qr.solve(A);
}

Eigen::VectorXd residualize(const Eigen::VectorXd& a, const Eigen::MatrixXd& Z) {
    Eigen::MatrixXd A = a;
    return residualize(A, Z).col(0);
}

Eigen::MatrixXd hcat(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    if (A.cols() == 0) return B;
    if (B.cols() == 0) return A;
    if (A.rows() != B.rows()) throw std::invalid_argument("hcat: row counts differ");
    Eigen::MatrixXd out(A.rows(), A.cols() + B.cols());
    out << A, B;
    return out;
}

}  // namespace hdf
