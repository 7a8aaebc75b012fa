#include "hdf/ocmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hdf/factors.hpp"

namespace hdf {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// Acklam's rational approximation, good to ~1e-9 before polishing.
double inverse_normal_guess(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: p must be in (0, 1)");
    double x = inverse_normal_guess(p);
    // Newton polish; erfc keeps the residual well-conditioned in the tails.
    for (int i = 0; i < 2; ++i) {
        double err = normal_cdf(x) - p;
        double deriv = normal_pdf(x);
        if (deriv <= 0.0) break;
        x -= err / deriv;
    }
    return x;
}

double critical_value(double p, int K, double delta) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("critical_value: p must be in (0, 1)");
    if (K < 1) throw std::invalid_argument("critical_value: K must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("critical_value: delta must be > 0");
    return inverse_normal_cdf(1.0 - p / (2.0 * std::pow(static_cast<double>(K), delta)));
}

SelectionResult gocmt_select(const Eigen::VectorXd& y, const Eigen::MatrixXd& Z, const Eigen::MatrixXd& X,
                             const std::vector<std::string>& x_names, const OcmtConfig& cfg) {
    const Eigen::Index T = y.size();
    const Eigen::Index K = X.cols();
    if (K < 1) throw std::invalid_argument("gocmt_select: empty active set");
    if (X.rows() != T || (Z.cols() > 0 && Z.rows() != T))
        throw std::invalid_argument("gocmt_select: row counts differ");
    if (!x_names.empty() && static_cast<Eigen::Index>(x_names.size()) != K)
        throw std::invalid_argument("gocmt_select: name count != candidate count");
    if (cfg.num_pcs < 0) throw std::invalid_argument("gocmt_select: num_pcs must be >= 0");

    // Candidates standardized: t-ratios are scale-free and the PCs need it.
    auto [Xs, st] = standardize(X);

    Eigen::MatrixXd controls(T, 0);
    if (Z.cols() > 0) controls = Z;
    if (cfg.num_pcs > 0) {
        // PCs of the non-degenerate standardized candidates.
        std::vector<Eigen::Index> live;
        for (Eigen::Index j = 0; j < K; ++j)
            if (!st.constant[static_cast<std::size_t>(j)]) live.push_back(j);
        Eigen::MatrixXd Xlive(T, static_cast<Eigen::Index>(live.size()));
        for (std::size_t j = 0; j < live.size(); ++j) Xlive.col(static_cast<Eigen::Index>(j)) = Xs.col(live[j]);
        const int m = std::min<int>(cfg.num_pcs, static_cast<int>(std::min<Eigen::Index>(T, Xlive.cols())));
        controls = hcat(controls, pca(Xlive, m).scores);
    }

    const Eigen::Index p_ctrl = controls.cols() + 1;  // plus intercept
    if (T <= p_ctrl + 1)
        throw std::invalid_argument("gocmt_select: T=" + std::to_string(T) + " too small for " +
                                    std::to_string(p_ctrl + 1) + " coefficients");

    Eigen::MatrixXd B(T, p_ctrl);
    B.col(0).setOnes();
    if (controls.cols() > 0) B.rightCols(controls.cols()) = controls;
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) < 1e-10 * sv(0))
            throw std::runtime_error("gocmt_select: pre-selected/control block is collinear");
    }

    // Frisch-Waugh: the t-ratio of x_j in the full regression equals the one
    // from regressing the projected y on the projected x_j.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
    Eigen::VectorXd ey = y - B * qr.solve(y);
    Eigen::MatrixXd ex = Xs - B * qr.solve(Xs);
    const double eyy = ey.squaredNorm();
    const double dof = static_cast<double>(T - p_ctrl - 1);

    SelectionResult res;
    res.delta = cfg.delta;
    res.critical_value = critical_value(cfg.p, static_cast<int>(K), cfg.delta);

    std::vector<std::pair<double, std::string>> picked;  // (|t|, name)
    for (Eigen::Index j = 0; j < K; ++j) {
        CandidateStat cs;
        cs.name = x_names.empty() ? "x" + std::to_string(j) : x_names[static_cast<std::size_t>(j)];
        const double exx = ex.col(j).squaredNorm();
        if (st.constant[static_cast<std::size_t>(j)] || exx / static_cast<double>(T) < 1e-12) {
            cs.skipped = true;  // collinear with controls; t undefined
            res.stats.push_back(std::move(cs));
            continue;
        }
        if (cfg.hac_lags > 0) {
            Eigen::MatrixXd design = hcat(controls, Xs.col(j));
            OlsFit f = ols(y, design, cfg.hac_lags);
            cs.t = f.tstat(f.coef.size() - 1);
        } else {
            const double phi = ex.col(j).dot(ey) / exx;
            const double rss = std::max(0.0, eyy - phi * phi * exx);
            const double sigma2 = rss / dof;
            cs.t = sigma2 > 0.0 ? phi / std::sqrt(sigma2 / exx) : std::numeric_limits<double>::infinity();
        }
        cs.selected = std::abs(cs.t) > res.critical_value;  // strict: ties are not selected
        if (cs.selected) picked.emplace_back(std::abs(cs.t), cs.name);
        res.stats.push_back(std::move(cs));
    }

    std::stable_sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (auto& [t, name] : picked) res.selected.push_back(std::move(name));
    return res;
}

OlsFit final_regression(const Eigen::VectorXd& y, const Eigen::MatrixXd& Z, const Eigen::MatrixXd& X_sel,
                        int hac_lags, const std::vector<std::string>& names) {
    return ols(y, hcat(Z, X_sel), hac_lags, names);
}

std::string SelectionResult::to_json() const {
    std::ostringstream os;
    os << "{\"window_end\":\"" << window_end.to_string() << "\",\"horizon\":" << horizon << ",\"method\":\""
       << method << "\",\"delta\":" << delta << ",\"critical_value\":" << critical_value << ",\"preselected\":[";
    for (std::size_t i = 0; i < preselected.size(); ++i) os << (i ? "," : "") << "\"" << preselected[i] << "\"";
    os << "],\"selected\":[";
    bool first = true;
    for (const auto& cs : stats) {
        if (!cs.selected) continue;
        if (!first) os << ",";
        first = false;
        os << "{\"name\":\"" << cs.name << "\",\"t\":" << cs.t << "}";
    }
    os << "]}";
    return os.str();
}

}  // namespace hdf
