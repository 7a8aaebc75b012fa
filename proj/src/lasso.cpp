#include "hdf/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hdf/util.hpp"

namespace hdf {

double soft_threshold(double z, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("soft_threshold: gamma must be >= 0");
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

namespace {

double penalized_objective(const Eigen::VectorXd& r, const Eigen::VectorXd& beta, double lambda) {
    return 0.5 * r.squaredNorm() / static_cast<double>(r.size()) + lambda * beta.lpNorm<1>();
}

// Core solver on a centered/standardized design, warm-startable. `r` holds
// the current residual y - ybar - X*beta and is updated in place.
void coordinate_descent(const Eigen::MatrixXd& X, const Eigen::VectorXd& col_ssq_over_T, double lambda,
                        const LassoOptions& opts, Eigen::VectorXd& beta, Eigen::VectorXd& r, int& sweeps) {
    const double T = static_cast<double>(r.size());
    const Eigen::Index K = X.cols();
    sweeps = 0;
    for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < K; ++j) {
            const double ssq = col_ssq_over_T(j);
            if (ssq <= 0.0) continue;  // degenerate column stays out
            const double rho = X.col(j).dot(r) / T + ssq * beta(j);
            const double updated = soft_threshold(rho, lambda) / ssq;
            const double delta = updated - beta(j);
            if (delta != 0.0) {
                r -= delta * X.col(j);
                beta(j) = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        sweeps = sweep;
        if (max_delta < opts.tol) return;
    }
    throw std::runtime_error("lasso_fit: no convergence after " + std::to_string(opts.max_sweeps) +
                             " sweeps (lambda=" + std::to_string(lambda) + ")");
}

LassoFit finish_fit(const Eigen::VectorXd& beta, const Eigen::VectorXd& r, double ybar, double lambda, int sweeps) {
    LassoFit fit;
    fit.intercept = ybar;
    fit.beta_std = beta;
    fit.beta_raw = beta;
    fit.lambda = lambda;
    fit.sweeps = sweeps;
    fit.objective = penalized_objective(r, beta, lambda);
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) fit.support.push_back(static_cast<int>(j));
    return fit;
}

void check_inputs(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double lambda) {
    if (X.rows() != y.size()) throw std::invalid_argument("lasso: y and X row counts differ");
    if (y.size() < 2) throw std::invalid_argument("lasso: need at least 2 observations");
    if (!y.allFinite() || !X.allFinite()) throw std::domain_error("lasso: non-finite input");
    if (lambda < 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("lasso: lambda must be finite and >= 0");
}

}  // namespace

LassoFit lasso_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_std, double lambda, const LassoOptions& opts) {
    check_inputs(y, X_std, lambda);
    const double T = static_cast<double>(y.size());
    const double ybar = y.mean();
    Eigen::VectorXd col_ssq = X_std.colwise().squaredNorm() / T;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(X_std.cols());
    Eigen::VectorXd r = y.array() - ybar;
    int sweeps = 0;
    coordinate_descent(X_std, col_ssq, lambda, opts, beta, r, sweeps);
    return finish_fit(beta, r, ybar, lambda, sweeps);
}

LassoFit lasso_fit_raw(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, double lambda, const LassoOptions& opts) {
    auto [Xs, st] = standardize(X);
    LassoFit fit = lasso_fit(y, Xs, lambda, opts);
    fit.beta_raw = fit.beta_std;
    double shift = 0.0;
    for (Eigen::Index j = 0; j < fit.beta_raw.size(); ++j) {
        if (st.constant[static_cast<std::size_t>(j)]) {
            fit.beta_raw(j) = 0.0;
        } else {
            fit.beta_raw(j) = fit.beta_std(j) / st.scale(j);
            shift += fit.beta_raw(j) * st.mean(j);
        }
    }
    fit.intercept -= shift;
    return fit;
}

double lambda_max(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_std) {
    if (X_std.rows() != y.size()) throw std::invalid_argument("lambda_max: y and X row counts differ");
    if (X_std.cols() == 0) return 0.0;
    const double T = static_cast<double>(y.size());
    return (X_std.transpose() * y).cwiseAbs().maxCoeff() / T;
}

std::vector<LassoFit> lasso_path(const Eigen::VectorXd& y, const Eigen::MatrixXd& X_std,
                                 const std::vector<double>& lambdas, const LassoOptions& opts) {
    check_inputs(y, X_std, lambdas.empty() ? 0.0 : lambdas.front());
    const double T = static_cast<double>(y.size());
    const double ybar = y.mean();
    Eigen::VectorXd col_ssq = X_std.colwise().squaredNorm() / T;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(X_std.cols());
    Eigen::VectorXd r = y.array() - ybar;
    std::vector<LassoFit> fits;
    fits.reserve(lambdas.size());
    for (double lambda : lambdas) {
        if (lambda < 0.0) throw std::invalid_argument("lasso_path: negative lambda");
        int sweeps = 0;
        coordinate_descent(X_std, col_ssq, lambda, opts, beta, r, sweeps);
        fits.push_back(finish_fit(beta, r, ybar, lambda, sweeps));
    }
    return fits;
}

std::vector<double> lambda_grid(double lmax, int size, double ratio) {
    if (size < 1) throw std::invalid_argument("lambda_grid: size must be >= 1");
    if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("lambda_grid: ratio must be in (0, 1)");
    if (!(lmax > 0.0)) throw std::invalid_argument("lambda_grid: lambda_max must be > 0");
    std::vector<double> grid(static_cast<std::size_t>(size));
    if (size == 1) {
        grid[0] = lmax;
        return grid;
    }
    const double step = std::log(ratio) / (size - 1);
    for (int i = 0; i < size; ++i) grid[static_cast<std::size_t>(i)] = lmax * std::exp(step * i);
    return grid;
}

std::vector<std::pair<int, int>> cv_blocks(int T, int M) {
    if (M < 2) throw std::invalid_argument("cv_blocks: need at least 2 folds");
    if (T < 2 * M)
        throw std::invalid_argument("cv_blocks: T=" + std::to_string(T) + " too small for M=" + std::to_string(M) +
                                    " folds (need T >= 2M)");
    std::vector<std::pair<int, int>> blocks;
    const int base = T / M, extra = T % M;
    int begin = 0;
    for (int m = 0; m < M; ++m) {
        int len = base + (m < extra ? 1 : 0);
        blocks.emplace_back(begin, begin + len);
        begin += len;
    }
    return blocks;
}

CvResult assemble_cv(const std::vector<double>& grid, std::vector<std::vector<double>> fold_mse,
                     std::vector<std::pair<int, int>> fold_ranges) {
    if (grid.empty()) throw std::invalid_argument("assemble_cv: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] < grid[i - 1])) throw std::invalid_argument("assemble_cv: grid must be strictly decreasing");
    if (fold_mse.size() < 2) throw std::invalid_argument("assemble_cv: need at least 2 folds");
    CvResult res;
    res.grid = grid;
    res.fold_ranges = std::move(fold_ranges);
    double sum = 0.0;
    for (auto& curve : fold_mse) {
        if (curve.size() != grid.size()) throw std::invalid_argument("assemble_cv: curve length != grid length");
        std::size_t best = 0;
        for (std::size_t i = 1; i < curve.size(); ++i)
            if (curve[i] < curve[best]) best = i;  // ties keep the larger lambda
        res.fold_lambda.push_back(grid[best]);
        sum += grid[best];
        res.fold_mse.push_back(std::move(curve));
    }
    res.lambda = sum / static_cast<double>(res.fold_lambda.size());
    return res;
}

CvResult cv_lambda(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const CvParams& params, unsigned jobs) {
    const int T = static_cast<int>(y.size());
    check_inputs(y, X, 0.0);
    auto blocks = cv_blocks(T, params.folds);

    // One grid, anchored at the full-sample lambda_max, shared by all folds so
    // the per-fold minimizers are comparable.
    auto [Xs_full, st_full] = standardize(X);
    double lmax = lambda_max(y, Xs_full);
    if (!(lmax > 0.0))
        throw std::runtime_error("cv_lambda: lambda_max is 0 (response orthogonal to every regressor)");
    auto grid = lambda_grid(lmax, params.grid_size, params.grid_ratio);

    const int M = static_cast<int>(blocks.size());
    std::vector<std::vector<double>> curves(static_cast<std::size_t>(M));
    parallel_for(static_cast<std::size_t>(M), jobs, [&](std::size_t m) {
        const auto [vb, ve] = blocks[m];
        const int n_train = T - (ve - vb);
        Eigen::VectorXd y_train(n_train);
        Eigen::MatrixXd X_train(n_train, X.cols());
        int r = 0;
        for (int t = 0; t < T; ++t) {
            if (t >= vb && t < ve) continue;
            y_train(r) = y(t);
            X_train.row(r) = X.row(t);
            ++r;
        }
        auto [Xs, st] = standardize(X_train);
        auto fits = lasso_path(y_train, Xs, grid);

        std::vector<double> mse(grid.size(), 0.0);
        for (std::size_t i = 0; i < fits.size(); ++i) {
            // Map to natural units for out-of-fold prediction.
            double acc = 0.0;
            Eigen::VectorXd braw = Eigen::VectorXd::Zero(X.cols());
            double shift = 0.0;
            for (Eigen::Index j = 0; j < X.cols(); ++j) {
                if (!st.constant[static_cast<std::size_t>(j)] && fits[i].beta_std(j) != 0.0) {
                    braw(j) = fits[i].beta_std(j) / st.scale(j);
                    shift += braw(j) * st.mean(j);
                }
            }
            const double c = fits[i].intercept - shift;
            for (int t = vb; t < ve; ++t) {
                const double pred = c + X.row(t).dot(braw);
                const double err = y(t) - pred;
                acc += err * err;
            }
            mse[i] = acc / static_cast<double>(ve - vb);
        }
        curves[m] = std::move(mse);
    });

    return assemble_cv(grid, std::move(curves), std::move(blocks));
}

std::pair<Eigen::VectorXd, LassoFit> partialled_lasso(const Eigen::VectorXd& y, const Eigen::MatrixXd& Z,
                                                      const Eigen::MatrixXd& X, double lambda,
                                                      const LassoOptions& opts) {
    if (Z.cols() == 0) throw std::invalid_argument("partialled_lasso: Z must include at least the intercept column");
    Eigen::VectorXd y_t = residualize(y, Z);
    Eigen::MatrixXd X_t = residualize(X, Z);

    auto [Xs, st] = standardize(X_t);
    LassoFit fit = lasso_fit(y_t, Xs, lambda, opts);

    // Back to the natural scale of X; projected-out (constant) columns get 0.
    fit.beta_raw = fit.beta_std;
    for (Eigen::Index j = 0; j < fit.beta_raw.size(); ++j)
        fit.beta_raw(j) = st.constant[static_cast<std::size_t>(j)] ? 0.0 : fit.beta_std(j) / st.scale(j);
    fit.intercept = 0.0;  // the Z coefficients carry the intercept

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
    Eigen::VectorXd delta = qr.solve(y - X * fit.beta_raw);
    return {std::move(delta), std::move(fit)};
}

std::string CvResult::to_json() const {
    std::ostringstream os;
    os << "{\"lambda\":" << lambda << ",\"fold_lambda\":[";
    for (std::size_t i = 0; i < fold_lambda.size(); ++i) os << (i ? "," : "") << fold_lambda[i];
    os << "],\"fold_ranges\":[";
    for (std::size_t i = 0; i < fold_ranges.size(); ++i)
        os << (i ? "," : "") << "[" << fold_ranges[i].first << "," << fold_ranges[i].second << "]";
    os << "],\"grid\":[";
    for (std::size_t i = 0; i < grid.size(); ++i) os << (i ? "," : "") << grid[i];
    os << "]}";
    return os.str();
}

}  // namespace hdf
