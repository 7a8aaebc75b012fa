#include "hdf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hdf/util.hpp"

namespace hdf {

std::uint64_t Rng::derive(std::uint64_t master, std::uint64_t stream) {
    // SplitMix64 finalizer over the combined state.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

void DgpSpec::validate() const {
    if (T < 2) throw std::invalid_argument("DgpSpec: T must be >= 2");
    if (K < 1) throw std::invalid_argument("DgpSpec: K must be >= 1");
    if (signals < 0 || signals > K) throw std::invalid_argument("DgpSpec: signals must be in 0..K");
    if (beta0.size() != signals) throw std::invalid_argument("DgpSpec: beta0 length must equal signal count");
    if (num_factors < 0) throw std::invalid_argument("DgpSpec: num_factors must be >= 0");
    if (loadings.size() > 0 && (loadings.rows() != K || loadings.cols() != num_factors))
        throw std::invalid_argument("DgpSpec: loadings must be K x num_factors");
    if (!(idio_scale > 0.0) || !(error_scale > 0.0))
        throw std::invalid_argument("DgpSpec: noise scales must be > 0");
}

std::string DgpSpec::canonical_string() const {
    std::ostringstream os;
    os << "T=" << T << ";K=" << K << ";k=" << signals << ";beta=[";
    for (Eigen::Index i = 0; i < beta0.size(); ++i) os << (i ? "," : "") << beta0(i);
    os << "];m=" << num_factors << ";load=[";
    for (Eigen::Index j = 0; j < loadings.rows(); ++j)
        for (Eigen::Index c = 0; c < loadings.cols(); ++c) os << loadings(j, c) << ",";
    os << "];idio=" << idio_scale << ";err=" << error_scale;
    return os.str();
}

Eigen::MatrixXd DgpSpec::uniform_loadings(int K, int m, double value) {
    return Eigen::MatrixXd::Constant(K, m, value);
}

DgpDraw gen_dgp(const DgpSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    DgpDraw draw;
    draw.X.resize(spec.T, spec.K);

    Eigen::MatrixXd F(spec.T, spec.num_factors);
    for (int t = 0; t < spec.T; ++t)
        for (int f = 0; f < spec.num_factors; ++f) F(t, f) = rng.normal();

    const bool has_loadings = spec.loadings.size() > 0;
    for (int t = 0; t < spec.T; ++t) {
        for (int j = 0; j < spec.K; ++j) {
            double common = 0.0;
            if (has_loadings && spec.num_factors > 0) common = spec.loadings.row(j).dot(F.row(t));
            draw.X(t, j) = common + spec.idio_scale * rng.normal();
        }
    }

    draw.y.resize(spec.T);
    for (int t = 0; t < spec.T; ++t) {
        double v = spec.error_scale * rng.normal();
        for (int j = 0; j < spec.signals; ++j) v += spec.beta0(j) * draw.X(t, j);
        draw.y(t) = v;
    }
    for (int j = 0; j < spec.signals; ++j) draw.truth.push_back(j);
    return draw;
}

double irc_stat(const Eigen::MatrixXd& X1, const Eigen::MatrixXd& X2, const Eigen::VectorXd& signs) {
    if (X1.cols() < 1) throw std::invalid_argument("irc_stat: X1 is empty");
    if (X1.rows() != X2.rows()) throw std::invalid_argument("irc_stat: row counts differ");
    if (signs.size() != X1.cols()) throw std::invalid_argument("irc_stat: signs length != X1 columns");
    if (X2.cols() == 0) return 0.0;
    const double T = static_cast<double>(X1.rows());
    Eigen::MatrixXd G11 = X1.transpose() * X1 / T;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G11);
    if (!lu.isInvertible()) throw std::runtime_error("irc_stat: singular signal Gram matrix");
    Eigen::MatrixXd G21 = X2.transpose() * X1 / T;
    return (G21 * lu.solve(signs)).cwiseAbs().maxCoeff();
}

MincResult minc_quantities(const Eigen::VectorXd& beta0, const Eigen::MatrixXd& X1, double lambda_hT, int T) {
    if (beta0.size() != X1.cols()) throw std::invalid_argument("minc_quantities: beta0 length != X1 columns");
    if (beta0.size() < 1) throw std::invalid_argument("minc_quantities: empty beta0");
    if (T < 1) throw std::invalid_argument("minc_quantities: T must be >= 1");
    for (Eigen::Index j = 0; j < beta0.size(); ++j)
        if (beta0(j) == 0.0)
            throw std::invalid_argument("minc_quantities: beta0 has a zero entry at " + std::to_string(j) +
                                        " (signals must be nonzero)");
    const double Tr = static_cast<double>(X1.rows());
    Eigen::MatrixXd G = X1.transpose() * X1 / Tr;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    if (!lu.isInvertible()) throw std::runtime_error("minc_quantities: singular signal Gram matrix");
    Eigen::VectorXd signs = beta0.unaryExpr([](double b) { return b > 0.0 ? 1.0 : -1.0; });
    Eigen::VectorXd g = lu.solve(signs).cwiseAbs();

    MincResult res;
    res.min_beta = beta0.cwiseAbs().minCoeff();
    res.rhs_max = lambda_hT / (2.0 * static_cast<double>(T)) * g.maxCoeff();
    res.holds = res.min_beta > res.rhs_max;
    const double gmax = g.maxCoeff();
    res.d_hT = gmax > 0.0 ? 2.0 * res.min_beta / gmax : std::numeric_limits<double>::infinity();
    return res;
}

namespace {

struct RepCounts {
    double tp = 0, fp = 0;
    bool any_false = false;
    bool failed = false;
};

std::vector<int> run_selection(const McMethodSpec& m, const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
    std::vector<int> sel;
    switch (m.kind) {
        case McMethodKind::Lasso: {
            CvResult cv = cv_lambda(y, X, m.cv);
            LassoFit fit = lasso_fit_raw(y, X, cv.lambda);
            sel = fit.support;
            break;
        }
        case McMethodKind::Ocmt:
        case McMethodKind::Gocmt: {
            OcmtConfig cfg = m.ocmt;
            if (m.kind == McMethodKind::Ocmt) cfg.num_pcs = 0;
            SelectionResult r = gocmt_select(y, Eigen::MatrixXd(y.size(), 0), X, {}, cfg);
            for (std::size_t j = 0; j < r.stats.size(); ++j)
                if (r.stats[j].selected) sel.push_back(static_cast<int>(j));
            break;
        }
    }
    return sel;
}

}  // namespace

std::vector<McRow> mc_experiment(const DgpSpec& spec, const std::vector<McMethodSpec>& methods, int R,
                                 std::uint64_t seed, unsigned jobs) {
    if (R < 1) throw std::invalid_argument("mc_experiment: R must be >= 1");
    if (methods.empty()) throw std::invalid_argument("mc_experiment: no methods");
    spec.validate();

    const std::size_t M = methods.size();
    std::vector<std::vector<RepCounts>> cells(static_cast<std::size_t>(R), std::vector<RepCounts>(M));

    parallel_for(static_cast<std::size_t>(R), jobs, [&](std::size_t r) {
        DgpSpec rep = spec;
        rep.seed = Rng::derive(seed, r);
        DgpDraw draw = gen_dgp(rep);
        std::set<int> truth(draw.truth.begin(), draw.truth.end());
        for (std::size_t m = 0; m < M; ++m) {
            RepCounts& c = cells[r][m];
            try {
                auto sel = run_selection(methods[m], draw.y, draw.X);
                for (int j : sel) {
                    if (truth.count(j)) {
                        c.tp += 1;
                    } else {
                        c.fp += 1;
                        c.any_false = true;
                    }
                }
            } catch (const std::exception&) {
                c.failed = true;
            }
        }
    });

    // Order-insensitive reduction: plain sums over replications.
    std::vector<McRow> rows(M);
    for (std::size_t m = 0; m < M; ++m) {
        McRow& row = rows[m];
        row.method = methods[m].name;
        row.replications = R;
        double tp = 0, fp = 0;
        int ok = 0, fw = 0;
        for (int r = 0; r < R; ++r) {
            const RepCounts& c = cells[static_cast<std::size_t>(r)][m];
            if (c.failed) {
                ++row.failures;
                continue;
            }
            ++ok;
            tp += c.tp;
            fp += c.fp;
            if (c.any_false) ++fw;
        }
        const int k = spec.signals, noise = spec.K - spec.signals;
        if (ok > 0) {
            row.tpr = k > 0 ? tp / (static_cast<double>(ok) * k) : 0.0;
            row.fpr = noise > 0 ? fp / (static_cast<double>(ok) * noise) : 0.0;
            row.fwer = static_cast<double>(fw) / ok;
        }
    }
    return rows;
}

void write_mc_report(const std::vector<McRow>& rows, const DgpSpec& spec, std::uint64_t seed,
                     const std::string& path, const std::string& comment) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_mc_report: cannot open '" + path + "'");
    if (!comment.empty()) out << "# " << comment << "\n";
    const std::string spec_hash = hex64(fnv1a64(spec.canonical_string()));
    out << "method,tpr,fpr,fwer,replications,failures,spec_hash,seed\n";
    for (const auto& r : rows) {
        out << r.method << "," << format_sig6(r.tpr) << "," << format_sig6(r.fpr) << "," << format_sig6(r.fwer)
            << "," << r.replications << "," << r.failures << "," << spec_hash << "," << seed << "\n";
    }
}

}  // namespace hdf
