#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hdf/lasso.hpp"
#include "hdf/ocmt.hpp"

namespace hdf {

/// Deterministic normal generator: mt19937_64 stream (fully specified by the
/// standard) plus an explicit Box-Muller transform, so draws are
/// bit-reproducible across platforms. Per-task seeds are derived with a
/// SplitMix64 mix so parallel and serial runs agree.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    static std::uint64_t derive(std::uint64_t master, std::uint64_t stream);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double normal();

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Sparse factor DGP:
///   x_jt = loadings_j' f_t + v_jt,   y_t = sum_{j in truth} beta0_j x_jt + u_t,
/// with standard normal factors, v ~ N(0, idio_scale^2), u ~ N(0, error_scale^2).
/// The truth is the first `signals` columns.
struct DgpSpec {
    int T = 100;
    int K = 10;
    int signals = 0;             // k
    Eigen::VectorXd beta0;       // length k
    int num_factors = 0;
    Eigen::MatrixXd loadings;    // K x num_factors; empty means all zero
    double idio_scale = 1.0;
    double error_scale = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    std::string canonical_string() const;   // hashed into reports
    /// K x m loading matrix with every entry equal to `value`.
    static Eigen::MatrixXd uniform_loadings(int K, int m, double value);
};

struct DgpDraw {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    std::vector<int> truth;
};

DgpDraw gen_dgp(const DgpSpec& spec);

/// ||(X2'X1/T)(X1'X1/T)^{-1} sign||_inf on standardized columns; the
/// irrepresentable condition holds when the value is below 1.
double irc_stat(const Eigen::MatrixXd& X1, const Eigen::MatrixXd& X2, const Eigen::VectorXd& signs);

struct MincResult {
    bool holds = false;
    double d_hT = 0.0;           // 2 min_j|beta0_j| / max_j |(X1'X1/T)^{-1} sign|_j
    double min_beta = 0.0;
    double rhs_max = 0.0;        // largest right-hand side across j
};

/// Minimum-signal condition min_j |beta0_j| > (2T)^{-1} lambda_hT |G^{-1} sign|_j
/// for every j, with G = X1'X1/T. `lambda_hT` is on the unnormalized objective
/// scale (2T times the (1/2T)-normalized penalty).
MincResult minc_quantities(const Eigen::VectorXd& beta0, const Eigen::MatrixXd& X1, double lambda_hT, int T);

enum class McMethodKind { Lasso, Ocmt, Gocmt };

struct McMethodSpec {
    std::string name;
    McMethodKind kind = McMethodKind::Ocmt;
    OcmtConfig ocmt;     // Ocmt/Gocmt (num_pcs forced to 0 for plain Ocmt)
    CvParams cv;         // Lasso
};

struct McRow {
    std::string method;
    double tpr = 0.0;    // fraction of true signals selected
    double fpr = 0.0;    // fraction of non-signals selected
    double fwer = 0.0;   // fraction of replications with >= 1 false positive
    int replications = 0;
    int failures = 0;
};

/// Seeded Monte Carlo over R replications; replication r uses
/// Rng::derive(seed, r) so any parallelism degree gives identical tables.
std::vector<McRow> mc_experiment(const DgpSpec& spec, const std::vector<McMethodSpec>& methods, int R,
                                 std::uint64_t seed, unsigned jobs = 1);

void write_mc_report(const std::vector<McRow>& rows, const DgpSpec& spec, std::uint64_t seed,
                     const std::string& path, const std::string& comment);

}  // namespace hdf
