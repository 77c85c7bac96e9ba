#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chaos/error.hpp"
#include "chaos/timeseries.hpp"

namespace chaos {

/// Principal components of a column-centered data matrix.
struct PcaDecomposition {
    Eigen::MatrixXd loadings;     // M x M, column j is the j-th PC direction
    Eigen::VectorXd eigenvalues;  // descending, eigenvalues of Xc'Xc / (n - 1)
    bool centered = true;
};

inline Eigen::MatrixXd centered_data(const MetricMatrix& x) {
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        auto col = x.column(c);
        const double mean =
            std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
        for (std::size_t r = 0; r < x.rows(); ++r)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = col[r] - mean;
    }
    return out;
}

inline PcaDecomposition pca(const Eigen::MatrixXd& centered) {
    if (centered.rows() < 2) throw ParameterError("PCA needs at least 2 rows", Stage::selection);
    const Eigen::MatrixXd scatter =
        centered.transpose() * centered / static_cast<double>(centered.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scatter);
    if (solver.info() != Eigen::Success)
        throw Error(Stage::selection, "eigendecomposition did not converge");
    // Eigen returns ascending order.
    PcaDecomposition out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.loadings = solver.eigenvectors().rowwise().reverse();
    return out;
}

inline PcaDecomposition pca(const MetricMatrix& x) {
    if (x.rows() < 2) throw ParameterError("PCA needs at least 2 rows", Stage::selection);
    return pca(centered_data(x));
}

/// Orthonormal basis of the column span of `a`, from a column-pivoted QR with
/// rank decided at `tolerance` relative to the largest pivot.
inline Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a, double tolerance = 1e-10) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(tolerance);
    const Eigen::Index rank = qr.rank();
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), rank);
    return q;
}

/// Evaluates the generalized coefficient of determination between the span
/// of the first k principal components and the span of a variable subset,
/// both taken in observation space:
///
///   GCD = tr(P_pc P_subset) / sqrt(k * |subset|)
///
/// which is 1 for identical subspaces and 0 for orthogonal ones. Components
/// with a zero eigenvalue have no direction in observation space and are left
/// out of P_pc.
class GcdEvaluator {
public:
    GcdEvaluator(const MetricMatrix& x, std::size_t k) : GcdEvaluator(centered_data(x), k) {}

    GcdEvaluator(Eigen::MatrixXd centered, std::size_t k)
        : data_(std::move(centered)), k_(k) {
        const auto m = static_cast<std::size_t>(data_.cols());
        if (k_ < 1 || k_ > m)
            throw ParameterError("PC count " + std::to_string(k_) + " outside [1, " +
                                     std::to_string(m) + "]",
                                 Stage::selection);
        const PcaDecomposition dec = pca(data_);
        const double top = std::max(dec.eigenvalues(0), 0.0);
        std::vector<Eigen::Index> kept;
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k_); ++j)
            if (dec.eigenvalues(j) > 1e-12 * top && dec.eigenvalues(j) > 0.0) kept.push_back(j);
        pc_basis_.resize(data_.rows(), static_cast<Eigen::Index>(kept.size()));
        for (std::size_t i = 0; i < kept.size(); ++i) {
            Eigen::VectorXd s = data_ * dec.loadings.col(kept[i]);
            pc_basis_.col(static_cast<Eigen::Index>(i)) = s / s.norm();
        }
    }

    std::size_t variables() const noexcept { return static_cast<std::size_t>(data_.cols()); }
    std::size_t components() const noexcept { return k_; }

    double operator()(std::span<const std::size_t> subset) const {
        if (subset.empty()) throw ParameterError("empty variable subset", Stage::selection);
        Eigen::MatrixXd cols(data_.rows(), static_cast<Eigen::Index>(subset.size()));
        for (std::size_t i = 0; i < subset.size(); ++i) {
            if (subset[i] >= variables())
                throw ParameterError("variable index out of range", Stage::selection);
            cols.col(static_cast<Eigen::Index>(i)) = data_.col(static_cast<Eigen::Index>(subset[i]));
        }
        const Eigen::MatrixXd basis = orthonormal_basis(cols);
        if (basis.cols() == 0 || pc_basis_.cols() == 0) return 0.0;
        const double overlap = (pc_basis_.transpose() * basis).squaredNorm();
        const double gcd =
            overlap / std::sqrt(static_cast<double>(k_) * static_cast<double>(subset.size()));
        return std::clamp(gcd, 0.0, 1.0);
    }

private:
    Eigen::MatrixXd data_;
    Eigen::MatrixXd pc_basis_;
    std::size_t k_;
};

inline double gcd_score(const MetricMatrix& x, std::span<const std::size_t> subset, std::size_t k) {
    if (subset.empty()) throw ParameterError("empty variable subset", Stage::selection);
    return GcdEvaluator(x, k)(subset);
}

struct SubsetScore {
    std::vector<std::size_t> indices;  // ascending
    double gcd = 0.0;
};

struct AnnealConfig {
    double initial_temperature = 1.0;
    double cooling_rate = 0.99;
    std::size_t max_iterations = 5000;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(initial_temperature > 0.0))
            throw ParameterError("initial temperature must be positive", Stage::selection);
        if (!(cooling_rate > 0.0 && cooling_rate < 1.0))
            throw ParameterError("cooling rate must lie in (0, 1)", Stage::selection);
        if (max_iterations < 1)
            throw ParameterError("max_iterations must be positive", Stage::selection);
    }
};

/// Metropolis acceptance probability for a worse candidate.
inline double acceptance_probability(double candidate, double current, double temperature) {
    if (candidate >= current) return 1.0;
    return std::exp((candidate - current) / temperature);
}

/// Simulated-annealing search for the k-variable subset with the highest GCD
/// against the first k PCs. Neighbours differ from the current subset in
/// exactly one variable.
inline SubsetScore anneal_select(const GcdEvaluator& gcd, const AnnealConfig& cfg) {
    cfg.validate();
    const std::size_t m = gcd.variables();
    const std::size_t k = gcd.components();

    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (k == m) return {all, gcd(all)};

    std::mt19937_64 rng(cfg.seed);
    std::shuffle(all.begin(), all.end(), rng);
    // all[0, k) is the current subset, all[k, m) the variables outside it.
    std::vector<std::size_t> current(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<std::size_t> outside(all.begin() + static_cast<std::ptrdiff_t>(k), all.end());

    double cc = gcd(current);
    SubsetScore best{current, cc};
    double t = cfg.initial_temperature;
    std::uniform_int_distribution<std::size_t> pick_in(0, k - 1);
    std::uniform_int_distribution<std::size_t> pick_out(0, m - k - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        const std::size_t i = pick_in(rng);
        const std::size_t o = pick_out(rng);
        std::swap(current[i], outside[o]);
        const double ac = gcd(current);
        if (ac > cc || unit(rng) < acceptance_probability(ac, cc, t)) {
            cc = ac;
            if (cc > best.gcd) best = {current, cc};
        } else {
            std::swap(current[i], outside[o]);
        }
        t *= cfg.cooling_rate;
    }
    std::sort(best.indices.begin(), best.indices.end());
    return best;
}

inline SubsetScore anneal_select(const MetricMatrix& x, std::size_t k, const AnnealConfig& cfg) {
    if (k < 1 || k > x.cols())
        throw ParameterError("subset size " + std::to_string(k) + " outside [1, " +
                                 std::to_string(x.cols()) + "]",
                             Stage::selection);
    return anneal_select(GcdEvaluator(x, k), cfg);
}

struct ElbowRow {
    std::size_t k = 0;
    SubsetScore best;
};

/// Best GCD found for every subset size in [k_min, k_max]. The caller picks
/// the elbow; nothing here decides it.
inline std::vector<ElbowRow> elbow_report(const MetricMatrix& x, const AnnealConfig& cfg,
                                          std::size_t k_min = 1, std::size_t k_max = 0) {
    if (k_max == 0 || k_max > x.cols()) k_max = x.cols();
    if (k_min < 1 || k_min > k_max) throw ParameterError("invalid k range", Stage::selection);
    const Eigen::MatrixXd centered = centered_data(x);
    std::vector<ElbowRow> rows;
    for (std::size_t k = k_min; k <= k_max; ++k)
        rows.push_back({k, anneal_select(GcdEvaluator(centered, k), cfg)});
    return rows;
}

} // namespace chaos
