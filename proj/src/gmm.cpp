#include "docrep/gmm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "docrep/parallel.hpp"

namespace docrep {
namespace gmm {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr std::size_t kChunk = 4096;  // fixed E-step chunk grid, see parallel.hpp

// Per-component constant part of the log density plus scaled precisions.
struct DensityCache {
    Eigen::VectorXd log_const;       // N: log w_n - 0.5 sum_d log(2 pi s^2)
    Eigen::MatrixXd inv_var;         // N x D
    explicit DensityCache(const DiagonalGMM& g) {
        const int n = g.components();
        log_const.resize(n);
        inv_var = g.variances.cwiseInverse();
        for (int i = 0; i < n; ++i)
            log_const(i) = std::log(g.weights(i)) -
                           0.5 * (g.variances.row(i).array().log().sum() + g.dim() * kLog2Pi);
    }
    // log(w_n N(x | mu_n, s_n)) for all n.
    Eigen::VectorXd weighted_log_densities(const Eigen::VectorXd& x, const DiagonalGMM& g) const {
        Eigen::VectorXd out(g.components());
        for (int i = 0; i < g.components(); ++i) {
            double q = ((x.transpose() - g.means.row(i)).array().square() *
                        inv_var.row(i).array()).sum();
            out(i) = log_const(i) - 0.5 * q;
        }
        return out;
    }
};

double log_sum_exp(const Eigen::VectorXd& v) {
    double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

double log_component_density(const Eigen::VectorXd& x, const DiagonalGMM& g, int n) {
    if (n < 0 || n >= g.components())
        throw std::invalid_argument("log_component_density: component index out of range");
    if (x.size() != g.dim())
        throw std::invalid_argument("log_component_density: dimension mismatch");
    double acc = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
        double diff = x(d) - g.means(n, d);
        acc += std::log(g.variances(n, d)) + diff * diff / g.variances(n, d);
    }
    return -0.5 * (acc + g.dim() * kLog2Pi);
}

Eigen::VectorXd posteriors(const Eigen::VectorXd& x, const DiagonalGMM& g) {
    if (x.size() != g.dim())
        throw std::invalid_argument("posteriors: dimension mismatch");
    DensityCache cache(g);
    Eigen::VectorXd logs = cache.weighted_log_densities(x, g);
    double lse = log_sum_exp(logs);
    return (logs.array() - lse).exp();
}

double log_mixture_density(const Eigen::VectorXd& x, const DiagonalGMM& g) {
    DensityCache cache(g);
    return log_sum_exp(cache.weighted_log_densities(x, g));
}

Eigen::MatrixXd posteriors_batch(const Eigen::MatrixXd& points, const DiagonalGMM& g) {
    if (points.cols() != g.dim())
        throw std::invalid_argument("posteriors_batch: dimension mismatch");
    DensityCache cache(g);
    Eigen::MatrixXd out(points.rows(), g.components());
    Eigen::VectorXd x(g.dim());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        x = points.row(i).transpose();
        Eigen::VectorXd logs = cache.weighted_log_densities(x, g);
        double lse = log_sum_exp(logs);
        out.row(i) = (logs.array() - lse).exp();
    }
    return out;
}

Eigen::MatrixXd kmeans(const Eigen::MatrixXd& data, int k, int iters, std::uint64_t seed,
                       std::vector<int>* assignment) {
    const Eigen::Index t = data.rows();
    const Eigen::Index dim = data.cols();
    if (k < 1 || t < k)
        throw std::invalid_argument("kmeans: need at least k data points");

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centers(k, dim);

    // k-means++ seeding.
    std::uniform_int_distribution<Eigen::Index> first(0, t - 1);
    centers.row(0) = data.row(first(rng));
    Eigen::VectorXd d2 = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        double total = d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            double cum = 0.0;
            for (Eigen::Index i = 0; i < t; ++i) {
                cum += d2(i);
                if (cum >= target) { pick = i; break; }
                pick = i;
            }
        } else {
            pick = first(rng);
        }
        centers.row(c) = data.row(pick);
        d2 = d2.cwiseMin((data.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> assign(static_cast<std::size_t>(t), 0);
    for (int it = 0; it < iters; ++it) {
        // Assignment step, parallel over fixed chunks.
        parallel_chunks(static_cast<std::size_t>(t), kChunk, [&](std::size_t, std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                Eigen::Index best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (int c = 0; c < k; ++c) {
                    double d = (data.row(static_cast<Eigen::Index>(i)) - centers.row(c)).squaredNorm();
                    if (d < best_d) { best_d = d; best = c; }
                }
                assign[i] = static_cast<int>(best);
            }
        });
        // Update step, sequential accumulation in data order.
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < t; ++i) {
            sums.row(assign[static_cast<std::size_t>(i)]) += data.row(i);
            counts(assign[static_cast<std::size_t>(i)]) += 1.0;
        }
        for (int c = 0; c < k; ++c) {
            if (counts(c) > 0.0) {
                centers.row(c) = sums.row(c) / counts(c);
            } else {
                // Re-seed an empty cluster from the point farthest from its center.
                Eigen::Index worst = 0;
                double worst_d = -1.0;
                for (Eigen::Index i = 0; i < t; ++i) {
                    double d = (data.row(i) - centers.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
                    if (d > worst_d) { worst_d = d; worst = i; }
                }
                centers.row(c) = data.row(worst);
            }
        }
    }
    if (assignment) {
        assignment->assign(assign.begin(), assign.end());
        // Final re-assignment so the labels match the returned centers.
        for (Eigen::Index i = 0; i < t; ++i) {
            Eigen::Index best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = (data.row(i) - centers.row(c)).squaredNorm();
                if (d < best_d) { best_d = d; best = c; }
            }
            (*assignment)[static_cast<std::size_t>(i)] = static_cast<int>(best);
        }
    }
    return centers;
}

DiagonalGMM fit_em(const Eigen::MatrixXd& data, int n_components, const EMConfig& config,
                   EMReport* report) {
    const Eigen::Index t = data.rows();
    const Eigen::Index dim = data.cols();
    if (n_components < 1 || t < n_components)
        throw std::invalid_argument("fit_em: need at least N data points for N components");
    if (!data.allFinite())
        throw std::invalid_argument("fit_em: data must be finite");

    // Variance floor from the average per-dimension data variance.
    Eigen::RowVectorXd data_mean = data.colwise().mean();
    Eigen::RowVectorXd data_var =
        (data.rowwise() - data_mean).array().square().colwise().sum() / std::max<double>(1.0, t - 1);
    double avg_var = data_var.mean();
    if (avg_var <= 0.0) avg_var = 1.0;  // constant data; any positive scale works
    const double floor = config.variance_floor_scale * avg_var;

    DiagonalGMM g;
    g.means.resize(n_components, dim);
    g.variances.resize(n_components, dim);
    g.weights.resize(n_components);

    // Initialize from k-means clusters.
    std::vector<int> assign;
    g.means = kmeans(data, n_components, config.kmeans_iters, config.seed, &assign);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_components);
    Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(n_components, dim);
    for (Eigen::Index i = 0; i < t; ++i) {
        int c = assign[static_cast<std::size_t>(i)];
        counts(c) += 1.0;
        sq.row(c) += (data.row(i) - g.means.row(c)).array().square().matrix();
    }
    for (int c = 0; c < n_components; ++c) {
        g.weights(c) = std::max(counts(c), 1.0) / static_cast<double>(t);
        if (counts(c) > 0.0)
            g.variances.row(c) = (sq.row(c) / counts(c)).cwiseMax(floor);
        else
            g.variances.row(c) = data_var.cwiseMax(floor);
    }
    g.weights /= g.weights.sum();

    if (report) {
        report->avg_log_likelihood.clear();
        report->reseeded_components = 0;
        report->variance_floor = floor;
    }

    const std::size_t chunks = num_chunks(static_cast<std::size_t>(t), kChunk);
    double prev_ll = -std::numeric_limits<double>::infinity();
    int iter = 0;
    for (; iter < config.max_iters; ++iter) {
        DensityCache cache(g);

        // E-step: per-chunk partial sufficient statistics, merged in chunk
        // order for bit-stable parallel reduction.
        std::vector<Eigen::VectorXd> p_mass(chunks, Eigen::VectorXd::Zero(n_components));
        std::vector<Eigen::MatrixXd> p_sum(chunks, Eigen::MatrixXd::Zero(n_components, dim));
        std::vector<Eigen::MatrixXd> p_sqsum(chunks, Eigen::MatrixXd::Zero(n_components, dim));
        std::vector<double> p_ll(chunks, 0.0);
        std::vector<double> p_worst(chunks, std::numeric_limits<double>::infinity());
        std::vector<Eigen::Index> p_worst_idx(chunks, 0);

        parallel_chunks(static_cast<std::size_t>(t), kChunk, [&](std::size_t c, std::size_t b, std::size_t e) {
            Eigen::VectorXd x(dim);
            for (std::size_t i = b; i < e; ++i) {
                x = data.row(static_cast<Eigen::Index>(i)).transpose();
                Eigen::VectorXd logs = cache.weighted_log_densities(x, g);
                double lse = log_sum_exp(logs);
                Eigen::VectorXd gamma = (logs.array() - lse).exp();
                p_ll[c] += lse;
                if (lse < p_worst[c]) { p_worst[c] = lse; p_worst_idx[c] = static_cast<Eigen::Index>(i); }
                p_mass[c] += gamma;
                p_sum[c] += gamma * x.transpose();
                p_sqsum[c] += gamma * x.array().square().matrix().transpose();
            }
        });

        Eigen::VectorXd mass = Eigen::VectorXd::Zero(n_components);
        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n_components, dim);
        Eigen::MatrixXd sqsum = Eigen::MatrixXd::Zero(n_components, dim);
        double ll = 0.0;
        double worst_ll = std::numeric_limits<double>::infinity();
        Eigen::Index worst_idx = 0;
        for (std::size_t c = 0; c < chunks; ++c) {
            mass += p_mass[c];
            sum += p_sum[c];
            sqsum += p_sqsum[c];
            ll += p_ll[c];
            if (p_worst[c] < worst_ll) { worst_ll = p_worst[c]; worst_idx = p_worst_idx[c]; }
        }
        ll /= static_cast<double>(t);
        if (report) report->avg_log_likelihood.push_back(ll);

        if (iter > 0 && std::abs(ll - prev_ll) < config.rel_tol * std::abs(prev_ll)) {
            ++iter;
            break;
        }
        prev_ll = ll;

        // M-step.
        bool reseeded = false;
        for (int c = 0; c < n_components; ++c) {
            if (mass(c) < 1e-8) {
                g.means.row(c) = data.row(worst_idx);
                g.variances.row(c) = data_var.cwiseMax(floor);
                g.weights(c) = 1.0 / static_cast<double>(t);
                reseeded = true;
                if (report) ++report->reseeded_components;
                continue;
            }
            g.weights(c) = mass(c) / static_cast<double>(t);
            g.means.row(c) = sum.row(c) / mass(c);
            g.variances.row(c) =
                ((sqsum.row(c) / mass(c)) - g.means.row(c).array().square().matrix()).cwiseMax(floor);
        }
        if (reseeded) g.weights /= g.weights.sum();
    }
    if (report) report->iterations = iter;
    return g;
}

}  // namespace gmm
}  // namespace docrep
