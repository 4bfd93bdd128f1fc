#include "docrep/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "docrep/predict.hpp"

namespace docrep {
namespace evalsuite {

SplitPlan make_split_plan(int n_samples, int n_repeats, std::uint64_t seed) {
    if (n_samples < 2 || n_repeats < 1)
        throw std::invalid_argument("make_split_plan: need >= 2 samples and >= 1 repeat");
    SplitPlan plan;
    plan.seed = seed;
    plan.n_repeats = n_repeats;
    plan.in_train.resize(static_cast<std::size_t>(n_repeats));
    std::vector<int> order(static_cast<std::size_t>(n_samples));
    const int train_count = (n_samples + 1) / 2;
    for (int r = 0; r < n_repeats; ++r) {
        std::iota(order.begin(), order.end(), 0);
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(r + 1));
        std::shuffle(order.begin(), order.end(), rng);
        auto& mask = plan.in_train[static_cast<std::size_t>(r)];
        mask.assign(static_cast<std::size_t>(n_samples), 0);
        for (int i = 0; i < train_count; ++i) mask[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    }
    return plan;
}

std::vector<int> rank_gallery(const Eigen::VectorXd& query, const Eigen::MatrixXd& gallery) {
    if (gallery.rows() == 0)
        throw std::invalid_argument("rank_gallery: empty gallery");
    if (gallery.cols() != query.size())
        throw std::invalid_argument("rank_gallery: dimension mismatch");
    Eigen::VectorXd scores = gallery * query;
    std::vector<int> order(static_cast<std::size_t>(gallery.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return scores(i) > scores(j); });
    return order;
}

double average_precision(const std::vector<std::uint8_t>& relevance) {
    int total_relevant = 0;
    for (auto r : relevance) total_relevant += r ? 1 : 0;
    if (total_relevant == 0)
        throw std::invalid_argument("average_precision: no relevant items");
    double ap = 0.0;
    int hits = 0;
    for (std::size_t k = 0; k < relevance.size(); ++k) {
        if (relevance[k]) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(k + 1);
        }
    }
    return ap / total_relevant;
}

RetrievalMetrics retrieval_eval(const Eigen::MatrixXd& test, const std::vector<int>& test_labels,
                                const Eigen::MatrixXd& train, const std::vector<int>& train_labels) {
    if (test.rows() == 0 || train.rows() == 0)
        throw std::invalid_argument("retrieval_eval: empty split");
    RetrievalMetrics m;
    double sum_ap = 0.0, sum_p1 = 0.0, sum_p5 = 0.0;
    for (Eigen::Index q = 0; q < test.rows(); ++q) {
        const int label = test_labels[static_cast<std::size_t>(q)];
        bool any_relevant = false;
        for (int tl : train_labels)
            if (tl == label) { any_relevant = true; break; }
        if (!any_relevant) {
            ++m.queries_skipped;
            continue;
        }
        std::vector<int> order = rank_gallery(test.row(q).transpose(), train);
        std::vector<std::uint8_t> rel(order.size());
        for (std::size_t k = 0; k < order.size(); ++k)
            rel[k] = train_labels[static_cast<std::size_t>(order[k])] == label ? 1 : 0;
        sum_ap += average_precision(rel);
        sum_p1 += rel[0] ? 1.0 : 0.0;
        const int k5 = std::min<std::size_t>(5, rel.size());
        int hits5 = 0;
        for (int k = 0; k < k5; ++k) hits5 += rel[static_cast<std::size_t>(k)];
        sum_p5 += static_cast<double>(hits5) / k5;
        ++m.queries_scored;
    }
    if (m.queries_scored > 0) {
        m.mean_ap = sum_ap / m.queries_scored;
        m.p_at_1 = sum_p1 / m.queries_scored;
        m.p_at_5 = sum_p5 / m.queries_scored;
    }
    return m;
}

std::vector<int> centroid_linkage_cluster(const Eigen::MatrixXd& features, int k, ClusterStats* stats) {
    const int n = static_cast<int>(features.rows());
    if (k <= 0)
        throw std::invalid_argument("centroid_linkage_cluster: K must be positive");
    if (k > n)
        throw std::invalid_argument("centroid_linkage_cluster: K exceeds sample count");

    // Active clusters keyed by their original slot; merging (i,j), i<j keeps i.
    std::vector<bool> active(static_cast<std::size_t>(n), true);
    std::vector<double> sizes(static_cast<std::size_t>(n), 1.0);
    std::vector<int> member_of(static_cast<std::size_t>(n));
    std::iota(member_of.begin(), member_of.end(), 0);

    // Squared Euclidean distances between cluster centroids.
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double d = (features.row(i) - features.row(j)).squaredNorm();
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }

    double prev_merge = -std::numeric_limits<double>::infinity();
    if (stats) *stats = ClusterStats{};
    for (int remaining = n; remaining > k; --remaining) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!active[static_cast<std::size_t>(i)]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!active[static_cast<std::size_t>(j)]) continue;
                if (dist(i, j) < best) {  // strict: keeps the smallest (i,j) pair on ties
                    best = dist(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        if (stats) {
            if (best < prev_merge) ++stats->inversions;
            stats->last_merge_dist = best;
        }
        prev_merge = best;

        const double ni = sizes[static_cast<std::size_t>(bi)];
        const double nj = sizes[static_cast<std::size_t>(bj)];
        const double nij = ni + nj;
        // Lance-Williams centroid update on squared distances.
        for (int h = 0; h < n; ++h) {
            if (!active[static_cast<std::size_t>(h)] || h == bi || h == bj) continue;
            const double d = (ni * dist(h, bi) + nj * dist(h, bj)) / nij -
                             (ni * nj * best) / (nij * nij);
            dist(h, bi) = d;
            dist(bi, h) = d;
        }
        sizes[static_cast<std::size_t>(bi)] = nij;
        active[static_cast<std::size_t>(bj)] = false;
        for (int s = 0; s < n; ++s)
            if (member_of[static_cast<std::size_t>(s)] == bj) member_of[static_cast<std::size_t>(s)] = bi;
    }

    // Compact active slots to labels 0..K-1 in slot order.
    std::vector<int> slot_label(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (int s = 0; s < n; ++s)
        if (active[static_cast<std::size_t>(s)]) slot_label[static_cast<std::size_t>(s)] = next++;
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) labels[static_cast<std::size_t>(s)] = slot_label[static_cast<std::size_t>(member_of[static_cast<std::size_t>(s)])];
    return labels;
}

namespace {

struct Contingency {
    std::vector<std::vector<long long>> counts;  // rows: a classes, cols: b classes
    std::vector<long long> row_sums, col_sums;
    long long n = 0;
};

Contingency make_contingency(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("clustering metrics: label vectors must be equal non-zero length");
    std::map<int, int> amap, bmap;
    for (int v : a) amap.emplace(v, 0);
    for (int v : b) bmap.emplace(v, 0);
    int idx = 0;
    for (auto& kv : amap) kv.second = idx++;
    idx = 0;
    for (auto& kv : bmap) kv.second = idx++;
    Contingency c;
    c.counts.assign(amap.size(), std::vector<long long>(bmap.size(), 0));
    c.row_sums.assign(amap.size(), 0);
    c.col_sums.assign(bmap.size(), 0);
    c.n = static_cast<long long>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const int r = amap[a[i]];
        const int col = bmap[b[i]];
        ++c.counts[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
        ++c.row_sums[static_cast<std::size_t>(r)];
        ++c.col_sums[static_cast<std::size_t>(col)];
    }
    return c;
}

double entropy(const std::vector<long long>& sums, long long n) {
    double h = 0.0;
    for (long long s : sums) {
        if (s == 0) continue;
        const double p = static_cast<double>(s) / n;
        h -= p * std::log(p);
    }
    return h;
}

double mutual_information(const Contingency& c) {
    double mi = 0.0;
    const double n = static_cast<double>(c.n);
    for (std::size_t i = 0; i < c.counts.size(); ++i)
        for (std::size_t j = 0; j < c.counts[i].size(); ++j) {
            const long long nij = c.counts[i][j];
            if (nij == 0) continue;
            mi += (nij / n) * std::log(n * nij / (static_cast<double>(c.row_sums[i]) * c.col_sums[j]));
        }
    return std::max(0.0, mi);
}

// Expected MI under the hypergeometric permutation model.
double expected_mutual_information(const Contingency& c) {
    const long long n = c.n;
    const double logn = std::log(static_cast<double>(n));
    double emi = 0.0;
    for (long long ai : c.row_sums) {
        for (long long bj : c.col_sums) {
            const long long lo = std::max<long long>(1, ai + bj - n);
            const long long hi = std::min(ai, bj);
            for (long long nij = lo; nij <= hi; ++nij) {
                // log hypergeometric pmf P(nij | ai, bj, n)
                const double logp = std::lgamma(ai + 1) - std::lgamma(nij + 1) - std::lgamma(ai - nij + 1) +
                                    std::lgamma(static_cast<double>(n - ai + 1)) -
                                    std::lgamma(static_cast<double>(bj - nij + 1)) -
                                    std::lgamma(static_cast<double>(n - ai - bj + nij + 1)) -
                                    (std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(bj + 1)) -
                                     std::lgamma(static_cast<double>(n - bj + 1)));
                const double term = (static_cast<double>(nij) / n) *
                                    (std::log(static_cast<double>(nij)) + logn -
                                     std::log(static_cast<double>(ai)) - std::log(static_cast<double>(bj)));
                emi += std::exp(logp) * term;
            }
        }
    }
    return emi;
}

double binom2(long long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

}  // namespace

double ami(const std::vector<int>& a, const std::vector<int>& b) {
    const Contingency c = make_contingency(a, b);
    const double ha = entropy(c.row_sums, c.n);
    const double hb = entropy(c.col_sums, c.n);
    if (ha == 0.0 && hb == 0.0) return 1.0;  // both single-cluster: identical partitions
    const double mi = mutual_information(c);
    const double emi = expected_mutual_information(c);
    const double denom = std::max(ha, hb) - emi;
    if (std::abs(denom) < 1e-15) return 0.0;
    return (mi - emi) / denom;
}

double ari(const std::vector<int>& a, const std::vector<int>& b) {
    const Contingency c = make_contingency(a, b);
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (std::size_t i = 0; i < c.counts.size(); ++i)
        for (long long nij : c.counts[i]) sum_ij += binom2(nij);
    for (long long ai : c.row_sums) sum_a += binom2(ai);
    for (long long bj : c.col_sums) sum_b += binom2(bj);
    const double total = binom2(c.n);
    const double expected = sum_a * sum_b / total;
    const double maximum = 0.5 * (sum_a + sum_b);
    if (std::abs(maximum - expected) < 1e-15)
        return std::abs(sum_ij - expected) < 1e-15 ? 1.0 : 0.0;
    return (sum_ij - expected) / (maximum - expected);
}

double v_measure(const std::vector<int>& a, const std::vector<int>& b) {
    const Contingency c = make_contingency(a, b);
    const double ha = entropy(c.row_sums, c.n);
    const double hb = entropy(c.col_sums, c.n);
    if (ha == 0.0 || hb == 0.0) return (ha == 0.0 && hb == 0.0) ? 1.0 : 0.0;
    const double mi = mutual_information(c);
    const double h = mi / ha;  // 1 - H(a|b)/H(a)
    const double comp = mi / hb;
    if (h + comp == 0.0) return 0.0;
    return 2.0 * h * comp / (h + comp);
}

double ncm_task_eval(const Eigen::MatrixXd& train, const std::vector<int>& train_labels,
                     const Eigen::MatrixXd& test, const std::vector<int>& test_labels) {
    const predict::NCMModel model = predict::ncm_fit(train, train_labels);
    if (test.rows() == 0)
        throw std::invalid_argument("ncm_task_eval: empty test set");
    int correct = 0;
    for (Eigen::Index i = 0; i < test.rows(); ++i)
        if (predict::ncm_predict(test.row(i).transpose(), model) == test_labels[static_cast<std::size_t>(i)])
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.rows());
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
    MetricSummary s;
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    if (values.size() > 1) {
        double acc = 0.0;
        for (double v : values) acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / (values.size() - 1));
    }
    return s;
}

}  // namespace

ProtocolReport run_protocol(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                            const TaskSelection& tasks, std::uint64_t seed, int n_repeats,
                            bool normalize) {
    const int n = static_cast<int>(features.rows());
    if (labels.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("run_protocol: features/labels mismatch");

    Eigen::MatrixXd x = features;
    if (normalize)
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double nrm = x.row(i).norm();
            if (nrm > 0.0) x.row(i) /= nrm;
        }

    std::vector<int> classes(labels);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    ProtocolReport report;
    report.n_classes = static_cast<int>(classes.size());
    const SplitPlan plan = make_split_plan(n, n_repeats, seed);

    std::vector<double> maps, p1s, p5s, amis, aris, vs, accs;
    for (int r = 0; r < n_repeats; ++r) {
        const auto& mask = plan.in_train[static_cast<std::size_t>(r)];
        std::vector<int> train_idx, test_idx;
        for (int i = 0; i < n; ++i) (mask[static_cast<std::size_t>(i)] ? train_idx : test_idx).push_back(i);
        Eigen::MatrixXd train(train_idx.size(), x.cols()), test(test_idx.size(), x.cols());
        std::vector<int> train_y(train_idx.size()), test_y(test_idx.size());
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
            train.row(static_cast<Eigen::Index>(i)) = x.row(train_idx[i]);
            train_y[i] = labels[static_cast<std::size_t>(train_idx[i])];
        }
        for (std::size_t i = 0; i < test_idx.size(); ++i) {
            test.row(static_cast<Eigen::Index>(i)) = x.row(test_idx[i]);
            test_y[i] = labels[static_cast<std::size_t>(test_idx[i])];
        }

        SplitResult sr;
        if (tasks.retrieval) {
            const RetrievalMetrics m = retrieval_eval(test, test_y, train, train_y);
            sr.map = m.mean_ap;
            sr.p1 = m.p_at_1;
            sr.p5 = m.p_at_5;
            maps.push_back(sr.map);
            p1s.push_back(sr.p1);
            p5s.push_back(sr.p5);
        }
        if (tasks.clustering) {
            ClusterStats st;
            const std::vector<int> assign =
                centroid_linkage_cluster(train, report.n_classes, &st);
            sr.ami = ami(train_y, assign);
            sr.ari = ari(train_y, assign);
            sr.v = v_measure(train_y, assign);
            sr.cluster_inversions = st.inversions;
            amis.push_back(sr.ami);
            aris.push_back(sr.ari);
            vs.push_back(sr.v);
        }
        if (tasks.ncm) {
            sr.ncm_accuracy = ncm_task_eval(train, train_y, test, test_y);
            accs.push_back(sr.ncm_accuracy);
        }
        report.splits.push_back(sr);
    }
    report.map = summarize(maps);
    report.p1 = summarize(p1s);
    report.p5 = summarize(p5s);
    report.ami = summarize(amis);
    report.ari = summarize(aris);
    report.v = summarize(vs);
    report.ncm_accuracy = summarize(accs);
    return report;
}

}  // namespace evalsuite
}  // namespace docrep
