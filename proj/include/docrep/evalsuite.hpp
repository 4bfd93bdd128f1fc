#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace docrep {
namespace evalsuite {

/// n_repeats random half splits; in_train[r][i] says whether sample i trains
/// in repeat r. Halves are balanced by count (train gets the extra sample
/// for odd n).
struct SplitPlan {
    std::uint64_t seed = 0;
    int n_repeats = 5;
    std::vector<std::vector<std::uint8_t>> in_train;
};
SplitPlan make_split_plan(int n_samples, int n_repeats, std::uint64_t seed);

/// Gallery indices sorted by descending dot product with the query; ties by
/// ascending index.
std::vector<int> rank_gallery(const Eigen::VectorXd& query, const Eigen::MatrixXd& gallery);

/// AP over an ordered relevance list: (1/R) * sum over relevant ranks k of
/// precision@k. Throws when no item is relevant.
double average_precision(const std::vector<std::uint8_t>& relevance);

struct RetrievalMetrics {
    double mean_ap = 0.0;
    double p_at_1 = 0.0;
    double p_at_5 = 0.0;
    int queries_scored = 0;   // queries with at least one relevant gallery item
    int queries_skipped = 0;  // excluded per the zero-relevant rule
};

/// Every test row queries the train set; relevance = equal label. Queries
/// without any relevant gallery item are excluded from all three averages.
RetrievalMetrics retrieval_eval(const Eigen::MatrixXd& test, const std::vector<int>& test_labels,
                                const Eigen::MatrixXd& train, const std::vector<int>& train_labels);

struct ClusterStats {
    int inversions = 0;         // merges at a smaller distance than an earlier one
    double last_merge_dist = 0.0;
};

/// Agglomerative clustering with centroid linkage (squared Euclidean centroid
/// distances, Lance-Williams update). Merge ties break on the
/// lexicographically smallest active cluster-id pair; the merged cluster
/// keeps the smaller id. Output labels are in [0, K).
std::vector<int> centroid_linkage_cluster(const Eigen::MatrixXd& features, int k,
                                          ClusterStats* stats = nullptr);

/// Adjusted mutual information with the max(H(a),H(b)) normalizer and the
/// hypergeometric expected-MI model.
double ami(const std::vector<int>& a, const std::vector<int>& b);
/// Adjusted Rand index (pair-counting adjustment).
double ari(const std::vector<int>& a, const std::vector<int>& b);
/// 2hc/(h+c) from the conditional entropies.
double v_measure(const std::vector<int>& a, const std::vector<int>& b);

/// NCM fit on train, overall accuracy on test.
double ncm_task_eval(const Eigen::MatrixXd& train, const std::vector<int>& train_labels,
                     const Eigen::MatrixXd& test, const std::vector<int>& test_labels);

struct TaskSelection {
    bool retrieval = true;
    bool clustering = true;
    bool ncm = true;
};

struct SplitResult {
    double map = 0.0, p1 = 0.0, p5 = 0.0;
    double ami = 0.0, ari = 0.0, v = 0.0;
    double ncm_accuracy = 0.0;
    int cluster_inversions = 0;
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0;  // sample stddev, 0 for a single repeat
};

struct ProtocolReport {
    std::vector<SplitResult> splits;
    MetricSummary map, p1, p5, ami, ari, v, ncm_accuracy;
    int n_classes = 0;
};

/// The 5x random half-split protocol: per split, retrieval ranks train from
/// test queries, clustering groups the train half into #classes clusters,
/// and NCM classifies the test half. Rows are L2-normalized first when
/// normalize is set (the features contract for dot-product ranking).
ProtocolReport run_protocol(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                            const TaskSelection& tasks, std::uint64_t seed, int n_repeats = 5,
                            bool normalize = true);

}  // namespace evalsuite
}  // namespace docrep
