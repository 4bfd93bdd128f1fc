#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "docrep/featureio.hpp"
#include "docrep/fisher.hpp"
#include "docrep/gmm.hpp"
#include "docrep/linalg.hpp"
#include "docrep/manifest.hpp"
#include "docrep/mlp.hpp"
#include "docrep/patchdesc.hpp"
#include "docrep/runlength.hpp"

namespace docrep {
namespace pipeline {

enum class DescriptorKind { rl, fv4, fv16, fv256, fv256pca, hybrid_act };

std::string descriptor_name(DescriptorKind kind);
DescriptorKind descriptor_from_name(const std::string& name);

/// Everything the per-image pipelines need; one place so config hashes are
/// stable.
struct ExtractConfig {
    std::int64_t max_pixels = 250000;
    float binarize_threshold = 0.5f;
    runlength::RLConfig rl;
    patchdesc::PatchGridConfig patches;
    bool fv_renormalize_global = true;
    int mlp_layer = 1;  // hybrid activations: 1-based hidden layer
};

/// Canonical JSON of the stage-relevant config; its hash is embedded in
/// persisted artifacts.
std::string config_json(const ExtractConfig& config, DescriptorKind kind);
std::string config_hash(const ExtractConfig& config, DescriptorKind kind);
/// Hash of just the patch/imaging stage (what PCA/GMM models depend on).
std::string sift_stage_hash(const ExtractConfig& config);

struct ExtractModels {
    std::optional<linalg::PCAModel> sift_pca;   // 128 -> 77
    std::optional<gmm::DiagonalGMM> gmm;        // over 80-dim descriptors
    std::optional<linalg::PCAModel> fv_pca;     // 40960 -> out
    std::optional<mlp::MLPModel> mlp;           // hybrid activations
    DescriptorKind mlp_base = DescriptorKind::rl;  // feature family the MLP consumes
    // Expected upstream hashes (set when models come from files; empty skips the check).
    std::string gmm_expected_pca_hash;
    std::string sift_pca_expected_stage_hash;
};

struct ExtractReport {
    std::vector<std::string> failed_ids;
    std::vector<std::string> failure_reasons;
};

/// Per-image pipeline over the manifest: imaging -> (runlength |
/// patchdesc -> fisher) -> optional fv PCA -> optional MLP activation.
/// Images are processed in parallel and assembled in manifest order.
/// Unreadable images are skipped and listed in the report; more than 10%
/// failures aborts with FormatError.
FeatureSet extract(const Manifest& manifest, DescriptorKind kind, const ExtractConfig& config,
                   const ExtractModels& models, ExtractReport* report = nullptr);

/// Declared output dimensionality for the kind under this config (models
/// supply the fv-pca width and MLP hidden width when present; otherwise the
/// defaults 4096 / config widths apply).
int descriptor_dim(DescriptorKind kind, const ExtractConfig& config,
                   const ExtractModels* models = nullptr);

/// Grid size and vocabulary size pairings for the FV variants.
int fv_grid_for(DescriptorKind kind);
int fv_components_for(DescriptorKind kind);

/// Uniform random sample (seeded) of raw 128-dim SIFT descriptors with their
/// patch geometry, for PCA/GMM training.
struct SiftSample {
    Eigen::MatrixXd raw;      // M x 128
    Eigen::MatrixXd geometry; // M x 3 (norm_x, norm_y, norm_s)
};
SiftSample sample_sift(const Manifest& manifest, const ExtractConfig& config,
                       int max_descriptors, std::uint64_t seed);

/// Encodes one already-loaded page with the FV pipeline (test support).
Eigen::VectorXd encode_fv_page(const GrayImage& gray, DescriptorKind kind,
                               const ExtractConfig& config, const linalg::PCAModel& sift_pca,
                               const gmm::DiagonalGMM& g);

/// MLP activation features for every row of an existing FeatureSet.
FeatureSet activations_from_features(const FeatureSet& base, const mlp::MLPModel& model,
                                     int layer_index);

}  // namespace pipeline
}  // namespace docrep
