#pragma once

#include <map>
#include <string>
#include <vector>

#include "docrep/gmm.hpp"
#include "docrep/linalg.hpp"
#include "docrep/mlp.hpp"
#include "docrep/predict.hpp"

namespace docrep {
namespace pipeline {

/// Common framing for persisted models: magic "DMD1", version u16, 4-byte
/// type tag (pca/gmm/svm/ncm/mlp), u64-length JSON header (shapes, metadata,
/// upstream hashes, label names), then the float64 parameter payload.
struct ModelMeta {
    std::string descriptor;    // feature family the model belongs to
    std::string config_hash;   // hash of the producing config
    std::string upstream_hash; // content hash of the model this one was trained on top of
    std::vector<std::string> labels;  // class names for supervised models
    std::map<std::string, std::string> extra;
};

void save_pca(const std::string& path, const linalg::PCAModel& model, const ModelMeta& meta = {});
linalg::PCAModel load_pca(const std::string& path, ModelMeta* meta = nullptr);

void save_gmm(const std::string& path, const gmm::DiagonalGMM& model, const ModelMeta& meta = {});
gmm::DiagonalGMM load_gmm(const std::string& path, ModelMeta* meta = nullptr);

void save_svm(const std::string& path, const predict::LinearSVMModel& model, const ModelMeta& meta = {});
predict::LinearSVMModel load_svm(const std::string& path, ModelMeta* meta = nullptr);

void save_ncm(const std::string& path, const predict::NCMModel& model, const ModelMeta& meta = {});
predict::NCMModel load_ncm(const std::string& path, ModelMeta* meta = nullptr);

void save_mlp(const std::string& path, const mlp::MLPModel& model, const ModelMeta& meta = {});
mlp::MLPModel load_mlp(const std::string& path, ModelMeta* meta = nullptr);

/// Type tag of a model file without loading the payload.
std::string peek_model_type(const std::string& path);

/// Content hash (FNV-1a over the f64 payload) identifying a model's
/// parameters; used to chain artifact compatibility.
std::string pca_content_hash(const linalg::PCAModel& model);
std::string gmm_content_hash(const gmm::DiagonalGMM& model);
std::string mlp_content_hash(const mlp::MLPModel& model);

}  // namespace pipeline
}  // namespace docrep
