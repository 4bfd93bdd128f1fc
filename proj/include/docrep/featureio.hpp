#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace docrep {
namespace pipeline {

using MatrixRXf = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Persisted matrix of per-sample features.
///
/// On disk: magic "DFS1", format version u16, n u64, d u32, flags u32,
/// n*d little-endian float32 row-major, then a u64-length-prefixed UTF-8
/// JSON trailer carrying ids and metadata.
struct FeatureSet {
    std::vector<std::string> ids;
    MatrixRXf matrix;
    std::string descriptor;   // metadata: descriptor name
    std::string config_hash;  // metadata: producing config hash

    Eigen::Index size() const { return matrix.rows(); }
    Eigen::Index dim() const { return matrix.cols(); }
};

void save_featureset(const std::string& path, const FeatureSet& fs);
FeatureSet load_featureset(const std::string& path);

/// FNV-1a over a canonical JSON dump; chains artifact compatibility.
std::string hash_bytes(const void* data, std::size_t size);
std::string hash_string(const std::string& s);

}  // namespace pipeline
}  // namespace docrep
