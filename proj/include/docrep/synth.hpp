#pragma once

#include <cstdint>
#include <string>

#include "docrep/image.hpp"
#include "docrep/manifest.hpp"

namespace docrep {
namespace pipeline {

/// Synthetic template corpus: each class is a fixed page layout (pseudo-text
/// line blocks, filled rectangles, horizontal rules); instances add
/// salt-and-pepper noise, a global translation, and line-thickness jitter.
/// nuisance > 0 additionally re-samples designated elements per instance
/// (position jitter, presence toggling), creating within-class layout
/// variation that is not class-informative.
struct SynthConfig {
    int n_classes = 5;
    int per_class = 40;
    int page_width = 500;
    int page_height = 650;
    double flip_prob = 0.01;       // salt-and-pepper, <= 0.02
    double translate_frac = 0.03;  // of page size
    int thickness_jitter = 1;      // pixels
    double nuisance = 0.0;         // 0..1
    std::uint64_t seed = 42;
};

/// Renders the corpus into out_dir (one subdirectory per class, binary PNG
/// pages) and returns the manifest, which is also written to
/// out_dir/manifest.jsonl. Same config and seed give identical bytes.
Manifest synth_docs(const std::string& out_dir, const SynthConfig& config);

/// One rendered instance without touching the filesystem (test support).
BinaryImage synth_page(const SynthConfig& config, int class_idx, int instance_idx);

}  // namespace pipeline
}  // namespace docrep
