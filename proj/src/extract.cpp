#include "docrep/extract.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "docrep/errors.hpp"
#include "docrep/image_io.hpp"
#include "docrep/parallel.hpp"

namespace docrep {
namespace pipeline {

using nlohmann::json;

std::string descriptor_name(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::rl: return "rl";
        case DescriptorKind::fv4: return "fv4";
        case DescriptorKind::fv16: return "fv16";
        case DescriptorKind::fv256: return "fv256";
        case DescriptorKind::fv256pca: return "fv256pca";
        case DescriptorKind::hybrid_act: return "hybrid-act";
    }
    return "?";
}

DescriptorKind descriptor_from_name(const std::string& name) {
    if (name == "rl") return DescriptorKind::rl;
    if (name == "fv4") return DescriptorKind::fv4;
    if (name == "fv16") return DescriptorKind::fv16;
    if (name == "fv256") return DescriptorKind::fv256;
    if (name == "fv256pca") return DescriptorKind::fv256pca;
    if (name == "hybrid-act") return DescriptorKind::hybrid_act;
    throw std::invalid_argument("unknown descriptor '" + name +
                                "' (expected rl|fv4|fv16|fv256|fv256pca|hybrid-act)");
}

int fv_grid_for(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::fv4: return 8;
        case DescriptorKind::fv16: return 4;
        default: return 1;  // fv256 and fv256pca encode the whole page
    }
}

int fv_components_for(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::fv4: return 4;
        case DescriptorKind::fv16: return 16;
        default: return 256;
    }
}

namespace {

json sift_stage_json(const ExtractConfig& c) {
    return json{{"max_pixels", c.max_pixels},
                {"scales", c.patches.scales},
                {"stride", c.patches.stride}};
}

}  // namespace

std::string config_json(const ExtractConfig& c, DescriptorKind kind) {
    json j;
    j["descriptor"] = descriptor_name(kind);
    j["max_pixels"] = c.max_pixels;
    if (kind == DescriptorKind::rl ||
        (kind == DescriptorKind::hybrid_act)) {
        j["binarize_threshold"] = c.binarize_threshold;
        j["rl_bins"] = c.rl.quantization_bins;
        j["rl_levels"] = c.rl.pyramid_levels;
        j["rl_per_cell"] = c.rl.per_cell_normalize;
    }
    if (kind != DescriptorKind::rl) {
        j["sift"] = sift_stage_json(c);
        j["fv_grid"] = fv_grid_for(kind);
        j["fv_components"] = fv_components_for(kind);
        j["fv_renorm_global"] = c.fv_renormalize_global;
    }
    if (kind == DescriptorKind::hybrid_act) j["mlp_layer"] = c.mlp_layer;
    return j.dump();
}

std::string config_hash(const ExtractConfig& c, DescriptorKind kind) {
    return hash_string(config_json(c, kind));
}

std::string sift_stage_hash(const ExtractConfig& c) {
    return hash_string(sift_stage_json(c).dump());
}

int descriptor_dim(DescriptorKind kind, const ExtractConfig& config, const ExtractModels* models) {
    switch (kind) {
        case DescriptorKind::rl:
            return runlength::rl_descriptor_dim(config.rl);
        case DescriptorKind::fv4:
        case DescriptorKind::fv16:
        case DescriptorKind::fv256: {
            const int grid = fv_grid_for(kind);
            const int n = models && models->gmm ? models->gmm->components() : fv_components_for(kind);
            const int d = models && models->gmm ? models->gmm->dim()
                          : (models && models->sift_pca ? models->sift_pca->out_dim() + 3 : 80);
            return grid * grid * 2 * n * d;
        }
        case DescriptorKind::fv256pca:
            return models && models->fv_pca ? models->fv_pca->out_dim() : 4096;
        case DescriptorKind::hybrid_act:
            if (models && models->mlp) {
                const auto& w = models->mlp->weights;
                const int idx = std::clamp(config.mlp_layer, 1, models->mlp->num_layers() - 1);
                return static_cast<int>(w[static_cast<std::size_t>(idx - 1)].rows());
            }
            return 0;
    }
    return 0;
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw FormatError(message);
}

void check_models(DescriptorKind kind, const ExtractConfig& config, const ExtractModels& models) {
    if (kind == DescriptorKind::rl) return;
    DescriptorKind base = kind == DescriptorKind::hybrid_act ? models.mlp_base : kind;
    if (base != DescriptorKind::rl) {
        require(models.sift_pca.has_value(), "extract: descriptor '" + descriptor_name(kind) +
                                                 "' requires a SIFT PCA model");
        require(models.gmm.has_value(),
                "extract: descriptor '" + descriptor_name(kind) + "' requires a GMM model");
        require(models.gmm->dim() == models.sift_pca->out_dim() + 3,
                "extract: GMM dimension does not match PCA output + geometry");
        if (!models.sift_pca_expected_stage_hash.empty())
            require(models.sift_pca_expected_stage_hash == sift_stage_hash(config),
                    "extract: SIFT PCA was trained under a different patch/imaging config "
                    "(config hash mismatch)");
        if (!models.gmm_expected_pca_hash.empty())
            require(models.gmm_expected_pca_hash == pca_content_hash(*models.sift_pca),
                    "extract: GMM was trained on a different SIFT PCA (upstream hash mismatch)");
        if (base == DescriptorKind::fv256pca)
            require(models.fv_pca.has_value(), "extract: fv256pca requires a feature PCA model");
    }
    if (kind == DescriptorKind::hybrid_act)
        require(models.mlp.has_value(), "extract: hybrid-act requires an MLP model");
}

}  // namespace

Eigen::VectorXd encode_fv_page(const GrayImage& gray, DescriptorKind kind,
                               const ExtractConfig& config, const linalg::PCAModel& sift_pca,
                               const gmm::DiagonalGMM& g) {
    const patchdesc::RawDescriptors raw = patchdesc::extract_raw(gray, config.patches);
    const patchdesc::DescriptorSet set =
        patchdesc::project_augment_all(raw, gray.width, gray.height, sift_pca, config.patches);
    return fisher::fv_grid_encode(set.values, set.norm_xy, g, fv_grid_for(kind),
                                  config.fv_renormalize_global);
}

namespace {

Eigen::VectorXd extract_one(const std::string& path, DescriptorKind kind,
                            const ExtractConfig& config, const ExtractModels& models) {
    const DescriptorKind base = kind == DescriptorKind::hybrid_act ? models.mlp_base : kind;
    GrayImage gray = imaging::load_gray(path);
    gray = imaging::downscale_to_max_pixels(gray, config.max_pixels);

    Eigen::VectorXd feature;
    if (base == DescriptorKind::rl) {
        const BinaryImage bin = imaging::binarize(gray, config.binarize_threshold);
        feature = runlength::rl_descriptor(bin, config.rl);
    } else {
        feature = encode_fv_page(gray, base, config, *models.sift_pca, *models.gmm);
        if (base == DescriptorKind::fv256pca)
            feature = fisher::fv_pca_reduce(feature, *models.fv_pca);
    }
    if (kind == DescriptorKind::hybrid_act)
        feature = mlp::extract_activation(feature, *models.mlp, config.mlp_layer);
    return feature;
}

}  // namespace

FeatureSet extract(const Manifest& manifest, DescriptorKind kind, const ExtractConfig& config,
                   const ExtractModels& models, ExtractReport* report) {
    check_models(kind, config, models);
    const std::size_t n = manifest.records.size();
    if (n == 0) throw std::invalid_argument("extract: empty manifest");

    std::vector<Eigen::VectorXd> rows(n);
    std::vector<std::string> errors(n);
    parallel_for_index(n, [&](std::size_t i) {
        try {
            rows[i] = extract_one(manifest.records[i].path, kind, config, models);
        } catch (const std::exception& e) {
            errors[i] = e.what();
            if (errors[i].empty()) errors[i] = "unknown error";
        }
    });

    FeatureSet fs;
    fs.descriptor = descriptor_name(kind);
    fs.config_hash = config_hash(config, kind);
    std::size_t failed = 0;
    Eigen::Index dim = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) {
            ++failed;
            if (report) {
                report->failed_ids.push_back(manifest.records[i].id);
                report->failure_reasons.push_back(errors[i]);
            }
            continue;
        }
        if (dim < 0) dim = rows[i].size();
    }
    if (failed * 10 > n)
        throw FormatError("extract: " + std::to_string(failed) + "/" + std::to_string(n) +
                          " images failed (more than 10%)");
    if (dim < 0) throw FormatError("extract: every image failed");

    fs.matrix.resize(static_cast<Eigen::Index>(n - failed), dim);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!errors[i].empty()) continue;
        if (rows[i].size() != dim)
            throw FormatError("extract: inconsistent feature dimension for id " +
                              manifest.records[i].id);
        fs.matrix.row(r) = rows[i].cast<float>();
        fs.ids.push_back(manifest.records[i].id);
        ++r;
    }
    return fs;
}

SiftSample sample_sift(const Manifest& manifest, const ExtractConfig& config, int max_descriptors,
                       std::uint64_t seed) {
    if (manifest.records.empty())
        throw std::invalid_argument("sample_sift: empty manifest");
    const std::size_t n = manifest.records.size();
    std::vector<Eigen::MatrixXd> raws(n);
    std::vector<Eigen::MatrixXd> geoms(n);
    parallel_for_index(n, [&](std::size_t i) {
        GrayImage gray = imaging::load_gray(manifest.records[i].path);
        gray = imaging::downscale_to_max_pixels(gray, config.max_pixels);
        const patchdesc::RawDescriptors raw = patchdesc::extract_raw(gray, config.patches);
        const auto [mn, mx] = std::minmax_element(config.patches.scales.begin(), config.patches.scales.end());
        const double denom = std::log2(static_cast<double>(*mx) / *mn);
        raws[i] = raw.values;
        geoms[i].resize(raw.values.rows(), 3);
        for (Eigen::Index t = 0; t < raw.values.rows(); ++t) {
            const patchdesc::Patch& p = raw.patches[static_cast<std::size_t>(t)];
            geoms[i](t, 0) = p.center_x / gray.width;
            geoms[i](t, 1) = p.center_y / gray.height;
            geoms[i](t, 2) = denom > 0.0 ? std::log2(static_cast<double>(p.size) / *mn) / denom : 0.0;
        }
    });

    std::size_t total = 0;
    for (const auto& m : raws) total += static_cast<std::size_t>(m.rows());
    if (total == 0) throw NumericalError("sample_sift: no descriptors survived the energy threshold");

    std::vector<std::size_t> pick(total);
    std::iota(pick.begin(), pick.end(), 0);
    if (max_descriptors > 0 && total > static_cast<std::size_t>(max_descriptors)) {
        std::mt19937_64 rng(seed);
        std::shuffle(pick.begin(), pick.end(), rng);
        pick.resize(static_cast<std::size_t>(max_descriptors));
        std::sort(pick.begin(), pick.end());
    }

    SiftSample sample;
    sample.raw.resize(static_cast<Eigen::Index>(pick.size()), 128);
    sample.geometry.resize(static_cast<Eigen::Index>(pick.size()), 3);
    std::size_t img = 0, base = 0;
    for (std::size_t out = 0; out < pick.size(); ++out) {
        while (pick[out] >= base + static_cast<std::size_t>(raws[img].rows())) {
            base += static_cast<std::size_t>(raws[img].rows());
            ++img;
        }
        const Eigen::Index local = static_cast<Eigen::Index>(pick[out] - base);
        sample.raw.row(static_cast<Eigen::Index>(out)) = raws[img].row(local);
        sample.geometry.row(static_cast<Eigen::Index>(out)) = geoms[img].row(local);
    }
    return sample;
}

FeatureSet activations_from_features(const FeatureSet& base, const mlp::MLPModel& model,
                                     int layer_index) {
    FeatureSet out;
    out.ids = base.ids;
    out.descriptor = "hybrid-act";
    out.config_hash = base.config_hash;
    const int dim = static_cast<int>(model.weights[static_cast<std::size_t>(
        std::clamp(layer_index, 1, model.num_layers() - 1) - 1)].rows());
    out.matrix.resize(base.matrix.rows(), dim);
    const std::size_t n = static_cast<std::size_t>(base.matrix.rows());
    parallel_for_index(n, [&](std::size_t i) {
        const Eigen::VectorXd x = base.matrix.row(static_cast<Eigen::Index>(i)).transpose().cast<double>();
        out.matrix.row(static_cast<Eigen::Index>(i)) =
            mlp::extract_activation(x, model, layer_index).cast<float>();
    });
    return out;
}

}  // namespace pipeline
}  // namespace docrep
