#include "docrep/modelio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "docrep/errors.hpp"
#include "docrep/featureio.hpp"

namespace docrep {
namespace pipeline {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'D', 'M', 'D', '1'};
constexpr std::uint16_t kVersion = 1;

void write_exact(std::ofstream& out, const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw FormatError("model: write failed");
}

void read_exact(std::ifstream& in, void* data, std::size_t size, const std::string& what) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (in.gcount() != static_cast<std::streamsize>(size))
        throw FormatError("model: truncated while reading " + what + " at byte offset " +
                          std::to_string(std::max<long long>(0, static_cast<long long>(in.tellg()))));
}

json meta_to_json(const ModelMeta& meta) {
    json j;
    j["descriptor"] = meta.descriptor;
    j["config_hash"] = meta.config_hash;
    j["upstream_hash"] = meta.upstream_hash;
    j["labels"] = meta.labels;
    j["extra"] = meta.extra;
    return j;
}

ModelMeta meta_from_json(const json& j) {
    ModelMeta meta;
    meta.descriptor = j.value("descriptor", "");
    meta.config_hash = j.value("config_hash", "");
    meta.upstream_hash = j.value("upstream_hash", "");
    if (j.contains("labels")) meta.labels = j["labels"].get<std::vector<std::string>>();
    if (j.contains("extra")) meta.extra = j["extra"].get<std::map<std::string, std::string>>();
    return meta;
}

void save_framed(const std::string& path, const std::string& type, const json& header,
                 const std::vector<const Eigen::MatrixXd*>& arrays) {
    if (type.size() != 3) throw std::invalid_argument("model type tag must be 3 chars");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("model: cannot open for writing: " + path);
    write_exact(out, kMagic, 4);
    write_exact(out, &kVersion, 2);
    char tag[4] = {type[0], type[1], type[2], '\0'};
    write_exact(out, tag, 4);
    const std::string text = header.dump();
    const std::uint64_t len = text.size();
    write_exact(out, &len, 8);
    write_exact(out, text.data(), text.size());
    for (const Eigen::MatrixXd* m : arrays) {
        // Row-major f64 payload.
        for (Eigen::Index r = 0; r < m->rows(); ++r)
            for (Eigen::Index c = 0; c < m->cols(); ++c) {
                const double v = (*m)(r, c);
                write_exact(out, &v, 8);
            }
    }
}

struct Framed {
    std::string type;
    json header;
    std::ifstream in;
};

Framed open_framed(const std::string& path, const std::string& expect_type) {
    Framed f;
    f.in.open(path, std::ios::binary);
    if (!f.in) throw FormatError("model: cannot open: " + path);
    char magic[4];
    read_exact(f.in, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("model: magic mismatch at byte offset 0 in " + path);
    std::uint16_t version = 0;
    read_exact(f.in, &version, 2, "version");
    if (version != kVersion)
        throw FormatError("model: unsupported version " + std::to_string(version));
    char tag[4];
    read_exact(f.in, tag, 4, "type tag");
    f.type.assign(tag, tag + 3);
    if (!expect_type.empty() && f.type != expect_type)
        throw FormatError("model: expected type '" + expect_type + "' but file holds '" + f.type +
                          "': " + path);
    std::uint64_t len = 0;
    read_exact(f.in, &len, 8, "header length");
    std::string text(len, '\0');
    if (len > 0) read_exact(f.in, text.data(), len, "header");
    try {
        f.header = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("model: bad JSON header: ") + e.what());
    }
    return f;
}

Eigen::MatrixXd read_matrix(Framed& f, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            double v = 0.0;
            read_exact(f.in, &v, 8, what);
            m(r, c) = v;
        }
    if (!m.allFinite()) throw FormatError("model: non-finite values in " + what);
    return m;
}

void append_matrix_bytes(std::string& buf, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double v = m(r, c);
            buf.append(reinterpret_cast<const char*>(&v), 8);
        }
}

std::vector<int> to_int_ids(const json& j) {
    return j.get<std::vector<int>>();
}

}  // namespace

void save_pca(const std::string& path, const linalg::PCAModel& model, const ModelMeta& meta) {
    json header = meta_to_json(meta);
    header["in_dim"] = model.in_dim();
    header["out_dim"] = model.out_dim();
    const Eigen::MatrixXd mean = model.mean.transpose();
    const Eigen::MatrixXd variances = model.explained_variances.transpose();
    save_framed(path, "pca", header, {&mean, &model.components, &variances});
}

linalg::PCAModel load_pca(const std::string& path, ModelMeta* meta) {
    Framed f = open_framed(path, "pca");
    const Eigen::Index in_dim = f.header.at("in_dim").get<Eigen::Index>();
    const Eigen::Index out_dim = f.header.at("out_dim").get<Eigen::Index>();
    if (in_dim < 1 || out_dim < 1 || out_dim > in_dim)
        throw FormatError("pca model: invalid dimensions in header");
    linalg::PCAModel model;
    model.mean = read_matrix(f, 1, in_dim, "pca mean").transpose();
    model.components = read_matrix(f, out_dim, in_dim, "pca components");
    model.explained_variances = read_matrix(f, 1, out_dim, "pca variances").transpose();
    if (meta) *meta = meta_from_json(f.header);
    return model;
}

void save_gmm(const std::string& path, const gmm::DiagonalGMM& model, const ModelMeta& meta) {
    json header = meta_to_json(meta);
    header["components"] = model.components();
    header["dim"] = model.dim();
    const Eigen::MatrixXd weights = model.weights.transpose();
    save_framed(path, "gmm", header, {&weights, &model.means, &model.variances});
}

gmm::DiagonalGMM load_gmm(const std::string& path, ModelMeta* meta) {
    Framed f = open_framed(path, "gmm");
    const Eigen::Index n = f.header.at("components").get<Eigen::Index>();
    const Eigen::Index d = f.header.at("dim").get<Eigen::Index>();
    if (n < 1 || d < 1) throw FormatError("gmm model: invalid dimensions in header");
    gmm::DiagonalGMM model;
    model.weights = read_matrix(f, 1, n, "gmm weights").transpose();
    model.means = read_matrix(f, n, d, "gmm means");
    model.variances = read_matrix(f, n, d, "gmm variances");
    if (std::abs(model.weights.sum() - 1.0) > 1e-9 || (model.weights.array() <= 0.0).any())
        throw FormatError("gmm model: weights must be positive and sum to 1");
    if ((model.variances.array() <= 0.0).any())
        throw FormatError("gmm model: variances must be positive");
    if (meta) *meta = meta_from_json(f.header);
    return model;
}

void save_svm(const std::string& path, const predict::LinearSVMModel& model, const ModelMeta& meta) {
    json header = meta_to_json(meta);
    header["classes"] = model.class_ids;
    header["dim"] = model.weights.cols();
    header["lambda"] = model.lambda;
    const Eigen::MatrixXd biases = model.biases.transpose();
    save_framed(path, "svm", header, {&model.weights, &biases});
}

predict::LinearSVMModel load_svm(const std::string& path, ModelMeta* meta) {
    Framed f = open_framed(path, "svm");
    predict::LinearSVMModel model;
    model.class_ids = to_int_ids(f.header.at("classes"));
    const Eigen::Index c = static_cast<Eigen::Index>(model.class_ids.size());
    const Eigen::Index d = f.header.at("dim").get<Eigen::Index>();
    if (c < 2 || d < 1) throw FormatError("svm model: invalid dimensions in header");
    model.lambda = f.header.value("lambda", 0.0);
    model.weights = read_matrix(f, c, d, "svm weights");
    model.biases = read_matrix(f, 1, c, "svm biases").transpose();
    if (meta) *meta = meta_from_json(f.header);
    return model;
}

void save_ncm(const std::string& path, const predict::NCMModel& model, const ModelMeta& meta) {
    json header = meta_to_json(meta);
    header["classes"] = model.class_ids;
    header["dim"] = model.centroids.cols();
    save_framed(path, "ncm", header, {&model.centroids});
}

predict::NCMModel load_ncm(const std::string& path, ModelMeta* meta) {
    Framed f = open_framed(path, "ncm");
    predict::NCMModel model;
    model.class_ids = to_int_ids(f.header.at("classes"));
    const Eigen::Index c = static_cast<Eigen::Index>(model.class_ids.size());
    const Eigen::Index d = f.header.at("dim").get<Eigen::Index>();
    if (c < 1 || d < 1) throw FormatError("ncm model: invalid dimensions in header");
    model.centroids = read_matrix(f, c, d, "ncm centroids");
    if (meta) *meta = meta_from_json(f.header);
    return model;
}

void save_mlp(const std::string& path, const mlp::MLPModel& model, const ModelMeta& meta) {
    json header = meta_to_json(meta);
    json shapes = json::array();
    for (const auto& w : model.weights) shapes.push_back({w.rows(), w.cols()});
    header["layer_shapes"] = shapes;
    header["dropout_rate"] = model.dropout_rate;
    std::vector<const Eigen::MatrixXd*> arrays;
    std::vector<Eigen::MatrixXd> bias_rows;
    bias_rows.reserve(model.biases.size());
    for (const auto& b : model.biases) bias_rows.emplace_back(b.transpose());
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
        arrays.push_back(&model.weights[i]);
        arrays.push_back(&bias_rows[i]);
    }
    save_framed(path, "mlp", header, arrays);
}

mlp::MLPModel load_mlp(const std::string& path, ModelMeta* meta) {
    Framed f = open_framed(path, "mlp");
    mlp::MLPModel model;
    model.dropout_rate = f.header.value("dropout_rate", 0.0);
    const json& shapes = f.header.at("layer_shapes");
    if (shapes.empty()) throw FormatError("mlp model: no layers in header");
    Eigen::Index prev_out = -1;
    for (const auto& s : shapes) {
        const Eigen::Index rows = s.at(0).get<Eigen::Index>();
        const Eigen::Index cols = s.at(1).get<Eigen::Index>();
        if (rows < 1 || cols < 1) throw FormatError("mlp model: invalid layer shape");
        if (prev_out >= 0 && cols != prev_out)
            throw FormatError("mlp model: layer shapes do not chain");
        prev_out = rows;
        model.weights.push_back(read_matrix(f, rows, cols, "mlp weights"));
        model.biases.push_back(read_matrix(f, 1, rows, "mlp biases").transpose());
    }
    if (meta) *meta = meta_from_json(f.header);
    return model;
}

std::string peek_model_type(const std::string& path) {
    Framed f = open_framed(path, "");
    return f.type;
}

std::string pca_content_hash(const linalg::PCAModel& model) {
    std::string buf;
    append_matrix_bytes(buf, model.mean.transpose());
    append_matrix_bytes(buf, model.components);
    append_matrix_bytes(buf, model.explained_variances.transpose());
    return hash_string(buf);
}

std::string gmm_content_hash(const gmm::DiagonalGMM& model) {
    std::string buf;
    append_matrix_bytes(buf, model.weights.transpose());
    append_matrix_bytes(buf, model.means);
    append_matrix_bytes(buf, model.variances);
    return hash_string(buf);
}

std::string mlp_content_hash(const mlp::MLPModel& model) {
    std::string buf;
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
        append_matrix_bytes(buf, model.weights[i]);
        append_matrix_bytes(buf, model.biases[i].transpose());
    }
    return hash_string(buf);
}

}  // namespace pipeline
}  // namespace docrep
