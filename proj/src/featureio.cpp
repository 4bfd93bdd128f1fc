#include "docrep/featureio.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "docrep/errors.hpp"

namespace docrep {
namespace pipeline {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts need byte swaps");

namespace {

constexpr char kMagic[4] = {'D', 'F', 'S', '1'};
constexpr std::uint16_t kVersion = 1;

void write_exact(std::ofstream& out, const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw FormatError("featureset: write failed");
}

void read_exact(std::ifstream& in, void* data, std::size_t size, const std::string& what) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (in.gcount() != static_cast<std::streamsize>(size))
        throw FormatError("featureset: truncated while reading " + what + " at byte offset " +
                          std::to_string(static_cast<long long>(in.tellg()) < 0
                                             ? 0
                                             : static_cast<long long>(in.tellg())));
}

}  // namespace

void save_featureset(const std::string& path, const FeatureSet& fs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("featureset: cannot open for writing: " + path);
    write_exact(out, kMagic, 4);
    write_exact(out, &kVersion, 2);
    const std::uint64_t n = static_cast<std::uint64_t>(fs.matrix.rows());
    const std::uint32_t d = static_cast<std::uint32_t>(fs.matrix.cols());
    const std::uint32_t flags = 0;
    write_exact(out, &n, 8);
    write_exact(out, &d, 4);
    write_exact(out, &flags, 4);
    if (fs.ids.size() != n)
        throw FormatError("featureset: id count does not match row count");
    if (n > 0 && d > 0)
        write_exact(out, fs.matrix.data(), sizeof(float) * n * d);

    nlohmann::json trailer;
    trailer["ids"] = fs.ids;
    trailer["metadata"] = {{"descriptor", fs.descriptor}, {"config_hash", fs.config_hash}};
    const std::string text = trailer.dump();
    const std::uint64_t len = text.size();
    write_exact(out, &len, 8);
    write_exact(out, text.data(), text.size());
}

FeatureSet load_featureset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("featureset: cannot open: " + path);
    char magic[4];
    read_exact(in, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("featureset: magic mismatch at byte offset 0 in " + path);
    std::uint16_t version = 0;
    read_exact(in, &version, 2, "version");
    if (version != kVersion)
        throw FormatError("featureset: unsupported version " + std::to_string(version));
    std::uint64_t n = 0;
    std::uint32_t d = 0, flags = 0;
    read_exact(in, &n, 8, "row count");
    read_exact(in, &d, 4, "dimension");
    read_exact(in, &flags, 4, "flags");

    FeatureSet fs;
    fs.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    if (n > 0 && d > 0)
        read_exact(in, fs.matrix.data(), sizeof(float) * n * d, "matrix payload");
    if (!fs.matrix.allFinite())
        throw FormatError("featureset: non-finite values in matrix payload");

    std::uint64_t len = 0;
    read_exact(in, &len, 8, "trailer length");
    std::string text(len, '\0');
    if (len > 0) read_exact(in, text.data(), len, "trailer");
    nlohmann::json trailer;
    try {
        trailer = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("featureset: bad JSON trailer: ") + e.what());
    }
    fs.ids = trailer.at("ids").get<std::vector<std::string>>();
    if (fs.ids.size() != n)
        throw FormatError("featureset: trailer id count does not match header row count");
    if (trailer.contains("metadata")) {
        fs.descriptor = trailer["metadata"].value("descriptor", "");
        fs.config_hash = trailer["metadata"].value("config_hash", "");
    }
    return fs;
}

std::string hash_bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_string(const std::string& s) { return hash_bytes(s.data(), s.size()); }

}  // namespace pipeline
}  // namespace docrep
