#include "docrep/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "docrep/errors.hpp"

namespace docrep {
namespace pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::test: return "test";
        case Split::val: return "val";
        default: return "unassigned";
    }
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "test") return Split::test;
    if (name == "val") return Split::val;
    if (name == "unassigned" || name.empty()) return Split::unassigned;
    throw FormatError("manifest: unknown split '" + name + "'");
}

Manifest load_manifest(const std::string& path, bool verify_paths) {
    std::ifstream in(path);
    if (!in) throw FormatError("manifest: cannot open: " + path);
    const fs::path base = fs::path(path).parent_path();

    Manifest manifest;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw FormatError("manifest: bad JSON on line " + std::to_string(line_no) + ": " + e.what());
        }
        ManifestRecord rec;
        try {
            rec.id = j.at("id").get<std::string>();
            rec.path = j.at("path").get<std::string>();
            rec.label = j.value("label", "");
            rec.split = split_from_name(j.value("split", "unassigned"));
        } catch (const json::exception& e) {
            throw FormatError("manifest: missing field on line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!seen.insert(rec.id).second)
            throw FormatError("manifest: duplicate id '" + rec.id + "' on line " + std::to_string(line_no));
        fs::path p(rec.path);
        if (p.is_relative()) rec.path = (base / p).string();
        if (verify_paths && !fs::exists(rec.path))
            throw FormatError("manifest: unresolvable path '" + rec.path + "' on line " +
                              std::to_string(line_no));
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

void save_manifest(const std::string& path, const Manifest& manifest) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("manifest: cannot open for writing: " + path);
    for (const auto& rec : manifest.records) {
        json j;
        j["id"] = rec.id;
        j["path"] = rec.path;
        j["label"] = rec.label;
        j["split"] = split_name(rec.split);
        out << j.dump() << '\n';
    }
    if (!out) throw FormatError("manifest: write failed: " + path);
}

}  // namespace pipeline
}  // namespace docrep
