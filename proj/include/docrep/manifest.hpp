#pragma once

#include <string>
#include <vector>

namespace docrep {
namespace pipeline {

enum class Split { train, test, val, unassigned };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct ManifestRecord {
    std::string id;
    std::string path;  // resolved against the manifest's directory when relative
    std::string label;
    Split split = Split::unassigned;
};

/// Line-delimited JSON, one record per line, UTF-8.
struct Manifest {
    std::vector<ManifestRecord> records;
};

/// Loads and validates: unique ids, and (unless verify_paths is false)
/// every path resolvable on disk. Relative paths are rewritten relative to
/// the manifest's parent directory.
Manifest load_manifest(const std::string& path, bool verify_paths = true);
void save_manifest(const std::string& path, const Manifest& manifest);

}  // namespace pipeline
}  // namespace docrep
