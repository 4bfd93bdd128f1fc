#include "docrep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <vector>

#include "docrep/errors.hpp"
#include "docrep/image_io.hpp"

namespace docrep {
namespace pipeline {

namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

struct Element {
    enum class Kind { text_block, rect, rule } kind;
    int x = 0, y = 0, w = 0, h = 0;
    int thickness = 2;                  // rules / text line height
    std::vector<double> line_fracs;     // text blocks: per-line width fraction
    bool nuisance = false;
};

// The class template: element list sampled once per class.
std::vector<Element> class_template(const SynthConfig& cfg, int class_idx) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ 0x7e391ull) +
                        splitmix64(static_cast<std::uint64_t>(class_idx) * 0x9e3779b97f4a7c15ull));
    const int w = cfg.page_width, h = cfg.page_height;
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto unif = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto coin = [&](double p) { return unif(0.0, 1.0) < p; };

    std::vector<Element> elems;
    // Header rule.
    if (coin(0.7)) {
        Element e;
        e.kind = Element::Kind::rule;
        e.x = uni(20, 60);
        e.w = w - e.x - uni(20, 60);
        e.y = uni(30, 80);
        e.thickness = uni(2, 4);
        elems.push_back(e);
    }
    const int n_rects = uni(1, 3);
    for (int i = 0; i < n_rects; ++i) {
        Element e;
        e.kind = Element::Kind::rect;
        e.w = uni(60, 180);
        e.h = uni(40, 120);
        e.x = uni(15, std::max(16, w - e.w - 15));
        e.y = uni(15, std::max(16, h - e.h - 15));
        elems.push_back(e);
    }
    const int n_rules = uni(1, 3);
    for (int i = 0; i < n_rules; ++i) {
        Element e;
        e.kind = Element::Kind::rule;
        e.x = uni(20, 80);
        e.w = w - e.x - uni(20, 80);
        e.y = uni(100, h - 40);
        e.thickness = uni(2, 4);
        elems.push_back(e);
    }
    const int n_text = uni(2, 4);
    for (int i = 0; i < n_text; ++i) {
        Element e;
        e.kind = Element::Kind::text_block;
        e.w = uni(150, 380);
        const int lines = uni(4, 12);
        e.thickness = uni(5, 7);  // line height
        e.h = lines * (e.thickness + 4);
        e.x = uni(15, std::max(16, w - e.w - 15));
        e.y = uni(15, std::max(16, h - e.h - 15));
        for (int l = 0; l < lines; ++l)
            e.line_fracs.push_back(l + 1 == lines ? unif(0.3, 0.7) : unif(0.55, 1.0));
        elems.push_back(e);
    }
    // Designate nuisance elements; class identity stays in the rest.
    if (cfg.nuisance > 0.0)
        for (Element& e : elems)
            if (coin(cfg.nuisance * 0.5)) e.nuisance = true;
    return elems;
}

void fill_rect(BinaryImage& img, int x0, int y0, int rw, int rh) {
    const int x1 = std::min(img.width, x0 + rw);
    const int y1 = std::min(img.height, y0 + rh);
    for (int y = std::max(0, y0); y < y1; ++y)
        for (int x = std::max(0, x0); x < x1; ++x) img.at(x, y) = 0;
}

}  // namespace

BinaryImage synth_page(const SynthConfig& cfg, int class_idx, int instance_idx) {
    if (cfg.n_classes < 2)
        throw std::invalid_argument("synth_docs: need at least 2 classes");
    if (cfg.page_width < 50 || cfg.page_height < 50)
        throw std::invalid_argument("synth_docs: page too small");

    std::vector<Element> elems = class_template(cfg, class_idx);
    std::mt19937_64 rng(splitmix64(cfg.seed + 0x1257ull) ^
                        splitmix64(static_cast<std::uint64_t>(class_idx) * 1000003ull +
                                   static_cast<std::uint64_t>(instance_idx) + 1));
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto unif = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    BinaryImage img;
    img.width = cfg.page_width;
    img.height = cfg.page_height;
    img.data.assign(static_cast<std::size_t>(img.width) * img.height, 1);

    const int tx_max = static_cast<int>(std::lround(cfg.translate_frac * cfg.page_width));
    const int ty_max = static_cast<int>(std::lround(cfg.translate_frac * cfg.page_height));
    const int dx = tx_max > 0 ? uni(-tx_max, tx_max) : 0;
    const int dy = ty_max > 0 ? uni(-ty_max, ty_max) : 0;

    for (const Element& tmpl : elems) {
        Element e = tmpl;
        if (e.nuisance) {
            if (unif(0.0, 1.0) < cfg.nuisance * 0.4) continue;  // element absent this instance
            const int range = static_cast<int>(std::lround(cfg.nuisance * 120));
            e.x += uni(-range, range);
            e.y += uni(-range, range);
        }
        const int jitter = cfg.thickness_jitter > 0 ? uni(-cfg.thickness_jitter, cfg.thickness_jitter) : 0;
        const int ex = e.x + dx, ey = e.y + dy;
        switch (e.kind) {
            case Element::Kind::rect:
                fill_rect(img, ex, ey, e.w, e.h);
                break;
            case Element::Kind::rule:
                fill_rect(img, ex, ey, e.w, std::max(1, e.thickness + jitter));
                break;
            case Element::Kind::text_block: {
                const int lh = std::max(2, e.thickness + jitter);
                int y = ey;
                for (double frac : e.line_fracs) {
                    fill_rect(img, ex, y, static_cast<int>(e.w * frac), lh);
                    y += lh + 4;
                }
                break;
            }
        }
    }

    if (cfg.flip_prob > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& px : img.data)
            if (u(rng) < cfg.flip_prob) px = px ? 0 : 1;
    }
    return img;
}

Manifest synth_docs(const std::string& out_dir, const SynthConfig& cfg) {
    if (cfg.n_classes < 2)
        throw std::invalid_argument("synth_docs: need at least 2 classes");
    if (cfg.per_class < 1)
        throw std::invalid_argument("synth_docs: per_class must be >= 1");
    if (cfg.flip_prob < 0.0 || cfg.flip_prob > 0.02)
        throw std::invalid_argument("synth_docs: flip_prob must lie in [0, 0.02]");

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw FormatError("synth_docs: cannot create directory: " + out_dir);

    Manifest manifest;
    char buf[64];
    for (int c = 0; c < cfg.n_classes; ++c) {
        std::snprintf(buf, sizeof buf, "class%02d", c);
        const std::string label = buf;
        const fs::path cls_dir = fs::path(out_dir) / label;
        fs::create_directories(cls_dir, ec);
        if (ec) throw FormatError("synth_docs: cannot create directory: " + cls_dir.string());
        for (int i = 0; i < cfg.per_class; ++i) {
            std::snprintf(buf, sizeof buf, "class%02d_%03d", c, i);
            const std::string id = buf;
            const std::string path = (cls_dir / (id + ".png")).string();
            imaging::save_png(path, synth_page(cfg, c, i));
            manifest.records.push_back(ManifestRecord{id, path, label, Split::unassigned});
        }
    }
    save_manifest((fs::path(out_dir) / "manifest.jsonl").string(), manifest);
    return manifest;
}

}  // namespace pipeline
}  // namespace docrep
