#include "docbin/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "docbin/image_io.hpp"

namespace docbin {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Extension preference when several GT candidates exist for one stem.
int ext_rank(const std::filesystem::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    if (e == ".png") return 0;
    if (e == ".bmp") return 1;
    if (e == ".pgm") return 2;
    if (e == ".ppm") return 3;
    return 4;
}

} // namespace

std::vector<DatasetEntry> scan_dataset(const std::filesystem::path& dir,
                                       const std::string& gt_suffix) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("dataset directory does not exist: " + dir.string());
    if (gt_suffix.empty())
        throw ParameterError("gt suffix must be nonempty");

    std::vector<std::filesystem::path> images;
    std::map<std::string, std::filesystem::path> gt_by_stem;
    for (const auto& de : std::filesystem::directory_iterator(dir)) {
        if (!de.is_regular_file() || !is_supported_image_ext(de.path())) continue;
        const std::string stem = de.path().stem().string();
        if (ends_with(stem, gt_suffix)) {
            const std::string base = stem.substr(0, stem.size() - gt_suffix.size());
            auto it = gt_by_stem.find(base);
            if (it == gt_by_stem.end() || ext_rank(de.path()) < ext_rank(it->second))
                gt_by_stem[base] = de.path();
        } else {
            images.push_back(de.path());
        }
    }

    std::vector<DatasetEntry> entries;
    entries.reserve(images.size());
    for (const auto& p : images) {
        DatasetEntry e;
        e.image_path = p;
        e.stem = p.stem().string();
        if (auto it = gt_by_stem.find(e.stem); it != gt_by_stem.end()) e.gt_path = it->second;
        entries.push_back(std::move(e));
    }
    std::sort(entries.begin(), entries.end(),
              [](const DatasetEntry& a, const DatasetEntry& b) { return a.stem < b.stem; });
    return entries;
}

BinaryImage load_ground_truth(const std::filesystem::path& path) {
    const GrayImage gray = load_gray(path);
    BinaryImage out(gray.width, gray.height);
    constexpr double cutoff = 128.0 / 255.0;
    for (size_t i = 0, n = gray.size(); i < n; ++i)
        out.fg[i] = gray.data[i] < cutoff ? 1 : 0;
    return out;
}

} // namespace docbin
