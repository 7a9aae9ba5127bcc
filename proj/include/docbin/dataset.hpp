#ifndef DOCBIN_DATASET_HPP
#define DOCBIN_DATASET_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "docbin/image.hpp"

namespace docbin {

struct DatasetEntry {
    std::filesystem::path image_path;
    std::optional<std::filesystem::path> gt_path;
    std::string stem;
};

/// Pairs each image file in dir with `<stem><gt_suffix>.<ext>` when present.
/// GT files themselves are not listed as entries. Sorted by stem.
std::vector<DatasetEntry> scan_dataset(const std::filesystem::path& dir,
                                       const std::string& gt_suffix = "_GT");

/// Loads a ground-truth image: 8-bit values below 128 are foreground/text.
/// Color GT files are reduced via luma first.
BinaryImage load_ground_truth(const std::filesystem::path& path);

} // namespace docbin

#endif
