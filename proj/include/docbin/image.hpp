#ifndef DOCBIN_IMAGE_HPP
#define DOCBIN_IMAGE_HPP

#include <cstdint>
#include <vector>

#include "docbin/errors.hpp"

namespace docbin {

/// Declared value range of a grayscale field.
enum class Range {
    Unit,   // [0, 1], 0 = black ink, 1 = white paper
    Signed  // [-1, 1], -1 = ink pole, +1 = paper pole
};

/// 2-D scalar field, row-major, double precision.
struct GrayImage {
    int width = 0;
    int height = 0;
    Range range = Range::Unit;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, Range r, double fill = 0.0);

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return data.size(); }

    double lo() const { return range == Range::Unit ? 0.0 : -1.0; }
    double hi() const { return 1.0; }

    /// Throws ParameterError if dimensions, buffer length, or value range
    /// violate the declared contract.
    void validate() const;
};

/// Three unit-range channels of identical dimensions.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<double> r, g, b;

    RgbImage() = default;
    RgbImage(int w, int h);

    size_t size() const { return r.size(); }
    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

/// Per-pixel foreground/background labels. Foreground = text = black.
struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> fg; // 1 = foreground

    BinaryImage() = default;
    BinaryImage(int w, int h, bool fill = false);

    bool get(int x, int y) const { return fg[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { fg[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t size() const { return fg.size(); }

    std::uint64_t foreground_count() const;
    bool operator==(const BinaryImage&) const = default;
};

inline void require_same_dims(int w1, int h1, int w2, int h2, const char* what) {
    if (w1 != w2 || h1 != h2)
        throw ParameterError(std::string(what) + ": dimension mismatch");
}

} // namespace docbin

#endif
