#ifndef DOCBIN_TESTS_TESTUTIL_HPP
#define DOCBIN_TESTS_TESTUTIL_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "docbin/image.hpp"

namespace testutil {

/// Uniform double in [0,1) built from raw mt19937 words only, so sequences
/// are identical across standard libraries.
inline double uniform01(std::mt19937& rng) {
    return (static_cast<double>(rng()) + 0.5) / 4294967296.0;
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Box-Muller standard normal on top of uniform01.
inline double normal01(std::mt19937& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1 + 1e-300)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline docbin::GrayImage random_unit_image(std::mt19937& rng, int w, int h) {
    docbin::GrayImage img(w, h, docbin::Range::Unit);
    for (double& v : img.data) v = uniform01(rng);
    return img;
}

inline docbin::GrayImage random_signed_image(std::mt19937& rng, int w, int h) {
    docbin::GrayImage img(w, h, docbin::Range::Signed);
    for (double& v : img.data) v = uniform(rng, -1.0, 1.0);
    return img;
}

inline docbin::BinaryImage random_binary_image(std::mt19937& rng, int w, int h,
                                               double fg_prob = 0.5) {
    docbin::BinaryImage img(w, h);
    for (auto& v : img.fg) v = uniform01(rng) < fg_prob ? 1 : 0;
    return img;
}

/// Synthetic degraded document: dark strokes (the text), lighter round
/// bleed-through blobs, bright background, plus clamped Gaussian noise.
/// Returns the degraded image; gt receives the clean text mask.
inline docbin::GrayImage synthetic_document(int w, int h, docbin::BinaryImage& gt,
                                            std::uint32_t seed, double text_level = 0.1,
                                            double bleed_level = 0.6, double bg_level = 0.95,
                                            double noise_sigma = 0.02) {
    std::mt19937 rng(seed);
    gt = docbin::BinaryImage(w, h);
    docbin::GrayImage img(w, h, docbin::Range::Unit, bg_level);

    // Bleed-through blobs first; text is drawn on top of them.
    const int blob_count = std::max(1, w * h / 4096);
    for (int b = 0; b < blob_count; ++b) {
        const double cx = uniform(rng, 0.1, 0.9) * w;
        const double cy = uniform(rng, 0.1, 0.9) * h;
        const double rx = uniform(rng, 0.05, 0.11) * w;
        const double ry = uniform(rng, 0.05, 0.11) * h;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double dx = (x - cx) / rx, dy = (y - cy) / ry;
                if (dx * dx + dy * dy <= 1.0) img.at(x, y) = bleed_level;
            }
    }

    // Horizontal stroke rows imitating text lines, with per-line gaps.
    const int stroke = std::max(3, h / 42);
    const int gap = stroke * 2;
    for (int y0 = gap; y0 + stroke < h; y0 += stroke + gap) {
        int x = stroke;
        while (x < w - stroke) {
            const int run = stroke * (2 + static_cast<int>(uniform01(rng) * 4.0));
            const int end = std::min(x + run, w - stroke);
            for (int y = y0; y < y0 + stroke; ++y)
                for (int xx = x; xx < end; ++xx) {
                    img.at(xx, y) = text_level;
                    gt.set(xx, y, true);
                }
            x = end + stroke * (1 + static_cast<int>(uniform01(rng) * 2.0));
        }
    }

    for (double& v : img.data)
        v = std::clamp(v + noise_sigma * normal01(rng), 0.0, 1.0);
    return img;
}

/// Unique scratch directory under the system temp dir; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<std::uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("docbin_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

} // namespace testutil

#endif
