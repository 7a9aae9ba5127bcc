#include "docbin/color.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "docbin/binarize.hpp"

namespace docbin {

ChannelMode parse_channel_mode(const std::string& name) {
    if (name == "gray") return ChannelMode::Gray;
    if (name == "intensity") return ChannelMode::Intensity;
    if (name == "hue") return ChannelMode::Hue;
    if (name == "saturation") return ChannelMode::Saturation;
    if (name == "auto") return ChannelMode::Auto;
    throw ParameterError("unknown channel mode '" + name + "'");
}

std::string channel_mode_name(ChannelMode mode) {
    switch (mode) {
        case ChannelMode::Gray: return "gray";
        case ChannelMode::Intensity: return "intensity";
        case ChannelMode::Hue: return "hue";
        case ChannelMode::Saturation: return "saturation";
        case ChannelMode::Auto: return "auto";
    }
    return "?";
}

GrayImage to_grayscale(const RgbImage& img) {
    GrayImage out(img.width, img.height, Range::Unit);
    for (size_t i = 0, n = img.size(); i < n; ++i)
        out.data[i] = 0.299 * img.r[i] + 0.587 * img.g[i] + 0.114 * img.b[i];
    return out;
}

HsiChannels rgb_to_hsi(const RgbImage& img) {
    HsiChannels out{GrayImage(img.width, img.height, Range::Unit),
                    GrayImage(img.width, img.height, Range::Unit),
                    GrayImage(img.width, img.height, Range::Unit)};
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (size_t i = 0, n = img.size(); i < n; ++i) {
        const double r = img.r[i], g = img.g[i], b = img.b[i];
        const double intensity = (r + g + b) / 3.0;
        out.i.data[i] = intensity;

        const double mn = std::min({r, g, b});
        const double mx = std::max({r, g, b});
        // mn == mx must give exactly 0; the division can stray by an ulp.
        out.s.data[i] = (intensity > 0.0 && mx > mn)
                            ? std::clamp(1.0 - mn / intensity, 0.0, 1.0)
                            : 0.0;

        const double num = 0.5 * ((r - g) + (r - b));
        const double den = std::sqrt((r - g) * (r - g) + (r - b) * (g - b));
        double hue = 0.0;
        if (den > 0.0) {
            const double theta = std::acos(std::clamp(num / den, -1.0, 1.0));
            hue = (b > g ? two_pi - theta : theta) / two_pi;
        }
        out.h.data[i] = std::clamp(hue, 0.0, 1.0);
    }
    return out;
}

GrayImage select_channel(const RgbImage& img, ChannelMode mode) {
    std::string chosen;
    return select_channel(img, mode, chosen);
}

GrayImage select_channel(const RgbImage& img, ChannelMode mode, std::string& chosen) {
    if (mode == ChannelMode::Gray) {
        chosen = "gray";
        return to_grayscale(img);
    }
    if (mode == ChannelMode::Auto) {
        HsiChannels hsi = rgb_to_hsi(img);
        // Hue is cyclic, so auto only considers gray/intensity/saturation.
        std::array<std::pair<const char*, GrayImage>, 3> candidates{
            std::pair{"gray", to_grayscale(img)},
            std::pair{"intensity", std::move(hsi.i)},
            std::pair{"saturation", std::move(hsi.s)}};
        size_t best = 0;
        double best_var = -1.0;
        for (size_t c = 0; c < candidates.size(); ++c) {
            const double var = otsu_variance(candidates[c].second);
            if (var > best_var) {
                best_var = var;
                best = c;
            }
        }
        chosen = candidates[best].first;
        return std::move(candidates[best].second);
    }
    HsiChannels hsi = rgb_to_hsi(img);
    switch (mode) {
        case ChannelMode::Intensity: chosen = "intensity"; return std::move(hsi.i);
        case ChannelMode::Hue: chosen = "hue"; return std::move(hsi.h);
        case ChannelMode::Saturation: chosen = "saturation"; return std::move(hsi.s);
        default: break;
    }
    throw ParameterError("unsupported channel mode");
}

GrayImage normalize_signed(const GrayImage& img) {
    if (img.range != Range::Unit)
        throw ParameterError("normalize_signed expects a unit-range image");
    GrayImage out(img.width, img.height, Range::Signed);
    for (size_t i = 0, n = img.size(); i < n; ++i)
        out.data[i] = 2.0 * img.data[i] - 1.0;
    return out;
}

GrayImage normalize_unit(const GrayImage& img) {
    if (img.range != Range::Signed)
        throw ParameterError("normalize_unit expects a signed-range image");
    GrayImage out(img.width, img.height, Range::Unit);
    for (size_t i = 0, n = img.size(); i < n; ++i)
        out.data[i] = (img.data[i] + 1.0) / 2.0;
    return out;
}

} // namespace docbin
