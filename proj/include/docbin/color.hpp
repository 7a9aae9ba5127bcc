#ifndef DOCBIN_COLOR_HPP
#define DOCBIN_COLOR_HPP

#include <string>

#include "docbin/image.hpp"

namespace docbin {

enum class ChannelMode { Gray, Intensity, Hue, Saturation, Auto };

ChannelMode parse_channel_mode(const std::string& name);
std::string channel_mode_name(ChannelMode mode);

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
GrayImage to_grayscale(const RgbImage& img);

struct HsiChannels {
    GrayImage h; // hue scaled into [0,1]; 0 for achromatic pixels
    GrayImage s; // saturation
    GrayImage i; // intensity (R+G+B)/3
};

HsiChannels rgb_to_hsi(const RgbImage& img);

/// Extracts one channel. Auto picks the best of {gray, intensity, saturation}
/// by Otsu between-class variance, ties broken in that order.
GrayImage select_channel(const RgbImage& img, ChannelMode mode);

/// Like select_channel but also reports which channel auto resolved to.
GrayImage select_channel(const RgbImage& img, ChannelMode mode, std::string& chosen);

/// Maps [0,1] onto [-1,1]: u = 2v - 1. White paper -> +1, ink -> -1.
GrayImage normalize_signed(const GrayImage& img);

/// Inverse of normalize_signed: v = (u+1)/2.
GrayImage normalize_unit(const GrayImage& img);

} // namespace docbin

#endif
