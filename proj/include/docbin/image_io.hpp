#ifndef DOCBIN_IMAGE_IO_HPP
#define DOCBIN_IMAGE_IO_HPP

#include <filesystem>
#include <string>
#include <variant>

#include "docbin/image.hpp"

namespace docbin {

using LoadedImage = std::variant<GrayImage, RgbImage>;

/// Loads an 8-bit PNG, BMP, PGM (P2/P5), or PPM (P3/P6) file.
/// Values are scaled to [0,1]; color files yield RgbImage, grayscale GrayImage.
/// Throws IoError on missing/truncated files and unsupported formats.
LoadedImage load_image(const std::filesystem::path& path);

/// Convenience: load and reduce to a single unit-range channel
/// (color input goes through BT.601 luma).
GrayImage load_gray(const std::filesystem::path& path);

// Writers dispatch on the file extension (.png, .bmp, .pgm/.ppm).
// Values are quantized to 8 bits with round-to-nearest.
void save_image(const std::filesystem::path& path, const GrayImage& img);
void save_image(const std::filesystem::path& path, const RgbImage& img);

/// Foreground (text) is written black (0), background white (255).
void save_image(const std::filesystem::path& path, const BinaryImage& img);

bool is_supported_image_ext(const std::filesystem::path& path);

} // namespace docbin

#endif
