#include "docbin/image.hpp"

namespace docbin {

GrayImage::GrayImage(int w, int h, Range r, double fill)
    : width(w), height(h), range(r) {
    if (w < 1 || h < 1)
        throw ParameterError("image dimensions must be at least 1x1");
    data.assign(static_cast<size_t>(w) * h, fill);
}

void GrayImage::validate() const {
    if (width < 1 || height < 1)
        throw ParameterError("image dimensions must be at least 1x1");
    if (data.size() != static_cast<size_t>(width) * height)
        throw ParameterError("image buffer length does not match dimensions");
    const double min = lo(), max = hi();
    for (double v : data)
        if (!(v >= min && v <= max))
            throw ParameterError("pixel value outside declared range");
}

RgbImage::RgbImage(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1)
        throw ParameterError("image dimensions must be at least 1x1");
    const size_t n = static_cast<size_t>(w) * h;
    r.assign(n, 0.0);
    g.assign(n, 0.0);
    b.assign(n, 0.0);
}

BinaryImage::BinaryImage(int w, int h, bool fill) : width(w), height(h) {
    if (w < 1 || h < 1)
        throw ParameterError("image dimensions must be at least 1x1");
    fg.assign(static_cast<size_t>(w) * h, fill ? 1 : 0);
}

std::uint64_t BinaryImage::foreground_count() const {
    std::uint64_t n = 0;
    for (std::uint8_t v : fg) n += v;
    return n;
}

} // namespace docbin
