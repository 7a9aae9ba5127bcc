#ifndef DOCBIN_THINNING_HPP
#define DOCBIN_THINNING_HPP

#include "docbin/image.hpp"

namespace docbin {

/// Zhang-Suen morphological thinning of the foreground down to a
/// one-pixel-wide skeleton. Pixels outside the image count as background.
BinaryImage zhang_suen_thin(const BinaryImage& img);

} // namespace docbin

#endif
