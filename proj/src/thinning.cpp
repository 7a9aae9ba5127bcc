#include "docbin/thinning.hpp"

#include <array>

namespace docbin {

namespace {

// Deletion decisions of one subiteration are taken on a frozen copy and
// applied at once.
bool thin_pass(BinaryImage& img, int phase) {
    const int w = img.width, h = img.height;
    const BinaryImage snap = img;
    auto px = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0;
        return snap.get(x, y) ? 1 : 0;
    };

    bool changed = false;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!snap.get(x, y)) continue;
            // p2..p9 clockwise from north
            const std::array<int, 8> p{px(x, y - 1), px(x + 1, y - 1), px(x + 1, y),
                                       px(x + 1, y + 1), px(x, y + 1), px(x - 1, y + 1),
                                       px(x - 1, y), px(x - 1, y - 1)};
            int b = 0;
            for (int v : p) b += v;
            if (b < 2 || b > 6) continue;
            int a = 0;
            for (int i = 0; i < 8; ++i)
                if (p[i] == 0 && p[(i + 1) % 8] == 1) ++a;
            if (a != 1) continue;
            const int p2 = p[0], p4 = p[2], p6 = p[4], p8 = p[6];
            if (phase == 0) {
                if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
            } else {
                if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
            }
            img.set(x, y, false);
            changed = true;
        }
    }
    return changed;
}

} // namespace

BinaryImage zhang_suen_thin(const BinaryImage& img) {
    BinaryImage out = img;
    bool changed = true;
    while (changed) {
        changed = thin_pass(out, 0);
        changed = thin_pass(out, 1) || changed;
    }
    return out;
}

} // namespace docbin
