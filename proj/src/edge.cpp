#include "docbin/edge.hpp"

#include <algorithm>
#include <cmath>

namespace docbin {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        sum += k[i + radius];
    }
    for (double& w : k) w /= sum;
    return k;
}

// Horizontal then vertical pass, replicate padding.
void smooth_inplace(std::vector<double>& v, int w, int h, double sigma) {
    if (sigma == 0.0) return;
    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    std::vector<double> tmp(v.size());

    for (int y = 0; y < h; ++y) {
        const double* row = &v[static_cast<size_t>(y) * w];
        double* out = &tmp[static_cast<size_t>(y) * w];
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int xi = std::clamp(x + i, 0, w - 1);
                acc += kernel[i + radius] * row[xi];
            }
            out[x] = acc;
        }
    }
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                const int yi = std::clamp(y + i, 0, h - 1);
                acc += kernel[i + radius] * tmp[static_cast<size_t>(yi) * w + x];
            }
            v[static_cast<size_t>(y) * w + x] = acc;
        }
    }
}

void central_diff(const std::vector<double>& v, int w, int h, Field& gx, Field& gy) {
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
            const size_t i = static_cast<size_t>(y) * w + x;
            gx.values[i] = (v[static_cast<size_t>(y) * w + xp] -
                            v[static_cast<size_t>(y) * w + xm]) / 2.0;
            gy.values[i] = (v[static_cast<size_t>(yp) * w + x] -
                            v[static_cast<size_t>(ym) * w + x]) / 2.0;
        }
    }
}

} // namespace

EdgeMode parse_edge_mode(const std::string& name) {
    if (name == "gradient") return EdgeMode::Gradient;
    if (name == "structure-tensor" || name == "structure_tensor") return EdgeMode::StructureTensor;
    if (name == "hessian") return EdgeMode::Hessian;
    throw ParameterError("unknown edge mode '" + name + "'");
}

std::string edge_mode_name(EdgeMode mode) {
    switch (mode) {
        case EdgeMode::Gradient: return "gradient";
        case EdgeMode::StructureTensor: return "structure-tensor";
        case EdgeMode::Hessian: return "hessian";
    }
    return "?";
}

void EdgeParams::validate() const {
    if (!(p > 0.0)) throw ParameterError("edge parameter p must be > 0");
    if (!(q > 0.0)) throw ParameterError("edge parameter q must be > 0");
    if (!(sigma >= 0.0)) throw ParameterError("sigma must be >= 0");
    if (!(rho >= 0.0)) throw ParameterError("rho must be >= 0");
    if (!k_auto && !(k > 0.0)) throw ParameterError("contrast constant k must be > 0");
}

GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
    if (sigma < 0.0) throw ParameterError("sigma must be >= 0");
    GrayImage out = img;
    smooth_inplace(out.data, out.width, out.height, sigma);
    return out;
}

Field gaussian_smooth(const Field& f, double sigma) {
    if (sigma < 0.0) throw ParameterError("sigma must be >= 0");
    Field out = f;
    smooth_inplace(out.values, out.width, out.height, sigma);
    return out;
}

GradientField gradient(const Field& f) {
    GradientField g{Field(f.width, f.height), Field(f.width, f.height)};
    central_diff(f.values, f.width, f.height, g.x, g.y);
    return g;
}

GradientField gradient(const GrayImage& img) {
    GradientField g{Field(img.width, img.height), Field(img.width, img.height)};
    central_diff(img.data, img.width, img.height, g.x, g.y);
    return g;
}

Field edge_indicator(const GrayImage& u, const EdgeParams& ep) {
    ep.validate();
    const int w = u.width, h = u.height;

    std::vector<double> smoothed = u.data;
    smooth_inplace(smoothed, w, h, ep.sigma);

    Field out(w, h);

    if (ep.mode == EdgeMode::Gradient) {
        Field gx(w, h), gy(w, h);
        central_diff(smoothed, w, h, gx, gy);
        for (size_t i = 0; i < out.size(); ++i)
            out.values[i] = std::hypot(gx.values[i], gy.values[i]);
        return out;
    }

    if (ep.mode == EdgeMode::StructureTensor) {
        Field gx(w, h), gy(w, h);
        central_diff(smoothed, w, h, gx, gy);
        Field jxx(w, h), jxy(w, h), jyy(w, h);
        for (size_t i = 0; i < out.size(); ++i) {
            jxx.values[i] = gx.values[i] * gx.values[i];
            jxy.values[i] = gx.values[i] * gy.values[i];
            jyy.values[i] = gy.values[i] * gy.values[i];
        }
        smooth_inplace(jxx.values, w, h, ep.rho);
        smooth_inplace(jxy.values, w, h, ep.rho);
        smooth_inplace(jyy.values, w, h, ep.rho);
        for (size_t i = 0; i < out.size(); ++i) {
            const double trace = jxx.values[i] + jyy.values[i];
            const double diff = jxx.values[i] - jyy.values[i];
            const double disc = std::sqrt(diff * diff + 4.0 * jxy.values[i] * jxy.values[i]);
            out.values[i] = (trace + disc) / 2.0;
        }
        return out;
    }

    // Hessian: unit-spacing second differences of the smoothed field.
    Field uxx(w, h), uyy(w, h), uxy(w, h);
    auto val = [&](int x, int y) {
        return smoothed[static_cast<size_t>(std::clamp(y, 0, h - 1)) * w +
                        std::clamp(x, 0, w - 1)];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = static_cast<size_t>(y) * w + x;
            uxx.values[i] = val(x + 1, y) - 2.0 * val(x, y) + val(x - 1, y);
            uyy.values[i] = val(x, y + 1) - 2.0 * val(x, y) + val(x, y - 1);
            uxy.values[i] =
                (val(x + 1, y + 1) - val(x - 1, y + 1) - val(x + 1, y - 1) + val(x - 1, y - 1)) /
                4.0;
        }
    }
    for (size_t i = 0; i < out.size(); ++i) {
        const double trace = uxx.values[i] + uyy.values[i];
        const double diff = uxx.values[i] - uyy.values[i];
        const double disc = std::sqrt(diff * diff + 4.0 * uxy.values[i] * uxy.values[i]);
        out.values[i] = (std::abs(trace) + disc) / 2.0;
    }
    return out;
}

EdgeField edge_term(Field h, const EdgeParams& ep, double c_e) {
    ep.validate();
    EdgeField out;
    out.h_min = *std::min_element(h.values.begin(), h.values.end());

    if (ep.k_auto) {
        double mean = 0.0;
        for (double v : h.values) mean += v - out.h_min;
        mean /= static_cast<double>(h.size());
        out.k = std::max(mean, 1e-9);
    } else {
        out.k = ep.k;
    }

    out.e = Field(h.width, h.height);
    for (size_t i = 0; i < h.size(); ++i) {
        const double arg = (h.values[i] - out.h_min) / out.k;
        out.e.values[i] = c_e * (1.0 - ep.p / (1.0 + ep.q * arg * arg));
    }
    out.h = std::move(h);
    return out;
}

EdgeField compute_edge_field(const GrayImage& u, const EdgeParams& ep, double c_e) {
    return edge_term(edge_indicator(u, ep), ep, c_e);
}

} // namespace docbin
