#ifndef DOCBIN_EDGE_HPP
#define DOCBIN_EDGE_HPP

#include <string>
#include <vector>

#include "docbin/image.hpp"

namespace docbin {

/// Unconstrained 2-D scalar field (gradients, tensors, edge strengths).
struct Field {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    Field() = default;
    Field(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return values.size(); }
};

enum class EdgeMode { Gradient, StructureTensor, Hessian };

EdgeMode parse_edge_mode(const std::string& name);
std::string edge_mode_name(EdgeMode mode);

struct EdgeParams {
    double sigma = 0.3;  // gradient pre-smoothing scale
    double rho = 0.4;    // tensor post-smoothing scale
    double k = 0.0;      // contrast constant; auto when k_auto
    bool k_auto = true;  // k = mean of (h - h_min), floored at 1e-9
    double p = 1.0;      // diffusivity strength
    double q = 1.0;      // diffusivity sharpness
    EdgeMode mode = EdgeMode::StructureTensor;

    void validate() const;
};

/// Edge indicator h, its minimum, the resolved contrast constant, and the
/// per-pixel edge-term values e = c_e * (1 - p / (1 + q*((h - h_min)/k)^2)).
struct EdgeField {
    Field h;
    double h_min = 0.0;
    double k = 0.0; // resolved value actually used
    Field e;
};

/// Separable convolution with the normalized kernel exp(-x^2/2sigma^2),
/// radius ceil(3 sigma), replicate padding. sigma = 0 is the identity.
GrayImage gaussian_smooth(const GrayImage& img, double sigma);
Field gaussian_smooth(const Field& f, double sigma);

struct GradientField {
    Field x, y;
};

/// Central differences (u[i+1]-u[i-1])/2 with replicate padding.
GradientField gradient(const Field& f);
GradientField gradient(const GrayImage& img);

/// Edge indicator by mode:
///   gradient:         |grad(K_sigma * u)|
///   structure_tensor: largest eigenvalue of K_rho * (grad u_sigma grad u_sigma^T)
///   hessian:          largest-magnitude eigenvalue of the Hessian of K_sigma * u
Field edge_indicator(const GrayImage& u, const EdgeParams& ep);

/// Resolves k and fills the edge-term field for a given h.
EdgeField edge_term(Field h, const EdgeParams& ep, double c_e);

/// edge_indicator followed by edge_term.
EdgeField compute_edge_field(const GrayImage& u, const EdgeParams& ep, double c_e);

} // namespace docbin

#endif
