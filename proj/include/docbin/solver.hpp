#ifndef DOCBIN_SOLVER_HPP
#define DOCBIN_SOLVER_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "docbin/edge.hpp"
#include "docbin/image.hpp"

namespace docbin {

struct SolverParams {
    double a = 1.0;        // source shape, (0, 1]
    double c_s = 1.0;      // source coefficient
    double c_e = 0.95;     // edge coefficient
    double tau = 0.25;     // time step
    int iterations = 10;   // N
    double alpha = 1.0;    // fractional order, (0, 1]; 1 = integer scheme
    bool frozen_edges = false;
    std::uint64_t memory_len = 0; // fractional history truncation; 0 = full

    void validate() const;
};

/// Per-iteration observer. The solver reports the mean |du| after each step
/// and surfaces non-fatal warnings (e.g. a time step beyond the tested range).
class ProgressSink {
public:
    virtual ~ProgressSink() = default;
    virtual void on_step(int /*iteration*/, double /*mean_abs_delta*/) {}
    virtual void on_warning(std::string_view /*message*/) {}
};

/// Binary source: clamp((1/a) * atan(u), -1, +1). Odd in u.
double source_term(double u_value, double a);

/// Right-hand side c_s * source(u) + e(h(u)) for the whole field.
/// The contrast constant k is re-resolved from the current h when auto.
Field rhs(const GrayImage& u, const SolverParams& sp, const EdgeParams& ep);

/// Same, but with a precomputed edge field (frozen-edge stepping).
Field rhs(const GrayImage& u, const SolverParams& sp, const EdgeField& edges);

/// One explicit step: u' = clamp(u + tau * rhs(u), -1, +1).
GrayImage euler_step(const GrayImage& u, const SolverParams& sp, const EdgeParams& ep);

/// N explicit steps from u0. With frozen_edges the edge field of u0 is
/// reused throughout; otherwise h is recomputed from the current state.
GrayImage evolve(const GrayImage& u0, const SolverParams& sp, const EdgeParams& ep,
                 ProgressSink* sink = nullptr);

/// Grunwald-Letnikov binomial weights (-1)^j C(alpha, j), j = 0..n:
/// w_0 = 1, w_j = w_{j-1} * (1 - (alpha+1)/j).
std::vector<double> gl_weights(double alpha, int n);

/// Fractional-order stepping with full-history (or truncated) memory:
///   u^{n+1} = clamp(tau^alpha * rhs(u^n) - sum_{j=1..n+1} w_j u^{n+1-j}, -1, +1)
/// alpha = 1 reproduces evolve exactly.
GrayImage evolve_fractional(const GrayImage& u0, const SolverParams& sp, const EdgeParams& ep,
                            ProgressSink* sink = nullptr);

} // namespace docbin

#endif
