#include "docbin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace docbin {

namespace {

constexpr double kTauTested = 0.5;
// Cap on the fractional history buffer before asking for --memory-len.
constexpr std::uint64_t kHistoryBudgetBytes = 2ull << 30;

void require_signed(const GrayImage& u) {
    if (u.range != Range::Signed)
        throw ParameterError("solver expects a signed-range image");
}

double mean_abs_delta(const GrayImage& a, const GrayImage& b) {
    double acc = 0.0;
    for (size_t i = 0, n = a.size(); i < n; ++i) acc += std::abs(a.data[i] - b.data[i]);
    return acc / static_cast<double>(a.size());
}

void warn_large_tau(const SolverParams& sp, ProgressSink* sink) {
    if (sp.tau > kTauTested && sink)
        sink->on_warning("tau > 0.5 exceeds the largest tested time step");
}

} // namespace

void SolverParams::validate() const {
    if (!(a > 0.0 && a <= 1.0)) throw ParameterError("source shape a must lie in (0, 1]");
    if (!(tau > 0.0)) throw ParameterError("time step tau must be > 0");
    if (iterations < 0) throw ParameterError("iteration count must be >= 0");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ParameterError("fractional order alpha must lie in (0, 1]");
}

double source_term(double u_value, double a) {
    if (!(a > 0.0 && a <= 1.0)) throw ParameterError("source shape a must lie in (0, 1]");
    return std::clamp(std::atan(u_value) / a, -1.0, 1.0);
}

Field rhs(const GrayImage& u, const SolverParams& sp, const EdgeField& edges) {
    Field out(u.width, u.height);
    for (size_t i = 0, n = u.size(); i < n; ++i)
        out.values[i] = sp.c_s * source_term(u.data[i], sp.a) + edges.e.values[i];
    return out;
}

Field rhs(const GrayImage& u, const SolverParams& sp, const EdgeParams& ep) {
    sp.validate();
    require_signed(u);
    return rhs(u, sp, compute_edge_field(u, ep, sp.c_e));
}

GrayImage euler_step(const GrayImage& u, const SolverParams& sp, const EdgeParams& ep) {
    sp.validate();
    require_signed(u);
    const Field f = rhs(u, sp, ep);
    GrayImage out = u;
    for (size_t i = 0, n = u.size(); i < n; ++i)
        out.data[i] = std::clamp(u.data[i] + sp.tau * f.values[i], -1.0, 1.0);
    return out;
}

GrayImage evolve(const GrayImage& u0, const SolverParams& sp, const EdgeParams& ep,
                 ProgressSink* sink) {
    sp.validate();
    ep.validate();
    require_signed(u0);
    warn_large_tau(sp, sink);

    EdgeField frozen;
    if (sp.frozen_edges) frozen = compute_edge_field(u0, ep, sp.c_e);

    GrayImage u = u0;
    for (int n = 0; n < sp.iterations; ++n) {
        const Field f = sp.frozen_edges ? rhs(u, sp, frozen)
                                        : rhs(u, sp, compute_edge_field(u, ep, sp.c_e));
        GrayImage next = u;
        for (size_t i = 0, m = u.size(); i < m; ++i)
            next.data[i] = std::clamp(u.data[i] + sp.tau * f.values[i], -1.0, 1.0);
        if (sink) sink->on_step(n + 1, mean_abs_delta(next, u));
        u = std::move(next);
    }
    return u;
}

std::vector<double> gl_weights(double alpha, int n) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ParameterError("fractional order alpha must lie in (0, 1]");
    if (n < 0) throw ParameterError("weight count must be >= 0");
    std::vector<double> w(static_cast<size_t>(n) + 1);
    w[0] = 1.0;
    for (int j = 1; j <= n; ++j)
        w[j] = w[j - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(j));
    return w;
}

GrayImage evolve_fractional(const GrayImage& u0, const SolverParams& sp, const EdgeParams& ep,
                            ProgressSink* sink) {
    sp.validate();
    ep.validate();
    require_signed(u0);
    warn_large_tau(sp, sink);

    const std::uint64_t full_len = static_cast<std::uint64_t>(sp.iterations) + 1;
    const std::uint64_t hist_len =
        sp.memory_len > 0 ? std::min<std::uint64_t>(sp.memory_len, full_len) : full_len;
    const std::uint64_t bytes = hist_len * u0.size() * sizeof(double);
    if (bytes > kHistoryBudgetBytes)
        throw ParameterError(
            "fractional history would need " + std::to_string(bytes) +
            " bytes; truncate it with memory-len (short-memory principle)");

    const std::vector<double> w = gl_weights(sp.alpha, sp.iterations + 1);
    const double tau_alpha = sp.alpha == 1.0 ? sp.tau : std::pow(sp.tau, sp.alpha);

    EdgeField frozen;
    if (sp.frozen_edges) frozen = compute_edge_field(u0, ep, sp.c_e);

    // history.front() is the newest state u^n.
    std::deque<GrayImage> history;
    history.push_front(u0);

    for (int n = 0; n < sp.iterations; ++n) {
        const GrayImage& u = history.front();
        const Field f = sp.frozen_edges ? rhs(u, sp, frozen)
                                        : rhs(u, sp, compute_edge_field(u, ep, sp.c_e));
        GrayImage next = u;
        for (size_t i = 0, m = u.size(); i < m; ++i) {
            double memory = 0.0;
            for (size_t j = 1; j <= history.size(); ++j)
                memory += w[j] * history[j - 1].data[i];
            next.data[i] = std::clamp(tau_alpha * f.values[i] - memory, -1.0, 1.0);
        }
        if (sink) sink->on_step(n + 1, mean_abs_delta(next, u));
        history.push_front(std::move(next));
        while (history.size() > hist_len && history.size() > 1) history.pop_back();
    }
    return history.front();
}

} // namespace docbin
