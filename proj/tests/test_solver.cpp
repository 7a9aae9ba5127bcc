#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "docbin/binarize.hpp"
#include "docbin/solver.hpp"
#include "testutil.hpp"

using namespace docbin;

namespace {

SolverParams no_edge_params(double a = 1.0, double cs = 1.0, double tau = 0.25, int n = 10) {
    SolverParams sp;
    sp.a = a;
    sp.c_s = cs;
    sp.c_e = 0.0;
    sp.tau = tau;
    sp.iterations = n;
    return sp;
}

// Scalar oracle for the edge-free dynamics: the per-pixel recurrence
// decouples, so a plain loop over one value reproduces the field solver.
double scalar_evolve(double u, double a, double cs, double tau, int n) {
    for (int i = 0; i < n; ++i) {
        const double s = std::clamp(std::atan(u) / a, -1.0, 1.0);
        u = std::clamp(u + tau * cs * s, -1.0, 1.0);
    }
    return u;
}

// Scalar oracle for the fractional recurrence, weights hand-rolled.
// memory_len = 0 keeps the full history.
double scalar_evolve_fractional(double u0, double a, double cs, double tau, double alpha, int n,
                                size_t memory_len = 0) {
    std::vector<double> w{1.0};
    for (int j = 1; j <= n + 1; ++j) w.push_back(w.back() * (1.0 - (alpha + 1.0) / j));
    std::vector<double> states{u0}; // newest first
    for (int step = 0; step < n; ++step) {
        const double s = std::clamp(std::atan(states.front()) / a, -1.0, 1.0);
        const size_t reach =
            memory_len > 0 ? std::min(states.size(), memory_len) : states.size();
        double memory = 0.0;
        for (size_t j = 1; j <= reach; ++j) memory += w[j] * states[j - 1];
        const double next = std::clamp(std::pow(tau, alpha) * cs * s - memory, -1.0, 1.0);
        states.insert(states.begin(), next);
    }
    return states.front();
}

// Independent full-field oracle for the structure-tensor configuration:
// direct 2-D convolutions and flat loops, sharing nothing with the library.
std::vector<double> field_oracle(const GrayImage& u0, double sigma, double rho, double p,
                                 double q, double a, double cs, double ce, double tau,
                                 int steps) {
    const int w = u0.width, h = u0.height;
    auto idx = [w](int x, int y) { return static_cast<size_t>(y) * w + x; };
    auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };

    auto blur = [&](const std::vector<double>& src, double s) {
        if (s == 0.0) return src;
        const int radius = static_cast<int>(std::ceil(3.0 * s));
        std::vector<double> kernel;
        double ksum = 0.0;
        for (int i = -radius; i <= radius; ++i) {
            kernel.push_back(std::exp(-(i * i) / (2.0 * s * s)));
            ksum += kernel.back();
        }
        std::vector<double> out(src.size());
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int dy = -radius; dy <= radius; ++dy)
                    for (int dx = -radius; dx <= radius; ++dx)
                        acc += kernel[static_cast<size_t>(dy + radius)] *
                               kernel[static_cast<size_t>(dx + radius)] *
                               src[idx(clampi(x + dx, w - 1), clampi(y + dy, h - 1))];
                out[idx(x, y)] = acc / (ksum * ksum);
            }
        return out;
    };

    std::vector<double> u = u0.data;
    for (int step = 0; step < steps; ++step) {
        const std::vector<double> sm = blur(u, sigma);
        std::vector<double> gx(u.size()), gy(u.size());
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                gx[idx(x, y)] =
                    (sm[idx(clampi(x + 1, w - 1), y)] - sm[idx(clampi(x - 1, w - 1), y)]) / 2.0;
                gy[idx(x, y)] =
                    (sm[idx(x, clampi(y + 1, h - 1))] - sm[idx(x, clampi(y - 1, h - 1))]) / 2.0;
            }
        std::vector<double> jxx(u.size()), jxy(u.size()), jyy(u.size());
        for (size_t i = 0; i < u.size(); ++i) {
            jxx[i] = gx[i] * gx[i];
            jxy[i] = gx[i] * gy[i];
            jyy[i] = gy[i] * gy[i];
        }
        const std::vector<double> sxx = blur(jxx, rho), sxy = blur(jxy, rho),
                                  syy = blur(jyy, rho);
        std::vector<double> hfield(u.size());
        double hmin = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < u.size(); ++i) {
            const double tr = sxx[i] + syy[i];
            const double d = sxx[i] - syy[i];
            hfield[i] = (tr + std::sqrt(d * d + 4.0 * sxy[i] * sxy[i])) / 2.0;
            hmin = std::min(hmin, hfield[i]);
        }
        double k = 0.0;
        for (double v : hfield) k += v - hmin;
        k = std::max(k / static_cast<double>(u.size()), 1e-9);
        for (size_t i = 0; i < u.size(); ++i) {
            const double arg = (hfield[i] - hmin) / k;
            const double e = ce * (1.0 - p / (1.0 + q * arg * arg));
            const double s = std::clamp(std::atan(u[i]) / a, -1.0, 1.0);
            u[i] = std::clamp(u[i] + tau * (cs * s + e), -1.0, 1.0);
        }
    }
    return u;
}

class CollectingSink : public ProgressSink {
public:
    std::vector<double> deltas;
    std::vector<std::string> warnings;
    void on_step(int, double d) override { deltas.push_back(d); }
    void on_warning(std::string_view w) override { warnings.emplace_back(w); }
};

} // namespace

TEST_CASE("source term closed forms") {
    CHECK(source_term(0.0, 1.0) == 0.0);
    CHECK(source_term(0.0, 0.3) == 0.0);
    CHECK(source_term(1.0, 1.0) == doctest::Approx(std::atan(1.0)).epsilon(1e-15));
    CHECK(source_term(1.0, 1.0) == doctest::Approx(0.785398163).epsilon(1e-9));
    CHECK(source_term(10.0, 0.5) == 1.0);   // clamp engages
    CHECK(source_term(-10.0, 0.5) == -1.0);
    // Odd function
    std::mt19937 rng(2);
    for (int i = 0; i < 100; ++i) {
        const double u = testutil::uniform(rng, -3.0, 3.0);
        const double a = testutil::uniform(rng, 0.05, 1.0);
        CHECK(source_term(-u, a) == -source_term(u, a));
    }
    CHECK_THROWS_AS(source_term(0.5, 0.0), ParameterError);
    CHECK_THROWS_AS(source_term(0.5, 1.5), ParameterError);
    CHECK_THROWS_AS(source_term(0.5, -1.0), ParameterError);
}

TEST_CASE("rhs closed forms") {
    EdgeParams ep;
    SUBCASE("zero source at the origin with no edge term") {
        const GrayImage u(4, 4, Range::Signed, 0.0);
        const Field f = rhs(u, no_edge_params(), ep);
        for (double v : f.values) CHECK(v == 0.0);
    }
    SUBCASE("constant field leaves only c_e(1-p)") {
        SolverParams sp = no_edge_params();
        sp.c_s = 0.0;
        sp.c_e = 0.8;
        ep.p = 0.25;
        const GrayImage u(5, 3, Range::Signed, 0.4);
        const Field f = rhs(u, sp, ep);
        for (double v : f.values) CHECK(v == doctest::Approx(0.8 * 0.75).epsilon(1e-15));
    }
    SUBCASE("pure source is atan(u)") {
        const GrayImage u(3, 3, Range::Signed, 0.5);
        const Field f = rhs(u, no_edge_params(), ep);
        for (double v : f.values) CHECK(v == doctest::Approx(0.463647609).epsilon(1e-9));
    }
}

TEST_CASE("euler step closed forms") {
    EdgeParams ep;
    SUBCASE("u = 0 with no edge term is a fixed point") {
        const GrayImage u(4, 2, Range::Signed, 0.0);
        const GrayImage next = euler_step(u, no_edge_params(), ep);
        CHECK(next.data == u.data);
    }
    SUBCASE("0.5 + 0.5 atan(0.5)") {
        const GrayImage u(2, 2, Range::Signed, 0.5);
        const GrayImage next = euler_step(u, no_edge_params(1.0, 1.0, 0.5), ep);
        for (double v : next.data)
            CHECK(v == doctest::Approx(0.5 + 0.5 * std::atan(0.5)).epsilon(1e-15));
    }
    SUBCASE("poles stick under clamp") {
        const GrayImage up(3, 3, Range::Signed, 1.0);
        for (double tau : {0.1, 0.5, 2.0}) {
            const GrayImage next = euler_step(up, no_edge_params(1.0, 1.0, tau), ep);
            for (double v : next.data) CHECK(v == 1.0);
        }
    }
}

TEST_CASE("evolve matches the scalar recurrence oracle") {
    EdgeParams ep;
    std::mt19937 rng(41);
    const GrayImage u0 = testutil::random_signed_image(rng, 12, 9);

    for (double a : {0.5, 1.0}) {
        const SolverParams sp = no_edge_params(a, 1.0, 0.25, 10);
        const GrayImage uN = evolve(u0, sp, ep);
        for (size_t i = 0; i < u0.size(); ++i) {
            const double expect = scalar_evolve(u0.data[i], a, 1.0, 0.25, 10);
            CHECK(uN.data[i] == doctest::Approx(expect).epsilon(1e-14));
        }
    }
}

TEST_CASE("evolve basics") {
    EdgeParams ep;
    std::mt19937 rng(43);
    const GrayImage u0 = testutil::random_signed_image(rng, 8, 8);

    SUBCASE("N = 0 is the identity") {
        SolverParams sp = no_edge_params();
        sp.iterations = 0;
        CHECK(evolve(u0, sp, ep).data == u0.data);
    }
    SUBCASE("all-white pole absorbs for p <= 1 and any c_e") {
        SolverParams sp;
        sp.c_e = 0.95;
        const GrayImage white(16, 16, Range::Signed, 1.0);
        const GrayImage out = evolve(white, sp, ep);
        for (double v : out.data) CHECK(v == 1.0);
    }
    SUBCASE("per-step mean |du| is reported") {
        CollectingSink sink;
        SolverParams sp = no_edge_params(1.0, 1.0, 0.25, 4);
        evolve(u0, sp, ep, &sink);
        REQUIRE(sink.deltas.size() == 4);
        for (double d : sink.deltas) CHECK(d > 0.0);
        CHECK(sink.warnings.empty());
    }
    SUBCASE("tau above the tested range warns") {
        CollectingSink sink;
        SolverParams sp = no_edge_params(1.0, 1.0, 0.6, 1);
        evolve(u0, sp, ep, &sink);
        REQUIRE(sink.warnings.size() == 1);
        CHECK(sink.warnings[0].find("tau") != std::string::npos);
    }
    SUBCASE("determinism: identical runs are bit-identical") {
        SolverParams sp;
        sp.c_e = 0.9;
        const GrayImage a = evolve(u0, sp, ep);
        const GrayImage b = evolve(u0, sp, ep);
        CHECK(a.data == b.data);
    }
}

TEST_CASE("range preservation and sign dynamics without the edge term") {
    EdgeParams ep;
    std::mt19937 rng(47);
    GrayImage u = testutil::random_signed_image(rng, 16, 16);
    u.data[0] = 0.0; // keep an exact zero around

    for (double a : {0.5, 1.0}) {
        GrayImage prev = u;
        SolverParams sp = no_edge_params(a, 1.0, 0.25, 1);
        for (int step = 0; step < 10; ++step) {
            const GrayImage next = euler_step(prev, sp, ep);
            for (size_t i = 0; i < next.size(); ++i) {
                CHECK(next.data[i] >= -1.0);
                CHECK(next.data[i] <= 1.0);
                CHECK(std::abs(next.data[i]) >= std::abs(prev.data[i]));
                if (prev.data[i] > 0.0) CHECK(next.data[i] > 0.0);
                if (prev.data[i] < 0.0) CHECK(next.data[i] < 0.0);
                if (prev.data[i] == 0.0) CHECK(next.data[i] == 0.0);
            }
            prev = next;
        }
    }
}

TEST_CASE("frozen edges with cs = 0 make evolve linear in N") {
    std::mt19937 rng(53);
    const GrayImage u0 = testutil::random_signed_image(rng, 10, 10);
    for (double p : {1.0, 2.0}) {
        EdgeParams ep;
        ep.p = p;
        SolverParams sp;
        sp.c_s = 0.0;
        sp.c_e = 0.7;
        sp.tau = 0.2;
        sp.iterations = 7;
        sp.frozen_edges = true;

        const GrayImage uN = evolve(u0, sp, ep);
        const EdgeField ef = compute_edge_field(u0, ep, sp.c_e);
        for (size_t i = 0; i < u0.size(); ++i) {
            const double expect =
                std::clamp(u0.data[i] + 7.0 * 0.2 * ef.e.values[i], -1.0, 1.0);
            CHECK(uN.data[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("full edge-coupled evolution matches an independent field oracle") {
    // Step image: dark block on light ground, with a mid-tone band.
    GrayImage u0(24, 24, Range::Signed, 0.9);
    for (int y = 6; y < 18; ++y)
        for (int x = 4; x < 12; ++x) u0.at(x, y) = -0.8;
    for (int y = 2; y < 22; ++y)
        for (int x = 16; x < 21; ++x) u0.at(x, y) = 0.2;

    SolverParams sp; // fig-3 setting: N=10, tau=0.25, ce=0.95, cs=1
    EdgeParams ep;   // sigma=0.3, rho=0.4, p=q=1, auto k, structure tensor

    const GrayImage uN = evolve(u0, sp, ep);
    const std::vector<double> oracle =
        field_oracle(u0, ep.sigma, ep.rho, ep.p, ep.q, sp.a, sp.c_s, sp.c_e, sp.tau,
                     sp.iterations);

    for (size_t i = 0; i < uN.size(); ++i)
        CHECK(std::abs(uN.data[i] - oracle[i]) <= 1e-12);

    // Thresholded sign pattern agrees with the oracle's.
    const BinaryImage lib_bin = binarize_fixed(uN, 0.2);
    for (size_t i = 0; i < uN.size(); ++i)
        CHECK((lib_bin.fg[i] != 0) == ((oracle[i] + 1.0) / 2.0 < 0.2));
}

TEST_CASE("mean state is nondecreasing in the edge coefficient for p <= 1") {
    std::mt19937 rng(117);
    GrayImage u0 = testutil::random_signed_image(rng, 24, 24);
    for (double& v : u0.data) v *= 0.8;

    for (double p : {0.5, 1.0}) {
        EdgeParams ep;
        ep.p = p;
        double prev_mean = -2.0;
        for (double ce : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            SolverParams sp;
            sp.c_e = ce;
            sp.iterations = 6;
            const GrayImage uN = evolve(u0, sp, ep);
            double mean = 0.0;
            for (double v : uN.data) mean += v;
            mean /= static_cast<double>(uN.size());
            CHECK(mean >= prev_mean - 1e-15);
            prev_mean = mean;
        }
    }
}

TEST_CASE("gl weights") {
    SUBCASE("alpha = 1 collapses to the first difference") {
        const auto w = gl_weights(1.0, 6);
        CHECK(w[0] == 1.0);
        CHECK(w[1] == -1.0);
        for (size_t j = 2; j < w.size(); ++j) CHECK(w[j] == 0.0);
    }
    SUBCASE("alpha = 0.5 matches the closed-form recurrence") {
        const auto w = gl_weights(0.5, 4);
        CHECK(w[0] == 1.0);
        CHECK(w[1] == doctest::Approx(-0.5).epsilon(1e-15));
        CHECK(w[2] == doctest::Approx(-0.125).epsilon(1e-15));
        CHECK(w[3] == doctest::Approx(-0.0625).epsilon(1e-15));
    }
    SUBCASE("partial sums are positive and decrease toward zero") {
        for (double alpha : {0.2, 0.5, 0.8, 0.99}) {
            const auto w = gl_weights(alpha, 1000);
            double partial = w[0];
            double prev = partial;
            for (size_t j = 1; j < w.size(); ++j) {
                partial += w[j];
                CHECK(partial > 0.0);
                CHECK(partial <= prev);
                prev = partial;
            }
            // The tail decays like n^-alpha; 0.3 covers alpha = 0.2 at n = 1000.
            CHECK(partial < 0.3);
        }
    }
    CHECK_THROWS_AS(gl_weights(0.0, 5), ParameterError);
    CHECK_THROWS_AS(gl_weights(1.2, 5), ParameterError);
}

TEST_CASE("fractional evolution") {
    EdgeParams ep;
    SUBCASE("zero state with no edge term stays zero") {
        SolverParams sp = no_edge_params(1.0, 1.0, 0.25, 1);
        sp.alpha = 0.5;
        const GrayImage u0(4, 4, Range::Signed, 0.0);
        const GrayImage u1 = evolve_fractional(u0, sp, ep);
        for (double v : u1.data) CHECK(v == 0.0);
    }
    SUBCASE("two-step scalar recurrence, hand-rolled weights") {
        SolverParams sp = no_edge_params(1.0, 1.0, 0.25, 2);
        sp.alpha = 0.5;
        const GrayImage u0(1, 1, Range::Signed, 0.5);
        const GrayImage u2 = evolve_fractional(u0, sp, ep);

        // By hand: w = [1, -0.5, -0.125], tau^alpha = 0.5.
        const double s0 = std::atan(0.5);
        const double u1 = 0.5 * s0 + 0.5 * 0.5;
        const double expect = 0.5 * std::atan(u1) + 0.5 * u1 + 0.125 * 0.5;
        CHECK(u2.data[0] == doctest::Approx(expect).epsilon(1e-15));

        const double oracle = scalar_evolve_fractional(0.5, 1.0, 1.0, 0.25, 0.5, 2);
        CHECK(u2.data[0] == doctest::Approx(oracle).epsilon(1e-15));
    }
    SUBCASE("field-level agreement with the scalar oracle") {
        std::mt19937 rng(59);
        const GrayImage u0 = testutil::random_signed_image(rng, 9, 7);
        SolverParams sp = no_edge_params(0.8, 0.9, 0.3, 8);
        sp.alpha = 0.6;
        const GrayImage uN = evolve_fractional(u0, sp, ep);
        for (size_t i = 0; i < u0.size(); ++i) {
            const double expect = scalar_evolve_fractional(u0.data[i], 0.8, 0.9, 0.3, 0.6, 8);
            CHECK(uN.data[i] == doctest::Approx(expect).epsilon(1e-13));
        }
    }
    SUBCASE("alpha = 1 reproduces evolve exactly") {
        std::mt19937 rng(61);
        const GrayImage u0 = testutil::random_signed_image(rng, 16, 16);
        SolverParams sp;
        sp.c_e = 0.95;
        sp.iterations = 10;
        const GrayImage a = evolve(u0, sp, ep);
        const GrayImage b = evolve_fractional(u0, sp, ep);
        for (size_t i = 0; i < a.size(); ++i)
            CHECK(std::abs(a.data[i] - b.data[i]) <= 1e-12);
    }
    SUBCASE("short memory truncation matches the truncated oracle") {
        std::mt19937 rng(67);
        const GrayImage u0 = testutil::random_signed_image(rng, 8, 8);
        SolverParams sp = no_edge_params(1.0, 1.0, 0.25, 12);
        sp.alpha = 0.5;
        const GrayImage full = evolve_fractional(u0, sp, ep);
        sp.memory_len = 6;
        const GrayImage truncated = evolve_fractional(u0, sp, ep);

        double max_diff = 0.0;
        for (size_t i = 0; i < full.size(); ++i) {
            const double oracle =
                scalar_evolve_fractional(u0.data[i], 1.0, 1.0, 0.25, 0.5, 12, 6);
            CHECK(truncated.data[i] == doctest::Approx(oracle).epsilon(1e-13));
            max_diff = std::max(max_diff, std::abs(full.data[i] - truncated.data[i]));
        }
        CHECK(max_diff > 0.0); // truncation is real
    }
    SUBCASE("absurd history demands an explicit memory-len error") {
        SolverParams sp = no_edge_params(1.0, 1.0, 0.25, 50'000'000);
        sp.alpha = 0.5;
        const GrayImage u0(64, 64, Range::Signed, 0.1);
        CHECK_THROWS_WITH_AS(evolve_fractional(u0, sp, ep), doctest::Contains("memory-len"),
                             ParameterError);
    }
}

TEST_CASE("solver parameter validation") {
    SolverParams sp;
    sp.a = 0.0;
    CHECK_THROWS_AS(sp.validate(), ParameterError);
    sp.a = 1.0;
    sp.tau = 0.0;
    CHECK_THROWS_AS(sp.validate(), ParameterError);
    sp.tau = 0.25;
    sp.iterations = -1;
    CHECK_THROWS_AS(sp.validate(), ParameterError);
    sp.iterations = 10;
    sp.alpha = 0.0;
    CHECK_THROWS_AS(sp.validate(), ParameterError);
    sp.alpha = 1.1;
    CHECK_THROWS_AS(sp.validate(), ParameterError);
}
