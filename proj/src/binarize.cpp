#include "docbin/binarize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace docbin {

namespace {

constexpr int kBins = 256;

std::array<std::uint64_t, kBins> histogram_unit(const GrayImage& img) {
    std::array<std::uint64_t, kBins> hist{};
    const bool is_signed = img.range == Range::Signed;
    for (double v : img.data) {
        const double unit = is_signed ? (v + 1.0) / 2.0 : v;
        const int bin = std::min(kBins - 1, static_cast<int>(unit * kBins));
        ++hist[static_cast<size_t>(std::max(bin, 0))];
    }
    return hist;
}

// Best cut index t (class 0 = bins 0..t) and its between-class variance in
// bin-index units. Returns t = -1 when no split separates two classes.
std::pair<int, double> otsu_scan(const std::array<std::uint64_t, kBins>& hist) {
    std::uint64_t total = 0, total_moment = 0;
    for (int i = 0; i < kBins; ++i) {
        total += hist[i];
        total_moment += hist[i] * static_cast<std::uint64_t>(i);
    }

    int best_t = -1;
    double best_var = 0.0;
    std::uint64_t w0 = 0, m0 = 0;
    for (int t = 0; t < kBins - 1; ++t) {
        w0 += hist[t];
        m0 += hist[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double mu0 = static_cast<double>(m0) / static_cast<double>(w0);
        const double mu1 = static_cast<double>(total_moment - m0) / static_cast<double>(w1);
        const double var = static_cast<double>(w0) / total * (static_cast<double>(w1) / total) *
                           (mu0 - mu1) * (mu0 - mu1);
        if (best_t < 0 || var > best_var) {
            best_t = t;
            best_var = var;
        }
    }
    return {best_t, best_var};
}

std::string fixed6(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace

ThresholdSpec ThresholdSpec::fixed(double t0) {
    ThresholdSpec s;
    s.kind = Kind::Fixed;
    s.t0 = t0;
    s.validate();
    return s;
}

ThresholdSpec ThresholdSpec::otsu() {
    ThresholdSpec s;
    s.kind = Kind::Otsu;
    return s;
}

ThresholdSpec ThresholdSpec::sweep(double lo, double hi, double step) {
    ThresholdSpec s;
    s.kind = Kind::Sweep;
    s.lo = lo;
    s.hi = hi;
    s.step = step;
    s.validate();
    return s;
}

ThresholdSpec ThresholdSpec::parse(const std::string& text) {
    if (text == "otsu") return otsu();
    if (text.rfind("fixed:", 0) == 0) {
        try {
            size_t consumed = 0;
            const double t0 = std::stod(text.substr(6), &consumed);
            if (consumed == text.size() - 6) return fixed(t0);
        } catch (const std::logic_error&) {
        }
    }
    throw ParameterError("threshold must be 'fixed:<T0>' or 'otsu', got '" + text + "'");
}

std::string ThresholdSpec::describe() const {
    switch (kind) {
        case Kind::Otsu: return "otsu";
        case Kind::Fixed: {
            std::ostringstream os;
            os << "fixed:" << t0;
            return os.str();
        }
        case Kind::Sweep: {
            std::ostringstream os;
            os << "sweep:" << lo << ":" << hi << ":" << step;
            return os.str();
        }
    }
    return "?";
}

void ThresholdSpec::validate() const {
    if (kind == Kind::Fixed && !(t0 >= 0.0 && t0 <= 1.0))
        throw ParameterError("fixed threshold T0 must lie in [0, 1]");
    if (kind == Kind::Sweep) {
        if (!(lo < hi)) throw ParameterError("sweep requires lo < hi");
        if (!(step > 0.0)) throw ParameterError("sweep requires step > 0");
    }
}

BinaryImage binarize_fixed(const GrayImage& u, double t0) {
    if (u.range != Range::Signed)
        throw ParameterError("binarize_fixed expects a signed-range field");
    if (!(t0 >= 0.0 && t0 <= 1.0)) throw ParameterError("threshold T0 must lie in [0, 1]");
    BinaryImage out(u.width, u.height);
    for (size_t i = 0, n = u.size(); i < n; ++i)
        out.fg[i] = ((u.data[i] + 1.0) / 2.0 < t0) ? 1 : 0;
    return out;
}

double otsu_threshold(const GrayImage& img) {
    const auto [t, var] = otsu_scan(histogram_unit(img));
    if (t < 0) throw DegenerateDataError("degenerate histogram: constant image");
    return (t + 0.5) / kBins;
}

double otsu_variance(const GrayImage& img) {
    const auto [t, var] = otsu_scan(histogram_unit(img));
    // Rescale from bin-index units to unit-range values.
    return t < 0 ? 0.0 : var / (static_cast<double>(kBins) * kBins);
}

ThresholdCurve sweep_thresholds(const GrayImage& u, const BinaryImage& gt, double lo, double hi,
                                double step) {
    require_same_dims(u.width, u.height, gt.width, gt.height, "sweep_thresholds");
    ThresholdSpec::sweep(lo, hi, step); // bounds check

    ThresholdCurve curve;
    const double tol = step * 1e-9;
    for (int i = 0;; ++i) {
        const double t = lo + i * step;
        if (t > hi + tol) break;
        CurvePoint point;
        point.t = t;
        point.metrics = evaluate_pair(binarize_fixed(u, t), gt);
        if (curve.points.empty() || point.metrics.fm > curve.best_fm) {
            curve.best_fm = point.metrics.fm;
            curve.best_threshold = t;
        }
        curve.points.push_back(std::move(point));
    }
    return curve;
}

void write_curve_csv(std::ostream& os, const ThresholdCurve& curve) {
    os << "T,FM,Fps,PSNR,DRD,NRM\n";
    for (const CurvePoint& p : curve.points) {
        os << fixed6(p.t) << ',' << fixed6(p.metrics.fm) << ',' << fixed6(p.metrics.fps) << ','
           << fixed6(p.metrics.psnr) << ',' << fixed6(p.metrics.drd) << ','
           << fixed6(p.metrics.nrm) << '\n';
    }
}

std::vector<CurveRow> read_curve_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "T,FM,Fps,PSNR,DRD,NRM")
        throw IoError("unreadable file: bad curve CSV header");
    std::vector<CurveRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::array<double, 6> v{};
        for (int i = 0; i < 6; ++i) {
            if (!std::getline(ls, cell, ',')) throw IoError("unreadable file: short curve row");
            if (cell == "inf") {
                v[static_cast<size_t>(i)] = std::numeric_limits<double>::infinity();
                continue;
            }
            try {
                v[static_cast<size_t>(i)] = std::stod(cell);
            } catch (const std::logic_error&) {
                throw IoError("unreadable file: bad curve cell '" + cell + "'");
            }
        }
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    return rows;
}

} // namespace docbin
