#ifndef DOCBIN_BINARIZE_HPP
#define DOCBIN_BINARIZE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "docbin/image.hpp"
#include "docbin/metrics.hpp"

namespace docbin {

struct ThresholdSpec {
    enum class Kind { Fixed, Otsu, Sweep };
    Kind kind = Kind::Fixed;
    double t0 = 0.2;              // fixed threshold, unit scale
    double lo = 0.0, hi = 1.0, step = 0.05; // sweep grid

    static ThresholdSpec fixed(double t0);
    static ThresholdSpec otsu();
    static ThresholdSpec sweep(double lo, double hi, double step);

    /// Accepts "fixed:<T0>" or "otsu".
    static ThresholdSpec parse(const std::string& text);
    std::string describe() const;
    void validate() const;
};

/// Foreground where (u+1)/2 < T0, strictly. T0 = 0.5 is the sign test u < 0.
BinaryImage binarize_fixed(const GrayImage& u, double t0);

/// 256-bin histogram Otsu threshold in [0,1] (bin center of the optimal
/// split, ties to the lowest). Signed images are histogrammed in unit scale.
/// Throws DegenerateDataError on a constant image.
double otsu_threshold(const GrayImage& img);

/// Maximum between-class variance of the same scan; 0 for a constant image.
double otsu_variance(const GrayImage& img);

struct CurvePoint {
    double t = 0.0;
    MetricsReport metrics;
};

struct ThresholdCurve {
    std::vector<CurvePoint> points; // thresholds strictly increasing
    double best_threshold = 0.0;    // argmax FM, ties to the lowest threshold
    double best_fm = 0.0;
};

/// Evaluates binarize_fixed against gt for every T in lo, lo+step, ... <= hi.
ThresholdCurve sweep_thresholds(const GrayImage& u, const BinaryImage& gt, double lo, double hi,
                                double step);

// Curve CSV: header T,FM,Fps,PSNR,DRD,NRM; 6-decimal fixed point; FM, Fps and
// NRM as fractions. Values survive a write/read/write round trip byte-exactly.
void write_curve_csv(std::ostream& os, const ThresholdCurve& curve);

struct CurveRow {
    double t, fm, fps, psnr, drd, nrm;
};
std::vector<CurveRow> read_curve_csv(std::istream& is);

} // namespace docbin

#endif
