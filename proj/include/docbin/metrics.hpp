#ifndef DOCBIN_METRICS_HPP
#define DOCBIN_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "docbin/image.hpp"

namespace docbin {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o);
};

/// Skeleton-recall numerator/denominator, kept separate so corpus-level
/// pooling can re-derive the pseudo F-measure from summed counts.
struct PseudoRecallCounts {
    std::uint64_t hits = 0;      // result foreground on the GT skeleton
    std::uint64_t skeleton = 0;  // GT skeleton size
};

/// DRD numerator (summed per-flip distortion) and NUBN denominator.
struct DrdComponents {
    double distortion = 0.0;
    std::uint64_t nubn = 0;
    std::uint64_t flipped = 0;
};

struct MetricsReport {
    double fm = 0.0;   // fraction in [0,1]
    double fps = 0.0;  // fraction in [0,1]
    double psnr = 0.0; // dB; +inf for identical pairs
    double drd = 0.0;
    double nrm = 0.0;  // fraction in [0,1]
    ConfusionCounts counts;

    // FM, Fps, PSNR improve upward; DRD and NRM improve downward.
    static constexpr bool kHigherIsBetter[5] = {true, true, true, false, false};
};

ConfusionCounts confusion(const BinaryImage& result, const BinaryImage& gt);

/// 2PR/(P+R) with P = TP/(TP+FP), R = TP/(TP+FN); 0 when TP = 0.
double f_measure(const ConfusionCounts& c);

PseudoRecallCounts pseudo_recall_counts(const BinaryImage& result, const BinaryImage& gt);

/// Skeleton-based pseudo F-measure: recall against the Zhang-Suen skeleton of
/// the GT foreground, standard precision. Throws DegenerateDataError when the
/// GT has no foreground.
double pseudo_f_measure(const BinaryImage& result, const BinaryImage& gt);

/// 10 log10(1/MSE) with MSE = fraction of differing pixels; +inf if identical.
double psnr(const BinaryImage& result, const BinaryImage& gt);

DrdComponents drd_components(const BinaryImage& result, const BinaryImage& gt);

/// Distance-reciprocal distortion: per-flip 5x5 inverse-distance-weighted
/// disagreement against the GT, divided by the number of non-uniform 8x8 GT
/// blocks. 0 without flips; throws DegenerateDataError when flips exist on a
/// uniform GT.
double drd(const BinaryImage& result, const BinaryImage& gt);

/// (FN rate + FP rate) / 2; requires both GT classes present.
double nrm(const ConfusionCounts& c);

/// All five measures for one (result, GT) pair.
MetricsReport evaluate_pair(const BinaryImage& result, const BinaryImage& gt);

// Serialization. Percentages carry two decimals; PSNR/DRD two decimals;
// NRM as a two-decimal fraction; infinite PSNR serializes as "inf".
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& stem, const MetricsReport& m);
std::string metrics_json(const std::string& stem, const MetricsReport& m);

} // namespace docbin

#endif
