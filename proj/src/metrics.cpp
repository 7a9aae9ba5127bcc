#include "docbin/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "docbin/thinning.hpp"

namespace docbin {

namespace {

void require_pair(const BinaryImage& result, const BinaryImage& gt) {
    require_same_dims(result.width, result.height, gt.width, gt.height, "metrics");
}

std::string fixed2(double v) {
    std::ostringstream os;
    if (std::isinf(v)) return "inf";
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

// Normalized 5x5 inverse-distance weights, zero at the center.
struct DrdWeights {
    double w[5][5];
    DrdWeights() {
        double sum = 0.0;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                const double di = i - 2, dj = j - 2;
                w[i][j] = (i == 2 && j == 2) ? 0.0 : 1.0 / std::sqrt(di * di + dj * dj);
                sum += w[i][j];
            }
        for (auto& row : w)
            for (double& v : row) v /= sum;
    }
};

const DrdWeights& drd_weights() {
    static const DrdWeights w;
    return w;
}

} // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
}

ConfusionCounts confusion(const BinaryImage& result, const BinaryImage& gt) {
    require_pair(result, gt);
    ConfusionCounts c;
    for (size_t i = 0, n = result.size(); i < n; ++i) {
        const bool r = result.fg[i] != 0, g = gt.fg[i] != 0;
        if (r && g) ++c.tp;
        else if (r && !g) ++c.fp;
        else if (!r && g) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double f_measure(const ConfusionCounts& c) {
    if (c.tp == 0) return 0.0;
    const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return 2.0 * p * r / (p + r);
}

PseudoRecallCounts pseudo_recall_counts(const BinaryImage& result, const BinaryImage& gt) {
    require_pair(result, gt);
    const BinaryImage skel = zhang_suen_thin(gt);
    PseudoRecallCounts out;
    for (size_t i = 0, n = skel.size(); i < n; ++i) {
        if (!skel.fg[i]) continue;
        ++out.skeleton;
        if (result.fg[i]) ++out.hits;
    }
    return out;
}

double pseudo_f_measure(const BinaryImage& result, const BinaryImage& gt) {
    require_pair(result, gt);
    if (gt.foreground_count() == 0) throw DegenerateDataError("no text in GT");
    const PseudoRecallCounts prc = pseudo_recall_counts(result, gt);
    const ConfusionCounts c = confusion(result, gt);
    if (prc.skeleton == 0 || prc.hits == 0 || c.tp == 0) return 0.0;
    const double rps = static_cast<double>(prc.hits) / static_cast<double>(prc.skeleton);
    const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    return 2.0 * rps * p / (rps + p);
}

double psnr(const BinaryImage& result, const BinaryImage& gt) {
    require_pair(result, gt);
    std::uint64_t diff = 0;
    for (size_t i = 0, n = result.size(); i < n; ++i)
        if ((result.fg[i] != 0) != (gt.fg[i] != 0)) ++diff;
    if (diff == 0) return std::numeric_limits<double>::infinity();
    const double mse = static_cast<double>(diff) / static_cast<double>(result.size());
    return 10.0 * std::log10(1.0 / mse);
}

DrdComponents drd_components(const BinaryImage& result, const BinaryImage& gt) {
    require_pair(result, gt);
    const int w = gt.width, h = gt.height;
    const DrdWeights& wn = drd_weights();

    DrdComponents out;
    for (int by = 0; by < h; by += 8) {
        for (int bx = 0; bx < w; bx += 8) {
            bool has_fg = false, has_bg = false;
            for (int y = by; y < std::min(by + 8, h) && !(has_fg && has_bg); ++y)
                for (int x = bx; x < std::min(bx + 8, w); ++x)
                    (gt.get(x, y) ? has_fg : has_bg) = true;
            if (has_fg && has_bg) ++out.nubn;
        }
    }

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool r = result.get(x, y);
            if (r == gt.get(x, y)) continue;
            ++out.flipped;
            double dk = 0.0;
            for (int i = 0; i < 5; ++i) {
                const int yy = std::clamp(y + i - 2, 0, h - 1);
                for (int j = 0; j < 5; ++j) {
                    const int xx = std::clamp(x + j - 2, 0, w - 1);
                    if (gt.get(xx, yy) != r) dk += wn.w[i][j];
                }
            }
            out.distortion += dk;
        }
    }
    return out;
}

double drd(const BinaryImage& result, const BinaryImage& gt) {
    const DrdComponents c = drd_components(result, gt);
    if (c.flipped == 0) return 0.0;
    if (c.nubn == 0) throw DegenerateDataError("uniform GT");
    return c.distortion / static_cast<double>(c.nubn);
}

double nrm(const ConfusionCounts& c) {
    if (c.tp + c.fn == 0 || c.fp + c.tn == 0)
        throw DegenerateDataError("NRM undefined: GT has a single class");
    const double fnr = static_cast<double>(c.fn) / static_cast<double>(c.fn + c.tp);
    const double fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
    return (fnr + fpr) / 2.0;
}

MetricsReport evaluate_pair(const BinaryImage& result, const BinaryImage& gt) {
    MetricsReport m;
    m.counts = confusion(result, gt);
    m.fm = f_measure(m.counts);
    m.fps = pseudo_f_measure(result, gt);
    m.psnr = psnr(result, gt);
    m.drd = drd(result, gt);
    m.nrm = nrm(m.counts);
    return m;
}

std::string metrics_csv_header() { return "stem,FM,Fps,PSNR,DRD,NRM,TP,FP,TN,FN"; }

std::string metrics_csv_row(const std::string& stem, const MetricsReport& m) {
    std::ostringstream os;
    os << stem << ',' << fixed2(m.fm * 100.0) << ',' << fixed2(m.fps * 100.0) << ','
       << fixed2(m.psnr) << ',' << fixed2(m.drd) << ',' << fixed2(m.nrm) << ',' << m.counts.tp
       << ',' << m.counts.fp << ',' << m.counts.tn << ',' << m.counts.fn;
    return os.str();
}

std::string metrics_json(const std::string& stem, const MetricsReport& m) {
    nlohmann::json j;
    j["stem"] = stem;
    j["FM"] = round2(m.fm * 100.0);
    j["Fps"] = round2(m.fps * 100.0);
    if (std::isinf(m.psnr))
        j["PSNR"] = "inf";
    else
        j["PSNR"] = round2(m.psnr);
    j["DRD"] = round2(m.drd);
    j["NRM"] = round2(m.nrm);
    j["TP"] = m.counts.tp;
    j["FP"] = m.counts.fp;
    j["TN"] = m.counts.tn;
    j["FN"] = m.counts.fn;
    return j.dump();
}

} // namespace docbin
