#ifndef DOCBIN_PIPELINE_HPP
#define DOCBIN_PIPELINE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "docbin/binarize.hpp"
#include "docbin/color.hpp"
#include "docbin/dataset.hpp"
#include "docbin/edge.hpp"
#include "docbin/image_io.hpp"
#include "docbin/metrics.hpp"
#include "docbin/solver.hpp"

namespace docbin {

/// Everything a run needs: model, solver, threshold, and corpus settings.
struct RunConfig {
    ChannelMode channel = ChannelMode::Auto;
    EdgeParams edge;
    SolverParams solver;
    ThresholdSpec threshold;

    std::filesystem::path input;
    std::filesystem::path dataset_dir;
    std::string gt_suffix = "_GT";
    std::filesystem::path out_path = ".";
    int jobs = 1;
    std::uint64_t grid_cap = 4096;

    void validate() const;
};

struct PipelineResult {
    GrayImage evolved; // signed
    BinaryImage binary;
    std::string chosen_channel;
    double resolved_k = 0.0;         // contrast constant of the initial edge field
    double resolved_threshold = 0.0; // T0 actually applied
};

/// channel -> normalize -> evolve -> threshold. Sweep-kind thresholds are not
/// valid here (use run_curves).
PipelineResult run_pipeline(const LoadedImage& input, const RunConfig& cfg,
                            ProgressSink* sink = nullptr);

struct EvaluateRow {
    std::string stem;
    MetricsReport metrics;
    PseudoRecallCounts pseudo;
    DrdComponents drd;
};

struct MetricAggregate {
    double fm = 0.0, fps = 0.0, psnr = 0.0, drd = 0.0, nrm = 0.0;
};

struct EvaluateResult {
    std::vector<EvaluateRow> rows; // sorted by stem
    MetricAggregate mean;          // unweighted mean across images
    MetricAggregate pooled;        // recomputed from summed pixel counts
};

/// Runs the pipeline over every GT-paired dataset entry (cfg.jobs workers).
EvaluateResult run_evaluate(const RunConfig& cfg);

std::string evaluate_csv(const EvaluateResult& r);
std::string evaluate_summary_json(const EvaluateResult& r);

/// An explicit list of parameter settings, plus the column order to report.
/// Accepted names: iters, tau, ce, cs, a, p, q, k, alpha, sigma, rho, T0.
struct SweepGrid {
    std::vector<std::string> names;
    std::vector<std::map<std::string, double>> points;

    static SweepGrid cartesian(const std::map<std::string, std::vector<double>>& axes);
    static SweepGrid preset(const std::string& name); // fig3 | fig4 | fig5 | fig6
    static SweepGrid from_json_file(const std::filesystem::path& path);
    static bool is_preset_name(const std::string& name);
};

/// Applies one grid point on top of a base config.
RunConfig apply_grid_point(const RunConfig& base, const std::map<std::string, double>& point);

/// Long-form CSV: stem, grid columns, then FM,Fps,PSNR,DRD,NRM.
std::string run_sweep(const RunConfig& cfg, const SweepGrid& grid);

struct CurveOutput {
    std::string stem;
    ThresholdCurve curve;
};

std::vector<CurveOutput> run_curves(const RunConfig& cfg, double lo, double hi, double step);

struct ChannelsReport {
    bool color = false;
    std::map<std::string, double> variance; // per-channel Otsu between-class variance
    std::string chosen;                     // select_channel(auto) result; "gray" if not color
};

/// Writes the channel images next to out_path and returns the report.
ChannelsReport run_channels(const RunConfig& cfg);

/// Flat JSON of the configuration (keys match the CLI flag names), plus any
/// resolved values supplied.
std::string config_json(const RunConfig& cfg, const PipelineResult* resolved = nullptr);

} // namespace docbin

#endif
