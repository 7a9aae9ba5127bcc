#include "docbin/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace docbin {

namespace {

const std::vector<std::string> kGridParamOrder = {"iters", "tau", "ce",    "cs",  "a",  "p",
                                                  "q",     "k",   "alpha", "sigma", "rho", "T0"};

bool known_grid_param(const std::string& name) {
    return std::find(kGridParamOrder.begin(), kGridParamOrder.end(), name) !=
           kGridParamOrder.end();
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(jobs, static_cast<int>(n));
    pool.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

GrayImage resolve_channel(const LoadedImage& input, ChannelMode mode, std::string& chosen) {
    if (std::holds_alternative<RgbImage>(input))
        return select_channel(std::get<RgbImage>(input), mode, chosen);
    if (mode == ChannelMode::Hue || mode == ChannelMode::Saturation)
        throw ParameterError("channel '" + channel_mode_name(mode) +
                             "' requires a color input image");
    chosen = "gray";
    return std::get<GrayImage>(input);
}

MetricAggregate mean_aggregate(const std::vector<EvaluateRow>& rows) {
    MetricAggregate agg;
    if (rows.empty()) return agg;
    for (const EvaluateRow& r : rows) {
        agg.fm += r.metrics.fm;
        agg.fps += r.metrics.fps;
        agg.psnr += r.metrics.psnr;
        agg.drd += r.metrics.drd;
        agg.nrm += r.metrics.nrm;
    }
    const double n = static_cast<double>(rows.size());
    agg.fm /= n;
    agg.fps /= n;
    agg.psnr /= n;
    agg.drd /= n;
    agg.nrm /= n;
    return agg;
}

MetricAggregate pooled_aggregate(const std::vector<EvaluateRow>& rows) {
    MetricAggregate agg;
    ConfusionCounts counts;
    PseudoRecallCounts pseudo;
    DrdComponents drdc;
    for (const EvaluateRow& r : rows) {
        counts += r.metrics.counts;
        pseudo.hits += r.pseudo.hits;
        pseudo.skeleton += r.pseudo.skeleton;
        drdc.distortion += r.drd.distortion;
        drdc.nubn += r.drd.nubn;
        drdc.flipped += r.drd.flipped;
    }
    agg.fm = f_measure(counts);
    const std::uint64_t diff = counts.fp + counts.fn;
    agg.psnr = diff == 0 ? std::numeric_limits<double>::infinity()
                         : 10.0 * std::log10(static_cast<double>(counts.total()) /
                                             static_cast<double>(diff));
    agg.nrm = nrm(counts);
    if (pseudo.skeleton > 0 && pseudo.hits > 0 && counts.tp > 0) {
        const double rps =
            static_cast<double>(pseudo.hits) / static_cast<double>(pseudo.skeleton);
        const double p =
            static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
        agg.fps = 2.0 * rps * p / (rps + p);
    }
    if (drdc.flipped == 0)
        agg.drd = 0.0;
    else if (drdc.nubn == 0)
        throw DegenerateDataError("uniform GT");
    else
        agg.drd = drdc.distortion / static_cast<double>(drdc.nubn);
    return agg;
}

void aggregate_to_json(nlohmann::json& j, const MetricAggregate& a) {
    auto pct = [](double v) { return std::round(v * 10000.0) / 100.0; };
    auto two = [](double v) { return std::round(v * 100.0) / 100.0; };
    j["FM"] = pct(a.fm);
    j["Fps"] = pct(a.fps);
    if (std::isinf(a.psnr))
        j["PSNR"] = "inf";
    else
        j["PSNR"] = two(a.psnr);
    j["DRD"] = two(a.drd);
    j["NRM"] = two(a.nrm);
}

} // namespace

void RunConfig::validate() const {
    edge.validate();
    solver.validate();
    threshold.validate();
    if (jobs < 1) throw ParameterError("jobs must be >= 1");
}

PipelineResult run_pipeline(const LoadedImage& input, const RunConfig& cfg, ProgressSink* sink) {
    cfg.validate();
    if (cfg.threshold.kind == ThresholdSpec::Kind::Sweep)
        throw ParameterError("sweep thresholds are handled by the curves command");

    PipelineResult out;
    const GrayImage channel = resolve_channel(input, cfg.channel, out.chosen_channel);
    const GrayImage u0 = normalize_signed(channel);

    out.resolved_k = compute_edge_field(u0, cfg.edge, cfg.solver.c_e).k;
    out.evolved = cfg.solver.alpha == 1.0 ? evolve(u0, cfg.solver, cfg.edge, sink)
                                          : evolve_fractional(u0, cfg.solver, cfg.edge, sink);

    out.resolved_threshold = cfg.threshold.kind == ThresholdSpec::Kind::Otsu
                                 ? otsu_threshold(out.evolved)
                                 : cfg.threshold.t0;
    out.binary = binarize_fixed(out.evolved, out.resolved_threshold);
    return out;
}

EvaluateResult run_evaluate(const RunConfig& cfg) {
    cfg.validate();
    std::vector<DatasetEntry> entries = scan_dataset(cfg.dataset_dir, cfg.gt_suffix);
    std::erase_if(entries, [](const DatasetEntry& e) { return !e.gt_path.has_value(); });
    if (entries.empty())
        throw DegenerateDataError("no GT-paired images in " + cfg.dataset_dir.string());

    EvaluateResult result;
    result.rows.resize(entries.size());
    parallel_for(entries.size(), cfg.jobs, [&](size_t i) {
        const DatasetEntry& entry = entries[i];
        const LoadedImage img = load_image(entry.image_path);
        const BinaryImage gt = load_ground_truth(*entry.gt_path);
        const int w = std::holds_alternative<GrayImage>(img) ? std::get<GrayImage>(img).width
                                                             : std::get<RgbImage>(img).width;
        const int h = std::holds_alternative<GrayImage>(img) ? std::get<GrayImage>(img).height
                                                             : std::get<RgbImage>(img).height;
        if (w != gt.width || h != gt.height)
            throw IoError("GT dimensions mismatch for " + entry.stem);

        const PipelineResult pr = run_pipeline(img, cfg);
        EvaluateRow row;
        row.stem = entry.stem;
        row.metrics = evaluate_pair(pr.binary, gt);
        row.pseudo = pseudo_recall_counts(pr.binary, gt);
        row.drd = drd_components(pr.binary, gt);
        result.rows[i] = std::move(row);
    });
    // scan_dataset sorts by stem, so rows are already canonical.
    result.mean = mean_aggregate(result.rows);
    result.pooled = pooled_aggregate(result.rows);
    return result;
}

std::string evaluate_csv(const EvaluateResult& r) {
    std::ostringstream os;
    os << metrics_csv_header() << '\n';
    for (const EvaluateRow& row : r.rows) os << metrics_csv_row(row.stem, row.metrics) << '\n';
    return os.str();
}

std::string evaluate_summary_json(const EvaluateResult& r) {
    nlohmann::json j;
    j["images"] = r.rows.size();
    aggregate_to_json(j["mean_per_image"], r.mean);
    aggregate_to_json(j["pixel_pooled"], r.pooled);
    j["orientation"] = {{"FM", "higher"}, {"Fps", "higher"}, {"PSNR", "higher"},
                        {"DRD", "lower"}, {"NRM", "lower"}};
    return j.dump(2) + "\n";
}

SweepGrid SweepGrid::cartesian(const std::map<std::string, std::vector<double>>& axes) {
    SweepGrid grid;
    for (const auto& [name, values] : axes) {
        if (!known_grid_param(name)) throw ParameterError("unknown sweep parameter '" + name + "'");
        if (values.empty()) throw ParameterError("empty value list for sweep parameter '" + name + "'");
    }
    for (const std::string& name : kGridParamOrder)
        if (axes.count(name)) grid.names.push_back(name);

    grid.points.push_back({});
    for (const std::string& name : grid.names) {
        std::vector<std::map<std::string, double>> expanded;
        expanded.reserve(grid.points.size() * axes.at(name).size());
        for (const auto& point : grid.points)
            for (double v : axes.at(name)) {
                auto p = point;
                p[name] = v;
                expanded.push_back(std::move(p));
            }
        grid.points = std::move(expanded);
    }
    return grid;
}

bool SweepGrid::is_preset_name(const std::string& name) {
    return name == "fig3" || name == "fig4" || name == "fig5" || name == "fig6";
}

SweepGrid SweepGrid::preset(const std::string& name) {
    SweepGrid grid;
    auto use = [&](std::initializer_list<std::string> names) {
        grid.names.assign(names.begin(), names.end());
    };
    if (name == "fig3") {
        use({"iters", "tau", "ce", "cs"});
        grid.points = {{{"iters", 10}, {"tau", 0.25}, {"ce", 0.95}, {"cs", 1}},
                       {{"iters", 5}, {"tau", 0.5}, {"ce", 1}, {"cs", 1}}};
    } else if (name == "fig4") {
        use({"iters", "tau", "ce", "cs", "sigma", "rho", "T0"});
        grid.points = {{{"iters", 10}, {"tau", 0.125}, {"ce", 0.2}, {"cs", 0.9},
                        {"sigma", 0.3}, {"rho", 0.4}, {"T0", 0.2}},
                       {{"iters", 10}, {"tau", 0.125}, {"ce", 0.15}, {"cs", 0.9},
                        {"sigma", 0.3}, {"rho", 0.4}, {"T0", 0.2}},
                       {{"iters", 10}, {"tau", 0.125}, {"ce", 0.15}, {"cs", 0.85}, {"T0", 0.2}}};
    } else if (name == "fig5") {
        use({"iters", "tau", "ce", "cs"});
        grid.points = {{{"iters", 5}, {"tau", 0.5}, {"ce", 1}, {"cs", 1}},
                       {{"iters", 5}, {"tau", 0.25}, {"ce", 0.5}, {"cs", 0.75}},
                       {{"iters", 10}, {"tau", 0.125}, {"ce", 0.55}, {"cs", 0.8}},
                       {{"iters", 10}, {"tau", 0.125}, {"ce", 0.5}, {"cs", 0.8}},
                       {{"iters", 5}, {"tau", 0.25}, {"ce", 0.4}, {"cs", 0.8}}};
    } else if (name == "fig6") {
        use({"iters", "tau", "ce", "cs"});
        grid.points = {{{"iters", 5}, {"tau", 0.5}, {"ce", 1}, {"cs", 1}},
                       {{"iters", 5}, {"tau", 0.25}, {"ce", 1}, {"cs", 1}},
                       {{"iters", 10}, {"tau", 0.25}, {"ce", 1}, {"cs", 0.9}},
                       {{"iters", 10}, {"tau", 0.25}, {"ce", 1}, {"cs", 0.85}}};
    } else {
        throw ParameterError("unknown sweep preset '" + name + "'");
    }
    return grid;
}

SweepGrid SweepGrid::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("unreadable file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("unreadable file: " + path.string() + " (" + e.what() + ")");
    }
    if (!j.is_object()) throw ParameterError("grid file must hold a JSON object");

    if (j.contains("points")) {
        SweepGrid grid;
        std::vector<std::string> seen;
        for (const auto& jp : j.at("points")) {
            std::map<std::string, double> point;
            for (const auto& [key, value] : jp.items()) {
                if (!known_grid_param(key))
                    throw ParameterError("unknown sweep parameter '" + key + "'");
                point[key] = value.get<double>();
                if (std::find(seen.begin(), seen.end(), key) == seen.end()) seen.push_back(key);
            }
            grid.points.push_back(std::move(point));
        }
        for (const std::string& name : kGridParamOrder)
            if (std::find(seen.begin(), seen.end(), name) != seen.end())
                grid.names.push_back(name);
        return grid;
    }

    std::map<std::string, std::vector<double>> axes;
    for (const auto& [key, value] : j.items()) {
        std::vector<double>& vs = axes[key];
        if (value.is_array())
            for (const auto& v : value) vs.push_back(v.get<double>());
        else
            vs.push_back(value.get<double>());
    }
    return cartesian(axes);
}

RunConfig apply_grid_point(const RunConfig& base, const std::map<std::string, double>& point) {
    RunConfig cfg = base;
    for (const auto& [name, v] : point) {
        if (name == "iters") cfg.solver.iterations = static_cast<int>(std::lround(v));
        else if (name == "tau") cfg.solver.tau = v;
        else if (name == "ce") cfg.solver.c_e = v;
        else if (name == "cs") cfg.solver.c_s = v;
        else if (name == "a") cfg.solver.a = v;
        else if (name == "alpha") cfg.solver.alpha = v;
        else if (name == "p") cfg.edge.p = v;
        else if (name == "q") cfg.edge.q = v;
        else if (name == "sigma") cfg.edge.sigma = v;
        else if (name == "rho") cfg.edge.rho = v;
        else if (name == "k") { cfg.edge.k = v; cfg.edge.k_auto = false; }
        else if (name == "T0") cfg.threshold = ThresholdSpec::fixed(v);
        else throw ParameterError("unknown sweep parameter '" + name + "'");
    }
    return cfg;
}

std::string run_sweep(const RunConfig& cfg, const SweepGrid& grid) {
    cfg.validate();
    if (grid.points.empty()) throw ParameterError("sweep grid has no points");
    if (grid.points.size() > cfg.grid_cap)
        throw ParameterError("sweep grid has " + std::to_string(grid.points.size()) +
                             " points, exceeding the cap of " + std::to_string(cfg.grid_cap));

    std::vector<DatasetEntry> entries = scan_dataset(cfg.dataset_dir, cfg.gt_suffix);
    std::erase_if(entries, [](const DatasetEntry& e) { return !e.gt_path.has_value(); });
    if (entries.empty())
        throw DegenerateDataError("no GT-paired images in " + cfg.dataset_dir.string());

    struct Task {
        size_t entry, point;
    };
    std::vector<Task> tasks;
    tasks.reserve(entries.size() * grid.points.size());
    for (size_t e = 0; e < entries.size(); ++e)
        for (size_t p = 0; p < grid.points.size(); ++p) tasks.push_back({e, p});

    std::vector<MetricsReport> reports(tasks.size());
    parallel_for(tasks.size(), cfg.jobs, [&](size_t i) {
        const Task& task = tasks[i];
        const RunConfig point_cfg = apply_grid_point(cfg, grid.points[task.point]);
        const LoadedImage img = load_image(entries[task.entry].image_path);
        const BinaryImage gt = load_ground_truth(*entries[task.entry].gt_path);
        const PipelineResult pr = run_pipeline(img, point_cfg);
        reports[i] = evaluate_pair(pr.binary, gt);
    });

    std::ostringstream os;
    os << "stem";
    for (const std::string& name : grid.names) os << ',' << name;
    os << ",FM,Fps,PSNR,DRD,NRM\n";
    for (size_t i = 0; i < tasks.size(); ++i) {
        const Task& task = tasks[i];
        os << entries[task.entry].stem;
        for (const std::string& name : grid.names) {
            const auto& point = grid.points[task.point];
            auto it = point.find(name);
            os << ',' << (it == point.end() ? "" : num(it->second));
        }
        const MetricsReport& m = reports[i];
        auto pct = [](double v) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
            return std::string(buf);
        };
        auto two = [](double v) {
            if (std::isinf(v)) return std::string("inf");
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            return std::string(buf);
        };
        os << ',' << pct(m.fm) << ',' << pct(m.fps) << ',' << two(m.psnr) << ',' << two(m.drd)
           << ',' << two(m.nrm) << '\n';
    }
    return os.str();
}

std::vector<CurveOutput> run_curves(const RunConfig& cfg, double lo, double hi, double step) {
    cfg.validate();
    ThresholdSpec::sweep(lo, hi, step);
    std::vector<DatasetEntry> entries = scan_dataset(cfg.dataset_dir, cfg.gt_suffix);
    std::erase_if(entries, [](const DatasetEntry& e) { return !e.gt_path.has_value(); });
    if (entries.empty())
        throw DegenerateDataError("no GT-paired images in " + cfg.dataset_dir.string());

    std::vector<CurveOutput> out(entries.size());
    parallel_for(entries.size(), cfg.jobs, [&](size_t i) {
        const LoadedImage img = load_image(entries[i].image_path);
        const BinaryImage gt = load_ground_truth(*entries[i].gt_path);
        RunConfig fixed_cfg = cfg;
        fixed_cfg.threshold = ThresholdSpec::fixed(0.5); // threshold applied by the sweep below
        const PipelineResult pr = run_pipeline(img, fixed_cfg);
        out[i].stem = entries[i].stem;
        out[i].curve = sweep_thresholds(pr.evolved, gt, lo, hi, step);
    });
    return out;
}

ChannelsReport run_channels(const RunConfig& cfg) {
    cfg.validate();
    ChannelsReport report;
    const LoadedImage img = load_image(cfg.input);
    if (std::holds_alternative<GrayImage>(img)) {
        report.color = false;
        report.chosen = "gray";
        report.variance["gray"] = otsu_variance(std::get<GrayImage>(img));
        return report;
    }
    const RgbImage& rgb = std::get<RgbImage>(img);
    report.color = true;
    const GrayImage gray = to_grayscale(rgb);
    const HsiChannels hsi = rgb_to_hsi(rgb);
    report.variance["gray"] = otsu_variance(gray);
    report.variance["intensity"] = otsu_variance(hsi.i);
    report.variance["hue"] = otsu_variance(hsi.h);
    report.variance["saturation"] = otsu_variance(hsi.s);
    select_channel(rgb, ChannelMode::Auto, report.chosen);
    return report;
}

std::string config_json(const RunConfig& cfg, const PipelineResult* resolved) {
    nlohmann::json j;
    j["channel"] = channel_mode_name(cfg.channel);
    j["a"] = cfg.solver.a;
    j["p"] = cfg.edge.p;
    j["q"] = cfg.edge.q;
    if (cfg.edge.k_auto)
        j["k"] = "auto";
    else
        j["k"] = cfg.edge.k;
    j["cs"] = cfg.solver.c_s;
    j["ce"] = cfg.solver.c_e;
    j["tau"] = cfg.solver.tau;
    j["iters"] = cfg.solver.iterations;
    j["alpha"] = cfg.solver.alpha;
    j["memory-len"] = cfg.solver.memory_len;
    j["sigma"] = cfg.edge.sigma;
    j["rho"] = cfg.edge.rho;
    j["edge-mode"] = edge_mode_name(cfg.edge.mode);
    j["frozen-edges"] = cfg.solver.frozen_edges;
    j["threshold"] = cfg.threshold.describe();
    j["gt-suffix"] = cfg.gt_suffix;
    j["jobs"] = cfg.jobs;
    if (!cfg.input.empty()) j["input"] = cfg.input.string();
    if (!cfg.dataset_dir.empty()) j["dataset"] = cfg.dataset_dir.string();
    if (resolved) {
        j["resolved-channel"] = resolved->chosen_channel;
        j["resolved-k"] = resolved->resolved_k;
        j["resolved-threshold"] = resolved->resolved_threshold;
    }
    return j.dump(2) + "\n";
}

} // namespace docbin
