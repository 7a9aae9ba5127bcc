#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "docbin/pipeline.hpp"
#include "json_config.hpp"

namespace fs = std::filesystem;
using namespace docbin;

namespace {

// Flag holders that need post-parse interpretation.
struct RawOptions {
    std::string channel = "auto";
    std::string edge_mode = "structure-tensor";
    std::string k = "auto";
    std::string threshold = "fixed:0.2";
    std::string grid;
    double lo = 0.05, hi = 0.95, step = 0.05;
};

class ConsoleSink : public ProgressSink {
public:
    void on_step(int iteration, double mean_abs_delta) override {
        std::printf("iter=%d mean_abs_delta=%.6e\n", iteration, mean_abs_delta);
    }
    void on_warning(std::string_view message) override {
        std::cerr << "warning: " << message << "\n";
    }
};

void finalize_config(RunConfig& cfg, const RawOptions& raw) {
    cfg.channel = parse_channel_mode(raw.channel);
    cfg.edge.mode = parse_edge_mode(raw.edge_mode);
    if (raw.k == "auto") {
        cfg.edge.k_auto = true;
    } else {
        cfg.edge.k_auto = false;
        try {
            size_t consumed = 0;
            cfg.edge.k = std::stod(raw.k, &consumed);
            if (consumed != raw.k.size()) throw std::invalid_argument(raw.k);
        } catch (const std::logic_error&) {
            throw ParameterError("--k expects 'auto' or a number, got '" + raw.k + "'");
        }
    }
    cfg.threshold = ThresholdSpec::parse(raw.threshold);
    cfg.validate();
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << content;
    if (!out) throw IoError("cannot write file: " + path.string());
}

fs::path ensure_out_dir(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out))
        throw IoError("cannot create output directory: " + out.string());
    return out;
}

void warn_tau(const RunConfig& cfg) {
    if (cfg.solver.tau > 0.5)
        std::cerr << "warning: tau > 0.5 exceeds the largest tested time step\n";
}

int cmd_binarize(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ParameterError("binarize requires --input");
    const LoadedImage img = load_image(cfg.input);

    ConsoleSink sink;
    const PipelineResult result = run_pipeline(img, cfg, &sink);

    fs::path out_file = cfg.out_path;
    if (out_file.empty() || !out_file.has_extension() || fs::is_directory(out_file)) {
        const fs::path dir = out_file.empty() ? fs::path(".") : out_file;
        ensure_out_dir(dir);
        out_file = dir / (cfg.input.stem().string() + "_bin.png");
    }
    save_image(out_file, result.binary);
    write_text_file(out_file.string() + ".json", config_json(cfg, &result));

    std::printf("channel=%s k=%.9g threshold=%.9g foreground=%llu/%zu\n",
                result.chosen_channel.c_str(), result.resolved_k, result.resolved_threshold,
                static_cast<unsigned long long>(result.binary.foreground_count()),
                result.binary.size());
    std::cout << "wrote " << out_file.string() << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    if (cfg.dataset_dir.empty()) throw ParameterError("evaluate requires --dataset");
    warn_tau(cfg);
    const EvaluateResult result = run_evaluate(cfg);
    const fs::path out = ensure_out_dir(cfg.out_path);
    write_text_file(out / "metrics.csv", evaluate_csv(result));
    const std::string summary = evaluate_summary_json(result);
    write_text_file(out / "summary.json", summary);
    write_text_file(out / "params.json", config_json(cfg));
    std::cout << summary;
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::string& grid_arg) {
    if (cfg.dataset_dir.empty()) throw ParameterError("sweep requires --dataset");
    if (grid_arg.empty()) throw ParameterError("sweep requires --grid <file|fig3|fig4|fig5|fig6>");
    warn_tau(cfg);
    const SweepGrid grid = SweepGrid::is_preset_name(grid_arg)
                               ? SweepGrid::preset(grid_arg)
                               : SweepGrid::from_json_file(grid_arg);
    const std::string csv = run_sweep(cfg, grid);
    const fs::path out = ensure_out_dir(cfg.out_path);
    write_text_file(out / "sweep.csv", csv);
    write_text_file(out / "params.json", config_json(cfg));
    std::cout << "wrote " << (out / "sweep.csv").string() << " (" << grid.points.size()
              << " grid points)\n";
    return 0;
}

int cmd_curves(const RunConfig& cfg, double lo, double hi, double step) {
    if (cfg.dataset_dir.empty()) throw ParameterError("curves requires --dataset");
    warn_tau(cfg);
    const std::vector<CurveOutput> curves = run_curves(cfg, lo, hi, step);
    const fs::path out = ensure_out_dir(cfg.out_path);

    std::ostringstream combined;
    combined << "stem,T,FM,Fps,PSNR,DRD,NRM\n";
    for (const CurveOutput& c : curves) {
        std::ostringstream single;
        write_curve_csv(single, c.curve);
        write_text_file(out / (c.stem + "_curve.csv"), single.str());

        std::istringstream rows(single.str());
        std::string line;
        std::getline(rows, line); // drop header
        while (std::getline(rows, line))
            if (!line.empty()) combined << c.stem << ',' << line << '\n';
        std::printf("%s: best FM %.4f at T=%.6f\n", c.stem.c_str(), c.curve.best_fm,
                    c.curve.best_threshold);
    }
    write_text_file(out / "curves.csv", combined.str());
    write_text_file(out / "params.json", config_json(cfg));
    return 0;
}

int cmd_channels(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ParameterError("channels requires --input");
    const fs::path out = ensure_out_dir(cfg.out_path);
    const std::string stem = cfg.input.stem().string();

    const LoadedImage img = load_image(cfg.input);
    const ChannelsReport report = run_channels(cfg);

    nlohmann::json j;
    j["color"] = report.color;
    j["chosen"] = report.chosen;
    for (const auto& [name, var] : report.variance) j["otsu_variance"][name] = var;

    if (!report.color) {
        save_image(out / (stem + "_gray.png"), std::get<GrayImage>(img));
        j["notice"] = "grayscale input: only the gray channel was written";
        std::cout << "notice: grayscale input, writing gray channel only\n";
    } else {
        const RgbImage& rgb = std::get<RgbImage>(img);
        const HsiChannels hsi = rgb_to_hsi(rgb);
        save_image(out / (stem + "_gray.png"), to_grayscale(rgb));
        save_image(out / (stem + "_hue.png"), hsi.h);
        save_image(out / (stem + "_saturation.png"), hsi.s);
        save_image(out / (stem + "_intensity.png"), hsi.i);
    }
    write_text_file(out / (stem + "_channels.json"), j.dump(2) + "\n");
    write_text_file(out / "params.json", config_json(cfg));
    std::cout << "chosen channel: " << report.chosen << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PDE-based binarization of degraded document images"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<docbin::cli::JsonConfig>());
    app.set_config("--config", "", "flat JSON config; flags override file values");
    app.allow_config_extras(false); // unknown config keys are parameter errors

    RunConfig cfg;
    RawOptions raw;
    std::string input, dataset, out = ".";

    app.add_option("--input", input, "input image (binarize, channels)");
    app.add_option("--dataset", dataset, "dataset directory (evaluate, sweep, curves)");
    app.add_option("--gt-suffix", cfg.gt_suffix, "ground-truth filename suffix")
        ->capture_default_str();
    app.add_option("--out", out, "output file (binarize) or directory")->capture_default_str();
    app.add_option("--channel", raw.channel, "gray|intensity|hue|saturation|auto")
        ->capture_default_str();
    app.add_option("--a", cfg.solver.a, "source shape, (0,1]")->capture_default_str();
    app.add_option("--p", cfg.edge.p, "diffusivity strength, > 0")->capture_default_str();
    app.add_option("--q", cfg.edge.q, "diffusivity sharpness, > 0")->capture_default_str();
    app.add_option("--k", raw.k, "contrast constant: auto or a positive number")
        ->capture_default_str();
    app.add_option("--cs", cfg.solver.c_s, "source coefficient")->capture_default_str();
    app.add_option("--ce", cfg.solver.c_e, "edge coefficient")->capture_default_str();
    app.add_option("--tau", cfg.solver.tau, "time step")->capture_default_str();
    app.add_option("--iters", cfg.solver.iterations, "iteration count N")->capture_default_str();
    app.add_option("--alpha", cfg.solver.alpha, "fractional order, (0,1]; 1 = integer scheme")
        ->capture_default_str();
    app.add_option("--memory-len", cfg.solver.memory_len,
                   "fractional history truncation; 0 keeps the full history")
        ->capture_default_str();
    app.add_option("--sigma", cfg.edge.sigma, "gradient pre-smoothing scale")
        ->capture_default_str();
    app.add_option("--rho", cfg.edge.rho, "tensor post-smoothing scale")->capture_default_str();
    app.add_option("--edge-mode", raw.edge_mode, "gradient|structure-tensor|hessian")
        ->capture_default_str();
    app.add_flag("--frozen-edges", cfg.solver.frozen_edges,
                 "reuse the edge field of the initial state for every step");
    app.add_option("--threshold", raw.threshold, "fixed:<T0> or otsu")->capture_default_str();
    app.add_option("--grid", raw.grid, "sweep grid: JSON file or fig3|fig4|fig5|fig6");
    app.add_option("--grid-cap", cfg.grid_cap, "maximum number of sweep grid points")
        ->capture_default_str();
    app.add_option("--lo", raw.lo, "curves: lowest threshold")->capture_default_str();
    app.add_option("--hi", raw.hi, "curves: highest threshold")->capture_default_str();
    app.add_option("--step", raw.step, "curves: threshold step")->capture_default_str();
    app.add_option("--jobs", cfg.jobs, "parallel workers")->capture_default_str();

    CLI::App* sub_binarize = app.add_subcommand("binarize", "binarize one image");
    CLI::App* sub_evaluate =
        app.add_subcommand("evaluate", "run the metric harness over a GT-paired dataset");
    CLI::App* sub_sweep = app.add_subcommand("sweep", "evaluate a parameter grid");
    CLI::App* sub_curves = app.add_subcommand("curves", "emit threshold/metric curves");
    CLI::App* sub_channels = app.add_subcommand("channels", "dump gray/HSI channels and report");
    for (CLI::App* sub : {sub_binarize, sub_evaluate, sub_sweep, sub_curves, sub_channels})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
        finalize_config(cfg, raw);
        cfg.input = input;
        cfg.dataset_dir = dataset;
        cfg.out_path = out;

        if (sub_binarize->parsed()) return cmd_binarize(cfg);
        if (sub_evaluate->parsed()) return cmd_evaluate(cfg);
        if (sub_sweep->parsed()) return cmd_sweep(cfg, raw.grid);
        if (sub_curves->parsed()) return cmd_curves(cfg, raw.lo, raw.hi, raw.step);
        if (sub_channels->parsed()) return cmd_channels(cfg);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateDataError& e) {
        std::cerr << "degenerate data: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
