#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ftspec/bandwidth.hpp"
#include "ftspec/errors.hpp"
#include "ftspec/estimator.hpp"
#include "ftspec/io.hpp"
#include "ftspec/kernels.hpp"
#include "ftspec/parallel.hpp"
#include "ftspec/psd.hpp"
#include "ftspec/sim.hpp"

namespace ftspec::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> resolve_frequencies(const std::string& text, std::size_t length) {
    if (text == "default") return default_frequencies();
    if (text == "fourier") return fourier_frequencies(length);
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("frequency '" + item + "' is not a number");
        }
    }
    return out;
}

struct ResolvedBandwidth {
    double value = 0.0;
    std::optional<BandwidthReport> report;
};

ResolvedBandwidth resolve_bandwidth(const RunConfig& cfg, const FunctionalSeries& centered, const FlatTopSpec& spec) {
    if (cfg.bandwidth == "auto") {
        BandwidthOptions opts;
        opts.c0 = cfg.c0;
        opts.aggregation = parse_aggregation(cfg.aggregation);
        opts.window = parse_lag_window(cfg.window);
        BandwidthReport report = select_bandwidth(centered, spec, opts);
        return {report.bandwidth, report};
    }
    if (cfg.bandwidth == "rate" || cfg.bandwidth == "rate2") {
        return {rate_bandwidth(parse_bandwidth_mode(cfg.bandwidth), centered.length()), std::nullopt};
    }
    double value = 0.0;
    try {
        value = std::stod(cfg.bandwidth);
    } catch (const std::exception&) {
        throw ConfigError("bandwidth must be auto, rate, rate2 or a number in (0, 1); got '" + cfg.bandwidth + "'");
    }
    if (!(value > 0.0 && value < 1.0)) throw ConfigError("explicit bandwidth must lie in (0, 1)");
    return {value, std::nullopt};
}

void run_simulate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.output.empty()) throw ConfigError("simulate needs --out");
    const Grid grid(cfg.grid_size);
    Fma1Model model = Fma1Model::random(grid, cfg.seed);
    if (cfg.model == "iid") {
        model.a1.setZero();
    } else if (cfg.model != "fma1") {
        throw ConfigError("unknown model '" + cfg.model + "' (expected fma1 or iid)");
    }
    const FunctionalSeries series = generate_fma1(model, cfg.length);
    io::write_series_csv(fs::path(cfg.output), series);
    out << "wrote " << series.length() << " curves on " << series.dim() << " grid points to " << cfg.output << '\n';
}

void run_estimate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.input.empty()) throw ConfigError("estimate needs --in");
    if (cfg.output.empty()) throw ConfigError("estimate needs --out");
    if (cfg.eps && !(*cfg.eps > 0.0)) throw ConfigError("--eps must be positive");
    const FlatTopSpec spec = FlatTopSpec::parse(cfg.kernel);
    const EstimationMethod method = parse_method(cfg.method);
    const FunctionalSeries series = center(io::read_series_csv(fs::path(cfg.input)));
    const auto frequencies = resolve_frequencies(cfg.frequencies, series.length());
    const ResolvedBandwidth bw = resolve_bandwidth(cfg, series, spec);
    EstimateOptions options;
    options.threads = cfg.threads;

    SpectralEstimate est = method == EstimationMethod::LagWindow
                               ? estimate_lagwindow(series, spec, bw.value, frequencies, options)
                               : estimate_smoothed(series, spec, bw.value, frequencies, options);

    const double eps = cfg.eps.value_or(1.0 / static_cast<double>(series.length()));
    if (cfg.psd == "semidefinite") {
        for (auto& k : est.kernels) k = clip_to_psd(k);
    } else if (cfg.psd == "definite") {
        for (auto& k : est.kernels) k = clip_to_pd(k, eps);
    } else if (cfg.psd != "none") {
        throw ConfigError("--psd must be none, semidefinite or definite");
    }

    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    io::write_json_file(dir / "estimate.json", io::estimate_to_json(est));
    io::write_estimate_csv_dir(dir / "csv", est);

    json per_frequency = json::array();
    double max_residual = 0.0;
    for (const auto& k : est.kernels) {
        const double residual = k.hermitian_residual();
        max_residual = std::max(max_residual, residual);
        per_frequency.push_back({{"omega", k.omega()}, {"min_eigenvalue", min_eigenvalue(k)}, {"hermitian_residual", residual}});
    }
    json summary = {{"kernel", json::parse(spec.to_json())},
                    {"method", to_string(est.method)},
                    {"bandwidth", est.bandwidth},
                    {"bandwidth_source", cfg.bandwidth},
                    {"psd", cfg.psd},
                    {"T", series.length()},
                    {"d", series.dim()},
                    {"max_hermitian_residual", max_residual},
                    {"frequencies", std::move(per_frequency)}};
    if (cfg.psd == "definite") summary["eps"] = eps;
    if (bw.report) summary["bandwidth_report"] = io::bandwidth_report_to_json(*bw.report);
    io::write_json_file(dir / "summary.json", summary);
    out << "estimated " << est.kernels.size() << " frequencies with " << spec.id() << " at B_T = " << est.bandwidth
        << " into " << dir.string() << '\n';
}

void run_bandwidth(const RunConfig& cfg, std::ostream& out) {
    if (cfg.input.empty()) throw ConfigError("bandwidth needs --in");
    const FlatTopSpec spec = FlatTopSpec::parse(cfg.kernel);
    const FunctionalSeries series = center(io::read_series_csv(fs::path(cfg.input)));
    BandwidthOptions opts;
    opts.c0 = cfg.c0;
    opts.aggregation = parse_aggregation(cfg.aggregation);
    opts.window = parse_lag_window(cfg.window);
    const BandwidthReport report = select_bandwidth(series, spec, opts);
    const json j = io::bandwidth_report_to_json(report);
    if (cfg.output.empty()) {
        out << j.dump(2) << '\n';
    } else {
        io::write_json_file(fs::path(cfg.output), j);
        out << "q_hat = " << report.q_hat << ", B_T = " << report.bandwidth << '\n';
    }
}

void write_traces(const RunConfig& cfg, const ImseConfig& bench, const fs::path& dir) {
    const Grid grid(bench.grid_size);
    const Fma1Model model = Fma1Model::random(grid, cfg.seed);
    const std::size_t length = bench.lengths.back();
    const FunctionalSeries series = center(generate_fma1(model, length));
    std::vector<double> frequencies;
    for (int k = 0; k <= 64; ++k) frequencies.push_back(M_PI * k / 64.0);
    const TrueSpectrum truth = true_spectrum(model, frequencies);
    const std::size_t tau = pilot_index(5, grid.size());

    fs::create_directories(dir / "traces");
    for (const auto& spec : bench.kernels) {
        double bandwidth = 0.0;
        if (bench.bandwidth_mode == BandwidthMode::Auto) {
            if (!spec.is_flat_top()) continue;
            bandwidth = select_bandwidth(series, spec, bench.bandwidth_options).bandwidth;
        } else {
            bandwidth = rate_bandwidth(bench.bandwidth_mode, length, bench.fixed_bandwidth);
        }
        const SpectralEstimate est = estimate_smoothed(series, spec, bandwidth, frequencies);
        std::ostringstream csv;
        csv << "omega,tau,abs_f_hat,abs_f_true\n";
        const auto idx = static_cast<Eigen::Index>(tau);
        for (std::size_t k = 0; k < frequencies.size(); ++k) {
            csv << frequencies[k] << ',' << grid.point(tau) << ',' << std::abs(est.kernels[k].matrix()(idx, idx)) << ','
                << std::abs(truth.kernels[k].matrix()(idx, idx)) << '\n';
        }
        io::write_text_file(dir / "traces" / ("trace_" + spec.id() + ".csv"), csv.str());
    }
}

void run_bench(const RunConfig& cfg, std::ostream& out) {
    if (cfg.output.empty()) throw ConfigError("bench needs --out");
    ImseConfig bench;
    bench.lengths.clear();
    for (const auto& item : split_list(cfg.lengths)) {
        try {
            bench.lengths.push_back(static_cast<std::size_t>(std::stoul(item)));
        } catch (const std::exception&) {
            throw ConfigError("sample size '" + item + "' is not an integer");
        }
    }
    bench.kernels.clear();
    for (const auto& item : split_list(cfg.kernels)) bench.kernels.push_back(FlatTopSpec::parse(item));
    bench.runs = cfg.runs;
    bench.seed = cfg.seed;
    bench.threads = cfg.threads;
    bench.grid_size = cfg.grid_size;
    bench.freeze_operators = cfg.freeze_operators;
    bench.bandwidth_options.c0 = cfg.c0;
    bench.bandwidth_options.aggregation = parse_aggregation(cfg.aggregation);
    bench.bandwidth_options.window = parse_lag_window(cfg.window);
    if (cfg.bandwidth == "rate" || cfg.bandwidth == "rate2" || cfg.bandwidth == "auto") {
        bench.bandwidth_mode = parse_bandwidth_mode(cfg.bandwidth);
    } else {
        bench.bandwidth_mode = BandwidthMode::Fixed;
        try {
            bench.fixed_bandwidth = std::stod(cfg.bandwidth);
        } catch (const std::exception&) {
            throw ConfigError("bandwidth must be auto, rate, rate2 or a number in (0, 1)");
        }
        if (!(bench.fixed_bandwidth > 0.0 && bench.fixed_bandwidth < 1.0)) throw ConfigError("explicit bandwidth must lie in (0, 1)");
    }
    if (bench.lengths.empty()) throw ConfigError("bench needs at least one sample size");

    const ImseResult result = imse_experiment(bench);
    const fs::path dir(cfg.output);
    fs::create_directories(dir);
    std::ostringstream csv;
    io::write_imse_csv(csv, result);
    io::write_text_file(dir / "imse.csv", csv.str());
    io::write_json_file(dir / "imse.json", io::imse_to_json(result));
    write_traces(cfg, bench, dir);
    out << csv.str();
}

// Binds one flag to a RunConfig member; remembers whether it was given explicitly.
struct Binding {
    CLI::Option* option;
    std::function<void(RunConfig&, const RunConfig&)> copy;
    std::function<void(RunConfig&, const json&)> from_json;
    std::string key;
};

template <typename T>
Binding bind_option(CLI::App* app, const std::string& flag, const std::string& key, T RunConfig::*member, RunConfig& flags,
             const std::string& help) {
    Binding b;
    b.option = app->add_option(flag, flags.*member, help);
    b.copy = [member](RunConfig& dst, const RunConfig& src) { dst.*member = src.*member; };
    b.from_json = [member](RunConfig& dst, const json& j) { dst.*member = j.get<T>(); };
    b.key = key;
    return b;
}

}  // namespace

void execute(const RunConfig& config, std::ostream& out) {
    if (config.command == "simulate") return run_simulate(config, out);
    if (config.command == "estimate") return run_estimate(config, out);
    if (config.command == "bandwidth") return run_bandwidth(config, out);
    if (config.command == "bench") return run_bench(config, out);
    throw ConfigError("unknown command '" + config.command + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto fail = [&](ExitCode code, const std::string& kind, const std::string& message) {
        err << json{{"error", kind}, {"message", message}, {"exit_code", static_cast<int>(code)}}.dump() << '\n';
        return static_cast<int>(code);
    };

    CLI::App app{"Flat-top spectral density estimation for functional time series", "ftspec"};
    app.require_subcommand(1);
    RunConfig flags;
    std::string config_path;
    double eps_flag = 0.0;
    std::vector<Binding> bindings;

    auto* simulate = app.add_subcommand("simulate", "Generate an FMA(1) functional series as CSV");
    auto* estimate = app.add_subcommand("estimate", "Estimate the spectral density kernel of a series");
    auto* bandwidth = app.add_subcommand("bandwidth", "Select B_T by correlogram thresholding");
    auto* bench = app.add_subcommand("bench", "Monte-Carlo IMSE comparison of kernels");

    for (auto* sub : {simulate, estimate, bandwidth, bench}) {
        sub->add_option("--config", config_path, "JSON file with default settings");
        bindings.push_back(bind_option(sub, "--out,-o", "output", &RunConfig::output, flags, "Output file or directory"));
        bindings.push_back(bind_option(sub, "--seed", "seed", &RunConfig::seed, flags, "Random seed"));
        bindings.push_back(bind_option(sub, "--threads", "threads", &RunConfig::threads, flags, "Worker threads (0 = FTSPEC_THREADS or all cores)"));
    }
    bindings.push_back(bind_option(simulate, "--model", "model", &RunConfig::model, flags, "fma1 or iid"));
    bindings.push_back(bind_option(simulate, "--T", "T", &RunConfig::length, flags, "Number of curves"));
    for (auto* sub : {simulate, bench}) {
        bindings.push_back(bind_option(sub, "--d", "d", &RunConfig::grid_size, flags, "Grid points per curve"));
    }
    for (auto* sub : {estimate, bandwidth}) {
        bindings.push_back(bind_option(sub, "--in,-i", "input", &RunConfig::input, flags, "Series CSV"));
        bindings.push_back(bind_option(sub, "--kernel", "kernel", &RunConfig::kernel, flags, "TR, PR, ID, EPA or JSON spec"));
    }
    for (auto* sub : {estimate, bandwidth, bench}) {
        bindings.push_back(bind_option(sub, "--C0", "C0", &RunConfig::c0, flags, "Correlogram threshold constant"));
        bindings.push_back(bind_option(sub, "--aggregation", "aggregation", &RunConfig::aggregation, flags, "max or mean"));
        bindings.push_back(bind_option(sub, "--window", "window", &RunConfig::window, flags, "next-lag or candidate"));
    }
    for (auto* sub : {estimate, bench}) {
        bindings.push_back(bind_option(sub, "--bandwidth", "bandwidth", &RunConfig::bandwidth, flags, "auto, rate, rate2 or a value in (0,1)"));
    }
    bindings.push_back(bind_option(estimate, "--method", "method", &RunConfig::method, flags, "smoothed-periodogram or lag-window"));
    bindings.push_back(bind_option(estimate, "--psd", "psd", &RunConfig::psd, flags, "none, semidefinite or definite"));
    auto* eps_option = estimate->add_option("--eps", eps_flag, "Eigenvalue floor for --psd definite (default 1/T)");
    bindings.push_back(bind_option(estimate, "--frequencies", "frequencies", &RunConfig::frequencies, flags, "default, fourier or a comma list"));
    bindings.push_back(bind_option(bench, "--T-list", "T_list", &RunConfig::lengths, flags, "Comma-separated sample sizes"));
    bindings.push_back(bind_option(bench, "--runs", "runs", &RunConfig::runs, flags, "Replications per sample size"));
    bindings.push_back(bind_option(bench, "--kernels", "kernels", &RunConfig::kernels, flags, "Comma-separated kernel ids"));
    auto* freeze = bench->add_flag("--freeze-operators", flags.freeze_operators, "Use one A0, A1 for all replications");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return fail(ExitCode::InvalidConfig, "config", e.what());
    }

    RunConfig cfg;
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (std::getenv("FTSPEC_THREADS")) cfg.threads = default_parallelism();

    try {
        if (!config_path.empty()) {
            const json file = io::read_json_file(fs::path(config_path));
            if (!file.is_object()) throw ParseError("config file must hold a JSON object");
            for (const auto& b : bindings) {
                if (file.contains(b.key)) {
                    try {
                        b.from_json(cfg, file.at(b.key));
                    } catch (const json::exception& e) {
                        throw ParseError("config key '" + b.key + "': " + e.what());
                    }
                }
            }
            try {
                if (file.contains("eps")) cfg.eps = file.at("eps").get<double>();
                if (file.contains("freeze_operators")) cfg.freeze_operators = file.at("freeze_operators").get<bool>();
            } catch (const json::exception& e) {
                throw ParseError(std::string("config file: ") + e.what());
            }
        }
        for (const auto& b : bindings) {
            if (b.option->count() > 0) b.copy(cfg, flags);
        }
        if (eps_option->count() > 0) cfg.eps = eps_flag;
        if (freeze->count() > 0) cfg.freeze_operators = true;

        execute(cfg, out);
    } catch (const ParseError& e) {
        return fail(ExitCode::ParseFailure, e.kind(), e.what());
    } catch (const NumericError& e) {
        return fail(ExitCode::NumericFailure, e.kind(), e.what());
    } catch (const DegenerateDataError& e) {
        return fail(ExitCode::NumericFailure, e.kind(), e.what());
    } catch (const Error& e) {
        return fail(ExitCode::InvalidConfig, e.kind(), e.what());
    } catch (const std::exception& e) {
        return fail(ExitCode::InvalidConfig, "config", e.what());
    }
    return 0;
}

}  // namespace ftspec::cli
