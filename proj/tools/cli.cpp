#include "freqprior/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "freqprior/bench.hpp"
#include "freqprior/extract.hpp"
#include "freqprior/io.hpp"
#include "freqprior/lfm.hpp"

namespace freqprior::cli {

namespace {

using io::Json;

struct SeedOption {
    std::uint64_t value = 0;
    CLI::Option* option = nullptr;

    // Resolves an omitted --seed to a fresh one and announces it.
    std::uint64_t resolve(std::ostream& err) {
        if (option->count() == 0) {
            std::random_device rd;
            value = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
            err << "seed: " << value << "\n";
        }
        return value;
    }
};

void add_seed(CLI::App* cmd, SeedOption& seed) {
    seed.option = cmd->add_option("--seed", seed.value, "Master seed (random and printed if omitted)");
}

struct SynthOptions {
    bench::SyntheticConfig config;
    std::string out;
    std::string meta;
    SeedOption seed;
};

struct ExtractOptions {
    std::string input;
    std::string out;
    extract::ExtractionConfig config;
    double epsilon = 0.0;
    bool standardize = false;
};

struct FitOptions {
    std::string input;
    std::string out;
    std::string channel;
    std::string init = "fft";
    lfm::TrainConfig config;
    SeedOption seed;
};

struct BenchOptions {
    bench::BenchConfig config;
    std::size_t k = 5;
    std::size_t steps = 2000;
    std::string out;
    std::string stems_csv;
    std::string pooled_csv;
    SeedOption seed;
};

struct ForecastOptions {
    std::string input;
    std::string out;
    std::string pred_csv;
    std::size_t k = 5;
    std::size_t horizon = 96;
};

void add_extraction_flags(CLI::App* cmd, extract::ExtractionConfig& config) {
    cmd->add_option("--max-sweeps", config.max_sweeps, "Coordinate-descent sweep cap")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rtol", config.improvement_rtol, "Relative power gain needed to move a mode")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

TimeSeries select_channel(const TimeSeries& ts, const std::string& channel) {
    if (channel.empty()) {
        if (ts.channels() != 1) {
            throw Error(ErrorCode::MultiChannelUnsupported,
                        "input has " + std::to_string(ts.channels()) + " channels; pick one with --channel");
        }
        return ts;
    }
    const auto& names = ts.names();
    std::size_t idx = names.size();
    if (const auto it = std::find(names.begin(), names.end(), channel); it != names.end()) {
        idx = static_cast<std::size_t>(it - names.begin());
    } else {
        std::size_t parsed = 0;
        const auto [ptr, ec] = std::from_chars(channel.data(), channel.data() + channel.size(), parsed);
        if (ec == std::errc() && ptr == channel.data() + channel.size()) idx = parsed;
    }
    if (idx >= names.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "no channel named or numbered '" + channel + "'");
    }
    return TimeSeries::from_vector(ts.channel(idx), names[idx]);
}

int cmd_synth(SynthOptions& opt, std::ostream& out, std::ostream& err) {
    opt.config.seed = opt.seed.resolve(err);
    const TimeSeries y = bench::generate_synthetic(opt.config);
    Json meta;
    meta["command"] = "synth";
    meta["config"] = io::synthetic_config_to_json(opt.config);
    meta["output"] = opt.out;
    const std::string meta_path = opt.meta.empty() ? opt.out + ".meta.json" : opt.meta;
    io::write_csv(opt.out, y);
    io::write_text(meta_path, io::dump(meta));
    out << "wrote " << y.length() << " samples to " << opt.out << "\n";
    return kExitOk;
}

int cmd_extract(ExtractOptions& opt, std::ostream& out) {
    TimeSeries ts = io::load_csv(opt.input);
    if (opt.standardize) ts = standardize(ts).first;
    if (opt.epsilon > 0.0) opt.config.epsilon = opt.epsilon;
    const auto report = extract::extract_frequencies(ts, opt.config);

    Json j;
    j["command"] = "extract";
    j["input"] = opt.input;
    j["channel_names"] = ts.names();
    j["length"] = ts.length();
    j["standardized"] = opt.standardize;
    j["config"] = io::extraction_config_to_json(opt.config, ts.length());
    const Json body = io::extraction_to_json(report);
    for (const auto& [key, value] : body.items()) j[key] = value;
    io::write_text(opt.out, io::dump(j));
    out << "extracted " << report.model.modes() << " modes in " << report.sweeps_used
        << " sweeps, loss " << io::format_real(report.final_loss()) << "\n";
    return kExitOk;
}

int cmd_fit(FitOptions& opt, std::ostream& out, std::ostream& err) {
    opt.config.init_mode = lfm::parse_init_mode(opt.init);
    opt.config.seed = opt.seed.resolve(err);
    const TimeSeries ts = select_channel(io::load_csv(opt.input), opt.channel);
    const auto report = lfm::train_lfm(ts, opt.config);

    Json j;
    j["command"] = "fit";
    j["input"] = opt.input;
    j["channel"] = ts.names().front();
    j["config"] = io::train_config_to_json(opt.config);
    j["config"]["extraction"] = io::extraction_config_to_json(opt.config.extraction, ts.length());
    j["config"]["extraction"]["k"] = opt.config.k;
    j["initial"] = io::lfm_params_to_json(report.initial);
    j["final"] = io::lfm_params_to_json(report.final);
    j["final_loss"] = report.final_loss;
    j["loss_history"] = report.loss_history;
    Json traj = Json::array();
    for (const auto& snap : report.freq_trajectory) traj.push_back({{"step", snap.step}, {"freqs", snap.freqs}});
    j["freq_trajectory"] = traj;
    io::write_text(opt.out, io::dump(j));
    out << "trained " << opt.config.steps << " steps, final loss " << io::format_real(report.final_loss)
        << "\n";
    return kExitOk;
}

int cmd_bench(BenchOptions& opt, std::ostream& out, std::ostream& err) {
    opt.config.master_seed = opt.seed.resolve(err);
    opt.config.train.k = opt.k;
    opt.config.train.steps = opt.steps;
    const auto report = bench::run_benchmark(opt.config);

    const std::string json = io::dump(io::bench_to_json(report));

    // Stem table from the first run of each setting; pooled table from every run.
    std::string stems = "init,lr_freq,mode,freq,abs_amp\n";
    std::string pooled = "init,lr_freq,run,freq\n";
    for (const auto& r : report.runs) {
        const auto& s = opt.config.settings[r.cell];
        const std::string prefix = std::string(lfm::to_string(s.init)) + "," + io::format_real(s.lr_freq);
        for (std::size_t k = 0; k < r.freqs.size(); ++k) {
            if (r.run == 0) {
                stems += prefix + "," + std::to_string(k) + "," + io::format_real(r.freqs[k]) + "," +
                         io::format_real(r.amps[k]) + "\n";
            }
            pooled += prefix + "," + std::to_string(r.run) + "," + io::format_real(r.freqs[k]) + "\n";
        }
    }
    io::write_text(opt.out, json);
    if (!opt.stems_csv.empty()) io::write_text(opt.stems_csv, stems);
    if (!opt.pooled_csv.empty()) io::write_text(opt.pooled_csv, pooled);

    for (const auto& a : report.aggregates) {
        out << lfm::to_string(a.setting.init) << " lr_freq=" << io::format_real(a.setting.lr_freq)
            << " mean_p_hit=" << io::format_real(a.mean_p_hit) << " std_p_hit=" << io::format_real(a.std_p_hit)
            << "\n";
    }
    return kExitOk;
}

int cmd_forecast(ForecastOptions& opt, std::ostream& out) {
    const TimeSeries ts = io::load_csv(opt.input);
    const std::size_t T = ts.length();
    if (opt.horizon >= T || T - opt.horizon < std::max<std::size_t>(2, 2 * opt.k)) {
        throw Error(ErrorCode::TooShort, "series of length " + std::to_string(T) +
                                             " is too short for horizon " + std::to_string(opt.horizon) +
                                             " with K = " + std::to_string(opt.k));
    }
    const std::size_t observed = T - opt.horizon;
    const TimeSeries head(ts.values().topRows(static_cast<Eigen::Index>(observed)), ts.names());
    const Eigen::MatrixXd tail = ts.values().bottomRows(static_cast<Eigen::Index>(opt.horizon));

    // Extraction works on the standardized head; DC is restored afterwards.
    const auto [z, params] = standardize(head);
    extract::ExtractionConfig config;
    config.k = opt.k;
    const auto report = extract::extract_frequencies(z, config);
    const TimeSeries pred_z(bench::forecast_extrapolate(report.model, observed, opt.horizon), ts.names());
    const Eigen::MatrixXd pred = destandardize(pred_z, params).values();

    Eigen::MatrixXd baseline(tail.rows(), tail.cols());
    for (Eigen::Index l = 0; l < tail.cols(); ++l) baseline.col(l).setConstant(params.mean[static_cast<std::size_t>(l)]);

    const auto metrics = bench::forecast_metrics(pred, tail);
    const auto base = bench::forecast_metrics(baseline, tail);

    Json j;
    j["command"] = "forecast";
    j["input"] = opt.input;
    j["config"] = {{"k", opt.k}, {"horizon", opt.horizon}, {"observed", observed},
                   {"extraction", io::extraction_config_to_json(config, observed)}};
    j["standardize"] = {{"mean", params.mean}, {"std", params.stddev}};
    j["model"] = io::extraction_to_json(report);
    j["metrics"] = {{"mse", metrics.mse}, {"mae", metrics.mae}};
    j["baseline_mean"] = {{"mse", base.mse}, {"mae", base.mae}};

    std::optional<std::string> pred_text;
    if (!opt.pred_csv.empty()) pred_text = io::format_csv(pred, ts.names(), observed);
    io::write_text(opt.out, io::dump(j));
    if (pred_text) io::write_text(opt.pred_csv, *pred_text);

    out << "horizon " << opt.horizon << ": mse " << io::format_real(metrics.mse) << " (mean baseline "
        << io::format_real(base.mse) << ")\n";
    return kExitOk;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"FFT-guided frequency extraction, Linear Fourier Model fitting and benchmarks",
                 "freqprior"};
    app.require_subcommand(1);

    SynthOptions synth;
    auto* c_synth = app.add_subcommand("synth", "Generate the synthetic multi-tone benchmark signal");
    c_synth->add_option("--length", synth.config.length, "Series length T")->capture_default_str();
    c_synth->add_option("--f-low", synth.config.f_low, "Low frequencies (cycles/sample)")
        ->delimiter(',')
        ->capture_default_str();
    c_synth->add_option("--f-high", synth.config.f_high, "High frequencies (cycles/sample)")
        ->delimiter(',')
        ->capture_default_str();
    c_synth->add_option("--amp-low", synth.config.amp_low, "Low-frequency amplitudes")
        ->delimiter(',')
        ->capture_default_str();
    c_synth->add_option("--amp-high", synth.config.amp_high, "High-frequency amplitudes")
        ->delimiter(',')
        ->capture_default_str();
    c_synth->add_option("--noise", synth.config.noise_std, "Gaussian noise std")->capture_default_str();
    c_synth->add_option("--out", synth.out, "Output CSV")->required();
    c_synth->add_option("--meta", synth.meta, "Config JSON (default: <out>.meta.json)");
    add_seed(c_synth, synth.seed);

    ExtractOptions ext;
    auto* c_extract = app.add_subcommand("extract", "Extract K dominant grid frequencies from a CSV");
    c_extract->add_option("input", ext.input, "Input CSV")->required()->check(CLI::ExistingFile);
    c_extract->add_option("--k", ext.config.k, "Number of modes")->capture_default_str()->check(CLI::PositiveNumber);
    c_extract->add_option("--epsilon", ext.epsilon, "Convergence tolerance in cycles/sample (default 1/(2T))")
        ->check(CLI::PositiveNumber);
    add_extraction_flags(c_extract, ext.config);
    c_extract->add_flag("--standardize", ext.standardize, "Standardize channels before extraction");
    c_extract->add_option("--out", ext.out, "Output model JSON")->required();

    FitOptions fit;
    auto* c_fit = app.add_subcommand("fit", "Train the Linear Fourier Model with the two-speed Adam schedule");
    c_fit->add_option("input", fit.input, "Input CSV")->required()->check(CLI::ExistingFile);
    c_fit->add_option("--channel", fit.channel, "Channel name or index (required for multichannel input)");
    c_fit->add_option("--k", fit.config.k, "Number of modes")->capture_default_str()->check(CLI::PositiveNumber);
    c_fit->add_option("--init", fit.init, "Frequency initialisation")
        ->capture_default_str()
        ->check(CLI::IsMember({"fft", "random"}));
    c_fit->add_option("--lr", fit.config.lr_main, "Learning rate for amplitudes and phases")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_fit->add_option("--lr-freq", fit.config.lr_freq, "Learning rate for frequencies")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    c_fit->add_option("--steps", fit.config.steps, "Adam steps")->capture_default_str();
    c_fit->add_option("--log-every", fit.config.log_every, "Frequency trajectory interval")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_fit->add_option("--out", fit.out, "Output JSON")->required();
    add_seed(c_fit, fit.seed);

    BenchOptions bn;
    auto* c_bench = app.add_subcommand("bench", "Run the {FFT, Random} x {1e-6, 1e-3} recovery benchmark");
    c_bench->add_option("--seeds", bn.config.runs, "Runs per setting")->capture_default_str()->check(CLI::PositiveNumber);
    c_bench->add_option("--k", bn.k, "Modes per model")->capture_default_str()->check(CLI::PositiveNumber);
    c_bench->add_option("--steps", bn.steps, "Adam steps per run")->capture_default_str();
    c_bench->add_option("--delta", bn.config.delta, "Hit tolerance (cycles/sample)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_bench->add_option("--length", bn.config.synth.length, "Signal length T")->capture_default_str();
    c_bench->add_option("--noise", bn.config.synth.noise_std, "Gaussian noise std")->capture_default_str();
    c_bench->add_option("--threads", bn.config.threads, "Worker threads (0 = all cores)")->capture_default_str();
    c_bench->add_option("--out", bn.out, "Output report JSON")->required();
    c_bench->add_option("--stems-csv", bn.stems_csv, "First-run |a_k| vs frequency table");
    c_bench->add_option("--pooled-csv", bn.pooled_csv, "All learned frequencies table");
    add_seed(c_bench, bn.seed);

    ForecastOptions fc;
    auto* c_forecast = app.add_subcommand("forecast", "Hold out the last Q rows, extract K modes, extrapolate");
    c_forecast->add_option("input", fc.input, "Input CSV")->required()->check(CLI::ExistingFile);
    c_forecast->add_option("--k", fc.k, "Number of modes")->capture_default_str()->check(CLI::PositiveNumber);
    c_forecast->add_option("--horizon", fc.horizon, "Held-out steps Q (e.g. 96, 192, 336, 720)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_forecast->add_option("--out", fc.out, "Output JSON")->required();
    c_forecast->add_option("--pred-csv", fc.pred_csv, "Forecast CSV");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error[Usage]: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (c_synth->parsed()) return cmd_synth(synth, out, err);
        if (c_extract->parsed()) return cmd_extract(ext, out);
        if (c_fit->parsed()) return cmd_fit(fit, out, err);
        if (c_bench->parsed()) return cmd_bench(bn, out, err);
        if (c_forecast->parsed()) return cmd_forecast(fc, out);
    } catch (const Error& e) {
        err << "error[" << e.tag() << "]: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error[Internal]: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

} // namespace freqprior::cli
