#include "freqprior/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace freqprior::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

bool parse_real(std::string_view cell, double& out) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return false;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

} // namespace

CsvTable parse_csv(std::string_view text) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        const auto line = text.substr(start, pos == std::string_view::npos ? text.npos : pos - start);
        if (!trim(line).empty()) lines.push_back(line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (lines.empty()) throw Error(ErrorCode::ParseError, "CSV is empty: a header row is required");

    const auto header = split_commas(lines.front());
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c].empty()) {
            throw Error(ErrorCode::ParseError, "header column " + std::to_string(c + 1) + " has no name");
        }
    }
    CsvTable table;
    std::size_t first_data = 0;
    if (header.front() == "t" || header.front() == "timestamp") {
        table.index_name = std::string(header.front());
        first_data = 1;
    }
    for (std::size_t c = first_data; c < header.size(); ++c) table.header.emplace_back(header[c]);
    if (table.header.empty()) throw Error(ErrorCode::ParseError, "CSV has no data columns");

    const std::size_t rows = lines.size() - 1;
    const std::size_t cols = table.header.size();
    table.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const auto cells = split_commas(lines[r + 1]);
        if (cells.size() != header.size()) {
            throw Error(ErrorCode::RaggedRows, "row " + std::to_string(r + 1) + " has " +
                                                   std::to_string(cells.size()) + " cells, header has " +
                                                   std::to_string(header.size()));
        }
        if (first_data == 1) table.index.emplace_back(cells.front());
        for (std::size_t c = 0; c < cols; ++c) {
            double v = 0.0;
            if (!parse_real(cells[c + first_data], v)) {
                throw Error(ErrorCode::NonNumericCell,
                            "row " + std::to_string(r + 1) + ", column " + table.header[c] + ": '" +
                                std::string(cells[c + first_data]) + "' is not a finite number");
            }
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    if (rows < 2) {
        throw Error(ErrorCode::TooShort, "CSV needs at least 2 data rows, got " + std::to_string(rows));
    }
    return table;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TimeSeries load_csv(const std::filesystem::path& path) {
    auto table = parse_csv(read_text(path));
    return TimeSeries(std::move(table.values), std::move(table.header));
}

std::string format_real(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& names,
                       std::size_t first_t) {
    std::string out = "t";
    for (const auto& name : names) out += "," + name;
    out += '\n';
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        out += std::to_string(first_t + static_cast<std::size_t>(r));
        for (Eigen::Index c = 0; c < values.cols(); ++c) out += "," + format_real(values(r, c));
        out += '\n';
    }
    return out;
}

std::string format_csv(const TimeSeries& ts, std::size_t first_t) {
    return format_csv(ts.values(), ts.names(), first_t);
}

void write_text(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot move output into '" + path.string() + "'");
    }
}

void write_csv(const std::filesystem::path& path, const TimeSeries& ts, std::size_t first_t) {
    write_text(path, format_csv(ts, first_t));
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

// One channel flattens to a plain list; several channels nest per channel.
Json per_channel(const Eigen::MatrixXd& m) {
    if (m.rows() == 1) return matrix_to_json(m).front();
    return matrix_to_json(m);
}

} // namespace

Json model_to_json(const HarmonicModel& model) {
    const auto ap = model.to_amplitude_phase();
    Json j;
    j["k"] = model.modes();
    j["channels"] = model.channels();
    j["freqs_cycles_per_sample"] = to_cycles(model.freqs());
    j["amps"] = per_channel(ap.amplitude);
    j["phases_rad"] = per_channel(ap.phase);
    j["amplitudes_cos_sin"] = matrix_to_json(model.amplitudes());
    return j;
}

HarmonicModel model_from_json(const Json& j) {
    try {
        auto freqs = to_frequencies(j.at("freqs_cycles_per_sample").get<std::vector<double>>());
        const auto rows = j.at("amplitudes_cos_sin").get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()),
                          rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != static_cast<std::size_t>(A.cols())) {
                throw Error(ErrorCode::ShapeMismatch, "amplitudes_cos_sin rows differ in length");
            }
            for (std::size_t c = 0; c < rows[r].size(); ++c) {
                A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
            }
        }
        return HarmonicModel(std::move(freqs), std::move(A));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed model JSON: ") + e.what());
    }
}

Json extraction_config_to_json(const extract::ExtractionConfig& config, std::size_t length) {
    Json j;
    j["k"] = config.k;
    j["epsilon"] = config.resolved_epsilon(length);
    j["max_sweeps"] = config.max_sweeps;
    j["improvement_rtol"] = config.improvement_rtol;
    return j;
}

Json extraction_to_json(const extract::ExtractionReport& report) {
    Json j = model_to_json(report.model);
    j["bins"] = report.bins;
    j["recon_loss"] = report.final_loss();
    j["initial_loss"] = report.initial_loss;
    j["loss_history"] = report.loss_history;
    j["sweeps"] = report.sweeps_used;
    j["converged"] = report.converged;
    j["residual_power"] = report.residual_power;
    return j;
}

Json lfm_params_to_json(const lfm::LfmParams& params) {
    Json j;
    j["freqs_cycles_per_sample"] = to_cycles(params.freqs);
    j["amps"] = params.amps;
    j["phases_rad"] = params.phases;
    return j;
}

Json train_config_to_json(const lfm::TrainConfig& config) {
    Json j;
    j["k"] = config.k;
    j["init"] = lfm::to_string(config.init_mode);
    j["lr_main"] = config.lr_main;
    j["lr_freq"] = config.lr_freq;
    j["steps"] = config.steps;
    j["adam_beta1"] = config.adam.beta1;
    j["adam_beta2"] = config.adam.beta2;
    j["adam_eps"] = config.adam.eps;
    j["random_freq_range"] = {config.random_freq_low, config.random_freq_high};
    j["seed"] = config.seed;
    j["log_every"] = config.log_every;
    return j;
}

Json synthetic_config_to_json(const bench::SyntheticConfig& config) {
    Json j;
    j["length"] = config.length;
    j["f_low"] = config.f_low;
    j["f_high"] = config.f_high;
    j["amp_low"] = config.amp_low;
    j["amp_high"] = config.amp_high;
    j["noise_std"] = config.noise_std;
    j["seed"] = config.seed;
    return j;
}

Json bench_to_json(const bench::BenchReport& report) {
    const auto& cfg = report.config;
    Json j;

    Json settings = Json::array();
    for (const auto& s : cfg.settings) {
        settings.push_back({{"init", lfm::to_string(s.init)}, {"lr_freq", s.lr_freq}});
    }
    j["settings"] = settings;

    Json meta;
    meta["master_seed"] = cfg.master_seed;
    meta["runs_per_setting"] = cfg.runs;
    meta["delta"] = cfg.delta;
    meta["signal_per_run"] = "regenerated from a per-run data seed";
    meta["synthetic"] = synthetic_config_to_json(cfg.synth);
    meta["synthetic"].erase("seed");
    meta["train"] = train_config_to_json(cfg.train);
    for (const char* key : {"init", "lr_freq", "seed"}) meta["train"].erase(key);
    j["config"] = meta;

    Json runs = Json::array();
    for (const auto& r : report.runs) {
        const auto& s = cfg.settings[r.cell];
        Json jr;
        jr["init"] = lfm::to_string(s.init);
        jr["lr_freq"] = s.lr_freq;
        jr["seed"] = r.run;
        jr["data_seed"] = r.data_seed;
        jr["init_seed"] = r.init_seed;
        jr["init_freqs"] = r.init_freqs;
        jr["freqs"] = r.freqs;
        jr["amps"] = r.amps;
        jr["phases_rad"] = r.phases;
        jr["final_loss"] = r.final_loss;
        jr["p_hit"] = r.p_hit;
        runs.push_back(std::move(jr));
    }
    j["runs"] = runs;

    Json aggregates = Json::array();
    for (const auto& a : report.aggregates) {
        Json ja;
        ja["init"] = lfm::to_string(a.setting.init);
        ja["lr_freq"] = a.setting.lr_freq;
        ja["mean_p_hit"] = a.mean_p_hit;
        ja["std_p_hit"] = a.std_p_hit;
        ja["pooled_freqs"] = a.pooled_freqs;
        aggregates.push_back(std::move(ja));
    }
    j["aggregates"] = aggregates;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace freqprior::io
