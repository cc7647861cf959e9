#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "freqprior/bench.hpp"
#include "freqprior/core.hpp"
#include "freqprior/extract.hpp"
#include "freqprior/lfm.hpp"

namespace freqprior::io {

using Json = nlohmann::ordered_json;

/// Parsed comma-separated table. A leading "t" or "timestamp" column is kept
/// in `index` as raw text and excluded from `values`.
struct CsvTable {
    std::vector<std::string> header; // data columns only
    std::string index_name;          // empty when there is no index column
    std::vector<std::string> index;
    Eigen::MatrixXd values;
};

CsvTable parse_csv(std::string_view text);
TimeSeries load_csv(const std::filesystem::path& path);

/// Header "t,<names>", integer t from `first_t`, values with 17 significant digits.
std::string format_csv(const TimeSeries& ts, std::size_t first_t = 0);
std::string format_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& names,
                       std::size_t first_t = 0);
void write_csv(const std::filesystem::path& path, const TimeSeries& ts, std::size_t first_t = 0);

std::string read_text(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_text(const std::filesystem::path& path, std::string_view content);

std::string format_real(double value);

// JSON views of the domain types.
Json model_to_json(const HarmonicModel& model);
HarmonicModel model_from_json(const Json& j);
Json extraction_to_json(const extract::ExtractionReport& report);
Json extraction_config_to_json(const extract::ExtractionConfig& config, std::size_t length);
Json lfm_params_to_json(const lfm::LfmParams& params);
Json train_config_to_json(const lfm::TrainConfig& config);
Json synthetic_config_to_json(const bench::SyntheticConfig& config);
Json bench_to_json(const bench::BenchReport& report);

std::string dump(const Json& j);

} // namespace freqprior::io
