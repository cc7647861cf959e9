#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "freqprior/cli.hpp"
#include "freqprior/io.hpp"
#include "support.hpp"

using namespace freqprior;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path workdir() {
    const auto dir = fs::temp_directory_path() / "freqprior_test_cli";
    fs::create_directories(dir);
    return dir;
}

std::string write_tone(const std::string& name, std::size_t T, double f) {
    const auto path = (workdir() / name).string();
    io::write_csv(path, TimeSeries::from_vector(testing::tone(T, f, 1.3, 0.4), "y"));
    return path;
}

io::Json read_json(const std::string& path) { return io::Json::parse(io::read_text(path)); }

} // namespace

TEST_CASE("usage errors exit 2 with a tagged message") {
    auto r = run({});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.rfind("error[Usage]", 0) == 0);
    r = run({"nosuch"});
    CHECK(r.code == cli::kExitUsage);
    r = run({"extract", "--k", "1"});
    CHECK(r.code == cli::kExitUsage);
}

TEST_CASE("extract --k 1 on an on-grid tone recovers its bin") {
    const auto in = write_tone("tone.csv", 128, 5.0 / 128);
    const auto out = (workdir() / "model.json").string();
    const auto r = run({"extract", "--k", "1", in, "--out", out});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = read_json(out);
    CHECK(j.at("k") == 1);
    CHECK(j.at("freqs_cycles_per_sample").at(0).get<double>() == 5.0 / 128);
    CHECK(j.at("bins").at(0) == 5);
    CHECK(j.at("converged").get<bool>());
    CHECK(j.at("recon_loss").get<double>() < 1e-20);
    CHECK(j.contains("config"));
}

TEST_CASE("fit --init fft --lr-freq 0 keeps the extracted frequencies") {
    const auto dir = workdir();
    const auto in = (dir / "two.csv").string();
    const std::size_t T = 200;
    io::write_csv(in, TimeSeries::from_vector(
                          testing::add(testing::tone(T, 7.0 / T, 1.0, 0.2), testing::tone(T, 19.0 / T, 0.5, -1.0))));
    const auto model = (dir / "ext.json").string();
    const auto fit = (dir / "fit.json").string();
    REQUIRE(run({"extract", "--k", "3", in, "--out", model}).code == cli::kExitOk);
    REQUIRE(run({"fit", in, "--k", "3", "--init", "fft", "--lr-freq", "0", "--steps", "20", "--seed", "1", "--out",
                 fit})
                .code == cli::kExitOk);
    const auto fe = read_json(model).at("freqs_cycles_per_sample");
    const auto ff = read_json(fit).at("final").at("freqs_cycles_per_sample");
    CHECK(fe == ff);
    CHECK(read_json(fit).at("config").at("seed") == 1);
}

TEST_CASE("invalid flags never leave output files behind") {
    const auto in = write_tone("tone2.csv", 64, 3.0 / 64);
    const auto out = workdir() / "should_not_exist.json";
    fs::remove(out);
    auto r = run({"extract", in, "--k", "0", "--out", out.string()});
    CHECK(r.code == cli::kExitUsage);
    r = run({"fit", in, "--init", "sideways", "--out", out.string()});
    CHECK(r.code == cli::kExitUsage);
    r = run({"bench", "--seeds", "1", "--bogus", "--out", out.string()});
    CHECK(r.code == cli::kExitUsage);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("data errors exit 1 and leave no output") {
    const auto dir = workdir();
    const auto bad = (dir / "bad.csv").string();
    io::write_text(bad, "a\n1.0\nxyz\n");
    const auto out = dir / "bad_out.json";
    fs::remove(out);
    const auto r = run({"extract", bad, "--out", out.string()});
    CHECK(r.code == cli::kExitRuntime);
    CHECK(r.err.rfind("error[NonNumericCell]", 0) == 0);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("synth is deterministic given --seed and leaves its input alone") {
    const auto dir = workdir();
    const auto a = (dir / "s1.csv").string();
    const auto b = (dir / "s2.csv").string();
    REQUIRE(run({"synth", "--seed", "9", "--out", a}).code == cli::kExitOk);
    REQUIRE(run({"synth", "--seed", "9", "--out", b}).code == cli::kExitOk);
    CHECK(io::read_text(a) == io::read_text(b));
    CHECK(fs::exists(a + ".meta.json"));
    CHECK(read_json(a + ".meta.json").at("config").at("seed") == 9);

    const auto before = io::read_text(a);
    REQUIRE(run({"extract", a, "--k", "5", "--out", (dir / "s1.json").string()}).code == cli::kExitOk);
    CHECK(io::read_text(a) == before);
}

TEST_CASE("omitted seed is printed") {
    const auto r = run({"synth", "--out", (workdir() / "s3.csv").string()});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.err.find("seed: ") != std::string::npos);
}

TEST_CASE("forecast reports metrics and a mean baseline") {
    const auto in = write_tone("long.csv", 400, 10.0 / 300);
    const auto out = (workdir() / "fc.json").string();
    const auto pred = (workdir() / "fc.csv").string();
    const auto r = run({"forecast", in, "--k", "1", "--horizon", "100", "--out", out, "--pred-csv", pred});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = read_json(out);
    CHECK(j.at("metrics").at("mse").get<double>() < 1e-8);
    CHECK(j.at("baseline_mean").at("mse").get<double>() > 0.1);
    const auto table = io::load_csv(pred);
    CHECK(table.length() == 100);
}
