#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "freqprior/bench.hpp"
#include "freqprior/dsp.hpp"
#include "freqprior/extract.hpp"
#include "freqprior/io.hpp"
#include "freqprior/lfm.hpp"

namespace py = pybind11;
using namespace freqprior;

namespace {

py::dict model_dict(const HarmonicModel& model) {
    const auto ap = model.to_amplitude_phase();
    py::dict d;
    d["freqs"] = to_cycles(model.freqs());
    d["amplitudes"] = Eigen::MatrixXd(model.amplitudes());
    d["amps"] = ap.amplitude;
    d["phases"] = ap.phase;
    return d;
}

py::dict params_dict(const lfm::LfmParams& p) {
    py::dict d;
    d["freqs"] = to_cycles(p.freqs);
    d["amps"] = p.amps;
    d["phases"] = p.phases;
    return d;
}

py::tuple standardize_py(const Eigen::MatrixXd& values) {
    const auto [z, p] = standardize(TimeSeries(values));
    return py::make_tuple(Eigen::MatrixXd(z.values()), p.mean, p.stddev);
}

std::vector<double> power_spectrum_py(const Eigen::MatrixXd& values) {
    return dsp::power_spectrum(values).power();
}

std::vector<double> top_k_peaks_py(const Eigen::MatrixXd& values, std::size_t k, const std::set<std::size_t>& exclude) {
    return to_cycles(dsp::top_k_peaks(dsp::power_spectrum(values), k, exclude));
}

py::dict extract_py(const Eigen::MatrixXd& values, std::size_t k, std::optional<double> epsilon,
                    std::size_t max_sweeps, double rtol) {
    extract::ExtractionConfig cfg;
    cfg.k = k;
    cfg.epsilon = epsilon;
    cfg.max_sweeps = max_sweeps;
    cfg.improvement_rtol = rtol;
    const auto rep = extract::extract_frequencies(TimeSeries(values), cfg);
    py::dict d = model_dict(rep.model);
    d["bins"] = rep.bins;
    d["initial_loss"] = rep.initial_loss;
    d["loss_history"] = rep.loss_history;
    d["recon_loss"] = rep.final_loss();
    d["sweeps"] = rep.sweeps_used;
    d["converged"] = rep.converged;
    return d;
}

py::dict train_py(const Eigen::MatrixXd& values, std::size_t k, double lr, double lr_freq, std::size_t steps,
                  const std::string& init, std::uint64_t seed, std::size_t log_every) {
    lfm::TrainConfig cfg;
    cfg.k = k;
    cfg.lr_main = lr;
    cfg.lr_freq = lr_freq;
    cfg.steps = steps;
    cfg.init_mode = lfm::parse_init_mode(init);
    cfg.seed = seed;
    cfg.log_every = log_every;
    lfm::TrainReport rep;
    {
        py::gil_scoped_release release;
        rep = lfm::train_lfm(TimeSeries(values), cfg);
    }
    py::dict d;
    d["initial"] = params_dict(rep.initial);
    d["final"] = params_dict(rep.final);
    d["final_loss"] = rep.final_loss;
    d["loss_history"] = rep.loss_history;
    py::list traj;
    for (const auto& s : rep.freq_trajectory) traj.append(py::make_tuple(s.step, s.freqs));
    d["freq_trajectory"] = traj;
    return d;
}

Eigen::MatrixXd synthetic_py(std::size_t length, std::vector<double> f_low, std::vector<double> f_high,
                             std::vector<double> amp_low, std::vector<double> amp_high, double noise_std,
                             std::uint64_t seed) {
    bench::SyntheticConfig cfg;
    cfg.length = length;
    cfg.f_low = std::move(f_low);
    cfg.f_high = std::move(f_high);
    cfg.amp_low = std::move(amp_low);
    cfg.amp_high = std::move(amp_high);
    cfg.noise_std = noise_std;
    cfg.seed = seed;
    return bench::generate_synthetic(cfg).values();
}

double hit_rate_py(const std::vector<double>& learned, const std::vector<double>& truths, double delta) {
    return bench::hit_rate(to_frequencies(learned), to_frequencies(truths), delta);
}

std::string bench_py(std::size_t runs, std::uint64_t master_seed, std::size_t steps, std::size_t k, double delta,
                     std::size_t length, double noise_std, std::size_t threads) {
    bench::BenchConfig cfg;
    cfg.runs = runs;
    cfg.master_seed = master_seed;
    cfg.train.steps = steps;
    cfg.train.k = k;
    cfg.delta = delta;
    cfg.synth.length = length;
    cfg.synth.noise_std = noise_std;
    cfg.threads = threads;
    py::gil_scoped_release release;
    return io::dump(io::bench_to_json(bench::run_benchmark(cfg)));
}

Eigen::MatrixXd forecast_py(const std::vector<double>& freqs, const Eigen::MatrixXd& amplitudes, std::size_t observed,
                            std::size_t horizon) {
    return bench::forecast_extrapolate(HarmonicModel(to_frequencies(freqs), amplitudes), observed, horizon);
}

py::tuple metrics_py(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
    const auto m = bench::forecast_metrics(pred, truth);
    return py::make_tuple(m.mse, m.mae);
}

} // namespace

PYBIND11_MODULE(_freqprior, m) {
    m.doc() = "FFT-guided frequency extraction and Linear Fourier Model fitting.";

    static py::exception<Error> error(m, "FreqpriorError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), (std::string(e.tag()) + ": " + e.what()).c_str());
        }
    });

    m.def("standardize", &standardize_py, py::arg("values"));
    m.def("power_spectrum", &power_spectrum_py, py::arg("values"));
    m.def("top_k_peaks", &top_k_peaks_py, py::arg("values"), py::arg("k"),
          py::arg("exclude") = std::set<std::size_t>{});
    m.def("extract_frequencies", &extract_py, py::arg("values"), py::arg("k") = 5, py::arg("epsilon") = py::none(),
          py::arg("max_sweeps") = 50, py::arg("rtol") = 1e-12);
    m.def("train_lfm", &train_py, py::arg("values"), py::arg("k") = 5, py::arg("lr") = 1e-3,
          py::arg("lr_freq") = 1e-6, py::arg("steps") = 2000, py::arg("init") = "fft", py::arg("seed") = 0,
          py::arg("log_every") = 100);
    m.def("generate_synthetic", &synthetic_py, py::arg("length") = 512,
          py::arg("f_low") = std::vector<double>{0.015, 0.025, 0.035},
          py::arg("f_high") = std::vector<double>{0.08, 0.11}, py::arg("amp_low") = std::vector<double>{1.0, 1.0, 1.0},
          py::arg("amp_high") = std::vector<double>{0.3, 0.3}, py::arg("noise_std") = 0.5, py::arg("seed") = 0);
    m.def("hit_rate", &hit_rate_py, py::arg("learned"), py::arg("truths"), py::arg("delta") = 0.005);
    m.def("run_benchmark_json", &bench_py, py::arg("runs") = 10, py::arg("master_seed") = 0, py::arg("steps") = 2000,
          py::arg("k") = 5, py::arg("delta") = 0.005, py::arg("length") = 512, py::arg("noise_std") = 0.5,
          py::arg("threads") = 0);
    m.def("forecast_extrapolate", &forecast_py, py::arg("freqs"), py::arg("amplitudes"), py::arg("observed"),
          py::arg("horizon"));
    m.def("forecast_metrics", &metrics_py, py::arg("pred"), py::arg("truth"));
}
