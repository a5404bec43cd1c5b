#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tfgen/audio_io.hpp"
#include "tfgen/common.hpp"
#include "tfgen/features.hpp"
#include "tfgen/gabor.hpp"
#include "tfgen/metrics.hpp"
#include "tfgen/phase.hpp"
#include "tfgen/tfsg.hpp"
#include "tfgen/window.hpp"

namespace fs = std::filesystem;
using namespace tfgen;

namespace {

struct RunConfig {
    std::size_t a = 128;
    std::size_t M = 512;
    std::size_t L = 0;
    std::size_t Lg = 0;
    std::string window = "gauss";
    double lambda = 4.0;
    bool lambda_set = false;
    double r = 10.0;
    double tol = kDefaultRelTol;
    std::uint64_t seed = 0;
    std::string convention = "fi";
    unsigned jobs = 1;
    std::string output;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

Convention parse_convention(const std::string& name) {
    if (name == "fi") return Convention::FrequencyInvariant;
    if (name == "ti") return Convention::TimeInvariant;
    return Convention::SimplifiedTimeInvariant;
}

std::size_t auto_length(std::size_t samples, std::size_t a, std::size_t M) {
    const std::size_t base = std::lcm(a, M);
    const std::size_t want = std::max<std::size_t>(samples, 1);
    return (want + base - 1) / base * base;
}

Signal pad_circular(const Signal& in, std::size_t L) {
    if (in.samples.empty()) throw ParamError("empty signal");
    if (L < in.samples.size())
        throw ParamError("length " + std::to_string(L) + " is shorter than the signal (" +
                         std::to_string(in.samples.size()) + " samples)");
    Signal out;
    out.sample_rate = in.sample_rate;
    out.samples.resize(L);
    for (std::size_t i = 0; i < L; ++i) out.samples[i] = in.samples[i % in.samples.size()];
    return out;
}

Window build_window(const RunConfig& cfg, std::size_t L) {
    const std::size_t Lg = cfg.Lg ? cfg.Lg : std::min(L, cfg.M);
    if (cfg.window == "hann") return make_hann_window(Lg);
    return make_gaussian_window(cfg.lambda, L, Lg);
}

GaborSystem build_system(const RunConfig& cfg, std::size_t L) {
    const Window w = build_window(cfg, L);
    const double lambda = cfg.lambda_set ? cfg.lambda : 0.0;
    return make_system(w, cfg.a, cfg.M, L, lambda);
}

Spectrogram analyze_signal(const RunConfig& cfg, const Signal& in, Convention conv) {
    const std::size_t L = cfg.L ? cfg.L : auto_length(in.samples.size(), cfg.a, cfg.M);
    const GaborSystem sys = build_system(cfg, L);
    return dgt(pad_circular(in, L), sys, conv);
}

void warn_low_redundancy(const GaborSystem& sys) {
    if (sys.low_redundancy())
        std::cerr << "warning: redundancy M/a = " << fmt(sys.redundancy())
                  << " is below 4; phase estimation quality degrades\n";
}

std::string default_output(const std::string& input, const char* ext) {
    return (fs::path(input).parent_path() / fs::path(input).stem()).string() + ext;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max(1u, jobs);
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(jobs, n); ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t idx) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (idx + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct GaussDraw {
    std::mt19937_64 rng;
    bool have = false;
    double spare = 0.0;

    explicit GaussDraw(std::uint64_t s) : rng(s) {}

    double operator()() {
        if (have) {
            have = false;
            return spare;
        }
        const double u = ((rng() >> 11) + 1) * 0x1p-53;
        const double v = ((rng() >> 11) + 1) * 0x1p-53;
        const double radius = std::sqrt(-2.0 * std::log(u));
        spare = radius * std::sin(kTwoPi * v);
        have = true;
        return radius * std::cos(kTwoPi * v);
    }
};

void add_coefficient_noise(Spectrogram& spec, double snr_db, GaussDraw& gauss) {
    double power = 0.0;
    for (const auto& z : spec.coefficients) power += std::norm(z);
    power /= static_cast<double>(spec.coefficients.size());
    const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0) / 2.0);
    for (auto& z : spec.coefficients) z += std::complex<double>(sigma * gauss(), sigma * gauss());
}

LogMagnitude container_to_logmag(const TfsgContainer& c) {
    switch (c.kind) {
        case PayloadKind::Complex:
            return log_magnitude(spectrogram_from_container(c));
        case PayloadKind::LogMagnitude:
            return logmag_from_container(c);
        case PayloadKind::Feature:
            return deprocess(feature_from_container(c));
    }
    throw FormatError("unknown payload kind");
}

int cmd_analyze(const RunConfig& cfg, const std::string& input, bool logmag) {
    const Signal audio = read_wav(input);
    const Spectrogram spec = analyze_signal(cfg, audio, parse_convention(cfg.convention));
    warn_low_redundancy(spec.system);

    const std::string out = cfg.output.empty() ? default_output(input, ".tfsg") : cfg.output;
    if (logmag)
        write_tfsg(to_container(log_magnitude(spec)), out);
    else
        write_tfsg(to_container(spec), out);

    std::cout << "rows=" << spec.rows() << "\n"
              << "cols=" << spec.cols() << "\n"
              << "redundancy=" << fmt(spec.system.redundancy()) << "\n"
              << "lambda=" << fmt(spec.system.lambda) << "\n"
              << "convention=" << convention_name(spec.convention) << "\n"
              << "output=" << out << "\n";
    return 0;
}

int cmd_reconstruct(const RunConfig& cfg, const std::string& input, const std::string& method,
                    unsigned rate) {
    const TfsgContainer c = read_tfsg(input);
    if (c.kind == PayloadKind::Complex)
        throw ParamError("reconstruct expects a log-magnitude or feature container; "
                         "complex coefficients already carry phase");
    const LogMagnitude lm = container_to_logmag(c);
    warn_low_redundancy(lm.system);

    const auto t0 = std::chrono::steady_clock::now();
    const PhaseDerivatives derivs = estimate_phase_derivatives(lm, cfg.tol);
    Phase phase;
    if (method == "cumsum")
        phase = cumsum_phase(derivs, lm.system);
    else
        phase = pghi(lm, derivs, cfg.tol, cfg.seed);
    const Spectrogram rec = assemble_spectrogram(lm, phase);
    const Window dual = canonical_dual(rec.system);
    const Signal audio = idgt(rec, dual, rate);
    const auto t1 = std::chrono::steady_clock::now();

    const double err = rspe(lm, rec);
    const std::string out = cfg.output.empty() ? default_output(input, ".wav") : cfg.output;
    const std::size_t clipped = write_wav(audio, out);
    if (clipped > 0)
        std::cerr << "warning: " << clipped << " samples clipped on write\n";

    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    std::cout << "method=" << method << "\n"
              << "rspe_db=" << fmt(err) << "\n"
              << "elapsed_ms=" << ms << "\n"
              << "output=" << out << "\n";
    return 0;
}

std::vector<std::string> scan_dir(const std::string& dir, const char* ext) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ext)
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    return files;
}

struct RhoStats {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t n = 0;
};

RhoStats rho_stats(const std::vector<double>& rhos) {
    RhoStats st;
    st.n = rhos.size();
    if (rhos.empty()) return st;
    for (double r : rhos) st.mean += r;
    st.mean /= static_cast<double>(rhos.size());
    double var = 0.0;
    for (double r : rhos) var += (r - st.mean) * (r - st.mean);
    st.stddev = std::sqrt(var / static_cast<double>(rhos.size()));
    return st;
}

int sweep_redundancy(const RunConfig& cfg, const std::vector<std::string>& inputs,
                     std::ostream& out) {
    struct Geometry {
        int redundancy;
        std::size_t a, M;
    };
    const Geometry table[] = {{4, 128, 512}, {8, 92, 736}, {16, 64, 1024}};

    std::vector<Signal> clips;
    for (const auto& path : inputs) clips.push_back(read_wav(path));

    out << "redundancy,mean_rho,std_rho,n\n";
    for (const auto& g : table) {
        RunConfig local = cfg;
        local.a = g.a;
        local.M = g.M;
        local.L = 0;
        std::vector<double> rhos(clips.size());
        parallel_for(clips.size(), cfg.jobs, [&](std::size_t i) {
            const Spectrogram spec = analyze_signal(local, clips[i], Convention::FrequencyInvariant);
            rhos[i] = consistency(log_magnitude(spec)).rho;
        });
        const RhoStats st = rho_stats(rhos);
        out << g.redundancy << "," << fmt(st.mean) << "," << fmt(st.stddev) << "," << st.n << "\n";
    }
    return 0;
}

int sweep_snr(const RunConfig& cfg, const std::vector<std::string>& inputs, std::ostream& out) {
    const double levels[] = {std::numeric_limits<double>::infinity(), 40.0, 20.0, 10.0, 0.0};
    RunConfig local = cfg;
    local.a = 92;
    local.M = 736;
    local.L = 0;

    std::vector<Signal> clips;
    for (const auto& path : inputs) clips.push_back(read_wav(path));

    std::vector<Spectrogram> specs(clips.size());
    parallel_for(clips.size(), cfg.jobs, [&](std::size_t i) {
        specs[i] = analyze_signal(local, clips[i], Convention::FrequencyInvariant);
    });

    out << "snr_db,mean_rho,std_rho,n\n";
    for (double snr : levels) {
        std::vector<double> rhos(specs.size());
        parallel_for(specs.size(), cfg.jobs, [&](std::size_t i) {
            Spectrogram noisy = specs[i];
            if (std::isfinite(snr)) {
                GaussDraw gauss(mix_seed(cfg.seed, i * 101 + static_cast<std::uint64_t>(snr)));
                add_coefficient_noise(noisy, snr, gauss);
            }
            rhos[i] = consistency(log_magnitude(noisy)).rho;
        });
        const RhoStats st = rho_stats(rhos);
        if (std::isfinite(snr))
            out << fmt(snr);
        else
            out << "inf";
        out << "," << fmt(st.mean) << "," << fmt(st.stddev) << "," << st.n << "\n";
    }
    return 0;
}

int cmd_consistency(const RunConfig& cfg, const std::vector<std::string>& inputs,
                    const std::string& against, const std::string& sweep) {
    std::ofstream csv_file;
    std::ostream* out = &std::cout;
    if (!cfg.output.empty() && !sweep.empty()) {
        csv_file.open(cfg.output);
        if (!csv_file) throw IoError("cannot open " + cfg.output + " for writing");
        out = &csv_file;
    }
    if (sweep == "redundancy") return sweep_redundancy(cfg, inputs, *out);
    if (sweep == "snr") return sweep_snr(cfg, inputs, *out);

    std::vector<LogMagnitude> batch;
    for (const auto& path : inputs) batch.push_back(container_to_logmag(read_tfsg(path)));

    if (!against.empty()) {
        std::vector<LogMagnitude> other;
        for (const auto& path : scan_dir(against, ".tfsg"))
            other.push_back(container_to_logmag(read_tfsg(path)));
        std::cout << "gamma=" << fmt(gamma(batch, other)) << "\n"
                  << "n_a=" << batch.size() << "\n"
                  << "n_b=" << other.size() << "\n";
        return 0;
    }

    std::vector<double> rhos;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const ConsistencyReport rep = consistency(batch[i]);
        if (rep.undefined) {
            std::cout << "file=" << inputs[i] << " rho=undefined\n";
            continue;
        }
        std::cout << "file=" << inputs[i] << " rho=" << fmt(rep.rho) << "\n";
        rhos.push_back(rep.rho);
    }
    const RhoStats st = rho_stats(rhos);
    std::cout << "mean_rho=" << fmt(st.mean) << "\n"
              << "std_rho=" << fmt(st.stddev) << "\n"
              << "n=" << st.n << "\n";
    return 0;
}

int cmd_convert(const RunConfig& cfg, const std::string& input, const std::string& to) {
    const TfsgContainer c = read_tfsg(input);
    if (c.kind != PayloadKind::Complex)
        throw ParamError("convention conversion requires complex coefficients");
    const Spectrogram spec = spectrogram_from_container(c);
    const Spectrogram converted = convert_convention(spec, parse_convention(to));

    const std::string out = cfg.output.empty() ? default_output(input, ".conv.tfsg") : cfg.output;
    write_tfsg(to_container(converted), out);
    std::cout << "convention=" << convention_name(converted.convention) << "\n"
              << "output=" << out << "\n";
    return 0;
}

int cmd_preprocess(const RunConfig& cfg, const std::string& dir, bool dataset_norm) {
    const std::vector<std::string> files = scan_dir(dir, ".wav");
    if (files.empty()) throw IoError("no .wav files in " + dir);

    const fs::path out_dir = cfg.output.empty() ? fs::path(dir) : fs::path(cfg.output);
    fs::create_directories(out_dir);

    std::mutex log_mutex;
    double dataset_peak = 0.0;
    if (dataset_norm) {
        std::vector<double> peaks(files.size(), 0.0);
        parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
            try {
                const Spectrogram spec =
                    analyze_signal(cfg, read_wav(files[i]), Convention::FrequencyInvariant);
                for (const auto& z : spec.coefficients) peaks[i] = std::max(peaks[i], std::abs(z));
            } catch (const Error&) {
            }
        });
        for (double p : peaks) dataset_peak = std::max(dataset_peak, p);
        if (dataset_peak == 0.0) throw ParamError("no readable audio for dataset normalization");
    }

    struct Row {
        bool ok = false;
        std::string name;
        double peak = 0.0;
        double rho = 0.0;
        bool has_rho = false;
    };
    std::vector<Row> rows(files.size());

    parallel_for(files.size(), cfg.jobs, [&](std::size_t i) {
        Row& row = rows[i];
        row.name = fs::path(files[i]).filename().string();
        try {
            const Spectrogram spec =
                analyze_signal(cfg, read_wav(files[i]), Convention::FrequencyInvariant);
            const FeatureTensor feat = preprocess(spec, cfg.r, dataset_peak);
            const fs::path out = out_dir / (fs::path(files[i]).stem().string() + ".tfsg");
            write_tfsg(to_container(feat), out.string());
            row.peak = feat.peak;
            try {
                row.rho = consistency(deprocess(feat)).rho;
                row.has_rho = true;
            } catch (const Error&) {
            }
            row.ok = true;
        } catch (const Error& e) {
            std::lock_guard<std::mutex> lock(log_mutex);
            std::cerr << "error: " << files[i] << ": " << e.what() << "\n";
        }
    });

    const fs::path manifest_path = out_dir / "manifest.csv";
    std::ofstream manifest(manifest_path);
    if (!manifest) throw IoError("cannot open " + manifest_path.string() + " for writing");
    manifest << "filename,peak,rho\n";
    std::size_t processed = 0;
    for (const auto& row : rows) {
        if (!row.ok) continue;
        manifest << fs::path(row.name).stem().string() << ".tfsg," << fmt(row.peak) << ",";
        if (row.has_rho)
            manifest << fmt(row.rho);
        else
            manifest << "nan";
        manifest << "\n";
        ++processed;
    }
    std::cout << "processed=" << processed << "\n"
              << "skipped=" << (files.size() - processed) << "\n"
              << "manifest=" << manifest_path.string() << "\n";
    return processed > 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invertible time-frequency features for generative audio"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");

    RunConfig cfg;
    app.add_option("--a", cfg.a, "Hop size in samples")->capture_default_str();
    app.add_option("--M", cfg.M, "Number of frequency channels (even)")->capture_default_str();
    app.add_option("--L", cfg.L, "Transform length; 0 pads to the next multiple of lcm(a, M)")
        ->capture_default_str();
    app.add_option("--window", cfg.window, "Analysis window")
        ->check(CLI::IsMember({"gauss", "hann"}))
        ->capture_default_str();
    auto* lambda_opt =
        app.add_option("--lambda", cfg.lambda, "Gaussian time-frequency ratio")->capture_default_str();
    app.add_option("--Lg", cfg.Lg, "Window support; 0 means min(L, M)")->capture_default_str();
    app.add_option("--r", cfg.r, "Dynamic range of the feature map")->capture_default_str();
    app.add_option("--tol", cfg.tol, "Relative magnitude tolerance for phase estimation")
        ->capture_default_str();
    app.add_option("--seed", cfg.seed, "Random seed for phase initialization and noise")
        ->envname("TFGEN_SEED")
        ->capture_default_str();
    app.add_option("--convention", cfg.convention, "Phase convention of stored coefficients")
        ->check(CLI::IsMember({"fi", "ti", "sti"}))
        ->capture_default_str();
    app.add_option("--jobs", cfg.jobs, "Worker threads for directory batches")->capture_default_str();
    app.add_option("--output", cfg.output, "Output path (file or directory, per subcommand)");

    auto* analyze = app.add_subcommand("analyze", "Transform a WAV file into a TFSG container");
    analyze->fallthrough();
    std::string analyze_input;
    bool analyze_logmag = false;
    analyze->add_option("input", analyze_input, "Input WAV file")->required();
    analyze->add_flag("--logmag", analyze_logmag, "Store log magnitudes instead of complex coefficients");

    auto* reconstruct =
        app.add_subcommand("reconstruct", "Synthesize audio from a magnitude-domain container");
    reconstruct->fallthrough();
    std::string reconstruct_input, method = "pghi";
    unsigned rate = 16000;
    reconstruct->add_option("input", reconstruct_input, "Input TFSG container")->required();
    reconstruct->add_option("--method", method, "Phase integration method")
        ->check(CLI::IsMember({"pghi", "cumsum"}))
        ->capture_default_str();
    reconstruct->add_option("--rate", rate, "Output sample rate in Hz")->capture_default_str();

    auto* consistency_cmd =
        app.add_subcommand("consistency", "Report the consistency measure for containers");
    consistency_cmd->fallthrough();
    std::vector<std::string> consistency_inputs;
    std::string against, sweep;
    consistency_cmd
        ->add_option("inputs", consistency_inputs, "TFSG containers (WAV files with --sweep)")
        ->required();
    consistency_cmd->add_option("--against", against, "Directory of containers to compare against");
    consistency_cmd->add_option("--sweep", sweep, "Sweep over lattice redundancy or coefficient SNR")
        ->check(CLI::IsMember({"redundancy", "snr"}));

    auto* convert = app.add_subcommand("convert", "Rewrite coefficients in another phase convention");
    convert->fallthrough();
    std::string convert_input, convert_to;
    convert->add_option("input", convert_input, "Input TFSG container")->required();
    convert->add_option("--to", convert_to, "Target convention")
        ->check(CLI::IsMember({"fi", "ti", "sti"}))
        ->required();

    auto* preprocess_cmd =
        app.add_subcommand("preprocess", "Build feature containers for a directory of WAV files");
    preprocess_cmd->fallthrough();
    std::string preprocess_dir;
    bool dataset_norm = false;
    preprocess_cmd->add_option("dir", preprocess_dir, "Directory of WAV files")->required();
    preprocess_cmd->add_flag("--dataset-norm", dataset_norm,
                             "Normalize by the peak magnitude of the whole dataset");

    try {
        app.parse(argc, argv);
        cfg.lambda_set = lambda_opt->count() > 0 || cfg.window == "gauss";
        if (analyze->parsed()) return cmd_analyze(cfg, analyze_input, analyze_logmag);
        if (reconstruct->parsed()) return cmd_reconstruct(cfg, reconstruct_input, method, rate);
        if (consistency_cmd->parsed())
            return cmd_consistency(cfg, consistency_inputs, against, sweep);
        if (convert->parsed()) return cmd_convert(cfg, convert_input, convert_to);
        if (preprocess_cmd->parsed()) return cmd_preprocess(cfg, preprocess_dir, dataset_norm);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FrameError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
