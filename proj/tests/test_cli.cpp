#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tfgen/audio_io.hpp"
#include "tfgen/tfsg.hpp"
#include "support/clipgen.hpp"

namespace fs = std::filesystem;
using namespace tfgen;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "tfgen_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string scratch(const std::string& name) {
    return (scratch_dir() / name).string();
}

std::string slurp_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_prefixed(const std::string& prefix, const std::string& args) {
    static int counter = 0;
    const std::string tag = std::to_string(counter++);
    const std::string out_path = scratch("stdout_" + tag + ".txt");
    const std::string err_path = scratch("stderr_" + tag + ".txt");
    std::string cmd;
    if (!prefix.empty()) cmd += prefix + " ";
    cmd += std::string(TFGEN_BIN) + " " + args + " > " + out_path + " 2> " + err_path;
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp_text(out_path);
    r.err = slurp_text(err_path);
    return r;
}

RunResult run(const std::string& args) {
    return run_prefixed("", args);
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

bool files_equal(const std::string& a, const std::string& b) {
    std::ifstream fa(a, std::ios::binary);
    std::ifstream fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

const std::string& clip_path(int idx) {
    static std::map<int, std::string> cache;
    auto it = cache.find(idx);
    if (it != cache.end()) return it->second;
    Signal sig;
    sig.samples = testsupport::make_clip(static_cast<std::uint64_t>(idx));
    const std::string path = scratch("clip" + std::to_string(idx) + ".wav");
    write_wav(sig, path);
    return cache.emplace(idx, path).first->second;
}

}  // namespace

TEST_CASE("analyze writes a complex container and reports the grid") {
    const std::string out = scratch("a1.tfsg");
    RunResult r = run("analyze " + clip_path(1) + " --output " + out);
    REQUIRE(r.code == 0);
    auto kv = parse_kv(r.out);
    CHECK(kv["rows"] == "257");
    CHECK(kv["cols"] == "128");
    CHECK(kv["redundancy"] == "4");
    CHECK(kv["lambda"] == "4");
    CHECK(kv["convention"] == "freq-invariant");
    CHECK(kv["output"] == out);
    CHECK(r.err.empty());

    TfsgContainer c = read_tfsg(out);
    CHECK(c.kind == PayloadKind::Complex);
    CHECK(c.L == 16384);
    CHECK(c.a == 128);
    CHECK(c.M == 512);
}

TEST_CASE("analyze warns when the lattice is undersampled") {
    RunResult r = run("analyze " + clip_path(1) + " --a 256 --output " + scratch("low.tfsg"));
    CHECK(r.code == 0);
    CHECK(r.err.find("redundancy") != std::string::npos);
}

TEST_CASE("analyze --logmag stores log magnitudes") {
    const std::string out = scratch("lm1.tfsg");
    RunResult r = run("analyze " + clip_path(1) + " --logmag --output " + out);
    REQUIRE(r.code == 0);
    CHECK(read_tfsg(out).kind == PayloadKind::LogMagnitude);
}

TEST_CASE("analyze is deterministic") {
    const std::string out1 = scratch("det1.tfsg");
    const std::string out2 = scratch("det2.tfsg");
    REQUIRE(run("analyze " + clip_path(2) + " --output " + out1).code == 0);
    REQUIRE(run("analyze " + clip_path(2) + " --output " + out2).code == 0);
    CHECK(files_equal(out1, out2));
}

TEST_CASE("missing input and bad flag values exit with a usage error") {
    CHECK(run("analyze " + scratch("absent.wav")).code == 2);
    CHECK(run("analyze " + clip_path(1) + " --window boxcar").code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("help exits cleanly") {
    CHECK(run("--help").code == 0);
}

TEST_CASE("reconstruct recovers audio from log magnitudes") {
    const std::string lm = scratch("rec_lm.tfsg");
    REQUIRE(run("analyze " + clip_path(3) + " --logmag --output " + lm).code == 0);

    const std::string wav = scratch("rec.wav");
    RunResult r = run("reconstruct " + lm + " --output " + wav);
    REQUIRE(r.code == 0);
    auto kv = parse_kv(r.out);
    CHECK(kv["method"] == "pghi");
    const double rspe_db = std::stod(kv["rspe_db"]);
    CHECK(rspe_db < -10.0);
    CHECK(rspe_db > -300.0);
    CHECK(kv.count("elapsed_ms") == 1);
    CHECK(kv["output"] == wav);

    Signal audio = read_wav(wav);
    CHECK(audio.samples.size() == 16384);
    CHECK(audio.sample_rate == 16000);

    const std::string wav_cum = scratch("rec_cum.wav");
    RunResult rc = run("reconstruct " + lm + " --method cumsum --output " + wav_cum);
    REQUIRE(rc.code == 0);
    auto kvc = parse_kv(rc.out);
    CHECK(kvc["method"] == "cumsum");
    CHECK(std::stod(kvc["rspe_db"]) > rspe_db);
}

TEST_CASE("reconstruct accepts feature containers and rejects complex ones") {
    const std::string dir = scratch("rec_feat");
    fs::create_directories(dir);
    fs::copy_file(clip_path(3), dir + "/c.wav", fs::copy_options::overwrite_existing);
    REQUIRE(run("preprocess " + dir).code == 0);
    CHECK(run("reconstruct " + dir + "/c.tfsg --output " + scratch("feat_rec.wav")).code == 0);

    const std::string complex_c = scratch("complex.tfsg");
    REQUIRE(run("analyze " + clip_path(3) + " --output " + complex_c).code == 0);
    RunResult r = run("reconstruct " + complex_c + " --output " + scratch("nope.wav"));
    CHECK(r.code == 2);
    CHECK(r.err.find("already carry phase") != std::string::npos);
}

TEST_CASE("reconstruct is reproducible under an explicit seed") {
    const std::string lm = scratch("seed_lm.tfsg");
    REQUIRE(run("analyze " + clip_path(4) + " --logmag --output " + lm).code == 0);

    const std::string w1 = scratch("seed1.wav");
    const std::string w2 = scratch("seed2.wav");
    const std::string w3 = scratch("seed3.wav");
    const std::string w4 = scratch("seed4.wav");
    REQUIRE(run("reconstruct " + lm + " --tol 1e-2 --seed 7 --output " + w1).code == 0);
    REQUIRE(run("reconstruct " + lm + " --tol 1e-2 --seed 7 --output " + w2).code == 0);
    REQUIRE(run("reconstruct " + lm + " --tol 1e-2 --seed 8 --output " + w3).code == 0);
    REQUIRE(run_prefixed("TFGEN_SEED=7", "reconstruct " + lm + " --tol 1e-2 --output " + w4)
                .code == 0);
    CHECK(files_equal(w1, w2));
    CHECK_FALSE(files_equal(w1, w3));
    CHECK(files_equal(w1, w4));
}

TEST_CASE("convert roundtrips between conventions bit for bit") {
    const std::string fi = scratch("conv_fi.tfsg");
    const std::string ti = scratch("conv_ti.tfsg");
    const std::string back = scratch("conv_back.tfsg");
    REQUIRE(run("analyze " + clip_path(5) + " --output " + fi).code == 0);

    RunResult r = run("convert " + fi + " --to ti --output " + ti);
    REQUIRE(r.code == 0);
    auto kv = parse_kv(r.out);
    CHECK(kv["convention"] == "time-invariant");
    CHECK(read_tfsg(ti).convention == Convention::TimeInvariant);

    REQUIRE(run("convert " + ti + " --to fi --output " + back).code == 0);
    CHECK(read_tfsg(back).data == read_tfsg(fi).data);

    const std::string noop = scratch("conv_noop.tfsg");
    REQUIRE(run("convert " + fi + " --to fi --output " + noop).code == 0);
    CHECK(read_tfsg(noop).data == read_tfsg(fi).data);
}

TEST_CASE("convert refuses magnitude-only payloads and impossible targets") {
    const std::string lm = scratch("conv_lm.tfsg");
    REQUIRE(run("analyze " + clip_path(5) + " --logmag --output " + lm).code == 0);
    RunResult r = run("convert " + lm + " --to ti --output " + scratch("x.tfsg"));
    CHECK(r.code == 2);
    CHECK(r.err.find("complex coefficients") != std::string::npos);

    // hop 20 does not divide the window center, so the simplified convention is undefined
    const std::string odd = scratch("conv_odd.tfsg");
    REQUIRE(run("analyze " + clip_path(5) + " --a 20 --M 96 --output " + odd).code == 0);
    RunResult rs = run("convert " + odd + " --to sti --output " + scratch("y.tfsg"));
    CHECK(rs.code == 2);
    CHECK(rs.err.find("divide") != std::string::npos);
}

TEST_CASE("preprocess builds feature containers and a manifest") {
    const std::string dir = scratch("corpus");
    fs::create_directories(dir);
    for (int i = 1; i <= 3; ++i)
        fs::copy_file(clip_path(i), dir + "/clip" + std::to_string(i) + ".wav",
                      fs::copy_options::overwrite_existing);
    std::ofstream(dir + "/broken.wav") << "this is not audio";

    RunResult r = run("preprocess " + dir);
    REQUIRE(r.code == 0);
    auto kv = parse_kv(r.out);
    CHECK(kv["processed"] == "3");
    CHECK(kv["skipped"] == "1");
    CHECK(r.err.find("broken.wav") != std::string::npos);

    const std::vector<std::string> manifest = read_lines(dir + "/manifest.csv");
    REQUIRE(manifest.size() == 4);
    CHECK(manifest[0] == "filename,peak,rho");
    for (std::size_t i = 1; i < manifest.size(); ++i) {
        const std::vector<std::string> cells = split_csv(manifest[i]);
        REQUIRE(cells.size() == 3);
        CHECK(cells[0] == "clip" + std::to_string(i) + ".tfsg");
        CHECK(std::stod(cells[1]) > 0.0);
        const double rho = std::stod(cells[2]);
        CHECK(rho > 0.0);
        CHECK(rho < 1.0);
        CHECK(read_tfsg(dir + "/" + cells[0]).kind == PayloadKind::Feature);
    }
}

TEST_CASE("preprocess output is independent of the worker count") {
    const std::string src = scratch("jobs_src");
    fs::create_directories(src);
    for (int i = 1; i <= 3; ++i)
        fs::copy_file(clip_path(i), src + "/c" + std::to_string(i) + ".wav",
                      fs::copy_options::overwrite_existing);
    const std::string out1 = scratch("jobs1");
    const std::string out2 = scratch("jobs2");
    REQUIRE(run("preprocess " + src + " --jobs 1 --output " + out1).code == 0);
    REQUIRE(run("preprocess " + src + " --jobs 2 --output " + out2).code == 0);
    for (int i = 1; i <= 3; ++i) {
        const std::string name = "/c" + std::to_string(i) + ".tfsg";
        CHECK(files_equal(out1 + name, out2 + name));
    }
    CHECK(files_equal(out1 + "/manifest.csv", out2 + "/manifest.csv"));
}

TEST_CASE("preprocess --dataset-norm shares one peak across the batch") {
    const std::string src = scratch("norm_src");
    fs::create_directories(src);
    for (int i = 1; i <= 3; ++i)
        fs::copy_file(clip_path(i), src + "/c" + std::to_string(i) + ".wav",
                      fs::copy_options::overwrite_existing);
    const std::string out = scratch("norm_out");
    REQUIRE(run("preprocess " + src + " --dataset-norm --output " + out).code == 0);
    const std::vector<std::string> manifest = read_lines(out + "/manifest.csv");
    REQUIRE(manifest.size() == 4);
    const std::string peak = split_csv(manifest[1])[1];
    CHECK(split_csv(manifest[2])[1] == peak);
    CHECK(split_csv(manifest[3])[1] == peak);
}

TEST_CASE("consistency reports per-file and aggregate correlation") {
    std::string inputs;
    for (int i = 1; i <= 5; ++i) {
        const std::string out = scratch("cons" + std::to_string(i) + ".tfsg");
        REQUIRE(run("analyze " + clip_path(i) + " --logmag --output " + out).code == 0);
        inputs += " " + out;
    }
    RunResult r = run("consistency" + inputs);
    REQUIRE(r.code == 0);
    std::size_t file_lines = 0;
    std::istringstream ss(r.out);
    std::string line;
    while (std::getline(ss, line))
        if (line.rfind("file=", 0) == 0) ++file_lines;
    CHECK(file_lines == 5);
    auto kv = parse_kv(r.out);
    CHECK(kv["n"] == "5");
    const double mean_rho = std::stod(kv["mean_rho"]);
    CHECK(mean_rho > 0.3);
    CHECK(mean_rho < 0.95);
    CHECK(std::stod(kv["std_rho"]) >= 0.0);
}

TEST_CASE("consistency --against an identical batch reports zero gap") {
    const std::string dir = scratch("against");
    fs::create_directories(dir);
    std::string inputs;
    for (int i = 1; i <= 3; ++i) {
        const std::string out = dir + "/g" + std::to_string(i) + ".tfsg";
        REQUIRE(run("analyze " + clip_path(i) + " --logmag --output " + out).code == 0);
        inputs += " " + out;
    }
    RunResult r = run("consistency" + inputs + " --against " + dir);
    REQUIRE(r.code == 0);
    auto kv = parse_kv(r.out);
    CHECK(std::stod(kv["gamma"]) == 0.0);
    CHECK(kv["n_a"] == "3");
    CHECK(kv["n_b"] == "3");
}

TEST_CASE("consistency --sweep snr writes a csv over noise levels") {
    const std::string csv = scratch("snr.csv");
    std::string inputs;
    for (int i = 1; i <= 3; ++i) inputs += " " + clip_path(i);
    RunResult r = run("consistency" + inputs + " --sweep snr --output " + csv);
    REQUIRE(r.code == 0);

    const std::vector<std::string> lines = read_lines(csv);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "snr_db,mean_rho,std_rho,n");
    const std::vector<std::string> labels = {"inf", "40", "20", "10", "0"};
    std::vector<double> means;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 4);
        CHECK(cells[0] == labels[i - 1]);
        CHECK(cells[3] == "3");
        means.push_back(std::stod(cells[1]));
        CHECK(means.back() > 0.0);
        CHECK(means.back() < 1.0);
    }
    CHECK(means.front() > means.back());
}

TEST_CASE("consistency --sweep redundancy covers the lattice family") {
    const std::string csv = scratch("red.csv");
    std::string inputs;
    for (int i = 1; i <= 3; ++i) inputs += " " + clip_path(i);
    RunResult r = run("consistency" + inputs + " --sweep redundancy --output " + csv);
    REQUIRE(r.code == 0);

    const std::vector<std::string> lines = read_lines(csv);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "redundancy,mean_rho,std_rho,n");
    const std::vector<std::string> labels = {"4", "8", "16"};
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::vector<std::string> cells = split_csv(lines[i]);
        REQUIRE(cells.size() == 4);
        CHECK(cells[0] == labels[i - 1]);
        CHECK(cells[3] == "3");
        const double rho = std::stod(cells[1]);
        CHECK(rho > 0.0);
        CHECK(rho < 1.0);
    }
}

TEST_CASE("options load from a config file with command-line override") {
    const std::string ini = scratch("grid.ini");
    std::ofstream(ini) << "a=92\nM=736\n";
    RunResult r = run("analyze " + clip_path(1) + " --config " + ini + " --output " +
                      scratch("cfg1.tfsg"));
    REQUIRE(r.code == 0);
    auto kv = parse_kv(r.out);
    CHECK(kv["rows"] == "369");
    CHECK(kv["cols"] == "184");

    RunResult r2 = run("analyze " + clip_path(1) + " --config " + ini + " --M 512 --output " +
                       scratch("cfg2.tfsg"));
    REQUIRE(r2.code == 0);
    auto kv2 = parse_kv(r2.out);
    CHECK(kv2["rows"] == "257");
    CHECK(kv2["cols"] == "256");
}
