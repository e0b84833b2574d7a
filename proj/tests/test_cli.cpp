#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "ns/model_io.hpp"
#include "ns/track.hpp"
#include "ns/trajectory.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("ns_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }

    static int& counter() {
        static int n = 0;
        return n;
    }
};

int run_cli(const std::vector<std::string>& args) { return ns::cli::run(args); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Parse one CSV column (by header name) into doubles.
std::vector<double> csv_column(const std::string& csv, const std::string& column) {
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    std::vector<std::string> headers;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        headers.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    std::size_t col = headers.size();
    for (std::size_t i = 0; i < headers.size(); ++i)
        if (headers[i] == column) col = i;
    REQUIRE(col < headers.size());

    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t field = 0, pos = 0;
        while (field < col) {
            pos = line.find(',', pos) + 1;
            ++field;
        }
        const auto end = line.find(',', pos);
        const std::string cell = line.substr(pos, end - pos);
        double value = 0.0;
        std::from_chars(cell.data(), cell.data() + cell.size(), value);
        out.push_back(value);
    }
    return out;
}

}  // namespace

TEST_CASE("generate writes the documented sample grid") {
    TempDir dir;
    const auto out = dir.file("freefall.csv");
    const int status = run_cli({"generate", "--scenario", "free_fall", "--x0", "10", "--accel",
                                "-9.8", "--duration", "20", "--rate", "100", "--out", out});
    REQUIRE(status == 0);

    const ns::Trajectory traj = ns::trajectory_from_csv(slurp(out));
    CHECK(traj.sample_count() == 2000);
    CHECK(traj.channels[0][0] == 10.0);
    CHECK(fs::exists(out + ".manifest.json"));
}

TEST_CASE("generate then fit then predict reproduces the closed form") {
    TempDir dir;
    const auto traj_path = dir.file("freefall.csv");
    REQUIRE(run_cli({"generate", "--scenario", "free_fall", "--duration", "20", "--out",
                     traj_path}) == 0);

    const auto model_path = dir.file("model.json");
    REQUIRE(run_cli({"fit", "--in", traj_path, "--window", "10", "--library", "full", "--out",
                     model_path}) == 0);

    const ns::ModelDescriptor desc = ns::model_from_json(slurp(model_path));
    CHECK(desc.result.accepted());
    REQUIRE(desc.provenance.has_value());

    const auto pred_path = dir.file("pred.csv");
    REQUIRE(run_cli({"predict", "--in", model_path, "--to", "20", "--out", pred_path}) == 0);

    const std::string csv = slurp(pred_path);
    const auto ts = csv_column(csv, "t");
    const auto errs = csv_column(csv, "abs_error_x");
    REQUIRE(!ts.empty());
    CHECK(ts.back() == 20.0);  // closed interval for predictions
    CHECK(errs.back() < 1e-6);
    for (double e : errs) CHECK(e < 1e-6);
}

TEST_CASE("bench separates the full library from the restricted one") {
    TempDir dir;
    const auto out = dir.file("bench.csv");
    REQUIRE(run_cli({"bench", "--scenario", "damped_pendulum", "--phi", "0.5235987755982988",
                     "--horizon", "10", "--out", out}) == 0);

    const std::string csv = slurp(out);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "channel,method,abs_error_at_horizon,rmse_prediction_span");

    double full_err = -1.0, poly_err = -1.0, baseline_err = -1.0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string channel, method, abs_err, rmse;
        std::getline(row, channel, ',');
        std::getline(row, method, ',');
        std::getline(row, abs_err, ',');
        std::getline(row, rmse, ',');
        const double err = std::stod(abs_err);
        if (method == "full") full_err = err;
        if (method == "poly") poly_err = err;
        if (method == "linear_baseline") baseline_err = err;
    }
    REQUIRE(full_err >= 0.0);
    REQUIRE(poly_err >= 0.0);
    REQUIRE(baseline_err >= 0.0);
    CHECK(poly_err >= 1e3 * full_err);
}

TEST_CASE("track emits the event log and stitched predictions") {
    TempDir dir;
    const auto traj_path = dir.file("pw.csv");
    REQUIRE(run_cli({"generate", "--scenario", "piecewise", "--v0", "1", "--switch-at", "5",
                     "--accel", "-9.8", "--duration", "10", "--rate", "100", "--out",
                     traj_path}) == 0);

    const auto prefix = dir.file("run");
    REQUIRE(run_cli({"track", "--in", traj_path, "--window", "100", "--check-eps", "1e-4",
                     "--consecutive-k", "3", "--out", prefix}) == 0);

    const auto events = ns::event_log_from_jsonl(slurp(prefix + ".events.jsonl"));
    long locks = 0, refits = 0;
    for (const auto& e : events) {
        locks += e.kind == ns::TrackEventKind::LockAcquired;
        refits += e.kind == ns::TrackEventKind::RefitTriggered;
    }
    CHECK(locks == 2);
    CHECK(refits == 1);

    const std::string pred = slurp(prefix + ".predictions.csv");
    CHECK(pred.substr(0, pred.find('\n')) == "t,obs_x,pred_x");
    CHECK(fs::exists(prefix + ".manifest.json"));
}

TEST_CASE("runs are reproducible bit for bit") {
    TempDir dir;
    const auto a = dir.file("a.csv");
    const auto b = dir.file("b.csv");
    const std::vector<std::string> base = {"generate", "--scenario", "damped_pendulum",
                                           "--noise-sigma", "0.001", "--seed", "42",
                                           "--duration", "5"};
    auto args_a = base;
    args_a.insert(args_a.end(), {"--out", a});
    auto args_b = base;
    args_b.insert(args_b.end(), {"--out", b});
    REQUIRE(run_cli(args_a) == 0);
    REQUIRE(run_cli(args_b) == 0);
    CHECK(slurp(a) == slurp(b));

    // Manifests differ only in the output path.
    std::string ma = slurp(a + ".manifest.json");
    std::string mb = slurp(b + ".manifest.json");
    const auto scrub = [](std::string s, const std::string& path) {
        const auto pos = s.find(path);
        REQUIRE(pos != std::string::npos);
        return s.replace(pos, path.size(), "OUT");
    };
    CHECK(scrub(ma, a) == scrub(mb, b));
}

TEST_CASE("usage errors exit 2 without partial outputs") {
    TempDir dir;
    const auto out = dir.file("x.csv");

    CHECK(run_cli({"generate", "--scenario", "warp", "--out", out}) == 2);
    CHECK_FALSE(fs::exists(out));

    CHECK(run_cli({"generate", "--bogus-flag", "1", "--scenario", "free_fall", "--out", out}) ==
          2);
    CHECK_FALSE(fs::exists(out));

    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({}) == 2);

    // Malformed input file.
    const auto bad = dir.file("bad.csv");
    std::ofstream(bad) << "not,a,trajectory\n1,2\n";
    CHECK(run_cli({"fit", "--in", bad, "--out", dir.file("m.json")}) == 2);
    CHECK_FALSE(fs::exists(dir.file("m.json")));

    // Missing input file.
    CHECK(run_cli({"fit", "--in", dir.file("absent.csv"), "--out", dir.file("m.json")}) == 2);

    // Invalid window.
    const auto traj_path = dir.file("t.csv");
    REQUIRE(run_cli({"generate", "--scenario", "free_fall", "--duration", "2", "--out",
                     traj_path}) == 0);
    CHECK(run_cli({"fit", "--in", traj_path, "--window", "-1", "--out", dir.file("m.json")}) ==
          2);
}

TEST_CASE("help exits zero") {
    CHECK(run_cli({"--help"}) == 0);
}

TEST_CASE("noise flag changes data deterministically per seed") {
    TempDir dir;
    const auto clean = dir.file("clean.csv");
    const auto noisy = dir.file("noisy.csv");
    REQUIRE(run_cli({"generate", "--scenario", "free_fall", "--duration", "2", "--out", clean}) ==
            0);
    REQUIRE(run_cli({"generate", "--scenario", "free_fall", "--duration", "2", "--noise-sigma",
                     "0.01", "--seed", "7", "--out", noisy}) == 0);
    const auto a = ns::trajectory_from_csv(slurp(clean));
    const auto b = ns::trajectory_from_csv(slurp(noisy));
    REQUIRE(a.sample_count() == b.sample_count());
    CHECK(a.channels != b.channels);
    double max_dev = 0.0;
    for (std::size_t i = 0; i < a.sample_count(); ++i)
        max_dev = std::max(max_dev, std::abs(a.channels[0][i] - b.channels[0][i]));
    CHECK(max_dev > 1e-4);
    CHECK(max_dev < 0.06);  // ~5 sigma
}
