#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../tools/cli.hpp"
#include "ftspec/estimator.hpp"
#include "ftspec/io.hpp"
#include "ftspec/sim.hpp"

using namespace ftspec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ftspec_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

io::json error_json(const Outcome& o) { return io::json::parse(o.err); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate is deterministic and matches the library") {
    const auto dir = scratch("simulate");
    const auto a = dir / "a.csv";
    const auto b = dir / "b.csv";
    REQUIRE(invoke({"simulate", "--T", "64", "--d", "12", "--seed", "7", "--out", a.string()}).code == 0);
    REQUIRE(invoke({"simulate", "--T", "64", "--d", "12", "--seed", "7", "--out", b.string()}).code == 0);
    CHECK(slurp(a) == slurp(b));
    const auto series = io::read_series_csv(a);
    CHECK(series.length() == 64);
    CHECK(series.dim() == 12);
    CHECK(series.values() == generate_fma1(Fma1Model::random(Grid(12), 7), 64).values());

    REQUIRE(invoke({"simulate", "--model", "iid", "--T", "64", "--d", "12", "--seed", "7", "--out", b.string()}).code == 0);
    auto iid = Fma1Model::random(Grid(12), 7);
    iid.a1.setZero();
    CHECK(io::read_series_csv(b).values() == generate_fma1(iid, 64).values());
}

TEST_CASE("estimate through files equals the in-memory pipeline") {
    const auto dir = scratch("estimate");
    const auto data = dir / "x.csv";
    REQUIRE(invoke({"simulate", "--T", "128", "--d", "10", "--seed", "3", "--out", data.string()}).code == 0);
    const auto out = dir / "est";
    const auto r = invoke({"estimate", "--in", data.string(), "--kernel", "ID", "--bandwidth", "0.25", "--out", out.string()});
    REQUIRE(r.code == 0);

    const auto direct = estimate_smoothed(center(generate_fma1(Fma1Model::random(Grid(10), 3), 128)),
                                          FlatTopSpec::infinitely_differentiable(), 0.25, default_frequencies());
    const auto from_json = io::estimate_from_json(io::read_json_file(out / "estimate.json"));
    const auto summary = io::read_json_file(out / "summary.json");
    const auto from_csv = io::read_estimate_csv_dir(out / "csv", summary);
    REQUIRE(from_json.kernels.size() == direct.kernels.size());
    for (std::size_t k = 0; k < direct.kernels.size(); ++k) {
        CHECK(from_json.kernels[k].matrix() == direct.kernels[k].matrix());
        CHECK(from_csv.kernels[k].matrix() == direct.kernels[k].matrix());
    }
    CHECK(summary["bandwidth"] == 0.25);
    CHECK(summary["method"] == "smoothed-periodogram");
    CHECK(summary["kernel"]["family"] == "ID");
    CHECK(summary["frequencies"].size() == 10);
    CHECK(summary["max_hermitian_residual"].get<double>() <= 1e-10);
}

TEST_CASE("estimate options") {
    const auto dir = scratch("options");
    const auto data = dir / "x.csv";
    REQUIRE(invoke({"simulate", "--T", "64", "--d", "20", "--seed", "5", "--out", data.string()}).code == 0);

    SUBCASE("semidefinite clipping") {
        REQUIRE(invoke({"estimate", "--in", data.string(), "--kernel", "TR", "--bandwidth", "0.1", "--psd", "semidefinite",
                        "--out", (dir / "psd").string()}).code == 0);
        const auto summary = io::read_json_file(dir / "psd" / "summary.json");
        for (const auto& f : summary["frequencies"]) CHECK(f["min_eigenvalue"].get<double>() >= -1e-10);
    }
    SUBCASE("definite clipping with the default floor") {
        REQUIRE(invoke({"estimate", "--in", data.string(), "--psd", "definite", "--out", (dir / "pd").string()}).code == 0);
        const auto summary = io::read_json_file(dir / "pd" / "summary.json");
        CHECK(summary["eps"] == doctest::Approx(1.0 / 64.0));
        for (const auto& f : summary["frequencies"]) CHECK(f["min_eigenvalue"].get<double>() >= 1.0 / 64.0 - 1e-12);
    }
    SUBCASE("lag-window with automatic bandwidth") {
        REQUIRE(invoke({"estimate", "--in", data.string(), "--method", "lag-window", "--bandwidth", "auto", "--kernel", "PR",
                        "--frequencies", "0,1.5,3", "--out", (dir / "lw").string()}).code == 0);
        const auto summary = io::read_json_file(dir / "lw" / "summary.json");
        CHECK(summary["method"] == "lag-window");
        CHECK(summary["frequencies"].size() == 3);
        const auto report = io::bandwidth_report_from_json(summary["bandwidth_report"]);
        CHECK(summary["bandwidth"].get<double>() == report.bandwidth);
    }
}

TEST_CASE("bandwidth subcommand") {
    const auto dir = scratch("bandwidth");
    const auto data = dir / "x.csv";
    REQUIRE(invoke({"simulate", "--model", "fma1", "--T", "512", "--seed", "7", "--out", data.string()}).code == 0);
    const auto r = invoke({"bandwidth", "--in", data.string(), "--kernel", "TR"});
    REQUIRE(r.code == 0);
    const auto report = io::bandwidth_report_from_json(io::json::parse(r.out));
    CHECK(report.q_hat >= 1);
    CHECK(report.q_hat <= 2);
    CHECK(report.bandwidth == bandwidth_from_q(report.q_hat, report.c_ef));

    REQUIRE(invoke({"bandwidth", "--in", data.string(), "--kernel", "TR", "--aggregation", "mean", "--out",
                    (dir / "r.json").string()}).code == 0);
    const auto stored = io::bandwidth_report_from_json(io::read_json_file(dir / "r.json"));
    CHECK(stored.aggregation == Aggregation::Mean);
    CHECK(stored.q_grid == report.q_grid);
}

TEST_CASE("bench is reproducible across runs and thread counts") {
    const auto dir = scratch("bench");
    const std::vector<std::string> base{"bench", "--T-list", "32,64", "--runs", "3", "--d", "10", "--seed", "9"};
    auto with = [&](const std::string& threads, const std::string& name) {
        auto args = base;
        args.insert(args.end(), {"--threads", threads, "--out", (dir / name).string()});
        return invoke(args);
    };
    REQUIRE(with("1", "a").code == 0);
    REQUIRE(with("1", "b").code == 0);
    REQUIRE(with("4", "c").code == 0);
    for (const char* f : {"imse.csv", "imse.json", "traces/trace_TR.csv", "traces/trace_EPA.csv"}) {
        CAPTURE(f);
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "c" / f));
    }
    const auto csv = slurp(dir / "a" / "imse.csv");
    CHECK(csv.rfind("kernel,T,bandwidth_mode,mean_log2_imse,stderr\n", 0) == 0);
    CHECK(io::read_json_file(dir / "a" / "imse.json")["rows"].size() == 8);
    const auto trace = slurp(dir / "a" / "traces" / "trace_ID.csv");
    CHECK(trace.rfind("omega,tau,abs_f_hat,abs_f_true\n", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == 66);
}

TEST_CASE("config file precedence") {
    const auto dir = scratch("config");
    io::write_json_file(dir / "cfg.json", {{"T", 40}, {"d", 6}, {"seed", 2}});
    REQUIRE(invoke({"simulate", "--config", (dir / "cfg.json").string(), "--seed", "4", "--out", (dir / "x.csv").string()}).code == 0);
    const auto s = io::read_series_csv(dir / "x.csv");
    CHECK(s.length() == 40);
    CHECK(s.dim() == 6);
    CHECK(s.values() == generate_fma1(Fma1Model::random(Grid(6), 4), 40).values());

    io::write_json_file(dir / "bench.json", {{"T_list", "32"}, {"runs", 2}, {"kernels", "TR"}, {"d", 8}});
    const auto r = invoke({"bench", "--config", (dir / "bench.json").string(), "--out", (dir / "b").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out == "kernel,T,bandwidth_mode,mean_log2_imse,stderr\n" + r.out.substr(r.out.find('\n') + 1));
    CHECK(io::read_json_file(dir / "b" / "imse.json")["rows"].size() == 1);
}

TEST_CASE("exit codes and error JSON") {
    const auto dir = scratch("errors");
    const auto data = dir / "x.csv";
    REQUIRE(invoke({"simulate", "--T", "32", "--d", "4", "--out", data.string()}).code == 0);

    SUBCASE("invalid configuration exits 1") {
        for (const auto& args : std::vector<std::vector<std::string>>{
                 {},
                 {"frobnicate"},
                 {"estimate", "--in", data.string(), "--out", (dir / "e").string(), "--bandwidth", "1.5"},
                 {"estimate", "--in", data.string(), "--out", (dir / "e").string(), "--psd", "maybe"},
                 {"estimate", "--in", data.string(), "--out", (dir / "e").string(), "--psd", "definite", "--eps", "0"},
                 {"estimate", "--in", data.string(), "--out", (dir / "e").string(), "--kernel", "EPA", "--method", "lag-window"},
                 {"simulate", "--model", "far", "--out", (dir / "y.csv").string()},
                 {"simulate", "--T", "32"},
                 {"bench", "--runs", "1", "--out", (dir / "b").string()},
             }) {
            CAPTURE(args.size());
            const auto r = invoke(args);
            CHECK(r.code == 1);
            const auto e = error_json(r);
            CHECK(e["exit_code"] == 1);
            CHECK(e.contains("message"));
        }
    }
    SUBCASE("malformed input exits 2") {
        io::write_text_file(dir / "bad.csv", "tau_0,tau_1\n1,oops\n2,3\n");
        io::write_text_file(dir / "bad.json", "{");
        for (const auto& args : std::vector<std::vector<std::string>>{
                 {"bandwidth", "--in", (dir / "bad.csv").string()},
                 {"bandwidth", "--in", (dir / "missing.csv").string()},
                 {"estimate", "--in", data.string(), "--out", (dir / "e").string(), "--kernel", "XX"},
                 {"simulate", "--config", (dir / "bad.json").string(), "--out", (dir / "y.csv").string()},
             }) {
            const auto r = invoke(args);
            CHECK(r.code == 2);
            CHECK(error_json(r)["error"] == "parse");
        }
    }
    SUBCASE("numeric failure exits 3") {
        io::write_text_file(dir / "flat.csv", "tau_0,tau_1\n1,1\n1,2\n1,3\n1,4\n1,5\n1,6\n1,7\n1,8\n1,9\n");
        const auto r = invoke({"bandwidth", "--in", (dir / "flat.csv").string()});
        CHECK(r.code == 3);
        CHECK(error_json(r)["error"] == "degenerate-data");
        io::write_text_file(dir / "nan.csv", "tau_0,tau_1\n1,nan\n1,2\n");
        CHECK(invoke({"estimate", "--in", (dir / "nan.csv").string(), "--out", (dir / "e").string()}).code == 3);
    }
}

}
