#include "ftspec/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ftspec/errors.hpp"

namespace ftspec::io {
namespace {

// Shortest representation that round-trips exactly.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, std::size_t line) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double v = 0.0;
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ParseError("line " + std::to_string(line) + ": '" + field + "' is not a number");
    }
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void write_real_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_real_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        for (const auto& f : split_csv(line)) row.push_back(parse_double(f, n));
        if (!rows.empty() && row.size() != rows.front().size()) throw ParseError(path.string() + ": ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path.string() + " is empty");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

json real_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd real_from_json(const json& rows) {
    if (!rows.is_array() || rows.empty() || !rows.front().is_array()) throw ParseError("expected a nested numeric array");
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd out(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m) throw ParseError("ragged matrix in JSON");
        for (Eigen::Index j = 0; j < m; ++j) out(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
    return out;
}

template <typename F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace

void write_series_csv(std::ostream& out, const FunctionalSeries& series) {
    const auto& x = series.values();
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << "tau_" << j;
    out << '\n';
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << format_double(x(t, j));
        out << '\n';
    }
}

FunctionalSeries read_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("series CSV is empty");
    const auto header = split_csv(line);
    for (std::size_t j = 0; j < header.size(); ++j) {
        std::string h = header[j];
        if (!h.empty() && h.back() == '\r') h.pop_back();
        if (h != "tau_" + std::to_string(j)) throw ParseError("series CSV header field " + std::to_string(j) + " is '" + h + "'");
    }
    const std::size_t d = header.size();
    std::vector<double> flat;
    std::size_t rows = 0;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv(line);
        if (fields.size() != d) throw ParseError("line " + std::to_string(n) + " has " + std::to_string(fields.size()) + " fields, expected " + std::to_string(d));
        for (const auto& f : fields) flat.push_back(parse_double(f, n));
        ++rows;
    }
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t j = 0; j < d; ++j) values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = flat[t * d + j];
    return FunctionalSeries(Grid(d), std::move(values));
}

void write_series_csv(const std::filesystem::path& path, const FunctionalSeries& series) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    write_series_csv(out, series);
}

FunctionalSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return read_series_csv(in);
}

json series_to_json(const FunctionalSeries& series) {
    return {{"d", series.dim()}, {"T", series.length()}, {"values", real_to_json(series.values())}};
}

FunctionalSeries series_from_json(const json& j) {
    return guarded([&] {
        const auto d = j.at("d").get<std::size_t>();
        const auto length = j.at("T").get<std::size_t>();
        Eigen::MatrixXd values = real_from_json(j.at("values"));
        if (static_cast<std::size_t>(values.rows()) != length || static_cast<std::size_t>(values.cols()) != d) {
            throw ParseError("series JSON shape disagrees with d and T");
        }
        return FunctionalSeries(Grid(d), std::move(values));
    });
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
    return {{"re", real_to_json(m.real())}, {"im", real_to_json(m.imag())}};
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
    return guarded([&] {
        const Eigen::MatrixXd re = real_from_json(j.at("re"));
        const Eigen::MatrixXd im = real_from_json(j.at("im"));
        if (re.rows() != im.rows() || re.cols() != im.cols()) throw ParseError("re/im shapes differ");
        Eigen::MatrixXcd out(re.rows(), re.cols());
        out.real() = re;
        out.imag() = im;
        return out;
    });
}

json estimate_to_json(const SpectralEstimate& est) {
    json kernels = json::array();
    for (const auto& k : est.kernels) kernels.push_back({{"omega", k.omega()}, {"matrix", matrix_to_json(k.matrix())}});
    return {{"frequencies", est.frequencies},
            {"bandwidth", est.bandwidth},
            {"kernel", est.kernel_id},
            {"method", to_string(est.method)},
            {"kernels", std::move(kernels)}};
}

SpectralEstimate estimate_from_json(const json& j) {
    return guarded([&] {
        SpectralEstimate est;
        est.frequencies = j.at("frequencies").get<std::vector<double>>();
        est.bandwidth = j.at("bandwidth").get<double>();
        est.kernel_id = j.at("kernel").get<std::string>();
        est.method = parse_method(j.at("method").get<std::string>());
        for (const auto& k : j.at("kernels")) est.kernels.emplace_back(k.at("omega").get<double>(), matrix_from_json(k.at("matrix")));
        est.validate();
        return est;
    });
}

void write_estimate_csv_dir(const std::filesystem::path& dir, const SpectralEstimate& est) {
    std::filesystem::create_directories(dir);
    std::ofstream index(dir / "index.csv");
    if (!index) throw ParseError("cannot write into " + dir.string());
    index << "j,omega\n";
    for (std::size_t k = 0; k < est.kernels.size(); ++k) {
        index << k << ',' << format_double(est.frequencies[k]) << '\n';
        write_real_csv(dir / ("freq_" + std::to_string(k) + "_re.csv"), est.kernels[k].matrix().real());
        write_real_csv(dir / ("freq_" + std::to_string(k) + "_im.csv"), est.kernels[k].matrix().imag());
    }
}

SpectralEstimate read_estimate_csv_dir(const std::filesystem::path& dir, const json& metadata) {
    std::ifstream index(dir / "index.csv");
    if (!index) throw ParseError("missing " + (dir / "index.csv").string());
    SpectralEstimate est;
    std::string line;
    std::getline(index, line);
    std::size_t n = 1;
    while (std::getline(index, line)) {
        ++n;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2) throw ParseError("index.csv line " + std::to_string(n) + " malformed");
        const double omega = parse_double(fields[1], n);
        const std::string stem = "freq_" + fields[0];
        const Eigen::MatrixXd re = read_real_csv(dir / (stem + "_re.csv"));
        const Eigen::MatrixXd im = read_real_csv(dir / (stem + "_im.csv"));
        Eigen::MatrixXcd m(re.rows(), re.cols());
        m.real() = re;
        m.imag() = im;
        est.frequencies.push_back(omega);
        est.kernels.emplace_back(omega, std::move(m));
    }
    guarded([&] {
        est.bandwidth = metadata.value("bandwidth", 0.0);
        // Accepts a bare id or the kernel spec object written to summary.json.
        if (metadata.contains("kernel")) {
            const auto& k = metadata.at("kernel");
            est.kernel_id = k.is_object() ? k.at("family").get<std::string>() : k.get<std::string>();
        }
        est.method = parse_method(metadata.value("method", std::string("smoothed-periodogram")));
        return 0;
    });
    est.validate();
    return est;
}

json bandwidth_report_to_json(const BandwidthReport& report) {
    json grid = json::array();
    for (const auto& row : report.q_grid) grid.push_back(row);
    return {{"q_hat", report.q_hat},
            {"q_grid", std::move(grid)},
            {"B_T", report.bandwidth},
            {"c_ef", report.c_ef},
            {"C0", report.c0},
            {"K_T", report.k_t},
            {"aggregation", to_string(report.aggregation)},
            {"window", to_string(report.window)},
            {"fallback", report.fallback}};
}

BandwidthReport bandwidth_report_from_json(const json& j) {
    return guarded([&] {
        BandwidthReport r;
        r.q_hat = j.at("q_hat").get<long>();
        const auto& grid = j.at("q_grid");
        if (grid.size() != kPilotGridSize) throw ParseError("q_grid must be 10 x 10");
        for (std::size_t i = 0; i < kPilotGridSize; ++i) {
            if (grid[i].size() != kPilotGridSize) throw ParseError("q_grid must be 10 x 10");
            for (std::size_t k = 0; k < kPilotGridSize; ++k) r.q_grid[i][k] = grid[i][k].get<long>();
        }
        r.bandwidth = j.at("B_T").get<double>();
        r.c_ef = j.at("c_ef").get<double>();
        r.c0 = j.at("C0").get<double>();
        r.k_t = j.at("K_T").get<long>();
        r.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
        r.window = parse_lag_window(j.at("window").get<std::string>());
        r.fallback = j.at("fallback").get<bool>();
        return r;
    });
}

void write_imse_csv(std::ostream& out, const ImseResult& result) {
    out << "kernel,T,bandwidth_mode,mean_log2_imse,stderr\n";
    for (const auto& r : result.rows) {
        out << r.kernel << ',' << r.length << ',' << r.bandwidth_mode << ',' << format_double(r.mean_log2_imse) << ','
            << format_double(r.stderr_log2) << '\n';
    }
}

json imse_to_json(const ImseResult& result) {
    json rows = json::array();
    for (const auto& r : result.rows) {
        rows.push_back({{"kernel", r.kernel},
                        {"T", r.length},
                        {"bandwidth_mode", r.bandwidth_mode},
                        {"mean_log2_imse", r.mean_log2_imse},
                        {"stderr", r.stderr_log2},
                        {"mean_imse", r.mean_imse},
                        {"mean_bandwidth", r.mean_bandwidth}});
    }
    return {{"rows", std::move(rows)}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << text;
}

}  // namespace ftspec::io
