#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ftspec::cli {

enum class ExitCode : int { Ok = 0, InvalidConfig = 1, ParseFailure = 2, NumericFailure = 3 };

/// Resolved settings for one invocation. Flags override the JSON config file, which overrides defaults.
struct RunConfig {
    std::string command;
    std::string input;
    std::string output;
    std::string model = "fma1";
    std::string kernel = "TR";
    std::string bandwidth = "rate";
    std::string method = "smoothed-periodogram";
    std::string psd = "none";
    std::optional<double> eps;
    std::string frequencies = "default";
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::size_t length = 512;
    std::size_t grid_size = 100;
    double c0 = 2.0;
    std::string aggregation = "max";
    std::string window = "next-lag";
    std::string lengths = "64,128,256,512,1024";
    std::size_t runs = 50;
    std::string kernels = "EPA,TR,PR,ID";
    bool freeze_operators = false;
};

/// Parses argv-style arguments (without the program name), runs the subcommand and
/// returns the process exit status. Errors are written to `err` as one JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Executes an already-resolved configuration; throws ftspec::Error subclasses on failure.
void execute(const RunConfig& config, std::ostream& out);

}  // namespace ftspec::cli
