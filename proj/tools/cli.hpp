#ifndef PHASEMIX_TOOLS_CLI_HPP
#define PHASEMIX_TOOLS_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace phasemix::cli {

enum class Command { Tail, Pdf, Moments, Sample, Asymptote, Mda, Compare, SeriesBounds };
enum class Format { Csv, Json };

struct GridSpec {
  double lo = 0.1;
  double hi = 1e3;
  int per_decade = 8;
};

struct RunConfig {
  Command command = Command::Tail;
  std::string model_path;
  std::optional<double> x;  // single point, overrides the grid
  std::optional<GridSpec> grid;  // unset: [0.1, 1e3] at 8 per decade (mda: diagnostic grid)
  Format format = Format::Csv;
  std::uint64_t seed = 1;
  std::size_t count = 1000;
  int order = 4;
  std::vector<double> theta;
  // policy overrides
  std::optional<double> quad_rel_tol;
  std::optional<double> series_tol;
  /// 0: PHASEMIX_THREADS, else hardware concurrency.
  unsigned threads = 0;
};

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;

/// "LO:HI:PPD"; InvalidArgument on malformed specs.
GridSpec parse_grid(const std::string& spec);

/// Shortest decimal that parses back to the same double; "inf", "-inf", "nan" otherwise.
std::string format_double(double v);

/// Runs one command. Errors are reported as a single line on `err` and mapped to the exit
/// statuses above.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and runs.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace phasemix::cli

#endif  // PHASEMIX_TOOLS_CLI_HPP
