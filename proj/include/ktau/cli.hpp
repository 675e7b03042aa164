#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ktau/rank_core.hpp"

namespace ktau {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 2,
  kExitInvalidInput = 3,
  kExitPartialFailure = 4,
};

/// Parse error carrying the 1-based line number of the offending line.
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Reads a two-column `x,y` CSV. Throws CsvError on malformed content and
/// std::runtime_error if the file cannot be opened. Statistical validity
/// (n >= 2) is checked separately.
std::pair<std::vector<double>, std::vector<double>> read_xy_csv(const std::filesystem::path& path);

void write_xy_csv(const PairedSample& s, std::ostream& out);

/// Entry point of the `ktau` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ktau
