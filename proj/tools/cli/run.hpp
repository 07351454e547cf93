#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cli/config.hpp"

namespace sipdyn::cli {

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  Json summary;
};

// Runs the analysis and renders every output in memory. Throws whatever the
// library throws; nothing touches the file system.
Artifacts execute(const RunConfig& cfg, unsigned threads);

// CSVs first, summary.json last.
void write_artifacts(const Artifacts& a, const std::filesystem::path& dir);

// --threads, then the environment value, then the hardware. Throws
// ValidationError for a malformed environment value.
unsigned resolve_threads(std::optional<int> flag, const char* env);

// Whole command line. Exit codes: 0 ok, 1 validation, 2 numerical failure.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sipdyn::cli
