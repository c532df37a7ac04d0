#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "rsi/engine.hpp"
#include "rsi/io.hpp"

namespace rsi::cli {

struct CliOptions {
  io::InputFileSet files;
  bool silent = false;
  QueryMode mode = QueryMode::boolean;
  std::filesystem::path outputDir = ".";
  bool sortRays = false;
  unsigned workers = 0;
};

/// Parses `prog [vertices triangles rayFrom rayTo [silent|default [barycentric|intercept_count]]]`
/// plus the long options. Returns nullopt when help was requested and printed.
/// Throws UsageError on anything unrecognised.
std::optional<CliOptions> parse_arguments(std::span<const std::string> args, std::ostream& out);

/// Full program: parse, read inputs, run the batch, write results, report.
/// Returns the process exit code; diagnostics go to `err`.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace rsi::cli
