#pragma once

// Shared plumbing for the command-line tools.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sol/algorithm.hpp"
#include "sol/error.hpp"
#include "sol/pario.hpp"

namespace sol::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;

// Runs body and maps library exceptions onto exit codes: configuration
// problems are usage errors (2), data and file problems are 1.
template <typename Body>
int guarded(const char* tool, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << tool << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << tool << ": " << e.what() << "\n";
    return kExitIo;
  }
}

inline std::string algorithm_listing() {
  std::string out = "Algorithms:\n";
  for (const Algorithm* a : all_algorithms()) {
    std::string line = "  " + std::string(a->name());
    line.resize(16, ' ');
    line += std::string(a->description());
    std::string params;
    for (const auto& p : a->params()) {
      if (!params.empty()) params += ", ";
      params += std::string(p.name) + "=" + format_double(p.default_value);
    }
    out += line + "\n";
    if (!params.empty()) out += "                  params: " + params + "\n";
  }
  return out;
}

inline std::optional<DataFormat> format_flag(const std::string& value) {
  if (value.empty()) return std::nullopt;
  auto f = parse_format(value);
  if (!f) throw ConfigError("unknown format '" + value + "' (libsvm, csv, bin)");
  return f;
}

inline void add_pipeline_flags(CLI::App& app, PipelineOptions& opts) {
  app.add_option("--chunk-size", opts.chunk_size, "Examples per load chunk")
      ->check(CLI::PositiveNumber);
  app.add_option("--buffer-chunks", opts.buffer_chunks, "Chunks buffered ahead of the consumer")
      ->check(CLI::PositiveNumber);
  app.add_option("--workers", opts.workers, "Parse worker threads (0 = auto)");
  app.add_flag("--skip-bad-lines", opts.skip_bad_lines, "Drop unparseable lines");
}

// CLI11 parse errors and --help. Returns nullopt when parsing succeeded.
inline std::optional<int> parse_args(CLI::App& app, int argc, char** argv) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  return std::nullopt;
}

}  // namespace sol::tools
