#include "rsi/cli.hpp"

#include <iomanip>
#include <iostream>
#include <map>
#include <vector>

#include <CLI11.hpp>

#include "rsi/errors.hpp"

namespace rsi::cli {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, QueryMode>& mode_names() {
  static const std::map<std::string, QueryMode> names{
      {"boolean", QueryMode::boolean},
      {"barycentric", QueryMode::barycentric},
      {"intercept_count", QueryMode::count}};
  return names;
}

QueryMode parse_mode(const std::string& name) {
  const auto it = mode_names().find(name);
  if (it == mode_names().end()) {
    throw UsageError("unrecognised mode '" + name + "' (expected barycentric or intercept_count)");
  }
  return it->second;
}

void report(std::ostream& out, const Mesh& mesh, const SegmentBatch& segments,
            const ResultSet& results, const PhaseTimings& t, bool sorted,
            const std::vector<fs::path>& written) {
  out << "vertices: " << mesh.vertex_count() << '\n'
      << "triangles: " << mesh.triangle_count() << '\n'
      << "rays: " << segments.size() << '\n'
      << "mode: " << to_string(results.mode) << '\n'
      << "crossing rays: " << results.crossing_count() << '\n';
  const auto line = [&](const char* phase, double ms) {
    out << "time " << std::left << std::setw(16) << phase << std::right << std::fixed
        << std::setprecision(3) << ms << " ms\n";
  };
  line("boxes", t.boxes);
  line("quantize", t.quantize);
  line("encode", t.encode);
  line("sort", t.sort);
  line("reset", t.reset);
  line("construct", t.construct);
  if (sorted) line("ray sort", t.raySort);
  line("query", t.query);
  line("total", t.total());
  for (const fs::path& p : written) out << "wrote " << p.string() << '\n';
}

}  // namespace

std::optional<CliOptions> parse_arguments(std::span<const std::string> args, std::ostream& out) {
  CLI::App app{"Batch line-segment / triangle-mesh intersection"};
  app.name(args.empty() ? "ray_surface_intersect" : fs::path(args.front()).filename().string());

  std::vector<std::string> positional;
  std::string mode_flag;
  std::string out_dir = ".";
  bool sort_rays = false;
  bool silent_flag = false;
  unsigned workers = 0;

  app.add_option("args", positional,
                 "vertices triangles rayFrom rayTo [silent|default [barycentric|intercept_count]]");
  app.add_option("--mode", mode_flag, "boolean, barycentric or intercept_count")
      ->check(CLI::IsMember({"boolean", "barycentric", "intercept_count"}));
  app.add_option("--workers", workers, "worker threads (0 = one per hardware thread)");
  app.add_flag("--sort-rays", sort_rays, "query segments in Morton order of their midpoints");
  app.add_option("--out-dir", out_dir, "directory receiving the result files");
  app.add_flag("--silent", silent_flag, "suppress everything except error diagnostics");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (positional.size() > 6 || (!positional.empty() && positional.size() < 4)) {
    throw UsageError("expected no positional arguments or four input files, optionally followed "
                     "by silent|default and barycentric|intercept_count");
  }

  CliOptions opts;
  opts.files = positional.empty()
                   ? io::InputFileSet::in_directory("input")
                   : io::InputFileSet{positional[0], positional[1], positional[2], positional[3]};
  opts.silent = silent_flag;
  if (positional.size() >= 5) {
    if (positional[4] == "silent") {
      opts.silent = true;
    } else if (positional[4] != "default") {
      throw UsageError("fifth argument must be 'silent' or 'default', got '" + positional[4] + "'");
    }
  }
  if (positional.size() == 6) {
    if (positional[5] == "boolean") throw UsageError("unrecognised mode 'boolean' in sixth argument");
    opts.mode = parse_mode(positional[5]);
  }
  if (!mode_flag.empty()) {
    const QueryMode flagged = parse_mode(mode_flag);
    if (positional.size() == 6 && flagged != opts.mode) {
      throw UsageError("--mode disagrees with the sixth positional argument");
    }
    opts.mode = flagged;
  }
  opts.outputDir = out_dir;
  opts.sortRays = sort_rays;
  opts.workers = workers;
  return opts;
}

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  try {
    const std::optional<CliOptions> opts = parse_arguments(args, out);
    if (!opts) return 0;

    const Mesh mesh = io::read_mesh(opts->files);
    const SegmentBatch segments = io::read_segments(opts->files.rayFrom, opts->files.rayTo);

    EngineConfig config;
    config.mode = opts->mode;
    config.sortRays = opts->sortRays;
    config.workerCount = opts->workers;
    PhaseTimings timings;
    const ResultSet results = run_batch(mesh, segments, config, &timings);
    const std::vector<fs::path> written = io::write_results(results, opts->outputDir);

    if (!opts->silent) report(out, mesh, segments, results, timings, opts->sortRays, written);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::usage) err << "usage: see --help\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::internal);
  }
}

int cli_main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace rsi::cli
