// Writes a synthetic height-field scene as the four binary input files plus
// the per-segment ground truth.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rsi/errors.hpp"
#include "rsi/oracle.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Synthetic scene generator"};
  std::size_t triangles = 29284;
  std::size_t rays = 100000;
  double fraction = 0.5;
  std::uint64_t seed = 1;
  std::string out_dir = "input";
  app.add_option("--triangles", triangles, "surface triangle count");
  app.add_option("--rays", rays, "segment count");
  app.add_option("--fraction", fraction, "fraction of segments crossing the surface")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out-dir", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    const rsi::oracle::SyntheticScene scene =
        rsi::oracle::generate_scene(triangles, rays, fraction, seed);
    rsi::oracle::write_scene(scene, out_dir);
  } catch (const rsi::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  }
  return 0;
}
