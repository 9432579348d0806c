#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "curvlab/cli.hpp"

using curvlab::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"curvlab: nonnegatively curved left-invariant metrics on compact "
               "Lie groups - verification and exploration"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* threads = std::getenv("CURVLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(threads, &end, 10);
    if (end && *end == '\0' && v >= 1) cfg.threads = static_cast<int>(v);
  }

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input_path, "input metric/direction file (JSON)");
    sub->add_option("--seed", cfg.seed, "random seed (default 0)");
    sub->add_option("--samples", cfg.samples, "sampling budget override")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol", cfg.tol, "tolerance override")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", cfg.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out_path, "write the report to this path");
    sub->add_option("--algebra", cfg.algebra,
                    "algebra: so3, so4, or a descriptor file path");
  };

  add_common(app.add_subcommand("verify", "run the full identity/property suite"));
  add_common(app.add_subcommand("analyze",
                                "classify a metric or direction and run the checks"));
  add_common(app.add_subcommand("search",
                                "randomized search for infinitesimally nonnegative "
                                "directions"));
  add_common(app.add_subcommand("catalog", "emit the known-example families as files"));
  add_common(app.add_subcommand("oracle", "Puttmann-vs-Koszul agreement sweep"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    return curvlab::cli::run(cfg);
  } catch (const curvlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
