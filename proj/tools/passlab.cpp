#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "passlab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-detector passage-time simulator"};
  app.require_subcommand(1);

  passlab::RunOptions opt;
  const char* subs[][2] = {
      {"arrival", "first-detection density at detector 1"},
      {"passage", "passage-time distribution between the two detectors"},
      {"reset-state", "position and momentum profiles of reset states"},
      {"discrete-compare", "discrete N-mode reset density against the continuum limit"},
      {"kijowski", "Kijowski arrival-time density of the free packet"},
      {"precision-sweep", "passage-time width against energy at optimal parameters"},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s[0], s[1]);
    sub->add_option("--config", opt.config_path, "JSON config file (defaults built in when omitted)");
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads (default: PASSLAB_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--emit-plots", opt.emit_plots, "write plot.py next to the CSV files");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : passlab::kExitUsage;
  }

  opt.subcommand = *passlab::parse_subcommand(app.get_subcommands().front()->get_name());
  const auto outcome = passlab::run(opt, std::cerr);
  if (!outcome.summary.empty()) {
    for (const auto& f : outcome.files) std::cout << f << '\n';
  }
  return outcome.exit_code;
}
