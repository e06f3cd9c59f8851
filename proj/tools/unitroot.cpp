#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "unitroot/cli.hpp"
#include "unitroot/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"unit roots of exponential-sum families"};
  std::string command, config_path, out_path;
  std::optional<int> precision, tdeg;
  app.add_option("command", command, "weights | expsum | lfunction | dworkdet | sympow | unitroot | verify");
  app.add_option("--config", config_path, "instance file")->required();
  app.add_option("--precision", precision, "p-adic digits N")->check(CLI::PositiveNumber);
  app.add_option("--tdeg", tdeg, "degree of the field of t_bar")->check(CLI::PositiveNumber);
  app.add_option("--out", out_path, "report file (default stdout)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc ? 2 : 0;
  }

  ur::InstanceConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ur::ConfigError("cannot read " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = ur::parse_config(ss.str());
  } catch (const ur::ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  }
  if (precision) cfg.N = *precision;
  if (tdeg) cfg.t_degree = *tdeg;
  if (command.empty()) command = cfg.command.value_or("");
  if (command.empty()) {
    std::cerr << "no command given\n";
    return 2;
  }

  auto rep = ur::run(cfg, command);
  if (out_path.empty()) {
    std::cout << rep.str();
  } else {
    std::ofstream out(out_path);
    out << rep.str();
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 2;
    }
  }
  for (auto& [k, s] : rep.timings) std::cerr << "timing." << k << " = " << s << "s\n";
  if (rep.status) std::cerr << "exit " << rep.status << "\n";
  return rep.status;
}
