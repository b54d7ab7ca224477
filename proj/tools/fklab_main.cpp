#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>

#include "fklab/runner.hpp"

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void apply_config_file(fk::RunConfig& rc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  const fk::json j = fk::json::parse(in);
  auto get = [&j](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("subcommand", rc.subcommand);
  get("family", rc.family);
  get("lambda", rc.lambda);
  get("p", rc.p);
  get("q", rc.q);
  get("eps", rc.eps);
  get("k", rc.k);
  get("r", rc.r);
  get("gamma", rc.gamma);
  get("sigma", rc.sigma);
  get("tol", rc.tol);
  get("starts", rc.starts);
  get("seed", rc.seed);
  get("mode", rc.mode);
  get("omega", rc.omega);
  get("out", rc.out);
  get("i1", rc.i1);
  get("i2", rc.i2);
  get("xi_minus", rc.xi_minus);
  get("xi_plus", rc.xi_plus);
  get("input", rc.input);
  get("search_bound", rc.search_bound);
}

}  // namespace

int main(int argc, char** argv) {
  fk::RunConfig rc;
  std::string config_path;

  CLI::App app{
      "Frenkel-Kontorova ground-state laboratory: periodic minimizers, "
      "Birkhoff order checks, gap/bump analysis, and the quantitative "
      "foliation-destruction pipeline with an exact certificate checker"};
  app.add_option("subcommand", rc.subcommand,
                 "one of: verify minimize gaps bump near-periodicity confine "
                 "select-params destroy-periodic destroy check-cert probe");
  app.add_option("--config", config_path, "JSON file mirroring the flags");
  app.add_option("--family", rc.family, "fk_nn | fk_nnn");
  app.add_option("--lambda", rc.lambda, "on-site kick strength");
  app.add_option("--p", rc.p, "period");
  app.add_option("--q", rc.q, "height");
  app.add_option("--eps", rc.eps, "perturbation budget");
  app.add_option("--k", rc.k, "smoothness order");
  app.add_option("--r", rc.r, "interaction range parameter");
  app.add_option("--gamma", rc.gamma, "approximation constant (rational)");
  app.add_option("--sigma", rc.sigma, "approximation exponent (rational)");
  app.add_option("--tol", rc.tol, "gradient tolerance");
  app.add_option("--starts", rc.starts, "multi-start count");
  app.add_option("--seed", rc.seed, "PRNG seed");
  app.add_option("--mode", rc.mode, "exact | relaxed:<factor>");
  app.add_option("--omega", rc.omega,
                 "golden | rational:a/b | quadratic:a,b,d | liouville:B");
  app.add_option("--out", rc.out, "artifact path (default stdout)");
  app.add_option("--i1", rc.i1, "window start");
  app.add_option("--i2", rc.i2, "window end");
  app.add_option("--xi-minus", rc.xi_minus, "bump support start");
  app.add_option("--xi-plus", rc.xi_plus, "bump support end");
  app.add_option("--input", rc.input, "input file (CSV config or cert JSON)");
  app.add_option("--search-bound", rc.search_bound,
                 "candidate denominator / truncation bound");

  // Config file values sit between defaults and explicit flags.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        apply_config_file(rc, argv[i + 1]);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (rc.subcommand.empty()) {
    std::cerr << app.help() << "\n";
    return 2;
  }

  try {
    fk::RunResult res = fk::run_config(rc);
    res.artifact["timestamp"] = now_iso8601();
    const std::string text = res.artifact.dump(2) + "\n";
    if (rc.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(rc.out);
      if (!f) throw std::runtime_error("cannot write " + rc.out);
      f << text;
    }
    return res.pass ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
