// lamfam: command-line driver for the theta-family / triple-product toolkit.
//
//   lamfam <verb> --config PATH [--out DIR] [--precision N] [--qcap Q] [--threads T]
//
// Exit codes: 0 ok, 2 validation, 3 parse, 4 numeric. Payload files go to
// --out; the run log goes to <out>/lamfam.log and never into a payload.

#include <iostream>
#include <memory>

#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "lamfam/io/commands.hpp"

namespace {

using namespace lamfam;
using namespace lamfam::io;

using Command = Outputs (*)(const Session&);

int run(const std::string& verb, Command cmd, const fs::path& config, const fs::path& out, const Overrides& ov,
        bool use_cache) {
  fs::create_directories(out);
  auto log = spdlog::basic_logger_mt("lamfam", (out / "lamfam.log").string(), true);
  log->set_level(spdlog::level::info);
  log->info("verb={} config={}", verb, config.string());
  try {
    PipelineConfig cfg = load_config(config, ov);
    log->info("p={} N={} Q={} threads={}", cfg.p, cfg.N, cfg.Q, cfg.threads);
    Session s(std::move(cfg), use_cache ? std::optional<fs::path>(out / "cache") : std::nullopt);
    log->info("standing hypotheses validated");
    const Outputs o = cmd(s);
    write_outputs(o, out);
    for (const auto& [name, content] : o.files) log->info("wrote {} ({} bytes)", name, content.size());
    if (!o.ok) {
      log->error("self-check failed");
      std::cerr << "lamfam " << verb << ": check failed; see " << (out / (verb + ".json")).string() << "\n";
      return 4;
    }
    return 0;
  } catch (const ValidationError& e) {
    log->error("{}", e.what());
    std::cerr << "lamfam " << verb << ": validation: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    log->error("{}", e.what());
    std::cerr << "lamfam " << verb << ": parse: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    log->error("{}", e.what());
    std::cerr << "lamfam " << verb << ": numeric: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Theta families, triple-product pipeline, Euler factors and Tate curves"};
  app.require_subcommand(1);
  fs::path config, out = "out";
  std::optional<int> precision, qcap, threads;
  const std::vector<std::pair<std::string, Command>> verbs{
      {"theta", cmd_theta},   {"family", cmd_family}, {"ordproj", cmd_ordproj},     {"triple", cmd_triple},
      {"euler", cmd_euler},   {"tate", cmd_tate},     {"selfcheck", cmd_selfcheck}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, cmd] : verbs) {
    auto* sub = app.add_subcommand(name, "run the " + name + " command");
    sub->add_option("--config", config, "pipeline configuration (TOML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--precision", precision, "p-adic precision N (overrides the config)");
    sub->add_option("--qcap", qcap, "q-expansion cap Q (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }
  for (std::size_t i = 0; i < verbs.size(); ++i)
    if (subs[i]->parsed()) return run(verbs[i].first, verbs[i].second, config, out, {precision, qcap, threads}, verbs[i].first == "theta");
  return 3;
}
