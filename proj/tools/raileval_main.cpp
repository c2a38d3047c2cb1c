// Batch scoring CLI: loads a ground-truth and a prediction document,
// runs the challenge's metric suite and emits a deterministic report.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "raileval/report.hpp"
#include "raileval/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

int run(const std::string& challenge_name, const std::string& gt_path,
        const std::string& pred_path, const std::optional<std::string>& config_path,
        const std::optional<std::string>& out_path, const std::string& format, int threads) {
  const auto challenge = raileval::io::parse_challenge(challenge_name);
  if (!challenge) {
    std::cerr << "error: unknown challenge '" << challenge_name
              << "' (expected rail, object or vegetation)\n";
    return kExitInputError;
  }

  raileval::report::EvalReport report;
  try {
    report = raileval::report::run_eval(*challenge, gt_path, pred_path, config_path, threads);
  } catch (const raileval::io::SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }

  std::string document;
  if (format == "machine") {
    document = raileval::report::render_machine(report).dump(2);
    document += "\n";
  } else {
    document = raileval::report::render_table(report);
  }

  if (out_path) {
    // Full document is assembled first; a failed run leaves no file.
    std::ofstream out(*out_path, std::ios::trunc | std::ios::binary);
    if (!out) {
      std::cerr << "input error: cannot open '" << *out_path << "' for writing\n";
      return kExitInputError;
    }
    out << document;
  } else {
    std::cout << document;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"raileval - railway perception benchmark scoring"};
  app.set_version_flag("--version", std::string("raileval ") + raileval::kVersion);
  app.require_subcommand(1);

  auto* eval = app.add_subcommand("eval", "score a prediction document against ground truth");
  std::string challenge;
  std::string gt_path;
  std::string pred_path;
  std::optional<std::string> config_path;
  std::optional<std::string> out_path;
  std::string format = "table";
  int threads = 0;
  eval->add_option("challenge", challenge, "challenge: rail, object or vegetation")->required();
  eval->add_option("--gt", gt_path, "ground-truth document")->required();
  eval->add_option("--pred", pred_path, "prediction document")->required();
  eval->add_option("--config", config_path, "JSON config overriding metric defaults");
  eval->add_option("--out", out_path, "write the report here instead of stdout");
  eval->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"table", "machine"}));
  eval->add_option("--threads", threads, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  return run(challenge, gt_path, pred_path, config_path, out_path, format, threads);
}
