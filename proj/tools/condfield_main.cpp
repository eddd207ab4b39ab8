#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "condfield/cli.hpp"
#include "condfield/report_io.hpp"

namespace {

struct CommonArgs {
  std::string model_path;
  condfield::RunConfig cfg;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--model", args.model_path, "model file (JSON)")->required();
  cmd->add_option("--tolerance-eq", args.cfg.tol_eq, "identity-check tolerance");
  cmd->add_option("--tolerance-norm", args.cfg.tol_norm, "normalization tolerance");
  cmd->add_option("--budget", args.cfg.budget, "work budget before sampling");
  cmd->add_option("--seed", args.cfg.seed, "session seed");
  cmd->add_option("--format", args.cfg.format, "report format")
      ->check(CLI::IsMember({"text", "json"}));
  cmd->add_option("--out", args.cfg.out_path, "report path (stdout when absent)");
}

int dispatch(const std::string& command, const CommonArgs& args, const std::string& selector,
             const std::string& dump_path) {
  const condfield::ModelFile model = condfield::ModelFile::load(args.model_path);

  std::ofstream file_out;
  std::ostream* os = &std::cout;
  if (!args.cfg.out_path.empty()) {
    file_out.open(args.cfg.out_path);
    if (!file_out) {
      std::cerr << "error: cannot open output path " << args.cfg.out_path << '\n';
      return condfield::kExitParseError;
    }
    os = &file_out;
  }

  if (command == "validate") {
    return condfield::cmd_validate(model, selector, args.cfg, *os, dump_path);
  }
  if (command == "reconstruct") {
    return condfield::cmd_reconstruct(model, selector, args.cfg, *os);
  }
  if (command == "lift") {
    return condfield::cmd_lift(model, selector, args.cfg, *os);
  }
  return condfield::cmd_analyze(model, selector, args.cfg, *os);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-window conditional-distribution systems toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string system = "all";
  std::string via = "f";
  std::string route = "1f_product";
  std::string what = "markov";
  std::string dump_path;

  CLI::App* validate = app.add_subcommand("validate", "derive systems and run every checker");
  add_common(validate, args);
  validate->add_option("--system", system, "which system to validate")
      ->check(CLI::IsMember({"f", "1f", "palm", "d", "1d", "all"}));
  validate->add_option("--dump-system", dump_path, "write the derived tables to this path");

  CLI::App* reconstruct = app.add_subcommand("reconstruct", "field -> system -> field round trip");
  add_common(reconstruct, args);
  reconstruct->add_option("--via", via, "system to reconstruct through")
      ->check(CLI::IsMember({"f", "1f", "palm"}));

  CLI::App* lift = app.add_subcommand("lift", "lift a smaller system to a full f-system");
  add_common(lift, args);
  lift->add_option("--route", route, "lift route")
      ->check(CLI::IsMember({"1f_product", "1f_ratio", "palm"}));

  CLI::App* analyze = app.add_subcommand("analyze", "markov / mixing / dobrushin / sullivan");
  add_common(analyze, args);
  analyze->add_option("--what", what, "diagnostic to run")
      ->check(CLI::IsMember({"markov", "mixing", "dobrushin", "sullivan"}));

  CLI11_PARSE(app, argc, argv);

  if (const char* env = std::getenv("CONDFIELD_BUDGET")) {
    args.cfg.budget = std::strtoull(env, nullptr, 10);
  }
  if (!(args.cfg.tol_eq > 0.0) || !(args.cfg.tol_norm > 0.0) || args.cfg.budget < 1) {
    std::cerr << "error: tolerances must be positive and the budget at least 1\n";
    return condfield::kExitParseError;
  }

  try {
    if (validate->parsed()) return dispatch("validate", args, system, dump_path);
    if (reconstruct->parsed()) return dispatch("reconstruct", args, via, "");
    if (lift->parsed()) return dispatch("lift", args, route, "");
    return dispatch("analyze", args, what, "");
  } catch (const condfield::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return condfield::kExitParseError;
  } catch (const condfield::ResourceError& e) {
    std::cerr << "budget error: " << e.what() << '\n';
    return condfield::kExitBudgetError;
  } catch (const condfield::DomainError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return condfield::kExitParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return condfield::kExitCheckFailed;
  }
}
