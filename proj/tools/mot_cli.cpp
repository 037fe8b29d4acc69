// mot: price bounds, hedges and marginals for discrete martingale transport.
//
//   mot check-order INSTANCE
//   mot solve INSTANCE [--bound upper|lower] [--method monotone|lp|both]
//   mot hedge INSTANCE
//   mot extract QUOTES
//   mot verify INSTANCE (--plan FILE | --hedge FILE)
//
// One JSON document on stdout; diagnostics on stderr. Exit 0 on success,
// 1 on a domain violation, 2 on unreadable or malformed input.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mot/cli.hpp"

int main(int argc, char** argv) {
  using namespace mot::cli;

  CLI::App app{"Martingale optimal transport with discrete marginals"};
  app.require_subcommand(1);

  std::string output = "pretty";
  bool debug_invariants = false;
  app.add_option("--output", output, "JSON layout")
      ->check(CLI::IsMember({"pretty", "compact"}))
      ->capture_default_str();
  app.add_flag("--debug-invariants", debug_invariants,
                "recheck convex order of the remaining measures after every step");

  std::string instance_path;
  std::string quotes_path;
  std::string plan_path;
  std::string hedge_path;
  std::string bound_name = "upper";
  std::string method_name = "monotone";

  auto* check_order_cmd = app.add_subcommand("check-order", "convex-order report for mu and nu");
  check_order_cmd->add_option("instance", instance_path, "instance JSON")->required();

  auto* solve_cmd = app.add_subcommand("solve", "upper or lower price bound");
  solve_cmd->add_option("instance", instance_path, "instance JSON")->required();
  solve_cmd->add_option("--bound", bound_name)
      ->check(CLI::IsMember({"upper", "lower"}))
      ->capture_default_str();
  solve_cmd->add_option("--method", method_name)
      ->check(CLI::IsMember({"monotone", "lp", "both"}))
      ->capture_default_str();

  auto* hedge_cmd = app.add_subcommand("hedge", "superhedge of the upper bound");
  hedge_cmd->add_option("instance", instance_path, "instance JSON")->required();

  auto* extract_cmd = app.add_subcommand("extract", "marginals implied by call quotes");
  extract_cmd->add_option("quotes", quotes_path, "quote JSON")->required();

  auto* verify_cmd = app.add_subcommand("verify", "check a plan or a hedge against an instance");
  verify_cmd->add_option("instance", instance_path, "instance JSON")->required();
  auto* target = verify_cmd->add_option_group("target", "what to verify");
  target->add_option("--plan", plan_path, "plan JSON");
  target->add_option("--hedge", hedge_path, "hedge JSON");
  target->require_option(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  CommandOptions options;
  options.debug_invariants = debug_invariants;

  CommandResult result;
  if (*check_order_cmd) {
    result = with_file(instance_path, [](const json& doc) { return check_order(doc); });
  } else if (*solve_cmd) {
    const Bound bound = bound_name == "upper" ? Bound::Upper : Bound::Lower;
    const Method method = method_name == "lp"     ? Method::Lp
                          : method_name == "both" ? Method::Both
                                                  : Method::Monotone;
    result = with_file(instance_path,
                       [&](const json& doc) { return solve(doc, bound, method, options); });
  } else if (*hedge_cmd) {
    result = with_file(instance_path, [&](const json& doc) { return hedge(doc, options); });
  } else if (*extract_cmd) {
    result = with_file(quotes_path, [](const json& doc) { return extract(doc); });
  } else if (*verify_cmd) {
    result = with_file(instance_path, [&](const json& instance) {
      if (!plan_path.empty()) {
        return with_file(plan_path, [&](const json& plan) { return verify_plan(instance, plan); });
      }
      return with_file(hedge_path,
                       [&](const json& hedge) { return verify_hedge_file(instance, hedge); });
    });
  }

  for (const auto& line : result.diagnostics) std::cerr << "mot: " << line << '\n';
  std::cout << (output == "compact" ? result.output.dump() : result.output.dump(2)) << '\n';
  return result.exit_code;
}
