
// cfm command-line front end.
//
// Exit codes: 0 success or pass, 1 verification or property failure,
// 2 input error, 3 solver precondition violation.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfm/error.h"
#include "cfm/general_solver.h"
#include "cfm/io.h"
#include "cfm/market.h"
#include "cfm/scheduling.h"
#include "cfm/verifier.h"

namespace cfm {
namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

std::vector<std::string> Split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    out.push_back(item);
  }
  return out;
}

Rational Number(const std::string& text) {
  auto q = ParseRational(text);
  if (!q) throw Error(ErrorCode::kSyntaxError, "not a rational: '" + text + "'");
  return *q;
}

std::vector<Rational> Numbers(const std::string& text) {
  std::vector<Rational> out;
  for (const std::string& s : Split(text, ',')) out.push_back(Number(s));
  return out;
}

std::vector<std::vector<Rational>> Rows(const std::string& text) {
  std::vector<std::vector<Rational>> out;
  for (const std::string& row : Split(text, ';')) out.push_back(Numbers(row));
  return out;
}

int Integer(const std::string& text) {
  Rational q = Number(text);
  if (q.get_den() != 1 || !q.get_num().fits_sint_p()) {
    throw Error(ErrorCode::kSyntaxError, "not an integer: '" + text + "'");
  }
  return static_cast<int>(q.get_num().get_si());
}

void Emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    WriteFile(path, text);
  }
}

std::string PriceCurve(const PriceVector& prices) {
  std::ostringstream out;
  out << "# slot price approx\n";
  for (size_t t = 0; t < prices.size(); ++t) {
    out << t + 1 << " " << ToString(prices[t]) << " " << ToDouble(prices[t])
        << "\n";
  }
  return out.str();
}

std::string SchedulingLog(const MarketInstance& instance,
                          const SchedulingEquilibrium& eq) {
  std::ostringstream out;
  for (size_t k = 0; k < eq.segments.size(); ++k) {
    const SchedulingSegment& seg = eq.segments[k];
    out << "[segment " << k + 1 << "]\nagents =";
    for (int i : seg.agents) out << " " << instance.agents[i].id;
    out << "\nlambda = " << ToString(seg.lambda) << "\nslots = "
        << seg.first_slot << ".." << seg.last_slot
        << "\nsteps = " << seg.search_steps << "\n";
  }
  return out.str();
}

struct SolveArgs {
  std::string instance;
  std::string out;
  std::string trace;
  std::string curve;
  bool general = false;
};

int RunSolve(const SolveArgs& args) {
  MarketInstance m = ParseInstance(ReadFile(args.instance));
  std::optional<SingleMachineView> view = AsSingleMachine(m);
  if (!args.curve.empty() && !view) {
    throw Error(ErrorCode::kNotSchedulingInstance, "price curve needs one machine");
  }
  Equilibrium eq;
  std::string trace;
  if (view && !args.general) {
    SchedulingEquilibrium s = SolveScheduling(
        {view->budgets, view->requirements}, view->spare_slots);
    eq = ToEquilibrium(s, m.num_agents());
    trace = SchedulingLog(m, s);
  } else {
    GeneralEquilibrium g = SolveGeneral(m);
    eq = ToEquilibrium(g);
    trace = WriteTrace(m, g.trace);
  }
  Emit(args.out, WriteEquilibrium(m, eq));
  if (!args.trace.empty()) WriteFile(args.trace, trace);
  if (!args.curve.empty()) Emit(args.curve == "-" ? "" : args.curve,
                                PriceCurve(eq.prices));
  return 0;
}

int RunVerify(const std::string& instance_path, const std::string& eq_path) {
  MarketInstance m = ParseInstance(ReadFile(instance_path));
  Equilibrium eq = ParseEquilibrium(ReadFile(eq_path), m);
  VerificationReport r = VerifyEquilibrium(m, eq.allocation, eq.prices);
  std::cout << r.ToText();
  return r.pass() ? 0 : kExitFail;
}

int RunCheckPrice(const std::string& instance_path, const std::string& prices) {
  MarketInstance m = ParseInstance(ReadFile(instance_path));
  PriceVerdict v = CheckPriceEquilibrium(m, Numbers(prices));
  if (v.equilibrium) {
    std::cout << "equilibrium\n";
    return 0;
  }
  std::cout << "not an equilibrium: " << v.reason << "\n";
  return kExitFail;
}

int RunProperties(const std::string& instance_path, const std::string& eq_path) {
  MarketInstance m = ParseInstance(ReadFile(instance_path));
  Equilibrium eq = ParseEquilibrium(ReadFile(eq_path), m);
  const std::pair<const char*, PropertyVerdict> checks[] = {
      {"pareto", CheckPareto(m, eq.allocation)},
      {"envy_free", CheckEnvyFree(m, eq.allocation, eq.prices)},
      {"sharing_incentive", CheckSharingIncentive(m, eq.allocation)},
      {"budget_exhaustion", CheckBudgetExhaustion(m, eq.allocation, eq.prices)},
  };
  bool all = true;
  for (const auto& [name, v] : checks) {
    std::cout << (v.pass ? "pass " : "FAIL ") << name;
    if (!v.witness.empty()) std::cout << " : " << v.witness;
    std::cout << "\n";
    all = all && v.pass;
  }
  return all ? 0 : kExitFail;
}

int RunTraceReplay(const std::string& instance_path,
                   const std::string& trace_path, const std::string& out) {
  MarketInstance m = ParseInstance(ReadFile(instance_path));
  const std::string text = ReadFile(trace_path);
  if (text.rfind("[segment", 0) == 0) {
    // Scheduling log: the closed-form run is deterministic, so replaying is
    // re-running and comparing.
    std::optional<SingleMachineView> view = AsSingleMachine(m);
    if (!view) throw Error(ErrorCode::kNotSchedulingInstance, m.name);
    SchedulingEquilibrium s =
        SolveScheduling({view->budgets, view->requirements}, view->spare_slots);
    if (SchedulingLog(m, s) != text) {
      throw Error(ErrorCode::kTraceMismatch, "segments differ from the log");
    }
    Emit(out, WriteEquilibrium(m, ToEquilibrium(s, m.num_agents())));
    return 0;
  }
  GeneralEquilibrium g = ReplayTrace(m, ParseTrace(text, m));
  Emit(out, WriteEquilibrium(m, ToEquilibrium(g)));
  return 0;
}

struct GenArgs {
  std::string budgets;
  std::string requirements;
  std::string delays;
  std::string allowed;
  std::string edges;
  std::string agents;
  std::string name;
  std::string out;
  int spare = 0;
};

MarketInstance GenSingleMachine(const GenArgs& a) {
  std::vector<int> req;
  for (const std::string& s : Split(a.requirements, ',')) req.push_back(Integer(s));
  return BuildSingleMachine(Numbers(a.budgets), req, a.spare);
}

MarketInstance GenMultiType(const GenArgs& a) {
  return BuildMultiType(Rows(a.delays), Rows(a.requirements), Numbers(a.budgets));
}

// --allowed: agents split by ';', types by '|', machines (1-based) by ','.
MarketInstance GenLaminar(const GenArgs& a) {
  std::vector<std::vector<std::vector<int>>> allowed;
  for (const std::string& agent : Split(a.allowed, ';')) {
    std::vector<std::vector<int>> per_type;
    for (const std::string& type : Split(agent, '|')) {
      std::vector<int> machines;
      for (const std::string& s : Split(type, ',')) {
        if (!s.empty()) machines.push_back(Integer(s) - 1);
      }
      per_type.push_back(machines);
    }
    allowed.push_back(per_type);
  }
  return BuildLaminar(Rows(a.delays), allowed, Rows(a.requirements),
                      Numbers(a.budgets));
}

// --edges "from,to,capacity,delay;..." --agents "source,sink,demand,budget;..."
MarketInstance GenFlow(const GenArgs& a) {
  std::vector<FlowEdge> edges;
  for (const std::string& e : Split(a.edges, ';')) {
    std::vector<std::string> f = Split(e, ',');
    if (f.size() != 4) throw Error(ErrorCode::kSyntaxError, "edge '" + e + "'");
    edges.push_back({f[0], f[1], Number(f[2]), Number(f[3])});
  }
  std::vector<FlowAgent> agents;
  for (const std::string& s : Split(a.agents, ';')) {
    std::vector<std::string> f = Split(s, ',');
    if (f.size() != 4) throw Error(ErrorCode::kSyntaxError, "agent '" + s + "'");
    agents.push_back({f[0], f[1], Number(f[2]), Number(f[3])});
  }
  return BuildFlowMarket(edges, agents);
}

int ExitCodeFor(const Error& e) {
  if (IsPreconditionViolation(e.code())) return kExitSolver;
  if (e.code() == ErrorCode::kTraceMismatch) return kExitFail;
  return kExitInput;
}

int Main(int argc, char** argv) {
  CLI::App app{"Exact market equilibria for delay-sensitive agents"};
  app.require_subcommand(1);

  SolveArgs solve;
  CLI::App* solve_cmd = app.add_subcommand("solve", "Compute an equilibrium");
  solve_cmd->add_option("instance", solve.instance)->required();
  solve_cmd->add_option("--out", solve.out, "Equilibrium file (default stdout)");
  solve_cmd->add_option("--trace", solve.trace, "Segment trace file");
  solve_cmd->add_option("--curve", solve.curve,
                        "Price curve table ('-' for stdout)");
  solve_cmd->add_flag("--general", solve.general,
                      "Use the general solver on one-machine inputs too");

  std::string instance, second, prices, out;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Check an equilibrium");
  verify_cmd->add_option("instance", instance)->required();
  verify_cmd->add_option("equilibrium", second)->required();

  CLI::App* price_cmd =
      app.add_subcommand("check-price", "Is a price vector an equilibrium");
  price_cmd->add_option("instance", instance)->required();
  price_cmd->add_option("--prices", prices, "Comma-separated rationals")
      ->required();

  CLI::App* props_cmd =
      app.add_subcommand("properties", "Fairness and budget properties");
  props_cmd->add_option("instance", instance)->required();
  props_cmd->add_option("equilibrium", second)->required();

  CLI::App* replay_cmd =
      app.add_subcommand("trace-replay", "Rebuild an equilibrium from a trace");
  replay_cmd->add_option("instance", instance)->required();
  replay_cmd->add_option("trace", second)->required();
  replay_cmd->add_option("--out", out);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Write an instance file");
  gen_cmd->require_subcommand(1);
  auto common = [&](CLI::App* c) {
    c->add_option("--name", gen.name);
    c->add_option("--out", gen.out);
  };
  CLI::App* gen_single = gen_cmd->add_subcommand("single-machine");
  gen_single->add_option("--budgets", gen.budgets)->required();
  gen_single->add_option("--requirements", gen.requirements)->required();
  gen_single->add_option("--spare", gen.spare);
  common(gen_single);
  CLI::App* gen_multi = gen_cmd->add_subcommand("multi-type");
  gen_multi->add_option("--delays", gen.delays, "Per type, ';' separated")
      ->required();
  gen_multi->add_option("--requirements", gen.requirements,
                        "Per agent, ';' separated")
      ->required();
  gen_multi->add_option("--budgets", gen.budgets)->required();
  common(gen_multi);
  CLI::App* gen_lam = gen_cmd->add_subcommand("laminar");
  gen_lam->add_option("--delays", gen.delays)->required();
  gen_lam->add_option("--allowed", gen.allowed)->required();
  gen_lam->add_option("--requirements", gen.requirements)->required();
  gen_lam->add_option("--budgets", gen.budgets)->required();
  common(gen_lam);
  CLI::App* gen_flow = gen_cmd->add_subcommand("flow");
  gen_flow->add_option("--edges", gen.edges)->required();
  gen_flow->add_option("--agents", gen.agents)->required();
  common(gen_flow);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*solve_cmd) return RunSolve(solve);
    if (*verify_cmd) return RunVerify(instance, second);
    if (*price_cmd) return RunCheckPrice(instance, prices);
    if (*props_cmd) return RunProperties(instance, second);
    if (*replay_cmd) return RunTraceReplay(instance, second, out);
    MarketInstance m;
    if (*gen_single) {
      m = GenSingleMachine(gen);
    } else if (*gen_multi) {
      m = GenMultiType(gen);
    } else if (*gen_lam) {
      m = GenLaminar(gen);
    } else {
      m = GenFlow(gen);
    }
    if (!gen.name.empty()) m.name = gen.name;
    Emit(gen.out, WriteInstance(m));
    return 0;
  } catch (const Error& e) {
    std::cerr << "cfm: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
}

}  // namespace
}  // namespace cfm

int main(int argc, char** argv) { return cfm::Main(argc, argv); }
