// refinet: command-line front end for the refinement library.
//
// Exit status: 0 success or verified, 1 verification failure, 2 malformed input.

#include "refinet/appendix_b.hpp"
#include "refinet/divergence.hpp"
#include "refinet/equilibrium.hpp"
#include "refinet/flow.hpp"
#include "refinet/io.hpp"
#include "refinet/lp_reference.hpp"
#include "refinet/maximin.hpp"
#include "refinet/pairing.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

using nlohmann::json;
using namespace refinet;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kMalformed = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("REFINET_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw io::InputError(std::string("REFINET_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw io::InputError(path + ": cannot write file");
  out << j.dump(2) << "\n";
}

json certificate_json(const LomCertificate& cert) {
  json levels = json::array();
  for (const auto& l : cert.levels) {
    levels.push_back({{"t", to_string(l.level)},
                      {"truncated_mass", to_string(l.truncated)},
                      {"fit", to_string(l.fit)},
                      {"midpoint", l.midpoint}});
  }
  json failures = json::array();
  for (const auto& t : cert.failures) failures.push_back(to_string(t));
  return {{"verdict", cert.verdict},
          {"first_failure", cert.first_failure ? json(to_string(*cert.first_failure)) : json(nullptr)},
          {"failures", failures},
          {"levels", levels}};
}

json walras_json(const WalrasReport& r) {
  return {{"ok", r.ok()},
          {"feasible", r.feasible},
          {"budget", r.budget},
          {"optimal", r.optimal},
          {"price_valid", r.price_valid},
          {"failures", r.failures}};
}

json structure_json(const StructureReport& r) {
  return {{"ok", r.ok()},
          {"positive_price", r.positive_price},
          {"fallback_singular", r.fallback_singular},
          {"reciprocal", r.reciprocal},
          {"failures", r.failures}};
}

FallbackPolicy parse_policy(const std::string& s) {
  if (s == "uniform") return FallbackPolicy::Uniform;
  if (s == "lowest") return FallbackPolicy::LowestIndex;
  throw io::InputError("unknown fallback policy '" + s + "' (expected uniform or lowest)");
}

Integrand parse_integrand(const std::string& s) {
  try {
    return integrand_by_name(s);
  } catch (const std::invalid_argument& e) {
    throw io::InputError(e.what());
  }
}

struct Paths {
  std::string instance;
  std::string plan;
  std::string plan1;
  std::string allocation;
  std::string out;
  std::string out1;
};

int cmd_solve(const Paths& p, int side, const std::string& placement) {
  InstancePtr inst = io::parse_instance(io::load_file(p.instance));
  LomOptions options;
  if (placement == "uniform") {
    options.placement = SingularPlacement::Uniform;
  } else if (placement != "lowest") {
    throw io::InputError("unknown placement '" + placement + "' (expected lowest or uniform)");
  }
  Plan plan = solve_lom(inst, side, options);
  json plan_json = io::plan_to_json(plan);
  if (!p.out.empty()) write_json(p.out, plan_json);
  emit({{"plan", plan_json}, {"certificate", certificate_json(verify_lom(plan))}});
  return kOk;
}

int cmd_verify(const Paths& p) {
  InstancePtr inst = io::parse_instance(io::load_file(p.instance));
  Plan plan = io::parse_plan(io::load_file(p.plan), inst);
  if (!is_refinement(plan)) {
    emit({{"refinement", false}, {"verdict", false}});
    return kFailed;
  }
  LomCertificate cert = verify_lom(plan);
  json report = certificate_json(cert);
  report["refinement"] = true;
  emit(report);
  return cert.verdict ? kOk : kFailed;
}

int cmd_pair(const Paths& p, int side, const std::string& theta_name, int competitors) {
  InstancePtr inst = io::parse_instance(io::load_file(p.instance));
  Integrand theta = parse_integrand(theta_name);
  ClosestPair pair = solve_closest_pair(inst, side, theta);
  if (!p.out.empty()) write_json(p.out, io::plan_to_json(pair.first));
  if (!p.out1.empty()) write_json(p.out1, io::plan_to_json(pair.second));
  PairReport report = universal_audit(pair, competitors, default_gamma_grid(pair.first, pair.second), default_seed());
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"gamma", to_string(r.gamma)},
                    {"pair", to_string(r.pair_value)},
                    {"best_competitor", r.best_competitor ? json(to_string(*r.best_competitor)) : json(nullptr)}});
  }
  emit({{"first", io::plan_to_json(pair.first)},
        {"second", io::plan_to_json(pair.second)},
        {"theta", theta.name},
        {"paired_divergence", paired_divergence(pair.first, pair.second, theta).to_string()},
        {"audit",
         {{"verdict", report.verdict},
          {"overflow_dominance", report.overflow_dominance},
          {"competitors", report.competitors},
          {"gamma", rows},
          {"violations", report.violations}}}});
  return report.verdict ? kOk : kFailed;
}

int cmd_profiles(const Paths& p, bool csv) {
  InstancePtr inst = io::parse_instance(io::load_file(p.instance));
  Plan plan = io::parse_plan(io::load_file(p.plan), inst);
  if (!is_refinement(plan)) throw io::InputError(p.plan + ": plan is not a refinement of the instance");
  LomCertificate cert = verify_lom(plan);
  Rational total = plan.total();
  if (csv) {
    std::cout << "t,over,fit,truncated_mass\n";
    for (const auto& l : cert.levels) {
      std::cout << to_string(l.level) << "," << to_string(total - l.truncated) << "," << to_string(l.fit) << ","
                << to_string(l.truncated) << "\n";
    }
    return kOk;
  }
  json rows = json::array();
  for (const auto& l : cert.levels) {
    rows.push_back({{"t", to_string(l.level)},
                    {"over", to_string(total - l.truncated)},
                    {"fit", to_string(l.fit)},
                    {"truncated_mass", to_string(l.truncated)}});
  }
  emit({{"rows", rows}});
  return kOk;
}

Equilibrium equilibrium_input(const Paths& p, const InstancePtr& inst) {
  if (!p.allocation.empty()) return io::parse_equilibrium(io::load_file(p.allocation), inst);
  if (p.plan.empty() || p.plan1.empty()) throw io::InputError("need plan0 and plan1, or --allocation");
  Plan pi0 = io::parse_plan(io::load_file(p.plan), inst);
  Plan pi1 = io::parse_plan(io::load_file(p.plan1), inst);
  if (pi0.source_side() != 0 || pi1.source_side() != 1) {
    throw io::InputError("plan0 must be a refinement from side 0 and plan1 from side 1");
  }
  if (!is_refinement(pi0) || !is_refinement(pi1)) throw io::InputError("plans must be refinements of the instance");
  if (!verify_lom(pi0).verdict || !verify_lom(pi1).verdict) {
    throw std::domain_error("plans are not both level-optimal maximin");
  }
  return build_equilibrium(pi0, pi1);
}

int cmd_equilibrium(const std::string& action, const Paths& p, const std::string& policy) {
  InstancePtr inst = io::parse_instance(io::load_file(p.instance));
  Equilibrium eq;
  try {
    eq = equilibrium_input(p, inst);
  } catch (const std::domain_error& e) {
    emit({{"ok", false}, {"error", e.what()}});
    return kFailed;
  }
  if (action == "build") {
    json out = io::equilibrium_to_json(eq);
    if (!p.out.empty()) write_json(p.out, out);
    out["walras"] = walras_json(verify_walras(eq.allocation, eq.price));
    emit(out);
    return kOk;
  }
  WalrasReport walras = verify_walras(eq.allocation, eq.price);
  if (action == "check") {
    json out = walras_json(walras);
    if (walras.ok()) out["structure"] = structure_json(structure_audit(eq.allocation, eq.price));
    emit(out);
    return walras.ok() ? kOk : kFailed;
  }
  if (!walras.feasible) {
    emit({{"ok", false}, {"walras", walras_json(walras)}});
    return kFailed;
  }
  ExtractedPair pair = extract_pair(eq.allocation, parse_policy(policy));
  LomCertificate c0 = verify_lom(pair.pi0);
  LomCertificate c1 = verify_lom(pair.pi1);
  bool ok = c0.verdict && c1.verdict;
  emit({{"ok", ok},
        {"plan0", io::plan_to_json(pair.pi0)},
        {"plan1", io::plan_to_json(pair.pi1)},
        {"fallback0", io::plan_to_json(pair.fallback0)},
        {"fallback1", io::plan_to_json(pair.fallback1)},
        {"lom0", c0.verdict},
        {"lom1", c1.verdict},
        {"walras", walras_json(walras)}});
  return ok ? kOk : kFailed;
}

double rounded(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return std::stod(buf);
}

int cmd_appendix_b(const std::vector<std::string>& epsilons, int quad, int grid, const std::string& relation) {
  json rows = json::array();
  for (const auto& e : epsilons) {
    Rational eps;
    try {
      eps = parse_rational(e);
      double v = appendix_b_value(eps, quad);
      rows.push_back({{"epsilon", to_string(eps)},
                      {"quad_points", quad},
                      {"value", rounded(v)},
                      {"closed_form", to_string(1 + Rational(7) * eps / 6)}});
    } catch (const std::invalid_argument& ex) {
      throw io::InputError(std::string("--epsilon ") + e + ": " + ex.what());
    }
  }
  if (grid > 0) {
    GridRelation rel;
    if (relation == "closed") {
      rel = GridRelation::Closed;
    } else if (relation == "open") {
      rel = GridRelation::Open;
    } else {
      throw io::InputError("--relation must be open or closed");
    }
    if (grid < 4) throw io::InputError("--grid needs n >= 4");
    GridResult r = discretized_infimum(grid, rel);
    rows.push_back({{"grid", grid}, {"relation", relation}, {"value", r.value}, {"iterations", r.iterations}});
  }
  if (rows.empty()) throw io::InputError("give --epsilon or --grid");
  emit({{"rows", rows}});
  return kOk;
}

int cmd_oracle(const Paths& p, const std::string& compare, std::uint64_t seed, int samples) {
  InstancePtr inst = io::parse_instance(io::load_file(p.instance));
  json rows = json::array();
  bool pass = true;
  if (compare == "fit") {
    std::mt19937_64 rng(seed);
    for (int side = 0; side < 2; ++side) {
      std::set<Rational> levels{Rational(0)};
      for (const auto& t : fit_breakpoints(inst, side).breakpoints()) levels.insert(t);
      for (int k = 0; k < samples; ++k) levels.insert(Rational(static_cast<long>(rng() % 64)) / Rational(static_cast<long>(1 + rng() % 16)));
      for (const auto& t : levels) {
        if (inst->edges().size() > 64) break;
        Rational a = fit(inst, side, t);
        Rational b = lp_fit(inst, side, t);
        pass = pass && a == b;
        rows.push_back({{"side", side}, {"t", to_string(t)}, {"flow", to_string(a)}, {"lp", to_string(b)}, {"match", a == b}});
      }
    }
  } else if (compare == "divergence") {
    for (int side = 0; side < 2; ++side) {
      Plan lom = solve_lom(inst, side);
      Measure nu = inst->reference(1 - side);
      for (const char* name : {"exp_neg", "square", "xlogx", "chi2"}) {
        Integrand theta = integrand_by_name(name);
        double exact = f_divergence(payload(lom), nu, theta).to_double();
        OracleResult r = min_divergence_oracle(inst, side, theta, 1e-12);
        bool ok = r.value >= exact - 1e-6 || (std::isinf(r.value) && std::isinf(exact));
        pass = pass && ok;
        rows.push_back({{"side", side},
                        {"theta", name},
                        {"lom", exact},
                        {"oracle", r.value},
                        {"iterations", r.iterations},
                        {"consistent", ok}});
      }
    }
  } else {
    throw io::InputError("--compare must be fit or divergence");
  }
  emit({{"compare", compare}, {"seed", seed}, {"pass", pass}, {"rows", rows}});
  return pass ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closest refinements on weighted bipartite relations"};
  app.require_subcommand(1);
  Paths paths;
  int side = 0;

  auto* solve = app.add_subcommand("solve", "Compute a level-optimal maximin refinement");
  std::string placement = "lowest";
  solve->add_option("instance", paths.instance, "Instance JSON")->required();
  solve->add_option("--side", side, "Source side")->check(CLI::Range(0, 1));
  solve->add_option("--out", paths.out, "Write the plan here");
  solve->add_option("--placement", placement, "Singular placement: lowest or uniform");

  auto* verify = app.add_subcommand("verify", "Certify a plan as level-optimal maximin");
  verify->add_option("instance", paths.instance, "Instance JSON")->required();
  verify->add_option("plan", paths.plan, "Plan JSON")->required();

  auto* pair = app.add_subcommand("pair", "Closest refinement pair and its universal audit");
  std::string theta = "square";
  int competitors = 50;
  pair->add_option("instance", paths.instance, "Instance JSON")->required();
  pair->add_option("--side", side, "Source side of the first plan")->check(CLI::Range(0, 1));
  pair->add_option("--theta", theta, "Integrand: hs:<g>, square, exp_neg, xlogx, abs, chi2, linear:<a>:<b>");
  pair->add_option("--out0", paths.out, "Write the first plan here");
  pair->add_option("--out1", paths.out1, "Write the second plan here");
  pair->add_option("--competitors", competitors, "Random competitor draws")->check(CLI::NonNegativeNumber);

  auto* profiles = app.add_subcommand("profiles", "Overflow, Fit and truncated mass at all breakpoints");
  bool csv = false;
  profiles->add_option("instance", paths.instance, "Instance JSON")->required();
  profiles->add_option("plan", paths.plan, "Plan JSON")->required();
  profiles->add_flag("--csv", csv, "CSV instead of JSON");

  auto* equilibrium = app.add_subcommand("equilibrium", "Allocation-price pairs");
  std::string action;
  std::string policy = "uniform";
  equilibrium->add_option("action", action, "build, check or extract")->required()->check(CLI::IsMember({"build", "check", "extract"}));
  equilibrium->add_option("instance", paths.instance, "Instance JSON")->required();
  equilibrium->add_option("plan0", paths.plan, "Refinement from side 0");
  equilibrium->add_option("plan1", paths.plan1, "Refinement from side 1");
  equilibrium->add_option("--allocation", paths.allocation, "Allocation-price JSON (instead of building one)");
  equilibrium->add_option("--out", paths.out, "Write the built allocation-price JSON here");
  equilibrium->add_option("--fallback", policy, "Fallback kernel for extract: uniform or lowest");

  auto* appendix = app.add_subcommand("appendix-b", "Attainment-failure example values");
  std::vector<std::string> epsilons;
  int quad = 4096;
  int grid = 0;
  std::string relation = "open";
  appendix->add_option("--epsilon", epsilons, "Strip half-width in (0, 1/2)");
  appendix->add_option("--quad", quad, "Quadrature points");
  appendix->add_option("--grid", grid, "Grid size n");
  appendix->add_option("--relation", relation, "open or closed");

  auto* oracle = app.add_subcommand("oracle", "Compare library results against reference oracles");
  std::string compare = "fit";
  std::uint64_t seed = 0;
  int samples = 20;
  oracle->add_option("instance", paths.instance, "Instance JSON")->required();
  auto* seed_opt = oracle->add_option("--seed", seed, "Random seed (default REFINET_SEED or 0)");
  oracle->add_option("--compare", compare, "fit or divergence");
  oracle->add_option("--samples", samples, "Random levels per side")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kMalformed;
  }

  try {
    if (*solve) return cmd_solve(paths, side, placement);
    if (*verify) return cmd_verify(paths);
    if (*pair) return cmd_pair(paths, side, theta, competitors);
    if (*profiles) return cmd_profiles(paths, csv);
    if (*equilibrium) return cmd_equilibrium(action, paths, policy);
    if (*appendix) return cmd_appendix_b(epsilons, quad, grid, relation);
    if (*oracle) return cmd_oracle(paths, compare, seed_opt->count() ? seed : default_seed(), samples);
  } catch (const io::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kMalformed;
}
