#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bfoml/corpus.hpp"
#include "bfoml/errors.hpp"
#include "bfoml/fo.hpp"
#include "bfoml/kripke.hpp"
#include "bfoml/oracle.hpp"
#include "bfoml/parser.hpp"
#include "bfoml/tableau.hpp"
#include "bfoml/transform.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 SAT/true/witness, 1 UNSAT/false, 2 parse/validation/fragment
// error, 3 search bounds exhausted.
constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitError = 2;
constexpr int kExitBounds = 3;

bool g_json = false;

void emit(const json& j, const std::string& text) {
  if (g_json)
    std::cout << j.dump() << "\n";
  else
    std::cout << text << "\n";
}

int fail(const std::string& msg) {
  if (g_json)
    std::cout << json{{"error", msg}}.dump() << "\n";
  else
    std::cerr << "error: " << msg << "\n";
  return kExitError;
}

// Arguments starting with '@' name a file holding the input.
std::string read_input(const std::string& s) {
  if (s.empty() || s[0] != '@') return s;
  std::ifstream in(s.substr(1), std::ios::binary);
  if (!in) throw bfoml::ParseError("cannot read file: " + s.substr(1), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json valuation_json(const bfoml::Valuation& sigma) {
  json v = json::object();
  for (const auto& [var, elem] : sigma) v[var.name] = elem;
  return v;
}

json witness_json(const bfoml::KripkeModel& m, bfoml::DomainPolicy policy,
                  const std::string& world, const bfoml::Valuation& sigma) {
  return json{{"status", "SAT"},
              {"model", bfoml::model_to_json(m, policy)},
              {"world", world},
              {"valuation", valuation_json(sigma)}};
}

std::string witness_text(const bfoml::KripkeModel& m, bfoml::DomainPolicy policy,
                         const std::string& world, const bfoml::Valuation& sigma) {
  std::string out = "SAT\nmodel: " + bfoml::model_to_json(m, policy).dump() +
                    "\nworld: " + world + "\nvaluation:";
  for (const auto& [var, elem] : sigma) out += " " + var.name + "=" + elem;
  return out;
}

int cmd_sat(const std::string& input, bool trace) {
  bfoml::FormulaPtr theta = bfoml::parse(read_input(input));
  bfoml::SolveOptions opts;
  opts.trace = trace;
  bfoml::SatResult res = bfoml::solve(theta, opts);
  if (!res.sat()) {
    emit(json{{"status", "UNSAT"}}, "UNSAT");
    return kExitUnsat;
  }
  const bfoml::SatWitness& w = *res.witness;
  emit(witness_json(w.model, bfoml::DomainPolicy::Increasing, w.root, w.sigma),
       witness_text(w.model, bfoml::DomainPolicy::Increasing, w.root, w.sigma));
  return kExitSat;
}

int cmd_mc(const std::string& model_path, const std::string& world,
           const std::vector<std::string>& assigns, const std::string& formula_text) {
  std::ifstream in(model_path, std::ios::binary);
  if (!in) throw bfoml::ModelError("cannot read model file: " + model_path);
  std::stringstream ss;
  ss << in.rdbuf();
  json mj;
  try {
    mj = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw bfoml::ModelError(std::string("invalid model JSON: ") + e.what());
  }
  auto [model, policy] = bfoml::model_from_json(mj);
  if (auto err = bfoml::validate(model, policy)) throw bfoml::ModelError(*err);

  bfoml::Valuation sigma;
  for (const auto& a : assigns) {
    auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0)
      throw bfoml::EvalError("bad --assign, expected name=element: " + a);
    sigma[bfoml::Variable(a.substr(0, eq))] = a.substr(eq + 1);
  }
  bfoml::FormulaPtr f = bfoml::parse(read_input(formula_text));
  bool r = bfoml::evaluate(model, world, sigma, *f);
  emit(json{{"result", r}}, r ? "true" : "false");
  return r ? kExitSat : kExitUnsat;
}

int cmd_oracle(const std::string& input, std::size_t max_worlds, std::size_t max_domain,
               bfoml::DomainPolicy policy) {
  bfoml::FormulaPtr f = bfoml::parse(read_input(input));
  auto w = bfoml::bounded_sat(f, max_worlds, max_domain, policy);
  if (!w) {
    emit(json{{"status", "NO_MODEL_WITHIN_BOUNDS"},
              {"max_worlds", max_worlds},
              {"max_domain", max_domain}},
         "no model within bounds");
    return kExitBounds;
  }
  emit(witness_json(w->model, policy, w->world, w->sigma),
       witness_text(w->model, policy, w->world, w->sigma));
  return kExitSat;
}

int cmd_translate(const std::string& input, const std::string& target) {
  bfoml::FOSentence alpha = bfoml::parse_fo(read_input(input));
  bfoml::ReductionTarget t = target == "forall-box" ? bfoml::ReductionTarget::ForallBox
                                                    : bfoml::ReductionTarget::BoxExists2;
  bfoml::FormulaPtr f = bfoml::translate(alpha, t);
  std::string rendered = bfoml::render(f);
  std::size_t depth = bfoml::modal_depth(*f);
  std::string cls = bfoml::to_string(bfoml::classify(f));
  emit(json{{"alpha", bfoml::render_fo(alpha)},
            {"target", target},
            {"formula", rendered},
            {"modal_depth", depth},
            {"classification", cls}},
       rendered + "\nmodal depth: " + std::to_string(depth) + "\nclassification: " + cls);
  return kExitSat;
}

int cmd_pnf(const std::string& input) {
  std::string out = bfoml::render(bfoml::to_pnf(bfoml::parse(read_input(input))));
  emit(json{{"formula", out}}, out);
  return kExitSat;
}

int cmd_clean(const std::string& input) {
  std::string out = bfoml::render(bfoml::make_clean(bfoml::parse(read_input(input))));
  emit(json{{"formula", out}}, out);
  return kExitSat;
}

int cmd_classify(const std::string& input) {
  std::string out = bfoml::to_string(bfoml::classify(bfoml::parse(read_input(input))));
  emit(json{{"classification", out}}, out);
  return kExitSat;
}

int cmd_corpus(const std::string& profile_name, std::uint64_t seed, std::size_t count) {
  bfoml::CorpusProfile prof = profile_name == "tableau" ? bfoml::CorpusProfile::tableau()
                                                        : bfoml::CorpusProfile::preservation();
  auto formulas = bfoml::generate_corpus(prof, seed, count);
  if (g_json) {
    json arr = json::array();
    for (const auto& f : formulas) arr.push_back(bfoml::render(f));
    std::cout << json{{"profile", profile_name}, {"seed", seed}, {"count", count},
                      {"formulas", arr}}
                     .dump()
              << "\n";
  } else {
    for (const auto& f : formulas) std::cout << bfoml::render(f) << "\n";
  }
  return kExitSat;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const bfoml::ParseError& e) {
    return fail(e.what());
  } catch (const bfoml::FragmentError& e) {
    return fail(e.what());
  } catch (const bfoml::CaptureError& e) {
    return fail(e.what());
  } catch (const bfoml::ModelError& e) {
    return fail(e.what());
  } catch (const bfoml::EvalError& e) {
    return fail(e.what());
  } catch (const std::invalid_argument& e) {
    return fail(e.what());
  } catch (const std::exception& e) {
    return fail(std::string("internal error: ") + e.what());
  }
}

bool argv_wants_json(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--format=json") return true;
    if (a == "--format" && i + 1 < argc && std::string(argv[i + 1]) == "json") return true;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satisfiability toolkit for bundled fragments of first-order modal logic"};
  app.require_subcommand(1);

  std::string format = "text";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->default_str("text");

  std::string formula;
  std::string model_path;
  std::string world;
  std::vector<std::string> assigns;
  std::string fo_input;
  std::string target = "forall-box";
  std::string profile_name = "tableau";
  std::size_t max_worlds = 3, max_domain = 3;
  std::string policy_name = "increasing";
  bool trace = false;
  std::uint64_t seed = 0;
  std::size_t count = 0;

  auto* c_sat = app.add_subcommand("sat", "decide satisfiability via the tableau calculus");
  c_sat->add_option("formula", formula, "formula text, or @file")->required();
  c_sat->add_flag("--trace", trace, "log rule applications to stderr");
  c_sat->fallthrough();

  auto* c_mc = app.add_subcommand("mc", "evaluate a formula in a model");
  c_mc->add_option("model", model_path, "model JSON file")->required();
  c_mc->add_option("formula", formula, "formula text, or @file")->required();
  c_mc->add_option("--world", world, "world to evaluate at")->required();
  c_mc->add_option("--assign", assigns, "valuation entry name=element (repeatable)");
  c_mc->fallthrough();

  auto* c_oracle = app.add_subcommand("oracle", "brute-force bounded model search");
  c_oracle->add_option("formula", formula, "formula text, or @file")->required();
  c_oracle->add_option("--max-worlds", max_worlds, "world count bound")->check(CLI::PositiveNumber);
  c_oracle->add_option("--max-domain", max_domain, "domain size bound")->check(CLI::PositiveNumber);
  c_oracle->add_option("--policy", policy_name, "domain policy")
      ->check(CLI::IsMember({"increasing", "constant"}));
  c_oracle->fallthrough();

  auto* c_translate = app.add_subcommand("translate", "encode a prenex FO(R) sentence");
  c_translate->add_option("sentence", fo_input, "FO sentence, e.g. \"A x. E y. R(x,y)\", or @file")
      ->required();
  c_translate->add_option("target", target, "target fragment")
      ->check(CLI::IsMember({"forall-box", "box-exists2"}));
  c_translate->fallthrough();

  auto* c_pnf = app.add_subcommand("pnf", "positive normal form");
  c_pnf->add_option("formula", formula, "formula text, or @file")->required();
  c_pnf->fallthrough();

  auto* c_clean = app.add_subcommand("clean", "rename binders apart");
  c_clean->add_option("formula", formula, "formula text, or @file")->required();
  c_clean->fallthrough();

  auto* c_classify = app.add_subcommand("classify", "name the smallest covering fragment");
  c_classify->add_option("formula", formula, "formula text, or @file")->required();
  c_classify->fallthrough();

  auto* c_corpus = app.add_subcommand("corpus", "generate the seeded random formula corpus");
  auto* opt_profile = c_corpus->add_option("--profile", profile_name, "generation profile")
                          ->check(CLI::IsMember({"tableau", "preservation"}));
  auto* opt_seed = c_corpus->add_option("--seed", seed, "RNG seed");
  auto* opt_count = c_corpus->add_option("--count", count, "number of formulas");
  c_corpus->fallthrough();
  (void)opt_profile;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    g_json = argv_wants_json(argc, argv);
    return fail(std::string("invalid usage: ") + e.what());
  }

  g_json = format == "json";

  if (c_sat->parsed()) return guarded([&] { return cmd_sat(formula, trace); });
  if (c_mc->parsed())
    return guarded([&] { return cmd_mc(model_path, world, assigns, formula); });
  if (c_oracle->parsed())
    return guarded([&] {
      return cmd_oracle(formula, max_worlds, max_domain,
                        bfoml::policy_from_string(policy_name));
    });
  if (c_translate->parsed()) return guarded([&] { return cmd_translate(fo_input, target); });
  if (c_pnf->parsed()) return guarded([&] { return cmd_pnf(formula); });
  if (c_clean->parsed()) return guarded([&] { return cmd_clean(formula); });
  if (c_classify->parsed()) return guarded([&] { return cmd_classify(formula); });
  if (c_corpus->parsed())
    return guarded([&] {
      bool tableau = profile_name == "tableau";
      if (opt_seed->count() == 0)
        seed = tableau ? bfoml::kTableauCorpusSeed : bfoml::kPreservationSeed;
      if (opt_count->count() == 0)
        count = tableau ? bfoml::kTableauCorpusCount : bfoml::kPreservationCount;
      return cmd_corpus(profile_name, seed, count);
    });
  return fail("no subcommand given");
}
