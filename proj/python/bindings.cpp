#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bfoml/corpus.hpp"
#include "bfoml/errors.hpp"
#include "bfoml/fo.hpp"
#include "bfoml/kripke.hpp"
#include "bfoml/oracle.hpp"
#include "bfoml/parser.hpp"
#include "bfoml/tableau.hpp"
#include "bfoml/transform.hpp"

namespace py = pybind11;

namespace {

using StrMap = std::map<std::string, std::string>;

bfoml::Valuation to_valuation(const StrMap& m) {
  bfoml::Valuation v;
  for (const auto& [name, elem] : m) v[bfoml::Variable(name)] = elem;
  return v;
}

std::pair<bfoml::KripkeModel, bfoml::DomainPolicy> load_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw bfoml::ModelError(std::string("invalid model JSON: ") + e.what());
  }
  return bfoml::model_from_json(j);
}

py::dict witness_dict(const bfoml::KripkeModel& m, bfoml::DomainPolicy policy,
                      const std::string& world, const bfoml::Valuation& sigma) {
  py::dict out;
  out["model"] = bfoml::model_to_json(m, policy).dump();
  out["world"] = world;
  py::dict v;
  for (const auto& [var, elem] : sigma) v[py::str(var.name)] = elem;
  out["valuation"] = v;
  return out;
}

bfoml::ReductionTarget target_from(const std::string& s) {
  if (s == "forall-box") return bfoml::ReductionTarget::ForallBox;
  if (s == "box-exists2") return bfoml::ReductionTarget::BoxExists2;
  throw std::invalid_argument("unknown target: " + s + " (expected forall-box or box-exists2)");
}

}  // namespace

PYBIND11_MODULE(_bfoml, m) {
  m.doc() = "satisfiability toolkit for bundled fragments of first-order modal logic";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const bfoml::ParseError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const bfoml::FragmentError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const bfoml::CaptureError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const bfoml::ModelError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const bfoml::EvalError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "parse_check",
      [](const std::string& text) { return bfoml::render(bfoml::parse(text)); },
      py::arg("formula"), "Parse a formula and return its canonical rendering.");

  m.def(
      "pnf",
      [](const std::string& text) { return bfoml::render(bfoml::to_pnf(bfoml::parse(text))); },
      py::arg("formula"), "Positive normal form.");

  m.def(
      "clean",
      [](const std::string& text) {
        return bfoml::render(bfoml::make_clean(bfoml::parse(text)));
      },
      py::arg("formula"), "Rename binders apart.");

  m.def(
      "classify",
      [](const std::string& text) { return bfoml::to_string(bfoml::classify(bfoml::parse(text))); },
      py::arg("formula"), "Smallest covering fragment.");

  m.def(
      "modal_depth",
      [](const std::string& text) { return bfoml::modal_depth(*bfoml::parse(text)); },
      py::arg("formula"));

  m.def(
      "free_variables",
      [](const std::string& text) {
        std::vector<std::string> out;
        for (const auto& v : bfoml::free_vars(*bfoml::parse(text))) out.push_back(v.name);
        return out;
      },
      py::arg("formula"));

  m.def(
      "solve",
      [](const std::string& text) -> py::object {
        bfoml::SatResult res = bfoml::solve(bfoml::parse(text));
        if (!res.sat()) return py::none();
        const bfoml::SatWitness& w = *res.witness;
        return witness_dict(w.model, bfoml::DomainPolicy::Increasing, w.root, w.sigma);
      },
      py::arg("formula"),
      "Tableau satisfiability; returns a witness dict or None for UNSAT.");

  m.def(
      "validate_model",
      [](const std::string& model_json) -> std::optional<std::string> {
        auto [model, policy] = load_model(model_json);
        return bfoml::validate(model, policy);
      },
      py::arg("model_json"), "Returns an error message, or None if the model is well-formed.");

  m.def(
      "evaluate_model",
      [](const std::string& model_json, const std::string& world, const StrMap& valuation,
         const std::string& formula) {
        auto [model, policy] = load_model(model_json);
        if (auto err = bfoml::validate(model, policy)) throw bfoml::ModelError(*err);
        return bfoml::evaluate(model, world, to_valuation(valuation), *bfoml::parse(formula));
      },
      py::arg("model_json"), py::arg("world"), py::arg("valuation"), py::arg("formula"));

  m.def(
      "bounded_sat",
      [](const std::string& formula, std::size_t max_worlds, std::size_t max_domain,
         const std::string& policy) -> py::object {
        bfoml::DomainPolicy p = bfoml::policy_from_string(policy);
        auto w = bfoml::bounded_sat(bfoml::parse(formula), max_worlds, max_domain, p);
        if (!w) return py::none();
        return witness_dict(w->model, p, w->world, w->sigma);
      },
      py::arg("formula"), py::arg("max_worlds") = 3, py::arg("max_domain") = 3,
      py::arg("policy") = "increasing",
      "Brute-force bounded search; returns a witness dict or None if the bounds are exhausted.");

  m.def(
      "enumerate_models",
      [](const std::vector<std::pair<std::string, std::size_t>>& signature,
         std::size_t max_worlds, std::size_t max_domain, const std::string& policy,
         std::size_t limit) {
        std::vector<bfoml::PredicateSymbol> sig;
        for (const auto& [name, arity] : signature) sig.push_back({name, arity});
        bfoml::DomainPolicy p = bfoml::policy_from_string(policy);
        std::vector<std::string> out;
        bfoml::enumerate_models(sig, max_worlds, max_domain, p,
                                [&](const bfoml::KripkeModel& m) {
                                  out.push_back(bfoml::model_to_json(m, p).dump());
                                  return limit == 0 || out.size() < limit;
                                });
        return out;
      },
      py::arg("signature"), py::arg("max_worlds"), py::arg("max_domain"),
      py::arg("policy") = "increasing", py::arg("limit") = 0,
      "Model JSON strings in enumeration order; limit=0 means no limit.");

  m.def(
      "translate",
      [](const std::string& sentence, const std::string& target) {
        bfoml::FOSentence alpha = bfoml::parse_fo(sentence);
        bfoml::FormulaPtr f = bfoml::translate(alpha, target_from(target));
        py::dict out;
        out["alpha"] = bfoml::render_fo(alpha);
        out["formula"] = bfoml::render(f);
        out["modal_depth"] = bfoml::modal_depth(*f);
        out["classification"] = bfoml::to_string(bfoml::classify(f));
        return out;
      },
      py::arg("sentence"), py::arg("target") = "forall-box");

  m.def(
      "fo_eval",
      [](const std::string& sentence, const std::string& structure_json) {
        return bfoml::fo_eval(bfoml::fo_structure_from_json(structure_json),
                              bfoml::parse_fo(sentence));
      },
      py::arg("sentence"), py::arg("structure_json"));

  m.def(
      "corpus",
      [](const std::string& profile, std::uint64_t seed, std::size_t count) {
        bfoml::CorpusProfile prof = profile == "tableau" ? bfoml::CorpusProfile::tableau()
                                                         : bfoml::CorpusProfile::preservation();
        std::vector<std::string> out;
        for (const auto& f : bfoml::generate_corpus(prof, seed, count))
          out.push_back(bfoml::render(f));
        return out;
      },
      py::arg("profile") = "tableau", py::arg("seed") = bfoml::kTableauCorpusSeed,
      py::arg("count") = std::size_t{20});
}
