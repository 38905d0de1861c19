#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "causalrep/axioms.hpp"
#include "causalrep/construct.hpp"
#include "causalrep/core.hpp"
#include "causalrep/errors.hpp"
#include "causalrep/harness.hpp"
#include "causalrep/lang.hpp"
#include "causalrep/prefs.hpp"
#include "causalrep/rational.hpp"

namespace causalrep {

using Json = nlohmann::json;

inline std::string fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace io_detail {

inline const Json& need(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw IoError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw IoError(path + ": missing field '" + key + "'");
  return *it;
}

inline std::string str_at(const Json& j, const char* key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_string()) throw IoError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

inline std::vector<std::string> string_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw IoError(path + ": expected an array");
  std::vector<std::string> out;
  for (const Json& v : j) {
    if (!v.is_string()) throw IoError(path + ": expected strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

inline std::string joined_values(const std::vector<Value>& vals) {
  std::string out;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(vals[i]);
  }
  return out;
}

inline std::vector<Value> split_values(const std::string& key, const std::string& path) {
  std::vector<Value> out;
  if (key.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = key.find(',', pos);
    std::string part = key.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw IoError(path + ": bad value tuple '" + key + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Signature and model files.

inline Json signature_to_json(const Signature& sig) {
  Json j;
  Json exo = Json::array(), endo = Json::array();
  for (int v = 0; v < sig.exo_count(); ++v) exo.push_back(sig.name(v));
  for (int v = sig.exo_count(); v < sig.var_count(); ++v) endo.push_back(sig.name(v));
  j["exogenous"] = std::move(exo);
  j["endogenous"] = std::move(endo);
  Json ranges = Json::object();
  for (int v = 0; v < sig.var_count(); ++v) ranges[sig.name(v)] = sig.range(v);
  j["ranges"] = std::move(ranges);
  return j;
}

inline Signature signature_from_json(const Json& j, const std::string& path = "signature") {
  std::vector<std::string> exo = io_detail::string_list(io_detail::need(j, "exogenous", path),
                                                        path + ".exogenous");
  std::vector<std::string> endo = io_detail::string_list(io_detail::need(j, "endogenous", path),
                                                         path + ".endogenous");
  const Json& jr = io_detail::need(j, "ranges", path);
  if (!jr.is_object()) throw IoError(path + ".ranges: expected an object");
  std::map<std::string, std::vector<Value>> ranges;
  for (auto it = jr.begin(); it != jr.end(); ++it) {
    if (!it.value().is_array()) throw IoError(path + ".ranges." + it.key() + ": expected an array");
    std::vector<Value> r;
    for (const Json& v : it.value()) {
      if (!v.is_number_integer())
        throw IoError(path + ".ranges." + it.key() + ": expected integers");
      r.push_back(v.get<Value>());
    }
    ranges[it.key()] = std::move(r);
  }
  try {
    return Signature::make(std::move(exo), std::move(endo), ranges);
  } catch (const ModelError& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline Json model_to_json(const CausalModel& m) {
  const Signature& sig = m.signature();
  Json j = signature_to_json(sig);
  Json eqs = Json::object();
  for (const Equation& eq : m.equations()) {
    Json je;
    Json parents = Json::array();
    for (VarId p : eq.parents) parents.push_back(sig.name(p));
    je["parents"] = std::move(parents);
    Json table = Json::object();
    std::uint64_t rows = eq.table.size();
    for (std::uint64_t r = 0; r < rows; ++r) {
      std::uint64_t rest = r;
      std::vector<Value> vals(eq.parents.size());
      for (std::size_t p = eq.parents.size(); p-- > 0;) {
        std::uint64_t radix = sig.range(eq.parents[p]).size();
        vals[p] = sig.range(eq.parents[p])[rest % radix];
        rest /= radix;
      }
      table[io_detail::joined_values(vals)] = eq.table[r];
    }
    je["table"] = std::move(table);
    eqs[sig.name(eq.target)] = std::move(je);
  }
  j["equations"] = std::move(eqs);
  return j;
}

inline CausalModel model_from_json(const Json& j, const std::string& path = "model") {
  Signature sig = signature_from_json(j, path);
  const Json& jeqs = io_detail::need(j, "equations", path);
  if (!jeqs.is_object()) throw IoError(path + ".equations: expected an object");
  std::vector<Equation> eqs;
  for (int i = 0; i < sig.endo_count(); ++i) {
    VarId target = sig.endo_id(i);
    const std::string& name = sig.name(target);
    std::string epath = path + ".equations." + name;
    auto it = jeqs.find(name);
    if (it == jeqs.end()) throw IoError(epath + ": missing equation");
    Equation eq;
    eq.target = target;
    for (const std::string& pname :
         io_detail::string_list(io_detail::need(*it, "parents", epath), epath + ".parents")) {
      auto pid = sig.find(pname);
      if (!pid) throw IoError(epath + ".parents: unknown variable '" + pname + "'");
      eq.parents.push_back(*pid);
    }
    const Json& jt = io_detail::need(*it, "table", epath);
    if (!jt.is_object()) throw IoError(epath + ".table: expected an object");
    std::uint64_t rows = 1;
    for (VarId p : eq.parents) rows *= sig.range(p).size();
    if (jt.size() != rows)
      throw IoError(epath + ".table: has " + std::to_string(jt.size()) + " rows, expected " +
                    std::to_string(rows));
    eq.table.resize(rows);
    for (std::uint64_t r = 0; r < rows; ++r) {
      std::uint64_t rest = r;
      std::vector<Value> vals(eq.parents.size());
      for (std::size_t p = eq.parents.size(); p-- > 0;) {
        std::uint64_t radix = sig.range(eq.parents[p]).size();
        vals[p] = sig.range(eq.parents[p])[rest % radix];
        rest /= radix;
      }
      std::string key = io_detail::joined_values(vals);
      auto cell = jt.find(key);
      if (cell == jt.end()) throw IoError(epath + ".table: missing row '" + key + "'");
      if (!cell->is_number_integer())
        throw IoError(epath + ".table['" + key + "']: expected an integer");
      Value out = cell->get<Value>();
      if (sig.range_index(target, out) < 0)
        throw IoError(epath + ".table['" + key + "']: value " + std::to_string(out) +
                      " not in range of " + name);
      eq.table[r] = out;
    }
    eqs.push_back(std::move(eq));
  }
  try {
    return CausalModel::make(std::move(sig), std::move(eqs));
  } catch (const ModelError& e) {
    throw IoError(path + ": " + e.what());
  }
}

inline std::string model_hash(const CausalModel& m) { return fnv1a64(model_to_json(m).dump()); }

// ---------------------------------------------------------------------------
// Representation files: model fields plus prob and util.

inline Json rep_to_json(const Representation& rep) {
  const Signature& sig = rep.model.signature();
  Json j = model_to_json(rep.model);
  Json prob = Json::object();
  for (std::uint64_t c = 0; c < sig.context_count(); ++c)
    prob[io_detail::joined_values(context_at(sig, c).values)] = rat_str(rep.prob[c]);
  j["prob"] = std::move(prob);
  Json util = Json::object();
  for (std::uint64_t a = 0; a < sig.atom_count(); ++a)
    util[io_detail::joined_values(atom_at(sig, a).values)] = rat_str(rep.util[a]);
  j["util"] = std::move(util);
  return j;
}

inline Representation rep_from_json(const Json& j, const std::string& path = "representation") {
  CausalModel model = model_from_json(j, path);
  const Signature& sig = model.signature();
  const Json& jp = io_detail::need(j, "prob", path);
  if (!jp.is_object()) throw IoError(path + ".prob: expected an object");
  std::vector<Rat> prob(sig.context_count(), Rat(0));
  if (jp.size() != sig.context_count())
    throw IoError(path + ".prob: has " + std::to_string(jp.size()) + " entries, expected " +
                  std::to_string(sig.context_count()));
  for (std::uint64_t c = 0; c < sig.context_count(); ++c) {
    std::string key = io_detail::joined_values(context_at(sig, c).values);
    auto cell = jp.find(key);
    if (cell == jp.end()) throw IoError(path + ".prob: missing context '" + key + "'");
    if (!cell->is_string()) throw IoError(path + ".prob['" + key + "']: expected a string");
    try {
      prob[c] = parse_rational(cell->get<std::string>());
    } catch (const Error& e) {
      throw IoError(path + ".prob['" + key + "']: " + e.what());
    }
  }
  const Json& ju = io_detail::need(j, "util", path);
  if (!ju.is_object()) throw IoError(path + ".util: expected an object");
  if (ju.size() != sig.atom_count())
    throw IoError(path + ".util: has " + std::to_string(ju.size()) + " entries, expected " +
                  std::to_string(sig.atom_count()));
  std::vector<Rat> util(sig.atom_count(), Rat(0));
  for (std::uint64_t a = 0; a < sig.atom_count(); ++a) {
    std::string key = io_detail::joined_values(atom_at(sig, a).values);
    auto cell = ju.find(key);
    if (cell == ju.end()) throw IoError(path + ".util: missing atom '" + key + "'");
    if (!cell->is_string()) throw IoError(path + ".util['" + key + "']: expected a string");
    try {
      util[a] = parse_rational(cell->get<std::string>());
    } catch (const Error& e) {
      throw IoError(path + ".util['" + key + "']: " + e.what());
    }
  }
  try {
    return Representation::make(std::move(model), std::move(prob), std::move(util));
  } catch (const ModelError& e) {
    throw IoError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Preference table files.

struct PrefTableFile {
  Signature sig;
  std::vector<Action> actions;
  std::vector<long long> ranks;
};

inline Json prefs_to_json(const Signature& sig, const std::vector<Action>& actions,
                          const std::vector<long long>& ranks) {
  Json j;
  j["signature"] = signature_to_json(sig);
  Json acts = Json::array();
  for (const Action& a : actions) acts.push_back(to_string(a, sig));
  j["actions"] = std::move(acts);
  j["ranks"] = ranks;
  return j;
}

inline PrefTableFile prefs_from_json(const Json& j, const std::string& path = "prefs") {
  PrefTableFile out{signature_from_json(io_detail::need(j, "signature", path), path + ".signature"),
                    {},
                    {}};
  const Json& ja = io_detail::need(j, "actions", path);
  if (!ja.is_array()) throw IoError(path + ".actions: expected an array");
  for (std::size_t i = 0; i < ja.size(); ++i) {
    if (!ja[i].is_string())
      throw IoError(path + ".actions[" + std::to_string(i) + "]: expected a string");
    try {
      out.actions.push_back(parse_action(ja[i].get<std::string>(), out.sig));
    } catch (const ParseError& e) {
      throw IoError(path + ".actions[" + std::to_string(i) + "]: " + e.what());
    }
  }
  const Json& jr = io_detail::need(j, "ranks", path);
  if (!jr.is_array()) throw IoError(path + ".ranks: expected an array");
  for (std::size_t i = 0; i < jr.size(); ++i) {
    if (!jr[i].is_number_integer())
      throw IoError(path + ".ranks[" + std::to_string(i) + "]: expected an integer");
    out.ranks.push_back(jr[i].get<long long>());
  }
  if (out.ranks.size() != out.actions.size())
    throw IoError(path + ": actions and ranks differ in length");
  return out;
}

// ---------------------------------------------------------------------------
// Reports.

inline Json atom_to_json(const Signature& sig, const Atom& a) {
  Json j = Json::object();
  for (int v = 0; v < sig.var_count(); ++v) j[sig.name(v)] = a.values[v];
  return j;
}

inline Json context_to_json(const Signature& sig, const Context& c) {
  Json j = Json::object();
  for (int v = 0; v < sig.exo_count(); ++v) j[sig.name(v)] = c.values[v];
  return j;
}

inline Json witness_to_json(const Signature& sig, const AxiomWitness& w) {
  Json j = Json::object();
  if (std::holds_alternative<std::monostate>(w)) return j;
  if (const auto* cw = std::get_if<CancellationWitness>(&w)) {
    j["kind"] = "cancellation";
    j["origin"] = cw->origin;
    Json pairs = Json::array();
    for (std::size_t i = 0; i < cw->a_side.size(); ++i) {
      Json p;
      p["a"] = to_string(cw->a_side[i], sig);
      p["b"] = to_string(cw->b_side[i], sig);
      pairs.push_back(std::move(p));
    }
    j["pairs"] = std::move(pairs);
    j["conclusion"] = "last pair";
  } else if (const auto* uw = std::get_if<UniquenessWitness>(&w)) {
    j["kind"] = "model-uniqueness";
    j["context"] = context_to_json(sig, context_at(sig, uw->context_idx));
    j["atom1"] = atom_to_json(sig, atom_at(sig, uw->atom1));
    j["atom2"] = atom_to_json(sig, atom_at(sig, uw->atom2));
  } else if (const auto* dw = std::get_if<DefinitenessWitness>(&w)) {
    j["kind"] = "definiteness";
    j["atom"] = atom_to_json(sig, atom_at(sig, dw->atom_idx));
    j["assignment"] = to_string(dw->assignment, sig);
    j["variable"] = sig.name(dw->var);
    j["fixed_values"] = dw->fixed_values;
  } else if (const auto* cent = std::get_if<CenteringWitness>(&w)) {
    j["kind"] = "centeredness";
    j["atom"] = atom_to_json(sig, atom_at(sig, cent->atom_idx));
    Json vars = Json::array();
    for (VarId v : cent->vars) vars.push_back(sig.name(v));
    j["variables"] = std::move(vars);
    j["variable"] = sig.name(cent->var);
  } else if (const auto* rw = std::get_if<RecursivityWitness>(&w)) {
    j["kind"] = "recursivity";
    Json cycle = Json::array();
    for (VarId v : rw->cycle) cycle.push_back(sig.name(v));
    j["cycle"] = std::move(cycle);
    Json ev = Json::array();
    for (const AffectsEdge& e : rw->evidence) {
      Json je;
      je["cause"] = sig.name(e.cause);
      je["effect"] = sig.name(e.effect);
      je["atom"] = atom_to_json(sig, atom_at(sig, e.atom_idx));
      je["base"] = to_string(e.witness.base, sig);
      je["cause_value"] = e.witness.cause_value;
      je["effect_value"] = e.witness.effect_value;
      je["fixes_without"] = e.witness.fixes_without;
      je["fixes_with"] = e.witness.fixes_with;
      ev.push_back(std::move(je));
    }
    j["evidence"] = std::move(ev);
  }
  return j;
}

inline Json check_report_to_json(const Signature& sig, const CheckAllResult& check) {
  Json j;
  Json axioms = Json::array();
  for (const AxiomReport& r : check.reports) {
    Json ja;
    ja["axiom"] = r.axiom;
    ja["verdict"] = verdict_str(r.verdict);
    ja["queries"] = r.queries_used;
    if (!r.note.empty()) ja["note"] = r.note;
    Json w = witness_to_json(sig, r.witness);
    if (!w.empty()) ja["witness"] = std::move(w);
    axioms.push_back(std::move(ja));
  }
  j["axioms"] = std::move(axioms);
  j["overall"] = check.inconclusive ? "inconclusive" : (check.all_pass ? "pass" : "fail");
  Json cdag = Json::array();
  for (std::uint64_t c : check.c_dagger.context_indices())
    cdag.push_back(io_detail::joined_values(context_at(sig, c).values));
  j["c_dagger"] = std::move(cdag);
  return j;
}

inline Json trace_to_json(const Signature& sig, const ConstructTrace& trace) {
  Json j;
  Json order = Json::array();
  for (VarId v : trace.var_order.sequence) order.push_back(sig.name(v));
  j["var_order"] = std::move(order);
  Json cdag = Json::array();
  for (std::uint64_t c : trace.c_dagger)
    cdag.push_back(io_detail::joined_values(context_at(sig, c).values));
  j["c_dagger"] = std::move(cdag);
  j["margin"] = rat_str(trace.margin);
  Json rows = Json::array();
  for (const auto& row : trace.equations.rows) {
    Json jr;
    jr["target"] = sig.name(row.target);
    jr["context"] = io_detail::joined_values(context_at(sig, row.context_idx).values);
    Json prefix = Json::object();
    int k = 0;
    for (VarId v : trace.var_order.sequence) {
      if (v == row.target) break;
      if (!sig.is_exogenous(v)) prefix[sig.name(v)] = row.prefix_values[k++];
    }
    jr["prefix"] = std::move(prefix);
    jr["value"] = row.value;
    jr["constrained"] = row.constrained;
    rows.push_back(std::move(jr));
  }
  j["equations"] = std::move(rows);
  Json weights = Json::array();
  for (const auto& [c, a, w] : trace.weights) {
    Json jw;
    jw["context"] = io_detail::joined_values(context_at(sig, c).values);
    jw["atom"] = io_detail::joined_values(atom_at(sig, a).values);
    jw["w"] = rat_str(w);
    weights.push_back(std::move(jw));
  }
  j["weights"] = std::move(weights);
  return j;
}

inline Json identify_to_json(const Signature& sig, const IdentifyResult& res) {
  Json j;
  j["verdict"] = verdict_str(res.verdict);
  j["a3_star"] = verdict_str(res.a3_star.verdict);
  j["trials"] = res.models.size();
  Json hashes = Json::array();
  for (const CausalModel& m : res.models) hashes.push_back(model_hash(m));
  j["model_hashes"] = std::move(hashes);
  Json cdag = Json::array();
  for (std::uint64_t c : res.c_dagger)
    cdag.push_back(io_detail::joined_values(context_at(sig, c).values));
  j["c_dagger"] = std::move(cdag);
  if (res.witness) {
    Json w;
    w["context"] = io_detail::joined_values(context_at(sig, res.witness->context_idx).values);
    w["assignment"] = to_string(res.witness->assignment, sig);
    w["variable"] = sig.name(res.witness->var);
    w["values"] = {res.witness->value1, res.witness->value2};
    w["trials"] = {res.witness_trial_a, res.witness_trial_b};
    j["witness"] = std::move(w);
  }
  if (!res.note.empty()) j["note"] = res.note;
  return j;
}

inline Json fuzz_to_json(const FuzzSummary& summary) {
  Json j;
  j["count"] = summary.entries.size();
  j["passed"] = summary.passed;
  j["failed"] = summary.failed;
  Json entries = Json::array();
  for (std::size_t i = 0; i < summary.entries.size(); ++i) {
    const auto& e = summary.entries[i];
    Json je;
    je["index"] = i;
    je["seed"] = std::to_string(e.seed);
    je["ok"] = e.ok;
    if (!e.failures.empty()) je["failures"] = e.failures;
    entries.push_back(std::move(je));
  }
  j["instances"] = std::move(entries);
  return j;
}

// ---------------------------------------------------------------------------
// Files.

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

inline void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(1) << "\n";
}

}  // namespace causalrep
