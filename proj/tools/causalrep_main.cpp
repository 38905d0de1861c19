// Command-line front end: validate/eval for models and representations, the
// axiom checker, the representation constructor, the identification test,
// and the randomized round-trip harness.

#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "causalrep/construct.hpp"
#include "causalrep/generate.hpp"
#include "causalrep/harness.hpp"
#include "causalrep/json_io.hpp"

namespace cr = causalrep;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailure = 2;
constexpr int kInconclusive = 3;
constexpr int kInputError = 4;

struct CommonOpts {
  std::string prefs_path, rep_path, actions_path;
  std::uint64_t seed = 0;
  std::uint64_t budget = 2'000'000'000ULL;
  int max_exo = 2, max_endo = 3, max_range = 3;
  int trials = 5;
  bool ties = false;
  std::string out_path;
  bool to_stdout = false;
};

cr::GenCaps caps_of(const CommonOpts& o) {
  cr::GenCaps caps;
  caps.max_exo = o.max_exo;
  caps.max_endo = o.max_endo;
  caps.max_range = o.max_range;
  return caps;
}

void add_source_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--prefs", o.prefs_path, "preference table file (JSON)");
  cmd->add_option("--rep", o.rep_path, "representation file (JSON); induces the preference oracle");
  cmd->add_option("--actions", o.actions_path,
                  "file with an 'actions' array to use as the presented family (with --rep)");
  cmd->add_option("--seed", o.seed, "seed for generated action families and trials");
  cmd->add_option("--budget", o.budget, "preference query budget");
  cmd->add_option("--max-exo", o.max_exo, "generator cap: exogenous variables");
  cmd->add_option("--max-endo", o.max_endo, "generator cap: endogenous variables");
  cmd->add_option("--max-range", o.max_range, "generator cap: range size");
  cmd->add_option("--out", o.out_path, "write the JSON report here");
  cmd->add_flag("--json", o.to_stdout, "print the JSON report to stdout");
}

struct Source {
  std::shared_ptr<cr::PreferenceSource> pref;
  std::vector<cr::Action> actions;
};

Source open_source(const CommonOpts& o) {
  Source src;
  if (!o.prefs_path.empty() && !o.rep_path.empty())
    throw cr::IoError("give either --prefs or --rep, not both");
  if (!o.prefs_path.empty()) {
    cr::PrefTableFile table = cr::prefs_from_json(cr::load_json_file(o.prefs_path), o.prefs_path);
    src.pref = std::make_shared<cr::TableSource>(table.sig, table.actions, table.ranks);
    src.actions = src.pref->presented_actions();
  } else if (!o.rep_path.empty()) {
    cr::Representation rep = cr::rep_from_json(cr::load_json_file(o.rep_path), o.rep_path);
    cr::Signature sig = rep.model.signature();
    std::vector<cr::Action> family;
    if (!o.actions_path.empty()) {
      cr::Json j = cr::load_json_file(o.actions_path);
      cr::Signature fsig =
          cr::signature_from_json(cr::io_detail::need(j, "signature", o.actions_path),
                                  o.actions_path + ".signature");
      if (!(fsig == sig)) throw cr::IoError(o.actions_path + ": signature differs from --rep");
      for (const auto& s :
           cr::io_detail::string_list(cr::io_detail::need(j, "actions", o.actions_path),
                                      o.actions_path + ".actions"))
        family.push_back(cr::parse_action(s, sig));
    } else {
      cr::SplitMix64 rng(cr::mix_seed(o.seed, 0xAC710705ULL));
      family = cr::gen_action_family(rng, sig, caps_of(o));
    }
    src.pref = cr::induce_preferences(std::move(rep), family);
    src.actions = std::move(family);
  } else {
    throw cr::IoError("a preference source is required: --prefs or --rep");
  }
  src.pref->set_budget(o.budget);
  return src;
}

void emit(const CommonOpts& o, const cr::Json& j) {
  if (!o.out_path.empty()) cr::save_json_file(o.out_path, j);
  if (o.to_stdout || o.out_path.empty()) std::cout << j.dump(1) << "\n";
}

int run_validate(const std::string& model_path, const std::string& prefs_path,
                 const std::string& rep_path, bool strict) {
  int rc = kOk;
  if (!model_path.empty()) {
    cr::CausalModel m = cr::model_from_json(cr::load_json_file(model_path), model_path);
    cr::RecursivityCheck recur = cr::check_recursive(m);
    if (!recur.recursive()) {
      std::cout << model_path << ": cyclic parent declarations:";
      for (cr::VarId v : recur.cycle) std::cout << " " << m.signature().name(v);
      std::cout << "\n";
      rc = kInputError;
    } else {
      std::cout << model_path << ": ok (recursive; dependency order:";
      for (cr::VarId v : recur.order) std::cout << " " << m.signature().name(v);
      std::cout << ")\n";
    }
    if (strict) {
      auto unused = cr::audit_insensitive_parents(m);
      for (auto [target, parent] : unused) {
        std::cout << model_path << ": strict: equation for " << m.signature().name(target)
                  << " never consults declared parent " << m.signature().name(parent) << "\n";
        rc = kInputError;
      }
    }
  }
  if (!prefs_path.empty()) {
    cr::PrefTableFile t = cr::prefs_from_json(cr::load_json_file(prefs_path), prefs_path);
    cr::TableSource table(t.sig, t.actions, t.ranks);  // validates rank consistency
    std::cout << prefs_path << ": ok (" << t.actions.size() << " actions)\n";
  }
  if (!rep_path.empty()) {
    cr::Representation r = cr::rep_from_json(cr::load_json_file(rep_path), rep_path);
    std::cout << rep_path << ": ok (" << r.model.signature().context_count() << " contexts, "
              << r.model.signature().atom_count() << " atoms)\n";
  }
  return rc;
}

int run_eval(const std::string& model_path, const std::string& rep_path,
             const std::string& context_str, const std::string& formula_str,
             const std::string& action_str, bool solve_flag) {
  std::optional<cr::Representation> rep;
  std::optional<cr::CausalModel> model;
  if (!rep_path.empty())
    rep = cr::rep_from_json(cr::load_json_file(rep_path), rep_path);
  else if (!model_path.empty())
    model = cr::model_from_json(cr::load_json_file(model_path), model_path);
  else
    throw cr::IoError("eval needs --model or --rep");
  const cr::CausalModel& m = rep ? rep->model : *model;
  const cr::Signature& sig = m.signature();

  std::optional<cr::Context> ctx;
  if (!context_str.empty()) {
    cr::Context c{cr::io_detail::split_values(context_str, "--context")};
    cr::check_context(sig, c);
    ctx = c;
  }
  if (!formula_str.empty()) {
    if (!ctx) throw cr::IoError("--formula needs --context");
    cr::ExtFormula f = cr::parse_ext_formula(formula_str, sig);
    std::cout << (cr::satisfies(m, *ctx, f) ? "true" : "false") << "\n";
    return kOk;
  }
  if (!action_str.empty()) {
    cr::Action a = cr::parse_action(action_str, sig);
    if (ctx) {
      cr::Atom outcome = cr::beta(m, a, *ctx);
      std::cout << cr::atom_to_json(sig, outcome).dump() << "\n";
      return kOk;
    }
    if (!rep) throw cr::IoError("--action without --context needs --rep (expected utility)");
    std::cout << cr::rat_str(cr::expected_utility(*rep, a)) << "\n";
    return kOk;
  }
  if (solve_flag) {
    if (!ctx) throw cr::IoError("--solve needs --context");
    std::cout << cr::atom_to_json(sig, cr::solve(m, *ctx)).dump() << "\n";
    return kOk;
  }
  throw cr::IoError("eval needs one of --formula, --action, --solve");
}

int run_check(const CommonOpts& o) {
  Source src = open_source(o);
  cr::CheckAllResult check = cr::check_all(*src.pref, src.actions);
  emit(o, cr::check_report_to_json(src.pref->signature(), check));
  if (check.inconclusive) return kInconclusive;
  return check.all_pass ? kOk : kCheckFailure;
}

int run_construct(const CommonOpts& o, const std::string& trace_path) {
  Source src = open_source(o);
  try {
    cr::ConstructedRep built = cr::construct_representation(*src.pref, src.actions);
    const cr::Signature& sig = src.pref->signature();
    cr::Json rep_json = cr::rep_to_json(built.rep);
    if (!o.out_path.empty())
      cr::save_json_file(o.out_path, rep_json);
    else
      std::cout << rep_json.dump(1) << "\n";
    if (!trace_path.empty())
      cr::save_json_file(trace_path, cr::trace_to_json(sig, built.trace));
    return kOk;
  } catch (const cr::ConstructError& e) {
    std::cerr << "construct refused: " << e.what() << "\n";
    return kCheckFailure;
  }
}

int run_identify(const CommonOpts& o) {
  Source src = open_source(o);
  try {
    cr::IdentifyResult res =
        cr::check_identified(*src.pref, src.actions, o.trials, o.seed);
    const cr::Signature& sig = src.pref->signature();
    emit(o, cr::identify_to_json(sig, res));
    if (res.verdict == cr::IdentifiedVerdict::NotIdentified && !o.out_path.empty() &&
        res.witness_trial_a >= 0) {
      cr::save_json_file(o.out_path + ".model_a.json",
                         cr::model_to_json(res.models[res.witness_trial_a]));
      cr::save_json_file(o.out_path + ".model_b.json",
                         cr::model_to_json(res.models[res.witness_trial_b]));
    }
    return res.verdict == cr::IdentifiedVerdict::Inconsistent ? kCheckFailure : kOk;
  } catch (const cr::ConstructError& e) {
    std::cerr << "identify refused: " << e.what() << "\n";
    return kCheckFailure;
  }
}

int run_fuzz(const CommonOpts& o, int count, const std::string& dump_dir) {
  cr::InstanceCheckConfig cfg;
  cfg.identify_trials = o.trials;
  cfg.random_formulas = 50;
  cfg.budget = o.budget;
  cr::FuzzSummary summary = cr::run_fuzz(o.seed, count, caps_of(o), o.ties, cfg);
  emit(o, cr::fuzz_to_json(summary));
  if (!dump_dir.empty()) {
    for (std::size_t i = 0; i < summary.entries.size(); ++i) {
      const auto& e = summary.entries[i];
      if (e.ok) continue;
      cr::GeneratedInstance inst = cr::make_instance(e.seed, caps_of(o), o.ties);
      const cr::Signature& sig = inst.rep.model.signature();
      std::string base = dump_dir + "/instance_" + std::to_string(i);
      cr::save_json_file(base + ".rep.json", cr::rep_to_json(inst.rep));
      cr::Json fam;
      fam["signature"] = cr::signature_to_json(sig);
      cr::Json acts = cr::Json::array();
      for (const cr::Action& a : inst.family) acts.push_back(cr::to_string(a, sig));
      fam["actions"] = std::move(acts);
      cr::save_json_file(base + ".actions.json", fam);
    }
  }
  return summary.failed == 0 ? kOk : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subjective causal expected utility: models, axioms, construction"};
  app.require_subcommand(1);

  // validate
  std::string v_model, v_prefs, v_rep;
  bool v_strict = false;
  CLI::App* validate = app.add_subcommand("validate", "parse and validate input files");
  validate->add_option("--model", v_model, "model file");
  validate->add_option("--prefs", v_prefs, "preference table file");
  validate->add_option("--rep", v_rep, "representation file");
  validate->add_flag("--strict", v_strict, "also audit equations for unused declared parents");

  // eval
  std::string e_model, e_rep, e_context, e_formula, e_action;
  bool e_solve = false;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a formula, action outcome, or EU");
  eval_cmd->add_option("--model", e_model, "model file");
  eval_cmd->add_option("--rep", e_rep, "representation file");
  eval_cmd->add_option("--context", e_context, "comma-joined exogenous values, e.g. '1,0'");
  eval_cmd->add_option("--formula", e_formula, "extended formula, e.g. '[X:=0](Y=0)'");
  eval_cmd->add_option("--action", e_action, "action, e.g. 'if X=1 then do[Y:=0]'");
  eval_cmd->add_flag("--solve", e_solve, "print the solved atom for --context");

  CommonOpts check_o, construct_o, identify_o, fuzz_o;
  CLI::App* check = app.add_subcommand("check", "run the axiom checkers");
  add_source_options(check, check_o);

  CLI::App* construct = app.add_subcommand("construct", "build a representation from preferences");
  add_source_options(construct, construct_o);
  std::string trace_path;
  construct->add_option("--trace", trace_path, "write the construction trace here");

  CLI::App* identify = app.add_subcommand("identify", "decide identification across trials");
  add_source_options(identify, identify_o);
  identify->add_option("--trials", identify_o.trials, "number of pipeline trials");

  CLI::App* fuzz = app.add_subcommand("fuzz", "random round-trip harness");
  int fuzz_count = 10;
  std::string fuzz_dump;
  add_source_options(fuzz, fuzz_o);
  fuzz->add_option("--count", fuzz_count, "number of instances");
  fuzz->add_flag("--ties", fuzz_o.ties, "tie two sibling outcome utilities per instance");
  fuzz->add_option("--trials", fuzz_o.trials, "identification trials per instance");
  fuzz->add_option("--dump-dir", fuzz_dump, "dump reproducer files for failing instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return run_validate(v_model, v_prefs, v_rep, v_strict);
    if (*eval_cmd) return run_eval(e_model, e_rep, e_context, e_formula, e_action, e_solve);
    if (*check) return run_check(check_o);
    if (*construct) return run_construct(construct_o, trace_path);
    if (*identify) return run_identify(identify_o);
    if (*fuzz) return run_fuzz(fuzz_o, fuzz_count, fuzz_dump);
  } catch (const cr::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInconclusive;
  } catch (const cr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
