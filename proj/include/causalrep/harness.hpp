#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causalrep/construct.hpp"
#include "causalrep/core.hpp"
#include "causalrep/generate.hpp"
#include "causalrep/lewis.hpp"
#include "causalrep/prefs.hpp"

namespace causalrep {

struct InstanceCheckConfig {
  int identify_trials = 5;
  int random_formulas = 200;
  bool ties = false;
  std::uint64_t seed = 0;
  std::uint64_t budget = 2'000'000'000ULL;
};

struct InstanceCheckOutcome {
  bool axioms_pass = false;
  bool a3star_as_expected = false;
  bool roundtrip_ok = false;
  bool identify_ok = false;
  bool lemma1_ok = false;
  bool lemma3_ok = false;
  bool lemma4_ok = false;
  bool eq9_ok = false;
  bool fixes_sound_ok = false;
  std::vector<std::string> failures;

  bool all_ok() const { return failures.empty(); }
};

// Runs the whole battery against one generated ground-truth instance: the
// axioms on the induced oracle, the construction round trip, identification
// under varied choices, and the closeness-order equivalences that tie the
// construction to its enumeration oracles.
inline InstanceCheckOutcome run_instance_checks(const GeneratedInstance& inst,
                                                const InstanceCheckConfig& cfg) {
  InstanceCheckOutcome out;
  auto fail = [&out](const std::string& what) { out.failures.push_back(what); };
  EuOracle oracle(inst.rep);
  oracle.set_budget(cfg.budget);
  const Signature& sig = oracle.signature();
  const std::vector<Action>& actions = inst.family;

  try {
    CheckAllResult check = check_all(oracle, actions);
    out.axioms_pass = check.all_pass;
    if (!check.all_pass) {
      for (const AxiomReport& r : check.reports)
        if (r.axiom != "A3*" && r.verdict != Verdict::Pass)
          fail("axiom " + r.axiom + " " + verdict_str(r.verdict) + ": " + r.note);
      return out;
    }
    Verdict a3s = check.report("A3*").verdict;
    out.a3star_as_expected = cfg.ties ? a3s == Verdict::Fail : a3s == Verdict::Pass;
    if (!out.a3star_as_expected)
      fail(std::string("A3* unexpectedly ") + verdict_str(a3s));

    // Round trip through the constructed representation.
    ConstructedRep constructed = [&] {
      ConstructOptions opts;
      opts.verify_round_trip = true;
      return construct_representation(oracle, actions, opts, &check);
    }();
    out.roundtrip_ok = true;

    std::vector<std::uint64_t> cdag = constructed.c_dagger.context_indices();

    // Identification under varied admissible choices.
    IdentifyResult ident =
        check_identified(oracle, actions, cfg.identify_trials, cfg.seed, {}, &check);
    if (cfg.ties) {
      out.identify_ok = ident.verdict == IdentifiedVerdict::NotIdentified && ident.witness;
      if (!out.identify_ok)
        fail(std::string("identify: expected not_identified with witness, got ") +
             verdict_str(ident.verdict));
    } else {
      out.identify_ok = ident.verdict == IdentifiedVerdict::Identified;
      if (!out.identify_ok)
        fail(std::string("identify: expected identified, got ") + verdict_str(ident.verdict) +
             (ident.note.empty() ? "" : " (" + ident.note + ")"));
      for (std::size_t t = 0; t < ident.models.size() && out.identify_ok; ++t) {
        ModelsEquivalence eq = models_equivalent(inst.rep.model, ident.models[t], cdag);
        if (!eq.equivalent) {
          out.identify_ok = false;
          fail("identify: trial " + std::to_string(t) + " model differs from ground truth");
        }
      }
    }

    // Closeness-order machinery: greedy minimum vs enumeration argmin
    // (Lemma 1 shape) and the all-variables indifference (Lemma 3 shape),
    // over every (atom, assignment) pair.
    TrialChoices choices = default_choices(sig);
    VarOrder var_order = linearize_affects(sig, check.graph, choices);
    ValueOrders value_orders(sig, ValueOrders::Tail::Declared, 0);
    AtomCloseness closeness = pref_closeness(oracle, var_order, value_orders);
    std::vector<VarId> endo;
    for (int i = 0; i < sig.endo_count(); ++i) endo.push_back(sig.endo_id(i));
    out.lemma1_ok = true;
    out.lemma3_ok = true;
    std::uint64_t natoms = sig.atom_count();
    for (std::uint64_t ai = 0; ai < natoms; ++ai) {
      Atom base = atom_at(sig, ai);
      Formula guard = atom_formula(sig, base);
      detail::for_each_assignment(sig, endo, [&](const Assignment& asg) {
        bool empty_m = false;
        Atom greedy = closeness.min_satisfying(base, asg, &empty_m);
        if (empty_m) {
          out.lemma1_ok = false;
          fail("empty fix set at atom " + std::to_string(ai));
          return;
        }
        if (out.lemma1_ok) {
          Atom scanned = closeness.min_satisfying_scan(base, asg);
          if (!(greedy == scanned)) {
            out.lemma1_ok = false;
            fail("greedy/argmin mismatch at atom " + std::to_string(ai));
          }
        }
        if (out.lemma3_ok) {
          Action lhs = Action::conditional(guard, Action::primitive(asg), Action::nothing());
          Action rhs = Action::conditional(
              guard, Action::primitive(restrict_atom(sig, greedy, endo)), Action::nothing());
          if (!oracle.indifferent(lhs, rhs)) {
            out.lemma3_ok = false;
            fail("all-variables indifference fails at atom " + std::to_string(ai));
          }
        }
      });
    }

    // The constructed model against the pair-world Lewis model (Lemma 4
    // shape) and against the closest-atom form of beta (Eq 9 shape).
    const CausalModel& mc = constructed.rep.model;
    out.eq9_ok = true;
    for (std::uint64_t c : cdag) {
      Context ctx = context_at(sig, c);
      Atom a_u = atom_at(sig, *constructed.c_dagger.atom_of_context[c]);
      for (const Action& act : actions) {
        Atom via_model = beta(mc, act, ctx);
        Atom via_order = closeness.min_satisfying(a_u, h_at(act, sig, a_u));
        if (!(via_model == via_order)) {
          out.eq9_ok = false;
          fail("beta/min-atom mismatch at context " + std::to_string(c));
          break;
        }
      }
    }

    out.lemma4_ok = true;
    {
      std::vector<std::vector<std::uint32_t>> ranks;
      for (std::uint64_t ai = 0; ai < natoms; ++ai)
        ranks.push_back(closeness.ranks(atom_at(sig, ai)));
      LewisModel pair_model = build_pref_lewis(ranks, sig);
      SplitMix64 frng(mix_seed(cfg.seed, 0xF0F0));
      for (std::uint64_t c : cdag) {
        std::uint64_t au = *constructed.c_dagger.atom_of_context[c];
        LewisModel::WorldId w = pair_world_id(natoms, PairWorld{au, au});
        Context ctx = context_at(sig, c);
        auto check_formula = [&](const ExtFormula& f) {
          if (!out.lemma4_ok) return;
          bool via_model = satisfies(mc, ctx, f);
          bool via_lewis = lewis_satisfies(pair_model, w, f);
          if (via_model != via_lewis) {
            out.lemma4_ok = false;
            fail("Lewis/model disagreement at context " + std::to_string(c) + " on " +
                 to_string(f, sig));
          }
        };
        detail::for_each_assignment(sig, endo, [&](const Assignment& asg) {
          for (VarId x : endo)
            for (Value v : sig.range(x)) check_formula(ExtFormula{asg, Formula::eq(x, v)});
        });
        for (int k = 0; k < cfg.random_formulas; ++k)
          check_formula(ExtFormula{gen_assignment(frng, sig), gen_formula(frng, sig, 3)});
      }
    }

    // Soundness of the fixes relation against the hidden model (only claimed
    // for injective utilities).
    out.fixes_sound_ok = true;
    if (!cfg.ties) {
      const CausalModel& hidden = inst.rep.model;
      for (std::uint64_t c = 0; c < sig.context_count() && out.fixes_sound_ok; ++c) {
        Context ctx = context_at(sig, c);
        if (sgn(inst.rep.prob[c]) == 0) continue;
        Atom a_u = solve(hidden, ctx);
        for (int xp = 0; xp < sig.endo_count() && out.fixes_sound_ok; ++xp) {
          VarId x = sig.endo_id(xp);
          std::vector<VarId> pool;
          for (VarId v : endo)
            if (v != x) pool.push_back(v);
          detail::for_each_assignment(sig, pool, [&](const Assignment& asg) {
            if (!out.fixes_sound_ok) return;
            for (Value v : sig.range(x)) {
              bool lhs = oracle.fixes(a_u, asg, x, v);
              bool rhs = satisfies(hidden, ctx, ExtFormula{asg, Formula::eq(x, v)});
              if (lhs != rhs) {
                out.fixes_sound_ok = false;
                fail("fixes/intervention mismatch at context " + std::to_string(c));
                return;
              }
            }
          });
        }
      }
    }
  } catch (const Error& e) {
    fail(std::string("exception: ") + e.what());
  }
  return out;
}

struct FuzzSummary {
  struct Entry {
    std::uint64_t seed = 0;
    bool ok = false;
    std::vector<std::string> failures;
  };
  std::vector<Entry> entries;
  int passed = 0, failed = 0;
};

inline FuzzSummary run_fuzz(std::uint64_t seed, int count, const GenCaps& caps, bool ties,
                            const InstanceCheckConfig& base_cfg) {
  FuzzSummary summary;
  for (int i = 0; i < count; ++i) {
    std::uint64_t inst_seed = mix_seed(seed, static_cast<std::uint64_t>(i));
    FuzzSummary::Entry entry;
    entry.seed = inst_seed;
    try {
      GeneratedInstance inst = make_instance(inst_seed, caps, ties);
      InstanceCheckConfig cfg = base_cfg;
      cfg.ties = ties;
      cfg.seed = inst_seed;
      InstanceCheckOutcome outcome = run_instance_checks(inst, cfg);
      entry.ok = outcome.all_ok();
      entry.failures = outcome.failures;
    } catch (const Error& e) {
      entry.ok = false;
      entry.failures.push_back(e.what());
    }
    entry.ok ? ++summary.passed : ++summary.failed;
    summary.entries.push_back(std::move(entry));
  }
  return summary;
}

}  // namespace causalrep
