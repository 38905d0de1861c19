#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace causalrep {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed signature, equations, assignments, or non-recursive model use.
struct ModelError : Error {
  using Error::Error;
};

// Enumeration would exceed the configured cap.
struct SizeError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at offset " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

// Query budget of a preference source exhausted.
struct BudgetError : Error {
  using Error::Error;
};

// A preference table was asked about an action it does not cover.
struct UncoveredActionError : Error {
  using Error::Error;
};

// A preference source contradicted itself (e.g. an intransitive table
// surfaced outside the cancellation checker).
struct IncoherentPreferenceError : Error {
  using Error::Error;
};

// A closest-world query found no world satisfying the constraint.
struct NoClosestWorldError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// A construction stage failed; `stage` names the pipeline step.
struct ConstructError : Error {
  ConstructError(const std::string& stage, const std::string& msg)
      : Error("[" + stage + "] " + msg), stage(stage) {}
  std::string stage;
};

}  // namespace causalrep
