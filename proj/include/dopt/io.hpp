#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "dopt/barycentric.hpp"
#include "dopt/model.hpp"
#include "dopt/transforms.hpp"

namespace dopt {

/// Parse/validation failure with a line-oriented diagnostic.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A problem loaded from JSON. Budget or two-constraint blocks are already
/// folded in: `instance` is in the canonical size-and-cost form and
/// `back_map` recovers weights for the file's original statement.
struct LoadedProblem {
  DesignInstance instance;
  BackMap back_map;
};

LoadedProblem parse_problem(const std::string& text);
LoadedProblem load_problem(const std::string& path);

/// Serializes the canonical form of a problem (normalization applied once;
/// re-serialization is byte-stable).
std::string serialize_problem(const DesignInstance& instance);

std::string serialize_report(const DesignInstance& instance, const SolverReport& report);
SolverReport parse_report(const DesignInstance& instance, const std::string& text);

/// Weights from either a report JSON or an "id,w" CSV.
Design parse_design_file(const DesignInstance& instance, const std::string& path);

void write_trace_csv(std::ostream& out, const SolverReport& report);

}  // namespace dopt
