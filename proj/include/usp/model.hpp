#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "usp/instance.hpp"

namespace usp {

enum class Formulation { DBM, OBM };
enum class ModelScope { Full, Master };
enum class VarKind { Binary, Continuous };
enum class Sense { LessEqual, Equal, GreaterEqual };

const char* to_string(Formulation f);
const char* to_string(Sense s);

// Variable and constraint families. The short tags prefix every generated
// name: x_k_i_j, y_s_i_j, f_s_i_j, w_i_j, l_s_i (node and demand indices).
enum class Family {
  Route,         // x (DBM) or y (OBM)
  Flow,          // f
  Weight,        // w
  Length,        // l
  Conservation,  // fc
  Capacity,      // cap
  FlowBound,     // fb
  Uniqueness,    // pu
  PathLength,    // pl (upper and lower rows)
};

const char* to_string(Family f);

struct ModelVariable {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  Family family = Family::Route;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct ModelConstraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
  Family family = Family::Capacity;
};

// Minimization MILP in explicit sparse form.
struct LinearModel {
  Formulation formulation = Formulation::DBM;
  ModelScope scope = ModelScope::Full;
  double eps = 0.0;
  double big_M = 0.0;
  std::vector<ModelVariable> variables;
  std::vector<ModelConstraint> constraints;
  std::vector<Term> objective;

  std::optional<std::size_t> find_variable(const std::string& name) const;
  std::size_t count_variables(Family f) const;
  std::size_t count_constraints(Family f) const;
};

// Constants for the big-M / epsilon path-length rows.
struct ModelConstants {
  double eps = 0.0;
  double big_M = 0.0;
};

// eps = weight_resolution, big_M = |N| * w_max.
ModelConstants default_constants(const Instance& instance);
// Throws std::invalid_argument unless 0 < eps <= weight_resolution and
// big_M >= |N| * w_max.
void require_valid_constants(const Instance& instance, const ModelConstants& c);

LinearModel build_dbm(const Instance& instance, const ModelConstants& c,
                      ModelScope scope = ModelScope::Full);
LinearModel build_obm(const Instance& instance, const ModelConstants& c,
                      ModelScope scope = ModelScope::Full);

// Rows violated by `values` (keyed by variable name). Rows touching a
// variable absent from `values` are skipped; `families` restricts the check
// when non-empty.
std::vector<std::string> model_violations(const LinearModel& model,
                                          const std::map<std::string, double>& values,
                                          const std::vector<Family>& families = {});

// Deterministic LP text: header comment, Minimize, Subject To, Bounds,
// Binaries, End. Numbers use the shortest round-trip decimal form.
std::string export_lp(const LinearModel& model);
// Reads text produced by export_lp. Throws ParseError.
LinearModel parse_lp(const std::string& text);

struct FamilyCount {
  std::string family;
  std::uint64_t count = 0;
};

struct ModelSize {
  std::string label;
  std::uint64_t variables = 0;
  std::uint64_t constraints = 0;
  std::vector<FamilyCount> variable_families;
  std::vector<FamilyCount> constraint_families;
};

struct SizeReport {
  InstanceDims dims;
  ModelSize dbm;
  ModelSize dbm_master;
  ModelSize obm;
  ModelSize obm_master;
  // Routing and flow variables only; uniqueness, conservation, flow-bound and
  // capacity rows only (no weights, lengths or path-length rows).
  ModelSize obm_routing_flow;
};

SizeReport size_report(const InstanceDims& dims);
std::string format_size_report(const SizeReport& report, bool tsv);

struct FamilyStructure {
  Family rows;
  std::size_t count = 0;
  std::vector<Family> touches;
};

// Constraint families in model order with the variable families each touches.
std::vector<FamilyStructure> structure_report(const LinearModel& model);
std::string format_structure_report(const LinearModel& model,
                                    const std::vector<FamilyStructure>& s, bool tsv);

// Relation forced on (l_j, l_i, w_ij) by the routing binaries of one link:
// on_link = x_ij (or y_ij), into_head = sum_h x_hj.
enum class LengthRelation {
  AtMost,    // l_j <= l_i + w_ij
  Strictly,  // l_j <  l_i + w_ij
  Equal,     // l_j == l_i + w_ij
};

const char* to_string(LengthRelation r);

// Throws std::invalid_argument on inconsistent binaries (on_link > into_head,
// or values outside {0,1}).
LengthRelation logic_relation(int on_link, int into_head);

template <class Scalar>
bool logic_holds(LengthRelation r, const Scalar& lj, const Scalar& li, const Scalar& w) {
  switch (r) {
    case LengthRelation::AtMost: return lj <= li + w;
    case LengthRelation::Strictly: return lj < li + w;
    case LengthRelation::Equal: return lj == li + w;
  }
  return false;
}

// The linearized pair for one link:
//   l_j <= l_i + w - eps * (into_head - on_link)
//   l_j >= l_i + w - M * (1 - on_link)
template <class Scalar>
bool linearized_holds(int on_link, int into_head, const Scalar& lj, const Scalar& li,
                      const Scalar& w, const Scalar& eps, const Scalar& M) {
  return lj <= li + w - eps * Scalar(into_head - on_link) &&
         lj >= li + w - M * Scalar(1 - on_link);
}

// Enumeration domain for the exactness check, in grid units: lengths range
// over {0, ..., (n_nodes - 1) * w_max}, weights over {w_min, ..., w_max}.
struct LinearizationDomain {
  std::int64_t n_nodes = 2;
  std::int64_t w_min = 1;
  std::int64_t w_max = 1;
  mpq_class eps = 1;
  mpq_class big_M = 2;
};

struct LinearizationCheck {
  LengthRelation relation = LengthRelation::AtMost;
  bool agrees = true;
  std::uint64_t points = 0;
  // (l_j, l_i, w) of the first disagreement.
  std::optional<std::array<std::int64_t, 3>> counterexample;
};

// Compares the logic-form relation with the linearized pair at every grid
// point of the domain, exactly.
LinearizationCheck linearization_check(int on_link, int into_head,
                                       const LinearizationDomain& domain);

}  // namespace usp
