#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prbslice/model.hpp"
#include "prbslice/scenario.hpp"

namespace prbslice {

/// Solver symbol names. Slice, partition and service indices are 1-based;
/// j runs 0..T. sl_resi1 is the residual after the Layer-1 updates and before
/// the partition adjustment of the same step (declared for j >= 1 only).
namespace smt_names {
std::string usr(int i, int j);
std::string shr(int i, int j);
std::string usg(int i, int j);
std::string resi(int i, int j);
std::string resi1(int i, int j);
std::string entries(int i, int j);
std::string en(int i, int j);
std::string lv(int i, int j);
std::string top(int i, int j);
std::string ramp(int i, int j);
std::string pt_shr(int k, int j);
std::string rp_shr(int j);
std::string rp_ovr(int j);
std::string ser_e(int mu, int j);
}  // namespace smt_names

enum class SmtSort { Int, Bool };

struct Declaration {
  std::string name;
  SmtSort sort = SmtSort::Int;
};

/// `tag` names the constraint family the formula encodes: "L1,1".."L1,6",
/// "L2", "L3,1", "L3,2", "L3,4", "L3,ovr", or one of "closure", "frame",
/// "initial", "scenario", "domain".
struct Assertion {
  std::string tag;
  std::string formula;
};

struct ConstraintSet {
  std::string comment;  // emitted as a leading comment line when non-empty
  std::vector<Declaration> declarations;
  std::vector<Assertion> assertions;

  std::size_t assertion_count() const { return assertions.size(); }
};

/// Emitted assertions never exceed this multiple of constraint_count_bound
/// for T >= 1. Per timestep the encoder adds the Layer-1 family, the
/// scenario/domain pins and the frame axioms on top of the combination
/// cases the bound counts; three times the bound covers all of them.
inline constexpr std::uint64_t kAssertionBoundFactor = 3;

/// The complete constraint system for (config, scenario). Scenario flags are
/// pinned as constants, so a satisfying model is the unique trace.
/// Throws ValidationError for an invalid config or mismatched scenario.
ConstraintSet encode(const NetworkConfig& config, const ScenarioTrace& scenario);

/// SMT-LIB 2 text (QF_LIA). Deterministic; provenance tags appear as
/// comments before each assertion.
std::string emit_smtlib(const ConstraintSet& cs);

}  // namespace prbslice
