#pragma once

#include <stdexcept>

#include "prbslice/oracle.hpp"
#include "prbslice/smt_solver.hpp"

namespace prbslice {

/// The verdict carries no usable model for the requested trace.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads states j = 0..T out of a sat verdict for the encoding of
/// (config, scenario). Throws DecodeError on a non-sat verdict or when a
/// variable is missing or has the wrong sort.
AllocationTrace extract_trace(const SolverVerdict& verdict, const NetworkConfig& config, const ScenarioTrace& scenario);

}  // namespace prbslice
