// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace favard {

// Base of every error raised by the library. `stage()` names the operation
// (or pipeline stage) that gave up, so callers can report it verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

#define FAVARD_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(tag, what) {}         \
    Name(const std::string& stage, const std::string& what)              \
        : Error(stage, what) {}                                          \
  };

FAVARD_DEFINE_ERROR(ValidationError, "validation")
FAVARD_DEFINE_ERROR(ParseError, "parse")
FAVARD_DEFINE_ERROR(CollinearOverlap, "line_set_intersection")
FAVARD_DEFINE_ERROR(QuadratureNotConverged, "quadrature")
FAVARD_DEFINE_ERROR(DegenerateInput, "besicovitch_alternative")
FAVARD_DEFINE_ERROR(EmptyResult, "two_cones_extract")
FAVARD_DEFINE_ERROR(AssumptionViolated, "cover_by_single_graph")
FAVARD_DEFINE_ERROR(InsufficientBuckets, "case_split")
FAVARD_DEFINE_ERROR(WitnessFailed, "build_witness")
FAVARD_DEFINE_ERROR(DegeneratePair, "connecting_angle")
FAVARD_DEFINE_ERROR(CurvesTooClose, "pair_line_measure_formula")

#undef FAVARD_DEFINE_ERROR

}  // namespace favard
