#pragma once

#include <stdexcept>
#include <string>

namespace loopcoord {

/// Base class for all library errors. `name()` is a stable machine-readable
/// identifier used by the CLI for exit diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define LOOPCOORD_ERROR(Name)                               \
  class Name : public Error {                               \
   public:                                                  \
    explicit Name(const std::string& what = #Name)          \
        : Error(#Name, what) {}                             \
  }

LOOPCOORD_ERROR(DegenerateMatrix);
LOOPCOORD_ERROR(NoUniqueSolution);
LOOPCOORD_ERROR(StandAloneUnstable);
LOOPCOORD_ERROR(NotCoordinatable);
LOOPCOORD_ERROR(EpsilonNotFound);
LOOPCOORD_ERROR(HypothesisViolated);
LOOPCOORD_ERROR(SingularSystem);
LOOPCOORD_ERROR(RankDeficient);
LOOPCOORD_ERROR(NotFound);
LOOPCOORD_ERROR(DomainError);
LOOPCOORD_ERROR(TruncationTooSmall);
LOOPCOORD_ERROR(SkippedDegenerate);
LOOPCOORD_ERROR(EigensolverFailure);
LOOPCOORD_ERROR(ConfigError);

#undef LOOPCOORD_ERROR

}  // namespace loopcoord
