#include "srivc/errors.hpp"

namespace srivc {

SingularNormalMatrix::SingularNormalMatrix(double condition_number)
    : std::runtime_error("normal matrix is numerically singular (condition number " +
                         std::to_string(condition_number) + ")"),
      condition_number_(condition_number) {}

NonHurwitzIterate::NonHurwitzIterate()
    : std::runtime_error("iterate denominator has roots outside the open left half-plane") {}

}  // namespace srivc
