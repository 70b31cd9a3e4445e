#pragma once

#include <stdexcept>
#include <string>

namespace srivc {

// Normal matrix of the iteration is numerically singular.
class SingularNormalMatrix : public std::runtime_error {
public:
    explicit SingularNormalMatrix(double condition_number);
    double condition_number() const { return condition_number_; }

private:
    double condition_number_;
};

// An iteration produced a denominator with roots outside the open left
// half-plane.
class NonHurwitzIterate : public std::runtime_error {
public:
    NonHurwitzIterate();
};

}  // namespace srivc
