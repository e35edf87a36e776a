// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace bloch_nitsche {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Mat2c = Eigen::Matrix2cd;
using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

/// Material side of the interface: 1 is inside the inclusions, 2 is the background.
enum class Side { Inner = 1, Outer = 2 };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad geometric input (degenerate lattice basis, malformed cut).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// How an interface element departs from the two-crossing requirement.
/// SameEdge: both crossings on one open edge (the disc clips a cap through that
/// edge); the cut is still well defined. The others leave no usable cut.
enum class ViolationKind { SameEdge, Tangency, CrossingCount, MultipleCircles };

/// An interface element breaks the "circle crosses the boundary exactly twice,
/// each open edge at most once" requirement.
class AssumptionViolation : public Error {
public:
    AssumptionViolation(long element, const std::string& what, ViolationKind kind = ViolationKind::CrossingCount)
        : Error("element " + std::to_string(element) + ": " + what), element_(element), kind_(kind) {}
    long element() const { return element_; }
    ViolationKind kind() const { return kind_; }

private:
    long element_;
    ViolationKind kind_;
};

class MaterialError : public Error {
public:
    using Error::Error;
};

}  // namespace bloch_nitsche
