#pragma once

#include <optional>
#include <string>
#include <vector>

#include "germlab/rational.hpp"

namespace germlab {

using RationalVector = std::vector<Rational>;
/// Row-major; all rows have the same length.
using RationalMatrix = std::vector<RationalVector>;

RationalMatrix identity_matrix(std::size_t n);
RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b);
RationalVector multiply(const RationalMatrix& a, const RationalVector& x);

Rational determinant(const RationalMatrix& m);
/// Classical adjugate (transposed cofactor matrix): adj(M) M = det(M) I.
RationalMatrix adjugate(const RationalMatrix& m);
std::size_t rank(const RationalMatrix& m);
/// Basis of {x : m x = 0}, in reduced form (one free coordinate equal to 1).
std::vector<RationalVector> kernel(const RationalMatrix& m, std::size_t columns);

/// Solution of m x = rhs with free coordinates set to 0, or nullopt if the
/// system is inconsistent.
std::optional<RationalVector> solve(const RationalMatrix& m, const RationalVector& rhs);

bool is_upper_triangular(const RationalMatrix& m);

std::string to_csv(const RationalMatrix& m);

}  // namespace germlab
