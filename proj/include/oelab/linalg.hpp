#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace oelab {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using RealMatrix = Eigen::MatrixXd;

/// Exact determinant by fraction-free (Bareiss) elimination.
std::int64_t integer_determinant(const IntMatrix& A);

/// Inverse of a matrix with determinant ±1, exact via the adjugate.
IntMatrix unimodular_inverse(const IntMatrix& A);

std::vector<std::int64_t> apply(const IntMatrix& A, std::span<const std::int64_t> v);

/// True when every entry is an integer; fills `out` on success.
bool as_integer_matrix(const RealMatrix& A, IntMatrix& out);

double max_abs_entry(const RealMatrix& A);

/**
 * Row-major matrix text: rows separated by ';', entries by whitespace,
 * e.g. "1 0.5; 0 1". Entry strings are retained verbatim.
 */
struct MatrixText {
    RealMatrix value;
    std::vector<std::vector<std::string>> entries;
};

MatrixText parse_matrix(const std::string& text);

nlohmann::json matrix_to_json(const RealMatrix& A);
nlohmann::json matrix_to_json(const IntMatrix& A);

/// Shortest decimal text that round-trips the double.
std::string format_real(double x);

} // namespace oelab
