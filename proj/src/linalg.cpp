#include "oelab/linalg.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "oelab/errors.hpp"

namespace oelab {

std::int64_t integer_determinant(const IntMatrix& A)
{
    if (A.rows() != A.cols())
        throw PreconditionError("determinant of a non-square matrix");
    const auto n = A.rows();
    if (n == 0)
        return 1;
    Eigen::Matrix<__int128, Eigen::Dynamic, Eigen::Dynamic> M = A.cast<__int128>();
    int sign = 1;
    __int128 previous = 1;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        if (M(k, k) == 0) {
            Eigen::Index swap = -1;
            for (Eigen::Index r = k + 1; r < n; ++r)
                if (M(r, k) != 0) {
                    swap = r;
                    break;
                }
            if (swap < 0)
                return 0;
            M.row(k).swap(M.row(swap));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i)
            for (Eigen::Index j = k + 1; j < n; ++j)
                M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / previous;
        previous = M(k, k);
    }
    return static_cast<std::int64_t>(sign * M(n - 1, n - 1));
}

IntMatrix unimodular_inverse(const IntMatrix& A)
{
    const auto det = integer_determinant(A);
    if (det != 1 && det != -1)
        throw PreconditionError("matrix is not unimodular (det " + std::to_string(det) + ")");
    const auto n = A.rows();
    IntMatrix inv(n, n);
    if (n == 1) {
        inv(0, 0) = det;
        return inv;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            IntMatrix minor(n - 1, n - 1);
            for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
                if (r == j)
                    continue;
                for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
                    if (c == i)
                        continue;
                    minor(rr, cc++) = A(r, c);
                }
                ++rr;
            }
            const std::int64_t cofactor = ((i + j) % 2 ? -1 : 1) * integer_determinant(minor);
            inv(i, j) = cofactor * det;  // det = 1/det for det = ±1
        }
    }
    return inv;
}

std::vector<std::int64_t> apply(const IntMatrix& A, std::span<const std::int64_t> v)
{
    if (static_cast<std::size_t>(A.cols()) != v.size())
        throw DimensionMismatch("matrix/vector dimension mismatch");
    std::vector<std::int64_t> out(static_cast<std::size_t>(A.rows()), 0);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out[static_cast<std::size_t>(i)] += A(i, j) * v[static_cast<std::size_t>(j)];
    return out;
}

bool as_integer_matrix(const RealMatrix& A, IntMatrix& out)
{
    out.resize(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            const double x = A(i, j);
            if (x != std::floor(x) || std::abs(x) > 9.0e15)
                return false;
            out(i, j) = static_cast<std::int64_t>(x);
        }
    return true;
}

double max_abs_entry(const RealMatrix& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

MatrixText parse_matrix(const std::string& text)
{
    MatrixText out;
    std::stringstream rows(text);
    std::string row;
    while (std::getline(rows, row, ';')) {
        std::stringstream cells(row);
        std::vector<std::string> entries;
        std::string cell;
        while (cells >> cell)
            entries.push_back(cell);
        if (entries.empty())
            throw PreconditionError("empty row in matrix text \"" + text + "\"");
        out.entries.push_back(std::move(entries));
    }
    const auto n = out.entries.size();
    if (n == 0)
        throw PreconditionError("empty matrix text");
    out.value.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (out.entries[i].size() != n)
            throw PreconditionError("matrix text must describe a square matrix");
        for (std::size_t j = 0; j < n; ++j) {
            const auto& s = out.entries[i][j];
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
            if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(x))
                throw PreconditionError("bad matrix entry \"" + s + "\"");
            out.value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
        }
    }
    return out;
}

nlohmann::json matrix_to_json(const RealMatrix& A)
{
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            row.push_back(A(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json matrix_to_json(const IntMatrix& A)
{
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            row.push_back(A(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_real(double x)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

} // namespace oelab
