#pragma once

#include "lagdex/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lagdex {

/// Design matrices whose column-equilibrated condition estimate exceeds this
/// are treated as rank deficient.
inline constexpr double default_condition_limit = 1e10;

struct LeastSquaresSolution {
    std::vector<double> coefficients;
    /// Frobenius-norm condition estimate of the column-equilibrated design.
    double condition = 0.0;
};

/// Dense least squares min ||y - A b|| by Householder QR.
///
/// `design` is row-major with `column_names.size()` columns. Columns are
/// scaled to unit norm before factorization, so the condition estimate is
/// insensitive to the units of each regressor. A zero column, a vanishing
/// diagonal of R, or a condition estimate above `condition_limit` raise
/// RankDeficientError naming the dependent column and the columns it is
/// (nearly) a combination of.
inline LeastSquaresSolution solve_least_squares(std::span<const double> design,
                                                std::span<const double> y,
                                                std::span<const std::string> column_names,
                                                double condition_limit = default_condition_limit)
{
    const std::size_t p = column_names.size();
    const std::size_t n = y.size();
    if (p == 0 || design.size() != n * p)
        throw Error(ErrorKind::InvalidArgument, "design matrix shape does not match observations");
    if (n <= p)
        throw Error(ErrorKind::InsufficientData,
                    std::to_string(n) + " observations for " + std::to_string(p) + " coefficients");

    // Column-major working copy, equilibrated.
    std::vector<double> a(n * p);
    std::vector<double> scale(p);
    for (std::size_t j = 0; j < p; ++j) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm2 += design[i * p + j] * design[i * p + j];
        const double norm = std::sqrt(norm2);
        if (!(norm > 0.0))
            throw RankDeficientError({column_names[j]}, std::numeric_limits<double>::infinity(),
                                     "column '" + column_names[j] + "' is identically zero");
        scale[j] = norm;
        for (std::size_t i = 0; i < n; ++i) a[j * n + i] = design[i * p + j] / norm;
    }
    std::vector<double> qty(y.begin(), y.end());

    auto col = [&](std::size_t j) { return a.data() + j * n; };
    std::vector<double> diag(p);
    for (std::size_t k = 0; k < p; ++k) {
        double* ak = col(k);
        double norm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) norm2 += ak[i] * ak[i];
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        const double alpha = ak[k] > 0.0 ? -norm : norm;
        // v = x - alpha e1, stored in place below the diagonal.
        ak[k] -= alpha;
        const double vnorm2 = norm2 - 2.0 * alpha * (ak[k] + alpha) + alpha * alpha;
        auto reflect = [&](double* target) {
            double w = 0.0;
            for (std::size_t i = k; i < n; ++i) w += ak[i] * target[i];
            const double f = 2.0 * w / vnorm2;
            for (std::size_t i = k; i < n; ++i) target[i] -= f * ak[i];
        };
        for (std::size_t j = k + 1; j < p; ++j) reflect(col(j));
        reflect(qty.data());
        diag[k] = alpha;
    }

    // Upper triangle R (p x p, row-major).
    std::vector<double> r(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        r[i * p + i] = diag[i];
        for (std::size_t j = i + 1; j < p; ++j) r[i * p + j] = col(j)[i];
    }

    auto dependency_of = [&](std::size_t k) {
        // Column k expressed through columns 0..k-1: solve R[:k,:k] z = R[:k,k].
        std::vector<double> z(k);
        for (std::size_t ii = k; ii-- > 0;) {
            double s = r[ii * p + k];
            for (std::size_t j = ii + 1; j < k; ++j) s -= r[ii * p + j] * z[j];
            z[ii] = diag[ii] != 0.0 ? s / diag[ii] : 0.0;
        }
        double zmax = 0.0;
        for (double v : z) zmax = std::max(zmax, std::abs(v));
        std::vector<std::string> names;
        for (std::size_t j = 0; j < k; ++j)
            if (std::abs(z[j]) > 1e-6 * zmax) names.push_back(column_names[j]);
        names.push_back(column_names[k]);
        return names;
    };

    std::size_t weakest = 0;
    for (std::size_t k = 1; k < p; ++k)
        if (std::abs(diag[k]) < std::abs(diag[weakest])) weakest = k;
    if (diag[weakest] == 0.0) {
        auto names = dependency_of(weakest);
        throw RankDeficientError(names, std::numeric_limits<double>::infinity(),
                                 "column '" + column_names[weakest] + "' is linearly dependent on preceding columns");
    }

    // Condition estimate ||R||_F * ||R^-1||_F.
    std::vector<double> rinv(p * p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t ii = j + 1; ii-- > 0;) {
            double s = ii == j ? 1.0 : 0.0;
            for (std::size_t m = ii + 1; m <= j; ++m) s -= r[ii * p + m] * rinv[m * p + j];
            rinv[ii * p + j] = s / diag[ii];
        }
    }
    double rf = 0.0;
    double rinvf = 0.0;
    for (std::size_t i = 0; i < p * p; ++i) {
        rf += r[i] * r[i];
        rinvf += rinv[i] * rinv[i];
    }
    const double condition = std::sqrt(rf) * std::sqrt(rinvf);
    if (!(condition <= condition_limit)) {
        auto names = dependency_of(weakest);
        throw RankDeficientError(names, condition,
                                 "design condition estimate " + std::to_string(condition) + " exceeds limit; column '" +
                                     column_names[weakest] + "' is nearly dependent on preceding columns");
    }

    LeastSquaresSolution out;
    out.condition = condition;
    out.coefficients.assign(p, 0.0);
    for (std::size_t ii = p; ii-- > 0;) {
        double s = qty[ii];
        for (std::size_t j = ii + 1; j < p; ++j) s -= r[ii * p + j] * out.coefficients[j];
        out.coefficients[ii] = s / diag[ii];
    }
    for (std::size_t j = 0; j < p; ++j) out.coefficients[j] /= scale[j];
    return out;
}

} // namespace lagdex
