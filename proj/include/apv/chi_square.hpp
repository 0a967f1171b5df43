#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "apv/errors.hpp"

namespace apv {

namespace detail {

// P(a, x) by its power series; converges quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by its continued fraction (modified Lentz); for x >= a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
inline double regularized_gamma_q(double a, double x) {
  if (a <= 0 || x < 0) throw DomainError("regularized_gamma_q needs a > 0 and x >= 0");
  if (x == 0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_continued_fraction(a, x);
}

// Upper tail of the chi-square law with df degrees of freedom.
inline double chi_square_survival(double statistic, int df) {
  return regularized_gamma_q(df / 2.0, statistic / 2.0);
}

// Counts: rows are conditions, columns strategy categories.
struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;
};

struct ChiSquareResult {
  double statistic = 0;
  int df = 0;
  double p_value = 1;
};

// Pearson test of independence, no continuity correction.
inline ChiSquareResult chi_square_test(const ContingencyTable& table) {
  const auto& t = table.counts;
  const std::size_t rows = t.size();
  if (rows < 2) throw DomainError("chi-square test needs at least 2 rows");
  const std::size_t cols = t.front().size();
  if (cols < 2) throw DomainError("chi-square test needs at least 2 columns");
  std::vector<double> row_sum(rows, 0), col_sum(cols, 0);
  double total = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (t[r].size() != cols) throw DomainError("ragged contingency table");
    for (std::size_t c = 0; c < cols; ++c) {
      if (t[r][c] < 0) throw DomainError("negative count in contingency table");
      row_sum[r] += static_cast<double>(t[r][c]);
      col_sum[c] += static_cast<double>(t[r][c]);
      total += static_cast<double>(t[r][c]);
    }
  }
  for (double s : row_sum)
    if (s == 0) throw DomainError("contingency table has an all-zero row");
  for (double s : col_sum)
    if (s == 0) throw DomainError("contingency table has an all-zero column");

  ChiSquareResult out;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double expected = row_sum[r] * col_sum[c] / total;
      const double diff = static_cast<double>(t[r][c]) - expected;
      out.statistic += diff * diff / expected;
    }
  out.df = static_cast<int>((rows - 1) * (cols - 1));
  out.p_value = chi_square_survival(out.statistic, out.df);
  return out;
}

}  // namespace apv
