#include "robenv/bounds.hpp"

#include <cmath>

#include <json.hpp>

#include "robenv/error.hpp"

namespace robenv {

using boost::multiprecision::log;
using boost::multiprecision::pow;
using boost::multiprecision::sqrt;

void BoundQuery::validate() const {
  if (!(r > 0 && r < 1)) throw Error(ErrorCode::InvalidArgument, "r must lie in (0, 1)");
  if (p < 0) throw Error(ErrorCode::InvalidArgument, "p must be >= 0");
  if (n < 1 || h < 1 || b < 1) throw Error(ErrorCode::InvalidArgument, "n, h, b must be positive");
}

BoundResult evaluate_bounds(const BoundQuery& q) {
  q.validate();
  const Real r = real_from_double(q.r);
  const Real n(q.n);
  const Real root_h = sqrt(Real(q.h));
  const Real log_term = log(Real(2) / r);

  BoundResult out;
  BoundTerms& t = out.terms;
  t.c_upper = sqrt(log_term / 2);
  t.c_l2 = sqrt(2 * log_term);
  t.c_lower = (1 - r) / 4;
  t.l0_term = t.c_upper * root_h * n + 2;
  t.dominating_term = "theorem1";

  Real lower = t.c_lower * root_h * n - 2;
  if (lower < 0) lower = 0;

  if (q.p <= 1) {
    out.upper_size = t.l0_term;
    out.lower_size = lower;
  } else {
    const Real p(q.p);
    const Real denom = pow(Real(2), Real(q.b));
    t.l0_root_term = pow(t.l0_term, 1 / p);
    t.l2_term = pow(t.c_l2 + 2 * root_h * n / denom, 2 / p);
    if (*t.l2_term < *t.l0_root_term) t.dominating_term = "theorem3";
    out.upper_size = std::min(*t.l0_root_term, *t.l2_term);
    out.lower_size = pow(lower, 1 / p) / (denom - 1);
  }
  return out;
}

Real upper_bound_size(const BoundQuery& q) { return evaluate_bounds(q).upper_size; }
Real lower_bound_size(const BoundQuery& q) { return evaluate_bounds(q).lower_size; }

AvgDistanceConstant avg_distance_constant(int h, int b, int p) {
  if (b < 1 || b > 16) throw Error(ErrorCode::BitDepthTooLarge, "average distance constants need 1 <= b <= 16");
  if (h < 1 || p < 0) throw Error(ErrorCode::InvalidArgument, "need h >= 1 and p >= 0");
  const unsigned long e = static_cast<unsigned long>(std::max(p, 1));
  const unsigned long q = 1UL << b;
  const unsigned long m = q - 1;
  // Pairs at level distance d: 2 (q - d) ordered pairs out of q^2.
  BigInt acc = 0;
  BigInt term;
  for (unsigned long d = 1; d <= m; ++d) {
    mpz_ui_pow_ui(term.get_mpz_t(), d, e);
    acc += term * BigInt(2 * (q - d));
  }
  BigInt den;
  mpz_ui_pow_ui(den.get_mpz_t(), m, e);
  den *= BigInt(q) * BigInt(q);

  AvgDistanceConstant out;
  out.k_bp = make_rational(acc, den);
  const Real k = to_real(out.k_bp);
  out.k_hbp = k / (2 - k) * pow(Real(h) * k / 2, 1 / Real(e));
  return out;
}

Real avg_distance_lower_bound(long n, int h, int b, int p) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  const Real k = avg_distance_constant(h, b, p).k_hbp;
  return k * pow(Real(n), Real(2) / Real(std::max(p, 1)));
}

std::vector<BoundsRow> bounds_table(double r, long n, int h, int b, const std::vector<int>& p_list) {
  std::vector<BoundsRow> rows;
  rows.reserve(p_list.size());
  for (int p : p_list) {
    const BoundResult res = evaluate_bounds(BoundQuery{r, p, n, h, b});
    rows.push_back(BoundsRow{p, res.upper_size, res.lower_size, res.terms.c_upper, res.terms.c_lower,
                             res.terms.dominating_term});
  }
  return rows;
}

std::string bounds_csv(const std::vector<BoundsRow>& rows) {
  std::string out = "p,upper_size,lower_size,c_upper,c_lower,dominating_term\n";
  for (const auto& row : rows) {
    out += std::to_string(row.p) + "," + format_significant(row.upper_size, kTableDigits) + "," +
           format_significant(row.lower_size, kTableDigits) + "," + format_significant(row.c_upper, kTableDigits) +
           "," + format_significant(row.c_lower, kTableDigits) + "," + row.dominating_term + "\n";
  }
  return out;
}

namespace {

// The 6-digit decimal, read back as the nearest double.
double rounded(const Real& x) { return std::stod(format_significant(x, kTableDigits)); }

}  // namespace

std::string bounds_json(const std::vector<BoundsRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    arr.push_back({{"p", row.p},
                   {"upper_size", rounded(row.upper_size)},
                   {"lower_size", rounded(row.lower_size)},
                   {"c_upper", rounded(row.c_upper)},
                   {"c_lower", rounded(row.c_lower)},
                   {"dominating_term", row.dominating_term}});
  }
  return arr.dump(2) + "\n";
}

std::optional<long> corollary_crossover(double r, int h, int b, int p, long n_max) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be positive");
  std::optional<long> start;
  for (long n = n_max; n >= 1; --n) {
    const BoundResult res = evaluate_bounds(BoundQuery{r, p, n, h, b});
    if (res.upper_size < res.lower_size) break;
    start = n;
  }
  return start;
}

}  // namespace robenv
