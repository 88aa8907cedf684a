#include "esclab/dither.hpp"

#include <cmath>
#include <stdexcept>

namespace esclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Term {
  bool is_sin;  // sin(k t) vs cos(k t)
  double k;
  double c;
};

}  // namespace

DitherBank::DitherBank(double omega, std::vector<int> multipliers)
    : omega_(omega), mult_(std::move(multipliers)) {
  if (omega_ <= 0) throw std::invalid_argument("DitherBank: omega must be positive");
  if (mult_.empty()) throw std::invalid_argument("DitherBank: need at least one multiplier");
  for (std::size_t i = 0; i < mult_.size(); ++i) {
    if (mult_[i] <= 0)
      throw std::invalid_argument("DitherBank: multipliers must be positive integers");
    for (std::size_t k = 0; k < i; ++k)
      if (mult_[i] == mult_[k])
        throw std::invalid_argument("DitherBank: multipliers must be pairwise distinct");
  }
}

double DitherBank::amplitude(Channel c) const {
  return 2.0 * std::sqrt(kPi * mult_[c.j] * omega_);
}

double DitherBank::u(Channel c, double t) const {
  double f = mult_[c.j] * omega_;
  double arg = 2.0 * kPi * f * t;
  return amplitude(c) * (c.s == 1 ? std::cos(arg) : std::sin(arg));
}

double DitherBank::U(Channel c, double t) const {
  double f = mult_[c.j] * omega_;
  double arg = 2.0 * kPi * f * t;
  double a = 1.0 / std::sqrt(kPi * f);
  return c.s == 1 ? a * std::sin(arg) : -a * std::cos(arg);
}

int DitherBank::v(Channel l1, Channel l2) {
  if (l1.j != l2.j) return 0;
  if (l1.s == 1 && l2.s == 2) return -1;
  if (l1.s == 2 && l2.s == 1) return 1;
  return 0;
}

namespace {

// Product-to-sum decomposition of U_{l1}(t) * u_{l2}(t) into sinusoids of
// the combination frequencies a1 -+ a2.
void product_terms(double f1, int s1, double f2, int s2, Term out[2]) {
  double a1 = 2.0 * kPi * f1, a2 = 2.0 * kPi * f2;
  double A = (s1 == 1 ? 1.0 : -1.0) / std::sqrt(kPi * f1);  // U amplitude
  double B = 2.0 * std::sqrt(kPi * f2);                     // u amplitude
  double c = 0.5 * A * B;
  bool t1_cos = (s1 == 2);  // U of the sin channel is a cosine
  bool t2_sin = (s2 == 2);
  if (t1_cos && t2_sin) {
    // cos X sin Y = (sin(X+Y) - sin(X-Y)) / 2
    out[0] = {true, a1 + a2, c};
    out[1] = {true, a1 - a2, -c};
  } else if (t1_cos && !t2_sin) {
    // cos X cos Y = (cos(X-Y) + cos(X+Y)) / 2
    out[0] = {false, a1 - a2, c};
    out[1] = {false, a1 + a2, c};
  } else if (!t1_cos && t2_sin) {
    // sin X sin Y = (cos(X-Y) - cos(X+Y)) / 2
    out[0] = {false, a1 - a2, c};
    out[1] = {false, a1 + a2, -c};
  } else {
    // sin X cos Y = (sin(X+Y) + sin(X-Y)) / 2
    out[0] = {true, a1 + a2, c};
    out[1] = {true, a1 - a2, c};
  }
}

}  // namespace

double DitherBank::iterated_U(Channel l1, Channel l2, double t) const {
  Term terms[2];
  product_terms(mult_[l1.j] * omega_, l1.s, mult_[l2.j] * omega_, l2.s, terms);
  double dc = static_cast<double>(v(l1, l2));
  double result = 0.0;
  for (const Term &tm : terms) {
    if (std::abs(tm.k) < 1e-300) {
      if (!tm.is_sin) dc += tm.c;  // cos(0) = 1 contributes a constant
      continue;
    }
    result += tm.is_sin ? -tm.c * std::cos(tm.k * t) / tm.k
                        : tm.c * std::sin(tm.k * t) / tm.k;
  }
  // The v constant exists precisely to cancel the DC part of U u; a residue
  // here means the channel bookkeeping is broken.
  if (std::abs(dc) > 1e-9)
    throw std::logic_error("DitherBank::iterated_U: secular term did not cancel");
  return result;
}

double DitherBank::period(int j) const { return 1.0 / (mult_[j] * omega_); }

double DitherBank::fastest_period() const {
  int m = mult_[0];
  for (int v : mult_) m = std::max(m, v);
  return 1.0 / (m * omega_);
}

double DitherBank::sup_U_scaled(Channel c) const {
  return 1.0 / std::sqrt(kPi * mult_[c.j]);
}

double DitherBank::sup_iterated_U_scaled(Channel l1, Channel l2) const {
  Term terms[2];
  product_terms(mult_[l1.j] * omega_, l1.s, mult_[l2.j] * omega_, l2.s, terms);
  double s = 0.0;
  for (const Term &tm : terms)
    if (std::abs(tm.k) > 1e-300) s += std::abs(tm.c / tm.k);
  return s * omega_;
}

}  // namespace esclab
