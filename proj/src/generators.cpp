#include "esclab/generators.hpp"

#include <cmath>
#include <stdexcept>

namespace esclab {

namespace {

GeneratingPair make_classic() {
  GeneratingPair p;
  p.family_tag = "classic";
  p.c1_flagged = false;  // F2(0) = 1, fails the vanishing requirement
  p.f1 = [](double y) { return y; };
  p.f2 = [](double) { return 1.0; };
  p.f1_prime = [](double) { return 1.0; };
  p.f2_prime = [](double) { return 0.0; };
  return p;
}

GeneratingPair make_power(double r) {
  if (!(r > 0.0 && r < 2.0))
    throw std::invalid_argument("make_pair: power exponent r must be in (0, 2)");
  GeneratingPair p;
  p.family_tag = "power";
  p.c1_flagged = false;  // Wronskian is 2(1-r)y, not identically 1
  p.f1 = [r](double y) { return std::pow(y, r); };
  p.f2 = [r](double y) { return std::pow(y, 2.0 - r); };
  p.f1_prime = [r](double y) { return r * std::pow(y, r - 1.0); };
  p.f2_prime = [r](double y) { return (2.0 - r) * std::pow(y, 1.0 - r); };
  return p;
}

GeneratingPair make_suttner_dashkovskiy() {
  GeneratingPair p;
  p.family_tag = "suttner_dashkovskiy";
  p.c1_flagged = true;
  p.f1 = [](double y) { return std::sqrt(y) * std::cos(std::log(y)); };
  p.f2 = [](double y) { return std::sqrt(y) * std::sin(std::log(y)); };
  p.f1_prime = [](double y) {
    double s = std::sqrt(y), l = std::log(y);
    return 0.5 * std::cos(l) / s - std::sin(l) / s;
  };
  p.f2_prime = [](double y) {
    double s = std::sqrt(y), l = std::log(y);
    return 0.5 * std::sin(l) / s + std::cos(l) / s;
  };
  return p;
}

// Amplitude A(y) = sqrt((1 - e^{-y}) / (1 + e^y)) and phase
// phi(y) = e^y + 2 ln(e^y - 1); F1 = A cos phi, F2 = A sin phi.
// A^2 phi' == 1, which is the Wronskian identity.
GeneratingPair make_grushkovskaya_bounded() {
  GeneratingPair p;
  p.family_tag = "grushkovskaya_bounded";
  p.bounded_update = true;
  p.c1_flagged = true;
  auto amp = [](double y) { return std::sqrt(-std::expm1(-y) / (1.0 + std::exp(y))); };
  auto phase = [](double y) { return std::exp(y) + 2.0 * std::log(std::expm1(y)); };
  // d(ln A)/dy = (1/2) [1/(e^y - 1) - e^y/(1 + e^y)]
  auto dlog_amp = [](double y) {
    double ey = std::exp(y);
    return 0.5 * (1.0 / std::expm1(y) - ey / (1.0 + ey));
  };
  auto dphase = [](double y) {
    double ey = std::exp(y);
    return ey * (ey + 1.0) / std::expm1(y);
  };
  p.f1 = [amp, phase](double y) { return amp(y) * std::cos(phase(y)); };
  p.f2 = [amp, phase](double y) { return amp(y) * std::sin(phase(y)); };
  p.f1_prime = [amp, phase, dlog_amp, dphase](double y) {
    double a = amp(y), ph = phase(y);
    return a * (dlog_amp(y) * std::cos(ph) - dphase(y) * std::sin(ph));
  };
  p.f2_prime = [amp, phase, dlog_amp, dphase](double y) {
    double a = amp(y), ph = phase(y);
    return a * (dlog_amp(y) * std::sin(ph) + dphase(y) * std::cos(ph));
  };
  return p;
}

}  // namespace

GeneratingPair make_pair(const std::string &family_tag, double param) {
  if (family_tag == "classic") return make_classic();
  if (family_tag == "power") return make_power(param);
  if (family_tag == "suttner_dashkovskiy") return make_suttner_dashkovskiy();
  if (family_tag == "grushkovskaya_bounded") return make_grushkovskaya_bounded();
  throw std::invalid_argument("make_pair: unknown family '" + family_tag + "'");
}

double check_c1_wronskian(const GeneratingPair &pair,
                          const std::vector<double> &y_grid) {
  double worst = 0.0;
  for (double y : y_grid) {
    double w = pair.f1(y) * pair.f2_prime(y) - pair.f1_prime(y) * pair.f2(y);
    worst = std::max(worst, std::abs(w - 1.0));
  }
  return worst;
}

double check_c1_wronskian_fd(const GeneratingPair &pair,
                             const std::vector<double> &y_grid, double rel_h) {
  double worst = 0.0;
  for (double y : y_grid) {
    double h = rel_h * y;
    double f1p = (pair.f1(y + h) - pair.f1(y - h)) / (2 * h);
    double f2p = (pair.f2(y + h) - pair.f2(y - h)) / (2 * h);
    double w = pair.f1(y) * f2p - f1p * pair.f2(y);
    worst = std::max(worst, std::abs(w - 1.0));
  }
  return worst;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (lo <= 0 || hi <= lo || n < 2)
    throw std::invalid_argument("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(a + (b - a) * i / static_cast<double>(n - 1));
  return g;
}

}  // namespace esclab
