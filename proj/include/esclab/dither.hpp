#pragma once

#include <vector>

namespace esclab {

// Dither channel label (j, s): j indexes the frequency multiplier, s the
// trig phase (1 = sin, 2 = cos).
struct Channel {
  int j = 0;  // 0-based index into the multiplier list
  int s = 1;  // 1 or 2
};

inline bool operator==(Channel a, Channel b) { return a.j == b.j && a.s == b.s; }

// Sinusoidal dither bank
//   u_{j,1}(t) = 2 sqrt(pi w_j w) cos(2 pi w_j w t)
//   u_{j,2}(t) = 2 sqrt(pi w_j w) sin(2 pi w_j w t)
// with base frequency w and pairwise distinct integer multipliers w_j.
// The cos-first phase assignment is what makes the second-order average of
// F1 u_{j,1} + F2 u_{j,2} equal +[f_{j,1}, f_{j,2}] (steepest descent when
// the pair Wronskian is 1); v is fixed by cancelling the DC part of U u.
// Antiderivatives use zero integration constant (natural antiderivative).
class DitherBank {
public:
  DitherBank(double omega, std::vector<int> multipliers);

  double omega() const { return omega_; }
  const std::vector<int> &multipliers() const { return mult_; }
  int channels() const { return static_cast<int>(mult_.size()); }

  double u(Channel c, double t) const;
  double amplitude(Channel c) const;  // 2 sqrt(pi w_j w)
  double U(Channel c, double t) const;
  // Iterated integral U_{l1,l2}(t) = int (v_{l1,l2} + U_{l1} u_{l2}) dt.
  double iterated_U(Channel l1, Channel l2, double t) const;
  static int v(Channel l1, Channel l2);

  double period(int j) const;  // T_j = 1 / (w_j w)
  double fastest_period() const;

  // Closed-form, omega-independent bound constants:
  // sup_t |U_l| * sqrt(omega) and sup_t |U_{l1,l2}| * omega.
  double sup_U_scaled(Channel c) const;
  double sup_iterated_U_scaled(Channel l1, Channel l2) const;

private:
  double omega_;
  std::vector<int> mult_;
};

}  // namespace esclab
