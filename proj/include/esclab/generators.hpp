#pragma once

#include <functional>
#include <string>
#include <vector>

namespace esclab {

// Generating pair (F1, F2) multiplying the sin/cos dither channels.
// c1_flagged marks families admissible for the proposed system: continuous
// vanishing at 0 and Wronskian f1 f2' - f1' f2 == 1 on (0, inf).
struct GeneratingPair {
  std::string family_tag;
  bool bounded_update = false;
  bool c1_flagged = false;
  std::function<double(double)> f1, f2, f1_prime, f2_prime;
};

// Families: "classic" (y, 1), "power" (y^r, y^{2-r}, 0 < r < 2),
// "suttner_dashkovskiy" (sqrt(y) cos ln y, sqrt(y) sin ln y),
// "grushkovskaya_bounded" (bounded-update exponential/log family).
GeneratingPair make_pair(const std::string &family_tag, double param = 0.0);

// Max over the grid of |f1 f2' - f1' f2 - 1|.
double check_c1_wronskian(const GeneratingPair &pair,
                          const std::vector<double> &y_grid);

// Same residual with derivatives replaced by central differences, h = rel_h*y.
double check_c1_wronskian_fd(const GeneratingPair &pair,
                             const std::vector<double> &y_grid,
                             double rel_h = 1e-6);

std::vector<double> log_grid(double lo, double hi, int n);

// Sampled Condition C2 bound constants per g_i; see analysis.hpp for the
// sampler that fills this in.
struct C2BoundReport {
  struct PerG {
    double c1 = 0.0;  // |R1| <= c1 / sqrt(omega) on the band {0<=g_i<=eps}
    double c2 = 0.0;  // |R2| <= c2 / sqrt(omega)
    double b = 0.0;   // F^{g_i} <= -b on the band
    int samples = 0;
  };
  PerG g[3];
  bool valid = false;
  std::string note;
};

}  // namespace esclab
