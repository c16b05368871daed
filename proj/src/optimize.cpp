#include "swabsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace swabsim {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::invalid_argument("nelder_mead: empty start point");

  NelderMeadResult best;
  best.x = x0;
  best.value = std::numeric_limits<double>::infinity();
  int evals = 0;

  auto eval = [&](const Eigen::VectorXd& x) {
    const double v = f(x);
    ++evals;
    if (!std::isnan(v) && v < best.value) {
      best.value = v;
      best.x = x;
    }
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  struct Vertex {
    Eigen::VectorXd x;
    double v;
  };
  std::vector<Vertex> s;
  s.push_back({x0, eval(x0)});
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd xi = x0;
    xi[i] += opts.initial_step;
    s.push_back({xi, eval(xi)});
  }

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;
  while (evals < opts.max_evals) {
    std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& b) { return a.v < b.v; });

    double spread = 0.0;
    for (int i = 1; i <= n; ++i) spread = std::max(spread, (s[i].x - s[0].x).norm());
    if (std::abs(s[n].v - s[0].v) < opts.f_tol && spread < opts.x_tol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += s[i].x;
    centroid /= n;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - s[n].x);
    const double vr = eval(xr);
    if (vr < s[0].v) {
      const Eigen::VectorXd xe = centroid + gamma * (xr - centroid);
      const double ve = eval(xe);
      s[n] = ve < vr ? Vertex{xe, ve} : Vertex{xr, vr};
    } else if (vr < s[n - 1].v) {
      s[n] = {xr, vr};
    } else {
      const Eigen::VectorXd xc = centroid + rho * (s[n].x - centroid);
      const double vc = eval(xc);
      if (vc < s[n].v) {
        s[n] = {xc, vc};
      } else {
        for (int i = 1; i <= n; ++i) {
          s[i].x = s[0].x + shrink * (s[i].x - s[0].x);
          s[i].v = eval(s[i].x);
        }
      }
    }
  }

  best.evals = evals;
  return best;
}

}  // namespace swabsim
