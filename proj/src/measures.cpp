#include "swabsim/measures.hpp"

#include <cmath>
#include <stdexcept>

namespace swabsim {

double oscillation_coefficient(const std::vector<double>& series, double rate_hz) {
  if (!(rate_hz > 0.0)) throw std::invalid_argument("oscillation_coefficient: rate must be positive");
  const std::size_t n = series.size();
  if (static_cast<double>(n) < kOscMinSeconds * rate_hz)
    throw std::invalid_argument("oscillation_coefficient: series shorter than 2 s");

  const double df = rate_hz / static_cast<double>(n);
  const std::size_t k_lo = static_cast<std::size_t>(std::ceil(kOscBandLow / df - 1e-9));
  const std::size_t k_hi = static_cast<std::size_t>(std::floor(kOscBandHigh / df + 1e-9));

  double sum = 0.0;
  for (std::size_t k = k_lo; k <= k_hi && k < n; ++k) {
    double re = 0.0, im = 0.0;
    const double w = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      re += series[i] * std::cos(w * static_cast<double>(i));
      im += series[i] * std::sin(w * static_cast<double>(i));
    }
    sum += std::sqrt(re * re + im * im);
  }
  return sum;
}

MeasureSet compute_measures(const TrialRecord& rec) {
  if (rec.series.empty()) throw std::invalid_argument("compute_measures: empty record");

  const auto t_insert = rec.stage_entry(StageId::Insert);
  const auto t_collect = rec.stage_entry(StageId::Collect);
  // insertion/collection windows end at the next stage transition
  auto window_end = [&](double t_start) {
    double end = rec.series.back().t + 1.0;
    for (const auto& tr : rec.transitions)
      if (tr.t > t_start) {
        end = tr.t;
        break;
      }
    return end;
  };

  MeasureSet m;
  m.reached = rec.reached;

  if (t_insert) {
    const double end = window_end(*t_insert);
    double sum_t = 0.0, sum_a = 0.0;
    std::size_t count = 0;
    for (const auto& s : rec.series) {
      if (s.t < *t_insert || s.t >= end) continue;
      sum_t += std::hypot(s.force_raw.x(), s.force_raw.y());
      sum_a += std::abs(s.force_raw.z());
      ++count;
    }
    if (count > 0) {
      m.s1_transverse = sum_t / static_cast<double>(count);
      m.s1_axial = sum_a / static_cast<double>(count);
    }
  }  // trials that never began the insertion carry no stage-1 measures

  if (t_collect) {
    const double end = window_end(*t_collect);
    double sum_t = 0.0, sum_a = 0.0;
    std::vector<double> fx;
    for (const auto& s : rec.series) {
      if (s.t < *t_collect || s.t >= end) continue;
      sum_t += std::hypot(s.force_raw.x(), s.force_raw.y());
      sum_a += std::abs(s.force_raw.z());
      fx.push_back(s.force_raw.x());
    }
    if (!fx.empty()) {
      m.s2_transverse = sum_t / static_cast<double>(fx.size());
      m.s2_axial = sum_a / static_cast<double>(fx.size());
    }
    if (m.reached && t_insert) m.time_to_np = *t_collect - *t_insert;
    const double rate =
        rec.series.size() > 1 ? 1.0 / (rec.series[1].t - rec.series[0].t) : 100.0;
    if (static_cast<double>(fx.size()) >= kOscMinSeconds * rate)
      m.oscillation = oscillation_coefficient(fx, rate);
  }

  return m;
}

}  // namespace swabsim
