#include "swabsim/selftest.hpp"

#include "swabsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace swabsim {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Stationary covariance of dz = Az dt + B dW via the Lyapunov equation
/// A P + P A^T + B B^T = 0, solved as a linear system in (p11, p12, p22).
Eigen::Matrix2d lyapunov_stationary(double mu, double psi, double sigma) {
  const double q = 2.0 * psi * sigma * sigma;  // (B B^T)(2,2)
  Eigen::Matrix3d m;
  Eigen::Vector3d rhs;
  // d/dt p11 = 2 p12
  m << 0, 2, 0,
      // d/dt p12 = p22 - mu p11 - psi p12
      -mu, -psi, 1,
      // d/dt p22 = -2 mu p12 - 2 psi p22 + q
      0, -2 * mu, -2 * psi;
  rhs << 0, 0, -q;
  const Eigen::Vector3d p = m.colPivHouseholderQr().solve(rhs);
  Eigen::Matrix2d out;
  out << p[0], p[1], p[1], p[2];
  return out;
}

/// Textbook one-way ANOVA F statistic, used as an independent oracle for the
/// linear-model implementation.
double oneway_f(const std::vector<std::vector<double>>& groups) {
  double grand = 0.0;
  int n = 0;
  for (const auto& g : groups)
    for (double v : g) {
      grand += v;
      ++n;
    }
  grand /= n;
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    ssb += static_cast<double>(g.size()) * (mean - grand) * (mean - grand);
    for (double v : g) ssw += (v - mean) * (v - mean);
  }
  const int dfb = static_cast<int>(groups.size()) - 1;
  const int dfw = n - static_cast<int>(groups.size());
  return (ssb / dfb) / (ssw / dfw);
}

}  // namespace

SelfTest::SelfTest(AppConfig cfg) : cfg_(std::move(cfg)) {}

const MatrixResult& SelfTest::matrix_once() {
  if (!matrix_) {
    MatrixConfig mc = cfg_.matrix_config();
    mc.out_dir.clear();  // in-memory
    mc.emit_timeseries = false;
    matrix_ = run_matrix(mc);
  }
  return *matrix_;
}

CriterionResult SelfTest::run_criterion(int id) {
  CriterionResult r;
  r.id = id;
  std::ostringstream detail;
  const SwabBeam beam = cfg_.world.swab;

  switch (id) {
    case 1: {
      r.name = "critical gain values and vanishing discriminant";
      const double g1 = critical_gain(5.0, 0.5, 11.5);
      const double g2 = critical_gain(5.0, 0.5, 10.5);
      bool ok = std::abs(g1 - 0.880) <= 1e-3 && std::abs(g2 - 0.9643) <= 1e-3;
      double worst = 0.0;
      for (double k : {2.0, 5.0})
        for (double a : {0.25, 0.5, 1.0})
          for (double nu : {8.53, 10.5, 41.8}) {
            const double lc = critical_gain(k, a, nu);
            const double disc = (k - a) * (k - a) - 4.0 * lc * a * nu;
            worst = std::max(worst, std::abs(disc));
          }
      ok = ok && worst <= 1e-9;
      detail << "crit(5,0.5,11.5)=" << fmt(g1) << " crit(5,0.5,10.5)=" << fmt(g2)
             << " max|disc|=" << worst;
      r.pass = ok;
      break;
    }

    case 2: {
      r.name = "damping regime: no overshoot critically damped, overshoot at doubled gain";
      // operating point: contact at the nasopharynx, where the shaft is
      // gripped ~50 mm from the load and far stiffer than at the tip
      const double depth = 0.0931;
      const double nu_np = stiffness(beam, std::clamp(beam.contact_length(depth),
                                                      beam.min_length(), beam.L_max));
      const double lam_matched = critical_gain(5.0, 0.5, nu_np);
      const double lam_s20 = 2.0 * critical_gain(5.0, 0.5, ControllerConfig{}.nu_tip);
      const double os_matched = step_response_overshoot(5.0, 0.5, nu_np, lam_matched);
      const double os_doubled = step_response_overshoot(5.0, 0.5, nu_np, lam_s20);
      r.pass = os_matched < 1e-3 && os_doubled > 0.05;
      detail << "nu_np=" << fmt(nu_np) << " overshoot(lambda_crit)=" << fmt(os_matched)
             << " overshoot(2x tip-derived)=" << fmt(os_doubled);
      break;
    }

    case 3: {
      r.name = "stiffness law fit recovery and nu(0.1376)";
      std::vector<std::pair<double, double>> pairs;
      for (double L = 0.095; L <= 0.1451; L += 0.005)
        pairs.emplace_back(L, 1.0 / (43.89 * L * L * L - 0.0193));
      const auto [m, b] = fit_stiffness_law(pairs);
      const double nu_check = stiffness(beam, 0.1376);
      r.pass = std::abs(m - 43.89) <= 1e-9 && std::abs(b + 0.0193) <= 1e-9 &&
               std::abs(nu_check - 10.5) <= 0.1;
      detail << "m=" << fmt(m) << " b=" << fmt(b) << " nu(0.1376)=" << fmt(nu_check);
      break;
    }

    case 4: {
      r.name = "head-motion stationary variance matches the Lyapunov oracle";
      const double dt = 0.01;
      const int steps = 100000;
      const int seeds = 20;
      const int burn = 5000;
      bool ok = true;
      for (const auto level : {MotionLevel::Light, MotionLevel::Medium, MotionLevel::Heavy}) {
        const OUParams p = motion_preset(level)[0];
        const double var_oracle = lyapunov_stationary(p.mu, p.psi, p.sigma)(0, 0);
        double sum = 0.0, sum2 = 0.0;
        long long count = 0;
        for (int s = 0; s < seeds; ++s) {
          RngStream rng(1000 + static_cast<std::uint64_t>(s), "ou-acceptance");
          double th = p.setpoint, v = 0.0;
          for (int i = 0; i < steps; ++i) {
            std::tie(th, v) = ou_step(th, v, p, dt, rng);
            if (i >= burn) {
              const double d = th - p.setpoint;
              sum += d;
              sum2 += d * d;
              ++count;
            }
          }
        }
        const double mean = sum / static_cast<double>(count);
        const double var = sum2 / static_cast<double>(count) - mean * mean;
        const double rel = std::abs(var - var_oracle) / var_oracle;
        detail << motion_name(level) << ": var=" << fmt(var) << " oracle=" << fmt(var_oracle)
               << " rel=" << fmt(rel) << "  ";
        ok = ok && rel <= 0.10;
      }
      {
        OUParams p = motion_preset(MotionLevel::Light)[0];
        p.sigma = 0.0;
        RngStream rng(7, "ou-deterministic");
        double th = p.setpoint + 0.3, v = 0.0;
        for (int i = 0; i < 2000; ++i) std::tie(th, v) = ou_step(th, v, p, dt, rng);
        ok = ok && std::abs(th - p.setpoint) < 1e-3;
        detail << "sigma=0 residual=" << fmt(std::abs(th - p.setpoint));
      }
      r.pass = ok;
      break;
    }

    case 5: {
      r.name = "fuzzy observer values and sigmoid identity";
      const auto d1 = fuzzy_eval(0.08, 0.323, cfg_.world.fuzzy);
      const auto d2 = fuzzy_eval(0.0931, 0.86, cfg_.world.fuzzy);
      double worst = 0.0;
      for (double x = -40.0; x <= 40.0; x += 0.01)
        worst = std::max(worst, std::abs(sigmoid_tanh(x) - logistic(x)));
      r.pass = std::abs(d1.output - 0.25) < 1e-15 && !d1.triggered &&
               std::abs(d2.output - 0.558) <= 0.002 && d2.triggered && worst < 1e-12;
      detail << "o(0.08,0.323)=" << fmt(d1.output) << " o(0.0931,0.86)=" << fmt(d2.output)
             << " max sigmoid diff=" << worst;
      break;
    }

    case 6: {
      r.name = "slowdown law and undisturbed track duration";
      const double r_half = 1.0 - logistic(kSlowdownScale * (0.5 - kSlowdownIntercept));
      const double r_zero = 1.0 - logistic(kSlowdownScale * (0.0 - kSlowdownIntercept));
      TrackCursor c;
      int steps = 0;
      const double dt = cfg_.world.sim.dt();
      while (!c.finished && steps < 4000) {
        c = advance_cursor(c, 0.0, dt, 20.0);
        ++steps;
      }
      r.pass = r_half == 0.5 && r_zero > 1.0 - 1e-12 && std::abs(steps - 2000) <= 1;
      detail << "rate(0.5N)=" << fmt(r_half) << " rate(0)=" << fmt(r_zero) << " steps=" << steps;
      break;
    }

    case 7: {
      r.name = "band-pass step response peak time and zero steady state";
      BandpassState bp;
      const double dt = cfg_.world.sim.dt();
      double peak = 0.0, t_peak = 0.0, final_diff = 0.0;
      for (int i = 1; i <= 2000; ++i) {
        auto [next, repel] = bandpass_step(bp, Vec3(1.0, 0.0, 0.0), dt, cfg_.world.servo);
        bp = next;
        const double diff = (bp.f1 - bp.f2).x();
        if (diff > peak) {
          peak = diff;
          t_peak = i * dt;
        }
        final_diff = std::abs(diff);
      }
      r.pass = std::abs(t_peak - 1.488) <= 0.02 && final_diff < 1e-3;
      detail << "peak t=" << fmt(t_peak) << " peak=" << fmt(peak)
             << " |f1-f2|(20s)=" << fmt(final_diff);
      break;
    }

    case 8: {
      r.name = "oscillation coefficient: on-bin sine, DC, linearity";
      const int n = 1500;
      const double rate = 100.0;
      std::vector<double> sine(n), dc(n, 0.7), mix(n);
      for (int i = 0; i < n; ++i) {
        sine[static_cast<std::size_t>(i)] = std::sin(2.0 * M_PI * 2.0 * i / rate);
        mix[static_cast<std::size_t>(i)] = 0.4 * std::sin(2.0 * M_PI * 1.3 * i / rate) +
                                           0.2 * std::sin(2.0 * M_PI * 3.7 * i / rate + 0.5);
      }
      const double c_sine = oscillation_coefficient(sine, rate);
      const double c_dc = oscillation_coefficient(dc, rate);
      std::vector<double> scaled = mix;
      for (auto& v : scaled) v *= 2.5;
      const double c_mix = oscillation_coefficient(mix, rate);
      const double c_scaled = oscillation_coefficient(scaled, rate);
      const double lin_err = std::abs(c_scaled - 2.5 * c_mix) / c_scaled;
      r.pass = std::abs(c_sine - 750.0) <= 1.0 && c_dc < 1e-6 && lin_err <= 1e-9;
      detail << "sine=" << fmt(c_sine) << " dc=" << c_dc << " lin_rel_err=" << lin_err;
      break;
    }

    case 9: {
      r.name = "safety aborts: wedge in window, none past it, overload anywhere";
      WorldConfig wc = cfg_.world;
      wc.spec = TrialSpec{"D2.0", MotionLevel::None, PhantomId::A, Side::Left, 42, 0};
      wc.vision_noise_sigma = 0.0;
      wc.vision_dropout = 0.0;

      auto release_latency = [](const TrialRecord& rec, double threshold) {
        double t_exceed = -1.0, t_release = -1.0;
        for (const auto& s : rec.series)
          if (s.force_raw.norm() > threshold) {
            t_exceed = s.t;
            break;
          }
        for (const auto& [t, msg] : rec.events)
          if (msg.find("swab_released") != std::string::npos) {
            t_release = t;
            break;
          }
        if (t_exceed < 0.0 || t_release < 0.0) return 1e9;
        return t_release - t_exceed;
      };

      WorldConfig wa = wc;
      wa.force_override = ForceOverride{0.018, 0.022, Vec3(0.6, 0.0, 0.0)};
      const TrialRecord ra = run_trial(wa);
      const double lat_a = release_latency(ra, 0.5);

      WorldConfig wb = wc;
      wb.force_override = ForceOverride{0.055, 0.065, Vec3(0.6, 0.0, 0.0)};
      const TrialRecord rb = run_trial(wb);

      WorldConfig wo = wc;
      wo.force_override = ForceOverride{0.030, 0.040, Vec3(2.6, 0.0, 0.0)};
      const TrialRecord ro = run_trial(wo);
      const double lat_o = release_latency(ro, 2.5);

      r.pass = ra.outcome == Outcome::WedgeAbort && lat_a <= 0.2 && !rb.abort.has_value() &&
               rb.outcome == Outcome::ReachedNP && ro.outcome == Outcome::Overload && lat_o <= 0.2;
      detail << "wedge@20mm: " << outcome_name(ra.outcome) << " latency=" << fmt(lat_a)
             << "; 0.6N@60mm: " << outcome_name(rb.outcome)
             << "; 2.6N: " << outcome_name(ro.outcome) << " latency=" << fmt(lat_o);
      break;
    }

    case 10: {
      r.name = "stats oracles: one-way F identity, chi-square, Bonferroni";
      RngStream rng(99, "anova-oracle");
      std::vector<std::vector<double>> groups(2);
      std::vector<AnovaRow> rows;
      for (int g = 0; g < 2; ++g) {
        const int size = g == 0 ? 12 : 15;
        for (int i = 0; i < size; ++i) {
          const double v = (g == 0 ? 1.0 : 2.5) + rng.normal();
          groups[static_cast<std::size_t>(g)].push_back(v);
          rows.push_back({{g == 0 ? "a" : "b", "x", "x", "x"}, v});
        }
      }
      const double f_oracle = oneway_f(groups);
      const auto tests = anova4(rows, {"g", "c1", "c2", "c3"});
      const double f_model = tests[0].statistic;
      const bool excluded_ok = tests[1].excluded && tests[2].excluded && tests[3].excluded;

      const auto chi = chi2_independence({{50.0, 0.0}, {0.0, 50.0}});

      r.pass = std::abs(f_model - f_oracle) <= 1e-9 && excluded_ok &&
               std::abs(chi.chi2 - 100.0) <= 1e-9 && chi.dof == 1 &&
               kBonferroniCritical == 0.0125;
      detail << "F model=" << fmt(f_model) << " oracle=" << fmt(f_oracle)
             << " chi2=" << fmt(chi.chi2) << " dof=" << chi.dof
             << " bonferroni=" << kBonferroniCritical;
      break;
    }

    case 11: {
      r.name = "matrix trends: success gap, gain-ordered forces, motion-ordered oscillation";
      const MatrixResult& m = matrix_once();
      const double gap = m.success_rate("D2.0") - m.success_rate("D1.0");

      const auto& order = controller_names_by_np_gain();
      int inversions = 0;
      std::ostringstream forces;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double a = m.mean_s2_transverse(order[i]);
        const double b = m.mean_s2_transverse(order[i + 1]);
        forces << order[i] << "=" << fmt(a) << " ";
        if (!(std::isfinite(a) && std::isfinite(b))) {
          inversions = 99;
          break;
        }
        if (b > a) ++inversions;
      }
      forces << order.back() << "=" << fmt(m.mean_s2_transverse(order.back()));

      int heavy_gt_light = 0, comparable = 0;
      for (const auto& c : order) {
        const double h = m.mean_oscillation(c, MotionLevel::Heavy);
        const double l = m.mean_oscillation(c, MotionLevel::Light);
        if (std::isfinite(h) && std::isfinite(l)) {
          ++comparable;
          if (h > l) ++heavy_gt_light;
        }
      }

      r.pass = gap >= 0.15 && inversions <= 1 && heavy_gt_light >= 5 && comparable == 6 &&
               m.fault_count == 0;
      detail << "success D2.0-D1.0=" << fmt(gap) << "; s2 transverse by np gain: " << forces.str()
             << "; inversions=" << inversions << "; heavy>light " << heavy_gt_light << "/"
             << comparable << "; faults=" << m.fault_count;
      break;
    }

    case 12: {
      r.name = "determinism: identical matrix bytes for the same master seed";
      const MatrixResult& a = matrix_once();
      MatrixConfig mc = cfg_.matrix_config();
      mc.out_dir.clear();
      mc.emit_timeseries = false;
      const MatrixResult b = run_matrix(mc);
      const bool same = a.measures_csv() == b.measures_csv() &&
                        a.trials_jsonl() == b.trials_jsonl();
      r.pass = same;
      detail << (same ? "byte-identical" : "outputs differ");
      break;
    }

    default:
      throw std::invalid_argument("unknown criterion id");
  }

  r.detail = detail.str();
  return r;
}

bool SelfTest::run_all(std::ostream& out) {
  bool all = true;
  for (int id = 1; id <= criterion_count(); ++id) {
    const CriterionResult res = run_criterion(id);
    all = all && res.pass;
    out << (res.pass ? "[PASS] " : "[FAIL] ") << res.id << ": " << res.name << " (" << res.detail
        << ")\n";
  }
  return all;
}

}  // namespace swabsim
