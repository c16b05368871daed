#include "swabsim/matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace swabsim {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

const std::array<std::string, 4> kFactorNames = {"Control", "Head motion", "Side", "Phantom"};

std::array<std::string, 4> factor_levels(const TrialSpec& s) {
  return {s.controller, motion_name(s.motion), side_name(s.side), phantom_name(s.phantom)};
}

struct Welford {
  double mean = 0.0, m2 = 0.0;
  int n = 0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double stdev() const { return n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0; }
};

}  // namespace

std::vector<TrialSpec> build_matrix_specs(const MatrixConfig& cfg) {
  static const std::array<std::string, 6> controllers = {"S1.0", "S1.5", "S2.0",
                                                         "D1.0", "D1.5", "D2.0"};
  static const std::array<MotionLevel, 3> motions = {MotionLevel::Light, MotionLevel::Medium,
                                                     MotionLevel::Heavy};
  static const std::array<PhantomId, 2> phantoms = {PhantomId::A, PhantomId::B};
  static const std::array<Side, 2> sides = {Side::Left, Side::Right};

  std::vector<TrialSpec> specs;
  for (const auto& c : controllers)
    for (const auto m : motions)
      for (const auto ph : phantoms)
        for (const auto sd : sides) {
          const int repeats = (sd == Side::Left) ? cfg.left_repeats : cfg.right_repeats;
          for (int r = 0; r < repeats; ++r) {
            TrialSpec s;
            s.controller = c;
            s.motion = m;
            s.phantom = ph;
            s.side = sd;
            s.repeat_index = r;
            s.seed = s.derived_seed(cfg.master_seed);
            specs.push_back(s);
          }
        }
  // non-repeated no-motion reference trials, one per (controller, phantom, side)
  for (const auto& c : controllers)
    for (const auto ph : phantoms)
      for (const auto sd : sides) {
        TrialSpec s;
        s.controller = c;
        s.motion = MotionLevel::None;
        s.phantom = ph;
        s.side = sd;
        s.repeat_index = 0;
        s.seed = s.derived_seed(cfg.master_seed);
        specs.push_back(s);
      }
  return specs;
}

MatrixResult run_matrix(const MatrixConfig& cfg) {
  const std::vector<TrialSpec> specs = build_matrix_specs(cfg);
  MatrixResult result;
  result.master_seed = cfg.master_seed;
  result.trials.resize(specs.size());

  const bool write_out = !cfg.out_dir.empty();
  if (write_out) std::filesystem::create_directories(cfg.out_dir + "/timeseries");

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) break;
      TrialResult tr;
      tr.spec = specs[i];
      try {
        WorldConfig wc = cfg.base;
        wc.spec = specs[i];
        TrialRecord rec = run_trial(wc);
        tr.outcome = rec.outcome;
        tr.reached = rec.reached;
        tr.measures = compute_measures(rec);
        if (cfg.emit_timeseries && write_out) {
          std::ofstream ts(cfg.out_dir + "/timeseries/trial_" + std::to_string(i) + ".csv");
          ts << rec.series_to_csv();
        }
      } catch (const std::exception& e) {
        tr.outcome = Outcome::Faulted;
        tr.fault = e.what();
      }
      result.trials[i] = std::move(tr);
    }
  };

  int workers = cfg.workers > 0 ? cfg.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(specs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (const auto& tr : result.trials) {
    if (tr.outcome == Outcome::Faulted) ++result.fault_count;
    if (tr.spec.motion == MotionLevel::None) ++result.none_trial_count;
  }

  if (write_out) {
    std::ofstream(cfg.out_dir + "/measures.csv") << result.measures_csv();
    std::ofstream(cfg.out_dir + "/trials.jsonl") << result.trials_jsonl();
    std::ofstream(cfg.out_dir + "/summary.txt") << result.summary_text();
    std::ofstream(cfg.out_dir + "/stats.txt") << result.stats().to_text();
  }
  return result;
}

std::string MatrixResult::measures_csv() const {
  std::ostringstream os;
  os << "controller,motion,phantom,side,seed,repeat,outcome,reached,"
        "s1_transverse,s1_axial,time_to_np,s2_transverse,s2_axial,oscillation\n";
  for (const auto& t : trials) {
    os << t.spec.controller << "," << motion_name(t.spec.motion) << ","
       << phantom_name(t.spec.phantom) << "," << side_name(t.spec.side) << "," << t.spec.seed
       << "," << t.spec.repeat_index << "," << outcome_name(t.outcome) << ","
       << (t.reached ? 1 : 0) << "," << opt_fmt(t.measures.s1_transverse) << ","
       << opt_fmt(t.measures.s1_axial) << "," << opt_fmt(t.measures.time_to_np) << ","
       << opt_fmt(t.measures.s2_transverse) << "," << opt_fmt(t.measures.s2_axial) << ","
       << opt_fmt(t.measures.oscillation) << "\n";
  }
  return os.str();
}

std::string MatrixResult::trials_jsonl() const {
  std::ostringstream os;
  for (const auto& t : trials) {
    os << "{\"controller\":\"" << t.spec.controller << "\",\"motion\":\""
       << motion_name(t.spec.motion) << "\",\"phantom\":\"" << phantom_name(t.spec.phantom)
       << "\",\"side\":\"" << side_name(t.spec.side) << "\",\"seed\":" << t.spec.seed
       << ",\"repeat\":" << t.spec.repeat_index << ",\"outcome\":\"" << outcome_name(t.outcome)
       << "\",\"reached\":" << (t.reached ? "true" : "false");
    if (!t.fault.empty()) os << ",\"fault\":\"" << t.fault << "\"";
    os << "}\n";
  }
  return os.str();
}

double MatrixResult::success_rate(const std::string& controller) const {
  int n = 0, ok = 0;
  for (const auto& t : trials) {
    if (t.spec.controller != controller) continue;
    ++n;
    if (t.reached) ++ok;
  }
  return n > 0 ? static_cast<double>(ok) / n : 0.0;
}

double MatrixResult::mean_s2_transverse(const std::string& controller) const {
  Welford w;
  for (const auto& t : trials)
    if (t.spec.controller == controller && t.measures.s2_transverse) w.add(*t.measures.s2_transverse);
  return w.n > 0 ? w.mean : std::nan("");
}

double MatrixResult::mean_oscillation(const std::string& controller, MotionLevel motion) const {
  Welford w;
  for (const auto& t : trials)
    if (t.spec.controller == controller && t.spec.motion == motion && t.measures.oscillation)
      w.add(*t.measures.oscillation);
  return w.n > 0 ? w.mean : std::nan("");
}

namespace {

struct MeasureColumn {
  const char* name;
  std::function<std::optional<double>(const TrialResult&)> get;
};

const std::vector<MeasureColumn>& measure_columns() {
  static const std::vector<MeasureColumn> cols = {
      {"i) Transverse force s1", [](const TrialResult& t) { return t.measures.s1_transverse; }},
      {"ii) Axial force s1", [](const TrialResult& t) { return t.measures.s1_axial; }},
      {"iii) Time to NP", [](const TrialResult& t) { return t.measures.time_to_np; }},
      {"v) Transverse force s2", [](const TrialResult& t) { return t.measures.s2_transverse; }},
      {"vi) Axial force s2", [](const TrialResult& t) { return t.measures.s2_axial; }},
      {"vii) Oscillation coef.", [](const TrialResult& t) { return t.measures.oscillation; }},
  };
  return cols;
}

std::vector<std::string> factor_level_order(const std::vector<TrialResult>& trials, int f) {
  std::vector<std::string> order;
  for (const auto& t : trials) {
    const auto lv = factor_levels(t.spec)[static_cast<std::size_t>(f)];
    if (std::find(order.begin(), order.end(), lv) == order.end()) order.push_back(lv);
  }
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

StatsReport MatrixResult::stats() const {
  StatsReport report;
  for (const auto& col : measure_columns()) {
    std::vector<AnovaRow> rows;
    for (const auto& t : trials) {
      if (t.outcome == Outcome::Faulted) continue;
      const auto v = col.get(t);
      if (!v) continue;
      rows.push_back({factor_levels(t.spec), *v});
    }
    if (rows.size() >= 8) report.anova[col.name] = anova4(rows, kFactorNames);
  }

  for (int f = 0; f < 4; ++f) {
    const auto levels = factor_level_order(trials, f);
    if (levels.size() < 2) continue;
    std::vector<std::vector<double>> table(levels.size(), std::vector<double>(2, 0.0));
    for (const auto& t : trials) {
      if (t.outcome == Outcome::Faulted) continue;
      const auto lv = factor_levels(t.spec)[static_cast<std::size_t>(f)];
      const auto it = std::find(levels.begin(), levels.end(), lv);
      table[static_cast<std::size_t>(it - levels.begin())][t.reached ? 0 : 1] += 1.0;
    }
    try {
      report.reached_chi2[kFactorNames[static_cast<std::size_t>(f)]] = chi2_independence(table);
    } catch (const std::invalid_argument&) {
      // all-reached or none-reached margins make the test degenerate; skip
    }
  }
  return report;
}

std::string StatsReport::to_text() const {
  std::ostringstream os;
  os << "Statistical tests (critical p after Bonferroni correction: " << fmt(bonferroni) << ")\n";
  for (const auto& [measure, tests] : anova) {
    os << "\n" << measure << " (four-way ANOVA)\n";
    for (const auto& t : tests) {
      if (t.excluded) {
        os << "  " << t.factor << ": excluded (single level)\n";
        continue;
      }
      os << "  " << t.factor << ": F(" << t.df1 << "," << t.df2 << ") = " << fmt(t.statistic)
         << ", p = " << fmt(t.p) << (t.p < bonferroni ? " *" : "") << "\n";
    }
  }
  os << "\niv) Reached NP (chi-square)\n";
  for (const auto& [factor, r] : reached_chi2) {
    os << "  " << factor << ": chi2(" << r.dof << ") = " << fmt(r.chi2) << ", p = " << fmt(r.p)
       << (r.p < bonferroni ? " *" : "") << "\n";
  }
  return os.str();
}

std::string MatrixResult::summary_text() const {
  std::ostringstream os;
  os << "Trials: " << trials.size() << " (" << none_trial_count
     << " no-motion reference trials), faults: " << fault_count << ", master seed "
     << master_seed << "\n";

  for (int f = 0; f < 4; ++f) {
    os << "\n== By " << kFactorNames[static_cast<std::size_t>(f)] << " ==\n";
    const auto levels = factor_level_order(trials, f);
    for (const auto& lv : levels) {
      os << "  " << lv << ":";
      for (const auto& col : measure_columns()) {
        Welford w;
        for (const auto& t : trials) {
          if (t.outcome == Outcome::Faulted) continue;
          if (factor_levels(t.spec)[static_cast<std::size_t>(f)] != lv) continue;
          if (const auto v = col.get(t)) w.add(*v);
        }
        if (w.n > 0) os << "  " << col.name << " = " << fmt(w.mean) << " +- " << fmt(w.stdev());
      }
      int n = 0, ok = 0;
      for (const auto& t : trials) {
        if (factor_levels(t.spec)[static_cast<std::size_t>(f)] != lv) continue;
        ++n;
        if (t.reached) ++ok;
      }
      os << "  success = " << fmt(n > 0 ? static_cast<double>(ok) / n : 0.0) << " (" << ok << "/"
         << n << ")\n";
    }
  }
  return os.str();
}

std::vector<TrialResult> parse_measures_csv(const std::string& csv_text) {
  std::vector<TrialResult> out;
  std::istringstream in(csv_text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    cells.resize(14);
    TrialResult t;
    t.spec.controller = cells[0];
    t.spec.motion = parse_motion(cells[1]);
    t.spec.phantom = parse_phantom(cells[2]);
    t.spec.side = parse_side(cells[3]);
    t.spec.seed = std::stoull(cells[4]);
    t.spec.repeat_index = std::stoi(cells[5]);
    for (int o = 0; o < 6; ++o)
      if (cells[6] == outcome_name(static_cast<Outcome>(o))) t.outcome = static_cast<Outcome>(o);
    t.reached = cells[7] == "1";
    t.measures.reached = t.reached;
    if (!cells[8].empty()) t.measures.s1_transverse = std::stod(cells[8]);
    if (!cells[9].empty()) t.measures.s1_axial = std::stod(cells[9]);
    if (!cells[10].empty()) t.measures.time_to_np = std::stod(cells[10]);
    if (!cells[11].empty()) t.measures.s2_transverse = std::stod(cells[11]);
    if (!cells[12].empty()) t.measures.s2_axial = std::stod(cells[12]);
    if (!cells[13].empty()) t.measures.oscillation = std::stod(cells[13]);
    out.push_back(std::move(t));
  }
  return out;
}

StatsReport stats_from_csv(const std::string& csv_text) {
  MatrixResult r;
  r.trials = parse_measures_csv(csv_text);
  return r.stats();
}

}  // namespace swabsim
