#include "swabsim/stats.hpp"

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace swabsim {

double f_distribution_sf(double f_stat, int df1, int df2) {
  if (f_stat <= 0.0) return 1.0;
  boost::math::fisher_f_distribution<double> dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, f_stat));
}

double chi2_distribution_sf(double x, int dof) {
  if (x <= 0.0) return 1.0;
  boost::math::chi_squared_distribution<double> dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

namespace {

double rss_of_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  return (y - x * beta).squaredNorm();
}

}  // namespace

std::vector<FactorTest> anova4(const std::vector<AnovaRow>& data,
                               const std::array<std::string, 4>& factor_names) {
  const std::size_t n = data.size();
  if (n < 3) throw std::invalid_argument("anova4: too few observations");

  // sorted unique levels per factor, dropping the first as reference
  std::array<std::vector<std::string>, 4> levels;
  for (int f = 0; f < 4; ++f) {
    std::set<std::string> uniq;
    for (const auto& row : data) uniq.insert(row.factors[f]);
    levels[f].assign(uniq.begin(), uniq.end());
  }

  std::array<bool, 4> included;
  std::array<int, 4> df_factor{};
  int p_full = 1;
  for (int f = 0; f < 4; ++f) {
    included[f] = levels[f].size() >= 2;
    df_factor[f] = included[f] ? static_cast<int>(levels[f].size()) - 1 : 0;
    p_full += df_factor[f];
  }

  auto build = [&](int skip) {
    int cols = 1;
    for (int f = 0; f < 4; ++f)
      if (included[f] && f != skip) cols += df_factor[f];
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), cols);
    x.col(0).setOnes();
    for (std::size_t i = 0; i < n; ++i) {
      int c = 1;
      for (int f = 0; f < 4; ++f) {
        if (!included[f] || f == skip) continue;
        const auto& lv = levels[f];
        const auto it = std::find(lv.begin(), lv.end(), data[i].factors[f]);
        const int idx = static_cast<int>(it - lv.begin());
        if (idx > 0) x(static_cast<Eigen::Index>(i), c + idx - 1) = 1.0;
        c += df_factor[f];
      }
    }
    return x;
  };

  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = data[i].value;

  const double rss_full = rss_of_fit(build(-1), y);
  const int df_resid = static_cast<int>(n) - p_full;
  if (df_resid <= 0) throw std::invalid_argument("anova4: no residual degrees of freedom");

  std::vector<FactorTest> out;
  for (int f = 0; f < 4; ++f) {
    FactorTest t;
    t.factor = factor_names[f];
    if (!included[f]) {
      t.excluded = true;
      out.push_back(t);
      continue;
    }
    const double rss_red = rss_of_fit(build(f), y);
    const double ss = std::max(0.0, rss_red - rss_full);
    t.df1 = df_factor[f];
    t.df2 = df_resid;
    const double mse = rss_full / df_resid;
    // identical observations leave no variance to explain
    t.statistic = (mse > 0.0) ? (ss / t.df1) / mse : 0.0;
    t.p = f_distribution_sf(t.statistic, t.df1, t.df2);
    out.push_back(t);
  }
  return out;
}

Chi2Result chi2_independence(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2) throw std::invalid_argument("chi2_independence: need at least 2 rows");
  const std::size_t cols = table.front().size();
  if (cols < 2) throw std::invalid_argument("chi2_independence: need at least 2 columns");

  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (table[r].size() != cols) throw std::invalid_argument("chi2_independence: ragged table");
    for (std::size_t c = 0; c < cols; ++c) {
      if (table[r][c] < 0.0) throw std::invalid_argument("chi2_independence: negative count");
      row_sum[r] += table[r][c];
      col_sum[c] += table[r][c];
      total += table[r][c];
    }
  }
  for (double s : row_sum)
    if (!(s > 0.0)) throw std::invalid_argument("chi2_independence: zero row margin");
  for (double s : col_sum)
    if (!(s > 0.0)) throw std::invalid_argument("chi2_independence: zero column margin");

  Chi2Result res;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double expected = row_sum[r] * col_sum[c] / total;
      const double d = table[r][c] - expected;
      res.chi2 += d * d / expected;
    }
  res.dof = static_cast<int>((rows - 1) * (cols - 1));
  res.p = chi2_distribution_sf(res.chi2, res.dof);
  return res;
}

}  // namespace swabsim
