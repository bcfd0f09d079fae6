#include <boost/math/distributions/fisher_f.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "splitguard/errors.hpp"
#include "splitguard/evalsim.hpp"

namespace splitguard {

SchemeComparison oneway_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error(Errc::insufficient_groups, "ANOVA needs at least two groups");
  std::size_t n_total = 0;
  std::vector<double> means;
  for (const auto& g : groups) {
    if (g.size() < 2) throw Error(Errc::insufficient_groups, "every ANOVA group needs at least two values");
    double s = 0.0;
    for (double x : g) s += x;
    means.push_back(s / static_cast<double>(g.size()));
    n_total += g.size();
  }

  bool equal_means = true;
  for (double mu : means) equal_means = equal_means && mu == means.front();

  double grand = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) grand += means[i] * static_cast<double>(groups[i].size());
  grand /= static_cast<double>(n_total);

  double ss_between = 0.0, ss_within = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!equal_means) ss_between += static_cast<double>(groups[i].size()) * (means[i] - grand) * (means[i] - grand);
    // Constant groups contribute exactly zero.
    const auto& g = groups[i];
    if (std::all_of(g.begin(), g.end(), [&](double x) { return x == g.front(); })) continue;
    for (double x : g) ss_within += (x - means[i]) * (x - means[i]);
  }

  SchemeComparison out;
  out.df_between = static_cast<int>(groups.size()) - 1;
  out.df_within = static_cast<int>(n_total - groups.size());
  if (ss_between == 0.0) {
    out.statistic = 0.0;
    out.p_value = 1.0;
  } else if (ss_within == 0.0) {
    out.statistic = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
  } else {
    out.statistic = (ss_between / out.df_between) / (ss_within / out.df_within);
    boost::math::fisher_f dist(out.df_between, out.df_within);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  }
  return out;
}

SchemeComparison compare_schemes(std::span<const CvResult> results) {
  std::vector<std::vector<double>> groups;
  for (const auto& r : results) {
    std::vector<double> acc;
    for (const auto& m : r.per_fold) acc.push_back(m.accuracy);
    groups.push_back(std::move(acc));
  }
  return oneway_anova(groups);
}

}  // namespace splitguard
