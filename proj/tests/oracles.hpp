#pragma once

// Independent reference implementations used to check the library. They
// favor directness over speed: explicit enumeration, textbook formulas, no
// shared code with src/.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Score {
  double score;
  double uncond_avg;
  double cond_avg;
  std::size_t dep_size;
  bool degenerate;
};

// mode: 0 full, 1 uncond_only, 2 cond_only, 3 max_ci.
// cond(i, j) gives the conditional probability of candidate i given j.
template <typename Cond>
Score causal_score(const std::vector<double>& uncond, Cond cond, int mode) {
  std::vector<std::size_t> dep;
  for (std::size_t i = 0; i < uncond.size(); ++i) {
    if (uncond[i] > 0.5) dep.push_back(i);
  }
  Score s{0, 0, 0, dep.size(), dep.size() < 2};
  if (dep.empty()) {
    double sum = 0;
    for (double p : uncond) sum += p;
    s.uncond_avg = uncond.empty() ? 0.0 : sum / static_cast<double>(uncond.size());
    s.cond_avg = s.score = s.uncond_avg;
    return s;
  }
  double usum = 0;
  for (auto i : dep) usum += uncond[i];
  s.uncond_avg = usum / static_cast<double>(dep.size());
  if (dep.size() == 1) {
    s.cond_avg = s.score = s.uncond_avg;
    return s;
  }
  double csum = 0, cmax = -1;
  std::size_t count = 0;
  for (std::size_t a = 0; a < dep.size(); ++a) {
    for (std::size_t b = 0; b < dep.size(); ++b) {
      if (a == b) continue;
      const double v = cond(dep[a], dep[b]);
      csum += v;
      cmax = std::max(cmax, v);
      ++count;
    }
  }
  const double cmean = csum / static_cast<double>(count);
  switch (mode) {
    case 0: s.cond_avg = cmean; s.score = 0.5 * (s.uncond_avg + cmean); break;
    case 1: s.cond_avg = cmean; s.score = s.uncond_avg; break;
    case 2: s.cond_avg = cmean; s.score = cmean; break;
    default: s.cond_avg = cmax; s.score = 0.5 * (s.uncond_avg + cmax); break;
  }
  return s;
}

// Textbook product-moment correlation with a two-pass mean.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Average ranks by counting: rank = #smaller + (#equal + 1) / 2.
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, equal = 0;
    for (double v : x) {
      if (v < x[i]) less += 1;
      if (v == x[i]) equal += 1;
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

// Nominal Krippendorff alpha by enumerating all ordered value pairs within
// units: alpha = 1 - (n - 1) * sum_u (mismatched pairs_u / (m_u - 1)) / mismatched pairs overall.
inline double alpha_nominal(const std::vector<std::vector<std::string>>& units) {
  double n = 0, within = 0;
  std::vector<std::string> pooled;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    n += static_cast<double>(u.size());
    double mismatched = 0;
    for (std::size_t a = 0; a < u.size(); ++a) {
      for (std::size_t b = 0; b < u.size(); ++b) {
        if (a != b && u[a] != u[b]) mismatched += 1;
      }
    }
    within += mismatched / static_cast<double>(u.size() - 1);
    pooled.insert(pooled.end(), u.begin(), u.end());
  }
  double between = 0;
  for (std::size_t a = 0; a < pooled.size(); ++a) {
    for (std::size_t b = 0; b < pooled.size(); ++b) {
      if (a != b && pooled[a] != pooled[b]) between += 1;
    }
  }
  const double d_o = within / n;
  const double d_e = between / (n * (n - 1));
  if (d_o == 0) return 1.0;
  return 1.0 - d_o / d_e;
}

inline double kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const double n = static_cast<double>(a.size());
  double agree = 0;
  std::map<std::string, double> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) agree += 1;
    ca[a[i]] += 1;
    cb[b[i]] += 1;
  }
  double pe = 0;
  for (const auto& [label, count] : ca) pe += (count / n) * (cb.count(label) ? cb.at(label) / n : 0.0);
  const double po = agree / n;
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1 - pe);
}

}  // namespace oracle
