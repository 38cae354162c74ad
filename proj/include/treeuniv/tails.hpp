#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "treeuniv/error.hpp"
#include "treeuniv/rng.hpp"

namespace treeuniv {

enum class TailDist { Binomial, Hypergeometric };

// binomial(n, p) or hypergeometric(n, m, l): l draws without replacement
// from n items of which m are marked.
struct TailSpec {
  TailDist dist = TailDist::Binomial;
  std::size_t n = 0;
  double p = 0.5;
  std::size_t marked = 0;
  std::size_t draws = 0;
  double eps = 0.5;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};

struct TailReport {
  TailSpec spec;
  double mean = 0;
  double threshold = 0;  // eps * mean
  std::size_t exceed = 0;
  double estimate = 0;
  double exact_tail = 0;
  double bound = 0;
  double sigma = 0;
  bool violation = false;  // estimate above bound by more than 5 sigma
};

inline std::string describe(const TailSpec& s) {
  if (s.dist == TailDist::Binomial) {
    return "binomial(" + std::to_string(s.n) + "," + nlohmann::json(s.p).dump() + ")";
  }
  return "hypergeometric(" + std::to_string(s.n) + "," + std::to_string(s.marked) + "," + std::to_string(s.draws) + ")";
}

namespace detail {

inline double log_choose(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

// Probability mass over 0..support-1.
inline std::vector<double> tail_pmf(const TailSpec& s) {
  std::vector<double> pmf;
  if (s.dist == TailDist::Binomial) {
    pmf.resize(s.n + 1);
    for (std::size_t k = 0; k <= s.n; ++k) {
      if (s.p <= 0 || s.p >= 1) {
        pmf[k] = (s.p <= 0 ? k == 0 : k == s.n) ? 1.0 : 0.0;
        continue;
      }
      const double kd = static_cast<double>(k);
      const double nd = static_cast<double>(s.n);
      pmf[k] = std::exp(log_choose(nd, kd) + kd * std::log(s.p) + (nd - kd) * std::log1p(-s.p));
    }
  } else {
    pmf.assign(s.draws + 1, 0.0);
    const double nd = static_cast<double>(s.n);
    const double md = static_cast<double>(s.marked);
    const double ld = static_cast<double>(s.draws);
    for (std::size_t k = 0; k <= s.draws; ++k) {
      const double kd = static_cast<double>(k);
      if (k > s.marked || s.draws - k > s.n - s.marked) continue;
      pmf[k] = std::exp(log_choose(md, kd) + log_choose(nd - md, ld - kd) - log_choose(nd, ld));
    }
  }
  return pmf;
}

}  // namespace detail

inline void validate(const TailSpec& s) {
  if (!(s.eps > 0) || s.eps > 1.5) throw InputError("eps must lie in (0, 3/2]");
  if (s.samples == 0) throw InputError("samples must be positive");
  if (s.dist == TailDist::Binomial) {
    if (s.n == 0) throw InputError("binomial n must be positive");
    if (!(s.p >= 0 && s.p <= 1)) throw InputError("binomial p must lie in [0, 1]");
  } else {
    if (s.marked > s.n || s.draws > s.n) throw InputError("hypergeometric needs m <= n and l <= n");
  }
}

// Monte-Carlo estimate of P[|X - E X| > eps E X] against exp(-eps^2 E X / 3).
// Sampling inverts the tabulated distribution function with one uniform per draw.
inline TailReport run_tailcheck(const TailSpec& s) {
  validate(s);
  TailReport r;
  r.spec = s;
  r.mean = s.dist == TailDist::Binomial
               ? static_cast<double>(s.n) * s.p
               : static_cast<double>(s.draws) * static_cast<double>(s.marked) / static_cast<double>(s.n);
  r.threshold = s.eps * r.mean;
  r.bound = std::exp(-s.eps * s.eps * r.mean / 3.0);
  const auto pmf = detail::tail_pmf(s);
  std::vector<double> cdf(pmf.size());
  double acc = 0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    acc += pmf[k];
    cdf[k] = acc;
    if (std::fabs(static_cast<double>(k) - r.mean) > r.threshold) r.exact_tail += pmf[k];
  }
  Rng rng(s.seed);
  for (std::size_t i = 0; i < s.samples; ++i) {
    const double u = rng.unit() * acc;
    auto k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    k = std::min(k, cdf.size() - 1);
    if (std::fabs(static_cast<double>(k) - r.mean) > r.threshold) ++r.exceed;
  }
  const double ns = static_cast<double>(s.samples);
  r.estimate = static_cast<double>(r.exceed) / ns;
  const double pb = std::clamp(r.bound, 0.0, 1.0);
  r.sigma = std::sqrt(std::max(pb * (1 - pb), 1.0 / ns) / ns);
  r.violation = r.estimate > r.bound + 5 * r.sigma;
  return r;
}

inline nlohmann::json to_json(const TailReport& r) {
  return {{"distribution", describe(r.spec)},
          {"eps", r.spec.eps},
          {"samples", r.spec.samples},
          {"seed", r.spec.seed},
          {"mean", r.mean},
          {"deviation_threshold", r.threshold},
          {"exceedances", r.exceed},
          {"empirical_tail", r.estimate},
          {"exact_tail", r.exact_tail},
          {"bound", r.bound},
          {"sigma", r.sigma},
          {"violation", r.violation}};
}

}  // namespace treeuniv
