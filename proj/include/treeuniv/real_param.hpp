#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "treeuniv/error.hpp"

namespace treeuniv {

// A real-valued parameter (expansion factor d, degree bound Delta, ...).
//
// Comparisons of the form `count >= value * k` are the hot path of every
// expansion check, and a float rounding error there flips verdicts on the
// boundary. When the value is a rational with a modest denominator the
// comparison is done exactly in integers; otherwise it falls back to an
// absolute tolerance of 1e-9.
class RealParam {
 public:
  static constexpr double kTolerance = 1e-9;
  static constexpr std::int64_t kMaxDenominator = 1'000'000;

  RealParam() = default;

  RealParam(double value) : value_(value) {  // NOLINT: implicit by intent
    if (!std::isfinite(value)) throw InputError("parameter must be finite");
    exact_ = approximate(value);
  }

  static RealParam ratio(std::int64_t num, std::int64_t den) {
    if (den <= 0) throw InputError("ratio denominator must be positive");
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    RealParam r;
    r.value_ = static_cast<double>(num) / static_cast<double>(den);
    r.exact_ = Ratio{num / g, den / g};
    return r;
  }

  // Accepts "3", "3.25", "-0.5", "7/2". Decimal strings are kept exact.
  static RealParam parse(const std::string& text) {
    const auto slash = text.find('/');
    try {
      if (slash != std::string::npos) {
        return ratio(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
      }
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw InputError("trailing characters in number: " + text);
      const auto dot = text.find('.');
      const bool plain = text.find_first_of("eEnN") == std::string::npos;
      if (plain && dot != std::string::npos) {
        const std::size_t digits = text.size() - dot - 1;
        if (digits <= 9) {
          std::int64_t den = 1;
          for (std::size_t i = 0; i < digits; ++i) den *= 10;
          std::string joined = text.substr(0, dot) + text.substr(dot + 1);
          if (joined.empty() || joined == "-" || joined == "+") joined += "0";
          return ratio(std::stoll(joined), den);
        }
      }
      return RealParam(v);
    } catch (const std::logic_error&) {
      throw InputError("not a number: " + text);
    }
  }

  double value() const noexcept { return value_; }
  bool is_exact() const noexcept { return exact_.has_value(); }
  std::int64_t numerator() const { return exact_ ? exact_->num : 0; }
  std::int64_t denominator() const { return exact_ ? exact_->den : 0; }

  // lhs >= value * k
  bool covered_by(std::int64_t lhs, std::int64_t k) const {
    if (exact_) {
      return static_cast<__int128>(lhs) * exact_->den >= static_cast<__int128>(exact_->num) * k;
    }
    return static_cast<double>(lhs) >= value_ * static_cast<double>(k) - kTolerance;
  }

  // ceil(value * k)
  std::int64_t ceil_times(std::int64_t k) const {
    if (exact_) return ceil_div(static_cast<__int128>(exact_->num) * k, exact_->den);
    return static_cast<std::int64_t>(std::ceil(value_ * static_cast<double>(k) - kTolerance));
  }

  // ceil(k / (c * value)) for positive value, e.g. m = ceil(n / (2d)).
  std::int64_t ceil_quotient(std::int64_t k, std::int64_t c) const {
    if (exact_) {
      return ceil_div(static_cast<__int128>(k) * exact_->den, static_cast<__int128>(c) * exact_->num);
    }
    return static_cast<std::int64_t>(
        std::ceil(static_cast<double>(k) / (static_cast<double>(c) * value_) - kTolerance));
  }

  // value * a / b, keeping exactness when possible.
  RealParam scaled(std::int64_t a, std::int64_t b) const {
    if (exact_) {
      const std::int64_t g1 = std::gcd(a, exact_->den);
      const std::int64_t g2 = std::gcd(exact_->num < 0 ? -exact_->num : exact_->num, b);
      const __int128 num = static_cast<__int128>(exact_->num / (g2 ? g2 : 1)) * (a / (g1 ? g1 : 1));
      const __int128 den = static_cast<__int128>(exact_->den / (g1 ? g1 : 1)) * (b / (g2 ? g2 : 1));
      if (num < INT64_MAX && num > -INT64_MAX && den < INT64_MAX) {
        return ratio(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
      }
    }
    return RealParam(value_ * static_cast<double>(a) / static_cast<double>(b));
  }

  std::string str() const {
    if (exact_ && exact_->den == 1) return std::to_string(exact_->num);
    if (exact_) return std::to_string(exact_->num) + "/" + std::to_string(exact_->den);
    return std::to_string(value_);
  }

  friend bool operator<(const RealParam& a, const RealParam& b) {
    if (a.exact_ && b.exact_) {
      return static_cast<__int128>(a.exact_->num) * b.exact_->den <
             static_cast<__int128>(b.exact_->num) * a.exact_->den;
    }
    return a.value_ < b.value_ - kTolerance;
  }
  friend bool operator<=(const RealParam& a, const RealParam& b) { return !(b < a); }

  friend std::ostream& operator<<(std::ostream& os, const RealParam& r) { return os << r.str(); }

 private:
  struct Ratio {
    std::int64_t num;
    std::int64_t den;
  };

  static std::int64_t ceil_div(__int128 a, __int128 b) {
    if (b < 0) {
      a = -a;
      b = -b;
    }
    __int128 q = a / b;
    if (a % b != 0 && a > 0) ++q;
    return static_cast<std::int64_t>(q);
  }

  // Continued-fraction search for a small-denominator ratio equal to v up to
  // 1e-12 relative error.
  static std::optional<Ratio> approximate(double v) {
    if (std::fabs(v) > 1e12) return std::nullopt;
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double x = v;
    for (int iter = 0; iter < 64; ++iter) {
      const double a = std::floor(x);
      const auto ai = static_cast<std::int64_t>(a);
      const std::int64_t h2 = ai * h1 + h0;
      const std::int64_t k2 = ai * k1 + k0;
      if (k2 > kMaxDenominator) break;
      h0 = h1;
      h1 = h2;
      k0 = k1;
      k1 = k2;
      const double approx = static_cast<double>(h1) / static_cast<double>(k1);
      if (std::fabs(approx - v) <= 1e-12 * std::max(1.0, std::fabs(v))) {
        return Ratio{h1, k1};
      }
      const double frac = x - a;
      if (frac < 1e-15) break;
      x = 1.0 / frac;
    }
    return std::nullopt;
  }

  double value_ = 0.0;
  std::optional<Ratio> exact_ = Ratio{0, 1};
};

}  // namespace treeuniv
