#pragma once

// Reliability, availability and detection-quality metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "resilsim/error.hpp"
#include "resilsim/rng.hpp"

namespace resilsim {

/// Hours in the calendar year used for annual downtime figures.
inline constexpr double kHoursPerYear = 365.0 * 24.0;
inline constexpr double kFitHours = 1e9;

// ---------------------------------------------------------------------------
// Lifetime distributions

struct Exponential {
  double rate;  // per hour
  friend bool operator==(const Exponential&, const Exponential&) = default;
};

struct Weibull {
  double shape;
  double scale;  // hours
  friend bool operator==(const Weibull&, const Weibull&) = default;
};

struct Empirical {
  std::vector<double> samples;  // sorted, hours
  friend bool operator==(const Empirical&, const Empirical&) = default;
};

class LifetimeDistribution {
 public:
  using Variant = std::variant<Exponential, Weibull, Empirical>;

  static LifetimeDistribution exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw Error(ErrorCode::InvalidArgument, "exponential rate must be > 0");
    return LifetimeDistribution(Exponential{rate});
  }

  static LifetimeDistribution weibull(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale)) {
      throw Error(ErrorCode::InvalidArgument, "weibull shape and scale must be > 0");
    }
    return LifetimeDistribution(Weibull{shape, scale});
  }

  static LifetimeDistribution empirical(std::vector<double> samples) {
    if (samples.empty()) throw Error(ErrorCode::InvalidArgument, "empirical distribution needs samples");
    for (double s : samples) {
      if (!(s >= 0.0) || !std::isfinite(s)) {
        throw Error(ErrorCode::InvalidArgument, "empirical samples must be finite and non-negative");
      }
    }
    std::sort(samples.begin(), samples.end());
    return LifetimeDistribution(Empirical{std::move(samples)});
  }

  const Variant& get() const { return v_; }

  friend bool operator==(const LifetimeDistribution&, const LifetimeDistribution&) = default;

 private:
  explicit LifetimeDistribution(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

namespace detail {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void require_time(double t) {
  if (t < 0.0 || std::isnan(t)) throw Error(ErrorCode::NegativeTime, "time must be >= 0");
}

inline double survivors_fraction(const Empirical& e, double t) {
  // Right-continuous survivor function: samples strictly greater than t.
  auto it = std::upper_bound(e.samples.begin(), e.samples.end(), t);
  return static_cast<double>(e.samples.end() - it) / static_cast<double>(e.samples.size());
}

}  // namespace detail

/// R(t): probability of no error or failure during [0, t].
inline double reliability_at(const LifetimeDistribution& dist, double t) {
  detail::require_time(t);
  return std::visit(detail::overloaded{
                        [&](const Exponential& e) { return std::exp(-e.rate * t); },
                        [&](const Weibull& w) { return std::exp(-std::pow(t / w.scale, w.shape)); },
                        [&](const Empirical& e) { return detail::survivors_fraction(e, t); },
                    },
                    dist.get());
}

/// F(t) = 1 - R(t).
inline double unreliability_at(const LifetimeDistribution& dist, double t) { return 1.0 - reliability_at(dist, t); }

/// f(t). Empirical samples spread their mass uniformly over the gap that
/// precedes them, i.e. the density of the linearly interpolated CDF.
inline double density_at(const LifetimeDistribution& dist, double t) {
  detail::require_time(t);
  return std::visit(
      detail::overloaded{
          [&](const Exponential& e) { return e.rate * std::exp(-e.rate * t); },
          [&](const Weibull& w) {
            const double z = t / w.scale;
            return (w.shape / w.scale) * std::pow(z, w.shape - 1.0) * std::exp(-std::pow(z, w.shape));
          },
          [&](const Empirical& e) {
            const auto& s = e.samples;
            auto next = std::upper_bound(s.begin(), s.end(), t);
            if (next == s.end()) return 0.0;
            const double hi = *next;
            const double lo = next == s.begin() ? 0.0 : *(next - 1);
            const auto at_hi = std::upper_bound(next, s.end(), hi) - next;
            if (hi <= lo) return 0.0;
            return static_cast<double>(at_hi) / static_cast<double>(s.size()) / (hi - lo);
          },
      },
      dist.get());
}

/// lambda(t) = f(t) / R(t).
inline double hazard_rate_at(const LifetimeDistribution& dist, double t) {
  detail::require_time(t);
  if (const auto* e = std::get_if<Exponential>(&dist.get())) return e->rate;
  if (const auto* w = std::get_if<Weibull>(&dist.get())) {
    return (w->shape / w->scale) * std::pow(t / w->scale, w->shape - 1.0);
  }
  const double r = reliability_at(dist, t);
  if (r <= 0.0) throw Error(ErrorCode::DegenerateReliability, "R(t) = 0, hazard undefined");
  return density_at(dist, t) / r;
}

/// Inverse of F; p in [0, 1).
inline double quantile(const LifetimeDistribution& dist, double p) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "quantile needs p in [0,1)");
  return std::visit(detail::overloaded{
                        [&](const Exponential& e) { return -std::log1p(-p) / e.rate; },
                        [&](const Weibull& w) { return w.scale * std::pow(-std::log1p(-p), 1.0 / w.shape); },
                        [&](const Empirical& e) {
                          auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(e.samples.size())));
                          return e.samples[std::min(idx, e.samples.size() - 1)];
                        },
                    },
                    dist.get());
}

inline double sample(const LifetimeDistribution& dist, RandomStream& rng) {
  return std::visit(detail::overloaded{
                        [&](const Exponential& e) { return rng.exponential(e.rate); },
                        [&](const Weibull& w) { return w.scale * std::pow(-std::log(rng.uniform_open0()), 1.0 / w.shape); },
                        [&](const Empirical& e) { return e.samples[rng.below(e.samples.size())]; },
                    },
                    dist.get());
}

/// MTTF (or MTTE, for error lifetimes) from closed forms.
inline double mttf(const LifetimeDistribution& dist) {
  const double m = std::visit(detail::overloaded{
                                  [](const Exponential& e) { return 1.0 / e.rate; },
                                  [](const Weibull& w) { return w.scale * std::tgamma(1.0 + 1.0 / w.shape); },
                                  [](const Empirical& e) {
                                    double sum = 0.0;
                                    for (double s : e.samples) sum += s;
                                    return sum / static_cast<double>(e.samples.size());
                                  },
                              },
                              dist.get());
  if (!std::isfinite(m)) throw Error(ErrorCode::DivergentIntegral, "mean lifetime is not finite");
  return m;
}

/// Integral of R(t) over [0, inf), truncated at the 1 - 1e-10 quantile,
/// by adaptive Gauss-Kronrod quadrature (relative tolerance 1e-6).
inline double integrate_reliability(const LifetimeDistribution& dist) {
  if (const auto* e = std::get_if<Empirical>(&dist.get())) {
    // R is a step function; integrate it exactly piece by piece.
    double area = 0.0, prev = 0.0;
    const double n = static_cast<double>(e->samples.size());
    for (std::size_t i = 0; i < e->samples.size(); ++i) {
      area += (e->samples[i] - prev) * (n - static_cast<double>(i)) / n;
      prev = e->samples[i];
    }
    return area;
  }
  const double upper = quantile(dist, 1.0 - 1e-10);
  if (!std::isfinite(upper)) throw Error(ErrorCode::DivergentIntegral, "reliability tail does not vanish");
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [&](double t) { return reliability_at(dist, t); }, 0.0, upper, 30, 1e-6, &err);
  if (!std::isfinite(value)) throw Error(ErrorCode::DivergentIntegral, "quadrature diverged");
  return value;
}

/// Failures expected in 1e9 hours of operation.
inline double fit_rate(double mttf_hours) {
  if (!(mttf_hours > 0.0)) throw Error(ErrorCode::ZeroMTTF, "FIT needs MTTF > 0");
  return kFitHours / mttf_hours;
}

struct ReliabilityReport {
  double mttf = 0.0;
  double fit = 0.0;
  std::vector<std::pair<double, double>> reliability_curve;
};

inline ReliabilityReport reliability_report(const LifetimeDistribution& dist, double t_max, std::size_t points) {
  ReliabilityReport rep;
  rep.mttf = mttf(dist);
  rep.fit = fit_rate(rep.mttf);
  const std::size_t n = std::max<std::size_t>(points, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    rep.reliability_curve.emplace_back(t, reliability_at(dist, t));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Serial / parallel composition. Products are accumulated left to right so
// that the identical-component forms agree with the general ones bit for bit.

namespace detail {

inline void require_parts(std::span<const double> parts) {
  if (parts.empty()) throw Error(ErrorCode::EmptyParts, "composition needs at least one part");
  for (double p : parts) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "probabilities must lie in [0,1]");
  }
}

inline double repeated_product(double x, unsigned n) {
  double acc = x;
  for (unsigned i = 1; i < n; ++i) acc *= x;
  return acc;
}

}  // namespace detail

inline double serial_reliability(std::span<const double> parts) {
  detail::require_parts(parts);
  double acc = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc *= parts[i];
  return acc;
}

inline double parallel_reliability(std::span<const double> parts) {
  detail::require_parts(parts);
  double acc = 1.0 - parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) acc *= (1.0 - parts[i]);
  return 1.0 - acc;
}

inline double identical_serial_reliability(double r, unsigned n) {
  if (n == 0) throw Error(ErrorCode::EmptyParts, "n must be >= 1");
  detail::require_parts(std::span<const double>(&r, 1));
  return detail::repeated_product(r, n);
}

inline double identical_parallel_reliability(double r, unsigned n) {
  if (n == 0) throw Error(ErrorCode::EmptyParts, "n must be >= 1");
  detail::require_parts(std::span<const double>(&r, 1));
  return 1.0 - detail::repeated_product(1.0 - r, n);
}

inline double serial_availability(std::span<const double> parts) { return serial_reliability(parts); }
inline double parallel_availability(std::span<const double> parts) { return parallel_reliability(parts); }
inline double identical_serial_availability(double a, unsigned n) { return identical_serial_reliability(a, n); }
inline double identical_parallel_availability(double a, unsigned n) { return identical_parallel_reliability(a, n); }

// ---------------------------------------------------------------------------
// Availability

inline double availability_from_times(double t_pu, double t_ud, double t_sd) {
  if (t_pu < 0.0 || t_ud < 0.0 || t_sd < 0.0) throw Error(ErrorCode::InvalidArgument, "times must be >= 0");
  const double total = t_pu + t_ud + t_sd;
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroDenominator, "no observed time");
  return t_pu / total;
}

inline double mtbf(double mttf_h, double mttr_h) { return mttf_h + mttr_h; }

inline double availability_from_mttf(double mttf_h, double mttr_h) {
  if (mttf_h < 0.0 || mttr_h < 0.0) throw Error(ErrorCode::InvalidArgument, "times must be >= 0");
  const double total = mtbf(mttf_h, mttr_h);
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroDenominator, "MTTF + MTTR = 0");
  return mttf_h / total;
}

struct AvailabilityRecord {
  double t_pu = 0.0, t_ud = 0.0, t_sd = 0.0;
  double mttf = 0.0, mttr = 0.0, mtbf = 0.0;
  double availability = 0.0;
};

/// Builds a record from status occupancy and repair statistics.
inline AvailabilityRecord make_availability_record(double t_pu, double t_ud, double t_sd, std::size_t failures) {
  AvailabilityRecord rec{t_pu, t_ud, t_sd};
  rec.availability = availability_from_times(t_pu, t_ud, t_sd);
  if (failures > 0) {
    rec.mttf = t_pu / static_cast<double>(failures);
    rec.mttr = t_ud / static_cast<double>(failures);
  } else {
    rec.mttf = t_pu + t_ud + t_sd;
  }
  rec.mtbf = mtbf(rec.mttf, rec.mttr);
  return rec;
}

// ---------------------------------------------------------------------------
// Nines

struct NinesRating {
  int nines = 0;
  double downtime_hours = 0.0;  // per year
  std::string downtime;         // human rendering, e.g. "5 minutes, 15.4 seconds"
};

namespace detail {

inline std::string unit_count(double v, const char* unit, bool integral) {
  char buf[64];
  if (integral) {
    std::snprintf(buf, sizeof buf, "%.0f %s%s", v, unit, v == 1.0 ? "" : "s");
  } else {
    std::snprintf(buf, sizeof buf, "%.1f %ss", v, unit);
  }
  return buf;
}

inline std::string render_part(double v, const char* unit) {
  const double r = std::round(v * 10.0) / 10.0;
  return unit_count(r, unit, r == std::floor(r));
}

}  // namespace detail

/// Renders a duration with an integral leading unit and a one-decimal
/// remainder in the next unit. Days are used from ten days upward.
inline std::string render_duration(double hours) {
  struct Unit {
    const char* name;
    double seconds;
  };
  static constexpr Unit units[] = {{"day", 86400.0}, {"hour", 3600.0}, {"minute", 60.0}, {"second", 1.0}};
  static constexpr double carry[] = {24.0, 60.0, 60.0};
  const double secs = hours * 3600.0;

  std::size_t u = 3;
  if (secs / units[0].seconds >= 10.0) {
    u = 0;
  } else {
    for (std::size_t i = 1; i < 3; ++i) {
      if (secs / units[i].seconds >= 1.0) {
        u = i;
        break;
      }
    }
  }
  if (u == 3) return detail::render_part(secs, "second");

  double major = std::floor(secs / units[u].seconds);
  double minor = std::round((secs - major * units[u].seconds) / units[u + 1].seconds * 10.0) / 10.0;
  if (minor >= carry[u]) {
    major += 1.0;
    minor -= carry[u];
  }
  std::string out = detail::unit_count(major, units[u].name, true);
  if (minor > 0.0) out += ", " + detail::render_part(minor, units[u + 1].name);
  return out;
}

inline NinesRating nines_rating(double availability) {
  if (!(availability >= 0.0 && availability < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "nines rating needs 0 <= A < 1");
  }
  NinesRating r;
  const double unavail = 1.0 - availability;
  // Leading nines of the percentage; the epsilon absorbs representation
  // error in values such as 0.99 (1 - 0.99 = 0.010000000000000009).
  r.nines = static_cast<int>(std::floor(-std::log10(unavail) + 1e-9));
  r.downtime_hours = unavail * kHoursPerYear;
  r.downtime = render_duration(r.downtime_hours);
  return r;
}

// ---------------------------------------------------------------------------
// Detection quality

struct DetectionTally {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  DetectionTally& operator+=(const DetectionTally& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const DetectionTally&, const DetectionTally&) = default;
};

inline double precision(const DetectionTally& t) {
  if (t.tp + t.fp == 0) throw Error(ErrorCode::UndefinedMetric, "precision needs at least one indication");
  return static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
}

inline double precision_complement(const DetectionTally& t) {
  if (t.tp + t.fp == 0) throw Error(ErrorCode::UndefinedMetric, "precision needs at least one indication");
  return 1.0 - static_cast<double>(t.fp) / static_cast<double>(t.tp + t.fp);
}

inline double recall(const DetectionTally& t) {
  if (t.tp + t.fn == 0) throw Error(ErrorCode::UndefinedMetric, "recall needs at least one actual event");
  return static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
}

inline double recall_complement(const DetectionTally& t) {
  if (t.tp + t.fn == 0) throw Error(ErrorCode::UndefinedMetric, "recall needs at least one actual event");
  return 1.0 - static_cast<double>(t.fn) / static_cast<double>(t.tp + t.fn);
}

// ---------------------------------------------------------------------------
// System vs. application perspective

struct OutageInterval {
  double start = 0.0;
  double end = 0.0;
};

struct PerspectiveLog {
  double horizon = 0.0;
  std::vector<OutageInterval> system;
  std::map<std::string, std::vector<OutageInterval>> applications;
};

/// A point estimate, or a lower bound when the window saw no event.
struct Estimate {
  double value = 0.0;
  bool lower_bound = false;
  friend bool operator==(const Estimate&, const Estimate&) = default;
};

struct PerspectiveMetrics {
  Estimate smttf, smttr;
  std::map<std::string, Estimate> amttf, amttr;
};

namespace detail {

inline std::pair<Estimate, Estimate> mean_times(const std::vector<OutageInterval>& outages, double horizon) {
  if (outages.empty()) return {Estimate{horizon, true}, Estimate{0.0, false}};
  double down = 0.0;
  bool open = false;
  for (const auto& o : outages) {
    const double end = std::min(o.end, horizon);
    down += end - o.start;
    if (o.end >= horizon) open = true;
  }
  const double n = static_cast<double>(outages.size());
  return {Estimate{(horizon - down) / n, false}, Estimate{down / n, open}};
}

}  // namespace detail

/// SMTTF/SMTTR from full-system outages, AMTTF/AMTTR per application.
/// An application abort that leaves the system up contributes nothing to
/// the system figures.
inline PerspectiveMetrics perspective_metrics(const PerspectiveLog& log) {
  if (!(log.horizon > 0.0)) throw Error(ErrorCode::EmptyLog, "log has no observation window");
  PerspectiveMetrics m;
  std::tie(m.smttf, m.smttr) = detail::mean_times(log.system, log.horizon);
  for (const auto& [app, outages] : log.applications) {
    auto [f, r] = detail::mean_times(outages, log.horizon);
    m.amttf[app] = f;
    m.amttr[app] = r;
  }
  return m;
}

}  // namespace resilsim
