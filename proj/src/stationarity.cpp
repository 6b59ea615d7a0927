#include "odo/stationarity.hpp"

#include <cmath>
#include <limits>

namespace odo {

namespace {
// Finite stand-in for "as mean-reverting as it gets": a window with exactly
// constant magnitude (zero-noise simulation at rest) has a degenerate
// regression but is certainly stationary.
constexpr double kDegenerateDf = -1e9;
}

StationarityVerdict StationarityDetector::push_sample(const ImuSample& s) {
  window_.push_back({s.t, s.a.norm()});
  while (!window_.empty() && s.t - window_.front().t > cfg_.window) {
    window_.pop_front();
  }

  StationarityVerdict v;
  v.t = s.t;

  const int N = static_cast<int>(window_.size());
  if (N < cfg_.min_samples) return v;  // warm-up: not stationary, df 0

  double mean = 0.0;
  for (const auto& e : window_) mean += e.mag;
  mean /= N;
  double var = 0.0;
  for (const auto& e : window_) var += (e.mag - mean) * (e.mag - mean);
  v.window_std = std::sqrt(var / (N - 1));

  // Δz_t = α + ρ z_{t−1} + e_t over the window; df = ρ̂ / se(ρ̂).
  const int n = N - 1;  // regression points
  double sx = 0.0, sy = 0.0;
  for (int i = 1; i < N; ++i) {
    sx += window_[i - 1].mag;
    sy += window_[i].mag - window_[i - 1].mag;
  }
  const double xbar = sx / n, ybar = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 1; i < N; ++i) {
    const double dx = window_[i - 1].mag - xbar;
    sxx += dx * dx;
    sxy += dx * (window_[i].mag - window_[i - 1].mag - ybar);
  }

  if (sxx < 1e-20) {
    v.df_stat = kDegenerateDf;
  } else {
    const double rho = sxy / sxx;
    const double alpha = ybar - rho * xbar;
    double rss = 0.0;
    for (int i = 1; i < N; ++i) {
      const double r =
          (window_[i].mag - window_[i - 1].mag) - alpha - rho * window_[i - 1].mag;
      rss += r * r;
    }
    const double s2 = rss / std::max(n - 2, 1);
    if (s2 < 1e-28) {
      v.df_stat = rho < 0 ? kDegenerateDf : (rho > 0 ? -kDegenerateDf : 0.0);
    } else {
      v.df_stat = rho / std::sqrt(s2 / sxx);
    }
  }

  v.stationary = v.df_stat < cfg_.df_critical && v.window_std < cfg_.std_max;
  return v;
}

}  // namespace odo
