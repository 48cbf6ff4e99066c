#include "mixlayer/blowup_analysis.hpp"

#include <cmath>
#include <string>

namespace mixlayer::blowup {

namespace {

constexpr double kPi = 3.14159265358979323846;

// |m - m1| below which the pair is treated as a double root.
constexpr double kDoubleRootSnap = 1e-9;

// Largest order for the Bernoulli series (needs B_2..B_40).
constexpr int kMaxSeriesOrder = 20;

void check_positive_m(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw Error(ErrorCode::DomainError,
                "blow-up classification requires finite m > 0, got m = " +
                    std::to_string(m));
  }
}

}  // namespace

double m1_constant() { return (-17.0 + 12.0 * std::sqrt(6.0)) / 23.0; }

double kappa(double m) { return 23.0 * m * m + 34.0 * m - 25.0; }

double cubic_residual(double m, double lambda) {
  const double l = lambda;
  return l * l * l - 6.0 * l * l / (m + 1.0) +
         l * (5.0 * m - 1.0) / (m + 1.0) + 6.0;
}

const char* pole_regime_name(PoleRegime regime) {
  switch (regime) {
    case PoleRegime::ComplexPair: return "ComplexPair";
    case PoleRegime::DoubleRoot: return "DoubleRoot";
    case PoleRegime::RealPair: return "RealPair";
  }
  return "?";
}

PoleLocalForm pole_local_form(double m) {
  check_positive_m(m);
  PoleLocalForm form;
  form.m = m;
  form.m1_const = m1_constant();
  form.alpha = (m + 7.0) / (2.0 * (m + 1.0));
  form.lambda3 = -1.0;
  const double k = kappa(m);
  if (std::fabs(m - form.m1_const) < kDoubleRootSnap) {
    form.regime = PoleRegime::DoubleRoot;
    form.lambda1 = form.alpha;
    form.lambda2 = form.alpha;
  } else if (k > 0.0) {
    form.regime = PoleRegime::ComplexPair;
    form.beta = std::sqrt(k) / (2.0 * (m + 1.0));
  } else {
    form.regime = PoleRegime::RealPair;
    const double half_gap = std::sqrt(-k) / (2.0 * (m + 1.0));
    form.lambda1 = form.alpha + half_gap;
    form.lambda2 = form.alpha - half_gap;
  }
  return form;
}

double blowup_local_eval(double m, double tau_p, double c1, double c2,
                         double tau, double radius) {
  check_positive_m(m);
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::DomainError, "local radius must be positive");
  }
  const double dx = tau - tau_p;
  if (dx == 0.0) {
    throw Error(ErrorCode::UndefinedAtPole,
                "blow-up family is singular at tau_p");
  }
  const double x = std::fabs(dx);
  if (x > radius) {
    throw Error(ErrorCode::OutsideLocalRadius,
                "|tau - tau_p| = " + std::to_string(x) +
                    " exceeds the local radius " + std::to_string(radius));
  }
  const PoleLocalForm form = pole_local_form(m);
  double y = 0.0;
  switch (form.regime) {
    case PoleRegime::ComplexPair: {
      const double arg = *form.beta * std::log(x);
      y = std::pow(x, form.alpha) *
          (c1 * std::cos(arg) + c2 * std::sin(arg));
      break;
    }
    case PoleRegime::DoubleRoot:
      y = std::pow(x, form.alpha) * (c1 + c2 * std::log(x));
      break;
    case PoleRegime::RealPair:
      y = c1 * std::pow(x, *form.lambda1) + c2 * std::pow(x, *form.lambda2);
      break;
  }
  return 6.0 * m / ((m + 1.0) * dx) * (1.0 + y);
}

std::vector<double> bernoulli_numbers(int n_max) {
  if (n_max < 0) {
    throw Error(ErrorCode::DomainError, "Bernoulli order must be >= 0");
  }
  // Standard recurrence B_n = -1/(n+1) * sum_{j<n} C(n+1, j) B_j.
  // The sum cancels heavily as n grows, so accumulate in extended precision.
  std::vector<long double> b(static_cast<size_t>(n_max) + 1, 0.0L);
  b[0] = 1.0L;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1 && n % 2 == 1) continue;  // odd Bernoulli numbers vanish
    long double sum = 0.0L;
    long double binom = 1.0L;  // C(n+1, 0)
    for (int j = 0; j < n; ++j) {
      sum += binom * b[static_cast<size_t>(j)];
      binom *= static_cast<long double>(n + 1 - j) /
               static_cast<long double>(j + 1);
    }
    b[static_cast<size_t>(n)] = -sum / (n + 1.0L);
  }
  return std::vector<double>(b.begin(), b.end());
}

double coth_y12(double a, double x) {
  const double u = 0.5 * a * x;
  if (std::fabs(u) < 1e-4) {
    // u coth u - 1 = u^2/3 - u^4/45 + O(u^6); avoids 0/0 at the origin.
    const double u2 = u * u;
    return u2 / 3.0 - u2 * u2 / 45.0;
  }
  return u / std::tanh(u) - 1.0;
}

double bernoulli_series_y12(double a, double x, int order) {
  if (order < 1 || order > kMaxSeriesOrder) {
    throw Error(ErrorCode::DomainError,
                "series order must be in [1, " +
                    std::to_string(kMaxSeriesOrder) + "]");
  }
  const double ax = a * x;
  if (!(ax * ax < kPi * kPi)) {
    throw Error(ErrorCode::OutOfWindow,
                "(a x)^2 = " + std::to_string(ax * ax) +
                    " is outside the convergence window pi^2");
  }
  const std::vector<double> b = bernoulli_numbers(2 * order);
  const double w = a * a * x * x / 12.0;  // C2(a) x^2
  double y = 0.0;
  double w_pow = 1.0;
  double twelve_over_fact = 1.0;  // 12^n / (2n)! running factor
  for (int n = 1; n <= order; ++n) {
    w_pow *= w;
    twelve_over_fact *= 12.0 / ((2.0 * n - 1.0) * (2.0 * n));
    y += twelve_over_fact * b[static_cast<size_t>(2 * n)] * w_pow;
  }
  return y;
}

}  // namespace mixlayer::blowup
