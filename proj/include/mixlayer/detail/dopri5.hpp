#pragma once

#include <array>
#include <cmath>

// Dormand-Prince 5(4) pair with the classic contiguous dense output. Kept as a
// small header template so the 3-state trajectory integrator, the 2-state
// phase-plane solver, and the 1-state streamline tracer share one stepper.
namespace mixlayer::detail {

template <int N>
using Vec = std::array<double, N>;

// Attempts one step of signed size h from (t, y). k[0] must hold f(t, y) on
// entry. On return k[1..5] hold the internal stages, k[6] the FSAL evaluation
// f(t+h, y5), and y5 the fifth-order result. Returns the scaled RMS error
// (acceptable when <= 1); returns a huge value if any stage went non-finite.
template <int N, class F>
double dopri5_attempt(F&& f, double t, const Vec<N>& y, double h, double rel_tol,
                      double abs_tol, std::array<Vec<N>, 7>& k, Vec<N>& y5) {
  constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                   a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                   a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  Vec<N> w;
  for (int i = 0; i < N; ++i) w[i] = y[i] + h * a21 * k[0][i];
  k[1] = f(t + c2 * h, w);
  for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
  k[2] = f(t + c3 * h, w);
  for (int i = 0; i < N; ++i)
    w[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
  k[3] = f(t + c4 * h, w);
  for (int i = 0; i < N; ++i)
    w[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
  k[4] = f(t + c5 * h, w);
  for (int i = 0; i < N; ++i)
    w[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                       a65 * k[4][i]);
  k[5] = f(t + h, w);
  for (int i = 0; i < N; ++i)
    y5[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                        a76 * k[5][i]);
  k[6] = f(t + h, y5);

  double err = 0.0;
  for (int i = 0; i < N; ++i) {
    const double ei = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                           e6 * k[5][i] + e7 * k[6][i]);
    const double sc =
        abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
    err += (ei / sc) * (ei / sc);
  }
  err = std::sqrt(err / N);
  if (!std::isfinite(err)) return 1e30;
  return err;
}

// Coefficients of the contiguous interpolant over the last accepted step:
//   u(s) = r[0] + s*(r[1] + (1-s)*(r[2] + s*(r[3] + (1-s)*r[4]))),  s=(t-t0)/h.
template <int N>
std::array<Vec<N>, 5> dopri5_dense(const Vec<N>& y0, const Vec<N>& y5, double h,
                                   const std::array<Vec<N>, 7>& k) {
  constexpr double d1 = -12715105075.0 / 11282082432.0;
  constexpr double d3 = 87487479700.0 / 32700410799.0;
  constexpr double d4 = -10690763975.0 / 1880347072.0;
  constexpr double d5 = 701980252875.0 / 199316789632.0;
  constexpr double d6 = -1453857185.0 / 822651844.0;
  constexpr double d7 = 69997945.0 / 29380423.0;
  std::array<Vec<N>, 5> r;
  for (int i = 0; i < N; ++i) {
    const double dy = y5[i] - y0[i];
    r[0][i] = y0[i];
    r[1][i] = dy;
    r[2][i] = h * k[0][i] - dy;
    r[3][i] = dy - h * k[6][i] - r[2][i];
    r[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                   d6 * k[5][i] + d7 * k[6][i]);
  }
  return r;
}

// Standard step-size controller for the 5(4) pair.
inline double dopri5_factor(double err) {
  if (err < 1e-30) return 5.0;
  const double fac = 0.9 * std::pow(err, -0.2);
  return std::max(0.2, std::min(5.0, fac));
}

}  // namespace mixlayer::detail
