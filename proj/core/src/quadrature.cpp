#include "qsuff/quadrature.hpp"

#include <array>
#include <cmath>

namespace qsuff {
namespace {

// Kronrod 15-point abscissae (positive half, descending) and weights; the
// odd-indexed nodes are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  Matrix kronrod;
  double error;
};

Panel gk15(const std::function<Matrix(double)>& f, double a, double b, int& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Matrix fc = f(center);
  Matrix kron = fc * kWgk[7];
  Matrix gauss = fc * kWg[3];
  evals += 1;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    Matrix f1 = f(center - dx);
    Matrix f2 = f(center + dx);
    evals += 2;
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  kron *= half;
  gauss *= half;
  return {kron, (kron - gauss).norm()};
}

void adapt(const std::function<Matrix(double)>& f, double a, double b, double tol, int depth,
           int max_depth, QuadratureResult& out) {
  Panel p = gk15(f, a, b, out.evaluations);
  if (p.error <= tol || depth >= max_depth) {
    if (p.error > tol) out.converged = false;
    if (out.value.size() == 0) {
      out.value = p.kronrod;
    } else {
      out.value += p.kronrod;
    }
    out.error_estimate += p.error;
    return;
  }
  const double mid = 0.5 * (a + b);
  adapt(f, a, mid, 0.5 * tol, depth + 1, max_depth, out);
  adapt(f, mid, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

QuadratureResult integrate_gk15(const std::function<Matrix(double)>& f, double a, double b,
                                double abs_tol, double rel_tol, int max_depth) {
  QuadratureResult out;
  int probe_evals = 0;
  Panel coarse = gk15(f, a, b, probe_evals);
  const double tol = std::max(abs_tol, rel_tol * coarse.kronrod.norm());
  adapt(f, a, b, tol, 0, max_depth, out);
  out.evaluations += probe_evals;
  return out;
}

}  // namespace qsuff
