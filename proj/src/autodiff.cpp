#include "mvc/autodiff.hpp"

#include <algorithm>
#include <cmath>

namespace mvc::ad {

std::vector<double> grad(const ScalarFn& f, std::span<const double> x) {
  Tape tape;
  TapeScope scope(tape);
  std::vector<Scalar> xs;
  xs.reserve(x.size());
  for (double v : x) xs.push_back(Scalar::leaf(v));
  Scalar y = f(xs);
  std::vector<double> g(x.size(), 0.0);
  if (!y.tracked()) return g;  // f ignored its inputs
  tape.backward(y.node());
  for (std::size_t i = 0; i < x.size(); ++i)
    g[i] = tape.adjoint(xs[i].node());
  return g;
}

GradCheckReport check_grad(const ScalarFn& f, std::span<const double> x,
                           double h, double tol) {
  GradCheckReport report;
  report.analytic = grad(f, x);
  report.numeric.resize(x.size());

  std::vector<double> xp(x.begin(), x.end());
  auto eval = [&](std::span<const double> v) {
    std::vector<Scalar> xs(v.begin(), v.end());  // constants, no tape
    return f(xs).value();
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = xp[i];
    xp[i] = x0 + h;
    const double fp = eval(xp);
    xp[i] = x0 - h;
    const double fm = eval(xp);
    xp[i] = x0;
    report.numeric[i] = (fp - fm) / (2.0 * h);
  }

  for (std::size_t i = 0; i < x.size(); ++i) {
    const double denom = std::max(
        {std::fabs(report.analytic[i]), std::fabs(report.numeric[i]), 1e-8});
    const double rel = std::fabs(report.analytic[i] - report.numeric[i]) / denom;
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.argmax = i;
    }
  }
  report.passed = report.max_rel_err <= tol;
  return report;
}

}  // namespace mvc::ad
