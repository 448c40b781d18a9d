// Transient solution of the forward equation p' = Q(t)^T p.
//
// Each step takes one backward Euler step of size h and two of size h/2.
// Their difference estimates the local error; the accepted value is the
// Richardson extrapolation 2*y_half - y_full (second order, L-stable),
// falling back to the two half steps if extrapolation leaves the
// nonnegative orthant. Both candidates conserve total probability since
// the columns of (I - h Q^T) sum to one; each accepted state is
// renormalized so rounding does not accumulate over long horizons.

#include <algorithm>
#include <cmath>

#include "ghcft/error.h"
#include "ghcft/quantitative.h"

namespace ghcft {

namespace {

constexpr double kSafety = 0.9;
constexpr double kMinShrink = 0.2;
constexpr double kMaxGrow = 5.0;

Eigen::VectorXd ImplicitStep(const Eigen::MatrixXd& q, double h,
                             const Eigen::VectorXd& p) {
  const Eigen::Index n = q.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - h * q.transpose();
  return a.partialPivLu().solve(p);
}

}  // namespace

Trajectory transient_solve(const GeneratorView& gen,
                           std::span<const double> output_times,
                           const SolverConfig& cfg,
                           const TimeVaryingInputs& inputs) {
  cfg.check();
  if (output_times.empty()) throw DomainError("no output times requested");
  double previous = 0;
  for (double t : output_times) {
    if (!std::isfinite(t) || !(t > 0) || t < previous)
      throw DomainError("output times must be positive, finite and nondecreasing");
    previous = t;
  }
  for (const auto& [ifm, fn] : inputs) {
    const auto& links = gen.inputs();
    if (std::none_of(links.begin(), links.end(),
                     [&](const auto& l) { return l.ifm == ifm; }))
      throw LookupError("no transition depends on input failure mode '" + ifm +
                        "'");
    if (!fn) throw DomainError("empty rate function for '" + ifm + "'");
  }

  const auto n = static_cast<Eigen::Index>(gen.size());
  Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
  p(static_cast<Eigen::Index>(gen.initial())) = 1;

  Trajectory result;
  double t = 0;
  double scale_rate = gen.matrix_at(0, inputs).diagonal().cwiseAbs().maxCoeff();
  double h = scale_rate > 0 ? 1e-3 / scale_rate : output_times.back();

  for (double t_out : output_times) {
    while (t < t_out) {
      if (result.accepted_steps + result.rejected_steps >= cfg.max_steps)
        throw ResourceLimitError("transient solver exceeded " +
                                 std::to_string(cfg.max_steps) + " steps");
      bool last = t + h >= t_out * (1 - 1e-13);
      double step = last ? t_out - t : h;

      Eigen::MatrixXd q_end = gen.matrix_at(t + step, inputs);
      Eigen::MatrixXd q_mid =
          inputs.empty() ? q_end : gen.matrix_at(t + step / 2, inputs);
      Eigen::VectorXd full = ImplicitStep(q_end, step, p);
      Eigen::VectorXd half = ImplicitStep(q_mid, step / 2, p);
      half = ImplicitStep(q_end, step / 2, half);

      double err = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double tol = cfg.abs_tol +
                     cfg.rel_tol * std::max(std::abs(p(i)), std::abs(half(i)));
        err = std::max(err, std::abs(half(i) - full(i)) / tol);
      }
      if (!std::isfinite(err))
        throw NumericalError("non-finite state in transient solver");

      double factor = kSafety / std::sqrt(std::max(err, 1e-12));
      if (err <= 1) {
        Eigen::VectorXd extrapolated = 2 * half - full;
        p = extrapolated.minCoeff() >= 0 ? extrapolated : half;
        t = last ? t_out : t + step;
        ++result.accepted_steps;
        result.max_mass_error =
            std::max(result.max_mass_error, std::abs(p.sum() - 1));
        // The scheme conserves mass exactly; remove accumulated rounding.
        for (Eigen::Index i = 0; i < n; ++i)
          if (p(i) < 0 && p(i) >= -cfg.abs_tol) p(i) = 0;
        p /= p.sum();
        if (!last || factor < 1)
          h = step * std::clamp(factor, kMinShrink, kMaxGrow);
      } else {
        ++result.rejected_steps;
        h = step * std::clamp(factor, kMinShrink, 1.0);
        if (h <= 1e-14 * std::max(1.0, t))
          throw NumericalError("tolerance unachievable: step size underflow at t = " +
                               std::to_string(t));
      }
    }
    Eigen::VectorXd out = p;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (out(i) < 0 && out(i) >= -cfg.abs_tol) out(i) = 0;
      if (out(i) > 1 && out(i) <= 1 + cfg.abs_tol) out(i) = 1;
    }
    result.times.push_back(t_out);
    result.probabilities.push_back(std::move(out));
  }
  return result;
}

}  // namespace ghcft
