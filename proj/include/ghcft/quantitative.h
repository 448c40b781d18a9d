/// @file quantitative.h
/// Markov chain numerics and compositional rate evaluation.
///
/// Rates are per hour throughout. A CMC output failure mode is quantified
/// by the rate at which its error state is reached:
///   - absorbing error state: reciprocal of the mean first-passage time;
///   - recurrent error state (left again by repair): long-run entering
///     frequency from the stationary distribution;
///   - error state that is left but never re-entered: first passage again.
/// CFT gates combine rates: OR adds, AND uses a mission-time based
/// equivalent rate (see `SolverConfig::mission_time`).

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ghcft/model.h"
#include "ghcft/validate.h"

namespace ghcft {

struct SolverConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  std::size_t max_steps = 1'000'000;
  /// Hours. Required to quantify AND gates and transient-based rates.
  std::optional<double> mission_time;
  /// Quantify CMC outputs by transient integration over `mission_time`
  /// instead of first-passage / stationary analysis.
  bool transient_rates = false;

  /// @throws DomainError  Nonpositive tolerance or mission time.
  void check() const;
};

/// Time-varying IFM rates for transient integration, keyed by IFM id.
/// Functions must return finite nonnegative values.
using TimeVaryingInputs =
    std::map<std::string, std::function<double(double)>, std::less<>>;

/// Generator matrix of a CMC with input failure mode rates applied.
/// State indices follow declaration order.
class GeneratorView {
 public:
  /// An IFM and the (from, to) index pairs of the transitions it feeds.
  struct InputLink {
    std::string ifm;
    double rate = 0;  ///< Constant rate used in `matrix()`.
    std::vector<std::pair<std::size_t, std::size_t>> transitions;
  };

  GeneratorView(std::vector<std::string> states, std::size_t initial,
                Eigen::MatrixXd base_rates, std::vector<InputLink> inputs);

  const std::vector<std::string>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }
  std::size_t initial() const { return initial_; }
  /// @throws LookupError  Unknown state id.
  std::size_t index_of(std::string_view state) const;

  /// Full generator: effective off-diagonal rates, diagonal = -row sum.
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double rate(std::size_t from, std::size_t to) const {
    return from == to ? 0.0 : matrix_(from, to);
  }
  double max_rate() const;
  const std::vector<InputLink>& inputs() const { return inputs_; }

  /// Generator at time `t` with the listed IFMs replaced by their
  /// time-varying rates.
  /// @throws DomainError  A function returned a negative or non-finite rate.
  Eigen::MatrixXd matrix_at(double t, const TimeVaryingInputs& inputs) const;

  /// The same chain with every outgoing transition of `state` removed.
  GeneratorView with_absorbing(std::size_t state) const;

  /// Every rate multiplied by `factor`.
  GeneratorView scaled(double factor) const;

 private:
  static Eigen::MatrixXd Assemble(Eigen::MatrixXd off_diagonal);

  std::vector<std::string> states_;
  std::size_t initial_;
  Eigen::MatrixXd base_;  ///< Off-diagonal intrinsic rates.
  std::vector<InputLink> inputs_;
  Eigen::MatrixXd matrix_;
};

/// @throws UnresolvedInputError  A DI-referenced IFM has no rate.
GeneratorView build_generator(const CmcElement& cmc, const IfmRates& ifm_rates);

/// A rate together with what the computation noticed on the way.
struct ChainRate {
  double rate = 0;
  std::vector<std::string> diagnostics;
};

/// 1 / E[time to first reach `target` from the initial state], with the
/// target made absorbing. Unreachable target: rate 0 and a diagnostic.
/// @throws DomainError  The target is reached with probability below one
///                      (the mean first-passage time is infinite).
/// @throws NumericalError  Singular hitting-time system.
ChainRate mttf_rate(const GeneratorView& gen, std::string_view target);

/// Long-run frequency of entering `target`:
/// sum over u != target of pi(u) * rate(u -> target).
/// @throws DomainError  Target unreachable, or not in the unique closed
///                      class reachable from the initial state.
ChainRate steady_state_frequency(const GeneratorView& gen,
                                 std::string_view target);

/// Stationary distribution of the unique closed class reachable from the
/// initial state, zero elsewhere.
/// @throws DomainError  No unique closed class.
Eigen::VectorXd stationary_distribution(const GeneratorView& gen);

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> probabilities;  ///< One per output time.
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// Largest |sum(p) - 1| over all accepted steps.
  double max_mass_error = 0;
};

/// State probabilities of the chain started in its initial state.
///
/// Backward Euler with Richardson step doubling and adaptive step size.
/// Output times must be positive and nondecreasing.
///
/// @throws ResourceLimitError  More than `cfg.max_steps` steps.
/// @throws NumericalError  Step size underflow.
/// @throws DomainError  Invalid output times or input functions.
Trajectory transient_solve(const GeneratorView& gen,
                           std::span<const double> output_times,
                           const SolverConfig& cfg,
                           const TimeVaryingInputs& inputs = {});

/// 1 / sum(1 / rate_i): the rate of traversing a chain of stages in series.
/// Any zero rate gives 0 with a diagnostic.
/// @throws DomainError  Empty list, or a negative or non-finite rate.
ChainRate series_path_rate(std::span<const double> rates);

/// Equivalent constant rate of an AND over inputs with constant rates over
/// `mission_time`: Q = prod(1 - exp(-r_i T)), rate = -ln(1 - Q) / T.
double and_gate_rate(std::span<const double> rates, double mission_time);

enum class RateMethod {
  kBasicEvent,
  kFaultTree,
  kMttfReciprocal,
  kSteadyStateFrequency,
  kTransient,
  kNone,  ///< Never occurs (unconnected input, unreachable state).
};

std::string_view to_string(RateMethod method);

/// The rate of one output failure mode.
struct ModeRate {
  FailureModeRef mode;
  double rate = 0;
  RateMethod method = RateMethod::kNone;
  double mtbf = 0;  ///< Hours; infinity for rate 0.
  std::vector<std::string> diagnostics;
};

struct RateResult {
  FailureModeRef top;
  double rate = 0;
  double mtbf = 0;
  RateMethod method = RateMethod::kNone;
  /// Every output failure mode evaluated, in evaluation order.
  std::vector<ModeRate> modes;
  std::vector<std::string> diagnostics;
};

/// Rate of `top`, evaluating upstream components in topological order.
///
/// @throws SharedEventError  `detect_shared_events` reports a diagnostic.
/// @throws DomainError  AND gate without mission time, or a method domain error.
/// Other solver errors propagate with the component id prefixed.
RateResult evaluate_ghcft(const SystemModel& model, const FailureModeRef& top,
                          const SolverConfig& cfg = {});

/// Constant IFM rates entering `component_id` under `cfg`,
/// from evaluating its upstream components.
IfmRates component_input_rates(const SystemModel& model,
                               const std::string& component_id,
                               const SolverConfig& cfg = {});

}  // namespace ghcft
