#include "ghcft/quantitative.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "ghcft/error.h"

namespace ghcft {

void SolverConfig::check() const {
  if (!(rel_tol > 0) || !(abs_tol > 0))
    throw DomainError("solver tolerances must be positive");
  if (max_steps == 0) throw DomainError("max steps must be positive");
  if (mission_time && !(*mission_time > 0 && std::isfinite(*mission_time)))
    throw DomainError("mission time must be positive and finite");
}

GeneratorView::GeneratorView(std::vector<std::string> states,
                             std::size_t initial, Eigen::MatrixXd base_rates,
                             std::vector<InputLink> inputs)
    : states_(std::move(states)),
      initial_(initial),
      base_(std::move(base_rates)),
      inputs_(std::move(inputs)) {
  const auto n = static_cast<Eigen::Index>(states_.size());
  if (base_.rows() != n || base_.cols() != n || initial_ >= states_.size())
    throw DomainError("generator dimensions do not match the state list");
  Eigen::MatrixXd off = base_;
  for (const auto& link : inputs_) {
    for (auto [from, to] : link.transitions) off(from, to) += link.rate;
  }
  matrix_ = Assemble(std::move(off));
}

Eigen::MatrixXd GeneratorView::Assemble(Eigen::MatrixXd off) {
  for (Eigen::Index i = 0; i < off.rows(); ++i) {
    off(i, i) = 0;
    off(i, i) = -off.row(i).sum();
  }
  return off;
}

std::size_t GeneratorView::index_of(std::string_view state) const {
  auto it = std::find(states_.begin(), states_.end(), state);
  if (it == states_.end())
    throw LookupError("unknown state '" + std::string(state) + "'");
  return static_cast<std::size_t>(it - states_.begin());
}

double GeneratorView::max_rate() const {
  double result = 0;
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i)
    result = std::max(result, -matrix_(i, i));
  return result;
}

Eigen::MatrixXd GeneratorView::matrix_at(double t,
                                         const TimeVaryingInputs& inputs) const {
  if (inputs.empty()) return matrix_;
  Eigen::MatrixXd off = base_;
  for (const auto& link : inputs_) {
    double rate = link.rate;
    if (auto it = inputs.find(link.ifm); it != inputs.end()) {
      rate = it->second(t);
      if (!std::isfinite(rate) || rate < 0)
        throw DomainError("time-varying rate of '" + link.ifm +
                          "' is negative or non-finite at t = " +
                          std::to_string(t));
    }
    for (auto [from, to] : link.transitions) off(from, to) += rate;
  }
  return Assemble(std::move(off));
}

GeneratorView GeneratorView::with_absorbing(std::size_t state) const {
  GeneratorView copy = *this;
  copy.base_.row(static_cast<Eigen::Index>(state)).setZero();
  for (auto& link : copy.inputs_) {
    std::erase_if(link.transitions,
                  [state](const auto& edge) { return edge.first == state; });
  }
  Eigen::MatrixXd off = copy.matrix_;
  off.row(static_cast<Eigen::Index>(state)).setZero();
  copy.matrix_ = Assemble(std::move(off));
  return copy;
}

GeneratorView GeneratorView::scaled(double factor) const {
  GeneratorView copy = *this;
  copy.base_ *= factor;
  for (auto& link : copy.inputs_) link.rate *= factor;
  copy.matrix_ *= factor;
  return copy;
}

GeneratorView build_generator(const CmcElement& cmc, const IfmRates& ifm_rates) {
  const std::size_t n = cmc.states.size();
  auto index = [&](const std::string& s) {
    auto it = std::find(cmc.states.begin(), cmc.states.end(), s);
    if (it == cmc.states.end())
      throw LookupError("unknown state '" + s + "'");
    return static_cast<std::size_t>(it - cmc.states.begin());
  };
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(n, n);
  std::vector<GeneratorView::InputLink> links;
  for (const auto& t : cmc.transitions) {
    std::size_t from = index(t.from), to = index(t.to);
    base(from, to) += t.rate.per_hour();
    for (const auto& ifm : cmc.dependencies(t)) {
      auto link = std::find_if(links.begin(), links.end(),
                               [&](const auto& l) { return l.ifm == ifm; });
      if (link == links.end()) {
        auto rate = ifm_rates.find(ifm);
        if (rate == ifm_rates.end())
          throw UnresolvedInputError("no rate for input failure mode '" + ifm +
                                     "' (transition " + t.from + " -> " +
                                     t.to + ")");
        links.push_back({ifm, rate->second, {}});
        link = links.end() - 1;
      }
      link->transitions.emplace_back(from, to);
    }
  }
  return GeneratorView(cmc.states, index(cmc.initial), std::move(base),
                       std::move(links));
}

namespace {

using StateSet = std::vector<bool>;

StateSet Reachable(const Eigen::MatrixXd& q, std::size_t start) {
  const auto n = static_cast<std::size_t>(q.rows());
  StateSet seen(n, false);
  std::vector<std::size_t> stack = {start};
  seen[start] = true;
  while (!stack.empty()) {
    std::size_t s = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != s && q(s, j) > 0 && !seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

/// States (among `domain`) from which `target` can be reached.
StateSet Reaching(const Eigen::MatrixXd& q, std::size_t target,
                  const StateSet& domain) {
  const auto n = static_cast<std::size_t>(q.rows());
  StateSet seen(n, false);
  std::vector<std::size_t> stack = {target};
  seen[target] = true;
  while (!stack.empty()) {
    std::size_t s = stack.back();
    stack.pop_back();
    for (std::size_t i = 0; i < n; ++i) {
      if (i != s && domain[i] && q(i, s) > 0 && !seen[i]) {
        seen[i] = true;
        stack.push_back(i);
      }
    }
  }
  return seen;
}

/// Closed communicating classes among states reachable from the initial state.
std::vector<std::vector<std::size_t>> ClosedClasses(const Eigen::MatrixXd& q,
                                                    std::size_t initial) {
  const auto n = static_cast<std::size_t>(q.rows());
  StateSet from_initial = Reachable(q, initial);
  std::vector<StateSet> reach(n);
  for (std::size_t i = 0; i < n; ++i)
    if (from_initial[i]) reach[i] = Reachable(q, i);
  std::vector<std::vector<std::size_t>> result;
  StateSet assigned(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (!from_initial[i] || assigned[i]) continue;
    std::vector<std::size_t> cls;
    for (std::size_t j = 0; j < n; ++j)
      if (from_initial[j] && reach[i][j] && reach[j][i]) cls.push_back(j);
    for (std::size_t j : cls) assigned[j] = true;
    bool closed = true;
    for (std::size_t k = 0; k < n; ++k)
      if (reach[i][k] && !reach[k][i]) closed = false;
    if (closed) result.push_back(std::move(cls));
  }
  return result;
}

std::string ConditionNote(double rcond) {
  std::ostringstream out;
  out << "ill-conditioned linear system (estimated condition number "
      << (rcond > 0 ? 1 / rcond : std::numeric_limits<double>::infinity())
      << ")";
  return out.str();
}

constexpr double kMaxCondition = 1e12;

/// Stationary vector of the generator restricted to a closed class.
Eigen::VectorXd ClassStationary(const Eigen::MatrixXd& q,
                                const std::vector<std::size_t>& cls,
                                std::vector<std::string>* diagnostics) {
  const auto m = static_cast<Eigen::Index>(cls.size());
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) a(r, c) = q(cls[c], cls[r]);
  // Scale so the normalization row is commensurate with the rates.
  double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  a /= scale;
  a.row(m - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs(m - 1) = 1;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double rcond = lu.rcond();
  if (!(rcond > 0))
    throw NumericalError("singular stationary system");
  if (diagnostics && 1 / rcond > kMaxCondition)
    diagnostics->push_back(ConditionNote(rcond));
  Eigen::VectorXd pi = lu.solve(rhs);
  if (!pi.allFinite()) throw NumericalError("non-finite stationary solution");
  return pi;
}

}  // namespace

ChainRate mttf_rate(const GeneratorView& gen, std::string_view target) {
  const std::size_t t = gen.index_of(target);
  if (t == gen.initial())
    throw DomainError("target '" + std::string(target) +
                      "' is the initial state; first-passage time is zero");
  const Eigen::MatrixXd q = gen.with_absorbing(t).matrix();
  StateSet reachable = Reachable(q, gen.initial());
  ChainRate result;
  if (!reachable[t]) {
    result.diagnostics.push_back("target '" + std::string(target) +
                                 "' is unreachable; rate is 0");
    return result;
  }
  StateSet reaching = Reaching(q, t, reachable);
  std::vector<std::size_t> transient;
  for (std::size_t i = 0; i < gen.size(); ++i) {
    if (!reachable[i] || i == t) continue;
    if (!reaching[i])
      throw DomainError("target '" + std::string(target) +
                        "' is missed with positive probability (via state '" +
                        gen.states()[i] +
                        "'); mean first-passage time is infinite");
    transient.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(transient.size());
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c)
      a(r, c) = -q(transient[r], transient[c]);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double rcond = lu.rcond();
  if (!(rcond > 0)) throw NumericalError("singular hitting-time system");
  if (1 / rcond > kMaxCondition) result.diagnostics.push_back(ConditionNote(rcond));
  Eigen::VectorXd hitting = lu.solve(Eigen::VectorXd::Ones(m));
  auto start = std::find(transient.begin(), transient.end(), gen.initial()) -
               transient.begin();
  double mean = hitting(start);
  if (!std::isfinite(mean) || !(mean > 0))
    throw NumericalError("non-finite mean first-passage time");
  result.rate = 1 / mean;
  return result;
}

Eigen::VectorXd stationary_distribution(const GeneratorView& gen) {
  auto classes = ClosedClasses(gen.matrix(), gen.initial());
  if (classes.size() != 1)
    throw DomainError("the chain has " + std::to_string(classes.size()) +
                      " closed classes reachable from the initial state; "
                      "the stationary distribution is not unique");
  Eigen::VectorXd pi = ClassStationary(gen.matrix(), classes.front(), nullptr);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(gen.size());
  for (std::size_t k = 0; k < classes.front().size(); ++k)
    full(classes.front()[k]) = pi(k);
  return full;
}

ChainRate steady_state_frequency(const GeneratorView& gen,
                                 std::string_view target) {
  const std::size_t t = gen.index_of(target);
  const Eigen::MatrixXd& q = gen.matrix();
  if (!Reachable(q, gen.initial())[t])
    throw DomainError("target '" + std::string(target) + "' is unreachable");
  auto classes = ClosedClasses(q, gen.initial());
  if (classes.size() != 1)
    throw DomainError("the chain has " + std::to_string(classes.size()) +
                      " closed classes reachable from the initial state; "
                      "use the first-passage rate instead");
  const auto& cls = classes.front();
  if (std::find(cls.begin(), cls.end(), t) == cls.end())
    throw DomainError("target '" + std::string(target) +
                      "' is transient; use the first-passage rate instead");
  ChainRate result;
  Eigen::VectorXd pi = ClassStationary(q, cls, &result.diagnostics);
  if (cls.size() == 1)
    result.diagnostics.push_back("target '" + std::string(target) +
                                 "' is absorbing; long-run entering frequency is 0");
  for (std::size_t k = 0; k < cls.size(); ++k) {
    if (cls[k] != t) result.rate += pi(k) * q(cls[k], t);
  }
  return result;
}

ChainRate series_path_rate(std::span<const double> rates) {
  if (rates.empty()) throw DomainError("series path needs at least one rate");
  ChainRate result;
  double mean = 0;
  for (double r : rates) {
    if (!std::isfinite(r) || r < 0)
      throw DomainError("series path rates must be finite and nonnegative");
    if (r == 0) {
      result.diagnostics.push_back(
          "a stage has rate 0 (infinite mean duration); rate is 0");
      result.rate = 0;
      return result;
    }
    mean += 1 / r;
  }
  result.rate = 1 / mean;
  return result;
}

double and_gate_rate(std::span<const double> rates, double mission_time) {
  double q = 1;
  for (double r : rates) q *= -std::expm1(-r * mission_time);
  return -std::log1p(-q) / mission_time;
}

std::string_view to_string(RateMethod method) {
  switch (method) {
    case RateMethod::kBasicEvent: return "basic-event";
    case RateMethod::kFaultTree: return "fault-tree";
    case RateMethod::kMttfReciprocal: return "mttf-reciprocal";
    case RateMethod::kSteadyStateFrequency: return "steady-state-frequency";
    case RateMethod::kTransient: return "transient";
    case RateMethod::kNone: return "none";
  }
  return "none";
}

namespace {

struct StateRate {
  double rate = 0;
  RateMethod method = RateMethod::kNone;
  std::vector<std::string> diagnostics;
};

StateRate TransientStateRate(const GeneratorView& gen, std::size_t target,
                             const SolverConfig& cfg) {
  if (!cfg.mission_time)
    throw DomainError("transient rates need a mission time");
  if (target == gen.initial())
    throw DomainError("error state '" + gen.states()[target] +
                      "' is the initial state");
  double horizon = *cfg.mission_time;
  GeneratorView absorbing = gen.with_absorbing(target);
  Trajectory traj = transient_solve(absorbing, std::span(&horizon, 1), cfg);
  double p = std::clamp(traj.probabilities.back()(target), 0.0, 1.0);
  StateRate result;
  result.method = RateMethod::kTransient;
  result.rate = p >= 1 ? std::numeric_limits<double>::infinity()
                       : -std::log1p(-p) / horizon;
  return result;
}

StateRate ErrorStateRate(const GeneratorView& gen, const std::string& state,
                         const SolverConfig& cfg) {
  const std::size_t t = gen.index_of(state);
  if (cfg.transient_rates) return TransientStateRate(gen, t, cfg);

  StateRate result;
  bool absorbing = gen.matrix()(t, t) == 0;
  bool recurrent = false;
  if (!absorbing) {
    auto classes = ClosedClasses(gen.matrix(), gen.initial());
    recurrent = classes.size() == 1 &&
                std::find(classes.front().begin(), classes.front().end(), t) !=
                    classes.front().end();
  }
  ChainRate rate;
  if (recurrent) {
    rate = steady_state_frequency(gen, state);
    result.method = RateMethod::kSteadyStateFrequency;
  } else {
    if (!absorbing)
      result.diagnostics.push_back(
          "error state '" + state +
          "' is left but not revisited in the long run; first-passage rate used");
    rate = mttf_rate(gen, state);
    result.method = RateMethod::kMttfReciprocal;
  }
  result.rate = rate.rate;
  result.diagnostics.insert(result.diagnostics.end(), rate.diagnostics.begin(),
                            rate.diagnostics.end());
  return result;
}

class Evaluator {
 public:
  Evaluator(const SystemModel& model, const SolverConfig& cfg)
      : model_(model), cfg_(cfg) {
    cfg_.check();
  }

  /// Evaluates every component `id` depends on, and `id` itself if asked.
  void EvaluateUpstreamOf(const std::string& id, bool include_self) {
    std::set<std::string> needed = {id};
    std::vector<std::string> stack = {id};
    while (!stack.empty()) {
      std::string current = stack.back();
      stack.pop_back();
      for (const auto& c : model_.connections) {
        if (c.to.component == current && needed.insert(c.from.component).second)
          stack.push_back(c.from.component);
      }
    }
    for (const auto& cid : topological_order(model_)) {
      if (!needed.count(cid) || (cid == id && !include_self)) continue;
      Evaluate(*model_.find(cid));
    }
  }

  IfmRates InputRates(const Component& component) const {
    IfmRates rates;
    for (const auto& ifm : component.ifms()) {
      double sum = 0;
      for (const auto& source : model_.resolve_input(component, ifm))
        sum += rates_.at(source).rate;
      rates[ifm.id] = sum;
    }
    return rates;
  }

  const ModeRate& Get(const FailureModeRef& ref) const { return rates_.at(ref); }
  const std::vector<FailureModeRef>& order() const { return order_; }

 private:
  void Evaluate(const Component& component) {
    const std::string prefix = "component '" + component.id + "': ";
    try {
      IfmRates inputs = InputRates(component);
      if (component.is_cft())
        EvaluateCft(component, inputs);
      else
        EvaluateCmc(component, inputs);
    } catch (const SharedEventError&) {
      throw;
    } catch (const DomainError& e) {
      throw DomainError(prefix + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError(prefix + e.what());
    } catch (const ResourceLimitError& e) {
      throw ResourceLimitError(prefix + e.what());
    } catch (const UnresolvedInputError& e) {
      throw UnresolvedInputError(prefix + e.what());
    }
  }

  void Store(ModeRate mode) {
    mode.mtbf = mtbf_hours(mode.rate);
    order_.push_back(mode.mode);
    rates_[mode.mode] = std::move(mode);
  }

  void EvaluateCft(const Component& component, const IfmRates& inputs) {
    const CftElement& cft = component.cft();
    std::map<std::string, double> memo;
    std::function<double(const std::string&)> node_rate =
        [&](const std::string& id) -> double {
      if (auto it = memo.find(id); it != memo.end()) return it->second;
      double rate = 0;
      if (const BasicEvent* event = cft.find_event(id)) {
        rate = event->never_occurs ? 0.0 : event->rate.per_hour();
      } else if (const Gate* gate = cft.find_gate(id)) {
        std::vector<double> children;
        for (const auto& input : gate->inputs) children.push_back(node_rate(input));
        if (gate->kind == GateKind::kOr) {
          for (double r : children) rate += r;
        } else {
          if (!cfg_.mission_time)
            throw DomainError(
                "AND gate '" + gate->id +
                "' cannot be quantified without a mission time: combining "
                "constant rates under AND requires the exposure time to form "
                "the joint unavailability");
          rate = and_gate_rate(children, *cfg_.mission_time);
        }
      } else if (cft.find_ifm(id)) {
        rate = inputs.at(id);
      } else {
        throw LookupError("unknown node '" + id + "'");
      }
      memo[id] = rate;
      return rate;
    };
    for (const auto& ofm : cft.ofms) {
      ModeRate mode;
      mode.mode = {component.id, ofm.id};
      mode.rate = node_rate(ofm.input);
      mode.method = cft.find_event(ofm.input) ? RateMethod::kBasicEvent
                                              : RateMethod::kFaultTree;
      Store(std::move(mode));
    }
  }

  void EvaluateCmc(const Component& component, const IfmRates& inputs) {
    const CmcElement& cmc = component.cmc();
    GeneratorView gen = build_generator(cmc, inputs);
    for (const auto& ofm : cmc.ofms) {
      ModeRate mode;
      mode.mode = {component.id, ofm.id};
      auto states = cmc.error_states_of(ofm.id);
      for (const auto& state : states) {
        StateRate s = ErrorStateRate(gen, state, cfg_);
        mode.rate += s.rate;
        if (mode.method == RateMethod::kNone) mode.method = s.method;
        for (auto& d : s.diagnostics)
          mode.diagnostics.push_back("state '" + state + "': " + d);
      }
      if (states.size() > 1)
        mode.diagnostics.push_back(
            "several error states; their rates are summed");
      Store(std::move(mode));
    }
  }

  const SystemModel& model_;
  SolverConfig cfg_;
  std::map<FailureModeRef, ModeRate> rates_;
  std::vector<FailureModeRef> order_;
};

}  // namespace

RateResult evaluate_ghcft(const SystemModel& model, const FailureModeRef& top,
                          const SolverConfig& cfg) {
  const Component* component = model.find(top.component);
  if (!component)
    throw LookupError("unknown component '" + top.component + "'");
  auto ofms = component->ofm_ids();
  if (std::find(ofms.begin(), ofms.end(), top.mode) == ofms.end())
    throw LookupError("'" + top.str() + "' is not an output failure mode");

  auto shared = detect_shared_events(model, top);
  if (!shared.empty()) {
    std::string message = "quantitative analysis refused: ";
    for (const auto& d : shared) message += d.message + "; ";
    message.resize(message.size() - 2);
    throw SharedEventError(message);
  }

  Evaluator evaluator(model, cfg);
  evaluator.EvaluateUpstreamOf(top.component, true);
  RateResult result;
  result.top = top;
  for (const auto& ref : evaluator.order()) {
    const ModeRate& mode = evaluator.Get(ref);
    result.modes.push_back(mode);
    for (const auto& d : mode.diagnostics)
      result.diagnostics.push_back(ref.str() + ": " + d);
  }
  const ModeRate& top_rate = evaluator.Get(top);
  result.rate = top_rate.rate;
  result.mtbf = top_rate.mtbf;
  result.method = top_rate.method;
  return result;
}

IfmRates component_input_rates(const SystemModel& model,
                               const std::string& component_id,
                               const SolverConfig& cfg) {
  const Component* component = model.find(component_id);
  if (!component)
    throw LookupError("unknown component '" + component_id + "'");
  Evaluator evaluator(model, cfg);
  evaluator.EvaluateUpstreamOf(component_id, false);
  return evaluator.InputRates(*component);
}

}  // namespace ghcft
