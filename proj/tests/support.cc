#include "support.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

#include "ghcft/validate.h"

namespace ghcft::testing {

namespace {

std::size_t Uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool Coin(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

double LogUniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

template <typename T>
const T& Pick(std::mt19937_64& rng, const std::vector<T>& items) {
  return items[Uniform(rng, 0, items.size() - 1)];
}

Transition MakeTransition(const std::string& from, const std::string& to,
                          double rate, RateKind kind = RateKind::kFailure) {
  return {from, to, Rate::PerHour(rate, kind)};
}

/// Random AND/OR gates over `leaves`; returns the node feeding the OFM.
std::string RandomGates(std::mt19937_64& rng, CftElement& cft,
                        std::vector<std::string> nodes, const std::string& prefix) {
  std::size_t gates = Uniform(rng, 0, 3);
  for (std::size_t g = 0; g < gates; ++g) {
    Gate gate{prefix + std::to_string(g), Coin(rng, 0.5) ? GateKind::kAnd : GateKind::kOr,
              {}};
    std::size_t fan = Uniform(rng, 1, std::min<std::size_t>(3, nodes.size()));
    std::vector<std::string> pool = nodes;
    std::shuffle(pool.begin(), pool.end(), rng);
    gate.inputs.assign(pool.begin(), pool.begin() + static_cast<long>(fan));
    nodes.push_back(gate.id);
    cft.gates.push_back(std::move(gate));
  }
  return cft.gates.empty() ? Pick(rng, nodes) : cft.gates.back().id;
}

}  // namespace

std::string ModelsDir() {
#ifdef GHCFT_MODELS_DIR
  return GHCFT_MODELS_DIR;
#else
  return "models";
#endif
}

ModelDocument LoadShipped(const std::string& name) {
  return read_model_file(ModelsDir() + "/" + name + ".ghcft");
}

CmcElement Fig3Cmc() {
  CmcElement cmc;
  cmc.states = {"1", "2", "3"};
  cmc.initial = "1";
  cmc.error_states = {"3"};
  cmc.transitions = {MakeTransition("1", "2", 0.03), MakeTransition("2", "3", 0.02),
                     MakeTransition("3", "1", 0.5, RateKind::kRepair)};
  cmc.ofms = {{"fail", "out"}};
  cmc.output_deps = {{"3", "fail"}};
  return cmc;
}

CmcElement Fig4Cmc() {
  CmcElement cmc;
  cmc.states = {"1", "2", "3", "4"};
  cmc.initial = "1";
  cmc.error_states = {"3", "4"};
  cmc.transitions = {MakeTransition("1", "2", 0.03), MakeTransition("2", "3", 0.02),
                     MakeTransition("3", "1", 0.5, RateKind::kRepair),
                     MakeTransition("3", "4", 0.0)};
  cmc.ifms = {{"a", "ia", ""}, {"b", "ib", ""}};
  cmc.ofms = {{"c", "oc"}, {"d", "od"}};
  cmc.input_deps = {{"a", "1", "2"}, {"b", "3", "4"}};
  cmc.output_deps = {{"3", "c"}, {"4", "d"}};
  return cmc;
}

Component Fig4Component() {
  return {"cmc4", {"ia", "ib"}, {"oc", "od"}, Fig4Cmc()};
}

Component CftComponent(const std::string& id, CftElement cft,
                       std::vector<std::string> inports,
                       std::vector<std::string> outports) {
  return {id, std::move(inports), std::move(outports), std::move(cft)};
}

SystemModel Fig5Model() {
  CftElement c1;
  c1.events = {{"x", Rate::PerHour(2e-7), false}, {"y", Rate::PerHour(4e-7), false}};
  c1.gates = {{"g1", GateKind::kOr, {"x", "y"}}};
  c1.ofms = {{"f1", "o1", "g1"}};

  CmcElement c2;
  c2.states = {"1", "2", "3", "4"};
  c2.initial = "1";
  c2.error_states = {"3"};
  c2.transitions = {MakeTransition("1", "2", 1e-5), MakeTransition("2", "3", 0.0),
                    MakeTransition("3", "4", 1e-3)};
  c2.ifms = {{"a", "i1", ""}};
  c2.ofms = {{"b", "o2"}};
  c2.input_deps = {{"a", "2", "3"}};
  c2.output_deps = {{"3", "b"}};

  CftElement c3;
  c3.events = {{"z", Rate::PerHour(1e-7), false}};
  c3.ifms = {{"in_b", "i2", ""}};
  c3.gates = {{"g3", GateKind::kOr, {"z", "in_b"}}};
  c3.ofms = {{"c", "o3", "g3"}};

  SystemModel model;
  model.components = {CftComponent("c1", c1, {}, {"o1"}),
                      {"c2", {"i1"}, {"o2"}, c2},
                      CftComponent("c3", c3, {"i2"}, {"o3"})};
  model.connections = {{{"c1", "o1"}, {"c2", "i1"}}, {{"c2", "o2"}, {"c3", "i2"}}};
  return model;
}

SystemModel RandomSystem(std::mt19937_64& rng, std::size_t max_cmc_states) {
  // Source fault tree with one or two output failure modes on "o".
  CftElement src;
  std::vector<std::string> nodes;
  for (std::size_t i = 0, n = Uniform(rng, 1, 4); i < n; ++i) {
    src.events.push_back({"e" + std::to_string(i), Rate::PerHour(LogUniform(rng, 1e-7, 1e-3)),
                          false});
    nodes.push_back(src.events.back().id);
  }
  std::vector<std::string> src_modes;
  for (std::size_t i = 0, n = Uniform(rng, 1, 2); i < n; ++i) {
    std::string feed = RandomGates(rng, src, nodes, "g" + std::to_string(i) + "_");
    src.ofms.push_back({"f" + std::to_string(i), "o", feed});
    src_modes.push_back(src.ofms.back().id);
    for (const auto& g : src.gates) nodes.push_back(g.id);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  }

  // Markov chain.
  CmcElement mid;
  std::size_t n_states = Uniform(rng, 2, max_cmc_states);
  for (std::size_t i = 0; i < n_states; ++i) mid.states.push_back("s" + std::to_string(i));
  mid.initial = "s0";
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n_states; ++i)
    for (std::size_t j = 0; j < n_states; ++j)
      if (i != j) pairs.emplace_back(i, j);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::size_t n_trans = Uniform(rng, 1, std::min<std::size_t>(5, pairs.size()));
  for (std::size_t k = 0; k < n_trans; ++k) {
    double rate = Coin(rng, 0.3) ? 0.0 : LogUniform(rng, 1e-4, 1e-1);
    mid.transitions.push_back(MakeTransition(mid.states[pairs[k].first],
                                             mid.states[pairs[k].second], rate));
  }
  std::vector<std::string> candidates(mid.states.begin() + 1, mid.states.end());
  std::shuffle(candidates.begin(), candidates.end(), rng);
  std::size_t n_err = Uniform(rng, 1, std::min<std::size_t>(2, candidates.size()));
  mid.error_states.assign(candidates.begin(), candidates.begin() + static_cast<long>(n_err));
  for (std::size_t i = 0, n = Uniform(rng, 1, 2); i < n; ++i) {
    std::string mode = Coin(rng, 0.5) ? Pick(rng, src_modes) : "";
    mid.ifms.push_back({"a" + std::to_string(i), "i", mode});
    std::set<std::size_t> used;
    for (std::size_t d = 0, m = Uniform(rng, 1, 2); d < m; ++d) {
      std::size_t t = Uniform(rng, 0, mid.transitions.size() - 1);
      if (!used.insert(t).second) continue;
      mid.input_deps.push_back(
          {mid.ifms.back().id, mid.transitions[t].from, mid.transitions[t].to});
    }
  }
  std::vector<std::string> mid_modes;
  for (std::size_t i = 0, n = Uniform(rng, 1, 2); i < n; ++i) {
    mid.ofms.push_back({"b" + std::to_string(i), "o"});
    mid_modes.push_back(mid.ofms.back().id);
    std::set<std::string> bound;
    for (std::size_t d = 0, m = Uniform(rng, 1, n_err); d < m; ++d) {
      const std::string& state = Pick(rng, mid.error_states);
      if (bound.insert(state).second) mid.output_deps.push_back({state, mid.ofms.back().id});
    }
  }

  // Sink fault tree.
  CftElement sink;
  std::vector<std::string> sink_nodes;
  for (std::size_t i = 0, n = Uniform(rng, 1, 3); i < n; ++i) {
    sink.events.push_back({"z" + std::to_string(i), Rate::PerHour(LogUniform(rng, 1e-7, 1e-3)),
                           false});
    sink_nodes.push_back(sink.events.back().id);
  }
  sink.ifms.push_back({"in", "i", Coin(rng, 0.5) ? Pick(rng, mid_modes) : ""});
  sink_nodes.push_back("in");
  std::string feed = RandomGates(rng, sink, sink_nodes, "h");
  sink.ofms.push_back({"top", "o", feed});

  SystemModel model;
  model.components = {CftComponent("src", src, {}, {"o"}), {"mid", {"i"}, {"o"}, mid},
                      CftComponent("sink", sink, {"i"}, {"o"})};
  model.connections = {{{"src", "o"}, {"mid", "i"}}, {{"mid", "o"}, {"sink", "i"}}};
  ValidationReport report = validate_model(model);
  if (!report.ok())
    throw std::logic_error("random system generator produced an invalid model: " +
                           report.findings.front().code + " " +
                           report.findings.front().message);
  return model;
}

CmcElement RandomAbsorbingCmc(std::mt19937_64& rng, std::size_t max_states) {
  CmcElement cmc;
  std::size_t n = Uniform(rng, 2, max_states);
  for (std::size_t i = 0; i < n; ++i) cmc.states.push_back("s" + std::to_string(i));
  cmc.initial = "s0";
  cmc.error_states = {cmc.states.back()};
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.insert({i, i + 1});
  for (std::size_t k = 0, extra = Uniform(rng, 0, n); k < extra; ++k) {
    std::size_t from = Uniform(rng, 0, n - 2);  // the target stays absorbing
    std::size_t to = Uniform(rng, 0, n - 1);
    if (from != to) edges.insert({from, to});
  }
  for (const auto& [from, to] : edges)
    cmc.transitions.push_back(MakeTransition(cmc.states[from], cmc.states[to],
                                             LogUniform(rng, 0.1, 10.0),
                                             to < from ? RateKind::kRepair : RateKind::kFailure));
  cmc.ofms = {{"fail", "out"}};
  cmc.output_deps = {{cmc.states.back(), "fail"}};
  return cmc;
}

ModelDocument RandomDocument(std::mt19937_64& rng) {
  ModelDocument doc;
  doc.system = RandomSystem(rng);
  static const std::vector<std::string> kTexts = {
      "", "plain", "with \"quotes\"", "back\\slash", "tabs\tand spaces",
      "unicode \xc3\xa9\xe2\x82\xac", "# not a comment", "{ braces }"};
  for (std::size_t i = 0, n = Uniform(rng, 0, 3); i < n; ++i)
    doc.metadata["key_" + std::to_string(i)] = Pick(rng, kTexts);

  auto random_rate = [&](const Rate& r) {
    RateKind kind = Coin(rng, 0.2) ? RateKind::kRepair : RateKind::kFailure;
    double value = Coin(rng, 0.1) ? 0.0
                   : Coin(rng, 0.1) ? LogUniform(rng, 1e-300, 1e300)
                                    : r.per_hour();
    if (Coin(rng, 0.5)) return Rate::Fit(value * 1e9 < 1e308 ? value * 1e9 : value, kind);
    return Rate::PerHour(value, kind);
  };
  for (auto& component : doc.system.components) {
    if (component.is_cft()) {
      auto& cft = std::get<CftElement>(component.flm);
      for (auto& e : cft.events) {
        e.rate = random_rate(e.rate);
        e.never_occurs = Coin(rng, 0.15);
      }
    } else {
      auto& cmc = std::get<CmcElement>(component.flm);
      for (auto& t : cmc.transitions) t.rate = random_rate(t.rate);
    }
    std::shuffle(component.inports.begin(), component.inports.end(), rng);
  }
  // Declaration order must not matter to the serializer.
  std::shuffle(doc.system.components.begin(), doc.system.components.end(), rng);
  std::shuffle(doc.system.connections.begin(), doc.system.connections.end(), rng);
  return doc;
}

double ReferenceMeanHittingTime(const std::vector<std::vector<double>>& rates,
                                std::size_t initial, std::size_t target) {
  const std::size_t n = rates.size();
  std::vector<std::size_t> unknowns;
  for (std::size_t i = 0; i < n; ++i)
    if (i != target) unknowns.push_back(i);
  const std::size_t m = unknowns.size();
  // Row i: out_i h_i - sum_j r_ij h_j = 1, with h_target = 0.
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t r = 0; r < m; ++r) {
    std::size_t i = unknowns[r];
    double out = 0;
    for (std::size_t j = 0; j < n; ++j) out += (j == i ? 0.0 : rates[i][j]);
    a[r][r] = out;
    for (std::size_t c = 0; c < m; ++c)
      if (c != r) a[r][c] -= rates[i][unknowns[c]];
    a[r][m] = 1;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    if (a[col][col] == 0) throw std::runtime_error("singular hitting-time system");
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
    }
  }
  for (std::size_t r = 0; r < m; ++r)
    if (unknowns[r] == initial) return a[r][m] / a[r][r];
  return 0;
}

std::vector<TransitionPath> ReferenceSimplePaths(const CmcElement& cmc,
                                                 const std::string& to) {
  struct Partial {
    std::string at;
    TransitionPath path;
    std::set<std::string> visited;
  };
  std::vector<TransitionPath> found;
  std::deque<Partial> queue;
  queue.push_back({cmc.initial, {}, {cmc.initial}});
  while (!queue.empty()) {
    Partial p = queue.front();
    queue.pop_front();
    if (p.at == to) {
      found.push_back(p.path);
      continue;
    }
    for (std::size_t k = 0; k < cmc.transitions.size(); ++k) {
      const Transition& t = cmc.transitions[k];
      if (t.from != p.at || p.visited.count(t.to)) continue;
      Partial next = p;
      next.at = t.to;
      next.path.push_back(k);
      next.visited.insert(t.to);
      queue.push_back(std::move(next));
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

std::string CanonicalTerm(const CftElement& cft, const std::string& node) {
  if (const Gate* gate = cft.find_gate(node)) {
    std::vector<std::string> children;
    for (const auto& input : gate->inputs) children.push_back(CanonicalTerm(cft, input));
    std::sort(children.begin(), children.end());
    std::string out = std::string(to_string(gate->kind)) + "(";
    for (std::size_t i = 0; i < children.size(); ++i) out += (i ? "," : "") + children[i];
    return out + ")";
  }
  return node;
}

}  // namespace ghcft::testing
