// Shared fixtures for the unit, slow and acceptance tests: the reference
// models built in code, loaders for the shipped model files, random model
// generators and small independent reference computations.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ghcft/format.h"
#include "ghcft/model.h"
#include "ghcft/qualitative.h"

namespace ghcft::testing {

std::string ModelsDir();
ModelDocument LoadShipped(const std::string& name);  // "fig5" -> models/fig5.ghcft

CmcElement Fig3Cmc();
/// The four-state chain with inputs a (on 1 -> 2) and b (on 3 -> 4).
CmcElement Fig4Cmc();
Component Fig4Component();
/// c1 (CFT) -> c2 (CMC) -> c3 (CFT), built without the parser.
SystemModel Fig5Model();

Component CftComponent(const std::string& id, CftElement cft,
                       std::vector<std::string> inports = {},
                       std::vector<std::string> outports = {});

/// A model with one CFT source, one CMC and one CFT sink, connected in a
/// chain, with random structure. Always passes `validate_model`.
SystemModel RandomSystem(std::mt19937_64& rng, std::size_t max_cmc_states = 6);

/// States s0 .. s(n-1), target s(n-1) absorbing and reached with
/// probability one; rates log-uniform in [0.1, 10].
CmcElement RandomAbsorbingCmc(std::mt19937_64& rng, std::size_t max_states = 6);

/// A random valid document covering every syntactic feature.
ModelDocument RandomDocument(std::mt19937_64& rng);

/// Reference: mean first-passage time by Gaussian elimination with
/// partial pivoting on the hitting-time equations, written independently
/// of the library. Effective rates are given as a dense matrix.
double ReferenceMeanHittingTime(const std::vector<std::vector<double>>& rates,
                                std::size_t initial, std::size_t target);

/// Reference: all simple state paths from `from` to `to` as transition
/// index lists, found by breadth-first extension of partial paths.
std::vector<TransitionPath> ReferenceSimplePaths(const CmcElement& cmc,
                                                 const std::string& to);

/// Canonical term for the subtree feeding `node` in a CFT element:
/// gates become "and(...)" / "or(...)" with children sorted, leaves their id.
std::string CanonicalTerm(const CftElement& cft, const std::string& node);

}  // namespace ghcft::testing
