#pragma once

#include "tga/netlist.hpp"
#include "tga/pattern.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tga {

struct MatchResult {
    /// Distinct netlist gates where the pattern embeds, sorted by name.
    std::vector<GateId> matched_roots;

    std::size_t size() const noexcept { return matched_roots.size(); }
    bool empty() const noexcept { return matched_roots.empty(); }
};

/// Pattern node -> netlist signal.
using Embedding = std::vector<GateId>;

/// Function search: every gate of the root's type (not excluded) into whose
/// fan-in cone the pattern embeds. Gate nodes map to gates of the same type
/// and arity with their inputs in bijection (order-free); FREE leaves bind any
/// signal; distinct inputs of one node bind distinct signals. Key gates in the
/// netlist never host a pattern gate node but may be bound by a FREE leaf.
MatchResult fs(const Netlist& n, const Pattern& p, std::span<const GateId> exclude = {});

/// A concrete embedding of `p` with its root at `root`, if one exists.
std::optional<Embedding> find_embedding(const Netlist& n, const Pattern& p, GateId root);

/// Independent node-by-node check of an embedding against the matching rules.
bool check_embedding(const Netlist& n, const Pattern& p, const Embedding& e);

/// Number of instances of an unlocked unit function, its own origin included.
std::size_t count_occurrences(const Netlist& n, const Pattern& uf);

}  // namespace tga
