#pragma once

#include "tga/netlist.hpp"
#include "tga/pattern.hpp"

#include <string>
#include <vector>

namespace tga {

/// Locked fan-in cone rooted at a successor of a key gate.
struct UnitFunction {
    GateId root = kNoGate;
    int layers = 1;
    Pattern pattern;
    /// Key gates inside the cone, ordered by key-input index then name;
    /// pattern.key_slots is kept in the same order.
    std::vector<GateId> key_gates;
};

enum class Transform { E0, E1, E1Hat };

std::string_view to_string(Transform t);

/// Candidate original of a unit function under one hypothesis key.
struct Euf {
    /// One bit per UnitFunction::key_gates entry: the assumed key-input value.
    std::vector<bool> hypothesis;
    std::vector<Transform> variants;
    /// Key-free rewrite of the unit function.
    Pattern pattern;
};

/// Match counts per hypothesis; combo index bit i is the value of key gate i.
struct HypothesisTable {
    std::size_t j = 0;
    std::vector<std::uint64_t> counts;

    explicit HypothesisTable(std::size_t key_gates = 0) : j(key_gates), counts(std::size_t{1} << key_gates, 0) {}
    std::vector<bool> combo(std::size_t index) const;
    static std::size_t index_of(const std::vector<bool>& hypothesis);
    std::size_t nonzero() const;
};

class FanoutlessKeyGate : public NetlistError {
public:
    using NetlistError::NetlistError;
};

/// One unit function per logic successor of `key_gate`. `layers` counts the
/// logic levels in front of the key gate, so the cone spans `layers + 1`
/// levels from the successor. Throws FanoutlessKeyGate if the key gate feeds
/// no logic gate.
std::vector<UnitFunction> extract_uf(const Netlist& n, GateId key_gate, int layers);

/// Logic successors of a key gate that anchor its unit functions, sorted by name.
std::vector<GateId> uf_roots(const Netlist& n, GateId key_gate);

/// The unit function of `key_gate` rooted at one of its successors.
UnitFunction unit_function_at(const Netlist& n, GateId successor, int layers);

struct EufSet {
    std::vector<Euf> eufs;
    /// One line per skipped (hypothesis, variant) combination.
    std::vector<std::string> skipped;
};

/// All 3^j rewrites of `uf`, minus variants that are illegal for the cone's
/// structure and combinations that assign different bits to one shared key input.
EufSet gen_eufs(const Netlist& n, const UnitFunction& uf);

/// Rewrites every key gate of `p` (listed in key_slots) by the matching
/// transform; `skip_reason` is set and the result is unspecified if a
/// transform does not apply.
Pattern rewrite_key_gates(const Pattern& p, const std::vector<Transform>& variants, std::string& skip_reason);

}  // namespace tga
