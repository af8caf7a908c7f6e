#pragma once

#include "tga/netlist.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tga {

using NodeId = std::uint32_t;

/// One node of a structural pattern. A FREE node is a cone leaf: it binds to
/// any signal and carries no type constraint. Key leaves are FREE nodes that
/// stand for a key input of a locked pattern.
struct PatternNode {
    bool free = false;
    bool key_leaf = false;
    bool key_gate = false;
    GateType type = GateType::Input;
    std::vector<NodeId> inputs;
    /// Netlist signal this node was extracted from, kNoGate for synthesized nodes.
    GateId origin = kNoGate;
};

/// Rooted fan-in pattern (a unit function or one of its rewritten variants).
///
/// Gate nodes are shared, so reconvergent structure in the source cone stays
/// reconvergent in the pattern; FREE leaves are shared per source signal.
/// Nodes not reachable backward from the root are companions: they must hang
/// off signals already bound by the rooted part (e.g. the carry AND of a half
/// adder next to its sum XOR).
struct Pattern {
    std::vector<PatternNode> nodes;
    NodeId root = 0;
    /// Gate nodes that are key gates (empty for fully rewritten patterns).
    std::vector<NodeId> key_slots;

    NodeId add_free(GateId origin = kNoGate);
    NodeId add_gate(GateType type, std::vector<NodeId> inputs, GateId origin = kNoGate);

    std::size_t gate_count() const;
    std::vector<NodeId> free_leaves() const;
    /// Leaves that are not key leaves.
    std::vector<NodeId> data_leaves() const;
    /// Consumers of each node inside the pattern.
    std::vector<std::vector<NodeId>> consumers() const;
    /// Nodes reachable backward from the root (root first, breadth-first).
    std::vector<NodeId> rooted_order() const;

    /// Throws NetlistError if the pattern is malformed.
    void validate() const;

    /// Hex digest of the root's expression tree, invariant under commutative
    /// input order and node numbering (leaf sharing is not distinguished).
    std::string fingerprint() const;
};

/// Evaluates every node of a pattern for 64 rows at once. `leaf_values` is
/// indexed by node id and must be set for every FREE node.
std::vector<std::uint64_t> evaluate(const Pattern& p, std::vector<std::uint64_t> leaf_values);

/// Fan-in cone of `root` within `layers` gate levels (the root is level 1).
/// Key gates occupy the level of the gate they feed, so they never consume a
/// layer; their key inputs become key leaves. Primary inputs and DFF outputs
/// are always FREE leaves.
Pattern fanin_cone(const Netlist& n, GateId root, int layers);

}  // namespace tga
