#include "tga/matcher.hpp"

#include <algorithm>
#include <unordered_set>

namespace tga {

namespace {

struct Step {
    NodeId node;
    /// For companions: an input already bound when this step runs.
    NodeId anchor = 0;
    bool companion = false;
};

std::vector<Step> plan(const Pattern& p) {
    std::vector<Step> steps;
    std::vector<char> covered(p.nodes.size(), 0);
    for (auto v : p.rooted_order()) {
        covered[v] = 1;
        if (!p.nodes[v].free) steps.push_back(Step{v});
    }
    std::vector<NodeId> rest;
    for (NodeId v = 0; v < p.nodes.size(); ++v) {
        if (!covered[v] && !p.nodes[v].free) rest.push_back(v);
    }
    // Companions become reachable once one of their inputs is bound; leaves
    // they introduce are bound as a side effect of expanding them.
    while (!rest.empty()) {
        bool progress = false;
        for (auto it = rest.begin(); it != rest.end(); ++it) {
            const auto& node = p.nodes[*it];
            auto anchor = std::find_if(node.inputs.begin(), node.inputs.end(), [&](NodeId in) { return covered[in]; });
            if (covered[*it]) {
                steps.push_back(Step{*it});  // bound by an earlier companion
            } else if (anchor != node.inputs.end()) {
                steps.push_back(Step{*it, *anchor, true});
            } else {
                continue;
            }
            covered[*it] = 1;
            for (auto in : node.inputs) covered[in] = 1;
            rest.erase(it);
            progress = true;
            break;
        }
        if (!progress) throw NetlistError("pattern has a component disconnected from its root");
    }
    return steps;
}

class Search {
public:
    Search(const Netlist& n, const Pattern& p) : n_(n), p_(p), steps_(plan(p)), bound_(p.nodes.size(), kNoGate) {}

    bool embeds_at(GateId root) {
        std::fill(bound_.begin(), bound_.end(), kNoGate);
        trail_.clear();
        if (!hosts(p_.root, root)) return false;
        bound_[p_.root] = root;
        return step(0);
    }

    const Embedding& embedding() const { return bound_; }

private:
    bool hosts(NodeId v, GateId g) const {
        const auto& node = p_.nodes[v];
        if (node.free) return true;
        if (node.key_gate) return false;
        const auto& gate = n_.gate(g);
        return gate.type == node.type && gate.inputs.size() == node.inputs.size() && !n_.is_key_gate(g);
    }

    bool bind(NodeId v, GateId g) {
        if (bound_[v] != kNoGate) return bound_[v] == g;
        if (!hosts(v, g)) return false;
        bound_[v] = g;
        trail_.push_back(v);
        return true;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            bound_[trail_.back()] = kNoGate;
            trail_.pop_back();
        }
    }

    bool step(std::size_t i) {
        if (i == steps_.size()) return true;
        const auto& s = steps_[i];
        if (!s.companion) return expand(i, s.node, 0, 0);
        if (bound_[s.node] != kNoGate) return expand(i, s.node, 0, 0);
        for (auto cand : n_.gate(bound_[s.anchor]).fanouts) {
            const auto mark = trail_.size();
            if (bind(s.node, cand) && expand(i, s.node, 0, 0)) return true;
            undo(mark);
        }
        return false;
    }

    // Assigns pattern input slot `slot` of node v to one unused fanin position.
    bool expand(std::size_t i, NodeId v, std::size_t slot, std::uint32_t used) {
        const auto& node = p_.nodes[v];
        if (slot == node.inputs.size()) return step(i + 1);
        const auto& fanin = n_.gate(bound_[v]).inputs;
        const auto child = node.inputs[slot];
        for (std::size_t j = 0; j < fanin.size(); ++j) {
            if (used & (1u << j)) continue;
            const auto sig = fanin[j];
            if (!distinct_from_siblings(node, slot, child, sig)) continue;
            const auto mark = trail_.size();
            if (bind(child, sig) && expand(i, v, slot + 1, used | (1u << j))) return true;
            undo(mark);
        }
        return false;
    }

    bool distinct_from_siblings(const PatternNode& node, std::size_t slot, NodeId child, GateId sig) const {
        for (std::size_t k = 0; k < slot; ++k) {
            const auto other = node.inputs[k];
            if (other != child && bound_[other] == sig) return false;
        }
        return true;
    }

    const Netlist& n_;
    const Pattern& p_;
    std::vector<Step> steps_;
    Embedding bound_;
    std::vector<NodeId> trail_;
};

void check_fanin_width(const Pattern& p) {
    for (const auto& node : p.nodes) {
        if (node.inputs.size() > 32) throw NetlistError("pattern node with more than 32 inputs");
    }
}

}  // namespace

MatchResult fs(const Netlist& n, const Pattern& p, std::span<const GateId> exclude) {
    p.validate();
    check_fanin_width(p);
    MatchResult result;
    const auto& root = p.nodes[p.root];
    if (root.key_gate) return result;
    std::unordered_set<GateId> skip(exclude.begin(), exclude.end());
    Search search(n, p);
    for (auto g : n.gates_of_type(root.type)) {
        if (skip.contains(g)) continue;
        if (n.gate(g).inputs.size() != root.inputs.size() || n.is_key_gate(g)) continue;
        if (search.embeds_at(g)) result.matched_roots.push_back(g);
    }
    std::sort(result.matched_roots.begin(), result.matched_roots.end(),
              [&](GateId a, GateId b) { return n.name(a) < n.name(b); });
    return result;
}

std::optional<Embedding> find_embedding(const Netlist& n, const Pattern& p, GateId root) {
    p.validate();
    check_fanin_width(p);
    Search search(n, p);
    if (!search.embeds_at(root)) return std::nullopt;
    return search.embedding();
}

bool check_embedding(const Netlist& n, const Pattern& p, const Embedding& e) {
    if (e.size() != p.nodes.size()) return false;
    for (NodeId v = 0; v < p.nodes.size(); ++v) {
        const auto& node = p.nodes[v];
        if (e[v] == kNoGate || e[v] >= n.size()) return false;
        if (node.free) continue;
        const auto& gate = n.gate(e[v]);
        if (node.key_gate || n.is_key_gate(e[v])) return false;
        if (gate.type != node.type || gate.inputs.size() != node.inputs.size()) return false;
        // Input lists must agree as multisets.
        std::vector<GateId> want;
        for (auto in : node.inputs) want.push_back(e[in]);
        std::vector<GateId> have = gate.inputs;
        std::sort(want.begin(), want.end());
        std::sort(have.begin(), have.end());
        if (want != have) return false;
        for (std::size_t a = 0; a < node.inputs.size(); ++a) {
            for (std::size_t b = a + 1; b < node.inputs.size(); ++b) {
                if (node.inputs[a] != node.inputs[b] && e[node.inputs[a]] == e[node.inputs[b]]) return false;
            }
        }
    }
    return true;
}

std::size_t count_occurrences(const Netlist& n, const Pattern& uf) { return fs(n, uf).size(); }

}  // namespace tga
