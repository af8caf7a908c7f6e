#include "tga/euf.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace tga {

std::string_view to_string(Transform t) {
    switch (t) {
        case Transform::E0: return "E0";
        case Transform::E1: return "E1";
        case Transform::E1Hat: return "E1HAT";
    }
    return "?";
}

std::vector<bool> HypothesisTable::combo(std::size_t index) const {
    std::vector<bool> bits(j);
    for (std::size_t i = 0; i < j; ++i) bits[i] = (index >> i) & 1u;
    return bits;
}

std::size_t HypothesisTable::index_of(const std::vector<bool>& hypothesis) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < hypothesis.size(); ++i) {
        if (hypothesis[i]) index |= std::size_t{1} << i;
    }
    return index;
}

std::size_t HypothesisTable::nonzero() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c != 0; }));
}

// ---------------------------------------------------------------------------

std::vector<GateId> uf_roots(const Netlist& n, GateId key_gate) {
    if (!n.is_key_gate(key_gate)) throw NetlistError("'" + n.name(key_gate) + "' is not a key gate");
    std::vector<GateId> successors;
    for (auto s : n.gate(key_gate).fanouts) {
        if (is_logic(n.gate(s).type) && !n.is_key_gate(s)) successors.push_back(s);
    }
    std::sort(successors.begin(), successors.end(), [&](GateId a, GateId b) { return n.name(a) < n.name(b); });
    return successors;
}

UnitFunction unit_function_at(const Netlist& n, GateId successor, int layers) {
    if (layers < 1) throw NetlistError("unit functions need layers >= 1");
    const auto& keys = n.key_inputs();
    auto key_index = [&](GateId kg) {
        return static_cast<std::size_t>(std::find(keys.begin(), keys.end(), n.key_input_of(kg)) - keys.begin());
    };
    UnitFunction uf;
    uf.root = successor;
    uf.layers = layers;
    uf.pattern = fanin_cone(n, successor, layers + 1);
    auto& slots = uf.pattern.key_slots;
    std::sort(slots.begin(), slots.end(), [&](NodeId a, NodeId b) {
        const auto ga = uf.pattern.nodes[a].origin;
        const auto gb = uf.pattern.nodes[b].origin;
        const auto ka = key_index(ga);
        const auto kb = key_index(gb);
        return ka != kb ? ka < kb : n.name(ga) < n.name(gb);
    });
    for (auto slot : slots) uf.key_gates.push_back(uf.pattern.nodes[slot].origin);
    return uf;
}

std::vector<UnitFunction> extract_uf(const Netlist& n, GateId key_gate, int layers) {
    const auto roots = uf_roots(n, key_gate);
    if (roots.empty()) throw FanoutlessKeyGate("key gate '" + n.name(key_gate) + "' feeds no logic gate");
    std::vector<UnitFunction> out;
    for (auto s : roots) out.push_back(unit_function_at(n, s, layers));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<NodeId> consumers_of(const Pattern& p, NodeId v) {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < p.nodes.size(); ++i) {
        const auto& in = p.nodes[i].inputs;
        if (std::find(in.begin(), in.end(), v) != in.end()) out.push_back(i);
    }
    return out;
}

void redirect(Pattern& p, NodeId consumer, NodeId from, NodeId to) {
    for (auto& in : p.nodes[consumer].inputs) {
        if (in == from) in = to;
    }
}

// Consumers ordered so that a consumer feeding another comes first.
void sort_inputs_first(const Pattern& p, std::vector<NodeId>& nodes) {
    std::vector<int> depth(p.nodes.size(), -1);
    std::function<int(NodeId)> height = [&](NodeId v) -> int {
        if (depth[v] >= 0) return depth[v];
        int h = 0;
        for (auto in : p.nodes[v].inputs) h = std::max(h, height(in) + 1);
        return depth[v] = h;
    };
    std::stable_sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) { return height(a) < height(b); });
}

// Drops key gates, key leaves and anything else the root no longer reaches.
Pattern compact(const Pattern& p) {
    std::vector<char> keep(p.nodes.size(), 0);
    for (auto v : p.rooted_order()) keep[v] = 1;
    std::vector<NodeId> remap(p.nodes.size(), 0);
    Pattern out;
    for (NodeId v = 0; v < p.nodes.size(); ++v) {
        if (!keep[v]) continue;
        remap[v] = static_cast<NodeId>(out.nodes.size());
        out.nodes.push_back(p.nodes[v]);
    }
    for (auto& node : out.nodes) {
        for (auto& in : node.inputs) in = remap[in];
    }
    out.root = remap[p.root];
    return out;
}

}  // namespace

Pattern rewrite_key_gates(const Pattern& src, const std::vector<Transform>& variants, std::string& skip_reason) {
    if (variants.size() != src.key_slots.size()) throw NetlistError("one transform per key gate is required");
    Pattern p = src;
    skip_reason.clear();
    for (std::size_t i = 0; i < p.key_slots.size(); ++i) {
        const auto k = p.key_slots[i];
        const auto& kin = p.nodes[k].inputs;
        const auto driver_it = std::find_if(kin.begin(), kin.end(), [&](NodeId v) { return !p.nodes[v].key_leaf; });
        if (driver_it == kin.end()) throw NetlistError("key gate node without a data input");
        const auto driver = *driver_it;
        const auto consumers = consumers_of(p, k);
        std::vector<NodeId> cancelled;

        switch (variants[i]) {
            case Transform::E0: break;
            case Transform::E1: {
                const auto& d = p.nodes[driver];
                if (d.free || d.key_gate) {
                    skip_reason = "E1 on key gate " + std::to_string(i) + ": driver is a cone leaf";
                    return p;
                }
                if (consumers_of(p, driver) != std::vector<NodeId>{k}) {
                    skip_reason = "E1 on key gate " + std::to_string(i) + ": driver has other consumers";
                    return p;
                }
                p.nodes[driver].type = complement(d.type);
                break;
            }
            case Transform::E1Hat: {
                auto ordered = consumers;
                sort_inputs_first(p, ordered);
                for (auto c : ordered) {
                    // A NOT synthesized by an earlier dualization holds a
                    // pending complement of this key gate; the inversion
                    // cancels it.
                    if (p.nodes[c].type == GateType::Not && p.nodes[c].origin == kNoGate) {
                        cancelled.push_back(c);
                        continue;
                    }
                    const auto dual = demorgan_dual(p.nodes[c].type);
                    if (!dual || p.nodes[c].key_gate) {
                        skip_reason = "E1HAT on key gate " + std::to_string(i) + ": successor is not dualizable";
                        return p;
                    }
                    // Replacements are decided against the original input
                    // list so a substituted signal is never complemented twice.
                    std::map<NodeId, NodeId> complemented;
                    for (auto x : p.nodes[c].inputs) {
                        if (x == k || complemented.contains(x)) continue;
                        const auto xn = p.nodes[x];
                        if (!xn.free && xn.type == GateType::Not) {
                            complemented[x] = xn.inputs[0];
                        } else if (!xn.free && !xn.key_gate && has_complement(xn.type)) {
                            if (consumers_of(p, x) == std::vector<NodeId>{c}) {
                                p.nodes[x].type = complement(xn.type);
                                complemented[x] = x;
                            } else {
                                complemented[x] = p.add_gate(complement(xn.type), xn.inputs);
                            }
                        } else {
                            complemented[x] = p.add_gate(GateType::Not, {x});
                        }
                    }
                    for (auto& in : p.nodes[c].inputs) {
                        if (in != k) in = complemented.at(in);
                    }
                    p.nodes[c].type = *dual;
                }
                break;
            }
        }
        // Clones made above may read the key gate too.
        for (NodeId v = 0; v < p.nodes.size(); ++v) {
            if (v != k) redirect(p, v, k, driver);
        }
        p.nodes[k].inputs.clear();
        if (p.root == k) p.root = driver;
        for (auto inv : cancelled) {
            for (auto c : consumers_of(p, inv)) redirect(p, c, inv, driver);
            if (p.root == inv) p.root = driver;
        }
    }
    p.key_slots.clear();
    return compact(p);
}

EufSet gen_eufs(const Netlist& n, const UnitFunction& uf) {
    const auto j = uf.key_gates.size();
    if (uf.pattern.key_slots.size() != j) throw NetlistError("unit function key gates and key slots disagree");
    std::vector<bool> transparent(j);
    std::vector<GateId> key_input(j);
    for (std::size_t i = 0; i < j; ++i) {
        transparent[i] = uf.pattern.nodes[uf.pattern.key_slots[i]].type == GateType::Xnor;
        key_input[i] = n.key_input_of(uf.key_gates[i]);
    }

    EufSet out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < j; ++i) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
        Euf e;
        e.variants.resize(j);
        e.hypothesis.resize(j);
        auto rest = code;
        for (std::size_t i = 0; i < j; ++i) {
            e.variants[i] = static_cast<Transform>(rest % 3);
            rest /= 3;
            e.hypothesis[i] = e.variants[i] == Transform::E0 ? transparent[i] : !transparent[i];
        }
        auto describe = [&] {
            std::string s;
            for (std::size_t i = 0; i < j; ++i) {
                if (i) s += ",";
                s += std::string(to_string(e.variants[i]));
            }
            return "(" + s + ")";
        };
        bool consistent = true;
        for (std::size_t a = 0; a < j && consistent; ++a) {
            for (std::size_t b = a + 1; b < j; ++b) {
                if (key_input[a] == key_input[b] && e.hypothesis[a] != e.hypothesis[b]) {
                    consistent = false;
                    break;
                }
            }
        }
        if (!consistent) {
            out.skipped.push_back(describe() + ": conflicting bits for a shared key input");
            continue;
        }
        std::string reason;
        e.pattern = rewrite_key_gates(uf.pattern, e.variants, reason);
        if (!reason.empty()) {
            out.skipped.push_back(describe() + ": " + reason);
            continue;
        }
        out.eufs.push_back(std::move(e));
    }
    return out;
}

}  // namespace tga
