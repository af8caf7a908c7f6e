#include "support.hpp"

#include "tga/random.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#ifndef TGA_CIRCUITS_DIR
#error "TGA_CIRCUITS_DIR must point at the shipped example circuits"
#endif

namespace tga::test {

std::string circuit_path(const std::string& name) { return std::string(TGA_CIRCUITS_DIR) + "/" + name; }

Netlist load_circuit(const std::string& name) { return read_bench_file(circuit_path(name)); }

Netlist random_netlist(std::size_t gates, std::size_t inputs, std::uint64_t seed) {
    static const GateType kTypes[] = {GateType::And, GateType::Or,  GateType::Nand, GateType::Nor,
                                      GateType::Xor, GateType::Xnor, GateType::Not};
    Rng rng(seed);
    Netlist n;
    std::vector<GateId> signals;
    for (std::size_t i = 0; i < inputs; ++i) signals.push_back(n.add_input("i" + std::to_string(i)));
    for (std::size_t g = 0; g < gates; ++g) {
        const auto type = kTypes[rng.below(std::size(kTypes))];
        std::size_t arity = type == GateType::Not ? 1 : (rng.below(5) == 0 ? 3 : 2);
        arity = std::min(arity, signals.size());
        if (arity < 2 && type != GateType::Not) arity = 2;
        // Prefer recent signals so the graph has depth.
        const std::size_t window = std::min<std::size_t>(signals.size(), 24);
        std::vector<GateId> ins;
        while (ins.size() < arity) {
            const auto pick = rng.below(3) == 0 ? signals[rng.below(signals.size())]
                                                : signals[signals.size() - 1 - rng.below(window)];
            if (std::find(ins.begin(), ins.end(), pick) == ins.end()) ins.push_back(pick);
        }
        signals.push_back(n.add_gate("g" + std::to_string(g), type, ins));
    }
    for (std::size_t s = inputs; s < signals.size(); ++s) {
        if (n.gate(signals[s]).fanouts.empty() || rng.below(10) == 0) n.add_output(signals[s]);
    }
    return n;
}

Netlist array_multiplier(std::size_t bits) {
    Netlist n;
    std::vector<GateId> a, b;
    for (std::size_t i = 0; i < bits; ++i) a.push_back(n.add_input("a" + std::to_string(i)));
    for (std::size_t i = 0; i < bits; ++i) b.push_back(n.add_input("b" + std::to_string(i)));
    std::size_t counter = 0;
    auto name = [&](const char* p) { return std::string(p) + std::to_string(counter++); };
    auto half = [&](GateId x, GateId y) {
        const auto s = n.add_gate(name("hs"), GateType::Xor, {x, y});
        const auto c = n.add_gate(name("hc"), GateType::And, {x, y});
        return std::pair{s, c};
    };
    auto full = [&](GateId x, GateId y, GateId z) {
        const auto p = n.add_gate(name("fp"), GateType::Xor, {x, y});
        const auto s = n.add_gate(name("fs"), GateType::Xor, {p, z});
        const auto g = n.add_gate(name("fg"), GateType::And, {x, y});
        const auto t = n.add_gate(name("ft"), GateType::And, {p, z});
        const auto c = n.add_gate(name("fc"), GateType::Or, {g, t});
        return std::pair{s, c};
    };
    std::vector<std::vector<GateId>> pp(bits, std::vector<GateId>(bits));
    for (std::size_t i = 0; i < bits; ++i) {
        for (std::size_t j = 0; j < bits; ++j) {
            pp[i][j] = n.add_gate("pp" + std::to_string(i) + "_" + std::to_string(j), GateType::And, {a[j], b[i]});
        }
    }
    std::vector<GateId> acc(pp[0].begin(), pp[0].end());
    for (std::size_t i = 1; i < bits; ++i) {
        std::vector<GateId> next(acc.begin(), acc.begin() + static_cast<std::ptrdiff_t>(i));
        GateId carry = kNoGate;
        for (std::size_t pos = i; pos < i + bits || carry != kNoGate; ++pos) {
            std::vector<GateId> ops;
            if (pos < acc.size()) ops.push_back(acc[pos]);
            if (pos - i < bits) ops.push_back(pp[i][pos - i]);
            if (carry != kNoGate) ops.push_back(carry);
            carry = kNoGate;
            if (ops.size() == 1) {
                next.push_back(ops[0]);
            } else if (ops.size() == 2) {
                auto [s, c] = half(ops[0], ops[1]);
                next.push_back(s);
                carry = c;
            } else if (ops.size() == 3) {
                auto [s, c] = full(ops[0], ops[1], ops[2]);
                next.push_back(s);
                carry = c;
            } else {
                break;
            }
        }
        acc = std::move(next);
    }
    for (auto s : acc) n.add_output(s);
    return n;
}

Pattern random_pattern(std::size_t max_gates, std::uint64_t seed) {
    static const GateType kTypes[] = {GateType::And, GateType::Or,  GateType::Nand, GateType::Nor,
                                      GateType::Xor, GateType::Xnor, GateType::Not};
    Rng rng(seed);
    Pattern p;
    std::size_t budget = 1 + rng.below(max_gates);
    std::vector<NodeId> leaves;
    std::function<NodeId(bool)> build = [&](bool force_gate) -> NodeId {
        if (!force_gate && (budget == 0 || rng.below(3) == 0)) {
            if (!leaves.empty() && rng.below(4) == 0) return leaves[rng.below(leaves.size())];
            leaves.push_back(p.add_free());
            return leaves.back();
        }
        --budget;
        const auto type = kTypes[rng.below(std::size(kTypes))];
        const std::size_t arity = type == GateType::Not ? 1 : 2;
        std::vector<NodeId> ins;
        while (ins.size() < arity) {
            const auto c = build(false);
            if (std::find(ins.begin(), ins.end(), c) == ins.end()) {
                ins.push_back(c);
            } else {
                leaves.push_back(p.add_free());
                ins.push_back(leaves.back());
            }
        }
        return p.add_gate(type, ins);
    };
    p.root = build(true);
    return p;
}

Pattern half_adder_pattern() {
    Pattern p;
    const auto x = p.add_free();
    const auto y = p.add_free();
    p.root = p.add_gate(GateType::Xor, {x, y});
    p.add_gate(GateType::And, {x, y});
    return p;
}

std::set<GateId> brute_force_roots(const Netlist& n, const Pattern& p, const std::set<GateId>& exclude) {
    std::vector<NodeId> order = p.rooted_order();
    for (NodeId v = 0; v < p.nodes.size(); ++v) {
        if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    }
    std::erase_if(order, [&](NodeId v) { return p.nodes[v].free; });

    std::set<GateId> roots;
    Embedding e(p.nodes.size(), kNoGate);
    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
        if (k == order.size()) {
            return std::none_of(e.begin(), e.end(), [](GateId g) { return g == kNoGate; }) && check_embedding(n, p, e);
        }
        const auto v = order[k];
        std::vector<GateId> hosts;
        if (e[v] != kNoGate) {
            hosts.push_back(e[v]);
        } else {
            for (GateId g = 0; g < n.size(); ++g) hosts.push_back(g);
        }
        for (auto h : hosts) {
            const auto& gate = n.gate(h);
            if (gate.type != p.nodes[v].type || gate.inputs.size() != p.nodes[v].inputs.size()) continue;
            const bool was_unbound = e[v] == kNoGate;
            e[v] = h;
            std::vector<std::size_t> perm(gate.inputs.size());
            std::iota(perm.begin(), perm.end(), 0);
            do {
                std::vector<NodeId> bound_here;
                bool ok = true;
                for (std::size_t i = 0; i < perm.size() && ok; ++i) {
                    const auto child = p.nodes[v].inputs[i];
                    const auto sig = gate.inputs[perm[i]];
                    if (e[child] == kNoGate) {
                        e[child] = sig;
                        bound_here.push_back(child);
                    } else if (e[child] != sig) {
                        ok = false;
                    }
                }
                if (ok && go(k + 1)) {
                    for (auto c : bound_here) e[c] = kNoGate;
                    if (was_unbound) e[v] = kNoGate;
                    return true;
                }
                for (auto c : bound_here) e[c] = kNoGate;
            } while (std::next_permutation(perm.begin(), perm.end()));
            if (was_unbound) e[v] = kNoGate;
        }
        return false;
    };
    for (GateId g = 0; g < n.size(); ++g) {
        if (exclude.contains(g)) continue;
        std::fill(e.begin(), e.end(), kNoGate);
        e[p.root] = g;
        if (go(0)) roots.insert(g);
    }
    return roots;
}

std::vector<GateId> data_leaf_origins(const Pattern& p) {
    std::vector<GateId> out;
    for (auto v : p.data_leaves()) out.push_back(p.nodes[v].origin);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<bool> truth_table(const Pattern& p, const std::vector<GateId>& order,
                              const std::map<GateId, bool>& key_values) {
    if (order.size() > 16) throw std::invalid_argument("truth_table supports at most 16 leaves");
    const std::size_t rows = std::size_t{1} << order.size();
    std::vector<bool> out;
    out.reserve(rows);
    for (std::size_t base = 0; base < rows; base += 64) {
        std::vector<std::uint64_t> leaves(p.nodes.size(), 0);
        for (NodeId v = 0; v < p.nodes.size(); ++v) {
            const auto& node = p.nodes[v];
            if (!node.free) continue;
            if (node.key_leaf) {
                leaves[v] = key_values.at(node.origin) ? ~std::uint64_t{0} : 0;
                continue;
            }
            const auto idx = static_cast<std::size_t>(std::find(order.begin(), order.end(), node.origin) - order.begin());
            if (idx == order.size()) throw std::invalid_argument("leaf not listed in the truth-table order");
            std::uint64_t w = 0;
            for (std::size_t r = 0; r < 64 && base + r < rows; ++r) w |= std::uint64_t{((base + r) >> idx) & 1u} << r;
            leaves[v] = w;
        }
        const auto values = evaluate(p, leaves);
        for (std::size_t r = 0; r < 64 && base + r < rows; ++r) out.push_back((values[p.root] >> r) & 1u);
    }
    return out;
}

}  // namespace tga::test
