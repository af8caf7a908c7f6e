#include "tga/pattern.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <unordered_map>

namespace tga {

NodeId Pattern::add_free(GateId origin) {
    PatternNode node;
    node.free = true;
    node.origin = origin;
    nodes.push_back(std::move(node));
    return static_cast<NodeId>(nodes.size() - 1);
}

NodeId Pattern::add_gate(GateType type, std::vector<NodeId> inputs, GateId origin) {
    PatternNode node;
    node.type = type;
    node.inputs = std::move(inputs);
    node.origin = origin;
    nodes.push_back(std::move(node));
    return static_cast<NodeId>(nodes.size() - 1);
}

std::size_t Pattern::gate_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return !n.free; }));
}

std::vector<NodeId> Pattern::free_leaves() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < nodes.size(); ++i) {
        if (nodes[i].free) out.push_back(i);
    }
    return out;
}

std::vector<NodeId> Pattern::data_leaves() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < nodes.size(); ++i) {
        if (nodes[i].free && !nodes[i].key_leaf) out.push_back(i);
    }
    return out;
}

std::vector<std::vector<NodeId>> Pattern::consumers() const {
    std::vector<std::vector<NodeId>> out(nodes.size());
    for (NodeId i = 0; i < nodes.size(); ++i) {
        for (auto in : nodes[i].inputs) {
            auto& c = out[in];
            if (std::find(c.begin(), c.end(), i) == c.end()) c.push_back(i);
        }
    }
    return out;
}

std::vector<NodeId> Pattern::rooted_order() const {
    std::vector<NodeId> order{root};
    std::vector<char> seen(nodes.size(), 0);
    seen[root] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (auto in : nodes[order[i]].inputs) {
            if (!seen[in]) {
                seen[in] = 1;
                order.push_back(in);
            }
        }
    }
    return order;
}

void Pattern::validate() const {
    if (nodes.empty()) throw NetlistError("empty pattern");
    if (root >= nodes.size() || nodes[root].free) throw NetlistError("pattern root must be a gate node");
    for (NodeId i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.free) {
            if (!n.inputs.empty()) throw NetlistError("FREE pattern node with inputs");
            continue;
        }
        if (!is_logic(n.type) || !arity_ok(n.type, n.inputs.size())) {
            throw NetlistError("pattern node " + std::to_string(i) + " violates arity or type");
        }
        for (auto in : n.inputs) {
            if (in >= nodes.size() || in == i) throw NetlistError("pattern node input out of range");
        }
    }
    for (auto k : key_slots) {
        if (k >= nodes.size() || !nodes[k].key_gate) throw NetlistError("key slot is not a key gate node");
    }
    // Acyclicity.
    std::vector<int> state(nodes.size(), 0);
    std::function<void(NodeId)> visit = [&](NodeId v) {
        if (state[v] == 2) return;
        if (state[v] == 1) throw NetlistError("cycle in pattern");
        state[v] = 1;
        for (auto in : nodes[v].inputs) visit(in);
        state[v] = 2;
    };
    for (NodeId i = 0; i < nodes.size(); ++i) visit(i);
}

std::string Pattern::fingerprint() const {
    std::vector<std::string> memo(nodes.size());
    std::vector<char> done(nodes.size(), 0);
    std::function<const std::string&(NodeId)> canon = [&](NodeId v) -> const std::string& {
        if (done[v]) return memo[v];
        const auto& n = nodes[v];
        if (n.free) {
            memo[v] = n.key_leaf ? "k" : "_";
        } else {
            std::vector<std::string> parts;
            for (auto in : n.inputs) parts.push_back(canon(in));
            std::sort(parts.begin(), parts.end());
            std::string s(to_string(n.type));
            if (n.key_gate) s += "*";
            s += "(";
            for (std::size_t i = 0; i < parts.size(); ++i) {
                if (i) s += ",";
                s += parts[i];
            }
            s += ")";
            memo[v] = std::move(s);
        }
        done[v] = 1;
        return memo[v];
    };
    // FNV-1a over the canonical expression.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon(root)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::uint64_t> evaluate(const Pattern& p, std::vector<std::uint64_t> value) {
    value.resize(p.nodes.size(), 0);
    std::vector<char> done(p.nodes.size(), 0);
    std::function<std::uint64_t(NodeId)> eval = [&](NodeId v) -> std::uint64_t {
        if (p.nodes[v].free || done[v]) return value[v];
        std::vector<std::uint64_t> ins;
        for (auto in : p.nodes[v].inputs) ins.push_back(eval(in));
        value[v] = evaluate(p.nodes[v].type, ins);
        done[v] = 1;
        return value[v];
    };
    for (NodeId i = 0; i < p.nodes.size(); ++i) eval(i);
    return value;
}

Pattern fanin_cone(const Netlist& n, GateId root, int layers) {
    if (layers < 1) throw NetlistError("fanin_cone needs layers >= 1");
    if (!is_logic(n.gate(root).type)) {
        throw NetlistError("fanin_cone root '" + n.name(root) + "' is not a logic gate");
    }
    constexpr int kUnreached = std::numeric_limits<int>::max();
    std::unordered_map<GateId, int> level;
    level[root] = 1;
    // 0-1 BFS: key gates sit on the level of their consumer.
    std::deque<GateId> queue{root};
    std::vector<GateId> discovered{root};
    auto level_of = [&](GateId g) {
        auto it = level.find(g);
        return it == level.end() ? kUnreached : it->second;
    };
    while (!queue.empty()) {
        const auto g = queue.front();
        queue.pop_front();
        const int lg = level_of(g);
        for (auto in : n.gate(g).inputs) {
            const auto t = n.gate(in).type;
            if (!is_logic(t)) continue;
            const bool key = n.is_key_gate(in);
            const int li = lg + (key ? 0 : 1);
            if (li > layers || li >= level_of(in)) continue;
            if (!level.contains(in)) discovered.push_back(in);
            level[in] = li;
            if (key) {
                queue.push_front(in);
            } else {
                queue.push_back(in);
            }
        }
    }

    // Stable node numbering: by level, then discovery order.
    std::vector<GateId> gates = discovered;
    std::unordered_map<GateId, std::size_t> rank;
    for (std::size_t i = 0; i < discovered.size(); ++i) rank[discovered[i]] = i;
    std::stable_sort(gates.begin(), gates.end(), [&](GateId a, GateId b) {
        if (level[a] != level[b]) return level[a] < level[b];
        return rank[a] < rank[b];
    });

    Pattern p;
    std::unordered_map<GateId, NodeId> node_of;
    for (auto g : gates) {
        node_of[g] = p.add_gate(n.gate(g).type, {}, g);
        if (n.is_key_gate(g)) {
            p.nodes[node_of[g]].key_gate = true;
            p.key_slots.push_back(node_of[g]);
        }
    }
    p.root = node_of.at(root);
    std::unordered_map<GateId, NodeId> leaf_of;
    for (auto g : gates) {
        std::vector<NodeId> ins;
        for (auto in : n.gate(g).inputs) {
            if (auto it = node_of.find(in); it != node_of.end()) {
                ins.push_back(it->second);
                continue;
            }
            auto [it, fresh] = leaf_of.emplace(in, 0);
            if (fresh) {
                it->second = p.add_free(in);
                p.nodes[it->second].key_leaf = n.is_key_input(in);
            }
            ins.push_back(it->second);
        }
        p.nodes[node_of[g]].inputs = std::move(ins);
    }
    return p;
}

}  // namespace tga
