#pragma once

#include "tga/matcher.hpp"
#include "tga/netlist.hpp"
#include "tga/pattern.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tga::test {

std::string circuit_path(const std::string& name);
Netlist load_circuit(const std::string& name);

/// Random combinational netlist over AND/OR/NAND/NOR/XOR/XNOR/NOT gates.
Netlist random_netlist(std::size_t gates, std::size_t inputs, std::uint64_t seed);

/// Unsigned array multiplier built from half and full adders (XOR/AND/OR).
Netlist array_multiplier(std::size_t bits);

/// Random rooted pattern of at most `max_gates` gate nodes.
Pattern random_pattern(std::size_t max_gates, std::uint64_t seed);

/// The half-adder pattern: XOR root with an AND companion on the same two leaves.
Pattern half_adder_pattern();

/// Independent root-set oracle: enumerates every fanin permutation of every
/// bound gate and keeps the assignments that check_embedding accepts.
std::set<GateId> brute_force_roots(const Netlist& n, const Pattern& p, const std::set<GateId>& exclude = {});

/// Root value of `p` for every assignment of the leaves named in `order`
/// (leaf origin ids); key leaves take their value from `key_values`.
/// Row r assigns bit i of r to order[i]. At most 16 leaves.
std::vector<bool> truth_table(const Pattern& p, const std::vector<GateId>& order,
                              const std::map<GateId, bool>& key_values);

/// Origins of the data leaves of `p`, sorted.
std::vector<GateId> data_leaf_origins(const Pattern& p);

}  // namespace tga::test
