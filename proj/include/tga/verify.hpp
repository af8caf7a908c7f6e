#pragma once

#include "tga/netlist.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tga {

inline constexpr std::size_t kExhaustiveInputLimit = 16;
inline constexpr std::size_t kDefaultVectors = 10000;

struct Counterexample {
    std::map<std::string, bool> inputs;
    std::string output;
    bool expected = false;
    bool actual = false;
};

struct EquivalenceResult {
    bool equivalent = true;
    bool exhaustive = false;
    std::size_t vectors = 0;
    std::optional<Counterexample> counterexample;
};

/// Thrown when two netlists do not expose the same data inputs and outputs.
class InterfaceMismatch : public NetlistError {
public:
    using NetlistError::NetlistError;
};

/// Compares `locked` under `key` (by key-input name) against `original` on the
/// shared data inputs: exhaustively when there are at most 16 of them, else on
/// `vectors` rows drawn from `seed`.
EquivalenceResult check_equivalence(const Netlist& original, const Netlist& locked,
                                    const std::map<std::string, bool>& key,
                                    std::size_t vectors = kDefaultVectors, std::uint64_t seed = 1);

/// Key map from the bit vector ordered as locked.key_inputs().
std::map<std::string, bool> key_map(const Netlist& locked, const std::vector<bool>& bits);

}  // namespace tga
