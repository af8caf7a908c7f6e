#pragma once

#include "tga/locker.hpp"
#include "tga/pattern.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tga {

struct KeyBudget {
    std::size_t k_min = 0;
    std::size_t k_max = 0;
};

/// Parses `<min>:<max>`; throws std::invalid_argument unless 0 < min <= max.
KeyBudget parse_budget(std::string_view text);

/// Every instance of one unit function, locked together.
struct UFFamily {
    Pattern pattern;
    std::vector<GateId> instance_roots;
    bool shared_key = true;
};

/// Key layout of one family: which key input guards each (instance, slot) pin.
struct FamilyKeys {
    std::size_t key_inputs = 0;
    /// [instance][slot] -> index into `bits`.
    std::vector<std::vector<std::size_t>> input_of;
    std::vector<bool> bits;
};

/// Shared mode gives every instance the same `slots` key inputs; independent
/// mode gives each instance its own.
FamilyKeys assign_family_keys(const UFFamily& fam, std::size_t slots, std::uint64_t seed);

struct CmOptions {
    Scheme scheme = Scheme::Rll;
    std::size_t cluster = 3;
    /// Depth of the cones used for family discovery.
    int uf_layers = 2;
    bool shared_key = true;
    /// Layers used when checking that the attack stays blind.
    int check_layers = 4;
    /// Whole-run restarts after a greedy dead end or a decided countermeasure key.
    int max_attempts = 32;
    unsigned workers = 1;
};

/// Locks whole unit-function families until at least k_min key gates are in
/// place, never exceeding k_max. Each accepted family leaves no unlocked
/// instance of its pattern and keeps the attack at X on its key inputs.
/// Throws NetlistError when the budget cannot be met.
LockedCircuit lock_cm(const Netlist& n, KeyBudget budget, const CmOptions& options, std::uint64_t seed);

/// Coverage check: every family pattern has no match left in `locked`.
bool families_covered(const LockedCircuit& locked);

}  // namespace tga
