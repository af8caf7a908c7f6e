#pragma once

#include "tga/euf.hpp"
#include "tga/netlist.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tga {

enum class KeyValue : std::uint8_t { Zero, One, X };

char to_char(KeyValue v);
KeyValue key_value(bool bit);

enum class RuleKind { Decide, Unknown, Escalate };

struct RuleOutcome {
    RuleKind kind = RuleKind::Unknown;
    /// Index into HypothesisTable when kind == Decide.
    std::size_t hypothesis = 0;
};

/// One nonzero count decides; none is unknown; several ask for a wider cone.
RuleOutcome decide_rule(const HypothesisTable& r);

/// Outcome of the escalation loop along one (key gate, successor) path.
struct PathOutcome {
    GateId key_gate = kNoGate;
    GateId root = kNoGate;
    bool decided = false;
    int layers_used = 0;
    HypothesisTable counts;
    /// Key-input values implied by the deciding hypothesis.
    std::vector<std::pair<GateId, bool>> implied;
    std::string note;
};

/// Unit functions holding more key gates than this are not expanded (3^j EUFs).
inline constexpr std::size_t kMaxUfKeys = 10;

PathOutcome attack_path(const Netlist& n, GateId key_gate, GateId root, int max_layers,
                        const std::vector<GateId>& exclude, std::size_t max_uf_keys = kMaxUfKeys);

struct KeyPrediction {
    std::string key_input;
    KeyValue value = KeyValue::X;
    int layers_used = 0;
    /// Counts of the path that decided (or the last path tried).
    std::vector<std::uint64_t> match_counts;
    bool via_fv = false;
    /// Key input whose unit function fixed this one, empty if decided on its own turn.
    std::string decided_by;
    std::string reason;
};

/// Joint verdict over every path of one key input.
struct KeyAnalysis {
    GateId key_input = kNoGate;
    KeyPrediction prediction;
    /// Values for other key inputs implied by the agreeing paths.
    std::vector<std::pair<GateId, bool>> implied;
    double seconds = 0.0;
};

/// Runs every (key gate, successor) path of `key_input`; decided paths must
/// agree, undecided paths abstain.
KeyAnalysis analyze_key(const Netlist& n, GateId key_input, int max_layers, std::size_t max_uf_keys = kMaxUfKeys);

/// Fanout verification for a single key gate over its successors.
std::optional<bool> fv(const Netlist& n, GateId key_gate, int max_layers, std::size_t max_uf_keys = kMaxUfKeys);

struct AttackOptions {
    int max_layers = 4;
    unsigned workers = 1;
    std::size_t max_uf_keys = kMaxUfKeys;
};

struct AttackReport {
    std::vector<KeyPrediction> predictions;
    double sr = 0.0;
    std::optional<double> mr;
    double wall_time = 0.0;
    std::vector<double> per_key_time;
    std::vector<std::string> log;
};

/// Oracle-less key recovery on a locked netlist. Keys are processed in
/// key-input order; a definite value implied by an earlier key's unit
/// function is final and that key is skipped.
AttackReport tga(const Netlist& locked, const AttackOptions& options = {});

struct Score {
    double sr = 0.0;
    double mr = 0.0;
    double x_rate = 0.0;
};

/// Percentages rounded to two decimals.
Score score(const AttackReport& report, const std::vector<bool>& truth);

double round2(double v);

struct Completion {
    /// Completed keys (ordered as key inputs) that survived the oracle comparison.
    std::vector<std::vector<bool>> survivors;
    std::size_t unknown_bits = 0;
    std::size_t simulations = 0;
};

inline constexpr std::size_t kMaxOracleUnknowns = 20;

/// Brute-forces the X bits of `report` against an unlocked reference netlist.
/// Throws std::invalid_argument when more than 20 bits are unknown.
Completion complete_with_oracle(const Netlist& locked, const AttackReport& report, const Netlist& oracle,
                                std::size_t vectors = 10000, std::uint64_t seed = 1);

}  // namespace tga
