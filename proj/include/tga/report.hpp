#pragma once

#include "tga/attack.hpp"
#include "tga/locker.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace tga {

/// JSON record of a locked circuit: scheme, key gates and family metadata.
std::string locked_record_json(const LockedCircuit& c);

/// `keyinput<i>=<0|1|X>` lines in key-input order.
std::string format_predictions(const AttackReport& r);
std::vector<std::pair<std::string, KeyValue>> parse_predictions(std::string_view text);

/// JSON AttackReport. Timings are only written when `with_timing` is set, so
/// the default output is a pure function of the attack's inputs.
std::string attack_report_json(const AttackReport& r, bool with_timing = false);

/// Reads predictions back from a JSON AttackReport.
AttackReport attack_report_from_json(std::string_view text);

}  // namespace tga
