#pragma once

#include <functional>
#include <string>
#include <vector>

#include "atch/store.hpp"

// Deterministic stores used by tests, the benchmark suite and the CLI.
// Every builder pins transaction time, so serialize() is byte-stable.
namespace atch::fixtures {

inline constexpr std::string_view kTicketProposition = "KB5034763 breaks printing";
inline constexpr double kTicketFailureConfidence = 0.25;
inline constexpr double kTicketSuccessConfidence = 0.21;

Store meeting();
// Driver push, Windows update and print failure with their two links.
Store it_incident();
// prescription -> reaction -> malpractice_finding.
Store malpractice();
// Union of the above plus employment and supply-chain records.
Store benchmark();
// Twenty failure and twenty success tickets split by driver_version.
Store tickets();
// One hyperedge over eight entities.
Store octonary();
// Flight default with a temporary broken-wing inhibitor.
Store inhibitor();
// Surge -> PSU failure -> motherboard short with a surge-protector rule.
Store psu();

struct Named {
    std::string name;
    std::function<Store()> build;
};
const std::vector<Named>& all();

}  // namespace atch::fixtures
