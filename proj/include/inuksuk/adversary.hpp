#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inuksuk/result.hpp"
#include "inuksuk/sim_world.hpp"
#include "json.hpp"

namespace inuksuk {

// Scenario scripts are data: id, parameters and the outcome the run must
// reproduce. New attacks mean new JSON, not new engine code.
struct AttackScenario {
    std::string id;
    nlohmann::json parameters;
    nlohmann::json expected_outcome;

    static Result<AttackScenario> from_json(const nlohmann::json& j);
    static Result<AttackScenario> from_file(const std::string& path);
};

// Observable results only; nothing in here comes from adversary intent.
struct AttackOutcome {
    std::string scenario_id;
    std::string protected_digest_before;
    std::string protected_digest_after;
    std::vector<std::string> data_loss;          // (name@version) lost to the attack
    std::vector<std::string> detection_signals;  // anomaly flags, missing avatar, Mismatch
    nlohmann::json fields;                       // scenario-specific observables

    nlohmann::json to_json() const;
};

// One committed (base, version, digest) triple, identity-stable across the
// live->hidden rename a later commit performs.
struct LedgerTriple {
    std::string base_name;
    uint64_t version_timestamp;
    std::string digest_hex;
};

// Snapshot of everything committed on the protected partition, via the
// credential-free recovery path.
Result<std::vector<LedgerTriple>> build_ledger(const SimWorld& world);

// Executes a scenario against a fresh world built from its parameters.
// Attacks that "fail" are successful outcomes; errors mean the scenario
// itself could not run.
Result<AttackOutcome> run_scenario(const AttackScenario& scenario, uint64_t seed);

// Keys in expected_outcome that differ from (or are missing in) the outcome.
std::vector<std::string> outcome_mismatches(const AttackOutcome& outcome,
                                            const nlohmann::json& expected);

extern const char* const kScenarioIds[8];

}  // namespace inuksuk
