#pragma once

// Postulate battery P0-P8 over any operational system on a finite probe set.
// Universal quantifiers are sampled: declared registry plus seeded random
// convex mixtures; sample counts appear in the report. A failed check always
// carries a witness whose quantities can be re-evaluated outside the auditor.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qf/numkernel.hpp"
#include "qf/system.hpp"

namespace qf {

struct AuditConfig {
    int random_probe_count = 16;
    std::uint64_t seed = 7;
    double tol = 1e-8;
    std::map<std::string, double> tol_overrides;  // keyed by "P0".."P8"
    int max_sequence_length = 3;
    /// Orthonormal bases (unit vectors) for the interference sub-check of
    /// P7; empty means symmetry only.
    std::vector<std::vector<num::CVector>> interference_bases;

    double tol_for(const std::string& check) const {
        auto it = tol_overrides.find(check);
        return it == tol_overrides.end() ? tol : it->second;
    }
};

enum class CheckStatus { Pass, Fail, Skipped };

struct Witness {
    std::string state;
    std::string events;
    double observed = 0.0;
    double expected = 0.0;
};

struct CheckResult {
    std::string id;     // "P0".."P8"
    std::string title;
    CheckStatus status = CheckStatus::Pass;
    double worst = 0.0;
    int samples = 0;
    std::string note;   // reason when skipped, context when failed
    std::optional<Witness> witness;
};

struct AuditReport {
    std::vector<CheckResult> checks;  // P0..P8 in order, all present

    const CheckResult& check(const std::string& id) const;
    bool all_pass() const;  // no check failed (skips allowed)
    std::vector<std::string> failed_ids() const;
};

AuditReport audit_system(std::shared_ptr<const OperationalSystem> sys,
                         const AuditConfig& cfg);

}  // namespace qf
