#pragma once

// Behaviors over measurement scenarios: nondisturbance, local
// orthogonality, joint-distribution (probabilistic noncontextuality)
// feasibility via the phase-I simplex, and exhaustive noncontextual
// value-assignment search.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qf/functional.hpp"
#include "qf/simplex.hpp"
#include "qf/system.hpp"

namespace qf {

struct Scenario {
    std::vector<std::string> observables;
    std::map<std::string, SpectrumSet> spectra;
    std::vector<std::vector<std::string>> contexts;  // pairwise compatible members

    const SpectrumSet& spectrum_of(const std::string& name) const;
    int index_of(const std::string& name) const;
    void validate() const;  // SchemaError on unregistered members / empty contexts
};

struct Behavior {
    Scenario scenario;
    std::vector<DistributionTable> tables;  // one per context, in context order
};

/// Measures every context sequentially in declared order; order-independence
/// is verified against all permutations within 1e-10, and a disagreement
/// means the context was not pairwise compatible after all.
Behavior behavior_from_system(const OperationalSystem& sys, const State& rho,
                              const Scenario& scenario);

struct NondisturbanceReport {
    bool pass = true;
    double worst = 0.0;
    std::string witness;  // observable and context pair of the worst gap
};

NondisturbanceReport nondisturbance_check(const Behavior& b, double tol);

struct JointFeasibilityResult {
    bool feasible = false;
    /// Global distribution over the product of all observable spectra,
    /// row-major with the last observable fastest (when feasible).
    std::vector<double> distribution;
    Eigen::VectorXd certificate;  // dual weights per constraint row (infeasible)
    double certificate_value = 0.0;  // y^T b, strictly negative when infeasible
    double max_marginal_residual = 0.0;  // re-verification (feasible)
    int iterations = 0;
};

JointFeasibilityResult joint_distribution_feasible(const Behavior& b, double tol,
                                                   std::size_t cap = 1000000);

/// One event of a local-orthogonality family: a full outcome tuple of one
/// context, referenced by indices into the context's spectra.
struct OutcomeRef {
    int context = -1;
    std::vector<int> outcome;
};

struct ExclusivityReport {
    bool pass = true;
    double worst_sum = 0.0;
    int worst_family = -1;
};

/// Validates that each family is pairwise conflicting on shared observables,
/// then checks that family probabilities sum to at most 1 + tol.
ExclusivityReport exclusivity_local_orthogonality_check(
    const Behavior& b, std::span<const std::vector<OutcomeRef>> families, double tol);

struct ValuationProblem {
    struct Object {
        std::string name;
        SpectrumSet spectrum;
    };
    struct Arrow {
        int domain = -1;
        int codomain = -1;
        std::vector<double> table;  // indexed by the domain spectrum
    };
    std::vector<Object> objects;
    std::vector<Arrow> arrows;

    void validate() const;  // InconsistentArrows on composition disagreement
};

struct ValuationResult {
    bool sat = false;
    std::map<std::string, double> valuation;  // when sat
    long explored = 0;  // partial assignments visited
};

/// Backtracking over objects ordered by descending arrow out-degree, values
/// tried ascending; exhaustive on UNSAT.
ValuationResult valuation_search(const ValuationProblem& p);

/// Derives the valuation problem of a quantum scenario: one object per
/// observable plus one apex object per context whose spectrum enumerates
/// the context's joint support, with the projection arrows.
ValuationProblem valuation_problem_from_scenario(
    Engine& eng, std::span<const ObsId> observables,
    std::span<const std::string> names,
    std::span<const std::vector<int>> contexts);

}  // namespace qf
