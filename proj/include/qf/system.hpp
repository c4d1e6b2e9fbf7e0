#pragma once

// The abstract quadruple (observables, states, outcome distributions,
// updates) plus the generic event / sequential-measure calculus that works
// over any backend.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qf/errors.hpp"

namespace qf {

/// Probabilities below this are treated as exactly 0 before conditioning.
inline constexpr double kProbFloor = 1e-14;

/// Finite sorted set of distinct possible measurement values.
struct SpectrumSet {
    std::vector<double> values;  // sorted ascending, distinct

    SpectrumSet() = default;
    explicit SpectrumSet(std::vector<double> vals);

    int size() const { return static_cast<int>(values.size()); }
    /// Index of the closest value within tol; -1 if none.
    int index_of(double v, double tol = 1e-9) const;
    bool contains(double v, double tol = 1e-9) const { return index_of(v, tol) >= 0; }
};

/// Observable event (subset; observable). Objective iff the subset is a
/// singleton.
struct EventSpec {
    std::string observable;
    std::vector<double> subset;

    bool objective() const { return subset.size() == 1; }
    std::string to_string() const;
};

struct SequentialEvent {
    std::vector<EventSpec> steps;
};

/// Probability table over a finite product of spectra, row-major with the
/// last axis fastest.
struct DistributionTable {
    std::vector<SpectrumSet> support;
    std::vector<double> probabilities;

    static DistributionTable zeros(std::vector<SpectrumSet> axes);

    std::size_t size() const { return probabilities.size(); }
    int axes() const { return static_cast<int>(support.size()); }
    std::size_t flat_index(std::span<const int> idx) const;
    double prob(std::span<const int> idx) const { return probabilities[flat_index(idx)]; }
    double& at(std::span<const int> idx) { return probabilities[flat_index(idx)]; }
    double total() const;
    /// Sum over the last axis.
    DistributionTable marginal_dropping_last() const;
    /// Marginal onto a single axis.
    std::vector<double> marginal_axis(int axis) const;
};

/// Opaque backend-owned state representation.
class StateRep {
public:
    virtual ~StateRep() = default;
};

using State = std::shared_ptr<const StateRep>;

/// Definition-1 interface: observable registry, state registry with a
/// distinguished completely mixed state and a null state, the outcome
/// distribution map P and the objective part of the update map T.
/// Implementations are immutable after construction; all operations pure.
class OperationalSystem {
public:
    virtual ~OperationalSystem() = default;

    virtual int dimension() const = 0;
    virtual std::vector<std::string> observable_names() const = 0;
    virtual const SpectrumSet& spectrum(const std::string& observable) const = 0;
    virtual std::vector<std::string> state_names() const = 0;
    virtual State state(const std::string& name) const = 0;
    virtual State mixed_state() const = 0;
    virtual State null_state() const = 0;
    virtual bool is_null(const State& s) const = 0;
    virtual DistributionTable distribution(const State& s,
                                           const std::string& observable) const = 0;
    virtual State objective_update(const State& s, const std::string& observable,
                                   double value) const = 0;
    virtual State mix(std::span<const double> weights,
                      std::span<const State> states) const = 0;

    bool nondegenerate(const std::string& observable) const {
        return spectrum(observable).size() == dimension();
    }
};

void validate_event(const OperationalSystem& sys, const EventSpec& event);

DistributionTable outcome_distribution(const OperationalSystem& sys, const State& s,
                                       const std::string& observable);

double event_probability(const OperationalSystem& sys, const State& s,
                         const EventSpec& event);

/// Objective events delegate to the backend's update; subjective events form
/// the convex combination of objective branches weighted by conditional
/// probabilities, with the 0/0 = 0 convention. Zero-probability events map to
/// the null state.
State update_state(const OperationalSystem& sys, const State& s, const EventSpec& event);

/// Joint table over the product of spectra, computed by chained conditional
/// probabilities under objective updates.
DistributionTable sequential_distribution(const OperationalSystem& sys, const State& s,
                                          std::span<const std::string> observables);

/// Probability of obtaining the sequence of events (each step conditioned on
/// the previous updates).
double sequential_probability(const OperationalSystem& sys, const State& s,
                              std::span<const EventSpec> steps);

bool statistically_equivalent(const OperationalSystem& sys, const EventSpec& e1,
                              const EventSpec& e2, std::span<const State> probes,
                              double tol = 1e-10);

}  // namespace qf
