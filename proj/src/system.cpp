#include "qf/system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qf {

SpectrumSet::SpectrumSet(std::vector<double> vals) : values(std::move(vals)) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

int SpectrumSet::index_of(double v, double tol) const {
    int best = -1;
    double best_gap = tol;
    for (int i = 0; i < size(); ++i) {
        const double gap = std::abs(values[static_cast<std::size_t>(i)] - v);
        if (gap <= best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    return best;
}

std::string EventSpec::to_string() const {
    std::ostringstream os;
    os << "(" << observable << "; {";
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) os << ",";
        os << subset[i];
    }
    os << "})";
    return os.str();
}

DistributionTable DistributionTable::zeros(std::vector<SpectrumSet> axes) {
    DistributionTable t;
    std::size_t total = 1;
    for (const auto& a : axes) total *= static_cast<std::size_t>(a.size());
    t.support = std::move(axes);
    t.probabilities.assign(total, 0.0);
    return t;
}

std::size_t DistributionTable::flat_index(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < support.size(); ++a)
        flat = flat * static_cast<std::size_t>(support[a].size()) +
               static_cast<std::size_t>(idx[a]);
    return flat;
}

double DistributionTable::total() const {
    return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

DistributionTable DistributionTable::marginal_dropping_last() const {
    DistributionTable out = zeros({support.begin(), support.end() - 1});
    const std::size_t last = static_cast<std::size_t>(support.back().size());
    for (std::size_t i = 0; i < out.probabilities.size(); ++i)
        for (std::size_t j = 0; j < last; ++j)
            out.probabilities[i] += probabilities[i * last + j];
    return out;
}

std::vector<double> DistributionTable::marginal_axis(int axis) const {
    std::vector<double> out(static_cast<std::size_t>(support[static_cast<std::size_t>(axis)].size()), 0.0);
    std::size_t stride = 1;
    for (std::size_t a = static_cast<std::size_t>(axis) + 1; a < support.size(); ++a)
        stride *= static_cast<std::size_t>(support[a].size());
    const std::size_t block = stride * out.size();
    for (std::size_t i = 0; i < probabilities.size(); ++i)
        out[(i % block) / stride] += probabilities[i];
    return out;
}

void validate_event(const OperationalSystem& sys, const EventSpec& event) {
    const SpectrumSet& spec = sys.spectrum(event.observable);
    if (event.subset.empty())
        throw UnknownObservable("event with empty subset: " + event.to_string());
    for (double v : event.subset)
        if (!spec.contains(v))
            throw UnknownObservable("event value outside spectrum: " + event.to_string());
}

DistributionTable outcome_distribution(const OperationalSystem& sys, const State& s,
                                       const std::string& observable) {
    return sys.distribution(s, observable);
}

double event_probability(const OperationalSystem& sys, const State& s,
                         const EventSpec& event) {
    validate_event(sys, event);
    const DistributionTable table = sys.distribution(s, event.observable);
    double p = 0.0;
    for (double v : event.subset) {
        const int i = table.support[0].index_of(v);
        p += table.probabilities[static_cast<std::size_t>(i)];
    }
    return p < kProbFloor ? 0.0 : p;
}

State update_state(const OperationalSystem& sys, const State& s, const EventSpec& event) {
    validate_event(sys, event);
    if (sys.is_null(s)) return sys.null_state();
    if (event.objective()) {
        if (event_probability(sys, s, event) <= 0.0) return sys.null_state();
        return sys.objective_update(s, event.observable, event.subset[0]);
    }
    const double total = event_probability(sys, s, event);
    if (total <= 0.0) return sys.null_state();
    std::vector<double> weights;
    std::vector<State> branches;
    for (double v : event.subset) {
        const double p = event_probability(sys, s, EventSpec{event.observable, {v}});
        if (p <= 0.0) continue;  // 0/0 = 0 convention
        weights.push_back(p / total);
        branches.push_back(sys.objective_update(s, event.observable, v));
    }
    return sys.mix(weights, branches);
}

namespace {

void sequential_recurse(const OperationalSystem& sys, const State& s,
                        std::span<const std::string> observables, std::size_t depth,
                        double weight, std::vector<int>& idx, DistributionTable& out) {
    if (depth == observables.size()) {
        out.at(idx) = weight;
        return;
    }
    const DistributionTable table = sys.distribution(s, observables[depth]);
    for (int i = 0; i < table.support[0].size(); ++i) {
        double p = table.probabilities[static_cast<std::size_t>(i)];
        if (p < kProbFloor) p = 0.0;
        idx.push_back(i);
        if (p > 0.0) {
            const double v = table.support[0].values[static_cast<std::size_t>(i)];
            const State next = sys.objective_update(s, observables[depth], v);
            sequential_recurse(sys, next, observables, depth + 1, weight * p, idx, out);
        }
        idx.pop_back();
    }
}

}  // namespace

DistributionTable sequential_distribution(const OperationalSystem& sys, const State& s,
                                          std::span<const std::string> observables) {
    std::vector<SpectrumSet> axes;
    for (const auto& name : observables) axes.push_back(sys.spectrum(name));
    DistributionTable out = DistributionTable::zeros(std::move(axes));
    std::vector<int> idx;
    if (!sys.is_null(s)) sequential_recurse(sys, s, observables, 0, 1.0, idx, out);
    return out;
}

double sequential_probability(const OperationalSystem& sys, const State& s,
                              std::span<const EventSpec> steps) {
    State current = s;
    double p = 1.0;
    for (const auto& step : steps) {
        const double q = event_probability(sys, current, step);
        p *= q;
        if (p < kProbFloor) return 0.0;
        current = update_state(sys, current, step);
    }
    return p;
}

bool statistically_equivalent(const OperationalSystem& sys, const EventSpec& e1,
                              const EventSpec& e2, std::span<const State> probes,
                              double tol) {
    if (probes.empty()) throw EmptyProbeSet("statistically_equivalent: no probe states");
    for (const auto& rho : probes)
        if (std::abs(event_probability(sys, rho, e1) - event_probability(sys, rho, e2)) > tol)
            return false;
    return true;
}

}  // namespace qf
