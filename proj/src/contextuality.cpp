#include "qf/contextuality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace qf {

const SpectrumSet& Scenario::spectrum_of(const std::string& name) const {
    auto it = spectra.find(name);
    if (it == spectra.end()) throw SchemaError("unregistered observable: " + name);
    return it->second;
}

int Scenario::index_of(const std::string& name) const {
    auto it = std::find(observables.begin(), observables.end(), name);
    if (it == observables.end())
        throw SchemaError("unregistered observable: " + name);
    return static_cast<int>(it - observables.begin());
}

void Scenario::validate() const {
    if (contexts.empty()) throw SchemaError("scenario has no contexts");
    for (const auto& name : observables) spectrum_of(name);
    for (const auto& ctx : contexts) {
        if (ctx.empty()) throw SchemaError("empty context");
        for (const auto& name : ctx) index_of(name);
    }
}

Behavior behavior_from_system(const OperationalSystem& sys, const State& rho,
                              const Scenario& scenario) {
    scenario.validate();
    Behavior b;
    b.scenario = scenario;
    for (const auto& ctx : scenario.contexts) {
        const auto table = sequential_distribution(sys, rho, ctx);
        // order-independence across all permutations: the operational
        // meaning of pairwise compatibility for the sequential measure
        const int k = static_cast<int>(ctx.size());
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        while (std::next_permutation(perm.begin(), perm.end())) {
            std::vector<std::string> reordered;
            for (int axis : perm) reordered.push_back(ctx[static_cast<std::size_t>(axis)]);
            const auto other = sequential_distribution(sys, rho, reordered);
            std::vector<int> idx(static_cast<std::size_t>(k), 0);
            for (std::size_t flat = 0; flat < table.size(); ++flat) {
                std::vector<int> permuted(static_cast<std::size_t>(k));
                for (int axis = 0; axis < k; ++axis)
                    permuted[static_cast<std::size_t>(axis)] =
                        idx[static_cast<std::size_t>(perm[static_cast<std::size_t>(axis)])];
                if (std::abs(table.prob(idx) - other.prob(permuted)) > 1e-10)
                    throw IncompatibleContext(
                        "sequential measure depends on the measurement order");
                for (int axis = k - 1; axis >= 0; --axis) {
                    auto& d = idx[static_cast<std::size_t>(axis)];
                    if (++d < table.support[static_cast<std::size_t>(axis)].size()) break;
                    d = 0;
                }
            }
        }
        b.tables.push_back(table);
    }
    return b;
}

NondisturbanceReport nondisturbance_check(const Behavior& b, double tol) {
    NondisturbanceReport rep;
    const auto& contexts = b.scenario.contexts;
    for (const auto& name : b.scenario.observables) {
        std::vector<std::pair<int, std::vector<double>>> marginals;
        for (std::size_t c = 0; c < contexts.size(); ++c) {
            auto it = std::find(contexts[c].begin(), contexts[c].end(), name);
            if (it == contexts[c].end()) continue;
            const int axis = static_cast<int>(it - contexts[c].begin());
            marginals.emplace_back(static_cast<int>(c),
                                   b.tables[c].marginal_axis(axis));
        }
        for (std::size_t i = 0; i < marginals.size(); ++i)
            for (std::size_t j = i + 1; j < marginals.size(); ++j)
                for (std::size_t k = 0; k < marginals[i].second.size(); ++k) {
                    const double gap = std::abs(marginals[i].second[k] -
                                                marginals[j].second[k]);
                    if (gap > rep.worst) {
                        rep.worst = gap;
                        std::ostringstream os;
                        os << name << " between contexts " << marginals[i].first
                           << " and " << marginals[j].first;
                        rep.witness = os.str();
                    }
                }
    }
    rep.pass = rep.worst <= tol;
    return rep;
}

namespace {

std::vector<int> decode_global(std::size_t g, const std::vector<int>& sizes) {
    std::vector<int> digits(sizes.size());
    for (int k = static_cast<int>(sizes.size()) - 1; k >= 0; --k) {
        digits[static_cast<std::size_t>(k)] =
            static_cast<int>(g % static_cast<std::size_t>(sizes[static_cast<std::size_t>(k)]));
        g /= static_cast<std::size_t>(sizes[static_cast<std::size_t>(k)]);
    }
    return digits;
}

}  // namespace

JointFeasibilityResult joint_distribution_feasible(const Behavior& b, double tol,
                                                   std::size_t cap) {
    const auto& sc = b.scenario;
    std::vector<int> sizes;
    std::size_t n = 1;
    for (const auto& name : sc.observables) {
        sizes.push_back(sc.spectrum_of(name).size());
        n *= static_cast<std::size_t>(sizes.back());
        if (n > cap) throw ProblemTooLarge("global assignment space exceeds the cap");
    }

    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    auto add_pair = [&](const Eigen::VectorXd& r, double p) {
        rows.push_back(r);
        rhs.push_back(p + tol);
        rows.push_back(-r);
        rhs.push_back(-(p - tol));
    };
    for (std::size_t c = 0; c < sc.contexts.size(); ++c) {
        const auto& ctx = sc.contexts[c];
        std::vector<int> axes;
        for (const auto& name : ctx) axes.push_back(sc.index_of(name));
        const auto& table = b.tables[c];
        for (std::size_t cell = 0; cell < table.size(); ++cell) {
            // decode the cell into per-member outcome indices
            std::vector<int> want(ctx.size());
            std::size_t rest = cell;
            for (int k = static_cast<int>(ctx.size()) - 1; k >= 0; --k) {
                const int sz = table.support[static_cast<std::size_t>(k)].size();
                want[static_cast<std::size_t>(k)] =
                    static_cast<int>(rest % static_cast<std::size_t>(sz));
                rest /= static_cast<std::size_t>(sz);
            }
            Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<int>(n));
            for (std::size_t g = 0; g < n; ++g) {
                const auto digits = decode_global(g, sizes);
                bool match = true;
                for (std::size_t k = 0; k < axes.size(); ++k)
                    if (digits[static_cast<std::size_t>(axes[k])] != want[k]) {
                        match = false;
                        break;
                    }
                if (match) row(static_cast<int>(g)) = 1.0;
            }
            add_pair(row, table.probabilities[cell]);
        }
    }
    add_pair(Eigen::VectorXd::Ones(static_cast<int>(n)), 1.0);

    Eigen::MatrixXd A(static_cast<int>(rows.size()), static_cast<int>(n));
    Eigen::VectorXd bb(static_cast<int>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        A.row(static_cast<int>(r)) = rows[r].transpose();
        bb(static_cast<int>(r)) = rhs[r];
    }

    const auto lp = lp::solve_feasibility(A, bb);
    JointFeasibilityResult result;
    result.feasible = lp.feasible;
    result.iterations = lp.iterations;
    if (lp.feasible) {
        result.distribution.assign(lp.x.data(), lp.x.data() + lp.x.size());
        result.max_marginal_residual = lp::primal_residual(A, bb, lp.x);
        if (result.max_marginal_residual > 1e-9)
            throw NumericalFailure("feasible point fails re-verification");
    } else {
        result.certificate = lp.y;
        result.certificate_value = lp.y.dot(bb);
        if (lp::certificate_residual(A, bb, lp.y) > 1e-9)
            throw NumericalFailure("infeasibility certificate fails re-verification");
    }
    return result;
}

ExclusivityReport exclusivity_local_orthogonality_check(
    const Behavior& b, std::span<const std::vector<OutcomeRef>> families, double tol) {
    const auto& sc = b.scenario;
    ExclusivityReport rep;
    for (std::size_t f = 0; f < families.size(); ++f) {
        const auto& family = families[f];
        for (const auto& e : family) {
            if (e.context < 0 || e.context >= static_cast<int>(sc.contexts.size()))
                throw MalformedFamily("event references an unknown context");
            const auto& ctx = sc.contexts[static_cast<std::size_t>(e.context)];
            if (e.outcome.size() != ctx.size())
                throw MalformedFamily("event outcome arity mismatch");
            for (std::size_t k = 0; k < ctx.size(); ++k)
                if (e.outcome[k] < 0 ||
                    e.outcome[k] >= sc.spectrum_of(ctx[k]).size())
                    throw MalformedFamily("event outcome index out of range");
        }
        for (std::size_t i = 0; i < family.size(); ++i)
            for (std::size_t j = i + 1; j < family.size(); ++j) {
                const auto& ci = sc.contexts[static_cast<std::size_t>(family[i].context)];
                const auto& cj = sc.contexts[static_cast<std::size_t>(family[j].context)];
                bool conflict = false;
                for (std::size_t ki = 0; ki < ci.size() && !conflict; ++ki)
                    for (std::size_t kj = 0; kj < cj.size() && !conflict; ++kj)
                        if (ci[ki] == cj[kj] &&
                            family[i].outcome[ki] != family[j].outcome[kj])
                            conflict = true;
                if (!conflict)
                    throw MalformedFamily(
                        "events do not conflict on a shared observable");
            }
        double sum = 0.0;
        for (const auto& e : family)
            sum += b.tables[static_cast<std::size_t>(e.context)].prob(e.outcome);
        if (sum > rep.worst_sum) {
            rep.worst_sum = sum;
            rep.worst_family = static_cast<int>(f);
        }
        if (sum > 1.0 + tol) rep.pass = false;
    }
    return rep;
}

void ValuationProblem::validate() const {
    const int count = static_cast<int>(objects.size());
    for (const auto& a : arrows) {
        if (a.domain < 0 || a.domain >= count || a.codomain < 0 || a.codomain >= count)
            throw SchemaError("arrow endpoint out of range");
        const auto& dom = objects[static_cast<std::size_t>(a.domain)].spectrum;
        const auto& cod = objects[static_cast<std::size_t>(a.codomain)].spectrum;
        if (static_cast<int>(a.table.size()) != dom.size())
            throw SchemaError("arrow table is not total on the domain spectrum");
        for (double v : a.table)
            if (!cod.contains(v))
                throw SchemaError("arrow value outside the codomain spectrum");
    }
    // composition coherence where a composite arrow is also declared
    for (const auto& f : arrows)
        for (const auto& g : arrows) {
            if (g.domain != f.codomain) continue;
            for (const auto& h : arrows) {
                if (h.domain != f.domain || h.codomain != g.codomain) continue;
                const auto& dom = objects[static_cast<std::size_t>(f.domain)].spectrum;
                const auto& mid = objects[static_cast<std::size_t>(f.codomain)].spectrum;
                for (int i = 0; i < dom.size(); ++i) {
                    const int m = mid.index_of(f.table[static_cast<std::size_t>(i)]);
                    const double composed = g.table[static_cast<std::size_t>(m)];
                    if (std::abs(composed - h.table[static_cast<std::size_t>(i)]) > 1e-9)
                        throw InconsistentArrows(
                            "declared composite disagrees with the composition");
                }
            }
        }
}

ValuationResult valuation_search(const ValuationProblem& p) {
    p.validate();
    const int count = static_cast<int>(p.objects.size());
    std::vector<int> out_degree(static_cast<std::size_t>(count), 0);
    for (const auto& a : p.arrows) ++out_degree[static_cast<std::size_t>(a.domain)];
    std::vector<int> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
        return out_degree[static_cast<std::size_t>(x)] >
               out_degree[static_cast<std::size_t>(y)];
    });

    ValuationResult result;
    std::vector<double> value(static_cast<std::size_t>(count), 0.0);
    std::vector<bool> assigned(static_cast<std::size_t>(count), false);

    auto consistent = [&](int obj) {
        for (const auto& a : p.arrows) {
            if (!assigned[static_cast<std::size_t>(a.domain)] ||
                !assigned[static_cast<std::size_t>(a.codomain)])
                continue;
            if (a.domain != obj && a.codomain != obj) continue;
            const auto& dom = p.objects[static_cast<std::size_t>(a.domain)].spectrum;
            const int i = dom.index_of(value[static_cast<std::size_t>(a.domain)]);
            if (std::abs(a.table[static_cast<std::size_t>(i)] -
                         value[static_cast<std::size_t>(a.codomain)]) > 1e-9)
                return false;
        }
        return true;
    };

    std::function<bool(int)> dfs = [&](int depth) -> bool {
        if (depth == count) return true;
        const int obj = order[static_cast<std::size_t>(depth)];
        for (double v : p.objects[static_cast<std::size_t>(obj)].spectrum.values) {
            ++result.explored;
            value[static_cast<std::size_t>(obj)] = v;
            assigned[static_cast<std::size_t>(obj)] = true;
            if (consistent(obj) && dfs(depth + 1)) return true;
            assigned[static_cast<std::size_t>(obj)] = false;
        }
        return false;
    };

    result.sat = dfs(0);
    if (result.sat)
        for (int i = 0; i < count; ++i)
            result.valuation[p.objects[static_cast<std::size_t>(i)].name] =
                value[static_cast<std::size_t>(i)];
    return result;
}

ValuationProblem valuation_problem_from_scenario(
    Engine& eng, std::span<const ObsId> observables,
    std::span<const std::string> names,
    std::span<const std::vector<int>> contexts) {
    if (observables.size() != names.size())
        throw DimensionMismatch("observable/name count mismatch");
    ValuationProblem p;
    for (std::size_t i = 0; i < observables.size(); ++i) {
        p.objects.push_back({names[i], eng.spectrum(observables[i])});
        // identity arrow
        p.arrows.push_back({static_cast<int>(i), static_cast<int>(i),
                            eng.spectrum(observables[i]).values});
    }
    for (std::size_t c = 0; c < contexts.size(); ++c) {
        std::vector<ObsId> family;
        for (int m : contexts[c]) family.push_back(observables[static_cast<std::size_t>(m)]);
        const auto support = eng.joint_support(family);
        ValuationProblem::Object apex;
        apex.name = "apex#" + std::to_string(c);
        std::vector<double> labels(support.size());
        std::iota(labels.begin(), labels.end(), 0.0);
        apex.spectrum = SpectrumSet(labels);
        const int apex_idx = static_cast<int>(p.objects.size());
        p.objects.push_back(apex);
        p.arrows.push_back({apex_idx, apex_idx, labels});
        for (std::size_t m = 0; m < contexts[c].size(); ++m) {
            ValuationProblem::Arrow arrow;
            arrow.domain = apex_idx;
            arrow.codomain = contexts[c][m];
            for (const auto& tuple : support)
                arrow.table.push_back(
                    eng.spectrum(family[m]).values[static_cast<std::size_t>(tuple[m])]);
            p.arrows.push_back(std::move(arrow));
        }
    }
    p.validate();
    return p;
}

}  // namespace qf
