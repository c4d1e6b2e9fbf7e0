#include "qf/audit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "qf/functional.hpp"
#include "qf/hilbert.hpp"
#include "qf/transition.hpp"

namespace qf {

const CheckResult& AuditReport::check(const std::string& id) const {
    for (const auto& c : checks)
        if (c.id == id) return c;
    throw UsageError("no such check: " + id);
}

bool AuditReport::all_pass() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) {
        return c.status == CheckStatus::Fail;
    });
}

std::vector<std::string> AuditReport::failed_ids() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (c.status == CheckStatus::Fail) out.push_back(c.id);
    return out;
}

namespace {

std::string event_str(const std::string& obs, double value) {
    std::ostringstream os;
    os << "(" << value << ";" << obs << ")";
    return os.str();
}

struct Auditor {
    std::shared_ptr<const OperationalSystem> sys;
    std::shared_ptr<const HilbertSystem> hs;  // null for non-Hilbert backends
    const AuditConfig& cfg;

    std::vector<std::string> obs_names;
    std::vector<State> probes;
    std::vector<std::string> probe_names;
    bool preparations_ok = true;

    Auditor(std::shared_ptr<const OperationalSystem> s, const AuditConfig& c)
        : sys(std::move(s)),
          hs(std::dynamic_pointer_cast<const HilbertSystem>(sys)),
          cfg(c) {
        obs_names = sys->observable_names();
        build_probes();
        check_preparations();
    }

    void build_probes() {
        std::vector<State> pool;
        std::vector<std::string> pool_names;
        for (const auto& name : sys->state_names()) {
            pool.push_back(sys->state(name));
            pool_names.push_back(name);
        }
        pool.push_back(sys->mixed_state());
        pool_names.push_back("mixed");
        probes = pool;
        probe_names = pool_names;
        for (const auto& a : obs_names)
            for (double alpha : sys->spectrum(a).values) {
                const State prep = sys->objective_update(sys->mixed_state(), a, alpha);
                if (sys->is_null(prep)) continue;
                probes.push_back(prep);
                probe_names.push_back("prep" + event_str(a, alpha));
            }
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int k = 0; k < cfg.random_probe_count; ++k) {
            std::vector<double> w(pool.size());
            double total = 0.0;
            for (double& x : w) {
                x = uni(rng);
                total += x;
            }
            for (double& x : w) x /= total;
            probes.push_back(sys->mix(w, pool));
            probe_names.push_back("mix#" + std::to_string(k));
        }
    }

    /// Do eigenstate preparations work at all? Conditioning the completely
    /// mixed state on a single value must produce a point mass on it. When
    /// this fails the cone-related checks are inconclusive, not negative.
    void check_preparations() {
        for (const auto& a : obs_names) {
            const auto& sigma = sys->spectrum(a).values;
            for (std::size_t k = 0; k < sigma.size(); ++k) {
                const State prep = sys->objective_update(sys->mixed_state(), a, sigma[k]);
                if (sys->is_null(prep)) {
                    preparations_ok = false;
                    return;
                }
                const auto dist = sys->distribution(prep, a);
                if (dist.probabilities[k] < 1.0 - 1e-6) {
                    preparations_ok = false;
                    return;
                }
            }
        }
    }

    int declared_state_count() const {
        return static_cast<int>(sys->state_names().size());
    }

    double sup_diff(const DistributionTable& a, const DistributionTable& b) const {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.probabilities.size(); ++i)
            worst = std::max(worst, std::abs(a.probabilities[i] - b.probabilities[i]));
        return worst;
    }

    CheckResult p0() {
        CheckResult c{"P0", "separation of declared-distinct objects"};
        const double tol = cfg.tol_for("P0");
        int min_power = -1;
        // observables
        for (std::size_t i = 0; i < obs_names.size(); ++i)
            for (std::size_t j = i + 1; j < obs_names.size(); ++j) {
                ++c.samples;
                if (sys->spectrum(obs_names[i]).values !=
                    sys->spectrum(obs_names[j]).values)
                    continue;
                int power = 0;
                for (const auto& rho : probes)
                    if (sup_diff(sys->distribution(rho, obs_names[i]),
                                 sys->distribution(rho, obs_names[j])) > tol)
                        ++power;
                if (min_power < 0 || power < min_power) min_power = power;
                if (power == 0) {
                    c.status = CheckStatus::Fail;
                    c.witness = Witness{"all probes",
                                        obs_names[i] + " vs " + obs_names[j], 0.0, 1.0};
                    c.note = "observables statistically indistinguishable";
                }
            }
        // declared states
        const auto names = sys->state_names();
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = i + 1; j < names.size(); ++j) {
                ++c.samples;
                int power = 0;
                for (const auto& a : obs_names)
                    if (sup_diff(sys->distribution(sys->state(names[i]), a),
                                 sys->distribution(sys->state(names[j]), a)) > tol)
                        ++power;
                if (min_power < 0 || power < min_power) min_power = power;
                if (power == 0) {
                    c.status = CheckStatus::Fail;
                    c.witness =
                        Witness{names[i] + " vs " + names[j], "all observables", 0.0, 1.0};
                    c.note = "states statistically indistinguishable";
                }
            }
        if (c.status == CheckStatus::Pass) {
            std::ostringstream os;
            os << "separation power " << std::max(min_power, 0)
               << " distinguishing probes (completeness not claimed)";
            c.note = os.str();
        }
        return c;
    }

    CheckResult p1() {
        CheckResult c{"P1", "subjective updates are the stated convex combinations"};
        const double tol = cfg.tol_for("P1");
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            const State& rho = probes[pi];
            for (const auto& a : obs_names) {
                const auto& sigma = sys->spectrum(a).values;
                if (sigma.size() < 2) continue;
                std::vector<std::vector<double>> deltas{
                    sigma, {sigma[0], sigma[1]}};
                for (const auto& delta : deltas) {
                    const EventSpec ev{a, delta};
                    const double pd = event_probability(*sys, rho, ev);
                    if (pd <= kProbFloor) continue;
                    ++c.samples;
                    const State after = update_state(*sys, rho, ev);
                    for (const auto& b : obs_names) {
                        const auto lhs = sys->distribution(after, b);
                        std::vector<double> rhs(lhs.probabilities.size(), 0.0);
                        for (double alpha : delta) {
                            const EventSpec ea{a, {alpha}};
                            const double pa = event_probability(*sys, rho, ea);
                            if (pa <= kProbFloor) continue;
                            const State branch = update_state(*sys, rho, ea);
                            const auto d = sys->distribution(branch, b);
                            for (std::size_t k = 0; k < rhs.size(); ++k)
                                rhs[k] += (pa / pd) * d.probabilities[k];
                        }
                        for (std::size_t k = 0; k < rhs.size(); ++k) {
                            const double gap =
                                std::abs(lhs.probabilities[k] - rhs[k]);
                            if (gap > c.worst) {
                                c.worst = gap;
                                if (gap > tol) {
                                    c.status = CheckStatus::Fail;
                                    c.witness = Witness{
                                        probe_names[pi],
                                        ev.to_string() + " then " +
                                            event_str(b, sys->spectrum(b).values[k]),
                                        lhs.probabilities[k], rhs[k]};
                                }
                            }
                        }
                    }
                }
            }
        }
        return c;
    }

    CheckResult p2() {
        CheckResult c{"P2", "conditioning: repeatability and idempotence"};
        const double tol = cfg.tol_for("P2");
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            const State& rho = probes[pi];
            for (const auto& a : obs_names) {
                ++c.samples;
                const auto& sigma = sys->spectrum(a).values;
                const std::vector<std::string> seq{a, a};
                const auto table = sequential_distribution(*sys, rho, seq);
                const auto single = sys->distribution(rho, a);
                for (int i = 0; i < static_cast<int>(sigma.size()); ++i)
                    for (int j = 0; j < static_cast<int>(sigma.size()); ++j) {
                        const std::vector<int> idx{i, j};
                        const double expected =
                            i == j ? single.probabilities[static_cast<std::size_t>(i)]
                                   : 0.0;
                        const double gap = std::abs(table.prob(idx) - expected);
                        if (gap > c.worst) {
                            c.worst = gap;
                            if (gap > tol) {
                                c.status = CheckStatus::Fail;
                                c.note = "repeatability violated";
                                c.witness = Witness{
                                    probe_names[pi],
                                    event_str(a, sigma[static_cast<std::size_t>(i)]) +
                                        " then " +
                                        event_str(a, sigma[static_cast<std::size_t>(j)]),
                                    table.prob(idx), expected};
                            }
                        }
                    }
                // idempotence of the objective update, observed statistically
                for (double alpha : sigma) {
                    const EventSpec ev{a, {alpha}};
                    if (event_probability(*sys, rho, ev) <= kProbFloor) continue;
                    const State once = update_state(*sys, rho, ev);
                    const State twice = update_state(*sys, once, ev);
                    for (const auto& b : obs_names) {
                        const double gap = sup_diff(sys->distribution(once, b),
                                                    sys->distribution(twice, b));
                        if (gap > c.worst) {
                            c.worst = gap;
                            if (gap > tol) {
                                c.status = CheckStatus::Fail;
                                c.note = "idempotence violated";
                                c.witness =
                                    Witness{probe_names[pi],
                                            ev.to_string() + " twice, probing " + b,
                                            gap, 0.0};
                            }
                        }
                    }
                }
            }
        }
        return c;
    }

    CheckResult p3() {
        CheckResult c{"P3", "nondegenerate refinements and uniformity of the mixed state"};
        const double tol = cfg.tol_for("P3");
        const int n = sys->dimension();
        for (const auto& a : obs_names) {
            const auto& sigma = sys->spectrum(a).values;
            if (static_cast<int>(sigma.size()) == n) {
                ++c.samples;
                const auto dist = sys->distribution(sys->mixed_state(), a);
                for (std::size_t k = 0; k < dist.probabilities.size(); ++k) {
                    const double gap =
                        std::abs(dist.probabilities[k] - 1.0 / static_cast<double>(n));
                    if (gap > c.worst) {
                        c.worst = gap;
                        if (gap > tol) {
                            c.status = CheckStatus::Fail;
                            c.note = "mixed state not uniform on a nondegenerate observable";
                            c.witness = Witness{"mixed", event_str(a, sigma[k]),
                                                dist.probabilities[k],
                                                1.0 / static_cast<double>(n)};
                        }
                    }
                }
            } else {
                ++c.samples;
                if (!refinement_exists(a)) {
                    c.status = CheckStatus::Fail;
                    c.note = "degenerate observable admits no nondegenerate refinement";
                    c.witness = Witness{"registry", a, 0.0, 1.0};
                }
            }
        }
        return c;
    }

    bool refinement_exists(const std::string& a) {
        if (hs) {
            Engine eng(hs, cfg.seed);
            const std::array<ObsId, 1> legs{eng.id_of(a)};
            auto cone = eng.find_cone(legs);
            return cone.has_value() &&
                   eng.spectrum(cone->apex).size() == sys->dimension();
        }
        if (!preparations_ok) return false;
        for (const auto& b : obs_names) {
            if (sys->spectrum(b).size() != sys->dimension()) continue;
            if (generic_functional_relation(*sys, b, a, probes, cfg.tol_for("P3")))
                return true;
        }
        return false;
    }

    /// Candidate value table for b = f(a), from preparations only; the
    /// pushforward verification is the caller's check, not a filter.
    std::optional<std::vector<double>> candidate_arrow(const std::string& a,
                                                       const std::string& b) const {
        const auto& sa = sys->spectrum(a).values;
        const auto& sb = sys->spectrum(b).values;
        std::vector<double> table;
        std::set<std::size_t> hit;
        for (double alpha : sa) {
            const State prep = sys->objective_update(sys->mixed_state(), a, alpha);
            if (sys->is_null(prep)) return std::nullopt;
            const auto dist = sys->distribution(prep, b);
            int arg = -1;
            for (std::size_t j = 0; j < sb.size(); ++j)
                if (dist.probabilities[j] >= 1.0 - 1e-6) arg = static_cast<int>(j);
            if (arg < 0) return std::nullopt;
            table.push_back(sb[static_cast<std::size_t>(arg)]);
            hit.insert(static_cast<std::size_t>(arg));
        }
        if (hit.size() != sb.size()) return std::nullopt;
        return table;
    }

    CheckResult p4() {
        CheckResult c{"P4", "pushforward of distributions and sequential measures"};
        const double tol = cfg.tol_for("P4");
        if (!preparations_ok) {
            c.status = CheckStatus::Skipped;
            c.note = "eigenstate preparations unavailable";
            return c;
        }
        // single-arrow pushforward: candidate arrows from preparations must
        // push every probe distribution forward correctly
        for (const auto& a : obs_names)
            for (const auto& b : obs_names) {
                if (a == b) continue;
                const auto arrow = candidate_arrow(a, b);
                if (!arrow) continue;
                ++c.samples;
                const auto& sa = sys->spectrum(a).values;
                const auto& sb = sys->spectrum(b).values;
                for (std::size_t pi = 0; pi < probes.size(); ++pi) {
                    const auto da = sys->distribution(probes[pi], a);
                    const auto db = sys->distribution(probes[pi], b);
                    for (std::size_t j = 0; j < sb.size(); ++j) {
                        double pushed = 0.0;
                        for (std::size_t i = 0; i < sa.size(); ++i)
                            if (std::abs((*arrow)[i] - sb[j]) <= 1e-9)
                                pushed += da.probabilities[i];
                        const double gap = std::abs(pushed - db.probabilities[j]);
                        if (gap > c.worst) {
                            c.worst = gap;
                            if (gap > tol) {
                                c.status = CheckStatus::Fail;
                                c.note = "arrow pushforward violated";
                                c.witness = Witness{probe_names[pi],
                                                    b + " = f(" + a + ") at " +
                                                        event_str(b, sb[j]),
                                                    db.probabilities[j], pushed};
                            }
                        }
                    }
                }
            }
        // joint pushforward: the sequential measure of two images of a
        // common refinement is the pushforward of the refinement's measure
        for (std::size_t i = 0; i < obs_names.size(); ++i)
            for (std::size_t j = 0; j < obs_names.size(); ++j) {
                if (i == j) continue;
                const std::string& a = obs_names[i];
                const std::string& b = obs_names[j];
                std::optional<std::string> apex;
                for (const auto& cand : obs_names)
                    if (candidate_arrow(cand, a) && candidate_arrow(cand, b)) {
                        if (!apex ||
                            sys->spectrum(cand).size() > sys->spectrum(*apex).size())
                            apex = cand;
                    }
                if (!apex) continue;
                ++c.samples;
                const auto fa = *candidate_arrow(*apex, a);
                const auto fb = *candidate_arrow(*apex, b);
                const auto& sg = sys->spectrum(*apex).values;
                const auto& sa = sys->spectrum(a).values;
                const auto& sb = sys->spectrum(b).values;
                for (std::size_t pi = 0; pi < probes.size(); ++pi) {
                    const std::vector<std::string> seq{a, b};
                    const auto table = sequential_distribution(*sys, probes[pi], seq);
                    const auto dg = sys->distribution(probes[pi], *apex);
                    for (std::size_t ia = 0; ia < sa.size(); ++ia)
                        for (std::size_t ib = 0; ib < sb.size(); ++ib) {
                            double expected = 0.0;
                            for (std::size_t g = 0; g < sg.size(); ++g)
                                if (std::abs(fa[g] - sa[ia]) <= 1e-9 &&
                                    std::abs(fb[g] - sb[ib]) <= 1e-9)
                                    expected += dg.probabilities[g];
                            const std::vector<int> idx{static_cast<int>(ia),
                                                       static_cast<int>(ib)};
                            const double gap = std::abs(table.prob(idx) - expected);
                            if (gap > c.worst) {
                                c.worst = gap;
                                if (gap > tol) {
                                    c.status = CheckStatus::Fail;
                                    c.note = "sequential measure disagrees with the "
                                             "refinement pushforward via " + *apex;
                                    c.witness = Witness{
                                        probe_names[pi],
                                        event_str(a, sa[ia]) + " then " +
                                            event_str(b, sb[ib]),
                                        table.prob(idx), expected};
                                }
                            }
                        }
                }
            }
        return c;
    }

    CheckResult p5() {
        CheckResult c{"P5", "Bayes-rule pairs admit a cone"};
        const double tol = cfg.tol_for("P5");
        if (!preparations_ok) {
            c.status = CheckStatus::Skipped;
            c.note = "eigenstate preparations unavailable";
            return c;
        }
        std::shared_ptr<Engine> eng;
        if (hs) eng = std::make_shared<Engine>(hs, cfg.seed);
        for (std::size_t i = 0; i < obs_names.size(); ++i)
            for (std::size_t j = i + 1; j < obs_names.size(); ++j) {
                double gap = 0.0;
                if (!bayes_rule_holds(*sys, obs_names[i], obs_names[j], probes, tol,
                                      &gap))
                    continue;
                ++c.samples;
                bool has_cone = false;
                if (eng) {
                    const std::array<ObsId, 2> legs{eng->id_of(obs_names[i]),
                                                    eng->id_of(obs_names[j])};
                    has_cone = eng->find_cone(legs).has_value();
                } else {
                    has_cone = generic_cone_apex(*sys, obs_names[i], obs_names[j],
                                                 probes, tol)
                                   .has_value();
                }
                if (!has_cone) {
                    c.status = CheckStatus::Fail;
                    c.note = "commuting pair without a common refinement";
                    c.witness = Witness{"all probes",
                                        obs_names[i] + ", " + obs_names[j] +
                                            " (Bayes gap " + std::to_string(gap) + ")",
                                        0.0, 1.0};
                }
            }
        return c;
    }

    std::vector<std::size_t> pure_probe_indices() const {
        std::vector<std::size_t> out;
        if (!hs) return out;
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            const num::Matrix& d = hs->density(probes[pi]);
            if (d.norm() > 0.0 && (d * d - d).norm() <= 1e-8) out.push_back(pi);
        }
        return out;
    }

    CheckResult p6() {
        CheckResult c{"P6", "certainty in a pure state implies compatibility"};
        const double tol = cfg.tol_for("P6");
        if (!hs) {
            c.status = CheckStatus::Skipped;
            c.note = "no projector structure on this backend";
            return c;
        }
        for (std::size_t pi : pure_probe_indices()) {
            const num::Matrix& rho = hs->density(probes[pi]);
            for (const auto& a : obs_names) {
                const auto dist = sys->distribution(probes[pi], a);
                const auto& sigma = sys->spectrum(a).values;
                for (std::size_t k = 0; k < sigma.size(); ++k) {
                    if (dist.probabilities[k] < 1.0 - cfg.tol_for("P6")) continue;
                    ++c.samples;
                    const num::Matrix& m = hs->observable(a).matrix();
                    const double res =
                        (rho * m - m * rho).norm() / (1.0 + m.norm());
                    if (res > c.worst) {
                        c.worst = res;
                        if (res > tol) {
                            c.status = CheckStatus::Fail;
                            c.witness = Witness{probe_names[pi],
                                                "certain " + event_str(a, sigma[k]),
                                                res, 0.0};
                        }
                    }
                }
            }
        }
        if (c.samples == 0) c.note = "no certainty instances among the probes";
        return c;
    }

    CheckResult p7() {
        CheckResult c{"P7", "transition symmetry and interference"};
        const double tol = cfg.tol_for("P7");
        if (!hs) {
            c.status = CheckStatus::Skipped;
            c.note = "no rank-1 handles derivable on this backend";
            return c;
        }
        Engine eng(hs, cfg.seed);
        std::string nondeg;
        for (const auto& a : obs_names)
            if (sys->spectrum(a).size() == sys->dimension()) {
                nondeg = a;
                break;
            }
        auto dec = eng.spectral_decomposition(eng.id_of(nondeg));
        std::vector<ObsId> handles = dec.projections;
        std::vector<std::vector<int>> bases;
        for (std::size_t b = 0; b < cfg.interference_bases.size(); ++b) {
            std::vector<int> idx;
            for (std::size_t v = 0; v < cfg.interference_bases[b].size(); ++v) {
                const ObsId h = eng.register_observable(
                    pure_state_matrix(cfg.interference_bases[b][v]),
                    "basis" + std::to_string(b) + "." + std::to_string(v));
                auto it = std::find(handles.begin(), handles.end(), h);
                if (it == handles.end()) {
                    idx.push_back(static_cast<int>(handles.size()));
                    handles.push_back(h);
                } else {
                    idx.push_back(static_cast<int>(it - handles.begin()));
                }
            }
            bases.push_back(std::move(idx));
        }
        const auto table = transition_table(eng, handles);
        const auto rep = check_transition_postulate(table, bases, tol);
        c.samples = table.size() * table.size();
        c.worst = rep.symmetry_worst;
        if (!rep.symmetry_pass) {
            c.status = CheckStatus::Fail;
            c.note = "transition symmetry violated";
            c.witness = Witness{"pure transition states",
                                "P(" + std::to_string(rep.symmetry_i) + "->" +
                                    std::to_string(rep.symmetry_j) + ") vs reverse",
                                table.P(rep.symmetry_i, rep.symmetry_j),
                                table.P(rep.symmetry_j, rep.symmetry_i)};
        }
        for (const auto& entry : rep.interference) {
            c.worst = std::max(c.worst, entry.residual);
            if (!entry.pass) {
                c.status = CheckStatus::Fail;
                c.note = "interference identity violated on basis " +
                         std::to_string(entry.basis);
                c.witness = Witness{"pure transition states",
                                    "P(" + std::to_string(entry.from) + "->" +
                                        std::to_string(entry.to) + ")",
                                    entry.observed, entry.expected};
            }
        }
        if (bases.empty() && c.status == CheckStatus::Pass)
            c.note = "symmetry only; no interference bases supplied";
        return c;
    }

    CheckResult p8() {
        CheckResult c{"P8", "objective updates preserve purity"};
        const double tol = cfg.tol_for("P8");
        if (!hs) {
            c.status = CheckStatus::Skipped;
            c.note = "purity not observable on this backend";
            return c;
        }
        for (std::size_t pi : pure_probe_indices()) {
            for (const auto& a : obs_names)
                for (double alpha : sys->spectrum(a).values) {
                    const State after = sys->objective_update(probes[pi], a, alpha);
                    if (sys->is_null(after)) continue;
                    ++c.samples;
                    const num::Matrix& d = hs->density(after);
                    const double res = (d * d - d).norm();
                    if (res > c.worst) {
                        c.worst = res;
                        if (res > tol) {
                            c.status = CheckStatus::Fail;
                            c.witness =
                                Witness{probe_names[pi], event_str(a, alpha), res, 0.0};
                        }
                    }
                }
        }
        return c;
    }
};

}  // namespace

AuditReport audit_system(std::shared_ptr<const OperationalSystem> sys,
                         const AuditConfig& cfg) {
    Auditor aud(std::move(sys), cfg);
    AuditReport report;
    report.checks.push_back(aud.p0());
    report.checks.push_back(aud.p1());
    report.checks.push_back(aud.p2());
    report.checks.push_back(aud.p3());
    report.checks.push_back(aud.p4());
    report.checks.push_back(aud.p5());
    report.checks.push_back(aud.p6());
    report.checks.push_back(aud.p7());
    report.checks.push_back(aud.p8());
    return report;
}

}  // namespace qf
