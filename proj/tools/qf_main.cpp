// qf: operational quantum toolkit command-line driver.
//
//   qf <command> <model-file> [options]
//
// commands: audit, spectral, simulate, embed, context, valuation

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qf/audit.hpp"
#include "qf/contextuality.hpp"
#include "qf/model.hpp"
#include "qf/report.hpp"
#include "qf/transition.hpp"

namespace {

using namespace qf;

struct Options {
    std::string command;
    std::string model_path;
    std::string state;
    std::string observable;
    std::string sequence;
    std::string scenario;
    long seed = -1;  // -1: unset, fall back to QF_SEED then the model file
    double tol = -1.0;
    std::string format = "text";
};

std::vector<std::string> split_sequence(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    if (out.empty()) throw UsageError("--sequence: expected a,b,c");
    return out;
}

std::string status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "skip";
    }
}

std::string describe_witness(const CheckResult& c) {
    std::string text = c.note;
    if (c.witness) {
        if (!text.empty()) text += "; ";
        text += "state " + c.witness->state + " " + c.witness->events;
    }
    return text;
}

int cmd_audit(const Options& opt, const ModelFile& mf, Report& rep) {
    AuditConfig cfg = mf.audit;
    if (opt.seed >= 0) cfg.seed = static_cast<unsigned>(opt.seed);
    if (opt.tol > 0.0) cfg.tol = opt.tol;
    rep.seed = cfg.seed;
    rep.tol = cfg.tol;
    const auto audit = audit_system(mf.build(), cfg);
    for (const auto& c : audit.checks)
        rep.add(c.id + " " + c.title, status_name(c.status), c.worst, describe_witness(c));
    return audit.all_pass() ? 0 : 1;
}

int cmd_spectral(const Options& opt, const ModelFile& mf, Report& rep) {
    if (opt.observable.empty()) throw UsageError("spectral requires --observable");
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-9;
    rep.tol = tol;
    auto sys = mf.build_hilbert();
    const auto& obs = sys->observable(opt.observable);
    const auto& eig = obs.eig();

    num::Matrix sum = num::Matrix::Zero(mf.dimension, mf.dimension);
    num::Matrix rebuilt = num::Matrix::Zero(mf.dimension, mf.dimension);
    for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
        const auto& p = eig.projectors[k];
        std::ostringstream os;
        os << "rank " << static_cast<int>(std::lround(p.trace().real()));
        rep.add("eigenvalue " + std::to_string(eig.eigenvalues[k]), "info",
                (p * p - p).norm(), os.str());
        sum += p;
        rebuilt += eig.eigenvalues[k] * p;
    }
    const double unit_res = (sum - num::Matrix::Identity(mf.dimension, mf.dimension)).norm();
    const double rec_res = (rebuilt - obs.matrix()).norm();
    rep.add("partition of the unit", unit_res <= tol ? "pass" : "fail", unit_res);
    rep.add("reconstruction", rec_res <= tol * (1.0 + obs.matrix().norm()) ? "pass" : "fail",
            rec_res);
    return rep.all_pass() ? 0 : 1;
}

int cmd_simulate(const Options& opt, const ModelFile& mf, Report& rep) {
    if (opt.sequence.empty()) throw UsageError("simulate requires --sequence");
    const auto names = split_sequence(opt.sequence);
    auto sys = mf.build();
    const State s = sys->state(opt.state.empty() ? "mixed" : opt.state);
    const auto table = sequential_distribution(*sys, s, names);

    std::vector<int> idx(names.size(), 0);
    for (std::size_t flat = 0; flat < table.size(); ++flat) {
        std::ostringstream os;
        os << "p(";
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (k) os << ",";
            os << names[k] << "="
               << table.support[k].values[static_cast<std::size_t>(idx[k])];
        }
        os << ")";
        rep.add(os.str(), "info", table.prob(idx));
        for (int k = static_cast<int>(names.size()) - 1; k >= 0; --k) {
            auto& d = idx[static_cast<std::size_t>(k)];
            if (++d < table.support[static_cast<std::size_t>(k)].size()) break;
            d = 0;
        }
    }
    const double total = table.total();
    rep.add("total", std::abs(total - 1.0) <= 1e-9 ? "pass" : "fail", total);
    return rep.all_pass() ? 0 : 1;
}

int cmd_embed(const Options& opt, const ModelFile& mf, Report& rep) {
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-8;
    rep.tol = tol;
    Engine eng(mf.build_hilbert());

    // orthogonal basis from the first nondegenerate observable, then every
    // rank-1 eigenprojector of the remaining registered observables
    std::vector<ObsId> basis;
    std::vector<ObsId> handles;
    std::vector<ObsId> observables;
    for (const auto& name : eng.system().observable_names()) {
        const ObsId a = eng.id_of(name);
        observables.push_back(a);
        const auto dec = eng.spectral_decomposition(a);
        const bool nondegenerate =
            static_cast<int>(dec.projections.size()) == eng.dimension();
        if (basis.empty() && nondegenerate) basis = dec.projections;
        for (ObsId p : dec.projections)
            if (eng.projection_rank(p) == 1 &&
                std::find(handles.begin(), handles.end(), p) == handles.end())
                handles.push_back(p);
    }
    if (basis.empty())
        throw SchemaError("observables: no nondegenerate observable to anchor a basis");
    // keep the basis in front so the assignment covers it first
    std::vector<ObsId> all = basis;
    for (ObsId h : handles)
        if (std::find(all.begin(), all.end(), h) == all.end()) all.push_back(h);

    // the trivial phase function only represents handles whose amplitudes
    // can be chosen real nonnegative; keep the maximal consistent family
    // and report the rest instead of failing on them
    const auto full = transition_table(eng, all);
    const auto trial = vector_assignment(full, basis, PhaseFunction{});
    std::vector<ObsId> ordered = basis;
    int dropped = 0;
    for (ObsId h : all) {
        if (std::find(ordered.begin(), ordered.end(), h) != ordered.end()) continue;
        const auto& vh = trial.vector_of(h);
        bool consistent = true;
        for (ObsId g : ordered) {
            const double overlap = std::norm(trial.vector_of(g).dot(vh));
            if (std::abs(overlap - full.P(full.index_of(h), full.index_of(g))) > tol) {
                consistent = false;
                break;
            }
        }
        if (consistent)
            ordered.push_back(h);
        else
            ++dropped;
    }
    if (dropped > 0) {
        std::ostringstream os;
        os << dropped << " handle(s) need nontrivial phases and were left out";
        rep.add("phase coverage", "info", static_cast<double>(dropped), os.str());
    }

    const auto table = transition_table(eng, ordered);
    const auto psi = vector_assignment(table, basis, PhaseFunction{});

    // only observables whose eigenprojectors split along the covered
    // handles can be verified; name the ones that cannot
    std::vector<ObsId> verifiable;
    std::string uncovered;
    for (ObsId a : observables) {
        try {
            observable_assignment(eng, psi, a);
            verifiable.push_back(a);
        } catch (const UndecomposableProjection&) {
            if (!uncovered.empty()) uncovered += ", ";
            uncovered += eng.obs(a).name();
        }
    }
    observables = std::move(verifiable);
    if (!uncovered.empty())
        rep.add("observable coverage", "info", 0.0,
                "not representable over the covered handles: " + uncovered);

    std::vector<int> basis_idx;
    for (ObsId h : basis) basis_idx.push_back(table.index_of(h));
    const std::vector<std::vector<int>> bases{basis_idx};

    const auto embed = verify_embedding(eng, table, psi, bases, observables, tol);
    for (const auto& c : embed.checks)
        rep.add(c.name, c.pass ? "pass" : "fail", c.residual, c.note);
    return embed.all_pass() ? 0 : 1;
}

const Scenario& pick_scenario(const Options& opt, const ModelFile& mf) {
    if (!opt.scenario.empty()) {
        auto it = mf.scenarios.find(opt.scenario);
        if (it == mf.scenarios.end())
            throw UsageError("unknown scenario '" + opt.scenario + "'");
        return it->second;
    }
    if (mf.scenarios.size() == 1) return mf.scenarios.begin()->second;
    throw UsageError("--scenario is required when the model declares several");
}

int cmd_context(const Options& opt, const ModelFile& mf, Report& rep) {
    const double tol = opt.tol > 0.0 ? opt.tol : 1e-6;
    rep.tol = tol;
    const auto& sc = pick_scenario(opt, mf);
    auto sys = mf.build();
    const State s = sys->state(opt.state.empty() ? "mixed" : opt.state);
    const auto b = behavior_from_system(*sys, s, sc);

    const auto nd = nondisturbance_check(b, tol);
    rep.add("nondisturbance", nd.pass ? "pass" : "fail", nd.worst, nd.witness);

    // all degree-one local-orthogonality families: pairs of full-context
    // events conflicting on a shared observable
    std::vector<std::vector<OutcomeRef>> families;
    for (std::size_t c1 = 0; c1 < sc.contexts.size(); ++c1)
        for (std::size_t c2 = c1; c2 < sc.contexts.size(); ++c2) {
            std::vector<std::vector<int>> cells1, cells2;
            auto enumerate = [&](std::size_t c) {
                std::vector<std::vector<int>> cells;
                std::vector<int> idx(sc.contexts[c].size(), 0);
                for (std::size_t f = 0; f < b.tables[c].size(); ++f) {
                    cells.push_back(idx);
                    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
                        auto& d = idx[static_cast<std::size_t>(k)];
                        if (++d < b.tables[c].support[static_cast<std::size_t>(k)].size())
                            break;
                        d = 0;
                    }
                }
                return cells;
            };
            cells1 = enumerate(c1);
            cells2 = enumerate(c2);
            for (const auto& t1 : cells1)
                for (const auto& t2 : cells2) {
                    if (c1 == c2 && t1 >= t2) continue;
                    bool conflict = false;
                    for (std::size_t i = 0; i < sc.contexts[c1].size() && !conflict; ++i)
                        for (std::size_t j = 0; j < sc.contexts[c2].size(); ++j)
                            if (sc.contexts[c1][i] == sc.contexts[c2][j] &&
                                t1[i] != t2[j]) {
                                conflict = true;
                                break;
                            }
                    if (conflict)
                        families.push_back({{static_cast<int>(c1), t1},
                                            {static_cast<int>(c2), t2}});
                }
        }
    const auto lo = exclusivity_local_orthogonality_check(b, families, 1e-9);
    rep.add("local orthogonality", lo.pass ? "pass" : "fail", lo.worst_sum);

    const auto joint = joint_distribution_feasible(b, tol);
    if (joint.feasible) {
        rep.add("joint distribution", "pass", joint.max_marginal_residual, "feasible");
    } else {
        std::ostringstream os;
        os << "dual certificate:";
        for (int i = 0; i < joint.certificate.size(); ++i)
            if (joint.certificate(i) > 1e-9) os << " y" << i << "=" << joint.certificate(i);
        rep.add("joint distribution", "fail", joint.certificate_value, os.str());
    }
    return rep.all_pass() ? 0 : 1;
}

int cmd_valuation(const Options& opt, const ModelFile& mf, Report& rep) {
    const auto& sc = pick_scenario(opt, mf);
    Engine eng(mf.build_hilbert());
    std::vector<ObsId> ids;
    for (const auto& name : sc.observables) ids.push_back(eng.id_of(name));
    std::vector<std::vector<int>> contexts;
    for (const auto& ctx : sc.contexts) {
        std::vector<int> members;
        for (const auto& name : ctx) members.push_back(sc.index_of(name));
        contexts.push_back(std::move(members));
    }
    const auto p = valuation_problem_from_scenario(eng, ids, sc.observables, contexts);
    const auto r = valuation_search(p);
    if (r.sat) {
        for (const auto& name : sc.observables)
            rep.add(name, "pass", r.valuation.at(name));
        rep.add("valuation", "pass", static_cast<double>(r.explored),
                "SAT after " + std::to_string(r.explored) + " partial assignments");
        return 0;
    }
    rep.add("valuation", "fail", static_cast<double>(r.explored),
            "UNSAT; exhausted " + std::to_string(r.explored) + " partial assignments");
    return 1;
}

int run(const Options& opt) {
    const ModelFile mf = parse_model_file(opt.model_path);

    Report rep;
    std::ostringstream echo;
    echo << "qf " << opt.command << " " << opt.model_path;
    if (!opt.state.empty()) echo << " --state " << opt.state;
    if (!opt.observable.empty()) echo << " --observable " << opt.observable;
    if (!opt.sequence.empty()) echo << " --sequence " << opt.sequence;
    if (!opt.scenario.empty()) echo << " --scenario " << opt.scenario;
    rep.command = echo.str();
    rep.seed = opt.seed >= 0 ? static_cast<unsigned long>(opt.seed) : mf.audit.seed;
    rep.tol = opt.tol > 0.0 ? opt.tol : mf.audit.tol;

    int code = 2;
    if (opt.command == "audit") code = cmd_audit(opt, mf, rep);
    else if (opt.command == "spectral") code = cmd_spectral(opt, mf, rep);
    else if (opt.command == "simulate") code = cmd_simulate(opt, mf, rep);
    else if (opt.command == "embed") code = cmd_embed(opt, mf, rep);
    else if (opt.command == "context") code = cmd_context(opt, mf, rep);
    else if (opt.command == "valuation") code = cmd_valuation(opt, mf, rep);
    else throw UsageError("unknown command '" + opt.command + "'");

    std::cout << (opt.format == "data" ? rep.to_data() : rep.to_text());
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"operational quantum toolkit"};
    app.add_option("command", opt.command, "audit|spectral|simulate|embed|context|valuation")
        ->required();
    app.add_option("model", opt.model_path, "model file (JSON)")->required();
    app.add_option("--state", opt.state);
    app.add_option("--observable", opt.observable);
    app.add_option("--sequence", opt.sequence, "comma-separated observable names");
    app.add_option("--scenario", opt.scenario);
    app.add_option("--seed", opt.seed);
    app.add_option("--tol", opt.tol);
    app.add_option("--format", opt.format)
        ->check(CLI::IsMember({"text", "data"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (opt.seed < 0)
        if (const char* env = std::getenv("QF_SEED"))
            opt.seed = std::strtol(env, nullptr, 10);

    try {
        return run(opt);
    } catch (const qf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
