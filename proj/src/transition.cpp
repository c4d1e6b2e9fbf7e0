#include "qf/transition.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

namespace qf {
namespace {

constexpr double kOrthTol = 1e-9;

bool projector_leq_mat(const num::Matrix& a, const num::Matrix& b, double tol) {
    return (b * a - a).norm() <= tol * (1.0 + a.norm());
}

}  // namespace

int TransitionTable::index_of(ObsId handle) const {
    auto it = std::find(projections.begin(), projections.end(), handle);
    return it == projections.end() ? -1
                                   : static_cast<int>(it - projections.begin());
}

TransitionTable transition_table(Engine& eng, std::span<const ObsId> rank1) {
    TransitionTable table;
    table.dimension = eng.dimension();
    for (ObsId id : rank1) {
        if (!eng.is_projection(id) || eng.projection_rank(id) != 1)
            throw NotRankOne("transition_table: handle is not a rank-1 projection");
        table.projections.push_back(id);
    }
    const int m = table.size();
    table.P = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        const State source = eng.pure_state_of(table.projections[i]);
        for (int j = 0; j < m; ++j)
            table.P(i, j) = std::clamp(
                eng.expectation(source, table.projections[j]), 0.0, 1.0);
    }
    return table;
}

TransitionCheckReport check_transition_postulate(
    const TransitionTable& table, std::span<const std::vector<int>> bases, double tol) {
    const int m = table.size();
    TransitionCheckReport rep;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double gap = std::abs(table.P(i, j) - table.P(j, i));
            if (gap > rep.symmetry_worst) {
                rep.symmetry_worst = gap;
                rep.symmetry_i = i;
                rep.symmetry_j = j;
            }
        }
    rep.symmetry_pass = rep.symmetry_worst <= tol;

    for (std::size_t b = 0; b < bases.size(); ++b) {
        const auto& basis = bases[b];
        if (static_cast<int>(basis.size()) != table.dimension)
            throw BasisWrongSize("interference basis has wrong size");
        for (int gi : basis) {
            if (gi < 0 || gi >= m)
                throw BasisWrongSize("interference basis index out of range");
            for (int gj : basis)
                if (gi != gj && table.P(gi, gj) > tol)
                    throw BasisNotOrthogonal("interference basis is not orthogonal");
        }
        TransitionCheckReport::InterferenceEntry worst;
        worst.basis = static_cast<int>(b);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double amp = 0.0;
                for (int g : basis) amp += std::sqrt(table.P(i, g) * table.P(g, j));
                const double observed = amp * amp;
                const double residual = std::abs(observed - table.P(i, j));
                if (residual >= worst.residual) {
                    worst.from = i;
                    worst.to = j;
                    worst.observed = observed;
                    worst.expected = table.P(i, j);
                    worst.residual = residual;
                }
            }
        worst.pass = worst.residual <= tol;
        rep.interference_pass = rep.interference_pass && worst.pass;
        rep.interference.push_back(worst);
    }
    return rep;
}

const num::CVector& VectorAssignment::vector_of(ObsId handle) const {
    auto it = vectors.find(handle);
    if (it == vectors.end())
        throw MissingTransitionEntry("no vector assigned to the handle");
    return it->second;
}

VectorAssignment vector_assignment(const TransitionTable& table,
                                   std::span<const ObsId> basis_handles,
                                   const PhaseFunction& theta) {
    const int n = table.dimension;
    if (static_cast<int>(basis_handles.size()) != n)
        throw BasisNotOrthogonal("vector_assignment: basis must have n members");
    std::vector<int> basis_idx;
    for (ObsId h : basis_handles) {
        const int i = table.index_of(h);
        if (i < 0) throw MissingTransitionEntry("basis handle not in the table");
        basis_idx.push_back(i);
    }
    for (std::size_t a = 0; a < basis_idx.size(); ++a)
        for (std::size_t b = 0; b < a; ++b)
            if (table.P(basis_idx[a], basis_idx[b]) > kOrthTol)
                throw BasisNotOrthogonal("vector_assignment: basis is not orthogonal");

    VectorAssignment out;
    out.basis.assign(basis_handles.begin(), basis_handles.end());
    for (int f = 0; f < table.size(); ++f) {
        const ObsId fh = table.projections[f];
        num::CVector psi(n);
        for (int i = 0; i < n; ++i) {
            const double amp = std::sqrt(table.P(f, basis_idx[static_cast<std::size_t>(i)]));
            const double phase = theta.at(basis_handles[static_cast<std::size_t>(i)]) -
                                 theta.at(fh);
            psi(i) = amp * std::exp(num::Complex(0.0, phase));
        }
        const double norm = psi.norm();
        if (std::abs(norm - 1.0) > 1e-6)
            throw NumericalFailure("vector_assignment: transition row does not sum to 1");
        psi /= norm;
        for (int i = 0; i < n; ++i)
            if (std::abs(psi(i)) > 1e-12) {
                psi *= std::conj(psi(i)) / std::abs(psi(i));
                break;
            }
        out.vectors[fh] = std::move(psi);
    }
    return out;
}

namespace {

num::Matrix projection_assignment_direct(Engine& eng, const VectorAssignment& psi,
                                         const num::Matrix& target, int rank);

}  // namespace

num::Matrix projection_assignment(Engine& eng, const VectorAssignment& psi,
                                  ObsId projection) {
    const int n = eng.dimension();
    const num::Matrix target = eng.projector_matrix(projection);
    if (target.norm() == 0.0) return num::Matrix::Zero(n, n);
    const int rank = eng.projection_rank(projection);
    try {
        return projection_assignment_direct(eng, psi, target, rank);
    } catch (const UndecomposableProjection&) {
        // complement route: pi(E) = I - pi(1 - E) by additivity
        return num::Matrix::Identity(n, n) -
               projection_assignment_direct(
                   eng, psi, num::Matrix::Identity(n, n) - target, n - rank);
    }
}

namespace {

num::Matrix projection_assignment_direct(Engine& eng, const VectorAssignment& psi,
                                         const num::Matrix& target, int rank) {
    const int n = eng.dimension();
    if (rank == 0) {
        if (target.norm() > 1e-8)
            throw UndecomposableProjection("nonzero projection of rank 0");
        return num::Matrix::Zero(n, n);
    }

    // Candidates in deterministic order, basis handles first: they are
    // pairwise orthogonal, so greedy selection succeeds whenever the target
    // splits along covered handles at all.
    std::vector<ObsId> order = psi.basis;
    for (const auto& [handle, vec] : psi.vectors)
        if (std::find(order.begin(), order.end(), handle) == order.end())
            order.push_back(handle);

    std::vector<ObsId> chosen;
    std::vector<num::Matrix> chosen_mats;
    for (ObsId h : order) {
        if (static_cast<int>(chosen.size()) == rank) break;
        const num::Matrix hm = eng.projector_matrix(h);
        if (!projector_leq_mat(hm, target, kOrthTol)) continue;
        bool orth = true;
        for (const num::Matrix& cm : chosen_mats)
            if (std::abs((cm * hm).trace()) > kOrthTol) {
                orth = false;
                break;
            }
        if (!orth) continue;
        chosen.push_back(h);
        chosen_mats.push_back(hm);
    }
    num::Matrix sum = num::Matrix::Zero(n, n);
    for (const num::Matrix& cm : chosen_mats) sum += cm;
    if (static_cast<int>(chosen.size()) != rank || (sum - target).norm() > 1e-8)
        throw UndecomposableProjection(
            "projection does not split along covered rank-1 handles");

    num::Matrix out = num::Matrix::Zero(n, n);
    for (ObsId h : chosen) {
        const num::CVector& v = psi.vector_of(h);
        out += v * v.adjoint();
    }
    return out;
}

}  // namespace

num::Matrix observable_assignment(Engine& eng, const VectorAssignment& psi, ObsId a) {
    const auto dec = eng.spectral_decomposition(a);
    if (dec.eigenvalues.empty())
        throw MissingSpectralData("observable has an empty spectral decomposition");
    num::Matrix out = num::Matrix::Zero(eng.dimension(), eng.dimension());
    for (std::size_t k = 0; k < dec.eigenvalues.size(); ++k)
        out += dec.eigenvalues[k] * projection_assignment(eng, psi, dec.projections[k]);
    return out;
}

num::Matrix state_assignment(Engine& eng, const VectorAssignment& psi,
                             std::span<const double> weights,
                             std::span<const ObsId> pure_handles) {
    if (weights.size() != pure_handles.size())
        throw DimensionMismatch("state_assignment: weights/handles size mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < -1e-12) throw NotConvex("state_assignment: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw NotConvex("state_assignment: weights do not sum to 1");
    num::Matrix out = num::Matrix::Zero(eng.dimension(), eng.dimension());
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const num::CVector& v = psi.vector_of(pure_handles[k]);
        out += weights[k] * (v * v.adjoint());
    }
    return out;
}

const EmbeddingCheck& EmbeddingReport::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw UsageError("no such embedding check: " + name);
}

bool EmbeddingReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const EmbeddingCheck& c) { return c.pass; });
}

double EmbeddingReport::max_residual() const {
    double worst = 0.0;
    for (const auto& c : checks) worst = std::max(worst, c.residual);
    return worst;
}

namespace {

using CheckBody = std::function<void(EmbeddingCheck&)>;

void run_check(EmbeddingReport& rep, const std::string& name, double tol,
               const CheckBody& body) {
    EmbeddingCheck c;
    c.name = name;
    try {
        body(c);
        if (c.note.rfind("skipped", 0) != 0) c.pass = c.pass && c.residual <= tol;
    } catch (const Error& e) {
        c.pass = false;
        c.note = std::string("error: ") + e.what();
    }
    rep.checks.push_back(std::move(c));
}

}  // namespace

EmbeddingReport verify_embedding(Engine& eng, const TransitionTable& table,
                                 const VectorAssignment& psi,
                                 std::span<const std::vector<int>> interference_bases,
                                 std::span<const ObsId> observables, double tol) {
    EmbeddingReport rep;
    const int n = eng.dimension();
    const auto predicate = check_transition_postulate(table, interference_bases, tol);

    run_check(rep, "transition", tol, [&](EmbeddingCheck& c) {
        for (int i = 0; i < table.size(); ++i)
            for (int j = 0; j < table.size(); ++j) {
                const num::Complex inner =
                    psi.vector_of(table.projections[static_cast<std::size_t>(i)])
                        .dot(psi.vector_of(table.projections[static_cast<std::size_t>(j)]));
                c.residual = std::max(c.residual,
                                      std::abs(std::norm(inner) - table.P(i, j)));
            }
        if (!predicate.pass() && c.residual > tol)
            c.note = "postulate-violation induced";
    });

    std::vector<num::Matrix> assigned;
    for (ObsId a : observables) assigned.push_back(observable_assignment(eng, psi, a));

    run_check(rep, "functional", tol, [&](EmbeddingCheck& c) {
        for (std::size_t k = 0; k < observables.size(); ++k) {
            const auto& sigma = eng.spectrum(observables[k]).values;
            std::vector<double> square(sigma.size());
            std::transform(sigma.begin(), sigma.end(), square.begin(),
                           [](double x) { return x * x; });
            const ObsId fa = eng.apply_function(observables[k], square);
            const num::Matrix lhs = observable_assignment(eng, psi, fa);
            c.residual = std::max(c.residual,
                                  (lhs - assigned[k] * assigned[k]).norm());
        }
    });

    run_check(rep, "spectrum", tol, [&](EmbeddingCheck& c) {
        for (std::size_t k = 0; k < observables.size(); ++k) {
            const auto eig = num::hermitian_eigendecompose(assigned[k]);
            const auto& sigma = eng.spectrum(observables[k]).values;
            if (eig.eigenvalues.size() != sigma.size()) {
                c.residual = 1.0;
                c.note = "spectrum cardinality changed";
                continue;
            }
            for (std::size_t i = 0; i < sigma.size(); ++i)
                c.residual =
                    std::max(c.residual, std::abs(eig.eigenvalues[i] - sigma[i]));
        }
    });

    run_check(rep, "trace", tol, [&](EmbeddingCheck& c) {
        for (std::size_t k = 0; k < observables.size(); ++k)
            c.residual = std::max(
                c.residual,
                std::abs(assigned[k].trace().real() - eng.trace(observables[k])));
    });

    run_check(rep, "linearity", tol, [&](EmbeddingCheck& c) {
        int pairs = 0;
        for (std::size_t i = 0; i < observables.size(); ++i)
            for (std::size_t j = i + 1; j < observables.size(); ++j) {
                if (!eng.compatible(observables[i], observables[j])) continue;
                ++pairs;
                const num::Matrix sum = observable_assignment(
                    eng, psi, eng.algebra_add(observables[i], observables[j]));
                const num::Matrix prod = observable_assignment(
                    eng, psi, eng.algebra_mul(observables[i], observables[j]));
                c.residual = std::max(c.residual,
                                      (sum - (assigned[i] + assigned[j])).norm());
                c.residual = std::max(c.residual,
                                      (prod - assigned[i] * assigned[j]).norm());
            }
        if (pairs == 0) c.note = "skipped: no compatible pairs";
    });

    run_check(rep, "positivity", tol, [&](EmbeddingCheck& c) {
        for (const auto& [handle, vec] : psi.vectors) {
            const std::vector<double> w{1.0};
            const std::vector<ObsId> h{handle};
            const num::Matrix d = state_assignment(eng, psi, w, h);
            Eigen::SelfAdjointEigenSolver<num::Matrix> es(d);
            c.residual = std::max(c.residual, std::max(-es.eigenvalues().minCoeff(), 0.0));
            c.residual = std::max(c.residual, std::abs(d.trace().real() - 1.0));
        }
    });

    run_check(rep, "order", tol, [&](EmbeddingCheck& c) {
        std::vector<ObsId> projs;
        for (ObsId a : observables) {
            const auto dec = eng.spectral_decomposition(a);
            projs.insert(projs.end(), dec.projections.begin(), dec.projections.end());
        }
        int pairs = 0;
        for (std::size_t i = 0; i < projs.size(); ++i)
            for (std::size_t j = 0; j < projs.size(); ++j) {
                if (i == j || !eng.compatible(projs[i], projs[j])) continue;
                num::Matrix pe, pf;
                try {
                    pe = projection_assignment(eng, psi, projs[i]);
                    pf = projection_assignment(eng, psi, projs[j]);
                } catch (const UndecomposableProjection&) {
                    continue;
                }
                ++pairs;
                const bool leq = eng.projection_leq(projs[i], projs[j]);
                const bool leq_img = projector_leq_mat(pe, pf, kOrthTol);
                if (leq != leq_img) {
                    c.residual = 1.0;
                    c.note = "order not preserved and reflected";
                }
                // inf and sup of compatible projections
                const num::Matrix mi = eng.projector_matrix(projs[i]);
                const num::Matrix mj = eng.projector_matrix(projs[j]);
                const num::Matrix inf_src = 0.5 * (mi * mj + mj * mi);
                const ObsId inf_id = eng.register_observable(inf_src, "inf");
                const ObsId sup_id =
                    eng.register_observable(mi + mj - inf_src, "sup");
                try {
                    c.residual = std::max(
                        c.residual,
                        (projection_assignment(eng, psi, inf_id) - pe * pf).norm());
                    c.residual = std::max(
                        c.residual, (projection_assignment(eng, psi, sup_id) -
                                     (pe + pf - pe * pf))
                                        .norm());
                } catch (const UndecomposableProjection&) {
                }
            }
        if (pairs == 0) c.note = "skipped: no decomposable compatible pairs";
    });

    run_check(rep, "coherence", tol, [&](EmbeddingCheck& c) {
        for (const auto& [handle, vec] : psi.vectors) {
            const std::vector<double> w{1.0};
            const std::vector<ObsId> h{handle};
            const num::Matrix d = state_assignment(eng, psi, w, h);
            c.residual = std::max(
                c.residual, (d - projection_assignment(eng, psi, handle)).norm());
        }
        // the completely mixed state decomposes uniformly over the basis
        std::vector<double> w(psi.basis.size(), 1.0 / static_cast<double>(n));
        const num::Matrix d = state_assignment(eng, psi, w, psi.basis);
        c.residual = std::max(
            c.residual,
            (d - num::Matrix::Identity(n, n) / static_cast<double>(n)).norm());
    });

    run_check(rep, "born", tol, [&](EmbeddingCheck& c) {
        for (const auto& [handle, vec] : psi.vectors) {
            const State rho = eng.pure_state_of(handle);
            const std::vector<double> w{1.0};
            const std::vector<ObsId> h{handle};
            const num::Matrix d = state_assignment(eng, psi, w, h);
            for (std::size_t k = 0; k < observables.size(); ++k)
                c.residual = std::max(
                    c.residual, std::abs(eng.expectation(rho, observables[k]) -
                                         (d * assigned[k]).trace().real()));
        }
    });

    run_check(rep, "joint", tol, [&](EmbeddingCheck& c) {
        int pairs = 0;
        for (std::size_t i = 0; i < observables.size(); ++i)
            for (std::size_t j = 0; j < observables.size(); ++j) {
                if (i == j || !eng.compatible(observables[i], observables[j])) continue;
                ++pairs;
                const auto dec_a = eng.spectral_decomposition(observables[i]);
                const auto dec_b = eng.spectral_decomposition(observables[j]);
                for (const auto& [handle, vec] : psi.vectors) {
                    const num::Matrix rho =
                        eng.system().density(eng.pure_state_of(handle));
                    const std::vector<double> w{1.0};
                    const std::vector<ObsId> h{handle};
                    const num::Matrix d = state_assignment(eng, psi, w, h);
                    for (ObsId ea : dec_a.projections)
                        for (ObsId eb : dec_b.projections) {
                            const num::Matrix ma = eng.projector_matrix(ea);
                            const num::Matrix mb = eng.projector_matrix(eb);
                            const double lhs = (mb * (ma * rho * ma)).trace().real();
                            num::Matrix pa, pb;
                            try {
                                pa = projection_assignment(eng, psi, ea);
                                pb = projection_assignment(eng, psi, eb);
                            } catch (const UndecomposableProjection&) {
                                continue;
                            }
                            const double rhs = (d * pa * pb).trace().real();
                            c.residual = std::max(c.residual, std::abs(lhs - rhs));
                        }
                }
            }
        if (pairs == 0) c.note = "skipped: no compatible pairs";
    });

    return rep;
}

}  // namespace qf
