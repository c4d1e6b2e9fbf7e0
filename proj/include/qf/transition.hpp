#pragma once

// Transition probabilities between pure states, the symmetry/interference
// checks on transition tables, and the constructive embedding into matrices:
// vector, projection, observable and state assignments plus the full
// verification report.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qf/functional.hpp"

namespace qf {

/// P[i][j] = probability of transitioning from projections[i] to
/// projections[j], measured as the expectation of the target projection in
/// the pure state of the source.
struct TransitionTable {
    int dimension = 0;
    std::vector<ObsId> projections;
    Eigen::MatrixXd P;

    int size() const { return static_cast<int>(projections.size()); }
    int index_of(ObsId handle) const;
};

TransitionTable transition_table(Engine& eng, std::span<const ObsId> rank1);

struct TransitionCheckReport {
    double symmetry_worst = 0.0;
    int symmetry_i = -1, symmetry_j = -1;
    bool symmetry_pass = true;

    struct InterferenceEntry {
        int basis = -1;
        int from = -1, to = -1;
        double observed = 0.0;   // (sum_i sqrt(P(E->G_i) P(G_i->F)))^2
        double expected = 0.0;   // P(E->F)
        double residual = 0.0;
        bool pass = true;
    };
    std::vector<InterferenceEntry> interference;  // worst entry per basis
    bool interference_pass = true;

    bool pass() const { return symmetry_pass && interference_pass; }
};

/// Bases are given as index families into table.projections; each must have
/// exactly `dimension` pairwise orthogonal members (orthogonality read off
/// the table itself: P[i][j] = 0 for rank-1 projections iff orthogonal).
TransitionCheckReport check_transition_postulate(
    const TransitionTable& table, std::span<const std::vector<int>> bases, double tol);

/// Phases of the embedding; handles absent from the map carry phase 0.
struct PhaseFunction {
    std::map<ObsId, double> theta;
    double at(ObsId handle) const {
        auto it = theta.find(handle);
        return it == theta.end() ? 0.0 : it->second;
    }
};

struct VectorAssignment {
    std::vector<ObsId> basis;            // n pairwise orthogonal rank-1 handles
    std::map<ObsId, num::CVector> vectors;

    const num::CVector& vector_of(ObsId handle) const;
};

/// psi_F component i = sqrt(P(F -> E_i)) * exp(i (theta_{E_i} - theta_F)),
/// then normalized to make the first nonzero component real nonnegative.
VectorAssignment vector_assignment(const TransitionTable& table,
                                   std::span<const ObsId> basis_handles,
                                   const PhaseFunction& theta);

/// pi(E) = sum of outer products of the psi's of E's rank-1 decomposition
/// into covered handles.
num::Matrix projection_assignment(Engine& eng, const VectorAssignment& psi,
                                  ObsId projection);

/// pi(A) = sum of alpha * pi(E_alpha) over the spectral decomposition.
num::Matrix observable_assignment(Engine& eng, const VectorAssignment& psi, ObsId a);

/// D = sum of a_i * pi(E_i) for an explicit convex decomposition into pure
/// states given by covered rank-1 handles.
num::Matrix state_assignment(Engine& eng, const VectorAssignment& psi,
                             std::span<const double> weights,
                             std::span<const ObsId> pure_handles);

struct EmbeddingCheck {
    std::string name;
    double residual = 0.0;
    bool pass = true;
    std::string note;
};

struct EmbeddingReport {
    std::vector<EmbeddingCheck> checks;

    const EmbeddingCheck& check(const std::string& name) const;
    bool all_pass() const;
    double max_residual() const;
};

/// Runs the full verification battery: the transition-consistency lemma,
/// items (a) functional relations, (b) spectra, (c) traces, (d) partial
/// linearity and multiplicativity, (e) positivity/density, (f) the
/// projection order with sups and infs, (g) density-state coherence,
/// (h) the Born rule, and the joint-measurement identity. Failures are
/// report entries, never exceptions; when the interference predicate fails
/// on the supplied bases the transition check is annotated as induced by
/// that violation.
EmbeddingReport verify_embedding(Engine& eng, const TransitionTable& table,
                                 const VectorAssignment& psi,
                                 std::span<const std::vector<int>> interference_bases,
                                 std::span<const ObsId> observables, double tol);

}  // namespace qf
