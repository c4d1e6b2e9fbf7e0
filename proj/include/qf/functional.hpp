#pragma once

// The commutative part of the formalism: functional relations and the
// category of observables, cones and compatibility, conjunctions and the
// partial algebra, projections, spectral decomposition, functional calculus,
// expectations, traces and density operators.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "qf/hilbert.hpp"
#include "qf/system.hpp"

namespace qf {

using ObsId = int;

/// Arrow A -> B in the category of observables: a total value table
/// sigma(A) -> sigma(B), surjective onto sigma(B), whose pushforward
/// identity holds on the probe states.
struct FunctionalArrow {
    ObsId domain = -1;
    ObsId codomain = -1;
    std::vector<double> table;  // indexed by domain spectrum index

    double operator()(const SpectrumSet& domain_spectrum, double value) const {
        const int i = domain_spectrum.index_of(value);
        if (i < 0) throw PartialFunction("arrow applied outside domain spectrum");
        return table[static_cast<std::size_t>(i)];
    }
};

/// Common apex with one arrow to each leg.
struct Cone {
    ObsId apex = -1;
    std::vector<FunctionalArrow> arrows;  // arrows[i]: apex -> legs[i]
};

struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<int> multiplicities;
    std::vector<ObsId> projections;  // registered projection observables, one per eigenvalue
};

struct ConjunctionResult {
    ObsId observable = -1;
    FunctionalArrow to_first;   // theta_A
    FunctionalArrow to_second;  // theta_B
    /// Supported outcome pairs (indices into the factor spectra), in the
    /// order their labels appear in the conjunction spectrum.
    std::vector<std::pair<int, int>> support;
};

struct DensityDecomposition {
    bool is_density = false;
    std::vector<double> weights;
    std::vector<num::CVector> directions;  // n pairwise orthogonal unit vectors
};

/// Growable observable registry layered over a Hilbert backend, with probe
/// states used for operational equality and pushforward verification.
/// Registration is single-writer; queries are pure.
class Engine {
public:
    explicit Engine(std::shared_ptr<const HilbertSystem> sys, std::uint64_t seed = 7,
                    int random_probe_count = 24);

    const HilbertSystem& system() const { return *sys_; }
    int dimension() const { return sys_->dimension(); }
    std::span<const State> probes() const { return probes_; }
    std::mt19937_64& rng() { return rng_; }

    int observable_count() const { return static_cast<int>(registry_.size()); }
    ObsId id_of(const std::string& name) const;
    const HermitianObservable& obs(ObsId id) const;
    const SpectrumSet& spectrum(ObsId id) const { return obs(id).spectrum(); }

    /// Registers a Hermitian matrix as an observable, deduplicating by
    /// statistical equivalence of full distributions on the probe set.
    ObsId register_observable(const num::Matrix& m, const std::string& name_hint);

    ObsId unit() const { return unit_; }
    ObsId zero() const { return zero_; }

    bool compatible(ObsId a, ObsId b) const;

    std::optional<FunctionalArrow> find_functional_relation(ObsId a, ObsId b) const;

    /// f given as a value table indexed by sigma(A); registers f(A).
    ObsId apply_function(ObsId a, std::span<const double> table);

    /// Nondegenerate apex from simultaneous diagonalization of a pairwise
    /// commuting family; nullopt when the family does not pairwise commute.
    std::optional<Cone> find_cone(std::span<const ObsId> legs);

    /// Binary conjunction of compatible observables. The default pairing
    /// labels sigma(A) x sigma(B) lexicographically with consecutive
    /// integers 0,1,2,...; a custom injective pairing may be supplied as a
    /// row-major table over sigma(A) x sigma(B).
    ConjunctionResult conjunction(ObsId a, ObsId b,
                                  std::span<const double> pairing = {});

    /// Universal-property check over `samples` random cones for (a, b):
    /// the mediating arrow into the conjunction exists, is unique, and
    /// commutes with the projection arrows. Returns the worst residual.
    double conjunction_universal_residual(ObsId a, ObsId b, const ConjunctionResult& conj,
                                          int samples = 8);

    ObsId algebra_add(ObsId a, ObsId b);
    ObsId algebra_mul(ObsId a, ObsId b);
    ObsId algebra_scale(double c, ObsId a);

    SpectralDecomposition spectral_decomposition(ObsId a);

    bool is_projection(ObsId a) const;
    /// chi_{1}(E) as a matrix (zero matrix for the zero projection).
    num::Matrix projector_matrix(ObsId projection) const;
    int projection_rank(ObsId projection) const;

    bool projection_leq(ObsId e, ObsId f) const;
    bool orthogonal(ObsId e, ObsId f) const;

    double trace(ObsId a) const;
    double expectation(const State& rho, ObsId a) const;
    DensityDecomposition density_decomposition(ObsId a) const;

    /// Pure state obtained by updating the completely mixed state with a
    /// rank-1 projection event.
    State pure_state_of(ObsId rank1_projection) const;

    /// Outcome-index tuples of a pairwise commuting family whose joint
    /// projector is nonzero, in joint-eigenbasis order (duplicates removed).
    std::vector<std::vector<int>> joint_support(std::span<const ObsId> family) const;

    struct JointBasis {
        num::Matrix columns;                  // orthonormal, one per dimension
        std::vector<std::vector<int>> labels; // per column: spectrum index per family member
    };
    JointBasis joint_eigenbasis(std::span<const ObsId> family) const;

private:
    double event_prob(const State& rho, ObsId a, double value) const;
    bool statistically_equal(ObsId a, const num::Matrix& m,
                             const num::EigenSystem& eig) const;

    std::shared_ptr<const HilbertSystem> sys_;
    std::vector<HermitianObservable> registry_;
    std::map<std::string, ObsId> names_;
    std::vector<State> probes_;
    std::mt19937_64 rng_;
    ObsId unit_ = -1;
    ObsId zero_ = -1;
};

/// Orthonormal basis of the range of a projector matrix.
std::vector<num::CVector> orthonormal_range(const num::Matrix& projector, double tol = 1e-8);

// Generic (backend-agnostic) routes used by the auditor on table systems.

/// Candidate value table for B = f(A) built from eigenstate preparations and
/// verified by the pushforward identity on the probes.
std::optional<std::vector<double>> generic_functional_relation(
    const OperationalSystem& sys, const std::string& a, const std::string& b,
    std::span<const State> probes, double tol = 1e-10);

/// Registry search for a common apex: a registered observable with arrows to
/// both legs.
std::optional<std::string> generic_cone_apex(const OperationalSystem& sys,
                                             const std::string& a, const std::string& b,
                                             std::span<const State> probes,
                                             double tol = 1e-10);

/// Bayes rule on objective pairs over all probes.
bool bayes_rule_holds(const OperationalSystem& sys, const std::string& a,
                      const std::string& b, std::span<const State> probes,
                      double tol = 1e-10, double* worst = nullptr);

}  // namespace qf
