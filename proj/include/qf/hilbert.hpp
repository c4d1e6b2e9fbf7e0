#pragma once

// Reference backend: observables are Hermitian matrices, states are density
// matrices, P is the Born rule and T the Lueders update. This system is the
// oracle the rest of the toolkit is validated against.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qf/numkernel.hpp"
#include "qf/system.hpp"

namespace qf {

inline constexpr double kDensityTol = 1e-10;

/// Named Hermitian matrix with its clustered eigensystem computed lazily.
class HermitianObservable {
public:
    HermitianObservable() = default;
    HermitianObservable(std::string name, num::Matrix matrix);

    const std::string& name() const { return name_; }
    const num::Matrix& matrix() const { return matrix_; }
    const num::EigenSystem& eig() const;
    const SpectrumSet& spectrum() const;

private:
    std::string name_;
    num::Matrix matrix_;
    mutable std::shared_ptr<const num::EigenSystem> eig_;
    mutable std::shared_ptr<const SpectrumSet> spectrum_;
};

/// Density matrix check: Hermitian, eigenvalues >= -tol, trace 1 within tol.
bool is_density_matrix(const num::Matrix& m, double tol = kDensityTol);

num::Matrix pure_state_matrix(const num::CVector& psi);

class HilbertState : public StateRep {
public:
    explicit HilbertState(num::Matrix rho) : rho(std::move(rho)) {}
    num::Matrix rho;  // zero matrix encodes the null state
};

class HilbertSystem : public OperationalSystem {
public:
    /// Validates shapes, Hermiticity, density conditions and the presence of
    /// at least one nondegenerate observable; installs the completely mixed
    /// state I/n and the null state.
    HilbertSystem(int n, std::vector<HermitianObservable> observables,
                  std::vector<std::pair<std::string, num::Matrix>> states);
    ~HilbertSystem() override = default;

    int dimension() const override { return n_; }
    std::vector<std::string> observable_names() const override;
    const SpectrumSet& spectrum(const std::string& observable) const override;
    std::vector<std::string> state_names() const override;
    State state(const std::string& name) const override;
    State mixed_state() const override;
    State null_state() const override;
    bool is_null(const State& s) const override;
    DistributionTable distribution(const State& s,
                                   const std::string& observable) const override;
    State objective_update(const State& s, const std::string& observable,
                           double value) const override;
    State mix(std::span<const double> weights, std::span<const State> states) const override;

    const HermitianObservable& observable(const std::string& name) const;
    const num::Matrix& density(const State& s) const;
    State make_state(num::Matrix rho) const;

    /// Born distribution p(alpha) = tr(rho E_alpha), clipped to [0,1] and
    /// renormalized when the drift is positive but <= 1e-10.
    DistributionTable born_distribution(const num::Matrix& rho,
                                        const HermitianObservable& obs) const;

    /// Sum over Delta of E rho E / tr(rho E_Delta); the null state when the
    /// event probability falls below the floor.
    num::Matrix luders_update(const num::Matrix& rho, const EventSpec& event) const;

protected:
    int n_ = 0;
    std::vector<HermitianObservable> observables_;
    std::map<std::string, std::size_t> obs_index_;
    std::vector<std::string> state_order_;
    std::map<std::string, num::Matrix> states_;
    State mixed_;
    State null_;
};

}  // namespace qf
