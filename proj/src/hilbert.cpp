#include "qf/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace qf {

HermitianObservable::HermitianObservable(std::string name, num::Matrix matrix)
    : name_(std::move(name)), matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols())
        throw DimensionMismatch("observable " + name_ + ": matrix not square");
    if (!num::is_hermitian(matrix_))
        throw NotHermitian("observable " + name_ + ": matrix not Hermitian");
}

const num::EigenSystem& HermitianObservable::eig() const {
    if (!eig_)
        eig_ = std::make_shared<const num::EigenSystem>(num::hermitian_eigendecompose(matrix_));
    return *eig_;
}

const SpectrumSet& HermitianObservable::spectrum() const {
    if (!spectrum_) spectrum_ = std::make_shared<const SpectrumSet>(eig().eigenvalues);
    return *spectrum_;
}

bool is_density_matrix(const num::Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    if (!num::is_hermitian(m, tol)) return false;
    if (std::abs(m.trace().real() - 1.0) > tol) return false;
    const auto eig = num::hermitian_eigendecompose((m + m.adjoint()) / 2.0);
    return eig.eigenvalues.front() >= -tol;
}

num::Matrix pure_state_matrix(const num::CVector& psi) {
    const num::CVector unit = psi / psi.norm();
    return unit * unit.adjoint();
}

HilbertSystem::HilbertSystem(int n, std::vector<HermitianObservable> observables,
                             std::vector<std::pair<std::string, num::Matrix>> states)
    : n_(n), observables_(std::move(observables)) {
    if (n_ <= 0) throw DimensionMismatch("dimension must be positive");
    bool has_nondegenerate = false;
    for (std::size_t i = 0; i < observables_.size(); ++i) {
        const auto& obs = observables_[i];
        if (obs.matrix().rows() != n_)
            throw DimensionMismatch("observable " + obs.name() + ": wrong dimension");
        if (obs_index_.count(obs.name()))
            throw SchemaError("duplicate observable name: " + obs.name());
        obs_index_[obs.name()] = i;
        if (obs.spectrum().size() == n_) has_nondegenerate = true;
    }
    if (!has_nondegenerate)
        throw NoNondegenerateObservable("no observable with " + std::to_string(n_) +
                                        " distinct eigenvalues");

    for (auto& [name, rho] : states) {
        if (rho.rows() != n_ || rho.cols() != n_)
            throw DimensionMismatch("state " + name + ": wrong dimension");
        if (!is_density_matrix(rho)) throw NotDensity("state " + name + ": not a density matrix");
        if (states_.count(name)) throw SchemaError("duplicate state name: " + name);
        state_order_.push_back(name);
        states_.emplace(name, std::move(rho));
    }
    mixed_ = std::make_shared<HilbertState>(num::Matrix::Identity(n_, n_) / double(n_));
    null_ = std::make_shared<HilbertState>(num::Matrix::Zero(n_, n_));
}

std::vector<std::string> HilbertSystem::observable_names() const {
    std::vector<std::string> names;
    for (const auto& o : observables_) names.push_back(o.name());
    return names;
}

const HermitianObservable& HilbertSystem::observable(const std::string& name) const {
    auto it = obs_index_.find(name);
    if (it == obs_index_.end()) throw UnknownObservable("unknown observable: " + name);
    return observables_[it->second];
}

const SpectrumSet& HilbertSystem::spectrum(const std::string& name) const {
    return observable(name).spectrum();
}

std::vector<std::string> HilbertSystem::state_names() const { return state_order_; }

State HilbertSystem::state(const std::string& name) const {
    if (name == "mixed") return mixed_;
    if (name == "null") return null_;
    auto it = states_.find(name);
    if (it == states_.end()) throw UnknownState("unknown state: " + name);
    return std::make_shared<HilbertState>(it->second);
}

State HilbertSystem::mixed_state() const { return mixed_; }
State HilbertSystem::null_state() const { return null_; }

bool HilbertSystem::is_null(const State& s) const { return density(s).norm() < kProbFloor; }

const num::Matrix& HilbertSystem::density(const State& s) const {
    const auto* hs = dynamic_cast<const HilbertState*>(s.get());
    if (!hs) throw UnknownState("state does not belong to a Hilbert backend");
    return hs->rho;
}

State HilbertSystem::make_state(num::Matrix rho) const {
    if (rho.rows() != n_ || rho.cols() != n_)
        throw DimensionMismatch("make_state: wrong dimension");
    if (rho.norm() > 0.0 && !is_density_matrix(rho))
        throw NotDensity("make_state: not a density matrix");
    return std::make_shared<HilbertState>(std::move(rho));
}

DistributionTable HilbertSystem::born_distribution(const num::Matrix& rho,
                                                   const HermitianObservable& obs) const {
    if (rho.rows() != n_ || obs.matrix().rows() != n_)
        throw DimensionMismatch("born_distribution: shape mismatch");
    const auto& eig = obs.eig();
    DistributionTable table = DistributionTable::zeros({obs.spectrum()});
    if (rho.norm() < kProbFloor) return table;  // null measure
    double total = 0.0;
    for (int i = 0; i < eig.size(); ++i) {
        double p = (rho * eig.projectors[static_cast<std::size_t>(i)]).trace().real();
        p = std::clamp(p, 0.0, 1.0);
        table.probabilities[static_cast<std::size_t>(i)] = p;
        total += p;
    }
    const double drift = std::abs(total - 1.0);
    if (drift > 0.0 && drift <= 1e-10)
        for (double& p : table.probabilities) p /= total;
    return table;
}

num::Matrix HilbertSystem::luders_update(const num::Matrix& rho, const EventSpec& event) const {
    const auto& eig = observable(event.observable).eig();
    num::Matrix updated = num::Matrix::Zero(n_, n_);
    num::Matrix event_proj = num::Matrix::Zero(n_, n_);
    for (double v : event.subset) {
        const num::Matrix& proj = eig.projector_of(v);
        updated += proj * rho * proj;
        event_proj += proj;
    }
    const double p = (rho * event_proj).trace().real();
    if (p <= kProbFloor) return num::Matrix::Zero(n_, n_);
    return updated / p;
}

DistributionTable HilbertSystem::distribution(const State& s, const std::string& name) const {
    return born_distribution(density(s), observable(name));
}

State HilbertSystem::objective_update(const State& s, const std::string& name,
                                      double value) const {
    return std::make_shared<HilbertState>(luders_update(density(s), EventSpec{name, {value}}));
}

State HilbertSystem::mix(std::span<const double> weights, std::span<const State> states) const {
    num::Matrix rho = num::Matrix::Zero(n_, n_);
    for (std::size_t i = 0; i < states.size(); ++i) rho += weights[i] * density(states[i]);
    return std::make_shared<HilbertState>(std::move(rho));
}

}  // namespace qf
