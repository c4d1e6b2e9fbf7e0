#include "qf/table_system.hpp"

#include <algorithm>
#include <cmath>

namespace qf {

TableSystem::TableSystem(int sample_space_size, std::vector<TableObservable> observables,
                         std::vector<std::pair<std::string, Eigen::VectorXd>> states,
                         bool update_free)
    : omega_(sample_space_size), update_free_(update_free),
      observables_(std::move(observables)) {
    if (omega_ <= 0) throw DimensionMismatch("sample space must be nonempty");
    for (std::size_t i = 0; i < observables_.size(); ++i) {
        const auto& obs = observables_[i];
        if (static_cast<int>(obs.readout.size()) != omega_)
            throw DimensionMismatch("observable " + obs.name + ": readout size mismatch");
        for (int r : obs.readout)
            if (r < 0 || r >= obs.spectrum.size())
                throw SchemaError("observable " + obs.name + ": readout outside spectrum");
        if (obs_index_.count(obs.name))
            throw SchemaError("duplicate observable name: " + obs.name);
        obs_index_[obs.name] = i;
        dim_ = std::max(dim_, obs.spectrum.size());
    }
    if (observables_.empty()) throw SchemaError("table system needs at least one observable");

    for (auto& [name, p] : states) {
        if (static_cast<int>(p.size()) != omega_)
            throw DimensionMismatch("state " + name + ": wrong size");
        if (p.minCoeff() < -1e-12 || std::abs(p.sum() - 1.0) > 1e-10)
            throw NotDensity("state " + name + ": not a distribution");
        if (states_.count(name)) throw SchemaError("duplicate state name: " + name);
        state_order_.push_back(name);
        states_.emplace(name, std::move(p));
    }
    mixed_ = std::make_shared<TableState>(
        Eigen::VectorXd::Constant(omega_, 1.0 / static_cast<double>(omega_)));
    null_ = std::make_shared<TableState>(Eigen::VectorXd::Zero(omega_));
}

void TableSystem::set_update_kernel(const std::string& name, double value,
                                    Eigen::MatrixXd kernel) {
    const auto& obs = observable(name);
    const int vi = obs.spectrum.index_of(value);
    if (vi < 0) throw UnknownObservable("kernel value outside spectrum of " + name);
    if (kernel.rows() != omega_ || kernel.cols() != omega_)
        throw DimensionMismatch("kernel shape mismatch");
    kernels_[{name, vi}] = std::move(kernel);
}

std::vector<std::string> TableSystem::observable_names() const {
    std::vector<std::string> names;
    for (const auto& o : observables_) names.push_back(o.name);
    return names;
}

const TableObservable& TableSystem::observable(const std::string& name) const {
    auto it = obs_index_.find(name);
    if (it == obs_index_.end()) throw UnknownObservable("unknown observable: " + name);
    return observables_[it->second];
}

const SpectrumSet& TableSystem::spectrum(const std::string& name) const {
    return observable(name).spectrum;
}

std::vector<std::string> TableSystem::state_names() const { return state_order_; }

State TableSystem::state(const std::string& name) const {
    if (name == "mixed") return mixed_;
    if (name == "null") return null_;
    auto it = states_.find(name);
    if (it == states_.end()) throw UnknownState("unknown state: " + name);
    return std::make_shared<TableState>(it->second);
}

State TableSystem::mixed_state() const { return mixed_; }
State TableSystem::null_state() const { return null_; }

bool TableSystem::is_null(const State& s) const { return dist(s).sum() < kProbFloor; }

const Eigen::VectorXd& TableSystem::dist(const State& s) const {
    const auto* ts = dynamic_cast<const TableState*>(s.get());
    if (!ts) throw UnknownState("state does not belong to a table backend");
    return ts->p;
}

DistributionTable TableSystem::distribution(const State& s, const std::string& name) const {
    const auto& obs = observable(name);
    const Eigen::VectorXd& p = dist(s);
    DistributionTable table = DistributionTable::zeros({obs.spectrum});
    for (int w = 0; w < omega_; ++w)
        table.probabilities[static_cast<std::size_t>(obs.readout[static_cast<std::size_t>(w)])] +=
            p(w);
    return table;
}

State TableSystem::objective_update(const State& s, const std::string& name,
                                    double value) const {
    const auto& obs = observable(name);
    const int vi = obs.spectrum.index_of(value);
    if (vi < 0) throw UnknownObservable("event value outside spectrum of " + name);
    const Eigen::VectorXd& p = dist(s);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(omega_);
    for (int w = 0; w < omega_; ++w)
        if (obs.readout[static_cast<std::size_t>(w)] == vi) q(w) = p(w);
    const double total = q.sum();
    if (total <= kProbFloor) return null_;
    if (update_free_) return std::make_shared<TableState>(p);
    q /= total;
    auto it = kernels_.find({name, vi});
    if (it != kernels_.end()) q = it->second * q;
    return std::make_shared<TableState>(std::move(q));
}

State TableSystem::mix(std::span<const double> weights, std::span<const State> states) const {
    Eigen::VectorXd q = Eigen::VectorXd::Zero(omega_);
    for (std::size_t i = 0; i < states.size(); ++i) q += weights[i] * dist(states[i]);
    return std::make_shared<TableState>(std::move(q));
}

}  // namespace qf
