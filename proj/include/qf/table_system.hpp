#pragma once

// Classical table backend: observables are readouts of a finite hidden
// sample space, states are distributions over it. Updates default to Bayes
// conditioning on the readout; per-event stochastic kernels (or a global
// update-free mode) allow deliberately broken devices for the auditor.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qf/system.hpp"

namespace qf {

struct TableObservable {
    std::string name;
    SpectrumSet spectrum;
    std::vector<int> readout;  // readout[omega] = index into spectrum
};

class TableState : public StateRep {
public:
    explicit TableState(Eigen::VectorXd p) : p(std::move(p)) {}
    Eigen::VectorXd p;  // all-zero encodes the null state
};

class TableSystem : public OperationalSystem {
public:
    TableSystem(int sample_space_size, std::vector<TableObservable> observables,
                std::vector<std::pair<std::string, Eigen::VectorXd>> states,
                bool update_free = false);

    /// Post-conditioning kernel applied after the Bayes update of the given
    /// objective event; columns must be stochastic on the sample space.
    void set_update_kernel(const std::string& observable, double value,
                           Eigen::MatrixXd kernel);

    int dimension() const override { return dim_; }
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

private:
    const TableObservable& observable(const std::string& name) const;
    const Eigen::VectorXd& dist(const State& s) const;

    int omega_ = 0;
    int dim_ = 0;
    bool update_free_ = false;
    std::vector<TableObservable> observables_;
    std::map<std::string, std::size_t> obs_index_;
    std::vector<std::string> state_order_;
    std::map<std::string, Eigen::VectorXd> states_;
    std::map<std::pair<std::string, int>, Eigen::MatrixXd> kernels_;
    State mixed_;
    State null_;
};

}  // namespace qf
