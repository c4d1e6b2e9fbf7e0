#pragma once

// Five deliberately broken systems, one per auditable defect. Each is
// scoped (registry, states, kernels) so that exactly one postulate check
// fails and every other one passes or is skipped.

#include <memory>

#include "fixtures.hpp"
#include "qf/hilbert.hpp"
#include "qf/table_system.hpp"

namespace qf::mutants {

/// P2 target: objective updates do nothing, so repeatability breaks. The
/// registry is pairwise incompatible and hides every cone-dependent check
/// behind the unavailable preparations.
class NoUpdateSystem : public HilbertSystem {
public:
    NoUpdateSystem()
        : HilbertSystem(2,
                        [] {
                            std::vector<HermitianObservable> obs;
                            obs.emplace_back("sz", fixtures::pauli_z());
                            obs.emplace_back("sx", fixtures::pauli_x());
                            obs.emplace_back("sy", fixtures::pauli_y());
                            return obs;
                        }(),
                        {{"zero", pure_state_matrix(fixtures::ket({1, 0}))},
                         {"plus", pure_state_matrix(fixtures::ket({1, 1}))}}) {}

    State objective_update(const State& s, const std::string&, double) const override {
        return s;
    }
};

/// P3 target: the distinguished "completely mixed" state is not uniform on
/// nondegenerate observables. Updates and distributions stay honest.
class SkewedMixedSystem : public HilbertSystem {
public:
    SkewedMixedSystem()
        : HilbertSystem(2,
                        [] {
                            std::vector<HermitianObservable> obs;
                            obs.emplace_back("sz", fixtures::pauli_z());
                            obs.emplace_back("sx", fixtures::pauli_x());
                            return obs;
                        }(),
                        {{"zero", pure_state_matrix(fixtures::ket({1, 0}))}}) {
        num::Matrix skew(2, 2);
        skew << 0.7, 0, 0, 0.3;
        skewed_ = HilbertSystem::make_state(skew);
    }

    State mixed_state() const override { return skewed_; }

private:
    State skewed_;
};

/// P4 target: a classical device whose measurement of A erases the second
/// bit afterwards. Outcome statistics of single measurements are untouched,
/// but sequential measures stop being pushforwards of the full readout.
inline std::shared_ptr<TableSystem> signaling_table_system() {
    // omega = 2a + b over two bits
    std::vector<TableObservable> obs;
    obs.push_back({"joint", SpectrumSet({0, 1, 2, 3}), {0, 1, 2, 3}});
    obs.push_back({"bita", SpectrumSet({0, 1}), {0, 0, 1, 1}});
    obs.push_back({"bitb", SpectrumSet({0, 1}), {0, 1, 0, 1}});
    Eigen::VectorXd skew(4);
    skew << 0.5, 0.1, 0.3, 0.1;
    auto sys = std::make_shared<TableSystem>(
        4, std::move(obs),
        std::vector<std::pair<std::string, Eigen::VectorXd>>{{"skew", skew}});
    Eigen::MatrixXd erase = Eigen::MatrixXd::Zero(4, 4);  // (a,b) -> (a,0)
    erase(0, 0) = erase(0, 1) = 1.0;
    erase(2, 2) = erase(2, 3) = 1.0;
    sys->set_update_kernel("bita", 0.0, erase);
    sys->set_update_kernel("bita", 1.0, erase);
    return sys;
}

/// P5 target: two independent bits whose readouts satisfy the Bayes rule on
/// every probe, with no common refinement anywhere in the registry.
inline std::shared_ptr<TableSystem> no_cone_table_system() {
    std::vector<TableObservable> obs;
    obs.push_back({"bita", SpectrumSet({0, 1}), {0, 0, 1, 1}});
    obs.push_back({"bitb", SpectrumSet({0, 1}), {0, 1, 0, 1}});
    Eigen::VectorXd skew(4);
    skew << 0.5, 0.1, 0.3, 0.1;
    return std::make_shared<TableSystem>(
        4, std::move(obs),
        std::vector<std::pair<std::string, Eigen::VectorXd>>{{"skew", skew}});
}

/// P8 target: honest Lueders update followed by dephasing in the standard
/// basis. Every registered observable is diagonal, so all statistics and
/// sequential measures are untouched; only purity dies, on a superposition
/// inside the degenerate eigenspace.
class DephasingSystem : public HilbertSystem {
public:
    DephasingSystem()
        : HilbertSystem(3,
                        [] {
                            std::vector<HermitianObservable> obs;
                            num::Matrix c(3, 3), a(3, 3);
                            c.setZero();
                            c(1, 1) = 1;
                            c(2, 2) = 2;
                            a.setZero();
                            a(0, 0) = 1;
                            a(1, 1) = 1;
                            a(2, 2) = 2;
                            std::vector<HermitianObservable> out;
                            out.emplace_back("fine", c);
                            out.emplace_back("coarse", a);
                            return out;
                        }(),
                        {{"super", pure_state_matrix(fixtures::ket({1, 1, 0}))}}) {}

    State objective_update(const State& s, const std::string& observable,
                           double value) const override {
        const State honest = HilbertSystem::objective_update(s, observable, value);
        if (is_null(honest)) return honest;
        num::Matrix d = density(honest);
        for (int i = 0; i < d.rows(); ++i)
            for (int j = 0; j < d.cols(); ++j)
                if (i != j) d(i, j) = 0.0;
        return make_state(std::move(d));
    }
};

}  // namespace qf::mutants
