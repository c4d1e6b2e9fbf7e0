#include "qf/functional.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace qf {

namespace {

constexpr double kAlgebraTol = 1e-9;
constexpr double kStatTol = 1e-10;

num::Matrix random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    num::Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = num::Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<num::Matrix> qr(g);
    num::Matrix q = qr.householderQ();
    return q;
}

num::CVector random_unit_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    num::CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = num::Complex(gauss(rng), gauss(rng));
    return v / v.norm();
}

}  // namespace

std::vector<num::CVector> orthonormal_range(const num::Matrix& projector, double tol) {
    Eigen::SelfAdjointEigenSolver<num::Matrix> solver(projector);
    std::vector<num::CVector> range;
    for (int i = 0; i < projector.rows(); ++i)
        if (solver.eigenvalues()(i) > 1.0 - tol) range.push_back(solver.eigenvectors().col(i));
    return range;
}

Engine::Engine(std::shared_ptr<const HilbertSystem> sys, std::uint64_t seed,
               int random_probe_count)
    : sys_(std::move(sys)), rng_(seed) {
    const int n = sys_->dimension();
    for (const auto& name : sys_->observable_names()) {
        registry_.push_back(sys_->observable(name));
        names_[name] = static_cast<ObsId>(registry_.size()) - 1;
    }

    probes_.push_back(sys_->mixed_state());
    for (const auto& name : sys_->state_names()) probes_.push_back(sys_->state(name));
    const std::size_t declared = probes_.size();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < random_probe_count; ++k) {
        // alternate random convex mixtures of the declared registry and
        // random pure states (reachable as rank-1 updates of the mixed state)
        if (k % 2 == 0 && declared > 1) {
            std::vector<double> w(declared);
            double total = 0.0;
            for (auto& x : w) total += (x = unif(rng_));
            for (auto& x : w) x /= total;
            probes_.push_back(sys_->mix(w, std::span<const State>(probes_.data(), declared)));
        } else {
            probes_.push_back(sys_->make_state(pure_state_matrix(random_unit_vector(n, rng_))));
        }
    }
    // separating set for dedup: n*n extra pure probes
    for (int k = 0; k < n * n; ++k)
        probes_.push_back(sys_->make_state(pure_state_matrix(random_unit_vector(n, rng_))));

    unit_ = register_observable(num::Matrix::Identity(n, n), "unit");
    zero_ = register_observable(num::Matrix::Zero(n, n), "zero");
}

ObsId Engine::id_of(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) throw UnknownObservable("unknown observable: " + name);
    return it->second;
}

const HermitianObservable& Engine::obs(ObsId id) const {
    if (id < 0 || id >= observable_count())
        throw UnknownObservable("observable id out of range");
    return registry_[static_cast<std::size_t>(id)];
}

double Engine::event_prob(const State& rho, ObsId a, double value) const {
    const auto& eig = obs(a).eig();
    const int i = eig.index_of(value);
    double p = (sys_->density(rho) * eig.projectors[static_cast<std::size_t>(i)]).trace().real();
    return std::clamp(p, 0.0, 1.0);
}

bool Engine::statistically_equal(ObsId a, const num::Matrix& m,
                                 const num::EigenSystem& eig) const {
    const auto& sa = spectrum(a);
    if (sa.size() != eig.size()) return false;
    for (int i = 0; i < sa.size(); ++i)
        if (std::abs(sa.values[static_cast<std::size_t>(i)] -
                     eig.eigenvalues[static_cast<std::size_t>(i)]) > 1e-9)
            return false;
    for (const auto& rho : probes_) {
        const num::Matrix& d = sys_->density(rho);
        for (int i = 0; i < eig.size(); ++i) {
            const double p = (d * eig.projectors[static_cast<std::size_t>(i)]).trace().real();
            const double q =
                event_prob(rho, a, sa.values[static_cast<std::size_t>(i)]);
            if (std::abs(p - q) > kStatTol) return false;
        }
    }
    return true;
}

ObsId Engine::register_observable(const num::Matrix& m, const std::string& name_hint) {
    if (m.rows() != dimension() || m.cols() != dimension())
        throw DimensionMismatch("register_observable: wrong dimension");
    const num::Matrix sym = (m + m.adjoint()) / 2.0;
    if ((m - sym).norm() > 1e-8 * (1.0 + m.norm()))
        throw NotHermitian("register_observable: matrix not Hermitian");
    const auto eig = num::hermitian_eigendecompose(sym);
    // Postulate-0 equality is operational: dedup by statistical equivalence
    // of full distributions on the probe set.
    for (ObsId id = 0; id < observable_count(); ++id)
        if (statistically_equal(id, sym, eig)) return id;
    std::string name = name_hint;
    for (int k = 2; names_.count(name); ++k) {
        std::ostringstream os;
        os << name_hint << "#" << k;
        name = os.str();
    }
    registry_.emplace_back(name, sym);
    names_[name] = static_cast<ObsId>(registry_.size()) - 1;
    return static_cast<ObsId>(registry_.size()) - 1;
}

bool Engine::compatible(ObsId a, ObsId b) const {
    const num::Matrix& ma = obs(a).matrix();
    const num::Matrix& mb = obs(b).matrix();
    const double scale = 1.0 + ma.norm() * mb.norm();
    return (ma * mb - mb * ma).norm() <= 1e-9 * scale;
}

std::optional<FunctionalArrow> Engine::find_functional_relation(ObsId a, ObsId b) const {
    const auto& sa = spectrum(a);
    const auto& sb = spectrum(b);
    const auto& eig_a = obs(a).eig();
    FunctionalArrow arrow{a, b, {}};
    std::set<int> hit;
    for (int i = 0; i < sa.size(); ++i) {
        // projective eigenstate preparation for sigma(A) value i
        const num::Matrix& proj = eig_a.projectors[static_cast<std::size_t>(i)];
        const num::Matrix prep = proj / proj.trace().real();
        const DistributionTable dist =
            sys_->born_distribution(prep, obs(b));
        int arg = -1;
        for (int j = 0; j < sb.size(); ++j)
            if (dist.probabilities[static_cast<std::size_t>(j)] >= 1.0 - 1e-10) arg = j;
        if (arg < 0) return std::nullopt;
        arrow.table.push_back(sb.values[static_cast<std::size_t>(arg)]);
        hit.insert(arg);
    }
    if (static_cast<int>(hit.size()) != sb.size()) return std::nullopt;  // not surjective
    // pushforward identity on all probes
    for (const auto& rho : probes_) {
        for (int j = 0; j < sb.size(); ++j) {
            double pushed = 0.0;
            for (int i = 0; i < sa.size(); ++i)
                if (std::abs(arrow.table[static_cast<std::size_t>(i)] -
                             sb.values[static_cast<std::size_t>(j)]) <= 1e-9)
                    pushed += event_prob(rho, a, sa.values[static_cast<std::size_t>(i)]);
            if (std::abs(pushed - event_prob(rho, b, sb.values[static_cast<std::size_t>(j)])) >
                kStatTol)
                return std::nullopt;
        }
    }
    return arrow;
}

ObsId Engine::apply_function(ObsId a, std::span<const double> table) {
    const auto& sa = spectrum(a);
    if (static_cast<int>(table.size()) != sa.size())
        throw PartialFunction("apply_function: value table does not cover the spectrum");
    const auto& eig = obs(a).eig();
    num::Matrix m = num::Matrix::Zero(dimension(), dimension());
    for (int i = 0; i < sa.size(); ++i)
        m += table[static_cast<std::size_t>(i)] * eig.projectors[static_cast<std::size_t>(i)];
    return register_observable(m, "f(" + obs(a).name() + ")");
}

Engine::JointBasis Engine::joint_eigenbasis(std::span<const ObsId> family) const {
    const int n = dimension();
    struct Block {
        num::Matrix isometry;
        std::vector<int> label;
    };
    std::vector<Block> blocks{{num::Matrix::Identity(n, n), {}}};
    for (ObsId id : family) {
        const num::Matrix& m = obs(id).matrix();
        const auto& spec = spectrum(id);
        std::vector<Block> next;
        for (const auto& block : blocks) {
            const num::Matrix compressed =
                block.isometry.adjoint() * m * block.isometry;
            Eigen::SelfAdjointEigenSolver<num::Matrix> solver(
                (compressed + compressed.adjoint()) / 2.0);
            if (solver.info() != Eigen::Success)
                throw NumericalFailure("joint_eigenbasis: eigensolver failed");
            std::vector<double> vals(solver.eigenvalues().data(),
                                     solver.eigenvalues().data() + compressed.rows());
            for (const auto& cluster : num::cluster_values(vals)) {
                num::Matrix cols(compressed.rows(), cluster.members.size());
                for (std::size_t k = 0; k < cluster.members.size(); ++k)
                    cols.col(static_cast<int>(k)) =
                        solver.eigenvectors().col(cluster.members[k]);
                const int spec_idx = spec.index_of(cluster.representative, 1e-6);
                if (spec_idx < 0)
                    throw NumericalFailure("joint_eigenbasis: block eigenvalue drifted");
                Block refined{block.isometry * cols, block.label};
                refined.label.push_back(spec_idx);
                next.push_back(std::move(refined));
            }
        }
        blocks = std::move(next);
    }
    JointBasis out;
    out.columns.resize(n, n);
    int col = 0;
    for (const auto& block : blocks)
        for (int k = 0; k < block.isometry.cols(); ++k) {
            out.columns.col(col++) = block.isometry.col(k);
            out.labels.push_back(block.label);
        }
    return out;
}

std::optional<Cone> Engine::find_cone(std::span<const ObsId> legs) {
    if (legs.empty()) throw UnknownObservable("find_cone: empty family");
    for (std::size_t i = 0; i < legs.size(); ++i)
        for (std::size_t j = i + 1; j < legs.size(); ++j)
            if (!compatible(legs[i], legs[j])) return std::nullopt;

    const JointBasis basis = joint_eigenbasis(legs);
    const int n = dimension();
    num::Matrix apex_matrix = num::Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k)
        apex_matrix += double(k) * (basis.columns.col(k) * basis.columns.col(k).adjoint());
    std::string hint = "apex(";
    for (std::size_t i = 0; i < legs.size(); ++i)
        hint += (i ? "," : "") + obs(legs[i]).name();
    hint += ")";
    const ObsId apex = register_observable(apex_matrix, hint);

    Cone cone{apex, {}};
    const auto& apex_spec = spectrum(apex);
    for (std::size_t leg = 0; leg < legs.size(); ++leg) {
        const auto& leg_spec = spectrum(legs[leg]);
        FunctionalArrow arrow{apex, legs[leg], std::vector<double>(
            static_cast<std::size_t>(apex_spec.size()), 0.0)};
        for (int k = 0; k < n; ++k)
            arrow.table[static_cast<std::size_t>(k)] =
                leg_spec.values[static_cast<std::size_t>(basis.labels[static_cast<std::size_t>(k)][leg])];
        cone.arrows.push_back(std::move(arrow));
    }
    return cone;
}

ConjunctionResult Engine::conjunction(ObsId a, ObsId b, std::span<const double> pairing) {
    if (!compatible(a, b)) throw NotCompatible("conjunction: observables not compatible");
    const auto& sa = spectrum(a);
    const auto& sb = spectrum(b);
    const auto& ea = obs(a).eig();
    const auto& eb = obs(b).eig();

    std::vector<double> labels;
    if (pairing.empty()) {
        // default: lexicographic enumeration mapped to consecutive integers
        for (int i = 0; i < sa.size(); ++i)
            for (int j = 0; j < sb.size(); ++j)
                labels.push_back(double(i * sb.size() + j));
    } else {
        if (static_cast<int>(pairing.size()) != sa.size() * sb.size())
            throw PartialFunction("conjunction: pairing table has wrong size");
        labels.assign(pairing.begin(), pairing.end());
        std::vector<double> sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 1; k < sorted.size(); ++k)
            if (std::abs(sorted[k] - sorted[k - 1]) < 1e-12)
                throw SchemaError("conjunction: pairing not injective");
    }

    struct Entry {
        double label;
        int i, j;
        num::Matrix projector;
    };
    std::vector<Entry> entries;
    const int n = dimension();
    num::Matrix m = num::Matrix::Zero(n, n);
    for (int i = 0; i < sa.size(); ++i)
        for (int j = 0; j < sb.size(); ++j) {
            num::Matrix proj = ea.projectors[static_cast<std::size_t>(i)] *
                               eb.projectors[static_cast<std::size_t>(j)];
            proj = (proj + proj.adjoint()) / 2.0;
            if (proj.trace().real() < 0.5) continue;  // E_alpha o F_beta = 0
            const double label = labels[static_cast<std::size_t>(i * sb.size() + j)];
            m += label * proj;
            entries.push_back({label, i, j, std::move(proj)});
        }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& x, const Entry& y) { return x.label < y.label; });

    ConjunctionResult out;
    out.observable =
        register_observable(m, "conj(" + obs(a).name() + "," + obs(b).name() + ")");
    out.to_first = FunctionalArrow{out.observable, a, {}};
    out.to_second = FunctionalArrow{out.observable, b, {}};
    for (const auto& e : entries) {
        out.support.emplace_back(e.i, e.j);
        out.to_first.table.push_back(sa.values[static_cast<std::size_t>(e.i)]);
        out.to_second.table.push_back(sb.values[static_cast<std::size_t>(e.j)]);
    }
    if (static_cast<int>(out.support.size()) != spectrum(out.observable).size())
        throw NumericalFailure("conjunction: spectrum does not match support");
    return out;
}

double Engine::conjunction_universal_residual(ObsId a, ObsId b,
                                              const ConjunctionResult& conj, int samples) {
    const int n = dimension();
    const std::array<ObsId, 2> legs{a, b};
    const JointBasis basis = joint_eigenbasis(legs);
    const auto& conj_spec = spectrum(conj.observable);
    const auto& conj_eig = obs(conj.observable).eig();

    // group columns into joint blocks by label tuple
    std::vector<std::pair<std::vector<int>, std::vector<int>>> groups;  // label -> columns
    for (int k = 0; k < n; ++k) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
            return g.first == basis.labels[static_cast<std::size_t>(k)];
        });
        if (it == groups.end())
            groups.push_back({basis.labels[static_cast<std::size_t>(k)], {k}});
        else
            it->second.push_back(k);
    }

    double worst = 0.0;
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int s = 0; s < samples; ++s) {
        // random cone: rotate each joint block, relabel columns
        num::Matrix cols(n, n);
        std::vector<std::vector<int>> col_label(static_cast<std::size_t>(n));
        int c = 0;
        for (const auto& [label, members] : groups) {
            const int k = static_cast<int>(members.size());
            num::Matrix sub(n, k);
            for (int j = 0; j < k; ++j)
                sub.col(j) = basis.columns.col(members[static_cast<std::size_t>(j)]);
            sub = sub * random_unitary(k, rng_);
            for (int j = 0; j < k; ++j) {
                cols.col(c) = sub.col(j);
                col_label[static_cast<std::size_t>(c)] = label;
                ++c;
            }
        }
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng_);

        // mediating arrow h: apex value perm[k] -> conjunction label of the
        // supported pair carried by column k
        for (int k = 0; k < n; ++k) {
            const auto& label = col_label[static_cast<std::size_t>(k)];
            int target = -1;
            int matches = 0;
            for (std::size_t t = 0; t < conj.support.size(); ++t)
                if (conj.support[t].first == label[0] && conj.support[t].second == label[1]) {
                    target = static_cast<int>(t);
                    ++matches;
                }
            if (matches != 1) return 1.0;  // mediating arrow missing or not unique
            // theta_A o h = f and theta_B o h = g by construction of target;
            // verify the arrow property statistically: the apex eigenvector
            // must lie inside the target conjunction projector
            const num::CVector v = cols.col(k);
            const double overlap =
                (v.adjoint() * conj_eig.projectors[static_cast<std::size_t>(target)] * v)
                    .real()
                    .value();
            worst = std::max(worst, std::abs(overlap - 1.0));
            (void)conj_spec;
        }
    }

    // pushforward of the conjunction statistics on probes: joint pair
    // probabilities match the conjunction distribution
    for (const auto& rho : probes_) {
        const num::Matrix& d = sys_->density(rho);
        for (std::size_t t = 0; t < conj.support.size(); ++t) {
            const num::Matrix pair_proj =
                obs(a).eig().projectors[static_cast<std::size_t>(conj.support[t].first)] *
                obs(b).eig().projectors[static_cast<std::size_t>(conj.support[t].second)];
            const double joint = (d * pair_proj).trace().real();
            const double via_conj =
                (d * conj_eig.projectors[t]).trace().real();
            worst = std::max(worst, std::abs(joint - via_conj));
        }
    }
    return worst;
}

ObsId Engine::algebra_add(ObsId a, ObsId b) {
    auto cone = find_cone(std::array<ObsId, 2>{a, b});
    if (!cone) throw NotCompatible("algebra_add: observables not compatible");
    const auto& apex_spec = spectrum(cone->apex);
    std::vector<double> table(static_cast<std::size_t>(apex_spec.size()));
    for (std::size_t k = 0; k < table.size(); ++k)
        table[k] = cone->arrows[0].table[k] + cone->arrows[1].table[k];
    return apply_function(cone->apex, table);
}

ObsId Engine::algebra_mul(ObsId a, ObsId b) {
    auto cone = find_cone(std::array<ObsId, 2>{a, b});
    if (!cone) throw NotCompatible("algebra_mul: observables not compatible");
    const auto& apex_spec = spectrum(cone->apex);
    std::vector<double> table(static_cast<std::size_t>(apex_spec.size()));
    for (std::size_t k = 0; k < table.size(); ++k)
        table[k] = cone->arrows[0].table[k] * cone->arrows[1].table[k];
    return apply_function(cone->apex, table);
}

ObsId Engine::algebra_scale(double c, ObsId a) {
    const auto& sa = spectrum(a);
    std::vector<double> table;
    for (double v : sa.values) table.push_back(c * v);
    return apply_function(a, table);
}

SpectralDecomposition Engine::spectral_decomposition(ObsId a) {
    const auto& eig = obs(a).eig();
    SpectralDecomposition out;
    for (int i = 0; i < eig.size(); ++i) {
        std::ostringstream hint;
        hint << "proj(" << obs(a).name() << "," << eig.eigenvalues[static_cast<std::size_t>(i)]
             << ")";
        out.eigenvalues.push_back(eig.eigenvalues[static_cast<std::size_t>(i)]);
        out.multiplicities.push_back(eig.multiplicities[static_cast<std::size_t>(i)]);
        out.projections.push_back(
            register_observable(eig.projectors[static_cast<std::size_t>(i)], hint.str()));
    }
    return out;
}

bool Engine::is_projection(ObsId a) const {
    for (double v : spectrum(a).values)
        if (std::abs(v) > 1e-8 && std::abs(v - 1.0) > 1e-8) return false;
    return true;
}

num::Matrix Engine::projector_matrix(ObsId projection) const {
    if (!is_projection(projection))
        throw NotProjection("observable " + obs(projection).name() + " is not a projection");
    const auto& eig = obs(projection).eig();
    for (int i = 0; i < eig.size(); ++i)
        if (std::abs(eig.eigenvalues[static_cast<std::size_t>(i)] - 1.0) <= 1e-8)
            return eig.projectors[static_cast<std::size_t>(i)];
    return num::Matrix::Zero(dimension(), dimension());
}

int Engine::projection_rank(ObsId projection) const {
    return static_cast<int>(std::lround(projector_matrix(projection).trace().real()));
}

bool Engine::projection_leq(ObsId e, ObsId f) const {
    const num::Matrix pe = projector_matrix(e);
    const num::Matrix pf = projector_matrix(f);
    const bool algebraic = compatible(e, f) && (pe * pf - pe).norm() <= 1e-9 * (1.0 + pe.norm());
    bool by_states = true;
    for (const auto& rho : probes_) {
        const num::Matrix& d = sys_->density(rho);
        if ((d * pe).trace().real() > (d * pf).trace().real() + kStatTol) {
            by_states = false;
            break;
        }
    }
    if (algebraic && !by_states)
        throw NumericalFailure("projection_leq: algebraic and state routes disagree");
    return algebraic;
}

bool Engine::orthogonal(ObsId e, ObsId f) const {
    const num::Matrix pe = projector_matrix(e);
    const num::Matrix pf = projector_matrix(f);
    const bool algebraic = compatible(e, f) && (pe * pf).norm() <= 1e-9 * (1.0 + pe.norm());
    if (algebraic) {
        for (const auto& rho : probes_) {
            const num::Matrix& d = sys_->density(rho);
            const double sum = (d * pe).trace().real() + (d * pf).trace().real();
            if (sum > 1.0 + kStatTol)
                throw NumericalFailure("orthogonal: state route contradicts E o F = 0");
        }
        const bool e1 = std::lround(pe.trace().real()) == 1;
        const bool f1 = std::lround(pf.trace().real()) == 1;
        if (e1 && f1) {
            // transition-probability route for rank-1 pairs
            const double t = (pe * pf).trace().real();
            if (std::abs(t) > 1e-9)
                throw NumericalFailure("orthogonal: transition route contradicts E o F = 0");
        }
    }
    return algebraic;
}

double Engine::trace(ObsId a) const {
    const double via_state = dimension() * expectation(sys_->mixed_state(), a);
    const auto& eig = obs(a).eig();
    double via_spectrum = 0.0;
    for (int i = 0; i < eig.size(); ++i)
        via_spectrum += eig.multiplicities[static_cast<std::size_t>(i)] *
                        eig.eigenvalues[static_cast<std::size_t>(i)];
    if (std::abs(via_state - via_spectrum) > 1e-9 * (1.0 + std::abs(via_spectrum)))
        throw NumericalFailure("trace: state and spectrum routes disagree");
    return via_state;
}

double Engine::expectation(const State& rho, ObsId a) const {
    const auto& eig = obs(a).eig();
    const num::Matrix& d = sys_->density(rho);
    double out = 0.0;
    for (int i = 0; i < eig.size(); ++i)
        out += eig.eigenvalues[static_cast<std::size_t>(i)] *
               (d * eig.projectors[static_cast<std::size_t>(i)]).trace().real();
    return out;
}

DensityDecomposition Engine::density_decomposition(ObsId a) const {
    DensityDecomposition out;
    const auto& eig = obs(a).eig();
    if (eig.eigenvalues.front() < -1e-10) return out;
    double tr = 0.0;
    for (int i = 0; i < eig.size(); ++i)
        tr += eig.multiplicities[static_cast<std::size_t>(i)] *
              eig.eigenvalues[static_cast<std::size_t>(i)];
    if (std::abs(tr - 1.0) > 1e-9) return out;
    out.is_density = true;
    for (int i = 0; i < eig.size(); ++i)
        for (const auto& v : orthonormal_range(eig.projectors[static_cast<std::size_t>(i)])) {
            out.weights.push_back(eig.eigenvalues[static_cast<std::size_t>(i)]);
            out.directions.push_back(v);
        }
    return out;
}

State Engine::pure_state_of(ObsId rank1_projection) const {
    const num::Matrix p = projector_matrix(rank1_projection);
    if (std::lround(p.trace().real()) != 1)
        throw NotRankOne("pure_state_of: projection is not rank-1");
    return sys_->make_state(p);
}

std::vector<std::vector<int>> Engine::joint_support(std::span<const ObsId> family) const {
    const JointBasis basis = joint_eigenbasis(family);
    std::vector<std::vector<int>> support;
    for (const auto& label : basis.labels)
        if (std::find(support.begin(), support.end(), label) == support.end())
            support.push_back(label);
    return support;
}

std::optional<std::vector<double>> generic_functional_relation(
    const OperationalSystem& sys, const std::string& a, const std::string& b,
    std::span<const State> probes, double tol) {
    const auto& sa = sys.spectrum(a);
    const auto& sb = sys.spectrum(b);
    std::vector<double> table;
    std::set<int> hit;
    for (double alpha : sa.values) {
        const State prep = sys.objective_update(sys.mixed_state(), a, alpha);
        if (sys.is_null(prep)) return std::nullopt;
        const DistributionTable dist = sys.distribution(prep, b);
        int arg = -1;
        for (int j = 0; j < sb.size(); ++j)
            if (dist.probabilities[static_cast<std::size_t>(j)] >= 1.0 - tol) arg = j;
        if (arg < 0) return std::nullopt;
        table.push_back(sb.values[static_cast<std::size_t>(arg)]);
        hit.insert(arg);
    }
    if (static_cast<int>(hit.size()) != sb.size()) return std::nullopt;
    for (const auto& rho : probes) {
        const DistributionTable da = sys.distribution(rho, a);
        const DistributionTable db = sys.distribution(rho, b);
        for (int j = 0; j < sb.size(); ++j) {
            double pushed = 0.0;
            for (int i = 0; i < sa.size(); ++i)
                if (std::abs(table[static_cast<std::size_t>(i)] -
                             sb.values[static_cast<std::size_t>(j)]) <= 1e-9)
                    pushed += da.probabilities[static_cast<std::size_t>(i)];
            if (std::abs(pushed - db.probabilities[static_cast<std::size_t>(j)]) > tol)
                return std::nullopt;
        }
    }
    return table;
}

std::optional<std::string> generic_cone_apex(const OperationalSystem& sys,
                                             const std::string& a, const std::string& b,
                                             std::span<const State> probes, double tol) {
    std::vector<std::string> candidates = sys.observable_names();
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const std::string& x, const std::string& y) {
                         return sys.spectrum(x).size() > sys.spectrum(y).size();
                     });
    for (const auto& c : candidates)
        if (generic_functional_relation(sys, c, a, probes, tol) &&
            generic_functional_relation(sys, c, b, probes, tol))
            return c;
    return std::nullopt;
}

bool bayes_rule_holds(const OperationalSystem& sys, const std::string& a,
                      const std::string& b, std::span<const State> probes, double tol,
                      double* worst) {
    double max_gap = 0.0;
    for (const auto& rho : probes) {
        for (double alpha : sys.spectrum(a).values)
            for (double beta : sys.spectrum(b).values) {
                const EventSpec ea{a, {alpha}};
                const EventSpec eb{b, {beta}};
                const double pa = event_probability(sys, rho, ea);
                const double pb = event_probability(sys, rho, eb);
                const double lhs =
                    pa == 0.0 ? 0.0
                              : pa * event_probability(sys, update_state(sys, rho, ea), eb);
                const double rhs =
                    pb == 0.0 ? 0.0
                              : pb * event_probability(sys, update_state(sys, rho, eb), ea);
                max_gap = std::max(max_gap, std::abs(lhs - rhs));
            }
    }
    if (worst) *worst = max_gap;
    return max_gap <= tol;
}

}  // namespace qf
