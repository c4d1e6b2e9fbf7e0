#include "qf/model.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qf {
namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& field, const std::string& why) {
    throw SchemaError(field + ": " + why);
}

const json& require(const json& j, const std::string& key) {
    auto it = j.find(key);
    if (it == j.end()) schema(key, "missing field");
    return *it;
}

int require_int(const json& j, const std::string& key) {
    const json& v = require(j, key);
    if (!v.is_number_integer()) schema(key, "expected an integer");
    return v.get<int>();
}

std::string require_string(const json& j, const std::string& key) {
    const json& v = require(j, key);
    if (!v.is_string()) schema(key, "expected a string");
    return v.get<std::string>();
}

std::vector<double> real_array(const json& v, const std::string& field) {
    if (!v.is_array()) schema(field, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) schema(field, "expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Eigen::MatrixXd real_matrix(const json& v, int n, const std::string& field) {
    if (!v.is_array() || static_cast<int>(v.size()) != n)
        schema(field, "expected " + std::to_string(n) + " rows");
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        const auto row = real_array(v[static_cast<std::size_t>(i)], field);
        if (static_cast<int>(row.size()) != n)
            schema(field, "expected " + std::to_string(n) + " columns");
        for (int j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
}

/// Complex matrix from {"re": [[..]], "im": [[..]]} with im optional.
num::Matrix complex_matrix(const json& v, int n, const std::string& field) {
    if (!v.is_object()) schema(field, "expected an object with re/im parts");
    num::Matrix m = real_matrix(require(v, "re"), n, field + ".re").cast<num::Complex>();
    if (v.contains("im"))
        m += num::Complex(0, 1) * real_matrix(v["im"], n, field + ".im").cast<num::Complex>();
    return m;
}

/// Complex vector from a plain array (real) or {"re": [..], "im": [..]}.
num::CVector complex_vector(const json& v, int n, const std::string& field) {
    std::vector<double> re, im;
    if (v.is_array()) {
        re = real_array(v, field);
    } else if (v.is_object()) {
        re = real_array(require(v, "re"), field + ".re");
        if (v.contains("im")) im = real_array(v["im"], field + ".im");
    } else {
        schema(field, "expected an array or an object with re/im parts");
    }
    if (static_cast<int>(re.size()) != n || (!im.empty() && im.size() != re.size()))
        schema(field, "expected " + std::to_string(n) + " entries");
    num::CVector out(n);
    for (int i = 0; i < n; ++i)
        out(i) = num::Complex(re[static_cast<std::size_t>(i)],
                              im.empty() ? 0.0 : im[static_cast<std::size_t>(i)]);
    return out;
}

void check_unique(std::set<std::string>& seen, const std::string& name,
                  const std::string& field) {
    if (!seen.insert(name).second) schema(field, "duplicate name '" + name + "'");
}

void parse_hilbert_observables(const json& arr, ModelFile& mf) {
    std::set<std::string> seen;
    for (const auto& o : arr) {
        const std::string name = require_string(o, "name");
        check_unique(seen, name, "observables");
        num::Matrix m;
        if (o.contains("diag")) {
            const auto d = real_array(o["diag"], "observables." + name + ".diag");
            if (static_cast<int>(d.size()) != mf.dimension)
                schema("observables." + name + ".diag", "wrong length");
            m = num::Matrix::Zero(mf.dimension, mf.dimension);
            for (int i = 0; i < mf.dimension; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        } else {
            m = complex_matrix(require(o, "matrix"), mf.dimension,
                               "observables." + name + ".matrix");
        }
        if ((m - m.adjoint()).norm() > 1e-10)
            schema("observables." + name, "observable not Hermitian");
        mf.observables.emplace_back(name, std::move(m));
    }
}

void parse_hilbert_states(const json& arr, ModelFile& mf) {
    std::set<std::string> seen;
    for (const auto& s : arr) {
        const std::string name = require_string(s, "name");
        check_unique(seen, name, "states");
        num::Matrix rho;
        if (s.contains("vector")) {
            num::CVector psi = complex_vector(s["vector"], mf.dimension,
                                              "states." + name + ".vector");
            if (psi.norm() < 1e-12) schema("states." + name + ".vector", "zero vector");
            rho = pure_state_matrix(psi / psi.norm());
        } else {
            rho = complex_matrix(require(s, "matrix"), mf.dimension,
                                 "states." + name + ".matrix");
        }
        mf.states.emplace_back(name, std::move(rho));
    }
}

void parse_table_backend(const json& root, ModelFile& mf) {
    std::set<std::string> seen;
    for (const auto& o : require(root, "observables")) {
        const std::string name = require_string(o, "name");
        check_unique(seen, name, "observables");
        TableObservable t;
        t.name = name;
        t.spectrum = SpectrumSet(real_array(require(o, "values"),
                                            "observables." + name + ".values"));
        for (const auto& r : require(o, "readout")) {
            if (!r.is_number_integer())
                schema("observables." + name + ".readout", "expected outcome indices");
            t.readout.push_back(r.get<int>());
        }
        if (static_cast<int>(t.readout.size()) != mf.dimension)
            schema("observables." + name + ".readout", "wrong length");
        mf.table_observables.push_back(std::move(t));
    }
    std::set<std::string> state_seen;
    if (root.contains("states"))
        for (const auto& s : root["states"]) {
            const std::string name = require_string(s, "name");
            check_unique(state_seen, name, "states");
            const auto w = real_array(require(s, "weights"), "states." + name + ".weights");
            if (static_cast<int>(w.size()) != mf.dimension)
                schema("states." + name + ".weights", "wrong length");
            Eigen::VectorXd p(mf.dimension);
            for (int i = 0; i < mf.dimension; ++i) p(i) = w[static_cast<std::size_t>(i)];
            mf.table_states.emplace_back(name, std::move(p));
        }
    if (root.contains("kernels"))
        for (const auto& k : root["kernels"]) {
            TableKernelSpec spec;
            spec.observable = require_string(k, "observable");
            const json& v = require(k, "value");
            if (!v.is_number()) schema("kernels.value", "expected a number");
            spec.value = v.get<double>();
            spec.kernel = real_matrix(require(k, "matrix"), mf.dimension, "kernels.matrix");
            mf.kernels.push_back(std::move(spec));
        }
}

SpectrumSet spectrum_for(const ModelFile& mf, const std::string& name) {
    for (const auto& o : mf.table_observables)
        if (o.name == name) return o.spectrum;
    for (const auto& o : mf.observables)
        if (o.name() == name) return o.spectrum();
    schema("scenarios", "unknown observable '" + name + "'");
}

void parse_scenarios(const json& arr, ModelFile& mf) {
    std::set<std::string> seen;
    for (const auto& s : arr) {
        const std::string name = require_string(s, "name");
        check_unique(seen, name, "scenarios");
        Scenario sc;
        for (const auto& ctx : require(s, "contexts")) {
            std::vector<std::string> members;
            for (const auto& m : ctx) {
                if (!m.is_string()) schema("scenarios." + name, "expected observable names");
                members.push_back(m.get<std::string>());
                if (std::find(sc.observables.begin(), sc.observables.end(), members.back()) ==
                    sc.observables.end())
                {
                    sc.observables.push_back(members.back());
                    sc.spectra.emplace(members.back(), spectrum_for(mf, members.back()));
                }
            }
            sc.contexts.push_back(std::move(members));
        }
        sc.validate();
        mf.scenarios.emplace(name, std::move(sc));
    }
}

void parse_audit(const json& a, ModelFile& mf) {
    if (a.contains("random_probe_count"))
        mf.audit.random_probe_count = require_int(a, "random_probe_count");
    if (a.contains("seed")) mf.audit.seed = static_cast<unsigned>(require_int(a, "seed"));
    if (a.contains("tol")) {
        if (!a["tol"].is_number()) schema("audit.tol", "expected a number");
        mf.audit.tol = a["tol"].get<double>();
    }
    if (a.contains("max_sequence_length"))
        mf.audit.max_sequence_length = require_int(a, "max_sequence_length");
    if (a.contains("tol_overrides"))
        for (const auto& [key, v] : a["tol_overrides"].items()) {
            if (!v.is_number()) schema("audit.tol_overrides", "expected numbers");
            mf.audit.tol_overrides[key] = v.get<double>();
        }
    if (a.contains("interference_bases"))
        for (const auto& basis : a["interference_bases"]) {
            std::vector<num::CVector> vectors;
            for (const auto& v : basis)
                vectors.push_back(
                    complex_vector(v, mf.dimension, "audit.interference_bases"));
            mf.audit.interference_bases.push_back(std::move(vectors));
        }
}

}  // namespace

std::shared_ptr<OperationalSystem> ModelFile::build() const {
    if (type == "hilbert") return build_hilbert();
    auto sys = std::make_shared<TableSystem>(dimension, table_observables, table_states,
                                             !kernels.empty());
    for (const auto& k : kernels) sys->set_update_kernel(k.observable, k.value, k.kernel);
    return sys;
}

std::shared_ptr<HilbertSystem> ModelFile::build_hilbert() const {
    if (type != "hilbert")
        throw SchemaError("type: command requires a hilbert backend");
    return std::make_shared<HilbertSystem>(dimension, observables, states);
}

ModelFile parse_model_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        // recover line/column from the byte offset
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream os;
        os << "line " << line << ", column " << col << ": " << e.what();
        throw ParseError(os.str());
    }
    if (!root.is_object()) throw SchemaError("document: expected an object");

    ModelFile mf;
    if (require_int(root, "format_version") != 1)
        schema("format_version", "unsupported version");
    mf.type = root.contains("type") ? require_string(root, "type") : "hilbert";
    if (mf.type != "hilbert" && mf.type != "table")
        schema("type", "expected 'hilbert' or 'table'");
    mf.dimension = require_int(root, "dimension");
    if (mf.dimension <= 0) schema("dimension", "expected a positive dimension");

    if (mf.type == "hilbert") {
        parse_hilbert_observables(require(root, "observables"), mf);
        if (root.contains("states")) parse_hilbert_states(root["states"], mf);
    } else {
        parse_table_backend(root, mf);
    }
    if (root.contains("scenarios")) parse_scenarios(root["scenarios"], mf);
    if (root.contains("audit")) parse_audit(root["audit"], mf);
    return mf;
}

ModelFile parse_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_text(buf.str());
}

}  // namespace qf
