#pragma once

// Model-file ingestion: JSON documents describing a Hilbert or table
// backend plus named scenarios and an audit configuration.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qf/audit.hpp"
#include "qf/contextuality.hpp"
#include "qf/hilbert.hpp"
#include "qf/table_system.hpp"

namespace qf {

struct TableKernelSpec {
    std::string observable;
    double value = 0.0;
    Eigen::MatrixXd kernel;
};

struct ModelFile {
    int format_version = 1;
    std::string type;  // "hilbert" or "table"
    int dimension = 0;

    // hilbert backend
    std::vector<HermitianObservable> observables;
    std::vector<std::pair<std::string, num::Matrix>> states;

    // table backend
    std::vector<TableObservable> table_observables;
    std::vector<std::pair<std::string, Eigen::VectorXd>> table_states;
    std::vector<TableKernelSpec> kernels;

    std::map<std::string, Scenario> scenarios;
    AuditConfig audit;

    std::shared_ptr<OperationalSystem> build() const;
    std::shared_ptr<HilbertSystem> build_hilbert() const;  // SchemaError if table
};

/// ParseError on malformed JSON (with position), SchemaError on a valid
/// document that violates the model schema (named field in the message).
ModelFile parse_model_file(const std::string& path);
ModelFile parse_model_text(const std::string& text);

}  // namespace qf
