#include "qf/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "qf/errors.hpp"

namespace qf {

bool Report::all_pass() const {
    return std::none_of(entries.begin(), entries.end(),
                        [](const ReportEntry& e) { return e.status == "fail"; });
}

void Report::add(std::string name, std::string status) {
    entries.push_back({std::move(name), std::move(status), 0.0, false, {}});
}

void Report::add(std::string name, std::string status, double residual,
                 std::string witness) {
    entries.push_back({std::move(name), std::move(status), residual, true,
                       std::move(witness)});
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "# " << command << "\n";
    os << "# qf " << version << ", seed " << seed << ", tol " << tol << "\n";
    std::size_t width = 4;
    for (const auto& e : entries) width = std::max(width, e.name.size());
    for (const auto& e : entries) {
        os << std::left << std::setw(static_cast<int>(width) + 2) << e.name
           << std::setw(6) << e.status;
        if (e.has_residual)
            os << "residual " << std::setprecision(3) << std::scientific
               << e.residual << std::defaultfloat;
        if (!e.witness.empty()) os << "  [" << e.witness << "]";
        os << "\n";
    }
    os << (all_pass() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

std::string Report::to_data() const {
    nlohmann::json root;
    root["command"] = command;
    root["version"] = version;
    root["seed"] = seed;
    root["tol"] = tol;
    root["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je;
        je["name"] = e.name;
        je["status"] = e.status;
        if (e.has_residual) je["residual"] = e.residual;
        if (!e.witness.empty()) je["witness"] = e.witness;
        root["entries"].push_back(std::move(je));
    }
    root["pass"] = all_pass();
    return root.dump(2) + "\n";
}

Report Report::from_data(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.what());
    }
    Report r;
    r.command = root.at("command").get<std::string>();
    r.version = root.at("version").get<std::string>();
    r.seed = root.at("seed").get<unsigned long>();
    r.tol = root.at("tol").get<double>();
    for (const auto& je : root.at("entries")) {
        ReportEntry e;
        e.name = je.at("name").get<std::string>();
        e.status = je.at("status").get<std::string>();
        if (je.contains("residual")) {
            e.residual = je["residual"].get<double>();
            e.has_residual = true;
        }
        if (je.contains("witness")) e.witness = je["witness"].get<std::string>();
        r.entries.push_back(std::move(e));
    }
    return r;
}

}  // namespace qf
