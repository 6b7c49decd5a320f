#include "banknet/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace banknet {

using nlohmann::json;

double parse_probability(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const double num = std::stod(text.substr(0, slash));
            const double den = std::stod(text.substr(slash + 1));
            if (den == 0) throw Error(ErrorKind::io_error, "rational with zero denominator: " + text);
            return num / den;
        }
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw Error(ErrorKind::io_error, "trailing characters in number: " + text);
        return v;
    } catch (const std::invalid_argument&) {
        throw Error(ErrorKind::io_error, "not a number: '" + text + "'");
    } catch (const std::out_of_range&) {
        throw Error(ErrorKind::io_error, "number out of range: '" + text + "'");
    }
}

namespace {

double json_probability(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_probability(v.get<std::string>());
    throw Error(ErrorKind::io_error, "probability must be a number or string");
}

json parse_json(std::istream& in, const char* what) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::io_error, std::string(what) + ": " + e.what());
    }
    return doc;
}

}  // namespace

DegreeModel load_model(std::istream& in) {
    const json doc = parse_json(in, "model file");
    if (!doc.contains("in_degrees") || !doc.contains("out_degrees") || !doc.contains("P") ||
        !doc.contains("Q"))
        throw Error(ErrorKind::io_error, "model file needs in_degrees, out_degrees, P and Q");

    DegreeSupport support = DegreeSupport::make(doc.at("in_degrees").get<std::vector<int>>(),
                                                doc.at("out_degrees").get<std::vector<int>>());
    std::map<NodeType, double> p;
    for (const json& entry : doc.at("P"))
        p[NodeType{entry.at("j").get<int>(), entry.at("k").get<int>()}] = json_probability(entry.at("p"));
    std::map<EdgeType, double> q;
    for (const json& entry : doc.at("Q"))
        q[EdgeType{entry.at("k").get<int>(), entry.at("j").get<int>()}] = json_probability(entry.at("q"));
    return DegreeModel(std::move(support), NodeTypeDist(std::move(p)), EdgeTypeDist(std::move(q)));
}

DegreeModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot open model file '" + path + "'");
    return load_model(in);
}

void save_model(std::ostream& out, const DegreeModel& model) {
    json doc;
    doc["in_degrees"] = model.support().in_degrees;
    doc["out_degrees"] = model.support().out_degrees;
    doc["P"] = json::array();
    for (const auto& [type, p] : model.node_dist().entries())
        doc["P"].push_back({{"j", type.in_deg}, {"k", type.out_deg}, {"p", p}});
    doc["Q"] = json::array();
    for (const auto& [type, q] : model.edge_dist().entries())
        doc["Q"].push_back({{"k", type.out_deg}, {"j", type.in_deg}, {"q", q}});
    out << doc.dump(2) << "\n";
}

ReducedAccounting load_accounting(std::istream& in, const DegreeSupport& support) {
    const json doc = parse_json(in, "accounting file");
    if (doc.contains("gk")) {
        return gk_specification(json_probability(doc.at("gk").at("gamma")), support);
    }
    if (!doc.contains("gamma") || !doc.contains("w"))
        throw Error(ErrorKind::io_error, "accounting file needs either 'gk' or 'gamma' and 'w'");
    std::map<NodeType, double> gamma;
    for (const json& entry : doc.at("gamma"))
        gamma[NodeType{entry.at("j").get<int>(), entry.at("k").get<int>()}] =
            json_probability(entry.at("value"));
    std::map<int, double> weights;
    for (const json& entry : doc.at("w"))
        weights[entry.at("j").get<int>()] = json_probability(entry.at("value"));
    return ReducedAccounting(std::move(gamma), std::move(weights));
}

ReducedAccounting load_accounting_file(const std::string& path, const DegreeSupport& support) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot open accounting file '" + path + "'");
    return load_accounting(in, support);
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const CascadeTrajectory& trajectory,
                          const DegreeModel& model) {
    out << "# converged=" << (trajectory.converged ? "true" : "false")
        << " steps=" << trajectory.n_steps
        << " expected_cascade_size=" << format_double(trajectory.expected_cascade_size) << "\n";
    out << "step,index,quantity,value\n";
    for (const CascadeStepRecord& step : trajectory.steps) {
        for (const auto& [j, v] : step.a)
            out << step.n << "," << j << ",a," << format_double(v) << "\n";
        for (const auto& [type, v] : step.rho)
            out << step.n << "," << type.in_deg << ":" << type.out_deg << ",rho," << format_double(v)
                << "\n";
        for (const auto& [etype, q] : model.edge_dist().entries()) {
            if (q == 0) continue;
            auto it = step.sigma.find(etype.out_deg);
            if (it == step.sigma.end()) continue;
            out << step.n << "," << etype.out_deg << ":" << etype.in_deg << ",sigma,"
                << format_double(it->second) << "\n";
        }
    }
}

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats, int n_nodes, double gamma) {
    out << "# master_seed=" << stats.master_seed << "\n";
    out << "row,realization,seed,n,gamma,default_fraction,n_rounds,is_global\n";
    for (const RealizationRecord& rec : stats.runs) {
        out << "run," << rec.index << "," << rec.seed << "," << n_nodes << "," << format_double(gamma)
            << ",";
        if (rec.failed)
            out << ",,failed\n";
        else
            out << format_double(rec.default_fraction) << "," << rec.n_rounds << ","
                << (rec.is_global ? 1 : 0) << "\n";
    }
    out << "summary,global_frequency=" << format_double(stats.global_frequency)
        << ",mean_global_size=" << format_double(stats.mean_global_size) << ",n=" << n_nodes
        << ",gamma=" << format_double(gamma) << ",n_global=" << stats.n_global
        << ",n_failures=" << stats.n_failures << ",realizations=" << stats.n_realizations << "\n";
}

}  // namespace banknet
