#include "fuzzygrad/fis_json.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace fuzzygrad {

using nlohmann::json;

static json variable_to_json(const FisVariable& var) {
    json mfs = json::array();
    for (const MembershipFunction& mf : var.mfs) {
        json params = json::array(), trainable = json::array();
        for (const Value& p : mf.params) {
            params.push_back(p.item());
            trainable.push_back(p.requires_grad());
        }
        mfs.push_back({{"label", mf.label},
                       {"kind", to_string(mf.kind)},
                       {"params", std::move(params)},
                       {"trainable", std::move(trainable)}});
    }
    return {{"name", var.name}, {"range", {var.range_lo, var.range_hi}}, {"mfs", std::move(mfs)}};
}

json fis_to_json(const Fis& fis) {
    json inputs = json::array(), outputs = json::array(), rules = json::array();
    for (const FisVariable& var : fis.inputs) inputs.push_back(variable_to_json(var));
    for (const FisVariable& var : fis.outputs) outputs.push_back(variable_to_json(var));
    for (const Rule& rule : fis.rules)
        rules.push_back({{"antecedents", rule.antecedents},
                         {"consequents", rule.consequents},
                         {"weight", rule.weight},
                         {"connective", static_cast<int>(rule.connective)}});
    return {{"name", fis.name},
            {"and_method", to_string(fis.and_method)},
            {"or_method", to_string(fis.or_method)},
            {"imp_method", to_string(fis.imp_method)},
            {"agg_method", to_string(fis.agg_method)},
            {"defuzz_method", to_string(fis.defuzz_method)},
            {"inputs", std::move(inputs)},
            {"outputs", std::move(outputs)},
            {"rules", std::move(rules)}};
}

// Rebuilds through the regular builders so a loaded file passes exactly the
// same validation as a hand-assembled system.
Fis fis_from_json(const json& j) {
    Fis fis = newfis(j.at("name").get<std::string>(), j.at("and_method").get<std::string>(),
                     j.at("or_method").get<std::string>(), j.at("imp_method").get<std::string>(),
                     j.at("agg_method").get<std::string>(),
                     j.at("defuzz_method").get<std::string>());
    for (const char* io : {"input", "output"}) {
        const json& vars = j.at(std::string(io) + "s");
        std::size_t index = 0;
        for (const json& jv : vars) {
            const json& range = jv.at("range");
            fis = addvar(std::move(fis), io, jv.at("name").get<std::string>(),
                         range.at(0).get<double>(), range.at(1).get<double>());
            ++index;
            for (const json& jm : jv.at("mfs")) {
                const json& params = jm.at("params");
                const json& trainable = jm.at("trainable");
                if (trainable.size() != params.size())
                    throw std::invalid_argument(
                        "fis_from_json: trainable flags do not match params for MF '" +
                        jm.at("label").get<std::string>() + "'");
                std::vector<Value> vs;
                vs.reserve(params.size());
                for (std::size_t i = 0; i < params.size(); ++i)
                    vs.push_back(make_scalar(params.at(i).get<double>(),
                                             trainable.at(i).get<bool>()));
                fis = addmf(std::move(fis), io, index, jm.at("label").get<std::string>(),
                            jm.at("kind").get<std::string>(), std::move(vs));
            }
        }
    }
    const std::size_t nin = fis.inputs.size(), nout = fis.outputs.size();
    std::vector<std::vector<double>> rows;
    for (const json& jr : j.at("rules")) {
        const json& ante = jr.at("antecedents");
        const json& cons = jr.at("consequents");
        if (ante.size() != nin || cons.size() != nout)
            throw std::invalid_argument("fis_from_json: rule does not match the variable counts");
        std::vector<double> row;
        row.reserve(nin + nout + 2);
        for (const json& a : ante) row.push_back(a.get<double>());
        for (const json& c : cons) row.push_back(c.get<double>());
        row.push_back(jr.at("weight").get<double>());
        row.push_back(jr.at("connective").get<double>());
        rows.push_back(std::move(row));
    }
    return addrule(std::move(fis), rows);
}

void save_fis(const Fis& fis, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_fis: cannot open '" + path + "' for writing");
    out << fis_to_json(fis).dump(2) << '\n';
    if (!out) throw std::runtime_error("save_fis: write to '" + path + "' failed");
}

Fis load_fis(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_fis: cannot open '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("load_fis: '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return fis_from_json(j);
    } catch (const json::exception& e) {
        throw std::runtime_error("load_fis: '" + path + "' is malformed: " + e.what());
    }
}

}  // namespace fuzzygrad
