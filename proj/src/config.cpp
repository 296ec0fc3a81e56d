#include "swrrst/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swrrst/errors.hpp"

namespace swrrst {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& message) { throw ConfigError(message); }

void reject_unknown_keys(const Json& obj, const char* block,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known) bad("unknown key '" + key + "' in " + block);
    }
}

template <typename T>
T get_field(const Json& obj, const char* block, const char* key, const T& fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const Json::exception&) {
        bad(std::string(block) + "." + key + " has the wrong type");
    }
}

template <typename T>
T require_field(const Json& obj, const char* block, const char* key) {
    if (!obj.contains(key)) bad(std::string(block) + " is missing required key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const Json::exception&) {
        bad(std::string(block) + "." + key + " has the wrong type");
    }
}

cplx parse_coefficient(const Json& value, const std::string& where) {
    if (value.is_number()) return cplx(value.get<double>(), 0.0);
    if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number())
        return cplx(value[0].get<double>(), value[1].get<double>());
    bad(where + ".coefficient must be a number or [re, im]");
}

Json coefficient_json(cplx c) {
    if (c.imag() == 0.0) return Json(c.real());
    return Json::array({c.real(), c.imag()});
}

Domain domain_from_name(const std::string& name) {
    if (name == "eod") return Domain::eod;
    if (name == "od") return Domain::od;
    bad("solver.domain must be 'eod' or 'od', got '" + name + "'");
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::exception& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) bad("config root must be a JSON object");
    reject_unknown_keys(root, "config",
                        {"input", "partition", "h0", "solver", "auxiliary", "evolution",
                         "output", "seed"});

    RunConfig cfg;

    const Json input = root.value("input", Json::object());
    reject_unknown_keys(input, "input", {"path", "format"});
    cfg.input.path = require_field<std::string>(input, "input", "path");
    if (cfg.input.path.empty()) bad("input.path must not be empty");
    try {
        cfg.input.format = integral_format_from_name(
            get_field<std::string>(input, "input", "format", "fcidump"));
    } catch (const ValidationError& e) {
        bad(e.what());
    }

    if (!root.contains("partition")) bad("config is missing required key 'partition'");
    const Json partition = root.at("partition");
    reject_unknown_keys(partition, "partition", {"n", "k"});
    cfg.partition.n = require_field<int>(partition, "partition", "n");
    cfg.partition.k = require_field<int>(partition, "partition", "k");
    if (cfg.partition.n < 1) bad("partition.n must be >= 1");
    if (cfg.partition.k < 0 || cfg.partition.k > cfg.partition.n)
        bad("partition.k must lie in 0..n");

    const Json h0 = root.value("h0", Json::object());
    reject_unknown_keys(h0, "h0", {"choice", "epsilons"});
    cfg.h0.choice = get_field<std::string>(h0, "h0", "choice", "diagonal");
    cfg.h0.epsilons = get_field<std::vector<double>>(h0, "h0", "epsilons", {});
    if (cfg.h0.choice == "diagonal") {
        if (!cfg.h0.epsilons.empty()) bad("h0.epsilons is only allowed with choice 'explicit'");
    } else if (cfg.h0.choice == "explicit") {
        if (cfg.h0.epsilons.size() != static_cast<std::size_t>(2 * cfg.partition.n))
            bad("h0.epsilons must list one energy per spin-orbital (" +
                std::to_string(2 * cfg.partition.n) + " entries)");
    } else {
        bad("h0.choice must be 'diagonal' or 'explicit', got '" + cfg.h0.choice + "'");
    }

    const Json solver = root.value("solver", Json::object());
    reject_unknown_keys(solver, "solver",
                        {"domain", "l", "tol", "max_iter", "body_rank", "bch_body_rank",
                         "level_shift", "denom_floor", "acceleration", "diis_window",
                         "series_tol"});
    const SolverOptions defaults;
    cfg.solver.domain =
        domain_from_name(get_field<std::string>(solver, "solver", "domain", "eod"));
    cfg.solver.l = get_field<int>(solver, "solver", "l", defaults.l);
    cfg.solver.tol = get_field<double>(solver, "solver", "tol", defaults.tol);
    cfg.solver.max_iter = get_field<int>(solver, "solver", "max_iter", defaults.max_iter);
    cfg.solver.body_rank = get_field<int>(solver, "solver", "body_rank", defaults.body_rank);
    cfg.solver.bch_body_rank =
        get_field<int>(solver, "solver", "bch_body_rank", defaults.bch_body_rank);
    cfg.solver.level_shift =
        get_field<double>(solver, "solver", "level_shift", defaults.level_shift);
    cfg.solver.denom_floor =
        get_field<double>(solver, "solver", "denom_floor", defaults.denom_floor);
    cfg.solver.acceleration =
        get_field<bool>(solver, "solver", "acceleration", defaults.acceleration);
    cfg.solver.diis_window =
        get_field<int>(solver, "solver", "diis_window", defaults.diis_window);
    cfg.solver.series_tol =
        get_field<double>(solver, "solver", "series_tol", defaults.series_tol);
    if (cfg.solver.l < 0) bad("solver.l must be >= 0");
    if (cfg.solver.tol <= 0) bad("solver.tol must be > 0");
    if (cfg.solver.max_iter < 1) bad("solver.max_iter must be >= 1");
    if (cfg.solver.body_rank < 0) bad("solver.body_rank must be >= 0");
    if (cfg.solver.bch_body_rank < 0) bad("solver.bch_body_rank must be >= 0");
    if (cfg.solver.level_shift < 0) bad("solver.level_shift must be >= 0");
    if (cfg.solver.denom_floor <= 0) bad("solver.denom_floor must be > 0");
    if (cfg.solver.diis_window < 1) bad("solver.diis_window must be >= 1");
    if (cfg.solver.series_tol <= 0) bad("solver.series_tol must be > 0");

    const Json auxiliary = root.value("auxiliary", Json::array());
    if (!auxiliary.is_array()) bad("auxiliary must be an array of terms");
    for (std::size_t i = 0; i < auxiliary.size(); ++i) {
        const std::string where = "auxiliary[" + std::to_string(i) + "]";
        const Json& term = auxiliary[i];
        if (!term.is_object()) bad(where + " must be an object");
        reject_unknown_keys(term, where.c_str(), {"coefficient", "creators", "annihilators"});
        if (!term.contains("coefficient")) bad(where + " is missing 'coefficient'");
        AuxiliaryTermConfig out;
        out.coefficient = parse_coefficient(term.at("coefficient"), where);
        out.creators = get_field<std::vector<int>>(term, where.c_str(), "creators", {});
        out.annihilators = get_field<std::vector<int>>(term, where.c_str(), "annihilators", {});
        for (const int p : out.creators)
            if (p < 1 || p > 2 * cfg.partition.n)
                bad(where + " creator index " + std::to_string(p) + " outside 1.." +
                    std::to_string(2 * cfg.partition.n));
        for (const int p : out.annihilators)
            if (p < 1 || p > 2 * cfg.partition.n)
                bad(where + " annihilator index " + std::to_string(p) + " outside 1.." +
                    std::to_string(2 * cfg.partition.n));
        cfg.auxiliary.push_back(std::move(out));
    }

    const Json evolution = root.value("evolution", Json::object());
    reject_unknown_keys(evolution, "evolution",
                        {"t", "pad", "r", "m", "sectors", "symmetrized", "shots"});
    const EvolutionConfig edefaults;
    cfg.evolution.t = get_field<double>(evolution, "evolution", "t", edefaults.t);
    cfg.evolution.pad = get_field<double>(evolution, "evolution", "pad", edefaults.pad);
    cfg.evolution.r = get_field<int>(evolution, "evolution", "r", edefaults.r);
    cfg.evolution.m = get_field<int>(evolution, "evolution", "m", edefaults.m);
    cfg.evolution.sectors = get_field<std::vector<int>>(evolution, "evolution", "sectors", {});
    cfg.evolution.symmetrized =
        get_field<bool>(evolution, "evolution", "symmetrized", edefaults.symmetrized);
    cfg.evolution.shots =
        get_field<std::uint64_t>(evolution, "evolution", "shots", edefaults.shots);
    if (cfg.evolution.pad < 0) bad("evolution.pad must be >= 0");
    if (cfg.evolution.r < 2 || cfg.evolution.r % 2 != 0)
        bad("evolution.r must be even and >= 2");
    if (cfg.evolution.m < 1 || cfg.evolution.m > 20) bad("evolution.m must lie in 1..20");
    for (const int s : cfg.evolution.sectors)
        if (s < 0 || s > 2 * cfg.partition.n)
            bad("evolution sector " + std::to_string(s) + " outside 0.." +
                std::to_string(2 * cfg.partition.n));

    const Json output = root.value("output", Json::object());
    reject_unknown_keys(output, "output", {"directory"});
    cfg.output_dir = get_field<std::string>(output, "output", "directory", cfg.output_dir);
    if (cfg.output_dir.empty()) bad("output.directory must not be empty");

    cfg.seed = get_field<std::uint64_t>(root, "config", "seed", 0);
    return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string RunConfig::to_json_text() const {
    Json root;
    root["input"] = {{"path", input.path}, {"format", to_string(input.format)}};
    root["partition"] = {{"n", partition.n}, {"k", partition.k}};
    Json h0_json;
    h0_json["choice"] = h0.choice;
    if (h0.choice == "explicit") h0_json["epsilons"] = h0.epsilons;
    root["h0"] = h0_json;
    root["solver"] = {{"domain", to_string(solver.domain)},
                      {"l", solver.l},
                      {"tol", solver.tol},
                      {"max_iter", solver.max_iter},
                      {"body_rank", solver.body_rank},
                      {"bch_body_rank", solver.bch_body_rank},
                      {"level_shift", solver.level_shift},
                      {"denom_floor", solver.denom_floor},
                      {"acceleration", solver.acceleration},
                      {"diis_window", solver.diis_window},
                      {"series_tol", solver.series_tol}};
    Json aux = Json::array();
    for (const AuxiliaryTermConfig& term : auxiliary)
        aux.push_back({{"coefficient", coefficient_json(term.coefficient)},
                       {"creators", term.creators},
                       {"annihilators", term.annihilators}});
    root["auxiliary"] = aux;
    root["evolution"] = {{"t", evolution.t},
                         {"pad", evolution.pad},
                         {"r", evolution.r},
                         {"m", evolution.m},
                         {"sectors", evolution.sectors},
                         {"symmetrized", evolution.symmetrized},
                         {"shots", evolution.shots}};
    root["output"] = {{"directory", output_dir}};
    root["seed"] = seed;
    return root.dump(2) + "\n";
}

std::string RunConfig::hash() const {
    const std::string text = to_json_text();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FermionOperator RunConfig::auxiliary_operator() const {
    FermionOperator c;
    for (const AuxiliaryTermConfig& term : auxiliary)
        c += FermionOperator::single(term.coefficient,
                                     TermKey{mask_of(term.creators), mask_of(term.annihilators)});
    FermionOperator out = c;
    out -= c.adjoint();
    out *= 0.5;
    return out;
}

} // namespace swrrst
