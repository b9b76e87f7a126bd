#include "pairs/config.hpp"

#include <fstream>
#include <sstream>

#include "pairs/errors.hpp"

#include "json.hpp"

namespace pairs {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& section) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || (it.key() == k);
        if (!ok)
            throw ValidationError("unknown key \"" + it.key() + "\" in " + section + " section");
    }
}

double num_at(const json& j, const char* key, const std::string& section) {
    if (!j.contains(key))
        throw ValidationError("missing key \"" + std::string(key) + "\" in " + section);
    if (!j.at(key).is_number())
        throw ValidationError("key \"" + std::string(key) + "\" in " + section +
                              " must be a number");
    return j.at(key).get<double>();
}

GridSpec grid_from_json(const json& j) {
    reject_unknown(j, {"xmin", "xmax", "ymin", "ymax", "I", "J", "K"}, "grid");
    GridSpec g;
    g.xmin = num_at(j, "xmin", "grid");
    g.xmax = num_at(j, "xmax", "grid");
    g.ymin = num_at(j, "ymin", "grid");
    g.ymax = num_at(j, "ymax", "grid");
    g.nx = static_cast<int>(num_at(j, "I", "grid"));
    g.ny = static_cast<int>(num_at(j, "J", "grid"));
    g.nt = static_cast<int>(num_at(j, "K", "grid"));
    return g;
}

GmmSettings gmm_from_json(const json& j) {
    reject_unknown(j,
                   {"mode", "nw_lag", "nw_weights", "selection", "seed", "restarts", "max_evals"},
                   "gmm");
    GmmSettings s;
    if (j.contains("mode")) s.mode = gmm_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("nw_lag")) s.nw_lag = j.at("nw_lag").get<int>();
    if (j.contains("nw_weights")) {
        const std::string w = j.at("nw_weights").get<std::string>();
        if (w == "narrow")
            s.nw_weights = NwWeights::Narrow;
        else if (w == "standard")
            s.nw_weights = NwWeights::Standard;
        else
            throw ValidationError("nw_weights must be \"narrow\" or \"standard\"");
    }
    if (j.contains("selection")) s.selection = j.at("selection").get<std::vector<int>>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("restarts")) s.restarts = j.at("restarts").get<int>();
    if (j.contains("max_evals")) s.max_evals = j.at("max_evals").get<int>();
    return s;
}

}  // namespace

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("bad JSON config: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    reject_unknown(j, {"model", "grid", "backtest", "gmm"}, "top-level");
    if (!j.contains("model")) throw ValidationError("config is missing the \"model\" section");

    RunConfig cfg;
    cfg.model = params_from_json_text(j.at("model").dump());
    if (j.contains("grid")) cfg.grid = grid_from_json(j.at("grid"));
    if (j.contains("backtest")) {
        const json& b = j.at("backtest");
        reject_unknown(b, {"w0", "dt"}, "backtest");
        if (b.contains("w0")) cfg.backtest.w0 = b.at("w0").get<double>();
        if (b.contains("dt")) cfg.backtest.dt = b.at("dt").get<double>();
    }
    if (j.contains("gmm")) cfg.gmm = gmm_from_json(j.at("gmm"));
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

}  // namespace pairs
