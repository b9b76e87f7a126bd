#include "pairs/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pairs/errors.hpp"

#include "json.hpp"

namespace pairs {

double ModelParams::sigma1_at(double x) const { return sigma1 * std::exp(theta1 * x); }
double ModelParams::sigma2_at(double y) const { return sigma2 * std::exp(theta2 * y); }
double ModelParams::z_value(double t, double x, double y) const { return a + b * t + x + beta * y; }

DerivedQuantities derive_quantities(const ModelParams& p) {
    DerivedQuantities d{};
    d.alpha = -p.delta1 - p.beta * p.delta2;
    const double drift_sum =
        p.b + p.mu1 - 0.5 * p.sigma1 * p.sigma1 + p.beta * (p.mu2 - 0.5 * p.sigma2 * p.sigma2);
    d.eta = d.alpha != 0.0 ? drift_sum / d.alpha : std::numeric_limits<double>::quiet_NaN();
    d.sigma_beta = std::sqrt(p.sigma1 * p.sigma1 + p.beta * p.beta * p.sigma2 * p.sigma2);
    d.c1 = p.sigma1 * p.sigma1 + p.beta * p.beta * p.sigma2 * p.sigma2 +
           2.0 * p.beta * p.rho * p.sigma1 * p.sigma2;
    const double one_minus_gamma = 1.0 - p.gamma;
    d.c2 = d.c1 != 0.0 ? d.alpha / (2.0 * one_minus_gamma * d.c1) : std::numeric_limits<double>::quiet_NaN();
    const double quad_delta =
        p.delta1 * p.delta1 / (p.sigma1 * p.sigma1) + p.delta2 * p.delta2 / (p.sigma2 * p.sigma2) -
        2.0 * p.rho * p.delta1 * p.delta2 / (p.sigma1 * p.sigma2);
    d.c0 = d.alpha * d.alpha / (2.0 * one_minus_gamma * one_minus_gamma * d.c1) -
           p.gamma / (2.0 * one_minus_gamma * one_minus_gamma * (1.0 - p.rho * p.rho)) * quad_delta;
    return d;
}

ValidationReport validate(const ModelParams& p) {
    ValidationReport rep;
    auto fail = [&rep](const std::string& msg) { rep.violations.push_back(msg); };

    if (!(p.sigma1 > 0.0)) fail("sigma1 must be positive");
    if (!(p.sigma2 > 0.0)) fail("sigma2 must be positive");
    if (!(p.rho > -1.0 && p.rho < 1.0)) fail("rho not in open interval (-1,1)");
    if (!(p.theta1 > -1.0 && p.theta1 <= 0.0)) fail("theta1 not in (-1,0]");
    if (!(p.theta2 > -1.0 && p.theta2 <= 0.0)) fail("theta2 not in (-1,0]");
    if (p.utility == Utility::Power) {
        if (!(p.gamma > 0.0 && p.gamma < 1.0)) fail("gamma not in (0,1) for power utility");
    } else {
        if (!(p.gamma > 0.0)) fail("gamma must be positive");
    }
    if (!(p.horizon > 0.0)) fail("horizon must be positive");

    const double alpha = -p.delta1 - p.beta * p.delta2;
    if (!(alpha > 0.0 && alpha < 2.0)) fail("alpha not in (0,2)");
    return rep;
}

void require_valid(const ModelParams& p) {
    const ValidationReport rep = validate(p);
    if (!rep.ok()) throw ValidationError("invalid parameters: " + rep.to_string());
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

std::string to_string(Utility u) { return u == Utility::Power ? "Power" : "Exponential"; }

Utility utility_from_string(const std::string& s) {
    if (s == "Power") return Utility::Power;
    if (s == "Exponential") return Utility::Exponential;
    throw ValidationError("unknown utility \"" + s + "\" (expected Power or Exponential)");
}

namespace {

using nlohmann::json;

ModelParams params_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("model parameters must be a JSON object");

    static const char* known[] = {"mu1",    "mu2",    "sigma1", "sigma2", "delta1", "delta2",
                                  "theta1", "theta2", "a",      "b",      "beta",   "rho",
                                  "r",      "gamma",  "utility", "horizon"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || (it.key() == k);
        if (!ok) throw ValidationError("unknown parameter key \"" + it.key() + "\"");
    }

    auto num = [&j](const char* key) {
        if (!j.contains(key)) throw ValidationError(std::string("missing parameter key \"") + key + "\"");
        if (!j.at(key).is_number()) throw ValidationError(std::string("parameter \"") + key + "\" must be a number");
        return j.at(key).get<double>();
    };

    ModelParams p;
    p.mu1 = num("mu1");
    p.mu2 = num("mu2");
    p.sigma1 = num("sigma1");
    p.sigma2 = num("sigma2");
    p.delta1 = num("delta1");
    p.delta2 = num("delta2");
    p.theta1 = j.contains("theta1") ? num("theta1") : 0.0;
    p.theta2 = j.contains("theta2") ? num("theta2") : 0.0;
    p.a = num("a");
    p.b = num("b");
    p.beta = num("beta");
    p.rho = num("rho");
    p.r = num("r");
    p.gamma = num("gamma");
    if (!j.contains("utility") || !j.at("utility").is_string())
        throw ValidationError("missing or non-string parameter key \"utility\"");
    p.utility = utility_from_string(j.at("utility").get<std::string>());
    p.horizon = num("horizon");
    return p;
}

}  // namespace

ModelParams params_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("bad JSON: ") + e.what());
    }
    return params_from_json(j);
}

ModelParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open parameter file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return params_from_json_text(buf.str());
}

std::string params_to_json_text(const ModelParams& p) {
    json j;
    j["mu1"] = p.mu1;
    j["mu2"] = p.mu2;
    j["sigma1"] = p.sigma1;
    j["sigma2"] = p.sigma2;
    j["delta1"] = p.delta1;
    j["delta2"] = p.delta2;
    j["theta1"] = p.theta1;
    j["theta2"] = p.theta2;
    j["a"] = p.a;
    j["b"] = p.b;
    j["beta"] = p.beta;
    j["rho"] = p.rho;
    j["r"] = p.r;
    j["gamma"] = p.gamma;
    j["utility"] = to_string(p.utility);
    j["horizon"] = p.horizon;
    return j.dump(2);
}

}  // namespace pairs
