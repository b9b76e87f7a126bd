#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>

#include "pairs/errors.hpp"
#include "pairs/model.hpp"

#include "oracles.hpp"

using namespace pairs;

TEST_CASE("derived quantities for the reference parameter set") {
    const ModelParams p = oracles::reference_params();
    const DerivedQuantities d = derive_quantities(p);
    CHECK(d.alpha == doctest::Approx(0.16).epsilon(1e-14));
    // 0.09 + 0.36*0.1225 - 0.063
    CHECK(d.c1 == doctest::Approx(0.0711).epsilon(1e-12));
    CHECK(d.sigma_beta == doctest::Approx(std::sqrt(0.09 + 0.36 * 0.1225)).epsilon(1e-14));
    CHECK(d.c2 > 0.0);
    CHECK(std::isfinite(d.eta));
}

TEST_CASE("zero loadings give alpha zero and undefined eta") {
    ModelParams p = oracles::reference_params();
    p.delta1 = 0.0;
    p.delta2 = 0.0;
    const DerivedQuantities d = derive_quantities(p);
    CHECK(d.alpha == 0.0);
    CHECK(std::isnan(d.eta));
}

TEST_CASE("derive_quantities is pure and bitwise reproducible") {
    const ModelParams p = oracles::cev_params();
    const DerivedQuantities a = derive_quantities(p);
    const DerivedQuantities b = derive_quantities(p);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("validate reports every violation, not just the first") {
    ModelParams p = oracles::reference_params();
    CHECK(validate(p).ok());

    p.sigma1 = -1.0;
    p.rho = 2.0;
    p.gamma = 3.0;
    const ValidationReport rep = validate(p);
    CHECK(rep.violations.size() >= 3);

    ModelParams q = oracles::reference_params();
    q.delta1 = 0.0;
    q.delta2 = 0.0;
    const ValidationReport zero_alpha = validate(q);
    REQUIRE_FALSE(zero_alpha.ok());
    bool found = false;
    for (const auto& v : zero_alpha.violations) found = found || v.find("alpha not in (0,2)") != std::string::npos;
    CHECK(found);

    ModelParams r = oracles::reference_params();
    r.rho = 1.0;
    const ValidationReport bad_rho = validate(r);
    REQUIRE_FALSE(bad_rho.ok());
    bool rho_found = false;
    for (const auto& v : bad_rho.violations)
        rho_found = rho_found || v.find("rho not in open interval") != std::string::npos;
    CHECK(rho_found);
}

TEST_CASE("theta bounds: zero allowed, -1 and positive rejected") {
    ModelParams p = oracles::reference_params();
    p.theta1 = 0.0;
    CHECK(validate(p).ok());
    p.theta1 = -1.0;
    CHECK_FALSE(validate(p).ok());
    p.theta1 = 0.1;
    CHECK_FALSE(validate(p).ok());
}

TEST_CASE("c1 lower bound and sigma_beta ordering by the cross-term sign") {
    std::mt19937_64 gen(7);
    auto uni = [&gen](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
    };
    for (int trial = 0; trial < 200; ++trial) {
        ModelParams p = oracles::reference_params();
        p.sigma1 = uni(0.05, 1.0);
        p.sigma2 = uni(0.05, 1.0);
        p.beta = uni(-2.0, 2.0);
        p.rho = uni(-0.95, 0.95);
        const DerivedQuantities d = derive_quantities(p);
        const double sum_sq = p.sigma1 * p.sigma1 + p.beta * p.beta * p.sigma2 * p.sigma2;
        CHECK(d.c1 >= (1.0 - std::abs(p.rho)) * sum_sq - 1e-12);
        CHECK(d.c1 > 0.0);
        if (p.beta * p.rho >= 0.0)
            CHECK(d.sigma_beta * d.sigma_beta <= d.c1 + 1e-12);
        else
            CHECK(d.sigma_beta * d.sigma_beta >= d.c1 - 1e-12);
    }
}

TEST_CASE("json round trip and strict keys") {
    const ModelParams p = oracles::cev_params();
    const ModelParams q = params_from_json_text(params_to_json_text(p));
    CHECK(q.mu1 == p.mu1);
    CHECK(q.sigma2 == p.sigma2);
    CHECK(q.theta1 == p.theta1);
    CHECK(q.utility == p.utility);
    CHECK(q.horizon == p.horizon);

    CHECK_THROWS_AS(params_from_json_text(R"({"mu1": 1.0, "unknown_key": 2.0})"),
                    ValidationError);
    CHECK_THROWS_AS(params_from_json_text(R"({"mu1": 1.0})"), ValidationError);

    // thetas are the only defaulted keys
    const std::string no_theta = R"({
      "mu1": 0.2, "mu2": 0.08, "sigma1": 0.3, "sigma2": 0.35,
      "delta1": -0.1, "delta2": 0.1, "a": -0.01, "b": -0.01,
      "beta": -0.6, "rho": 0.5, "r": 0.01, "gamma": 0.1,
      "utility": "Power", "horizon": 1.0})";
    const ModelParams nt = params_from_json_text(no_theta);
    CHECK(nt.theta1 == 0.0);
    CHECK(nt.theta2 == 0.0);

    CHECK_THROWS_AS(utility_from_string("power"), ValidationError);
}
