// config.hpp
// JSON run configuration shared by the CLI subcommands: a "model" section
// (the parameter file schema), optional "grid", "backtest" and "gmm" sections.

#pragma once

#include <optional>
#include <string>

#include "pairs/gmm.hpp"
#include "pairs/model.hpp"
#include "pairs/pde.hpp"

namespace pairs {

struct BacktestConfig {
    double w0 = 1.0;
    double dt = 1.0 / 251.0;
};

struct RunConfig {
    ModelParams model;
    std::optional<GridSpec> grid;
    BacktestConfig backtest;
    GmmSettings gmm;
};

RunConfig config_from_json_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

}  // namespace pairs
