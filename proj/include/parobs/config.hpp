#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "parobs/errors.hpp"
#include "parobs/sysfile.hpp"

namespace parobs {

enum class Experiment { exp1_kcurves, exp2_efficiency, vw_compare };

inline std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::exp1_kcurves: return "exp1_kcurves";
        case Experiment::exp2_efficiency: return "exp2_efficiency";
        case Experiment::vw_compare: return "vw_compare";
    }
    return "?";
}

/// Experiment description; every field has a benchmark default, so an empty
/// file is a valid configuration.
struct ExperimentConfig {
    Experiment experiment = Experiment::exp1_kcurves;
    std::string system_file;              // empty: built-in benchmark plant
    double T = 1.0;
    double Tol = 1e-8;
    int N = 16;
    int fine_divisor = 5;                 // dt = dT / 2^fine_divisor
    std::vector<double> gamma_tilde = {1e-3, 1.0, 1e3};
    double gamma_tilde_base = 1024.0;     // fixed budget for the N / dt sweeps
    std::vector<int> N_list = {2, 4, 8, 16, 32};
    std::vector<int> fine_divisors = {3, 4, 5, 6, 7};
    std::vector<std::vector<double>> eig_sets = {{-2.0, -4.0}};
    int M_windows = 100;                  // variable-window budget
    double vw_dT = 1.0 / 16.0;
    std::vector<double> vw_eigs = {-0.8, -1.0};
    int N_cap = 4096;
};

namespace detail {

inline std::vector<std::vector<double>> parse_eig_sets(const std::string& s, int line,
                                                       int column) {
    std::vector<std::vector<double>> out;
    std::stringstream ss(s);
    std::string group;
    while (std::getline(ss, group, ';')) {
        if (group.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(parse_number_list(group, line, column));
    }
    if (out.empty()) throw ParseError("empty eigenvalue list", line, column);
    return out;
}

inline std::vector<int> parse_int_list(const std::string& s, int line, int column) {
    std::vector<int> out;
    for (double v : parse_number_list(s, line, column))
        out.push_back(static_cast<int>(v));
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    for (const auto& l : detail::read_kv_lines(in)) {
        const auto& k = l.key;
        const auto& v = l.value;
        if (k == "experiment") {
            if (v == "exp1_kcurves")
                cfg.experiment = Experiment::exp1_kcurves;
            else if (v == "exp2_efficiency")
                cfg.experiment = Experiment::exp2_efficiency;
            else if (v == "vw_compare")
                cfg.experiment = Experiment::vw_compare;
            else
                throw ParseError("unknown experiment '" + v + "'", l.line,
                                 l.value_column);
        } else if (k == "system") {
            cfg.system_file = v;
        } else if (k == "T") {
            cfg.T = detail::parse_number(v, l.line, l.value_column);
        } else if (k == "Tol") {
            cfg.Tol = detail::parse_number(v, l.line, l.value_column);
        } else if (k == "N") {
            cfg.N = static_cast<int>(detail::parse_number(v, l.line, l.value_column));
        } else if (k == "fine_divisor") {
            cfg.fine_divisor =
                static_cast<int>(detail::parse_number(v, l.line, l.value_column));
        } else if (k == "gamma_tilde") {
            cfg.gamma_tilde = detail::parse_number_list(v, l.line, l.value_column);
        } else if (k == "gamma_tilde_base") {
            cfg.gamma_tilde_base = detail::parse_number(v, l.line, l.value_column);
        } else if (k == "N_list") {
            cfg.N_list = detail::parse_int_list(v, l.line, l.value_column);
        } else if (k == "fine_divisors") {
            cfg.fine_divisors = detail::parse_int_list(v, l.line, l.value_column);
        } else if (k == "eigs") {
            cfg.eig_sets = detail::parse_eig_sets(v, l.line, l.value_column);
        } else if (k == "M_windows") {
            cfg.M_windows =
                static_cast<int>(detail::parse_number(v, l.line, l.value_column));
        } else if (k == "vw_dT") {
            cfg.vw_dT = detail::parse_number(v, l.line, l.value_column);
        } else if (k == "vw_eigs") {
            cfg.vw_eigs = detail::parse_number_list(v, l.line, l.value_column);
        } else if (k == "N_cap") {
            cfg.N_cap =
                static_cast<int>(detail::parse_number(v, l.line, l.value_column));
        } else {
            throw UnknownKey(k);
        }
    }
    if (cfg.gamma_tilde.empty() || cfg.N_list.empty() || cfg.fine_divisors.empty() ||
        cfg.eig_sets.empty())
        throw Error("sweep lists must be nonempty");
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file " + path);
    return parse_config(in);
}

}  // namespace parobs
