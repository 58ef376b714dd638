#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "parobs/errors.hpp"
#include "parobs/lti.hpp"
#include "parobs/signal.hpp"

namespace parobs {

/// A parsed system specification: the plant, the observer initial guess, and
/// the requested spectrum of A - L C.
struct SystemSpec {
    LtiSystem sys;
    Vector xhat0;
    std::vector<double> eigs;
    double input_offset = 0.0;
    double input_amplitude = 0.0;
    double input_frequency = 0.0;
};

namespace detail {

struct KvLine {
    std::string key;
    std::string value;
    int line;
    int value_column;
};

inline std::vector<KvLine> read_kv_lines(std::istream& in) {
    std::vector<KvLine> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = line;
        if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
        if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", lineno, 1);
        auto trim = [](std::string t) {
            const auto b = t.find_first_not_of(" \t\r");
            const auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
        };
        KvLine kv;
        kv.key = trim(s.substr(0, eq));
        kv.value = trim(s.substr(eq + 1));
        kv.line = lineno;
        kv.value_column = static_cast<int>(eq) + 2;
        if (kv.key.empty()) throw ParseError("empty key", lineno, 1);
        out.push_back(std::move(kv));
    }
    return out;
}

inline double parse_number(const std::string& s, int line, int column) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used])))
            ++used;
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + s + "'", line, column);
    }
}

inline std::vector<double> parse_number_list(const std::string& s, int line,
                                             int column) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_number(item, line, column));
    if (out.empty()) throw ParseError("empty list", line, column);
    return out;
}

inline Matrix parse_matrix(const std::string& key, const std::string& s, int rows,
                           int cols, int line, int column) {
    const std::vector<double> v = parse_number_list(s, line, column);
    if (static_cast<int>(v.size()) != rows * cols)
        throw ParseError("key '" + key + "' expects " + std::to_string(rows * cols) +
                             " entries, got " + std::to_string(v.size()),
                         line, column);
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = v[r * cols + c];
    return m;
}

}  // namespace detail

/// Parses the plain-text system format: keys m, A (row-major), B, C, x0_true,
/// xhat0, eigs and input = const+amp*sin(freq*t). Unknown keys are rejected.
inline SystemSpec parse_system_spec(std::istream& in) {
    const auto lines = detail::read_kv_lines(in);
    std::map<std::string, detail::KvLine> kv;
    static const std::vector<std::string> known = {"m",       "A",     "B",
                                                   "C",       "x0_true", "xhat0",
                                                   "eigs",    "input"};
    for (const auto& l : lines) {
        bool ok = false;
        for (const auto& k : known) ok = ok || k == l.key;
        if (!ok) throw UnknownKey(l.key);
        if (kv.count(l.key))
            throw ParseError("duplicate key '" + l.key + "'", l.line, 1);
        kv.emplace(l.key, l);
    }
    for (const auto& k : known)
        if (!kv.count(k)) throw Error("missing key: " + k);

    const auto& mkv = kv.at("m");
    const int m = static_cast<int>(
        detail::parse_number(mkv.value, mkv.line, mkv.value_column));
    if (m < 2) throw ParseError("m must be >= 2", mkv.line, mkv.value_column);

    SystemSpec spec;
    auto mat = [&](const std::string& key, int rows, int cols) {
        const auto& l = kv.at(key);
        return detail::parse_matrix(key, l.value, rows, cols, l.line, l.value_column);
    };
    spec.sys.A = mat("A", m, m);
    spec.sys.B = mat("B", m, 1);
    spec.sys.C = mat("C", 1, m);
    spec.sys.x0_true = mat("x0_true", m, 1).col(0);
    spec.xhat0 = mat("xhat0", m, 1).col(0);
    {
        const auto& l = kv.at("eigs");
        spec.eigs = detail::parse_number_list(l.value, l.line, l.value_column);
        if (static_cast<int>(spec.eigs.size()) != m)
            throw ParseError("eigs expects " + std::to_string(m) + " values", l.line,
                             l.value_column);
    }
    {
        const auto& l = kv.at("input");
        std::string v = l.value;
        std::string compact;
        for (char c : v)
            if (!std::isspace(static_cast<unsigned char>(c))) compact.push_back(c);
        static const std::regex form(
            R"(^([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\+([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\*sin\(([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\*t\)$)");
        std::smatch match;
        if (!std::regex_match(compact, match, form))
            throw ParseError("input must have the form const+amp*sin(freq*t)", l.line,
                             l.value_column);
        spec.input_offset = detail::parse_number(match[1], l.line, l.value_column);
        spec.input_amplitude = detail::parse_number(match[2], l.line, l.value_column);
        spec.input_frequency = detail::parse_number(match[3], l.line, l.value_column);
        spec.sys.input = sine_signal(spec.input_offset, spec.input_amplitude,
                                     spec.input_frequency);
    }
    spec.sys.validate();
    return spec;
}

inline SystemSpec parse_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open system file " + path);
    return parse_system_spec(in);
}

/// The benchmark plant used throughout the experiment suite.
inline SystemSpec default_system_spec(std::vector<double> eigs = {-2.0, -4.0}) {
    SystemSpec spec;
    spec.sys.A.resize(2, 2);
    spec.sys.A << 0.0, 1.0, -1.0, -2.0;
    spec.sys.B.resize(2, 1);
    spec.sys.B << 0.0, 1.0;
    spec.sys.C.resize(1, 2);
    spec.sys.C << 0.0, 1.0;
    spec.sys.x0_true = Vector::Zero(2);
    spec.xhat0.resize(2);
    spec.xhat0 << 2.0, 1.0;
    spec.input_offset = 3.0;
    spec.input_amplitude = 0.5;
    spec.input_frequency = 0.75;
    spec.sys.input = sine_signal(3.0, 0.5, 0.75);
    spec.eigs = std::move(eigs);
    return spec;
}

}  // namespace parobs
