#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxent.hpp"
#include "measure.hpp"

namespace thermoform {

// insertion-ordered so that emitted reports are byte-stable
using json = nlohmann::ordered_json;

// shortest decimal form that round-trips; used for CSV and plain prints
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline json parse_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("malformed JSON in " + path + ": " + e.what());
    }
}

inline unsigned get_uint(const json& j, const std::string& key, const std::string& ctx) {
    require(j.contains(key) && j[key].is_number_unsigned(),
            ctx + " needs an unsigned integer field \"" + key + "\"");
    return j[key].get<unsigned>();
}

inline std::vector<double> get_reals(const json& j, const std::string& key,
                                     const std::string& ctx) {
    require(j.contains(key) && j[key].is_array(),
            ctx + " needs an array field \"" + key + "\"");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        require(v.is_number(), ctx + ": \"" + key + "\" entries must be numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline FiniteMemoryFn fn_from_json(const json& j, const std::string& ctx) {
    unsigned d = get_uint(j, "alphabet", ctx);
    unsigned k = get_uint(j, "depth", ctx);
    std::vector<double> t = get_reals(j, "log_values", ctx);
    require(t.size() == word_count(d, k), ctx + ": log_values must have d^depth entries");
    return FiniteMemoryFn(d, k, std::move(t));
}

} // namespace detail

inline FiniteMemoryFn load_potential(const std::string& path) {
    return detail::fn_from_json(detail::parse_file(path), "potential file " + path);
}

inline json potential_to_json(const FiniteMemoryFn& f) {
    return json{{"alphabet", f.alphabet}, {"depth", f.depth}, {"log_values", f.table}};
}

inline SuitableMeasure load_measure(const std::string& path) {
    json j = detail::parse_file(path);
    std::string ctx = "measure file " + path;
    SuitableMeasure mu;
    mu.alphabet = detail::get_uint(j, "alphabet", ctx);
    mu.depth = detail::get_uint(j, "depth", ctx);
    std::vector<double> irn = detail::get_reals(j, "log_irn", ctx);
    require(irn.size() == word_count(mu.alphabet, mu.depth),
            ctx + ": log_irn must have d^depth entries");
    mu.log_irn = FiniteMemoryFn(mu.alphabet, mu.depth, std::move(irn));
    mu.base = detail::get_reals(j, "base", ctx);
    validate(mu);
    return mu;
}

inline json measure_to_json(const SuitableMeasure& mu) {
    return json{{"alphabet", mu.alphabet},
                {"depth", mu.depth},
                {"log_irn", mu.log_irn.table},
                {"base", mu.base}};
}

// column-stochastic matrix file; the convention field is mandatory so that
// nobody feeds a row-stochastic matrix in silently
inline std::pair<std::vector<double>, unsigned> load_matrix(const std::string& path) {
    json j = detail::parse_file(path);
    std::string ctx = "matrix file " + path;
    require(j.contains("convention") && j["convention"].is_string(),
            ctx + " needs a string field \"convention\"");
    require(j["convention"].get<std::string>() == "column",
            ctx + ": only the \"column\" convention is accepted");
    require(j.contains("matrix") && j["matrix"].is_array(), ctx + " needs a \"matrix\" array");
    const auto& rows = j["matrix"];
    unsigned d = static_cast<unsigned>(rows.size());
    require(d >= 1, ctx + ": matrix is empty");
    std::vector<double> p;
    for (const auto& row : rows) {
        require(row.is_array() && row.size() == d, ctx + ": matrix must be square");
        for (const auto& v : row) {
            require(v.is_number(), ctx + ": matrix entries must be numbers");
            p.push_back(v.get<double>());
        }
    }
    return {std::move(p), d};
}

inline PotentialFamily load_family(const std::string& path) {
    json j = detail::parse_file(path);
    std::string ctx = "family file " + path;
    PotentialFamily fam;
    fam.alphabet = detail::get_uint(j, "alphabet", ctx);
    require(j.contains("constraints") && j["constraints"].is_array() &&
                !j["constraints"].empty(),
            ctx + " needs a non-empty \"constraints\" array");
    for (const auto& c : j["constraints"]) {
        FiniteMemoryFn f = detail::fn_from_json(c, ctx + " constraint");
        require(f.alphabet == fam.alphabet, ctx + ": constraint alphabet mismatch");
        fam.constraints.push_back(std::move(f));
    }
    if (j.contains("generator")) {
        const auto& g = j["generator"];
        require(g.is_object() && g.contains("kind") && g["kind"] == "affine",
                ctx + ": generator must be an object with kind \"affine\"");
        fam.gen_base = detail::fn_from_json(g.at("base"), ctx + " generator base");
        fam.gen_direction =
            detail::fn_from_json(g.at("direction"), ctx + " generator direction");
        require(fam.gen_base.alphabet == fam.alphabet &&
                    fam.gen_direction.alphabet == fam.alphabet,
                ctx + ": generator alphabet mismatch");
        fam.has_generator = true;
    }
    return fam;
}

// comma-separated reals, also accepting "logspace:lo:hi:count"
inline std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.rfind("logspace:", 0) == 0) {
        std::istringstream in(text.substr(9));
        std::string lo_s, hi_s, n_s;
        require(std::getline(in, lo_s, ':') && std::getline(in, hi_s, ':') &&
                    std::getline(in, n_s, ':'),
                "logspace grid needs logspace:lo:hi:count");
        double lo = std::stod(lo_s), hi = std::stod(hi_s);
        int n = std::stoi(n_s);
        require(lo > 0 && hi > 0 && n >= 2, "logspace grid needs lo,hi > 0 and count >= 2");
        for (int i = 0; i < n; ++i)
            out.push_back(std::exp(std::log(lo) +
                                   (std::log(hi) - std::log(lo)) * i / (n - 1)));
        // pin the endpoints so round-trip rounding cannot push them outside
        // a closed range the caller asked for
        out.front() = lo;
        out.back() = hi;
        return out;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw validation_error("cannot parse grid value \"" + item + "\"");
        }
    }
    require(!out.empty(), "grid is empty");
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    require(out.good(), "cannot write " + path);
    out << text;
}

} // namespace thermoform
